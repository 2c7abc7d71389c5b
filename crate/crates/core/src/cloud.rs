//! The memory-bounded frustration cloud and the tree-sampling driver.
//!
//! A cloud maps a serialized balanced state to how often it was produced and
//! how many sign switches it costs. Capacity is a number of entries derived
//! from a byte budget ([`derive_f_max`]). At capacity a new state is admitted
//! only if it beats the worst stored state, which is then evicted; repeats of
//! a stored state always bump its count.

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::balance::balance_with_tree;
use crate::error::{Error, Result};
use crate::graph::{serialize_state, SignedGraph};
use crate::sampling::{require_connected, sample_tree, SamplerMethod};

/// Bookkeeping bytes charged per entry on top of the key length.
pub const ENTRY_OVERHEAD_BYTES: u64 = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ByteBudget {
    Unlimited,
    Bytes(u64),
}

/// How many entries of `key_len` bytes fit in `budget`.
pub fn derive_f_max(budget: u64, key_len: usize) -> Result<usize> {
    let per_entry = key_len as u64 + ENTRY_OVERHEAD_BYTES;
    if budget < per_entry {
        return Err(Error::Budget {
            budget,
            needed: per_entry,
        });
    }
    Ok(usize::try_from(budget / per_entry).unwrap_or(usize::MAX))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CloudEntry {
    pub count: u64,
    pub switches: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum InsertOutcome {
    Incremented,
    Inserted,
    /// Inserted after evicting the named key.
    Evicted(Arc<str>),
    Discarded,
}

#[derive(Clone, Debug)]
enum Capacity {
    Budget(ByteBudget),
    Fixed,
}

#[derive(Clone, Debug)]
pub struct FrustrationCloud {
    entries: HashMap<Arc<str>, CloudEntry>,
    // Ordered by (switches, key); the last element is the eviction victim.
    ranked: BTreeSet<(usize, Arc<str>)>,
    capacity: Capacity,
    f_max: Option<usize>,
    bytes_used: u64,
    evictions: u64,
    discards: u64,
}

impl FrustrationCloud {
    /// Capacity is derived from `budget` at the first insertion.
    pub fn new(budget: ByteBudget) -> FrustrationCloud {
        let f_max = match budget {
            ByteBudget::Unlimited => Some(usize::MAX),
            ByteBudget::Bytes(_) => None,
        };
        FrustrationCloud {
            entries: HashMap::new(),
            ranked: BTreeSet::new(),
            capacity: Capacity::Budget(budget),
            f_max,
            bytes_used: 0,
            evictions: 0,
            discards: 0,
        }
    }

    /// A cloud holding at most `f_max` entries regardless of key size.
    pub fn with_f_max(f_max: usize) -> FrustrationCloud {
        FrustrationCloud {
            capacity: Capacity::Fixed,
            f_max: Some(f_max),
            ..FrustrationCloud::new(ByteBudget::Unlimited)
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Capacity in entries; `None` until the first key fixes it.
    pub fn f_max(&self) -> Option<usize> {
        self.f_max
    }

    /// Estimated bytes held. Only the entry count is enforced, so this can
    /// drift past the budget when later keys are longer than the first.
    pub fn bytes_used(&self) -> u64 {
        self.bytes_used
    }

    pub fn evictions(&self) -> u64 {
        self.evictions
    }

    pub fn discards(&self) -> u64 {
        self.discards
    }

    pub fn get(&self, key: &str) -> Option<CloudEntry> {
        self.entries.get(key).copied()
    }

    pub fn total_count(&self) -> u64 {
        self.entries.values().map(|e| e.count).sum()
    }

    /// Entries ordered by switch count, then key.
    pub fn iter_ranked(&self) -> impl Iterator<Item = (&str, CloudEntry)> + '_ {
        self.ranked.iter().map(|(_, k)| (&**k, self.entries[k]))
    }

    pub fn frustration_index(&self) -> Result<usize> {
        self.ranked
            .first()
            .map(|(s, _)| *s)
            .ok_or(Error::EmptyCloud)
    }

    pub fn insert(&mut self, key: &str, switches: usize) -> Result<InsertOutcome> {
        self.insert_counted(key, 1, switches)
    }

    /// Adds `count` occurrences of `key`.
    pub fn insert_counted(
        &mut self,
        key: &str,
        count: u64,
        switches: usize,
    ) -> Result<InsertOutcome> {
        if let Some(entry) = self.entries.get_mut(key) {
            entry.count += count;
            return Ok(InsertOutcome::Incremented);
        }
        let f_max = match self.f_max {
            Some(f) => f,
            None => {
                let Capacity::Budget(ByteBudget::Bytes(b)) = self.capacity else {
                    unreachable!("only byte budgets defer capacity")
                };
                let f = derive_f_max(b, key.len())?;
                self.f_max = Some(f);
                f
            }
        };
        if f_max == 0 {
            self.discards += 1;
            return Ok(InsertOutcome::Discarded);
        }

        let mut outcome = InsertOutcome::Inserted;
        if self.entries.len() >= f_max {
            let worst = self.ranked.last().expect("full cloud has entries").0;
            if switches >= worst {
                self.discards += 1;
                return Ok(InsertOutcome::Discarded);
            }
            let (_, victim) = self.ranked.pop_last().expect("checked above");
            self.entries.remove(&victim);
            self.bytes_used -= victim.len() as u64 + ENTRY_OVERHEAD_BYTES;
            self.evictions += 1;
            outcome = InsertOutcome::Evicted(victim);
        }
        let key: Arc<str> = Arc::from(key);
        self.bytes_used += key.len() as u64 + ENTRY_OVERHEAD_BYTES;
        self.ranked.insert((switches, key.clone()));
        self.entries.insert(key, CloudEntry { count, switches });
        Ok(outcome)
    }

    /// Folds `other` in, best entries first, counting its evictions and discards.
    pub fn merge(&mut self, other: FrustrationCloud) -> Result<()> {
        for (key, entry) in other.iter_ranked() {
            self.insert_counted(key, entry.count, entry.switches)?;
        }
        self.evictions += other.evictions;
        self.discards += other.discards;
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphBppConfig {
    pub method: SamplerMethod,
    pub iterations: usize,
    pub budget: ByteBudget,
    pub seed: u64,
    pub workers: usize,
    /// Fixed root for every tree; `None` uses the sampler's default.
    pub root: Option<u32>,
}

impl GraphBppConfig {
    pub fn new(method: SamplerMethod, iterations: usize, seed: u64) -> GraphBppConfig {
        GraphBppConfig {
            method,
            iterations,
            budget: ByteBudget::Unlimited,
            seed,
            workers: 1,
            root: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub frustration_index: usize,
    pub best_state_key: String,
    /// First iteration that produced the best state.
    pub best_iteration: usize,
    pub iterations: usize,
    pub method: SamplerMethod,
    pub distinct_states: usize,
    pub evictions: u64,
    pub discards: u64,
    pub failed_iterations: usize,
    /// Elapsed time; kept out of serialized reports so they stay reproducible.
    #[serde(skip)]
    pub wall_time_secs: f64,
}

struct Best {
    switches: usize,
    iteration: usize,
    key: String,
}

struct Partial {
    cloud: FrustrationCloud,
    best: Option<Best>,
    failed: usize,
    last_error: Option<String>,
}

fn run_range(
    g: &SignedGraph,
    cfg: &GraphBppConfig,
    budget: ByteBudget,
    range: std::ops::Range<usize>,
) -> Result<Partial> {
    let mut part = Partial {
        cloud: FrustrationCloud::new(budget),
        best: None,
        failed: 0,
        last_error: None,
    };
    for it in range {
        let tree = match sample_tree(g, cfg.method, cfg.seed, it as u64, cfg.root) {
            Ok(t) => t,
            Err(e) => {
                part.failed += 1;
                part.last_error = Some(e.to_string());
                continue;
            }
        };
        let state = balance_with_tree(g, &tree);
        let key = serialize_state(g, &state.signs)?;
        // Strict `<` keeps the earliest iteration on ties.
        if part
            .best
            .as_ref()
            .is_none_or(|b| state.switch_count < b.switches)
        {
            part.best = Some(Best {
                switches: state.switch_count,
                iteration: it,
                key: key.clone(),
            });
        }
        part.cloud.insert(&key, state.switch_count)?;
    }
    Ok(part)
}

/// Samples `cfg.iterations` trees, balances against each, and collects the
/// resulting states in a cloud.
///
/// Iteration `i` always uses random stream `(seed, i)`. With several workers
/// the iterations are split into contiguous ranges, each worker fills a
/// private cloud with an equal share of the budget, and the partial clouds
/// are merged in worker order. The best state is tracked outside the cloud,
/// so eviction can never lose it.
pub fn run_graphbpp(
    g: &SignedGraph,
    cfg: &GraphBppConfig,
) -> Result<(RunReport, FrustrationCloud)> {
    if cfg.iterations == 0 {
        return Err(Error::InvalidConfig("iterations must be at least 1".into()));
    }
    if cfg.workers == 0 {
        return Err(Error::InvalidConfig("workers must be at least 1".into()));
    }
    require_connected(g)?;
    let start = Instant::now();
    let workers = cfg.workers.min(cfg.iterations);

    let partials: Vec<Partial> = if workers == 1 {
        vec![run_range(g, cfg, cfg.budget, 0..cfg.iterations)?]
    } else {
        let share = match cfg.budget {
            ByteBudget::Unlimited => ByteBudget::Unlimited,
            ByteBudget::Bytes(b) => ByteBudget::Bytes(b / workers as u64),
        };
        let bounds: Vec<usize> = (0..=workers)
            .map(|w| w * cfg.iterations / workers)
            .collect();
        std::thread::scope(|scope| {
            let handles: Vec<_> = (0..workers)
                .map(|w| {
                    let range = bounds[w]..bounds[w + 1];
                    scope.spawn(move || run_range(g, cfg, share, range))
                })
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("worker panicked"))
                .collect::<Result<Vec<_>>>()
        })?
    };

    let mut cloud = FrustrationCloud::new(cfg.budget);
    let mut best: Option<Best> = None;
    let mut failed = 0;
    let mut last_error = None;
    for part in partials {
        failed += part.failed;
        if part.last_error.is_some() {
            last_error = part.last_error;
        }
        if let Some(b) = part.best {
            if best.as_ref().is_none_or(|cur| b.switches < cur.switches) {
                best = Some(b);
            }
        }
        if workers == 1 {
            cloud = part.cloud;
        } else {
            cloud.merge(part.cloud)?;
        }
    }

    let Some(best) = best else {
        return Err(Error::AllIterationsFailed {
            failed,
            last: last_error.unwrap_or_else(|| "unknown".into()),
        });
    };
    let report = RunReport {
        frustration_index: best.switches,
        best_state_key: best.key,
        best_iteration: best.iteration,
        iterations: cfg.iterations,
        method: cfg.method,
        distinct_states: cloud.len(),
        evictions: cloud.evictions(),
        discards: cloud.discards(),
        failed_iterations: failed,
        wall_time_secs: start.elapsed().as_secs_f64(),
    };
    Ok((report, cloud))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sign::Sign::{Negative as N, Positive as P};

    #[test]
    fn first_insert_and_repeat() {
        let mut c = FrustrationCloud::new(ByteBudget::Unlimited);
        assert_eq!(c.insert("A", 3).unwrap(), InsertOutcome::Inserted);
        assert_eq!(
            c.get("A"),
            Some(CloudEntry {
                count: 1,
                switches: 3
            })
        );
        assert_eq!(c.insert("A", 3).unwrap(), InsertOutcome::Incremented);
        assert_eq!(
            c.get("A"),
            Some(CloudEntry {
                count: 2,
                switches: 3
            })
        );
    }

    #[test]
    fn full_cloud_evicts_worst() {
        let mut c = FrustrationCloud::with_f_max(1);
        c.insert("A", 3).unwrap();
        assert_eq!(
            c.insert("B", 2).unwrap(),
            InsertOutcome::Evicted(Arc::from("A"))
        );
        assert_eq!(c.len(), 1);
        assert_eq!(
            c.get("B"),
            Some(CloudEntry {
                count: 1,
                switches: 2
            })
        );
        assert_eq!(c.evictions(), 1);
    }

    #[test]
    fn full_cloud_discards_no_better() {
        let mut c = FrustrationCloud::with_f_max(2);
        c.insert("A", 3).unwrap();
        c.insert("B", 1).unwrap();
        assert_eq!(c.insert("C", 3).unwrap(), InsertOutcome::Discarded);
        assert_eq!(c.insert("D", 4).unwrap(), InsertOutcome::Discarded);
        assert_eq!(c.discards(), 2);
        assert_eq!(c.evictions(), 0);
        // Repeats of the worst entry still count.
        assert_eq!(c.insert("A", 3).unwrap(), InsertOutcome::Incremented);
        assert_eq!(c.get("A").unwrap().count, 2);
    }

    #[test]
    fn eviction_ties_take_largest_key() {
        let mut c = FrustrationCloud::with_f_max(2);
        c.insert("A", 5).unwrap();
        c.insert("B", 5).unwrap();
        assert_eq!(
            c.insert("C", 1).unwrap(),
            InsertOutcome::Evicted(Arc::from("B"))
        );
    }

    #[test]
    fn minimum_over_entries() {
        let mut c = FrustrationCloud::new(ByteBudget::Unlimited);
        assert!(matches!(c.frustration_index(), Err(Error::EmptyCloud)));
        c.insert("A", 3).unwrap();
        for _ in 0..4 {
            c.insert("B", 2).unwrap();
        }
        assert_eq!(c.frustration_index().unwrap(), 2);

        let mut z = FrustrationCloud::new(ByteBudget::Unlimited);
        z.insert("A", 0).unwrap();
        assert_eq!(z.frustration_index().unwrap(), 0);
    }

    #[test]
    fn f_max_derivation() {
        assert_eq!(derive_f_max(10_000, 36).unwrap(), 100);
        assert_eq!(derive_f_max(36 + 64, 36).unwrap(), 1);
        assert!(matches!(derive_f_max(0, 36), Err(Error::Budget { .. })));
    }

    #[test]
    fn byte_budget_fixes_capacity_from_first_key() {
        let mut c = FrustrationCloud::new(ByteBudget::Bytes(2 * (4 + 64)));
        c.insert("aaaa", 4).unwrap();
        assert_eq!(c.f_max(), Some(2));
        c.insert("bbbb", 3).unwrap();
        c.insert("cccc", 1).unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(c.bytes_used(), 2 * 68);
        assert!(c.get("aaaa").is_none());
    }

    #[test]
    fn oversized_key_is_a_budget_error() {
        let mut c = FrustrationCloud::new(ByteBudget::Bytes(10));
        assert!(matches!(c.insert("A", 0), Err(Error::Budget { .. })));
    }

    #[test]
    fn tree_graph_run() {
        let g = SignedGraph::new(4, &[(0, 1, N), (1, 2, P), (2, 3, N)]).unwrap();
        for m in SamplerMethod::ALL {
            let (report, cloud) = run_graphbpp(&g, &GraphBppConfig::new(m, 10, 3)).unwrap();
            assert_eq!(report.frustration_index, 0);
            assert_eq!(cloud.len(), 1);
            assert_eq!(cloud.iter_ranked().next().unwrap().1.count, 10);
        }
    }

    #[test]
    fn rejects_bad_config() {
        let g = SignedGraph::new(2, &[(0, 1, N)]).unwrap();
        let mut cfg = GraphBppConfig::new(SamplerMethod::Bfs, 0, 0);
        assert!(run_graphbpp(&g, &cfg).is_err());
        cfg.iterations = 1;
        cfg.workers = 0;
        assert!(run_graphbpp(&g, &cfg).is_err());
        let split = SignedGraph::new(4, &[(0, 1, N), (2, 3, P)]).unwrap();
        assert!(matches!(
            run_graphbpp(&split, &GraphBppConfig::new(SamplerMethod::Bfs, 1, 0)),
            Err(Error::Disconnected { .. })
        ));
    }

    #[test]
    fn worker_count_does_not_change_unbounded_result() {
        let g = SignedGraph::new(
            5,
            &[
                (0, 1, N),
                (1, 2, P),
                (2, 3, N),
                (3, 4, P),
                (0, 4, N),
                (0, 2, N),
                (1, 3, N),
                (2, 4, P),
            ],
        )
        .unwrap();
        let mut cfg = GraphBppConfig::new(SamplerMethod::Rdfs, 64, 11);
        let (mut r1, c1) = run_graphbpp(&g, &cfg).unwrap();
        cfg.workers = 4;
        let (mut r4, c4) = run_graphbpp(&g, &cfg).unwrap();
        r1.wall_time_secs = 0.0;
        r4.wall_time_secs = 0.0;
        assert_eq!(r1, r4);
        let a: Vec<_> = c1.iter_ranked().map(|(k, e)| (k.to_string(), e)).collect();
        let b: Vec<_> = c4.iter_ranked().map(|(k, e)| (k.to_string(), e)).collect();
        assert_eq!(a, b);
    }
}
