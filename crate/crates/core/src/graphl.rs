//! Gradient-descent balancing.
//!
//! Each vertex gets a real value `gamma_i`. The relaxed imbalance
//! `L = sum over edges (1 - e_ij * gamma_i * gamma_j) / 2` is minimized by plain
//! gradient descent with `dL/dgamma_i = -1/2 * sum_j gamma_j * e_ij`. Afterwards
//! each vertex takes the sign of its value (zero counts as positive), and
//! every edge that disagrees with its endpoints' sides is flipped.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::balance::frustration_of_assignment;
use crate::error::{Error, Result};
use crate::graph::SignedGraph;
use crate::rng::stream_rng;
use crate::sign::{Sign, VertexAssignment};

/// Relaxed vertex values, one per vertex.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GammaVector(pub Vec<f64>);

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphLConfig {
    /// Learning rate.
    pub alpha: f64,
    /// Number of gradient updates.
    pub lambda: usize,
    pub seed: u64,
    pub restarts: usize,
    /// Record the discretized loss before every update.
    pub record_trace: bool,
}

impl Default for GraphLConfig {
    fn default() -> GraphLConfig {
        GraphLConfig {
            alpha: 0.001,
            lambda: 1000,
            seed: 0,
            restarts: 5,
            record_trace: true,
        }
    }
}

impl GraphLConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha.is_finite() && self.alpha > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "alpha must be positive, got {}",
                self.alpha
            )));
        }
        if self.restarts == 0 {
            return Err(Error::InvalidConfig("restarts must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphLResult {
    pub frustration: usize,
    pub theta: VertexAssignment,
    pub balanced_signs: Vec<Sign>,
    /// Discretized loss before each update.
    pub loss_trace: Vec<usize>,
    /// Which restart produced this result.
    pub restart_index: usize,
    pub restart_frustrations: Vec<usize>,
}

/// Values i.i.d. uniform on `[-1, 1]`, fixed by `seed`.
pub fn init_gamma(n: usize, seed: u64) -> Result<GammaVector> {
    if n == 0 {
        return Err(Error::InvalidConfig(
            "cannot initialize an empty graph".into(),
        ));
    }
    let mut rng = stream_rng(seed, 0);
    Ok(GammaVector(
        (0..n).map(|_| rng.gen_range(-1.0..=1.0)).collect(),
    ))
}

pub fn relaxed_loss(g: &SignedGraph, gamma: &GammaVector) -> f64 {
    let x = &gamma.0;
    assert_eq!(x.len(), g.vertex_count(), "one value per vertex");
    g.edges()
        .iter()
        .map(|e| (1.0 - e.sign.as_f64() * x[e.src as usize] * x[e.tgt as usize]) / 2.0)
        .sum()
}

fn gradient_into(g: &SignedGraph, x: &[f64], out: &mut [f64]) {
    for (v, slot) in out.iter_mut().enumerate() {
        let (ns, ss, _) = g.neighbor_slices(v);
        let mut acc = 0.0;
        for (&w, &s) in ns.iter().zip(ss) {
            acc += x[w as usize] * s.as_f64();
        }
        *slot = -0.5 * acc;
    }
}

/// `dL/dgamma`; every edge contributes to both of its endpoints.
pub fn gradient(g: &SignedGraph, gamma: &GammaVector) -> Vec<f64> {
    assert_eq!(gamma.0.len(), g.vertex_count(), "one value per vertex");
    let mut out = vec![0.0; g.vertex_count()];
    gradient_into(g, &gamma.0, &mut out);
    out
}

/// `+1` where the value is not below zero (so `-0.0` maps to `+1`).
pub fn discretize(gamma: &GammaVector) -> Result<VertexAssignment> {
    gamma
        .0
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            if x.is_nan() {
                Err(Error::NotANumber { index: i })
            } else if x < 0.0 {
                Ok(Sign::Negative)
            } else {
                Ok(Sign::Positive)
            }
        })
        .collect::<Result<Vec<_>>>()
        .map(VertexAssignment)
}

fn discrete_loss(g: &SignedGraph, x: &[f64]) -> usize {
    let side = |v: u32| {
        if x[v as usize] < 0.0 {
            Sign::Negative
        } else {
            Sign::Positive
        }
    };
    g.edges()
        .iter()
        .filter(|e| (e.sign * side(e.src) * side(e.tgt)).is_negative())
        .count()
}

/// Runs `cfg.lambda` updates from `start` and discretizes once.
pub fn descend_from(
    g: &SignedGraph,
    start: GammaVector,
    cfg: &GraphLConfig,
) -> Result<GraphLResult> {
    cfg.validate()?;
    let mut x = start.0;
    if x.len() != g.vertex_count() {
        return Err(Error::LengthMismatch {
            expected: g.vertex_count(),
            found: x.len(),
        });
    }
    let mut grad = vec![0.0; x.len()];
    let mut trace = Vec::with_capacity(if cfg.record_trace { cfg.lambda } else { 0 });
    for update in 0..cfg.lambda {
        if cfg.record_trace {
            trace.push(discrete_loss(g, &x));
        }
        gradient_into(g, &x, &mut grad);
        let mut finite = true;
        for (xi, gi) in x.iter_mut().zip(&grad) {
            *xi -= cfg.alpha * gi;
            finite &= xi.is_finite();
        }
        if !finite {
            return Err(Error::Divergence { update });
        }
    }

    let theta = discretize(&GammaVector(x))?;
    let mut balanced_signs = Vec::with_capacity(g.edge_count());
    let mut frustration = 0;
    for e in g.edges() {
        if (e.sign * theta.get(e.src as usize) * theta.get(e.tgt as usize)).is_negative() {
            frustration += 1;
            balanced_signs.push(e.sign.flipped());
        } else {
            balanced_signs.push(e.sign);
        }
    }
    debug_assert_eq!(frustration, frustration_of_assignment(g, &theta));
    Ok(GraphLResult {
        frustration,
        theta,
        balanced_signs,
        loss_trace: trace,
        restart_index: 0,
        restart_frustrations: vec![frustration],
    })
}

/// Runs `cfg.restarts` independent descents (restart `r` seeded with
/// `seed + r`) and keeps the one with the lowest frustration, earliest first on ties.
pub fn run_graphl(g: &SignedGraph, cfg: &GraphLConfig) -> Result<GraphLResult> {
    cfg.validate()?;
    let mut best: Option<GraphLResult> = None;
    let mut all = Vec::with_capacity(cfg.restarts);
    for r in 0..cfg.restarts {
        let start = init_gamma(g.vertex_count(), cfg.seed.wrapping_add(r as u64))?;
        let mut res = descend_from(g, start, cfg)?;
        all.push(res.frustration);
        if best
            .as_ref()
            .is_none_or(|b| res.frustration < b.frustration)
        {
            res.restart_index = r;
            best = Some(res);
        }
    }
    let mut best = best.expect("at least one restart");
    best.restart_frustrations = all;
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::balance::is_balanced;
    use crate::sign::Sign::{Negative as N, Positive as P};

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    #[test]
    fn init_range_and_determinism() {
        let a = init_gamma(3, 42).unwrap();
        assert!(a.0.iter().all(|x| (-1.0..=1.0).contains(x)));
        assert_eq!(a, init_gamma(3, 42).unwrap());
        assert_ne!(a, init_gamma(3, 43).unwrap());
        assert!(init_gamma(0, 1).is_err());
    }

    #[test]
    fn loss_examples() {
        let pos = SignedGraph::new(2, &[(0, 1, P)]).unwrap();
        assert!(close(relaxed_loss(&pos, &GammaVector(vec![1.0, 1.0])), 0.0));
        assert!(close(
            relaxed_loss(&pos, &GammaVector(vec![1.0, -1.0])),
            1.0
        ));
        let neg = SignedGraph::new(2, &[(0, 1, N)]).unwrap();
        assert!(close(
            relaxed_loss(&neg, &GammaVector(vec![0.5, 0.3])),
            0.575
        ));
    }

    #[test]
    fn gradient_examples() {
        let neg = SignedGraph::new(2, &[(0, 1, N)]).unwrap();
        let gr = gradient(&neg, &GammaVector(vec![0.5, 0.3]));
        assert!(close(gr[0], 0.15) && close(gr[1], 0.25), "{gr:?}");

        let pos = SignedGraph::new(2, &[(0, 1, P)]).unwrap();
        assert_eq!(
            gradient(&pos, &GammaVector(vec![1.0, 1.0])),
            vec![-0.5, -0.5]
        );

        let tri = SignedGraph::new(3, &[(0, 1, P), (1, 2, N), (0, 2, N)]).unwrap();
        assert_eq!(gradient(&tri, &GammaVector(vec![0.0; 3])), vec![0.0; 3]);
    }

    #[test]
    fn discretize_boundaries() {
        assert_eq!(
            discretize(&GammaVector(vec![0.2, -3.1])).unwrap().0,
            vec![P, N]
        );
        assert_eq!(discretize(&GammaVector(vec![0.0])).unwrap().0, vec![P]);
        assert_eq!(discretize(&GammaVector(vec![-0.0])).unwrap().0, vec![P]);
        assert!(matches!(
            discretize(&GammaVector(vec![1.0, f64::NAN])),
            Err(Error::NotANumber { index: 1 })
        ));
    }

    #[test]
    fn config_validation() {
        let cfg = GraphLConfig {
            alpha: -1.0,
            ..GraphLConfig::default()
        };
        assert!(cfg.validate().is_err());
        let cfg = GraphLConfig {
            restarts: 0,
            ..GraphLConfig::default()
        };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn divergence_reports_update() {
        let g = SignedGraph::new(2, &[(0, 1, P)]).unwrap();
        let cfg = GraphLConfig {
            alpha: 1e300,
            lambda: 10,
            ..GraphLConfig::default()
        };
        let r = descend_from(&g, GammaVector(vec![1e10, 1e10]), &cfg);
        assert!(matches!(r, Err(Error::Divergence { update: 0 })), "{r:?}");
    }

    #[test]
    fn balanced_start_stays_put() {
        // Balanced with bipartition {0,1} | {2,3}.
        let g = SignedGraph::new(4, &[(0, 1, P), (1, 2, N), (2, 3, P), (0, 3, N)]).unwrap();
        let theta = GammaVector(vec![1.0, 1.0, -1.0, -1.0]);
        let res = descend_from(&g, theta, &GraphLConfig::default()).unwrap();
        assert_eq!(res.frustration, 0);
        assert!(res.loss_trace.windows(2).all(|w| w[1] <= w[0]));
        assert_eq!(res.balanced_signs, g.signs());
    }

    #[test]
    fn output_is_balanced() {
        let g =
            SignedGraph::new(4, &[(0, 1, N), (1, 2, N), (2, 3, N), (0, 3, N), (0, 2, P)]).unwrap();
        let res = run_graphl(
            &g,
            &GraphLConfig {
                seed: 3,
                ..GraphLConfig::default()
            },
        )
        .unwrap();
        assert!(is_balanced(&g, &res.balanced_signs).unwrap());
        assert_eq!(res.restart_frustrations.len(), 5);
        assert_eq!(
            res.frustration,
            *res.restart_frustrations.iter().min().unwrap()
        );
    }
}
