//! Signed edge-list ingestion and the immutable [`SignedGraph`].
//!
//! Raw records are cleaned by [`build_signed_graph`]: weights become signs,
//! self-loops and zero weights are dropped, agreeing duplicates collapse to one
//! edge and conflicting duplicates are dropped outright. Direction is ignored.
//! Vertex ids are compacted to `0..n` in ascending order of their original id,
//! and edges are stored canonically (`src < tgt`, sorted by `(src, tgt)`).
//! That canonical order is the layout of every per-edge sign vector in the crate.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::io::BufRead;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sign::Sign;

/// One line of a raw edge list, before any cleaning.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RawEdgeRecord {
    pub src: u64,
    pub tgt: u64,
    pub weight: f64,
}

impl RawEdgeRecord {
    pub fn new(src: u64, tgt: u64, weight: f64) -> RawEdgeRecord {
        RawEdgeRecord { src, tgt, weight }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EdgeListFormat {
    Whitespace,
    Comma,
}

impl EdgeListFormat {
    /// Picks the format from the first data line: comma if it contains one.
    pub fn detect(text: &str) -> EdgeListFormat {
        text.lines()
            .map(str::trim)
            .find(|l| !l.is_empty() && !is_comment(l))
            .map(|l| {
                if l.contains(',') {
                    EdgeListFormat::Comma
                } else {
                    EdgeListFormat::Whitespace
                }
            })
            .unwrap_or(EdgeListFormat::Whitespace)
    }
}

/// Parsed data lines plus the number of lines that could not be parsed.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ParsedEdges {
    pub records: Vec<RawEdgeRecord>,
    pub invalid: usize,
}

fn is_comment(line: &str) -> bool {
    line.starts_with('#') || line.starts_with('%')
}

fn parse_line(line: &str, format: EdgeListFormat) -> Option<RawEdgeRecord> {
    let mut tokens: Box<dyn Iterator<Item = &str>> = match format {
        EdgeListFormat::Whitespace => Box::new(line.split_whitespace()),
        EdgeListFormat::Comma => Box::new(line.split(',').map(str::trim)),
    };
    let src = tokens.next()?.parse::<u64>().ok()?;
    let tgt = tokens.next()?.parse::<u64>().ok()?;
    let weight = tokens.next()?.parse::<f64>().ok()?;
    Some(RawEdgeRecord { src, tgt, weight })
}

/// Reads `src tgt weight [...]` lines. Lines starting with `#` or `%` are
/// comments; blank lines are ignored; anything else that does not parse is
/// counted in [`ParsedEdges::invalid`].
pub fn parse_edge_list<R: BufRead>(reader: R, format: EdgeListFormat) -> Result<ParsedEdges> {
    let mut parsed = ParsedEdges::default();
    for line in reader.lines() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || is_comment(line) {
            continue;
        }
        match parse_line(line, format) {
            Some(rec) => parsed.records.push(rec),
            None => parsed.invalid += 1,
        }
    }
    Ok(parsed)
}

pub fn parse_edge_str(text: &str, format: EdgeListFormat) -> ParsedEdges {
    parse_edge_list(text.as_bytes(), format).expect("reading from a byte slice cannot fail")
}

/// What [`build_signed_graph`] threw away, in records.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PreprocessReport {
    pub input_records: usize,
    pub retained_edges: usize,
    pub self_loops: usize,
    /// Extra copies of a pair whose copies all agree in sign.
    pub duplicates: usize,
    /// Unordered pairs dropped because their copies disagree in sign.
    pub inconsistent_pairs: usize,
    /// Records belonging to those pairs.
    pub inconsistent_records: usize,
    pub zero_weight: usize,
    pub invalid: usize,
}

impl PreprocessReport {
    /// Folds in records that were rejected before reaching the builder
    /// (unparseable lines, out-of-range ratings).
    pub fn record_invalid(&mut self, count: usize) {
        self.invalid += count;
        self.input_records += count;
    }

    pub fn dropped(&self) -> usize {
        self.self_loops
            + self.duplicates
            + self.inconsistent_records
            + self.zero_weight
            + self.invalid
    }
}

impl fmt::Display for PreprocessReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "records={} retained={} self_loops={} duplicates={} inconsistent_pairs={} \
             inconsistent_records={} zero_weight={} invalid={}",
            self.input_records,
            self.retained_edges,
            self.self_loops,
            self.duplicates,
            self.inconsistent_pairs,
            self.inconsistent_records,
            self.zero_weight,
            self.invalid
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub src: u32,
    pub tgt: u32,
    pub sign: Sign,
}

/// Undirected simple signed graph in compressed adjacency form.
///
/// Immutable after construction; share it by reference across workers.
#[derive(Clone, Debug, PartialEq)]
pub struct SignedGraph {
    edges: Vec<Edge>,
    offsets: Vec<usize>,
    adj_vertex: Vec<u32>,
    adj_sign: Vec<Sign>,
    adj_edge: Vec<u32>,
    labels: Vec<u64>,
}

impl SignedGraph {
    /// Builds a graph from already-clean edges over vertices `0..vertex_count`.
    /// Endpoints may be given in either order. Self-loops, duplicate pairs and
    /// out-of-range endpoints are rejected.
    pub fn new(vertex_count: usize, edges: &[(u32, u32, Sign)]) -> Result<SignedGraph> {
        let mut canonical = Vec::with_capacity(edges.len());
        for &(a, b, sign) in edges {
            if a == b {
                return Err(Error::InvalidConfig(format!("self-loop at vertex {a}")));
            }
            if a as usize >= vertex_count || b as usize >= vertex_count {
                return Err(Error::InvalidConfig(format!(
                    "edge ({a}, {b}) outside vertex range 0..{vertex_count}"
                )));
            }
            canonical.push(Edge {
                src: a.min(b),
                tgt: a.max(b),
                sign,
            });
        }
        canonical.sort_by_key(|e| (e.src, e.tgt));
        if let Some(w) = canonical
            .windows(2)
            .find(|w| (w[0].src, w[0].tgt) == (w[1].src, w[1].tgt))
        {
            return Err(Error::InvalidConfig(format!(
                "duplicate edge ({}, {})",
                w[0].src, w[0].tgt
            )));
        }
        let labels = (0..vertex_count as u64).collect();
        Ok(Self::from_canonical(vertex_count, canonical, labels))
    }

    /// `edges` must already be canonical and sorted.
    fn from_canonical(vertex_count: usize, edges: Vec<Edge>, labels: Vec<u64>) -> SignedGraph {
        debug_assert_eq!(labels.len(), vertex_count);
        let mut offsets = vec![0usize; vertex_count + 1];
        for e in &edges {
            offsets[e.src as usize + 1] += 1;
            offsets[e.tgt as usize + 1] += 1;
        }
        for v in 0..vertex_count {
            offsets[v + 1] += offsets[v];
        }
        let total = offsets[vertex_count];
        let mut cursor = offsets.clone();
        let mut adj_vertex = vec![0u32; total];
        let mut adj_sign = vec![Sign::Positive; total];
        let mut adj_edge = vec![0u32; total];
        // Filling in canonical edge order leaves every neighbor list sorted.
        for (i, e) in edges.iter().enumerate() {
            for (from, to) in [(e.src, e.tgt), (e.tgt, e.src)] {
                let slot = cursor[from as usize];
                adj_vertex[slot] = to;
                adj_sign[slot] = e.sign;
                adj_edge[slot] = i as u32;
                cursor[from as usize] += 1;
            }
        }
        SignedGraph {
            edges,
            offsets,
            adj_vertex,
            adj_sign,
            adj_edge,
            labels,
        }
    }

    #[inline]
    pub fn vertex_count(&self) -> usize {
        self.offsets.len() - 1
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges in canonical order; index `i` here is edge index `i` everywhere.
    #[inline]
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    #[inline]
    pub fn edge(&self, i: usize) -> Edge {
        self.edges[i]
    }

    #[inline]
    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    /// `(neighbor, sign, edge index)` triples of `v`, sorted by neighbor.
    #[inline]
    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = (u32, Sign, u32)> + '_ {
        let range = self.offsets[v]..self.offsets[v + 1];
        range.map(move |k| (self.adj_vertex[k], self.adj_sign[k], self.adj_edge[k]))
    }

    #[inline]
    pub(crate) fn neighbor_slices(&self, v: usize) -> (&[u32], &[Sign], &[u32]) {
        let range = self.offsets[v]..self.offsets[v + 1];
        (
            &self.adj_vertex[range.clone()],
            &self.adj_sign[range.clone()],
            &self.adj_edge[range],
        )
    }

    /// Original id of internal vertex `v`.
    #[inline]
    pub fn label(&self, v: usize) -> u64 {
        self.labels[v]
    }

    pub fn labels(&self) -> &[u64] {
        &self.labels
    }

    /// The graph's own sign vector.
    pub fn signs(&self) -> Vec<Sign> {
        self.edges.iter().map(|e| e.sign).collect()
    }

    pub fn negative_edge_count(&self) -> usize {
        self.edges.iter().filter(|e| e.sign.is_negative()).count()
    }

    /// Component id per vertex, numbered in order of each component's smallest vertex.
    pub fn components(&self) -> (Vec<u32>, usize) {
        let n = self.vertex_count();
        let mut comp = vec![u32::MAX; n];
        let mut count = 0u32;
        let mut queue = VecDeque::new();
        for start in 0..n {
            if comp[start] != u32::MAX {
                continue;
            }
            comp[start] = count;
            queue.push_back(start);
            while let Some(v) = queue.pop_front() {
                for (w, _, _) in self.neighbors(v) {
                    if comp[w as usize] == u32::MAX {
                        comp[w as usize] = count;
                        queue.push_back(w as usize);
                    }
                }
            }
            count += 1;
        }
        (comp, count as usize)
    }

    pub fn is_connected(&self) -> bool {
        self.vertex_count() > 0 && self.components().1 == 1
    }

    /// The same graph with a different sign vector.
    pub fn with_signs(&self, signs: &[Sign]) -> Result<SignedGraph> {
        check_len(self, signs)?;
        let edges = self
            .edges
            .iter()
            .zip(signs)
            .map(|(e, &sign)| Edge { sign, ..*e })
            .collect();
        Ok(Self::from_canonical(
            self.vertex_count(),
            edges,
            self.labels.clone(),
        ))
    }
}

pub(crate) fn check_len(g: &SignedGraph, signs: &[Sign]) -> Result<()> {
    if signs.len() != g.edge_count() {
        return Err(Error::LengthMismatch {
            expected: g.edge_count(),
            found: signs.len(),
        });
    }
    Ok(())
}

struct PairGroup {
    sign: Sign,
    records: usize,
    conflict: bool,
}

/// Cleans raw records into a [`SignedGraph`].
///
/// Records are checked in this order: non-finite weight (invalid), self-loop,
/// zero weight; survivors are grouped by unordered pair.
pub fn build_signed_graph(records: &[RawEdgeRecord]) -> Result<(SignedGraph, PreprocessReport)> {
    let mut report = PreprocessReport {
        input_records: records.len(),
        ..Default::default()
    };
    let mut pairs: BTreeMap<(u64, u64), PairGroup> = BTreeMap::new();
    for rec in records {
        if !rec.weight.is_finite() {
            report.invalid += 1;
            continue;
        }
        if rec.src == rec.tgt {
            report.self_loops += 1;
            continue;
        }
        let Some(sign) = Sign::from_weight(rec.weight) else {
            report.zero_weight += 1;
            continue;
        };
        let key = (rec.src.min(rec.tgt), rec.src.max(rec.tgt));
        pairs
            .entry(key)
            .and_modify(|g| {
                g.records += 1;
                g.conflict |= g.sign != sign;
            })
            .or_insert(PairGroup {
                sign,
                records: 1,
                conflict: false,
            });
    }

    let mut kept = Vec::with_capacity(pairs.len());
    let mut ids = BTreeSet::new();
    for ((a, b), group) in pairs {
        if group.conflict {
            report.inconsistent_pairs += 1;
            report.inconsistent_records += group.records;
        } else {
            report.duplicates += group.records - 1;
            ids.insert(a);
            ids.insert(b);
            kept.push((a, b, group.sign));
        }
    }
    report.retained_edges = kept.len();
    if kept.is_empty() {
        return Err(Error::EmptyGraph {
            report: Box::new(report),
        });
    }

    let labels: Vec<u64> = ids.into_iter().collect();
    let index = |id: u64| labels.binary_search(&id).expect("id collected above") as u32;
    // Pairs iterate in (min, max) order and the relabeling is monotone, so the
    // edge list comes out canonical.
    let edges = kept
        .into_iter()
        .map(|(a, b, sign)| Edge {
            src: index(a),
            tgt: index(b),
            sign,
        })
        .collect();
    let graph = SignedGraph::from_canonical(labels.len(), edges, labels);
    Ok((graph, report))
}

/// Induced subgraph on the largest connected component.
///
/// Ties go to the component holding the smallest original id. Returns the
/// subgraph and, for each of its vertices, the vertex it came from in `g`.
/// Original labels carry over.
pub fn largest_connected_component(g: &SignedGraph) -> Result<(SignedGraph, Vec<u32>)> {
    if g.vertex_count() == 0 {
        return Err(Error::EmptyGraph {
            report: Box::default(),
        });
    }
    let (comp, count) = g.components();
    let mut sizes = vec![0usize; count];
    let mut smallest_label = vec![u64::MAX; count];
    for (v, &c) in comp.iter().enumerate() {
        sizes[c as usize] += 1;
        smallest_label[c as usize] = smallest_label[c as usize].min(g.label(v));
    }
    let best = (0..count)
        .min_by_key(|&c| (std::cmp::Reverse(sizes[c]), smallest_label[c]))
        .expect("at least one component") as u32;

    let remap: Vec<u32> = (0..g.vertex_count() as u32)
        .filter(|&v| comp[v as usize] == best)
        .collect();
    let mut new_id = vec![u32::MAX; g.vertex_count()];
    for (i, &old) in remap.iter().enumerate() {
        new_id[old as usize] = i as u32;
    }
    let edges = g
        .edges()
        .iter()
        .filter(|e| comp[e.src as usize] == best)
        .map(|e| Edge {
            src: new_id[e.src as usize],
            tgt: new_id[e.tgt as usize],
            sign: e.sign,
        })
        .collect();
    let labels = remap.iter().map(|&v| g.label(v as usize)).collect();
    Ok((
        SignedGraph::from_canonical(remap.len(), edges, labels),
        remap,
    ))
}

/// Counts from [`amazon_ratings_to_records`].
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RatingReport {
    pub positive: usize,
    pub negative: usize,
    pub neutral_dropped: usize,
    pub invalid: usize,
}

/// Turns star ratings into signed records: 4 and 5 are positive, 0 and 1
/// negative, 2 and 3 produce no edge. Ratings outside `[0, 5]` are invalid.
/// Fractional ratings follow the same cut points (`>= 4`, `<= 1`).
pub fn amazon_ratings_to_records(records: &[RawEdgeRecord]) -> (Vec<RawEdgeRecord>, RatingReport) {
    let mut report = RatingReport::default();
    let mut out = Vec::with_capacity(records.len());
    for rec in records {
        let r = rec.weight;
        if !(0.0..=5.0).contains(&r) {
            report.invalid += 1;
        } else if r >= 4.0 {
            report.positive += 1;
            out.push(RawEdgeRecord {
                weight: 1.0,
                ..*rec
            });
        } else if r <= 1.0 {
            report.negative += 1;
            out.push(RawEdgeRecord {
                weight: -1.0,
                ..*rec
            });
        } else {
            report.neutral_dropped += 1;
        }
    }
    (out, report)
}

/// Renders a sign vector as `src->tgt: sign` items joined by `|`, in
/// canonical edge order, using internal vertex ids.
pub fn serialize_state(g: &SignedGraph, signs: &[Sign]) -> Result<String> {
    use std::fmt::Write;
    check_len(g, signs)?;
    let mut out = String::with_capacity(g.edge_count() * 12);
    for (i, (e, s)) in g.edges().iter().zip(signs).enumerate() {
        if i > 0 {
            out.push('|');
        }
        write!(out, "{}->{}: {}", e.src, e.tgt, s).expect("writing to a String cannot fail");
    }
    Ok(out)
}

/// Inverse of [`serialize_state`] for keys produced over the same graph.
pub fn parse_state_key(g: &SignedGraph, key: &str) -> Result<Vec<Sign>> {
    let bad = |why: &str| Error::MalformedStateKey(why.to_string());
    let items: Vec<&str> = if key.is_empty() {
        Vec::new()
    } else {
        key.split('|').collect()
    };
    if items.len() != g.edge_count() {
        return Err(bad(&format!(
            "{} items for {} edges",
            items.len(),
            g.edge_count()
        )));
    }
    let mut signs = Vec::with_capacity(items.len());
    for (item, e) in items.iter().zip(g.edges()) {
        let (pair, sign) = item.split_once(": ").ok_or_else(|| bad(item))?;
        let (src, tgt) = pair.split_once("->").ok_or_else(|| bad(item))?;
        if src.parse::<u32>().ok() != Some(e.src) || tgt.parse::<u32>().ok() != Some(e.tgt) {
            return Err(bad(&format!(
                "`{item}` does not match edge {}->{}",
                e.src, e.tgt
            )));
        }
        let sign = sign
            .parse::<i8>()
            .ok()
            .and_then(Sign::from_i8)
            .ok_or_else(|| bad(item))?;
        signs.push(sign);
    }
    Ok(signs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use Sign::{Negative as N, Positive as P};

    fn rec(src: u64, tgt: u64, weight: f64) -> RawEdgeRecord {
        RawEdgeRecord::new(src, tgt, weight)
    }

    #[test]
    fn parse_skips_comments() {
        let p = parse_edge_str("1 2 -1\n# note\n3 4 1", EdgeListFormat::Whitespace);
        assert_eq!(p.records, vec![rec(1, 2, -1.0), rec(3, 4, 1.0)]);
        assert_eq!(p.invalid, 0);

        let p = parse_edge_str("% konect header\n0 1 3", EdgeListFormat::Whitespace);
        assert_eq!(p.records, vec![rec(0, 1, 3.0)]);
    }

    #[test]
    fn parse_counts_short_lines() {
        let p = parse_edge_str("0 1", EdgeListFormat::Whitespace);
        assert!(p.records.is_empty());
        assert_eq!(p.invalid, 1);
    }

    #[test]
    fn parse_comma_with_extra_columns() {
        let text = "7,188,-1,1407470400\n430, 1, 10, 1376539200\nx,1,1";
        assert_eq!(EdgeListFormat::detect(text), EdgeListFormat::Comma);
        let p = parse_edge_str(text, EdgeListFormat::Comma);
        assert_eq!(p.records, vec![rec(7, 188, -1.0), rec(430, 1, 10.0)]);
        assert_eq!(p.invalid, 1);
    }

    #[test]
    fn parse_rejects_negative_ids() {
        let p = parse_edge_str("-1 2 1", EdgeListFormat::Whitespace);
        assert_eq!(p.invalid, 1);
    }

    #[test]
    fn agreeing_duplicates_collapse() {
        let (g, report) = build_signed_graph(&[rec(1, 2, -3.0), rec(2, 1, -1.0)]).unwrap();
        assert_eq!(
            g.edges(),
            &[Edge {
                src: 0,
                tgt: 1,
                sign: N
            }]
        );
        assert_eq!(g.labels(), &[1, 2]);
        assert_eq!(report.duplicates, 1);
        assert_eq!(
            report.dropped() + report.retained_edges,
            report.input_records
        );
    }

    #[test]
    fn conflicting_pair_is_dropped() {
        match build_signed_graph(&[rec(1, 2, 1.0), rec(2, 1, -1.0)]) {
            Err(Error::EmptyGraph { report }) => {
                assert_eq!(report.inconsistent_pairs, 1);
                assert_eq!(report.inconsistent_records, 2);
                assert_eq!(report.dropped(), 2);
            }
            other => panic!("expected empty graph, got {other:?}"),
        }
    }

    #[test]
    fn filters_self_loops_and_zero_weights() {
        let (g, report) =
            build_signed_graph(&[rec(5, 5, 1.0), rec(1, 2, 0.0), rec(1, 3, 2.0)]).unwrap();
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.vertex_count(), 2);
        assert_eq!(g.labels(), &[1, 3]);
        assert_eq!(report.self_loops, 1);
        assert_eq!(report.zero_weight, 1);
        assert_eq!(report.retained_edges, 1);
    }

    #[test]
    fn adjacency_is_sorted_and_symmetric() {
        let g = SignedGraph::new(4, &[(2, 0, P), (0, 1, N), (3, 1, P), (1, 2, N)]).unwrap();
        let pairs: Vec<_> = g.edges().iter().map(|e| (e.src, e.tgt)).collect();
        assert_eq!(pairs, vec![(0, 1), (0, 2), (1, 2), (1, 3)]);
        for v in 0..4 {
            let ns: Vec<u32> = g.neighbors(v).map(|(w, _, _)| w).collect();
            let mut sorted = ns.clone();
            sorted.sort();
            assert_eq!(ns, sorted);
            for (w, s, i) in g.neighbors(v) {
                let e = g.edge(i as usize);
                assert_eq!(s, e.sign);
                assert!((e.src, e.tgt) == (v as u32, w) || (e.src, e.tgt) == (w, v as u32));
            }
        }
    }

    #[test]
    fn new_rejects_bad_input() {
        assert!(SignedGraph::new(2, &[(1, 1, P)]).is_err());
        assert!(SignedGraph::new(2, &[(0, 1, P), (1, 0, N)]).is_err());
        assert!(SignedGraph::new(2, &[(0, 2, P)]).is_err());
    }

    #[test]
    fn lcc_of_connected_triangle_is_itself() {
        let g = SignedGraph::new(3, &[(0, 1, P), (1, 2, N), (0, 2, P)]).unwrap();
        let (lcc, remap) = largest_connected_component(&g).unwrap();
        assert_eq!(lcc, g);
        assert_eq!(remap, vec![0, 1, 2]);
    }

    #[test]
    fn lcc_picks_larger_component() {
        let g = SignedGraph::new(5, &[(3, 4, N), (0, 1, P), (1, 2, N), (0, 2, P)]).unwrap();
        let (lcc, remap) = largest_connected_component(&g).unwrap();
        assert_eq!(lcc.vertex_count(), 3);
        assert_eq!(remap, vec![0, 1, 2]);
    }

    #[test]
    fn lcc_tie_goes_to_smallest_id() {
        let g = SignedGraph::new(
            6,
            &[
                (3, 4, N),
                (4, 5, N),
                (3, 5, N),
                (0, 1, P),
                (1, 2, P),
                (0, 2, P),
            ],
        )
        .unwrap();
        let (lcc, remap) = largest_connected_component(&g).unwrap();
        assert_eq!(remap, vec![0, 1, 2]);
        assert!(lcc.edges().iter().all(|e| e.sign == P));
    }

    #[test]
    fn lcc_keeps_original_labels() {
        let (g, _) =
            build_signed_graph(&[rec(10, 20, 1.0), rec(30, 40, 1.0), rec(40, 50, -1.0)]).unwrap();
        let (lcc, remap) = largest_connected_component(&g).unwrap();
        assert_eq!(lcc.labels(), &[30, 40, 50]);
        assert_eq!(remap, vec![2, 3, 4]);
    }

    #[test]
    fn ratings_to_signs() {
        let (out, report) = amazon_ratings_to_records(&[
            rec(1, 100, 5.0),
            rec(1, 101, 4.0),
            rec(1, 102, 3.0),
            rec(1, 103, 2.0),
            rec(1, 104, 1.0),
            rec(1, 105, 0.0),
            rec(1, 106, 7.0),
        ]);
        let weights: Vec<f64> = out.iter().map(|r| r.weight).collect();
        assert_eq!(weights, vec![1.0, 1.0, -1.0, -1.0]);
        assert_eq!(report.neutral_dropped, 2);
        assert_eq!(report.invalid, 1);
    }

    #[test]
    fn state_serialization() {
        let g = SignedGraph::new(3, &[(0, 1, P), (1, 2, N)]).unwrap();
        let key = serialize_state(&g, &g.signs()).unwrap();
        assert_eq!(key, "0->1: 1|1->2: -1");
        assert_eq!(serialize_state(&g, &g.signs()).unwrap(), key);
        assert_eq!(parse_state_key(&g, &key).unwrap(), g.signs());

        let single = SignedGraph::new(2, &[(0, 1, N)]).unwrap();
        assert_eq!(
            serialize_state(&single, &single.signs()).unwrap(),
            "0->1: -1"
        );
    }

    #[test]
    fn serialization_length_mismatch() {
        let g = SignedGraph::new(3, &[(0, 1, P), (1, 2, N)]).unwrap();
        assert!(matches!(
            serialize_state(&g, &[P]),
            Err(Error::LengthMismatch {
                expected: 2,
                found: 1
            })
        ));
    }

    #[test]
    fn malformed_keys_rejected() {
        let g = SignedGraph::new(3, &[(0, 1, P), (1, 2, N)]).unwrap();
        assert!(parse_state_key(&g, "0->1: 1").is_err());
        assert!(parse_state_key(&g, "0->1: 1|1->3: -1").is_err());
        assert!(parse_state_key(&g, "0->1: 1|1->2: 0").is_err());
    }
}
