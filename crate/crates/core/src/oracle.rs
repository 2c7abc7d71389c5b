//! Exact frustration index by exhaustive search.
//!
//! Vertex 0 is pinned to `+1`, so the `2^(n-1)` encodings of the remaining
//! vertices cover every bipartition once. Encodings are walked in Gray-code
//! order, so each step flips one vertex and only its incident edges need
//! rechecking. Ties go to the numerically smallest encoding.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::SignedGraph;
use crate::sign::{Sign, VertexAssignment};

pub const DEFAULT_MAX_VERTICES: usize = 22;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleResult {
    pub frustration: usize,
    pub best_theta: VertexAssignment,
    pub assignments_checked: u64,
}

#[derive(Clone, Copy)]
struct Best {
    frustration: usize,
    encoding: u64,
    checked: u64,
}

impl Best {
    fn offer(&mut self, frustration: usize, encoding: u64) {
        if frustration < self.frustration
            || (frustration == self.frustration && encoding < self.encoding)
        {
            self.frustration = frustration;
            self.encoding = encoding;
        }
    }
}

fn guard(g: &SignedGraph, max_vertices: usize) -> Result<()> {
    let n = g.vertex_count();
    if n == 0 {
        return Err(Error::InvalidConfig("graph has no vertices".into()));
    }
    if n > max_vertices || n > 64 {
        return Err(Error::SizeGuard {
            vertices: n,
            max: max_vertices.min(64),
        });
    }
    Ok(())
}

/// Scans every encoding whose top `n - 1 - low_bits` bits equal `prefix`.
fn scan_block(g: &SignedGraph, prefix: u64, low_bits: u32) -> Best {
    let n = g.vertex_count();
    let start = prefix << low_bits;
    let mut side = VertexAssignment::from_encoding(n, start).0;
    let mut frustrated = g
        .edges()
        .iter()
        .filter(|e| (e.sign * side[e.src as usize] * side[e.tgt as usize]).is_negative())
        .count();
    let mut best = Best {
        frustration: frustrated,
        encoding: start,
        checked: 1,
    };
    let mut gray = 0u64;
    for step in 1u64..(1u64 << low_bits) {
        let bit = step.trailing_zeros();
        gray ^= 1 << bit;
        // bit i of the encoding is vertex i + 1
        let v = bit as usize + 1;
        let (ns, ss, _) = g.neighbor_slices(v);
        let sv = side[v];
        for (&w, &s) in ns.iter().zip(ss) {
            if (s * sv * side[w as usize]).is_negative() {
                frustrated -= 1;
            } else {
                frustrated += 1;
            }
        }
        side[v] = sv.flipped();
        best.offer(frustrated, start | gray);
        best.checked += 1;
    }
    best
}

fn finish(g: &SignedGraph, best: Best) -> OracleResult {
    OracleResult {
        frustration: best.frustration,
        best_theta: VertexAssignment::from_encoding(g.vertex_count(), best.encoding),
        assignments_checked: best.checked,
    }
}

pub fn exact_frustration(g: &SignedGraph, max_vertices: usize) -> Result<OracleResult> {
    guard(g, max_vertices)?;
    let low_bits = (g.vertex_count() - 1) as u32;
    Ok(finish(g, scan_block(g, 0, low_bits)))
}

/// Same result as [`exact_frustration`], split over up to `workers` threads.
pub fn exact_frustration_parallel(
    g: &SignedGraph,
    max_vertices: usize,
    workers: usize,
) -> Result<OracleResult> {
    guard(g, max_vertices)?;
    if workers == 0 {
        return Err(Error::InvalidConfig("workers must be at least 1".into()));
    }
    let free = (g.vertex_count() - 1) as u32;
    // 2^high blocks, at most one per worker
    let mut high = 0u32;
    while high < free && (1usize << (high + 1)) <= workers {
        high += 1;
    }
    let low = free - high;
    let blocks: Vec<Best> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..1u64 << high)
            .map(|p| s.spawn(move || scan_block(g, p, low)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("oracle worker panicked"))
            .collect()
    });
    let mut best = blocks[0];
    let mut checked = best.checked;
    for b in &blocks[1..] {
        best.offer(b.frustration, b.encoding);
        checked += b.checked;
    }
    best.checked = checked;
    Ok(finish(g, best))
}

/// Signs after flipping every edge that disagrees with `theta`.
pub fn balanced_signs_for(g: &SignedGraph, theta: &VertexAssignment) -> Vec<Sign> {
    g.edges()
        .iter()
        .map(|e| {
            if (e.sign * theta.get(e.src as usize) * theta.get(e.tgt as usize)).is_negative() {
                e.sign.flipped()
            } else {
                e.sign
            }
        })
        .collect()
}
