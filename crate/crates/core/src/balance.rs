//! Balancing a signed graph against one spanning tree.
//!
//! The sign of the fundamental cycle closed by a non-tree edge `(u, v)` is
//! `sign(e) * parity(u) * parity(v)`, where `parity(x)` is the product of the
//! tree-edge signs from the root down to `x`. A negative cycle is fixed by
//! flipping its non-tree edge; tree edges never change. Flipping every
//! negative-cycle edge at once is consistent because each fundamental cycle
//! contains exactly one non-tree edge.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::graph::{check_len, SignedGraph};
use crate::sampling::SpanningTree;
use crate::sign::{Sign, VertexAssignment};

/// Root-to-vertex products of tree-edge signs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParityLabels(pub Vec<Sign>);

/// A balanced sign vector in canonical edge order and its distance from the source graph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BalancedState {
    pub signs: Vec<Sign>,
    pub switch_count: usize,
}

pub fn compute_parity_labels(g: &SignedGraph, t: &SpanningTree) -> ParityLabels {
    let mut parity = vec![Sign::Positive; g.vertex_count()];
    for &v in t.order.iter().skip(1) {
        let v = v as usize;
        let p = t.parent[v] as usize;
        parity[v] = parity[p] * g.edge(t.parent_edge[v] as usize).sign;
    }
    ParityLabels(parity)
}

pub fn balance_with_tree(g: &SignedGraph, t: &SpanningTree) -> BalancedState {
    let ParityLabels(parity) = compute_parity_labels(g, t);
    let mut switch_count = 0;
    let signs = g
        .edges()
        .iter()
        .zip(&t.is_tree_edge)
        .map(|(e, &in_tree)| {
            if !in_tree && (e.sign * parity[e.src as usize] * parity[e.tgt as usize]).is_negative()
            {
                switch_count += 1;
                e.sign.flipped()
            } else {
                e.sign
            }
        })
        .collect();
    BalancedState {
        signs,
        switch_count,
    }
}

/// Harary bipartition: `u` holds each component's smallest vertex.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bipartition {
    pub u: Vec<u32>,
    pub w: Vec<u32>,
}

impl Bipartition {
    /// `+1` on `u`, `-1` on `w`.
    pub fn to_assignment(&self, n: usize) -> VertexAssignment {
        let mut signs = vec![Sign::Positive; n];
        for &v in &self.w {
            signs[v as usize] = Sign::Negative;
        }
        VertexAssignment(signs)
    }
}

/// Two-colors the graph under `signs`: positive edges join equal colors,
/// negative edges join different colors. `None` if some cycle is negative.
pub fn harary_bipartition(g: &SignedGraph, signs: &[Sign]) -> Result<Option<Bipartition>> {
    check_len(g, signs)?;
    let n = g.vertex_count();
    let mut color: Vec<Option<Sign>> = vec![None; n];
    let mut queue = VecDeque::new();
    for start in 0..n {
        if color[start].is_some() {
            continue;
        }
        color[start] = Some(Sign::Positive);
        queue.push_back(start);
        while let Some(v) = queue.pop_front() {
            let cv = color[v].expect("queued vertices are colored");
            for (w, _, e) in g.neighbors(v) {
                let want = cv * signs[e as usize];
                match color[w as usize] {
                    None => {
                        color[w as usize] = Some(want);
                        queue.push_back(w as usize);
                    }
                    Some(c) if c != want => return Ok(None),
                    Some(_) => {}
                }
            }
        }
    }
    let mut part = Bipartition {
        u: Vec::new(),
        w: Vec::new(),
    };
    for (v, c) in color.into_iter().enumerate() {
        match c.expect("every vertex colored") {
            Sign::Positive => part.u.push(v as u32),
            Sign::Negative => part.w.push(v as u32),
        }
    }
    Ok(Some(part))
}

pub fn is_balanced(g: &SignedGraph, signs: &[Sign]) -> Result<bool> {
    Ok(harary_bipartition(g, signs)?.is_some())
}

/// Number of edges whose sign disagrees with the sides of their endpoints.
pub fn frustration_of_assignment(g: &SignedGraph, theta: &VertexAssignment) -> usize {
    assert_eq!(theta.len(), g.vertex_count(), "one sign per vertex");
    g.edges()
        .iter()
        .filter(|e| (e.sign * theta.get(e.src as usize) * theta.get(e.tgt as usize)).is_negative())
        .count()
}

/// Edge indices whose signs differ between `a` and `b`.
pub fn hamming_distance(a: &[Sign], b: &[Sign]) -> usize {
    a.iter().zip(b).filter(|(x, y)| x != y).count()
}
