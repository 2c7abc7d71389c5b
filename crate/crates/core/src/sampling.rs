//! Spanning tree samplers.
//!
//! Every sampler is a pure function of `(graph, method, seed, iteration, root)`:
//! the random stream is [`stream_rng`]`(seed, iteration)`, so iterations can be
//! handed to any worker in any order and still produce the same trees.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, VecDeque};
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::SignedGraph;
use crate::rng::{stream_rng, StreamRng};
use crate::union_find::UnionFind;

/// Parent of the root.
pub const NO_PARENT: u32 = u32::MAX;

/// A rooted spanning tree of a connected [`SignedGraph`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpanningTree {
    pub root: u32,
    /// Parent vertex per vertex; [`NO_PARENT`] for the root.
    pub parent: Vec<u32>,
    /// Index of the edge to the parent; [`NO_PARENT`] for the root.
    pub parent_edge: Vec<u32>,
    pub is_tree_edge: Vec<bool>,
    /// Vertices with every parent listed before its children.
    pub order: Vec<u32>,
}

impl SpanningTree {
    pub fn tree_edge_count(&self) -> usize {
        self.is_tree_edge.iter().filter(|&&t| t).count()
    }

    pub fn non_tree_edges(&self) -> impl Iterator<Item = usize> + '_ {
        self.is_tree_edge
            .iter()
            .enumerate()
            .filter(|(_, &t)| !t)
            .map(|(i, _)| i)
    }

    /// Checks the structural invariants against `g`; returns a description of
    /// the first violation.
    pub fn validate(&self, g: &SignedGraph) -> std::result::Result<(), String> {
        let n = g.vertex_count();
        if self.parent.len() != n || self.parent_edge.len() != n || self.order.len() != n {
            return Err("per-vertex arrays do not match vertex count".into());
        }
        if self.is_tree_edge.len() != g.edge_count() {
            return Err("tree-edge markers do not match edge count".into());
        }
        if self.tree_edge_count() != n - 1 {
            return Err(format!(
                "{} tree edges for {} vertices",
                self.tree_edge_count(),
                n
            ));
        }
        if self.parent[self.root as usize] != NO_PARENT || self.order.first() != Some(&self.root) {
            return Err("root is not first or has a parent".into());
        }
        let mut seen_edge = vec![false; g.edge_count()];
        let mut placed = vec![false; n];
        for &v in &self.order {
            let v = v as usize;
            if placed[v] {
                return Err(format!("vertex {v} listed twice"));
            }
            if v != self.root as usize {
                let p = self.parent[v] as usize;
                let ei = self.parent_edge[v] as usize;
                if p >= n || !placed[p] {
                    return Err(format!("parent of {v} not placed before it"));
                }
                let e = g.edge(ei);
                if !((e.src as usize == v && e.tgt as usize == p)
                    || (e.tgt as usize == v && e.src as usize == p))
                {
                    return Err(format!("parent edge of {v} does not join it to its parent"));
                }
                if !self.is_tree_edge[ei] || seen_edge[ei] {
                    return Err(format!("edge {ei} is unmarked or used twice"));
                }
                seen_edge[ei] = true;
            }
            placed[v] = true;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SamplerMethod {
    Bfs,
    Dfs,
    Rdfs,
    #[serde(rename = "ab")]
    AldousBroder,
    #[serde(rename = "kruskal")]
    KruskalRandom,
    #[serde(rename = "prim")]
    PrimRandom,
    #[serde(rename = "hybrid")]
    HybridRdfsBfs,
}

impl SamplerMethod {
    pub const ALL: [SamplerMethod; 7] = [
        SamplerMethod::Bfs,
        SamplerMethod::Dfs,
        SamplerMethod::Rdfs,
        SamplerMethod::AldousBroder,
        SamplerMethod::KruskalRandom,
        SamplerMethod::PrimRandom,
        SamplerMethod::HybridRdfsBfs,
    ];

    pub fn token(self) -> &'static str {
        match self {
            SamplerMethod::Bfs => "bfs",
            SamplerMethod::Dfs => "dfs",
            SamplerMethod::Rdfs => "rdfs",
            SamplerMethod::AldousBroder => "ab",
            SamplerMethod::KruskalRandom => "kruskal",
            SamplerMethod::PrimRandom => "prim",
            SamplerMethod::HybridRdfsBfs => "hybrid",
        }
    }

    pub fn is_randomized(self) -> bool {
        !matches!(self, SamplerMethod::Bfs | SamplerMethod::Dfs)
    }
}

impl fmt::Display for SamplerMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for SamplerMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<SamplerMethod> {
        SamplerMethod::ALL
            .into_iter()
            .find(|m| m.token() == s)
            .ok_or_else(|| Error::UnknownMethod(s.to_string()))
    }
}

/// Root used when the caller does not fix one: uniformly random for BFS and
/// DFS, vertex 0 for everything else.
pub fn default_root(g: &SignedGraph, method: SamplerMethod, rng: &mut StreamRng) -> u32 {
    let n = g.vertex_count();
    match method {
        SamplerMethod::Bfs | SamplerMethod::Dfs if n > 1 => rng.gen_range(0..n as u32),
        _ => 0,
    }
}

/// Random-walk step cap for Aldous-Broder: `100 * |V|^2`.
pub fn aldous_broder_cap(n: usize) -> u64 {
    100u64
        .saturating_mul((n as u64).saturating_mul(n as u64))
        .max(100)
}

/// Samples one spanning tree. `root` overrides [`default_root`].
pub fn sample_tree(
    g: &SignedGraph,
    method: SamplerMethod,
    seed: u64,
    iteration: u64,
    root: Option<u32>,
) -> Result<SpanningTree> {
    let n = g.vertex_count();
    if n == 0 {
        return Err(Error::Disconnected {
            reached: 0,
            total: 0,
        });
    }
    let mut rng = stream_rng(seed, iteration);
    let root = match root {
        Some(r) if (r as usize) < n => r,
        Some(r) => return Err(Error::InvalidConfig(format!("root {r} outside 0..{n}"))),
        None => default_root(g, method, &mut rng),
    };
    match method {
        SamplerMethod::Bfs => bfs(g, root),
        SamplerMethod::Dfs => dfs(g, root, None),
        SamplerMethod::Rdfs => dfs(g, root, Some(&mut rng)),
        SamplerMethod::AldousBroder => aldous_broder(g, root, &mut rng),
        SamplerMethod::KruskalRandom => kruskal(g, root, &mut rng),
        SamplerMethod::PrimRandom => prim(g, root, &mut rng),
        SamplerMethod::HybridRdfsBfs => {
            if rng.gen_bool(0.5) {
                dfs(g, root, Some(&mut rng))
            } else {
                bfs(g, root)
            }
        }
    }
}

struct TreeBuilder {
    root: u32,
    parent: Vec<u32>,
    parent_edge: Vec<u32>,
    is_tree_edge: Vec<bool>,
    order: Vec<u32>,
}

impl TreeBuilder {
    fn new(g: &SignedGraph, root: u32) -> TreeBuilder {
        let n = g.vertex_count();
        let mut order = Vec::with_capacity(n);
        order.push(root);
        TreeBuilder {
            root,
            parent: vec![NO_PARENT; n],
            parent_edge: vec![NO_PARENT; n],
            is_tree_edge: vec![false; g.edge_count()],
            order,
        }
    }

    #[inline]
    fn visited(&self, v: u32) -> bool {
        v == self.root || self.parent[v as usize] != NO_PARENT
    }

    #[inline]
    fn attach(&mut self, child: u32, parent: u32, edge: u32) {
        self.parent[child as usize] = parent;
        self.parent_edge[child as usize] = edge;
        self.is_tree_edge[edge as usize] = true;
        self.order.push(child);
    }

    fn finish(self) -> Result<SpanningTree> {
        let total = self.parent.len();
        if self.order.len() != total {
            return Err(Error::Disconnected {
                reached: self.order.len(),
                total,
            });
        }
        Ok(SpanningTree {
            root: self.root,
            parent: self.parent,
            parent_edge: self.parent_edge,
            is_tree_edge: self.is_tree_edge,
            order: self.order,
        })
    }
}

fn bfs(g: &SignedGraph, root: u32) -> Result<SpanningTree> {
    let mut t = TreeBuilder::new(g, root);
    let mut head = 0;
    while head < t.order.len() {
        let v = t.order[head];
        head += 1;
        for (w, _, e) in g.neighbors(v as usize) {
            if !t.visited(w) {
                t.attach(w, v, e);
            }
        }
    }
    t.finish()
}

/// Depth-first tree. With an rng, each vertex's neighbor list is shuffled
/// when the vertex is first expanded.
fn dfs(g: &SignedGraph, root: u32, mut rng: Option<&mut StreamRng>) -> Result<SpanningTree> {
    let mut t = TreeBuilder::new(g, root);
    let mut lists: Vec<Vec<(u32, u32)>> = Vec::new();
    let mut stack: Vec<(u32, usize)> = Vec::new();

    let expand = |v: u32, rng: &mut Option<&mut StreamRng>, lists: &mut Vec<Vec<(u32, u32)>>| {
        let (ns, _, es) = g.neighbor_slices(v as usize);
        let mut list: Vec<(u32, u32)> = ns.iter().copied().zip(es.iter().copied()).collect();
        if let Some(r) = rng.as_deref_mut() {
            list.shuffle(r);
        }
        lists.push(list);
        lists.len() - 1
    };

    let slot = expand(root, &mut rng, &mut lists);
    stack.push((root, slot));
    let mut cursors = vec![0usize];
    while let Some(&(v, slot)) = stack.last() {
        let list = &lists[slot];
        let mut next = None;
        while cursors[slot] < list.len() {
            let (w, e) = list[cursors[slot]];
            cursors[slot] += 1;
            if !t.visited(w) {
                next = Some((w, e));
                break;
            }
        }
        match next {
            Some((w, e)) => {
                t.attach(w, v, e);
                let s = expand(w, &mut rng, &mut lists);
                cursors.push(0);
                stack.push((w, s));
            }
            None => {
                stack.pop();
            }
        }
    }
    t.finish()
}

fn aldous_broder(g: &SignedGraph, root: u32, rng: &mut StreamRng) -> Result<SpanningTree> {
    let n = g.vertex_count();
    let mut t = TreeBuilder::new(g, root);
    if n > 1 && g.degree(root as usize) == 0 {
        return t.finish();
    }
    let cap = aldous_broder_cap(n);
    let mut steps = 0u64;
    let mut current = root;
    while t.order.len() < n {
        if steps >= cap {
            return Err(Error::WalkTimeout { cap });
        }
        steps += 1;
        let (ns, _, es) = g.neighbor_slices(current as usize);
        let k = rng.gen_range(0..ns.len());
        let w = ns[k];
        if !t.visited(w) {
            t.attach(w, current, es[k]);
        }
        current = w;
    }
    t.finish()
}

fn random_weights(g: &SignedGraph, rng: &mut StreamRng) -> Vec<f64> {
    (0..g.edge_count()).map(|_| rng.gen::<f64>()).collect()
}

/// Orients a set of tree edges away from `root`.
fn root_tree(g: &SignedGraph, root: u32, chosen: &[bool]) -> Result<SpanningTree> {
    let mut t = TreeBuilder::new(g, root);
    let mut head = 0;
    while head < t.order.len() {
        let v = t.order[head];
        head += 1;
        for (w, _, e) in g.neighbors(v as usize) {
            if chosen[e as usize] && !t.visited(w) {
                t.attach(w, v, e);
            }
        }
    }
    t.finish()
}

fn kruskal(g: &SignedGraph, root: u32, rng: &mut StreamRng) -> Result<SpanningTree> {
    let weights = random_weights(g, rng);
    let mut by_weight: Vec<u32> = (0..g.edge_count() as u32).collect();
    by_weight.sort_by(|&a, &b| {
        weights[a as usize]
            .total_cmp(&weights[b as usize])
            .then(a.cmp(&b))
    });
    let mut uf = UnionFind::new(g.vertex_count());
    let mut chosen = vec![false; g.edge_count()];
    let mut taken = 0;
    for e in by_weight {
        if taken + 1 >= g.vertex_count() {
            break;
        }
        let edge = g.edge(e as usize);
        if uf.union(edge.src, edge.tgt) {
            chosen[e as usize] = true;
            taken += 1;
        }
    }
    root_tree(g, root, &chosen)
}

struct Frontier {
    weight: f64,
    edge: u32,
    to: u32,
    from: u32,
}

impl PartialEq for Frontier {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Frontier {}

impl PartialOrd for Frontier {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Frontier {
    // Reversed: BinaryHeap pops the lightest edge, lowest index on ties.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .weight
            .total_cmp(&self.weight)
            .then(other.edge.cmp(&self.edge))
    }
}

fn prim(g: &SignedGraph, root: u32, rng: &mut StreamRng) -> Result<SpanningTree> {
    let weights = random_weights(g, rng);
    let mut t = TreeBuilder::new(g, root);
    let mut heap = BinaryHeap::new();
    let push_all = |v: u32, heap: &mut BinaryHeap<Frontier>, t: &TreeBuilder| {
        for (w, _, e) in g.neighbors(v as usize) {
            if !t.visited(w) {
                heap.push(Frontier {
                    weight: weights[e as usize],
                    edge: e,
                    to: w,
                    from: v,
                });
            }
        }
    };
    push_all(root, &mut heap, &t);
    while let Some(f) = heap.pop() {
        if t.visited(f.to) {
            continue;
        }
        t.attach(f.to, f.from, f.edge);
        push_all(f.to, &mut heap, &t);
    }
    t.finish()
}

/// Connected-component sweep used by callers that must reject disconnected input early.
pub fn require_connected(g: &SignedGraph) -> Result<()> {
    let n = g.vertex_count();
    if n == 0 {
        return Err(Error::Disconnected {
            reached: 0,
            total: 0,
        });
    }
    let mut seen = vec![false; n];
    let mut queue = VecDeque::from([0usize]);
    seen[0] = true;
    let mut reached = 1;
    while let Some(v) = queue.pop_front() {
        for (w, _, _) in g.neighbors(v) {
            if !seen[w as usize] {
                seen[w as usize] = true;
                reached += 1;
                queue.push_back(w as usize);
            }
        }
    }
    if reached == n {
        Ok(())
    } else {
        Err(Error::Disconnected { reached, total: n })
    }
}
