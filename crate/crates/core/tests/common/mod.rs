#![allow(dead_code)]

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use sgb_core::{
    build_signed_graph, largest_connected_component, parse_edge_str, EdgeListFormat, Sign,
    SignedGraph,
};

pub type Edges = Vec<(u32, u32, Sign)>;

pub fn rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

fn random_sign<R: Rng>(rng: &mut R, p_negative: f64) -> Sign {
    if rng.gen_bool(p_negative) {
        Sign::Negative
    } else {
        Sign::Positive
    }
}

/// Random spanning tree on `n` vertices plus extra distinct edges, up to `m` edges total.
pub fn random_connected<R: Rng>(rng: &mut R, n: usize, m: usize, p_negative: f64) -> Edges {
    assert!(n >= 1);
    let max_edges = n * (n - 1) / 2;
    let m = m.clamp(n - 1, max_edges);
    let mut perm: Vec<u32> = (0..n as u32).collect();
    perm.shuffle(rng);
    let mut seen = HashSet::new();
    let mut edges = Vec::with_capacity(m);
    for i in 1..n {
        let (a, b) = (perm[i], perm[rng.gen_range(0..i)]);
        seen.insert((a.min(b), a.max(b)));
        edges.push((a, b, random_sign(rng, p_negative)));
    }
    while edges.len() < m {
        let a = rng.gen_range(0..n as u32);
        let b = rng.gen_range(0..n as u32);
        if a != b && seen.insert((a.min(b), a.max(b))) {
            edges.push((a, b, random_sign(rng, p_negative)));
        }
    }
    edges
}

pub fn graph(n: usize, edges: &Edges) -> SignedGraph {
    SignedGraph::new(n, edges).expect("valid test graph")
}

/// A connected graph with |V| in `2..=max_v` and |E| at most `max_e`.
pub fn small_instance<R: Rng>(
    rng: &mut R,
    max_v: usize,
    max_e: usize,
    p_negative: f64,
) -> (usize, Edges) {
    let n = rng.gen_range(2..=max_v);
    let cap = (n * (n - 1) / 2).min(max_e);
    let m = rng.gen_range(n - 1..=cap);
    (n, random_connected(rng, n, m, p_negative))
}

/// Minimum frustration over all `2^n` vertex sign vectors, straight from the edge list.
pub fn brute_force_frustration(n: usize, edges: &Edges) -> usize {
    assert!(n <= 24);
    (0u64..1 << n)
        .map(|mask| {
            edges
                .iter()
                .filter(|&&(a, b, s)| {
                    let same = ((mask >> a) & 1) == ((mask >> b) & 1);
                    (s == Sign::Positive) != same
                })
                .count()
        })
        .min()
        .unwrap()
}

/// Checks balance by brute force: some vertex sign vector satisfies every edge.
pub fn brute_force_balanced(n: usize, edges: &[(u32, u32)], signs: &[Sign]) -> bool {
    (0u64..1 << n).any(|mask| {
        edges.iter().zip(signs).all(|(&(a, b), &s)| {
            let same = ((mask >> a) & 1) == ((mask >> b) & 1);
            (s == Sign::Positive) == same
        })
    })
}

pub fn data_dir() -> PathBuf {
    match std::env::var_os("SGB_DATA_DIR") {
        Some(d) => PathBuf::from(d),
        None => Path::new(env!("CARGO_MANIFEST_DIR"))
            .ancestors()
            .nth(2)
            .expect("crate sits two levels below the workspace root")
            .join("data"),
    }
}

/// Largest connected component of a dataset file, or a message saying why it is unavailable.
pub fn load_dataset(file: &str) -> Result<SignedGraph, String> {
    let path = data_dir().join(file);
    let text = std::fs::read_to_string(&path).map_err(|e| {
        format!(
            "dataset {} unavailable ({e}); set SGB_DATA_DIR",
            path.display()
        )
    })?;
    let parsed = parse_edge_str(&text, EdgeListFormat::detect(&text));
    let (g, _) = build_signed_graph(&parsed.records).map_err(|e| e.to_string())?;
    let (lcc, _) = largest_connected_component(&g).map_err(|e| e.to_string())?;
    Ok(lcc)
}
