//! Shared helpers for the integration suites: an exhaustive enumerator of
//! small connected triangle-free graphs up to isomorphism, and seeded
//! builders for random lists and boundary conditions.

// each test binary uses its own subset of these helpers
#![allow(dead_code)]

use std::collections::HashSet;

use listmix::{BoundaryCondition, Distance, GraphListPair};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut items: Vec<usize> = (0..n).collect();
    fn heap(k: usize, items: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k <= 1 {
            out.push(items.clone());
            return;
        }
        for i in 0..k {
            heap(k - 1, items, out);
            if k.is_multiple_of(2) {
                items.swap(i, k - 1);
            } else {
                items.swap(0, k - 1);
            }
        }
    }
    heap(n, &mut items, &mut out);
    out
}

/// One representative edge list per isomorphism class of connected
/// triangle-free graphs on exactly `n` labeled vertices (`n <= 7`).
pub fn connected_triangle_free_classes(n: usize) -> Vec<Vec<(usize, usize)>> {
    assert!((1..=7).contains(&n));
    if n == 1 {
        return vec![Vec::new()];
    }
    let mut pairs = Vec::new();
    for u in 0..n {
        for v in (u + 1)..n {
            pairs.push((u, v));
        }
    }
    let m = pairs.len();
    let mut edge_id = vec![vec![usize::MAX; n]; n];
    for (id, &(u, v)) in pairs.iter().enumerate() {
        edge_id[u][v] = id;
        edge_id[v][u] = id;
    }
    let perms = permutations(n);

    let mut seen: HashSet<u32> = HashSet::new();
    let mut classes = Vec::new();
    for mask in 0u32..(1u32 << m) {
        // adjacency bitmasks
        let mut adj = [0u8; 7];
        let mut bits = mask;
        let mut triangle = false;
        while bits != 0 {
            let id = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            let (u, v) = pairs[id];
            if adj[u] & adj[v] != 0 {
                triangle = true;
                break;
            }
            adj[u] |= 1 << v;
            adj[v] |= 1 << u;
        }
        if triangle {
            continue;
        }
        // connectivity
        let mut reached: u8 = 1;
        let mut frontier: u8 = 1;
        while frontier != 0 {
            let mut next: u8 = 0;
            let mut f = frontier;
            while f != 0 {
                let u = f.trailing_zeros() as usize;
                f &= f - 1;
                next |= adj[u] & !reached;
            }
            reached |= next;
            frontier = next;
        }
        if reached.count_ones() as usize != n {
            continue;
        }
        // canonical form: minimum relabeled mask over all permutations
        let mut canon = mask;
        for perm in &perms {
            let mut remapped = 0u32;
            let mut bits = mask;
            while bits != 0 {
                let id = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                let (u, v) = pairs[id];
                remapped |= 1 << edge_id[perm[u]][perm[v]];
            }
            canon = canon.min(remapped);
        }
        if seen.insert(canon) {
            let edges = pairs
                .iter()
                .enumerate()
                .filter(|&(id, _)| canon >> id & 1 == 1)
                .map(|(_, &e)| e)
                .collect();
            classes.push(edges);
        }
    }
    classes
}

/// Random nonempty lists of `min_size..=max_size` colors from `1..=palette`.
pub fn random_lists(
    n: usize,
    palette: u32,
    min_size: usize,
    max_size: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<Vec<u32>> {
    (0..n)
        .map(|_| {
            let size = rng.random_range(min_size..=max_size.min(palette as usize));
            let mut colors: Vec<u32> = (1..=palette).collect();
            for i in 0..size {
                let j = rng.random_range(i..colors.len());
                colors.swap(i, j);
            }
            colors.truncate(size);
            colors.sort_unstable();
            colors
        })
        .collect()
}

/// Assigns each vertex of `vertices` independently with the given
/// probability, choosing a uniform color from its list.
pub fn random_condition_on(
    pair: &GraphListPair,
    vertices: &[usize],
    assign_probability: f64,
    rng: &mut ChaCha8Rng,
) -> BoundaryCondition {
    let mut cond = BoundaryCondition::empty();
    for &v in vertices {
        if rng.random_bool(assign_probability) {
            let colors = pair.list(v).to_vec();
            cond.set(v, colors[rng.random_range(0..colors.len())]);
        }
    }
    cond
}

pub fn random_condition(
    pair: &GraphListPair,
    assign_probability: f64,
    rng: &mut ChaCha8Rng,
) -> BoundaryCondition {
    let all: Vec<usize> = pair.vertices().collect();
    random_condition_on(pair, &all, assign_probability, rng)
}

/// Largest finite eccentricity.
pub fn diameter(pair: &GraphListPair) -> usize {
    let mut best = 0;
    for v in pair.vertices() {
        let dist = pair.distances_from_set(&[v]).unwrap();
        for d in dist {
            if let Distance::Finite(x) = d {
                best = best.max(x);
            }
        }
    }
    best
}
