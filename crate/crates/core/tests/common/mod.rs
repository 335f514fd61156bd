#![allow(dead_code)]

use std::collections::VecDeque;

use lowtw_core::gen::{ktree, sparse_random, GenParams};
use lowtw_core::graph::tarjan_scc;
use lowtw_core::oracles::{enumerate_cycles, CycleRecord, DEFAULT_CYCLE_CAP};
use lowtw_core::treedec::TreeDecomposition;
use lowtw_core::{NodeId, Rational, WeightedDigraph};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Strongly connected random k-tree with k <= 3 and n <= `max_n`, found by
/// walking seeds from `seed` upwards. Returns the graph and the seed used.
pub fn strong_ktree(seed: u64, max_n: usize, weights: (i64, i64), transit: (i64, i64)) -> (WeightedDigraph, u64) {
    let mut s = seed.wrapping_mul(0x9e37_79b9);
    loop {
        let mut rng = ChaCha8Rng::seed_from_u64(s);
        let k = rng.gen_range(1..=3usize);
        let n = rng.gen_range((k + 1).max(2)..=max_n);
        let g = ktree(&GenParams { n, k, weights, transit, seed: s }).expect("valid k");
        if tarjan_scc(&g).len() == 1 {
            return (g, s);
        }
        s = s.wrapping_add(1);
    }
}

/// Small random digraph (n <= `max_n`): k-tree or sparse random, not
/// necessarily strongly connected.
pub fn small_graph(seed: u64, max_n: usize, weights: (i64, i64)) -> WeightedDigraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5151);
    let n = rng.gen_range(1..=max_n);
    let k = rng.gen_range(1..=3usize);
    let p = GenParams { n, k, weights, transit: (1, 1), seed };
    if rng.gen_bool(0.5) && n > k {
        ktree(&p).expect("valid k")
    } else {
        sparse_random(&p).expect("valid params")
    }
}

pub fn cycles(g: &WeightedDigraph) -> Vec<CycleRecord> {
    enumerate_cycles(g, DEFAULT_CYCLE_CAP).expect("small instance")
}

pub fn min_ratio(cs: &[CycleRecord]) -> Option<Rational> {
    cs.iter().map(CycleRecord::ratio).min()
}

pub fn min_mean(cs: &[CycleRecord]) -> Option<Rational> {
    cs.iter().map(CycleRecord::mean).min()
}

pub fn min_weight(cs: &[CycleRecord]) -> Option<i128> {
    cs.iter().map(|c| c.weight).min()
}

/// Separator property of every tree edge: with the shared nodes removed,
/// no skeleton path joins a node seen only below the edge to a node seen
/// only above it.
pub fn separators_hold(t: &TreeDecomposition, g: &WeightedDigraph) -> bool {
    let n = g.node_count();
    let mut adj = vec![Vec::new(); n];
    for e in g.edges() {
        adj[e.source.index()].push(e.target.index());
        adj[e.target.index()].push(e.source.index());
    }
    for b in t.post_order() {
        let Some(p) = t.bag(b).parent else { continue };
        let mut below = vec![false; n];
        let mut stack = vec![b];
        while let Some(c) = stack.pop() {
            for &u in &t.bag(c).nodes {
                if u.index() < n {
                    below[u.index()] = true;
                }
            }
            stack.extend(t.bag(c).children.iter().copied());
        }
        let shared: Vec<NodeId> = t.bag(b).nodes.iter().copied().filter(|&u| t.bag(p).contains(u)).collect();
        let mut blocked = vec![false; n];
        for u in &shared {
            if u.index() < n {
                blocked[u.index()] = true;
            }
        }
        // A node is "above" if it occurs in some bag outside the subtree.
        let mut above = vec![false; n];
        let mut in_sub = vec![false; t.bag_count()];
        let mut stack = vec![b];
        while let Some(c) = stack.pop() {
            in_sub[c.index()] = true;
            stack.extend(t.bag(c).children.iter().copied());
        }
        for (i, bag) in t.bags().iter().enumerate() {
            if !in_sub[i] {
                for &u in &bag.nodes {
                    if u.index() < n {
                        above[u.index()] = true;
                    }
                }
            }
        }
        let mut seen = blocked.clone();
        let mut queue: VecDeque<usize> = VecDeque::new();
        for u in 0..n {
            if below[u] && !blocked[u] {
                seen[u] = true;
                queue.push_back(u);
            }
        }
        while let Some(u) = queue.pop_front() {
            if above[u] && !below[u] {
                return false;
            }
            for &v in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
    }
    true
}

/// Smallest k with 2^k >= x, for positive x.
pub fn ceil_log2(x: &Rational) -> u64 {
    let mut k = 0u64;
    let mut p = Rational::from_integer(1.into());
    let two = Rational::from_integer(2.into());
    while &p < x {
        p *= &two;
        k += 1;
    }
    k
}
