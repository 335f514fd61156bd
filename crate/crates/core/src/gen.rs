//! Seeded synthetic graph families: random k-trees, structured
//! control-flow-like graphs and sparse random digraphs.

use std::collections::HashSet;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{tarjan_scc, GraphBuilder, NodeId, WeightedDigraph};
use crate::{Error, Result};

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum GenKind {
    KTree,
    SparseRandom,
    CfgLike,
}

impl FromStr for GenKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ktree" => Ok(GenKind::KTree),
            "sparse-random" => Ok(GenKind::SparseRandom),
            "cfg-like" => Ok(GenKind::CfgLike),
            _ => Err(Error::Domain(format!("unknown generator `{s}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenParams {
    pub n: usize,
    /// Clique size parameter for k-trees, average out-degree for sparse
    /// random graphs; unused for control-flow-like graphs.
    pub k: usize,
    /// Inclusive weight range.
    pub weights: (i64, i64),
    /// Inclusive transit range, at least 1.
    pub transit: (i64, i64),
    pub seed: u64,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams {
            n: 100,
            k: 2,
            weights: (-10, 10),
            transit: (1, 1),
            seed: 0,
        }
    }
}

pub fn generate(kind: GenKind, p: &GenParams) -> Result<WeightedDigraph> {
    if p.weights.0 > p.weights.1 {
        return Err(Error::Domain("empty weight range".into()));
    }
    if p.transit.0 < 1 || p.transit.0 > p.transit.1 {
        return Err(Error::Domain("transit range must be non-empty and >= 1".into()));
    }
    match kind {
        GenKind::KTree => ktree(p),
        GenKind::SparseRandom => sparse_random(p),
        GenKind::CfgLike => Ok(cfg_like(p)),
    }
}

struct Weigher {
    rng: ChaCha8Rng,
    weights: (i64, i64),
    transit: (i64, i64),
    seen: HashSet<(usize, usize)>,
}

impl Weigher {
    fn new(p: &GenParams) -> Self {
        Weigher {
            rng: ChaCha8Rng::seed_from_u64(p.seed),
            weights: p.weights,
            transit: p.transit,
            seen: HashSet::new(),
        }
    }

    /// Adds `u -> v` with random weights unless the arc already exists.
    fn edge(&mut self, b: &mut GraphBuilder, u: usize, v: usize) {
        let w = self.rng.gen_range(self.weights.0..=self.weights.1);
        let t = self.rng.gen_range(self.transit.0..=self.transit.1);
        if self.seen.insert((u, v)) {
            b.add_edge(NodeId::new(u), NodeId::new(v), w, t)
                .expect("generated edge is valid");
        }
    }
}

/// Random k-tree: a (k+1)-clique grown by attaching each new node to a
/// random existing k-clique. Each undirected edge becomes both arcs with
/// probability 1/2 and one random arc otherwise.
pub fn ktree(p: &GenParams) -> Result<WeightedDigraph> {
    let k = p.k;
    if k == 0 || k > 5 {
        return Err(Error::Domain(format!("k must be in 1..=5, got {k}")));
    }
    let mut wg = Weigher::new(p);
    let n = p.n;
    let mut undirected: Vec<(usize, usize)> = Vec::new();
    let base = n.min(k + 1);
    for u in 0..base {
        for v in u + 1..base {
            undirected.push((u, v));
        }
    }
    let mut cliques: Vec<Vec<usize>> = Vec::new();
    if n > k {
        for skip in 0..=k {
            cliques.push((0..=k).filter(|&x| x != skip).collect());
        }
    }
    for v in k + 1..n {
        let c = cliques[wg.rng.gen_range(0..cliques.len())].clone();
        for &u in &c {
            undirected.push((u, v));
        }
        for i in 0..c.len() {
            let mut next = c.clone();
            next[i] = v;
            cliques.push(next);
        }
    }
    let mut b = GraphBuilder::with_nodes(n);
    for (u, v) in undirected {
        match wg.rng.gen_range(0..4) {
            0 | 1 => {
                wg.edge(&mut b, u, v);
                wg.edge(&mut b, v, u);
            }
            2 => wg.edge(&mut b, u, v),
            _ => wg.edge(&mut b, v, u),
        }
    }
    Ok(b.build())
}

/// Up to `k * n` distinct arcs between uniformly random distinct endpoints, plus a
/// Hamiltonian cycle through a random permutation so every node lies on a
/// cycle.
pub fn sparse_random(p: &GenParams) -> Result<WeightedDigraph> {
    let n = p.n;
    let mut wg = Weigher::new(p);
    let mut b = GraphBuilder::with_nodes(n);
    if n == 0 {
        return Ok(b.build());
    }
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut wg.rng);
    if n > 1 {
        for i in 0..n {
            wg.edge(&mut b, perm[i], perm[(i + 1) % n]);
        }
    }
    let extra = (p.k.max(1) * n).saturating_sub(n);
    if n > 1 {
        for _ in 0..extra {
            let u = wg.rng.gen_range(0..n);
            let mut v = wg.rng.gen_range(0..n - 1);
            if v >= u {
                v += 1;
            }
            wg.edge(&mut b, u, v);
        }
    }
    Ok(b.build())
}

/// Control flow of a random structured program with exactly `n` nodes:
/// sequences, if-else diamonds and while loops, plus an edge from the exit
/// back to the entry.
pub fn cfg_like(p: &GenParams) -> WeightedDigraph {
    let n = p.n;
    let mut wg = Weigher::new(p);
    let mut arcs: Vec<(usize, usize)> = Vec::new();
    let mut next = 0usize;
    if n == 0 {
        return GraphBuilder::new().build();
    }
    // Explicit stack of pending regions so deep nesting cannot overflow.
    // Each region gets a budget and fills in (entry, exit) slots.
    enum Task {
        Build { budget: usize, slot: usize },
        Seq { first: usize, second: usize, slot: usize },
        If { cond: usize, join: usize, then_s: usize, else_s: usize, slot: usize },
        While { head: usize, exit: usize, body: usize, slot: usize },
    }
    let mut slots: Vec<(usize, usize)> = vec![(0, 0)];
    let mut tasks = vec![Task::Build { budget: n, slot: 0 }];
    while let Some(task) = tasks.pop() {
        match task {
            Task::Build { budget, slot } => {
                let choice = if budget == 1 {
                    0
                } else if budget == 2 {
                    1
                } else if budget == 3 {
                    1 + wg.rng.gen_range(0..2) * 2
                } else {
                    1 + wg.rng.gen_range(0..3)
                };
                match choice {
                    0 => {
                        let v = next;
                        next += 1;
                        slots[slot] = (v, v);
                    }
                    1 => {
                        let left = wg.rng.gen_range(1..budget);
                        let (a, b2) = (slots.len(), slots.len() + 1);
                        slots.push((0, 0));
                        slots.push((0, 0));
                        tasks.push(Task::Seq { first: a, second: b2, slot });
                        tasks.push(Task::Build { budget: budget - left, slot: b2 });
                        tasks.push(Task::Build { budget: left, slot: a });
                    }
                    2 => {
                        let cond = next;
                        let join = next + 1;
                        next += 2;
                        let inner = budget - 2;
                        let left = wg.rng.gen_range(1..inner);
                        let (a, b2) = (slots.len(), slots.len() + 1);
                        slots.push((0, 0));
                        slots.push((0, 0));
                        tasks.push(Task::If { cond, join, then_s: a, else_s: b2, slot });
                        tasks.push(Task::Build { budget: inner - left, slot: b2 });
                        tasks.push(Task::Build { budget: left, slot: a });
                    }
                    _ => {
                        let head = next;
                        let exit = next + 1;
                        next += 2;
                        let body = slots.len();
                        slots.push((0, 0));
                        tasks.push(Task::While { head, exit, body, slot });
                        tasks.push(Task::Build { budget: budget - 2, slot: body });
                    }
                }
            }
            Task::Seq { first, second, slot } => {
                arcs.push((slots[first].1, slots[second].0));
                slots[slot] = (slots[first].0, slots[second].1);
            }
            Task::If { cond, join, then_s, else_s, slot } => {
                arcs.push((cond, slots[then_s].0));
                arcs.push((cond, slots[else_s].0));
                arcs.push((slots[then_s].1, join));
                arcs.push((slots[else_s].1, join));
                slots[slot] = (cond, join);
            }
            Task::While { head, exit, body, slot } => {
                arcs.push((head, slots[body].0));
                arcs.push((slots[body].1, head));
                arcs.push((head, exit));
                slots[slot] = (head, exit);
            }
        }
    }
    debug_assert_eq!(next, n);
    let (entry, exit) = slots[0];
    let mut b = GraphBuilder::with_nodes(n);
    for (u, v) in arcs {
        wg.edge(&mut b, u, v);
    }
    wg.edge(&mut b, exit, entry);
    b.build()
}

/// Subgraph induced by the largest strongly connected component (lowest
/// component index on ties), relabelled densely.
pub fn largest_scc(g: &WeightedDigraph) -> WeightedDigraph {
    let scc = tarjan_scc(g);
    let Some(best) = (0..scc.len()).max_by_key(|&c| (scc.components[c].len(), std::cmp::Reverse(c))) else {
        return g.clone();
    };
    let (sub, _) = g.induced_subgraph(&scc.components[best]);
    // Fresh labels so output files read 0..n'.
    let mut b = GraphBuilder::with_nodes(sub.node_count());
    for e in sub.edges() {
        b.add_edge(e.source, e.target, e.weight, e.transit).expect("valid edge");
    }
    b.build()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::treedec::{eliminate, Heuristic};

    fn params(n: usize, k: usize, seed: u64) -> GenParams {
        GenParams {
            n,
            k,
            seed,
            ..GenParams::default()
        }
    }

    #[test]
    fn deterministic() {
        for kind in [GenKind::KTree, GenKind::SparseRandom, GenKind::CfgLike] {
            let a = generate(kind, &params(60, 2, 7)).unwrap().to_edgelist();
            let b = generate(kind, &params(60, 2, 7)).unwrap().to_edgelist();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn ktree_width_is_k() {
        for k in 1..=4 {
            let g = ktree(&params(80, k, 3)).unwrap();
            assert_eq!(g.node_count(), 80);
            assert!(eliminate(&g, Heuristic::MinFill).width <= k);
        }
        assert!(ktree(&params(10, 6, 0)).is_err());
    }

    #[test]
    fn cfg_like_has_exact_size_and_one_component() {
        for n in [1, 2, 3, 4, 17, 500] {
            let g = cfg_like(&params(n, 0, n as u64));
            assert_eq!(g.node_count(), n);
            assert_eq!(tarjan_scc(&g).len(), 1, "n = {n}");
        }
    }

    #[test]
    fn sparse_random_is_strongly_connected() {
        let g = sparse_random(&params(200, 3, 1)).unwrap();
        assert_eq!(tarjan_scc(&g).len(), 1);
        assert!(g.edge_count() >= 200);
    }

    #[test]
    fn largest_component() {
        let g = WeightedDigraph::from_weighted(5, &[(0, 1, 0), (1, 0, 0), (2, 3, 0), (3, 4, 0), (4, 2, 0)]);
        assert_eq!(largest_scc(&g).node_count(), 3);
    }
}
