//! Independent baselines used to check the decomposition-based algorithms:
//! Karp's minimum mean cycle, simple-cycle enumeration, energy value
//! iteration and Bellman-Ford with cycle witnesses.

use num_bigint::BigInt;

use crate::graph::{Edge, NodeId, WeightedDigraph};
use crate::rational::Rational;
use crate::{Error, Result};

pub const DEFAULT_CYCLE_CAP: usize = 1_000_000;

/// Minimum mean cycle value over the whole graph.
///
/// Karp's recurrence with every node as a start (a virtual source with
/// zero-weight edges), so the graph need not be strongly connected.
pub fn karp_mean(g: &WeightedDigraph) -> Result<Rational> {
    let n = g.node_count();
    // d[k][v]: minimum weight of a walk with exactly k edges ending at v.
    let mut d: Vec<Vec<Option<i128>>> = vec![vec![Some(0); n]];
    for k in 1..=n {
        let prev = &d[k - 1];
        let mut cur = vec![None; n];
        for e in g.edges() {
            if let Some(a) = prev[e.source.index()] {
                let cand = a + e.weight as i128;
                let slot: &mut Option<i128> = &mut cur[e.target.index()];
                if slot.is_none_or(|x| cand < x) {
                    *slot = Some(cand);
                }
            }
        }
        d.push(cur);
    }
    let mut best: Option<Rational> = None;
    for v in 0..n {
        let Some(dn) = d[n][v] else { continue };
        let worst = (0..n)
            .filter_map(|k| d[k][v].map(|dk| Rational::new(BigInt::from(dn - dk), BigInt::from(n - k))))
            .max()
            .expect("d[0] is finite");
        if best.as_ref().is_none_or(|b| &worst < b) {
            best = Some(worst);
        }
    }
    best.ok_or(Error::Acyclic)
}

/// A simple cycle: `nodes[0] -> nodes[1] -> ... -> nodes[0]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycleRecord {
    pub nodes: Vec<NodeId>,
    pub weight: i128,
    pub transit: i128,
}

impl CycleRecord {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn mean(&self) -> Rational {
        Rational::new(self.weight.into(), (self.nodes.len() as i128).into())
    }

    pub fn ratio(&self) -> Rational {
        Rational::new(self.weight.into(), self.transit.into())
    }
}

/// All simple cycles, each listed once starting from its smallest node.
///
/// Fails with [`Error::OracleTooBig`] rather than truncating.
pub fn enumerate_cycles(g: &WeightedDigraph, cap: usize) -> Result<Vec<CycleRecord>> {
    let n = g.node_count();
    let mut out = Vec::new();
    let mut on_path = vec![false; n];
    for s in 0..n {
        // (node, next out-edge position); path edges kept alongside.
        let mut stack: Vec<(usize, usize)> = vec![(s, 0)];
        let mut path_edges: Vec<&Edge> = Vec::new();
        on_path[s] = true;
        while let Some(&mut (u, ref mut pos)) = stack.last_mut() {
            let outs = g.out_edges(NodeId::new(u));
            if *pos == outs.len() {
                on_path[u] = false;
                stack.pop();
                path_edges.pop();
                continue;
            }
            let e = g.edge(outs[*pos]);
            *pos += 1;
            let v = e.target.index();
            if v == s {
                if out.len() == cap {
                    return Err(Error::OracleTooBig { cap });
                }
                let mut weight = e.weight as i128;
                let mut transit = e.transit as i128;
                for pe in &path_edges {
                    weight += pe.weight as i128;
                    transit += pe.transit as i128;
                }
                out.push(CycleRecord {
                    nodes: stack.iter().map(|&(x, _)| NodeId::new(x)).collect(),
                    weight,
                    transit,
                });
            } else if v > s && !on_path[v] {
                on_path[v] = true;
                stack.push((v, 0));
                path_edges.push(e);
            }
        }
    }
    Ok(out)
}

/// Nodes reachable from each node (including itself).
pub fn reachability(g: &WeightedDigraph) -> Vec<Vec<bool>> {
    let n = g.node_count();
    (0..n)
        .map(|s| {
            let mut seen = vec![false; n];
            seen[s] = true;
            let mut stack = vec![NodeId::new(s)];
            while let Some(u) = stack.pop() {
                for v in g.successors(u) {
                    if !seen[v.index()] {
                        seen[v.index()] = true;
                        stack.push(v);
                    }
                }
            }
            seen
        })
        .collect()
}

/// Per node, the minimum of `value` over the cycles it reaches.
pub fn per_node_min<T: Ord + Clone>(
    g: &WeightedDigraph,
    cycles: &[CycleRecord],
    value: impl Fn(&CycleRecord) -> T,
) -> Vec<Option<T>> {
    let reach = reachability(g);
    let vals: Vec<T> = cycles.iter().map(&value).collect();
    (0..g.node_count())
        .map(|u| {
            cycles
                .iter()
                .zip(&vals)
                .filter(|(c, _)| reach[u][c.nodes[0].index()])
                .map(|(_, v)| v.clone())
                .min()
        })
        .collect()
}

/// Minimum initial credit in the standard convention (`None` is +∞):
/// the least fixpoint of `f(u) = min over (u,v) of max(0, f(v) - wt(u,v))`,
/// where values above `n * W` are infinite.
pub fn energy_fixpoint(g: &WeightedDigraph) -> Vec<Option<i128>> {
    let n = g.node_count();
    let cutoff = n as i128 * g.max_abs_weight() as i128;
    let mut f: Vec<Option<i128>> = (0..n)
        .map(|u| {
            if g.out_edges(NodeId::new(u)).is_empty() {
                None
            } else {
                Some(0)
            }
        })
        .collect();
    loop {
        let mut changed = false;
        for u in 0..n {
            if f[u].is_none() {
                continue;
            }
            let best = g
                .out_edges(NodeId::new(u))
                .iter()
                .filter_map(|&e| {
                    let e = g.edge(e);
                    f[e.target.index()].map(|fv| (fv - e.weight as i128).max(0))
                })
                .min();
            let next = best.filter(|&x| x <= cutoff);
            if next != f[u] {
                f[u] = next;
                changed = true;
            }
        }
        if !changed {
            return f;
        }
    }
}

/// Result of a Bellman-Ford run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShortestPaths {
    /// `None` is unreachable. Meaningless when a negative cycle exists.
    pub dist: Vec<Option<i128>>,
    /// Index (into the edge list) of the last edge on a shortest path.
    pub pred: Vec<Option<usize>>,
    /// Edge indices of a negative cycle, in cycle order.
    pub negative_cycle: Option<Vec<usize>>,
}

/// Bellman-Ford over an explicit edge list `(source, target, weight)`.
///
/// With `source = None` every node starts at distance 0, as if a virtual
/// source had zero-weight edges to all of them.
pub fn bellman_ford_edges(
    n: usize,
    edges: &[(usize, usize, i128)],
    source: Option<usize>,
) -> Result<ShortestPaths> {
    let mut dist: Vec<Option<i128>> = match source {
        Some(s) => {
            let mut d = vec![None; n];
            d[s] = Some(0);
            d
        }
        None => vec![Some(0); n],
    };
    let mut pred: Vec<Option<usize>> = vec![None; n];
    // Without a negative cycle, n-1 rounds settle a real source and n a
    // virtual one; one more round tells.
    let rounds = if source.is_some() { n } else { n + 1 };
    let mut last_relaxed = None;
    for _ in 0..rounds {
        last_relaxed = None;
        for (i, &(u, v, w)) in edges.iter().enumerate() {
            let Some(du) = dist[u] else { continue };
            let cand = du
                .checked_add(w)
                .ok_or_else(|| Error::Internal("distance overflowed i128".into()))?;
            if dist[v].is_none_or(|dv| cand < dv) {
                dist[v] = Some(cand);
                pred[v] = Some(i);
                last_relaxed = Some(v);
            }
        }
        if last_relaxed.is_none() {
            break;
        }
    }
    let negative_cycle = match last_relaxed {
        None => None,
        Some(x) => Some(
            predecessor_cycle(n, edges, &pred, x)
                .ok_or_else(|| Error::Internal("relaxation persisted without a predecessor cycle".into()))?,
        ),
    };
    Ok(ShortestPaths {
        dist,
        pred,
        negative_cycle,
    })
}

/// A cycle of predecessor links, searched from `first` and then from every
/// node in order. Predecessor cycles are always negative.
fn predecessor_cycle(
    n: usize,
    edges: &[(usize, usize, i128)],
    pred: &[Option<usize>],
    first: usize,
) -> Option<Vec<usize>> {
    let mut stamp = vec![usize::MAX; n];
    for (walk, s) in std::iter::once(first).chain(0..n).enumerate() {
        let mut x = s;
        while stamp[x] == usize::MAX {
            stamp[x] = walk;
            match pred[x] {
                Some(e) => x = edges[e].0,
                None => break,
            }
        }
        if stamp[x] == walk && pred[x].is_some() {
            let start = x;
            let mut cyc = Vec::new();
            loop {
                let e = pred[x].expect("on a predecessor cycle");
                cyc.push(e);
                x = edges[e].0;
                if x == start {
                    break;
                }
            }
            cyc.reverse();
            return Some(cyc);
        }
    }
    None
}

/// Bellman-Ford on `g` under `weight`; cycle edges index `g.edges()`.
pub fn bellman_ford(
    g: &WeightedDigraph,
    source: Option<NodeId>,
    weight: impl Fn(&Edge) -> i128,
) -> Result<ShortestPaths> {
    let edges: Vec<(usize, usize, i128)> = g
        .edges()
        .iter()
        .map(|e| (e.source.index(), e.target.index(), weight(e)))
        .collect();
    bellman_ford_edges(g.node_count(), &edges, source.map(NodeId::index))
}
