//! Minimum initial credit on graphs of low treewidth.
//!
//! Walk tables carry triples `(a, b, c)`: the walk weight, a node reached
//! by a maximum-weight prefix, and that prefix weight. A table entry
//! `(u, u)` with `a <= 0` is a non-positive closed walk and `b` is a node
//! of energy 0. Such a node is removed by redirecting its in-edges to the
//! apex `z`, after which the affected tables are recomputed bottom-up.
//! Distances to `z` in the final graph give the energies, as in
//! [`crate::energy`]. Internal (non-positive) convention throughout, except
//! for [`energy_values_tw`].

use std::collections::BTreeSet;

use crate::energy::{flip, Energies};
use crate::graph::{NodeId, WeightedDigraph};
use crate::mincycle::{intro_bag, sweep};
use crate::treedec::{build_decomposition, validate, BagId, Heuristic, TreeDecomposition};
use crate::{Error, Result};

/// Walk summary `(a, b, c)`; see the module docs.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub struct Triple {
    pub a: i64,
    pub b: NodeId,
    pub c: i64,
}

/// A table entry; `None` means no walk.
pub type Entry = Option<Triple>;

/// Smaller walk weight wins; ties keep the first argument.
pub fn triple_min(x: Entry, y: Entry) -> Entry {
    match (x, y) {
        (Some(p), Some(q)) => Some(if q.a < p.a { q } else { p }),
        (p, None) => p,
        (None, q) => q,
    }
}

/// Concatenation of two walks.
pub fn triple_plus(x: Entry, y: Entry) -> Result<Entry> {
    let (Some(p), Some(q)) = (x, y) else {
        return Ok(None);
    };
    let overflow = || Error::Internal("walk weight overflowed i64".into());
    let a = p.a.checked_add(q.a).ok_or_else(overflow)?;
    let tail = p.a.checked_add(q.c).ok_or_else(overflow)?;
    Ok(Some(if p.c >= tail {
        Triple { a, b: p.b, c: p.c }
    } else {
        Triple { a, b: q.b, c: tail }
    }))
}

/// Triple of the single edge `u -> v` of weight `w` (`None` if absent).
///
/// Entering `z` never makes `z` the highest node: the next edge out of
/// `z` weighs 0 and reaches a real node at the same prefix weight.
pub fn lift(w: Option<i64>, u: NodeId, v: NodeId, z: NodeId) -> Entry {
    let w = w?;
    Some(if w < 0 || v == z {
        Triple { a: w, b: u, c: 0 }
    } else {
        Triple { a: w, b: v, c: w }
    })
}

/// Triple of an explicit walk by scanning its prefixes: the first
/// maximum, counting the empty prefix at the start.
pub fn scan_walk(nodes: &[NodeId], weights: &[i64]) -> Triple {
    assert_eq!(nodes.len(), weights.len() + 1);
    let mut best = Triple {
        a: 0,
        b: nodes[0],
        c: 0,
    };
    let mut prefix = 0i64;
    for (i, w) in weights.iter().enumerate() {
        prefix += w;
        if prefix > best.c {
            best.b = nodes[i + 1];
            best.c = prefix;
        }
    }
    best.a = prefix;
    best
}

/// Decomposition of the apex-augmented graph; see
/// [`TreeDecomposition::with_apex`].
pub fn extend_decomposition_with_z(t: &TreeDecomposition) -> TreeDecomposition {
    t.with_apex()
}

/// Counters of one run.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TwStats {
    pub kills: usize,
    /// Table recomputations caused by kills.
    pub update_recomputes: usize,
    /// Height of the augmented decomposition.
    pub height: usize,
    pub bags: usize,
    /// Edges of the augmented graph.
    pub edges: usize,
}

/// The augmented graph with mutable weights.
#[derive(Clone, Debug)]
pub struct WorkingGraph {
    n: usize,
    /// Original edges, then `z -> v` for every `v`, then `x -> z`.
    ends: Vec<(NodeId, NodeId)>,
    base: Vec<i64>,
    current: Vec<Option<i64>>,
    incoming: Vec<Vec<usize>>,
}

impl WorkingGraph {
    fn new(g: &WeightedDigraph) -> Self {
        let n = g.node_count();
        let z = NodeId::new(n);
        let mut ends = Vec::with_capacity(g.edge_count() + 2 * n);
        let mut base = Vec::with_capacity(g.edge_count() + 2 * n);
        let mut current = Vec::with_capacity(g.edge_count() + 2 * n);
        for e in g.edges() {
            ends.push((e.source, e.target));
            base.push(e.weight);
            current.push(Some(e.weight));
        }
        for v in g.nodes() {
            ends.push((z, v));
            base.push(0);
            current.push(Some(0));
        }
        for x in g.nodes() {
            ends.push((x, z));
            base.push(0);
            current.push(None);
        }
        let mut incoming = vec![Vec::new(); n + 1];
        for (i, &(_, t)) in ends.iter().enumerate() {
            incoming[t.index()].push(i);
        }
        WorkingGraph {
            n,
            ends,
            base,
            current,
            incoming,
        }
    }

    pub fn z(&self) -> NodeId {
        NodeId::new(self.n)
    }

    fn to_z_slot(&self, x: NodeId) -> usize {
        self.ends.len() - self.n + x.index()
    }

    /// Current weight of the rewired edge `x -> z`.
    pub fn weight_to_z(&self, x: NodeId) -> Option<i64> {
        self.current[self.to_z_slot(x)]
    }

    /// Live edges `(source, target, weight)`.
    pub fn live_edges(&self) -> Vec<(NodeId, NodeId, i64)> {
        self.ends
            .iter()
            .zip(&self.current)
            .filter_map(|(&(s, t), w)| w.map(|w| (s, t, w)))
            .collect()
    }
}

/// Outcome of zero-energy discovery.
#[derive(Clone, Debug)]
pub struct ZeroEnergyTw {
    pub order: Vec<NodeId>,
    pub working: WorkingGraph,
    pub stats: TwStats,
}

struct Tables<'a> {
    t: &'a TreeDecomposition,
    w: WorkingGraph,
    intro: Vec<Vec<usize>>,
    edge_bag: Vec<BagId>,
    rooted: Vec<Vec<NodeId>>,
    maps: Vec<Vec<Entry>>,
}

impl Tables<'_> {
    /// Fresh table of bag `b` from its children's tables and its edges.
    fn compute(&self, b: BagId) -> Result<Vec<Entry>> {
        let bag = self.t.bag(b);
        let k = bag.nodes.len();
        let z = self.w.z();
        let mut tab: Vec<Entry> = vec![None; k * k];
        for &c in &bag.children {
            let child = self.t.bag(c);
            let ck = child.nodes.len();
            let ct = &self.maps[c.index()];
            let shared: Vec<(usize, usize)> = child
                .nodes
                .iter()
                .enumerate()
                .filter_map(|(ci, &u)| bag.position(u).map(|bi| (ci, bi)))
                .collect();
            for &(ci, bi) in &shared {
                for &(cj, bj) in &shared {
                    let cell = &mut tab[bi * k + bj];
                    *cell = triple_min(*cell, ct[ci * ck + cj]);
                }
            }
        }
        for &e in &self.intro[b.index()] {
            let (s, d) = self.w.ends[e];
            let i = bag.position(s).expect("edge in bag");
            let j = bag.position(d).expect("edge in bag");
            let cell = &mut tab[i * k + j];
            *cell = triple_min(*cell, lift(self.w.current[e], s, d, z));
        }
        for &x in &self.rooted[b.index()] {
            let xi = bag.position(x).expect("rooted node in bag");
            let into: Vec<Entry> = (0..k).map(|u| tab[u * k + xi]).collect();
            let from: Vec<Entry> = (0..k).map(|v| tab[xi * k + v]).collect();
            for (u, &p) in into.iter().enumerate() {
                if p.is_none() {
                    continue;
                }
                for (v, &q) in from.iter().enumerate() {
                    let via = triple_plus(p, q)?;
                    let cell = &mut tab[u * k + v];
                    *cell = triple_min(*cell, via);
                }
            }
        }
        Ok(tab)
    }

    /// First diagonal entry (in node order) describing a non-positive
    /// closed walk.
    fn non_positive_diagonal(&self, b: BagId) -> Option<Triple> {
        let k = self.t.bag(b).nodes.len();
        let tab = &self.maps[b.index()];
        (0..k).filter_map(|i| tab[i * k + i]).find(|tr| tr.a <= 0)
    }
}

/// Zero-energy nodes of `g` (internal convention) using `t2`, a
/// decomposition of `g` extended by the apex.
pub fn zero_energy_nodes_tw(g: &WeightedDigraph, t2: &TreeDecomposition) -> Result<ZeroEnergyTw> {
    let n = g.node_count();
    if t2.node_count() != n + 1 {
        return Err(Error::Domain("decomposition must include the apex node".into()));
    }
    let w = WorkingGraph::new(g);
    let mut intro = vec![Vec::new(); t2.bag_count()];
    let mut edge_bag = Vec::with_capacity(w.ends.len());
    for (i, &(s, d)) in w.ends.iter().enumerate() {
        let b = intro_bag(t2, s, d)?;
        intro[b.index()].push(i);
        edge_bag.push(b);
    }
    let rooted = (0..t2.bag_count()).map(|b| t2.rooted_at(BagId::new(b))).collect();
    let mut tables = Tables {
        t: t2,
        w,
        intro,
        edge_bag,
        rooted,
        maps: vec![Vec::new(); t2.bag_count()],
    };

    let post = t2.post_order();
    let mut post_index = vec![0usize; t2.bag_count()];
    for (i, b) in post.iter().enumerate() {
        post_index[b.index()] = i;
    }
    let mut examined = vec![false; t2.bag_count()];
    let mut in_x = vec![false; n + 1];
    let mut order = Vec::new();
    let mut stats = TwStats {
        height: t2.height(),
        bags: t2.bag_count(),
        edges: tables.w.ends.len(),
        ..TwStats::default()
    };
    let z = tables.w.z();

    for &b in &post {
        examined[b.index()] = true;
        tables.maps[b.index()] = tables.compute(b)?;
        while let Some(found) = tables.non_positive_diagonal(b) {
            let victim = found.b;
            if victim == z || in_x[victim.index()] {
                return Err(Error::Internal(format!(
                    "non-positive closed walk names node {victim}, which is z or already removed"
                )));
            }
            in_x[victim.index()] = true;
            order.push(victim);
            stats.kills += 1;

            let mut dirty: BTreeSet<usize> = BTreeSet::new();
            let mark = |bag: BagId, dirty: &mut BTreeSet<usize>| {
                if examined[bag.index()] {
                    dirty.insert(post_index[bag.index()]);
                }
            };
            for k in 0..tables.w.incoming[victim.index()].len() {
                let e = tables.w.incoming[victim.index()][k];
                if tables.w.current[e].is_none() {
                    continue;
                }
                let x = tables.w.ends[e].0;
                if x != z && x != victim {
                    let slot = tables.w.to_z_slot(x);
                    let cand = tables.w.base[e];
                    if tables.w.current[slot].is_none_or(|c| cand < c) {
                        tables.w.current[slot] = Some(cand);
                        mark(tables.edge_bag[slot], &mut dirty);
                    }
                }
                tables.w.current[e] = None;
                mark(tables.edge_bag[e], &mut dirty);
            }
            mark(b, &mut dirty);

            while let Some(p) = dirty.pop_first() {
                let d = post[p];
                let fresh = tables.compute(d)?;
                stats.update_recomputes += 1;
                if fresh != tables.maps[d.index()] {
                    tables.maps[d.index()] = fresh;
                    if let Some(parent) = t2.bag(d).parent {
                        mark(parent, &mut dirty);
                    }
                }
            }
            if stats.kills > n {
                return Err(Error::Internal("more kills than nodes".into()));
            }
        }
    }

    Ok(ZeroEnergyTw {
        order,
        working: tables.w,
        stats,
    })
}

/// Shortest distances to `z` in the working graph; `None` if `z` is
/// unreachable. Fails if the graph still has a non-positive cycle.
pub fn sssp_to_z_treedec(w: &WorkingGraph, t2: &TreeDecomposition) -> Result<Vec<Option<i64>>> {
    let z = w.z();
    let mut intro = vec![Vec::new(); t2.bag_count()];
    for (i, &(s, d)) in w.ends.iter().enumerate() {
        intro[intro_bag(t2, s, d)?.index()].push(i);
    }
    // Row of each rooted node towards the rest of its root bag.
    let mut rows: Vec<Vec<(NodeId, i64)>> = vec![Vec::new(); t2.bag_count()];
    sweep(t2, &intro, &w.ends, |e| w.current[e], |b, table| {
        let bag = t2.bag(b);
        for i in 0..bag.nodes.len() {
            if table.get(i, i).is_some_and(|&c| c <= 0) {
                return Err(Error::Internal(format!(
                    "non-positive cycle through node {} remains",
                    bag.nodes[i]
                )));
            }
        }
        for x in t2.rooted_at(b) {
            let xi = bag.position(x).expect("rooted node in bag");
            rows[b.index()] = bag
                .nodes
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != xi)
                .filter_map(|(j, &v)| table.get(xi, j).map(|&d| (v, d)))
                .collect();
        }
        Ok(())
    })?;

    let mut dist: Vec<Option<i64>> = vec![None; t2.node_count()];
    dist[z.index()] = Some(0);
    for b in t2.pre_order() {
        for x in t2.rooted_at(b) {
            if x == z {
                continue;
            }
            let mut best: Option<i64> = None;
            for &(v, d) in &rows[b.index()] {
                let Some(dv) = dist[v.index()] else { continue };
                let cand = d
                    .checked_add(dv)
                    .ok_or_else(|| Error::Internal("distance overflowed i64".into()))?;
                if best.is_none_or(|x| cand < x) {
                    best = Some(cand);
                }
            }
            dist[x.index()] = best;
        }
    }
    Ok(dist)
}

/// Internal-convention energies using a decomposition of `g`.
pub fn energy_values_tw_internal(
    g: &WeightedDigraph,
    t: &TreeDecomposition,
) -> Result<(Energies, TwStats)> {
    check_range(g)?;
    let t2 = extend_decomposition_with_z(t);
    let ze = zero_energy_nodes_tw(g, &t2)?;
    let dist = sssp_to_z_treedec(&ze.working, &t2)?;
    let n = g.node_count();
    let mut values: Energies = vec![None; n];
    let mut in_x = vec![false; n];
    for &x in &ze.order {
        in_x[x.index()] = true;
        values[x.index()] = Some(0);
    }
    for u in 0..n {
        if in_x[u] {
            continue;
        }
        if let Some(d) = dist[u] {
            if d <= 0 {
                return Err(Error::Internal(format!(
                    "node {u} outside the zero-energy set has distance {d} to z"
                )));
            }
            values[u] = Some(-(d as i128));
        }
    }
    Ok((values, ze.stats))
}

/// Standard-convention energies (`None` is +∞), building a decomposition
/// with `heuristic`.
pub fn energy_values_tw(g: &WeightedDigraph, heuristic: Heuristic) -> Result<(Energies, TwStats)> {
    let neg = g.negated();
    let t = build_decomposition(&neg, heuristic);
    validate(&t, &neg).map_err(|v| Error::Internal(format!("decomposition invalid: {v}")))?;
    let (internal, stats) = energy_values_tw_internal(&neg, &t)?;
    Ok((flip(&internal), stats))
}

/// Walk weights stay within `(n + 1) * W` in magnitude up to a small
/// factor; keep them far from the i64 limit.
fn check_range(g: &WeightedDigraph) -> Result<()> {
    let bound = (g.node_count() as i128 + 1) * g.max_abs_weight() as i128;
    if bound > 1i128 << 58 {
        return Err(Error::Domain(
            "weights too large for the treewidth energy algorithm (need (n+1)*W <= 2^58)".into(),
        ));
    }
    Ok(())
}
