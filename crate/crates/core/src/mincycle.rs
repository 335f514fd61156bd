//! Minimum cycle weight by dynamic programming over a tree decomposition.
//!
//! Every bag gets a table of shortest walks between its nodes whose inner
//! nodes are already forgotten (rooted strictly below). Tables are built
//! bottom-up on an explicit stack, so at most `height + 1` tables are alive.

use std::fmt::Debug;

use num_bigint::BigInt;

use crate::graph::{Edge, NodeId, WeightedDigraph};
use crate::treedec::{BagId, TreeDecomposition};
use crate::{Error, Result};

/// Weight domain for walk tables: a totally ordered additive group.
pub trait PathWeight: Clone + Ord + Debug {
    fn plus(&self, other: &Self) -> Result<Self>;
}

impl PathWeight for i128 {
    fn plus(&self, other: &Self) -> Result<Self> {
        self.checked_add(*other)
            .ok_or_else(|| Error::Internal("walk weight overflowed i128".into()))
    }
}

impl PathWeight for i64 {
    fn plus(&self, other: &Self) -> Result<Self> {
        self.checked_add(*other)
            .ok_or_else(|| Error::Internal("walk weight overflowed i64".into()))
    }
}

impl PathWeight for BigInt {
    fn plus(&self, other: &Self) -> Result<Self> {
        Ok(self + other)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinCycle<W> {
    /// `None` when the graph is acyclic.
    pub value: Option<W>,
    /// Largest number of tables alive at once.
    pub peak_tables: usize,
    /// Height of the decomposition used.
    pub height: usize,
}

impl<W: PathWeight + Default> MinCycle<W> {
    /// The value is exact unless it is negative.
    pub fn is_exact(&self) -> bool {
        self.value.as_ref().is_none_or(|v| *v >= W::default())
    }
}

/// Square table over the nodes of one bag; `None` is +∞.
#[derive(Clone, Debug)]
pub(crate) struct Table<W> {
    pub(crate) k: usize,
    pub(crate) cells: Vec<Option<W>>,
}

impl<W: PathWeight> Table<W> {
    pub(crate) fn new(k: usize) -> Self {
        Table {
            k,
            cells: vec![None; k * k],
        }
    }

    #[inline]
    pub(crate) fn get(&self, i: usize, j: usize) -> Option<&W> {
        self.cells[i * self.k + j].as_ref()
    }

    #[inline]
    pub(crate) fn relax(&mut self, i: usize, j: usize, w: W) {
        let slot = &mut self.cells[i * self.k + j];
        match slot {
            Some(cur) if *cur <= w => {}
            _ => *slot = Some(w),
        }
    }
}

/// For every bag, the edges whose deeper endpoint is rooted there.
///
/// Fails if some edge is not contained in that bag, which means `t` is not
/// a decomposition of `g`.
pub(crate) fn edges_by_bag(g: &WeightedDigraph, t: &TreeDecomposition) -> Result<Vec<Vec<usize>>> {
    if t.node_count() < g.node_count() {
        return Err(Error::Domain("decomposition does not cover every node".into()));
    }
    let mut by_bag = vec![Vec::new(); t.bag_count()];
    for (i, e) in g.edges().iter().enumerate() {
        let b = intro_bag(t, e.source, e.target)?;
        by_bag[b.index()].push(i);
    }
    Ok(by_bag)
}

pub(crate) fn intro_bag(t: &TreeDecomposition, u: NodeId, v: NodeId) -> Result<BagId> {
    let missing = || Error::Domain(format!("decomposition does not cover edge ({u},{v})"));
    let ru = t.root_bag_of(u).ok_or_else(missing)?;
    let rv = t.root_bag_of(v).ok_or_else(missing)?;
    let b = if t.level(ru) >= t.level(rv) { ru } else { rv };
    let bag = t.bag(b);
    if bag.contains(u) && bag.contains(v) {
        Ok(b)
    } else {
        Err(missing())
    }
}

/// Minimum cycle weight with the graph's own integer weights.
///
/// Exact when no cycle is negative. Otherwise the result is negative, at
/// most the true minimum, and bounded in magnitude by
/// `|min| * m * 2^height`.
pub fn min_cycle(g: &WeightedDigraph, t: &TreeDecomposition) -> Result<MinCycle<i128>> {
    min_cycle_by(g, t, |e| e.weight as i128)
}

/// Minimum cycle weight under `weight`.
pub fn min_cycle_by<W: PathWeight>(
    g: &WeightedDigraph,
    t: &TreeDecomposition,
    weight: impl Fn(&Edge) -> W,
) -> Result<MinCycle<W>> {
    let intro = edges_by_bag(g, t)?;
    let ends: Vec<(NodeId, NodeId)> = g.edges().iter().map(|e| (e.source, e.target)).collect();
    let mut best: Option<W> = None;
    let peak = sweep(t, &intro, &ends, |i| Some(weight(g.edge(i))), |b, table| {
        for x in t.rooted_at(b) {
            let xi = t.bag(b).position(x).expect("rooted node in bag");
            if let Some(c) = table.get(xi, xi) {
                if best.as_ref().is_none_or(|cur| c < cur) {
                    best = Some(c.clone());
                }
            }
        }
        Ok(())
    })?;
    Ok(MinCycle {
        value: best,
        peak_tables: peak,
        height: t.height(),
    })
}

/// Bottom-up construction of every bag's walk table over the edges
/// `ends`, each introduced at `intro[bag]`; `weight` of `None` means the
/// edge is absent. `visit` sees each table after its edges are added and
/// before its rooted node is forgotten. Returns the peak number of live
/// tables.
pub(crate) fn sweep<W: PathWeight>(
    t: &TreeDecomposition,
    intro: &[Vec<usize>],
    ends: &[(NodeId, NodeId)],
    weight: impl Fn(usize) -> Option<W>,
    mut visit: impl FnMut(BagId, &Table<W>) -> Result<()>,
) -> Result<usize> {
    let mut stack: Vec<Table<W>> = Vec::new();
    let mut peak = 0;

    for b in t.post_order() {
        let bag = t.bag(b);
        let k = bag.nodes.len();
        let mut table = Table::new(k);

        // Children were completed last, in order, so they sit on top.
        let child_count = bag.children.len();
        let base = stack.len() - child_count;
        for (slot, &c) in bag.children.iter().enumerate() {
            let child = t.bag(c);
            let ct = &stack[base + slot];
            let shared: Vec<(usize, usize)> = child
                .nodes
                .iter()
                .enumerate()
                .filter_map(|(ci, &u)| bag.position(u).map(|bi| (ci, bi)))
                .collect();
            for &(ci, bi) in &shared {
                for &(cj, bj) in &shared {
                    if let Some(w) = ct.get(ci, cj) {
                        table.relax(bi, bj, w.clone());
                    }
                }
            }
        }
        stack.truncate(base);

        for &ei in &intro[b.index()] {
            let Some(w) = weight(ei) else { continue };
            let (s, d) = ends[ei];
            let i = bag.position(s).expect("edge in bag");
            let j = bag.position(d).expect("edge in bag");
            table.relax(i, j, w);
        }

        visit(b, &table)?;
        for x in t.rooted_at(b) {
            let xi = bag.position(x).expect("rooted node in bag");
            forget(&mut table, xi)?;
        }

        stack.push(table);
        peak = peak.max(stack.len());
    }
    Ok(peak)
}

/// Allow node `xi` as an inner node: one relaxation round through it,
/// reading only the values from before the round.
fn forget<W: PathWeight>(table: &mut Table<W>, xi: usize) -> Result<()> {
    let k = table.k;
    let into_x: Vec<Option<W>> = (0..k).map(|u| table.get(u, xi).cloned()).collect();
    let from_x: Vec<Option<W>> = (0..k).map(|v| table.get(xi, v).cloned()).collect();
    for (u, a) in into_x.iter().enumerate() {
        let Some(a) = a else { continue };
        for (v, b) in from_x.iter().enumerate() {
            let Some(b) = b else { continue };
            table.relax(u, v, a.plus(b)?);
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::treedec::{build_decomposition, Heuristic};

    fn run(n: usize, edges: &[(usize, usize, i64)]) -> Option<i128> {
        let g = WeightedDigraph::from_weighted(n, edges);
        let t = build_decomposition(&g, Heuristic::MinDegree);
        min_cycle(&g, &t).unwrap().value
    }

    #[test]
    fn triangle() {
        assert_eq!(run(3, &[(0, 1, 1), (1, 2, 2), (2, 0, 3)]), Some(6));
    }

    #[test]
    fn self_loop_and_acyclic() {
        assert_eq!(run(2, &[(0, 1, 1), (1, 1, -4)]), Some(-4));
        assert_eq!(run(3, &[(0, 1, 1), (1, 2, 1)]), None);
        assert_eq!(run(0, &[]), None);
    }

    #[test]
    fn two_cycles_pick_smaller() {
        assert_eq!(
            run(4, &[(0, 1, 5), (1, 0, 5), (1, 2, 1), (2, 3, 1), (3, 1, 1)]),
            Some(3)
        );
    }

    #[test]
    fn negative_cycle_is_detected() {
        let v = run(3, &[(0, 1, -1), (1, 2, -1), (2, 0, -1), (1, 0, 10)]).unwrap();
        assert!(v <= -3);
    }

    #[test]
    fn bad_decomposition_is_rejected() {
        let g = WeightedDigraph::from_weighted(2, &[(0, 1, 1)]);
        let t = TreeDecomposition::from_bags(2, vec![(vec![NodeId(0)], None), (vec![NodeId(1)], Some(0))])
            .unwrap();
        assert!(matches!(min_cycle(&g, &t), Err(Error::Domain(_))));
    }

    #[test]
    fn bigint_weights_agree() {
        let g = WeightedDigraph::from_weighted(3, &[(0, 1, 1), (1, 2, -2), (2, 0, 3), (2, 1, 4)]);
        let t = build_decomposition(&g, Heuristic::MinDegree);
        let big = min_cycle_by(&g, &t, |e| BigInt::from(e.weight)).unwrap();
        assert_eq!(big.value, Some(BigInt::from(2)));
        assert!(big.peak_tables <= t.height() + 1);
    }
}
