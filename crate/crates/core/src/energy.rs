//! Minimum initial credit on general graphs.
//!
//! Internally the non-positive convention is used: an energy is a value
//! `c <= 0` such that some infinite path keeps `c + prefix <= 0` forever,
//! and `E(u)` is the largest such value (`None` for −∞). The public
//! functions take weights in the standard convention, where the credit must
//! keep every prefix sum non-negative; they negate the weights on the way in
//! and the values on the way out. In both conventions `None` stands for
//! an infinite value, so the same vector type serves both.

use crate::graph::{NodeId, WeightedDigraph};
use crate::oracles::bellman_ford_edges;
use crate::{Error, Result};

/// Per-node energies; `None` is infinite (−∞ internally, +∞ publicly).
pub type Energies = Vec<Option<i128>>;

/// Cycle with weight at most 0, as a node sequence, if one exists.
///
/// Runs Bellman-Ford under `n * wt - 1`: with cycles of at most `n` edges,
/// a cycle is non-positive under `wt` iff it is negative under the scaled
/// weights.
pub fn detect_nonpositive_cycle(g: &WeightedDigraph) -> Result<Option<Vec<NodeId>>> {
    let n = g.node_count();
    let edges: Vec<(usize, usize, i128)> = g
        .edges()
        .iter()
        .map(|e| (e.source.index(), e.target.index(), scaled(n, e.weight as i128)))
        .collect();
    let sp = bellman_ford_edges(n, &edges, None)?;
    Ok(sp
        .negative_cycle
        .map(|cyc| cyc.iter().map(|&e| NodeId::new(edges[e].0)).collect()))
}

fn scaled(n: usize, w: i128) -> i128 {
    n as i128 * w - 1
}

/// Node reached by the first maximum-weight prefix of a closed walk.
///
/// `nodes[i] -> nodes[i+1]` carries `weights[i]`, the last edge returning
/// to `nodes[0]`. The empty prefix counts. If the winner is `skip`, the
/// following node is returned instead; it has the same prefix weight when
/// the edge leaving `skip` weighs 0.
pub fn highest_energy_node(nodes: &[usize], weights: &[i128], skip: Option<usize>) -> (usize, i128) {
    assert_eq!(nodes.len(), weights.len());
    assert!(!nodes.is_empty());
    let mut best = (0usize, 0i128);
    let mut prefix = 0i128;
    for (i, w) in weights.iter().enumerate().take(nodes.len() - 1) {
        prefix += w;
        if prefix > best.1 {
            best = (i + 1, prefix);
        }
    }
    let (mut i, mut p) = best;
    if Some(nodes[i]) == skip {
        p += weights[i];
        i = (i + 1) % nodes.len();
    }
    (nodes[i], p)
}

/// Whether `E(u) >= c` in the internal convention.
pub fn decision_energy_internal(g: &WeightedDigraph, u: NodeId, c: i128) -> Result<bool> {
    if c > 0 {
        return Err(Error::Domain(format!("internal credit must be <= 0, got {c}")));
    }
    let n = g.node_count();
    let mut level: Vec<Option<i128>> = vec![None; n];
    level[u.index()] = Some(c);
    for _ in 1..n {
        let mut changed = false;
        for e in g.edges() {
            let Some(dv) = level[e.source.index()] else { continue };
            let cand = dv + e.weight as i128;
            if cand > 0 {
                continue;
            }
            let slot = &mut level[e.target.index()];
            if slot.is_none_or(|d| cand < d) {
                *slot = Some(cand);
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let reached: Vec<NodeId> = g.nodes().filter(|v| level[v.index()].is_some()).collect();
    let (sub, _) = g.induced_subgraph(&reached);
    Ok(detect_nonpositive_cycle(&sub)?.is_some())
}

/// Whether initial credit `credit >= 0` suffices at `u` (standard
/// convention, weights as given).
pub fn decide_energy(g: &WeightedDigraph, u: NodeId, credit: i128) -> Result<bool> {
    if credit < 0 {
        return Err(Error::Domain(format!("credit must be >= 0, got {credit}")));
    }
    decision_energy_internal(&g.negated(), u, -credit)
}

/// The graph plus a node `z = n` with 0-weight edges to every node and
/// rewirable edges from every node to `z`.
#[derive(Clone, Debug)]
pub struct Augmented {
    n: usize,
    /// `(source, target)`; original edges first, then `z -> v`, then `x -> z`.
    ends: Vec<(usize, usize)>,
    /// Original weights, used when rewiring.
    base: Vec<i128>,
    /// Working weights; `None` is +∞ (edge absent).
    current: Vec<Option<i128>>,
    alive: Vec<bool>,
    incoming: Vec<Vec<usize>>,
}

impl Augmented {
    pub fn new(g: &WeightedDigraph) -> Self {
        let n = g.node_count();
        let m = g.edge_count();
        let mut ends = Vec::with_capacity(m + 2 * n);
        let mut base = Vec::with_capacity(m + 2 * n);
        let mut current = Vec::with_capacity(m + 2 * n);
        for e in g.edges() {
            ends.push((e.source.index(), e.target.index()));
            base.push(e.weight as i128);
            current.push(Some(e.weight as i128));
        }
        for v in 0..n {
            ends.push((n, v));
            base.push(0);
            current.push(Some(0));
        }
        for x in 0..n {
            ends.push((x, n));
            base.push(0);
            current.push(None);
        }
        let mut incoming = vec![Vec::new(); n + 1];
        for (i, &(_, t)) in ends.iter().enumerate() {
            incoming[t].push(i);
        }
        Augmented {
            n,
            ends,
            base,
            current,
            alive: vec![true; n + 1],
            incoming,
        }
    }

    pub fn z(&self) -> usize {
        self.n
    }

    fn to_z_slot(&self, x: usize) -> usize {
        self.ends.len() - self.n + x
    }

    /// Current weight of the rewired edge `x -> z`.
    pub fn weight_to_z(&self, x: NodeId) -> Option<i128> {
        self.current[self.to_z_slot(x.index())]
    }

    pub fn is_removed(&self, v: NodeId) -> bool {
        !self.alive[v.index()]
    }

    /// Live edges with finite weight, as `(source, target, weight)`.
    pub fn live_edges(&self) -> Vec<(usize, usize, i128)> {
        self.ends
            .iter()
            .zip(&self.current)
            .filter_map(|(&(s, t), w)| {
                let w = (*w)?;
                (self.alive[s] && self.alive[t]).then_some((s, t, w))
            })
            .collect()
    }

    /// Redirect every live in-edge `(x, w)` into `z` and delete `w`.
    fn remove(&mut self, w: usize) {
        for k in 0..self.incoming[w].len() {
            let e = self.incoming[w][k];
            let x = self.ends[e].0;
            if x == self.n || x == w || !self.alive[x] || self.current[e].is_none() {
                continue;
            }
            let slot = self.to_z_slot(x);
            let cand = self.base[e];
            if self.current[slot].is_none_or(|c| cand < c) {
                self.current[slot] = Some(cand);
            }
            self.current[e] = None;
        }
        self.alive[w] = false;
    }
}

/// Outcome of zero-energy discovery.
#[derive(Clone, Debug)]
pub struct ZeroEnergy {
    /// Nodes with internal energy 0, in discovery order.
    pub order: Vec<NodeId>,
    pub bellman_ford_passes: usize,
    /// Final working graph.
    pub working: Augmented,
}

/// Find every node of internal energy 0 by repeatedly locating a
/// non-positive cycle reachable from `z`, taking its highest-energy node
/// and rewiring that node's in-edges to `z`.
pub fn zero_energy_nodes(g: &WeightedDigraph) -> Result<ZeroEnergy> {
    let mut aug = Augmented::new(g);
    let n2 = g.node_count() + 1;
    let z = aug.z();
    let mut order = Vec::new();
    let mut passes = 0;
    loop {
        let live = aug.live_edges();
        let scaled_edges: Vec<(usize, usize, i128)> =
            live.iter().map(|&(s, t, w)| (s, t, scaled(n2, w))).collect();
        passes += 1;
        let sp = bellman_ford_edges(n2, &scaled_edges, Some(z))?;
        let Some(cyc) = sp.negative_cycle else { break };
        let nodes: Vec<usize> = cyc.iter().map(|&e| live[e].0).collect();
        let weights: Vec<i128> = cyc.iter().map(|&e| live[e].2).collect();
        let (w, _) = highest_energy_node(&nodes, &weights, Some(z));
        if w == z || !aug.alive[w] {
            return Err(Error::Internal("highest-energy node is not a live graph node".into()));
        }
        order.push(NodeId::new(w));
        aug.remove(w);
        if order.len() > g.node_count() {
            return Err(Error::Internal("more zero-energy nodes than nodes".into()));
        }
    }
    Ok(ZeroEnergy {
        order,
        bellman_ford_passes: passes,
        working: aug,
    })
}

/// Counters of a value computation.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EnergyStats {
    pub zero_energy_nodes: usize,
    pub bellman_ford_passes: usize,
}

/// Internal-convention energies: 0 on zero-energy nodes, minus the
/// distance to `z` in the final working graph elsewhere.
pub fn energy_values_internal(g: &WeightedDigraph) -> Result<(Energies, EnergyStats)> {
    let ze = zero_energy_nodes(g)?;
    let n = g.node_count();
    let z = ze.working.z();
    let reversed: Vec<(usize, usize, i128)> = ze
        .working
        .live_edges()
        .into_iter()
        .map(|(s, t, w)| (t, s, w))
        .collect();
    let sp = bellman_ford_edges(n + 1, &reversed, Some(z))?;
    if sp.negative_cycle.is_some() {
        return Err(Error::Internal("negative cycle left after zero-energy discovery".into()));
    }
    let mut values: Energies = vec![None; n];
    for &x in &ze.order {
        values[x.index()] = Some(0);
    }
    for u in 0..n {
        if ze.working.alive[u] {
            if let Some(d) = sp.dist[u] {
                if d <= 0 {
                    return Err(Error::Internal(format!(
                        "node {u} outside the zero-energy set has distance {d} to z"
                    )));
                }
                values[u] = Some(-d);
            }
        }
    }
    let stats = EnergyStats {
        zero_energy_nodes: ze.order.len(),
        bellman_ford_passes: ze.bellman_ford_passes + 1,
    };
    Ok((values, stats))
}

/// Standard-convention energies (`None` is +∞).
pub fn energy_values(g: &WeightedDigraph) -> Result<(Energies, EnergyStats)> {
    let (internal, stats) = energy_values_internal(&g.negated())?;
    Ok((flip(&internal), stats))
}

/// Switch conventions: negate finite values; infinities keep their slot.
pub fn flip(values: &[Option<i128>]) -> Energies {
    values.iter().map(|v| v.map(|x| -x)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Five-node example, internal convention: u,v,w,x,y = 0..5.
    fn example() -> WeightedDigraph {
        WeightedDigraph::from_weighted(5, &[(0, 1, -2), (1, 2, -1), (2, 3, 3), (3, 4, -1), (4, 1, -1)])
    }

    #[test]
    fn example_values() {
        let (vals, stats) = energy_values_internal(&example()).unwrap();
        assert_eq!(vals, vec![Some(0), Some(-2), Some(-3), Some(0), Some(-1)]);
        assert_eq!(stats.zero_energy_nodes, 2);
        let ze = zero_energy_nodes(&example()).unwrap();
        let mut x: Vec<usize> = ze.order.iter().map(|v| v.index()).collect();
        x.sort();
        assert_eq!(x, vec![0, 3]);
        assert!(ze.bellman_ford_passes <= ze.order.len() + 1);
    }

    #[test]
    fn example_decisions() {
        let g = example();
        assert!(decision_energy_internal(&g, NodeId(1), -2).unwrap());
        assert!(!decision_energy_internal(&g, NodeId(1), -1).unwrap());
        assert!(decision_energy_internal(&g, NodeId(3), 0).unwrap());
        assert!(decision_energy_internal(&g, NodeId(1), 1).is_err());
    }

    #[test]
    fn example_cycle_and_highest_node() {
        assert!(detect_nonpositive_cycle(&example()).unwrap().is_some());
        // v,w,x,y with weights -1,3,-1,-1
        assert_eq!(highest_energy_node(&[1, 2, 3, 4], &[-1, 3, -1, -1], None), (3, 2));
        assert_eq!(highest_energy_node(&[7], &[-5], None), (7, 0));
        assert_eq!(highest_energy_node(&[0, 1], &[-3, 3], None), (0, 0));
        assert_eq!(highest_energy_node(&[9, 1, 2], &[0, -1, 1], Some(9)), (1, 0));
    }

    #[test]
    fn no_nonpositive_cycle() {
        let a = WeightedDigraph::from_weighted(3, &[(0, 1, 1), (1, 2, 2), (2, 0, 3)]);
        assert!(detect_nonpositive_cycle(&a).unwrap().is_none());
        assert!(zero_energy_nodes(&a).unwrap().order.is_empty());
        let one = WeightedDigraph::from_weighted(1, &[(0, 0, 1)]);
        assert!(detect_nonpositive_cycle(&one).unwrap().is_none());
    }

    #[test]
    fn self_loop_and_acyclic() {
        let s = WeightedDigraph::from_weighted(1, &[(0, 0, -5)]);
        assert_eq!(zero_energy_nodes(&s).unwrap().order, vec![NodeId(0)]);
        let dag = WeightedDigraph::from_weighted(3, &[(0, 1, 1), (1, 2, -1)]);
        assert_eq!(energy_values(&dag).unwrap().0, vec![None; 3]);
        assert!(!decide_energy(&dag, NodeId(0), 0).unwrap());
        let zero = WeightedDigraph::from_weighted(1, &[(0, 0, 0)]);
        assert_eq!(energy_values(&zero).unwrap().0, vec![Some(0)]);
    }

    #[test]
    fn public_convention() {
        let std_example = example().negated();
        assert_eq!(
            energy_values(&std_example).unwrap().0,
            vec![Some(0), Some(2), Some(3), Some(0), Some(1)]
        );
        assert!(decide_energy(&std_example, NodeId(1), 2).unwrap());
        assert!(!decide_energy(&std_example, NodeId(1), 1).unwrap());
    }
}
