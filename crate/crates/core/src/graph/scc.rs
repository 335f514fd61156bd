use super::{NodeId, WeightedDigraph};

/// Strongly connected components in reverse topological order: every
/// condensation edge goes from a higher component index to a lower one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SccPartition {
    pub component_of: Vec<usize>,
    pub components: Vec<Vec<NodeId>>,
    /// Deduplicated condensation edges `(from, to)`, `from > to`.
    pub condensation: Vec<(usize, usize)>,
}

impl SccPartition {
    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// Whether component `c` contains a cycle (more than one node, or a self-loop).
    pub fn is_cyclic(&self, g: &WeightedDigraph, c: usize) -> bool {
        let nodes = &self.components[c];
        nodes.len() > 1 || g.successors(nodes[0]).any(|v| v == nodes[0])
    }
}

/// Tarjan's algorithm with an explicit stack.
pub fn tarjan_scc(g: &WeightedDigraph) -> SccPartition {
    const UNSEEN: usize = usize::MAX;
    let n = g.node_count();
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<usize> = Vec::new();
    let mut component_of = vec![UNSEEN; n];
    let mut components: Vec<Vec<NodeId>> = Vec::new();
    let mut next = 0usize;
    // (node, position in its out-edge list)
    let mut call: Vec<(usize, usize)> = Vec::new();

    for root in 0..n {
        if index[root] != UNSEEN {
            continue;
        }
        call.push((root, 0));
        index[root] = next;
        low[root] = next;
        next += 1;
        stack.push(root);
        on_stack[root] = true;

        while let Some(&mut (u, ref mut pos)) = call.last_mut() {
            let out = g.out_edges(NodeId::new(u));
            if *pos < out.len() {
                let v = g.edge(out[*pos]).target.index();
                *pos += 1;
                if index[v] == UNSEEN {
                    index[v] = next;
                    low[v] = next;
                    next += 1;
                    stack.push(v);
                    on_stack[v] = true;
                    call.push((v, 0));
                } else if on_stack[v] {
                    low[u] = low[u].min(index[v]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                low[parent] = low[parent].min(low[u]);
            }
            if low[u] == index[u] {
                let id = components.len();
                let mut comp = Vec::new();
                loop {
                    let w = stack.pop().expect("tarjan stack underflow");
                    on_stack[w] = false;
                    component_of[w] = id;
                    comp.push(NodeId::new(w));
                    if w == u {
                        break;
                    }
                }
                comp.sort();
                components.push(comp);
            }
        }
    }

    let mut condensation: Vec<(usize, usize)> = g
        .edges()
        .iter()
        .map(|e| (component_of[e.source.index()], component_of[e.target.index()]))
        .filter(|(a, b)| a != b)
        .collect();
    condensation.sort_unstable();
    condensation.dedup();

    SccPartition {
        component_of,
        components,
        condensation,
    }
}

/// Per-node minimum of `per_component` over all components reachable from
/// the node; `None` stands for +∞.
///
/// Components are processed sinks first, so a single pass suffices.
pub fn propagate_component_values<T: Ord + Clone>(
    scc: &SccPartition,
    per_component: &[Option<T>],
) -> Vec<Option<T>> {
    assert_eq!(per_component.len(), scc.len(), "one value per component");
    let mut best: Vec<Option<T>> = per_component.to_vec();
    let mut succ: Vec<Vec<usize>> = vec![Vec::new(); scc.len()];
    for &(a, b) in &scc.condensation {
        succ[a].push(b);
    }
    for c in 0..scc.len() {
        for &d in &succ[c] {
            debug_assert!(d < c);
            best[c] = min_opt(best[c].take(), best[d].clone());
        }
    }
    scc.component_of.iter().map(|&c| best[c].clone()).collect()
}

fn min_opt<T: Ord>(a: Option<T>, b: Option<T>) -> Option<T> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_cycle_is_one_component() {
        let g = WeightedDigraph::from_weighted(3, &[(0, 1, 1), (1, 2, 2), (2, 0, 3)]);
        let scc = tarjan_scc(&g);
        assert_eq!(scc.len(), 1);
        assert!(scc.is_cyclic(&g, 0));
    }

    #[test]
    fn edgeless_graph_has_singletons() {
        let g = WeightedDigraph::from_weighted(2, &[]);
        let scc = tarjan_scc(&g);
        assert_eq!(scc.len(), 2);
        assert!(!scc.is_cyclic(&g, 0));
        assert!(scc.condensation.is_empty());
    }

    #[test]
    fn reverse_topological_order() {
        // 0 -> {1,2} cycle -> 3
        let g = WeightedDigraph::from_weighted(4, &[(0, 1, 0), (1, 2, 0), (2, 1, 0), (2, 3, 0)]);
        let scc = tarjan_scc(&g);
        assert_eq!(scc.len(), 3);
        for &(a, b) in &scc.condensation {
            assert!(a > b);
        }
        assert_eq!(scc.component_of[1], scc.component_of[2]);
    }

    #[test]
    fn propagation_takes_min_over_reachable() {
        // A = {0,1} (value 5) -> B = {2,3} (value 3)
        let g = WeightedDigraph::from_weighted(
            4,
            &[(0, 1, 0), (1, 0, 0), (1, 2, 0), (2, 3, 0), (3, 2, 0)],
        );
        let scc = tarjan_scc(&g);
        let vals: Vec<Option<i32>> = (0..scc.len())
            .map(|c| Some(if scc.components[c].contains(&NodeId(0)) { 5 } else { 3 }))
            .collect();
        let out = propagate_component_values(&scc, &vals);
        assert_eq!(out, vec![Some(3); 4]);
    }

    #[test]
    fn propagation_all_infinite() {
        let g = WeightedDigraph::from_weighted(3, &[(0, 1, 0), (1, 2, 0)]);
        let scc = tarjan_scc(&g);
        let out = propagate_component_values::<i32>(&scc, &vec![None; scc.len()]);
        assert!(out.iter().all(Option::is_none));
    }
}
