use std::collections::{BTreeSet, HashSet};
use std::str::FromStr;

use super::TreeDecomposition;
use crate::graph::{NodeId, WeightedDigraph};
use crate::Error;

/// Greedy elimination rule. Ties break toward the lowest node id.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq)]
pub enum Heuristic {
    #[default]
    MinDegree,
    MinFill,
}

impl FromStr for Heuristic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "min-degree" | "mindegree" => Ok(Heuristic::MinDegree),
            "min-fill" | "minfill" => Ok(Heuristic::MinFill),
            _ => Err(Error::Domain(format!("unknown heuristic `{s}`"))),
        }
    }
}

/// An elimination ordering and the forest of bags it induces.
#[derive(Clone, Debug)]
pub struct Elimination {
    pub order: Vec<NodeId>,
    /// Largest neighbourhood at elimination time.
    pub width: usize,
    /// `bags[v]` = `v` plus its neighbours when `v` was eliminated.
    bags: Vec<Vec<NodeId>>,
    /// Bag of the earliest-eliminated neighbour.
    parent: Vec<Option<usize>>,
}

impl Elimination {
    /// Forest of elimination bags, with the trees linked under a chain of
    /// empty bags when there is more than one.
    pub fn to_decomposition(&self) -> TreeDecomposition {
        let n = self.bags.len();
        if n == 0 {
            return TreeDecomposition::from_bags(0, vec![(Vec::new(), None)])
                .expect("single empty bag");
        }
        let mut bags: Vec<(Vec<NodeId>, Option<usize>)> = self
            .bags
            .iter()
            .cloned()
            .zip(self.parent.iter().copied())
            .collect();
        let roots: Vec<usize> = (0..n).filter(|&v| self.parent[v].is_none()).collect();
        if roots.len() > 1 {
            let mut prev = None;
            for &r in &roots {
                let link = bags.len();
                bags.push((Vec::new(), prev));
                bags[r].1 = Some(link);
                prev = Some(link);
            }
        }
        TreeDecomposition::from_bags(n, bags).expect("elimination forest is a tree")
    }
}

/// Eliminate every node of the undirected skeleton of `g`.
pub fn eliminate(g: &WeightedDigraph, heuristic: Heuristic) -> Elimination {
    let n = g.node_count();
    let mut adj: Vec<HashSet<u32>> = vec![HashSet::new(); n];
    for e in g.edges() {
        let (u, v) = (e.source.0, e.target.0);
        if u != v {
            adj[u as usize].insert(v);
            adj[v as usize].insert(u);
        }
    }

    let score = |adj: &[HashSet<u32>], v: usize| -> usize {
        match heuristic {
            Heuristic::MinDegree => adj[v].len(),
            Heuristic::MinFill => fill_in(adj, v),
        }
    };
    let mut key: Vec<usize> = (0..n).map(|v| score(&adj, v)).collect();
    let mut queue: BTreeSet<(usize, u32)> = (0..n).map(|v| (key[v], v as u32)).collect();

    let mut position = vec![usize::MAX; n];
    let mut order = Vec::with_capacity(n);
    let mut bags = vec![Vec::new(); n];
    let mut width = 0;

    while let Some((_, v)) = queue.pop_first() {
        let vi = v as usize;
        position[vi] = order.len();
        order.push(NodeId(v));
        let mut nbrs: Vec<u32> = adj[vi].iter().copied().collect();
        nbrs.sort_unstable();
        width = width.max(nbrs.len());

        for &a in &nbrs {
            adj[a as usize].remove(&v);
        }
        for (i, &a) in nbrs.iter().enumerate() {
            for &b in &nbrs[i + 1..] {
                adj[a as usize].insert(b);
                adj[b as usize].insert(a);
            }
        }
        adj[vi].clear();

        // Scores change for the neighbours and, under min-fill, for their
        // neighbours as well.
        let mut touched: BTreeSet<u32> = nbrs.iter().copied().collect();
        if heuristic == Heuristic::MinFill {
            for &a in &nbrs {
                touched.extend(adj[a as usize].iter().copied());
            }
        }
        for u in touched {
            let ui = u as usize;
            let k = score(&adj, ui);
            if k != key[ui] {
                queue.remove(&(key[ui], u));
                key[ui] = k;
                queue.insert((k, u));
            }
        }

        let mut bag: Vec<NodeId> = nbrs.iter().map(|&a| NodeId(a)).collect();
        bag.push(NodeId(v));
        bag.sort_unstable();
        bags[vi] = bag;
    }

    let parent = (0..n)
        .map(|v| {
            bags[v]
                .iter()
                .filter(|u| u.index() != v)
                .min_by_key(|u| position[u.index()])
                .map(|u| u.index())
        })
        .collect();

    Elimination {
        order,
        width,
        bags,
        parent,
    }
}

fn fill_in(adj: &[HashSet<u32>], v: usize) -> usize {
    let nbrs: Vec<u32> = adj[v].iter().copied().collect();
    let mut missing = 0;
    for (i, &a) in nbrs.iter().enumerate() {
        for &b in &nbrs[i + 1..] {
            if !adj[a as usize].contains(&b) {
                missing += 1;
            }
        }
    }
    missing
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::treedec::validate;

    fn cycle(n: usize) -> WeightedDigraph {
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n, 1)).collect();
        WeightedDigraph::from_weighted(n, &edges)
    }

    #[test]
    fn cycle_has_width_two() {
        for h in [Heuristic::MinDegree, Heuristic::MinFill] {
            let e = eliminate(&cycle(7), h);
            assert_eq!(e.width, 2);
            assert_eq!(e.order.len(), 7);
        }
    }

    #[test]
    fn path_has_width_one() {
        let g = WeightedDigraph::from_weighted(5, &[(0, 1, 0), (1, 2, 0), (2, 3, 0), (3, 4, 0)]);
        assert_eq!(eliminate(&g, Heuristic::MinDegree).width, 1);
    }

    #[test]
    fn clique_width() {
        let mut edges = Vec::new();
        for u in 0..5 {
            for v in 0..5 {
                if u != v {
                    edges.push((u, v, 0));
                }
            }
        }
        let g = WeightedDigraph::from_weighted(5, &edges);
        assert_eq!(eliminate(&g, Heuristic::MinFill).width, 4);
    }

    #[test]
    fn forest_is_linked_into_one_tree() {
        let g = WeightedDigraph::from_weighted(6, &[(0, 1, 0), (1, 0, 0), (2, 3, 0), (4, 5, 0)]);
        let t = eliminate(&g, Heuristic::MinDegree).to_decomposition();
        // the raw forest is valid apart from binarity and shared roots
        match validate(&t, &g) {
            Ok(()) | Err(super::super::Violation::NotBinary(_)) => {}
            Err(super::super::Violation::SharedRootBag(..)) => {}
            Err(v) => panic!("{v}"),
        }
    }

    #[test]
    fn heuristic_names() {
        assert_eq!("min-fill".parse::<Heuristic>().unwrap(), Heuristic::MinFill);
        assert!("foo".parse::<Heuristic>().is_err());
    }
}
