use super::{BagId, TreeDecomposition};
use crate::graph::NodeId;

const REMOVED: usize = usize::MAX;

/// Rebuild `t` with logarithmic height, at most two children per bag and
/// at most one rooted node per bag.
///
/// The tree is recursively split at separator bags. A component touches at
/// most two already-chosen separators; it is split at its centroid when it
/// touches one or none, and at the median of the two attachment bags and
/// the centroid otherwise. The new bag is the chosen bag plus the
/// intersections along the crossing edges, so width grows to at most
/// `3 * (width + 1) - 1`.
pub fn balance_and_binarize(t: &TreeDecomposition) -> TreeDecomposition {
    let n = t.node_count();
    let (bags, adj) = reduce_degree(t);
    let split = centroid_split(&bags, &adj);
    let binary = binarize(split);
    let shaped = TreeDecomposition::from_bags(n, binary).expect("balanced tree is well formed");
    split_shared_roots(&shaped)
}

/// Undirected copy of the tree in which every bag has degree at most 3,
/// obtained by chaining copies of bags with more than two children.
fn reduce_degree(t: &TreeDecomposition) -> (Vec<Vec<NodeId>>, Vec<Vec<usize>>) {
    let mut bags: Vec<Vec<NodeId>> = t.bags().iter().map(|b| b.nodes.clone()).collect();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); bags.len()];
    fn link(adj: &mut [Vec<usize>], a: usize, b: usize) {
        adj[a].push(b);
        adj[b].push(a);
    }
    for i in 0..t.bag_count() {
        let kids: Vec<usize> = t.bags()[i].children.iter().map(|c| c.index()).collect();
        let mut host = i;
        let mut rest = &kids[..];
        while rest.len() > 2 {
            link(&mut adj, host, rest[0]);
            let copy = bags.len();
            let nodes = bags[i].clone();
            bags.push(nodes);
            adj.push(Vec::new());
            link(&mut adj, host, copy);
            host = copy;
            rest = &rest[1..];
        }
        for &c in rest {
            link(&mut adj, host, c);
        }
    }
    (bags, adj)
}

struct Item {
    stamp: usize,
    start: usize,
    parent: Option<usize>,
}

fn centroid_split(bags: &[Vec<NodeId>], adj: &[Vec<usize>]) -> Vec<(Vec<NodeId>, Option<usize>)> {
    let k = bags.len();
    let mut mark = vec![1usize; k];
    let mut next_stamp = 2;
    let mut work = vec![Item {
        stamp: 1,
        start: 0,
        parent: None,
    }];
    let mut out: Vec<(Vec<NodeId>, Option<usize>)> = Vec::with_capacity(k);

    let mut par = vec![REMOVED; k];
    let mut depth = vec![0usize; k];
    let mut size = vec![0usize; k];
    let mut heaviest_child = vec![0usize; k];
    let mut order: Vec<usize> = Vec::new();

    while let Some(item) = work.pop() {
        let stamp = item.stamp;
        order.clear();
        order.push(item.start);
        par[item.start] = REMOVED;
        depth[item.start] = 0;
        let mut i = 0;
        while i < order.len() {
            let b = order[i];
            i += 1;
            for &nb in &adj[b] {
                if mark[nb] == stamp && nb != par[b] {
                    par[nb] = b;
                    depth[nb] = depth[b] + 1;
                    order.push(nb);
                }
            }
        }

        let mut attach: Vec<usize> = Vec::new();
        let mut sep: Vec<NodeId> = Vec::new();
        for &b in &order {
            for &nb in &adj[b] {
                if mark[nb] != stamp {
                    attach.push(b);
                    sep.extend(intersect(&bags[b], &bags[nb]));
                }
            }
        }

        for &b in &order {
            size[b] = 1;
            heaviest_child[b] = 0;
        }
        for &b in order.iter().rev() {
            let p = par[b];
            if p != REMOVED {
                size[p] += size[b];
                heaviest_child[p] = heaviest_child[p].max(size[b]);
            }
        }
        let total = order.len();
        let centroid = *order
            .iter()
            .min_by_key(|&&b| heaviest_child[b].max(total - size[b]))
            .expect("component is non-empty");

        debug_assert!(attach.len() <= 2, "component with {} attachments", attach.len());
        let s = if attach.len() == 2 {
            median(attach[0], attach[1], centroid, &par, &depth)
        } else {
            centroid
        };

        sep.extend_from_slice(&bags[s]);
        sep.sort_unstable();
        sep.dedup();
        let id = out.len();
        out.push((sep, item.parent));
        mark[s] = REMOVED;

        for &nb in &adj[s] {
            if mark[nb] != stamp {
                continue;
            }
            let sub = next_stamp;
            next_stamp += 1;
            let mut stack = vec![nb];
            mark[nb] = sub;
            while let Some(b) = stack.pop() {
                for &c in &adj[b] {
                    if mark[c] == stamp {
                        mark[c] = sub;
                        stack.push(c);
                    }
                }
            }
            work.push(Item {
                stamp: sub,
                start: nb,
                parent: Some(id),
            });
        }
    }
    out
}

fn lca(mut a: usize, mut b: usize, par: &[usize], depth: &[usize]) -> usize {
    while depth[a] > depth[b] {
        a = par[a];
    }
    while depth[b] > depth[a] {
        b = par[b];
    }
    while a != b {
        a = par[a];
        b = par[b];
    }
    a
}

/// The unique bag on all three pairwise paths between `a`, `b` and `c`.
fn median(a: usize, b: usize, c: usize, par: &[usize], depth: &[usize]) -> usize {
    [lca(a, b, par, depth), lca(a, c, par, depth), lca(b, c, par, depth)]
        .into_iter()
        .max_by_key(|&x| depth[x])
        .expect("three candidates")
}

fn intersect<'a>(a: &'a [NodeId], b: &'a [NodeId]) -> impl Iterator<Item = NodeId> + 'a {
    a.iter().copied().filter(move |u| b.binary_search(u).is_ok())
}

/// Give bags with more than two children a copy bag holding all but the
/// tallest child.
fn binarize(mut bags: Vec<(Vec<NodeId>, Option<usize>)>) -> Vec<(Vec<NodeId>, Option<usize>)> {
    let k = bags.len();
    let mut children: Vec<Vec<usize>> = vec![Vec::new(); k];
    for (i, (_, p)) in bags.iter().enumerate() {
        if let Some(p) = *p {
            children[p].push(i);
        }
    }
    // Bags are created parents first, so reverse index order is bottom-up.
    let mut height = vec![0usize; k];
    for i in (0..k).rev() {
        height[i] = children[i].iter().map(|&c| height[c] + 1).max().unwrap_or(0);
    }
    for i in 0..k {
        if children[i].len() <= 2 {
            continue;
        }
        let mut kids = children[i].clone();
        kids.sort_by_key(|&c| std::cmp::Reverse(height[c]));
        let mut host = i;
        let mut rest = &kids[1..];
        while rest.len() > 1 {
            let copy = bags.len();
            let nodes = bags[i].0.clone();
            bags.push((nodes, Some(host)));
            if rest.len() == 2 {
                bags[rest[0]].1 = Some(copy);
                bags[rest[1]].1 = Some(copy);
                break;
            }
            bags[rest[0]].1 = Some(copy);
            host = copy;
            rest = &rest[1..];
        }
    }
    bags
}

/// Replace every bag rooting several nodes `x1 < ... < xk` by a chain
/// `B - {x2..xk}`, `+ x2`, ..., `+ xk`, the last link keeping the children.
fn split_shared_roots(t: &TreeDecomposition) -> TreeDecomposition {
    let mut out: Vec<(Vec<NodeId>, Option<usize>)> = Vec::with_capacity(t.bag_count());
    let mut last_of = vec![usize::MAX; t.bag_count()];
    for b in t.pre_order() {
        let bag = t.bag(b);
        let parent = bag.parent.map(|p: BagId| last_of[p.index()]);
        let rooted = t.rooted_at(b);
        if rooted.len() <= 1 {
            last_of[b.index()] = out.len();
            out.push((bag.nodes.clone(), parent));
            continue;
        }
        let later = &rooted[1..];
        let mut nodes: Vec<NodeId> = bag
            .nodes
            .iter()
            .copied()
            .filter(|u| later.binary_search(u).is_err())
            .collect();
        out.push((nodes.clone(), parent));
        for &x in later {
            nodes.push(x);
            nodes.sort_unstable();
            let p = out.len() - 1;
            out.push((nodes.clone(), Some(p)));
        }
        last_of[b.index()] = out.len() - 1;
    }
    TreeDecomposition::from_bags(t.node_count(), out).expect("root chains keep the tree shape")
}
