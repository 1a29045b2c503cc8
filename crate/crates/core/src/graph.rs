//! Traversals over subgraphs of the reach graph induced by a node mask.

use std::collections::VecDeque;

use crate::instance::ReachGraph;

/// Nodes reachable from `root` using only nodes with `allowed[v]`.
/// `root` itself is always included.
pub fn reachable_from(reach: &ReachGraph, allowed: &[bool], root: usize) -> Vec<bool> {
    let mut seen = vec![false; reach.node_count()];
    let mut queue = VecDeque::from([root]);
    seen[root] = true;
    while let Some(u) = queue.pop_front() {
        for &v in reach.neighbors(u) {
            if allowed[v] && !seen[v] {
                seen[v] = true;
                queue.push_back(v);
            }
        }
    }
    seen
}

/// Number of connected components of the subgraph induced by `mask`.
pub fn component_count(reach: &ReachGraph, mask: &[bool]) -> usize {
    let mut seen = vec![false; reach.node_count()];
    let mut count = 0;
    let mut stack = Vec::new();
    for s in 0..reach.node_count() {
        if !mask[s] || seen[s] {
            continue;
        }
        count += 1;
        seen[s] = true;
        stack.push(s);
        while let Some(u) = stack.pop() {
            for &v in reach.neighbors(u) {
                if mask[v] && !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
    }
    count
}

/// The induced subgraph has at most one component. Empty masks count as
/// connected.
pub fn is_connected(reach: &ReachGraph, mask: &[bool]) -> bool {
    component_count(reach, mask) <= 1
}

/// Articulation points of the subgraph induced by `mask` (iterative
/// Hopcroft-Tarjan, linear time).
pub fn articulation_points(reach: &ReachGraph, mask: &[bool]) -> Vec<bool> {
    let n = reach.node_count();
    let mut disc = vec![0u32; n];
    let mut low = vec![0u32; n];
    let mut cut = vec![false; n];
    let mut clock = 0u32;
    // (node, parent, next neighbor position)
    let mut stack: Vec<(usize, usize, usize)> = Vec::new();

    for s in 0..n {
        if !mask[s] || disc[s] != 0 {
            continue;
        }
        clock += 1;
        disc[s] = clock;
        low[s] = clock;
        let mut root_children = 0;
        stack.push((s, usize::MAX, 0));
        while let Some(top) = stack.last_mut() {
            let (u, parent) = (top.0, top.1);
            let adj = reach.neighbors(u);
            if top.2 < adj.len() {
                let v = adj[top.2];
                top.2 += 1;
                if !mask[v] || v == parent {
                    continue;
                }
                if disc[v] == 0 {
                    clock += 1;
                    disc[v] = clock;
                    low[v] = clock;
                    if u == s {
                        root_children += 1;
                    }
                    stack.push((v, u, 0));
                } else {
                    low[u] = low[u].min(disc[v]);
                }
            } else {
                stack.pop();
                if parent != usize::MAX {
                    low[parent] = low[parent].min(low[u]);
                    if parent != s && low[u] >= disc[parent] {
                        cut[parent] = true;
                    }
                }
            }
        }
        if root_children > 1 {
            cut[s] = true;
        }
    }
    cut
}

/// Breadth-first spanning tree of the `mask`-induced component containing
/// `root`. Returns `parent` (with `usize::MAX` for the root and unreached
/// nodes) and the visit order.
pub fn bfs_tree(reach: &ReachGraph, mask: &[bool], root: usize) -> (Vec<usize>, Vec<usize>) {
    let n = reach.node_count();
    let mut parent = vec![usize::MAX; n];
    let mut seen = vec![false; n];
    let mut order = Vec::new();
    let mut queue = VecDeque::from([root]);
    seen[root] = true;
    while let Some(u) = queue.pop_front() {
        order.push(u);
        for &v in reach.neighbors(u) {
            if mask[v] && !seen[v] {
                seen[v] = true;
                parent[v] = u;
                queue.push_back(v);
            }
        }
    }
    (parent, order)
}

/// Nodes that must join any connected subgraph spanning `root` and every
/// `required` node, when the subgraph may only use `allowed` nodes.
///
/// Works on the component of `root` in the `allowed`-induced subgraph and
/// returns the non-required nodes whose removal cuts some required node off
/// from `root`. The caller guarantees `allowed[root]` and that every required
/// node is in that component.
pub fn required_separators(
    reach: &ReachGraph,
    allowed: &[bool],
    required: &[bool],
    root: usize,
) -> Vec<usize> {
    let n = reach.node_count();
    let mut disc = vec![0u32; n];
    let mut low = vec![0u32; n];
    let mut below = vec![0u32; n];
    let mut forced = vec![false; n];
    let mut clock = 1u32;
    disc[root] = 1;
    low[root] = 1;
    let mut stack: Vec<(usize, usize, usize)> = vec![(root, usize::MAX, 0)];
    while let Some(top) = stack.last_mut() {
        let (u, parent) = (top.0, top.1);
        let adj = reach.neighbors(u);
        if top.2 < adj.len() {
            let v = adj[top.2];
            top.2 += 1;
            if !allowed[v] || v == parent {
                continue;
            }
            if disc[v] == 0 {
                clock += 1;
                disc[v] = clock;
                low[v] = clock;
                stack.push((v, u, 0));
            } else {
                low[u] = low[u].min(disc[v]);
            }
        } else {
            stack.pop();
            below[u] += u32::from(required[u]);
            if parent != usize::MAX {
                low[parent] = low[parent].min(low[u]);
                below[parent] += below[u];
                if low[u] >= disc[parent] && below[u] > 0 && !required[parent] {
                    forced[parent] = true;
                }
            }
        }
    }
    (0..n).filter(|&v| forced[v]).collect()
}
