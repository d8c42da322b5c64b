//! Reverse Cuthill-McKee ordering.

use std::collections::VecDeque;

use crate::sparse::CsrMatrix;

/// Symmetrized adjacency (diagonal dropped), sorted.
pub(crate) fn symmetric_graph(a: &CsrMatrix) -> Vec<Vec<usize>> {
    let n = a.nrows();
    let mut adj = vec![Vec::new(); n];
    for i in 0..n {
        for &j in a.row(i).0 {
            if i != j {
                adj[i].push(j);
                adj[j].push(i);
            }
        }
    }
    for nbrs in &mut adj {
        nbrs.sort_unstable();
        nbrs.dedup();
    }
    adj
}

/// BFS level structure from `root`, restricted to unvisited nodes.
fn levels(adj: &[Vec<usize>], root: usize, mask: &[bool]) -> Vec<Vec<usize>> {
    let mut seen = mask.to_vec();
    seen[root] = true;
    let mut out = vec![vec![root]];
    loop {
        let mut next = Vec::new();
        for &u in out.last().unwrap() {
            for &v in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    next.push(v);
                }
            }
        }
        if next.is_empty() {
            return out;
        }
        out.push(next);
    }
}

/// George-Liu pseudo-peripheral node search starting from `start`.
fn pseudo_peripheral(adj: &[Vec<usize>], start: usize, mask: &[bool]) -> usize {
    let mut root = start;
    let mut depth = levels(adj, root, mask).len();
    loop {
        let ls = levels(adj, root, mask);
        let candidate = *ls
            .last()
            .unwrap()
            .iter()
            .min_by_key(|&&v| (adj[v].len(), v))
            .unwrap();
        let d = levels(adj, candidate, mask).len();
        if d <= depth {
            return root;
        }
        root = candidate;
        depth = d;
    }
}

/// Permutation `new -> old` reducing the envelope of a structurally
/// symmetric matrix. Deterministic: ties break by node index.
pub fn reverse_cuthill_mckee(a: &CsrMatrix) -> Vec<usize> {
    let adj = symmetric_graph(a);
    let n = adj.len();
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    while order.len() < n {
        let start = (0..n)
            .filter(|&v| !visited[v])
            .min_by_key(|&v| (adj[v].len(), v))
            .unwrap();
        let root = pseudo_peripheral(&adj, start, &visited);
        let mut queue = VecDeque::from([root]);
        visited[root] = true;
        while let Some(u) = queue.pop_front() {
            order.push(u);
            let mut nbrs: Vec<usize> = adj[u].iter().copied().filter(|&v| !visited[v]).collect();
            nbrs.sort_unstable_by_key(|&v| (adj[v].len(), v));
            for v in nbrs {
                visited[v] = true;
                queue.push_back(v);
            }
        }
    }
    order.reverse();
    order
}
