//! Support-graph properties of a transition matrix.

use std::collections::VecDeque;

fn bfs_levels(adj: &[Vec<usize>], start: usize) -> Vec<Option<usize>> {
    let mut level = vec![None; adj.len()];
    level[start] = Some(0);
    let mut queue = VecDeque::from([start]);
    while let Some(u) = queue.pop_front() {
        let next = level[u].map(|l| l + 1);
        for &v in &adj[u] {
            if level[v].is_none() {
                level[v] = next;
                queue.push_back(v);
            }
        }
    }
    level
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Adjacency lists of the directed graph with an edge `i -> j` iff `support(i, j)`.
pub fn adjacency(n: usize, support: impl Fn(usize, usize) -> bool) -> Vec<Vec<usize>> {
    (0..n).map(|i| (0..n).filter(|&j| support(i, j)).collect()).collect()
}

pub fn is_strongly_connected(adj: &[Vec<usize>]) -> bool {
    if adj.is_empty() {
        return false;
    }
    let mut rev = vec![Vec::new(); adj.len()];
    for (u, out) in adj.iter().enumerate() {
        for &v in out {
            rev[v].push(u);
        }
    }
    bfs_levels(adj, 0).iter().all(Option::is_some) && bfs_levels(&rev, 0).iter().all(Option::is_some)
}

/// Period of an irreducible graph: gcd of `level(u) + 1 - level(v)` over all
/// edges, with levels from a BFS rooted anywhere.
pub fn period(adj: &[Vec<usize>]) -> Option<usize> {
    if !is_strongly_connected(adj) {
        return None;
    }
    let level = bfs_levels(adj, 0);
    let mut g = 0;
    for (u, out) in adj.iter().enumerate() {
        for &v in out {
            let (lu, lv) = (level[u]? as i64, level[v]? as i64);
            g = gcd(g, (lu + 1 - lv).unsigned_abs() as usize);
        }
    }
    Some(g)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cycle_periods() {
        let cyc3 = vec![vec![1], vec![2], vec![0]];
        assert_eq!(period(&cyc3), Some(3));
        let with_loop = vec![vec![1], vec![2], vec![0, 2]];
        assert_eq!(period(&with_loop), Some(1));
        let reducible = vec![vec![0], vec![1]];
        assert_eq!(period(&reducible), None);
    }
}
