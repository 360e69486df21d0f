//! Reverse Cuthill–McKee ordering to keep the factorization profile narrow.

use std::collections::VecDeque;

use super::{CsrMatrix, Scalar};

/// Returns `perm` with `perm[new] = old`.
pub fn reverse_cuthill_mckee<T: Scalar>(a: &CsrMatrix<T>) -> Vec<usize> {
    let n = a.dim();
    let adj: Vec<Vec<usize>> = (0..n)
        .map(|i| a.row(i).map(|(j, _)| j).filter(|&j| j != i).collect())
        .collect();
    let degree: Vec<usize> = adj.iter().map(Vec::len).collect();

    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    while order.len() < n {
        // Lowest-degree unvisited node seeds the next component.
        let seed = (0..n)
            .filter(|&i| !visited[i])
            .min_by_key(|&i| (degree[i], i))
            .expect("unvisited node");
        let start = pseudo_peripheral(seed, &adj, &degree);
        let mut queue = VecDeque::from([start]);
        visited[start] = true;
        while let Some(v) = queue.pop_front() {
            order.push(v);
            let mut next: Vec<usize> = adj[v].iter().copied().filter(|&w| !visited[w]).collect();
            next.sort_by_key(|&w| (degree[w], w));
            next.dedup();
            for w in next {
                visited[w] = true;
                queue.push_back(w);
            }
        }
    }
    order.reverse();
    order
}

/// George–Liu search for a node of (nearly) maximal eccentricity.
fn pseudo_peripheral(seed: usize, adj: &[Vec<usize>], degree: &[usize]) -> usize {
    let mut node = seed;
    let (mut ecc, mut last) = bfs_last_level(node, adj);
    loop {
        let cand = *last
            .iter()
            .min_by_key(|&&w| (degree[w], w))
            .expect("non-empty level");
        let (e, l) = bfs_last_level(cand, adj);
        if e > ecc {
            node = cand;
            ecc = e;
            last = l;
        } else {
            return node;
        }
    }
}

fn bfs_last_level(start: usize, adj: &[Vec<usize>]) -> (usize, Vec<usize>) {
    let mut level = vec![usize::MAX; adj.len()];
    level[start] = 0;
    let mut frontier = vec![start];
    let mut depth = 0;
    loop {
        let mut next = Vec::new();
        for &v in &frontier {
            for &w in &adj[v] {
                if level[w] == usize::MAX {
                    level[w] = depth + 1;
                    next.push(w);
                }
            }
        }
        if next.is_empty() {
            return (depth, frontier);
        }
        frontier = next;
        depth += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path_with_wrap(n: usize) -> CsrMatrix<f64> {
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 2.0));
            let j = (i + 1) % n;
            t.push((i, j, -1.0));
            t.push((j, i, -1.0));
        }
        CsrMatrix::from_triplets(n, t)
    }

    #[test]
    fn is_a_permutation() {
        let a = path_with_wrap(17);
        let mut p = reverse_cuthill_mckee(&a);
        p.sort();
        assert_eq!(p, (0..17).collect::<Vec<_>>());
    }

    #[test]
    fn ring_gets_bandwidth_two() {
        let a = path_with_wrap(40);
        let p = reverse_cuthill_mckee(&a);
        let mut inv = vec![0; 40];
        for (new, &old) in p.iter().enumerate() {
            inv[old] = new;
        }
        let bw = a
            .triplets()
            .map(|(i, j, _)| inv[i].abs_diff(inv[j]))
            .max()
            .unwrap();
        assert!(bw <= 2, "bandwidth {bw}");
    }

    #[test]
    fn handles_disconnected_graphs() {
        let a = CsrMatrix::<f64>::identity(5);
        assert_eq!(reverse_cuthill_mckee(&a).len(), 5);
    }
}
