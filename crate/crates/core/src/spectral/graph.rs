//! Exact combinatorial structure of nonnegative matrices.

use std::collections::VecDeque;

use num_integer::Integer;
use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::SquareMatrix;
use crate::Rational;

pub const MAX_CIRCUIT_ORDER: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Connectivity {
    pub irreducible: bool,
    pub primitive: bool,
    /// gcd of the directed cycle lengths; 0 when the digraph has no cycle
    /// through the base vertex.
    pub period: usize,
}

/// Connectivity together with the index of irreducibility and the longest circuit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StructureReport {
    pub connectivity: Connectivity,
    pub mu: Rational,
    pub kappa: usize,
}

fn adjacency<S: Zero + Copy>(m: &SquareMatrix<S>) -> Vec<Vec<usize>> {
    (0..m.order())
        .map(|i| (0..m.order()).filter(|&j| !m[(i, j)].is_zero()).collect())
        .collect()
}

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

/// Irreducibility by strong connectivity; period as the gcd of
/// `level(u) + 1 - level(v)` over all edges of the breadth-first tree levels.
pub fn connectivity<S: Zero + Copy>(m: &SquareMatrix<S>) -> Connectivity {
    let n = m.order();
    if n == 0 {
        return Connectivity {
            irreducible: false,
            primitive: false,
            period: 0,
        };
    }
    let adj = adjacency(m);
    let forward = bfs_levels(&adj, 0);
    let mut reverse_adj = vec![Vec::new(); n];
    for (u, targets) in adj.iter().enumerate() {
        for &v in targets {
            reverse_adj[v].push(u);
        }
    }
    let backward = bfs_levels(&reverse_adj, 0);
    let irreducible = forward.iter().all(Option::is_some) && backward.iter().all(Option::is_some);

    let mut period = 0usize;
    for (u, targets) in adj.iter().enumerate() {
        let Some(lu) = forward[u] else { continue };
        for &v in targets {
            let Some(lv) = forward[v] else { continue };
            let diff = (lu + 1).abs_diff(lv);
            period = period.gcd(&diff);
        }
    }
    Connectivity {
        irreducible,
        primitive: irreducible && period == 1,
        period,
    }
}

/// Classes of the transitive closure of "columns `i` and `j` are both
/// nonzero in some row". Zero-based, each class sorted, classes ordered by
/// their smallest member.
pub fn row_relation_classes<S: Zero + Copy>(m: &SquareMatrix<S>) -> Vec<Vec<usize>> {
    let n = m.order();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for row in adjacency(m) {
        if let Some((&first, rest)) = row.split_first() {
            for &j in rest {
                let (a, b) = (find(&mut parent, first), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut classes: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; n];
    for i in 0..n {
        let root = find(&mut parent, i);
        if slot[root] == usize::MAX {
            slot[root] = classes.len();
            classes.push(Vec::new());
        }
        classes[slot[root]].push(i);
    }
    classes
}

/// Length of the longest simple directed cycle; self-loops count as length 1
/// and an acyclic digraph gives 0.
pub fn longest_circuit<S: Zero + Copy>(m: &SquareMatrix<S>) -> Result<usize> {
    let n = m.order();
    if n > MAX_CIRCUIT_ORDER {
        return Err(Error::capacity("longest circuit order", MAX_CIRCUIT_ORDER, n));
    }
    let adj = adjacency(m);
    let mut best = 0usize;
    let mut on_path = vec![false; n];
    // each cycle is enumerated once, from its smallest vertex
    fn extend(
        adj: &[Vec<usize>],
        start: usize,
        u: usize,
        depth: usize,
        on_path: &mut [bool],
        best: &mut usize,
    ) {
        for &v in &adj[u] {
            if v == start {
                *best = (*best).max(depth);
            } else if v > start && !on_path[v] {
                on_path[v] = true;
                extend(adj, start, v, depth + 1, on_path, best);
                on_path[v] = false;
            }
            if *best == adj.len() {
                return;
            }
        }
    }
    for s in 0..n {
        if best >= n - s {
            break;
        }
        on_path[s] = true;
        extend(&adj, s, s, 1, &mut on_path, &mut best);
        on_path[s] = false;
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{structured_matrix, StructuredKind};
    use crate::IntegerMatrix;

    fn mat(rows: &[&[i64]]) -> IntegerMatrix {
        IntegerMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn reducible_swap_composition() {
        let c = connectivity(&mat(&[&[1, 0, 1], &[0, 2, 0], &[1, 0, 1]]));
        assert!(!c.irreducible);
        assert!(!c.primitive);
    }

    #[test]
    fn tent_matrix_is_primitive() {
        let c = connectivity(&mat(&[&[1, 1, 0], &[0, 0, 2], &[1, 1, 0]]));
        assert!(c.irreducible && c.primitive);
        assert_eq!(c.period, 1);
    }

    #[test]
    fn three_cycle_has_period_three() {
        let p = structured_matrix(&StructuredKind::Permutation("2,3,1".parse().unwrap())).unwrap();
        let c = connectivity(&p);
        assert!(c.irreducible);
        assert!(!c.primitive);
        assert_eq!(c.period, 3);
    }

    #[test]
    fn bipartite_has_period_two() {
        let c = connectivity(&mat(&[&[0, 1, 1, 0], &[1, 0, 0, 1], &[1, 0, 0, 1], &[0, 1, 1, 0]]));
        assert!(c.irreducible);
        assert_eq!(c.period, 2);
    }

    #[test]
    fn row_relation_of_tent_matrix() {
        assert_eq!(
            row_relation_classes(&mat(&[&[1, 1, 0], &[0, 0, 2], &[1, 1, 0]])),
            vec![vec![0, 1], vec![2]]
        );
        assert_eq!(
            row_relation_classes(&mat(&[&[1, 1, 1], &[1, 1, 1], &[1, 1, 1]])),
            vec![vec![0, 1, 2]]
        );
        let zz = mat(&[
            &[1, 1, 1, 0, 0],
            &[0, 0, 0, 1, 2],
            &[0, 1, 1, 1, 0],
            &[2, 1, 0, 0, 0],
            &[0, 0, 1, 1, 1],
        ]);
        assert_eq!(row_relation_classes(&zz), vec![vec![0, 1, 2, 3, 4]]);
    }

    #[test]
    fn circuits() {
        let d = structured_matrix(&StructuredKind::TentWitness(5)).unwrap();
        assert_eq!(longest_circuit(&d).unwrap(), 5);
        let p = structured_matrix(&StructuredKind::Permutation("2,3,4,5,6,1".parse().unwrap())).unwrap();
        assert_eq!(longest_circuit(&p).unwrap(), 6);
        assert_eq!(longest_circuit(&IntegerMatrix::identity(2).unwrap()).unwrap(), 1);
        assert_eq!(longest_circuit(&mat(&[&[0, 1], &[0, 0]])).unwrap(), 0);
        let big = IntegerMatrix::identity(13).unwrap();
        assert!(matches!(longest_circuit(&big), Err(Error::Capacity { .. })));
    }
}
