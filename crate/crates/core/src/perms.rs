//! Lexicographic enumeration of the symmetric group.

use crate::map_family::IntervalPermutation;

pub fn factorial(n: usize) -> usize {
    (1..=n).product()
}

/// The permutation of rank `k` (zero-based) among all image vectors of
/// length `n` in lexicographic order.
pub fn unrank(n: usize, mut k: usize) -> Vec<usize> {
    let mut pool: Vec<usize> = (0..n).collect();
    let mut out = Vec::with_capacity(n);
    for i in (0..n).rev() {
        let f = factorial(i);
        out.push(pool.remove(k / f));
        k %= f;
    }
    out
}

/// Advances `p` to its lexicographic successor; returns `false` after the last one.
pub fn next_permutation(p: &mut [usize]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let Some(i) = (0..n - 1).rev().find(|&i| p[i] < p[i + 1]) else {
        return false;
    };
    let j = (i + 1..n).rev().find(|&j| p[j] > p[i]).expect("successor exists");
    p.swap(i, j);
    p[i + 1..].reverse();
    true
}

/// Calls `f(rank, images)` for every permutation with rank in `start..end`.
pub fn for_each_in_range(n: usize, start: usize, end: usize, mut f: impl FnMut(usize, &[usize])) {
    if start >= end {
        return;
    }
    let mut p = unrank(n, start);
    for rank in start..end {
        f(rank, &p);
        if rank + 1 < end {
            next_permutation(&mut p);
        }
    }
}

/// All permutations of `n` cells in lexicographic order.
pub fn all(n: usize) -> impl Iterator<Item = IntervalPermutation> {
    let mut current = Some((0..n).collect::<Vec<usize>>());
    std::iter::from_fn(move || {
        let p = current.take()?;
        let mut next = p.clone();
        if next_permutation(&mut next) {
            current = Some(next);
        }
        Some(IntervalPermutation::from_zero_based(p).expect("valid permutation"))
    })
}
