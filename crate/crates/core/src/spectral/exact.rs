//! Post-processing of computed spectra around defective eigenvalues.
//!
//! A defective eigenvalue with a Jordan block of size `k` comes out of a
//! floating-point solver as a ring of radius about `eps^(1/k)` around the
//! true value, while the mean of the ring (the trace of the block over `k`)
//! stays accurate to working precision. Close clusters are therefore replaced
//! by their mean. For the eigenvalue 0 of an integer matrix the algebraic
//! multiplicity is also available exactly, as `n - rank(M^j)` once the ranks
//! of successive powers stop decreasing.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::scalar::Real;
use crate::Complex;

/// Computed eigenvalues at most this far from 0, relative to the line sum,
/// are candidates for the exact zero cluster.
pub const ZERO_CLUSTER: f64 = 1e-2;

/// Computed eigenvalues closer than this, relative to the line sum, are
/// treated as one defective cluster.
pub const CLUSTER_RADIUS: f64 = 1e-5;

/// Replaces each cluster of eigenvalues (single linkage at `radius`) by its mean.
pub fn average_clusters<T: Real>(values: &mut [Complex<T>], radius: T) {
    let n = values.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..n {
        for j in i + 1..n {
            if (values[i] - values[j]).norm() <= radius {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        let root = find(&mut parent, i);
        members[root].push(i);
    }
    for group in members.iter().filter(|g| g.len() > 1) {
        let sum = group.iter().fold(Complex::new(T::zero(), T::zero()), |acc, &k| acc + values[k]);
        let mean = sum / T::from_int(group.len() as i64);
        for &k in group {
            values[k] = mean;
        }
    }
}

/// Rank by fraction-free (Bareiss) elimination.
fn rank(n: usize, entries: &[BigInt]) -> usize {
    let mut a: Vec<Vec<BigInt>> = entries.chunks(n.max(1)).map(|r| r.to_vec()).collect();
    let rows = a.len();
    let mut prev = BigInt::from(1);
    let mut r = 0;
    for col in 0..n {
        let Some(pivot) = (r..rows).find(|&i| !a[i][col].is_zero()) else {
            continue;
        };
        a.swap(r, pivot);
        for i in r + 1..rows {
            for j in col + 1..n {
                let v = (&a[r][col] * &a[i][j] - &a[i][col] * &a[r][j]) / &prev;
                a[i][j] = v;
            }
            a[i][col] = BigInt::zero();
        }
        prev = a[r][col].abs();
        if prev.is_zero() {
            prev = BigInt::from(1);
        }
        r += 1;
    }
    r
}

fn multiply(n: usize, a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = &a[i * n + k];
            if aik.is_zero() {
                continue;
            }
            for j in 0..n {
                out[i * n + j] += aik * &b[k * n + j];
            }
        }
    }
    out
}

/// Algebraic multiplicity of the eigenvalue 0 of an integer matrix.
pub fn zero_multiplicity(n: usize, entries: &[i64]) -> usize {
    if n == 0 {
        return 0;
    }
    let base: Vec<BigInt> = entries.iter().map(|&x| BigInt::from(x)).collect();
    let mut power = base.clone();
    let mut last = rank(n, &power);
    while last > 0 {
        power = multiply(n, &power, &base);
        let next = rank(n, &power);
        if next == last {
            break;
        }
        last = next;
    }
    n - last
}

/// Sets the `zeros` computed eigenvalues of smallest modulus to exactly 0,
/// provided they lie within the cluster radius `ZERO_CLUSTER * scale`.
pub fn settle_zero_cluster<T: Real>(values: &mut [Complex<T>], zeros: usize, scale: T) {
    let radius = T::lit(ZERO_CLUSTER) * scale.max(T::one());
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].norm().partial_cmp(&values[b].norm()).unwrap_or(std::cmp::Ordering::Equal));
    for &k in order.iter().take(zeros) {
        if values[k].norm() <= radius {
            values[k] = Complex::new(T::zero(), T::zero());
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nilpotent_and_diagonalizable_zeros() {
        // single Jordan block of size 3
        assert_eq!(zero_multiplicity(3, &[0, 1, 0, 0, 0, 1, 0, 0, 0]), 3);
        assert_eq!(zero_multiplicity(2, &[1, 1, 1, 1]), 1);
        assert_eq!(zero_multiplicity(2, &[2, 0, 0, 3]), 0);
        assert_eq!(zero_multiplicity(3, &[0; 9]), 3);
        // [[1,1],[0,0]] ++ nilpotent 2-block
        let m = [1, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 0, 0, 0, 0];
        assert_eq!(zero_multiplicity(4, &m), 3);
    }

    #[test]
    fn jordan_rings_collapse_to_their_mean() {
        let e = 1e-8;
        let mut v = vec![
            Complex::new(1.0 + e, 0.0),
            Complex::new(1.0 - e, 0.0),
            Complex::new(-0.5, 0.3),
            Complex::new(-0.5, -0.3),
        ];
        average_clusters(&mut v, 1e-5);
        assert_eq!(v[0], Complex::new(1.0, 0.0));
        assert_eq!(v[1], Complex::new(1.0, 0.0));
        assert_eq!(v[2], Complex::new(-0.5, 0.3));
    }

    #[test]
    fn cluster_is_settled() {
        let mut v = vec![Complex::new(2.0, 0.0), Complex::new(1e-6, 1e-6), Complex::new(-1e-6, 0.0), Complex::new(0.5, 0.0)];
        settle_zero_cluster(&mut v, 2, 2.0);
        assert_eq!(v[1], Complex::new(0.0, 0.0));
        assert_eq!(v[2], Complex::new(0.0, 0.0));
        assert_eq!(v[3], Complex::new(0.5, 0.0));
    }
}
