//! Markov matrices of composed maps and the structured matrices used to
//! analyse them.

use num_integer::Integer;

use super::SquareMatrix;
use crate::error::{Error, Result};
use crate::map_family::{ComposedMap, IntervalPermutation, SlopeSignature};
use crate::{IntegerMatrix, Rational};

/// The `{0,1}` transition matrix of `g` on the partition into `N m` cells:
/// entry `(i, j)` is 1 iff the open fine cell `j` lies in `g(cell i)`.
///
/// Each fine cell is mapped affinely onto one coarse cell of width `1/N`, so
/// every row holds `m` consecutive ones. The coarse image is located by
/// evaluating `g` exactly at the midpoint of the fine cell.
pub fn fine_markov(g: &ComposedMap) -> Result<IntegerMatrix> {
    let (n, m) = (g.n(), g.m());
    let size = n * m;
    if size > super::MAX_ORDER {
        return Err(Error::capacity("fine Markov matrix order", super::MAX_ORDER, size));
    }
    let mut data = vec![0i64; size * size];
    for i in 0..size {
        let mid = Rational::new(2 * i as i64 + 1, 2 * size as i64);
        let image = g.eval(&mid)?;
        let coarse = (image * Rational::from_integer(n as i64)).floor().to_integer() as usize;
        for k in 0..m {
            data[i * size + coarse * m + k] = 1;
        }
    }
    IntegerMatrix::from_vec(size, data)
}

/// The `N x N` matrix `a_ij = sum_h b_{(i-1)m+h, (j-1)m+1}` with entries in `{0, 1, 2}`.
pub fn reduced_markov(g: &ComposedMap) -> Result<IntegerMatrix> {
    let b = fine_markov(g)?;
    let (n, m) = (g.n(), g.m());
    IntegerMatrix::from_fn(n, |i, j| (0..m).map(|h| b[(i * m + h, j * m)]).sum())
}

/// Parameters for [`structured_matrix`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StructuredKind {
    /// `P(sigma)` with `p_ij = 1` iff `j = sigma(i)`.
    Permutation(IntervalPermutation),
    /// `Q(sigma)`: each entry of `P(sigma)` replaced by an `m x m` identity or zero block.
    BlockPermutation(IntervalPermutation, usize),
    /// The anti-diagonal identity `J_n`.
    BackwardsIdentity(usize),
    /// The symmetric circulant `C(m, n)`.
    Circulant { m: usize, n: usize },
    /// `D = C(m, n) + C(m, n) J_n`.
    FoldedCirculant { m: usize, n: usize },
    /// The row permutation of the tent map's reduced matrix used to show the
    /// worst mixing tent composition is at least `cos(pi/n)`; `n` odd.
    TentWitness(usize),
}

pub fn structured_matrix(kind: &StructuredKind) -> Result<IntegerMatrix> {
    match kind {
        StructuredKind::Permutation(p) => permutation_matrix(p),
        StructuredKind::BlockPermutation(p, m) => block_permutation_matrix(p, *m),
        StructuredKind::BackwardsIdentity(n) => backwards_identity(*n),
        StructuredKind::Circulant { m, n } => circulant(*m, *n),
        StructuredKind::FoldedCirculant { m, n } => folded_circulant(*m, *n),
        StructuredKind::TentWitness(n) => tent_witness(*n),
    }
}

pub fn permutation_matrix(p: &IntervalPermutation) -> Result<IntegerMatrix> {
    IntegerMatrix::from_fn(p.len(), |i, j| i64::from(p.apply(i) == j))
}

pub fn block_permutation_matrix(p: &IntervalPermutation, m: usize) -> Result<IntegerMatrix> {
    if m == 0 {
        return Err(Error::domain("block size must be positive"));
    }
    IntegerMatrix::from_fn(p.len() * m, |i, j| {
        i64::from(p.apply(i / m) == j / m && i % m == j % m)
    })
}

pub fn backwards_identity(n: usize) -> Result<IntegerMatrix> {
    IntegerMatrix::from_fn(n, |i, j| i64::from(i + j + 1 == n))
}

fn check_circulant_params(m: usize, n: usize) -> Result<()> {
    if m == 0 || m > n {
        return Err(Error::precondition(format!("circulant needs 1 <= m <= N, got m = {m}, N = {n}")));
    }
    if m.gcd(&n) != 1 {
        return Err(Error::precondition(format!(
            "circulant needs gcd(m, N) = 1, got gcd({m}, {n}) = {}",
            m.gcd(&n)
        )));
    }
    Ok(())
}

/// `C(m, n)`: `c_ij = 1` iff `j = i + delta + r (mod n)` for some `0 <= r < m`,
/// where `delta = (1 - m)/2` for odd `m` and `(1 - m + n)/2` for even `m`.
pub fn circulant(m: usize, n: usize) -> Result<IntegerMatrix> {
    check_circulant_params(m, n)?;
    let (mi, ni) = (m as i64, n as i64);
    // gcd(m, n) = 1 makes n odd whenever m is even, so both halvings are exact
    let delta = if m % 2 == 1 { (1 - mi) / 2 } else { (1 - mi + ni) / 2 };
    IntegerMatrix::from_fn(n, |i, j| {
        let offset = (j as i64 - i as i64 - delta).rem_euclid(ni);
        i64::from(offset < mi)
    })
}

pub fn folded_circulant(m: usize, n: usize) -> Result<IntegerMatrix> {
    let c = circulant(m, n)?;
    let cj = c.matmul(&backwards_identity(n)?)?;
    c.add(&cj)
}

fn tent_witness(n: usize) -> Result<IntegerMatrix> {
    if n < 3 || n.is_multiple_of(2) {
        return Err(Error::precondition(format!("tent witness matrix needs odd N >= 3, got {n}")));
    }
    let s = (n - 1) / 2;
    // one-based indices throughout, as in the row description
    IntegerMatrix::from_fn(n, |i0, j0| {
        let (i, j) = (i0 + 1, j0 + 1);
        if (i == 1 || i == 3) && (j == 1 || j == 2) {
            return 1;
        }
        if i == n - 1 && j == n {
            return 2;
        }
        let hits = (2..=s).any(|h| (i == 2 * h - 2 || i == 2 * h + 1) && (j == 2 * h - 1 || j == 2 * h));
        i64::from(hits)
    })
}

/// Block-constant expansion: each entry becomes a `d x d` block filled with it.
pub fn lift(a: &IntegerMatrix, d: usize) -> Result<IntegerMatrix> {
    if d == 0 {
        return Err(Error::domain("lift factor must be at least 1"));
    }
    let size = a.order() * d;
    if size > super::MAX_ORDER {
        return Err(Error::capacity("lifted matrix order", super::MAX_ORDER, size));
    }
    IntegerMatrix::from_fn(size, |i, j| a[(i / d, j / d)])
}

/// Inverse of [`lift`] up to scaling: views `b` as `n x n` blocks of size `d`,
/// requires the `d` columns within each block to be identical, and replaces
/// each block by the sum of one of its columns. Rows `(i-1)d + 1 ..= i d`
/// form coarse row `i`.
pub fn collapse(b: &IntegerMatrix, d: usize) -> Result<IntegerMatrix> {
    if d == 0 || !b.order().is_multiple_of(d) {
        return Err(Error::domain(format!(
            "block size {d} does not divide matrix order {}",
            b.order()
        )));
    }
    let n = b.order() / d;
    for bi in 0..n {
        for bj in 0..n {
            for r in 0..d {
                let first = b[(bi * d + r, bj * d)];
                if (1..d).any(|s| b[(bi * d + r, bj * d + s)] != first) {
                    return Err(Error::ColumnBlock {
                        block_row: bi + 1,
                        block_col: bj + 1,
                        d,
                    });
                }
            }
        }
    }
    IntegerMatrix::from_fn(n, |i, j| (0..d).map(|r| b[(i * d + r, j * d)]).sum())
}

/// `E = A + A J` where `A` is the stretch-and-fold reduced matrix on `2N`
/// cells. Its upper-left `N x N` quarter is the reduced matrix of the
/// `m`-fold zigzag map on `N` cells.
pub fn doubled_matrix(m: usize, n: usize) -> Result<IntegerMatrix> {
    if n < m {
        return Err(Error::domain(format!("need N >= m, got N = {n} and m = {m}")));
    }
    let sf = ComposedMap::unpermuted(SlopeSignature::stretch_and_fold(m)?, 2 * n)?;
    let a = reduced_markov(&sf)?;
    let aj = a.matmul(&backwards_identity(2 * n)?)?;
    a.add(&aj)
}

impl SquareMatrix<i64> {
    pub fn max_abs_entry(&self) -> i64 {
        self.as_slice().iter().map(|x| x.abs()).max().unwrap_or(0)
    }
}
