//! Dense square matrices and the constructions built on them.

mod builder;

pub use builder::*;

use std::fmt;
use std::ops::{Add, Index, Mul};

use num_traits::{Num, NumCast, Zero};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Largest order any builder will produce.
pub const MAX_ORDER: usize = 4096;

/// Row-major dense square matrix.
///
/// Row and column sums are computed once at construction; they are `Some`
/// only when every row (respectively column) has the same sum.
#[derive(Clone, PartialEq)]
pub struct SquareMatrix<T> {
    n: usize,
    data: Vec<T>,
    row_sum: Option<T>,
    col_sum: Option<T>,
}

impl<T> SquareMatrix<T> {
    pub fn order(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[T]> {
        self.data.chunks(self.n.max(1))
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }
}

impl<T: Num + Copy + PartialEq> SquareMatrix<T> {
    pub fn from_vec(n: usize, data: Vec<T>) -> Result<Self> {
        if n > MAX_ORDER {
            return Err(Error::capacity("matrix order", MAX_ORDER, n));
        }
        if data.len() != n * n {
            return Err(Error::domain(format!(
                "matrix data has {} entries, expected {} for order {n}",
                data.len(),
                n * n
            )));
        }
        let mut m = Self {
            n,
            data,
            row_sum: None,
            col_sum: None,
        };
        m.row_sum = m.constant_line_sum(true);
        m.col_sum = m.constant_line_sum(false);
        Ok(m)
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let n = rows.len();
        if let Some(bad) = rows.iter().position(|r| r.len() != n) {
            return Err(Error::domain(format!(
                "matrix is not square: row {} has {} entries, expected {n}",
                bad + 1,
                rows[bad].len()
            )));
        }
        Self::from_vec(n, rows.concat())
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> T) -> Result<Self> {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Self::from_vec(n, data)
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::from_fn(n, |i, j| if i == j { T::one() } else { T::zero() })
    }

    fn constant_line_sum(&self, rows: bool) -> Option<T> {
        let line = |k: usize| -> T {
            (0..self.n).fold(T::zero(), |acc, l| {
                acc + if rows { self[(k, l)] } else { self[(l, k)] }
            })
        };
        if self.n == 0 {
            return None;
        }
        let first = line(0);
        (1..self.n).all(|k| line(k) == first).then_some(first)
    }

    pub fn row_sum(&self) -> Option<T> {
        self.row_sum
    }

    pub fn col_sum(&self) -> Option<T> {
        self.col_sum
    }

    /// The common value of all row and column sums, if there is one.
    pub fn line_sum(&self) -> Option<T> {
        match (self.row_sum, self.col_sum) {
            (Some(r), Some(c)) if r == c => Some(r),
            _ => None,
        }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)]).expect("same order")
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| (0..i).all(|j| self[(i, j)] == self[(j, i)]))
    }

    pub fn map<U: Num + Copy + PartialEq>(&self, f: impl Fn(T) -> U) -> SquareMatrix<U> {
        SquareMatrix::from_vec(self.n, self.data.iter().map(|&x| f(x)).collect())
            .expect("same order")
    }

    pub fn scale(&self, c: T) -> Self {
        self.map(|x| x * c)
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::domain(format!(
                "cannot multiply matrices of order {} and {}",
                self.n, other.n
            )));
        }
        let n = self.n;
        let mut data = vec![T::zero(); n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    data[i * n + j] = data[i * n + j] + a * other[(k, j)];
                }
            }
        }
        Self::from_vec(n, data)
    }

    /// Entrywise sum.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::domain(format!(
                "cannot add matrices of order {} and {}",
                self.n, other.n
            )));
        }
        Self::from_vec(
            self.n,
            self.data.iter().zip(&other.data).map(|(&a, &b)| a + b).collect(),
        )
    }

    /// `self * P(sigma)`: column `j` of `self` becomes column `sigma(j)`.
    pub fn permute_columns(&self, images: &[usize]) -> Self {
        let n = self.n;
        let mut data = vec![T::zero(); n * n];
        for i in 0..n {
            for (j, &sj) in images.iter().enumerate() {
                data[i * n + sj] = self[(i, j)];
            }
        }
        Self::from_vec(n, data).expect("same order")
    }

    /// `P(sigma) * self`: row `i` of the result is row `sigma(i)` of `self`.
    pub fn permute_rows(&self, images: &[usize]) -> Self {
        let n = self.n;
        let mut data = Vec::with_capacity(n * n);
        for &si in images {
            data.extend_from_slice(self.row(si));
        }
        Self::from_vec(n, data).expect("same order")
    }

    /// Upper-left `k x k` block.
    pub fn leading_block(&self, k: usize) -> Result<Self> {
        if k > self.n {
            return Err(Error::domain(format!("block of order {k} exceeds order {}", self.n)));
        }
        Self::from_fn(k, |i, j| self[(i, j)])
    }

    /// Restriction to the zero-sum subspace in the basis `e_i - e_n`:
    /// entry `(i, j)` is `a_ij - a_in` for `i, j < n - 1`.
    ///
    /// The subspace is invariant exactly when all column sums agree.
    pub fn zero_sum_restriction(&self) -> Result<Self> {
        if self.col_sum.is_none() {
            return Err(Error::domain(
                "column sums are not constant, so the zero-sum subspace is not invariant",
            ));
        }
        let last = self.n - 1;
        Self::from_fn(last, |i, j| self[(i, j)] - self[(i, last)])
    }
}

impl<T: Copy + NumCast> SquareMatrix<T> {
    /// Converts every entry into a real scalar.
    pub fn to_real<R: Real>(&self) -> SquareMatrix<R> {
        let data = self
            .data
            .iter()
            .map(|&x| R::from(x).expect("entry representable"))
            .collect::<Vec<R>>();
        let convert = |s: Option<T>| s.map(|x| R::from(x).expect("entry representable"));
        SquareMatrix {
            n: self.n,
            data,
            row_sum: convert(self.row_sum),
            col_sum: convert(self.col_sum),
        }
    }
}

impl<T> Index<(usize, usize)> for SquareMatrix<T> {
    type Output = T;

    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.n + j]
    }
}

impl<T: Num + Copy + PartialEq> Mul for &SquareMatrix<T> {
    type Output = SquareMatrix<T>;

    fn mul(self, rhs: Self) -> SquareMatrix<T> {
        self.matmul(rhs).expect("matching orders")
    }
}

impl<T: Num + Copy + PartialEq> Add for &SquareMatrix<T> {
    type Output = SquareMatrix<T>;

    fn add(self, rhs: Self) -> SquareMatrix<T> {
        SquareMatrix::add(self, rhs).expect("matching orders")
    }
}

impl<T: fmt::Display> fmt::Debug for SquareMatrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "SquareMatrix({})", self.n)?;
        for i in 0..self.n {
            let row: Vec<String> = (0..self.n).map(|j| self[(i, j)].to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl<T: Zero + Copy> SquareMatrix<T> {
    pub fn count_nonzero(&self) -> usize {
        self.data.iter().filter(|x| !x.is_zero()).count()
    }
}
