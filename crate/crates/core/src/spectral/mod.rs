//! Spectra of constant-line-sum matrices, the subleading modulus `tau`, and
//! exact graph structure (irreducibility, primitivity, circuits, cuts).

pub mod bounds;
pub mod eigen;
pub mod exact;
pub mod graph;

pub use bounds::{bound_report, irreducibility_index, BoundCheck, BoundReport, EigenvalueBounds};
pub use graph::{connectivity, longest_circuit, row_relation_classes, Connectivity, StructureReport};

use std::cmp::Ordering;

use num_complex::Complex;
use num_traits::{Num, NumCast};

use crate::error::{Error, Result};
use crate::map_family::ComposedMap;
use crate::matrix::{fine_markov, reduced_markov, SquareMatrix};
use crate::scalar::Real;

/// Eigenvalues of a matrix whose row and column sums all equal `leading`,
/// split into the leading eigenvalue and the `order - 1` eigenvalues on the
/// zero-sum subspace.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum<T> {
    order: usize,
    leading: T,
    nonleading: Vec<Complex<T>>,
    tau: T,
}

impl<T: Real> Spectrum<T> {
    pub fn order(&self) -> usize {
        self.order
    }

    /// The common row sum, which is always an eigenvalue.
    pub fn leading(&self) -> T {
        self.leading
    }

    /// Eigenvalues on the zero-sum subspace, sorted by descending modulus then descending real part.
    pub fn nonleading(&self) -> &[Complex<T>] {
        &self.nonleading
    }

    /// Largest modulus among the nonleading eigenvalues; zero for order 1.
    pub fn tau(&self) -> T {
        self.tau
    }

    /// The full multiset, leading eigenvalue included, in export order.
    pub fn eigenvalues(&self) -> Vec<Complex<T>> {
        let mut all = self.nonleading.clone();
        all.push(Complex::new(self.leading, T::zero()));
        sort_for_export(&mut all);
        all
    }
}

/// Descending modulus, then descending real part.
pub fn sort_for_export<T: Real>(values: &mut [Complex<T>]) {
    values.sort_by(|a, b| {
        b.norm()
            .partial_cmp(&a.norm())
            .unwrap_or(Ordering::Equal)
            .then(b.re.partial_cmp(&a.re).unwrap_or(Ordering::Equal))
            .then(b.im.partial_cmp(&a.im).unwrap_or(Ordering::Equal))
    });
}

fn check_order<S>(m: &SquareMatrix<S>) -> Result<()> {
    if m.order() == 0 {
        return Err(Error::domain("empty matrix has no spectrum"));
    }
    Ok(())
}

/// Every eigenvalue of `m`, with multiplicity, in export order.
pub fn eigenvalues<T, S>(m: &SquareMatrix<S>) -> Result<Vec<Complex<T>>>
where
    T: Real,
    S: Num + NumCast + Copy + PartialEq,
{
    check_order(m)?;
    let real = m.to_real::<T>();
    let mut ev = if real.is_symmetric() {
        eigen::symmetric_eigenvalues(real.order(), real.as_slice())?
            .into_iter()
            .map(|x| Complex::new(x, T::zero()))
            .collect()
    } else {
        let mut ev = eigen::general_eigenvalues(real.order(), real.as_slice())?;
        if let Some(ints) = integral_entries(m) {
            let scale = real.row(0).iter().fold(T::zero(), |acc, &x| acc + x.abs());
            settle_zeros(&mut ev, real.order(), &ints, scale);
        }
        ev
    };
    sort_for_export(&mut ev);
    Ok(ev)
}

/// The entries as integers, if every entry is one.
fn integral_entries<S: Num + NumCast + Copy + PartialEq>(m: &SquareMatrix<S>) -> Option<Vec<i64>> {
    m.as_slice()
        .iter()
        .map(|&x| {
            let v: i64 = num_traits::cast(x)?;
            (num_traits::cast::<i64, S>(v)? == x).then_some(v)
        })
        .collect()
}

/// Averages defective clusters; a ring around 0 still too wide to matter
/// afterwards is replaced by exact zeros of the right multiplicity.
fn settle_zeros<T: Real>(ev: &mut [Complex<T>], n: usize, ints: &[i64], scale: T) {
    let scale = scale.max(T::one());
    exact::average_clusters(ev, T::lit(exact::CLUSTER_RADIUS) * scale);
    let visible = T::lit(1e-12) * scale;
    let radius = T::lit(exact::ZERO_CLUSTER) * scale;
    if ev.iter().any(|z| z.norm() <= radius && z.norm() > visible) {
        exact::settle_zero_cluster(ev, exact::zero_multiplicity(n, ints), scale);
    }
}

/// Common value of all row and column sums, compared with a relative tolerance
/// of a few ulps so that scaled integer matrices qualify.
fn approximate_line_sum<T: Real>(m: &SquareMatrix<T>) -> Option<T> {
    let n = m.order();
    let scale = m.as_slice().iter().fold(T::one(), |acc, x| acc.max(x.abs()));
    let tol = T::epsilon() * T::from_int(4 * n as i64) * scale;
    let first: T = m.row(0).iter().copied().sum();
    let rows_ok = (0..n).all(|i| (m.row(i).iter().copied().sum::<T>() - first).abs() <= tol);
    let cols_ok = (0..n).all(|j| ((0..n).map(|i| m[(i, j)]).sum::<T>() - first).abs() <= tol);
    (rows_ok && cols_ok).then_some(first)
}

/// Spectrum split into the leading eigenvalue and the nonleading part.
///
/// The nonleading eigenvalues are computed on the zero-sum subspace directly:
/// the matrix is restricted to the basis `e_i - e_n`, so the all-ones
/// direction is removed exactly rather than by matching a computed
/// eigenvalue. Symmetric input is solved with Jacobi rotations on the full
/// matrix and the eigenvalue closest to the row sum is removed.
pub fn spectrum<T, S>(m: &SquareMatrix<S>) -> Result<Spectrum<T>>
where
    T: Real,
    S: Num + NumCast + Copy + PartialEq,
{
    check_order(m)?;
    let real = m.to_real::<T>();
    let n = real.order();
    let c = approximate_line_sum(&real).ok_or_else(|| {
        Error::domain("row and column sums must all be equal to split off the leading eigenvalue")
    })?;
    if n == 1 {
        return Ok(Spectrum {
            order: 1,
            leading: c,
            nonleading: Vec::new(),
            tau: T::zero(),
        });
    }
    let mut nonleading: Vec<Complex<T>> = if real.is_symmetric() {
        let mut ev = eigen::symmetric_eigenvalues(n, real.as_slice())?;
        let closest = ev
            .iter()
            .enumerate()
            .min_by(|a, b| (*a.1 - c).abs().partial_cmp(&(*b.1 - c).abs()).unwrap_or(Ordering::Equal))
            .map(|(k, _)| k)
            .expect("order >= 2");
        ev.remove(closest);
        ev.into_iter().map(|x| Complex::new(x, T::zero())).collect()
    } else {
        let last = n - 1;
        let restricted: Vec<T> = (0..last)
            .flat_map(|i| {
                let real = &real;
                (0..last).map(move |j| real[(i, j)] - real[(i, last)])
            })
            .collect();
        let mut ev = eigen::general_eigenvalues(last, &restricted)?;
        if let Some(ints) = integral_entries(m) {
            let restricted_ints: Vec<i64> = (0..last)
                .flat_map(|i| {
                    let ints = &ints;
                    (0..last).map(move |j| ints[i * n + j] - ints[i * n + last])
                })
                .collect();
            settle_zeros(&mut ev, last, &restricted_ints, c.abs());
        }
        ev
    };
    sort_for_export(&mut nonleading);
    let tau = nonleading.first().map(|z| z.norm()).unwrap_or_else(T::zero);
    Ok(Spectrum {
        order: n,
        leading: c,
        nonleading,
        tau,
    })
}

/// Modulus of the subleading eigenvalue.
pub fn tau<T, S>(m: &SquareMatrix<S>) -> Result<T>
where
    T: Real,
    S: Num + NumCast + Copy + PartialEq,
{
    Ok(spectrum::<T, S>(m)?.tau())
}

/// Mixing rate of `g`: `max(1, tau(A(g, N))) / m`.
pub fn mixing_rate<T: Real>(g: &ComposedMap) -> Result<T> {
    let a = reduced_markov(g)?;
    let t: T = tau(&a)?;
    Ok(t.max(T::one()) / T::from_int(g.m() as i64))
}

/// Exact test: `g` is topologically mixing iff its fine Markov matrix is primitive.
pub fn is_topologically_mixing(g: &ComposedMap) -> Result<bool> {
    Ok(connectivity(&fine_markov(g)?).primitive)
}

/// A real unit eigenvector of `m` for the real eigenvalue `lambda`.
pub fn real_eigenvector<T: Real>(m: &SquareMatrix<T>, lambda: T) -> Result<Vec<T>> {
    eigen::real_eigenvector(m.order(), m.as_slice(), lambda)
}
