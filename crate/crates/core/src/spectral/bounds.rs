//! The index of irreducibility and the classical eigenvalue localisation
//! bounds for doubly stochastic matrices.
//!
//! Doubly stochastic matrices are passed as an integer matrix together with a
//! common denominator, so cut weights stay exact.

use num_complex::Complex;
use serde::Serialize;

use super::graph::{connectivity, longest_circuit, StructureReport};
use super::spectrum;
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::{IntegerMatrix, Rational};

pub const MAX_CUT_ORDER: usize = 20;

/// Absolute slack granted to every inequality.
pub const BOUND_SLACK: f64 = 1e-9;

fn check_doubly_stochastic(m: &IntegerMatrix, denominator: i64) -> Result<()> {
    if denominator <= 0 {
        return Err(Error::domain("denominator must be positive"));
    }
    if m.as_slice().iter().any(|&x| x < 0) {
        return Err(Error::domain("matrix has negative entries"));
    }
    if m.line_sum() != Some(denominator) {
        return Err(Error::domain(format!(
            "rows and columns must all sum to the denominator {denominator}"
        )));
    }
    Ok(())
}

/// `min over nonempty proper S of sum_{i in S, j not in S} m_ij / denominator`,
/// by enumerating all `2^N - 2` subsets.
pub fn irreducibility_index(m: &IntegerMatrix, denominator: i64) -> Result<Rational> {
    let n = m.order();
    if n > MAX_CUT_ORDER {
        return Err(Error::capacity("irreducibility index order", MAX_CUT_ORDER, n));
    }
    check_doubly_stochastic(m, denominator)?;
    if n == 1 {
        // no nonempty proper subset exists
        return Ok(Rational::from_integer(0));
    }
    let full = (1u32 << n) - 1;
    let mut best = i64::MAX;
    for set in 1..full {
        let mut cut = 0i64;
        for i in (0..n).filter(|i| set >> i & 1 == 1) {
            for j in (0..n).filter(|j| set >> j & 1 == 0) {
                cut += m[(i, j)];
            }
        }
        best = best.min(cut);
    }
    Ok(Rational::new(best, denominator))
}

pub fn structure_report(m: &IntegerMatrix, denominator: i64) -> Result<StructureReport> {
    Ok(StructureReport {
        connectivity: connectivity(m),
        mu: irreducibility_index(m, denominator)?,
        kappa: longest_circuit(m)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundCheck<T> {
    pub lhs: T,
    pub rhs: T,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenvalueBounds<T> {
    pub re: T,
    pub im: T,
    /// `|1 - lambda| >= 2 (1 - cos(pi/N)) mu`
    pub fiedler: BoundCheck<T>,
    /// `|1 + lambda| >= (1 - cos(pi/N)) mu`, only for odd `N`
    pub fiedler_ptak: Option<BoundCheck<T>>,
    /// `Re + |Im| tan(pi/kappa) <= rho` for `kappa > 2`; for `kappa <= 2`
    /// the eigenvalue must be real and the check is `Re <= rho` with `|Im|`
    /// below the slack.
    pub kellogg_stephens: BoundCheck<T>,
}

impl<T: Copy> EigenvalueBounds<T> {
    pub fn all_pass(&self) -> bool {
        self.fiedler.pass
            && self.fiedler_ptak.is_none_or(|c| c.pass)
            && self.kellogg_stephens.pass
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport<T> {
    pub order: usize,
    pub mu: Rational,
    pub kappa: usize,
    pub rho: T,
    pub eigenvalues: Vec<EigenvalueBounds<T>>,
}

impl<T: Copy> BoundReport<T> {
    pub fn all_pass(&self) -> bool {
        self.eigenvalues.iter().all(EigenvalueBounds::all_pass)
    }
}

/// Checks the Fiedler, Fiedler-Ptak and Kellogg-Stephens inequalities for
/// every nonleading eigenvalue of `m / denominator`.
pub fn bound_report<T: Real>(m: &IntegerMatrix, denominator: i64) -> Result<BoundReport<T>> {
    let report = structure_report(m, denominator)?;
    let n = m.order();
    let scale = T::one() / T::from_int(denominator);
    let spec = spectrum::<T, i64>(m)?;
    let mu = T::from_int(*report.mu.numer()) / T::from_int(*report.mu.denom());
    let slack = T::lit(BOUND_SLACK);
    // spectral radius of a doubly stochastic matrix
    let rho = spec.leading() * scale;
    let angle = T::PI() / T::from_int(n as i64);
    let gap = T::one() - angle.cos();

    let eigenvalues = spec
        .nonleading()
        .iter()
        .map(|z| {
            let lambda = Complex::new(z.re * scale, z.im * scale);
            let fiedler = {
                let lhs = (Complex::new(T::one(), T::zero()) - lambda).norm();
                let rhs = T::lit(2.0) * gap * mu;
                BoundCheck { lhs, rhs, pass: lhs >= rhs - slack }
            };
            let fiedler_ptak = (n % 2 == 1).then(|| {
                let lhs = (Complex::new(T::one(), T::zero()) + lambda).norm();
                let rhs = gap * mu;
                BoundCheck { lhs, rhs, pass: lhs >= rhs - slack }
            });
            let kellogg_stephens = if report.kappa > 2 {
                let lhs = lambda.re
                    + lambda.im.abs() * (T::PI() / T::from_int(report.kappa as i64)).tan();
                BoundCheck { lhs, rhs: rho, pass: lhs <= rho + slack }
            } else {
                BoundCheck {
                    lhs: lambda.re,
                    rhs: rho,
                    pass: lambda.re <= rho + slack && lambda.im.abs() <= slack,
                }
            };
            EigenvalueBounds {
                re: lambda.re,
                im: lambda.im,
                fiedler,
                fiedler_ptak,
                kellogg_stephens,
            }
        })
        .collect();
    Ok(BoundReport {
        order: n,
        mu: report.mu,
        kappa: report.kappa,
        rho,
        eigenvalues,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tent() -> IntegerMatrix {
        IntegerMatrix::from_rows(&[vec![1, 1, 0], vec![0, 0, 2], vec![1, 1, 0]]).unwrap()
    }

    /// Cut weights listed by hand for the six nonempty proper subsets.
    #[test]
    fn index_of_halved_tent_matrix() {
        // S={1}:1/2  S={2}:1  S={3}:1  S={1,2}:1  S={1,3}:1  S={2,3}:1/2
        assert_eq!(irreducibility_index(&tent(), 2).unwrap(), Rational::new(1, 2));
    }

    #[test]
    fn index_of_reducible_and_uniform_matrices() {
        assert_eq!(
            irreducibility_index(&IntegerMatrix::identity(2).unwrap(), 1).unwrap(),
            Rational::from_integer(0)
        );
        let ones = IntegerMatrix::from_rows(&[vec![1, 1], vec![1, 1]]).unwrap();
        assert_eq!(irreducibility_index(&ones, 2).unwrap(), Rational::new(1, 2));
    }

    #[test]
    fn index_rejects_bad_input() {
        assert!(matches!(irreducibility_index(&tent(), 3), Err(Error::Domain(_))));
        let big = IntegerMatrix::identity(21).unwrap();
        assert!(matches!(irreducibility_index(&big, 1), Err(Error::Capacity { .. })));
    }

    #[test]
    fn bounds_on_halved_tent_matrix() {
        let r: BoundReport<f64> = bound_report(&tent(), 2).unwrap();
        assert_eq!(r.mu, Rational::new(1, 2));
        assert!(r.all_pass());
        let minus_half = r.eigenvalues.iter().find(|e| (e.re + 0.5).abs() < 1e-9).unwrap();
        assert!((minus_half.fiedler.lhs - 1.5).abs() < 1e-12);
        assert!((minus_half.fiedler.rhs - 0.5).abs() < 1e-12);
        let zero = r.eigenvalues.iter().find(|e| e.re.abs() < 1e-9).unwrap();
        let fp = zero.fiedler_ptak.unwrap();
        assert!((fp.lhs - 1.0).abs() < 1e-9);
        assert!((fp.rhs - 0.25).abs() < 1e-12);
    }

    #[test]
    fn kellogg_stephens_on_symmetric_matrix() {
        let c = crate::matrix::circulant(2, 3).unwrap();
        let r: BoundReport<f64> = bound_report(&c, 2).unwrap();
        assert!(r.eigenvalues.iter().all(|e| e.im == 0.0));
        assert!(r.all_pass());
    }
}
