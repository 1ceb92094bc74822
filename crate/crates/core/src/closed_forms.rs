//! Closed-form worst rates, circulant spectra, the degeneracy criterion,
//! the asymptotic constant and the tent eigenvalue region.

use num_integer::Integer;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::map_family::{canonical_signatures, SlopeSignature};
use crate::scalar::Real;
use crate::{Complex, Rational};

/// Slack applied to every region inequality.
pub const REGION_SLACK: f64 = 1e-9;

fn check_scale(m: usize, n: usize) -> Result<()> {
    if m < 2 || n < m {
        return Err(Error::domain(format!("closed forms need N >= m >= 2, got m = {m}, N = {n}")));
    }
    Ok(())
}

/// `d sin(m pi x) / (m sin(d pi x))`, exactly 1 when `d = m`.
fn sine_ratio<T: Real>(m: usize, d: usize, x: T) -> T {
    if d == m {
        return T::one();
    }
    let pi = T::PI();
    let (m, d) = (T::from_int(m as i64), T::from_int(d as i64));
    d * (m * pi * x).sin() / (m * (d * pi * x).sin())
}

/// At `N = m` every cell is stretched over the whole interval, so `A` is the
/// all-ones matrix for every permutation and the worst rate is `1/m`; the
/// general expressions below are `0/0` there.
fn boundary<T: Real>(m: usize, n: usize) -> Option<T> {
    (n == m).then(|| T::one() / T::from_int(m as i64))
}

/// Worst rate of the zigzag map: `d sin(m pi / 2N) / (m sin(d pi / 2N))`, `d = gcd(m, 2N)`.
pub fn zigzag_worst_rate<T: Real>(m: usize, n: usize) -> Result<T> {
    check_scale(m, n)?;
    if let Some(v) = boundary(m, n) {
        return Ok(v);
    }
    let d = m.gcd(&(2 * n));
    Ok(sine_ratio(m, d, T::one() / T::from_int(2 * n as i64)))
}

/// Worst rate of stretch-and-fold: `d sin(m pi / N) / (m sin(d pi / N))`, `d = gcd(m, N)`.
pub fn sf_worst_rate<T: Real>(m: usize, n: usize) -> Result<T> {
    check_scale(m, n)?;
    if let Some(v) = boundary(m, n) {
        return Ok(v);
    }
    let d = m.gcd(&n);
    Ok(sine_ratio(m, d, T::one() / T::from_int(n as i64)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CirculantKind {
    /// `C(m, N)` itself.
    C,
    /// `C + C J`, whose subleading modulus doubles that of `C`.
    D,
}

/// `tau(C(m, N)) = sin(m pi / N) / sin(pi / N)`; kind `D` doubles it.
///
/// The one exception is `D(1, 2) = I + J`, the all-ones matrix of order 2,
/// whose only nonleading eigenvalue is 0.
pub fn circulant_tau_formula<T: Real>(kind: CirculantKind, m: usize, n: usize) -> Result<T> {
    if m == 0 || m > n {
        return Err(Error::precondition(format!("circulant needs 1 <= m <= N, got m = {m}, N = {n}")));
    }
    if m.gcd(&n) != 1 {
        return Err(Error::precondition(format!("circulant needs gcd(m, N) = 1, got m = {m}, N = {n}")));
    }
    let x = T::PI() / T::from_int(n as i64);
    let base = if m == 1 {
        T::one()
    } else {
        (T::from_int(m as i64) * x).sin() / x.sin()
    };
    Ok(match kind {
        CirculantKind::D if n == 2 => T::zero(),
        CirculantKind::C => base,
        CirculantKind::D => base + base,
    })
}

/// True iff `tau_N(f) = 1` is predicted: `m | N`, or `m | 2N` and `f` is one
/// of the two zigzag maps, for `N > m`. At `N = m` every composition is
/// topologically mixing and the predicate is false.
pub fn degeneracy_predicate(m: usize, n: usize, s: &SlopeSignature) -> Result<bool> {
    check_scale(m, n)?;
    if s.m() != m {
        return Err(Error::domain(format!("signature {s} has {} branches, expected {m}", s.m())));
    }
    if n == m {
        return Ok(false);
    }
    if n.is_multiple_of(m) {
        return Ok(true);
    }
    let canon = canonical_signatures(m)?;
    Ok((2 * n).is_multiple_of(m) && (*s == canon.zigzag || *s == canon.inverted_zigzag))
}

/// `c(m) = 12 / (m^4 - m^2)` for odd `m >= 3`.
pub fn asymptotic_constant(m: usize) -> Result<Rational> {
    if m < 3 || m.is_multiple_of(2) {
        return Err(Error::domain(format!("asymptotic constant needs odd m >= 3, got {m}")));
    }
    let m = m as i64;
    Ok(Rational::new(12, m.pow(4) - m * m))
}

/// Eigenvalue region of the tent family on `N` cells.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegionTest<T> {
    pub n: usize,
    /// `-cos^2(pi / 2N)`
    pub left: T,
    /// `cos(pi / N)`
    pub right: T,
    /// `tan(pi / N)`
    pub slope: T,
}

impl<T: Real> RegionTest<T> {
    pub fn new(n: usize) -> Result<Self> {
        if n < 3 || n.is_multiple_of(2) {
            return Err(Error::precondition(format!("tent region needs odd N >= 3, got {n}")));
        }
        let x = T::PI() / T::from_int(n as i64);
        let half = (x / T::from_int(2)).cos();
        Ok(RegionTest { n, left: -(half * half), right: x.cos(), slope: x.tan() })
    }

    pub fn contains(&self, lambda: Complex<T>) -> RegionVerdict<T> {
        let slack = T::lit(REGION_SLACK);
        let left = lambda.re - self.left;
        let right = self.right - lambda.re;
        let wedge = T::one() - (lambda.re + lambda.im.abs() * self.slope);
        let margins = [(Constraint::Left, left), (Constraint::Right, right), (Constraint::Wedge, wedge)];
        let (active, _) = margins
            .iter()
            .copied()
            .fold(None, |acc: Option<(Constraint, T)>, (c, v)| match acc {
                Some((_, best)) if best <= v => acc,
                _ => Some((c, v)),
            })
            .expect("three constraints");
        RegionVerdict {
            inside: margins.iter().all(|&(_, v)| v >= -slack),
            left_margin: left,
            right_margin: right,
            wedge_margin: wedge,
            active,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Constraint {
    /// `Re(lambda) >= -cos^2(pi / 2N)`
    Left,
    /// `Re(lambda) <= cos(pi / N)`
    Right,
    /// `Re(lambda) + |Im(lambda)| tan(pi / N) <= 1`
    Wedge,
}

impl std::fmt::Display for Constraint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Constraint::Left => "left",
            Constraint::Right => "right",
            Constraint::Wedge => "wedge",
        })
    }
}

/// Per-constraint margins (positive inside) and the tightest constraint.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegionVerdict<T> {
    pub inside: bool,
    pub left_margin: T,
    pub right_margin: T,
    pub wedge_margin: T,
    pub active: Constraint,
}

pub fn tent_region_contains<T: Real>(lambda: Complex<T>, n: usize) -> Result<RegionVerdict<T>> {
    Ok(RegionTest::new(n)?.contains(lambda))
}
