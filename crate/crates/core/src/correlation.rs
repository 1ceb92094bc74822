//! Correlation functions of step observables.
//!
//! On the fine partition the transfer matrix `P = B / m` is the transition
//! matrix of the Markov chain of cells, so for observables constant on fine
//! cells
//!
//! `C(n) = (1 / Nm) psi^T P^n phi - mean(phi) mean(psi)`
//!
//! holds exactly. Densities evolve under `P^T`.

use std::ops::Range;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::map_family::ComposedMap;
use crate::matrix::{fine_markov, SquareMatrix};
use crate::scalar::Real;
use crate::spectral::{eigenvalues, real_eigenvector};

/// Correlations below this magnitude are treated as zero by [`decay_rate`].
pub const CORRELATION_FLOOR: f64 = 1e-13;

/// Monte Carlo samples per independently seeded stream.
pub const MC_CHUNK: usize = 4096;

/// A function constant on each open cell of the uniform partition into `level` cells.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepObservable<T> {
    pub level: usize,
    pub values: Vec<T>,
}

impl<T: Real> StepObservable<T> {
    pub fn new(values: Vec<T>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::domain("an observable needs at least one cell"));
        }
        Ok(StepObservable { level: values.len(), values })
    }

    pub fn constant(level: usize, c: T) -> Result<Self> {
        Self::new(vec![c; level])
    }

    /// Indicator of the cells `cells` at the given level.
    pub fn indicator(level: usize, cells: Range<usize>) -> Result<Self> {
        if cells.end > level {
            return Err(Error::domain(format!("cells {cells:?} exceed level {level}")));
        }
        Self::new((0..level).map(|i| if cells.contains(&i) { T::one() } else { T::zero() }).collect())
    }

    /// Value at `x`, with half-open cells and `x = 1` in the last cell.
    pub fn at(&self, x: T) -> T {
        let k = (x * T::from_int(self.level as i64)).floor().to_usize().unwrap_or(0);
        self.values[k.min(self.level - 1)]
    }

    /// Lebesgue mean.
    pub fn mean(&self) -> T {
        compensated_sum(self.values.iter().copied()) / T::from_int(self.level as i64)
    }

    /// Re-expresses the observable on a partition `factor` times finer.
    pub fn refine(&self, factor: usize) -> Result<Self> {
        if factor == 0 {
            return Err(Error::domain("refinement factor must be positive"));
        }
        Self::new(self.values.iter().flat_map(|&v| std::iter::repeat_n(v, factor)).collect())
    }

    /// The observable at level `n m`, refining from level `n` if needed.
    pub fn at_level(&self, n: usize, m: usize) -> Result<Self> {
        if self.level == n * m {
            Ok(self.clone())
        } else if self.level == n {
            self.refine(m)
        } else {
            Err(Error::domain(format!(
                "observable has {} cells, expected {n} or {}",
                self.level,
                n * m
            )))
        }
    }
}

/// Neumaier-compensated sum.
fn compensated_sum<T: Real>(values: impl IntoIterator<Item = T>) -> T {
    let (mut sum, mut comp) = (T::zero(), T::zero());
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp = comp + ((sum - t) + v);
        } else {
            comp = comp + ((v - t) + sum);
        }
        sum = t;
    }
    sum + comp
}

/// `B(g, N) / m`.
pub fn transfer_matrix<T: Real>(g: &ComposedMap) -> Result<SquareMatrix<T>> {
    let b = fine_markov(g)?.to_real::<T>();
    Ok(b.scale(T::one() / T::from_int(g.m() as i64)))
}

fn apply<T: Real>(p: &SquareMatrix<T>, v: &[T]) -> Vec<T> {
    p.rows().map(|row| compensated_sum(row.iter().zip(v).map(|(&a, &b)| a * b))).collect()
}

/// Pushes a density forward one step: `P^T rho`.
pub fn transfer_density<T: Real>(p: &SquareMatrix<T>, rho: &[T]) -> Vec<T> {
    let n = p.order();
    (0..n).map(|j| compensated_sum((0..n).map(|i| p[(i, j)] * rho[i]))).collect()
}

/// `C(0), ..., C(n_max)` in one pass of matrix-vector products.
pub fn correlation_sequence<T: Real>(
    g: &ComposedMap,
    phi: &StepObservable<T>,
    psi: &StepObservable<T>,
    n_max: usize,
) -> Result<Vec<T>> {
    let (n, m) = (g.n(), g.m());
    let phi = phi.at_level(n, m)?;
    let psi = psi.at_level(n, m)?;
    let p = transfer_matrix::<T>(g)?;
    let cells = T::from_int((n * m) as i64);
    let centre = phi.mean() * psi.mean();
    let mut v = phi.values.clone();
    let mut out = Vec::with_capacity(n_max + 1);
    for k in 0..=n_max {
        if k > 0 {
            v = apply(&p, &v);
        }
        let pairing = compensated_sum(psi.values.iter().zip(&v).map(|(&a, &b)| a * b)) / cells;
        out.push(pairing - centre);
    }
    Ok(out)
}

/// `C(n) = integral of phi(g^n x) psi(x) dx - integral of phi * integral of psi`.
pub fn correlation<T: Real>(
    g: &ComposedMap,
    phi: &StepObservable<T>,
    psi: &StepObservable<T>,
    n: usize,
) -> Result<T> {
    Ok(*correlation_sequence(g, phi, psi, n)?.last().expect("n + 1 values"))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayFit<T> {
    /// `|C(n + 1)| / |C(n)|` for `n` in `valid_range`.
    pub rates: Vec<T>,
    pub fitted_rate: T,
    /// Steps `n` whose ratio entered the fit.
    pub valid_range: Range<usize>,
}

/// Geometric decay rate of `|C(n)|`.
///
/// Ratios are taken while both correlations stay above [`CORRELATION_FLOOR`];
/// the fitted rate is the median ratio over the latter half of that run, so
/// transients from faster modes and sign alternation do not bias it.
pub fn decay_rate<T: Real>(
    g: &ComposedMap,
    phi: &StepObservable<T>,
    psi: &StepObservable<T>,
    n_max: usize,
) -> Result<DecayFit<T>> {
    if n_max < 4 {
        return Err(Error::precondition(format!("decay fit needs n_max >= 4, got {n_max}")));
    }
    let c = correlation_sequence(g, phi, psi, n_max)?;
    let floor = T::lit(CORRELATION_FLOOR);
    let live = c.iter().take_while(|v| v.abs() > floor).count();
    let rates: Vec<T> = (0..live.saturating_sub(1)).map(|k| c[k + 1].abs() / c[k].abs()).collect();
    if rates.is_empty() {
        return Ok(DecayFit { rates, fitted_rate: T::zero(), valid_range: 0..0 });
    }
    let start = rates.len() / 2;
    let mut tail: Vec<T> = rates[start..].to_vec();
    tail.sort_by(|a, b| a.partial_cmp(b).expect("finite ratios"));
    let mid = tail.len() / 2;
    let fitted_rate = if tail.len() % 2 == 1 {
        tail[mid]
    } else {
        (tail[mid - 1] + tail[mid]) / T::from_int(2)
    };
    Ok(DecayFit { valid_range: start..rates.len(), rates, fitted_rate })
}

/// A real eigenvector of the transfer matrix for a nonleading eigenvalue of
/// largest modulus, as an observable at level `Nm`, with its eigenvalue.
///
/// Fails when every nonleading eigenvalue of largest modulus is complex.
pub fn subleading_eigen_observable<T: Real>(g: &ComposedMap) -> Result<(StepObservable<T>, T)> {
    let p = transfer_matrix::<T>(g)?;
    let b = fine_markov(g)?;
    let m = T::from_int(g.m() as i64);
    let mut ev: Vec<_> = eigenvalues::<T, i64>(&b)?.into_iter().map(|z| z / m).collect();
    crate::spectral::sort_for_export(&mut ev);
    // drop the leading eigenvalue 1
    let lead = ev
        .iter()
        .enumerate()
        .min_by(|a, b| {
            let da = (*a.1 - T::one()).norm();
            let db = (*b.1 - T::one()).norm();
            da.partial_cmp(&db).expect("finite eigenvalues")
        })
        .map(|(k, _)| k)
        .ok_or_else(|| Error::domain("empty spectrum"))?;
    ev.remove(lead);
    let tol = T::lit(1e-9);
    let top = ev.first().map(|z| z.norm()).unwrap_or_else(T::zero);
    let lambda = ev
        .iter()
        .filter(|z| z.norm() >= top - tol && z.im.abs() <= tol)
        .map(|z| z.re)
        .next()
        .ok_or_else(|| Error::domain(format!("the subleading eigenvalues of {g} are not real")))?;
    if lambda.abs() <= tol {
        return Err(Error::domain(format!("{g} has no nonzero nonleading eigenvalue")));
    }
    let v = real_eigenvector(&p, lambda)?;
    Ok((StepObservable::new(v)?, lambda))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub estimate: f64,
    /// Delta-method standard error.
    pub se: f64,
    pub samples: usize,
}

#[derive(Default, Clone, Copy)]
struct Moments {
    joint: f64,
    joint_sq: f64,
    phi: f64,
    psi: f64,
    phi_sq: f64,
    psi_sq: f64,
    phi_psi: f64,
}

impl Moments {
    fn merge(self, o: Self) -> Self {
        Moments {
            joint: self.joint + o.joint,
            joint_sq: self.joint_sq + o.joint_sq,
            phi: self.phi + o.phi,
            psi: self.psi + o.psi,
            phi_sq: self.phi_sq + o.phi_sq,
            psi_sq: self.psi_sq + o.psi_sq,
            phi_psi: self.phi_psi + o.phi_psi,
        }
    }
}

/// Monte Carlo estimate of `C(n)`.
///
/// Draws `x` uniformly and averages `phi(g^n x) psi(x)`; the product of the
/// means is estimated from a second, independent uniform draw per sample.
/// Samples are split into chunks of [`MC_CHUNK`]; chunk `k` uses a ChaCha8
/// generator seeded from `seed` on stream `k`, and chunk sums are reduced in
/// chunk order, so the estimate does not depend on the worker count.
pub fn monte_carlo_correlation(
    g: &ComposedMap,
    phi: &StepObservable<f64>,
    psi: &StepObservable<f64>,
    n: usize,
    samples: usize,
    seed: u64,
) -> Result<McEstimate> {
    if samples == 0 {
        return Err(Error::precondition("Monte Carlo needs at least one sample"));
    }
    let chunks = samples.div_ceil(MC_CHUNK);
    let partial: Vec<Result<Moments>> = (0..chunks)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k as u64);
            let count = MC_CHUNK.min(samples - k * MC_CHUNK);
            let mut acc = Moments::default();
            for _ in 0..count {
                let x: f64 = rng.random();
                let mut y = x;
                for _ in 0..n {
                    y = g.eval(&y)?.clamp(0.0, 1.0);
                }
                let a = phi.at(y) * psi.at(x);
                let z: f64 = rng.random();
                let (u, v) = (phi.at(z), psi.at(z));
                acc = acc.merge(Moments {
                    joint: a,
                    joint_sq: a * a,
                    phi: u,
                    psi: v,
                    phi_sq: u * u,
                    psi_sq: v * v,
                    phi_psi: u * v,
                });
            }
            Ok(acc)
        })
        .collect();
    let mut total = Moments::default();
    for p in partial {
        total = total.merge(p?);
    }
    let s = samples as f64;
    let mean = |x: f64| x / s;
    let (ej, eu, ev) = (mean(total.joint), mean(total.phi), mean(total.psi));
    let var = |sq: f64, m: f64| (mean(sq) - m * m).max(0.0);
    let (vj, vu, vv) = (var(total.joint_sq, ej), var(total.phi_sq, eu), var(total.psi_sq, ev));
    let cuv = mean(total.phi_psi) - eu * ev;
    // gradient of (j, u, v) -> j - u v is (1, -v, -u); j is independent of (u, v)
    let var_est = vj + ev * ev * vu + eu * eu * vv + 2.0 * eu * ev * cuv;
    Ok(McEstimate {
        estimate: ej - eu * ev,
        se: (var_est.max(0.0) / s).sqrt(),
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::map_family::SlopeSignature;

    fn map(sig: &str, perm: Option<&str>, n: usize) -> ComposedMap {
        let s: SlopeSignature = sig.parse().unwrap();
        match perm {
            Some(p) => ComposedMap::new(s, p.parse().unwrap()).unwrap(),
            None => ComposedMap::unpermuted(s, n).unwrap(),
        }
    }

    #[test]
    fn transfer_matrix_is_doubly_stochastic_and_fixes_constants() {
        let g = map("+-", None, 3);
        let p = transfer_matrix::<f64>(&g).unwrap();
        for i in 0..6 {
            let r: f64 = p.row(i).iter().sum();
            let c: f64 = (0..6).map(|k| p[(k, i)]).sum();
            assert!((r - 1.0).abs() < 1e-15 && (c - 1.0).abs() < 1e-15);
        }
        assert_eq!(transfer_density(&p, &[1.0; 6]), vec![1.0; 6]);
        let b = fine_markov(&g).unwrap();
        for i in 0..6 {
            for j in 0..6 {
                assert_eq!(p[(i, j)], b[(i, j)] as f64 / 2.0);
            }
        }
    }

    #[test]
    fn constants_do_not_correlate() {
        let g = map("+-+", Some("2,3,1"), 3);
        let one = StepObservable::<f64>::constant(3, 1.0).unwrap();
        for n in 0..6 {
            assert!(correlation(&g, &one, &one, n).unwrap().abs() < 1e-15);
        }
        let fit = decay_rate(&g, &one, &one, 10).unwrap();
        assert_eq!(fit.fitted_rate, 0.0);
        assert!(fit.valid_range.is_empty());
    }

    #[test]
    fn doubling_map_bits_are_independent() {
        let g = map("++", None, 2);
        let half = StepObservable::<f64>::indicator(2, 0..1).unwrap();
        assert!((correlation(&g, &half, &half, 0).unwrap() - 0.25).abs() < 1e-15);
        for n in 1..8 {
            assert!(correlation(&g, &half, &half, n).unwrap().abs() < 1e-15);
        }
        // every nonleading eigenvalue of the transfer matrix vanishes here,
        // so no observable decays at a positive rate
        let fit = decay_rate(&g, &half, &half, 10).unwrap();
        assert_eq!(fit.fitted_rate, 0.0);
    }

    #[test]
    fn tent_on_three_cells_decays_at_one_half() {
        let g = map("+-", None, 3);
        let (phi, lambda) = subleading_eigen_observable::<f64>(&g).unwrap();
        assert!((lambda.abs() - 0.5).abs() < 1e-9);
        let c = correlation_sequence(&g, &phi, &phi, 12).unwrap();
        for k in 0..12 {
            assert!((c[k + 1] / c[k] - lambda).abs() < 1e-9);
        }
        let fit = decay_rate(&g, &phi, &phi, 30).unwrap();
        assert!((fit.fitted_rate - 0.5).abs() < 1e-9);
    }

    #[test]
    fn refinement_is_consistent() {
        let g = map("+-+", Some("3,1,2"), 3);
        let phi = StepObservable::<f64>::new(vec![0.3, -1.0, 2.0]).unwrap();
        let psi = StepObservable::new(vec![1.0, 0.5, -0.25]).unwrap();
        for n in 0..6 {
            let coarse = correlation(&g, &phi, &psi, n).unwrap();
            let fine = correlation(&g, &phi.refine(3).unwrap(), &psi.refine(3).unwrap(), n).unwrap();
            assert!((coarse - fine).abs() < 1e-12);
        }
        let bad = StepObservable::new(vec![1.0; 4]).unwrap();
        assert!(correlation(&g, &bad, &psi, 1).is_err());
    }

    #[test]
    fn decay_needs_four_steps() {
        let g = map("+-", None, 3);
        let one = StepObservable::constant(3, 1.0).unwrap();
        assert!(matches!(decay_rate(&g, &one, &one, 3), Err(Error::Precondition(_))));
    }

    #[test]
    fn monte_carlo_agrees_with_exact_on_tent() {
        let g = map("+-", None, 3);
        let phi = StepObservable::new(vec![1.0, 0.0, -1.0]).unwrap();
        let psi = StepObservable::new(vec![0.5, 2.0, 0.0]).unwrap();
        for n in 0..=5 {
            let exact = correlation(&g, &phi, &psi, n).unwrap();
            let mc = monte_carlo_correlation(&g, &phi, &psi, n, 100_000, 7).unwrap();
            assert!((mc.estimate - exact).abs() <= 4.0 * mc.se, "n={n}: {exact} vs {mc:?}");
        }
    }

    #[test]
    fn monte_carlo_is_reproducible_and_centred() {
        let g = map("+-+", Some("2,1,3"), 3);
        let one = StepObservable::constant(3, 1.0).unwrap();
        let mc = monte_carlo_correlation(&g, &one, &one, 3, 10_000, 1).unwrap();
        assert!(mc.estimate.abs() < 1e-12 && mc.se < 1e-12);

        let phi = StepObservable::new(vec![1.0, -2.0, 0.5]).unwrap();
        let a = monte_carlo_correlation(&g, &phi, &phi, 2, 20_000, 99).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| monte_carlo_correlation(&g, &phi, &phi, 2, 20_000, 99)).unwrap();
        assert_eq!(a.estimate.to_bits(), b.estimate.to_bits());
        assert_eq!(a.se.to_bits(), b.se.to_bits());
    }
}
