//! Maximising the subleading modulus over permutation compositions.
//!
//! `tperm(M) = max_sigma tau(M P(sigma))`. The worst mixing rate of `f` on
//! `N` cells is `max(1, tperm(A(f, N))) / m`; restricting to the
//! permutations that keep `sigma o f` topologically mixing gives the
//! mixing-only variant.
//!
//! Exhaustive searches split the lexicographic rank range into fixed chunks
//! evaluated in parallel. Values are gathered in rank order and the argmax is
//! picked afterwards, so the result does not depend on the worker count.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::map_family::{ComposedMap, IntervalPermutation, SlopeSignature};
use crate::matrix::{fine_markov, reduced_markov};
use crate::perms;
use crate::scalar::Real;
use crate::spectral::{connectivity, tau};
use crate::IntegerMatrix;

pub const MAX_EXHAUSTIVE_N: usize = 9;

/// Values within this distance of the maximum count as ties; the
/// lexicographically smallest tied permutation is reported.
pub const TIE_TOLERANCE: f64 = 1e-12;

const CHUNK: usize = 2048;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Strategy {
    Exhaustive,
    /// The identity plus `samples` permutations drawn by seeded Fisher-Yates
    /// shuffles (ChaCha8 stream seeded from `seed`).
    Sampled { samples: usize, seed: u64 },
    /// Valid for symmetric matrices only, where `tperm(M) = tau(M)`.
    SymmetricShortcut,
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Strategy::Exhaustive => f.write_str("exhaustive"),
            Strategy::Sampled { samples, seed } => write!(f, "sampled({samples},{seed})"),
            Strategy::SymmetricShortcut => f.write_str("symmetric_shortcut"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    All,
    MixingOnly,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::All => "all",
            Mode::MixingOnly => "mixing_only",
        })
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all" => Ok(Mode::All),
            "mixing_only" | "mixing-only" | "mixing" => Ok(Mode::MixingOnly),
            other => Err(Error::Parse(format!("unknown mode {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchResult<T> {
    pub value: T,
    pub argmax: IntervalPermutation,
    pub strategy: Strategy,
    /// Permutations examined.
    pub evaluated: usize,
    /// Permutations that passed the feasibility filter (all of them unless `mixing_only`).
    pub feasible: usize,
    pub mixing_only: bool,
}

impl Serialize for IntervalPermutation {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

/// A candidate permutation (zero-based images) and its value; `None` when infeasible.
type Scored<T> = (Vec<usize>, Option<T>);

/// Where the candidate permutations come from.
enum Candidates {
    Exhaustive(usize),
    Listed(Vec<Vec<usize>>),
}

impl Candidates {
    fn for_strategy(n: usize, strategy: Strategy) -> Result<Self> {
        match strategy {
            Strategy::Exhaustive => {
                if n > MAX_EXHAUSTIVE_N {
                    return Err(Error::capacity("exhaustive search N", MAX_EXHAUSTIVE_N, n));
                }
                Ok(Candidates::Exhaustive(n))
            }
            Strategy::Sampled { samples, seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let mut list = Vec::with_capacity(samples + 1);
                list.push((0..n).collect::<Vec<_>>());
                for _ in 0..samples {
                    let mut p: Vec<usize> = (0..n).collect();
                    p.shuffle(&mut rng);
                    list.push(p);
                }
                Ok(Candidates::Listed(list))
            }
            Strategy::SymmetricShortcut => Ok(Candidates::Listed(vec![(0..n).collect()])),
        }
    }

    fn len(&self) -> usize {
        match self {
            Candidates::Exhaustive(n) => perms::factorial(*n),
            Candidates::Listed(l) => l.len(),
        }
    }

    /// Evaluates every candidate in parallel; `None` marks an infeasible one.
    fn evaluate<T, F>(&self, eval: F) -> Result<Vec<Scored<T>>>
    where
        T: Real,
        F: Fn(&[usize]) -> Result<Option<T>> + Sync,
    {
        match self {
            Candidates::Exhaustive(n) => {
                let total = perms::factorial(*n);
                let chunks: Vec<Result<Vec<Scored<T>>>> = (0..total.div_ceil(CHUNK))
                    .into_par_iter()
                    .map(|c| {
                        let (start, end) = (c * CHUNK, ((c + 1) * CHUNK).min(total));
                        let mut out = Vec::with_capacity(end - start);
                        let mut err = None;
                        perms::for_each_in_range(*n, start, end, |_, p| {
                            if err.is_some() {
                                return;
                            }
                            match eval(p) {
                                Ok(v) => out.push((p.to_vec(), v)),
                                Err(e) => err = Some(e),
                            }
                        });
                        err.map_or(Ok(out), Err)
                    })
                    .collect();
                let mut all = Vec::with_capacity(total);
                for c in chunks {
                    all.extend(c?);
                }
                Ok(all)
            }
            Candidates::Listed(list) => list
                .par_iter()
                .map(|p| eval(p).map(|v| (p.clone(), v)))
                .collect(),
        }
    }
}

/// Maximum value and the lexicographically smallest permutation within
/// [`TIE_TOLERANCE`] of it.
fn select<T: Real>(values: Vec<Scored<T>>) -> Option<(T, Vec<usize>, usize)> {
    let feasible = values.iter().filter(|(_, v)| v.is_some()).count();
    let best = values
        .iter()
        .filter_map(|(_, v)| *v)
        .fold(None, |acc: Option<T>, v| Some(acc.map_or(v, |a| a.max(v))))?;
    let tol = T::lit(TIE_TOLERANCE) * best.abs().max(T::one());
    let argmax = values
        .into_iter()
        .filter(|(_, v)| v.is_some_and(|v| v >= best - tol))
        .map(|(p, _)| p)
        .min()
        .expect("the maximum is attained");
    Some((best, argmax, feasible))
}

/// `tperm(M) = max_sigma tau(M P(sigma))`.
pub fn tperm_search<T: Real>(m: &IntegerMatrix, strategy: Strategy) -> Result<SearchResult<T>> {
    if m.line_sum().is_none() {
        return Err(Error::domain("tperm needs constant row and column sums"));
    }
    let n = m.order();
    if strategy == Strategy::SymmetricShortcut && !m.is_symmetric() {
        return Err(Error::precondition("the symmetric shortcut needs a symmetric matrix"));
    }
    let candidates = Candidates::for_strategy(n, strategy)?;
    let evaluated = candidates.len();
    let values = candidates.evaluate(|p| tau::<T, i64>(&m.permute_columns(p)).map(Some))?;
    let (value, argmax, feasible) = select(values).expect("at least the identity is evaluated");
    Ok(SearchResult {
        value,
        argmax: IntervalPermutation::from_zero_based(argmax)?,
        strategy,
        evaluated,
        feasible,
        mixing_only: false,
    })
}

/// Column images of `Q(sigma)` for the fine partition with blocks of size `m`.
fn block_images(p: &[usize], m: usize) -> Vec<usize> {
    (0..p.len() * m).map(|j| p[j / m] * m + j % m).collect()
}

/// Worst mixing rate of `f` over compositions with permutations of `n` cells.
///
/// `Mode::All` returns `max(1, tperm(A(f, n))) / m`. `Mode::MixingOnly`
/// maximises `max(1, tau(A(f, n) P(sigma))) / m` over the permutations for
/// which `B(f, n) Q(sigma)` is primitive.
pub fn worst_mixing_rate<T: Real>(
    f: &SlopeSignature,
    n: usize,
    mode: Mode,
    strategy: Strategy,
) -> Result<SearchResult<T>> {
    let base = ComposedMap::unpermuted(f.clone(), n)?;
    let a = reduced_markov(&base)?;
    let m = f.m();
    // |lambda| <= m for every eigenvalue, so rounding above m is clipped
    let scale = |t: T| t.max(T::one()).min(T::from_int(m as i64)) / T::from_int(m as i64);
    match mode {
        Mode::All => {
            let mut r = tperm_search::<T>(&a, strategy)?;
            r.value = scale(r.value);
            Ok(r)
        }
        Mode::MixingOnly => {
            if strategy == Strategy::SymmetricShortcut {
                return Err(Error::precondition(
                    "the symmetric shortcut does not apply to the mixing-only search",
                ));
            }
            let b = fine_markov(&base)?;
            let candidates = Candidates::for_strategy(n, strategy)?;
            let evaluated = candidates.len();
            let values = candidates.evaluate(|p| {
                if !connectivity(&b.permute_columns(&block_images(p, m))).primitive {
                    return Ok(None);
                }
                tau::<T, i64>(&a.permute_columns(p)).map(Some)
            })?;
            let (value, argmax, feasible) = select(values).ok_or_else(|| {
                Error::domain(format!("no permutation of {n} cells makes {f} topologically mixing"))
            })?;
            Ok(SearchResult {
                value: scale(value),
                argmax: IntervalPermutation::from_zero_based(argmax)?,
                strategy,
                evaluated,
                feasible,
                mixing_only: true,
            })
        }
    }
}

/// `sqrt(tau(A^T A))`, an upper bound for `tperm(A)`.
pub fn gram_bound<T: Real>(a: &IntegerMatrix) -> Result<T> {
    if a.line_sum().is_none() {
        return Err(Error::domain("the Gram bound needs constant row and column sums"));
    }
    let gram = a.transpose().matmul(a)?;
    Ok(tau::<T, i64>(&gram)?.max(T::zero()).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::circulant;

    fn tent3() -> IntegerMatrix {
        IntegerMatrix::from_rows(&[vec![1, 1, 0], vec![0, 0, 2], vec![1, 1, 0]]).unwrap()
    }

    #[test]
    fn tent_tperm_is_two_at_the_swap() {
        let r: SearchResult<f64> = tperm_search(&tent3(), Strategy::Exhaustive).unwrap();
        assert!((r.value - 2.0).abs() < 1e-12);
        assert_eq!(r.argmax.to_string(), "1,3,2");
        assert_eq!(r.evaluated, 6);
    }

    #[test]
    fn symmetric_shortcut() {
        let r: SearchResult<f64> = tperm_search(&circulant(2, 3).unwrap(), Strategy::SymmetricShortcut).unwrap();
        assert!((r.value - 1.0).abs() < 1e-12);
        assert!(r.argmax.is_identity());
        assert!(matches!(
            tperm_search::<f64>(&tent3(), Strategy::SymmetricShortcut),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn zero_samples_evaluates_identity_only() {
        let r: SearchResult<f64> =
            tperm_search(&tent3(), Strategy::Sampled { samples: 0, seed: 9 }).unwrap();
        assert!((r.value - 1.0).abs() < 1e-12);
        assert!(r.argmax.is_identity());
        assert_eq!(r.evaluated, 1);
    }

    #[test]
    fn sampling_is_reproducible() {
        let a = reduced_markov(&ComposedMap::unpermuted("+-+".parse().unwrap(), 7).unwrap()).unwrap();
        let s = Strategy::Sampled { samples: 200, seed: 42 };
        let r1: SearchResult<f64> = tperm_search(&a, s).unwrap();
        let r2: SearchResult<f64> = tperm_search(&a, s).unwrap();
        assert_eq!(r1, r2);
        let exact: SearchResult<f64> = tperm_search(&a, Strategy::Exhaustive).unwrap();
        assert!(r1.value <= exact.value + 1e-12);
    }

    #[test]
    fn exhaustive_capacity() {
        let a = IntegerMatrix::identity(10).unwrap();
        assert!(matches!(
            tperm_search::<f64>(&a, Strategy::Exhaustive),
            Err(Error::Capacity { .. })
        ));
    }

    #[test]
    fn worst_rates_match_closed_forms() {
        let pi = std::f64::consts::PI;
        let zz: SearchResult<f64> =
            worst_mixing_rate(&"+-+".parse().unwrap(), 5, Mode::All, Strategy::Exhaustive).unwrap();
        let expected = (3.0 * pi / 10.0).sin() / (3.0 * (pi / 10.0).sin());
        assert!((zz.value - expected).abs() < 1e-9);
        assert!((zz.value - 0.8726780).abs() < 1e-7);

        let sf: SearchResult<f64> =
            worst_mixing_rate(&"++".parse().unwrap(), 3, Mode::All, Strategy::Exhaustive).unwrap();
        assert!((sf.value - 0.5).abs() < 1e-9);

        let tent: SearchResult<f64> =
            worst_mixing_rate(&"+-".parse().unwrap(), 5, Mode::MixingOnly, Strategy::Exhaustive).unwrap();
        assert!((tent.value - (pi / 5.0).cos()).abs() < 1e-9);
        assert!(tent.mixing_only);
        assert!(tent.feasible < tent.evaluated);
    }

    #[test]
    fn every_composition_on_m_cells_mixes() {
        // N = m: each cell covers the whole interval, so every composition is
        // topologically mixing and A is the all-ones matrix
        for f in ["+-", "++", "+-+", "-++"] {
            let f: SlopeSignature = f.parse().unwrap();
            let r = worst_mixing_rate::<f64>(&f, f.m(), Mode::MixingOnly, Strategy::Exhaustive).unwrap();
            assert_eq!(r.feasible, r.evaluated);
            assert!((r.value - 1.0 / f.m() as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn selection_ties_and_infeasibility() {
        assert_eq!(select::<f64>(vec![(vec![0, 1], None), (vec![1, 0], None)]), None);
        let picked = select(vec![(vec![1, 0], Some(2.0)), (vec![0, 1], Some(2.0 - 1e-14)), (vec![2, 0], None)]);
        assert_eq!(picked, Some((2.0, vec![0, 1], 2)));
    }

    #[test]
    fn gram_bound_of_tent_matrix() {
        let g: f64 = gram_bound(&tent3()).unwrap();
        assert!((g - 2.0).abs() < 1e-9);
        let c: f64 = gram_bound(&circulant(2, 3).unwrap()).unwrap();
        assert!((c - 1.0).abs() < 1e-9);
    }

    #[test]
    fn parallel_result_matches_single_worker() {
        let a = reduced_markov(&ComposedMap::unpermuted("+-+-".parse().unwrap(), 7).unwrap()).unwrap();
        let many: SearchResult<f64> = tperm_search(&a, Strategy::Exhaustive).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let one: SearchResult<f64> = pool.install(|| tperm_search(&a, Strategy::Exhaustive)).unwrap();
        assert_eq!(many.value.to_bits(), one.value.to_bits());
        assert_eq!(many.argmax, one.argmax);
    }
}
