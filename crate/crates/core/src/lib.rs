//! Mixing rates of piecewise-linear interval maps composed with
//! interval-exchange permutations.
//!
//! A map `f` in `F_m` has slope `+m` or `-m` on each of `m` equal
//! subintervals of `[0, 1]`. Composing it with a permutation `sigma` of the
//! `N >= m` equal cells gives a Markov map whose mixing rate is read off the
//! spectrum of an `N x N` integer matrix. This crate builds those matrices,
//! computes their spectra, searches permutation groups for the slowest
//! mixing composition and checks the results against closed forms.
//!
//! Numerical code is generic over [`Real`] (`f32`, `f64`); matrix
//! construction and combinatorial quantities are exact.
//!
//! ```
//! use permix::{ComposedMap, mixing_rate};
//!
//! let tent = ComposedMap::new("+-".parse()?, "1,2,3".parse()?)?;
//! let rate: f64 = mixing_rate(&tent)?;
//! assert!((rate - 0.5).abs() < 1e-12);
//! # Ok::<(), permix::Error>(())
//! ```

pub mod closed_forms;
pub mod correlation;
pub mod error;
pub mod export;
pub mod map_family;
pub mod matrix;
pub mod perms;
pub mod scalar;
pub mod spectral;
pub mod verify;
pub mod worst_case;

pub use closed_forms::{
    asymptotic_constant, circulant_tau_formula, degeneracy_predicate, sf_worst_rate,
    tent_region_contains, zigzag_worst_rate, CirculantKind, RegionTest, RegionVerdict,
};
pub use correlation::{
    correlation, decay_rate, monte_carlo_correlation, transfer_matrix, DecayFit, McEstimate,
    StepObservable,
};
pub use error::{Error, Result};
pub use map_family::{
    canonical_signatures, symmetry_orbit, ComposedMap, IntervalPermutation, Slope, SlopeSignature,
};
pub use matrix::{
    collapse, doubled_matrix, fine_markov, lift, reduced_markov, structured_matrix, SquareMatrix,
    StructuredKind,
};
pub use scalar::{Coordinate, Real};
pub use spectral::{
    bound_report, connectivity, irreducibility_index, is_topologically_mixing, longest_circuit,
    mixing_rate, row_relation_classes, spectrum, tau, Connectivity, Spectrum,
};
pub use worst_case::{gram_bound, tperm_search, worst_mixing_rate, Mode, SearchResult, Strategy};

/// Exact rational used for map evaluation and the index of irreducibility.
pub type Rational = num_rational::Ratio<i64>;

/// Complex scalar over a [`Real`].
pub type Complex<T> = num_complex::Complex<T>;

/// Integer matrices: Markov, permutation, circulant and block matrices.
pub type IntegerMatrix = SquareMatrix<i64>;

pub type RealMatrix = SquareMatrix<f64>;
pub type RealMatrix32 = SquareMatrix<f32>;
pub type Spectrum64 = Spectrum<f64>;
pub type Spectrum32 = Spectrum<f32>;
pub type StepObservable64 = StepObservable<f64>;
