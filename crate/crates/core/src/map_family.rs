//! The map family `F_m`, interval exchanges and their compositions.
//!
//! A map in `F_m` is determined by a sign vector `(e_1, ..., e_m)`: on the
//! `j`-th of `m` equal subintervals it is affine with slope `m * e_j` and
//! maps the subinterval onto `[0, 1]`. An interval exchange permutes the `N`
//! equal cells of the unit interval by translation.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::scalar::Coordinate;

/// Orientation of one branch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Slope {
    Up,
    Down,
}

impl Slope {
    pub fn flip(self) -> Self {
        match self {
            Slope::Up => Slope::Down,
            Slope::Down => Slope::Up,
        }
    }

    pub fn sign(self) -> i64 {
        match self {
            Slope::Up => 1,
            Slope::Down => -1,
        }
    }

    fn symbol(self) -> char {
        match self {
            Slope::Up => '+',
            Slope::Down => '-',
        }
    }
}

/// The sign vector defining `f` in `F_m`. Always has `m >= 2` entries.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SlopeSignature {
    slopes: Vec<Slope>,
}

/// The stretch-and-fold, zigzag and inverted zigzag members of `F_m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonicalSignatures {
    pub sf: SlopeSignature,
    pub zigzag: SlopeSignature,
    pub inverted_zigzag: SlopeSignature,
}

impl SlopeSignature {
    pub fn new(slopes: Vec<Slope>) -> Result<Self> {
        if slopes.len() < 2 {
            return Err(Error::domain(format!(
                "a signature needs at least 2 branches, got {}",
                slopes.len()
            )));
        }
        Ok(Self { slopes })
    }

    /// Builds a signature from `+1` / `-1` entries.
    pub fn from_signs(signs: &[i64]) -> Result<Self> {
        let slopes = signs
            .iter()
            .map(|&s| match s {
                1 => Ok(Slope::Up),
                -1 => Ok(Slope::Down),
                other => Err(Error::domain(format!("slope sign must be +1 or -1, got {other}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(slopes)
    }

    pub fn stretch_and_fold(m: usize) -> Result<Self> {
        Self::new(vec![Slope::Up; m])
    }

    pub fn zigzag(m: usize) -> Result<Self> {
        Self::new(
            (0..m)
                .map(|j| if j % 2 == 0 { Slope::Up } else { Slope::Down })
                .collect(),
        )
    }

    pub fn inverted_zigzag(m: usize) -> Result<Self> {
        Ok(Self::zigzag(m)?.negated())
    }

    /// Number of branches `m`.
    pub fn m(&self) -> usize {
        self.slopes.len()
    }

    pub fn slopes(&self) -> &[Slope] {
        &self.slopes
    }

    pub fn reversed(&self) -> Self {
        Self {
            slopes: self.slopes.iter().rev().copied().collect(),
        }
    }

    pub fn negated(&self) -> Self {
        Self {
            slopes: self.slopes.iter().map(|s| s.flip()).collect(),
        }
    }

    pub fn is_zigzag(&self) -> bool {
        self.slopes
            .iter()
            .enumerate()
            .all(|(j, &s)| s == if j % 2 == 0 { Slope::Up } else { Slope::Down })
    }

    pub fn is_inverted_zigzag(&self) -> bool {
        self.negated().is_zigzag()
    }

    /// Evaluates `f` alone. Cells are half-open, `j <= m x < j + 1`, and `x = 1`
    /// uses the last branch.
    pub fn eval<T: Coordinate>(&self, x: &T) -> Result<T> {
        check_unit(x)?;
        let m = self.m();
        let mx = T::from_usize(m) * x.clone();
        let j = mx.floor_index().min(m - 1);
        let y = match self.slopes[j] {
            Slope::Up => mx - T::from_usize(j),
            Slope::Down => T::from_usize(j + 1) - mx,
        };
        Ok(y)
    }
}

impl fmt::Display for SlopeSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.slopes {
            write!(f, "{}", s.symbol())?;
        }
        Ok(())
    }
}

impl FromStr for SlopeSignature {
    type Err = Error;

    /// Parses a string over `{+, -}` such as `"+-+"`.
    fn from_str(s: &str) -> Result<Self> {
        let slopes = s
            .trim()
            .chars()
            .map(|c| match c {
                '+' => Ok(Slope::Up),
                '-' => Ok(Slope::Down),
                other => Err(Error::Parse(format!("unexpected character {other:?} in signature"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(slopes)
    }
}

pub fn canonical_signatures(m: usize) -> Result<CanonicalSignatures> {
    Ok(CanonicalSignatures {
        sf: SlopeSignature::stretch_and_fold(m)?,
        zigzag: SlopeSignature::zigzag(m)?,
        inverted_zigzag: SlopeSignature::inverted_zigzag(m)?,
    })
}

/// `{s, reverse(s), negate(s), negate(reverse(s))}` without duplicates, in that order.
pub fn symmetry_orbit(s: &SlopeSignature) -> Vec<SlopeSignature> {
    let candidates = [s.clone(), s.reversed(), s.negated(), s.reversed().negated()];
    let mut orbit: Vec<SlopeSignature> = Vec::with_capacity(4);
    for c in candidates {
        if !orbit.contains(&c) {
            orbit.push(c);
        }
    }
    orbit
}

/// All `2^m` members of `F_m`, ordered by the binary expansion of their index
/// (bit `j` set means branch `j` slopes down).
pub fn all_signatures(m: usize) -> Result<Vec<SlopeSignature>> {
    if !(2..=20).contains(&m) {
        return Err(Error::domain(format!("branch count must lie in 2..=20, got {m}")));
    }
    (0..1usize << m)
        .map(|bits| {
            SlopeSignature::new(
                (0..m)
                    .map(|j| if bits >> j & 1 == 1 { Slope::Down } else { Slope::Up })
                    .collect(),
            )
        })
        .collect()
}

/// One representative per symmetry orbit: the smallest member in `Ord` order.
pub fn orbit_representatives(m: usize) -> Result<Vec<SlopeSignature>> {
    let mut reps: Vec<SlopeSignature> = all_signatures(m)?
        .iter()
        .map(|s| symmetry_orbit(s).into_iter().min().expect("orbit is non-empty"))
        .collect();
    reps.sort();
    reps.dedup();
    Ok(reps)
}

/// A permutation of the `N` cells of the uniform partition.
///
/// Stored zero-based; the text form and [`IntervalPermutation::one_based`] are one-based.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntervalPermutation {
    images: Vec<usize>,
}

impl IntervalPermutation {
    pub fn identity(n: usize) -> Self {
        Self {
            images: (0..n).collect(),
        }
    }

    pub fn from_zero_based(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        if n == 0 {
            return Err(Error::domain("a permutation needs at least one cell"));
        }
        let mut seen = vec![false; n];
        for &v in &images {
            if v >= n || seen[v] {
                return Err(Error::domain(format!(
                    "images {:?} do not form a permutation of 1..={n}",
                    images.iter().map(|v| v + 1).collect::<Vec<_>>()
                )));
            }
            seen[v] = true;
        }
        Ok(Self { images })
    }

    pub fn from_one_based(images: &[usize]) -> Result<Self> {
        if images.contains(&0) {
            return Err(Error::domain("one-based images must be at least 1"));
        }
        Self::from_zero_based(images.iter().map(|v| v - 1).collect())
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    /// Image of cell `i` (zero-based).
    pub fn apply(&self, i: usize) -> usize {
        self.images[i]
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn one_based(&self) -> Vec<usize> {
        self.images.iter().map(|v| v + 1).collect()
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.len()];
        for (i, &v) in self.images.iter().enumerate() {
            inv[v] = i;
        }
        Self { images: inv }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &v)| i == v)
    }

    /// Evaluates the interval exchange with half-open cells; `x = 1` uses the last cell.
    pub fn eval<T: Coordinate>(&self, x: &T) -> Result<T> {
        check_unit(x)?;
        let n = self.len();
        let cell = (T::from_usize(n) * x.clone()).floor_index().min(n - 1);
        let shifted = x.clone() + T::from_usize(self.images[cell]) / T::from_usize(n);
        Ok(shifted - T::from_usize(cell) / T::from_usize(n))
    }
}

impl fmt::Display for IntervalPermutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in self.images.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}", v + 1)?;
        }
        Ok(())
    }
}

impl FromStr for IntervalPermutation {
    type Err = Error;

    /// Parses comma-separated one-based images such as `"2,3,1"`.
    fn from_str(s: &str) -> Result<Self> {
        let images = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<usize>()
                    .map_err(|e| Error::Parse(format!("bad permutation entry {t:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_one_based(&images)
    }
}

/// The map `g = sigma o f`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ComposedMap {
    signature: SlopeSignature,
    perm: IntervalPermutation,
}

impl ComposedMap {
    pub fn new(signature: SlopeSignature, perm: IntervalPermutation) -> Result<Self> {
        if perm.len() < signature.m() {
            return Err(Error::domain(format!(
                "need N >= m, got N = {} and m = {}",
                perm.len(),
                signature.m()
            )));
        }
        Ok(Self { signature, perm })
    }

    /// `f` composed with the identity on `n` cells.
    pub fn unpermuted(signature: SlopeSignature, n: usize) -> Result<Self> {
        Self::new(signature, IntervalPermutation::identity(n))
    }

    pub fn signature(&self) -> &SlopeSignature {
        &self.signature
    }

    pub fn perm(&self) -> &IntervalPermutation {
        &self.perm
    }

    pub fn m(&self) -> usize {
        self.signature.m()
    }

    /// Number of coarse cells `N`.
    pub fn n(&self) -> usize {
        self.perm.len()
    }

    pub fn with_perm(&self, perm: IntervalPermutation) -> Result<Self> {
        Self::new(self.signature.clone(), perm)
    }

    pub fn eval<T: Coordinate>(&self, x: &T) -> Result<T> {
        let y = self.signature.eval(x)?;
        self.perm.eval(&y)
    }

    /// Iterates the map `n` times.
    pub fn iterate<T: Coordinate>(&self, x: &T, n: usize) -> Result<T> {
        let mut y = x.clone();
        for _ in 0..n {
            y = self.eval(&y)?;
        }
        Ok(y)
    }
}

impl fmt::Display for ComposedMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "sigma=({}) o f[{}] on N={}", self.perm, self.signature, self.n())
    }
}

fn check_unit<T: Coordinate>(x: &T) -> Result<()> {
    if *x < T::zero() || *x > T::one() {
        return Err(Error::domain(format!("point {x:?} lies outside [0, 1]")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    fn r(a: i64, b: i64) -> Rational {
        Rational::new(a, b)
    }

    fn sig(s: &str) -> SlopeSignature {
        s.parse().unwrap()
    }

    #[test]
    fn tent_is_symmetric_about_one_half() {
        let g = ComposedMap::unpermuted(sig("+-"), 2).unwrap();
        assert_eq!(g.eval(&r(3, 4)).unwrap(), r(1, 2));
        assert_eq!(g.eval(&r(1, 4)).unwrap(), r(1, 2));
    }

    #[test]
    fn zigzag_midpoint() {
        let g = ComposedMap::unpermuted(sig("+-+"), 3).unwrap();
        assert_eq!(g.eval(&r(1, 2)).unwrap(), r(1, 2));
    }

    #[test]
    fn exchange_uses_half_open_cells() {
        // f_sf(1/4) = 1/2 sits at the left end of cell 2, which the swap sends to cell 1.
        let g = ComposedMap::new(sig("++"), "2,1".parse().unwrap()).unwrap();
        assert_eq!(g.eval(&r(1, 4)).unwrap(), r(0, 1));
        // just left of the boundary the point is still in cell 1
        assert_eq!(g.eval(&r(1, 5)).unwrap(), r(2, 5) + r(1, 2));
    }

    #[test]
    fn right_endpoint_uses_last_branch() {
        let tent = ComposedMap::unpermuted(sig("+-"), 2).unwrap();
        assert_eq!(tent.eval(&r(1, 1)).unwrap(), r(0, 1));
        let sf = ComposedMap::unpermuted(sig("++"), 2).unwrap();
        assert_eq!(sf.eval(&r(1, 1)).unwrap(), r(1, 1));
    }

    #[test]
    fn outside_unit_interval_is_rejected() {
        let g = ComposedMap::unpermuted(sig("++"), 2).unwrap();
        assert!(matches!(g.eval(&r(5, 4)), Err(Error::Domain(_))));
        assert!(matches!(g.eval(&r(-1, 4)), Err(Error::Domain(_))));
    }

    #[test]
    fn canonical_triples() {
        let c2 = canonical_signatures(2).unwrap();
        assert_eq!(c2.sf.to_string(), "++");
        assert_eq!(c2.zigzag.to_string(), "+-");
        assert_eq!(c2.inverted_zigzag.to_string(), "-+");
        assert_eq!(canonical_signatures(3).unwrap().zigzag.to_string(), "+-+");
        assert_eq!(canonical_signatures(4).unwrap().zigzag.to_string(), "+-+-");
        assert!(matches!(canonical_signatures(1), Err(Error::Domain(_))));
    }

    #[test]
    fn orbits() {
        let names = |s: &str| {
            symmetry_orbit(&sig(s))
                .iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
        };
        assert_eq!(names("+-"), ["+-", "-+"]);
        assert_eq!(names("+++"), ["+++", "---"]);
        assert_eq!(names("++-"), ["++-", "-++", "--+", "+--"]);
    }

    #[test]
    fn orbit_counts_match_family_sizes() {
        // Burnside over {id, reverse, negate, both}: (2^m + palindromes + antipalindromes) / 4
        let counts: Vec<usize> = (2..=5)
            .map(|m| orbit_representatives(m).unwrap().len())
            .collect();
        assert_eq!(counts, [2, 3, 6, 10]);
    }

    #[test]
    fn parsing_rejects_garbage() {
        assert!(matches!("+x".parse::<SlopeSignature>(), Err(Error::Parse(_))));
        assert!(matches!("+".parse::<SlopeSignature>(), Err(Error::Domain(_))));
        assert!(matches!("1,1,2".parse::<IntervalPermutation>(), Err(Error::Domain(_))));
        assert!(matches!("1,a".parse::<IntervalPermutation>(), Err(Error::Parse(_))));
        assert!(matches!("0,1".parse::<IntervalPermutation>(), Err(Error::Domain(_))));
        let p: IntervalPermutation = "2,3,1".parse().unwrap();
        assert_eq!(p.to_string(), "2,3,1");
        assert_eq!(p.inverse().to_string(), "3,1,2");
    }

    #[test]
    fn composition_requires_enough_cells() {
        assert!(ComposedMap::unpermuted(sig("+-+"), 2).is_err());
    }
}
