//! Turning flag values into library objects.

use permix::map_family::{all_signatures, orbit_representatives};
use permix::{
    doubled_matrix, fine_markov, reduced_markov, structured_matrix, ComposedMap, Error, IntegerMatrix, IntervalPermutation, Mode,
    Result, SlopeSignature, StepObservable, Strategy, StructuredKind,
};

use crate::{MapArgs, MatrixKind, SearchArgs};

/// Largest N for which the default strategy is exhaustive.
pub const DEFAULT_EXHAUSTIVE_N: usize = 7;

/// A signature given literally (`"+-+"`) or by name with `m`.
pub fn signature(text: &str, m: Option<usize>) -> Result<SlopeSignature> {
    let named = |build: fn(usize) -> Result<SlopeSignature>| {
        let m = m.ok_or_else(|| Error::Precondition(format!("signature {text:?} needs --m")))?;
        build(m)
    };
    let s = match text.trim() {
        "sf" | "stretch-and-fold" | "stretch_and_fold" => named(SlopeSignature::stretch_and_fold)?,
        "zz" | "zigzag" => named(SlopeSignature::zigzag)?,
        "izz" | "inverted-zigzag" | "inverted_zigzag" => named(SlopeSignature::inverted_zigzag)?,
        literal => literal.parse()?,
    };
    if let Some(m) = m {
        if s.m() != m {
            return Err(Error::Precondition(format!("signature {s} has {} branches but --m is {m}", s.m())));
        }
    }
    Ok(s)
}

impl MapArgs {
    pub fn signature(&self) -> Result<SlopeSignature> {
        let text = self
            .signature
            .as_deref()
            .ok_or_else(|| Error::Precondition("--signature is required".into()))?;
        signature(text, self.m)
    }

    /// `--N`, or the length of `--perm`.
    pub fn cells(&self) -> Result<usize> {
        match (self.n, self.permutation()?) {
            (Some(n), Some(p)) if p.len() != n => {
                Err(Error::Precondition(format!("--perm has {} entries but --N is {n}", p.len())))
            }
            (Some(n), _) => Ok(n),
            (None, Some(p)) => Ok(p.len()),
            (None, None) => Err(Error::Precondition("--N is required".into())),
        }
    }

    pub fn permutation(&self) -> Result<Option<IntervalPermutation>> {
        self.perm.as_deref().map(str::parse).transpose()
    }

    /// `m` from `--m` or the signature.
    pub fn branches(&self) -> Result<usize> {
        match (self.m, &self.signature) {
            (Some(m), _) => Ok(m),
            (None, Some(_)) => Ok(self.signature()?.m()),
            (None, None) => Err(Error::Precondition("--m or --signature is required".into())),
        }
    }

    pub fn composed(&self) -> Result<ComposedMap> {
        let f = self.signature()?;
        let n = self.cells()?;
        let perm = self.permutation()?.unwrap_or_else(|| IntervalPermutation::identity(n));
        ComposedMap::new(f, perm)
    }

    fn required_perm(&self) -> Result<IntervalPermutation> {
        self.permutation()?
            .ok_or_else(|| Error::Precondition("--perm is required for this matrix kind".into()))
    }
}

pub fn matrix(kind: MatrixKind, map: &MapArgs) -> Result<IntegerMatrix> {
    match kind {
        MatrixKind::Reduced => reduced_markov(&map.composed()?),
        MatrixKind::Fine => fine_markov(&map.composed()?),
        MatrixKind::Permutation => structured_matrix(&StructuredKind::Permutation(map.required_perm()?)),
        MatrixKind::BlockPermutation => {
            structured_matrix(&StructuredKind::BlockPermutation(map.required_perm()?, map.branches()?))
        }
        MatrixKind::BackwardsIdentity => structured_matrix(&StructuredKind::BackwardsIdentity(map.cells()?)),
        MatrixKind::Circulant => structured_matrix(&StructuredKind::Circulant { m: map.branches()?, n: map.cells()? }),
        MatrixKind::FoldedCirculant => {
            structured_matrix(&StructuredKind::FoldedCirculant { m: map.branches()?, n: map.cells()? })
        }
        MatrixKind::TentWitness => structured_matrix(&StructuredKind::TentWitness(map.cells()?)),
        MatrixKind::Doubled => doubled_matrix(map.branches()?, map.cells()?),
    }
}

impl SearchArgs {
    pub fn mode(&self) -> Result<Mode> {
        self.mode.parse()
    }

    pub fn strategy(&self, n: usize) -> Result<Strategy> {
        let sampled = Strategy::Sampled { samples: self.samples, seed: self.seed };
        match self.strategy.as_deref() {
            None if n <= DEFAULT_EXHAUSTIVE_N => Ok(Strategy::Exhaustive),
            None => Ok(sampled),
            Some("exhaustive") => Ok(Strategy::Exhaustive),
            Some("sampled") => Ok(sampled),
            Some("symmetric_shortcut" | "symmetric-shortcut" | "symmetric") => Ok(Strategy::SymmetricShortcut),
            Some(other) => Err(Error::Parse(format!("unknown strategy {other:?}"))),
        }
    }
}

/// `"2,3,5"` or the inclusive range `"2..5"`.
pub fn grid(text: &str) -> Result<Vec<usize>> {
    let bad = |t: &str| Error::Parse(format!("bad grid value {t:?}"));
    let values = match text.split_once("..") {
        Some((lo, hi)) => {
            let lo: usize = lo.trim().parse().map_err(|_| bad(text))?;
            let hi: usize = hi.trim().trim_start_matches('=').parse().map_err(|_| bad(text))?;
            (lo..=hi).collect()
        }
        None => text
            .split(',')
            .map(|t| t.trim().parse().map_err(|_| bad(t)))
            .collect::<Result<Vec<usize>>>()?,
    };
    if values.is_empty() {
        return Err(Error::Precondition(format!("grid {text:?} is empty")));
    }
    Ok(values)
}

/// Signatures with `m` branches named by a survey `--signature` list.
pub fn survey_signatures(text: &str, m: usize) -> Result<Vec<SlopeSignature>> {
    match text.trim() {
        "all" => all_signatures(m),
        "orbits" => orbit_representatives(m),
        list => {
            let mut out = Vec::new();
            for item in list.split(',') {
                let s = signature(item, None).or_else(|_| signature(item, Some(m)))?;
                if s.m() == m {
                    out.push(s);
                }
            }
            Ok(out)
        }
    }
}

/// An observable given as comma-separated cell values.
pub fn observable(text: &str) -> Result<StepObservable<f64>> {
    let values = text
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("bad observable value {t:?}")))
        })
        .collect::<Result<Vec<_>>>()?;
    StepObservable::new(values)
}
