//! One function per subcommand; each builds a table and writes it once.

use std::io::Write;
use std::time::Instant;

use permix::correlation::{correlation_sequence, subleading_eigen_observable};
use permix::export::{
    matrix_json, matrix_table, observable_hash, spectrum_table, Cell, Preamble, Table, DECAY_COLUMNS,
    REGION_COLUMNS, SURVEY_COLUMNS,
};
use permix::perms::{factorial, unrank};
use permix::verify::{self, Suite};
use permix::worst_case::MAX_EXHAUSTIVE_N;
use permix::{
    connectivity, decay_rate, fine_markov, is_topologically_mixing, mixing_rate,
    monte_carlo_correlation, reduced_markov, sf_worst_rate, spectrum, tau, worst_mixing_rate, zigzag_worst_rate, ComposedMap,
    Error, IntegerMatrix, IntervalPermutation, Mode, RegionTest, Result, SlopeSignature, StepObservable,
};
use rayon::prelude::*;

use crate::select;
use crate::{Command, Failure, Format, MapArgs, SearchArgs};

pub fn execute(command: Command, format: Format, out: &mut dyn Write) -> Result<(), Failure> {
    match command {
        Command::Matrix { map, kind } => {
            let a = select::matrix(kind, &map)?;
            match format {
                Format::Csv => matrix_table(&a).write_csv(out)?,
                Format::Json => write_value(out, &matrix_json(&a))?,
            }
        }
        Command::Spectrum { map, kind } => emit(&spectrum_of(&select::matrix(kind, &map)?)?, format, out)?,
        Command::Rate { map } => emit(&rate(&map)?, format, out)?,
        Command::Worst { map, search } => emit(&worst(&map, &search)?, format, out)?,
        Command::Survey { m, n, signature, search } => emit(&survey(&m, &n, &signature, &search)?, format, out)?,
        Command::Region { n } => emit(&region(n)?, format, out)?,
        Command::Correlate { map, nmax, samples, seed, phi, psi } => {
            emit(&correlate(&map, nmax, samples, seed, &phi, psi.as_deref())?, format, out)?
        }
        Command::Verify { suite } => return run_verify(&suite, format, out),
    }
    Ok(())
}

fn emit(table: &Table, format: Format, out: &mut dyn Write) -> Result<()> {
    match format {
        Format::Csv => table.write_csv(out),
        Format::Json => table.write_json(out),
    }
}

fn write_value(out: &mut dyn Write, v: &serde_json::Value) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, v).map_err(|e| Error::Io(e.to_string()))?;
    writeln!(out)?;
    Ok(())
}

fn spectrum_of(a: &IntegerMatrix) -> Result<Table> {
    let c = a
        .line_sum()
        .ok_or_else(|| Error::Precondition("the matrix has no common row and column sum".into()))?;
    let s = spectrum::<f64, i64>(a)?;
    Ok(spectrum_table(a.order(), c as f64, &s.eigenvalues()))
}

fn rate(map: &MapArgs) -> Result<Table> {
    let g = map.composed()?;
    let t: f64 = tau(&reduced_markov(&g)?)?;
    let r: f64 = mixing_rate(&g)?;
    let mixing = is_topologically_mixing(&g)?;
    let mut table = Table::new(&["signature", "sigma", "N", "tau", "rate", "topologically_mixing", "status"]);
    table.push(vec![
        g.signature().to_string().into(),
        g.perm().to_string().into(),
        g.n().into(),
        t.into(),
        r.into(),
        mixing.into(),
        if mixing { "topologically mixing" } else { "not topologically mixing" }.into(),
    ]);
    Ok(table)
}

/// The closed-form worst rate, when one is known for `f` and `mode`. Both
/// forms hold on the whole symmetry orbit, which for these two signatures is
/// `{f, -f}`.
fn prediction(f: &SlopeSignature, n: usize, mode: Mode) -> Option<f64> {
    if mode != Mode::All {
        return None;
    }
    let sf = SlopeSignature::stretch_and_fold(f.m()).ok()?;
    if f.is_zigzag() || f.is_inverted_zigzag() {
        zigzag_worst_rate(f.m(), n).ok()
    } else if *f == sf || *f == sf.negated() {
        sf_worst_rate(f.m(), n).ok()
    } else {
        None
    }
}

fn worst(map: &MapArgs, search: &SearchArgs) -> Result<Table> {
    let f = map.signature()?;
    let n = map.cells()?;
    let mode = search.mode()?;
    let strategy = search.strategy(n)?;
    let r = worst_mixing_rate::<f64>(&f, n, mode, strategy)?;
    let mut table = Table::new(&[
        "m", "N", "signature", "mode", "strategy", "value", "argmax", "evaluated", "feasible", "predicted",
    ]);
    table.push(vec![
        f.m().into(),
        n.into(),
        f.to_string().into(),
        mode.to_string().into(),
        strategy.to_string().into(),
        r.value.into(),
        r.argmax.to_string().into(),
        r.evaluated.into(),
        r.feasible.into(),
        prediction(&f, n, mode).into(),
    ]);
    Ok(table)
}

fn survey(ms: &str, ns: &str, signatures: &str, search: &SearchArgs) -> Result<Table> {
    let mode = search.mode()?;
    let mut table = Table::new(&SURVEY_COLUMNS);
    for m in select::grid(ms)? {
        let sigs = select::survey_signatures(signatures, m)?;
        for n in select::grid(ns)?.into_iter().filter(|&n| n >= m) {
            let strategy = search.strategy(n)?;
            for f in &sigs {
                let start = Instant::now();
                let r = worst_mixing_rate::<f64>(f, n, mode, strategy)?;
                let wall_ms = start.elapsed().as_secs_f64() * 1e3;
                table.push(vec![
                    m.into(),
                    n.into(),
                    f.to_string().into(),
                    mode.to_string().into(),
                    strategy.to_string().into(),
                    r.value.into(),
                    r.argmax.to_string().into(),
                    r.evaluated.into(),
                    wall_ms.into(),
                ]);
            }
        }
    }
    Ok(table)
}

fn region(n: usize) -> Result<Table> {
    let test = RegionTest::<f64>::new(n)?;
    if n > MAX_EXHAUSTIVE_N {
        return Err(Error::Capacity { what: "region enumeration N", limit: MAX_EXHAUSTIVE_N, got: n });
    }
    let tent = ComposedMap::unpermuted(SlopeSignature::zigzag(2)?, n)?;
    let a = reduced_markov(&tent)?;
    let b = fine_markov(&tent)?;
    let rows: Vec<Vec<Vec<Cell>>> = (0..factorial(n))
        .into_par_iter()
        .map(|k| {
            let p = unrank(n, k);
            let block: Vec<usize> = (0..2 * n).map(|j| p[j / 2] * 2 + j % 2).collect();
            if !connectivity(&b.permute_columns(&block)).primitive {
                return Ok(Vec::new());
            }
            let sigma = IntervalPermutation::from_zero_based(p.clone())?.to_string();
            let s = spectrum::<f64, i64>(&a.permute_columns(&p))?;
            Ok(s.nonleading()
                .iter()
                .map(|z| {
                    let lambda = z / 2.0;
                    let v = test.contains(lambda);
                    vec![
                        n.into(),
                        sigma.clone().into(),
                        lambda.re.into(),
                        lambda.im.into(),
                        lambda.norm().into(),
                        v.inside.into(),
                        v.active.to_string().into(),
                    ]
                })
                .collect())
        })
        .collect::<Result<_>>()?;
    let mut table = Table::new(&REGION_COLUMNS);
    rows.into_iter().flatten().for_each(|r| table.push(r));
    Ok(table)
}

fn observable(text: &str, g: &ComposedMap) -> Result<StepObservable<f64>> {
    if text.trim() != "eigen" {
        return select::observable(text);
    }
    match subleading_eigen_observable::<f64>(g) {
        Ok((phi, _)) => Ok(phi),
        Err(e) => {
            eprintln!("permix: {e}; using the indicator of the first cell");
            StepObservable::indicator(g.n(), 0..1)
        }
    }
}

fn correlate(map: &MapArgs, nmax: usize, samples: usize, seed: u64, phi: &str, psi: Option<&str>) -> Result<Table> {
    let g = map.composed()?;
    let phi = observable(phi, &g)?;
    let psi = match psi {
        Some(text) => observable(text, &g)?,
        None => phi.clone(),
    };
    let exact = correlation_sequence(&g, &phi, &psi, nmax)?;
    let fitted = if nmax >= 4 { Some(decay_rate(&g, &phi, &psi, nmax)?.fitted_rate) } else { None };
    let rate: f64 = mixing_rate(&g)?;
    let mut table = Table::new(&DECAY_COLUMNS).with_meta(
        Preamble::Comment,
        vec![
            ("g", g.to_string().into()),
            ("phi", observable_hash(&phi.values).into()),
            ("psi", observable_hash(&psi.values).into()),
            ("fitted_rate", fitted.into()),
            ("mixing_rate", rate.into()),
            ("samples", samples.into()),
            ("seed", Cell::Int(seed as i64)),
        ],
    );
    for (n, &c) in exact.iter().enumerate() {
        let (mc, se) = if samples == 0 {
            (None, None)
        } else {
            let est = monte_carlo_correlation(&g, &phi, &psi, n, samples, seed.wrapping_add(n as u64))?;
            (Some(est.estimate), Some(est.se))
        };
        table.push(vec![n.into(), c.into(), mc.into(), se.into()]);
    }
    Ok(table)
}

fn run_verify(suite: &str, format: Format, out: &mut dyn Write) -> Result<(), Failure> {
    let suite: Suite = suite.parse()?;
    let reports = verify::run(suite)?;
    match format {
        Format::Csv => {
            for r in &reports {
                writeln!(out, "{r}")?;
            }
        }
        Format::Json => {
            let v = serde_json::to_value(&reports).map_err(|e| Error::Io(e.to_string()))?;
            write_value(out, &v)?;
        }
    }
    let failed = reports.iter().filter(|r| !r.passed).count();
    if failed > 0 {
        return Err(Failure::Verification(failed));
    }
    Ok(())
}
