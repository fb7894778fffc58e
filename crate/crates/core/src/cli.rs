//! The `ellsurf` command line.
//!
//! Exit codes: 0 success, 1 other failure, 2 usage error (unknown flag,
//! malformed polynomial), 3 numeric overflow in a parameter, 4 unwritable
//! output.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::num::{IntErrorKind, ParseIntError};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::experiments::{
    avg_rank_survey, crt_experiment, rho_estimate_cell, rho_sweep, CrtConfig, RhoCell, RhoMode, SweepConfig,
    SweepControl, RANK_BANNER,
};
use crate::families::{enumerate_family, FamilySpec, Ordering};
use crate::io::{emit, to_value, Format, RunConfig};
use crate::lfunction::{analyze, Strategy};
use crate::nagao::{bsd_from_traces, heathbrown_from_traces, nagao_sum, rubinstein_from_traces, CurveQ};
use crate::rng::stream;
use crate::stochastic::{
    birch_moment, birch_sample, fixed_t_batch, three_series_sim, BirchModel, SampleMode, Source, ThreeSeriesConfig,
};
use crate::surface::{SurfaceFq, SurfaceQ};

pub const EXIT_OTHER: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_OVERFLOW: i32 = 3;
pub const EXIT_UNWRITABLE: i32 = 4;

const ESTIMATE_NOTE: &str = "values are Nagao estimates over Q(T), not proven ranks";

#[derive(Debug)]
struct NumError(ParseIntError);

impl std::fmt::Display for NumError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

impl std::error::Error for NumError {}

fn num<T: std::str::FromStr<Err = ParseIntError>>(s: &str) -> std::result::Result<T, NumError> {
    s.trim().replace('_', "").parse().map_err(NumError)
}

fn pos_f64(s: &str) -> std::result::Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        _ => Err(format!("expected a positive number, got {s:?}")),
    }
}

#[derive(Parser, Debug)]
#[command(name = "ellsurf", version, about = "Ranks of elliptic surfaces y^2 = x^3 + A(T) x + B(T)")]
struct Cli {
    /// Master seed for every random stream.
    #[arg(long, global = true, default_value = "0", value_parser = num::<u64>)]
    seed: u64,
    /// Worker threads (0 = all cores); never changes the output data.
    #[arg(long, global = true, default_value = "1", value_parser = num::<usize>)]
    threads: usize,
    /// Output file (default: stdout).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, default_value = "jsonl", value_parser = ["csv", "jsonl"])]
    format: String,
    /// Checkpoint file for resumable runs (rho-sweep).
    #[arg(long, global = true)]
    checkpoint: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Nagao sum of a surface over Q(T).
    Nagao(NagaoArgs),
    /// Heath-Brown, BSD-product and Rubinstein sums of a curve over Q.
    CurveSums(CurveArgs),
    /// L-polynomial and analytic rank of a surface over F_l(T).
    Lfun(LfunArgs),
    /// Proportion of positive analytic rank in S_{l;m,n}.
    Rho(RhoArgs),
    /// rho over a grid of (l, m, n) cells, resumable with --checkpoint.
    RhoSweep(SweepArgs),
    /// CRT product experiment on S^(N)_{m,n}(M).
    Crt(CrtArgs),
    /// Exact moments of, or samples from, the trace distribution.
    Birch(BirchArgs),
    /// Simulation of the random three-series.
    Threeseries(ThreeArgs),
    /// List S_{m,n}(M).
    Enumerate(FamilyArgs),
    /// Mean Nagao rank estimate over a sample of S_{m,n}(M).
    Survey(SurveyArgs),
}

#[derive(Args, Debug)]
struct NagaoArgs {
    /// `A=c0,c1,..;B=c0,c1,..`, coefficients ascending.
    #[arg(long)]
    surface: String,
    #[arg(long, value_parser = num::<u64>)]
    xmax: u64,
    /// Also emit the per-prime terms.
    #[arg(long)]
    per_prime: bool,
}

#[derive(Args, Debug)]
struct CurveArgs {
    /// `a,b` for y^2 = x^3 + a x + b.
    #[arg(long, allow_hyphen_values = true)]
    curve: String,
    #[arg(long, value_parser = num::<u64>)]
    xmax: u64,
}

#[derive(Args, Debug)]
struct LfunArgs {
    #[arg(long, value_parser = num::<u64>)]
    ell: u64,
    #[arg(long)]
    surface: String,
    #[arg(long, default_value = "fe", value_parser = ["fe", "full"])]
    strategy: String,
    /// Also search sections with deg x <= D.
    #[arg(long, value_parser = num::<usize>)]
    sections: Option<usize>,
}

#[derive(Args, Debug)]
struct RhoArgs {
    #[arg(long, value_parser = num::<u64>)]
    ell: u64,
    #[arg(long, value_parser = num::<u32>)]
    m: u32,
    #[arg(long, value_parser = num::<u32>)]
    n: u32,
    #[arg(long, default_value = "exhaustive", value_parser = ["exhaustive", "mc", "mc-wor"])]
    mode: String,
    /// Space-size cap (exhaustive) or sample count (mc).
    #[arg(long, default_value = "1000000", value_parser = num::<u64>)]
    budget: u64,
}

#[derive(Args, Debug)]
struct SweepArgs {
    /// File with one `l,m,n` cell per line (`#` comments allowed).
    #[arg(long)]
    grid: PathBuf,
    #[arg(long, default_value = "mc", value_parser = ["exhaustive", "mc", "mc-wor"])]
    mode: String,
    #[arg(long, default_value = "10000", value_parser = num::<u64>)]
    budget: u64,
    /// Stop after this many fresh units, leaving the checkpoint behind.
    #[arg(long, hide = true, value_parser = num::<u64>)]
    stop_after_units: Option<u64>,
}

#[derive(Args, Debug)]
struct CrtArgs {
    #[arg(long = "N", value_parser = num::<u64>)]
    modulus: u64,
    #[arg(long, value_parser = num::<u32>)]
    m: u32,
    #[arg(long, value_parser = num::<u32>)]
    n: u32,
    #[arg(long = "M", value_parser = num::<u64>)]
    big_m: u64,
    #[arg(long, value_parser = num::<usize>)]
    samples: usize,
    #[arg(long, default_value = "100000", value_parser = num::<u64>)]
    rho_budget: u64,
}

#[derive(Args, Debug)]
#[command(group = clap::ArgGroup::new("what").required(true).args(["moments", "samples"]))]
struct BirchArgs {
    #[arg(long, value_parser = num::<u64>)]
    p: u64,
    /// Exact moments of order 0..=K.
    #[arg(long, value_parser = num::<u32>)]
    moments: Option<u32>,
    /// Number of samples to draw.
    #[arg(long, value_parser = num::<u64>)]
    samples: Option<u64>,
    #[arg(long, default_value = "table", value_parser = ["direct", "table"])]
    mode: String,
}

#[derive(Args, Debug)]
struct ThreeArgs {
    #[arg(long, value_parser = pos_f64)]
    eps: f64,
    /// Increasing cutoffs `X1,X2,..`.
    #[arg(long, value_delimiter = ',', required = true, value_parser = num::<u64>)]
    grid: Vec<u64>,
    #[arg(long, default_value = "1", value_parser = num::<u64>)]
    trials: u64,
    /// The single-index series: one A_p per prime.
    #[arg(long)]
    fixed_t: bool,
}

#[derive(Args, Debug)]
struct FamilyArgs {
    #[arg(long, value_parser = num::<u32>)]
    m: u32,
    #[arg(long, value_parser = num::<u32>)]
    n: u32,
    #[arg(long = "M", value_parser = num::<u64>)]
    big_m: u64,
    #[arg(long, default_value = "height", value_parser = ["height", "mahler"])]
    ordering: String,
}

#[derive(Args, Debug)]
struct SurveyArgs {
    #[command(flatten)]
    family: FamilyArgs,
    #[arg(long, value_parser = num::<u64>)]
    xmax: u64,
    #[arg(long, value_parser = num::<usize>)]
    samples: usize,
}

/// Records plus the CSV columns and header notes that describe them.
struct Output {
    notes: Vec<&'static str>,
    columns: Vec<&'static str>,
    records: Vec<Value>,
}

impl Output {
    fn new(columns: &[&'static str], records: Vec<Value>) -> Self {
        Output { notes: Vec::new(), columns: columns.to_vec(), records }
    }

    fn note(mut self, n: &'static str) -> Self {
        self.notes.push(n);
        self
    }
}

fn family_spec(f: &FamilyArgs) -> Result<FamilySpec> {
    FamilySpec::new(f.m, f.n, f.big_m, f.ordering.parse::<Ordering>()?)
}

fn lpoly_record(l: u64, s: &SurfaceFq, strategy: Strategy, sections: Option<usize>) -> Result<Value> {
    if s.is_isotrivial() {
        return Err(Error::IsotrivialSurface);
    }
    let an = analyze(s, strategy, sections)?;
    let types: Vec<String> = an
        .summary
        .type_multiset()
        .iter()
        .map(|(d, f, k)| format!("{d}:{f}:{}", to_value(k).as_str().unwrap_or("?")))
        .collect();
    Ok(json!({
        "ell": l,
        "surface": s.to_string(),
        "deg_n": an.summary.deg_n,
        "lpoly_degree": an.summary.lpoly_degree,
        "L": an.lpoly.to_text(),
        "epsilon": an.lpoly.sign(),
        "analytic_rank": an.rank.analytic_rank,
        "sections_found": sections.map(|_| an.rank.sections_found),
        "parity_ok": an.parity_ok,
        "bad_places": types.join(" "),
    }))
}

fn read_grid(path: &PathBuf) -> Result<Vec<RhoCell>> {
    let text = fs::read_to_string(path)?;
    let mut cells = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let bad = || Error::Parse(format!("{}:{}: expected l,m,n", path.display(), i + 1));
        let parts: Vec<&str> = line.split(',').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(bad());
        }
        let l = parts[0].parse().map_err(|_| bad())?;
        let m = parts[1].parse().map_err(|_| bad())?;
        let n = parts[2].parse().map_err(|_| bad())?;
        cells.push(RhoCell::new(l, m, n));
    }
    Ok(cells)
}

fn dispatch(cli: &Cli, err: &mut dyn Write) -> Result<Option<Output>> {
    let threads = cli.threads;
    let seed = cli.seed;
    Ok(Some(match &cli.command {
        Command::Nagao(a) => {
            let s: SurfaceQ = a.surface.parse()?;
            let est = nagao_sum(&s, a.xmax, threads);
            let mut rec = json!({
                "surface": s.to_string(),
                "x": a.xmax,
                "value": est.value,
                "rank_estimate": est.rank_estimate(),
            });
            if a.per_prime {
                rec["per_prime_terms"] = to_value(&est.per_prime_terms);
            }
            Output::new(&["surface", "x", "value", "rank_estimate", "per_prime_terms"], vec![rec]).note(ESTIMATE_NOTE)
        }
        Command::CurveSums(a) => {
            let e: CurveQ = a.curve.parse()?;
            let traces = e.traces(a.xmax, threads);
            let rec = json!({
                "curve": e.to_string(),
                "x": a.xmax,
                "heath_brown": heathbrown_from_traces(&traces),
                "bsd_product": bsd_from_traces(&traces),
                "rubinstein": rubinstein_from_traces(&traces, a.xmax as f64),
            });
            Output::new(&["curve", "x", "heath_brown", "bsd_product", "rubinstein"], vec![rec])
        }
        Command::Lfun(a) => {
            let s = SurfaceFq::parse(a.ell, &a.surface)?;
            let strategy = if a.strategy == "full" { Strategy::Full } else { Strategy::FunctionalEquation };
            let rec = lpoly_record(a.ell, &s, strategy, a.sections)?;
            Output::new(
                &["ell", "surface", "deg_n", "lpoly_degree", "L", "epsilon", "analytic_rank", "sections_found", "parity_ok", "bad_places"],
                vec![rec],
            )
            .note(RANK_BANNER)
        }
        Command::Rho(a) => {
            let mode: RhoMode = a.mode.parse()?;
            let r = rho_estimate_cell(RhoCell::new(a.ell, a.m, a.n), mode, a.budget, seed, threads).map_err(|e| match e {
                Error::SearchTooLarge { size, budget } => Error::BudgetExceeded(format!(
                    "space of {size} pairs exceeds --budget {budget}; use --mode mc"
                )),
                e => e,
            })?;
            let mut rec = to_value(&r);
            rec["distance_to_half"] = json!((r.rho_hat - 0.5).abs());
            Output::new(RHO_COLUMNS, vec![rec]).note(RANK_BANNER)
        }
        Command::RhoSweep(a) => {
            let config = SweepConfig { cells: read_grid(&a.grid)?, mode: a.mode.parse()?, budget: a.budget, seed };
            let control = SweepControl { stop_after_units: a.stop_after_units };
            let out = rho_sweep(&config, cli.checkpoint.as_deref(), control, threads)?;
            if !out.complete {
                writeln!(err, "stopped after {} of {} units; rerun to resume", out.units_done, out.units_total)?;
                return Ok(None);
            }
            let recs = out
                .rows
                .iter()
                .map(|r| {
                    let mut v = to_value(r);
                    v["distance_to_half"] = json!((r.rho_hat - 0.5).abs());
                    v
                })
                .collect();
            Output::new(RHO_COLUMNS, recs).note(RANK_BANNER)
        }
        Command::Crt(a) => {
            let cfg = CrtConfig {
                modulus: a.modulus,
                m: a.m,
                n: a.n,
                big_m: a.big_m,
                samples: a.samples,
                seed,
                rho_budget: a.rho_budget,
            };
            let r = crt_experiment(&cfg, threads)?;
            let mut rec = to_value(&r);
            rec["rhos"] = Value::String(crate::io::to_json_line(&rec["rhos"]));
            Output::new(
                &[
                    "N", "m", "n", "M", "samples", "used", "excluded_isotrivial", "degree_drops", "lhs_hat", "lhs_se",
                    "product_of_rhos", "product_se", "exact_degree_product", "discrepancy", "combined_se",
                    "within_3se", "rhos",
                ],
                vec![rec],
            )
            .note(RANK_BANNER)
        }
        Command::Birch(a) => {
            if let Some(k) = a.moments {
                let recs = (0..=k)
                    .map(|j| {
                        let m = birch_moment(a.p, j)?;
                        let value = m.numer().to_string().parse::<f64>().unwrap_or(f64::NAN)
                            / m.denom().to_string().parse::<f64>().unwrap_or(f64::NAN);
                        Ok(json!({"p": a.p, "k": j, "moment": m.to_string(), "value": value}))
                    })
                    .collect::<Result<_>>()?;
                Output::new(&["p", "k", "moment", "value"], recs)
            } else {
                let model = BirchModel::new(a.p, a.mode.parse::<SampleMode>()?)?;
                let mut rng = stream(seed, &[0x6269_7263_68, a.p]);
                let recs = (0..a.samples.unwrap_or(0))
                    .map(|i| json!({"i": i, "trace": birch_sample(&model, &mut rng)}))
                    .collect();
                Output::new(&["i", "trace"], recs)
            }
        }
        Command::Threeseries(a) => {
            let mut recs = Vec::new();
            if a.fixed_t {
                let seeds: Vec<u64> = (0..a.trials).map(|t| seed.wrapping_add(t)).collect();
                for (trial, tr) in fixed_t_batch(a.eps, &a.grid, &seeds, Source::Birch)?.iter().enumerate() {
                    for (x, v) in tr.x_grid.iter().zip(&tr.normalized_values) {
                        recs.push(json!({"kind": "trajectory", "trial": trial, "x": x, "value": v}));
                    }
                }
            } else {
                let cfg = ThreeSeriesConfig { eps: a.eps, grid: a.grid.clone(), seed, trials: a.trials, source: Source::Birch };
                let out = three_series_sim(&cfg, threads)?;
                for tr in &out.trajectories {
                    for (x, v) in tr.x_grid.iter().zip(&tr.normalized_values) {
                        recs.push(json!({"kind": "trajectory", "trial": tr.trial, "x": x, "value": v}));
                    }
                }
                for s in &out.summary {
                    recs.push(json!({"kind": "median_abs", "x": s.x, "value": s.median_abs}));
                    recs.push(json!({"kind": "variance", "x": s.x, "value": s.variance}));
                }
            }
            Output::new(&["kind", "trial", "x", "value"], recs)
        }
        Command::Enumerate(a) => {
            let spec = family_spec(a)?;
            let mut it = enumerate_family(&spec)?;
            let recs: Vec<Value> = it
                .by_ref()
                .enumerate()
                .map(|(i, s)| json!({"i": i, "surface": s.to_string()}))
                .collect();
            writeln!(err, "{} surfaces, {} degenerate pairs skipped, {} boundary-ambiguous polynomials excluded", recs.len(), it.degenerate(), it.ambiguous())?;
            Output::new(&["i", "surface"], recs)
        }
        Command::Survey(a) => {
            let spec = family_spec(&a.family)?;
            let r = avg_rank_survey(&spec, a.xmax, a.samples, seed, threads)?;
            let rec = json!({
                "m": spec.m,
                "n": spec.n,
                "M": spec.big_m,
                "ordering": spec.ordering.to_string(),
                "x": r.x,
                "samples": r.samples,
                "mean": r.mean,
                "se": r.se,
                "negative_mass": r.negative_mass,
                "histogram": to_value(&r.histogram),
            });
            Output::new(&["m", "n", "M", "ordering", "x", "samples", "mean", "se", "negative_mass", "histogram"], vec![rec])
                .note(ESTIMATE_NOTE)
        }
    }))
}

const RHO_COLUMNS: &[&str] = &[
    "l", "m", "n", "degrees", "mode", "total", "positive_rank_count", "isotrivial_count", "degenerate_count", "rho_hat",
    "ci95", "ci_low", "ci_high", "seed", "distance_to_half",
];

fn params(cli: &Cli) -> (String, BTreeMap<String, Value>) {
    let (name, body) = match &cli.command {
        Command::Nagao(a) => ("nagao", json!({"surface": a.surface, "xmax": a.xmax, "per_prime": a.per_prime})),
        Command::CurveSums(a) => ("curve-sums", json!({"curve": a.curve, "xmax": a.xmax})),
        Command::Lfun(a) => ("lfun", json!({"ell": a.ell, "surface": a.surface, "strategy": a.strategy, "sections": a.sections})),
        Command::Rho(a) => ("rho", json!({"ell": a.ell, "m": a.m, "n": a.n, "mode": a.mode, "budget": a.budget})),
        Command::RhoSweep(a) => ("rho-sweep", json!({
            "grid": a.grid,
            "cells": read_grid(&a.grid).ok(),
            "mode": a.mode,
            "budget": a.budget,
        })),
        Command::Crt(a) => ("crt", json!({"N": a.modulus, "m": a.m, "n": a.n, "M": a.big_m, "samples": a.samples, "rho_budget": a.rho_budget})),
        Command::Birch(a) => ("birch", json!({"p": a.p, "moments": a.moments, "samples": a.samples, "mode": a.mode})),
        Command::Threeseries(a) => ("threeseries", json!({"eps": a.eps, "grid": a.grid, "trials": a.trials, "fixed_t": a.fixed_t})),
        Command::Enumerate(a) => ("enumerate", json!({"m": a.m, "n": a.n, "M": a.big_m, "ordering": a.ordering})),
        Command::Survey(a) => ("survey", json!({
            "m": a.family.m, "n": a.family.n, "M": a.family.big_m, "ordering": a.family.ordering,
            "xmax": a.xmax, "samples": a.samples,
        })),
    };
    let map = body.as_object().cloned().unwrap_or_default().into_iter().collect();
    (name.to_string(), map)
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse(_) => EXIT_USAGE,
        Error::Overflow(_) => EXIT_OVERFLOW,
        Error::Io(_) => EXIT_UNWRITABLE,
        _ => EXIT_OTHER,
    }
}

fn is_overflow(e: &clap::Error) -> bool {
    use std::error::Error as _;
    e.source()
        .and_then(|s| s.downcast_ref::<NumError>())
        .is_some_and(|n| matches!(n.0.kind(), IntErrorKind::PosOverflow | IntErrorKind::NegOverflow))
}

/// Parse `argv`, run the subcommand and return the exit status.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(err, "{}", e.render());
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ if is_overflow(&e) => EXIT_OVERFLOW,
                _ => EXIT_USAGE,
            };
        }
    };
    let (command, params) = params(&cli);
    let config = RunConfig {
        command,
        params,
        seed: cli.seed,
        threads: cli.threads,
        out: cli.out.clone(),
        checkpoint: cli.checkpoint.clone(),
        format: cli.format.parse::<Format>().unwrap_or_default(),
        version: env!("CARGO_PKG_VERSION").into(),
    };
    let result = dispatch(&cli, err).and_then(|o| {
        let Some(o) = o else { return Ok(()) };
        match &cli.out {
            Some(path) => {
                let mut f = fs::File::create(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
                emit(&mut f, &config, &o.notes, &o.columns, &o.records)
            }
            None => emit(out, &config, &o.notes, &o.columns, &o.records),
        }
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

/// Entry point for the binary.
pub fn main() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}
