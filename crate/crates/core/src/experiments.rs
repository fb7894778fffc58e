//! Positive-rank proportions over `F_l`, the CRT product experiment and
//! average-rank surveys over `Q`.
//!
//! "Rank" here is always the analytic rank over `F_l(T)` (multiplicity of
//! `1 - l u` in the L-polynomial), and over `Q` a Nagao estimate.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::ops::AddAssign;
use std::path::{Path, PathBuf};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::arith::checked_pow;
use crate::error::{Error, Result};
use crate::families::{filter_sn, sample_family, sn_primes, FamilySpec, Ordering};
use crate::fpoly::FpPoly;
use crate::lfunction::{analyze, Strategy};
use crate::nagao::nagao_rank_estimate;
use crate::par::map_ordered;
use crate::rng::stream;
use crate::surface::{SurfaceFq, SurfaceQ};

/// One-line reminder printed with every rank statistic.
pub const RANK_BANNER: &str = "rank = analytic rank over F_l(T): multiplicity of (1 - l u) in L(u)";

/// Samples per checkpoint unit.
pub const UNIT_SIZE: u64 = 256;

const TAG_RHO: u64 = 0x72686f;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Degrees {
    /// `deg A = m`, `deg B = n`: the space `S_{l;m,n}`.
    #[default]
    Exact,
    /// `deg A <= m`, `deg B <= n`: every reduction of `S_{m,n}(M)`.
    AtMost,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RhoMode {
    #[default]
    Exhaustive,
    /// Uniform draws with replacement.
    MonteCarlo,
    /// A uniform subset of the space, without replacement.
    MonteCarloWor,
}

impl std::str::FromStr for RhoMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exhaustive" => Ok(RhoMode::Exhaustive),
            "mc" | "montecarlo" => Ok(RhoMode::MonteCarlo),
            "mc-wor" => Ok(RhoMode::MonteCarloWor),
            _ => Err(Error::Parse(format!("unknown mode {s:?} (exhaustive, mc, mc-wor)"))),
        }
    }
}

impl std::fmt::Display for RhoMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            RhoMode::Exhaustive => "exhaustive",
            RhoMode::MonteCarlo => "mc",
            RhoMode::MonteCarloWor => "mc-wor",
        })
    }
}

/// A coefficient space over `F_l`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RhoCell {
    pub l: u64,
    pub m: u32,
    pub n: u32,
    #[serde(default)]
    pub degrees: Degrees,
}

impl RhoCell {
    pub fn new(l: u64, m: u32, n: u32) -> Self {
        RhoCell { l, m, n, degrees: Degrees::Exact }
    }

    fn side(&self, d: u32) -> Result<u64> {
        let over = || Error::Overflow(format!("coefficient space for l={} d={d}", self.l));
        match self.degrees {
            Degrees::Exact => checked_pow(self.l, d)
                .and_then(|v| v.checked_mul(self.l - 1))
                .ok_or_else(over),
            Degrees::AtMost => checked_pow(self.l, d + 1).ok_or_else(over),
        }
    }

    /// Number of `(A, B)` coefficient pairs.
    pub fn size(&self) -> Result<u64> {
        self.side(self.m)?
            .checked_mul(self.side(self.n)?)
            .ok_or_else(|| Error::Overflow("coefficient space".into()))
    }

    fn digits(&self, mut i: u64, d: u32) -> Vec<u64> {
        let l = self.l;
        let mut c = Vec::with_capacity(d as usize + 1);
        for _ in 0..d {
            c.push(i % l);
            i /= l;
        }
        c.push(match self.degrees {
            Degrees::Exact => 1 + i,
            Degrees::AtMost => i,
        });
        c
    }

    /// The pair with index `i < size()`: `A` is the slow digit block.
    pub fn pair(&self, i: u64) -> Result<(FpPoly, FpPoly)> {
        let sb = self.side(self.n)?;
        let a = self.digits(i / sb, self.m);
        let b = self.digits(i % sb, self.n);
        Ok((FpPoly::new(self.l, a), FpPoly::new(self.l, b)))
    }

    fn validate(&self) -> Result<()> {
        if self.l <= 3 || !crate::arith::is_prime(self.l) {
            return Err(Error::InvalidModulus(self.l));
        }
        self.size().map(|_| ())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub total: u64,
    pub positive: u64,
    pub isotrivial: u64,
    pub degenerate: u64,
}

impl Counts {
    pub fn classified(&self) -> u64 {
        self.total - self.isotrivial - self.degenerate
    }
}

impl AddAssign for Counts {
    fn add_assign(&mut self, o: Counts) {
        self.total += o.total;
        self.positive += o.positive;
        self.isotrivial += o.isotrivial;
        self.degenerate += o.degenerate;
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Degenerate,
    Isotrivial,
    Rank(u32),
}

/// Classify one surface over `F_l`; L-polynomial invariant violations are
/// returned as errors.
pub fn classify_pair(a: FpPoly, b: FpPoly) -> Result<Outcome> {
    let s = match SurfaceFq::new(a, b) {
        Ok(s) => s,
        Err(Error::DegenerateSurface) => return Ok(Outcome::Degenerate),
        Err(e) => return Err(e),
    };
    if s.is_isotrivial() {
        return Ok(Outcome::Isotrivial);
    }
    let an = analyze(&s, Strategy::default(), None).map_err(|e| match e {
        Error::BudgetExceeded(_) => e,
        e => Error::InconsistentData(format!("{s}: {e}")),
    })?;
    Ok(Outcome::Rank(an.rank.analytic_rank))
}

fn tally(outcomes: Vec<Result<Outcome>>) -> Result<Counts> {
    let mut c = Counts::default();
    for o in outcomes {
        c.total += 1;
        match o? {
            Outcome::Degenerate => c.degenerate += 1,
            Outcome::Isotrivial => c.isotrivial += 1,
            Outcome::Rank(r) => c.positive += u64::from(r > 0),
        }
    }
    Ok(c)
}

/// Wilson score interval `(low, high)` at 95%.
pub fn wilson95(successes: u64, n: u64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let z = 1.959_963_984_540_054_f64;
    let nf = n as f64;
    let p = successes as f64 / nf;
    let denom = 1.0 + z * z / nf;
    let centre = (p + z * z / (2.0 * nf)) / denom;
    let half = z / denom * (p * (1.0 - p) / nf + z * z / (4.0 * nf * nf)).sqrt();
    (centre - half, centre + half)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RhoEstimate {
    pub l: u64,
    pub m: u32,
    pub n: u32,
    pub degrees: Degrees,
    pub mode: RhoMode,
    pub total: u64,
    pub positive_rank_count: u64,
    pub isotrivial_count: u64,
    pub degenerate_count: u64,
    pub rho_hat: f64,
    /// Wilson half-width; `None` for exhaustive runs.
    pub ci95: Option<f64>,
    pub ci_low: Option<f64>,
    pub ci_high: Option<f64>,
    pub seed: u64,
}

impl RhoEstimate {
    fn from_counts(cell: RhoCell, mode: RhoMode, seed: u64, c: Counts) -> Self {
        let k = c.classified();
        let rho_hat = if k == 0 { f64::NAN } else { c.positive as f64 / k as f64 };
        let (ci95, ci_low, ci_high) = match mode {
            RhoMode::Exhaustive => (None, None, None),
            _ => {
                let (lo, hi) = wilson95(c.positive, k);
                (Some((hi - lo) / 2.0), Some(lo), Some(hi))
            }
        };
        RhoEstimate {
            l: cell.l,
            m: cell.m,
            n: cell.n,
            degrees: cell.degrees,
            mode,
            total: c.total,
            positive_rank_count: c.positive,
            isotrivial_count: c.isotrivial,
            degenerate_count: c.degenerate,
            rho_hat,
            ci95,
            ci_low,
            ci_high,
            seed,
        }
    }

    /// Standard error of `rho_hat` (0 for exhaustive runs).
    pub fn std_error(&self) -> f64 {
        match self.mode {
            RhoMode::Exhaustive => 0.0,
            _ => {
                let k = (self.total - self.isotrivial_count - self.degenerate_count) as f64;
                (self.rho_hat * (1.0 - self.rho_hat) / k).sqrt()
            }
        }
    }

    pub fn cell(&self) -> RhoCell {
        RhoCell { l: self.l, m: self.m, n: self.n, degrees: self.degrees }
    }
}

/// How a cell's samples are chosen, with the per-cell work split into units
/// of [`UNIT_SIZE`] samples.
enum Plan {
    Range(u64),
    Replacement { size: u64, samples: u64 },
    Chosen(Vec<u64>),
}

impl Plan {
    fn new(cell: &RhoCell, mode: RhoMode, budget: u64, seed: u64) -> Result<Self> {
        cell.validate()?;
        let size = cell.size()?;
        Ok(match mode {
            RhoMode::Exhaustive => {
                if size > budget {
                    return Err(Error::SearchTooLarge { size: size as u128, budget: budget as u128 });
                }
                Plan::Range(size)
            }
            RhoMode::MonteCarlo => Plan::Replacement { size, samples: budget },
            RhoMode::MonteCarloWor => {
                if budget > size {
                    return Err(Error::InconsistentData(format!(
                        "{budget} samples without replacement from a space of {size}"
                    )));
                }
                let mut rng = stream(seed, &key(cell, u64::MAX));
                let len = usize::try_from(size).map_err(|_| Error::Overflow("space size".into()))?;
                let mut v: Vec<u64> = rand::seq::index::sample(&mut rng, len, budget as usize)
                    .into_iter()
                    .map(|i| i as u64)
                    .collect();
                v.sort_unstable();
                Plan::Chosen(v)
            }
        })
    }

    fn len(&self) -> u64 {
        match self {
            Plan::Range(n) => *n,
            Plan::Replacement { samples, .. } => *samples,
            Plan::Chosen(v) => v.len() as u64,
        }
    }

    fn units(&self) -> u64 {
        self.len().div_ceil(UNIT_SIZE)
    }

    fn index(&self, cell: &RhoCell, seed: u64, j: u64) -> u64 {
        match self {
            Plan::Range(_) => j,
            Plan::Replacement { size, .. } => stream(seed, &key(cell, j)).random_range(0..*size),
            Plan::Chosen(v) => v[j as usize],
        }
    }

    fn run_unit(&self, cell: &RhoCell, seed: u64, unit: u64, threads: usize) -> Result<Counts> {
        let lo = unit * UNIT_SIZE;
        let hi = (lo + UNIT_SIZE).min(self.len());
        let idx: Vec<u64> = (lo..hi).map(|j| self.index(cell, seed, j)).collect();
        let outcomes = map_ordered(threads, &idx, |&i| {
            let (a, b) = cell.pair(i)?;
            classify_pair(a, b)
        });
        tally(outcomes)
    }
}

fn key(cell: &RhoCell, j: u64) -> [u64; 6] {
    [TAG_RHO, cell.l, cell.m as u64, cell.n as u64, cell.degrees as u64, j]
}

/// `rho_l(m, n)` for one cell. `budget` caps the space size (exhaustive) or
/// gives the number of samples (Monte Carlo).
pub fn rho_estimate_cell(cell: RhoCell, mode: RhoMode, budget: u64, seed: u64, threads: usize) -> Result<RhoEstimate> {
    let plan = Plan::new(&cell, mode, budget, seed)?;
    let mut c = Counts::default();
    for u in 0..plan.units() {
        c += plan.run_unit(&cell, seed, u, threads)?;
    }
    Ok(RhoEstimate::from_counts(cell, mode, seed, c))
}

pub fn rho_estimate(l: u64, m: u32, n: u32, mode: RhoMode, budget: u64, seed: u64) -> Result<RhoEstimate> {
    rho_estimate_cell(RhoCell::new(l, m, n), mode, budget, seed, 1)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub cells: Vec<RhoCell>,
    pub mode: RhoMode,
    pub budget: u64,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum CheckpointLine {
    Header { config: SweepConfig },
    Unit { unit_id: u64, partial_counts: Counts },
}

/// Stops a sweep after a number of freshly computed units, as if the
/// process had been killed there.
#[derive(Clone, Copy, Debug, Default)]
pub struct SweepControl {
    pub stop_after_units: Option<u64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepOutcome {
    /// One row per cell, sorted by `(l, m, n)`; empty unless `complete`.
    pub rows: Vec<RhoEstimate>,
    pub complete: bool,
    pub units_done: u64,
    pub units_total: u64,
}

fn read_checkpoint(path: &Path, config: &SweepConfig) -> Result<BTreeMap<u64, Counts>> {
    let mut done = BTreeMap::new();
    let text = match fs::read(path) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(done),
        Err(e) => return Err(e.into()),
    };
    let mut offset = 0u64;
    for (i, line) in text.split(|&c| c == b'\n').enumerate() {
        let here = offset;
        offset += line.len() as u64 + 1;
        if line.is_empty() && here as usize >= text.len() {
            break;
        }
        let corrupt = |reason: String| Error::Checkpoint { offset: here, reason };
        let rec: CheckpointLine = serde_json::from_slice(line).map_err(|e| corrupt(e.to_string()))?;
        match (i, rec) {
            (0, CheckpointLine::Header { config: c }) => {
                if &c != config {
                    return Err(corrupt("checkpoint was written for a different configuration".into()));
                }
            }
            (0, _) => return Err(corrupt("missing header".into())),
            (_, CheckpointLine::Unit { unit_id, partial_counts }) => {
                if done.insert(unit_id, partial_counts).is_some() {
                    return Err(corrupt(format!("duplicate unit {unit_id}")));
                }
            }
            (_, CheckpointLine::Header { .. }) => return Err(corrupt("second header".into())),
        }
    }
    Ok(done)
}

fn write_checkpoint(path: &Path, config: &SweepConfig, done: &BTreeMap<u64, Counts>) -> Result<()> {
    let mut tmp = PathBuf::from(path);
    tmp.as_mut_os_string().push(".tmp");
    {
        let mut f = std::io::BufWriter::new(fs::File::create(&tmp)?);
        let header = CheckpointLine::Header { config: config.clone() };
        writeln!(f, "{}", serde_json::to_string(&header).expect("serializable"))?;
        for (&unit_id, &partial_counts) in done {
            let rec = CheckpointLine::Unit { unit_id, partial_counts };
            writeln!(f, "{}", serde_json::to_string(&rec).expect("serializable"))?;
        }
        f.into_inner().map_err(|e| Error::Io(e.to_string()))?.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Every cell of `config`, resumable through a line-delimited checkpoint:
/// a header with the configuration, then one `{unit_id, partial_counts}`
/// record per finished unit. Units are numbered consecutively over the
/// cells in `(l, m, n)` order.
pub fn rho_sweep(
    config: &SweepConfig,
    checkpoint: Option<&Path>,
    control: SweepControl,
    threads: usize,
) -> Result<SweepOutcome> {
    let mut config = config.clone();
    config.cells.sort();
    config.cells.dedup();
    let plans: Vec<Plan> = config
        .cells
        .iter()
        .map(|c| Plan::new(c, config.mode, config.budget, config.seed))
        .collect::<Result<_>>()?;
    let units_total: u64 = plans.iter().map(Plan::units).sum();
    let mut done = match checkpoint {
        Some(p) => read_checkpoint(p, &config)?,
        None => BTreeMap::new(),
    };
    if let Some(&bad) = done.keys().find(|&&u| u >= units_total) {
        return Err(Error::Checkpoint { offset: 0, reason: format!("unit {bad} out of range") });
    }
    let mut fresh = 0u64;
    let mut base = 0u64;
    for (cell, plan) in config.cells.iter().zip(&plans) {
        for u in 0..plan.units() {
            let id = base + u;
            if done.contains_key(&id) {
                continue;
            }
            if control.stop_after_units.is_some_and(|k| fresh >= k) {
                return Ok(SweepOutcome { rows: Vec::new(), complete: false, units_done: done.len() as u64, units_total });
            }
            done.insert(id, plan.run_unit(cell, config.seed, u, threads)?);
            fresh += 1;
            if let Some(p) = checkpoint {
                write_checkpoint(p, &config, &done)?;
            }
        }
        base += plan.units();
    }
    let mut rows = Vec::with_capacity(plans.len());
    let mut base = 0u64;
    for (cell, plan) in config.cells.iter().zip(&plans) {
        let mut c = Counts::default();
        for u in 0..plan.units() {
            c += done[&(base + u)];
        }
        base += plan.units();
        rows.push(RhoEstimate::from_counts(*cell, config.mode, config.seed, c));
    }
    Ok(SweepOutcome { rows, complete: true, units_done: units_total, units_total })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrtConfig {
    #[serde(rename = "N")]
    pub modulus: u64,
    pub m: u32,
    pub n: u32,
    #[serde(rename = "M")]
    pub big_m: u64,
    pub samples: usize,
    pub seed: u64,
    /// Space-size cap for exhaustive `rho`, and the sample count when the
    /// space is larger.
    pub rho_budget: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrtReport {
    #[serde(rename = "N")]
    pub modulus: u64,
    pub m: u32,
    pub n: u32,
    #[serde(rename = "M")]
    pub big_m: u64,
    /// Surfaces of `S^(N)(M)` drawn.
    pub samples: usize,
    /// Of those, surfaces with no isotrivial reduction: the denominator of
    /// `lhs_hat`.
    pub used: u64,
    pub excluded_isotrivial: u64,
    /// `(l, reductions with a dropped leading coefficient)`.
    pub degree_drops: Vec<(u64, u64)>,
    pub lhs_hat: f64,
    pub lhs_se: f64,
    /// `rho_l` over `deg A <= m`, `deg B <= n`: the population the
    /// reductions are drawn from.
    pub rhos: Vec<RhoEstimate>,
    pub product_of_rhos: f64,
    pub product_se: f64,
    /// `prod rho_l(m, n)` over exact degrees, for comparison.
    pub exact_degree_product: f64,
    pub discrepancy: f64,
    pub combined_se: f64,
    pub within_3se: bool,
}

fn rho_auto(cell: RhoCell, budget: u64, seed: u64, threads: usize) -> Result<RhoEstimate> {
    let mode = if cell.size()? <= budget { RhoMode::Exhaustive } else { RhoMode::MonteCarlo };
    rho_estimate_cell(cell, mode, budget, seed, threads)
}

fn product_with_se(rhos: &[RhoEstimate]) -> (f64, f64) {
    let prod: f64 = rhos.iter().map(|r| r.rho_hat).product();
    let var: f64 = (0..rhos.len())
        .map(|i| {
            let others: f64 = rhos.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, r)| r.rho_hat).product();
            (others * rhos[i].std_error()).powi(2)
        })
        .sum();
    (prod, var.sqrt())
}

/// Proportion of `S^(N)(M)` whose reductions have positive rank at every
/// `l | N`, against the product of the `rho_l`.
pub fn crt_experiment(cfg: &CrtConfig, threads: usize) -> Result<CrtReport> {
    let primes = sn_primes(cfg.modulus)?;
    let spec = FamilySpec::new(cfg.m, cfg.n, cfg.big_m, Ordering::Height)?;
    let mut want = cfg.samples + cfg.samples / 2 + 16;
    let surfaces: Vec<SurfaceQ> = loop {
        let drawn = sample_family(&spec, want, cfg.seed)?;
        let kept: Vec<SurfaceQ> = filter_sn(drawn.surfaces.into_iter(), cfg.modulus)?.take(cfg.samples).collect();
        if kept.len() == cfg.samples {
            break kept;
        }
        want = want.checked_mul(2).ok_or_else(|| Error::Overflow("CRT sample count".into()))?;
    };
    let results = map_ordered(threads, &surfaces, |s| -> Result<(Option<bool>, Vec<bool>)> {
        let mut all_positive = true;
        let mut drops = Vec::with_capacity(primes.len());
        for &l in &primes {
            let red = s.reduce_mod(l)?;
            drops.push(red.degree_drop);
            let (a, b) = (red.surface.a().clone(), red.surface.b().clone());
            match classify_pair(a, b)? {
                Outcome::Rank(r) => all_positive &= r > 0,
                Outcome::Isotrivial => return Ok((None, drops)),
                Outcome::Degenerate => unreachable!("filtered by S^(N)"),
            }
        }
        Ok((Some(all_positive), drops))
    });
    let mut used = 0u64;
    let mut positive = 0u64;
    let mut excluded_isotrivial = 0u64;
    let mut drop_counts = vec![0u64; primes.len()];
    for r in results {
        let (flag, drops) = r?;
        for (c, d) in drop_counts.iter_mut().zip(drops) {
            *c += u64::from(d);
        }
        match flag {
            Some(p) => {
                used += 1;
                positive += u64::from(p);
            }
            None => excluded_isotrivial += 1,
        }
    }
    let lhs_hat = if used == 0 { f64::NAN } else { positive as f64 / used as f64 };
    let lhs_se = if used == 0 { f64::NAN } else { (lhs_hat * (1.0 - lhs_hat) / used as f64).sqrt() };
    let rhos: Vec<RhoEstimate> = primes
        .iter()
        .map(|&l| {
            let cell = RhoCell { l, m: cfg.m, n: cfg.n, degrees: Degrees::AtMost };
            rho_auto(cell, cfg.rho_budget, cfg.seed, threads)
        })
        .collect::<Result<_>>()?;
    let exact: Vec<RhoEstimate> = primes
        .iter()
        .map(|&l| rho_auto(RhoCell::new(l, cfg.m, cfg.n), cfg.rho_budget, cfg.seed, threads))
        .collect::<Result<_>>()?;
    let (product_of_rhos, product_se) = product_with_se(&rhos);
    let discrepancy = lhs_hat - product_of_rhos;
    let combined_se = (lhs_se * lhs_se + product_se * product_se).sqrt();
    Ok(CrtReport {
        modulus: cfg.modulus,
        m: cfg.m,
        n: cfg.n,
        big_m: cfg.big_m,
        samples: cfg.samples,
        used,
        excluded_isotrivial,
        degree_drops: primes.iter().copied().zip(drop_counts).collect(),
        lhs_hat,
        lhs_se,
        rhos,
        product_of_rhos,
        product_se,
        exact_degree_product: product_with_se(&exact).0,
        discrepancy,
        within_3se: discrepancy.abs() <= 3.0 * combined_se,
        combined_se,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AvgRankReport {
    pub spec: FamilySpec,
    pub samples: usize,
    pub x: u64,
    pub seed: u64,
    /// Mean Nagao estimate: evidence, not proven ranks.
    pub mean: f64,
    pub se: f64,
    /// `(nearest integer, count)`, ascending.
    pub histogram: Vec<(i64, u64)>,
    /// Fraction of estimates rounding to a negative integer.
    pub negative_mass: f64,
    pub estimates: Vec<f64>,
}

/// Nagao rank estimates at cutoff `x` over `samples` surfaces of the family.
pub fn avg_rank_survey(spec: &FamilySpec, x: u64, samples: usize, seed: u64, threads: usize) -> Result<AvgRankReport> {
    if x < 100 {
        return Err(Error::Unsupported(format!("survey cutoff X = {x} < 100")));
    }
    let drawn = sample_family(spec, samples, seed)?;
    let estimates: Vec<f64> = drawn.surfaces.iter().map(|s| nagao_rank_estimate(s, x, threads)).collect();
    let k = estimates.len() as f64;
    let (mean, se) = if estimates.is_empty() {
        (f64::NAN, f64::NAN)
    } else {
        let mean = estimates.iter().sum::<f64>() / k;
        let var = if estimates.len() > 1 {
            estimates.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (k - 1.0)
        } else {
            0.0
        };
        (mean, (var / k).sqrt())
    };
    let mut hist = BTreeMap::new();
    for e in &estimates {
        *hist.entry(e.round() as i64).or_insert(0u64) += 1;
    }
    let negative: u64 = hist.range(..0).map(|(_, c)| c).sum();
    Ok(AvgRankReport {
        spec: spec.clone(),
        samples,
        x,
        seed,
        mean,
        se,
        negative_mass: if estimates.is_empty() { 0.0 } else { negative as f64 / k },
        histogram: hist.into_iter().collect(),
        estimates,
    })
}
