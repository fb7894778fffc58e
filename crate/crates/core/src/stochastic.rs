//! The random model: traces `A_{p,t}` drawn from the distribution of
//! `a_p` over all (possibly singular) Weierstrass equations `y^2 = x^3 + a x + b`
//! with `(a, b)` uniform in `F_p^2`, and the random series built from them.

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::arith::{is_prime, isqrt};
use crate::error::{Error, Result};
use crate::ff::PrimeField;
use crate::fpoly::FpPoly;
use crate::par::map_ordered;
use crate::point_count::{trace_naive, trace_row};
use crate::primes::estimator_primes;
use crate::rng::stream;

/// Largest `p` for which [`birch_moment`] enumerates all `p^2` pairs.
pub const EXHAUSTIVE_LIMIT: u64 = 200;

const TAG_THREE: u64 = 0x7468_7265_65;
const TAG_FIXED: u64 = 0x6669_7865_64;

/// Six times the Hurwitz class number, `6 H(N)`, for `0 < N <= nmax`.
///
/// Counts reduced positive definite forms `(a, b, c)` of discriminant `-N`,
/// with the forms `a(x^2 + y^2)` and `a(x^2 + xy + y^2)` weighted `1/2` and
/// `1/3`.
#[derive(Clone, Debug)]
pub struct HurwitzTable {
    six_h: Vec<u64>,
}

impl HurwitzTable {
    pub fn new(nmax: u64) -> Self {
        let nmax = nmax as i64;
        let mut six_h = vec![0u64; nmax as usize + 1];
        let mut a = 1i64;
        while 3 * a * a <= nmax {
            for b in -a..=a {
                let mut c = a;
                loop {
                    let n = 4 * a * c - b * b;
                    if n > nmax {
                        break;
                    }
                    let boundary = b.abs() == a || a == c;
                    if !(boundary && b < 0) {
                        let w = if a == b && b == c {
                            2
                        } else if b == 0 && a == c {
                            3
                        } else {
                            6
                        };
                        six_h[n as usize] += w;
                    }
                    c += 1;
                }
            }
            a += 1;
        }
        HurwitzTable { six_h }
    }

    pub fn nmax(&self) -> u64 {
        self.six_h.len() as u64 - 1
    }

    pub fn six_h(&self, n: u64) -> u64 {
        self.six_h[n as usize]
    }
}

/// Exact multiplicities of each trace over all `(a, b) in F_p^2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceDistribution {
    p: u64,
    min_trace: i64,
    counts: Vec<u64>,
}

impl TraceDistribution {
    fn empty(p: u64) -> Result<Self> {
        if p <= 3 || !is_prime(p) {
            return Err(Error::InvalidModulus(p));
        }
        let w = isqrt(4 * p) as i64;
        Ok(TraceDistribution { p, min_trace: -w, counts: vec![0; 2 * w as usize + 1] })
    }

    fn bump(&mut self, t: i64, by: u64) {
        self.counts[(t - self.min_trace) as usize] += by;
    }

    /// By enumerating every pair: `p` rows of `p` fibres each.
    pub fn exhaustive(p: u64) -> Result<Self> {
        let mut d = Self::empty(p)?;
        let field = PrimeField::with_char_table(p)?;
        let t = FpPoly::x(p);
        for a in 0..p {
            for r in trace_row(&FpPoly::constant(p, a), &t, &field) {
                d.bump(r.trace, 1);
            }
        }
        Ok(d)
    }

    /// From class numbers: `(p - 1) H(4p - t^2) / 2` smooth pairs have trace
    /// `t`; the singular pairs are one cusp and `p - 1` nodes, half split.
    pub fn from_class_numbers(p: u64, h: &HurwitzTable) -> Result<Self> {
        let mut d = Self::empty(p)?;
        if h.nmax() < 4 * p {
            return Err(Error::InconsistentData(format!(
                "class number table stops at {} < 4p = {}",
                h.nmax(),
                4 * p
            )));
        }
        let w = -d.min_trace;
        for t in -w..=w {
            let n = 4 * p - (t * t) as u64;
            if n == 0 {
                continue;
            }
            let num = (p - 1) * h.six_h(n);
            if num % 12 != 0 {
                return Err(Error::InconsistentData(format!("non-integral count at p={p} t={t}")));
            }
            d.bump(t, num / 12);
        }
        d.bump(0, 1);
        d.bump(1, (p - 1) / 2);
        d.bump(-1, (p - 1) / 2);
        if d.total() != p * p {
            return Err(Error::InconsistentData(format!("class number counts do not sum to p^2 at p={p}")));
        }
        Ok(d)
    }

    /// Exhaustive for `p <= EXHAUSTIVE_LIMIT`, class numbers above.
    pub fn new(p: u64) -> Result<Self> {
        if p <= EXHAUSTIVE_LIMIT {
            Self::exhaustive(p)
        } else {
            Self::from_class_numbers(p, &HurwitzTable::new(4 * p))
        }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// `(trace, multiplicity)` for every trace with nonzero multiplicity.
    pub fn support(&self) -> impl Iterator<Item = (i64, u64)> + '_ {
        self.counts
            .iter()
            .enumerate()
            .filter(|&(_, &c)| c > 0)
            .map(move |(i, &c)| (self.min_trace + i as i64, c))
    }

    pub fn count(&self, t: i64) -> u64 {
        let i = t - self.min_trace;
        if i < 0 || i as usize >= self.counts.len() {
            0
        } else {
            self.counts[i as usize]
        }
    }

    /// `(1/p^2) sum trace^k`, exactly.
    pub fn moment(&self, k: u32) -> BigRational {
        let num: BigInt = self
            .support()
            .map(|(t, c)| BigInt::from(t).pow(k) * BigInt::from(c))
            .sum();
        BigRational::new(num, BigInt::from(self.p * self.p))
    }

    /// The trace at position `u` of the sorted multiset (`u < p^2`).
    fn at(&self, mut u: u64) -> i64 {
        for (t, c) in self.support() {
            if u < c {
                return t;
            }
            u -= c;
        }
        unreachable!("index beyond p^2")
    }

    /// `sum_{j<n} A_j` for `n` independent draws, by a chain of conditional
    /// binomials over the multinomial cell counts.
    fn sum_of_draws<R: Rng>(&self, n: u64, rng: &mut R) -> i64 {
        let mut left = n;
        let mut mass = self.p * self.p;
        let mut sum = 0i64;
        for (t, c) in self.support() {
            if left == 0 {
                break;
            }
            let k = if c >= mass {
                left
            } else {
                Binomial::new(left, c as f64 / mass as f64)
                    .expect("probability in [0, 1]")
                    .sample(rng)
            };
            sum += k as i64 * t;
            left -= k;
            mass -= c;
        }
        sum
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleMode {
    Direct,
    #[default]
    Table,
}

impl std::str::FromStr for SampleMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "direct" => Ok(SampleMode::Direct),
            "table" => Ok(SampleMode::Table),
            _ => Err(Error::Parse(format!("unknown sample mode {s:?}"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct BirchModel {
    p: u64,
    mode: SampleMode,
    dist: Arc<TraceDistribution>,
    cumulative: Vec<(u64, i64)>,
    field: PrimeField,
}

impl BirchModel {
    pub fn new(p: u64, mode: SampleMode) -> Result<Self> {
        Self::from_distribution(Arc::new(TraceDistribution::new(p)?), mode)
    }

    pub fn from_distribution(dist: Arc<TraceDistribution>, mode: SampleMode) -> Result<Self> {
        let p = dist.p();
        let mut acc = 0;
        let cumulative = dist
            .support()
            .map(|(t, c)| {
                acc += c;
                (acc, t)
            })
            .collect();
        Ok(BirchModel { p, mode, dist, cumulative, field: PrimeField::with_char_table(p)? })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn mode(&self) -> SampleMode {
        self.mode
    }

    pub fn distribution(&self) -> &TraceDistribution {
        &self.dist
    }
}

/// One trace from the model.
pub fn birch_sample<R: Rng>(model: &BirchModel, rng: &mut R) -> i64 {
    let p = model.p;
    match model.mode {
        SampleMode::Direct => {
            let a = rng.random_range(0..p);
            let b = rng.random_range(0..p);
            trace_naive(&model.field, a, b).trace
        }
        SampleMode::Table => {
            let u = rng.random_range(0..p * p);
            let i = model.cumulative.partition_point(|&(c, _)| c <= u);
            model.cumulative[i].1
        }
    }
}

/// `(1/p^2) sum_{(a,b)} a_p(a,b)^k` by enumeration.
pub fn birch_moment(p: u64, k: u32) -> Result<BigRational> {
    if p > EXHAUSTIVE_LIMIT {
        return Err(Error::BudgetExceeded(format!(
            "exhaustive moment needs p <= {EXHAUSTIVE_LIMIT}, got {p}"
        )));
    }
    Ok(TraceDistribution::exhaustive(p)?.moment(k))
}

/// Where the `A_{p,t}` come from. `Zero` is the all-zero test hook.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    #[default]
    Birch,
    Zero,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryResult {
    pub eps: f64,
    pub x_grid: Vec<u64>,
    pub normalized_values: Vec<f64>,
    pub seed: u64,
    pub trial: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSummary {
    pub x: u64,
    /// Median over trials of `|S_X / X^(1/2+eps)|`.
    pub median_abs: f64,
    /// Sample variance over trials of `S_X / X^(1/2+eps/2)`.
    pub variance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThreeSeries {
    pub trajectories: Vec<TrajectoryResult>,
    pub summary: Vec<GridSummary>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThreeSeriesConfig {
    pub eps: f64,
    pub grid: Vec<u64>,
    pub seed: u64,
    pub trials: u64,
    #[serde(default)]
    pub source: Source,
}

fn check_grid(eps: f64, grid: &[u64]) -> Result<()> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::InconsistentData(format!("eps must be positive, got {eps}")));
    }
    if grid.is_empty() || grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InconsistentData("grid must be non-empty and strictly increasing".into()));
    }
    Ok(())
}

/// Distributions for every prime `3 < p < limit`, sharing one class number
/// table.
pub fn distributions_below(limit: u64) -> Result<Vec<Arc<TraceDistribution>>> {
    let primes = estimator_primes(limit);
    let h = HurwitzTable::new(4 * primes.last().copied().unwrap_or(5));
    primes
        .into_iter()
        .map(|p| {
            if p <= EXHAUSTIVE_LIMIT {
                TraceDistribution::exhaustive(p)
            } else {
                TraceDistribution::from_class_numbers(p, &h)
            }
            .map(Arc::new)
        })
        .collect()
}

/// Unnormalized `S_X` at each grid point for one trial; `draw(p)` is the
/// contribution `sum_t A_{p,t}` (or `A_p`) of the prime `p`.
fn partial_sums(primes: &[u64], grid: &[u64], mut draw: impl FnMut(usize, u64) -> i64) -> Vec<f64> {
    let mut out = Vec::with_capacity(grid.len());
    let mut s = 0.0f64;
    let mut i = 0;
    for &x in grid {
        while i < primes.len() && primes[i] < x {
            let p = primes[i];
            let a = draw(i, p);
            if a != 0 {
                s += a as f64 * (p as f64).ln() / p as f64;
            }
            i += 1;
        }
        out.push(s);
    }
    out
}

fn median(mut v: Vec<f64>) -> f64 {
    if v.is_empty() {
        return f64::NAN;
    }
    v.sort_by(|a, b| a.total_cmp(b));
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn variance(v: &[f64]) -> f64 {
    let n = v.len();
    if n < 2 {
        return 0.0;
    }
    let mean = v.iter().sum::<f64>() / n as f64;
    v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64
}

/// Simulate `S_X = sum_{3<p<X} sum_{t=1}^p A_{p,t} (log p)/p` on `grid`.
///
/// Trial `i` draws prime `p` from the stream `(seed, i, p)`, so the output
/// does not depend on `threads`.
pub fn three_series_sim(cfg: &ThreeSeriesConfig, threads: usize) -> Result<ThreeSeries> {
    check_grid(cfg.eps, &cfg.grid)?;
    let xmax = *cfg.grid.last().expect("non-empty grid");
    let primes = estimator_primes(xmax);
    let dists = match cfg.source {
        Source::Birch => distributions_below(xmax)?,
        Source::Zero => Vec::new(),
    };
    let trials: Vec<u64> = (0..cfg.trials).collect();
    let raw: Vec<Vec<f64>> = map_ordered(threads, &trials, |&trial| {
        partial_sums(&primes, &cfg.grid, |i, p| match cfg.source {
            Source::Zero => 0,
            Source::Birch => {
                let mut rng = stream(cfg.seed, &[TAG_THREE, trial, p]);
                dists[i].sum_of_draws(p, &mut rng)
            }
        })
    });
    let full: Vec<f64> = cfg.grid.iter().map(|&x| (x as f64).powf(0.5 + cfg.eps)).collect();
    let half: Vec<f64> = cfg.grid.iter().map(|&x| (x as f64).powf(0.5 + cfg.eps / 2.0)).collect();
    let trajectories = raw
        .iter()
        .zip(&trials)
        .map(|(s, &trial)| TrajectoryResult {
            eps: cfg.eps,
            x_grid: cfg.grid.clone(),
            normalized_values: s.iter().zip(&full).map(|(v, n)| v / n).collect(),
            seed: cfg.seed,
            trial,
        })
        .collect();
    let summary = cfg
        .grid
        .iter()
        .enumerate()
        .map(|(j, &x)| GridSummary {
            x,
            median_abs: median(raw.iter().map(|s| (s[j] / full[j]).abs()).collect()),
            variance: variance(&raw.iter().map(|s| s[j] / half[j]).collect::<Vec<_>>()),
        })
        .collect();
    Ok(ThreeSeries { trajectories, summary })
}

/// `(1/X^eps) sum_{3<p<X} A_p (log p)/p` on `grid`, one draw per prime.
pub fn fixed_t_series(eps: f64, grid: &[u64], seed: u64, source: Source) -> Result<TrajectoryResult> {
    Ok(fixed_t_batch(eps, grid, &[seed], source)?.pop().expect("one seed"))
}

/// [`fixed_t_series`] for several seeds, building the tables once.
pub fn fixed_t_batch(eps: f64, grid: &[u64], seeds: &[u64], source: Source) -> Result<Vec<TrajectoryResult>> {
    check_grid(eps, grid)?;
    let xmax = *grid.last().expect("non-empty grid");
    let primes = estimator_primes(xmax);
    let dists = match source {
        Source::Birch => distributions_below(xmax)?,
        Source::Zero => Vec::new(),
    };
    let norm: Vec<f64> = grid.iter().map(|&x| (x as f64).powf(eps)).collect();
    Ok(seeds
        .iter()
        .map(|&seed| {
            let raw = partial_sums(&primes, grid, |i, p| match source {
                Source::Zero => 0,
                Source::Birch => {
                    let mut rng = stream(seed, &[TAG_FIXED, p]);
                    dists[i].at(rng.random_range(0..p * p))
                }
            });
            TrajectoryResult {
                eps,
                x_grid: grid.to_vec(),
                normalized_values: raw.iter().zip(&norm).map(|(s, n)| s / n).collect(),
                seed,
                trial: 0,
            }
        })
        .collect())
}
