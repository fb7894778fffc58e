//! Rank estimators over `Q`.
//!
//! - the Nagao sum `(1/X) sum_{3<p<X} sum_{t mod p} a_p(E_t) log p / p`,
//!   whose negation conjecturally tends to the rank of `E(Q(T))`;
//! - for a single curve, the Heath-Brown sum `sum a_p log p / p`, the BSD
//!   partial product and Rubinstein's main-term estimator.
//!
//! Primes 2 and 3 are skipped, as are primes where the whole surface
//! degenerates. Per-prime terms are computed in parallel and added in
//! ascending prime order, so results do not depend on the worker count.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ff::PrimeField;
use crate::fpoly::FpPoly;
use crate::par::map_ordered;
use crate::point_count::{trace_naive, trace_row};
use crate::primes::estimator_primes;
use crate::surface::{discriminant_fp, SurfaceQ};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NagaoEstimate {
    pub x: u64,
    /// `(1/X) * sum of per_prime_terms`; the rank estimate is `-value`.
    pub value: f64,
    /// `(p, sum_t a_p(E_t) * log p / p)` for every `3 < p < X`.
    pub per_prime_terms: Option<Vec<(u64, f64)>>,
}

impl NagaoEstimate {
    pub fn rank_estimate(&self) -> f64 {
        // 0 - v rather than -v keeps an exact zero unsigned
        0.0 - self.value
    }
}

/// `sum_{t mod p} a_p(E_t)`, or `None` when the reduction degenerates.
pub fn inner_sum(s: &SurfaceQ, p: u64) -> Option<i64> {
    let field = PrimeField::with_char_table(p).expect("estimator primes exceed 3");
    let a = FpPoly::from_i64(p, s.a());
    let b = FpPoly::from_i64(p, s.b());
    if discriminant_fp(&a, &b).is_zero() {
        return None;
    }
    Some(trace_row(&a, &b, &field).iter().map(|r| r.trace).sum())
}

fn weighted(v: i64, p: u64) -> f64 {
    let pf = p as f64;
    v as f64 * pf.ln() / pf
}

/// Nagao sum at cutoff `x` on `threads` workers (`0` = default).
pub fn nagao_sum(s: &SurfaceQ, x: u64, threads: usize) -> NagaoEstimate {
    let primes = estimator_primes(x);
    let terms: Vec<(u64, f64)> = map_ordered(threads, &primes, |&p| {
        (p, inner_sum(s, p).map_or(0.0, |v| weighted(v, p)))
    });
    let total: f64 = terms.iter().map(|&(_, t)| t).sum();
    NagaoEstimate {
        x,
        value: if x == 0 { 0.0 } else { total / x as f64 },
        per_prime_terms: Some(terms),
    }
}

pub fn nagao_rank_estimate(s: &SurfaceQ, x: u64, threads: usize) -> f64 {
    nagao_sum(s, x, threads).rank_estimate()
}

/// `y^2 = x^3 + a x + b` over `Q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CurveQ {
    a: i64,
    b: i64,
}

impl CurveQ {
    pub fn new(a: i64, b: i64) -> Result<Self> {
        let disc = 4 * (a as i128).pow(3) + 27 * (b as i128).pow(2);
        if disc == 0 {
            return Err(Error::SingularCurve);
        }
        Ok(CurveQ { a, b })
    }

    pub fn a(&self) -> i64 {
        self.a
    }

    pub fn b(&self) -> i64 {
        self.b
    }

    /// `a_p` by the character sum; singular reductions give `+1 / -1 / 0`.
    pub fn trace(&self, p: u64) -> i64 {
        let f = PrimeField::with_char_table(p).expect("prime above 3");
        trace_naive(&f, f.reduce(self.a), f.reduce(self.b)).trace
    }

    /// `(p, a_p)` for `3 < p < x`.
    pub fn traces(&self, x: u64, threads: usize) -> Vec<(u64, i64)> {
        let primes = estimator_primes(x);
        map_ordered(threads, &primes, |&p| (p, self.trace(p)))
    }
}

impl fmt::Display for CurveQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.a, self.b)
    }
}

impl FromStr for CurveQ {
    type Err = Error;
    /// `a,b`
    fn from_str(s: &str) -> Result<Self> {
        let (a, b) = s
            .split_once(',')
            .ok_or_else(|| Error::Parse(format!("expected a,b got {s:?}")))?;
        let parse = |v: &str| {
            v.trim()
                .parse::<i64>()
                .map_err(|e| Error::Parse(format!("{v:?}: {e}")))
        };
        CurveQ::new(parse(a)?, parse(b)?)
    }
}

pub fn heathbrown_from_traces(traces: &[(u64, i64)]) -> f64 {
    traces.iter().map(|&(p, a)| weighted(a, p)).sum()
}

/// `sum_{3<p<X} a_p log p / p`.
pub fn heathbrown_sum(e: &CurveQ, x: u64, threads: usize) -> f64 {
    heathbrown_from_traces(&e.traces(x, threads))
}

pub fn bsd_from_traces(traces: &[(u64, i64)]) -> f64 {
    traces
        .iter()
        .map(|&(p, a)| (p as f64 + 1.0 - a as f64) / p as f64)
        .product()
}

/// `prod_{3<p<X} (p + 1 - a_p) / p`.
pub fn bsd_partial_product(e: &CurveQ, x: u64, threads: usize) -> f64 {
    bsd_from_traces(&e.traces(x, threads))
}

/// `1/2 - (1/log X) int_1^X S(x) dx / x^2` with `S(x) = sum_{p<x} a_p log p`,
/// integrated exactly over the constant pieces of `S`.
pub fn rubinstein_from_traces(traces: &[(u64, i64)], x: f64) -> f64 {
    if x <= 1.0 {
        return 0.5;
    }
    let mut integral = 0.0;
    let mut prefix = 0.0;
    for (i, &(p, a)) in traces.iter().enumerate() {
        let left = p as f64;
        if left >= x {
            break;
        }
        prefix += a as f64 * left.ln();
        let right = traces
            .get(i + 1)
            .map_or(x, |&(q, _)| (q as f64).min(x));
        integral += prefix * (1.0 / left - 1.0 / right);
    }
    0.5 - integral / x.ln()
}

pub fn rubinstein_estimate(e: &CurveQ, x: u64, threads: usize) -> f64 {
    rubinstein_from_traces(&e.traces(x, threads), x as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worked_nagao_values() {
        let s: SurfaceQ = "A=1;B=0,1".parse().unwrap();
        // t = 1..5 with t = 5 ~ 0: 2 - 3 + 2 + 2 - 3 = 0
        assert_eq!(inner_sum(&s, 5), Some(0));
        let e = nagao_sum(&s, 6, 1);
        assert_eq!(e.value, 0.0);
        assert_eq!(e.per_prime_terms.as_deref(), Some(&[(5, 0.0)][..]));
        assert_eq!(nagao_rank_estimate(&s, 4, 1), 0.0);
        assert!(nagao_sum(&s, 4, 1).per_prime_terms.unwrap().is_empty());
    }

    #[test]
    fn inner_sum_matches_per_fibre_traces() {
        let s: SurfaceQ = "A=0,1;B=0,0,1".parse().unwrap();
        for p in [5u64, 7, 11, 13, 101] {
            let f = PrimeField::new(p).unwrap();
            let direct: i64 = (1..=p)
                .map(|t| {
                    let t = t % p;
                    trace_naive(&f, t, t * t % p).trace
                })
                .sum();
            assert_eq!(inner_sum(&s, p), Some(direct));
        }
        let bad: SurfaceQ = "A=0,5;B=5".parse().unwrap();
        assert_eq!(inner_sum(&bad, 5), None);
    }

    #[test]
    fn aggregation_identity_and_threads() {
        let s: SurfaceQ = "A=0,1;B=0,0,1".parse().unwrap();
        let one = nagao_sum(&s, 300, 1);
        let many = nagao_sum(&s, 300, 4);
        assert_eq!(one, many);
        let terms = one.per_prime_terms.as_ref().unwrap();
        let sum: f64 = terms.iter().map(|t| t.1).sum();
        assert_eq!(one.value, sum / 300.0);
    }

    #[test]
    fn curve_sums_small() {
        let e = CurveQ::new(1, 1).unwrap();
        assert_eq!(e.trace(5), -3);
        let a7 = e.trace(7);
        let hb = heathbrown_sum(&e, 10, 1);
        assert_eq!(hb, -3.0 * 5f64.ln() / 5.0 + a7 as f64 * 7f64.ln() / 7.0);
        assert_eq!(heathbrown_sum(&e, 4, 1), 0.0);
        assert_eq!(bsd_partial_product(&e, 4, 1), 1.0);
        let bsd = bsd_partial_product(&e, 10, 1);
        assert_eq!(bsd, (6.0 + 3.0) / 5.0 * ((8 - a7) as f64 / 7.0));
        assert!(bsd_partial_product(&e, 2000, 1) > 0.0);
        assert_eq!(CurveQ::new(-3, 2), Err(Error::SingularCurve));
        assert_eq!("1,1".parse::<CurveQ>().unwrap(), e);
    }

    #[test]
    fn rubinstein_trivial_cases() {
        let e = CurveQ::new(1, 1).unwrap();
        assert_eq!(rubinstein_estimate(&e, 5, 1), 0.5);
        let zeros: Vec<(u64, i64)> = estimator_primes(10_000).into_iter().map(|p| (p, 0)).collect();
        for x in [10.0, 1234.5, 9999.0] {
            assert_eq!(rubinstein_from_traces(&zeros, x), 0.5);
        }
    }

    #[test]
    fn rubinstein_integration_is_exact() {
        let e = CurveQ::new(1, 1).unwrap();
        let x = 10_000u64;
        let traces = e.traces(x, 1);
        let exact = rubinstein_from_traces(&traces, x as f64);
        // composite Gauss-Legendre on each constant piece, 8 sub-panels
        let nodes = [
            (-0.861_136_311_594_052_6, 0.347_854_845_137_453_9),
            (-0.339_981_043_584_856_3, 0.652_145_154_862_546_1),
            (0.339_981_043_584_856_3, 0.652_145_154_862_546_1),
            (0.861_136_311_594_052_6, 0.347_854_845_137_453_9),
        ];
        let mut integral = 0.0;
        let mut prefix = 0.0;
        for (i, &(p, a)) in traces.iter().enumerate() {
            prefix += a as f64 * (p as f64).ln();
            let lo = p as f64;
            let hi = traces.get(i + 1).map_or(x as f64, |t| t.0 as f64);
            let panels = 8;
            let h = (hi - lo) / panels as f64;
            for k in 0..panels {
                let (a0, b0) = (lo + k as f64 * h, lo + (k + 1) as f64 * h);
                let (mid, half) = ((a0 + b0) / 2.0, (b0 - a0) / 2.0);
                for &(node, w) in &nodes {
                    let t = mid + half * node;
                    integral += w * half * prefix / (t * t);
                }
            }
        }
        let quad = 0.5 - integral / (x as f64).ln();
        assert!((exact - quad).abs() < 1e-12, "{exact} vs {quad}");
        // splitting every piece at its midpoint changes nothing
        let mut split = 0.0;
        let mut prefix = 0.0;
        for (i, &(p, a)) in traces.iter().enumerate() {
            prefix += a as f64 * (p as f64).ln();
            let lo = p as f64;
            let hi = traces.get(i + 1).map_or(x as f64, |t| t.0 as f64);
            let mid = (lo + hi) / 2.0;
            split += prefix * (1.0 / lo - 1.0 / mid) + prefix * (1.0 / mid - 1.0 / hi);
        }
        let halved = 0.5 - split / (x as f64).ln();
        assert!((exact - halved).abs() < 1e-13);
    }

    #[test]
    fn golden_curve_values() {
        let e = CurveQ::new(1, 1).unwrap();
        // traces behind the golden values, against brute-force point counts
        for (p, a) in e.traces(400, 1) {
            let mut n = 1i64;
            for x in 0..p {
                let f = (x * x % p * x + x + 1) % p;
                n += (0..p).filter(|y| y * y % p == f).count() as i64;
            }
            assert_eq!(a, p as i64 + 1 - n, "p = {p}");
        }
        let hb = |x| format!("{:.16e}", heathbrown_sum(&e, x, 2));
        assert_eq!(hb(1_000), "-4.0838496547698346e0");
        assert_eq!(hb(10_000), "-7.0277297264737841e0");
        assert_eq!(hb(100_000), "-7.9543695121642353e0");
        assert_eq!(heathbrown_sum(&e, 100_000, 1), heathbrown_sum(&e, 100_000, 3));
        assert_eq!(
            format!("{:.16e}", rubinstein_estimate(&e, 10_000, 1)),
            "1.1028666135069551e0"
        );
    }
}
