//! L-polynomials of non-isotrivial elliptic surfaces over `F_l(T)`.
//!
//! The power sums `c_k = sum_{deg v | k} deg v * a_v^(k / deg v)` run over
//! the places of `P^1`; Newton's identities turn them into the integer
//! polynomial `L(u)` of degree `deg n - 4`, whose reciprocal roots all have
//! absolute value `q = l`. The analytic rank is the multiplicity of the
//! factor `1 - q u`.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ff::{ExtField, FiniteField, PrimeField, TABLE_LIMIT};
use crate::fpoly::FpPoly;
use crate::qpoly;
use crate::point_count::{small_point_order, trace, trace_power, trace_row};
use crate::surface::{ConductorSummary, Place, PlaceReport, ReductionType, SurfaceFq};

/// Largest candidate count [`find_sections`] will scan.
pub const SECTION_BUDGET: u128 = 1_000_000_000;

/// Relative tolerance on `|gamma| = q`.
pub const WEIL_TOLERANCE: f64 = 1e-6;

/// Specialised points of order above this are taken as non-torsion.
pub const TORSION_ORDER_BOUND: u64 = 12;

/// How many power sums to compute.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    /// `c_1 .. c_{n/2}`, the rest from the functional equation; further sums
    /// only when both signs survive the Weil check.
    #[default]
    FunctionalEquation,
    /// All of `c_1 .. c_n`.
    Full,
}

fn field_cache() -> &'static Mutex<HashMap<(u64, u32), Arc<ExtField>>> {
    static CACHE: OnceLock<Mutex<HashMap<(u64, u32), Arc<ExtField>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Tabled `F_{l^d}`, shared process-wide for small orders.
pub fn cached_extension(l: u64, d: u32) -> Result<Arc<ExtField>> {
    let key = (l, d);
    if let Some(f) = field_cache().lock().unwrap().get(&key) {
        return Ok(f.clone());
    }
    let f = Arc::new(ExtField::new(l, d)?);
    if f.order() <= 1 << 22 {
        field_cache().lock().unwrap().insert(key, f.clone());
    }
    Ok(f)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Local {
    Good(i64),
    Mult(i8),
    Additive,
}

impl Local {
    fn from_report(r: &PlaceReport) -> Local {
        match r.kind {
            ReductionType::Good => Local::Good(r.trace),
            ReductionType::MultSplit => Local::Mult(1),
            ReductionType::MultNonsplit => Local::Mult(-1),
            ReductionType::Additive => Local::Additive,
        }
    }

    fn power(self, qv: u64, j: u32) -> Result<i128> {
        match self {
            Local::Good(a) => trace_power(a, qv, j),
            Local::Mult(s) => Ok(if s < 0 && j % 2 == 1 { -1 } else { 1 }),
            Local::Additive => Ok(0),
        }
    }
}

/// Local data at every place of `P^1`, grown one degree at a time.
struct PlaceTable<'a> {
    surface: &'a SurfaceFq,
    summary: &'a ConductorSummary,
    by_degree: Vec<Vec<Local>>,
}

impl<'a> PlaceTable<'a> {
    fn new(surface: &'a SurfaceFq, summary: &'a ConductorSummary) -> Self {
        PlaceTable { surface, summary, by_degree: Vec::new() }
    }

    fn known_places(&self, d: usize) -> impl Iterator<Item = (&FpPoly, Local)> {
        self.summary
            .places
            .iter()
            .chain(&self.summary.removable)
            .filter_map(move |r| match &r.place {
                Place::Finite(pi) if pi.degree_or_zero() == d => Some((pi, Local::from_report(r))),
                _ => None,
            })
    }

    fn extend_to(&mut self, kmax: usize) -> Result<()> {
        while self.by_degree.len() < kmax {
            let d = self.by_degree.len() + 1;
            let row = if d == 1 { self.degree_one() } else { self.degree(d)? };
            self.by_degree.push(row);
        }
        Ok(())
    }

    fn degree_one(&self) -> Vec<Local> {
        let s = self.surface;
        let l = s.modulus();
        let field = PrimeField::new(l).expect("surface modulus is a valid prime");
        let disc = s.discriminant();
        let row = trace_row(s.a(), s.b(), &field);
        let mut out: Vec<Local> = Vec::with_capacity(l as usize + 1);
        for (t, tr) in row.iter().enumerate() {
            let t = t as u64;
            if disc.eval(t) != 0 {
                out.push(Local::Good(tr.trace));
            } else {
                let local = self
                    .known_places(1)
                    .find(|(pi, _)| pi.eval(t) == 0)
                    .map(|(_, loc)| loc)
                    .expect("every root of the discriminant is classified");
                out.push(local);
            }
        }
        out.push(Local::from_report(&self.summary.infinity));
        out
    }

    fn degree(&self, d: usize) -> Result<Vec<Local>> {
        let s = self.surface;
        let l = s.modulus();
        let q = crate::arith::checked_pow(l, d as u32)
            .filter(|&q| q <= TABLE_LIMIT)
            .ok_or_else(|| Error::BudgetExceeded(format!("places of degree {d} over F_{l}")))?;
        let field = cached_extension(l, d as u32)?;
        if !field.has_tables() {
            return Err(Error::BudgetExceeded(format!("F_{l}^{d} has no log tables")));
        }
        let known: Vec<(&FpPoly, Local)> = self.known_places(d).collect();
        let qm1 = q - 1;
        let four = field.from_int(4);
        let tw7 = field.from_int(27);
        let mut out = Vec::new();
        'orbit: for i in 1..qm1 {
            // i is the least exponent of an orbit of size exactly d
            let mut j = i;
            for _ in 1..d {
                j = crate::arith::mul_mod(j, l, qm1);
                if j <= i {
                    continue 'orbit;
                }
            }
            let theta = field.exp(i as u32).expect("tables present");
            let a = field.eval_poly(s.a(), theta);
            let b = field.eval_poly(s.b(), theta);
            let disc = field.add(
                field.mul(four, field.mul(a, field.mul(a, a))),
                field.mul(tw7, field.mul(b, b)),
            );
            if disc != field.zero() {
                out.push(Local::Good(trace(field.as_ref(), a, b).trace));
            } else {
                let local = known
                    .iter()
                    .find(|(pi, _)| field.eval_poly(pi, theta) == field.zero())
                    .map(|&(_, loc)| loc)
                    .ok_or_else(|| {
                        Error::InconsistentData(format!("unclassified place of degree {d}"))
                    })?;
                out.push(local);
            }
        }
        Ok(out)
    }

    fn power_sum(&self, k: usize) -> Result<i128> {
        let l = self.surface.modulus();
        let mut c: i128 = 0;
        for d in (1..=k).filter(|d| k % d == 0) {
            let qv = l.pow(d as u32);
            let j = (k / d) as u32;
            let mut part: i128 = 0;
            for loc in &self.by_degree[d - 1] {
                part += loc.power(qv, j)?;
            }
            c += d as i128 * part;
        }
        Ok(c)
    }
}

/// Power sums `c_1, ..., c_kmax`.
pub fn power_sums(s: &SurfaceFq, summary: &ConductorSummary, kmax: usize) -> Result<Vec<i128>> {
    if s.is_isotrivial() {
        return Err(Error::IsotrivialSurface);
    }
    let mut table = PlaceTable::new(s, summary);
    table.extend_to(kmax)?;
    (1..=kmax).map(|k| table.power_sum(k)).collect()
}

/// Exact integer L-polynomial `L(u) = sum coeffs[j] u^j` with reciprocal
/// roots of absolute value `q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LPolynomial {
    q: u64,
    coeffs: Vec<BigInt>,
    sign: i8,
}

impl LPolynomial {
    /// Validates `L(0) = 1`, the functional equation and the Weil bound.
    pub fn new(q: u64, coeffs: Vec<BigInt>) -> Result<Self> {
        if coeffs.first() != Some(&BigInt::one()) {
            return Err(Error::InconsistentData("L(0) != 1".into()));
        }
        let sign = fe_sign(q, &coeffs)?;
        weil_check(q, &coeffs)?;
        Ok(LPolynomial { q, coeffs, sign })
    }

    pub fn one(q: u64) -> Self {
        LPolynomial { q, coeffs: vec![BigInt::one()], sign: 1 }
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    /// Sign `epsilon` of the functional equation.
    pub fn sign(&self) -> i8 {
        self.sign
    }

    /// Ascending coefficients joined by commas, e.g. `1,-5`.
    pub fn to_text(&self) -> String {
        self.coeffs.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",")
    }
}

impl fmt::Display for LPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

fn fe_sign(q: u64, c: &[BigInt]) -> Result<i8> {
    let n = c.len() - 1;
    let q = BigInt::from(q);
    'sign: for eps in [1i8, -1] {
        for j in 0..=n / 2 {
            let rhs = q.pow((n - 2 * j) as u32) * &c[j] * eps;
            if c[n - j] != rhs {
                continue 'sign;
            }
        }
        return Ok(eps);
    }
    Err(Error::InconsistentData("functional equation fails for both signs".into()))
}

/// Sign `epsilon` with `u^n q^n L(1/(q^2 u)) = epsilon L(u)`.
pub fn functional_equation_check(l: &LPolynomial) -> Result<i8> {
    fe_sign(l.q, &l.coeffs)
}

/// Numerical check that every root of `L(z / q)` lies on the unit circle,
/// run on the square-free part so repeated roots converge cleanly.
pub fn weil_check(q: u64, coeffs: &[BigInt]) -> Result<()> {
    let n = coeffs.len() - 1;
    if n == 0 {
        return Ok(());
    }
    let qb = BigInt::from(q);
    let p: qpoly::QPoly = coeffs
        .iter()
        .enumerate()
        .map(|(j, c)| BigRational::new(c.clone(), qb.pow(j as u32)))
        .collect();
    let g = qpoly::gcd(&p, &qpoly::derivative(&p));
    let sf = qpoly::monic(qpoly::div_rem(&p, &g).0);
    let cs: Vec<Complex64> = sf
        .iter()
        .map(|c| Complex64::new(c.to_f64().unwrap_or(f64::NAN), 0.0))
        .collect();
    let found = crate::roots::roots(&cs);
    for z in &found.roots {
        if (z.norm() - 1.0).abs() > WEIL_TOLERANCE {
            return Err(Error::InconsistentData(format!(
                "reciprocal root of size {} q",
                1.0 / z.norm()
            )));
        }
    }
    Ok(())
}

fn newton_coeffs(c: &[i128], n: usize) -> Result<Vec<BigInt>> {
    // e_k elementary symmetric in the reciprocal roots, p_i = -c_i
    let p: Vec<BigInt> = c.iter().take(n).map(|&v| -BigInt::from(v)).collect();
    let mut e = vec![BigInt::one()];
    for k in 1..=n {
        let mut acc = BigInt::zero();
        for i in 1..=k {
            let term = &e[k - i] * &p[i - 1];
            if i % 2 == 1 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        let (quo, rem) = acc.div_rem(&BigInt::from(k));
        if !rem.is_zero() {
            return Err(Error::InconsistentData(format!("non-integral e_{k}")));
        }
        e.push(quo);
    }
    Ok(e.into_iter()
        .enumerate()
        .map(|(j, v)| if j % 2 == 1 { -v } else { v })
        .collect())
}

/// `L` of degree `n` from the power sums `c_1, ..., c_n`.
pub fn newton_lpoly(c: &[i128], q: u64, n: usize) -> Result<LPolynomial> {
    if c.len() < n {
        return Err(Error::InconsistentData(format!(
            "{} power sums for degree {n}",
            c.len()
        )));
    }
    if n == 0 {
        return Ok(LPolynomial::one(q));
    }
    LPolynomial::new(q, newton_coeffs(c, n)?)
}

/// Multiplicity of `1 - q u` in `L`.
pub fn analytic_rank(l: &LPolynomial) -> u32 {
    let q = BigInt::from(l.q);
    let mut c = l.coeffs.clone();
    let mut rank = 0;
    while c.len() > 1 {
        // L = (1 - q u) M: m_0 = c_0, m_j = c_j + q m_{j-1}
        let n = c.len() - 1;
        let mut m = Vec::with_capacity(n);
        m.push(c[0].clone());
        for j in 1..n {
            let v = &c[j] + &q * &m[j - 1];
            m.push(v);
        }
        if c[n].clone() + &q * &m[n - 1] != BigInt::zero() {
            break;
        }
        c = m;
        rank += 1;
    }
    rank
}

fn complete_by_symmetry(half: &[BigInt], q: u64, n: usize, eps: i8) -> Vec<BigInt> {
    let q = BigInt::from(q);
    let h = half.len() - 1;
    let mut out = half.to_vec();
    for j in h + 1..=n {
        out.push(q.pow((2 * j - n) as u32) * &half[n - j] * eps);
    }
    out
}

/// The L-polynomial of a non-isotrivial surface.
pub fn lpolynomial(s: &SurfaceFq, summary: &ConductorSummary, strategy: Strategy) -> Result<LPolynomial> {
    if s.is_isotrivial() {
        return Err(Error::IsotrivialSurface);
    }
    let q = s.modulus();
    let n = usize::try_from(summary.lpoly_degree)
        .map_err(|_| Error::InconsistentData("negative L-polynomial degree".into()))?;
    if n == 0 {
        return Ok(LPolynomial::one(q));
    }
    let mut table = PlaceTable::new(s, summary);
    if strategy == Strategy::Full {
        table.extend_to(n)?;
        let c: Vec<i128> = (1..=n).map(|k| table.power_sum(k)).collect::<Result<_>>()?;
        return newton_lpoly(&c, q, n);
    }
    let mut known = n / 2;
    table.extend_to(known)?;
    let mut c: Vec<i128> = (1..=known).map(|k| table.power_sum(k)).collect::<Result<_>>()?;
    loop {
        let prefix = newton_coeffs(&c, known)?;
        let h = n / 2;
        let candidates: Vec<LPolynomial> = [1i8, -1]
            .into_iter()
            .filter_map(|eps| {
                let full = complete_by_symmetry(&prefix[..=h], q, n, eps);
                if full[..=known] != prefix[..] {
                    return None;
                }
                LPolynomial::new(q, full).ok().filter(|l| l.sign == eps)
            })
            .collect();
        match candidates.len() {
            0 => return Err(Error::InconsistentData("no sign passes the Weil check".into())),
            1 => return Ok(candidates.into_iter().next().unwrap()),
            _ if known >= n => unreachable!("full power sums determine L"),
            _ => {
                known += 1;
                table.extend_to(known)?;
                c.push(table.power_sum(known)?);
            }
        }
    }
}

/// A section `(x(T), y(T))` with `y^2 = x^3 + A x + B`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Section {
    pub x: FpPoly,
    pub y: FpPoly,
}

impl fmt::Display for Section {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// Every section with `deg x <= max_deg` and `y != 0`, one per `x`.
pub fn find_sections(s: &SurfaceFq, max_deg: usize) -> Result<Vec<Section>> {
    let l = s.modulus();
    let size = (l as u128)
        .checked_pow(max_deg as u32 + 1)
        .unwrap_or(u128::MAX);
    if size > SECTION_BUDGET {
        return Err(Error::SearchTooLarge { size, budget: SECTION_BUDGET });
    }
    let mut out = Vec::new();
    let mut digits = vec![0u64; max_deg + 1];
    for _ in 0..size {
        let x = FpPoly::new(l, digits.clone());
        let f = x.square().mul(&x).add(&s.a().mul(&x)).add(s.b());
        if !f.is_zero() {
            if let Some(y) = f.sqrt() {
                out.push(Section { x, y });
            }
        }
        for d in digits.iter_mut() {
            *d += 1;
            if *d < l {
                break;
            }
            *d = 0;
        }
    }
    Ok(out)
}

/// Torsion screen: specialise at up to three good fibres at generators of
/// the smallest `F_{l^d}` with more than 150 elements; any specialised order above
/// [`TORSION_ORDER_BOUND`] proves the section has infinite order.
pub fn is_non_torsion(s: &SurfaceFq, sec: &Section) -> Result<bool> {
    let l = s.modulus();
    let mut d = 1;
    while l.pow(d) <= 150 {
        d += 1;
    }
    let field = cached_extension(l, d)?;
    let disc = s.discriminant();
    let mut tried = 0;
    for t in 0..field.order() {
        if field.element_degree(t) != d || field.eval_poly(&disc, t) == field.zero() {
            continue;
        }
        let a = field.eval_poly(s.a(), t);
        let x = field.eval_poly(&sec.x, t);
        let y = field.eval_poly(&sec.y, t);
        if small_point_order(field.as_ref(), a, x, y, TORSION_ORDER_BOUND).is_none() {
            return Ok(true);
        }
        tried += 1;
        if tried == 3 {
            break;
        }
    }
    Ok(false)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankReport {
    pub analytic_rank: u32,
    /// Non-torsion sections found by [`find_sections`]: evidence for a
    /// positive rank, not a rank.
    pub sections_found: u32,
}

/// Everything computed for one surface.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurfaceAnalysis {
    pub surface: SurfaceFq,
    pub summary: ConductorSummary,
    pub lpoly: LPolynomial,
    pub rank: RankReport,
    /// `epsilon = (-1)^rank`: conjugate pairs contribute `+1` to the sign,
    /// so only the roots at `u = 1/q` can flip it.
    pub parity_ok: bool,
}

pub fn analyze(s: &SurfaceFq, strategy: Strategy, section_degree: Option<usize>) -> Result<SurfaceAnalysis> {
    let summary = s.classify_places();
    let lpoly = lpolynomial(s, &summary, strategy)?;
    let analytic_rank = analytic_rank(&lpoly);
    let sections_found = match section_degree {
        Some(d) => {
            let mut count = 0;
            for sec in find_sections(s, d)? {
                if is_non_torsion(s, &sec)? {
                    count += 1;
                }
            }
            count
        }
        None => 0,
    };
    let parity_ok = (lpoly.sign() == 1) == (analytic_rank % 2 == 0);
    Ok(SurfaceAnalysis {
        surface: s.clone(),
        summary,
        lpoly,
        rank: RankReport { analytic_rank, sections_found },
        parity_ok,
    })
}

/// Largest absolute coefficient, handy for reports.
pub fn coefficient_height(l: &LPolynomial) -> BigInt {
    l.coeffs.iter().map(|c| c.abs()).max().unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::{prop_assert, prop_assert_eq, proptest, ProptestConfig};

    fn fq(p: u64, a: &[i64], b: &[i64]) -> SurfaceFq {
        SurfaceFq::from_i64(p, a, b).unwrap()
    }

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&c| BigInt::from(c)).collect()
    }

    // brute force over P^1(F_l): minimal model by Taylor shift, projective
    // count by enumerating (x, y)
    fn brute_c1(s: &SurfaceFq) -> i64 {
        let l = s.modulus();
        let count = |a: u64, b: u64| -> i64 {
            let mut n = 1i64;
            for x in 0..l {
                for y in 0..l {
                    if (y * y) % l == (x * x % l * x + a * x + b) % l {
                        n += 1;
                    }
                }
            }
            l as i64 + 1 - n
        };
        let at = |a: &FpPoly, b: &FpPoly| -> i64 {
            let (mut a, mut b) = (a.clone(), b.clone());
            let low = |p: &FpPoly| {
                if p.is_zero() {
                    usize::MAX
                } else {
                    p.coeffs().iter().take_while(|&&c| c == 0).count()
                }
            };
            while low(&a) >= 4 && low(&b) >= 6 {
                a = FpPoly::new(l, a.coeffs().iter().skip(4).copied().collect());
                b = FpPoly::new(l, b.coeffs().iter().skip(6).copied().collect());
            }
            count(a.coeff(0), b.coeff(0))
        };
        let mut total = 0;
        for t in 0..l {
            total += at(&s.a().shift(t), &s.b().shift(t));
        }
        let (ai, bi) = s.model_at_infinity();
        total + at(&ai, &bi)
    }

    #[test]
    fn worked_power_sums() {
        let s = fq(5, &[1], &[0, 1]);
        assert_eq!(power_sums(&s, &s.classify_places(), 1).unwrap(), vec![0]);
        let s = fq(5, &[0, 1], &[0, 0, 1]);
        assert_eq!(power_sums(&s, &s.classify_places(), 1).unwrap(), vec![-5]);
        assert!(power_sums(&s, &s.classify_places(), 0).unwrap().is_empty());
        let iso = fq(5, &[0, 0, 1], &[0, 0, 0, 1]);
        assert_eq!(
            power_sums(&iso, &iso.classify_places(), 1),
            Err(Error::IsotrivialSurface)
        );
    }

    #[test]
    fn first_power_sum_matches_brute_force() {
        for p in [5u64, 7] {
            for idx in 0..p.pow(4) {
                let c: Vec<i64> = (0..4).map(|i| ((idx / p.pow(i)) % p) as i64).collect();
                let Ok(s) = SurfaceFq::from_i64(p, &c[..2], &c[2..]) else { continue };
                if s.is_isotrivial() {
                    continue;
                }
                let got = power_sums(&s, &s.classify_places(), 1).unwrap()[0];
                assert_eq!(got as i64, brute_c1(&s), "{s} over F_{p}");
            }
        }
    }

    #[test]
    fn newton_examples() {
        let l = newton_lpoly(&[0, -50], 5, 2).unwrap();
        assert_eq!(l.coeffs(), &ints(&[1, 0, -25])[..]);
        assert_eq!(l.sign(), -1);
        assert_eq!(analytic_rank(&l), 1);
        let l = newton_lpoly(&[-5], 5, 1).unwrap();
        assert_eq!(l.to_text(), "1,-5");
        assert_eq!(functional_equation_check(&l), Ok(-1));
        assert_eq!(analytic_rank(&l), 1);
        let l = newton_lpoly(&[], 5, 0).unwrap();
        assert_eq!(l.to_text(), "1");
        assert_eq!(functional_equation_check(&l), Ok(1));
        assert_eq!(analytic_rank(&l), 0);
        // root of size 1 violates the Weil bound
        assert!(matches!(newton_lpoly(&[-1], 5, 1), Err(Error::InconsistentData(_))));
        // non-integral e_2
        assert!(matches!(newton_lpoly(&[1, 0], 5, 2), Err(Error::InconsistentData(_))));
    }

    #[test]
    fn double_root_rank() {
        // (1 - 7u)^2 (1 + 49 u^2)
        let c = ints(&[1, -14, 98, -686, 2401]);
        let l = LPolynomial::new(7, c).unwrap();
        assert_eq!(analytic_rank(&l), 2);
        assert_eq!(l.sign(), 1);
    }

    #[test]
    fn worked_lpolynomials() {
        let a = analyze(&fq(5, &[1], &[0, 1]), Strategy::Full, Some(2)).unwrap();
        assert_eq!(a.summary.deg_n, 4);
        assert_eq!(a.lpoly.to_text(), "1");
        assert_eq!(a.rank.analytic_rank, 0);
        assert_eq!(a.rank.sections_found, 0);
        let s = fq(5, &[0, 1], &[0, 0, 1]);
        let a = analyze(&s, Strategy::Full, Some(1)).unwrap();
        assert_eq!(a.summary.deg_n, 5);
        assert_eq!(a.lpoly.to_text(), "1,-5");
        assert_eq!(a.rank.analytic_rank, 1);
        let secs = find_sections(&s, 1).unwrap();
        let target = Section { x: FpPoly::zero(5), y: FpPoly::x(5) };
        assert!(secs.contains(&target));
        assert!(is_non_torsion(&s, &target).unwrap());
        assert!(a.parity_ok);
    }

    #[test]
    fn section_budget() {
        let s = fq(101, &[1], &[0, 1]);
        assert!(matches!(find_sections(&s, 4), Err(Error::SearchTooLarge { .. })));
        assert!(find_sections(&fq(5, &[1], &[0, 1]), 2).unwrap().iter().all(|sec| {
            !is_non_torsion(&fq(5, &[1], &[0, 1]), sec).unwrap()
        }));
    }

    #[test]
    fn strategies_agree() {
        for (p, a, b) in [
            (5u64, vec![1i64, 2, 1], vec![0i64, 1, 3]),
            (7, vec![0, 1], vec![1, 0, 2]),
            (7, vec![3, 0, 1], vec![1, 1, 1]),
            (5, vec![1, 1, 0, 1], vec![2, 0, 1, 1]),
        ] {
            let s = fq(p, &a, &b);
            let sum = s.classify_places();
            let full = lpolynomial(&s, &sum, Strategy::Full).unwrap();
            let fe = lpolynomial(&s, &sum, Strategy::FunctionalEquation).unwrap();
            assert_eq!(full, fe, "{s}");
            assert_eq!(full.degree() as i64, sum.lpoly_degree);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn invariants_on_random_surfaces(
            pi in 0usize..2,
            a in proptest::collection::vec(0i64..7, 1..4),
            b in proptest::collection::vec(0i64..7, 1..4),
        ) {
            let p = [5u64, 7][pi];
            let Ok(s) = SurfaceFq::from_i64(p, &a, &b) else { return Ok(()) };
            if s.is_isotrivial() {
                return Ok(());
            }
            let an = analyze(&s, Strategy::FunctionalEquation, None).unwrap();
            prop_assert_eq!(an.lpoly.degree() as i64, an.summary.lpoly_degree);
            prop_assert!(an.rank.analytic_rank as usize <= an.lpoly.degree());
            prop_assert!(an.parity_ok);
        }
    }
}
