//! Elliptic surfaces `y^2 = x^3 + A(T) x + B(T)` over `Q` and over `F_l`.
//!
//! Over `F_l` each place of `P^1` dividing the discriminant is minimalised
//! (`A -> A / pi^4`, `B -> B / pi^6` while possible) and classified as good,
//! multiplicative (split or not) or additive. Since `l > 3` additive
//! reduction is tame, so conductor exponents are `0`, `1` or `2`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ff::{ExtField, PrimeField};
use crate::fpoly::{residue_chi, FpPoly};
use crate::point_count::trace;

fn trim_i64(mut v: Vec<i64>) -> Vec<i64> {
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

fn zmul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn zadd(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let n = a.len().max(b.len());
    let mut out: Vec<BigInt> = (0..n)
        .map(|i| {
            a.get(i).cloned().unwrap_or_default() + b.get(i).cloned().unwrap_or_default()
        })
        .collect();
    while out.last().is_some_and(|c| c.is_zero()) {
        out.pop();
    }
    out
}

fn zscale(a: &[BigInt], c: i64) -> Vec<BigInt> {
    let c = BigInt::from(c);
    a.iter().map(|x| x * &c).collect()
}

fn big(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&c| BigInt::from(c)).collect()
}

fn format_coeffs<T: fmt::Display>(c: &[T]) -> String {
    if c.is_empty() {
        "0".to_string()
    } else {
        c.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
    }
}

fn parse_coeffs(s: &str) -> Result<Vec<i64>> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|c| {
            let c = c.trim();
            c.parse::<i64>().map_err(|e| match e.kind() {
                std::num::IntErrorKind::PosOverflow | std::num::IntErrorKind::NegOverflow => {
                    Error::Overflow(format!("coefficient {c}"))
                }
                _ => Error::Parse(format!("bad coefficient {c:?}")),
            })
        })
        .collect()
}

/// Parse the wire format `A=c0,c1,...;B=c0,c1,...` (ascending degree).
pub fn parse_surface_text(s: &str) -> Result<(Vec<i64>, Vec<i64>)> {
    let (a_part, b_part) = s
        .trim()
        .split_once(';')
        .ok_or_else(|| Error::Parse(format!("expected A=..;B=.., got {s:?}")))?;
    let a = a_part
        .trim()
        .strip_prefix("A=")
        .ok_or_else(|| Error::Parse(format!("missing A= in {s:?}")))?;
    let b = b_part
        .trim()
        .strip_prefix("B=")
        .ok_or_else(|| Error::Parse(format!("missing B= in {s:?}")))?;
    Ok((trim_i64(parse_coeffs(a)?), trim_i64(parse_coeffs(b)?)))
}

/// Elliptic surface over `Q` with integer coefficient polynomials.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SurfaceQ {
    a: Vec<i64>,
    b: Vec<i64>,
}

impl SurfaceQ {
    pub fn new(a: Vec<i64>, b: Vec<i64>) -> Result<Self> {
        let s = SurfaceQ { a: trim_i64(a), b: trim_i64(b) };
        if s.discriminant().is_empty() {
            return Err(Error::DegenerateSurface);
        }
        Ok(s)
    }

    pub fn a(&self) -> &[i64] {
        &self.a
    }

    pub fn b(&self) -> &[i64] {
        &self.b
    }

    /// `-16 (4 A^3 + 27 B^2)`, ascending coefficients; empty if zero.
    pub fn discriminant(&self) -> Vec<BigInt> {
        discriminant_q(&self.a, &self.b)
    }

    pub fn reduce_mod(&self, l: u64) -> Result<Reduction> {
        let field = PrimeField::new(l)?;
        let a = FpPoly::from_i64(field.modulus(), &self.a);
        let b = FpPoly::from_i64(field.modulus(), &self.b);
        let original = (self.a.len().saturating_sub(1), self.b.len().saturating_sub(1));
        let reduced = (a.degree_or_zero(), b.degree_or_zero());
        let degree_drop = original != reduced || (a.is_zero() != self.a.is_empty())
            || (b.is_zero() != self.b.is_empty());
        let surface = SurfaceFq::new(a, b).map_err(|e| match e {
            Error::DegenerateSurface => Error::BadSurfaceReduction(l),
            e => e,
        })?;
        Ok(Reduction { surface, original_degrees: original, degree_drop })
    }

    pub fn is_isotrivial(&self) -> bool {
        if self.a.is_empty() || self.b.is_empty() {
            return true;
        }
        let a3 = zmul(&zmul(&big(&self.a), &big(&self.a)), &big(&self.a));
        let b2 = zmul(&big(&self.b), &big(&self.b));
        let la = a3.last().unwrap().clone();
        let lb = b2.last().unwrap().clone();
        // A^3 and B^2 proportional: A^3 lc(B^2) = B^2 lc(A^3)
        a3.len() == b2.len() && a3.iter().zip(&b2).all(|(x, y)| x * &lb == y * &la)
    }

    /// Largest absolute coefficient of `A` and `B`.
    pub fn height(&self) -> u64 {
        self.a
            .iter()
            .chain(&self.b)
            .map(|c| c.unsigned_abs())
            .max()
            .unwrap_or(0)
    }
}

impl fmt::Display for SurfaceQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "A={};B={}", format_coeffs(&self.a), format_coeffs(&self.b))
    }
}

impl FromStr for SurfaceQ {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let (a, b) = parse_surface_text(s)?;
        SurfaceQ::new(a, b)
    }
}

pub fn discriminant_q(a: &[i64], b: &[i64]) -> Vec<BigInt> {
    let (a, b) = (big(a), big(b));
    let a3 = zmul(&zmul(&a, &a), &a);
    let b2 = zmul(&b, &b);
    let inner = zadd(&zscale(&a3, 4), &zscale(&b2, 27));
    let mut d = zscale(&inner, -16);
    while d.last().is_some_and(|c| c.is_zero()) {
        d.pop();
    }
    d
}

/// Result of reducing a surface over `Q` modulo `l`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reduction {
    pub surface: SurfaceFq,
    /// `(deg A, deg B)` before reduction.
    pub original_degrees: (usize, usize),
    /// Whether some leading coefficient was divisible by `l`.
    pub degree_drop: bool,
}

/// Elliptic surface over `F_l`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SurfaceFq {
    p: u64,
    a: FpPoly,
    b: FpPoly,
}

pub fn discriminant_fp(a: &FpPoly, b: &FpPoly) -> FpPoly {
    let p = a.modulus();
    let inner = a.square().mul(a).scale(4).add(&b.square().scale(27));
    inner.scale(crate::arith::reduce_i64(-16, p))
}

impl SurfaceFq {
    pub fn new(a: FpPoly, b: FpPoly) -> Result<Self> {
        let p = a.modulus();
        if a.modulus() != b.modulus() {
            return Err(Error::InconsistentData("coefficient fields differ".into()));
        }
        PrimeField::new(p)?;
        if discriminant_fp(&a, &b).is_zero() {
            return Err(Error::DegenerateSurface);
        }
        Ok(SurfaceFq { p, a, b })
    }

    pub fn from_i64(p: u64, a: &[i64], b: &[i64]) -> Result<Self> {
        Self::new(FpPoly::from_i64(p, a), FpPoly::from_i64(p, b))
    }

    pub fn parse(p: u64, s: &str) -> Result<Self> {
        let (a, b) = parse_surface_text(s)?;
        Self::from_i64(p, &a, &b)
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn a(&self) -> &FpPoly {
        &self.a
    }

    pub fn b(&self) -> &FpPoly {
        &self.b
    }

    pub fn discriminant(&self) -> FpPoly {
        discriminant_fp(&self.a, &self.b)
    }

    pub fn is_isotrivial(&self) -> bool {
        if self.a.is_zero() || self.b.is_zero() {
            return true;
        }
        let a3 = self.a.square().mul(&self.a);
        let b2 = self.b.square();
        a3.scale(b2.lead()) == b2.scale(a3.lead())
    }

    /// The surface pulled back along `T -> T + c`.
    pub fn shift(&self, c: u64) -> Self {
        SurfaceFq { p: self.p, a: self.a.shift(c), b: self.b.shift(c) }
    }

    /// Twist exponent at infinity: least `e` making `T^{4e} A(1/T)` and
    /// `T^{6e} B(1/T)` polynomials.
    pub fn infinity_twist(&self) -> usize {
        let da = self.a.degree_or_zero();
        let db = self.b.degree_or_zero();
        da.div_ceil(4).max(db.div_ceil(6))
    }

    /// Model at infinity in the coordinate `S = 1/T`.
    pub fn model_at_infinity(&self) -> (FpPoly, FpPoly) {
        let e = self.infinity_twist();
        let flip = |poly: &FpPoly, w: usize| {
            let mut c = vec![0u64; w + 1];
            for (i, &v) in poly.coeffs().iter().enumerate() {
                c[w - i] = v;
            }
            FpPoly::new(self.p, c)
        };
        (flip(&self.a, 4 * e), flip(&self.b, 6 * e))
    }

    pub fn classify_places(&self) -> ConductorSummary {
        classify_places(self)
    }
}

impl fmt::Display for SurfaceFq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "A={};B={}", format_coeffs(self.a.coeffs()), format_coeffs(self.b.coeffs()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Place {
    Finite(FpPoly),
    Infinity,
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Finite(pi) => write!(f, "{pi}"),
            Place::Infinity => write!(f, "inf"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReductionType {
    Good,
    MultSplit,
    MultNonsplit,
    Additive,
}

impl ReductionType {
    pub fn conductor_exponent(self) -> u32 {
        match self {
            ReductionType::Good => 0,
            ReductionType::MultSplit | ReductionType::MultNonsplit => 1,
            ReductionType::Additive => 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlaceReport {
    pub place: Place,
    pub degree: usize,
    pub kind: ReductionType,
    pub cond_exp: u32,
    /// Local trace: Frobenius trace of the fibre over the residue field for
    /// good places, `+1 / -1 / 0` for split / non-split / additive.
    pub trace: i64,
    /// Valuation of the minimal discriminant.
    pub disc_valuation: u32,
    /// Minimal model coefficients in the local coordinate (`S = 1/T` at
    /// infinity).
    pub min_a: FpPoly,
    pub min_b: FpPoly,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConductorSummary {
    /// Bad places (`cond_exp > 0`), finite places first in
    /// (degree, coefficient) order, then infinity.
    pub places: Vec<PlaceReport>,
    /// Finite places dividing the naive discriminant whose minimal model is
    /// good.
    pub removable: Vec<PlaceReport>,
    /// The place at infinity, good or bad.
    pub infinity: PlaceReport,
    /// `sum f_v deg v`.
    pub deg_n: u32,
    /// `deg_n - 4`; negative only for isotrivial surfaces.
    pub lpoly_degree: i64,
}

impl ConductorSummary {
    /// Multiset of `(degree, type)` over bad places, sorted.
    pub fn type_multiset(&self) -> Vec<(usize, u32, ReductionType)> {
        let mut v: Vec<_> = self
            .places
            .iter()
            .map(|r| (r.degree, r.cond_exp, r.kind))
            .collect();
        v.sort_by_key(|&(d, f, k)| (d, f, k as u8));
        v
    }
}

fn val(poly: &FpPoly, pi: &FpPoly) -> Option<u32> {
    poly.valuation(pi).map(|(v, _)| v)
}

fn classify_at(a: &FpPoly, b: &FpPoly, pi: &FpPoly, place: Place) -> PlaceReport {
    let p = a.modulus();
    let (mut a, mut b) = (a.clone(), b.clone());
    let pi4 = pi.pow(4);
    let pi6 = pi.pow(6);
    loop {
        let va = val(&a, pi).unwrap_or(u32::MAX);
        let vb = val(&b, pi).unwrap_or(u32::MAX);
        if va >= 4 && vb >= 6 {
            a = a.exact_div(&pi4).expect("valuation >= 4");
            b = b.exact_div(&pi6).expect("valuation >= 6");
        } else {
            break;
        }
    }
    let disc = discriminant_fp(&a, &b);
    let vd = val(&disc, pi).expect("nonzero discriminant");
    let va = val(&a, pi).unwrap_or(u32::MAX);
    let degree = pi.degree_or_zero();
    let (kind, trace) = if vd == 0 {
        (ReductionType::Good, good_fibre_trace(&a, &b, pi))
    } else if va == 0 {
        // double root x0 = -3b/(2a); split iff chi(3 x0) = chi(-2ab) = 1
        let z = a.mul(&b).scale(crate::arith::reduce_i64(-2, p));
        if residue_chi(&z, pi) == 1 {
            (ReductionType::MultSplit, 1)
        } else {
            (ReductionType::MultNonsplit, -1)
        }
    } else {
        (ReductionType::Additive, 0)
    };
    PlaceReport {
        place,
        degree,
        kind,
        cond_exp: kind.conductor_exponent(),
        trace,
        disc_valuation: vd,
        min_a: a,
        min_b: b,
    }
}

/// Trace of the good fibre at `pi` over the residue field `F_l[T]/(pi)`.
fn good_fibre_trace(a: &FpPoly, b: &FpPoly, pi: &FpPoly) -> i64 {
    let p = pi.modulus();
    if pi.degree_or_zero() == 1 {
        let field = PrimeField::new(p).expect("valid prime");
        let t = crate::arith::sub_mod(0, pi.monic().coeff(0), p);
        return trace(&field, a.eval(t), b.eval(t)).trace;
    }
    let field = ExtField::with_modulus(pi).expect("place is irreducible");
    let ar = field.from_coordinates(a.rem(pi).coeffs());
    let br = field.from_coordinates(b.rem(pi).coeffs());
    trace(&field, ar, br).trace
}

pub fn classify_places(s: &SurfaceFq) -> ConductorSummary {
    let p = s.modulus();
    let disc = s.discriminant();
    let mut places = Vec::new();
    let mut removable = Vec::new();
    for (pi, _) in disc.factor() {
        let r = classify_at(s.a(), s.b(), &pi, Place::Finite(pi.clone()));
        if r.cond_exp > 0 {
            places.push(r);
        } else {
            removable.push(r);
        }
    }
    let (ainf, binf) = s.model_at_infinity();
    let infinity = classify_at(&ainf, &binf, &FpPoly::x(p), Place::Infinity);
    if infinity.cond_exp > 0 {
        places.push(infinity.clone());
    }
    let deg_n: u32 = places.iter().map(|r| r.cond_exp * r.degree as u32).sum();
    ConductorSummary {
        places,
        removable,
        infinity,
        deg_n,
        lpoly_degree: deg_n as i64 - 4,
    }
}

/// Signed magnitude helper for tests and reports.
pub fn max_abs(coeffs: &[BigInt]) -> BigInt {
    coeffs.iter().map(|c| c.abs()).max().unwrap_or_default()
}
