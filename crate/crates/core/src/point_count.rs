//! Frobenius traces of `y^2 = x^3 + a x + b` over finite fields.
//!
//! All paths use the projective point count of the (possibly singular)
//! cubic, so a split node has trace `+1`, a non-split node `-1` and a cusp
//! `0`.

use std::collections::HashMap;
use std::hash::{Hash, Hasher};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::arith::{factor, isqrt, lcm};
use crate::error::{Error, Result};
use crate::ff::{CharTable, FiniteField, PrimeField};
use crate::fpoly::FpPoly;

/// Field size above which [`trace`] switches from the character sum to
/// baby-step giant-step.
pub const NAIVE_LIMIT: u64 = 1_000_000;

/// Extra random points tried by [`trace_bsgs`] before falling back to the
/// character sum.
pub const BSGS_EXTRA_POINTS: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SingularType {
    Smooth,
    NodeSplit,
    NodeNonsplit,
    Cusp,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TraceResult {
    pub trace: i64,
    pub q: u64,
    pub singular_type: SingularType,
}

/// `a^2 <= 4 q`.
pub fn within_hasse(trace: i64, q: u64) -> bool {
    (trace as i128) * (trace as i128) <= 4 * q as i128
}

/// Smooth, or the kind of singular point of the cubic. For a node the
/// tangent slopes at the double root `x0` satisfy `m^2 = 3 x0`, so the
/// node is split iff `3 x0` is a square.
pub fn singular_type<F: FiniteField>(f: &F, a: F::Elem, b: F::Elem) -> SingularType {
    let a3 = f.mul(f.mul(a, a), a);
    let disc = f.add(f.mul(f.from_int(4), a3), f.mul(f.from_int(27), f.mul(b, b)));
    if !f.is_zero(disc) {
        return SingularType::Smooth;
    }
    if f.is_zero(a) {
        return SingularType::Cusp;
    }
    // double root x0 = -3b / (2a)
    let x0 = f.mul(
        f.neg(f.mul(f.from_int(3), b)),
        f.inv(f.mul(f.from_int(2), a)).expect("a != 0"),
    );
    if f.chi(f.mul(f.from_int(3), x0)) == 1 {
        SingularType::NodeSplit
    } else {
        SingularType::NodeNonsplit
    }
}

/// Trace `q + 1 - #E(F_q)` by the character sum `-sum_x chi(x^3 + a x + b)`.
pub fn trace_naive<F: FiniteField>(field: &F, a: F::Elem, b: F::Elem) -> TraceResult {
    let singular_type = singular_type(field, a, b);
    let trace = -field.cubic_char_sum(a, b);
    let q = field.order();
    if singular_type == SingularType::Smooth {
        assert!(within_hasse(trace, q), "Hasse bound violated: a={trace} q={q}");
    }
    TraceResult { trace, q, singular_type }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Point<E> {
    Infinity,
    Affine(E, E),
}

struct Curve<'a, F: FiniteField> {
    f: &'a F,
    a: F::Elem,
}

impl<F: FiniteField> Curve<'_, F> {

    fn double(&self, p: Point<F::Elem>) -> Point<F::Elem> {
        let f = self.f;
        match p {
            Point::Infinity => p,
            Point::Affine(x, y) => {
                if f.is_zero(y) {
                    return Point::Infinity;
                }
                let num = f.add(f.mul(f.from_int(3), f.mul(x, x)), self.a);
                let lam = f.mul(num, f.inv(f.add(y, y)).expect("y != 0"));
                let x3 = f.sub(f.mul(lam, lam), f.add(x, x));
                let y3 = f.sub(f.mul(lam, f.sub(x, x3)), y);
                Point::Affine(x3, y3)
            }
        }
    }

    fn add(&self, p: Point<F::Elem>, q: Point<F::Elem>) -> Point<F::Elem> {
        let f = self.f;
        match (p, q) {
            (Point::Infinity, _) => q,
            (_, Point::Infinity) => p,
            (Point::Affine(x1, y1), Point::Affine(x2, y2)) => {
                if x1 == x2 {
                    if f.is_zero(f.add(y1, y2)) {
                        return Point::Infinity;
                    }
                    return self.double(p);
                }
                let lam = f.mul(f.sub(y2, y1), f.inv(f.sub(x2, x1)).expect("x1 != x2"));
                let x3 = f.sub(f.sub(f.mul(lam, lam), x1), x2);
                let y3 = f.sub(f.mul(lam, f.sub(x1, x3)), y1);
                Point::Affine(x3, y3)
            }
        }
    }

    fn mul(&self, p: Point<F::Elem>, mut n: u64) -> Point<F::Elem> {
        let mut acc = Point::Infinity;
        let mut base = p;
        while n > 0 {
            if n & 1 == 1 {
                acc = self.add(acc, base);
            }
            base = self.double(base);
            n >>= 1;
        }
        acc
    }

    fn random_point<R: Rng>(&self, b: F::Elem, rng: &mut R) -> Point<F::Elem> {
        let f = self.f;
        loop {
            let x = f.element(rng.random_range(0..f.order()));
            let v = f.add(f.mul(f.add(f.mul(x, x), self.a), x), b);
            if let Some(y) = f.sqrt(v) {
                let y = if rng.random::<bool>() { y } else { f.neg(y) };
                return Point::Affine(x, y);
            }
        }
    }

    /// Some positive `m` with `[m]P = O`, searched in `[lo, hi]` by
    /// baby-step giant-step (or smaller, from a collision among baby steps).
    fn find_multiple(&self, p: Point<F::Elem>, lo: u64, hi: u64) -> Option<u64> {
        if p == Point::Infinity {
            return Some(1);
        }
        let s = isqrt(hi - lo) + 1;
        let mut baby: HashMap<F::Elem, (u64, F::Elem)> = HashMap::with_capacity(s as usize);
        let mut cur = Point::Infinity;
        for j in 1..=s {
            cur = self.add(cur, p);
            match cur {
                Point::Infinity => return Some(j),
                Point::Affine(x, y) => {
                    if let Some(&(j0, y0)) = baby.get(&x) {
                        return Some(if y0 == y { j - j0 } else { j + j0 });
                    }
                    baby.insert(x, (j, y));
                }
            }
        }
        let step = cur;
        let mut r = self.mul(p, lo);
        for g in 0..=s {
            let base = lo + g * s;
            match r {
                Point::Infinity => return Some(base),
                Point::Affine(x, y) => {
                    if let Some(&(j, yj)) = baby.get(&x) {
                        let m = if yj == y { base.checked_sub(j) } else { Some(base + j) };
                        if let Some(m) = m.filter(|&m| m > 0) {
                            if self.mul(p, m) == Point::Infinity {
                                return Some(m);
                            }
                        }
                    }
                }
            }
            r = self.add(r, step);
        }
        None
    }

    fn order_from_multiple(&self, p: Point<F::Elem>, mut m: u64) -> u64 {
        for (r, _) in factor(m) {
            while m % r == 0 && self.mul(p, m / r) == Point::Infinity {
                m /= r;
            }
        }
        m
    }
}

fn curve_seed<E: Hash>(q: u64, a: &E, b: &E) -> u64 {
    let mut h = std::collections::hash_map::DefaultHasher::new();
    q.hash(&mut h);
    a.hash(&mut h);
    b.hash(&mut h);
    h.finish()
}

/// Order of the affine point `(x, y)` on `y^2 = x^3 + a x + b` if it is at
/// most `bound`. The point is assumed to lie on the curve.
pub fn small_point_order<F: FiniteField>(
    field: &F,
    a: F::Elem,
    x: F::Elem,
    y: F::Elem,
    bound: u64,
) -> Option<u64> {
    let curve = Curve { f: field, a };
    let p = Point::Affine(x, y);
    let mut acc = p;
    for n in 1..=bound {
        if acc == Point::Infinity {
            return Some(n);
        }
        acc = curve.add(acc, p);
    }
    None
}

/// Group order by baby-step giant-step over the Hasse interval.
///
/// Random points are drawn until the lcm of their orders has a unique
/// multiple in `[q + 1 - 2 sqrt q, q + 1 + 2 sqrt q]`; after
/// [`BSGS_EXTRA_POINTS`] further points without a unique answer the
/// character sum decides. Randomness is seeded from `(q, a, b)`.
pub fn trace_bsgs<F: FiniteField>(field: &F, a: F::Elem, b: F::Elem) -> Result<TraceResult> {
    if singular_type(field, a, b) != SingularType::Smooth {
        return Err(Error::SingularCurve);
    }
    let q = field.order();
    let w = isqrt(4 * q);
    let (lo, hi) = (q + 1 - w, q + 1 + w);
    let curve = Curve { f: field, a };
    let mut rng = crate::rng::stream(curve_seed(q, &a, &b), &[]);
    let mut l = 1u64;
    for _ in 0..=BSGS_EXTRA_POINTS {
        let p = curve.random_point(b, &mut rng);
        let Some(m) = curve.find_multiple(p, lo, hi) else { continue };
        let ord = curve.order_from_multiple(p, m);
        l = lcm(l, ord);
        let first = lo.div_ceil(l) * l;
        if first <= hi && first + l > hi {
            let trace = q as i64 + 1 - first as i64;
            debug_assert!(within_hasse(trace, q));
            return Ok(TraceResult { trace, q, singular_type: SingularType::Smooth });
        }
    }
    Ok(trace_naive(field, a, b))
}

/// Character sum below [`NAIVE_LIMIT`] (or for singular curves), BSGS above.
pub fn trace<F: FiniteField>(field: &F, a: F::Elem, b: F::Elem) -> TraceResult {
    if field.order() <= NAIVE_LIMIT {
        return trace_naive(field, a, b);
    }
    match trace_bsgs(field, a, b) {
        Ok(t) => t,
        Err(_) => trace_naive(field, a, b),
    }
}

/// Trace over `F_{q^k}` from the trace over `F_q` by
/// `a_k = a_1 a_{k-1} - q a_{k-2}`, `a_0 = 2`.
pub fn trace_power(a1: i64, q: u64, k: u32) -> Result<i128> {
    if !within_hasse(a1, q) {
        return Err(Error::InvalidTrace { trace: a1, q });
    }
    let (a1, q) = (a1 as i128, q as i128);
    let (mut prev, mut cur) = (2i128, a1);
    if k == 0 {
        return Ok(2);
    }
    for _ in 1..k {
        let next = a1
            .checked_mul(cur)
            .and_then(|v| v.checked_sub(q.checked_mul(prev)?))
            .ok_or_else(|| Error::InconsistentData("trace power overflow".into()))?;
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// Traces of the fibres `t = 0, ..., l-1` of `y^2 = x^3 + A(t) x + B(t)`,
/// sharing one character table and one cube table across the row.
pub fn trace_row(a_poly: &FpPoly, b_poly: &FpPoly, field: &PrimeField) -> Vec<TraceResult> {
    let l = field.modulus();
    let owned;
    let table = match field.char_table() {
        Some(t) => t,
        None => {
            owned = CharTable::new(l);
            &owned
        }
    };
    let cubes: Vec<u64> = (0..l).map(|x| x * x % l * x % l).collect();
    (0..l)
        .map(|t| {
            let a = a_poly.eval(t);
            let b = b_poly.eval(t);
            let mut ax = 0u64;
            let mut squares = 0i64;
            let mut zeros = 0i64;
            for &c in &cubes {
                let mut v = c + ax;
                if v >= l {
                    v -= l;
                }
                v += b;
                if v >= l {
                    v -= l;
                }
                if v == 0 {
                    zeros += 1;
                } else if table.is_nonzero_square(v) {
                    squares += 1;
                }
                ax += a;
                if ax >= l {
                    ax -= l;
                }
            }
            let trace = (l as i64 - zeros) - 2 * squares;
            let singular_type = singular_type(field, a, b);
            if singular_type == SingularType::Smooth {
                assert!(within_hasse(trace, l));
            }
            TraceResult { trace, q: l, singular_type }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff::ExtField;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Independent oracle: count projective solutions of
    /// `y^2 = x^3 + ax + b` by enumerating all `(x, y)`.
    fn brute_trace<F: FiniteField>(f: &F, a: F::Elem, b: F::Elem) -> i64 {
        let q = f.order();
        let mut n = 1i64;
        for i in 0..q {
            let x = f.element(i);
            let rhs = f.add(f.add(f.mul(f.mul(x, x), x), f.mul(a, x)), b);
            for j in 0..q {
                let y = f.element(j);
                if f.mul(y, y) == rhs {
                    n += 1;
                }
            }
        }
        q as i64 + 1 - n
    }

    #[test]
    fn worked_traces_over_f5() {
        let f = PrimeField::with_char_table(5).unwrap();
        let r = trace_naive(&f, 1, 1);
        assert_eq!((r.trace, r.singular_type), (-3, SingularType::Smooth));
        let r = trace_naive(&f, f.from_int(-1), 0);
        assert_eq!((r.trace, r.singular_type), (-2, SingularType::Smooth));
        let r = trace_naive(&f, 0, 0);
        assert_eq!((r.trace, r.singular_type), (0, SingularType::Cusp));
        // x^3 + 3x + 4 = (x - 3)^2 (x - 4); 3 x0 = 9 = 4 is a square: split
        let r = trace_naive(&f, 3, 4);
        assert_eq!((r.trace, r.singular_type), (1, SingularType::NodeSplit));
        for (a, b) in [(1, 1), (4, 0), (0, 0), (3, 4)] {
            assert_eq!(trace_naive(&f, a, b).trace, brute_trace(&f, a, b));
        }
    }

    #[test]
    fn naive_matches_brute_force_everywhere_small() {
        for p in [5u64, 7, 11, 13] {
            let f = PrimeField::with_char_table(p).unwrap();
            let g = PrimeField::new(p).unwrap();
            for a in 0..p {
                for b in 0..p {
                    let r = trace_naive(&f, a, b);
                    assert_eq!(r.trace, brute_trace(&f, a, b));
                    assert_eq!(r.trace, trace_naive(&g, a, b).trace);
                    match r.singular_type {
                        SingularType::Smooth => assert!(within_hasse(r.trace, p)),
                        SingularType::NodeSplit => assert_eq!(r.trace, 1),
                        SingularType::NodeNonsplit => assert_eq!(r.trace, -1),
                        SingularType::Cusp => assert_eq!(r.trace, 0),
                    }
                }
            }
        }
        let f = ExtField::new(5, 2).unwrap();
        for a in 0..25 {
            for b in [0u64, 1, 7, 13, 24] {
                assert_eq!(trace_naive(&f, a, b).trace, brute_trace(&f, a, b));
            }
        }
    }

    #[test]
    fn twist_antisymmetry() {
        for p in [5u64, 7, 11, 13, 17, 19, 23, 29, 31] {
            let f = PrimeField::with_char_table(p).unwrap();
            let d = (2..p).find(|&d| f.chi(d) == -1).unwrap();
            let (d2, d3) = (d * d % p, d * d % p * d % p);
            for a in 0..p {
                for b in 0..p {
                    let t = trace_naive(&f, a, b).trace;
                    let tw = trace_naive(&f, f.mul(d2, a), f.mul(d3, b)).trace;
                    assert_eq!(tw, -t, "p={p} a={a} b={b}");
                }
            }
        }
    }

    #[test]
    fn power_recursion() {
        assert_eq!(trace_power(-3, 5, 1).unwrap(), -3);
        assert_eq!(trace_power(-3, 5, 2).unwrap(), -1);
        assert_eq!(trace_power(0, 5, 2).unwrap(), -10);
        assert_eq!(trace_power(0, 5, 0).unwrap(), 2);
        assert_eq!(trace_power(5, 5, 2), Err(Error::InvalidTrace { trace: 5, q: 5 }));
        // y^2 = x^3 + x + 1 over F_25 has 27 points
        let f = ExtField::new(5, 2).unwrap();
        assert_eq!(brute_trace(&f, 1, 1), -1);
    }

    #[test]
    fn power_matches_extension_counts() {
        let base = PrimeField::with_char_table(5).unwrap();
        for k in 2..=4u32 {
            let ext = ExtField::new(5, k).unwrap();
            for a in 0..5 {
                for b in 0..5 {
                    let t = trace_naive(&base, a, b);
                    if t.singular_type != SingularType::Smooth {
                        continue;
                    }
                    let direct = trace_naive(&ext, a, b).trace as i128;
                    assert_eq!(trace_power(t.trace, 5, k).unwrap(), direct);
                }
            }
        }
    }

    #[test]
    fn bsgs_agrees_with_naive() {
        assert_eq!(trace_bsgs(&PrimeField::new(5).unwrap(), 1, 1).unwrap().trace, -3);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for p in [101u64, 997, 10_007, 100_003] {
            let f = PrimeField::with_char_table(p).unwrap();
            for _ in 0..40 {
                let (a, b) = (rng.random_range(0..p), rng.random_range(0..p));
                if singular_type(&f, a, b) != SingularType::Smooth {
                    assert_eq!(trace_bsgs(&f, a, b), Err(Error::SingularCurve));
                    continue;
                }
                assert_eq!(trace_bsgs(&f, a, b).unwrap(), trace_naive(&f, a, b));
            }
        }
        let ext = ExtField::new(7, 4).unwrap().without_tables();
        for _ in 0..20 {
            let (a, b) = (rng.random_range(0..2401), rng.random_range(0..2401));
            if singular_type(&ext, a, b) == SingularType::Smooth {
                assert_eq!(trace_bsgs(&ext, a, b).unwrap(), trace_naive(&ext, a, b));
            }
        }
    }

    #[test]
    fn trace_rows() {
        let f = PrimeField::with_char_table(5).unwrap();
        let one = FpPoly::from_i64(5, &[1]);
        let t = FpPoly::from_i64(5, &[0, 1]);
        let t2 = FpPoly::from_i64(5, &[0, 0, 1]);
        let row: Vec<i64> = trace_row(&one, &t, &f).iter().map(|r| r.trace).collect();
        assert_eq!(row, vec![2, -3, 2, 2, -3]);
        let row = trace_row(&t, &t2, &f);
        let traces: Vec<i64> = row.iter().map(|r| r.trace).collect();
        assert_eq!(traces, vec![0, -3, -1, 1, -2]);
        assert_eq!(row[0].singular_type, SingularType::Cusp);
        assert_eq!(row[3].singular_type, SingularType::NodeSplit);
        for p in [7u64, 11] {
            let f = PrimeField::with_char_table(p).unwrap();
            let a = FpPoly::from_i64(p, &[3, 1, 2]);
            let b = FpPoly::from_i64(p, &[1, 0, 5, 1]);
            let row = trace_row(&a, &b, &f);
            assert_eq!(row.len() as u64, p);
            for (t, r) in row.iter().enumerate() {
                assert_eq!(*r, trace_naive(&f, a.eval(t as u64), b.eval(t as u64)));
            }
        }
    }
}
