//! Dense univariate polynomials over a prime field `F_p`.

use std::cmp::Ordering;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arith::{add_mod, inv_mod, jacobi, mul_mod, reduce_i64, sub_mod};

/// Polynomial with coefficients in `F_p`, stored in ascending degree, with
/// no trailing zero coefficients.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FpPoly {
    p: u64,
    coeffs: Vec<u64>,
}

impl fmt::Debug for FpPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FpPoly(p={}, {:?})", self.p, self.coeffs)
    }
}

impl fmt::Display for FpPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match (i, c) {
                (0, c) => write!(f, "{c}")?,
                (1, 1) => write!(f, "T")?,
                (1, c) => write!(f, "{c}T")?,
                (i, 1) => write!(f, "T^{i}")?,
                (i, c) => write!(f, "{c}T^{i}")?,
            }
        }
        Ok(())
    }
}

/// Places are ordered by degree, then by ascending coefficient tuple.
impl Ord for FpPoly {
    fn cmp(&self, other: &Self) -> Ordering {
        self.coeffs
            .len()
            .cmp(&other.coeffs.len())
            .then_with(|| self.coeffs.cmp(&other.coeffs))
            .then_with(|| self.p.cmp(&other.p))
    }
}

impl PartialOrd for FpPoly {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl FpPoly {
    pub fn new(p: u64, mut coeffs: Vec<u64>) -> Self {
        for c in coeffs.iter_mut() {
            *c %= p;
        }
        let mut out = FpPoly { p, coeffs };
        out.trim();
        out
    }

    pub fn from_i64(p: u64, coeffs: &[i64]) -> Self {
        Self::new(p, coeffs.iter().map(|&c| reduce_i64(c, p)).collect())
    }

    pub fn zero(p: u64) -> Self {
        FpPoly { p, coeffs: Vec::new() }
    }

    pub fn one(p: u64) -> Self {
        Self::constant(p, 1)
    }

    pub fn constant(p: u64, c: u64) -> Self {
        Self::new(p, vec![c])
    }

    /// The indeterminate `T`.
    pub fn x(p: u64) -> Self {
        Self::monomial(p, 1, 1)
    }

    pub fn monomial(p: u64, c: u64, deg: usize) -> Self {
        let mut coeffs = vec![0; deg + 1];
        coeffs[deg] = c;
        Self::new(p, coeffs)
    }

    fn trim(&mut self) {
        while self.coeffs.last() == Some(&0) {
            self.coeffs.pop();
        }
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> u64 {
        self.coeffs.get(i).copied().unwrap_or(0)
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree with the zero polynomial mapped to 0.
    pub fn degree_or_zero(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs == [1]
    }

    pub fn lead(&self) -> u64 {
        self.coeffs.last().copied().unwrap_or(0)
    }

    pub fn eval(&self, x: u64) -> u64 {
        let x = x % self.p;
        self.coeffs
            .iter()
            .rev()
            .fold(0, |acc, &c| add_mod(mul_mod(acc, x, self.p), c, self.p))
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n)
            .map(|i| add_mod(self.coeff(i), other.coeff(i), self.p))
            .collect();
        Self::new(self.p, coeffs)
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n)
            .map(|i| sub_mod(self.coeff(i), other.coeff(i), self.p))
            .collect();
        Self::new(self.p, coeffs)
    }

    pub fn neg(&self) -> Self {
        Self::zero(self.p).sub(self)
    }

    pub fn scale(&self, c: u64) -> Self {
        let c = c % self.p;
        Self::new(self.p, self.coeffs.iter().map(|&a| mul_mod(a, c, self.p)).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero(self.p);
        }
        let p = self.p;
        let mut acc = vec![0u128; self.coeffs.len() + other.coeffs.len() - 1];
        let small = p < (1 << 31);
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                if small {
                    acc[i + j] += (a * b) as u128;
                } else {
                    acc[i + j] = (acc[i + j] + a as u128 * b as u128) % p as u128;
                }
            }
        }
        Self::new(p, acc.into_iter().map(|v| (v % p as u128) as u64).collect())
    }

    pub fn square(&self) -> Self {
        self.mul(self)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(self.p);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Euclidean division. Panics on a zero divisor.
    pub fn div_rem(&self, d: &Self) -> (Self, Self) {
        assert!(!d.is_zero(), "polynomial division by zero");
        let p = self.p;
        let dn = d.coeffs.len() - 1;
        if self.coeffs.len() <= dn {
            return (Self::zero(p), self.clone());
        }
        let inv_lead = inv_mod(d.lead(), p).expect("leading coefficient invertible");
        let mut rem = self.coeffs.clone();
        let mut quot = vec![0u64; rem.len() - dn];
        for i in (0..quot.len()).rev() {
            let c = mul_mod(rem[i + dn], inv_lead, p);
            quot[i] = c;
            if c == 0 {
                continue;
            }
            for (j, &dc) in d.coeffs.iter().enumerate() {
                rem[i + j] = sub_mod(rem[i + j], mul_mod(c, dc, p), p);
            }
        }
        rem.truncate(dn);
        (Self::new(p, quot), Self::new(p, rem))
    }

    pub fn rem(&self, d: &Self) -> Self {
        self.div_rem(d).1
    }

    /// Exact quotient; `None` if `d` does not divide `self`.
    pub fn exact_div(&self, d: &Self) -> Option<Self> {
        let (q, r) = self.div_rem(d);
        r.is_zero().then_some(q)
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let inv = inv_mod(self.lead(), self.p).expect("nonzero lead");
        self.scale(inv)
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn derivative(&self) -> Self {
        let p = self.p;
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| mul_mod(c, i as u64 % p, p))
            .collect();
        Self::new(p, coeffs)
    }

    pub fn mul_mod(&self, other: &Self, m: &Self) -> Self {
        self.mul(other).rem(m)
    }

    pub fn pow_mod(&self, mut e: u64, m: &Self) -> Self {
        let mut base = self.rem(m);
        let mut acc = Self::one(self.p).rem(m);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_mod(&base, m);
            }
            base = base.mul_mod(&base, m);
            e >>= 1;
        }
        acc
    }

    /// `self^(1 + p + ... + p^(d-1)) mod m`, the norm-type exponent used for
    /// characters of `F_{p^d}` without overflowing the exponent.
    pub fn norm_power_mod(&self, d: usize, m: &Self) -> Self {
        let mut t = self.rem(m);
        let mut acc = t.clone();
        for _ in 1..d {
            t = t.pow_mod(self.p, m);
            acc = acc.mul_mod(&t, m);
        }
        acc
    }

    /// Multiplicity of the irreducible `pi` in `self` and the cofactor.
    /// Returns `None` for the zero polynomial (infinite valuation).
    pub fn valuation(&self, pi: &Self) -> Option<(u32, Self)> {
        if self.is_zero() {
            return None;
        }
        let mut v = 0;
        let mut cur = self.clone();
        while let Some(q) = cur.exact_div(pi) {
            cur = q;
            v += 1;
        }
        Some((v, cur))
    }

    /// Rabin's irreducibility test.
    pub fn is_irreducible(&self) -> bool {
        let n = match self.degree() {
            None | Some(0) => return false,
            Some(n) => n,
        };
        if n == 1 {
            return true;
        }
        let f = self.monic();
        let x = Self::x(self.p);
        let frob = |k: usize| -> Self {
            let mut t = x.rem(&f);
            for _ in 0..k {
                t = t.pow_mod(self.p, &f);
            }
            t
        };
        for (r, _) in crate::arith::factor(n as u64) {
            let k = n / r as usize;
            let g = frob(k).sub(&x).gcd(&f);
            if !g.is_one() {
                return false;
            }
        }
        frob(n).sub(&x).rem(&f).is_zero()
    }

    /// Square-free factorisation of a monic polynomial: pairs
    /// `(square-free factor, multiplicity)`.
    pub fn squarefree_factorization(&self) -> Vec<(Self, u32)> {
        let p = self.p;
        let f = self.monic();
        let mut out = Vec::new();
        if f.degree_or_zero() == 0 {
            return out;
        }
        let mut c = f.gcd(&f.derivative());
        let mut w = f.exact_div(&c).expect("gcd divides");
        let mut i = 1u32;
        while !w.is_one() {
            let y = w.gcd(&c);
            let fac = w.exact_div(&y).expect("gcd divides");
            if !fac.is_one() {
                out.push((fac, i));
            }
            w = y;
            c = c.exact_div(&w).expect("gcd divides");
            i += 1;
        }
        if !c.is_one() {
            // c is a polynomial in T^p; take the p-th root coefficientwise
            let root: Vec<u64> = c.coeffs.iter().step_by(p as usize).copied().collect();
            let root = Self::new(p, root);
            for (g, e) in root.squarefree_factorization() {
                out.push((g, e * p as u32));
            }
        }
        out
    }

    /// Distinct-degree factorisation of a monic square-free polynomial.
    fn distinct_degree(&self) -> Vec<(Self, usize)> {
        let x = Self::x(self.p);
        let mut out = Vec::new();
        let mut f = self.clone();
        let mut xp = x.clone();
        let mut i = 1;
        while f.degree_or_zero() >= 2 * i {
            xp = xp.pow_mod(self.p, &f);
            let g = f.gcd(&xp.sub(&x));
            if !g.is_one() {
                f = f.exact_div(&g).expect("gcd divides");
                xp = xp.rem(&f);
                out.push((g, i));
            }
            i += 1;
        }
        if f.degree_or_zero() > 0 {
            let d = f.degree_or_zero();
            out.push((f, d));
        }
        out
    }

    /// Cantor-Zassenhaus equal-degree splitting (odd characteristic).
    fn equal_degree(&self, d: usize, rng: &mut ChaCha8Rng, out: &mut Vec<Self>) {
        let n = self.degree_or_zero();
        if n == d {
            out.push(self.clone());
            return;
        }
        let p = self.p;
        let one = Self::one(p);
        loop {
            let a = Self::new(p, (0..n).map(|_| rng.random_range(0..p)).collect());
            if a.degree_or_zero() == 0 {
                continue;
            }
            let g = a.gcd(self);
            let g = if !g.is_one() {
                g
            } else {
                let b = a.norm_power_mod(d, self).pow_mod((p - 1) / 2, self);
                b.sub(&one).gcd(self)
            };
            let gd = g.degree_or_zero();
            if gd > 0 && gd < n {
                let h = self.exact_div(&g).expect("gcd divides");
                g.equal_degree(d, rng, out);
                h.equal_degree(d, rng, out);
                return;
            }
        }
    }

    /// Factorisation into monic irreducibles with multiplicities, sorted by
    /// (degree, coefficients). The zero and constant polynomials have no
    /// factors.
    pub fn factor(&self) -> Vec<(Self, u32)> {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5EED_F00D ^ self.p);
        let mut out = Vec::new();
        if self.is_zero() {
            return out;
        }
        for (sq, mult) in self.squarefree_factorization() {
            for (part, d) in sq.distinct_degree() {
                let mut irr = Vec::new();
                part.equal_degree(d, &mut rng, &mut irr);
                out.extend(irr.into_iter().map(|g| (g, mult)));
            }
        }
        out.sort();
        out
    }

    /// Square root in `F_p[T]`, if `self` is a perfect square.
    pub fn sqrt(&self) -> Option<Self> {
        let p = self.p;
        if self.is_zero() {
            return Some(self.clone());
        }
        let n = self.degree_or_zero();
        if n % 2 == 1 {
            return None;
        }
        let m = n / 2;
        let lead_root = crate::ff::sqrt_mod(self.lead(), p)?;
        let lead_root = lead_root.min(p - lead_root);
        let mut y = vec![0u64; m + 1];
        y[m] = lead_root;
        let inv_two_lead = inv_mod(mul_mod(2, lead_root, p), p)?;
        for k in (0..m).rev() {
            // coefficient of T^(m+k) in y^2 is 2 y_m y_k + sum_{i+j=m+k, k<i,j<m} y_i y_j
            let mut s = self.coeff(m + k);
            for i in (k + 1)..m {
                let j = m + k - i;
                if j > k && j < m {
                    s = sub_mod(s, mul_mod(y[i], y[j], p), p);
                }
            }
            y[k] = mul_mod(s, inv_two_lead, p);
        }
        let y = Self::new(p, y);
        (y.square() == *self).then_some(y)
    }

    /// Compose with `T -> T + c`.
    pub fn shift(&self, c: u64) -> Self {
        let lin = Self::new(self.p, vec![c, 1]);
        self.coeffs
            .iter()
            .rev()
            .fold(Self::zero(self.p), |acc, &a| acc.mul(&lin).add(&Self::constant(self.p, a)))
    }
}

/// Quadratic character of `z mod pi` in the residue field `F_p[T]/(pi)`.
pub fn residue_chi(z: &FpPoly, pi: &FpPoly) -> i8 {
    let z = z.rem(pi);
    if z.is_zero() {
        return 0;
    }
    let d = pi.degree_or_zero();
    let norm = z.norm_power_mod(d, pi);
    debug_assert!(norm.degree_or_zero() == 0);
    jacobi(norm.coeff(0) as i64, pi.modulus())
}
