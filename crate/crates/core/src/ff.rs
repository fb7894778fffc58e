//! Prime fields `F_l` (`l > 3`), their extensions `F_{l^k}` and quadratic
//! character tables.
//!
//! Extension-field elements are packed into a single `u64` index
//! `c_0 + c_1 l + ... + c_{k-1} l^{k-1}` where `c_i` is the coordinate of
//! `theta^i`. Element enumeration order is ascending index. Fields that are
//! small enough additionally carry discrete-log and Zech-log tables, which
//! turn multiplication into an addition of exponents and addition into a
//! single table lookup.

use std::fmt;
use std::hash::Hash;
use std::sync::Arc;

use crate::arith::{
    add_mod, checked_pow, factor, inv_mod, is_prime, jacobi, mul_mod, pow_mod, reduce_i64,
    sub_mod,
};
use crate::error::{Error, Result};
use crate::fpoly::FpPoly;

/// Largest field order for which log/Zech tables are built.
pub const TABLE_LIMIT: u64 = 1 << 24;

/// Maximum supported extension degree (5^27 < 2^63).
pub const MAX_DEGREE: u32 = 27;

const LOG_ZERO: u32 = u32::MAX;

/// Quadratic character `chi(a) = (a / l)` for prime `l > 3`.
pub fn legendre_chi(a: i64, l: u64) -> i8 {
    jacobi(a, l)
}

/// Square root modulo an odd prime by Tonelli-Shanks.
pub fn sqrt_mod(a: u64, p: u64) -> Option<u64> {
    let a = a % p;
    if a == 0 {
        return Some(0);
    }
    if pow_mod(a, (p - 1) / 2, p) != 1 {
        return None;
    }
    if p % 4 == 3 {
        return Some(pow_mod(a, (p + 1) / 4, p));
    }
    let s = (p - 1).trailing_zeros();
    let q = (p - 1) >> s;
    let mut z = 2;
    while pow_mod(z, (p - 1) / 2, p) != p - 1 {
        z += 1;
    }
    let mut m = s;
    let mut c = pow_mod(z, q, p);
    let mut t = pow_mod(a, q, p);
    let mut r = pow_mod(a, q.div_ceil(2), p);
    while t != 1 {
        let mut i = 0;
        let mut tt = t;
        while tt != 1 {
            tt = mul_mod(tt, tt, p);
            i += 1;
        }
        let b = pow_mod(c, 1 << (m - i - 1), p);
        m = i;
        c = mul_mod(b, b, p);
        t = mul_mod(t, c, p);
        r = mul_mod(r, b, p);
    }
    Some(r)
}

/// Common interface of the finite fields used for point counting.
pub trait FiniteField: Send + Sync {
    type Elem: Copy + Eq + Ord + Hash + fmt::Debug + Send + Sync;

    fn characteristic(&self) -> u64;
    fn order(&self) -> u64;
    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    /// Image of an integer under `Z -> F`.
    fn from_int(&self, v: i64) -> Self::Elem;
    /// The `index`-th element in enumeration order.
    fn element(&self, index: u64) -> Self::Elem;
    fn add(&self, a: Self::Elem, b: Self::Elem) -> Self::Elem;
    fn sub(&self, a: Self::Elem, b: Self::Elem) -> Self::Elem;
    fn mul(&self, a: Self::Elem, b: Self::Elem) -> Self::Elem;
    fn inv(&self, a: Self::Elem) -> Result<Self::Elem>;

    fn neg(&self, a: Self::Elem) -> Self::Elem {
        self.sub(self.zero(), a)
    }

    fn is_zero(&self, a: Self::Elem) -> bool {
        a == self.zero()
    }

    fn pow(&self, a: Self::Elem, mut e: u64) -> Self::Elem {
        let mut acc = self.one();
        let mut base = a;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Quadratic character by Euler's criterion.
    fn chi(&self, a: Self::Elem) -> i8 {
        if self.is_zero(a) {
            return 0;
        }
        if self.pow(a, (self.order() - 1) / 2) == self.one() {
            1
        } else {
            -1
        }
    }

    /// A square root, if one exists (Tonelli-Shanks).
    fn sqrt(&self, a: Self::Elem) -> Option<Self::Elem> {
        if self.is_zero(a) {
            return Some(a);
        }
        if self.chi(a) != 1 {
            return None;
        }
        let q = self.order();
        let s = (q - 1).trailing_zeros();
        let odd = (q - 1) >> s;
        let mut z_index = 2;
        let z = loop {
            let z = self.element(z_index);
            if self.chi(z) == -1 {
                break z;
            }
            z_index += 1;
        };
        let mut m = s;
        let mut c = self.pow(z, odd);
        let mut t = self.pow(a, odd);
        let mut r = self.pow(a, odd.div_ceil(2));
        while t != self.one() {
            let mut i = 0;
            let mut tt = t;
            while tt != self.one() {
                tt = self.mul(tt, tt);
                i += 1;
            }
            let mut b = c;
            for _ in 0..(m - i - 1) {
                b = self.mul(b, b);
            }
            m = i;
            c = self.mul(b, b);
            t = self.mul(t, c);
            r = self.mul(r, b);
        }
        Some(r)
    }

    /// `sum_x chi(x^3 + a x + b)` over all `x` in the field.
    fn cubic_char_sum(&self, a: Self::Elem, b: Self::Elem) -> i64 {
        let mut s = 0i64;
        for i in 0..self.order() {
            let x = self.element(i);
            let x2 = self.mul(x, x);
            let v = self.add(self.mul(self.add(x2, a), x), b);
            s += self.chi(v) as i64;
        }
        s
    }
}

/// Bitset of the nonzero squares modulo `l`.
#[derive(Clone)]
pub struct CharTable {
    modulus: u64,
    bits: Vec<u64>,
}

impl fmt::Debug for CharTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CharTable({})", self.modulus)
    }
}

impl CharTable {
    pub fn new(l: u64) -> Self {
        assert!(l < (1 << 40), "character table too large");
        let mut bits = vec![0u64; (l as usize).div_ceil(64)];
        // (x+1)^2 = x^2 + 2x + 1
        let mut sq = 0u64;
        for x in 0..(l - 1) / 2 {
            sq = add_mod(sq, add_mod(2 * x % l, 1, l), l);
            bits[(sq >> 6) as usize] |= 1 << (sq & 63);
        }
        CharTable { modulus: l, bits }
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    #[inline]
    pub fn is_nonzero_square(&self, a: u64) -> bool {
        (self.bits[(a >> 6) as usize] >> (a & 63)) & 1 == 1
    }

    /// `chi(a)` for `a` already reduced into `[0, l)`.
    #[inline]
    pub fn get(&self, a: u64) -> i8 {
        if a == 0 {
            0
        } else if self.is_nonzero_square(a) {
            1
        } else {
            -1
        }
    }

    /// The full table `[chi(0), ..., chi(l-1)]`.
    pub fn to_vec(&self) -> Vec<i8> {
        (0..self.modulus).map(|a| self.get(a)).collect()
    }
}

/// The prime field `F_l`, `l > 3`, optionally carrying a character table.
#[derive(Clone, Debug)]
pub struct PrimeField {
    p: u64,
    table: Option<Arc<CharTable>>,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self> {
        if p <= 3 || !is_prime(p) {
            return Err(Error::InvalidModulus(p));
        }
        Ok(PrimeField { p, table: None })
    }

    /// Prime field with a precomputed quadratic-character bitset, used by
    /// the naive point-counting loop.
    pub fn with_char_table(p: u64) -> Result<Self> {
        let mut f = Self::new(p)?;
        f.table = Some(Arc::new(CharTable::new(p)));
        Ok(f)
    }

    pub fn from_table(table: Arc<CharTable>) -> Result<Self> {
        let mut f = Self::new(table.modulus())?;
        f.table = Some(table);
        Ok(f)
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn char_table(&self) -> Option<&CharTable> {
        self.table.as_deref()
    }

    pub fn reduce(&self, v: i64) -> u64 {
        reduce_i64(v, self.p)
    }
}

impl FiniteField for PrimeField {
    type Elem = u64;

    fn characteristic(&self) -> u64 {
        self.p
    }
    fn order(&self) -> u64 {
        self.p
    }
    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1
    }
    fn from_int(&self, v: i64) -> u64 {
        reduce_i64(v, self.p)
    }
    fn element(&self, index: u64) -> u64 {
        index % self.p
    }
    #[inline]
    fn add(&self, a: u64, b: u64) -> u64 {
        add_mod(a, b, self.p)
    }
    #[inline]
    fn sub(&self, a: u64, b: u64) -> u64 {
        sub_mod(a, b, self.p)
    }
    #[inline]
    fn mul(&self, a: u64, b: u64) -> u64 {
        mul_mod(a, b, self.p)
    }
    fn inv(&self, a: u64) -> Result<u64> {
        inv_mod(a, self.p).ok_or(Error::DivisionByZero)
    }
    fn pow(&self, a: u64, e: u64) -> u64 {
        pow_mod(a, e, self.p)
    }
    fn chi(&self, a: u64) -> i8 {
        match &self.table {
            Some(t) => t.get(a % self.p),
            None => jacobi(a as i64, self.p),
        }
    }
    fn sqrt(&self, a: u64) -> Option<u64> {
        sqrt_mod(a, self.p)
    }

    /// Finite-difference evaluation of the cubic: three modular additions
    /// and one bitset probe per `x`.
    fn cubic_char_sum(&self, a: u64, b: u64) -> i64 {
        let p = self.p;
        let Some(table) = &self.table else {
            let mut s = 0i64;
            for x in 0..p {
                let v = add_mod(mul_mod(add_mod(mul_mod(x, x, p), a, p), x, p), b, p);
                s += jacobi(v as i64, p) as i64;
            }
            return s;
        };
        // f(x) = x^3 + a x + b; d1(x) = f(x+1) - f(x) = 3x^2 + 3x + 1 + a;
        // d2(x) = d1(x+1) - d1(x) = 6x + 6; d3 = 6.
        let six = 6 % p;
        let mut f = b % p;
        let mut d1 = add_mod(1, a, p);
        let mut d2 = six;
        let mut squares = 0i64;
        let mut zeros = 0i64;
        // counters stay below p; wrapping adds keep the loop branch-free
        for _ in 0..p {
            zeros = zeros.wrapping_add((f == 0) as i64);
            squares = squares.wrapping_add(table.is_nonzero_square(f) as i64);
            f = add_mod(f, d1, p);
            d1 = add_mod(d1, d2, p);
            d2 = add_mod(d2, six, p);
        }
        let nonzero = p as i64 - zeros;
        2 * squares - nonzero
    }
}

/// Log and Zech tables for a small field.
struct LogTables {
    /// exp[i] = index of g^i, i in [0, q-1)
    exp: Vec<u32>,
    /// log[index] = i with g^i = element, LOG_ZERO for 0
    log: Vec<u32>,
    /// zech[i] = log(1 + g^i), LOG_ZERO when 1 + g^i = 0
    zech: Vec<u32>,
}

/// The extension `F_{l^k} = F_l[theta] / (f(theta))`.
#[derive(Clone)]
pub struct ExtField {
    p: u64,
    k: u32,
    /// monic defining polynomial, ascending coefficients, length k + 1
    modulus: Vec<u64>,
    order: u64,
    tables: Option<Arc<LogTables>>,
}

impl fmt::Debug for ExtField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ExtField(p={}, k={}, f={:?})", self.p, self.k, self.modulus)
    }
}

/// Coordinates of an element, in a stack buffer.
type Digits = [u64; MAX_DEGREE as usize];

impl ExtField {
    /// `F_{l^k}` defined by the first monic irreducible of degree `k` in
    /// ascending lexicographic order of `(a_0, ..., a_{k-1})`.
    pub fn new(p: u64, k: u32) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidDegree(0));
        }
        Self::check_params(p, k)?;
        let modulus = first_irreducible(p, k as usize);
        Self::build(p, modulus)
    }

    /// The extension defined by a caller-supplied monic irreducible.
    pub fn with_modulus(poly: &FpPoly) -> Result<Self> {
        let k = poly.degree().ok_or(Error::InvalidDegree(0))? as u32;
        if k == 0 {
            return Err(Error::InvalidDegree(0));
        }
        Self::check_params(poly.modulus(), k)?;
        if !poly.is_irreducible() {
            return Err(Error::Reducible);
        }
        Self::build(poly.modulus(), poly.monic().coeffs().to_vec())
    }

    /// Same field without log tables (generic polynomial arithmetic only).
    pub fn without_tables(&self) -> Self {
        ExtField { tables: None, ..self.clone() }
    }

    fn check_params(p: u64, k: u32) -> Result<()> {
        if p <= 3 || !is_prime(p) {
            return Err(Error::InvalidModulus(p));
        }
        if k > MAX_DEGREE {
            return Err(Error::InvalidDegree(k));
        }
        match checked_pow(p, k) {
            Some(q) if q < (1 << 63) => Ok(()),
            _ => Err(Error::FieldTooLarge(format!("{p}^{k}"))),
        }
    }

    fn build(p: u64, modulus: Vec<u64>) -> Result<Self> {
        let k = (modulus.len() - 1) as u32;
        let order = checked_pow(p, k).expect("checked");
        let mut field = ExtField { p, k, modulus, order, tables: None };
        if order <= TABLE_LIMIT {
            field.tables = Some(Arc::new(field.build_tables()));
        }
        Ok(field)
    }

    fn build_tables(&self) -> LogTables {
        let q = self.order;
        let g = self.primitive_element();
        let mut exp = Vec::with_capacity((q - 1) as usize);
        let mut log = vec![LOG_ZERO; q as usize];
        let mut cur = self.one_index();
        for i in 0..(q - 1) {
            exp.push(cur as u32);
            log[cur as usize] = i as u32;
            cur = self.mul_poly(cur, g);
        }
        let p = self.p;
        let zech = exp
            .iter()
            .map(|&e| {
                let e = e as u64;
                let d0 = e % p;
                let plus_one = e - d0 + (d0 + 1) % p;
                log[plus_one as usize]
            })
            .collect();
        LogTables { exp, log, zech }
    }

    fn one_index(&self) -> u64 {
        1
    }

    fn primitive_element(&self) -> u64 {
        let q = self.order;
        let factors = factor(q - 1);
        (1..q)
            .find(|&g| {
                factors
                    .iter()
                    .all(|&(r, _)| self.pow_poly(g, (q - 1) / r) != self.one_index())
            })
            .expect("multiplicative group is cyclic")
    }

    pub fn characteristic(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.k
    }

    /// Monic defining polynomial.
    pub fn defining_poly(&self) -> FpPoly {
        FpPoly::new(self.p, self.modulus.clone())
    }

    pub fn has_tables(&self) -> bool {
        self.tables.is_some()
    }

    #[inline]
    fn digits(&self, mut x: u64) -> Digits {
        let mut d = [0u64; MAX_DEGREE as usize];
        for slot in d.iter_mut().take(self.k as usize) {
            *slot = x % self.p;
            x /= self.p;
        }
        d
    }

    #[inline]
    fn pack(&self, d: &[u64]) -> u64 {
        d.iter()
            .take(self.k as usize)
            .rev()
            .fold(0, |acc, &c| acc * self.p + c)
    }

    /// Coordinates `(c_0, ..., c_{k-1})` of an element.
    pub fn coordinates(&self, x: u64) -> Vec<u64> {
        self.digits(x)[..self.k as usize].to_vec()
    }

    pub fn from_coordinates(&self, c: &[u64]) -> u64 {
        let mut d = [0u64; MAX_DEGREE as usize];
        for (slot, &v) in d.iter_mut().zip(c) {
            *slot = v % self.p;
        }
        self.pack(&d)
    }

    /// The generator `theta` (root of the defining polynomial).
    pub fn theta(&self) -> u64 {
        if self.k == 1 {
            // theta is the root of T + a_0
            sub_mod(0, self.modulus[0], self.p)
        } else {
            self.p
        }
    }

    /// Evaluate a polynomial over `F_l` at an element.
    pub fn eval_poly(&self, poly: &FpPoly, x: u64) -> u64 {
        poly.coeffs()
            .iter()
            .rev()
            .fold(0, |acc, &c| self.add(self.mul(acc, x), c))
    }

    fn mul_poly(&self, a: u64, b: u64) -> u64 {
        let p = self.p;
        let k = self.k as usize;
        let da = self.digits(a);
        let db = self.digits(b);
        let mut prod = [0u128; 2 * MAX_DEGREE as usize];
        for i in 0..k {
            if da[i] == 0 {
                continue;
            }
            for j in 0..k {
                prod[i + j] += da[i] as u128 * db[j] as u128;
            }
        }
        let mut r = [0u64; 2 * MAX_DEGREE as usize];
        for i in 0..(2 * k).saturating_sub(1) {
            r[i] = (prod[i] % p as u128) as u64;
        }
        // reduce by the monic modulus from the top
        for i in (k..(2 * k).saturating_sub(1)).rev() {
            let c = r[i];
            if c == 0 {
                continue;
            }
            r[i] = 0;
            for j in 0..k {
                r[i - k + j] = sub_mod(r[i - k + j], mul_mod(c, self.modulus[j], p), p);
            }
        }
        self.pack(&r[..k])
    }

    fn pow_poly(&self, a: u64, mut e: u64) -> u64 {
        let mut acc = self.one_index();
        let mut base = a;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_poly(acc, base);
            }
            base = self.mul_poly(base, base);
            e >>= 1;
        }
        acc
    }

    /// Discrete log to the table generator, `None` for zero or when the
    /// field has no tables.
    #[inline]
    pub fn log(&self, x: u64) -> Option<u32> {
        let t = self.tables.as_ref()?;
        let l = t.log[x as usize];
        (l != LOG_ZERO).then_some(l)
    }

    /// `g^i` for the table generator `g`.
    #[inline]
    pub fn exp(&self, i: u32) -> Option<u64> {
        let t = self.tables.as_ref()?;
        Some(t.exp[(i as u64 % (self.order - 1)) as usize] as u64)
    }

    /// Frobenius `x -> x^l`.
    pub fn frobenius(&self, x: u64) -> u64 {
        self.pow(x, self.p)
    }

    /// Smallest `d` with `x^(l^d) = x`: the degree of the subfield that
    /// `x` generates.
    pub fn element_degree(&self, x: u64) -> u32 {
        let mut y = self.frobenius(x);
        let mut d = 1;
        while y != x {
            y = self.frobenius(y);
            d += 1;
        }
        d
    }

    /// Zech-log addition on exponents, LOG_ZERO standing for the zero
    /// element.
    #[inline]
    fn log_add(t: &LogTables, qm1: u32, la: u32, lb: u32) -> u32 {
        if la == LOG_ZERO {
            return lb;
        }
        if lb == LOG_ZERO {
            return la;
        }
        let diff = if lb >= la { lb - la } else { lb + qm1 - la };
        let z = t.zech[diff as usize];
        if z == LOG_ZERO {
            return LOG_ZERO;
        }
        let s = la as u64 + z as u64;
        (if s >= qm1 as u64 { s - qm1 as u64 } else { s }) as u32
    }
}

/// `F_{l^k}` with its deterministic lex-first defining polynomial.
pub fn make_extension(l: u64, k: u32) -> Result<ExtField> {
    ExtField::new(l, k)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldOp {
    Add,
    Sub,
    Mul,
    Inv,
}

/// Dispatch one field operation; `b` is ignored for `Inv`.
pub fn field_ops<F: FiniteField>(f: &F, a: F::Elem, b: F::Elem, which: FieldOp) -> Result<F::Elem> {
    Ok(match which {
        FieldOp::Add => f.add(a, b),
        FieldOp::Sub => f.sub(a, b),
        FieldOp::Mul => f.mul(a, b),
        FieldOp::Inv => f.inv(a)?,
    })
}

/// First monic irreducible of degree `k` over `F_p`, scanning
/// `(a_0, ..., a_{k-1})` in ascending lexicographic order.
fn first_irreducible(p: u64, k: usize) -> Vec<u64> {
    let mut tail = vec![0u64; k];
    if k > 1 {
        // a0 = 0 means T divides it
        tail[0] = 1;
    }
    loop {
        let mut coeffs = tail.clone();
        coeffs.push(1);
        let f = FpPoly::new(p, coeffs.clone());
        let rootless = k == 1 || (k < 4 || p < 64) && (0..p).all(|x| f.eval(x) != 0);
        if rootless && f.is_irreducible() {
            return coeffs;
        }
        // increment with a_{k-1} fastest, a_0 most significant
        let mut i = k;
        loop {
            i -= 1;
            tail[i] += 1;
            if tail[i] < p {
                break;
            }
            tail[i] = 0;
            assert!(i > 0, "an irreducible of every degree exists");
        }
    }
}

impl FiniteField for ExtField {
    type Elem = u64;

    fn characteristic(&self) -> u64 {
        self.p
    }
    fn order(&self) -> u64 {
        self.order
    }
    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1
    }
    fn from_int(&self, v: i64) -> u64 {
        reduce_i64(v, self.p)
    }
    fn element(&self, index: u64) -> u64 {
        index % self.order
    }
    fn add(&self, a: u64, b: u64) -> u64 {
        if self.k == 1 {
            return add_mod(a, b, self.p);
        }
        let (da, db) = (self.digits(a), self.digits(b));
        let mut r = [0u64; MAX_DEGREE as usize];
        for i in 0..self.k as usize {
            r[i] = add_mod(da[i], db[i], self.p);
        }
        self.pack(&r)
    }
    fn sub(&self, a: u64, b: u64) -> u64 {
        if self.k == 1 {
            return sub_mod(a, b, self.p);
        }
        let (da, db) = (self.digits(a), self.digits(b));
        let mut r = [0u64; MAX_DEGREE as usize];
        for i in 0..self.k as usize {
            r[i] = sub_mod(da[i], db[i], self.p);
        }
        self.pack(&r)
    }
    fn mul(&self, a: u64, b: u64) -> u64 {
        if let Some(t) = &self.tables {
            let (la, lb) = (t.log[a as usize], t.log[b as usize]);
            if la == LOG_ZERO || lb == LOG_ZERO {
                return 0;
            }
            let qm1 = self.order - 1;
            let s = (la as u64 + lb as u64) % qm1;
            return t.exp[s as usize] as u64;
        }
        if self.k == 1 {
            return mul_mod(a, b, self.p);
        }
        self.mul_poly(a, b)
    }
    fn inv(&self, a: u64) -> Result<u64> {
        if a == 0 {
            return Err(Error::DivisionByZero);
        }
        if let Some(t) = &self.tables {
            let qm1 = self.order - 1;
            let la = t.log[a as usize] as u64;
            return Ok(t.exp[((qm1 - la) % qm1) as usize] as u64);
        }
        Ok(self.pow(a, self.order - 2))
    }
    fn chi(&self, a: u64) -> i8 {
        if a == 0 {
            return 0;
        }
        if let Some(t) = &self.tables {
            return if t.log[a as usize] % 2 == 0 { 1 } else { -1 };
        }
        if self.pow(a, (self.order - 1) / 2) == 1 {
            1
        } else {
            -1
        }
    }

    /// Log-domain evaluation: `x^3` and `a x` are exponent arithmetic, the
    /// two additions are Zech lookups and the character is exponent parity.
    fn cubic_char_sum(&self, a: u64, b: u64) -> i64 {
        let Some(t) = &self.tables else {
            let mut s = 0i64;
            for x in 0..self.order {
                let v = self.add(self.mul(self.add(self.mul(x, x), a), x), b);
                s += self.chi(v) as i64;
            }
            return s;
        };
        let qm1 = (self.order - 1) as u32;
        let la = t.log[a as usize];
        let lb = t.log[b as usize];
        let chi_log = |l: u32| -> i64 {
            if l == LOG_ZERO {
                0
            } else if l % 2 == 0 {
                1
            } else {
                -1
            }
        };
        // x = 0 contributes chi(b)
        let mut s = chi_log(lb);
        let mut l3: u64 = 0;
        for lx in 0..qm1 {
            let lax = if la == LOG_ZERO {
                LOG_ZERO
            } else {
                let v = la as u64 + lx as u64;
                (if v >= qm1 as u64 { v - qm1 as u64 } else { v }) as u32
            };
            let s1 = Self::log_add(t, qm1, l3 as u32, lax);
            let f = Self::log_add(t, qm1, s1, lb);
            s += chi_log(f);
            l3 += 3;
            if l3 >= qm1 as u64 {
                l3 -= qm1 as u64;
                if l3 >= qm1 as u64 {
                    l3 -= qm1 as u64;
                }
                if l3 >= qm1 as u64 {
                    l3 -= qm1 as u64;
                }
            }
        }
        s
    }
}
