//! Dense polynomials over `Q` (ascending coefficients), just enough for
//! square-free decompositions.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

pub type QPoly = Vec<BigRational>;

pub fn from_ints(c: &[BigInt]) -> QPoly {
    trim(c.iter().map(|v| BigRational::from_integer(v.clone())).collect())
}

pub fn trim(mut p: QPoly) -> QPoly {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
    p
}

pub fn derivative(p: &QPoly) -> QPoly {
    trim(
        p.iter()
            .enumerate()
            .skip(1)
            .map(|(j, c)| c * BigRational::from_integer(BigInt::from(j)))
            .collect(),
    )
}

/// Quotient and remainder; `b` must be nonzero.
pub fn div_rem(a: &QPoly, b: &QPoly) -> (QPoly, QPoly) {
    let mut r = trim(a.clone());
    let db = b.len() - 1;
    let lb = b[db].clone();
    if r.len() <= db {
        return (Vec::new(), r);
    }
    let mut q = vec![BigRational::zero(); r.len() - db];
    while r.len() > db {
        let top = r.len() - 1;
        let f = &r[top] / &lb;
        for i in 0..db {
            let t = &f * &b[i];
            r[top - db + i] -= t;
        }
        q[top - db] = f;
        r.pop();
        r = trim(r);
    }
    (trim(q), r)
}

pub fn monic(p: QPoly) -> QPoly {
    let lead = p.last().expect("nonzero polynomial").clone();
    p.into_iter().map(|c| c / &lead).collect()
}

/// Monic gcd; `gcd(0, 0)` is empty.
pub fn gcd(a: &QPoly, b: &QPoly) -> QPoly {
    let (mut a, mut b) = (trim(a.clone()), trim(b.clone()));
    while !b.is_empty() {
        let r = div_rem(&a, &b).1;
        a = b;
        b = r;
    }
    if a.is_empty() {
        a
    } else {
        monic(a)
    }
}

/// Yun's algorithm: monic square-free `f_i` with `p = c * prod f_i^i`.
pub fn squarefree(p: &QPoly) -> Vec<(QPoly, u32)> {
    let p = trim(p.clone());
    if p.len() <= 1 {
        return Vec::new();
    }
    let dp = derivative(&p);
    let a0 = gcd(&p, &dp);
    let mut b = div_rem(&p, &a0).0;
    let mut c = div_rem(&dp, &a0).0;
    let mut d = sub(&c, &derivative(&b));
    let mut out = Vec::new();
    let mut i = 1;
    while b.len() > 1 {
        let a = gcd(&b, &d);
        let nb = div_rem(&b, &a).0;
        c = div_rem(&d, &a).0;
        if a.len() > 1 {
            out.push((a, i));
        }
        b = nb;
        d = sub(&c, &derivative(&b));
        i += 1;
    }
    out
}

pub fn sub(a: &QPoly, b: &QPoly) -> QPoly {
    let n = a.len().max(b.len());
    trim(
        (0..n)
            .map(|i| {
                a.get(i).cloned().unwrap_or_else(BigRational::zero)
                    - b.get(i).cloned().unwrap_or_else(BigRational::zero)
            })
            .collect(),
    )
}
