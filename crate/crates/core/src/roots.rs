//! Simultaneous complex root finding (Aberth-Ehrlich) for dense
//! polynomials, with Newton polishing and a posteriori inclusion radii.

use num_complex::Complex64;

const MAX_ITER: usize = 2000;

#[derive(Clone, Debug)]
pub struct Roots {
    pub roots: Vec<Complex64>,
    /// Radius `n |p(z)| / |p'(z)|` around each approximation; for simple
    /// roots the disc contains a true root.
    pub radii: Vec<f64>,
    pub converged: bool,
}

fn horner(c: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &a in c.iter().rev() {
        dp = dp * z + p;
        p = p * z + a;
    }
    (p, dp)
}

/// All complex roots of `sum c[i] z^i`; trailing zero coefficients are
/// ignored.
pub fn roots(coeffs: &[Complex64]) -> Roots {
    let mut c: Vec<Complex64> = coeffs.to_vec();
    while c.last().is_some_and(|a| a.norm() == 0.0) {
        c.pop();
    }
    let n = c.len().saturating_sub(1);
    if n == 0 {
        return Roots { roots: Vec::new(), radii: Vec::new(), converged: true };
    }
    // zero roots split off exactly
    let zeros = c.iter().take_while(|a| a.norm() == 0.0).count();
    let c: Vec<Complex64> = c[zeros..].to_vec();
    let m = c.len() - 1;
    let mut out = vec![Complex64::new(0.0, 0.0); zeros];
    let mut radii = vec![0.0; zeros];
    if m == 0 {
        return Roots { roots: out, radii, converged: true };
    }
    let lead = c[m];
    // Fujiwara-style bound for initial radius
    let bound = (0..m)
        .map(|i| (c[i] / lead).norm().powf(1.0 / (m - i) as f64))
        .fold(0.0f64, f64::max)
        .max(1e-3);
    let low = {
        let c0 = c[0];
        (1..=m)
            .map(|i| (c[i] / c0).norm().powf(1.0 / i as f64))
            .fold(0.0f64, f64::max)
            .recip()
    };
    let r0 = (low * bound).sqrt().clamp(low.min(bound), low.max(bound));
    let mut z: Vec<Complex64> = (0..m)
        .map(|k| Complex64::from_polar(r0, 0.4 + std::f64::consts::TAU * k as f64 / m as f64))
        .collect();
    let mut converged = false;
    for _ in 0..MAX_ITER {
        let mut biggest = 0.0f64;
        for k in 0..m {
            let (p, dp) = horner(&c, z[k]);
            if p.norm() == 0.0 {
                continue;
            }
            let w = p / dp;
            let s: Complex64 = (0..m)
                .filter(|&j| j != k)
                .map(|j| (z[k] - z[j]).inv())
                .sum();
            let step = w / (Complex64::new(1.0, 0.0) - w * s);
            if step.is_finite() {
                z[k] -= step;
                biggest = biggest.max(step.norm() / z[k].norm().max(1e-300));
            }
        }
        if biggest < 1e-15 {
            converged = true;
            break;
        }
    }
    for zk in z.iter_mut() {
        for _ in 0..3 {
            let (p, dp) = horner(&c, *zk);
            if dp.norm() == 0.0 {
                break;
            }
            let step = p / dp;
            if !step.is_finite() {
                break;
            }
            *zk -= step;
        }
    }
    for &zk in &z {
        let (p, dp) = horner(&c, zk);
        radii.push(if p.norm() == 0.0 { 0.0 } else { m as f64 * p.norm() / dp.norm() });
    }
    out.extend(z);
    Roots { roots: out, radii, converged }
}

pub fn real_roots(coeffs: &[f64]) -> Roots {
    let c: Vec<Complex64> = coeffs.iter().map(|&a| Complex64::new(a, 0.0)).collect();
    roots(&c)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn expand(rs: &[Complex64]) -> Vec<Complex64> {
        let mut c = vec![Complex64::new(1.0, 0.0)];
        for &r in rs {
            let mut next = vec![Complex64::new(0.0, 0.0); c.len() + 1];
            for (i, &a) in c.iter().enumerate() {
                next[i + 1] += a;
                next[i] -= a * r;
            }
            c = next;
        }
        c
    }

    #[test]
    fn recovers_known_roots() {
        let want = [
            Complex64::new(2.0, 0.0),
            Complex64::new(-1.0, 0.5),
            Complex64::new(-1.0, -0.5),
            Complex64::new(0.0, 3.0),
            Complex64::new(0.3, 0.0),
        ];
        let got = roots(&expand(&want));
        assert!(got.converged);
        for w in &want {
            let best = got.roots.iter().map(|r| (r - w).norm()).fold(f64::MAX, f64::min);
            assert!(best < 1e-10, "{w} missing: {:?}", got.roots);
        }
    }

    #[test]
    fn unit_circle_roots() {
        // z^6 - 1
        let mut c = vec![0.0; 7];
        c[0] = -1.0;
        c[6] = 1.0;
        let got = real_roots(&c);
        for r in &got.roots {
            assert!((r.norm() - 1.0).abs() < 1e-12);
        }
        assert_eq!(real_roots(&[0.0, 0.0, 1.0]).roots.len(), 2);
        assert!(real_roots(&[3.0]).roots.is_empty());
    }
}
