//! Acceptance checks. Prints one `PASS`/`FAIL` line per criterion.
//!
//! `ACCEPTANCE_ONLY=1,3` restricts the run to the listed criteria.

use std::collections::HashMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use ellsurf::experiments::{crt_experiment, rho_estimate, CrtConfig, RhoMode};
use ellsurf::ff::{make_extension, ExtField, FiniteField, PrimeField};
use ellsurf::fpoly::FpPoly;
use ellsurf::lfunction::{analyze, find_sections, functional_equation_check, power_sums, weil_check, Section, Strategy};
use ellsurf::nagao::nagao_rank_estimate;
use ellsurf::point_count::{trace_bsgs, trace_naive, trace_power};
use ellsurf::rng::stream;
use ellsurf::stochastic::{birch_moment, birch_sample, three_series_sim, BirchModel, SampleMode, Source, ThreeSeriesConfig};
use ellsurf::surface::{SurfaceFq, SurfaceQ};

/// Criteria whose check is run and reported but does not fail the suite.
const REPORT_ONLY: &[u32] = &[7];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

// ---------------------------------------------------------------------------
// oracles

/// `#{y : y^2 = v}` for every element `v` of `f`, by squaring everything.
fn root_counts<F: FiniteField<Elem = u64>>(f: &F) -> Vec<u8> {
    let mut c = vec![0u8; f.order() as usize];
    for i in 0..f.order() {
        let y = f.element(i);
        c[f.mul(y, y) as usize] += 1;
    }
    c
}

/// `q + 1 - #E(F_q)` for `y^2 = x^3 + a x + b`, projective count.
fn brute_trace<F: FiniteField<Elem = u64>>(f: &F, roots: &[u8], a: u64, b: u64) -> i64 {
    let mut affine = 0i64;
    for i in 0..f.order() {
        let x = f.element(i);
        let v = f.add(f.mul(f.add(f.mul(x, x), a), x), b);
        affine += roots[v as usize] as i64;
    }
    f.order() as i64 - affine
}

/// Coefficients of `P(T + t)`.
fn taylor<F: FiniteField<Elem = u64>>(f: &F, p: &[u64], t: u64) -> Vec<u64> {
    let mut out: Vec<u64> = Vec::new();
    for &c in p.iter().rev() {
        // out = out * (T + t) + c
        let mut next = vec![f.zero(); out.len() + 1];
        for (i, &o) in out.iter().enumerate() {
            next[i + 1] = f.add(next[i + 1], o);
            next[i] = f.add(next[i], f.mul(o, t));
        }
        next[0] = f.add(next[0], c);
        out = next;
    }
    out
}

fn ord0(p: &[u64]) -> usize {
    p.iter().position(|&c| c != 0).unwrap_or(usize::MAX)
}

/// Local contribution at `T = 0` after clearing `T^4, T^6` while both
/// orders allow it.
fn local_at_zero<F: FiniteField<Elem = u64>>(f: &F, roots: &[u8], mut a: Vec<u64>, mut b: Vec<u64>) -> i64 {
    while ord0(&a) >= 4 && ord0(&b) >= 6 {
        a = a.get(4..).map(<[u64]>::to_vec).unwrap_or_default();
        b = b.get(6..).map(<[u64]>::to_vec).unwrap_or_default();
    }
    let a0 = a.first().copied().unwrap_or(0);
    let b0 = b.first().copied().unwrap_or(0);
    brute_trace(f, roots, a0, b0)
}

fn deg(p: &[i64]) -> usize {
    p.iter().rposition(|&c| c != 0).unwrap_or(0)
}

/// `c_k = sum over t in P^1(F_{l^k})` of the local trace of the minimal model.
fn brute_ck(l: u64, a: &[i64], b: &[i64], k: u32) -> i64 {
    let f = make_extension(l, k).unwrap();
    let roots = root_counts(&f);
    let a_q: Vec<u64> = a.iter().map(|&c| f.from_int(c)).collect();
    let b_q: Vec<u64> = b.iter().map(|&c| f.from_int(c)).collect();
    let mut s = 0i64;
    for i in 0..f.order() {
        let t = f.element(i);
        s += local_at_zero(&f, &roots, taylor(&f, &a_q, t), taylor(&f, &b_q, t));
    }
    let e = deg(a).div_ceil(4).max(deg(b).div_ceil(6));
    let flip = |p: &[u64], w: usize| (0..=w).map(|j| p.get(w - j).copied().unwrap_or(0)).collect::<Vec<u64>>();
    s + local_at_zero(&f, &roots, flip(&a_q, 4 * e), flip(&b_q, 6 * e))
}

fn random_surface(l: u64, rng: &mut impl Rng) -> (Vec<i64>, Vec<i64>, SurfaceFq) {
    loop {
        let a: Vec<i64> = (0..rng.random_range(1..=3)).map(|_| rng.random_range(0..l as i64)).collect();
        let b: Vec<i64> = (0..rng.random_range(1..=3)).map(|_| rng.random_range(0..l as i64)).collect();
        if let Ok(s) = SurfaceFq::from_i64(l, &a, &b) {
            if !s.is_isotrivial() {
                return (a, b, s);
            }
        }
    }
}

// ---------------------------------------------------------------------------
// criteria

fn prev_prime(mut n: u64) -> u64 {
    while !ellsurf::arith::is_prime(n) {
        n -= 1;
    }
    n
}

fn c1_trace_oracle() -> Outcome {
    let start = Instant::now();
    let primes: Vec<u64> = (0..20).map(|i| prev_prime(10f64.powf(3.0 + 4.0 * i as f64 / 19.0).round() as u64)).collect();
    let mut mismatches = 0;
    for &p in &primes {
        let f = PrimeField::with_char_table(p).unwrap();
        let mut rng = stream(1, &[p]);
        let mut done = 0;
        while done < 1000 {
            let (a, b) = (rng.random_range(0..p), rng.random_range(0..p));
            let naive = trace_naive(&f, a, b);
            if naive.singular_type != ellsurf::point_count::SingularType::Smooth {
                continue;
            }
            if trace_bsgs(&f, a, b).map(|r| r.trace) != Ok(naive.trace) {
                mismatches += 1;
            }
            done += 1;
        }
    }
    let t = start.elapsed();
    outcome(
        mismatches == 0 && t < Duration::from_secs(300),
        format!("20 primes {}..{}, 1000 curves each, {mismatches} mismatches, {:.1} s", primes[0], primes[19], t.as_secs_f64()),
    )
}

fn c2_extension() -> Outcome {
    let mut checked = 0;
    let mut bad = 0;
    let f5 = PrimeField::new(5).unwrap();
    let f25 = make_extension(5, 2).unwrap();
    let r25 = root_counts(&f25);
    for a in 0..5u64 {
        for b in 0..5u64 {
            let t = trace_naive(&f5, a, b);
            if t.singular_type != ellsurf::point_count::SingularType::Smooth {
                continue;
            }
            let direct = brute_trace(&f25, &r25, f25.from_int(a as i64), f25.from_int(b as i64));
            checked += 1;
            bad += usize::from(trace_power(t.trace, 5, 2).unwrap() != direct as i128);
        }
    }
    let smooth_f5 = checked;
    // k = 3: 200 random smooth curves over primes 5..47
    let primes = [5u64, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47];
    let mut fields: HashMap<u64, (ExtField, Vec<u8>)> = HashMap::new();
    let mut rng = stream(2, &[]);
    let mut cubic = 0;
    while cubic < 200 {
        let l = primes[rng.random_range(0..primes.len())];
        let fl = PrimeField::new(l).unwrap();
        let (a, b) = (rng.random_range(0..l), rng.random_range(0..l));
        let t = trace_naive(&fl, a, b);
        if t.singular_type != ellsurf::point_count::SingularType::Smooth {
            continue;
        }
        let (f3, r3) = fields.entry(l).or_insert_with(|| {
            let f = make_extension(l, 3).unwrap();
            let r = root_counts(&f);
            (f, r)
        });
        let direct = brute_trace(f3, r3, f3.from_int(a as i64), f3.from_int(b as i64));
        bad += usize::from(trace_power(t.trace, l, 3).unwrap() != direct as i128);
        cubic += 1;
    }
    outcome(bad == 0, format!("{smooth_f5} smooth curves over F_5 at k=2, {cubic} random curves at k=3, {bad} mismatches"))
}

fn c3_worked() -> Outcome {
    let s1 = SurfaceFq::from_i64(5, &[1], &[0, 1]).unwrap();
    let a1 = analyze(&s1, Strategy::Full, None).unwrap();
    let s2 = SurfaceFq::from_i64(5, &[0, 1], &[0, 0, 1]).unwrap();
    let a2 = analyze(&s2, Strategy::Full, None).unwrap();
    let oracle1 = (brute_ck(5, &[1], &[0, 1], 1), brute_ck(5, &[1], &[0, 1], 2));
    let oracle2 = brute_ck(5, &[0, 1], &[0, 0, 1], 1);
    let secs = find_sections(&s2, 1).unwrap();
    let want = Section { x: FpPoly::zero(5), y: FpPoly::x(5) };
    let ok1 = a1.summary.deg_n == 4 && a1.lpoly.to_text() == "1" && a1.rank.analytic_rank == 0 && oracle1 == (0, 0);
    let ok2 = a2.summary.deg_n == 5
        && a2.lpoly.to_text() == "1,-5"
        && a2.rank.analytic_rank == 1
        && oracle2 == -5
        && secs.contains(&want);
    outcome(
        ok1 && ok2,
        format!(
            "A=1,B=T: deg_n={} L={} rank={} (brute c1,c2={:?}); A=T,B=T^2: deg_n={} L={} rank={} (brute c1={oracle2}) sections {}",
            a1.summary.deg_n,
            a1.lpoly.to_text(),
            a1.rank.analytic_rank,
            oracle1,
            a2.summary.deg_n,
            a2.lpoly.to_text(),
            a2.rank.analytic_rank,
            secs.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(" "),
        ),
    )
}

fn c4_power_sums() -> Outcome {
    let start = Instant::now();
    let mut rng = stream(4, &[]);
    let mut bad = 0;
    for _ in 0..50 {
        let (a, b, s) = random_surface(5, &mut rng);
        let c = power_sums(&s, &s.classify_places(), 3).unwrap();
        for k in 1..=3u32 {
            if c[k as usize - 1] != brute_ck(5, &a, &b, k) as i128 {
                bad += 1;
            }
        }
    }
    let t = start.elapsed();
    outcome(bad == 0 && t < Duration::from_secs(600), format!("50 surfaces, k<=3, {bad} mismatches, {:.1} s", t.as_secs_f64()))
}

fn c5_invariants() -> Outcome {
    let mut violations = 0;
    let mut total = 0;
    let mut degrees = std::collections::BTreeMap::new();
    for l in [5u64, 7] {
        let mut rng = stream(5, &[l]);
        for _ in 0..250 {
            let (_, _, s) = random_surface(l, &mut rng);
            total += 1;
            let Ok(an) = analyze(&s, Strategy::Full, None) else {
                violations += 1;
                continue;
            };
            let lp = &an.lpoly;
            *degrees.entry(lp.degree()).or_insert(0) += 1;
            let ok = lp.coeffs()[0].is_one()
                && weil_check(lp.q(), lp.coeffs()).is_ok()
                && (lp.sign() == 1 || lp.sign() == -1)
                && functional_equation_check(lp) == Ok(lp.sign());
            violations += usize::from(!ok);
        }
    }
    outcome(violations == 0, format!("{total} surfaces over F_5, F_7, {violations} violations, L degrees {degrees:?}"))
}

/// `sum_{(a,b)} a_p^k` with the Legendre symbol by Euler's criterion.
fn moment_oracle(p: u64, k: u32) -> BigRational {
    let chi = |v: u64| -> i64 {
        if v == 0 {
            0
        } else if ellsurf::arith::pow_mod(v, (p - 1) / 2, p) == 1 {
            1
        } else {
            -1
        }
    };
    let mut s = BigInt::zero();
    for a in 0..p {
        for b in 0..p {
            let t: i64 = -(0..p).map(|x| chi((x * x % p * x + a * x + b) % p)).sum::<i64>();
            s += BigInt::from(t).pow(k);
        }
    }
    BigRational::new(s, BigInt::from(p * p))
}

fn c6_birch() -> Outcome {
    // second moments, frozen from the enumeration oracle
    let golden: [(u64, i64); 6] = [(5, 4), (7, 6), (11, 10), (13, 12), (17, 16), (19, 18)];
    let mut ok = true;
    for (p, m2) in golden {
        let frozen = BigRational::from_integer(BigInt::from(m2));
        ok &= birch_moment(p, 1).unwrap().is_zero() && moment_oracle(p, 1).is_zero();
        ok &= birch_moment(p, 2).unwrap() == frozen && moment_oracle(p, 2) == frozen;
    }
    let n = 1_000_000;
    let hist = |mode: SampleMode| {
        let m = BirchModel::new(7, mode).unwrap();
        let mut r = stream(6, &[mode as u64]);
        let mut h = [0f64; 11];
        for _ in 0..n {
            h[(birch_sample(&m, &mut r) + 5) as usize] += 1.0;
        }
        h
    };
    let (d, t) = (hist(SampleMode::Direct), hist(SampleMode::Table));
    let (mut stat, mut cells) = (0.0, 0);
    for (x, y) in d.iter().zip(&t) {
        if x + y > 0.0 {
            stat += (x - y) * (x - y) / (x + y);
            cells += 1;
        }
    }
    let pval = 1.0 - ChiSquared::new((cells - 1) as f64).unwrap().cdf(stat);
    outcome(
        ok && pval > 1e-3,
        format!("mean 0 and E[a^2] = p - 1 for p in 5..19: {ok}; direct vs table chi2={stat:.2} df={} p={pval:.3}", cells - 1),
    )
}

fn c7_three_series() -> Outcome {
    let start = Instant::now();
    let cfg = ThreeSeriesConfig { eps: 0.1, grid: vec![1_000, 10_000, 100_000], seed: 7, trials: 200, source: Source::Birch };
    let out = three_series_sim(&cfg, 0).unwrap();
    let med: Vec<f64> = out.summary.iter().map(|s| s.median_abs).collect();
    let var: Vec<f64> = out.summary.iter().map(|s| s.variance).collect();
    let mags: Vec<i32> = var.iter().map(|v| v.log10().floor() as i32).collect();
    let ratio = med[2] / med[0];
    let trend = mags.windows(2).all(|w| w[1] <= w[0]);
    let again = three_series_sim(&ThreeSeriesConfig { trials: 3, ..cfg.clone() }, 1).unwrap();
    let same = again.trajectories.iter().zip(&out.trajectories).all(|(a, b)| {
        a.normalized_values.iter().zip(&b.normalized_values).all(|(x, y)| x.to_bits() == y.to_bits())
    });
    outcome(
        ratio <= 0.5 && trend && same,
        format!(
            "median |S_X/X^0.6| = {:.4} / {:.4} / {:.4} (ratio {ratio:.3}, need <= 0.5); Var(S_X/X^0.55) = {:.3} / {:.3} / {:.3} (non-increasing magnitude: {trend}); deterministic: {same}; {:.0} s",
            med[0], med[1], med[2], var[0], var[1], var[2], start.elapsed().as_secs_f64()
        ),
    )
}

fn c8_nagao() -> Outcome {
    let start = Instant::now();
    let one = SurfaceQ::new(vec![0, 1], vec![0, 0, 1]).unwrap();
    let zero = SurfaceQ::new(vec![1], vec![0, 1]).unwrap();
    let run = |s: &SurfaceQ| -> Vec<f64> { [1, 4, 16].iter().map(|&t| nagao_rank_estimate(s, 2000, t)).collect() };
    let (e1, e0) = (run(&one), run(&zero));
    let same = |v: &[f64]| v.iter().all(|x| x.to_bits() == v[0].to_bits());
    let t = start.elapsed();
    outcome(
        (e1[0] - 1.0).abs() <= 0.5 && e0[0].abs() <= 0.5 && same(&e1) && same(&e0) && t < Duration::from_secs(600),
        format!(
            "A=T,B=T^2: {:.4}; A=1,B=T: {:.4}; identical over 1/4/16 threads: {}; {:.1} s",
            e1[0],
            e0[0],
            same(&e1) && same(&e0),
            t.as_secs_f64()
        ),
    )
}

fn c9_rho() -> Outcome {
    // oracle: over F_5 with deg A = deg B = 1 the L-polynomial has degree
    // at most 1, so the rank is positive exactly when c_1 = -5
    let mut positive = 0;
    for a in 0..20i64 {
        for b in 0..20i64 {
            let (aa, bb) = ([a % 5, 1 + a / 5], [b % 5, 1 + b / 5]);
            positive += usize::from(brute_ck(5, &aa, &bb, 1) == -5);
        }
    }
    const GOLDEN: f64 = 0.4;
    let ex = rho_estimate(5, 1, 1, RhoMode::Exhaustive, 400, 0).unwrap();
    let mc = rho_estimate(5, 1, 1, RhoMode::MonteCarlo, 10_000, 9).unwrap();
    let (lo, hi) = (mc.ci_low.unwrap(), mc.ci_high.unwrap());
    let r7 = rho_estimate(7, 1, 2, RhoMode::MonteCarlo, 2_600, 9).unwrap();
    let hw = r7.ci95.unwrap();
    let ok = positive == 160 && ex.rho_hat == GOLDEN && lo <= GOLDEN && GOLDEN <= hi && hw <= 0.02;
    outcome(
        ok,
        format!(
            "rho_5(1,1) exhaustive = {} (oracle {positive}/400); Monte Carlo 10^4 = {:.4} [{lo:.4}, {hi:.4}]; rho_7(1,2) = {:.4} +- {hw:.4}, distance to 1/2 = {:.4}",
            ex.rho_hat,
            mc.rho_hat,
            r7.rho_hat,
            (r7.rho_hat - 0.5).abs()
        ),
    )
}

fn c10_crt() -> Outcome {
    let cfg = CrtConfig { modulus: 35, m: 1, n: 1, big_m: 20, samples: 2400, seed: 10, rho_budget: 100_000 };
    let r = crt_experiment(&cfg, 0).unwrap();
    outcome(
        r.within_3se && r.used >= 2000,
        format!(
            "N=35 M=20: lhs {:.4} (n={}), prod rho {:.4} (exact-degree product {:.4}), |diff| {:.4} vs 3 SE {:.4}",
            r.lhs_hat,
            r.used,
            r.product_of_rhos,
            r.exact_degree_product,
            r.discrepancy.abs(),
            3.0 * r.combined_se
        ),
    )
}

fn cli(args: &[&str]) -> String {
    let out = Command::new(env!("CARGO_BIN_EXE_ellsurf")).args(args).output().expect("run ellsurf");
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn data(text: &str) -> String {
    text.lines().filter(|l| !l.starts_with('#')).skip_while(|l| l.starts_with("{\"config\"")).collect::<Vec<_>>().join("\n")
}

fn c11_determinism() -> Outcome {
    let runs: [&[&str]; 5] = [
        &["lfun", "--ell", "7", "--surface", "A=1,2;B=3,0,1"],
        &["--seed", "7", "rho", "--ell", "5", "--m", "1", "--n", "2", "--mode", "mc", "--budget", "300"],
        &["--seed", "3", "threeseries", "--eps", "0.1", "--grid", "100,1000,3000", "--trials", "4", "--format", "csv"],
        &["--seed", "5", "birch", "--p", "11", "--samples", "200"],
        &["--seed", "2", "survey", "--m", "1", "--n", "1", "--M", "3", "--xmax", "150", "--samples", "6"],
    ];
    let mut same = 0;
    for args in runs {
        same += usize::from(data(&cli(args)) == data(&cli(args)));
    }
    let dir = tempfile::tempdir().unwrap();
    let grid = dir.path().join("grid.txt");
    std::fs::write(&grid, "5,1,2\n7,1,2\n11,1,1\n").unwrap();
    let cp = dir.path().join("cp.jsonl");
    let g = grid.to_str().unwrap();
    let c = cp.to_str().unwrap();
    let base = ["--seed", "4", "rho-sweep", "--grid", g, "--mode", "mc", "--budget", "700"];
    let full = cli(&base);
    let mut part: Vec<&str> = base.to_vec();
    part.extend(["--checkpoint", c, "--stop-after-units", "3"]);
    let interrupted = cli(&part);
    let mut resume: Vec<&str> = base.to_vec();
    resume.extend(["--checkpoint", c]);
    let resumed = cli(&resume);
    let resumed_ok = interrupted.is_empty() && Path::new(c).exists() && data(&resumed) == data(&full) && !data(&full).is_empty();
    outcome(
        same == runs.len() && resumed_ok,
        format!("{same}/{} repeated runs identical; interrupted rho-sweep resumed identically: {resumed_ok}", runs.len()),
    )
}

fn main() {
    let checks: [(u32, &str, fn() -> Outcome); 11] = [
        (1, "trace oracle equivalence", c1_trace_oracle),
        (2, "extension consistency", c2_extension),
        (3, "worked L-functions", c3_worked),
        (4, "power-sum oracle", c4_power_sums),
        (5, "L-invariant suite", c5_invariants),
        (6, "Birch model", c6_birch),
        (7, "three-series simulation", c7_three_series),
        (8, "Nagao estimator", c8_nagao),
        (9, "rho consistency", c9_rho),
        (10, "CRT experiment", c10_crt),
        (11, "end-to-end determinism", c11_determinism),
    ];
    let only: Option<Vec<u32>> = std::env::var("ACCEPTANCE_ONLY")
        .ok()
        .map(|s| s.split(',').filter_map(|x| x.trim().parse().ok()).collect());
    let mut hard_failures = 0;
    for (id, name, check) in checks {
        if only.as_ref().is_some_and(|o| !o.contains(&id)) {
            continue;
        }
        let start = Instant::now();
        let res = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            outcome(false, format!("panicked: {msg}"))
        });
        let tag = if res.pass { "PASS" } else { "FAIL" };
        let note = if !res.pass && REPORT_ONLY.contains(&id) { " [report-only]" } else { "" };
        println!("{tag} {id:>2} {name}{note}: {} ({:.1} s)", res.detail, start.elapsed().as_secs_f64());
        if !res.pass && !REPORT_ONLY.contains(&id) {
            hard_failures += 1;
        }
    }
    if hard_failures > 0 {
        eprintln!("{hard_failures} acceptance criteria failed");
        std::process::exit(1);
    }
}
