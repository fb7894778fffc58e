//! Proportion of positive analytic rank among surfaces over F_l(T), exactly
//! and by sampling, and a resumable sweep.
//!
//! cargo run --release --example rho

use ellsurf::experiments::{rho_estimate, rho_sweep, RhoCell, RhoMode, SweepConfig, SweepControl};

fn main() -> ellsurf::Result<()> {
    let exact = rho_estimate(5, 1, 1, RhoMode::Exhaustive, 10_000, 0)?;
    println!("rho_5(1,1) = {}/{} = {:.4}", exact.positive_rank_count, exact.total - exact.isotrivial_count - exact.degenerate_count, exact.rho_hat);

    let mc = rho_estimate(7, 1, 2, RhoMode::MonteCarlo, 2_000, 3)?;
    println!("rho_7(1,2) ~ {:.4} [{:.4}, {:.4}]", mc.rho_hat, mc.ci_low.unwrap_or(0.0), mc.ci_high.unwrap_or(1.0));

    let dir = std::env::temp_dir().join("ellsurf-rho-example.jsonl");
    let _ = std::fs::remove_file(&dir);
    let config = SweepConfig {
        cells: vec![RhoCell::new(5, 1, 1), RhoCell::new(5, 1, 2), RhoCell::new(7, 1, 1)],
        mode: RhoMode::MonteCarlo,
        budget: 1_000,
        seed: 11,
    };
    let part = rho_sweep(&config, Some(&dir), SweepControl { stop_after_units: Some(2) }, 1)?;
    println!("stopped after {}/{} units", part.units_done, part.units_total);
    let done = rho_sweep(&config, Some(&dir), SweepControl::default(), 1)?;
    for r in &done.rows {
        println!("  l={} m={} n={}: {:.4}", r.l, r.m, r.n, r.rho_hat);
    }
    let _ = std::fs::remove_file(&dir);
    Ok(())
}
