//! Surfaces over Q whose reductions mod every l | N have positive rank,
//! compared with the product of the local proportions.
//!
//! cargo run --release --example crt

use ellsurf::experiments::{crt_experiment, CrtConfig};

fn main() -> ellsurf::Result<()> {
    let cfg = CrtConfig { modulus: 35, m: 1, n: 1, big_m: 20, samples: 600, seed: 5, rho_budget: 5_000 };
    let r = crt_experiment(&cfg, 1)?;
    println!("N=35: {} of {} surfaces used ({} isotrivial reductions)", r.used, r.samples, r.excluded_isotrivial);
    for rho in &r.rhos {
        println!("  rho_{} = {:.4}", rho.l, rho.rho_hat);
    }
    println!("observed {:.4} +- {:.4}", r.lhs_hat, r.lhs_se);
    println!("product  {:.4} +- {:.4} (exact degrees {:.4})", r.product_of_rhos, r.product_se, r.exact_degree_product);
    println!("within 3 SE: {}", r.within_3se);
    Ok(())
}
