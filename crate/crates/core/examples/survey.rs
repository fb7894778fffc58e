//! Average Nagao rank estimate over a random sample of S_{m,n}(M).
//!
//! cargo run --release --example survey

use ellsurf::experiments::avg_rank_survey;
use ellsurf::families::{FamilySpec, Ordering};

fn main() -> ellsurf::Result<()> {
    let spec = FamilySpec::new(1, 2, 10, Ordering::Height)?;
    let r = avg_rank_survey(&spec, 1_000, 100, 0, 1)?;
    println!("mean {:.3} +- {:.3} over {} surfaces", r.mean, r.se, r.samples);
    for (k, c) in &r.histogram {
        println!("  {k:>2}: {c}");
    }
    println!("negative mass {:.3}", r.negative_mass);
    Ok(())
}
