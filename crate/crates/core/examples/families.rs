//! Mahler measures, the families S_{m,n}(M) and uniform sampling from
//! them.
//!
//! cargo run --example families

use ellsurf::families::{enumerate_family, mahler_measure, sample_family, FamilySpec, Ordering};

fn main() -> ellsurf::Result<()> {
    for c in [vec![-1, 1], vec![1, 1, 1], vec![-1, -1, 0, 1]] {
        let mu = mahler_measure(&c, 1e-12)?;
        println!("M({c:?}) = {:.12} +- {:.1e}", mu.value, mu.error);
    }

    for ordering in [Ordering::Height, Ordering::Mahler] {
        let spec = FamilySpec::new(1, 1, 2, ordering)?;
        let mut it = enumerate_family(&spec)?;
        let n = it.by_ref().count();
        println!("S_1,1(2) by {ordering}: {n} surfaces, {} degenerate, {} ambiguous", it.degenerate(), it.ambiguous());
    }

    let spec = FamilySpec::new(2, 3, 10, Ordering::Height)?;
    let sample = sample_family(&spec, 5, 42)?;
    for s in &sample.surfaces {
        println!("  {s}");
    }
    println!("acceptance rate {:.3}", sample.acceptance_rate());
    Ok(())
}
