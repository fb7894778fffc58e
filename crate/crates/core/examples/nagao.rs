//! Nagao's rank estimate for a surface over Q(T), and the curve-level sums
//! for a single fibre.
//!
//! cargo run --release --example nagao

use ellsurf::nagao::{bsd_from_traces, heathbrown_from_traces, nagao_sum, rubinstein_from_traces, CurveQ};
use ellsurf::surface::SurfaceQ;

fn main() -> ellsurf::Result<()> {
    let threads = std::thread::available_parallelism().map_or(1, |n| n.get());
    // no sections; the section (T, T); the sections (0, T) and (1, T)
    for text in ["A=1;B=0,1", "A=1;B=0,-1,1,-1", "A=-1;B=0,0,1"] {
        let s: SurfaceQ = text.parse()?;
        for x in [500, 2000, 8000] {
            let est = nagao_sum(&s, x, threads);
            println!("{text:<18} X={x:<5} rank estimate {:.3}", est.rank_estimate());
        }
    }

    let e = CurveQ::new(-1, 1)?;
    let tr = e.traces(100_000, threads);
    println!("y^2 = x^3 - x + 1 up to 1e5:");
    println!("  Heath-Brown {:.4}", heathbrown_from_traces(&tr));
    println!("  BSD product {:.4}", bsd_from_traces(&tr));
    println!("  Rubinstein  {:.4}", rubinstein_from_traces(&tr, 1e5));
    Ok(())
}
