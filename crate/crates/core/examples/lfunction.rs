//! L-polynomial, sign and analytic rank of surfaces over F_5(T), with a
//! search for low-degree sections.
//!
//! cargo run --example lfunction

use ellsurf::lfunction::{analyze, coefficient_height, Strategy};
use ellsurf::surface::SurfaceFq;

fn main() -> ellsurf::Result<()> {
    for text in ["A=0,1;B=0,0,1", "A=1,0,1;B=0,1,0,1", "A=2,0,0,1;B=1,1,0,0,0,1"] {
        let s = SurfaceFq::parse(5, text)?;
        let an = analyze(&s, Strategy::default(), Some(1))?;
        println!("{text}");
        println!("  L(u) = {}  (deg {}, height {})", an.lpoly.to_text(), an.lpoly.degree(), coefficient_height(&an.lpoly));
        println!("  sign {:+}, analytic rank {}, sections {}", an.lpoly.sign(), an.rank.analytic_rank, an.rank.sections_found);
    }
    Ok(())
}
