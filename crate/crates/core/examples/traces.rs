//! Frobenius traces of y^2 = x^3 + a x + b over prime and extension fields.
//!
//! cargo run --example traces

use ellsurf::ff::{make_extension, PrimeField};
use ellsurf::point_count::{trace, trace_bsgs, trace_power};

fn main() -> ellsurf::Result<()> {
    let f5 = PrimeField::new(5)?;
    for (a, b) in [(1, 1), (3, 4), (0, 0), (2, 3)] {
        let t = trace(&f5, a, b);
        println!("F_5  a={a} b={b}: trace {:>2} ({:?})", t.trace, t.singular_type);
    }

    // large prime: BSGS, then Weil recursion for the extension traces
    let p = 1_000_003;
    let fp = PrimeField::new(p)?;
    let t = trace_bsgs(&fp, 2, 7)?;
    println!("F_{p} a=2 b=7: trace {}", t.trace);
    for k in 2..=4 {
        println!("  over F_p^{k}: {}", trace_power(t.trace, p, k)?);
    }

    // the same curve over F_25, counted directly
    let f25 = make_extension(5, 2)?;
    let direct = trace(&f25, 1, 1).trace;
    let lifted = trace_power(trace(&f5, 1, 1).trace, 5, 2)?;
    println!("F_25 a=1 b=1: direct {direct}, from F_5 {lifted}");
    Ok(())
}
