//! Bad places, reduction types and the conductor degree of a surface over
//! F_l(T).
//!
//! cargo run --example places -- 7 "A=0,1;B=1,0,0,1"

use ellsurf::surface::SurfaceFq;

fn main() -> ellsurf::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let l: u64 = args.first().map_or(Ok(5), |s| s.parse()).map_err(|e| ellsurf::Error::Parse(format!("{e}")))?;
    let text = args.get(1).map_or("A=0,1;B=0,0,1", String::as_str);
    let s = SurfaceFq::parse(l, text)?;
    let summary = s.classify_places();

    println!("{text} over F_{l}");
    println!("discriminant {}", s.discriminant());
    let good_inf = summary.infinity.cond_exp == 0;
    for r in summary.places.iter().chain(good_inf.then_some(&summary.infinity)) {
        println!("  {:<12} deg {} {:?} f={} v(Delta)={} a={}", r.place.to_string(), r.degree, r.kind, r.cond_exp, r.disc_valuation, r.trace);
    }
    if !summary.removable.is_empty() {
        println!("  {} removable place(s)", summary.removable.len());
    }
    println!("deg N = {}, deg L = {}, isotrivial: {}", summary.deg_n, summary.lpoly_degree, s.is_isotrivial());
    Ok(())
}
