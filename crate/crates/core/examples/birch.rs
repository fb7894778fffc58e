//! The Birch model: exact trace moments, sampling, and the random
//! three-series.
//!
//! cargo run --release --example birch

use ellsurf::rng::stream;
use ellsurf::stochastic::{birch_moment, birch_sample, three_series_sim, BirchModel, SampleMode, Source, ThreeSeriesConfig};

fn main() -> ellsurf::Result<()> {
    for p in [5, 7, 11, 101] {
        let m2 = birch_moment(p, 2)?;
        let m4 = birch_moment(p, 4)?;
        println!("p={p:<3} E[a^2] = {m2}  E[a^4] = {m4}");
    }

    let model = BirchModel::new(1009, SampleMode::Table)?;
    let mut rng = stream(1, &[0]);
    let draws: Vec<i64> = (0..10).map(|_| birch_sample(&model, &mut rng)).collect();
    println!("p=1009 draws {draws:?}");

    let cfg = ThreeSeriesConfig { eps: 0.1, grid: vec![1_000, 10_000], seed: 7, trials: 20, source: Source::Birch };
    for g in three_series_sim(&cfg, 1)?.summary {
        println!("X={:<6} median |S/X^0.6| {:.3}  var {:.3}", g.x, g.median_abs, g.variance);
    }
    Ok(())
}
