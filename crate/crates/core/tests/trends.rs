use ellsurf::experiments::avg_rank_survey;
use ellsurf::families::{FamilySpec, Ordering};
use ellsurf::stochastic::{fixed_t_batch, Source};

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    0.5 * (v[(n - 1) / 2] + v[n / 2])
}

#[test]
fn fixed_t_median_decays() {
    let seeds: Vec<u64> = (0..100).collect();
    let runs = fixed_t_batch(0.25, &[1_000, 100_000], &seeds, Source::Birch).unwrap();
    let lo = median(runs.iter().map(|r| r.normalized_values[0].abs()).collect());
    let hi = median(runs.iter().map(|r| r.normalized_values[1].abs()).collect());
    eprintln!("fixed-t median |S_X|/X^0.25: {lo:.4} at 1e3, {hi:.4} at 1e5");
    assert!(hi < lo);
}

#[test]
fn fixed_t_batch_matches_single_runs() {
    let grid = [500, 2_000];
    let batch = fixed_t_batch(0.25, &grid, &[3, 4], Source::Birch).unwrap();
    for (seed, b) in [3u64, 4].into_iter().zip(&batch) {
        let one = ellsurf::stochastic::fixed_t_series(0.25, &grid, seed, Source::Birch).unwrap();
        assert_eq!(one.normalized_values, b.normalized_values);
    }
}

#[test]
fn survey_negative_mass_small() {
    let spec = FamilySpec::new(1, 1, 10, Ordering::Height).unwrap();
    let r = avg_rank_survey(&spec, 500, 200, 0, 1).unwrap();
    eprintln!("survey mean {:.3} se {:.3} negative mass {:.3} hist {:?}", r.mean, r.se, r.negative_mass, r.histogram);
    assert_eq!(r.estimates.len(), 200);
    assert!(r.negative_mass <= 0.05);
}
