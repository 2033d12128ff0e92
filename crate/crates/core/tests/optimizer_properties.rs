use glidesim::optimizer::{
    evaluate, grid_points, grid_search, nelder_mead, rank, DesignSpace, Dimension, NelderMeadOptions, Param,
};
use glidesim::ScenarioConfig;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn quadratic(rng: &mut ChaCha8Rng, n: usize) -> (Vec<f64>, Vec<f64>) {
    let centre = (0..n).map(|_| rng.random_range(-3.0..3.0)).collect();
    let weights = (0..n).map(|_| rng.random_range(0.5..5.0)).collect();
    (centre, weights)
}

#[test]
fn nelder_mead_finds_quadratic_optimum() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for n in 1..=4 {
        for _ in 0..5 {
            let (centre, weights) = quadratic(&mut rng, n);
            let f = |x: &[f64]| -> f64 {
                -x.iter().zip(&centre).zip(&weights).map(|((x, c), w)| w * (x - c).powi(2)).sum::<f64>()
            };
            let start: Vec<f64> = (0..n).map(|_| rng.random_range(-5.0..5.0)).collect();
            let lower = vec![-5.0; n];
            let upper = vec![5.0; n];
            let r = nelder_mead(f, &start, &lower, &upper, &NelderMeadOptions::default());
            assert!(r.iterations <= 200);
            let dist = r.x.iter().zip(&centre).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
            assert!(dist < 1e-4, "n={n} dist={dist} iters={}", r.iterations);
        }
    }
}

#[test]
fn nelder_mead_respects_bounds() {
    // optimum outside the box: best point is the nearest corner
    let f = |x: &[f64]| -(x[0] - 10.0).powi(2) - (x[1] + 10.0).powi(2);
    let r = nelder_mead(f, &[0.0, 0.0], &[-1.0, -1.0], &[1.0, 1.0], &NelderMeadOptions::default());
    assert!((r.x[0] - 1.0).abs() < 1e-3 && (r.x[1] + 1.0).abs() < 1e-3, "{:?}", r.x);
}

fn bladder_space(lower: f64, upper: f64) -> DesignSpace {
    DesignSpace {
        dimensions: vec![Dimension {
            param: Param::BladderCapacity,
            lower,
            upper,
        }],
    }
}

fn two_d_space() -> DesignSpace {
    DesignSpace {
        dimensions: vec![
            Dimension {
                param: Param::BladderCapacity,
                lower: 2.5e-4,
                upper: 3.5e-4,
            },
            Dimension {
                param: Param::Theta,
                lower: 0.4,
                upper: 0.6,
            },
        ],
    }
}

#[test]
fn grid_winner_matches_independent_rescan() {
    let base = ScenarioConfig::paper_default();
    let space = two_d_space();
    let ranked = grid_search(&space, 4, &base, 1000, 2).unwrap();
    assert_eq!(ranked.len(), 16);
    let mut best: Option<(f64, Vec<f64>)> = None;
    for c in grid_points(&space, 4) {
        let e = evaluate(&space, &c, &base).unwrap();
        let better = match &best {
            None => true,
            Some((s, v)) => e.score > *s || (e.score == *s && c.values < *v),
        };
        if better {
            best = Some((e.score, c.values.clone()));
        }
    }
    let (score, values) = best.unwrap();
    assert_eq!(ranked[0].score, score);
    assert_eq!(ranked[0].candidate.values, values);
}

#[test]
fn ranking_ignores_input_order() {
    let base = ScenarioConfig::paper_default();
    let space = two_d_space();
    let ranked = grid_search(&space, 3, &base, 1000, 1).unwrap();
    let mut shuffled = ranked.clone();
    shuffled.shuffle(&mut ChaCha8Rng::seed_from_u64(5));
    rank(&mut shuffled);
    assert_eq!(shuffled, ranked);
}

#[test]
fn worker_count_does_not_change_results() {
    let base = ScenarioConfig::paper_default();
    let space = two_d_space();
    let one = grid_search(&space, 3, &base, 1000, 1).unwrap();
    for w in [2, 8] {
        assert_eq!(grid_search(&space, 3, &base, 1000, w).unwrap(), one);
    }
}

#[test]
fn monotone_sweep_peaks_at_boundary() {
    // per-cycle travel is depth·(cot θ + cot φ) while the gas budget fixes
    // the cycle count, so range falls as the dive steepens
    let base = ScenarioConfig::paper_default();
    let space = DesignSpace {
        dimensions: vec![Dimension {
            param: Param::Theta,
            lower: 0.35,
            upper: 0.75,
        }],
    };
    let ranked = grid_search(&space, 6, &base, 1000, 2).unwrap();
    assert_eq!(ranked[0].candidate.values, vec![0.35]);
    let mut by_value = ranked.clone();
    by_value.sort_by(|a, b| a.candidate.values[0].total_cmp(&b.candidate.values[0]));
    for w in by_value.windows(2) {
        assert!(w[1].score < w[0].score, "{:?}", by_value.iter().map(|e| e.score).collect::<Vec<_>>());
    }
}

#[test]
fn optimal_start_stops_at_once() {
    let f = |x: &[f64]| -(x[0] - 0.5).powi(2) - (x[1] - 0.25).powi(2);
    let opts = NelderMeadOptions {
        initial_step: 1e-6,
        ..NelderMeadOptions::default()
    };
    let r = nelder_mead(f, &[0.5, 0.25], &[0.0, 0.0], &[1.0, 1.0], &opts);
    assert!(r.converged);
    assert_eq!(r.iterations, 0);
    assert_eq!(r.x, vec![0.5, 0.25]);
}

#[test]
fn budget_and_bounds_are_enforced() {
    let base = ScenarioConfig::paper_default();
    assert!(grid_search(&two_d_space(), 10, &base, 99, 1).is_err());
    let space = bladder_space(2.5e-4, 3.0e-4);
    let outside = glidesim::optimizer::Candidate { values: vec![1.0] };
    assert!(evaluate(&space, &outside, &base).is_err());
}
