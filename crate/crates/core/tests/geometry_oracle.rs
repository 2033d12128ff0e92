use glidesim::geometry::{displaced_volume, naca_half_thickness, WingParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SAMPLES: usize = 1_000_000;

/// Planform rebuilt from the parameter definitions.
fn chord(p: &WingParams, y: f64) -> f64 {
    let (a, b) = (p.l1, p.l1 + p.l2);
    if y <= a {
        p.chord_root
    } else if y <= b {
        p.chord_root + (p.chord_tip - p.chord_root) * (y - a) / p.l2
    } else {
        p.chord_tip
    }
}

fn leading_edge(p: &WingParams, y: f64) -> f64 {
    (y - p.l1).max(0.0) * p.alpha.to_radians().tan()
}

fn in_section(xc: f64, eta: f64, t: f64) -> bool {
    (0.0..=1.0).contains(&xc) && eta.abs() <= naca_half_thickness(xc, t).unwrap()
}

/// Hit-or-miss estimate over a box, stratified along its first axis.
fn hit_or_miss(
    rng: &mut ChaCha8Rng,
    n: usize,
    lo: [f64; 3],
    hi: [f64; 3],
    inside: impl Fn(f64, f64, f64) -> bool,
) -> f64 {
    let mut hits = 0usize;
    for i in 0..n {
        let u = (i as f64 + rng.random::<f64>()) / n as f64;
        let a = lo[0] + u * (hi[0] - lo[0]);
        let b = rng.random_range(lo[1]..hi[1]);
        let c = rng.random_range(lo[2]..hi[2]);
        if inside(a, b, c) {
            hits += 1;
        }
    }
    let box_volume: f64 = (0..3).map(|k| hi[k] - lo[k]).product();
    box_volume * hits as f64 / n as f64
}

fn monte_carlo_volume(p: &WingParams, samples: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let span = p.l1 + p.l2 + p.lb;
    let t = p.thickness_ratio;
    // NACA 4-digit sections peak below 0.6 t of chord
    let zmax = 0.6 * t * p.chord_root;
    let xmax = leading_edge(p, span) + p.chord_root;

    let wing_n = samples * 4 / 5;
    let wing = hit_or_miss(&mut rng, wing_n, [0.0, 0.0, -zmax], [span, xmax, zmax], |y, x, z| {
        let c = chord(p, y);
        in_section((x - leading_edge(p, y)) / c, z / c, t)
    });

    let c = p.chord_tip;
    let le = leading_edge(p, span);
    let half_h = 0.5 * p.wingtip_height;
    let fin = if half_h > 0.0 {
        hit_or_miss(
            &mut rng,
            samples - wing_n,
            [-half_h, le, -0.6 * t * c],
            [half_h, le + c, 0.6 * t * c],
            |_, x, w| in_section((x - le) / c, w / c, t),
        )
    } else {
        0.0
    };
    2.0 * (wing + fin)
}

#[test]
fn simpson_volume_matches_monte_carlo() {
    let p = WingParams::paper_like();
    let simpson = displaced_volume(&p);
    let mc = monte_carlo_volume(&p, SAMPLES, 7);
    let rel = (mc - simpson).abs() / simpson;
    assert!(rel < 0.01, "simpson {simpson} mc {mc} rel {rel}");
}

#[test]
fn monte_carlo_agrees_without_fins() {
    let p = WingParams {
        wingtip_height: 0.0,
        alpha: 25.0,
        ..WingParams::paper_like()
    };
    let simpson = displaced_volume(&p);
    let mc = monte_carlo_volume(&p, SAMPLES, 11);
    assert!((mc - simpson).abs() / simpson < 0.01, "simpson {simpson} mc {mc}");
}

#[test]
fn paper_like_hull_volume() {
    let v = displaced_volume(&WingParams::paper_like()) * 1e6;
    assert!((v - 3861.12).abs() < 1e-6, "{v}");
}

#[test]
fn naca_point_values() {
    // 5t(0.2969√x - 0.1260x - 0.3516x² + 0.2843x³ - 0.1036x⁴) by hand at x = 0.3
    let x: f64 = 0.3;
    let by_hand = 0.5 * (0.2969 * x.sqrt() - 0.1260 * x - 0.3516 * x * x + 0.2843 * x.powi(3) - 0.1036 * x.powi(4));
    let y = naca_half_thickness(0.3, 0.10).unwrap();
    assert!((y - by_hand).abs() < 1e-15);
    assert!((y - 0.050_005_884).abs() < 1e-9, "{y}");
    assert_eq!(naca_half_thickness(1.0, 0.10).unwrap(), 0.0);
    assert_eq!(naca_half_thickness(0.0, 0.10).unwrap(), 0.0);
}
