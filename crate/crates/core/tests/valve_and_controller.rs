use glidesim::controller::{thresholds_from_valve, ControllerMode, ControllerState};
use glidesim::model::PhysicalConstants;
use glidesim::pneumatics::{sealed_back_pressure, snap_back_threshold, snap_through_threshold, ValveModel};
use proptest::prelude::*;

const DEPTHS: [f64; 5] = [0.0, 1.0, 2.0, 3.0, 4.0];

fn reservoir(volume: f64) -> ValveModel {
    ValveModel {
        additional_sealed_volume: volume,
        ..ValveModel::default()
    }
}

#[test]
fn snap_through_non_increasing_in_reservoir() {
    let c = PhysicalConstants::default();
    let volumes: Vec<f64> = (0..40).map(|i| 1e-6 * 1.5f64.powi(i)).collect();
    for d in DEPTHS {
        let ps: Vec<f64> = volumes
            .iter()
            .map(|&v| snap_through_threshold(&reservoir(v), d, &c).unwrap())
            .collect();
        for w in ps.windows(2) {
            assert!(w[1] <= w[0], "depth {d}: {} then {}", w[0], w[1]);
        }
    }
}

#[test]
fn bisection_residual_below_one_pascal() {
    let c = PhysicalConstants::default();
    for d in DEPTHS {
        for v in [0.0, 5e-6, 5e-5, 1e-3] {
            let valve = reservoir(v);
            let hydro = c.hydrostatic_gradient * d;
            let through = snap_through_threshold(&valve, d, &c).unwrap();
            let back_fwd = sealed_back_pressure(&valve, 1.0, c.p_atm).unwrap();
            assert!((through + hydro - back_fwd - valve.p_snap_through).abs() < 1.0);
            let back = snap_back_threshold(&valve, d, &c).unwrap();
            let back_rev = sealed_back_pressure(&valve, -1.0, c.p_atm).unwrap();
            assert!((back + hydro - back_rev - valve.p_snap_back).abs() < 1.0);
        }
    }
}

#[test]
fn infinite_reservoir_recovers_intrinsic_pressures() {
    let c = PhysicalConstants::default();
    let (hi, lo) = thresholds_from_valve(&reservoir(1e6), &c).unwrap();
    assert!((hi - 10_000.0).abs() / 10_000.0 < 1e-6, "{hi}");
    assert!((lo - 1_000.0).abs() / 1_000.0 < 1e-6, "{lo}");
}

fn walk(mut c: ControllerState, ps: &[f64]) -> ControllerState {
    for &p in ps {
        c = c.step(p);
    }
    c
}

proptest! {
    #[test]
    fn quiet_inside_band(
        lo in 0.0f64..20_000.0,
        gap in 1.0f64..50_000.0,
        fracs in proptest::collection::vec(1e-9f64..1.0, 1..100),
        inflating in any::<bool>(),
    ) {
        let hi = lo + gap;
        let mut c = ControllerState::new(hi, lo).unwrap();
        if inflating {
            c.mode = ControllerMode::Inflating;
        }
        let ps: Vec<f64> = fracs.iter().map(|f| lo + f * gap).filter(|p| *p > lo && *p < hi).collect();
        let end = walk(c, &ps);
        prop_assert_eq!(end.transition_count, 0);
        prop_assert_eq!(end.mode, c.mode);
    }

    #[test]
    fn one_sweep_two_transitions(
        lo in 0.0f64..20_000.0,
        gap in 1.0f64..50_000.0,
        overshoot in 0.0f64..10_000.0,
        steps in 2usize..60,
    ) {
        let hi = lo + gap;
        let c = ControllerState::new(hi, lo).unwrap();
        let bottom = lo - overshoot;
        let top = hi + overshoot;
        let up = (0..=steps).map(|i| bottom + (top - bottom) * i as f64 / steps as f64);
        let down = (0..=steps).map(|i| top - (top - bottom) * i as f64 / steps as f64);
        let ps: Vec<f64> = up.chain(down).collect();
        let end = walk(c, &ps);
        prop_assert_eq!(end.transition_count, 2);
        prop_assert_eq!(end.mode, ControllerMode::Deflating);
    }

    #[test]
    fn step_idempotent(lo in 0.0f64..20_000.0, gap in 1.0f64..50_000.0, p in -1e5f64..1e5, inflating in any::<bool>()) {
        let mut c = ControllerState::new(lo + gap, lo).unwrap();
        if inflating {
            c.mode = ControllerMode::Inflating;
        }
        let once = c.step(p);
        let twice = once.step(p);
        prop_assert_eq!(once.mode, twice.mode);
        prop_assert_eq!(once.transition_count, twice.transition_count);
    }
}
