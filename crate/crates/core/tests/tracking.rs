mod common;

use proptest::prelude::*;
use wavedecay::scenario::{random_initial, RandomInitial, Scenario};
use wavedecay::tracking::{weak_residual, Bump};
use wavedecay::{evolve, init_approx, HyperbolicSystem, PiecewiseConstantFn, Region, TrackingConfig, Trajectory};

use common::*;

fn burgers() -> HyperbolicSystem {
    HyperbolicSystem::burgers().with_region(Region::new(vec![0.0], 2.0, 0.3).unwrap()).unwrap()
}

fn gas() -> HyperbolicSystem {
    HyperbolicSystem::p_system(1.4, 1.0)
        .unwrap()
        .with_region(Region::new(vec![1.0, 0.0], 0.5, 0.3).unwrap())
        .unwrap()
}

fn run(sys: &HyperbolicSystem, u0: &PiecewiseConstantFn, delta: f64, t_end: f64, samples: &[f64]) -> Trajectory {
    let cfg = TrackingConfig::new(delta).unwrap();
    evolve(sys, &init_approx(sys, u0, &cfg).unwrap(), t_end, &cfg, samples).unwrap()
}

fn check_events(traj: &Trajectory, c0: f64) -> Result<(), TestCaseError> {
    let mut last = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for e in traj.events.records() {
        prop_assert!(e.dq >= -1e-12, "Q grows by {} at t = {}", -e.dq, e.t);
        prop_assert!(e.d_upsilon(c0) <= 1e-12, "Υ grows by {} at t = {}", e.d_upsilon(c0), e.t);
        prop_assert!((e.t, e.x) >= last || e.t > last.0);
        last = (e.t, e.x);
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn scalar_interactions_decrease_potentials(seed in any::<u64>(), pieces in 2usize..10) {
        let u0 = random_initial(&[0.0], &RandomInitial { pieces, tv: 0.3, span: (-1.0, 1.0) }, seed).unwrap();
        let traj = run(&burgers(), &u0, 0.01, 8.0, &[1.0, 4.0, 8.0]);
        check_events(&traj, 10.0)?;
        let v: Vec<f64> = traj.samples.iter().map(|s| s.v).collect();
        prop_assert!(v.windows(2).all(|w| w[1] <= w[0] + 1e-12));
    }

    #[test]
    fn gas_interactions_decrease_potentials(seed in any::<u64>(), pieces in 2usize..6) {
        let u0 = random_initial(&[1.0, 0.0], &RandomInitial { pieces, tv: 0.1, span: (-1.0, 1.0) }, seed).unwrap();
        let traj = run(&gas(), &u0, 0.02, 3.0, &[]);
        check_events(&traj, 10.0)?;
    }

    #[test]
    fn replay_matches_snapshots(seed in any::<u64>()) {
        let u0 = random_initial(&[0.0], &RandomInitial { pieces: 6, tv: 0.3, span: (-1.0, 1.0) }, seed).unwrap();
        let times = [0.5, 1.5, 3.0];
        let traj = run(&burgers(), &u0, 0.02, 3.0, &times);
        for (snap, &t) in traj.snapshots.iter().zip(&times) {
            prop_assert_eq!(snap.to_pcfn().unwrap(), traj.solution_at(t).unwrap());
        }
        prop_assert_eq!(traj.solution_at(0.0).unwrap(), traj.initial().to_pcfn().unwrap());
    }

    /// `d/dt ∫ u = f(u_left) − f(u_right)` up to the rarefaction fronts, each
    /// of which violates the jump condition by `σ²/2`.
    #[test]
    fn scalar_conservation(seed in any::<u64>()) {
        let delta = 0.02;
        let u0 = random_initial(&[0.0], &RandomInitial { pieces: 6, tv: 0.3, span: (-1.0, 1.0) }, seed).unwrap();
        let t = 2.0;
        let traj = run(&burgers(), &u0, delta, t, &[]);
        let (lo, hi) = (-5.0, 5.0);
        let m0 = integral(&u0, 0, lo, hi);
        let m1 = integral(&traj.solution_at(t).unwrap(), 0, lo, hi);
        let (ul, ur) = (u0.values()[0][0], u0.values().last().unwrap()[0]);
        let flux = t * 0.5 * (ul * ul - ur * ur);
        let v0 = traj.initial().glimm_v();
        prop_assert!((m1 - m0 - flux).abs() <= 0.5 * delta * v0 * t + 1e-12);
    }
}

#[test]
fn shocks_conserve_exactly() {
    let sys = burgers();
    let u0 = PiecewiseConstantFn::new(vec![0.0, 1.0], vec![vec![0.3], vec![0.15], vec![0.0]]).unwrap();
    let traj = run(&sys, &u0, 0.01, 20.0, &[]);
    for t in [1.0, 5.0, 13.0, 20.0] {
        let m = integral(&traj.solution_at(t).unwrap(), 0, -10.0, 20.0);
        let expected = integral(&u0, 0, -10.0, 20.0) + t * 0.5 * 0.09;
        assert!((m - expected).abs() < 1e-12, "t = {t}: {m} vs {expected}");
    }
}

#[test]
fn gas_conservation_on_crossing_waves() {
    let sys = gas();
    let s = Scenario::load(std::path::Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/scenarios/p_system_crossing.json")))
        .unwrap();
    let u0 = s.initial_data().unwrap();
    let delta = 0.01;
    let t = 2.0;
    let traj = run(&sys, &u0, delta, t, &[]);
    let (fl, fr) = (sys.flux(&u0.values()[0]), sys.flux(u0.values().last().unwrap()));
    let u1 = traj.solution_at(t).unwrap();
    for c in 0..2 {
        let change = integral(&u1, c, -10.0, 10.0) - integral(&u0, c, -10.0, 10.0);
        // rarefaction fronts carry an O(δ) defect per unit strength
        assert!((change - t * (fl[c] - fr[c])).abs() < 2.0 * delta * 0.2 * t, "component {c}");
    }
}

#[test]
fn fan_residual_halves_with_delta() {
    let sys = HyperbolicSystem::burgers().with_region(Region::new(vec![0.0], 2.0, 1.5).unwrap()).unwrap();
    let u0 = PiecewiseConstantFn::new(vec![0.0], vec![vec![0.0], vec![1.0]]).unwrap();
    let phi = Bump { tc: 1.0, xc: 0.5, rt: 0.5, rx: 0.6 };
    let r: Vec<f64> = [0.04, 0.02, 0.01]
        .iter()
        .map(|&d| weak_residual(&sys, &run(&sys, &u0, d, 2.0, &[]), &phi)[0].abs())
        .collect();
    assert!(r[0] > 0.0);
    for w in r.windows(2) {
        let ratio = w[1] / w[0];
        assert!((0.45..0.55).contains(&ratio), "ratio {ratio}");
    }
}

#[test]
fn merged_shock_has_exact_jump_conditions() {
    let sys = HyperbolicSystem::burgers().with_region(Region::new(vec![0.0], 2.0, 1.5).unwrap()).unwrap();
    let u0 = PiecewiseConstantFn::new(vec![0.0, 1.0], vec![vec![1.0], vec![0.5], vec![0.0]]).unwrap();
    let traj = run(&sys, &u0, 0.01, 4.0, &[]);
    let phi = Bump { tc: 2.0, xc: 1.5, rt: 1.0, rx: 1.0 };
    assert!(weak_residual(&sys, &traj, &phi)[0].abs() < 1e-14);
}

#[test]
fn budget_violation_names_the_time() {
    let s = Scenario::load(std::path::Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/scenarios/near_budget.json")))
        .unwrap();
    let sys = s.system().unwrap();
    let cfg = TrackingConfig::new(s.delta).unwrap();
    let start = init_approx(&sys, &s.initial_data().unwrap(), &cfg).unwrap();
    match evolve(&sys, &start, 2.0, &cfg, &[]) {
        Err(wavedecay::Error::BudgetExceeded { time, .. }) => assert!(time > 0.0 && time < 2.0),
        other => panic!("expected a budget error, got {other:?}"),
    }
}

#[test]
fn front_count_stays_bounded_in_crossings() {
    let s = Scenario::load(std::path::Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/scenarios/p_system_crossing.json")))
        .unwrap();
    let sys = s.system().unwrap();
    let delta = 0.005;
    let traj = run(&sys, &s.initial_data().unwrap(), delta, 2.0, &[]);
    let initial = traj.initial().fronts().len();
    let end = traj.state_at(2.0).unwrap().fronts().len();
    assert_eq!(initial, 40);
    assert!(end <= initial + 2, "{end} fronts");
}

#[test]
fn amplified_fan_slices_do_not_overlap() {
    let s = Scenario::load(std::path::Path::new(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/../../data/scenarios/p_system_shock_crossing.json"
    )))
    .unwrap();
    let sys = s.system().unwrap();
    let traj = run(&sys, &s.initial_data().unwrap(), 2e-3, 1.0, &[]);
    let now = traj.state_at(1.0).unwrap();
    let m = now.positive_fan_measure(0).unwrap();
    let total: f64 = now.fronts().iter().filter(|f| f.family == 0 && f.strength > 0.0).map(|f| f.strength).sum();
    assert!((m.total_mass() - total).abs() < 1e-12);
    // the 1-waves grew while crossing the shock, their density stays near 1/t
    for p in m.density() {
        assert!(p.value <= 1.01, "density {}", p.value);
    }
    for w in m.density().windows(2) {
        assert!(w[0].b <= w[1].a + 1e-15);
    }
}

#[test]
fn shock_crossing_needs_the_impulse() {
    let s = Scenario::load(std::path::Path::new(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/../../data/scenarios/p_system_shock_crossing.json"
    )))
    .unwrap();
    let run = wavedecay::verify::prepare(&s.system().unwrap(), &s.initial_data().unwrap(), &[0, 1], &[1.0], 2e-3, 10.0)
        .unwrap();
    let tol = Some(1e-10);
    assert!(!run.report(0.0, tol).unwrap().all_hold());
    assert!(run.report(20.0, tol).unwrap().all_hold());
}
