use proptest::prelude::*;

use vectorsim_core::analysis::frozen_control_config;
use vectorsim_core::behavior::{bite_probability, efficacy, participation_rate, AdoptionTail};
use vectorsim_core::capacity::{periodic_capacity, CapacityParams};
use vectorsim_core::config::{InitialState, ScenarioConfig};
use vectorsim_core::dynamics::{detect_periodic_orbit, nsfd_step, simulate, SimState};
use vectorsim_core::entomology::{equilibria, in_invariant_region, BioParams, MosquitoState};
use vectorsim_core::output::ORBIT_TOL;
use vectorsim_core::presets::{report_recovery_time, ScenarioPreset, S2_TOLERANCE_SHIFTS};

fn impulse_free(bio: BioParams, horizon: f64) -> ScenarioConfig {
    let mut c = ScenarioConfig::reunion();
    c.bio = bio;
    c.capacity.k_0 = c.capacity.k_max;
    c.schedule.local = None;
    c.schedule.external_events.clear();
    c.schedule.horizon = horizon;
    c
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

#[test]
fn converges_to_positive_equilibrium_for_several_parameter_sets() {
    let sets = [
        BioParams::reunion(),
        BioParams::new(2.0, 0.1, 0.02, 0.07).unwrap(),
        BioParams::new(8.0, 0.05, 0.005, 0.04).unwrap(),
    ];
    for bio in sets {
        let cfg = impulse_free(bio, 600.0);
        let end = *simulate(&cfg).unwrap().last().unwrap();
        let e = equilibria(&bio, cfg.capacity.k_max)[1];
        assert!(rel(end.l_v, e.l_v) < 1e-3, "{bio:?}: L {} vs {}", end.l_v, e.l_v);
        assert!(rel(end.a_v, e.a_v) < 1e-3, "{bio:?}: A {} vs {}", end.a_v, e.a_v);
    }
}

#[test]
fn positive_at_coarse_steps_with_control() {
    for (h, out) in [(0.5, 1.0), (1.0, 1.0), (7.0, 7.0)] {
        let mut cfg = ScenarioPreset::S4.base_config();
        cfg.step = h;
        cfg.output_interval = out;
        cfg.schedule.horizon = 364.0;
        let traj = simulate(&cfg).unwrap();
        for s in &traj.samples {
            assert!(s.l_v > 0.0 && s.a_v > 0.0 && s.k_v > 0.0, "h = {h}: {s:?}");
        }
    }
}

#[test]
fn impulse_log_accounts_for_every_jump() {
    let cfg = ScenarioPreset::S2.base_config();
    let traj = simulate(&cfg).unwrap();
    let dist = cfg.participation_dist().unwrap();
    let mut bp = cfg.behavior;
    assert_eq!(traj.impulse_log.len(), 53);
    for r in &traj.impulse_log {
        let sample = traj.samples.iter().find(|s| (s.t - r.t).abs() < 1e-9).unwrap();
        if r.t > 70.0 {
            bp.k_tol = S2_TOLERANCE_SHIFTS[0];
        }
        bp.s_e = r.s_e;
        assert_eq!(r.s_e, r.t == 70.0);
        assert_eq!(r.pi, bite_probability(sample.a_v, bp.n_h, bp.k_tol));
        assert_eq!(r.h, participation_rate(r.pi, &bp, &dist));
        assert_eq!(r.gamma, efficacy(r.h, &cfg.efficacy));
        assert!(rel(r.k_post, (1.0 - r.gamma) * r.k_pre) < 1e-15);
    }
    let [ev] = traj.external_log[..] else {
        panic!("one external event expected");
    };
    assert_eq!(ev.t, 70.0);
    let local = traj.impulse_log.iter().find(|r| r.t == 70.0).unwrap();
    // households act first, then the public intervention
    assert_eq!(ev.k_pre, local.k_post);
    assert!(rel(ev.k_post, 0.5 * ev.k_pre) < 1e-15);
    assert_eq!(traj.samples[70].k_v, ev.k_post);
}

#[test]
fn frozen_weekly_control_settles_on_periodic_capacity() {
    let cp = CapacityParams {
        r_k: 0.05,
        k_max: 2.0e6,
        k_0: 2.0e4,
    };
    let init = InitialState {
        l_v: 2.0e4,
        a_v: 2.0e4,
    };
    let cfg = frozen_control_config(BioParams::reunion(), cp, init, 0.3, 7.0, 365.0);
    let traj = simulate(&cfg).unwrap();
    for s in traj.samples.iter().filter(|s| s.t >= 140.0) {
        let expect = periodic_capacity(&cp, 7.0, 0.3, s.t).unwrap();
        assert!(rel(s.k_v, expect) < 1e-6, "t = {}: {} vs {expect}", s.t, s.k_v);
    }
    let orbit = detect_periodic_orbit(&traj, 7.0, ORBIT_TOL).unwrap();
    assert!(orbit.is_positive() && orbit.min < orbit.max);
}

#[test]
fn baseline_dips_below_counterfactual_then_recovers() {
    let cfg = ScenarioPreset::Baseline.base_config();
    let with = simulate(&cfg).unwrap();
    let without = simulate(&cfg.counterfactual()).unwrap();
    assert_eq!(with.samples.len(), 366);
    assert!(with.impulse_log.iter().all(|r| r.gamma == 0.0));
    // identical before the event
    assert_eq!(with.samples[..=69], without.samples[..=69]);
    let gap = |i: usize| (without.samples[i].a_v - with.samples[i].a_v) / without.samples[i].a_v;
    assert!(gap(90) > 0.1);
    assert!(gap(365) < 0.01);
    let r = report_recovery_time(&with, &without, 0.05).unwrap().unwrap();
    assert!(r.days_after_event > 14.0 && r.days_after_event < 120.0, "{r:?}");
}

#[test]
fn extinct_pair_has_no_recovery_time() {
    let b = BioParams::reunion();
    let mut cfg = ScenarioPreset::Baseline.base_config();
    cfg.bio.rb = 0.8 * (b.nu_l + b.mu_l) * b.mu_v / b.nu_l;
    cfg.schedule.horizon = 2000.0;
    let with = simulate(&cfg).unwrap();
    let without = simulate(&cfg.counterfactual()).unwrap();
    assert!(report_recovery_time(&with, &without, 0.05).unwrap().is_none());
}

#[test]
fn larger_tolerance_shift_means_more_adults_and_less_participation() {
    let runs: Vec<_> = ScenarioPreset::S2
        .grid()
        .into_iter()
        .map(|c| simulate(&c).unwrap())
        .collect();
    let means: Vec<f64> = runs
        .iter()
        .map(|t| detect_periodic_orbit(t, 7.0, ORBIT_TOL).unwrap().mean)
        .collect();
    let final_h: Vec<f64> = runs.iter().map(|t| t.impulse_log.last().unwrap().h).collect();
    assert!(means.windows(2).all(|w| w[0] < w[1]), "{means:?}");
    assert!(final_h.windows(2).all(|w| w[0] > w[1]), "{final_h:?}");
}

#[test]
fn combined_shift_raises_orbit_above_counterfactual() {
    let cfg = ScenarioPreset::S4.base_config();
    let with = detect_periodic_orbit(&simulate(&cfg).unwrap(), 7.0, ORBIT_TOL).unwrap();
    let without =
        detect_periodic_orbit(&simulate(&cfg.counterfactual()).unwrap(), 7.0, ORBIT_TOL).unwrap();
    let s2 = detect_periodic_orbit(
        &simulate(&ScenarioPreset::S2.base_config()).unwrap(),
        7.0,
        ORBIT_TOL,
    )
    .unwrap();
    assert!(with.mean > s2.mean && s2.mean > without.mean);
}

/// Participation on the intervention day for each cost of the public action.
fn event_day_h(tail: AdoptionTail) -> Vec<f64> {
    [0.0, 50.0, 100.0]
        .into_iter()
        .map(|kappa_1| {
            let mut cfg = ScenarioPreset::S1.base_config();
            cfg.behavior.kappa_1 = kappa_1;
            cfg.participation.tail = tail;
            cfg.schedule.horizon = 84.0;
            simulate(&cfg).unwrap().participation_at(70.0).unwrap()
        })
        .collect()
}

#[test]
fn intervention_cost_ordering_depends_on_adoption_tail() {
    let upper = event_day_h(AdoptionTail::AboveThreshold);
    assert!(upper.windows(2).all(|w| w[0] < w[1]), "{upper:?}");
    let lower = event_day_h(AdoptionTail::BelowThreshold);
    assert!(lower.windows(2).all(|w| w[0] > w[1]), "{lower:?}");
}

#[test]
fn simulate_is_deterministic() {
    let cfg = ScenarioPreset::S4.base_config();
    assert_eq!(simulate(&cfg).unwrap(), simulate(&cfg).unwrap());
}

#[test]
fn output_interval_sets_row_count() {
    let mut cfg = ScenarioConfig::reunion();
    cfg.output_interval = 7.0;
    assert_eq!(simulate(&cfg).unwrap().samples.len(), 53);
    cfg.output_interval = 0.1;
    assert_eq!(simulate(&cfg).unwrap().samples.len(), 3651);
}

#[test]
fn still_transient_run_has_no_orbit() {
    let mut cfg = ScenarioConfig::reunion();
    cfg.schedule.horizon = 100.0;
    assert!(detect_periodic_orbit(&simulate(&cfg).unwrap(), 7.0, ORBIT_TOL).is_none());
}

fn region_state(bio: &BioParams, k: f64) -> impl Strategy<Value = (f64, f64)> {
    let (l_max, a_max) = (k, bio.nu_l / bio.mu_v * k);
    (0.0..=l_max, 0.0..=a_max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn controlled_runs_stay_in_invariant_region(
        (l, a) in region_state(&BioParams::reunion(), 2.0e6),
        k0 in 1.0e3f64..=2.0e6,
        gamma in 0.0f64..0.95,
    ) {
        let bio = BioParams::reunion();
        let cp = CapacityParams { r_k: 0.05, k_max: 2.0e6, k_0: k0 };
        let cfg = frozen_control_config(bio, cp, InitialState { l_v: l, a_v: a }, gamma, 7.0, 60.0);
        for s in simulate(&cfg).unwrap().samples {
            let x = MosquitoState::new(s.l_v, s.a_v);
            prop_assert!(in_invariant_region(x, &bio, cp.k_max, 1e-12), "{:?}", s);
            prop_assert!(s.l_v >= 0.0 && s.a_v >= 0.0);
        }
    }

    #[test]
    fn ordered_states_stay_ordered(
        (l1, a1) in region_state(&BioParams::reunion(), 5.0e5),
        dl in 0.0f64..5.0e5,
        da in 0.0f64..2.0e6,
        k in 5.0e5f64..=2.0e6,
        h in prop::sample::select(vec![0.01, 0.1, 1.0, 7.0]),
    ) {
        let bio = BioParams::reunion();
        let cp = CapacityParams { r_k: 0.05, k_max: 2.0e6, k_0: k };
        let (l2, a2) = ((l1 + dl).min(k), (a1 + da).min(bio.nu_l / bio.mu_v * k));
        let mut lo = SimState { t: 0.0, l_v: l1, a_v: a1, k_v: k };
        let mut hi = SimState { t: 0.0, l_v: l2, a_v: a2, k_v: k };
        for _ in 0..200 {
            lo = nsfd_step(lo, &bio, &cp, h).unwrap();
            hi = nsfd_step(hi, &bio, &cp, h).unwrap();
            // both converge to the same equilibrium; allow rounding there
            let le = |x: f64, y: f64| x <= y * (1.0 + 1e-12);
            prop_assert!(le(lo.l_v, hi.l_v) && le(lo.a_v, hi.a_v), "{:?} vs {:?}", lo, hi);
        }
    }
}
