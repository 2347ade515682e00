//! Built-in scenarios around a public intervention on day 70.
//!
//! Every grid cell is run twice: as configured, and as a counterfactual
//! with the public intervention removed.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::ScenarioConfig;
use crate::dynamics::{simulate, Trajectory};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ScenarioPreset {
    /// Intervention only; households do not yet control (γ frozen at 0).
    Baseline,
    /// Utility gap × intervention cost.
    S1,
    /// Bite tolerance rises after the intervention.
    S2,
    /// Capacity recovers faster after the intervention.
    S3,
    /// S2 and S3 combined.
    S4,
}

pub const S1_UTILITY_GAPS: [f64; 3] = [0.3, 0.6, 0.9];
pub const S1_INTERVENTION_COSTS: [f64; 3] = [0.0, 50.0, 100.0];
pub const S2_TOLERANCE_SHIFTS: [u32; 3] = [6, 9, 12];
pub const SHIFTED_RECOVERY_RATE: f64 = 0.06;

impl ScenarioPreset {
    pub const ALL: [ScenarioPreset; 5] = [
        ScenarioPreset::Baseline,
        ScenarioPreset::S1,
        ScenarioPreset::S2,
        ScenarioPreset::S3,
        ScenarioPreset::S4,
    ];

    /// Config of the representative cell (u_c = 0.6, κ_1 = 50, k → 6).
    pub fn base_config(self) -> ScenarioConfig {
        let mut c = ScenarioConfig::reunion();
        c.label = self.to_string();
        let shift = &mut c.schedule.external_events[0].shift;
        match self {
            ScenarioPreset::Baseline => c.frozen_gamma = Some(0.0),
            ScenarioPreset::S1 => {}
            ScenarioPreset::S2 => shift.new_k_tol = Some(S2_TOLERANCE_SHIFTS[0]),
            ScenarioPreset::S3 => shift.new_r_k = Some(SHIFTED_RECOVERY_RATE),
            ScenarioPreset::S4 => {
                shift.new_k_tol = Some(S2_TOLERANCE_SHIFTS[0]);
                shift.new_r_k = Some(SHIFTED_RECOVERY_RATE);
            }
        }
        c
    }

    /// Every labelled cell of this preset's parameter grid.
    pub fn grid(self) -> Vec<ScenarioConfig> {
        let base = self.base_config();
        match self {
            ScenarioPreset::S1 => S1_UTILITY_GAPS
                .iter()
                .flat_map(|&u_c| {
                    let base = &base;
                    S1_INTERVENTION_COSTS.iter().map(move |&kappa_1| {
                        let mut c = base.clone();
                        c.behavior.u_c = u_c;
                        c.behavior.kappa_1 = kappa_1;
                        c.label = format!("S1_uc{u_c}_kappa{kappa_1}");
                        c
                    })
                })
                .collect(),
            ScenarioPreset::S2 => S2_TOLERANCE_SHIFTS
                .iter()
                .map(|&k| {
                    let mut c = base.clone();
                    c.schedule.external_events[0].shift.new_k_tol = Some(k);
                    c.label = format!("S2_k{k}");
                    c
                })
                .collect(),
            _ => vec![base],
        }
    }
}

impl fmt::Display for ScenarioPreset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ScenarioPreset::Baseline => "Baseline",
            ScenarioPreset::S1 => "S1",
            ScenarioPreset::S2 => "S2",
            ScenarioPreset::S3 => "S3",
            ScenarioPreset::S4 => "S4",
        };
        f.write_str(s)
    }
}

impl FromStr for ScenarioPreset {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        ScenarioPreset::ALL
            .into_iter()
            .find(|p| p.to_string().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown preset `{s}` (expected Baseline, S1, S2, S3 or S4)"))
    }
}

/// A configured run and its no-intervention counterfactual.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioRun {
    pub label: String,
    pub config: ScenarioConfig,
    pub with_intervention: Trajectory,
    pub counterfactual: Trajectory,
}

impl ScenarioRun {
    pub fn new(config: ScenarioConfig) -> Result<Self> {
        let with_intervention = simulate(&config)?;
        let counterfactual = simulate(&config.counterfactual())?;
        Ok(ScenarioRun {
            label: config.label.clone(),
            config,
            with_intervention,
            counterfactual,
        })
    }
}

/// Runs a list of configs (in parallel), preserving their order.
pub fn run_configs(configs: Vec<ScenarioConfig>) -> Result<Vec<ScenarioRun>> {
    configs.into_par_iter().map(ScenarioRun::new).collect()
}

pub fn run_preset(preset: ScenarioPreset) -> Result<Vec<ScenarioRun>> {
    run_configs(preset.grid())
}

/// Days needed to return close to the counterfactual after an intervention.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RecoveryTime {
    /// Start of the first window of agreement.
    pub day: f64,
    pub days_after_event: f64,
}

/// Length of the window over which agreement must hold.
pub const RECOVERY_WINDOW_DAYS: f64 = 7.0;

/// First time at or after the (first) intervention from which adult numbers
/// stay within relative `tol` of the counterfactual for a full week.
///
/// `None` if that never happens before the horizon, or if the counterfactual
/// itself collapses (final `A_v` below 10⁻³ of its peak), where a relative
/// comparison is meaningless.
pub fn report_recovery_time(
    traj: &Trajectory,
    counterfactual: &Trajectory,
    tol: f64,
) -> Result<Option<RecoveryTime>> {
    let (a, b) = (&traj.samples, &counterfactual.samples);
    if a.len() != b.len() {
        return Err(Error::GridMismatch(format!(
            "{} vs {} samples",
            a.len(),
            b.len()
        )));
    }
    if let Some((x, y)) = a.iter().zip(b).find(|(x, y)| (x.t - y.t).abs() > 1e-9) {
        return Err(Error::GridMismatch(format!("t = {} vs {}", x.t, y.t)));
    }
    let Some(last) = b.last() else {
        return Ok(None);
    };
    let peak = b.iter().map(|s| s.a_v).fold(0.0, f64::max);
    if peak == 0.0 || last.a_v < 1e-3 * peak {
        return Ok(None);
    }
    let event = traj.external_log.first().map_or(a[0].t, |e| e.t);
    let close: Vec<bool> = a
        .iter()
        .zip(b)
        .map(|(x, y)| y.a_v > 0.0 && (x.a_v - y.a_v).abs() / y.a_v < tol)
        .collect();
    let Some(start) = a.iter().position(|s| s.t >= event - 1e-9) else {
        return Ok(None);
    };
    // the search begins once the run has actually left the tolerance band;
    // a run that never leaves it recovers on the event day
    let Some(dip) = close[start..].iter().position(|&ok| !ok) else {
        return Ok(Some(RecoveryTime {
            day: a[start].t,
            days_after_event: a[start].t - event,
        }));
    };
    for (i, s) in a.iter().enumerate().skip(start + dip) {
        let end = s.t + RECOVERY_WINDOW_DAYS;
        if end > last.t + 1e-9 {
            break;
        }
        let window_ok = a[i..]
            .iter()
            .zip(&close[i..])
            .take_while(|(x, _)| x.t < end - 1e-9)
            .all(|(_, &ok)| ok);
        if window_ok {
            return Ok(Some(RecoveryTime {
                day: s.t,
                days_after_event: s.t - event,
            }));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{ExternalRecord, Sample};

    /// Frozen fixture: (preset, u_c, κ_1, k after, r_K after, frozen γ).
    #[test]
    fn preset_parameters_match_fixture() {
        type Row = (&'static str, f64, f64, Option<u32>, Option<f64>, Option<f64>);
        let fixture: [Row; 5] = [
            ("Baseline", 0.6, 50.0, None, None, Some(0.0)),
            ("S1", 0.6, 50.0, None, None, None),
            ("S2", 0.6, 50.0, Some(6), None, None),
            ("S3", 0.6, 50.0, None, Some(0.06), None),
            ("S4", 0.6, 50.0, Some(6), Some(0.06), None),
        ];
        for (name, u_c, kappa_1, k, r, g) in fixture {
            let c = name.parse::<ScenarioPreset>().unwrap().base_config();
            let ev = c.schedule.external_events[0];
            assert_eq!(c.behavior.u_c, u_c);
            assert_eq!(c.behavior.kappa_1, kappa_1);
            assert_eq!(c.behavior.k_tol, 3);
            assert_eq!(c.behavior.kappa_0, 14.8);
            assert_eq!((c.behavior.beta, c.behavior.income), (1.2, 103.0));
            assert_eq!(ev.shift.new_k_tol, k);
            assert_eq!(ev.shift.new_r_k, r);
            assert_eq!(c.frozen_gamma, g);
            assert_eq!((ev.day, ev.extra_fraction), (70.0, 0.5));
            assert_eq!(c.capacity.r_k, 0.05);
            assert_eq!(c.schedule.local.unwrap().tau, 7.0);
        }

        let s1: Vec<(f64, f64)> = ScenarioPreset::S1
            .grid()
            .iter()
            .map(|c| (c.behavior.u_c, c.behavior.kappa_1))
            .collect();
        assert_eq!(s1.len(), 9);
        for u in [0.3, 0.6, 0.9] {
            for k in [0.0, 50.0, 100.0] {
                assert!(s1.contains(&(u, k)));
            }
        }
        let s2: Vec<Option<u32>> = ScenarioPreset::S2
            .grid()
            .iter()
            .map(|c| c.schedule.external_events[0].shift.new_k_tol)
            .collect();
        assert_eq!(s2, vec![Some(6), Some(9), Some(12)]);
    }

    #[test]
    fn preset_names_parse() {
        for p in ScenarioPreset::ALL {
            assert_eq!(p.to_string().parse::<ScenarioPreset>().unwrap(), p);
        }
        assert_eq!("s3".parse::<ScenarioPreset>().unwrap(), ScenarioPreset::S3);
        assert!("S5".parse::<ScenarioPreset>().is_err());
    }

    fn traj(values: &[f64], event: Option<f64>) -> Trajectory {
        Trajectory {
            samples: values
                .iter()
                .enumerate()
                .map(|(i, &a)| Sample {
                    t: i as f64,
                    l_v: a,
                    a_v: a,
                    k_v: 1.0,
                })
                .collect(),
            external_log: event
                .map(|t| ExternalRecord {
                    t,
                    fraction: 0.5,
                    k_pre: 1.0,
                    k_post: 0.5,
                })
                .into_iter()
                .collect(),
            ..Trajectory::default()
        }
    }

    #[test]
    fn identical_runs_recover_on_event_day() {
        let v = vec![100.0; 60];
        let r = report_recovery_time(&traj(&v, Some(20.0)), &traj(&v, None), 0.05)
            .unwrap()
            .unwrap();
        assert_eq!((r.day, r.days_after_event), (20.0, 0.0));
    }

    #[test]
    fn recovery_needs_a_full_week() {
        let cf = vec![100.0; 60];
        let mut run = cf.clone();
        for (i, x) in run.iter_mut().enumerate().skip(10).take(20) {
            *x = if i == 25 { 80.0 } else { 90.0 };
        }
        // close again from day 30 on
        let r = report_recovery_time(&traj(&run, Some(10.0)), &traj(&cf, None), 0.05)
            .unwrap()
            .unwrap();
        assert_eq!(r.day, 30.0);
        assert_eq!(r.days_after_event, 20.0);
    }

    #[test]
    fn lagged_dip_is_not_counted_as_recovery() {
        // the run stays close for 8 days after the event before departing
        let cf = vec![100.0; 60];
        let mut run = cf.clone();
        for x in run.iter_mut().skip(18).take(10) {
            *x = 85.0;
        }
        let r = report_recovery_time(&traj(&run, Some(10.0)), &traj(&cf, None), 0.05)
            .unwrap()
            .unwrap();
        assert_eq!(r.day, 28.0);
    }

    #[test]
    fn recovery_none_cases() {
        let cf = vec![100.0; 30];
        let never = vec![50.0; 30];
        assert!(report_recovery_time(&traj(&never, Some(5.0)), &traj(&cf, None), 0.05)
            .unwrap()
            .is_none());
        let decaying: Vec<f64> = (0..60).map(|i| 1e4 * 0.8f64.powi(i)).collect();
        assert!(report_recovery_time(&traj(&decaying, Some(5.0)), &traj(&decaying, None), 0.05)
            .unwrap()
            .is_none());
    }

    #[test]
    fn recovery_rejects_mismatched_grids() {
        let err = report_recovery_time(&traj(&[1.0; 10], None), &traj(&[1.0; 11], None), 0.05);
        assert!(matches!(err, Err(Error::GridMismatch(_))));
    }
}
