//! Time integration of the coupled mosquito / capacity / behavior system.
//!
//! Between control instants `(L, A)` advance with a nonlocal nonstandard
//! finite-difference scheme and `K` with its exact flow. At control instants
//! the capacity jumps; the size of the jump comes from the participation
//! rate evaluated on the current adult density.

use serde::{Deserialize, Serialize};

use crate::behavior::{bite_probability, efficacy, participation_rate};
use crate::capacity::{apply_impulse, capacity_flow, CapacityParams, ImpulseSchedule};
use crate::config::ScenarioConfig;
use crate::entomology::BioParams;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimState {
    pub t: f64,
    pub l_v: f64,
    pub a_v: f64,
    pub k_v: f64,
}

/// Changes applied right after a public intervention.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParameterShift {
    #[serde(default)]
    pub new_k_tol: Option<u32>,
    #[serde(default)]
    pub new_r_k: Option<f64>,
    /// Keep the intervention flag `s_e` raised after the event day.
    #[serde(default)]
    pub persistent_s_e: bool,
}

impl ParameterShift {
    pub fn is_noop(&self) -> bool {
        self.new_k_tol.is_none() && self.new_r_k.is_none() && !self.persistent_s_e
    }
}

/// A public intervention destroying `extra_fraction` of the capacity on
/// `day`, on top of whatever households destroy that day.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExternalEvent {
    pub day: f64,
    pub extra_fraction: f64,
    #[serde(default)]
    pub shift: ParameterShift,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EventSchedule {
    /// Household control calendar; `None` disables local control.
    pub local: Option<ImpulseSchedule>,
    pub horizon: f64,
    #[serde(default)]
    pub external_events: Vec<ExternalEvent>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub t: f64,
    pub l_v: f64,
    pub a_v: f64,
    pub k_v: f64,
}

/// Diagnostics of one local control.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ImpulseRecord {
    pub t: f64,
    pub pi: f64,
    pub h: f64,
    pub gamma: f64,
    pub k_pre: f64,
    pub k_post: f64,
    pub s_e: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExternalRecord {
    pub t: f64,
    pub fraction: f64,
    pub k_pre: f64,
    pub k_post: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Trajectory {
    /// Post-impulse state every output interval.
    pub samples: Vec<Sample>,
    pub impulse_log: Vec<ImpulseRecord>,
    pub external_log: Vec<ExternalRecord>,
}

impl Trajectory {
    pub fn last(&self) -> Option<&Sample> {
        self.samples.last()
    }

    /// Participation rate logged at control day `t`, if any.
    pub fn participation_at(&self, t: f64) -> Option<f64> {
        self.impulse_log
            .iter()
            .find(|r| (r.t - t).abs() < 1e-9)
            .map(|r| r.h)
    }
}

/// Denominator function `φ(h) = (1 − e^{−Qh}) / Q`, `Q = ν_L + μ_L + μ_v`.
pub fn denominator_fn(p: &BioParams, h: f64) -> f64 {
    let q = p.nu_l + p.mu_l + p.mu_v;
    -(-q * h).exp_m1() / q
}

/// Advances `(L, A, K)` by one step of length `h`.
///
/// ```text
/// L' = (L + φ·rb·A) / (1 + φ·(rb·A/K + ν_L + μ_L))
/// A' = (A + φ·ν_L·L') / (1 + φ·μ_v)
/// ```
///
/// Every coefficient is non-negative, so the update is positive for any
/// `h`, and its fixed points are exactly the zero state and the positive
/// equilibrium at the current `K`. `K` is held at its start-of-step value
/// inside the step and then moved along its exact flow.
pub fn nsfd_step(state: SimState, p: &BioParams, cp: &CapacityParams, h: f64) -> Result<SimState> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::Domain {
            what: "h",
            value: h,
            constraint: "must be finite and > 0",
        });
    }
    if ![state.l_v, state.a_v, state.k_v].iter().all(|v| v.is_finite()) || state.k_v <= 0.0 {
        return Err(Error::Integration {
            t: state.t,
            detail: format!(
                "invalid state L={} A={} K={}",
                state.l_v, state.a_v, state.k_v
            ),
        });
    }
    let phi = denominator_fn(p, h);
    let birth = phi * p.rb * state.a_v;
    let l_v = (state.l_v + birth) / (1.0 + birth / state.k_v + phi * p.aquatic_exit_rate());
    let a_v = (state.a_v + phi * p.nu_l * l_v) / (1.0 + phi * p.mu_v);
    let k_v = capacity_flow(state.k_v, cp, h)?;
    Ok(SimState {
        t: state.t + h,
        l_v,
        a_v,
        k_v,
    })
}

/// Step index of time `t` on a grid of spacing `h`; callers validate that
/// `t` is a grid point.
fn grid_index(t: f64, h: f64) -> u64 {
    (t / h).round() as u64
}

/// Runs one scenario to its horizon.
pub fn simulate(config: &ScenarioConfig) -> Result<Trajectory> {
    config.validate()?;
    let h = config.step;
    let n_steps = grid_index(config.schedule.horizon, h);
    let out_every = grid_index(config.output_interval, h).max(1);
    let dist = config.participation_dist()?;

    let bio = config.bio;
    let mut cap = config.capacity;
    let mut behavior = config.behavior;
    let base_s_e = behavior.s_e;
    let mut persistent_s_e = false;

    let (mut next_control, control_every) = match config.schedule.local {
        Some(s) => (Some(grid_index(s.t_0, h)), grid_index(s.tau, h)),
        None => (None, 0),
    };
    let mut events: Vec<(u64, ExternalEvent)> = config
        .schedule
        .external_events
        .iter()
        .map(|e| (grid_index(e.day, h), *e))
        .collect();
    events.sort_by_key(|(i, _)| *i);
    let mut events = events.into_iter().peekable();

    let mut state = SimState {
        t: 0.0,
        l_v: config.initial.l_v,
        a_v: config.initial.a_v,
        k_v: cap.k_0,
    };
    let mut traj = Trajectory {
        samples: Vec::with_capacity((n_steps / out_every + 1) as usize),
        ..Trajectory::default()
    };

    for i in 0..=n_steps {
        let t = i as f64 * h;
        state.t = t;
        let event_today = events.peek().is_some_and(|(j, _)| *j == i);
        behavior.s_e = base_s_e || persistent_s_e || event_today;

        if next_control == Some(i) {
            let pi = bite_probability(state.a_v, behavior.n_h, behavior.k_tol);
            let h_rate = participation_rate(pi, &behavior, &dist);
            let gamma = config
                .frozen_gamma
                .unwrap_or_else(|| efficacy(h_rate, &config.efficacy));
            let k_pre = state.k_v;
            state.k_v = apply_impulse(k_pre, gamma).map_err(|e| Error::Integration {
                t,
                detail: format!("local control: {e}"),
            })?;
            traj.impulse_log.push(ImpulseRecord {
                t,
                pi,
                h: h_rate,
                gamma,
                k_pre,
                k_post: state.k_v,
                s_e: behavior.s_e,
            });
            next_control = Some(i + control_every);
        }

        while let Some((_, ev)) = events.next_if(|(j, _)| *j == i) {
            let k_pre = state.k_v;
            state.k_v = apply_impulse(k_pre, ev.extra_fraction)?;
            traj.external_log.push(ExternalRecord {
                t,
                fraction: ev.extra_fraction,
                k_pre,
                k_post: state.k_v,
            });
            if let Some(k) = ev.shift.new_k_tol {
                behavior.k_tol = k;
            }
            if let Some(r) = ev.shift.new_r_k {
                cap.r_k = r;
            }
            persistent_s_e |= ev.shift.persistent_s_e;
        }

        if i % out_every == 0 {
            traj.samples.push(Sample {
                t,
                l_v: state.l_v,
                a_v: state.a_v,
                k_v: state.k_v,
            });
        }
        if i == n_steps {
            break;
        }
        state = nsfd_step(state, &bio, &cap, h)?;
        if !(state.l_v.is_finite() && state.a_v.is_finite() && state.k_v.is_finite()) {
            return Err(Error::Integration {
                t: state.t,
                detail: "non-finite state".into(),
            });
        }
    }
    Ok(traj)
}

/// Statistics of `A_v` over the final period of a trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrbitSummary {
    pub mean: f64,
    pub min: f64,
    pub max: f64,
}

impl OrbitSummary {
    pub fn is_positive(&self) -> bool {
        self.min > 0.0
    }
}

/// Detects a τ-periodic regime at the end of `traj`.
///
/// The last period of `A_v` samples is compared pointwise with the one
/// before it; `None` unless every pair agrees within relative `tol`, or if
/// the trajectory spans fewer than ten periods.
pub fn detect_periodic_orbit(traj: &Trajectory, tau: f64, tol: f64) -> Option<OrbitSummary> {
    let s = &traj.samples;
    if s.len() < 2 {
        return None;
    }
    let dt = s[1].t - s[0].t;
    let per = (tau / dt).round() as usize;
    if per == 0 || ((per as f64) * dt - tau).abs() > 1e-6 * tau {
        return None;
    }
    if s.len() <= 10 * per {
        return None;
    }
    let tail = &s[s.len() - per..];
    let prev = &s[s.len() - 2 * per..s.len() - per];
    let agrees = tail.iter().zip(prev).all(|(a, b)| {
        let scale = b.a_v.abs().max(f64::MIN_POSITIVE);
        (a.a_v - b.a_v).abs() <= tol * scale
    });
    if !agrees {
        return None;
    }
    let (mut min, mut max, mut sum) = (f64::INFINITY, f64::NEG_INFINITY, 0.0);
    for x in tail {
        min = min.min(x.a_v);
        max = max.max(x.a_v);
        sum += x.a_v;
    }
    Some(OrbitSummary {
        mean: sum / per as f64,
        min,
        max,
    })
}

/// Mean participation over the last `n` control days, taken as the limit
/// `H₀` of the participation rate.
pub fn limiting_participation(traj: &Trajectory, n: usize) -> Option<f64> {
    let log = &traj.impulse_log;
    if log.len() < n || n == 0 {
        return None;
    }
    Some(log[log.len() - n..].iter().map(|r| r.h).sum::<f64>() / n as f64)
}
