//! Larval carrying capacity: relaxation toward `K_max` between controls,
//! multiplicative destruction at control instants.

use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CapacityParams {
    /// Recovery rate toward `k_max` (day⁻¹). Zero freezes the capacity.
    pub r_k: f64,
    pub k_max: f64,
    /// Capacity at t = 0.
    pub k_0: f64,
}

impl CapacityParams {
    pub fn validate(&self) -> Result<()> {
        ensure_finite("r_k", self.r_k)?;
        ensure_finite("k_max", self.k_max)?;
        ensure_finite("k_0", self.k_0)?;
        if self.r_k < 0.0 {
            return Err(Error::Domain {
                what: "r_k",
                value: self.r_k,
                constraint: "must be >= 0",
            });
        }
        if self.k_max <= 0.0 {
            return Err(Error::Domain {
                what: "k_max",
                value: self.k_max,
                constraint: "must be > 0",
            });
        }
        if !(self.k_0 > 0.0 && self.k_0 <= self.k_max) {
            return Err(Error::Domain {
                what: "k_0",
                value: self.k_0,
                constraint: "must lie in (0, k_max]",
            });
        }
        Ok(())
    }
}

/// Control calendar: first control on day `t_0`, then every `tau` days.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ImpulseSchedule {
    pub t_0: f64,
    pub tau: f64,
}

impl ImpulseSchedule {
    pub fn validate(&self) -> Result<()> {
        ensure_finite("t_0", self.t_0)?;
        ensure_finite("tau", self.tau)?;
        if self.tau <= 0.0 {
            return Err(Error::Domain {
                what: "tau",
                value: self.tau,
                constraint: "must be > 0",
            });
        }
        if self.t_0 < 0.0 {
            return Err(Error::Domain {
                what: "t_0",
                value: self.t_0,
                constraint: "must be >= 0",
            });
        }
        Ok(())
    }

    /// Control instants in `[t_0, horizon]`.
    pub fn instants(&self, horizon: f64) -> impl Iterator<Item = f64> + '_ {
        (0u64..)
            .map(move |n| self.t_0 + n as f64 * self.tau)
            .take_while(move |&t| t <= horizon)
    }
}

/// Exact solution of `dK/dt = r_K (K_max − K)` after `dt` days from `k_start`.
pub fn capacity_flow(k_start: f64, cp: &CapacityParams, dt: f64) -> Result<f64> {
    ensure_finite("dt", dt)?;
    ensure_finite("k_start", k_start)?;
    if dt < 0.0 {
        return Err(Error::Domain {
            what: "dt",
            value: dt,
            constraint: "must be >= 0",
        });
    }
    if k_start < 0.0 {
        return Err(Error::Domain {
            what: "k_start",
            value: k_start,
            constraint: "must be >= 0",
        });
    }
    Ok(cp.k_max + (k_start - cp.k_max) * (-cp.r_k * dt).exp())
}

/// Capacity left after destroying a fraction `gamma` of it.
pub fn apply_impulse(k: f64, gamma: f64) -> Result<f64> {
    check_fraction("gamma", gamma)?;
    if !(k >= 0.0 && k.is_finite()) {
        return Err(Error::Domain {
            what: "k",
            value: k,
            constraint: "must be finite and >= 0",
        });
    }
    Ok((1.0 - gamma) * k)
}

/// One control period: flow for `tau` days, then destroy `gamma`.
pub fn one_period_map(k: f64, cp: &CapacityParams, tau: f64, gamma: f64) -> Result<f64> {
    apply_impulse(capacity_flow(k, cp, tau)?, gamma)
}

fn check_fraction(what: &'static str, gamma: f64) -> Result<()> {
    if (0.0..1.0).contains(&gamma) {
        Ok(())
    } else {
        Err(Error::Domain {
            what,
            value: gamma,
            constraint: "must lie in [0, 1)",
        })
    }
}

fn check_periodic_args(cp: &CapacityParams, tau: f64, gamma_h0: f64) -> Result<()> {
    if !(cp.r_k > 0.0 && cp.r_k.is_finite()) {
        return Err(Error::Domain {
            what: "r_k",
            value: cp.r_k,
            constraint: "periodic capacity requires r_k > 0",
        });
    }
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(Error::Domain {
            what: "tau",
            value: tau,
            constraint: "must be > 0",
        });
    }
    check_fraction("gamma_h0", gamma_h0)
}

/// The attracting τ-periodic capacity under constant efficacy `gamma_h0`,
/// evaluated `phase` days after the most recent control.
///
/// `phase` is reduced modulo `tau`; the value at phase 0 is the post-impulse
/// right limit.
pub fn periodic_capacity(cp: &CapacityParams, tau: f64, gamma_h0: f64, phase: f64) -> Result<f64> {
    check_periodic_args(cp, tau, gamma_h0)?;
    ensure_finite("phase", phase)?;
    let phase = phase.rem_euclid(tau);
    let denom = 1.0 - (1.0 - gamma_h0) * (-cp.r_k * tau).exp();
    Ok((1.0 - gamma_h0 * (-cp.r_k * phase).exp() / denom) * cp.k_max)
}

/// Lower and upper bounds of the periodic capacity over one period: the
/// post-impulse value and the pre-impulse left limit.
pub fn periodic_capacity_bounds(cp: &CapacityParams, tau: f64, gamma_h0: f64) -> Result<(f64, f64)> {
    check_periodic_args(cp, tau, gamma_h0)?;
    let e = (-cp.r_k * tau).exp();
    let denom = 1.0 - (1.0 - gamma_h0) * e;
    let upper = (1.0 - e) / denom * cp.k_max;
    Ok(((1.0 - gamma_h0) * upper, upper))
}
