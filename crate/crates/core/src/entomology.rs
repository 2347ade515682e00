//! Autonomous two-stage mosquito model: aquatic stage `L` feeding adult
//! females `A` under a logistic larval capacity `K`.
//!
//! ```text
//! dL/dt = rb·A·(1 − L/K) − (ν_L + μ_L)·L
//! dA/dt = ν_L·L − μ_v·A
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};

/// Mosquito life-history constants, all in day⁻¹.
///
/// The sex ratio and the egg-laying rate only ever appear as a product, so
/// they are stored as one field `rb`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BioParams {
    /// Female eggs reaching the aquatic stage per adult female per day.
    pub rb: f64,
    /// Aquatic-to-adult transfer rate.
    pub nu_l: f64,
    /// Aquatic death rate.
    pub mu_l: f64,
    /// Adult female death rate.
    pub mu_v: f64,
}

impl BioParams {
    pub fn new(rb: f64, nu_l: f64, mu_l: f64, mu_v: f64) -> Result<Self> {
        let p = BioParams { rb, nu_l, mu_l, mu_v };
        p.validate()?;
        Ok(p)
    }

    /// Aedes albopictus values for Réunion island.
    pub fn reunion() -> Self {
        BioParams {
            rb: 5.0,
            nu_l: 1.0 / 15.0,
            mu_l: 0.01,
            mu_v: 0.05,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (what, v) in [
            ("rb", self.rb),
            ("nu_l", self.nu_l),
            ("mu_l", self.mu_l),
            ("mu_v", self.mu_v),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Domain {
                    what,
                    value: v,
                    constraint: "must be finite and > 0",
                });
            }
        }
        Ok(())
    }

    /// Total exit rate from the aquatic stage, ν_L + μ_L.
    pub fn aquatic_exit_rate(&self) -> f64 {
        self.nu_l + self.mu_l
    }

    /// Adults supported per unit of larval capacity at the invariant bound.
    pub fn adult_ratio(&self) -> f64 {
        self.nu_l / self.mu_v
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct MosquitoState {
    pub l_v: f64,
    pub a_v: f64,
}

impl MosquitoState {
    pub fn new(l_v: f64, a_v: f64) -> Self {
        MosquitoState { l_v, a_v }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AutonomousVerdict {
    Extinction,
    Persistence,
}

/// Right-hand side of the autonomous model at capacity `k_v`.
pub fn ode_rhs(state: MosquitoState, p: &BioParams, k_v: f64) -> Result<(f64, f64)> {
    ensure_finite("l_v", state.l_v)?;
    ensure_finite("a_v", state.a_v)?;
    ensure_finite("k_v", k_v)?;
    if k_v <= 0.0 {
        return Err(Error::Domain {
            what: "k_v",
            value: k_v,
            constraint: "must be > 0",
        });
    }
    let dl = p.rb * state.a_v * (1.0 - state.l_v / k_v) - p.aquatic_exit_rate() * state.l_v;
    let da = p.nu_l * state.l_v - p.mu_v * state.a_v;
    Ok((dl, da))
}

/// Mean number of female offspring produced by one female over its life.
pub fn basic_offspring_number(p: &BioParams) -> f64 {
    p.nu_l * p.rb / (p.aquatic_exit_rate() * p.mu_v)
}

/// Equilibria at capacity `k_v`, trivial state first.
pub fn equilibria(p: &BioParams, k_v: f64) -> Vec<MosquitoState> {
    let mut out = vec![MosquitoState::default()];
    let n = basic_offspring_number(p);
    if n > 1.0 {
        let l_star = (1.0 - 1.0 / n) * k_v;
        out.push(MosquitoState::new(l_star, p.adult_ratio() * l_star));
    }
    out
}

/// Upper corner `(K_v, ν_L·K_v/μ_v)` of the positively invariant box.
pub fn invariant_region(p: &BioParams, k_v: f64) -> (f64, f64) {
    (k_v, p.adult_ratio() * k_v)
}

/// Whether `state` lies in the invariant box at capacity `k_v`, up to a
/// relative slack `rel_tol`.
pub fn in_invariant_region(state: MosquitoState, p: &BioParams, k_v: f64, rel_tol: f64) -> bool {
    let (l_max, a_max) = invariant_region(p, k_v);
    state.l_v >= 0.0
        && state.a_v >= 0.0
        && state.l_v <= l_max * (1.0 + rel_tol)
        && state.a_v <= a_max * (1.0 + rel_tol)
}

/// Long-run fate without control. `N = 1` counts as extinction.
pub fn classify_autonomous(p: &BioParams) -> AutonomousVerdict {
    if basic_offspring_number(p) <= 1.0 {
        AutonomousVerdict::Extinction
    } else {
        AutonomousVerdict::Persistence
    }
}

/// Jacobian of [`ode_rhs`] with respect to `(L, A)`, row-major.
pub fn jacobian(state: MosquitoState, p: &BioParams, k_v: f64) -> [[f64; 2]; 2] {
    [
        [
            -p.rb * state.a_v / k_v - p.aquatic_exit_rate(),
            p.rb * (1.0 - state.l_v / k_v),
        ],
        [p.nu_l, -p.mu_v],
    ]
}
