//! Household decision layer.
//!
//! Each household perceives a probability `π` of being bitten at least
//! `k_tol` times a day, with bites per person Poisson-distributed with mean
//! `A_v / N_h`. It clears its breeding sites when the expected utility loss
//! `π·u_c` is at least the monetary cost of doing so, valued at marginal
//! utility `W`:
//!
//! ```text
//! π·u_c ≥ (κ_0·s_l + κ_1·s_e)·W
//! ```
//!
//! where `s_l` is the household's cost proclivity, drawn from a zero-mean
//! normal law, and `s_e` flags an ongoing public intervention. Solving for
//! `s_l` gives the adoption threshold; the participation rate `H` is the
//! mass of that law on the adopting side of the threshold.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{ensure_finite, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BehaviorParams {
    /// Utility gap between not being bitten and being bitten, in (0, 1].
    pub u_c: f64,
    /// Relative risk aversion.
    pub beta: f64,
    /// Daily income (euro).
    pub income: f64,
    /// Cost scale of local (household) control (euro).
    pub kappa_0: f64,
    /// Cost attached to the public intervention (euro).
    pub kappa_1: f64,
    /// Daily bites a person tolerates before counting as bitten.
    pub k_tol: u32,
    /// Human population.
    pub n_h: f64,
    /// Public intervention currently active.
    #[serde(default)]
    pub s_e: bool,
}

impl BehaviorParams {
    pub fn validate(&self) -> Result<()> {
        for (what, v) in [
            ("u_c", self.u_c),
            ("beta", self.beta),
            ("income", self.income),
            ("kappa_0", self.kappa_0),
            ("kappa_1", self.kappa_1),
            ("n_h", self.n_h),
        ] {
            ensure_finite(what, v)?;
        }
        let fail = |what, value, constraint| Err(Error::Domain { what, value, constraint });
        if !(self.u_c > 0.0 && self.u_c <= 1.0) {
            return fail("u_c", self.u_c, "must lie in (0, 1]");
        }
        if self.beta <= 0.0 {
            return fail("beta", self.beta, "must be > 0");
        }
        if self.income <= 0.0 {
            return fail("income", self.income, "must be > 0");
        }
        if self.kappa_0 <= 0.0 {
            return fail("kappa_0", self.kappa_0, "must be > 0");
        }
        if self.kappa_1 < 0.0 {
            return fail("kappa_1", self.kappa_1, "must be >= 0");
        }
        if self.n_h <= 0.0 {
            return fail("n_h", self.n_h, "must be > 0");
        }
        Ok(())
    }

    /// Marginal utility of income at these parameters.
    pub fn w(&self) -> f64 {
        marginal_utility(self.beta, self.income)
    }

    /// The standard deviation `u_c / (W·κ_0)` at which the largest possible
    /// local threshold (π = 1, no intervention) sits one deviation out.
    pub fn natural_scale(&self) -> f64 {
        self.u_c / (self.w() * self.kappa_0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EfficacyKind {
    Linear,
    Sigmoid,
}

/// Fraction of breeding sites destroyed as a function of participation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EfficacyFn {
    pub kind: EfficacyKind,
    pub a: f64,
}

impl EfficacyFn {
    pub fn linear(a: f64) -> Self {
        EfficacyFn {
            kind: EfficacyKind::Linear,
            a,
        }
    }

    pub fn sigmoid(a: f64) -> Self {
        EfficacyFn {
            kind: EfficacyKind::Sigmoid,
            a,
        }
    }

    /// Linear slopes up to 1 are accepted; `a = 1` still yields γ < 1 because
    /// a normal participation law never reaches H = 1 at finite thresholds.
    pub fn validate(&self) -> Result<()> {
        ensure_finite("a", self.a)?;
        let ok = match self.kind {
            EfficacyKind::Linear => self.a > 0.0 && self.a <= 1.0,
            EfficacyKind::Sigmoid => self.a > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Domain {
                what: "a",
                value: self.a,
                constraint: match self.kind {
                    EfficacyKind::Linear => "linear efficacy needs 0 < a <= 1",
                    EfficacyKind::Sigmoid => "sigmoid efficacy needs a > 0",
                },
            })
        }
    }
}

/// Which side of the adoption threshold counts as participating.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AdoptionTail {
    /// `H = F(S)`: households whose proclivity is at most the threshold
    /// adopt. This is what the adoption inequality implies.
    #[default]
    BelowThreshold,
    /// `H = 1 − F(S)`: the upper-tail integral `∫_S^∞ f`.
    AboveThreshold,
}

/// Zero-mean normal law of cost proclivities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParticipationDist {
    pub scale: f64,
    pub tail: AdoptionTail,
}

impl ParticipationDist {
    pub fn new(scale: f64, tail: AdoptionTail) -> Result<Self> {
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::Domain {
                what: "scale",
                value: scale,
                constraint: "must be finite and > 0",
            });
        }
        Ok(ParticipationDist { scale, tail })
    }

    /// Scale `u_c / (W·κ_0)` derived from the behavior parameters.
    pub fn natural(bp: &BehaviorParams, tail: AdoptionTail) -> Result<Self> {
        Self::new(bp.natural_scale(), tail)
    }

    pub fn cdf(&self, s: f64) -> f64 {
        // scale is validated positive and finite
        Normal::new(0.0, self.scale)
            .expect("validated scale")
            .cdf(s)
    }
}

/// `W = exp(−β·ln(income))`.
pub fn marginal_utility(beta: f64, income: f64) -> f64 {
    (-beta * income.ln()).exp()
}

/// `P(X ≥ k_tol)` for `X ~ Poisson(a_v / n_h)`.
pub fn bite_probability(a_v: f64, n_h: f64, k_tol: u32) -> f64 {
    if k_tol == 0 {
        return 1.0;
    }
    let lambda = (a_v / n_h).max(0.0);
    let mut term = (-lambda).exp();
    let mut head = term;
    for i in 1..k_tol {
        term *= lambda / f64::from(i);
        head += term;
    }
    (1.0 - head).clamp(0.0, 1.0)
}

/// Largest proclivity `s_l` for which a household still adopts.
///
/// Negative when an active intervention's cost outweighs the perceived
/// risk; the value is passed on unchanged.
pub fn participation_threshold(pi: f64, bp: &BehaviorParams) -> f64 {
    let gain = pi * bp.u_c / bp.w();
    if bp.s_e {
        (gain - bp.kappa_1) / bp.kappa_0
    } else {
        gain / bp.kappa_0
    }
}

/// The adoption inequality for a single household with proclivity `s_l`.
pub fn adopts(s_l: f64, pi: f64, bp: &BehaviorParams) -> bool {
    let cost = bp.kappa_0 * s_l + if bp.s_e { bp.kappa_1 } else { 0.0 };
    pi * bp.u_c >= cost * bp.w()
}

/// Share of households performing mechanical control at perceived risk `pi`.
pub fn participation_rate(pi: f64, bp: &BehaviorParams, dist: &ParticipationDist) -> f64 {
    debug_assert!((0.0..=1.0).contains(&pi), "pi = {pi}");
    let f = dist.cdf(participation_threshold(pi, bp));
    match dist.tail {
        AdoptionTail::BelowThreshold => f,
        AdoptionTail::AboveThreshold => 1.0 - f,
    }
}

/// Fraction γ(H) of breeding sites destroyed at participation `h`.
pub fn efficacy(h: f64, f: &EfficacyFn) -> f64 {
    match f.kind {
        EfficacyKind::Linear => f.a * h,
        EfficacyKind::Sigmoid => f.a * h / (1.0 + f.a * h),
    }
}
