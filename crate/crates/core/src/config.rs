//! Declarative scenario description and its JSON loader.
//!
//! A config file is a JSON object. Every key is optional: missing values
//! come from the Réunion defaults, or from a named preset when the file has
//! a `"preset"` key. Objects are merged key by key; arrays and scalars
//! replace the default wholesale.
//!
//! ```json
//! {
//!   "preset": "S2",
//!   "label": "tolerance_9",
//!   "behavior": { "u_c": 0.9 },
//!   "schedule": {
//!     "external_events": [
//!       { "day": 70, "extra_fraction": 0.5, "shift": { "new_k_tol": 9 } }
//!     ]
//!   }
//! }
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::behavior::{AdoptionTail, BehaviorParams, EfficacyFn, ParticipationDist};
use crate::capacity::{CapacityParams, ImpulseSchedule};
use crate::dynamics::{EventSchedule, ExternalEvent, ParameterShift};
use crate::entomology::BioParams;
use crate::error::{Error, Result};
use crate::presets::ScenarioPreset;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialState {
    pub l_v: f64,
    pub a_v: f64,
}

/// How the spread of household cost proclivities is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParticipationConfig {
    /// Standard deviation of the proclivity law; `null` derives it as
    /// `u_c / (W·κ_0)`.
    #[serde(default)]
    pub scale: Option<f64>,
    #[serde(default)]
    pub tail: AdoptionTail,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub label: String,
    pub bio: BioParams,
    pub capacity: CapacityParams,
    pub initial: InitialState,
    pub behavior: BehaviorParams,
    pub efficacy: EfficacyFn,
    pub participation: ParticipationConfig,
    /// Apply this efficacy at every control instead of the behavioral one.
    pub frozen_gamma: Option<f64>,
    pub schedule: EventSchedule,
    pub step: f64,
    pub output_interval: f64,
}

/// Relative slack when checking that one duration is a multiple of another.
const GRID_TOL: f64 = 1e-9;

fn is_multiple(x: f64, h: f64) -> bool {
    let r = x / h;
    (r - r.round()).abs() <= GRID_TOL * r.abs().max(1.0)
}

impl ScenarioConfig {
    /// Réunion parameters with weekly household control from day 0 and a
    /// public intervention destroying half of the capacity on day 70.
    pub fn reunion() -> Self {
        ScenarioConfig {
            label: "run".into(),
            bio: BioParams::reunion(),
            capacity: CapacityParams {
                r_k: 0.05,
                k_max: 2.0e6,
                k_0: 2.0e4,
            },
            initial: InitialState {
                l_v: 2.0e4,
                a_v: 2.0e4,
            },
            behavior: BehaviorParams {
                u_c: 0.6,
                beta: 1.2,
                income: 103.0,
                kappa_0: 14.8,
                kappa_1: 50.0,
                k_tol: 3,
                n_h: 2.0e5,
                s_e: false,
            },
            efficacy: EfficacyFn::linear(1.0),
            participation: ParticipationConfig::default(),
            frozen_gamma: None,
            schedule: EventSchedule {
                local: Some(ImpulseSchedule { t_0: 0.0, tau: 7.0 }),
                horizon: 365.0,
                external_events: vec![ExternalEvent {
                    day: 70.0,
                    extra_fraction: 0.5,
                    shift: ParameterShift::default(),
                }],
            },
            step: 0.1,
            output_interval: 1.0,
        }
    }

    /// The same run with every public intervention removed.
    pub fn counterfactual(&self) -> Self {
        let mut cf = self.clone();
        cf.schedule.external_events.clear();
        cf
    }

    pub fn participation_dist(&self) -> Result<ParticipationDist> {
        let scale = self
            .participation
            .scale
            .unwrap_or_else(|| self.behavior.natural_scale());
        ParticipationDist::new(scale, self.participation.tail)
    }

    pub fn validate(&self) -> Result<()> {
        let field = |prefix: &str, e: Error| match e {
            Error::Domain {
                what,
                value,
                constraint,
            } => Error::validation(format!("{prefix}.{what}"), format!("= {value}: {constraint}")),
            other => other,
        };
        self.bio.validate().map_err(|e| field("bio", e))?;
        self.capacity.validate().map_err(|e| field("capacity", e))?;
        self.behavior.validate().map_err(|e| field("behavior", e))?;
        self.efficacy.validate().map_err(|e| field("efficacy", e))?;
        self.participation_dist()
            .map_err(|e| field("participation", e))?;

        for (name, v) in [("initial.l_v", self.initial.l_v), ("initial.a_v", self.initial.a_v)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::validation(name, format!("= {v}: must be finite and >= 0")));
            }
        }
        if let Some(g) = self.frozen_gamma {
            if !(0.0..1.0).contains(&g) {
                return Err(Error::validation("frozen_gamma", format!("= {g}: must lie in [0, 1)")));
            }
        }

        let h = self.step;
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::validation("step", format!("= {h}: must be finite and > 0")));
        }
        let horizon = self.schedule.horizon;
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(Error::validation(
                "schedule.horizon",
                format!("= {horizon}: must be finite and > 0"),
            ));
        }
        let on_grid = |name: &str, v: f64| -> Result<()> {
            if is_multiple(v, h) {
                Ok(())
            } else {
                Err(Error::validation(name, format!("= {v}: must be a multiple of step ({h})")))
            }
        };
        on_grid("schedule.horizon", horizon)?;
        if !self.output_interval.is_finite() || self.output_interval <= 0.0 {
            return Err(Error::validation(
                "output_interval",
                format!("= {}: must be > 0", self.output_interval),
            ));
        }
        on_grid("output_interval", self.output_interval)?;

        if let Some(local) = &self.schedule.local {
            local.validate().map_err(|e| field("schedule.local", e))?;
            on_grid("schedule.local.tau", local.tau)?;
            on_grid("schedule.local.t_0", local.t_0)?;
            if local.t_0 >= horizon {
                return Err(Error::validation(
                    "schedule.local.t_0",
                    format!("= {}: must be before the horizon ({horizon})", local.t_0),
                ));
            }
        }

        for (i, ev) in self.schedule.external_events.iter().enumerate() {
            let name = |f: &str| format!("schedule.external_events[{i}].{f}");
            if !(ev.day >= 0.0 && ev.day <= horizon) {
                return Err(Error::validation(
                    name("day"),
                    format!("= {}: must lie in [0, horizon]", ev.day),
                ));
            }
            on_grid(&name("day"), ev.day)?;
            if !(0.0..1.0).contains(&ev.extra_fraction) {
                return Err(Error::validation(
                    name("extra_fraction"),
                    format!("= {}: must lie in [0, 1)", ev.extra_fraction),
                ));
            }
            if let Some(r) = ev.shift.new_r_k {
                if !(r >= 0.0 && r.is_finite()) {
                    return Err(Error::validation(
                        name("shift.new_r_k"),
                        format!("= {r}: must be finite and >= 0"),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Builds a config from a JSON document layered over the defaults.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let value: Value = serde_json::from_str(text)?;
        Self::from_json_value(value)
    }

    pub fn from_json_value(value: Value) -> Result<Self> {
        let Value::Object(mut overrides) = value else {
            return Err(Error::validation("<root>", "must be a JSON object"));
        };
        let base = match overrides.remove("preset") {
            None => ScenarioConfig::reunion(),
            Some(Value::String(name)) => name
                .parse::<ScenarioPreset>()
                .map_err(|e| Error::validation("preset", e))?
                .base_config(),
            Some(other) => {
                return Err(Error::validation("preset", format!("= {other}: must be a string")))
            }
        };
        let mut merged = serde_json::to_value(&base)?;
        merge(&mut merged, overrides, "")?;
        let config: ScenarioConfig = serde_json::from_value(merged)?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_json_string(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Reads and validates a scenario file.
pub fn load_config(path: impl AsRef<Path>) -> Result<ScenarioConfig> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    let value: Value = serde_json::from_str(&text).map_err(|source| Error::Parse {
        path: path.to_path_buf(),
        source,
    })?;
    ScenarioConfig::from_json_value(value)
}

fn merge(base: &mut Value, overrides: Map<String, Value>, path: &str) -> Result<()> {
    let Value::Object(target) = base else {
        unreachable!("merge is only called on objects");
    };
    for (key, value) in overrides {
        let here = if path.is_empty() {
            key.clone()
        } else {
            format!("{path}.{key}")
        };
        match target.get_mut(&key) {
            None => return Err(Error::validation(here, "is not a known field")),
            Some(slot @ Value::Object(_)) => match value {
                Value::Object(inner) => merge(slot, inner, &here)?,
                other => *slot = other,
            },
            Some(slot) => *slot = value,
        }
    }
    Ok(())
}

/// Sets the value at a dotted path such as `behavior.u_c` or
/// `schedule.external_events.0.shift.new_k_tol` inside a config document.
pub fn set_path(doc: &mut Value, path: &str, value: Value) -> Result<()> {
    let mut cur = doc;
    let parts: Vec<&str> = path.split('.').collect();
    for (i, part) in parts.iter().enumerate() {
        let last = i + 1 == parts.len();
        let next = match cur {
            Value::Object(map) => map.get_mut(*part),
            Value::Array(items) => part.parse::<usize>().ok().and_then(|j| items.get_mut(j)),
            _ => None,
        };
        let Some(next) = next else {
            return Err(Error::validation(path, "does not name a config field"));
        };
        if last {
            *next = value;
            return Ok(());
        }
        if next.is_null() {
            *next = Value::Object(Map::new());
        }
        cur = next;
    }
    Ok(())
}
