//! Python bindings for `vectorsim-core`.
//!
//! Scenario files use the same JSON schema as the `vectorsim` CLI; the
//! closed-form functions take plain floats with Réunion defaults.

use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use vectorsim_core::analysis;
use vectorsim_core::behavior::{self, EfficacyFn, EfficacyKind};
use vectorsim_core::capacity::{self, CapacityParams};
use vectorsim_core::config::{self, ScenarioConfig};
use vectorsim_core::dynamics::{self, detect_periodic_orbit};
use vectorsim_core::entomology::{self, BioParams};
use vectorsim_core::output::{ORBIT_TOL, RECOVERY_TOL};
use vectorsim_core::presets::{self, ScenarioPreset};
use vectorsim_core::Error;

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Io(e) => PyIOError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn preset_named(name: &str) -> PyResult<ScenarioPreset> {
    name.parse().map_err(PyValueError::new_err)
}

fn bio(rb: f64, nu_l: f64, mu_l: f64, mu_v: f64) -> PyResult<BioParams> {
    BioParams::new(rb, nu_l, mu_l, mu_v).map_err(py_err)
}

fn capacity(r_k: f64, k_max: f64) -> PyResult<CapacityParams> {
    let cp = CapacityParams { r_k, k_max, k_0: k_max };
    cp.validate().map_err(py_err)?;
    Ok(cp)
}

/// A scenario configuration.
#[pyclass(module = "vectorsim", frozen, skip_from_py_object)]
#[derive(Clone)]
struct Scenario {
    inner: ScenarioConfig,
}

#[pymethods]
impl Scenario {
    /// Réunion defaults, optionally layered with a JSON document.
    #[new]
    #[pyo3(signature = (json = None))]
    fn new(json: Option<&str>) -> PyResult<Self> {
        let inner = match json {
            Some(text) => ScenarioConfig::from_json_str(text).map_err(py_err)?,
            None => ScenarioConfig::reunion(),
        };
        Ok(Scenario { inner })
    }

    #[staticmethod]
    fn preset(name: &str) -> PyResult<Self> {
        let p: ScenarioPreset = preset_named(name)?;
        Ok(Scenario {
            inner: p.base_config(),
        })
    }

    /// Every cell of a preset's parameter grid.
    #[staticmethod]
    fn preset_grid(name: &str) -> PyResult<Vec<Scenario>> {
        let p: ScenarioPreset = preset_named(name)?;
        Ok(p.grid().into_iter().map(|inner| Scenario { inner }).collect())
    }

    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        Ok(Scenario {
            inner: config::load_config(path).map_err(py_err)?,
        })
    }

    /// Copy with the value at a dotted path replaced, e.g.
    /// `with_value("behavior.u_c", 0.3)`. The value is given as JSON text.
    fn with_value(&self, path: &str, json_value: &str) -> PyResult<Self> {
        let mut doc = serde_json::to_value(&self.inner).map_err(|e| py_err(e.into()))?;
        let value = serde_json::from_str(json_value).map_err(|e| py_err(e.into()))?;
        config::set_path(&mut doc, path, value).map_err(py_err)?;
        Ok(Scenario {
            inner: ScenarioConfig::from_json_value(doc).map_err(py_err)?,
        })
    }

    #[getter]
    fn label(&self) -> String {
        self.inner.label.clone()
    }

    fn to_json(&self) -> PyResult<String> {
        self.inner.to_json_string().map_err(py_err)
    }

    /// The same scenario without public interventions.
    fn counterfactual(&self) -> Self {
        Scenario {
            inner: self.inner.counterfactual(),
        }
    }

    fn simulate(&self, py: Python<'_>) -> PyResult<Trajectory> {
        let cfg = self.inner.clone();
        let inner = py.detach(move || dynamics::simulate(&cfg)).map_err(py_err)?;
        Ok(Trajectory { inner })
    }

    fn __repr__(&self) -> String {
        format!("Scenario(label={:?})", self.inner.label)
    }
}

#[pyclass(module = "vectorsim", frozen)]
struct Trajectory {
    inner: dynamics::Trajectory,
}

#[pymethods]
impl Trajectory {
    #[getter]
    fn t(&self) -> Vec<f64> {
        self.inner.samples.iter().map(|s| s.t).collect()
    }

    #[getter]
    fn l_v(&self) -> Vec<f64> {
        self.inner.samples.iter().map(|s| s.l_v).collect()
    }

    #[getter]
    fn a_v(&self) -> Vec<f64> {
        self.inner.samples.iter().map(|s| s.a_v).collect()
    }

    #[getter]
    fn k_v(&self) -> Vec<f64> {
        self.inner.samples.iter().map(|s| s.k_v).collect()
    }

    /// Local controls as a dict of columns: t, pi, H, gamma, K_pre, K_post, s_e.
    fn impulses<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let log = &self.inner.impulse_log;
        let d = PyDict::new(py);
        d.set_item("t", log.iter().map(|r| r.t).collect::<Vec<_>>())?;
        d.set_item("pi", log.iter().map(|r| r.pi).collect::<Vec<_>>())?;
        d.set_item("H", log.iter().map(|r| r.h).collect::<Vec<_>>())?;
        d.set_item("gamma", log.iter().map(|r| r.gamma).collect::<Vec<_>>())?;
        d.set_item("K_pre", log.iter().map(|r| r.k_pre).collect::<Vec<_>>())?;
        d.set_item("K_post", log.iter().map(|r| r.k_post).collect::<Vec<_>>())?;
        d.set_item("s_e", log.iter().map(|r| r.s_e).collect::<Vec<_>>())?;
        Ok(d)
    }

    /// `(mean, min, max)` of adults over the final period, or `None` while
    /// the run is still transient.
    #[pyo3(signature = (tau = 7.0, tol = ORBIT_TOL))]
    fn orbit(&self, tau: f64, tol: f64) -> Option<(f64, f64, f64)> {
        detect_periodic_orbit(&self.inner, tau, tol).map(|o| (o.mean, o.min, o.max))
    }

    /// Days from the first public intervention until adults stay within
    /// `tol` of `counterfactual` for a week.
    #[pyo3(signature = (counterfactual, tol = RECOVERY_TOL))]
    fn recovery_days(&self, counterfactual: &Trajectory, tol: f64) -> PyResult<Option<f64>> {
        let r = presets::report_recovery_time(&self.inner, &counterfactual.inner, tol)
            .map_err(py_err)?;
        Ok(r.map(|r| r.days_after_event))
    }

    fn __len__(&self) -> usize {
        self.inner.samples.len()
    }
}

/// Runs every cell of a preset with its counterfactual; returns
/// `[(label, with_intervention, without), ...]`.
#[pyfunction]
fn run_preset(py: Python<'_>, name: &str) -> PyResult<Vec<(String, Trajectory, Trajectory)>> {
    let p: ScenarioPreset = preset_named(name)?;
    let runs = py.detach(move || presets::run_preset(p)).map_err(py_err)?;
    Ok(runs
        .into_iter()
        .map(|r| {
            (
                r.label,
                Trajectory {
                    inner: r.with_intervention,
                },
                Trajectory {
                    inner: r.counterfactual,
                },
            )
        })
        .collect())
}

#[pyfunction]
#[pyo3(signature = (rb = 5.0, nu_l = 1.0 / 15.0, mu_l = 0.01, mu_v = 0.05))]
fn basic_offspring_number(rb: f64, nu_l: f64, mu_l: f64, mu_v: f64) -> PyResult<f64> {
    Ok(entomology::basic_offspring_number(&bio(rb, nu_l, mu_l, mu_v)?))
}

/// Equilibria `(L, A)` at capacity `k_v`, the zero state first.
#[pyfunction]
#[pyo3(signature = (k_v = 2.0e6, rb = 5.0, nu_l = 1.0 / 15.0, mu_l = 0.01, mu_v = 0.05))]
fn equilibria(k_v: f64, rb: f64, nu_l: f64, mu_l: f64, mu_v: f64) -> PyResult<Vec<(f64, f64)>> {
    Ok(entomology::equilibria(&bio(rb, nu_l, mu_l, mu_v)?, k_v)
        .into_iter()
        .map(|e| (e.l_v, e.a_v))
        .collect())
}

#[pyfunction]
#[pyo3(signature = (k_start, dt, r_k = 0.05, k_max = 2.0e6))]
fn capacity_flow(k_start: f64, dt: f64, r_k: f64, k_max: f64) -> PyResult<f64> {
    capacity::capacity_flow(k_start, &capacity(r_k, k_max)?, dt).map_err(py_err)
}

/// Periodic capacity `phase` days after a control under constant efficacy.
#[pyfunction]
#[pyo3(signature = (gamma, phase, tau = 7.0, r_k = 0.05, k_max = 2.0e6))]
fn periodic_capacity(gamma: f64, phase: f64, tau: f64, r_k: f64, k_max: f64) -> PyResult<f64> {
    capacity::periodic_capacity(&capacity(r_k, k_max)?, tau, gamma, phase).map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (a_v, n_h = 2.0e5, k_tol = 3))]
fn bite_probability(a_v: f64, n_h: f64, k_tol: u32) -> f64 {
    behavior::bite_probability(a_v, n_h, k_tol)
}

#[pyfunction]
#[pyo3(signature = (beta = 1.2, income = 103.0))]
fn marginal_utility(beta: f64, income: f64) -> f64 {
    behavior::marginal_utility(beta, income)
}

/// Participation rate at perceived risk `pi` under the default scenario's
/// behavior, with the given overrides.
#[pyfunction]
#[pyo3(signature = (pi, u_c = 0.6, kappa_1 = 50.0, s_e = false, upper_tail = false))]
fn participation_rate(pi: f64, u_c: f64, kappa_1: f64, s_e: bool, upper_tail: bool) -> PyResult<f64> {
    if !(0.0..=1.0).contains(&pi) {
        return Err(PyValueError::new_err(format!("pi = {pi}: must lie in [0, 1]")));
    }
    let mut cfg = ScenarioConfig::reunion();
    cfg.behavior.u_c = u_c;
    cfg.behavior.kappa_1 = kappa_1;
    cfg.behavior.s_e = s_e;
    cfg.behavior.validate().map_err(py_err)?;
    if upper_tail {
        cfg.participation.tail = behavior::AdoptionTail::AboveThreshold;
    }
    let dist = cfg.participation_dist().map_err(py_err)?;
    Ok(behavior::participation_rate(pi, &cfg.behavior, &dist))
}

/// `kind` is "linear" or "sigmoid".
#[pyfunction]
#[pyo3(signature = (h, a = 1.0, kind = "linear"))]
fn efficacy(h: f64, a: f64, kind: &str) -> PyResult<f64> {
    let kind = match kind {
        "linear" => EfficacyKind::Linear,
        "sigmoid" => EfficacyKind::Sigmoid,
        other => return Err(PyValueError::new_err(format!("unknown efficacy kind {other:?}"))),
    };
    let f = EfficacyFn { kind, a };
    f.validate().map_err(py_err)?;
    Ok(behavior::efficacy(h, &f))
}

#[pyfunction]
#[pyo3(signature = (gamma, tau = 7.0, r_k = 0.05))]
fn impulse_strength(gamma: f64, tau: f64, r_k: f64) -> PyResult<f64> {
    analysis::impulse_strength(r_k, gamma, tau).map_err(py_err)
}

/// Persistence / extinction verdict under constant efficacy `gamma`.
#[pyfunction]
#[pyo3(signature = (gamma, tau = 7.0, r_k = 0.05, rb = 5.0, nu_l = 1.0 / 15.0, mu_l = 0.01, mu_v = 0.05))]
#[allow(clippy::too_many_arguments)]
fn classify_controlled<'py>(
    py: Python<'py>,
    gamma: f64,
    tau: f64,
    r_k: f64,
    rb: f64,
    nu_l: f64,
    mu_l: f64,
    mu_v: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let v = analysis::classify_controlled(&bio(rb, nu_l, mu_l, mu_v)?, gamma, r_k, tau)
        .map_err(py_err)?;
    let d = PyDict::new(py);
    d.set_item("kind", format!("{:?}", v.kind))?;
    d.set_item("C", v.c)?;
    d.set_item("lhs", v.lhs)?;
    d.set_item("rhs_persist", v.rhs_persist)?;
    d.set_item("rhs_extinct", v.rhs_extinct)?;
    d.set_item("rhs_extinct_damped", v.rhs_extinct_damped)?;
    Ok(d)
}

#[pymodule]
fn vectorsim(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Scenario>()?;
    m.add_class::<Trajectory>()?;
    m.add_function(wrap_pyfunction!(run_preset, m)?)?;
    m.add_function(wrap_pyfunction!(basic_offspring_number, m)?)?;
    m.add_function(wrap_pyfunction!(equilibria, m)?)?;
    m.add_function(wrap_pyfunction!(capacity_flow, m)?)?;
    m.add_function(wrap_pyfunction!(periodic_capacity, m)?)?;
    m.add_function(wrap_pyfunction!(bite_probability, m)?)?;
    m.add_function(wrap_pyfunction!(marginal_utility, m)?)?;
    m.add_function(wrap_pyfunction!(participation_rate, m)?)?;
    m.add_function(wrap_pyfunction!(efficacy, m)?)?;
    m.add_function(wrap_pyfunction!(impulse_strength, m)?)?;
    m.add_function(wrap_pyfunction!(classify_controlled, m)?)?;
    Ok(())
}
