use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::Value;

use vectorsim_core::analysis::classify_controlled;
use vectorsim_core::behavior::efficacy;
use vectorsim_core::config::{load_config, set_path, ScenarioConfig};
use vectorsim_core::dynamics::{limiting_participation, simulate};
use vectorsim_core::output::{emit_runs, SummaryRow};
use vectorsim_core::presets::{run_configs, run_preset, ScenarioPreset, ScenarioRun};
use vectorsim_core::{Error, Result};

/// Control days averaged to estimate the limiting participation rate.
const LIMIT_WINDOW: usize = 5;

#[derive(Parser)]
#[command(name = "vectorsim", version, about = "Mosquito control scenarios with household behavior")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario file and its no-intervention counterfactual.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Run a built-in scenario grid (Baseline, S1, S2, S3, S4).
    Preset {
        name: ScenarioPreset,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Print the persistence / extinction verdict for a scenario.
    Classify {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run the cartesian product of one or more parameter axes.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// `name=v1,v2,...`; name is an alias (u_c, kappa_1, k_tol, k_shift,
        /// r_k, r_k_shift, tau, gamma, a) or a dotted config path.
        #[arg(long = "axis", required = true)]
        axes: Vec<String>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
}

fn axis_path(name: &str) -> &str {
    match name {
        "u_c" => "behavior.u_c",
        "kappa_1" => "behavior.kappa_1",
        "k_tol" => "behavior.k_tol",
        "k_shift" => "schedule.external_events.0.shift.new_k_tol",
        "r_k" => "capacity.r_k",
        "r_k_shift" => "schedule.external_events.0.shift.new_r_k",
        "tau" => "schedule.local.tau",
        "gamma" => "frozen_gamma",
        "a" => "efficacy.a",
        other => other,
    }
}

fn parse_axis(spec: &str) -> Result<(String, Vec<Value>)> {
    let (name, values) = spec
        .split_once('=')
        .ok_or_else(|| Error::Validation {
            field: "--axis".into(),
            constraint: format!("`{spec}` is not of the form name=v1,v2,..."),
        })?;
    let values: Vec<Value> = values
        .split(',')
        .map(|v| serde_json::from_str(v).unwrap_or_else(|_| Value::String(v.to_string())))
        .collect();
    Ok((name.to_string(), values))
}

fn sweep_configs(base: &ScenarioConfig, axes: &[(String, Vec<Value>)]) -> Result<Vec<ScenarioConfig>> {
    let mut cells = vec![(serde_json::to_value(base)?, base.label.clone())];
    for (name, values) in axes {
        let mut next = Vec::with_capacity(cells.len() * values.len());
        for (doc, label) in &cells {
            for v in values {
                let mut doc = doc.clone();
                set_path(&mut doc, axis_path(name), v.clone())?;
                let tag = match v {
                    Value::String(s) => s.clone(),
                    other => other.to_string(),
                };
                next.push((doc, format!("{label}_{name}{tag}")));
            }
        }
        cells = next;
    }
    cells
        .into_iter()
        .map(|(mut doc, label)| {
            set_path(&mut doc, "label", Value::String(label))?;
            ScenarioConfig::from_json_value(doc)
        })
        .collect()
}

fn report(runs: &[ScenarioRun], out: &Path) -> Result<()> {
    let rows: Vec<SummaryRow> = emit_runs(runs, out)?;
    for row in rows {
        println!(
            "{}: orbit mean {} (counterfactual {}), recovery {} days, final H {}",
            row.label,
            fmt_opt(row.orbit.map(|o| o.mean)),
            fmt_opt(row.counterfactual_orbit.map(|o| o.mean)),
            fmt_opt(row.recovery_days),
            fmt_opt(row.final_h),
        );
    }
    println!("wrote {}", out.display());
    Ok(())
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".into(), |x| format!("{x:.6}"))
}

fn classify(config: &ScenarioConfig) -> Result<()> {
    let tau = config
        .schedule
        .local
        .map(|s| s.tau)
        .ok_or_else(|| Error::Validation {
            field: "schedule.local".into(),
            constraint: "classification needs a periodic local control".into(),
        })?;
    // parameters in force after the last intervention
    let mut r_k = config.capacity.r_k;
    for ev in &config.schedule.external_events {
        if let Some(r) = ev.shift.new_r_k {
            r_k = r;
        }
    }
    let (gamma_h0, source) = match config.frozen_gamma {
        Some(g) => (g, "frozen".to_string()),
        None => {
            let traj = simulate(config)?;
            let h0 = limiting_participation(&traj, LIMIT_WINDOW).ok_or_else(|| {
                Error::Validation {
                    field: "schedule".into(),
                    constraint: format!("fewer than {LIMIT_WINDOW} control days"),
                }
            })?;
            (
                efficacy(h0, &config.efficacy),
                format!("mean H over last {LIMIT_WINDOW} control days = {h0}"),
            )
        }
    };
    let v = classify_controlled(&config.bio, gamma_h0, r_k, tau)?;
    println!("kind: {:?}", v.kind);
    println!("gamma_H0: {gamma_h0} ({source})");
    println!("r_K: {r_k}");
    println!("tau: {tau}");
    println!("C: {}", v.c);
    println!("lhs: {}", v.lhs);
    println!("rhs_persist: {}", v.rhs_persist);
    println!("rhs_extinct: {}", v.rhs_extinct);
    println!("rhs_extinct_damped: {}", v.rhs_extinct_damped);
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run { config, out } => {
            let config = load_config(&config)?;
            report(&[ScenarioRun::new(config)?], &out)
        }
        Command::Preset { name, out } => report(&run_preset(name)?, &out),
        Command::Classify { config } => classify(&load_config(&config)?),
        Command::Sweep { config, axes, out } => {
            let base = load_config(&config)?;
            let axes = axes
                .iter()
                .map(|a| parse_axis(a))
                .collect::<Result<Vec<_>>>()?;
            report(&run_configs(sweep_configs(&base, &axes)?)?, &out)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
