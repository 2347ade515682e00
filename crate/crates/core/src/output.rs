//! CSV and SVG emission.
//!
//! Numbers are written with Rust's shortest round-trip formatting, so a
//! file parses back to exactly the in-memory values and identical runs give
//! byte-identical files.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::dynamics::{detect_periodic_orbit, OrbitSummary, Sample, Trajectory};
use crate::error::{Error, Result};
use crate::presets::{report_recovery_time, ScenarioRun};
use crate::svg::{LinePlot, Series};

pub const TRAJECTORY_HEADER: &str = "t,L_v,A_v,K_v";
pub const IMPULSE_HEADER: &str = "t,pi,H,gamma,K_pre,K_post,s_e";
pub const SUMMARY_HEADER: &str =
    "label,orbit_mean,orbit_min,orbit_max,cf_orbit_mean,recovery_days,final_H";

/// Relative agreement between successive periods for a run to count as
/// having settled on a periodic orbit.
pub const ORBIT_TOL: f64 = 1e-3;
pub const RECOVERY_TOL: f64 = 0.05;

pub fn write_trajectory<W: Write>(traj: &Trajectory, mut w: W) -> io::Result<()> {
    writeln!(w, "{TRAJECTORY_HEADER}")?;
    for s in &traj.samples {
        writeln!(w, "{},{},{},{}", s.t, s.l_v, s.a_v, s.k_v)?;
    }
    w.flush()
}

pub fn write_impulses<W: Write>(traj: &Trajectory, mut w: W) -> io::Result<()> {
    writeln!(w, "{IMPULSE_HEADER}")?;
    for r in &traj.impulse_log {
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            r.t,
            r.pi,
            r.h,
            r.gamma,
            r.k_pre,
            r.k_post,
            u8::from(r.s_e)
        )?;
    }
    w.flush()
}

/// Writes `<label>_trajectory.csv` and `<label>_impulses.csv` into `dir`.
pub fn emit_csv(traj: &Trajectory, dir: &Path, label: &str) -> Result<(PathBuf, PathBuf)> {
    let samples = dir.join(format!("{label}_trajectory.csv"));
    let impulses = dir.join(format!("{label}_impulses.csv"));
    write_trajectory(traj, BufWriter::new(File::create(&samples)?))?;
    write_impulses(traj, BufWriter::new(File::create(&impulses)?))?;
    Ok((samples, impulses))
}

pub fn read_trajectory(path: &Path) -> Result<Vec<Sample>> {
    let reader = BufReader::new(File::open(path)?);
    let mut lines = reader.lines();
    match lines.next().transpose()? {
        Some(h) if h == TRAJECTORY_HEADER => {}
        other => {
            return Err(Error::validation(
                path.display().to_string(),
                format!("unexpected header {other:?}"),
            ))
        }
    }
    let mut out = Vec::new();
    for (n, line) in lines.enumerate() {
        let line = line?;
        let cols: Vec<f64> = line
            .split(',')
            .map(str::parse)
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| {
                Error::validation(format!("{}:{}", path.display(), n + 2), format!("{e}"))
            })?;
        let [t, l_v, a_v, k_v] = cols[..] else {
            return Err(Error::validation(
                format!("{}:{}", path.display(), n + 2),
                "expected 4 columns",
            ));
        };
        out.push(Sample { t, l_v, a_v, k_v });
    }
    Ok(out)
}

/// One line of `summary.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub label: String,
    pub orbit: Option<OrbitSummary>,
    pub counterfactual_orbit: Option<OrbitSummary>,
    pub recovery_days: Option<f64>,
    pub final_h: Option<f64>,
}

pub fn summarize(run: &ScenarioRun) -> Result<SummaryRow> {
    let tau = run.config.schedule.local.map_or(7.0, |s| s.tau);
    let recovery = report_recovery_time(&run.with_intervention, &run.counterfactual, RECOVERY_TOL)?;
    Ok(SummaryRow {
        label: run.label.clone(),
        orbit: detect_periodic_orbit(&run.with_intervention, tau, ORBIT_TOL),
        counterfactual_orbit: detect_periodic_orbit(&run.counterfactual, tau, ORBIT_TOL),
        recovery_days: recovery.map(|r| r.days_after_event),
        final_h: run.with_intervention.impulse_log.last().map(|r| r.h),
    })
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn write_summary<W: Write>(rows: &[SummaryRow], mut w: W) -> io::Result<()> {
    writeln!(w, "{SUMMARY_HEADER}")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            r.label,
            opt(r.orbit.map(|o| o.mean)),
            opt(r.orbit.map(|o| o.min)),
            opt(r.orbit.map(|o| o.max)),
            opt(r.counterfactual_orbit.map(|o| o.mean)),
            opt(r.recovery_days),
            opt(r.final_h),
        )?;
    }
    w.flush()
}

/// Line plots of adult females and participation, with and without the
/// intervention.
pub fn run_plots(run: &ScenarioRun) -> Vec<LinePlot> {
    let adults = |t: &Trajectory| t.samples.iter().map(|s| (s.t, s.a_v)).collect::<Vec<_>>();
    let participation = |t: &Trajectory| t.impulse_log.iter().map(|r| (r.t, r.h)).collect::<Vec<_>>();
    let mut plots = vec![LinePlot {
        title: format!("{}: adult females", run.label),
        x_label: "day".into(),
        y_label: "A_v".into(),
        series: vec![
            Series::new("with intervention", "#1f77b4", adults(&run.with_intervention)),
            Series::new("without intervention", "#000000", adults(&run.counterfactual)),
        ],
    }];
    if !run.with_intervention.impulse_log.is_empty() {
        plots.push(LinePlot {
            title: format!("{}: participation", run.label),
            x_label: "day".into(),
            y_label: "H".into(),
            series: vec![
                Series::new("H_e (with)", "#d62728", participation(&run.with_intervention)),
                Series::new("H (without)", "#000000", participation(&run.counterfactual)),
            ],
        });
    }
    plots
}

pub fn emit_svg(plots: &[LinePlot], path: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(crate::svg::render(plots).as_bytes())?;
    w.flush()?;
    Ok(())
}

/// Writes every file of a paired run into `dir`; returns its summary row.
pub fn emit_run(run: &ScenarioRun, dir: &Path) -> Result<SummaryRow> {
    emit_csv(&run.with_intervention, dir, &run.label)?;
    emit_csv(&run.counterfactual, dir, &format!("{}_cf", run.label))?;
    emit_svg(&run_plots(run), &dir.join(format!("{}.svg", run.label)))?;
    summarize(run)
}

pub fn emit_runs(runs: &[ScenarioRun], dir: &Path) -> Result<Vec<SummaryRow>> {
    std::fs::create_dir_all(dir)?;
    let rows = runs
        .iter()
        .map(|r| emit_run(r, dir))
        .collect::<Result<Vec<_>>>()?;
    write_summary(&rows, BufWriter::new(File::create(dir.join("summary.csv"))?))?;
    Ok(rows)
}
