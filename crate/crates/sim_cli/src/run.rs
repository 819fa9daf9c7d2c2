use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use coupled_solver::{run_load_program, settle_potential, ConductivityDegradation, CoupledProblem, SolverError, StepRecord};
use fem_core::FieldState;
use log::{info, warn};

use crate::scenario::Scenario;
use crate::setup::{prepare, Prepared};
use crate::CliError;

/// One row of the response curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub step: usize,
    pub u_applied: f64,
    pub force: f64,
    pub current: f64,
    /// `None` while no current flows.
    pub resistance: Option<f64>,
    pub relative_change: Option<f64>,
    pub max_damage: f64,
}

/// Current through the electrodes for one conductivity-degradation shape.
#[derive(Debug, Clone, PartialEq)]
pub struct DegradationCurve {
    pub k: f64,
    pub n: f64,
    pub current: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub name: String,
    pub seed: u64,
    pub n_dofs: usize,
    pub voltage: f64,
    pub peak_force: f64,
    /// Applied displacement where the force first falls below half its peak.
    pub fracture_displacement: Option<f64>,
    /// Unstrained resistance `V / I0`.
    pub r0: Option<f64>,
    pub curve: Vec<CurvePoint>,
    pub records: Vec<StepRecord>,
    pub degradation: Vec<DegradationCurve>,
    pub wall_time: Duration,
    /// Solver failure that ended the run early.
    pub failure: Option<String>,
}

impl RunSummary {
    pub fn completed(&self) -> bool {
        self.failure.is_none()
    }
}

fn resistance(voltage: f64, current: f64) -> Option<f64> {
    (current != 0.0).then(|| voltage / current)
}

/// Response curve from step records; `R0` comes from the first record.
pub fn curve_from_records(records: &[StepRecord], voltage: f64) -> (Vec<CurvePoint>, Option<f64>) {
    let r0 = records.first().and_then(|r| resistance(voltage, r.current_in));
    let curve = records
        .iter()
        .map(|r| {
            let res = resistance(voltage, r.current_in);
            CurvePoint {
                step: r.step,
                u_applied: r.load,
                force: r.force,
                current: r.current_in,
                resistance: res,
                relative_change: res.zip(r0).map(|(r, r0)| (r - r0) / r0),
                max_damage: r.max_damage,
            }
        })
        .collect();
    (curve, r0)
}

/// Peak force and the displacement where the force first drops below half of
/// the peak reached so far.
pub fn fracture_point(records: &[StepRecord]) -> (f64, Option<f64>) {
    let mut peak: f64 = 0.0;
    let mut fracture = None;
    for r in records {
        if fracture.is_none() && peak > 0.0 && r.force < 0.5 * peak {
            fracture = Some(r.load);
        }
        peak = peak.max(r.force);
    }
    (peak, fracture)
}

/// Observer hook for callers that need the converged states.
pub type StepHook<'a> = &'a mut dyn FnMut(&CoupledProblem, &StepRecord, &FieldState);

/// Run `s` with sampler seed `seed`; artefacts go to `out` when given.
pub fn run_case(s: &Scenario, seed: u64, out: Option<&Path>) -> Result<RunSummary, CliError> {
    let prepared = prepare(s, seed)?;
    run_prepared(s, &prepared, seed, out, None)
}

pub fn run_prepared(s: &Scenario, prep: &Prepared, seed: u64, out: Option<&Path>, mut hook: Option<StepHook>) -> Result<RunSummary, CliError> {
    let start = Instant::now();
    if let Some(dir) = out {
        fs::create_dir_all(dir).map_err(|e| CliError::Io { path: dir.to_path_buf(), source: e })?;
    }
    let p = &prep.problem;
    let variants: Vec<(f64, f64, CoupledProblem)> = match &s.degradation_sweep {
        Some(sw) => sw
            .k
            .iter()
            .flat_map(|&k| sw.n.iter().map(move |&n| (k, n)))
            .map(|(k, n)| {
                let mut q = p.clone();
                q.material.degradation = ConductivityDegradation { k, n };
                (k, n, q)
            })
            .collect(),
        None => Vec::new(),
    };
    let mut variant_currents = vec![Vec::new(); variants.len()];
    let every = s.output.vtk_every;
    let last = prep.program.len().saturating_sub(1);
    let mut io_error: Option<CliError> = None;
    info!("{}: {} dofs, {} steps", s.name, prep.n_dofs(), prep.program.len());
    let result = run_load_program(p, &prep.program, &s.solver, |rec, state| {
        if let Some(h) = hook.as_mut() {
            h(p, rec, state);
        }
        for ((_, _, q), currents) in variants.iter().zip(variant_currents.iter_mut()) {
            let mut st = state.clone();
            settle_potential(q, &mut st)?;
            currents.push(q.electrode_currents(&q.residual(&st)?).0);
        }
        if let Some(dir) = out {
            if (every > 0 && rec.step % every == 0) || rec.step == last {
                if let Err(e) = write_fields(&dir.join(format!("fields_{:04}.vtk", rec.step)), p, state) {
                    let msg = e.to_string();
                    io_error = Some(e);
                    return Err(SolverError::InvalidInput(msg));
                }
            }
        }
        log::debug!("step {} u = {:.4e} F = {:.4e} I = {:.4e} dmax = {:.3}", rec.step, rec.load, rec.force, rec.current_in, rec.max_damage);
        Ok(())
    });
    if let Some(e) = io_error {
        return Err(e);
    }
    let (records, failure) = match result {
        Ok(h) => (h.records, None),
        Err(SolverError::Aborted { load, source, partial }) => {
            warn!("{}: solver gave up at u = {load:e}: {source}", s.name);
            if let Some(dir) = out {
                write_fields(&dir.join("fields_failed.vtk"), p, &partial.state)?;
            }
            (partial.records, Some(format!("no convergence at u = {load:e}: {source}")))
        }
        Err(e) => (Vec::new(), Some(e.to_string())),
    };
    for c in variant_currents.iter_mut() {
        c.truncate(records.len());
    }
    let (curve, r0) = curve_from_records(&records, prep.voltage);
    let (peak_force, fracture_displacement) = fracture_point(&records);
    let summary = RunSummary {
        name: s.name.clone(),
        seed,
        n_dofs: prep.n_dofs(),
        voltage: prep.voltage,
        peak_force,
        fracture_displacement,
        r0,
        curve,
        records,
        degradation: variants.iter().zip(variant_currents).map(|((k, n, _), current)| DegradationCurve { k: *k, n: *n, current }).collect(),
        wall_time: start.elapsed(),
        failure,
    };
    if let Some(dir) = out {
        write_curve(&dir.join(&s.output.curve), &summary.curve)?;
        write_summary(&dir.join(&s.output.summary), &summary)?;
        if !summary.degradation.is_empty() {
            write_degradation(&dir.join("degradation_sweep.csv"), &summary)?;
        }
    }
    Ok(summary)
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |e| CliError::Io { path: path.to_path_buf(), source: e }
}

fn csv_err(path: &Path) -> impl FnOnce(csv::Error) -> CliError + '_ {
    move |e| CliError::Csv { path: path.to_path_buf(), source: e }
}

pub fn write_fields(path: &Path, p: &CoupledProblem, state: &FieldState) -> Result<(), CliError> {
    let f = File::create(path).map_err(io_err(path))?;
    let mut w = BufWriter::new(f);
    fem_core::io::write_vtk(&mut w, &p.mesh, state, p.cache.points_per_element())?;
    w.flush().map_err(io_err(path))
}

fn opt(v: Option<f64>) -> String {
    v.map_or(String::new(), |x| format!("{x:e}"))
}

pub const CURVE_HEADER: [&str; 7] = ["step", "u_applied_m", "force_N", "current_A", "R_ohm", "dR_over_R0", "max_d"];

pub fn write_curve(path: &Path, curve: &[CurvePoint]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err(path))?;
    w.write_record(CURVE_HEADER).map_err(csv_err(path))?;
    for c in curve {
        w.write_record([
            c.step.to_string(),
            format!("{:e}", c.u_applied),
            format!("{:e}", c.force),
            format!("{:e}", c.current),
            opt(c.resistance),
            opt(c.relative_change),
            format!("{:e}", c.max_damage),
        ])
        .map_err(csv_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

fn write_degradation(path: &Path, s: &RunSummary) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err(path))?;
    w.write_record(["k", "n", "step", "u_applied_m", "current_A", "R_ohm", "dR_over_R0"]).map_err(csv_err(path))?;
    for d in &s.degradation {
        let r0 = d.current.first().and_then(|&i| resistance(s.voltage, i));
        for (c, &i) in s.curve.iter().zip(&d.current) {
            let r = resistance(s.voltage, i);
            w.write_record([
                d.k.to_string(),
                d.n.to_string(),
                c.step.to_string(),
                format!("{:e}", c.u_applied),
                format!("{i:e}"),
                opt(r),
                opt(r.zip(r0).map(|(r, r0)| (r - r0) / r0)),
            ])
            .map_err(csv_err(path))?;
        }
    }
    w.flush().map_err(io_err(path))
}

pub fn summary_text(s: &RunSummary) -> String {
    let mut t = String::new();
    let mut line = |k: &str, v: String| t.push_str(&format!("{k} = {v}\n"));
    line("name", s.name.clone());
    line("seed", s.seed.to_string());
    line("dofs", s.n_dofs.to_string());
    line("steps", s.records.len().to_string());
    line("status", s.failure.clone().unwrap_or_else(|| "completed".into()));
    line("voltage_V", format!("{:e}", s.voltage));
    line("initial_current_A", s.curve.first().map_or(String::new(), |c| format!("{:e}", c.current)));
    line("R0_ohm", opt(s.r0));
    line("peak_force_N", format!("{:e}", s.peak_force));
    line("fracture_displacement_m", opt(s.fracture_displacement));
    line("max_charge_imbalance", format!("{:e}", s.records.iter().map(|r| r.charge_imbalance()).fold(0.0, f64::max)));
    line("wall_time_s", format!("{:.3}", s.wall_time.as_secs_f64()));
    t
}

fn write_summary(path: &Path, s: &RunSummary) -> Result<(), CliError> {
    fs::write(path, summary_text(s)).map_err(io_err(path))
}

/// Directory for replicate `i` under `out`.
pub fn replicate_dir(out: &Path, i: usize) -> PathBuf {
    out.join(format!("replicate_{i:03}"))
}
