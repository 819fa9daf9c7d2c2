use std::path::Path;

use log::warn;
use rayon::prelude::*;

use crate::run::{replicate_dir, run_case, RunSummary};
use crate::scenario::Scenario;
use crate::CliError;

/// Outcome of one replicate: its summary, or why it could not start.
#[derive(Debug, Clone, PartialEq)]
pub struct Replicate {
    pub index: usize,
    pub seed: u64,
    pub result: Result<RunSummary, String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HistogramBin {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    pub replicates: Vec<Replicate>,
    pub histogram: Vec<HistogramBin>,
    /// Mean over replicates of (u, force, ΔR/R0) at each step, using the
    /// replicates that reached it.
    pub mean_curve: Vec<(f64, f64, f64)>,
}

impl Ensemble {
    pub fn fracture_displacements(&self) -> Vec<f64> {
        self.replicates.iter().filter_map(|r| r.result.as_ref().ok()).filter_map(|s| s.fracture_displacement).collect()
    }
}

/// Equal-width bins over the data range, `ceil(√n)` of them; a single bin
/// when all values coincide.
pub fn histogram(values: &[f64]) -> Vec<HistogramBin> {
    if values.is_empty() {
        return Vec::new();
    }
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if lo == hi {
        return vec![HistogramBin { lo, hi, count: values.len() }];
    }
    let n = (values.len() as f64).sqrt().ceil() as usize;
    let w = (hi - lo) / n as f64;
    let mut bins: Vec<HistogramBin> = (0..n).map(|i| HistogramBin { lo: lo + i as f64 * w, hi: if i + 1 == n { hi } else { lo + (i + 1) as f64 * w }, count: 0 }).collect();
    for &v in values {
        let i = (((v - lo) / w) as usize).min(n - 1);
        bins[i].count += 1;
    }
    bins
}

/// Seed of replicate `i`.
pub fn replicate_seed(base: u64, i: usize) -> u64 {
    base.wrapping_add(i as u64)
}

/// Independent seeded replicates of `s`; failures are recorded and the
/// ensemble carries on.
pub fn monte_carlo(s: &Scenario, replicates: usize, base_seed: u64, out: Option<&Path>) -> Result<Ensemble, CliError> {
    if replicates == 0 {
        return Err(CliError::invalid("replicates", "must be at least 1"));
    }
    let reps: Vec<Replicate> = (0..replicates)
        .into_par_iter()
        .map(|i| {
            let seed = replicate_seed(base_seed, i);
            let dir = out.map(|o| replicate_dir(o, i));
            let result = run_case(s, seed, dir.as_deref()).map_err(|e| e.to_string());
            match &result {
                Err(e) => warn!("replicate {i} (seed {seed}) could not run: {e}"),
                Ok(r) if !r.completed() => warn!("replicate {i} (seed {seed}) stopped early"),
                Ok(_) => {}
            }
            Replicate { index: i, seed, result }
        })
        .collect();
    let mut ens = Ensemble { replicates: reps, histogram: Vec::new(), mean_curve: Vec::new() };
    ens.histogram = histogram(&ens.fracture_displacements());
    let runs: Vec<&RunSummary> = ens.replicates.iter().filter_map(|r| r.result.as_ref().ok()).collect();
    let steps = runs.iter().map(|r| r.curve.len()).max().unwrap_or(0);
    for k in 0..steps {
        let pts: Vec<_> = runs.iter().filter_map(|r| r.curve.get(k)).collect();
        let m = pts.len() as f64;
        let rel: Vec<f64> = pts.iter().filter_map(|c| c.relative_change).collect();
        let rel_mean = if rel.is_empty() { f64::NAN } else { rel.iter().sum::<f64>() / rel.len() as f64 };
        ens.mean_curve.push((pts.iter().map(|c| c.u_applied).sum::<f64>() / m, pts.iter().map(|c| c.force).sum::<f64>() / m, rel_mean));
    }
    if let Some(dir) = out {
        write_ensemble(dir, &ens)?;
    }
    Ok(ens)
}

fn write_ensemble(dir: &Path, e: &Ensemble) -> Result<(), CliError> {
    let csv_err = |p: &Path| {
        let p = p.to_path_buf();
        move |e: csv::Error| CliError::Csv { path: p, source: e }
    };
    let p = dir.join("ensemble.csv");
    let mut w = csv::Writer::from_path(&p).map_err(csv_err(&p))?;
    w.write_record(["replicate", "seed", "status", "peak_force_N", "fracture_displacement_m", "R0_ohm"]).map_err(csv_err(&p))?;
    for r in &e.replicates {
        let row = match &r.result {
            Ok(s) => [
                r.index.to_string(),
                r.seed.to_string(),
                s.failure.clone().unwrap_or_else(|| "completed".into()),
                format!("{:e}", s.peak_force),
                s.fracture_displacement.map_or(String::new(), |v| format!("{v:e}")),
                s.r0.map_or(String::new(), |v| format!("{v:e}")),
            ],
            Err(msg) => [r.index.to_string(), r.seed.to_string(), msg.clone(), String::new(), String::new(), String::new()],
        };
        w.write_record(row).map_err(csv_err(&p))?;
    }
    w.flush().map_err(|err| CliError::Io { path: p.clone(), source: err })?;

    let p = dir.join("histogram.csv");
    let mut w = csv::Writer::from_path(&p).map_err(csv_err(&p))?;
    w.write_record(["bin_lo_m", "bin_hi_m", "count"]).map_err(csv_err(&p))?;
    for b in &e.histogram {
        w.write_record([format!("{:e}", b.lo), format!("{:e}", b.hi), b.count.to_string()]).map_err(csv_err(&p))?;
    }
    w.flush().map_err(|err| CliError::Io { path: p.clone(), source: err })?;

    let p = dir.join("mean_curve.csv");
    let mut w = csv::Writer::from_path(&p).map_err(csv_err(&p))?;
    w.write_record(["u_applied_m", "mean_force_N", "mean_dR_over_R0"]).map_err(csv_err(&p))?;
    for (u, f, r) in &e.mean_curve {
        w.write_record([format!("{u:e}"), format!("{f:e}"), if r.is_nan() { String::new() } else { format!("{r:e}") }]).map_err(csv_err(&p))?;
    }
    w.flush().map_err(|err| CliError::Io { path: p.clone(), source: err })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn histogram_counts_everything() {
        let v = [1.0, 1.5, 2.0, 2.2, 3.0, 3.0, 4.0];
        let h = histogram(&v);
        assert_eq!(h.len(), 3);
        assert_eq!(h.iter().map(|b| b.count).sum::<usize>(), v.len());
        assert_eq!(h[0].lo, 1.0);
        assert_eq!(h.last().unwrap().hi, 4.0);
    }

    #[test]
    fn single_value_is_degenerate() {
        let h = histogram(&[2.0]);
        assert_eq!(h, vec![HistogramBin { lo: 2.0, hi: 2.0, count: 1 }]);
    }
}
