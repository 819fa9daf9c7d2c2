use std::path::Path;

use elastic_homog::{effective_stiffness, CompositeSpec};
use electro_homog::{effective_conductivity, piezoresistivity_coeffs, ElectroOptions};
use serde::{Deserialize, Serialize};
use tensorlab::SymTensor2;

use crate::scenario::MaterialConfig;
use crate::CliError;

/// Grid of the `props` verb.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub volume_fractions: Vec<f64>,
    pub aspect_ratios: Vec<f64>,
}

/// Input file of the `props` verb.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PropsFile {
    pub material: MaterialConfig,
    pub sweep: SweepConfig,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropertyRow {
    pub f_p: f64,
    pub aspect_ratio: f64,
    pub e_eff: f64,
    pub g_c: f64,
    /// Mean principal conductivity (S/m).
    pub sigma_eff: f64,
    pub lambda11: f64,
    pub f_c: f64,
}

/// Trend checks over the grid; each is true when it holds on every line of
/// the grid with at least two points.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SweepFlags {
    pub e_increasing_in_f: bool,
    pub g_c_increasing_in_f: bool,
    pub f_c_decreasing_in_ar: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropertyTable {
    /// Aspect-ratio-major: all fractions of the first aspect ratio first.
    pub rows: Vec<PropertyRow>,
    pub n_fractions: usize,
    pub flags: SweepFlags,
}

fn strictly(values: impl Iterator<Item = f64>, increasing: bool) -> bool {
    let v: Vec<f64> = values.collect();
    v.windows(2).all(|w| if increasing { w[1] > w[0] } else { w[1] < w[0] })
}

pub fn property_sweep(spec: &CompositeSpec, fractions: &[f64], aspect_ratios: &[f64]) -> Result<PropertyTable, CliError> {
    if fractions.is_empty() || aspect_ratios.is_empty() {
        return Err(CliError::invalid("sweep", "empty grid"));
    }
    if let Some(f) = fractions.iter().find(|f| !(0.0..=0.1).contains(*f)) {
        return Err(CliError::invalid("sweep.volume_fractions", format!("{f} outside [0, 0.1]")));
    }
    if let Some(a) = aspect_ratios.iter().find(|a| !(50.0..=1000.0).contains(*a)) {
        return Err(CliError::invalid("sweep.aspect_ratios", format!("{a} outside [50, 1000]")));
    }
    let mut fs = fractions.to_vec();
    fs.sort_by(f64::total_cmp);
    fs.dedup();
    let mut ars = aspect_ratios.to_vec();
    ars.sort_by(f64::total_cmp);
    ars.dedup();
    let mut rows = Vec::with_capacity(fs.len() * ars.len());
    for &ar in &ars {
        for &f in &fs {
            let mut s = spec.clone().with_volume_fraction(f);
            s.l_cnt = ar * s.d_cnt;
            let el = effective_stiffness(&s)?;
            let cond = effective_conductivity(&s, &SymTensor2::ZERO, &ElectroOptions::default())?;
            let lambda11 = if f > 0.0 { piezoresistivity_coeffs(&s)?.lambda11 } else { 0.0 };
            rows.push(PropertyRow {
                f_p: f,
                aspect_ratio: ar,
                e_eff: el.e_eff,
                g_c: el.g_c,
                sigma_eff: cond.scalar_conductivity(),
                lambda11,
                f_c: cond.f_c,
            });
        }
    }
    let nf = fs.len();
    let by_ar = |k: usize| &rows[k * nf..(k + 1) * nf];
    let flags = SweepFlags {
        e_increasing_in_f: (0..ars.len()).all(|k| strictly(by_ar(k).iter().map(|r| r.e_eff), true)),
        g_c_increasing_in_f: (0..ars.len()).all(|k| strictly(by_ar(k).iter().map(|r| r.g_c), true)),
        f_c_decreasing_in_ar: (0..nf).all(|i| strictly((0..ars.len()).map(|k| rows[k * nf + i].f_c), false)),
    };
    Ok(PropertyTable { rows, n_fractions: nf, flags })
}

pub fn write_property_table(path: &Path, t: &PropertyTable) -> Result<(), CliError> {
    let err = |e: csv::Error| CliError::Csv { path: path.to_path_buf(), source: e };
    let mut w = csv::Writer::from_path(path).map_err(err)?;
    w.write_record(["f_p", "aspect_ratio", "E_eff_Pa", "G_c_J_m2", "sigma_eff_S_m", "lambda11", "f_c"]).map_err(err)?;
    for r in &t.rows {
        w.write_record([r.f_p, r.aspect_ratio, r.e_eff, r.g_c, r.sigma_eff, r.lambda11, r.f_c].map(|v| format!("{v:e}"))).map_err(err)?;
    }
    w.flush().map_err(|e| CliError::Io { path: path.to_path_buf(), source: e })
}
