//! Scenario files: TOML, SI units throughout.
//!
//! ```toml
//! name = "notched_plate"
//! seed = 7                      # optional, default 0
//! replicates = 1                # optional, default 1
//!
//! [material]
//! preset = "mwcnt_epoxy"        # or a full [material.composite] table, or [material.isotropic]
//! volume_fraction = 0.01        # optional override of the filler volume fraction
//!
//! [geometry.grid]               # structured grid, see fem_core::GridSpec
//! thickness = 5e-3
//! axes = [{ length = 0.1, h = 1.25e-3 }, { length = 0.2, h = 5e-3, refine = { lo = 0.08, hi = 0.12, h = 1.25e-3 } }]
//! features = [{ type = "notch", center = [0.05, 0.1], length = 0.02, angle_deg = 0.0, mode = "geometric" }]
//!
//! [boundary]
//! fixed = [{ nodes = "ymin", components = [0, 1] }]
//! load = { nodes = "ymax", component = 1 }
//! program = { segments = [{ to = 4e-4, steps = 80 }] }
//!
//! [electrodes]
//! driven = "ymin"               # node-set name or { lo = [..], hi = [..] } box
//! grounded = "ymax"
//! voltage = 10.0
//!
//! [phase_field]
//! length_scale = 2.5e-3
//! k = 50.0                      # optional, default 50
//! n = 6.0                       # optional, default 6
//! h_ratio = 2.0                 # optional: length_scale >= h_ratio * h
//! ```
//!
//! Optional sections: `[solver]` (coupled_solver::NonlinearSolveConfig),
//! `[output]`, `[degradation_sweep]`, and `[geometry.random]` for sampled
//! holes or surface cracks.

use std::path::{Path, PathBuf};

use coupled_solver::NonlinearSolveConfig;
use elastic_homog::CompositeSpec;
use fem_core::{DefectRegion, GridSpec, RadiusDistribution};
use log::info;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "one")]
    pub replicates: usize,
    pub material: MaterialConfig,
    pub geometry: GeometryConfig,
    pub boundary: BoundaryConfig,
    #[serde(default)]
    pub electrodes: Option<ElectrodeConfig>,
    pub phase_field: PhaseFieldConfig,
    #[serde(default)]
    pub solver: NonlinearSolveConfig,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub degradation_sweep: Option<DegradationSweep>,
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Preset {
    /// MWCNT/epoxy reference material (1 vol.%).
    MwcntEpoxy,
    /// DWCNT/DGEBA tensile-specimen material (0.5 wt.%).
    DwcntDgeba,
}

/// Mass fraction with the densities used to convert it (kg/m³).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MassFraction {
    pub value: f64,
    pub filler_density: f64,
    pub matrix_density: f64,
}

/// Effective properties given directly, bypassing homogenisation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IsotropicMaterial {
    pub young: f64,
    pub poisson: f64,
    /// Critical energy release rate (J/m²).
    pub g_c: f64,
    /// Unstrained resistivity (Ω·m).
    pub resistivity: f64,
    #[serde(default)]
    pub lambda11: Option<f64>,
    #[serde(default)]
    pub lambda12: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialConfig {
    #[serde(default)]
    pub preset: Option<Preset>,
    #[serde(default)]
    pub composite: Option<CompositeSpec>,
    #[serde(default)]
    pub isotropic: Option<IsotropicMaterial>,
    #[serde(default)]
    pub volume_fraction: Option<f64>,
    #[serde(default)]
    pub mass_fraction: Option<MassFraction>,
}

/// Resolved material source.
#[derive(Debug, Clone, PartialEq)]
pub enum MaterialSource {
    Composite(CompositeSpec),
    Isotropic(IsotropicMaterial),
}

impl MaterialConfig {
    pub fn resolve(&self) -> Result<MaterialSource, CliError> {
        let given = [self.preset.is_some(), self.composite.is_some(), self.isotropic.is_some()];
        if given.iter().filter(|&&g| g).count() != 1 {
            return Err(CliError::invalid("material", "give exactly one of `preset`, `composite` or `isotropic`"));
        }
        if let Some(iso) = self.isotropic {
            if self.volume_fraction.is_some() || self.mass_fraction.is_some() {
                return Err(CliError::invalid("material", "filler fractions do not apply to `isotropic`"));
            }
            return Ok(MaterialSource::Isotropic(iso));
        }
        let mut spec = match self.preset {
            Some(Preset::MwcntEpoxy) => CompositeSpec::mwcnt_epoxy(),
            Some(Preset::DwcntDgeba) => CompositeSpec::dwcnt_dgeba(),
            None => self.composite.clone().expect("checked above"),
        };
        match (self.volume_fraction, self.mass_fraction) {
            (Some(_), Some(_)) => return Err(CliError::invalid("material", "give `volume_fraction` or `mass_fraction`, not both")),
            (Some(f), None) => spec.f_p0 = f,
            (None, Some(m)) => {
                if !(0.0..1.0).contains(&m.value) || !(m.filler_density > 0.0 && m.matrix_density > 0.0) {
                    return Err(CliError::invalid("material.mass_fraction", "need 0 <= value < 1 and positive densities"));
                }
                spec.f_p0 = elastic_homog::mass_to_volume_fraction(m.value, m.filler_density, m.matrix_density);
            }
            (None, None) => {}
        }
        spec.validate().map_err(|e| CliError::invalid("material", e.to_string()))?;
        Ok(MaterialSource::Composite(spec))
    }
}

/// Randomly placed features, drawn from the scenario seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum RandomFeatures {
    /// Circular holes until `void_fraction` of `region` is removed.
    Holes { region: DefectRegion, void_fraction: f64, radii: RadiusDistribution },
    /// Seeded cracks of length `length` on the mantle of a cylindrical domain,
    /// with centres in `z_range` and random orientation in the tangent plane.
    SurfaceCracks { count: usize, length: f64, radius: f64, z_range: [f64; 2] },
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryConfig {
    #[serde(default)]
    pub grid: Option<GridSpec>,
    /// Mesh in the plain-text format written by `mesh`.
    #[serde(default)]
    pub mesh_file: Option<PathBuf>,
    #[serde(default)]
    pub random: Option<RandomFeatures>,
}

/// Nodes picked by set name (`xmin`, `ymax`, ...) or by a closed box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NodeSelector {
    Set(String),
    Box { lo: Vec<f64>, hi: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixedCondition {
    pub nodes: NodeSelector,
    pub components: Vec<usize>,
    #[serde(default)]
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LoadedCondition {
    pub nodes: NodeSelector,
    pub component: usize,
}

/// Linear ramp from the previous end point to `to` in `steps` increments.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Segment {
    pub to: f64,
    pub steps: usize,
}

/// Applied displacement (m) at each recorded step; starts from zero.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Program {
    #[serde(default)]
    pub values: Vec<f64>,
    #[serde(default)]
    pub segments: Vec<Segment>,
}

impl Program {
    /// Displacements including the unloaded first entry.
    pub fn displacements(&self) -> Result<Vec<f64>, CliError> {
        let out = match (self.values.is_empty(), self.segments.is_empty()) {
            (false, true) => {
                let mut v = self.values.clone();
                if v[0] != 0.0 {
                    v.insert(0, 0.0);
                }
                v
            }
            (true, false) => {
                let mut v = vec![0.0];
                for s in &self.segments {
                    if s.steps == 0 {
                        return Err(CliError::invalid("boundary.program.segments", "a segment needs at least one step"));
                    }
                    let from = *v.last().unwrap();
                    v.extend((1..=s.steps).map(|i| from + (s.to - from) * i as f64 / s.steps as f64));
                }
                v
            }
            _ => return Err(CliError::invalid("boundary.program", "give either `values` or `segments`")),
        };
        if out.iter().any(|x| !x.is_finite()) {
            return Err(CliError::invalid("boundary.program", "non-finite displacement"));
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundaryConfig {
    #[serde(default)]
    pub fixed: Vec<FixedCondition>,
    pub load: LoadedCondition,
    pub program: Program,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElectrodeConfig {
    pub driven: NodeSelector,
    pub grounded: NodeSelector,
    /// Potential of the driven electrode; the grounded one is at zero (V).
    pub voltage: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhaseFieldConfig {
    /// Regularisation length (m).
    pub length_scale: f64,
    #[serde(default = "default_k")]
    pub k: f64,
    #[serde(default = "default_n")]
    pub n: f64,
    /// Required ratio of length scale to the finest target element size.
    #[serde(default = "default_h_ratio")]
    pub h_ratio: f64,
    /// Residual stiffness and conductivity of fully broken material.
    #[serde(default = "default_regularization")]
    pub regularization: f64,
}

fn default_k() -> f64 {
    50.0
}

fn default_n() -> f64 {
    6.0
}

fn default_h_ratio() -> f64 {
    2.0
}

fn default_regularization() -> f64 {
    coupled_solver::DEFAULT_REGULARIZATION
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    /// Field dump every this many steps; 0 writes the final state only.
    #[serde(default)]
    pub vtk_every: usize,
    #[serde(default = "default_curve")]
    pub curve: String,
    #[serde(default = "default_summary")]
    pub summary: String,
}

fn default_curve() -> String {
    "curve.csv".into()
}

fn default_summary() -> String {
    "summary.txt".into()
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig { vtk_every: 0, curve: default_curve(), summary: default_summary() }
    }
}

/// Conductivity-degradation shapes evaluated along the same mechanical run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DegradationSweep {
    pub k: Vec<f64>,
    pub n: Vec<f64>,
}

fn line_of(src: &str, offset: usize) -> usize {
    src[..offset.min(src.len())].bytes().filter(|&b| b == b'\n').count() + 1
}

/// Deserialize TOML text, reporting the key path and line of the first
/// schema violation.
pub fn from_toml_str<T: DeserializeOwned>(src: &str) -> Result<T, CliError> {
    let de = toml::Deserializer::parse(src).map_err(|e| CliError::Schema {
        path: String::new(),
        line: e.span().map(|s| line_of(src, s.start)),
        message: e.message().to_string(),
    })?;
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        CliError::Schema { path, line: inner.span().map(|s| line_of(src, s.start)), message: inner.message().to_string() }
    })
}

impl Scenario {
    pub fn from_toml_str(src: &str) -> Result<Self, CliError> {
        let s: Scenario = from_toml_str(src)?;
        s.validate()?;
        s.log_defaults(src);
        Ok(s)
    }

    /// Semantic checks beyond the schema.
    pub fn validate(&self) -> Result<(), CliError> {
        if self.replicates == 0 {
            return Err(CliError::invalid("replicates", "must be at least 1"));
        }
        self.material.resolve()?;
        match (&self.geometry.grid, &self.geometry.mesh_file) {
            (Some(_), None) | (None, Some(_)) => {}
            _ => return Err(CliError::invalid("geometry", "give exactly one of `grid` or `mesh_file`")),
        }
        if self.geometry.mesh_file.is_some() && self.geometry.random.is_some() {
            return Err(CliError::invalid("geometry.random", "random features need a `grid`"));
        }
        let pf = &self.phase_field;
        if !(pf.length_scale > 0.0 && pf.length_scale.is_finite()) {
            return Err(CliError::invalid("phase_field.length_scale", "must be positive"));
        }
        if !(pf.k > 0.0 && pf.n > 0.0) {
            return Err(CliError::invalid("phase_field", "k and n must be positive"));
        }
        if !(pf.h_ratio >= 1.0) {
            return Err(CliError::invalid("phase_field.h_ratio", "must be at least 1"));
        }
        if !(pf.regularization > 0.0 && pf.regularization < 1e-2) {
            return Err(CliError::invalid("phase_field.regularization", "must lie in (0, 1e-2)"));
        }
        if let Some(grid) = &self.geometry.grid {
            let h = finest_target_size(grid);
            if pf.length_scale < pf.h_ratio * h * (1.0 - 1e-9) {
                return Err(CliError::invalid(
                    "phase_field.length_scale",
                    format!("{} is below h_ratio × h = {} × {h}", pf.length_scale, pf.h_ratio),
                ));
            }
        }
        self.boundary.program.displacements()?;
        if self.boundary.fixed.iter().any(|f| f.components.is_empty()) {
            return Err(CliError::invalid("boundary.fixed", "empty component list"));
        }
        if let Some(sweep) = &self.degradation_sweep {
            if sweep.k.is_empty() || sweep.n.is_empty() || sweep.k.iter().chain(&sweep.n).any(|&v| !(v > 0.0)) {
                return Err(CliError::invalid("degradation_sweep", "k and n lists must be non-empty and positive"));
            }
        }
        self.solver.validate().map_err(|e| CliError::invalid("solver", e.to_string()))?;
        Ok(())
    }

    fn log_defaults(&self, src: &str) {
        let table: toml::Table = src.parse().unwrap_or_default();
        let has = |k: &str| table.contains_key(k);
        if !has("seed") {
            info!("seed not given; using {}", self.seed);
        }
        if !has("replicates") {
            info!("replicates not given; using {}", self.replicates);
        }
        if !has("electrodes") {
            info!("no electrodes; potential held at zero");
        }
        if !has("solver") {
            info!("solver defaults: {:?}", self.solver);
        }
        if !has("output") {
            info!("output defaults: {:?}", self.output);
        }
        let pf = table.get("phase_field").and_then(|v| v.as_table());
        for key in ["k", "n", "h_ratio", "regularization"] {
            if !pf.is_some_and(|t| t.contains_key(key)) {
                info!("phase_field.{key} defaulted");
            }
        }
        info!("phase field: {:?}", self.phase_field);
    }
}

/// Finest element size the grid asks for, taken per axis and then the
/// coarsest of those, so that every direction resolves the length scale.
pub fn finest_target_size(grid: &GridSpec) -> f64 {
    grid.axes.iter().map(|a| a.refine.map_or(a.h, |r| r.h.min(a.h))).fold(0.0, f64::max)
}

pub fn parse_scenario(path: &Path) -> Result<Scenario, CliError> {
    let src = std::fs::read_to_string(path).map_err(|e| CliError::Io { path: path.to_path_buf(), source: e })?;
    let mut s = Scenario::from_toml_str(&src)?;
    if let Some(mesh) = &s.geometry.mesh_file {
        if mesh.is_relative() {
            s.geometry.mesh_file = Some(path.parent().unwrap_or(Path::new(".")).join(mesh));
        }
    }
    Ok(s)
}
