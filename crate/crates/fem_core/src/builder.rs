use serde::{Deserialize, Serialize};

use crate::mesh::{ElementKind, Mesh};
use crate::FemError;

/// Node set collecting the nodes of seeded cracks (initial damage one).
pub const SEEDED_DAMAGE: &str = "seeded_damage";

/// Optional band `[lo, hi]` (absolute coordinates) meshed with the finer size `h`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Refinement {
    pub lo: f64,
    pub hi: f64,
    pub h: f64,
}

/// One grid direction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisSpec {
    pub length: f64,
    /// Element size outside the refinement band.
    pub h: f64,
    #[serde(default)]
    pub refine: Option<Refinement>,
}

impl AxisSpec {
    pub fn uniform(length: f64, h: f64) -> Self {
        AxisSpec { length, h, refine: None }
    }

    /// Grid coordinates from `origin`, with each segment split into equal
    /// intervals no longer than its target size.
    pub fn coordinates(&self, origin: f64) -> Result<Vec<f64>, FemError> {
        if !(self.length.is_finite() && self.length > 0.0) {
            return Err(FemError::InvalidSpec(format!("axis length {}", self.length)));
        }
        if !(self.h.is_finite() && self.h > 0.0) {
            return Err(FemError::InvalidSpec(format!("element size {}", self.h)));
        }
        let end = origin + self.length;
        let mut breaks = vec![(origin, self.h)];
        if let Some(r) = self.refine {
            if !(r.h > 0.0 && r.h <= self.h && r.lo < r.hi) {
                return Err(FemError::InvalidSpec(format!("refinement band [{}, {}] with size {}", r.lo, r.hi, r.h)));
            }
            let (lo, hi) = (r.lo.max(origin), r.hi.min(end));
            if lo < hi {
                if lo > origin {
                    breaks.push((lo, r.h));
                } else {
                    breaks[0].1 = r.h;
                }
                if hi < end {
                    breaks.push((hi, self.h));
                }
            }
        }
        let mut out = vec![origin];
        for (k, &(a, size)) in breaks.iter().enumerate() {
            let b = breaks.get(k + 1).map_or(end, |n| n.0);
            let n = ((b - a) / size - 1e-9).ceil().max(1.0) as usize;
            for i in 1..=n {
                out.push(if i == n { b } else { a + (b - a) * i as f64 / n as f64 });
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum DomainShape {
    Box,
    /// Circular cross-section about the grid centre line along z.
    CylinderZ { radius: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NotchMode {
    /// Stair-cased slit of removed elements.
    Geometric,
    /// Nodes along the slit start fully damaged.
    Seeded,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum Feature {
    /// Circular hole in the xy-plane, through the whole thickness.
    Hole { center: [f64; 2], radius: f64 },
    /// Straight slit in the xy-plane; `angle_deg` from the x-axis.
    Notch { center: [f64; 2], length: f64, angle_deg: f64, mode: NotchMode },
    /// Capsule of initial damage around the segment `from`–`to`.
    SeedCrack { from: [f64; 3], to: [f64; 3], radius: f64 },
}

impl Feature {
    fn name(&self) -> &'static str {
        match self {
            Feature::Hole { .. } => "hole",
            Feature::Notch { .. } => "notch",
            Feature::SeedCrack { .. } => "seed crack",
        }
    }
}

/// Structured grid: two axes give quadrilaterals, three give hexahedra.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    #[serde(default)]
    pub origin: [f64; 3],
    pub axes: Vec<AxisSpec>,
    /// Out-of-plane thickness of 2D grids (m).
    #[serde(default = "unit")]
    pub thickness: f64,
    #[serde(default = "box_shape")]
    pub shape: DomainShape,
    #[serde(default)]
    pub features: Vec<Feature>,
}

fn unit() -> f64 {
    1.0
}

fn box_shape() -> DomainShape {
    DomainShape::Box
}

impl GridSpec {
    pub fn rectangle(width: f64, height: f64, h: f64, thickness: f64) -> Self {
        GridSpec {
            origin: [0.0; 3],
            axes: vec![AxisSpec::uniform(width, h), AxisSpec::uniform(height, h)],
            thickness,
            shape: DomainShape::Box,
            features: Vec::new(),
        }
    }
}

/// Interval size of the grid line list `c` around `x`.
fn local_size(c: &[f64], x: f64) -> f64 {
    let i = c.partition_point(|&v| v <= x).clamp(1, c.len() - 1);
    c[i] - c[i - 1]
}

fn inside(c: &[f64], x: f64) -> bool {
    let tol = 1e-12 * (c[c.len() - 1] - c[0]);
    x >= c[0] - tol && x <= c[c.len() - 1] + tol
}

/// Parameter interval of the segment `p + t (q − p)`, t ∈ [0, 1], inside a box.
fn clip(p: [f64; 2], q: [f64; 2], lo: [f64; 2], hi: [f64; 2]) -> Option<(f64, f64)> {
    let (mut t0, mut t1) = (0.0_f64, 1.0_f64);
    for k in 0..2 {
        let d = q[k] - p[k];
        if d == 0.0 {
            if p[k] < lo[k] || p[k] > hi[k] {
                return None;
            }
            continue;
        }
        let (a, b) = ((lo[k] - p[k]) / d, (hi[k] - p[k]) / d);
        t0 = t0.max(a.min(b));
        t1 = t1.min(a.max(b));
    }
    (t1 > t0).then_some((t0, t1))
}

fn segment_distance(x: [f64; 3], a: [f64; 3], b: [f64; 3]) -> f64 {
    let ab: Vec<f64> = (0..3).map(|k| b[k] - a[k]).collect();
    let len2: f64 = ab.iter().map(|v| v * v).sum();
    let t = if len2 > 0.0 { ((0..3).map(|k| (x[k] - a[k]) * ab[k]).sum::<f64>() / len2).clamp(0.0, 1.0) } else { 0.0 };
    (0..3).map(|k| (x[k] - a[k] - t * ab[k]).powi(2)).sum::<f64>().sqrt()
}

fn notch_ends(center: [f64; 2], length: f64, angle_deg: f64) -> ([f64; 2], [f64; 2]) {
    let (s, c) = angle_deg.to_radians().sin_cos();
    let half = 0.5 * length;
    ([center[0] - half * c, center[1] - half * s], [center[0] + half * c, center[1] + half * s])
}

/// Build the structured mesh of `spec`: x-fastest numbering, counter-clockwise
/// quadrilaterals, hexahedra as bottom then top face. Holes and the cylinder
/// outline remove elements by centroid; notches and seed cracks act as set out
/// in [`Feature`]. Face node sets `xmin`, `xmax`, ... are added for the grid
/// bounds.
pub fn build_structured_mesh(spec: &GridSpec) -> Result<Mesh, FemError> {
    let dim = spec.axes.len();
    if !(dim == 2 || dim == 3) {
        return Err(FemError::InvalidSpec(format!("{dim} axes; expected 2 or 3")));
    }
    let coords: Vec<Vec<f64>> = spec.axes.iter().enumerate().map(|(k, a)| a.coordinates(spec.origin[k])).collect::<Result<_, _>>()?;
    let n: Vec<usize> = coords.iter().map(|c| c.len()).collect();
    let nz = if dim == 3 { n[2] } else { 1 };
    let mut nodes = Vec::with_capacity(n[0] * n[1] * nz);
    for k in 0..nz {
        for j in 0..n[1] {
            for i in 0..n[0] {
                let z = if dim == 3 { coords[2][k] } else { 0.0 };
                nodes.push([coords[0][i], coords[1][j], z]);
            }
        }
    }
    let id = |i: usize, j: usize, k: usize| i + n[0] * (j + n[1] * k);
    let (ex, ey, ez) = (n[0] - 1, n[1] - 1, if dim == 3 { n[2] - 1 } else { 1 });
    let mut conn = Vec::new();
    for k in 0..ez {
        for j in 0..ey {
            for i in 0..ex {
                let face = |k| [id(i, j, k), id(i + 1, j, k), id(i + 1, j + 1, k), id(i, j + 1, k)];
                conn.extend(face(k));
                if dim == 3 {
                    conn.extend(face(k + 1));
                }
            }
        }
    }
    let kind = if dim == 2 { ElementKind::Quad4 } else { ElementKind::Hex8 };
    let thickness = if dim == 2 { spec.thickness } else { 1.0 };
    let mut mesh = Mesh::new(kind, nodes, conn, thickness)?;
    let cell = |e: usize| (e % ex, (e / ex) % ey);
    let mid = [0.5 * (coords[0][0] + coords[0][ex]), 0.5 * (coords[1][0] + coords[1][ey])];

    if let DomainShape::CylinderZ { radius } = spec.shape {
        if dim != 3 {
            return Err(FemError::InvalidSpec("cylindrical domain needs three axes".into()));
        }
        let h = spec.axes[0].h.max(spec.axes[1].h);
        if 2.0 * radius < 2.0 * h {
            return Err(FemError::FeatureTooSmall { feature: "cylinder", size: 2.0 * radius, h });
        }
        for e in 0..mesh.n_elements() {
            let c = mesh.centroid(e);
            if (c[0] - mid[0]).hypot(c[1] - mid[1]) > radius {
                mesh.active[e] = false;
            }
        }
    }

    let mut seeded = Vec::new();
    for f in &spec.features {
        match *f {
            Feature::Hole { center, radius } => {
                if !(inside(&coords[0], center[0]) && inside(&coords[1], center[1])) {
                    return Err(FemError::FeatureOutside("hole"));
                }
                let h = local_size(&coords[0], center[0]).max(local_size(&coords[1], center[1]));
                if !(2.0 * radius >= 2.0 * h) {
                    return Err(FemError::FeatureTooSmall { feature: "hole", size: 2.0 * radius, h });
                }
                for e in 0..mesh.n_elements() {
                    let c = mesh.centroid(e);
                    if (c[0] - center[0]).hypot(c[1] - center[1]) < radius {
                        mesh.active[e] = false;
                    }
                }
            }
            Feature::Notch { center, length, angle_deg, mode } => {
                let (p, q) = notch_ends(center, length, angle_deg);
                if ![p, q].iter().all(|x| inside(&coords[0], x[0]) && inside(&coords[1], x[1])) {
                    return Err(FemError::FeatureOutside("notch"));
                }
                let h = local_size(&coords[0], center[0]).max(local_size(&coords[1], center[1]));
                if !(length >= 2.0 * h) {
                    return Err(FemError::FeatureTooSmall { feature: "notch", size: length, h });
                }
                match mode {
                    NotchMode::Geometric => {
                        for e in 0..mesh.n_elements() {
                            let (i, j) = cell(e);
                            let lo = [coords[0][i], coords[1][j]];
                            let hi = [coords[0][i + 1], coords[1][j + 1]];
                            if let Some((t0, t1)) = clip(p, q, lo, hi) {
                                // half-open ownership so a slit on a grid line removes one row
                                let t = 0.5 * (t0 + t1);
                                let m = [p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])];
                                if (0..2).all(|k| m[k] >= lo[k] && (m[k] < hi[k] || hi[k] == coords[k][coords[k].len() - 1])) {
                                    mesh.active[e] = false;
                                }
                            }
                        }
                    }
                    NotchMode::Seeded => {
                        let (a, b) = ([p[0], p[1], 0.0], [q[0], q[1], 0.0]);
                        for (v, x) in mesh.nodes.iter().enumerate() {
                            let tol = 0.5 * local_size(&coords[0], x[0]).max(local_size(&coords[1], x[1]));
                            if segment_distance([x[0], x[1], 0.0], a, b) <= tol * (1.0 + 1e-9) {
                                seeded.push(v);
                            }
                        }
                    }
                }
            }
            Feature::SeedCrack { from, to, radius } => {
                let in_box = |x: &[f64; 3]| (0..dim).all(|k| inside(&coords[k], x[k]));
                if !(in_box(&from) && in_box(&to)) {
                    return Err(FemError::FeatureOutside("seed crack"));
                }
                let length = segment_distance(from, to, to);
                let h = (0..dim).map(|k| local_size(&coords[k], from[k])).fold(0.0, f64::max);
                if !(length >= 2.0 * h) {
                    return Err(FemError::FeatureTooSmall { feature: "seed crack", size: length, h });
                }
                if !(radius > 0.0) {
                    return Err(FemError::InvalidSpec(format!("seed crack radius {radius}")));
                }
                let before = seeded.len();
                seeded.extend(mesh.nodes.iter().enumerate().filter(|(_, x)| segment_distance(**x, from, to) <= radius).map(|(v, _)| v));
                if seeded.len() == before {
                    return Err(FemError::InvalidSpec(format!("{} captures no nodes; increase its radius", f.name())));
                }
            }
        }
    }
    if mesh.n_active() == 0 {
        return Err(FemError::InvalidSpec("features remove every element".into()));
    }

    let used = mesh.used_nodes();
    seeded.retain(|&v| used[v]);
    if !seeded.is_empty() {
        mesh.set_node_set(SEEDED_DAMAGE, seeded)?;
    }
    let names = [("xmin", "xmax"), ("ymin", "ymax"), ("zmin", "zmax")];
    for k in 0..dim {
        let (lo_v, hi_v) = (coords[k][0], coords[k][coords[k].len() - 1]);
        let tol = 1e-9 * (hi_v - lo_v);
        for (name, at) in [(names[k].0, lo_v), (names[k].1, hi_v)] {
            let set: Vec<usize> = (0..mesh.n_nodes()).filter(|&v| used[v] && (mesh.nodes[v][k] - at).abs() <= tol).collect();
            if !set.is_empty() {
                mesh.set_node_set(name, set)?;
            }
        }
    }
    Ok(mesh)
}
