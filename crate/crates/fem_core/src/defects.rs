use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::builder::Feature;
use crate::FemError;

const MAX_DRAWS: usize = 1_000_000;

/// Axis-aligned rectangle receiving the hole centres.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DefectRegion {
    pub lo: [f64; 2],
    pub hi: [f64; 2],
}

impl DefectRegion {
    pub fn area(&self) -> f64 {
        (self.hi[0] - self.lo[0]) * (self.hi[1] - self.lo[1])
    }
}

/// Normal radius law truncated below at `min_radius` (m).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RadiusDistribution {
    pub mean: f64,
    pub std_dev: f64,
    #[serde(default = "default_min_radius")]
    pub min_radius: f64,
}

fn default_min_radius() -> f64 {
    0.25e-3
}

impl Default for RadiusDistribution {
    fn default() -> Self {
        RadiusDistribution { mean: 2e-3, std_dev: 1.2e-3, min_radius: default_min_radius() }
    }
}

/// Holes with centres uniform in `region` and truncated-normal radii, drawn
/// until their summed area reaches `void_fraction` of the region area.
pub fn random_defect_sampler(
    region: &DefectRegion,
    void_fraction: f64,
    radii: &RadiusDistribution,
    seed: u64,
) -> Result<Vec<Feature>, FemError> {
    if !(region.hi[0] > region.lo[0] && region.hi[1] > region.lo[1]) {
        return Err(FemError::InvalidSpec("empty defect region".into()));
    }
    if !(0.0..0.1).contains(&void_fraction) {
        return Err(FemError::InvalidSpec(format!("void fraction {void_fraction} outside [0, 0.1)")));
    }
    if !(radii.min_radius > 0.0) {
        return Err(FemError::InvalidSpec(format!("minimum radius {}", radii.min_radius)));
    }
    let normal = Normal::new(radii.mean, radii.std_dev).map_err(|e| FemError::InvalidSpec(format!("radius law: {e}")))?;
    let target = void_fraction * region.area();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut holes = Vec::new();
    let mut area = 0.0;
    let mut draws = 0;
    while area < target {
        if draws == MAX_DRAWS {
            return Err(FemError::SamplerExhausted { target, reached: area, attempts: draws });
        }
        draws += 1;
        let r = normal.sample(&mut rng);
        if r < radii.min_radius {
            continue;
        }
        let x = rng.random_range(region.lo[0]..region.hi[0]);
        let y = rng.random_range(region.lo[1]..region.hi[1]);
        holes.push(Feature::Hole { center: [x, y], radius: r });
        area += std::f64::consts::PI * r * r;
    }
    Ok(holes)
}
