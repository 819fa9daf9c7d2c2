use std::f64::consts::PI;
use std::fs::File;
use std::io::BufReader;

use coupled_solver::{ConductivityDegradation, Constraint, CoupledProblem, Electrodes, MaterialPoint, Piezo};
use fem_core::{build_structured_mesh, random_defect_sampler, Block, DomainShape, Feature, GridSpec, Mesh};
use log::info;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::scenario::{MaterialSource, NodeSelector, RandomFeatures, Scenario};
use crate::CliError;

/// Everything needed to run a scenario once.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub problem: CoupledProblem,
    /// Applied displacement per recorded step, starting at zero.
    pub program: Vec<f64>,
    pub voltage: f64,
    /// Features placed by the sampler.
    pub sampled: Vec<Feature>,
}

/// Grid with the scenario's random features added for `seed`.
pub fn realized_grid(s: &Scenario, seed: u64) -> Result<Option<(GridSpec, Vec<Feature>)>, CliError> {
    let Some(grid) = &s.geometry.grid else { return Ok(None) };
    let mut grid = grid.clone();
    let sampled = match &s.geometry.random {
        None => Vec::new(),
        Some(RandomFeatures::Holes { region, void_fraction, radii }) => random_defect_sampler(region, *void_fraction, radii, seed)?,
        Some(RandomFeatures::SurfaceCracks { count, length, radius, z_range }) => surface_cracks(&grid, *count, *length, *radius, *z_range, seed)?,
    };
    grid.features.extend(sampled.iter().cloned());
    Ok(Some((grid, sampled)))
}

fn surface_cracks(grid: &GridSpec, count: usize, length: f64, radius: f64, z: [f64; 2], seed: u64) -> Result<Vec<Feature>, CliError> {
    let DomainShape::CylinderZ { radius: r } = grid.shape else {
        return Err(CliError::invalid("geometry.random", "surface cracks need a cylindrical domain"));
    };
    if grid.axes.len() != 3 {
        return Err(CliError::invalid("geometry.random", "surface cracks need three axes"));
    }
    if !(length > 0.0 && length < PI * r && radius > 0.0 && z[0] < z[1]) {
        return Err(CliError::invalid("geometry.random", "need 0 < length < πR, radius > 0 and an increasing z_range"));
    }
    let cx = grid.origin[0] + 0.5 * grid.axes[0].length;
    let cy = grid.origin[1] + 0.5 * grid.axes[1].length;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let on_mantle = |theta: f64, zz: f64| [cx + r * theta.cos(), cy + r * theta.sin(), zz];
    Ok((0..count)
        .map(|_| {
            let theta = rng.random_range(0.0..2.0 * PI);
            let zc = rng.random_range(z[0]..z[1]);
            // orientation in the tangent plane, measured from the hoop direction
            let psi: f64 = rng.random_range(-0.5 * PI..0.5 * PI);
            let (dt, dz) = (0.5 * length * psi.cos() / r, 0.5 * length * psi.sin());
            Feature::SeedCrack { from: on_mantle(theta - dt, zc - dz), to: on_mantle(theta + dt, zc + dz), radius }
        })
        .collect())
}

pub fn build_mesh(s: &Scenario, seed: u64) -> Result<(Mesh, Vec<Feature>), CliError> {
    match realized_grid(s, seed)? {
        Some((grid, sampled)) => Ok((build_structured_mesh(&grid)?, sampled)),
        None => {
            let path = s.geometry.mesh_file.as_ref().expect("validated");
            let f = File::open(path).map_err(|e| CliError::Io { path: path.clone(), source: e })?;
            Ok((fem_core::io::read_mesh(BufReader::new(f))?, Vec::new()))
        }
    }
}

pub fn material(s: &Scenario) -> Result<MaterialPoint, CliError> {
    let pf = &s.phase_field;
    let degradation = ConductivityDegradation { k: pf.k, n: pf.n };
    let mut m = match s.material.resolve()? {
        MaterialSource::Composite(spec) => MaterialPoint::from_spec(&spec, pf.length_scale, degradation)?,
        MaterialSource::Isotropic(iso) => {
            let mut m = MaterialPoint::isotropic(iso.young, iso.poisson, iso.g_c, pf.length_scale, iso.resistivity);
            m.degradation = degradation;
            if iso.lambda11.is_some() || iso.lambda12.is_some() {
                m.piezo = Some(Piezo { lambda11: iso.lambda11.unwrap_or(0.0), lambda12: iso.lambda12.unwrap_or(0.0) });
            }
            m
        }
    };
    m.eps_reg = pf.regularization;
    m.validate()?;
    Ok(m)
}

pub fn select(mesh: &Mesh, sel: &NodeSelector, key: &str) -> Result<Vec<usize>, CliError> {
    let nodes = match sel {
        NodeSelector::Set(name) => mesh.node_set(name).map(|s| s.to_vec()).ok_or_else(|| CliError::invalid(key, format!("no node set `{name}`")))?,
        NodeSelector::Box { lo, hi } => {
            let dim = mesh.dim();
            if lo.len() != dim || hi.len() != dim {
                return Err(CliError::invalid(key, format!("box corners need {dim} coordinates")));
            }
            let (mut a, mut b) = ([f64::NEG_INFINITY; 3], [f64::INFINITY; 3]);
            a[..dim].copy_from_slice(lo);
            b[..dim].copy_from_slice(hi);
            mesh.nodes_in_box(a, b)
        }
    };
    if nodes.is_empty() {
        return Err(CliError::invalid(key, "selects no nodes"));
    }
    Ok(nodes)
}

/// Mesh, material and boundary conditions of `s` for sampler seed `seed`.
pub fn prepare(s: &Scenario, seed: u64) -> Result<Prepared, CliError> {
    let (mesh, sampled) = build_mesh(s, seed)?;
    let dim = mesh.dim();
    let material = material(s)?;
    let mut constraints = Vec::new();
    for (i, f) in s.boundary.fixed.iter().enumerate() {
        let key = format!("boundary.fixed[{i}]");
        let nodes = select(&mesh, &f.nodes, &key)?;
        for &c in &f.components {
            if c >= dim {
                return Err(CliError::invalid(&key, format!("component {c} in a {dim}D model")));
            }
            constraints.push(Constraint::fixed(Block::Displacement, nodes.clone(), c, f.value));
        }
    }
    let load = &s.boundary.load;
    if load.component >= dim {
        return Err(CliError::invalid("boundary.load", format!("component {} in a {dim}D model", load.component)));
    }
    let loaded = select(&mesh, &load.nodes, "boundary.load")?;
    constraints.push(Constraint::loaded(Block::Displacement, loaded.clone(), load.component, 1.0));
    let (electrodes, voltage) = match &s.electrodes {
        Some(e) => {
            let driven = select(&mesh, &e.driven, "electrodes.driven")?;
            let grounded = select(&mesh, &e.grounded, "electrodes.grounded")?;
            if driven.iter().any(|v| grounded.binary_search(v).is_ok()) {
                return Err(CliError::invalid("electrodes", "driven and grounded electrodes overlap"));
            }
            (Some(Electrodes { driven, grounded, voltage: e.voltage }), e.voltage)
        }
        None => (None, 0.0),
    };
    info!(
        "{}: {} nodes, {} active elements, {} sampled features, E = {:.4e} Pa, G_c = {:.4e} J/m², ρ0 = {:.4e} Ω·m",
        s.name,
        mesh.n_nodes(),
        mesh.n_active(),
        sampled.len(),
        material.young(),
        material.g_c,
        material.rho0
    );
    let problem = CoupledProblem::new(mesh, material, constraints, electrodes, (loaded, load.component))?;
    let program = s.boundary.program.displacements()?;
    Ok(Prepared { problem, program, voltage, sampled })
}

impl Prepared {
    pub fn n_dofs(&self) -> usize {
        Block::ALL.iter().map(|&b| self.problem.dofs.n_dofs(b)).sum()
    }
}
