use nalgebra::DMatrix;
use rayon::prelude::*;

use fem_core::builder::SEEDED_DAMAGE;
use fem_core::{Block, DofMap, FieldState, IntegrationCache, Mesh, SkylineMatrix};

use crate::element::{evaluate_element, point_energies, ElementContext, ElementFields, ElementOutput};
use crate::material::MaterialPoint;
use crate::SolverError;

/// Elements evaluated per parallel batch before the ordered reduction.
const BATCH: usize = 512;

/// Dirichlet condition on one component of a node list. A `loaded`
/// condition takes the value `value × load`.
#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub block: Block,
    pub nodes: Vec<usize>,
    pub comp: usize,
    pub value: f64,
    pub loaded: bool,
}

impl Constraint {
    pub fn fixed(block: Block, nodes: Vec<usize>, comp: usize, value: f64) -> Self {
        Constraint { block, nodes, comp, value, loaded: false }
    }

    pub fn loaded(block: Block, nodes: Vec<usize>, comp: usize, scale: f64) -> Self {
        Constraint { block, nodes, comp, value: scale, loaded: true }
    }

    fn at(&self, load: f64) -> f64 {
        if self.loaded {
            self.value * load
        } else {
            self.value
        }
    }
}

/// Potential patches: `voltage` on `driven`, zero on `grounded`.
#[derive(Debug, Clone, PartialEq)]
pub struct Electrodes {
    pub driven: Vec<usize>,
    pub grounded: Vec<usize>,
    pub voltage: f64,
}

/// Nodal residual arrays laid out like the [`FieldState`] fields; rows of
/// constrained dofs hold the reactions.
#[derive(Debug, Clone, PartialEq)]
pub struct NodalResidual {
    pub u: Vec<f64>,
    pub phi: Vec<f64>,
    pub d: Vec<f64>,
}

impl NodalResidual {
    pub fn block(&self, b: Block) -> &[f64] {
        match b {
            Block::Displacement => &self.u,
            Block::Potential => &self.phi,
            Block::Damage => &self.d,
        }
    }
}

/// Discretised coupled problem: mesh, integration data, dof numbering,
/// material and boundary conditions.
#[derive(Debug, Clone)]
pub struct CoupledProblem {
    pub mesh: Mesh,
    pub cache: IntegrationCache,
    pub dofs: DofMap,
    pub material: MaterialPoint,
    elasticity: DMatrix<f64>,
    constraints: Vec<Constraint>,
    pub electrodes: Option<Electrodes>,
    /// Nodes and component whose reactions make up the reported force.
    pub reaction: (Vec<usize>, usize),
}

pub(crate) fn block_field(state: &FieldState, b: Block) -> &[f64] {
    match b {
        Block::Displacement => &state.u,
        Block::Potential => &state.phi,
        Block::Damage => &state.d,
    }
}

pub(crate) fn block_field_mut(state: &mut FieldState, b: Block) -> &mut Vec<f64> {
    match b {
        Block::Displacement => &mut state.u,
        Block::Potential => &mut state.phi,
        Block::Damage => &mut state.d,
    }
}

impl CoupledProblem {
    /// Nodes of the mesh set `seeded_damage` start, and stay, fully damaged.
    pub fn new(
        mesh: Mesh,
        material: MaterialPoint,
        mut constraints: Vec<Constraint>,
        electrodes: Option<Electrodes>,
        reaction: (Vec<usize>, usize),
    ) -> Result<Self, SolverError> {
        material.validate()?;
        let dim = mesh.dim();
        let n = mesh.n_nodes();
        if let Some(el) = &electrodes {
            if el.driven.is_empty() || el.grounded.is_empty() {
                return Err(SolverError::InvalidInput("electrode without nodes".into()));
            }
            if el.driven.iter().any(|v| el.grounded.contains(v)) {
                return Err(SolverError::InvalidInput("electrodes overlap".into()));
            }
            constraints.push(Constraint::fixed(Block::Potential, el.driven.clone(), 0, el.voltage));
            constraints.push(Constraint::fixed(Block::Potential, el.grounded.clone(), 0, 0.0));
        }
        if electrodes.is_none() {
            // without electrodes the potential has no datum; pin it to zero
            constraints.push(Constraint::fixed(Block::Potential, (0..n).collect(), 0, 0.0));
        }
        if let Some(seed) = mesh.node_set(SEEDED_DAMAGE) {
            constraints.push(Constraint::fixed(Block::Damage, seed.to_vec(), 0, 1.0));
        }
        let cache = IntegrationCache::new(&mesh)?;
        let mut dofs = DofMap::new(&mesh);
        for c in &constraints {
            let comps = if c.block == Block::Displacement { dim } else { 1 };
            if c.comp >= comps || c.nodes.iter().any(|&v| v >= n) {
                return Err(SolverError::InvalidInput(format!("constraint on {} component {}", c.block.name(), c.comp)));
            }
            dofs.fix(c.block, &c.nodes, c.comp);
        }
        if reaction.1 >= dim || reaction.0.iter().any(|&v| v >= n) {
            return Err(SolverError::InvalidInput("reaction nodes".into()));
        }
        let elasticity = material.elasticity(dim);
        Ok(CoupledProblem { mesh, cache, dofs, material, elasticity, constraints, electrodes, reaction })
    }

    pub fn dim(&self) -> usize {
        self.mesh.dim()
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    fn context(&self) -> ElementContext<'_> {
        ElementContext { dim: self.dim(), nen: self.mesh.kind.nodes_per_element(), material: &self.material, elasticity: &self.elasticity }
    }

    /// Unloaded state with the fixed constraint values applied.
    pub fn initial_state(&self) -> FieldState {
        let mut s = FieldState::zeros(&self.mesh, self.cache.n_points());
        self.apply_constraints(&mut s, 0.0);
        s
    }

    pub fn apply_constraints(&self, state: &mut FieldState, load: f64) {
        for c in &self.constraints {
            let comps = if c.block == Block::Displacement { self.dim() } else { 1 };
            let field = block_field_mut(state, c.block);
            let v = c.at(load);
            for &node in &c.nodes {
                field[node * comps + c.comp] = v;
            }
        }
    }

    fn gather_element(&self, state: &FieldState, slot: usize) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let dim = self.dim();
        let nodes = self.mesh.element(self.cache.elements()[slot]);
        let u = nodes.iter().flat_map(|&v| (0..dim).map(move |c| state.u[v * dim + c])).collect();
        let phi = nodes.iter().map(|&v| state.phi[v]).collect();
        let d = nodes.iter().map(|&v| state.d[v]).collect();
        (u, phi, d)
    }

    /// Element outputs in cache order, batch-parallel, folded in order by `fold`.
    fn for_each_element(
        &self,
        state: &FieldState,
        stiffness: bool,
        mut fold: impl FnMut(usize, ElementOutput),
    ) -> Result<(), SolverError> {
        let ctx = self.context();
        let npe = self.cache.points_per_element();
        let n = self.cache.elements().len();
        for start in (0..n).step_by(BATCH) {
            let end = (start + BATCH).min(n);
            let outs: Vec<ElementOutput> = (start..end)
                .into_par_iter()
                .map(|slot| {
                    let (u, phi, d) = self.gather_element(state, slot);
                    let history = &state.history[slot * npe..(slot + 1) * npe];
                    let fields = ElementFields { u: &u, phi: &phi, d: &d, history };
                    evaluate_element(&ctx, &self.cache, slot, &fields, stiffness)
                })
                .collect::<Result<_, _>>()?;
            for (k, out) in outs.into_iter().enumerate() {
                fold(start + k, out);
            }
        }
        Ok(())
    }

    pub fn residual(&self, state: &FieldState) -> Result<NodalResidual, SolverError> {
        let dim = self.dim();
        let n = self.mesh.n_nodes();
        let mut r = NodalResidual { u: vec![0.0; n * dim], phi: vec![0.0; n], d: vec![0.0; n] };
        self.for_each_element(state, false, |slot, out| {
            for (a, &v) in self.mesh.element(self.cache.elements()[slot]).iter().enumerate() {
                for c in 0..dim {
                    r.u[v * dim + c] += out.r_u[a * dim + c];
                }
                r.phi[v] += out.r_phi[a];
                r.d[v] += out.r_d[a];
            }
        })?;
        Ok(r)
    }

    /// Free-dof profile matrices of the three diagonal blocks.
    pub fn stiffness(&self, state: &FieldState) -> Result<[SkylineMatrix; 3], SolverError> {
        let mut mats = Block::ALL.iter().map(|&b| SkylineMatrix::new(self.dofs.free_profile(b, &self.mesh))).collect::<Result<Vec<_>, _>>()?;
        let elems: Vec<[Vec<Option<usize>>; 3]> = (0..self.cache.elements().len())
            .map(|slot| {
                let e = self.cache.elements()[slot];
                Block::ALL.map(|b| self.dofs.element_dofs(b, &self.mesh, e).into_iter().map(|i| self.dofs.free_index(b, i)).collect())
            })
            .collect();
        self.for_each_element(state, true, |slot, out| {
            let blocks = [out.k_u.unwrap(), out.k_phi.unwrap(), out.k_d.unwrap()];
            for (bi, ke) in blocks.iter().enumerate() {
                let map = &elems[slot][bi];
                for (a, ra) in map.iter().enumerate() {
                    let Some(ra) = *ra else { continue };
                    for (b, rb) in map.iter().enumerate() {
                        if let Some(rb) = *rb {
                            mats[bi].add(ra, rb, ke[(a, b)]);
                        }
                    }
                }
            }
        })?;
        let mut it = mats.into_iter();
        Ok([it.next().unwrap(), it.next().unwrap(), it.next().unwrap()])
    }

    /// Undegraded energy density at every integration point.
    pub fn energies(&self, state: &FieldState) -> Vec<f64> {
        let ctx = self.context();
        (0..self.cache.elements().len())
            .into_par_iter()
            .flat_map_iter(|slot| {
                let (u, _, _) = self.gather_element(state, slot);
                point_energies(&ctx, self.cache.element_points(slot), &u)
            })
            .collect()
    }

    /// `H ← max(H, ψ0(ε))` at every point.
    pub fn update_history(&self, state: &mut FieldState) {
        let psi = self.energies(state);
        for (h, p) in state.history.iter_mut().zip(psi) {
            *h = h.max(p);
        }
    }

    pub fn reaction_force(&self, r: &NodalResidual) -> f64 {
        let dim = self.dim();
        self.reaction.0.iter().map(|&v| r.u[v * dim + self.reaction.1]).sum()
    }

    /// Currents `(into driven, into grounded)`; they cancel when charge is conserved.
    pub fn electrode_currents(&self, r: &NodalResidual) -> (f64, f64) {
        match &self.electrodes {
            None => (0.0, 0.0),
            Some(e) => (e.driven.iter().map(|&v| r.phi[v]).sum(), e.grounded.iter().map(|&v| r.phi[v]).sum()),
        }
    }
}
