use crate::mesh::Mesh;
use crate::ordering::reverse_cuthill_mckee;

/// Field blocks of the coupled problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Block {
    Displacement,
    Potential,
    Damage,
}

impl Block {
    pub const ALL: [Block; 3] = [Block::Displacement, Block::Potential, Block::Damage];

    fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Block::Displacement => "displacement",
            Block::Potential => "potential",
            Block::Damage => "damage",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
struct BlockDofs {
    comps: usize,
    /// Block dof of `(node, comp)` at `node * comps + comp`.
    dof: Vec<Option<usize>>,
    /// Inverse of `dof`.
    owner: Vec<(usize, usize)>,
    fixed: Vec<bool>,
    free: Vec<Option<usize>>,
    free_dofs: Vec<usize>,
}

impl BlockDofs {
    fn renumber_free(&mut self) {
        self.free_dofs = (0..self.fixed.len()).filter(|&i| !self.fixed[i]).collect();
        self.free = vec![None; self.fixed.len()];
        for (k, &i) in self.free_dofs.iter().enumerate() {
            self.free[i] = Some(k);
        }
    }
}

/// Per-block numbering of the nodal unknowns of used nodes (reverse
/// Cuthill–McKee order, components interleaved) with the Dirichlet table.
/// Nodal field arrays are indexed `node * comps + comp`.
#[derive(Debug, Clone, PartialEq)]
pub struct DofMap {
    blocks: [BlockDofs; 3],
}

impl DofMap {
    pub fn new(mesh: &Mesh) -> Self {
        let used = mesh.used_nodes();
        let order = reverse_cuthill_mckee(&mesh.node_adjacency(), &used);
        let make = |comps: usize| {
            let mut dof = vec![None; mesh.n_nodes() * comps];
            let mut owner = Vec::with_capacity(order.len() * comps);
            for &v in &order {
                for c in 0..comps {
                    dof[v * comps + c] = Some(owner.len());
                    owner.push((v, c));
                }
            }
            let mut b = BlockDofs { comps, dof, fixed: vec![false; owner.len()], owner, free: Vec::new(), free_dofs: Vec::new() };
            b.renumber_free();
            b
        };
        DofMap { blocks: [make(mesh.dim()), make(1), make(1)] }
    }

    fn block(&self, b: Block) -> &BlockDofs {
        &self.blocks[b.index()]
    }

    pub fn components(&self, b: Block) -> usize {
        self.block(b).comps
    }

    pub fn n_dofs(&self, b: Block) -> usize {
        self.block(b).owner.len()
    }

    pub fn n_free(&self, b: Block) -> usize {
        self.block(b).free_dofs.len()
    }

    pub fn dof(&self, b: Block, node: usize, comp: usize) -> Option<usize> {
        let bl = self.block(b);
        bl.dof[node * bl.comps + comp]
    }

    /// `(node, comp)` owning a block dof.
    pub fn owner(&self, b: Block, dof: usize) -> (usize, usize) {
        self.block(b).owner[dof]
    }

    pub fn free_index(&self, b: Block, dof: usize) -> Option<usize> {
        self.block(b).free[dof]
    }

    pub fn is_fixed(&self, b: Block, dof: usize) -> bool {
        self.block(b).fixed[dof]
    }

    pub fn fixed_dofs(&self, b: Block) -> impl Iterator<Item = usize> + '_ {
        let bl = self.block(b);
        (0..bl.fixed.len()).filter(|&i| bl.fixed[i])
    }

    /// Constrain component `comp` of `nodes`; nodes without dofs are skipped.
    /// Returns the number of newly fixed dofs.
    pub fn fix(&mut self, b: Block, nodes: &[usize], comp: usize) -> usize {
        let bl = &mut self.blocks[b.index()];
        let mut count = 0;
        for &v in nodes {
            if let Some(i) = bl.dof[v * bl.comps + comp] {
                if !bl.fixed[i] {
                    bl.fixed[i] = true;
                    count += 1;
                }
            }
        }
        bl.renumber_free();
        count
    }

    /// Free-dof vector taken from a nodal field.
    pub fn gather(&self, b: Block, field: &[f64]) -> Vec<f64> {
        let bl = self.block(b);
        bl.free_dofs
            .iter()
            .map(|&i| {
                let (v, c) = bl.owner[i];
                field[v * bl.comps + c]
            })
            .collect()
    }

    /// Write a free-dof vector into a nodal field; fixed entries are kept.
    pub fn scatter(&self, b: Block, free: &[f64], field: &mut [f64]) {
        let bl = self.block(b);
        for (&i, &x) in bl.free_dofs.iter().zip(free) {
            let (v, c) = bl.owner[i];
            field[v * bl.comps + c] = x;
        }
    }

    /// Block dofs of element `e`, node-major.
    pub fn element_dofs(&self, b: Block, mesh: &Mesh, e: usize) -> Vec<usize> {
        let bl = self.block(b);
        mesh.element(e)
            .iter()
            .flat_map(|&v| (0..bl.comps).map(move |c| bl.dof[v * bl.comps + c].expect("node of an active element")))
            .collect()
    }

    /// First column of every free row of the free-dof stiffness.
    pub fn free_profile(&self, b: Block, mesh: &Mesh) -> Vec<usize> {
        let bl = self.block(b);
        let mut first: Vec<usize> = (0..bl.free_dofs.len()).collect();
        for e in mesh.active_elements() {
            let free: Vec<usize> = self.element_dofs(b, mesh, e).into_iter().filter_map(|i| bl.free[i]).collect();
            if let Some(&lo) = free.iter().min() {
                for &r in &free {
                    first[r] = first[r].min(lo);
                }
            }
        }
        first
    }
}
