use std::collections::BTreeMap;

use crate::FemError;

/// Linear Lagrange element families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ElementKind {
    Quad4,
    Hex8,
}

impl ElementKind {
    pub fn nodes_per_element(self) -> usize {
        match self {
            ElementKind::Quad4 => 4,
            ElementKind::Hex8 => 8,
        }
    }

    pub fn dim(self) -> usize {
        match self {
            ElementKind::Quad4 => 2,
            ElementKind::Hex8 => 3,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ElementKind::Quad4 => "quad4",
            ElementKind::Hex8 => "hex8",
        }
    }
}

/// Nodes, connectivity, an activity mask for removed elements and named
/// node sets. Two-dimensional meshes carry an out-of-plane thickness.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    pub kind: ElementKind,
    pub nodes: Vec<[f64; 3]>,
    connectivity: Vec<usize>,
    pub active: Vec<bool>,
    /// Out-of-plane thickness (m); one for solid meshes.
    pub thickness: f64,
    pub node_sets: BTreeMap<String, Vec<usize>>,
}

impl Mesh {
    pub fn new(kind: ElementKind, nodes: Vec<[f64; 3]>, connectivity: Vec<usize>, thickness: f64) -> Result<Self, FemError> {
        let nen = kind.nodes_per_element();
        if connectivity.len() % nen != 0 {
            return Err(FemError::InvalidSpec(format!("connectivity length {} is not a multiple of {nen}", connectivity.len())));
        }
        if let Some(&bad) = connectivity.iter().find(|&&n| n >= nodes.len()) {
            return Err(FemError::InvalidSpec(format!("element references node {bad} of {}", nodes.len())));
        }
        if !(thickness.is_finite() && thickness > 0.0) {
            return Err(FemError::InvalidSpec(format!("thickness {thickness}")));
        }
        let n_el = connectivity.len() / nen;
        Ok(Mesh { kind, nodes, connectivity, active: vec![true; n_el], thickness, node_sets: BTreeMap::new() })
    }

    pub fn dim(&self) -> usize {
        self.kind.dim()
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn n_elements(&self) -> usize {
        self.active.len()
    }

    pub fn connectivity(&self) -> &[usize] {
        &self.connectivity
    }

    pub fn element(&self, e: usize) -> &[usize] {
        let nen = self.kind.nodes_per_element();
        &self.connectivity[e * nen..(e + 1) * nen]
    }

    pub fn element_coords(&self, e: usize) -> Vec<[f64; 3]> {
        self.element(e).iter().map(|&n| self.nodes[n]).collect()
    }

    pub fn active_elements(&self) -> impl Iterator<Item = usize> + '_ {
        self.active.iter().enumerate().filter(|(_, &a)| a).map(|(e, _)| e)
    }

    pub fn n_active(&self) -> usize {
        self.active.iter().filter(|&&a| a).count()
    }

    pub fn centroid(&self, e: usize) -> [f64; 3] {
        let mut c = [0.0; 3];
        let ids = self.element(e);
        for &n in ids {
            for (k, ck) in c.iter_mut().enumerate() {
                *ck += self.nodes[n][k];
            }
        }
        c.map(|v| v / ids.len() as f64)
    }

    /// Nodes referenced by at least one active element.
    pub fn used_nodes(&self) -> Vec<bool> {
        let mut used = vec![false; self.nodes.len()];
        for e in self.active_elements() {
            for &n in self.element(e) {
                used[n] = true;
            }
        }
        used
    }

    /// Area (2D, without thickness) or volume (3D) of one element.
    pub fn element_measure(&self, e: usize) -> f64 {
        let x = self.element_coords(e);
        match self.kind {
            ElementKind::Quad4 => {
                let mut a = 0.0;
                for i in 0..4 {
                    let j = (i + 1) % 4;
                    a += x[i][0] * x[j][1] - x[j][0] * x[i][1];
                }
                0.5 * a
            }
            ElementKind::Hex8 => crate::shape::gauss_points(self.kind)
                .iter()
                .map(|(xi, w)| w * crate::shape::jacobian_det(self.kind, &x, xi))
                .sum(),
        }
    }

    pub fn active_measure(&self) -> f64 {
        self.active_elements().map(|e| self.element_measure(e)).sum()
    }

    pub fn inactive_measure(&self) -> f64 {
        (0..self.n_elements()).filter(|&e| !self.active[e]).map(|e| self.element_measure(e)).sum()
    }

    pub fn node_set(&self, name: &str) -> Option<&[usize]> {
        self.node_sets.get(name).map(Vec::as_slice)
    }

    pub fn set_node_set(&mut self, name: impl Into<String>, mut nodes: Vec<usize>) -> Result<(), FemError> {
        nodes.sort_unstable();
        nodes.dedup();
        if let Some(&bad) = nodes.iter().find(|&&n| n >= self.nodes.len()) {
            return Err(FemError::InvalidSpec(format!("node set references node {bad}")));
        }
        self.node_sets.insert(name.into(), nodes);
        Ok(())
    }

    /// Used nodes inside the closed box `[lo, hi]`.
    pub fn nodes_in_box(&self, lo: [f64; 3], hi: [f64; 3]) -> Vec<usize> {
        let used = self.used_nodes();
        let tol = 1e-9 * self.characteristic_length();
        (0..self.nodes.len())
            .filter(|&n| used[n] && (0..3).all(|k| self.nodes[n][k] >= lo[k] - tol && self.nodes[n][k] <= hi[k] + tol))
            .collect()
    }

    /// Diagonal of the bounding box.
    pub fn characteristic_length(&self) -> f64 {
        let (lo, hi) = self.bounds();
        (0..3).map(|k| (hi[k] - lo[k]).powi(2)).sum::<f64>().sqrt()
    }

    pub fn bounds(&self) -> ([f64; 3], [f64; 3]) {
        let mut lo = [f64::INFINITY; 3];
        let mut hi = [f64::NEG_INFINITY; 3];
        for p in &self.nodes {
            for k in 0..3 {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        (lo, hi)
    }

    /// Node-to-node adjacency through active elements.
    pub fn node_adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.nodes.len()];
        for e in self.active_elements() {
            let ids = self.element(e);
            for &a in ids {
                for &b in ids {
                    if a != b {
                        adj[a].push(b);
                    }
                }
            }
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        adj
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_quads() -> Mesh {
        let nodes = vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [2.0, 0.0, 0.0], [0.0, 1.0, 0.0], [1.0, 1.0, 0.0], [2.0, 1.0, 0.0]];
        Mesh::new(ElementKind::Quad4, nodes, vec![0, 1, 4, 3, 1, 2, 5, 4], 0.1).unwrap()
    }

    #[test]
    fn rejects_bad_connectivity() {
        assert!(Mesh::new(ElementKind::Quad4, vec![[0.0; 3]; 3], vec![0, 1, 2, 3], 1.0).is_err());
        assert!(Mesh::new(ElementKind::Quad4, vec![[0.0; 3]; 4], vec![0, 1, 2], 1.0).is_err());
    }

    #[test]
    fn used_nodes_follow_activity() {
        let mut m = two_quads();
        assert!(m.used_nodes().iter().all(|&u| u));
        m.active[1] = false;
        assert_eq!(m.used_nodes(), vec![true, true, false, true, true, false]);
        assert_eq!(m.active_measure() + m.inactive_measure(), 2.0);
    }

    #[test]
    fn adjacency_and_boxes() {
        let m = two_quads();
        assert_eq!(m.node_adjacency()[1], vec![0, 2, 3, 4, 5]);
        assert_eq!(m.nodes_in_box([0.5, -1.0, -1.0], [2.5, 0.5, 1.0]), vec![1, 2]);
        assert_eq!(m.centroid(0), [0.5, 0.5, 0.0]);
    }
}
