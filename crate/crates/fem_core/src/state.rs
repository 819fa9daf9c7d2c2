use crate::mesh::Mesh;

/// Nodal unknowns and the integration-point history of one configuration.
/// Nodal arrays are indexed `node * comps + comp`; `history` follows the
/// point order of [`crate::IntegrationCache`].
#[derive(Debug, Clone, PartialEq)]
pub struct FieldState {
    /// Displacement (m).
    pub u: Vec<f64>,
    /// Electric potential (V).
    pub phi: Vec<f64>,
    /// Phase-field damage in [0, 1].
    pub d: Vec<f64>,
    /// Largest elastic energy density reached so far (J/m³).
    pub history: Vec<f64>,
}

impl FieldState {
    pub fn zeros(mesh: &Mesh, n_points: usize) -> Self {
        let n = mesh.n_nodes();
        FieldState { u: vec![0.0; n * mesh.dim()], phi: vec![0.0; n], d: vec![0.0; n], history: vec![0.0; n_points] }
    }

    pub fn max_damage(&self) -> f64 {
        self.d.iter().copied().fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        [&self.u, &self.phi, &self.d, &self.history].iter().all(|v| v.iter().all(|x| x.is_finite()))
    }

    /// Mean of the history values of each element's points.
    pub fn element_history(&self, points_per_element: usize) -> Vec<f64> {
        self.history.chunks(points_per_element).map(|c| c.iter().sum::<f64>() / c.len() as f64).collect()
    }
}
