use nalgebra::{Matrix2, Matrix3};

use crate::mesh::{ElementKind, Mesh};
use crate::FemError;

/// Reference coordinates of the element corners.
const QUAD_CORNERS: [[f64; 2]; 4] = [[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]];
const HEX_CORNERS: [[f64; 3]; 8] = [
    [-1.0, -1.0, -1.0],
    [1.0, -1.0, -1.0],
    [1.0, 1.0, -1.0],
    [-1.0, 1.0, -1.0],
    [-1.0, -1.0, 1.0],
    [1.0, -1.0, 1.0],
    [1.0, 1.0, 1.0],
    [-1.0, 1.0, 1.0],
];

/// Shape function values and spatial gradients at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShapeValues {
    pub nen: usize,
    pub n: [f64; 8],
    /// `∂N_a/∂x_k`; unused trailing entries are zero.
    pub grad: [[f64; 3]; 8],
    pub det_j: f64,
}

/// Full-integration Gauss rule: 2×2 or 2×2×2.
pub fn gauss_points(kind: ElementKind) -> Vec<([f64; 3], f64)> {
    let g = 1.0 / 3f64.sqrt();
    match kind {
        ElementKind::Quad4 => QUAD_CORNERS.iter().map(|c| ([c[0] * g, c[1] * g, 0.0], 1.0)).collect(),
        ElementKind::Hex8 => HEX_CORNERS.iter().map(|c| ([c[0] * g, c[1] * g, c[2] * g], 1.0)).collect(),
    }
}

fn reference(kind: ElementKind, xi: &[f64; 3]) -> ([f64; 8], [[f64; 3]; 8]) {
    let mut n = [0.0; 8];
    let mut dn = [[0.0; 3]; 8];
    match kind {
        ElementKind::Quad4 => {
            for (a, c) in QUAD_CORNERS.iter().enumerate() {
                let (p, q) = (1.0 + c[0] * xi[0], 1.0 + c[1] * xi[1]);
                n[a] = 0.25 * p * q;
                dn[a] = [0.25 * c[0] * q, 0.25 * c[1] * p, 0.0];
            }
        }
        ElementKind::Hex8 => {
            for (a, c) in HEX_CORNERS.iter().enumerate() {
                let (p, q, r) = (1.0 + c[0] * xi[0], 1.0 + c[1] * xi[1], 1.0 + c[2] * xi[2]);
                n[a] = 0.125 * p * q * r;
                dn[a] = [0.125 * c[0] * q * r, 0.125 * c[1] * p * r, 0.125 * c[2] * p * q];
            }
        }
    }
    (n, dn)
}

pub(crate) fn jacobian_det(kind: ElementKind, coords: &[[f64; 3]], xi: &[f64; 3]) -> f64 {
    let (_, dn) = reference(kind, xi);
    match kind {
        ElementKind::Quad4 => jac2(coords, &dn).determinant(),
        ElementKind::Hex8 => jac3(coords, &dn).determinant(),
    }
}

fn jac2(x: &[[f64; 3]], dn: &[[f64; 3]; 8]) -> Matrix2<f64> {
    let mut j = Matrix2::zeros();
    for a in 0..4 {
        for r in 0..2 {
            for c in 0..2 {
                j[(r, c)] += dn[a][r] * x[a][c];
            }
        }
    }
    j
}

fn jac3(x: &[[f64; 3]], dn: &[[f64; 3]; 8]) -> Matrix3<f64> {
    let mut j = Matrix3::zeros();
    for a in 0..8 {
        for r in 0..3 {
            for c in 0..3 {
                j[(r, c)] += dn[a][r] * x[a][c];
            }
        }
    }
    j
}

/// Bilinear/trilinear shape data at reference point `xi` of an element with
/// corner coordinates `coords`. `element` only labels errors.
pub fn shape_eval(kind: ElementKind, coords: &[[f64; 3]], xi: &[f64; 3], element: usize) -> Result<ShapeValues, FemError> {
    let nen = kind.nodes_per_element();
    if coords.len() != nen {
        return Err(FemError::InvalidSpec(format!("{} coordinates for a {}", coords.len(), kind.name())));
    }
    let (n, dn) = reference(kind, xi);
    let mut grad = [[0.0; 3]; 8];
    let det_j = match kind {
        ElementKind::Quad4 => {
            let j = jac2(coords, &dn);
            let det = j.determinant();
            if !(det > 0.0) {
                return Err(FemError::NonPositiveJacobian { element, det });
            }
            let inv = j.try_inverse().ok_or(FemError::NonPositiveJacobian { element, det })?;
            for a in 0..4 {
                for k in 0..2 {
                    grad[a][k] = inv[(k, 0)] * dn[a][0] + inv[(k, 1)] * dn[a][1];
                }
            }
            det
        }
        ElementKind::Hex8 => {
            let j = jac3(coords, &dn);
            let det = j.determinant();
            if !(det > 0.0) {
                return Err(FemError::NonPositiveJacobian { element, det });
            }
            let inv = j.try_inverse().ok_or(FemError::NonPositiveJacobian { element, det })?;
            for a in 0..8 {
                for k in 0..3 {
                    grad[a][k] = (0..3).map(|m| inv[(k, m)] * dn[a][m]).sum();
                }
            }
            det
        }
    };
    Ok(ShapeValues { nen, n, grad, det_j })
}

/// Shape data at one integration point with its weight, which includes the
/// Jacobian and, in 2D, the thickness.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadPoint {
    pub n: [f64; 8],
    pub grad: [[f64; 3]; 8],
    pub weight: f64,
}

/// Trapezoidal rule on the element corners, unit weights; point `a` sits on
/// node `a`.
pub fn corner_points(kind: ElementKind) -> Vec<([f64; 3], f64)> {
    match kind {
        ElementKind::Quad4 => QUAD_CORNERS.iter().map(|c| ([c[0], c[1], 0.0], 1.0)).collect(),
        ElementKind::Hex8 => HEX_CORNERS.iter().map(|&c| (c, 1.0)).collect(),
    }
}

/// Precomputed integration-point data of all active elements: the Gauss
/// rule, and the corner rule for operators that must keep an M-matrix
/// structure.
#[derive(Debug, Clone, PartialEq)]
pub struct IntegrationCache {
    points_per_element: usize,
    elements: Vec<usize>,
    points: Vec<QuadPoint>,
    corners: Vec<QuadPoint>,
}

impl IntegrationCache {
    pub fn new(mesh: &Mesh) -> Result<Self, FemError> {
        let rule = gauss_points(mesh.kind);
        let scale = if mesh.dim() == 2 { mesh.thickness } else { 1.0 };
        let elements: Vec<usize> = mesh.active_elements().collect();
        let nodal = corner_points(mesh.kind);
        let mut points = Vec::with_capacity(elements.len() * rule.len());
        let mut corners = Vec::with_capacity(elements.len() * nodal.len());
        for &e in &elements {
            let x = mesh.element_coords(e);
            for (xi, w) in &rule {
                let s = shape_eval(mesh.kind, &x, xi, e)?;
                points.push(QuadPoint { n: s.n, grad: s.grad, weight: w * s.det_j * scale });
            }
            for (xi, w) in &nodal {
                let s = shape_eval(mesh.kind, &x, xi, e)?;
                corners.push(QuadPoint { n: s.n, grad: s.grad, weight: w * s.det_j * scale });
            }
        }
        Ok(IntegrationCache { points_per_element: rule.len(), elements, points, corners })
    }

    pub fn points_per_element(&self) -> usize {
        self.points_per_element
    }

    /// Active element ids in cache order.
    pub fn elements(&self) -> &[usize] {
        &self.elements
    }

    pub fn n_points(&self) -> usize {
        self.points.len()
    }

    /// Points of the `k`-th cached element.
    pub fn element_points(&self, k: usize) -> &[QuadPoint] {
        &self.points[k * self.points_per_element..(k + 1) * self.points_per_element]
    }

    /// Corner-rule points of the `k`-th cached element, one per node.
    pub fn element_corners(&self, k: usize) -> &[QuadPoint] {
        let n = self.corners.len() / self.elements.len().max(1);
        &self.corners[k * n..(k + 1) * n]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn distorted_quad() -> Vec<[f64; 3]> {
        vec![[0.0, 0.0, 0.0], [2.0, 0.3, 0.0], [2.4, 1.9, 0.0], [-0.2, 1.5, 0.0]]
    }

    fn distorted_hex() -> Vec<[f64; 3]> {
        let mut x: Vec<[f64; 3]> = HEX_CORNERS.iter().map(|c| [c[0] + 1.0, c[1] + 1.0, c[2] + 1.0]).collect();
        x[6] = [2.3, 2.2, 2.4];
        x[1][2] -= 0.2;
        x
    }

    #[test]
    fn lagrange_property() {
        for (kind, corners) in [
            (ElementKind::Quad4, QUAD_CORNERS.iter().map(|c| [c[0], c[1], 0.0]).collect::<Vec<_>>()),
            (ElementKind::Hex8, HEX_CORNERS.to_vec()),
        ] {
            for (a, c) in corners.iter().enumerate() {
                let (n, _) = reference(kind, c);
                for (b, v) in n.iter().take(kind.nodes_per_element()).enumerate() {
                    assert_eq!(*v, if a == b { 1.0 } else { 0.0 });
                }
            }
        }
    }

    #[test]
    fn linear_fields_reproduced() {
        for (kind, x) in [(ElementKind::Quad4, distorted_quad()), (ElementKind::Hex8, distorted_hex())] {
            let dim = kind.dim();
            for (xi, _) in gauss_points(kind) {
                let s = shape_eval(kind, &x, &xi, 0).unwrap();
                // u = x_k has gradient e_k
                for k in 0..dim {
                    for m in 0..dim {
                        let g: f64 = (0..s.nen).map(|a| s.grad[a][m] * x[a][k]).sum();
                        assert_relative_eq!(g, if k == m { 1.0 } else { 0.0 }, epsilon = 1e-13);
                    }
                }
            }
        }
    }

    #[test]
    fn inverted_element_reported() {
        let mut x = distorted_quad();
        x.swap(1, 3);
        assert!(matches!(shape_eval(ElementKind::Quad4, &x, &[0.0; 3], 7), Err(FemError::NonPositiveJacobian { element: 7, .. })));
    }

    #[test]
    fn quadrature_measures_area() {
        let x = distorted_quad();
        let area: f64 = gauss_points(ElementKind::Quad4).iter().map(|(xi, w)| w * jacobian_det(ElementKind::Quad4, &x, xi)).sum();
        let mesh = Mesh::new(ElementKind::Quad4, x, vec![0, 1, 2, 3], 1.0).unwrap();
        assert_relative_eq!(area, mesh.element_measure(0), max_relative = 1e-14);
    }

    #[test]
    fn corner_rule_laplacian_couples_edges_only() {
        // elongated boxes, where the Gauss rule gives positive couplings
        let quad = vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [1.0, 4.0, 0.0], [0.0, 4.0, 0.0]];
        let hex: Vec<[f64; 3]> = HEX_CORNERS.iter().map(|c| [0.5 * (c[0] + 1.0), 0.5 * (c[1] + 1.0), 2.5 * (c[2] + 1.0)]).collect();
        for (kind, x, measure) in [(ElementKind::Quad4, quad, 4.0), (ElementKind::Hex8, hex, 5.0)] {
            let nen = kind.nodes_per_element();
            let mut k = vec![vec![0.0; nen]; nen];
            let mut total = 0.0;
            for (xi, w) in corner_points(kind) {
                let s = shape_eval(kind, &x, &xi, 0).unwrap();
                total += w * s.det_j;
                for a in 0..nen {
                    for b in 0..nen {
                        k[a][b] += w * s.det_j * (0..3).map(|m| s.grad[a][m] * s.grad[b][m]).sum::<f64>();
                    }
                }
            }
            assert_relative_eq!(total, measure, max_relative = 1e-14);
            for a in 0..nen {
                assert!(k[a].iter().sum::<f64>().abs() < 1e-12);
                for b in 0..nen {
                    let edge = (0..3).filter(|&m| x[a][m] != x[b][m]).count() == 1;
                    if a != b {
                        assert!(if edge { k[a][b] < 0.0 } else { k[a][b].abs() < 1e-14 }, "{a},{b}: {}", k[a][b]);
                    }
                }
            }
        }
    }

    proptest! {
        #[test]
        fn partition_of_unity(a in -1.0f64..1.0, b in -1.0f64..1.0, c in -1.0f64..1.0) {
            for (kind, x) in [(ElementKind::Quad4, distorted_quad()), (ElementKind::Hex8, distorted_hex())] {
                let s = shape_eval(kind, &x, &[a, b, c], 0).unwrap();
                let sum: f64 = s.n[..s.nen].iter().sum();
                prop_assert!((sum - 1.0).abs() < 1e-14);
                for k in 0..3 {
                    let g: f64 = (0..s.nen).map(|i| s.grad[i][k]).sum();
                    prop_assert!(g.abs() < 1e-12);
                }
            }
        }
    }
}
