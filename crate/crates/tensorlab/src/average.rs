use nalgebra::{Matrix3, Matrix6, SMatrix};
use std::f64::consts::{FRAC_PI_2, PI};

use crate::quadrature::gauss_legendre;
use crate::rotation::{mandel_rotation, EulerOrientation};
use crate::voigt::Tensor4Voigt;
use crate::TensorError;

/// Uniform orientation density on the upper hemisphere.
pub const UNIFORM_ODF: f64 = 1.0 / (2.0 * PI);

/// One quadrature node of an orientation grid.
#[derive(Debug, Clone)]
pub struct OrientationNode {
    pub orientation: EulerOrientation,
    /// Product weight including the `sin γ2` Jacobian.
    pub weight: f64,
    pub rotation: Matrix3<f64>,
    pub mandel: Matrix6<f64>,
}

/// Product Gauss–Legendre grid over `γ1 ∈ [0, 2π]`, `γ2 ∈ [0, π/2]`.
#[derive(Debug, Clone)]
pub struct OrientationGrid {
    order: usize,
    nodes: Vec<OrientationNode>,
}

impl OrientationGrid {
    pub const DEFAULT_ORDER: usize = 32;

    pub fn hemisphere(order: usize) -> Result<Self, TensorError> {
        let g = gauss_legendre(order)?;
        let mut nodes = Vec::with_capacity(order * order);
        for (g1, w1) in g.on(0.0, 2.0 * PI) {
            for (g2, w2) in g.on(0.0, FRAC_PI_2) {
                let orientation = EulerOrientation::new_unchecked(g1, g2);
                let rotation = orientation.matrix();
                nodes.push(OrientationNode {
                    orientation,
                    weight: w1 * w2 * g2.sin(),
                    rotation,
                    mandel: mandel_rotation(&rotation),
                });
            }
        }
        Ok(OrientationGrid { order, nodes })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn nodes(&self) -> &[OrientationNode] {
        &self.nodes
    }

    /// `∫∫ F Ω sin γ2 dγ2 dγ1` for matrix-valued `F`.
    pub fn integrate<const R: usize, const C: usize, F, W>(&self, mut f: F, mut odf: W) -> SMatrix<f64, R, C>
    where
        F: FnMut(&OrientationNode) -> SMatrix<f64, R, C>,
        W: FnMut(&EulerOrientation) -> f64,
    {
        let mut acc = SMatrix::<f64, R, C>::zeros();
        for n in &self.nodes {
            let w = n.weight * odf(&n.orientation);
            if w != 0.0 {
                acc += f(n) * w;
            }
        }
        acc
    }

    /// `∫∫ Ω sin γ2 dγ2 dγ1`.
    pub fn mass<W: FnMut(&EulerOrientation) -> f64>(&self, mut odf: W) -> f64 {
        self.nodes.iter().map(|n| n.weight * odf(&n.orientation)).sum()
    }
}

/// Orientational average of a tensor field under density `odf`, using a
/// product Gauss–Legendre rule of the given order per angle. The result keeps
/// the kind of `f` evaluated at the identity orientation.
pub fn orientational_average<F, W>(mut f: F, odf: W, order: usize) -> Result<Tensor4Voigt, TensorError>
where
    F: FnMut(&EulerOrientation) -> Tensor4Voigt,
    W: FnMut(&EulerOrientation) -> f64,
{
    let grid = OrientationGrid::hemisphere(order)?;
    let kind = f(&EulerOrientation::IDENTITY).kind;
    let m = grid.integrate(|n| f(&n.orientation).matrix, odf);
    Ok(Tensor4Voigt::new(m, kind))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rotation::rotate_tensor4;
    use crate::voigt::TensorKind;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};

    // transversely isotropic about the local 3-axis
    fn fibre_like() -> Tensor4Voigt {
        let mut c = Tensor4Voigt::isotropic_stiffness(2.0, 0.3);
        c.matrix[(2, 2)] += 300.0;
        for (r, k) in [(0, 2), (2, 0), (1, 2), (2, 1)] {
            c.matrix[(r, k)] += 1.0;
        }
        c.matrix[(3, 3)] += 0.7;
        c.matrix[(4, 4)] += 0.7;
        c
    }

    #[test]
    fn uniform_density_is_normalised() {
        let grid = OrientationGrid::hemisphere(32).unwrap();
        assert_relative_eq!(grid.mass(|_| UNIFORM_ODF), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn constant_isotropic_is_preserved() {
        let c = Tensor4Voigt::isotropic_stiffness(3.0, 0.25);
        let avg = orientational_average(|_| c, |_| UNIFORM_ODF, 8).unwrap();
        assert_relative_eq!(avg.matrix, c.matrix, epsilon = 1e-13);
    }

    #[test]
    fn rejects_order_below_two() {
        assert!(orientational_average(|_| fibre_like(), |_| UNIFORM_ODF, 1).is_err());
    }

    #[test]
    fn rotated_fibre_average_is_isotropic() {
        let c = fibre_like();
        let avg = orientational_average(|o| rotate_tensor4(&c, o), |_| UNIFORM_ODF, 32).unwrap();
        assert!(avg.anisotropy() < 1e-8, "anisotropy {}", avg.anisotropy());
    }

    #[test]
    fn self_convergence_32_vs_64() {
        let c = fibre_like();
        let a = orientational_average(|o| rotate_tensor4(&c, o), |_| UNIFORM_ODF, 32).unwrap();
        let b = orientational_average(|o| rotate_tensor4(&c, o), |_| UNIFORM_ODF, 64).unwrap();
        assert!((a.matrix - b.matrix).norm() <= 1e-10 * b.matrix.norm());
    }

    #[test]
    fn agrees_with_monte_carlo_average() {
        let c = fibre_like();
        let avg = orientational_average(|o| rotate_tensor4(&c, o), |_| UNIFORM_ODF, 32).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let samples = 1_000_000;
        let mut acc = Matrix6::zeros();
        for _ in 0..samples {
            // uniform on the hemisphere: cos γ2 uniform in [0, 1]
            let g1 = rng.random::<f64>() * 2.0 * PI;
            let g2 = rng.random::<f64>().acos();
            let o = EulerOrientation::new(g1, g2).unwrap();
            acc += rotate_tensor4(&c, &o).matrix;
        }
        acc /= samples as f64;
        let rel = (acc - avg.matrix).norm() / avg.matrix.norm();
        assert!(rel < 3e-3, "monte carlo disagreement {rel}");
        assert_eq!(avg.kind, TensorKind::Stiffness);
    }
}
