use nalgebra::{DMatrix, DVector};

use fem_core::{IntegrationCache, QuadPoint};

use crate::degradation::{h1, h2};
use crate::material::MaterialPoint;
use crate::SolverError;

/// Nodal values of one element (node-major) and its point history.
#[derive(Debug, Clone, Copy)]
pub struct ElementFields<'a> {
    pub u: &'a [f64],
    pub phi: &'a [f64],
    pub d: &'a [f64],
    pub history: &'a [f64],
}

/// Element residual vectors and, on request, the diagonal stiffness blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct ElementOutput {
    pub r_u: DVector<f64>,
    pub r_phi: DVector<f64>,
    pub r_d: DVector<f64>,
    pub k_u: Option<DMatrix<f64>>,
    pub k_phi: Option<DMatrix<f64>>,
    pub k_d: Option<DMatrix<f64>>,
}

/// Element data that stays fixed during a run.
#[derive(Debug, Clone, Copy)]
pub struct ElementContext<'a> {
    pub dim: usize,
    pub nen: usize,
    pub material: &'a MaterialPoint,
    /// Result of [`MaterialPoint::elasticity`] for `dim`.
    pub elasticity: &'a DMatrix<f64>,
}

/// Strain-displacement matrix in Voigt order with engineering shear.
pub fn strain_matrix(dim: usize, nen: usize, grad: &[[f64; 3]; 8]) -> DMatrix<f64> {
    let rows = if dim == 2 { 3 } else { 6 };
    let mut b = DMatrix::zeros(rows, dim * nen);
    for (a, g) in grad.iter().enumerate().take(nen) {
        let c = dim * a;
        if dim == 2 {
            b[(0, c)] = g[0];
            b[(1, c + 1)] = g[1];
            b[(2, c)] = g[1];
            b[(2, c + 1)] = g[0];
        } else {
            b[(0, c)] = g[0];
            b[(1, c + 1)] = g[1];
            b[(2, c + 2)] = g[2];
            b[(3, c + 1)] = g[2];
            b[(3, c + 2)] = g[1];
            b[(4, c)] = g[2];
            b[(4, c + 2)] = g[0];
            b[(5, c)] = g[1];
            b[(5, c + 1)] = g[0];
        }
    }
    b
}

/// Scalar gradient matrix `∂N_a/∂x_k` with rows `k`.
pub fn gradient_matrix(dim: usize, nen: usize, grad: &[[f64; 3]; 8]) -> DMatrix<f64> {
    DMatrix::from_fn(dim, nen, |k, a| grad[a][k])
}

/// Undegraded elastic energy density `½ ε·C ε` at every point.
pub fn point_energies(ctx: &ElementContext, points: &[QuadPoint], u: &[f64]) -> Vec<f64> {
    let ue = DVector::from_column_slice(u);
    points
        .iter()
        .map(|p| {
            let eps = strain_matrix(ctx.dim, ctx.nen, &p.grad) * &ue;
            0.5 * eps.dot(&(ctx.elasticity * &eps))
        })
        .collect()
}

/// Residuals of the momentum balance, charge conservation and phase-field
/// equations of the `slot`-th cached element; with `stiffness` also the
/// diagonal blocks `∂R_u/∂u`, `∂R_φ/∂φ` and `∂R_d/∂d` at fixed history.
pub fn evaluate_element(
    ctx: &ElementContext,
    cache: &IntegrationCache,
    slot: usize,
    f: &ElementFields,
    stiffness: bool,
) -> Result<ElementOutput, SolverError> {
    let element = cache.elements()[slot];
    let points = cache.element_points(slot);
    let (dim, nen) = (ctx.dim, ctx.nen);
    let m = ctx.material;
    let ue = DVector::from_column_slice(f.u);
    let pe = DVector::from_column_slice(f.phi);
    let de = DVector::from_column_slice(f.d);
    let mut out = ElementOutput {
        r_u: DVector::zeros(dim * nen),
        r_phi: DVector::zeros(nen),
        r_d: DVector::zeros(nen),
        k_u: stiffness.then(|| DMatrix::zeros(dim * nen, dim * nen)),
        k_phi: stiffness.then(|| DMatrix::zeros(nen, nen)),
        k_d: stiffness.then(|| DMatrix::zeros(nen, nen)),
    };
    let (gc, ell) = (m.g_c, m.ell);
    for (p, &hist) in points.iter().zip(f.history) {
        let n = DVector::from_column_slice(&p.n[..nen]);
        let b = strain_matrix(dim, nen, &p.grad);
        let g = gradient_matrix(dim, nen, &p.grad);
        let d = n.dot(&de);
        let eps = &b * &ue;
        let stress = ctx.elasticity * &eps;
        let g1 = h1(d, m.eps_reg);
        let g2 = h2(d, m.degradation.k, m.degradation.n, m.eps_reg);
        let sigma = m.conductivity(eps.as_slice(), dim).map_err(|_| SolverError::NonFinite { element })?;
        let grad_phi = &g * &pe;
        let w = p.weight;
        out.r_u += b.transpose() * &stress * (w * g1);
        out.r_phi += g.transpose() * (&sigma * grad_phi) * (w * g2);
        // Lumped reactive term; with the corner-rule gradient term below the
        // damage operator is an M-matrix on box elements of any aspect, so d
        // grows monotonically with H and stays below 1.
        let react = gc / ell + 2.0 * hist;
        for a in 0..nen {
            out.r_d[a] += w * n[a] * (react * de[a] - 2.0 * hist);
        }
        if stiffness {
            *out.k_u.as_mut().unwrap() += b.transpose() * ctx.elasticity * &b * (w * g1);
            *out.k_phi.as_mut().unwrap() += g.transpose() * &sigma * &g * (w * g2);
            let kd = out.k_d.as_mut().unwrap();
            for a in 0..nen {
                kd[(a, a)] += w * n[a] * react;
            }
        }
    }
    for p in cache.element_corners(slot) {
        let g = gradient_matrix(dim, nen, &p.grad);
        let w = gc * ell * p.weight;
        out.r_d += g.transpose() * (&g * &de) * w;
        if stiffness {
            *out.k_d.as_mut().unwrap() += g.transpose() * &g * w;
        }
    }
    let finite = |v: &DVector<f64>| v.iter().all(|x| x.is_finite());
    if !(finite(&out.r_u) && finite(&out.r_phi) && finite(&out.r_d)) {
        return Err(SolverError::NonFinite { element });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use fem_core::{build_structured_mesh, AxisSpec, GridSpec};

    fn single() -> (IntegrationCache, MaterialPoint) {
        let mut mesh = build_structured_mesh(&GridSpec::rectangle(1.0, 1.0, 1.0, 0.1)).unwrap();
        let top_right = mesh.nodes.iter().position(|x| x[0] == 1.0 && x[1] == 1.0).unwrap();
        mesh.nodes[top_right] = [1.2, 1.1, 0.0];
        (IntegrationCache::new(&mesh).unwrap(), MaterialPoint::isotropic(2e9, 0.3, 50.0, 0.2, 3.0))
    }

    #[test]
    fn zero_fields_give_zero_residuals() {
        let (cache, m) = single();
        let e = m.elasticity(2);
        let ctx = ElementContext { dim: 2, nen: 4, material: &m, elasticity: &e };
        let z = [0.0; 8];
        let out = evaluate_element(&ctx, &cache, 0, &ElementFields { u: &z, phi: &z[..4], d: &z[..4], history: &z[..4] }, false).unwrap();
        assert!(out.r_u.norm() == 0.0 && out.r_phi.norm() == 0.0 && out.r_d.norm() == 0.0);
        let phi = [4.0; 4];
        let out = evaluate_element(&ctx, &cache, 0, &ElementFields { u: &z, phi: &phi, d: &z[..4], history: &z[..4] }, false).unwrap();
        assert!(out.r_phi.norm() < 1e-14);
    }

    #[test]
    fn broken_element_keeps_residual_stiffness() {
        let (cache, m) = single();
        let e = m.elasticity(2);
        let ctx = ElementContext { dim: 2, nen: 4, material: &m, elasticity: &e };
        let z = [0.0; 8];
        let one = [1.0; 4];
        let fields = |d: &'static [f64]| ElementFields { u: &z, phi: &z[..4], d, history: &z[..4] };
        let intact = evaluate_element(&ctx, &cache, 0, &fields(&[0.0; 4]), true).unwrap().k_u.unwrap();
        let broken = evaluate_element(&ctx, &cache, 0, &ElementFields { d: &one, ..fields(&[0.0; 4]) }, true).unwrap().k_u.unwrap();
        assert!((broken - &intact * (m.eps_reg / (1.0 + m.eps_reg))).norm() <= 1e-12 * intact.norm() * m.eps_reg);
    }

    #[test]
    fn damage_stiffness_bounded_below_by_mass() {
        let (cache, m) = single();
        let e = m.elasticity(2);
        let ctx = ElementContext { dim: 2, nen: 4, material: &m, elasticity: &e };
        let z = [0.0; 8];
        let h = [1e3, 2e3, 0.0, 5e2];
        let pts = cache.element_points(0);
        let kd = evaluate_element(&ctx, &cache, 0, &ElementFields { u: &z, phi: &z[..4], d: &z[..4], history: &h }, true).unwrap().k_d.unwrap();
        let mut mass = DMatrix::zeros(4, 4);
        for p in pts {
            let n = DVector::from_column_slice(&p.n[..4]);
            mass += &n * n.transpose() * p.weight;
        }
        let lower = m.g_c / m.ell * mass.symmetric_eigenvalues().min();
        assert!(kd.clone().symmetric_eigenvalues().min() >= lower * (1.0 - 1e-12));
        assert!((kd.clone() - kd.transpose()).norm() < 1e-12 * kd.norm());
    }

    #[test]
    fn damage_operator_has_no_positive_coupling_on_long_elements() {
        let mesh = build_structured_mesh(&GridSpec { axes: vec![AxisSpec::uniform(1.0, 1.0), AxisSpec::uniform(4.0, 4.0)], ..GridSpec::rectangle(1.0, 1.0, 1.0, 0.1) }).unwrap();
        let cache = IntegrationCache::new(&mesh).unwrap();
        let m = MaterialPoint::isotropic(2e9, 0.3, 50.0, 0.2, 3.0);
        let e = m.elasticity(2);
        let ctx = ElementContext { dim: 2, nen: 4, material: &m, elasticity: &e };
        let z = [0.0; 8];
        let h = [4e3, 1e2, 0.0, 7e2];
        let kd = evaluate_element(&ctx, &cache, 0, &ElementFields { u: &z, phi: &z[..4], d: &z[..4], history: &h }, true)
            .unwrap()
            .k_d
            .unwrap();
        for a in 0..4 {
            for b in 0..4 {
                assert!(a == b || kd[(a, b)] <= 0.0, "positive coupling {a},{b}: {}", kd[(a, b)]);
            }
        }
    }
}
