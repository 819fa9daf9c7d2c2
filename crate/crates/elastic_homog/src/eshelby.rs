use tensorlab::voigt::FullTensor4;
use tensorlab::{Tensor4Voigt, TensorKind};

use crate::ElasticError;

/// Aspect ratios closer to one than this use the sphere closed form.
const SPHERE_TOLERANCE: f64 = 1e-6;

fn set_sym(t: &mut FullTensor4, i: usize, j: usize, k: usize, l: usize, v: f64) {
    for (a, b) in [(i, j), (j, i)] {
        for (c, d) in [(k, l), (l, k)] {
            t[a][b][c][d] = v;
        }
    }
}

/// Interior Eshelby tensor of a prolate spheroid with semi-axes `(1, 1, κ)`
/// in an isotropic matrix with Poisson ratio `nu`. The symmetry axis is the
/// local 3-axis. Returned as a strain map.
pub fn eshelby_elastic(kappa: f64, nu: f64) -> Result<Tensor4Voigt, ElasticError> {
    if !(kappa.is_finite() && kappa >= 1.0) {
        return Err(ElasticError::Domain(format!("aspect ratio {kappa}")));
    }
    if !(nu > -1.0 && nu < 0.5) {
        return Err(ElasticError::Domain(format!("Poisson ratio {nu}")));
    }
    let mut s = [[[[0.0; 3]; 3]; 3]; 3];
    if kappa - 1.0 < SPHERE_TOLERANCE {
        let d = 15.0 * (1.0 - nu);
        let normal = (7.0 - 5.0 * nu) / d;
        let cross = (5.0 * nu - 1.0) / d;
        let shear = (4.0 - 5.0 * nu) / d;
        for i in 0..3 {
            for j in 0..3 {
                set_sym(&mut s, i, i, j, j, if i == j { normal } else { cross });
                if i < j {
                    set_sym(&mut s, i, j, i, j, shear);
                }
            }
        }
        return Ok(Tensor4Voigt::from_full(&s, TensorKind::StrainMap));
    }

    // Components in the axial/transverse notation: `a` axial, `t`, `u` transverse.
    let a = kappa;
    let a2 = a * a;
    let m = a2 - 1.0;
    let g = a / m.powf(1.5) * (a * m.sqrt() - a.acosh());
    let q = 1.0 - 2.0 * nu;
    let c = 1.0 / (1.0 - nu);

    let s_aaaa = 0.5 * c * (q + (3.0 * a2 - 1.0) / m - (q + 3.0 * a2 / m) * g);
    let s_tttt = 3.0 / 8.0 * c * a2 / m + 0.25 * c * (q - 9.0 / (4.0 * m)) * g;
    let s_ttuu = 0.25 * c * (a2 / (2.0 * m) - (q + 3.0 / (4.0 * m)) * g);
    let s_ttaa = -0.5 * c * a2 / m + 0.25 * c * (3.0 * a2 / m - q) * g;
    let s_aatt = -0.5 * c * (q + 1.0 / m) + 0.5 * c * (q + 3.0 / (2.0 * m)) * g;
    let s_tutu = 0.25 * c * (a2 / (2.0 * m) + (q - 3.0 / (4.0 * m)) * g);
    let s_tata = 0.25 * c * (q - (a2 + 1.0) / m - 0.5 * (q - 3.0 * (a2 + 1.0) / m) * g);

    set_sym(&mut s, 2, 2, 2, 2, s_aaaa);
    for t in 0..2 {
        set_sym(&mut s, t, t, t, t, s_tttt);
        set_sym(&mut s, t, t, 1 - t, 1 - t, s_ttuu);
        set_sym(&mut s, t, t, 2, 2, s_ttaa);
        set_sym(&mut s, 2, 2, t, t, s_aatt);
        set_sym(&mut s, t, 2, t, 2, s_tata);
    }
    set_sym(&mut s, 0, 1, 0, 1, s_tutu);
    Ok(Tensor4Voigt::from_full(&s, TensorKind::StrainMap))
}
