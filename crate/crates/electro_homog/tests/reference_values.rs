//! Values from an independent scalar re-implementation of the conductivity
//! model (dense quadrature, separate code path).

use approx::assert_relative_eq;
use elastic_homog::CompositeSpec;
use electro_homog::{effective_conductivity, piezoresistivity_coeffs, ElectroOptions};
use tensorlab::SymTensor2;

fn check(spec: &CompositeSpec, sigma: f64, lambda11: f64, lambda12: f64) {
    let st = effective_conductivity(spec, &SymTensor2::ZERO, &ElectroOptions::default()).unwrap();
    let p = piezoresistivity_coeffs(spec).unwrap();
    assert_relative_eq!(st.scalar_conductivity(), sigma, max_relative = 1e-3);
    assert_relative_eq!(1.0 / p.rho0, sigma, max_relative = 1e-3);
    assert_relative_eq!(p.lambda11, lambda11, max_relative = 2e-3);
    assert_relative_eq!(p.lambda12, lambda12, max_relative = 2e-3);
}

#[test]
fn reference_material_one_percent() {
    let spec = CompositeSpec::mwcnt_epoxy();
    let st = effective_conductivity(&spec, &SymTensor2::ZERO, &ElectroOptions::default()).unwrap();
    assert_relative_eq!(st.f_c, 2.2352e-3, max_relative = 1e-4);
    check(&spec, 0.1035, 1.078, 2.278);
}

#[test]
fn reference_material_four_percent() {
    check(&CompositeSpec::mwcnt_epoxy().with_volume_fraction(0.04), 1.0022, 0.675, 1.875);
}

#[test]
fn dog_bone_material() {
    let spec = CompositeSpec::dwcnt_dgeba();
    let st = effective_conductivity(&spec, &SymTensor2::ZERO, &ElectroOptions::default()).unwrap();
    assert_relative_eq!(st.scalar_conductivity(), 0.08996, max_relative = 1e-3);
}
