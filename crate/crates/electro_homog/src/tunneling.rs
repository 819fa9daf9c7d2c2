use std::f64::consts::PI;

use elastic_homog::CompositeSpec;

use crate::ElectroError;

pub const ELECTRON_MASS: f64 = 9.109_383_701_5e-31;
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
pub const PLANCK: f64 = 6.626_070_15e-34;

/// Geometry and barrier data for tunnelling between neighbouring fillers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TunnelingParams {
    /// Cut-off distance (m).
    pub d_c: f64,
    /// Barrier height (eV).
    pub barrier_ev: f64,
    /// Contact area (m²).
    pub contact_area: f64,
    /// Radius of the conducting core (m).
    pub core_radius: f64,
}

impl TunnelingParams {
    /// Contact area of a filler end cap and core radius of half the diameter.
    pub fn from_spec(spec: &CompositeSpec) -> Self {
        TunnelingParams {
            d_c: spec.d_c,
            barrier_ev: spec.lambda_barrier,
            contact_area: PI * spec.d_cnt * spec.d_cnt / 4.0,
            core_radius: 0.5 * spec.d_cnt,
        }
    }
}

/// Conduction mechanism between fillers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Channel {
    /// Electron hopping across the matrix (non-percolated fillers).
    Hopping,
    /// Conductive network of percolated fillers.
    Network,
}

/// Depolarisation factors `(S11, S33)` of a prolate spheroid of aspect ratio `s`.
pub fn eshelby_electrical(s: f64) -> Result<(f64, f64), ElectroError> {
    if !(s.is_finite() && s > 1.0) {
        return Err(ElectroError::Domain(format!("aspect ratio {s}")));
    }
    let m = s * s - 1.0;
    let s11 = s / (2.0 * m.powf(1.5)) * (s * m.sqrt() - s.acosh());
    Ok((s11, 1.0 - 2.0 * s11))
}

/// Tunnelling resistance across a gap `d` (Simmons' low-voltage formula).
pub fn tunneling_resistance(d: f64, tp: &TunnelingParams) -> Result<f64, ElectroError> {
    if !(d.is_finite() && d > 0.0) {
        return Err(ElectroError::Domain(format!("tunnelling distance {d}")));
    }
    let k = (2.0 * ELECTRON_MASS * tp.barrier_ev * ELEMENTARY_CHARGE).sqrt();
    let prefactor = d * PLANCK * PLANCK / (tp.contact_area * ELEMENTARY_CHARGE * ELEMENTARY_CHARGE * k);
    Ok(prefactor * (4.0 * PI * d * k / PLANCK).exp())
}

/// Conductive coating that represents tunnelling around a filler.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterphaseLayer {
    pub gap: f64,
    pub thickness: f64,
    pub conductivity: f64,
}

/// Coating thickness and conductivity for a conduction channel.
pub fn interphase_layer(channel: Channel, f_p: f64, f_c: f64, tp: &TunnelingParams) -> Result<InterphaseLayer, ElectroError> {
    let gap = match channel {
        Channel::Hopping => tp.d_c,
        Channel::Network => {
            if f_p < f_c {
                return Err(ElectroError::BelowThreshold { f_p, f_c });
            }
            tp.d_c * (f_c / f_p).cbrt()
        }
    };
    let r = tunneling_resistance(gap, tp)?;
    Ok(InterphaseLayer { gap, thickness: 0.5 * gap, conductivity: gap / (tp.contact_area * r) })
}

/// Transversely isotropic conductivities of a coated cylinder.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquivalentCylinder {
    pub longitudinal: f64,
    pub transverse: f64,
    /// Coated-to-bare volume ratio.
    pub volume_multiplier: f64,
}

/// Homogenises a core of radius `r_c` and length `l` coated by a layer of
/// thickness `t` and conductivity `sigma_int`.
pub fn equivalent_cylinder(
    sigma_long: f64,
    sigma_trans: f64,
    r_c: f64,
    l: f64,
    t: f64,
    sigma_int: f64,
) -> Result<EquivalentCylinder, ElectroError> {
    for (name, v) in [("core conductivity", sigma_long), ("core conductivity", sigma_trans), ("core radius", r_c), ("length", l)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(ElectroError::Domain(format!("{name} {v}")));
        }
    }
    if !(t >= 0.0 && sigma_int >= 0.0) {
        return Err(ElectroError::Domain(format!("coating t={t}, sigma={sigma_int}")));
    }
    if t == 0.0 {
        return Ok(EquivalentCylinder { longitudinal: sigma_long, transverse: sigma_trans, volume_multiplier: 1.0 });
    }
    let annulus = 2.0 * r_c * t + t * t;
    let longitudinal = (l + 2.0 * t) * sigma_int * (sigma_long * r_c * r_c + sigma_int * annulus)
        / (2.0 * sigma_long * r_c * r_c * t + 2.0 * sigma_int * annulus * t + sigma_int * l * (r_c + t).powi(2));
    let transverse = sigma_int / (l + 2.0 * t)
        * (l * (2.0 * r_c * r_c * sigma_trans + (sigma_trans + sigma_int) * annulus)
            / (2.0 * r_c * r_c * sigma_int + (sigma_trans + sigma_int) * annulus)
            + 2.0 * t);
    let volume_multiplier = (r_c + t).powi(2) * (l + 2.0 * t) / (r_c * r_c * l);
    Ok(EquivalentCylinder { longitudinal, transverse, volume_multiplier })
}
