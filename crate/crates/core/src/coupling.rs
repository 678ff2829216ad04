//! Conversion rates between the microwave drive and the optical sidebands.
//!
//! A microwave photon on the plates is worth a voltage V = sqrt(2 hbar
//! omega_m / (C A_r)); through the per-volt permittivity shift of the guide
//! that voltage couples the pump to each sideband. The rates fold in the
//! phase-mismatch walk-off along the guide (a complex sinc, since beta is
//! lossy), the transverse overlap of the mode pair, and the stored-energy
//! normalization of each mode.

use num_complex::Complex64;

use crate::constants::HBAR;
use crate::error::{Error, Result};
use crate::waveguide::SppMode;

/// Capacitor plate geometry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Geometry {
    /// Guide length along propagation (m).
    pub length: f64,
    /// Plate width (m).
    pub width: f64,
    /// Plate separation (m).
    pub gap: f64,
    /// Plate area, length * width (m^2).
    pub area: f64,
    /// Capacitance per unit area (F/m^2).
    pub capacitance: f64,
}

impl Geometry {
    pub fn new(length: f64, width: f64, gap: f64, eps_r: f64) -> Result<Geometry> {
        for (value, name) in [
            (length, "length"),
            (width, "width"),
            (gap, "gap"),
            (eps_r, "eps_r"),
        ] {
            if !(value > 0.0) || !value.is_finite() {
                return Err(Error::Domain {
                    module: "coupling",
                    message: format!("{name} must be positive and finite, got {value}"),
                });
            }
        }
        Ok(Geometry {
            length,
            width,
            gap,
            area: length * width,
            capacitance: crate::constants::EPS_0 * eps_r / gap,
        })
    }
}

/// Conversion rates and the phase mismatches they were built from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingRates {
    /// Pump <-> upper-sideband rate (rad/s).
    pub g2: Complex64,
    /// Pump <-> lower-sideband rate (rad/s).
    pub g3: Complex64,
    /// beta_pump - beta_upper (rad/m).
    pub delta_beta_12: Complex64,
    /// beta_lower - beta_pump (rad/m).
    pub delta_beta_31: Complex64,
}

/// Single-photon microwave voltage scale sqrt(2 hbar omega_m / (C A_r)).
pub fn vacuum_voltage(omega_m: f64, capacitance: f64, area: f64) -> f64 {
    (2.0 * HBAR * omega_m / (capacitance * area)).sqrt()
}

/// sin(z)/z continued through z = 0.
///
/// Below |z| = 1e-4 the direct quotient loses digits, so the Taylor form
/// 1 - z^2/6 + z^4/120 takes over (next term is z^6/5040 ~ 1e-28 there).
pub fn complex_sinc(z: Complex64) -> Complex64 {
    if z.norm() < 1e-4 {
        let z2 = z * z;
        Complex64::new(1.0, 0.0) - z2 / 6.0 + z2 * z2 / 120.0
    } else {
        z.sin() / z
    }
}

fn sideband_rate(
    pump: &SppMode,
    side: &SppMode,
    delta_beta: Complex64,
    geom: &Geometry,
    omega_m: f64,
    overlap: Complex64,
) -> Result<Complex64> {
    let phase = delta_beta * geom.length / 2.0;
    let radicand = 2.0 * pump.omega * side.omega * HBAR * omega_m
        / (geom.capacitance * geom.area * pump.eps_eff.re * side.eps_eff.re);
    if !(radicand > 0.0) || !radicand.is_finite() {
        return Err(Error::Domain {
            module: "coupling",
            message: format!("rate radicand is not positive: {radicand}"),
        });
    }
    Ok(0.5
        * side.eps_eff_per_volt
        * complex_sinc(phase)
        * (Complex64::new(0.0, 1.0) * phase).exp()
        * radicand.sqrt()
        * overlap
        / (pump.xi * side.xi).sqrt())
}

/// Both conversion rates at a sideband splitting omega_m.
///
/// The modes must sit on the sideband grid: omega_upper = omega_pump +
/// omega_m and omega_lower = omega_pump - omega_m. The mismatch arguments use
/// the unperturbed beta of each mode; the voltage-driven part of beta is the
/// interaction itself and does not belong in the phase bookkeeping.
pub fn conversion_rates(
    pump: &SppMode,
    upper: &SppMode,
    lower: &SppMode,
    geom: &Geometry,
    omega_m: f64,
    i12: Complex64,
    i13: Complex64,
) -> Result<CouplingRates> {
    if !(omega_m > 0.0) || !omega_m.is_finite() {
        return Err(Error::Domain {
            module: "coupling",
            message: format!("omega_m must be positive and finite, got {omega_m}"),
        });
    }
    let scale = pump.omega;
    if ((upper.omega - pump.omega - omega_m) / scale).abs() > 1e-9
        || ((lower.omega - pump.omega + omega_m) / scale).abs() > 1e-9
    {
        return Err(Error::Domain {
            module: "coupling",
            message: "sideband frequencies must be pump +/- omega_m".into(),
        });
    }
    let delta_beta_12 = pump.beta - upper.beta;
    let delta_beta_31 = lower.beta - pump.beta;
    let g2 = sideband_rate(pump, upper, delta_beta_12, geom, omega_m, i12)?;
    let g3 = sideband_rate(pump, lower, delta_beta_31, geom, omega_m, i13)?;
    Ok(CouplingRates {
        g2,
        g3,
        delta_beta_12,
        delta_beta_31,
    })
}
