//! Gated graphene sheet: chemical potential and surface conductivity.
//!
//! The sheet sits in a parallel-plate capacitor (gap d, relative permittivity
//! eps_r), biased to carrier density n0. A voltage V across the plates shifts
//! the chemical potential to first order,
//!
//!   mu_c(V) = mu' + mu'' V,   mu' = hbar Vf sqrt(pi n0),
//!                             mu'' = hbar Vf C / (q sqrt(pi n0)),  C = eps0 eps_r / d,
//!
//! and the sheet conductivity splits the same way, sigma_s = sigma' + sigma'' V.
//! Both sigma terms come from the interband + intraband response evaluated at
//! the complex frequency Omega = omega/(2 pi) + i/tau. That combination is kept
//! exactly as printed in the source expressions; `FrequencyConvention::Angular`
//! switches to Omega = omega + i/tau for comparison.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::constants::{EPS_0, HBAR, K_B, Q_E};
use crate::error::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Sheet material and electrostatic environment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrapheneParams {
    /// Carrier sheet density (1/m^2).
    pub n0: f64,
    /// Transport relaxation time (s).
    pub tau: f64,
    /// Temperature (K).
    pub temperature: f64,
    /// Fermi velocity (m/s).
    pub fermi_velocity: f64,
    /// Relative permittivity of the gap filler.
    pub eps_r: f64,
    /// Plate separation (m).
    pub plate_gap: f64,
}

impl GrapheneParams {
    /// Capacitance per unit area, C = eps0 eps_r / d (F/m^2).
    pub fn capacitance(&self) -> f64 {
        EPS_0 * self.eps_r / self.plate_gap
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            (self.n0, "n0"),
            (self.tau, "tau"),
            (self.temperature, "temperature"),
            (self.fermi_velocity, "fermi_velocity"),
            (self.eps_r, "eps_r"),
            (self.plate_gap, "plate_gap"),
        ];
        for (value, name) in fields {
            if !(value > 0.0) || !value.is_finite() {
                return Err(Error::Domain {
                    module: "material",
                    message: format!("{name} must be positive and finite, got {value}"),
                });
            }
        }
        Ok(())
    }
}

/// Which complex frequency enters the conductivity formulas.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum FrequencyConvention {
    /// Omega = omega/(2 pi) + i/tau, the combination as printed.
    #[default]
    AsPrinted,
    /// Omega = omega + i/tau.
    Angular,
}

/// First-order expansion mu_c(V) = mu_prime + mu_dprime * V.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChemicalPotential {
    /// Bias-free chemical potential (J).
    pub mu_prime: f64,
    /// Voltage sensitivity (J/V).
    pub mu_dprime: f64,
}

impl ChemicalPotential {
    /// |mu'' V| / mu' for a reference voltage; the linearization is trusted
    /// while this stays well below 1.
    pub fn validity_ratio(&self, v_ref: f64) -> f64 {
        (self.mu_dprime * v_ref / self.mu_prime).abs()
    }
}

/// First-order expansion sigma_s(V) = sigma_prime + sigma_dprime * V.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SheetConductivity {
    /// Unbiased sheet conductivity (S).
    pub sigma_prime: Complex64,
    /// Voltage sensitivity (S/V).
    pub sigma_dprime: Complex64,
}

impl SheetConductivity {
    /// |sigma'' V| / |sigma'| for a reference voltage.
    pub fn validity_ratio(&self, v_ref: f64) -> f64 {
        (self.sigma_dprime * v_ref).norm() / self.sigma_prime.norm()
    }
}

/// ln(1 + e^(-x)), stable for the huge degeneracy ratios mu'/(kB T) that show
/// up at millikelvin temperatures. Above x = 700 the result underflows f64
/// entirely and is returned as 0.
pub fn ln_one_plus_exp_neg(x: f64) -> f64 {
    if x > 700.0 {
        0.0
    } else if x >= 0.0 {
        (-x).exp().ln_1p()
    } else {
        -x + x.exp().ln_1p()
    }
}

/// Chemical potential expansion for a gated sheet.
pub fn chemical_potential(params: &GrapheneParams) -> Result<ChemicalPotential> {
    params.validate()?;
    let root = (std::f64::consts::PI * params.n0).sqrt();
    let mu_prime = HBAR * params.fermi_velocity * root;
    let mu_dprime = HBAR * params.fermi_velocity * params.capacitance() / (Q_E * root);
    Ok(ChemicalPotential {
        mu_prime,
        mu_dprime,
    })
}

fn omega_term(omega: f64, tau: f64, convention: FrequencyConvention) -> Complex64 {
    match convention {
        FrequencyConvention::AsPrinted => {
            Complex64::new(omega / (2.0 * std::f64::consts::PI), 1.0 / tau)
        }
        FrequencyConvention::Angular => Complex64::new(omega, 1.0 / tau),
    }
}

/// Sheet conductivity expansion at angular frequency omega.
///
/// sigma' adds the interband log term and the intraband Drude-like term;
/// sigma'' is the corresponding voltage derivative through mu_c(V). Each term
/// is checked finite so an overflow is reported with its origin instead of
/// propagating NaN downstream.
pub fn conductivity(
    params: &GrapheneParams,
    mu: &ChemicalPotential,
    omega: f64,
    convention: FrequencyConvention,
) -> Result<SheetConductivity> {
    params.validate()?;
    if !(omega > 0.0) || !omega.is_finite() {
        return Err(Error::Domain {
            module: "material",
            message: format!("omega must be positive and finite, got {omega}"),
        });
    }
    let kt = K_B * params.temperature;
    let w = omega_term(omega, params.tau, convention);
    let wh = w * HBAR;
    let q2 = Q_E * Q_E;
    let pi = std::f64::consts::PI;

    // Interband: (i q^2 / 4 pi hbar) ln((2 mu' - Omega hbar)/(2 mu' + Omega hbar))
    let inter = I * q2 / (4.0 * pi * HBAR) * ((2.0 * mu.mu_prime - wh) / (2.0 * mu.mu_prime + wh)).ln();
    check_finite(inter, "sigma' interband term")?;

    // Intraband: (i q^2 kB T / pi hbar^2 Omega) (mu'/kB T + 2 ln(1 + e^(-mu'/kB T)))
    let x = mu.mu_prime / kt;
    let intra = I * q2 * kt / (pi * HBAR * HBAR * w) * (x + 2.0 * ln_one_plus_exp_neg(x));
    check_finite(intra, "sigma' intraband term")?;

    // Voltage derivative, interband: (i q^2 / pi hbar) Omega hbar / (4 mu'^2 - Omega^2 hbar^2) mu''
    let d_inter =
        I * q2 / (pi * HBAR) * (wh / (4.0 * mu.mu_prime * mu.mu_prime - wh * wh)) * mu.mu_dprime;
    check_finite(d_inter, "sigma'' interband term")?;

    // Voltage derivative, intraband: (i q^2 kB T / pi hbar^2 Omega) tanh(mu'/2 kB T) mu''/kB T
    let d_intra =
        I * q2 * kt / (pi * HBAR * HBAR * w) * (mu.mu_prime / (2.0 * kt)).tanh() * (mu.mu_dprime / kt);
    check_finite(d_intra, "sigma'' intraband term")?;

    Ok(SheetConductivity {
        sigma_prime: inter + intra,
        sigma_dprime: d_inter + d_intra,
    })
}

fn check_finite(z: Complex64, context: &'static str) -> Result<()> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain {
            module: "material",
            message: format!("non-finite {context}: {z}"),
        })
    }
}
