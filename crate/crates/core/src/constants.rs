//! Physical constants used across the crate.
//!
//! CODATA values to 9 significant digits. The free-space impedance is kept at
//! the round 377 ohm that the dispersion relation and the conductivity
//! perturbation are calibrated against; do not swap in sqrt(mu0/eps0) here.

/// Reduced Planck constant (J s).
pub const HBAR: f64 = 1.054571817e-34;

/// Elementary charge (C).
pub const Q_E: f64 = 1.602176634e-19;

/// Boltzmann constant (J/K).
pub const K_B: f64 = 1.380649e-23;

/// Vacuum permittivity (F/m).
pub const EPS_0: f64 = 8.8541878128e-12;

/// Vacuum permeability (N/A^2).
pub const MU_0: f64 = 1.25663706212e-6;

/// Speed of light in vacuum (m/s).
pub const C_0: f64 = 299_792_458.0;

/// Free-space wave impedance (ohm), round value used by the dispersion relation.
pub const Z_0: f64 = 377.0;
