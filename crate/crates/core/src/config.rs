//! Run configuration: one JSON document, four blocks, unknown keys rejected.
//!
//! Every field has a default, so `{}` is a complete configuration describing
//! the baseline device. Defaults that are assumptions rather than measured
//! numbers (tau, Gamma_m) are called out on the field.

use serde::{Deserialize, Serialize};

use crate::dynamics::{B0Convention, Method, PumpLetter};
use crate::error::{Error, Result};
use crate::material::{FrequencyConvention, GrapheneParams};
use crate::waveguide::SppMode;

/// Graphene sheet and gap dielectric.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MaterialBlock {
    /// Sheet carrier density (1/m^2).
    pub n0: f64,
    /// Scattering relaxation time (s). Assumed value, not a measured one.
    pub tau: f64,
    /// Temperature (K).
    #[serde(rename = "T")]
    pub temperature: f64,
    /// Fermi velocity (m/s).
    #[serde(rename = "Vf")]
    pub fermi_velocity: f64,
    /// Relative permittivity of the gap filler.
    pub eps_r: f64,
}

impl Default for MaterialBlock {
    fn default() -> Self {
        Self {
            n0: 1e18,
            tau: 0.5e-12,
            temperature: 3e-3,
            fermi_velocity: 1e6,
            eps_r: 1.0,
        }
    }
}

/// Capacitor plate geometry. The sheet sits halfway between the plates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeometryBlock {
    /// Interaction length (m).
    #[serde(rename = "L")]
    pub length: f64,
    /// Plate width (m).
    #[serde(rename = "W")]
    pub width: f64,
    /// Plate separation (m).
    #[serde(rename = "d")]
    pub gap: f64,
}

impl Default for GeometryBlock {
    fn default() -> Self {
        Self {
            length: 2.7e-6,
            width: 1e-6,
            gap: 1e-6,
        }
    }
}

/// Optical pump, microwave drive, and the conventions that fix their phases.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DriveBlock {
    /// Pump frequency (Hz).
    pub f1_hz: f64,
    /// Microwave frequency (Hz).
    pub fm_hz: f64,
    /// Pump photon number |A|^2.
    pub pump_photons: f64,
    /// Initial microwave photon number.
    #[serde(rename = "Nm")]
    pub microwave_photons: f64,
    /// Microwave decay rate (1/s). Assumed value, not a measured one.
    #[serde(rename = "Gamma_m")]
    pub gamma_m: f64,
    pub b0_convention: B0Convention,
    pub pump_letter: PumpLetter,
    pub frequency_convention: FrequencyConvention,
}

impl Default for DriveBlock {
    fn default() -> Self {
        Self {
            f1_hz: 193e12,
            fm_hz: 45e9,
            pump_photons: 1e6,
            microwave_photons: 1e4,
            gamma_m: 1e6,
            b0_convention: B0Convention::default(),
            pump_letter: PumpLetter::default(),
            frequency_convention: FrequencyConvention::default(),
        }
    }
}

/// Integrator choice and step-refinement policy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NumericsBlock {
    pub method: Method,
    /// Starting step for the refinement loop (s). Omit for t_end / 100.
    pub dt0: Option<f64>,
    /// Relative change of the witness between refinements that accepts a step.
    pub convergence_target: f64,
    /// Record the full moment trajectory, not just the endpoint.
    pub emit_trajectory: bool,
}

impl Default for NumericsBlock {
    fn default() -> Self {
        Self {
            method: Method::default(),
            dt0: None,
            convergence_target: 1e-6,
            emit_trajectory: false,
        }
    }
}

/// The full run configuration.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub material: MaterialBlock,
    pub geometry: GeometryBlock,
    pub drive: DriveBlock,
    pub numerics: NumericsBlock,
}

fn positive(value: f64, name: &str) -> Result<()> {
    if !(value > 0.0) || !value.is_finite() {
        return Err(Error::Config(format!(
            "{name} must be positive and finite, got {value}"
        )));
    }
    Ok(())
}

fn nonnegative(value: f64, name: &str) -> Result<()> {
    if !(value >= 0.0) || !value.is_finite() {
        return Err(Error::Config(format!(
            "{name} must be nonnegative and finite, got {value}"
        )));
    }
    Ok(())
}

impl RunConfig {
    pub fn from_json_str(text: &str) -> Result<Self> {
        let config: RunConfig =
            serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_path(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json_str(&text)
    }

    pub fn validate(&self) -> Result<()> {
        positive(self.material.n0, "material.n0")?;
        positive(self.material.tau, "material.tau")?;
        positive(self.material.temperature, "material.T")?;
        positive(self.material.fermi_velocity, "material.Vf")?;
        positive(self.material.eps_r, "material.eps_r")?;
        positive(self.geometry.length, "geometry.L")?;
        positive(self.geometry.width, "geometry.W")?;
        positive(self.geometry.gap, "geometry.d")?;
        positive(self.drive.f1_hz, "drive.f1_hz")?;
        positive(self.drive.fm_hz, "drive.fm_hz")?;
        if self.drive.fm_hz >= self.drive.f1_hz {
            return Err(Error::Config(format!(
                "drive.fm_hz ({}) must stay below drive.f1_hz ({})",
                self.drive.fm_hz, self.drive.f1_hz
            )));
        }
        nonnegative(self.drive.pump_photons, "drive.pump_photons")?;
        nonnegative(self.drive.microwave_photons, "drive.Nm")?;
        nonnegative(self.drive.gamma_m, "drive.Gamma_m")?;
        if let Some(dt0) = self.numerics.dt0 {
            positive(dt0, "numerics.dt0")?;
        }
        positive(self.numerics.convergence_target, "numerics.convergence_target")?;
        Ok(())
    }

    /// Sheet parameters with the plate separation folded in.
    pub fn material_params(&self) -> GrapheneParams {
        GrapheneParams {
            n0: self.material.n0,
            tau: self.material.tau,
            temperature: self.material.temperature,
            fermi_velocity: self.material.fermi_velocity,
            eps_r: self.material.eps_r,
            plate_gap: self.geometry.gap,
        }
    }

    /// The three optical carriers: pump, upper sideband, lower sideband.
    pub fn optical_frequencies(&self) -> [f64; 3] {
        let f1 = self.drive.f1_hz;
        let fm = self.drive.fm_hz;
        [f1, f1 + fm, f1 - fm]
    }

    /// Solves all three optical modes at the configured operating point.
    pub fn solve_modes(&self) -> Result<[SppMode; 3]> {
        let params = self.material_params();
        let mu = crate::material::chemical_potential(&params)?;
        let convention = self.drive.frequency_convention;
        let [f1, f2, f3] = self.optical_frequencies();
        Ok([
            SppMode::solve(&params, &mu, f1, convention)?,
            SppMode::solve(&params, &mu, f2, convention)?,
            SppMode::solve(&params, &mu, f3, convention)?,
        ])
    }
}
