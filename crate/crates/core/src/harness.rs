//! End-to-end orchestration: a configuration goes in, the witness value and
//! its diagnostics come out. Sweeps run the same pipeline across a grid, and
//! the named presets reproduce the figure-style parameter scans.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::coupling::{conversion_rates, vacuum_voltage, Geometry};
use crate::dynamics::{
    build_system, convergence_check, initial_state, integrate, integrate_final, MomentState,
    SystemParams,
};
use crate::entanglement::duan_lambda;
use crate::error::{Error, Result};
use crate::material::{chemical_potential, conductivity};
use crate::waveguide::{mode_overlap, SppMode};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Serialization-friendly complex number.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexValue {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for ComplexValue {
    fn from(z: Complex64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

/// Propagation data for one optical carrier.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeSummary {
    /// "pump", "upper", or "lower".
    pub role: String,
    pub f_hz: f64,
    pub re_beta: f64,
    pub im_beta: f64,
    pub re_alpha: f64,
    pub im_alpha: f64,
    pub eps_eff: ComplexValue,
    /// Energy decay rate 2 v_g Im(beta) (1/s).
    pub gamma: f64,
    /// Group velocity (m/s).
    pub v_g: f64,
    /// Stored-energy correction factor.
    pub xi: f64,
}

impl ModeSummary {
    fn new(role: &str, mode: &SppMode) -> Self {
        Self {
            role: role.to_string(),
            f_hz: mode.f_hz,
            re_beta: mode.beta.re,
            im_beta: mode.beta.im,
            re_alpha: mode.alpha.re,
            im_alpha: mode.alpha.im,
            eps_eff: mode.eps_eff.into(),
            gamma: mode.gamma,
            v_g: mode.v_g,
            xi: mode.xi,
        }
    }
}

/// Perturbative-validity ratios and anything worth flagging.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    /// |mu'' V_ref / mu'| at the drive voltage scale.
    pub mu_validity_ratio: f64,
    /// |sigma'' V_ref| / |sigma'| at the pump frequency.
    pub sigma_validity_ratio: f64,
    /// |Im<B^dag B>| / |Re<B^dag B>| at t_end; exact dynamics keep this 0.
    pub bdb_imag_rel: f64,
    pub warnings: Vec<String>,
}

/// Everything a single run produces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    /// Witness value Re(det); negative certifies entanglement.
    pub lambda: f64,
    pub lambda_imag: f64,
    pub entangled: bool,
    /// Lower-sideband occupation at t_end.
    pub n3: f64,
    /// Upper-sideband occupation is not evolved by this moment set.
    pub n2_proxy: Option<f64>,
    pub t_end_s: f64,
    /// Accepted integration step.
    pub dt_s: f64,
    /// Relative witness change at the accepted refinement.
    pub convergence_delta: f64,
    /// |<A3^dag B^dag> - <A3 B>*| at t_end.
    pub conjugate_drift: f64,
    pub g2: ComplexValue,
    pub g3: ComplexValue,
    pub modes: Vec<ModeSummary>,
    pub diagnostics: Diagnostics,
    pub config: RunConfig,
    pub version: String,
}

/// A run result plus the trajectory when one was requested.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub result: RunResult,
    pub trajectory: Option<Vec<MomentState>>,
}

/// Runs the full pipeline on one configuration.
pub fn run_single(config: &RunConfig) -> Result<RunOutput> {
    config.validate()?;
    let params = config.material_params();
    let mu = chemical_potential(&params)?;
    let geom = Geometry::new(
        config.geometry.length,
        config.geometry.width,
        config.geometry.gap,
        config.material.eps_r,
    )?;
    let convention = config.drive.frequency_convention;
    let [f1, f2, f3] = config.optical_frequencies();
    let pump = SppMode::solve(&params, &mu, f1, convention)?;
    let upper = SppMode::solve(&params, &mu, f2, convention)?;
    let lower = SppMode::solve(&params, &mu, f3, convention)?;

    let omega_m = 2.0 * std::f64::consts::PI * config.drive.fm_hz;
    let i12 = mode_overlap(&pump, &upper)?;
    let i13 = mode_overlap(&pump, &lower)?;
    let rates = conversion_rates(&pump, &upper, &lower, &geom, omega_m, i12, i13)?;

    let sys_params = SystemParams {
        g2: rates.g2,
        g3: rates.g3,
        gamma2: upper.gamma,
        gamma3: lower.gamma,
        gamma_m: config.drive.gamma_m,
        pump_amplitude: config.drive.pump_photons.sqrt(),
        n_m: config.drive.microwave_photons,
        b0_convention: config.drive.b0_convention,
        pump_letter: config.drive.pump_letter,
    };
    let system = build_system(&sys_params)?;
    let state0 = initial_state(&sys_params)?;

    // interaction window: one transit of the pump envelope
    let t_end = geom.length / pump.v_g;
    if !(t_end > 0.0) || !t_end.is_finite() {
        return Err(Error::Domain {
            module: "harness",
            message: format!(
                "transit time must be positive and finite, got {t_end} (v_g = {})",
                pump.v_g
            ),
        });
    }
    let dt0 = config.numerics.dt0.unwrap_or(t_end / 100.0);
    let method = config.numerics.method;
    let conv = convergence_check(
        &system,
        &state0,
        t_end,
        dt0,
        config.numerics.convergence_target,
        method,
        |s| duan_lambda(s).lambda,
    )?;

    let (final_state, trajectory) = if config.numerics.emit_trajectory {
        let traj = integrate(&system, &state0, t_end, conv.dt, method)?;
        let last = *traj.last().expect("trajectory holds at least the endpoint");
        (last, Some(traj))
    } else {
        (integrate_final(&system, &state0, t_end, conv.dt, method)?, None)
    };
    let duan = duan_lambda(&final_state);

    let v_ref = vacuum_voltage(omega_m, geom.capacitance, geom.area)
        * config.drive.microwave_photons.max(1.0).sqrt();
    let sigma = conductivity(&params, &mu, 2.0 * std::f64::consts::PI * f1, convention)?;
    let mu_validity_ratio = mu.validity_ratio(v_ref);
    let sigma_validity_ratio = sigma.validity_ratio(v_ref);
    let bdb = final_state.bdag_b();
    let bdb_imag_rel = if bdb.re == 0.0 && bdb.im == 0.0 {
        0.0
    } else {
        bdb.im.abs() / bdb.re.abs().max(f64::MIN_POSITIVE)
    };
    let mut warnings = Vec::new();
    if mu_validity_ratio > 0.1 {
        warnings.push(format!(
            "chemical-potential linearization ratio {mu_validity_ratio:.3e} exceeds 0.1"
        ));
    }
    if sigma_validity_ratio > 0.1 {
        warnings.push(format!(
            "conductivity linearization ratio {sigma_validity_ratio:.3e} exceeds 0.1"
        ));
    }
    if duan.lambda_imag.abs() > 1e-3 * duan.lambda.abs() {
        warnings.push(format!(
            "witness imaginary residue {:.3e} exceeds 1e-3 of |Re| = {:.3e}",
            duan.lambda_imag,
            duan.lambda.abs()
        ));
    }
    if bdb_imag_rel > 1e-3 {
        warnings.push(format!(
            "microwave occupation imaginary part ratio {bdb_imag_rel:.3e} exceeds 1e-3"
        ));
    }

    let result = RunResult {
        lambda: duan.lambda,
        lambda_imag: duan.lambda_imag,
        entangled: duan.entangled,
        n3: final_state.n3().re,
        n2_proxy: None,
        t_end_s: t_end,
        dt_s: conv.dt,
        convergence_delta: conv.delta,
        conjugate_drift: final_state.conjugate_drift(),
        g2: rates.g2.into(),
        g3: rates.g3.into(),
        modes: vec![
            ModeSummary::new("pump", &pump),
            ModeSummary::new("upper", &upper),
            ModeSummary::new("lower", &lower),
        ],
        diagnostics: Diagnostics {
            mu_validity_ratio,
            sigma_validity_ratio,
            bdb_imag_rel,
            warnings,
        },
        config: *config,
        version: VERSION.to_string(),
    };
    Ok(RunOutput { result, trajectory })
}

/// Which configuration field a sweep walks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    /// geometry.L (m)
    Length,
    /// drive.pump_photons
    Pump,
    /// drive.Nm
    Photons,
    /// drive.fm_hz
    Frequency,
}

impl SweepAxis {
    pub fn apply(self, base: &RunConfig, value: f64) -> RunConfig {
        let mut config = *base;
        match self {
            SweepAxis::Length => config.geometry.length = value,
            SweepAxis::Pump => config.drive.pump_photons = value,
            SweepAxis::Photons => config.drive.microwave_photons = value,
            SweepAxis::Frequency => config.drive.fm_hz = value,
        }
        config
    }

    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::Length => "length",
            SweepAxis::Pump => "pump",
            SweepAxis::Photons => "photons",
            SweepAxis::Frequency => "frequency",
        }
    }
}

impl std::str::FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "length" => Ok(SweepAxis::Length),
            "pump" => Ok(SweepAxis::Pump),
            "photons" => Ok(SweepAxis::Photons),
            "frequency" => Ok(SweepAxis::Frequency),
            other => Err(Error::Config(format!(
                "unknown sweep axis '{other}' (expected length, pump, photons, or frequency)"
            ))),
        }
    }
}

/// One grid point of a sweep. A failed point keeps its axis value and carries
/// the error text instead of a result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub axis_value: f64,
    pub result: Option<RunResult>,
    pub error: Option<String>,
}

/// Runs the pipeline at every grid point. Points are independent and run in
/// parallel; row order follows the grid.
pub fn sweep(base: &RunConfig, axis: SweepAxis, grid: &[f64]) -> Vec<SweepRow> {
    grid.par_iter()
        .map(|&value| {
            let config = axis.apply(base, value);
            match run_single(&config) {
                Ok(output) => SweepRow {
                    axis_value: value,
                    result: Some(output.result),
                    error: None,
                },
                Err(e) => SweepRow {
                    axis_value: value,
                    result: None,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect()
}

/// Evenly spaced grid, endpoints exact.
pub fn linear_grid(from: f64, to: f64, points: usize) -> Result<Vec<f64>> {
    check_grid(from, to, points)?;
    if points == 1 {
        return Ok(vec![from]);
    }
    let step = (to - from) / (points - 1) as f64;
    let mut grid: Vec<f64> = (0..points).map(|i| from + step * i as f64).collect();
    grid[points - 1] = to;
    Ok(grid)
}

/// Logarithmically spaced grid, endpoints exact.
pub fn log_grid(from: f64, to: f64, points: usize) -> Result<Vec<f64>> {
    check_grid(from, to, points)?;
    if !(from > 0.0) {
        return Err(Error::Config(format!(
            "log grid needs positive endpoints, got from = {from}"
        )));
    }
    if points == 1 {
        return Ok(vec![from]);
    }
    let (a, b) = (from.ln(), to.ln());
    let step = (b - a) / (points - 1) as f64;
    let mut grid: Vec<f64> = (0..points).map(|i| (a + step * i as f64).exp()).collect();
    grid[0] = from;
    grid[points - 1] = to;
    Ok(grid)
}

fn check_grid(from: f64, to: f64, points: usize) -> Result<()> {
    if points == 0 {
        return Err(Error::Config("grid needs at least one point".into()));
    }
    if !from.is_finite() || !to.is_finite() || to < from {
        return Err(Error::Config(format!(
            "grid endpoints must be finite with to >= from, got [{from}, {to}]"
        )));
    }
    Ok(())
}

/// Grid spacing rule for sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridScale {
    Linear,
    Log,
}

/// A per-curve parameter override on top of the base configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "parameter", content = "value")]
pub enum CurveOverride {
    FmHz(f64),
    PumpPhotons(f64),
}

impl CurveOverride {
    pub fn apply(self, base: &RunConfig) -> RunConfig {
        let mut config = *base;
        match self {
            CurveOverride::FmHz(v) => config.drive.fm_hz = v,
            CurveOverride::PumpPhotons(v) => config.drive.pump_photons = v,
        }
        config
    }

    /// Short deterministic label, safe inside file names.
    pub fn label(self) -> String {
        match self {
            CurveOverride::FmHz(v) => format!("fm_{}ghz", v / 1e9),
            CurveOverride::PumpPhotons(v) => format!("pump_{}m", v / 1e6),
        }
    }
}

/// What a named preset runs.
#[derive(Debug, Clone, PartialEq)]
pub enum PresetKind {
    /// Per-frequency mode table over the optical band.
    Dispersion { from_hz: f64, to_hz: f64, points: usize },
    /// Family of sweeps along one axis, one curve per override.
    Sweep {
        axis: SweepAxis,
        from: f64,
        to: f64,
        points: usize,
        scale: GridScale,
        curves: Vec<CurveOverride>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Preset {
    pub name: &'static str,
    pub kind: PresetKind,
}

pub const PRESET_NAMES: [&str; 9] = [
    "fig2", "fig3a", "fig3b", "fig4a", "fig4b", "fig5a", "fig5b", "fig6a", "fig6b",
];

/// Looks up a preset by name. Grid ranges are read off the corresponding
/// figure axes and are documented in the emitted metadata.
pub fn preset(name: &str) -> Option<Preset> {
    let fm = |values: [f64; 3]| values.map(CurveOverride::FmHz).to_vec();
    let pump = |values: [f64; 3]| values.map(CurveOverride::PumpPhotons).to_vec();
    let length_scan = |curves: Vec<CurveOverride>| PresetKind::Sweep {
        axis: SweepAxis::Length,
        from: 0.5e-6,
        to: 6e-6,
        points: 56,
        scale: GridScale::Linear,
        curves,
    };
    let pump_scan = |curves: Vec<CurveOverride>| PresetKind::Sweep {
        axis: SweepAxis::Pump,
        from: 1e6,
        to: 3e7,
        points: 48,
        scale: GridScale::Linear,
        curves,
    };
    let photon_scan = |curves: Vec<CurveOverride>| PresetKind::Sweep {
        axis: SweepAxis::Photons,
        from: 1e2,
        to: 1e4,
        points: 50,
        scale: GridScale::Log,
        curves,
    };
    let frequency_scan = |curves: Vec<CurveOverride>| PresetKind::Sweep {
        axis: SweepAxis::Frequency,
        from: 5e9,
        to: 120e9,
        points: 47,
        scale: GridScale::Linear,
        curves,
    };
    let kind = match name {
        "fig2" => PresetKind::Dispersion {
            from_hz: 150e12,
            to_hz: 250e12,
            points: 51,
        },
        "fig3a" | "fig3b" => length_scan(fm([5e9, 15e9, 45e9])),
        "fig4a" => pump_scan(fm([5e9, 15e9, 20e9])),
        "fig4b" => pump_scan(fm([60e9, 80e9, 90e9])),
        "fig5a" | "fig5b" => photon_scan(fm([5e9, 15e9, 45e9])),
        "fig6a" => frequency_scan(pump([9e6, 10.9e6, 12.9e6])),
        "fig6b" => frequency_scan(pump([1.9e7, 2.1e7, 2.4e7])),
        _ => return None,
    };
    Some(Preset {
        name: PRESET_NAMES
            .iter()
            .find(|&&n| n == name)
            .expect("kind match and name table agree"),
        kind,
    })
}

/// One curve of a preset sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveResult {
    pub label: String,
    pub overrides: CurveOverride,
    pub rows: Vec<SweepRow>,
}

/// Runs every curve of a sweep-style preset.
pub fn run_preset_sweep(
    base: &RunConfig,
    axis: SweepAxis,
    from: f64,
    to: f64,
    points: usize,
    scale: GridScale,
    curves: &[CurveOverride],
) -> Result<Vec<CurveResult>> {
    let grid = match scale {
        GridScale::Linear => linear_grid(from, to, points)?,
        GridScale::Log => log_grid(from, to, points)?,
    };
    curves
        .iter()
        .map(|&overrides| {
            let config = overrides.apply(base);
            Ok(CurveResult {
                label: overrides.label(),
                overrides,
                rows: sweep(&config, axis, &grid),
            })
        })
        .collect()
}

/// One row of the per-frequency mode table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DispersionRow {
    pub f_hz: f64,
    pub re_beta: f64,
    pub im_beta: f64,
    pub re_alpha: f64,
    pub gamma: f64,
    pub v_g: f64,
    pub xi: f64,
}

/// Solves the guided mode across a frequency grid.
pub fn dispersion_table(
    config: &RunConfig,
    from_hz: f64,
    to_hz: f64,
    points: usize,
) -> Result<Vec<DispersionRow>> {
    config.validate()?;
    let params = config.material_params();
    let mu = chemical_potential(&params)?;
    let convention = config.drive.frequency_convention;
    let grid = linear_grid(from_hz, to_hz, points)?;
    grid.par_iter()
        .map(|&f_hz| {
            let mode = SppMode::solve(&params, &mu, f_hz, convention)?;
            Ok(DispersionRow {
                f_hz,
                re_beta: mode.beta.re,
                im_beta: mode.beta.im,
                re_alpha: mode.alpha.re,
                gamma: mode.gamma,
                v_g: mode.v_g,
                xi: mode.xi,
            })
        })
        .collect()
}
