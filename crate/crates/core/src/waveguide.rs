//! TM surface mode on the conductive sheet: dispersion, perturbation, and
//! transverse geometry.
//!
//! The guided field decays as e^(-alpha|x|) away from the sheet and carries
//!
//!   beta = k0 sqrt(1 - (2/(Z0 sigma_s))^2),   alpha = sqrt(beta^2 - eps_r k0^2).
//!
//! A voltage V on the plates perturbs the sheet conductivity and with it the
//! propagation constant, beta(V) = beta + beta_per_volt * V, which is the
//! handle the microwave drive uses to talk to the optical field. Everything
//! downstream (effective permittivity, group velocity, decay rate, the
//! stored-energy factor xi) is derived from beta and alpha here.
//!
//! Branch rules are fixed once: Re(beta) > 0 with Im(beta) >= 0 (forward and
//! lossy), Re(alpha) > 0 (bound). The principal square root is flipped when it
//! lands on the wrong sheet; if neither sign works the solver reports the
//! ambiguity instead of guessing.

use num_complex::Complex64;

use crate::constants::{C_0, EPS_0, MU_0, Z_0};
use crate::error::{Error, Result};
use crate::material::{
    conductivity, ChemicalPotential, FrequencyConvention, GrapheneParams, SheetConductivity,
};

/// One solved mode at a fixed optical frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SppMode {
    /// Optical frequency (Hz).
    pub f_hz: f64,
    /// Angular frequency (rad/s).
    pub omega: f64,
    /// Free-space propagation constant omega/c (rad/m).
    pub k0: f64,
    /// Relative permittivity of the surrounding filler.
    pub eps_r: f64,
    /// Unperturbed propagation constant (rad/m).
    pub beta: Complex64,
    /// Propagation-constant shift per volt of plate bias (rad/m/V).
    pub beta_per_volt: Complex64,
    /// Transverse decay constant (1/m).
    pub alpha: Complex64,
    /// (beta/k0)^2.
    pub eps_eff: Complex64,
    /// 2 beta beta_per_volt / k0^2, the permittivity shift per volt.
    pub eps_eff_per_volt: Complex64,
    /// Group velocity df/d(Re beta) (m/s).
    pub v_g: f64,
    /// Amplitude decay rate 2 v_g Im(beta) (1/s).
    pub gamma: f64,
    /// Stored-energy normalization factor (dimensionless, > 1/2).
    pub xi: f64,
}

/// Transverse profile integrals of one mode (integrated over both sides of
/// the sheet) and the resulting mode volume.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeProfileIntegrals {
    /// Integral of |D_y|^2 dx = 1/Re(alpha) (m).
    pub int_dy2: f64,
    /// Integral of (|D_x|^2 + |D_z|^2) dx (m / (rad s F/m)^2 folded in).
    pub int_dxz2: f64,
    /// Mode volume: plate area times int_dxz2.
    pub v_l: f64,
}

/// Forward-lossy branch of the sheet dispersion relation.
pub fn solve_dispersion(sigma_prime: Complex64, omega: f64) -> Result<Complex64> {
    if sigma_prime.norm() == 0.0 {
        return Err(Error::Domain {
            module: "waveguide",
            message: "dispersion needs a nonzero sheet conductivity".into(),
        });
    }
    let k0 = omega / C_0;
    let ratio = 2.0 / (Z_0 * sigma_prime);
    let principal = (1.0 - ratio * ratio).sqrt() * k0;
    let beta_ok = |z: Complex64| z.re > 0.0 && z.im >= 0.0;
    if beta_ok(principal) {
        Ok(principal)
    } else if beta_ok(-principal) {
        Ok(-principal)
    } else {
        Err(Error::BranchAmbiguity {
            context: "dispersion",
            root: principal,
        })
    }
}

/// Per-volt shift of the propagation constant,
/// beta_per_volt = beta / (1 - (Z0 sigma'/2)^2) * sigma''/sigma'.
pub fn perturbed_beta(beta: Complex64, sigma: &SheetConductivity) -> Result<Complex64> {
    if sigma.sigma_prime.norm() == 0.0 {
        return Err(Error::Domain {
            module: "waveguide",
            message: "perturbation needs a nonzero unperturbed conductivity".into(),
        });
    }
    let half = 0.5 * Z_0 * sigma.sigma_prime;
    let denom = 1.0 - half * half;
    if denom.norm() < 1e-12 {
        return Err(Error::SingularPerturbation {
            denom_abs: denom.norm(),
        });
    }
    Ok(beta / denom * (sigma.sigma_dprime / sigma.sigma_prime))
}

/// Bound-mode transverse decay constant, alpha = sqrt(beta^2 - eps_r k0^2).
pub fn transverse_alpha(beta: Complex64, k0: f64, eps_r: f64) -> Result<Complex64> {
    let alpha = (beta * beta - eps_r * k0 * k0).sqrt();
    if alpha.re > 0.0 {
        Ok(alpha)
    } else if (-alpha).re > 0.0 {
        Ok(-alpha)
    } else {
        Err(Error::NotConfined { alpha })
    }
}

/// (beta/k0)^2.
pub fn effective_permittivity(beta: Complex64, k0: f64) -> Complex64 {
    let r = beta / k0;
    r * r
}

/// Per-volt shift of the effective permittivity, 2 beta beta_per_volt / k0^2.
pub fn effective_permittivity_shift(beta: Complex64, beta_per_volt: Complex64, k0: f64) -> Complex64 {
    2.0 * beta * beta_per_volt / (k0 * k0)
}

/// Group velocity df/d(Re beta) by central differences in f.
///
/// The step starts at 1e-4 relative and is halved until two successive
/// estimates agree to 1e-6 relative; refinement is capped at 10 halvings.
/// `beta_re_of_f` evaluates Re(beta) at an arbitrary nearby frequency, so the
/// differentiation sees exactly the same solver chain as the center point.
pub fn group_velocity<F>(f_hz: f64, mut beta_re_of_f: F) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut h = 1e-4 * f_hz;
    let mut prev: Option<f64> = None;
    let mut last_delta = f64::INFINITY;
    for _ in 0..=10 {
        let hi = beta_re_of_f(f_hz + h)?;
        let lo = beta_re_of_f(f_hz - h)?;
        let estimate = 2.0 * h / (hi - lo);
        if let Some(p) = prev {
            last_delta = ((estimate - p) / estimate).abs();
            if last_delta <= 1e-6 {
                return Ok(estimate);
            }
        }
        prev = Some(estimate);
        h *= 0.5;
    }
    Err(Error::NoConvergence {
        context: "group velocity step refinement",
        iterations: 10,
        last_delta,
    })
}

/// Stored-energy factor xi = 1/2 + magnetic-over-electric energy ratio.
///
/// With the closed-form profile integrals the ratio collapses to
/// mu0 (omega eps_r eps0)^2 / (2 eps0 Re(eps_eff) (|beta|^2 + |alpha|^2)).
/// The real part of eps_eff keeps the normalization real; losses make the
/// discarded imaginary part small (tracked by the caller as a diagnostic).
pub fn xi_factor(omega: f64, eps_r: f64, beta: Complex64, alpha: Complex64, eps_eff_re: f64) -> f64 {
    let scale = omega * eps_r * EPS_0;
    0.5 + MU_0 * scale * scale / (2.0 * EPS_0 * eps_eff_re * (beta.norm_sqr() + alpha.norm_sqr()))
}

/// Normalized transverse overlap of two modes,
/// I_mn = int(D_xm* D_xn + D_zm* D_zn) / sqrt(self_m self_n).
///
/// All integrals run over both sides of the sheet and reduce to closed form;
/// the (omega eps_r eps0) field prefactors cancel between numerator and
/// denominator, leaving only beta and alpha.
pub fn mode_overlap(m: &SppMode, n: &SppMode) -> Result<Complex64> {
    let decay = m.alpha.conj() + n.alpha;
    if decay.re <= 0.0 {
        return Err(Error::Domain {
            module: "waveguide",
            message: format!("overlap integral diverges: Re(alpha_m* + alpha_n) = {} <= 0", decay.re),
        });
    }
    let cross = 2.0 * (m.beta.conj() * n.beta + m.alpha.conj() * n.alpha) / decay;
    let self_m = (m.beta.norm_sqr() + m.alpha.norm_sqr()) / m.alpha.re;
    let self_n = (n.beta.norm_sqr() + n.alpha.norm_sqr()) / n.alpha.re;
    Ok(cross / (self_m * self_n).sqrt())
}

fn beta_re_at(params: &GrapheneParams, mu: &ChemicalPotential, f_hz: f64, convention: FrequencyConvention) -> Result<f64> {
    let omega = 2.0 * std::f64::consts::PI * f_hz;
    let sigma = conductivity(params, mu, omega, convention)?;
    Ok(solve_dispersion(sigma.sigma_prime, omega)?.re)
}

impl SppMode {
    /// Solves the full chain at one frequency: conductivity, dispersion,
    /// perturbation, transverse decay, group velocity, decay rate, xi.
    pub fn solve(
        params: &GrapheneParams,
        mu: &ChemicalPotential,
        f_hz: f64,
        convention: FrequencyConvention,
    ) -> Result<SppMode> {
        if !(f_hz > 0.0) || !f_hz.is_finite() {
            return Err(Error::Domain {
                module: "waveguide",
                message: format!("mode frequency must be positive and finite, got {f_hz}"),
            });
        }
        let omega = 2.0 * std::f64::consts::PI * f_hz;
        let k0 = omega / C_0;
        let sigma = conductivity(params, mu, omega, convention)?;
        let beta = solve_dispersion(sigma.sigma_prime, omega)?;
        let beta_per_volt = perturbed_beta(beta, &sigma)?;
        let alpha = transverse_alpha(beta, k0, params.eps_r)?;
        let eps_eff = effective_permittivity(beta, k0);
        let eps_eff_per_volt = effective_permittivity_shift(beta, beta_per_volt, k0);
        let v_g = group_velocity(f_hz, |f| beta_re_at(params, mu, f, convention))?;
        let gamma = 2.0 * v_g * beta.im;
        let xi = xi_factor(omega, params.eps_r, beta, alpha, eps_eff.re);
        Ok(SppMode {
            f_hz,
            omega,
            k0,
            eps_r: params.eps_r,
            beta,
            beta_per_volt,
            alpha,
            eps_eff,
            eps_eff_per_volt,
            v_g,
            gamma,
            xi,
        })
    }

    /// Closed-form transverse integrals and the mode volume for a plate of
    /// the given area.
    pub fn profile_integrals(&self, area: f64) -> Result<ModeProfileIntegrals> {
        if self.alpha.re <= 0.0 {
            return Err(Error::NotConfined { alpha: self.alpha });
        }
        let int_dy2 = 1.0 / self.alpha.re;
        let scale = self.omega * self.eps_r * EPS_0;
        let int_dxz2 = (self.beta.norm_sqr() + self.alpha.norm_sqr()) / (scale * scale) * int_dy2;
        Ok(ModeProfileIntegrals {
            int_dy2,
            int_dxz2,
            v_l: area * int_dxz2,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::material::chemical_potential;
    use approx::assert_relative_eq;

    fn baseline() -> GrapheneParams {
        GrapheneParams {
            n0: 1e18,
            tau: 0.5e-12,
            temperature: 3e-3,
            fermi_velocity: 1e6,
            eps_r: 1.0,
            plate_gap: 1e-6,
        }
    }

    fn baseline_mode(f_hz: f64) -> SppMode {
        let p = baseline();
        let mu = chemical_potential(&p).unwrap();
        SppMode::solve(&p, &mu, f_hz, FrequencyConvention::AsPrinted).unwrap()
    }

    #[test]
    fn metallic_limit_approaches_free_space() {
        // Large |sigma| kills the (2/(Z0 sigma))^2 correction entirely.
        let omega = 2.0 * std::f64::consts::PI * 193e12;
        let sigma = Complex64::new(7.39e-6, 7.09e-4) * 1e6;
        let beta = solve_dispersion(sigma, omega).unwrap();
        let k0 = omega / C_0;
        assert_relative_eq!(beta.re, k0, max_relative = 1e-9);
        assert!(beta.norm() / k0 - 1.0 < 1e-9);
    }

    #[test]
    fn reactive_sheet_gives_real_slow_wave() {
        // Z0 sigma = 2 i t with real 0 < t < 1 gives beta = k0 sqrt(1 + 1/t^2),
        // real and above the light line.
        let omega = 2.0 * std::f64::consts::PI * 193e12;
        let k0 = omega / C_0;
        for &t in &[0.1, 0.5, 0.9] {
            let sigma = Complex64::new(0.0, 2.0 * t / Z_0);
            let beta = solve_dispersion(sigma, omega).unwrap();
            assert_relative_eq!(beta.re, k0 * (1.0 + 1.0 / (t * t)).sqrt(), max_relative = 1e-12);
            assert_eq!(beta.im, 0.0);
            assert!(beta.re > k0);
        }
    }

    #[test]
    fn baseline_propagation_constant() {
        let m = baseline_mode(193e12);
        assert_relative_eq!(m.k0, 4.044_980_892_366_746e6, max_relative = 1e-12);
        assert_relative_eq!(m.beta.re, 3.051_628_037_910_483e7, max_relative = 1e-9);
        assert_relative_eq!(m.beta.im, 3.125_264_630_815_732e5, max_relative = 1e-9);
        assert!(m.beta.re > m.k0 && m.beta.im > 0.0);
        assert_relative_eq!(m.beta_per_volt.re, 530.519_597_413_606_26, max_relative = 1e-9);
        assert_relative_eq!(m.beta_per_volt.im, 5.692_977_428_470_384, max_relative = 1e-9);
        assert_relative_eq!(m.alpha.re, 3.024_703_695_175_366e7, max_relative = 1e-9);
        assert_relative_eq!(m.alpha.im, 3.153_084_114_817_501e5, max_relative = 1e-9);
    }

    #[test]
    fn baseline_effective_permittivity_and_rates() {
        let m = baseline_mode(193e12);
        assert_relative_eq!(m.eps_eff.re, 56.909_489_655_284_095, max_relative = 1e-9);
        assert_relative_eq!(m.eps_eff.im, 1.165_776_885_979_440_3, max_relative = 1e-9);
        assert_relative_eq!(m.eps_eff_per_volt.re, 1.978_710_888_185_496e-3, max_relative = 1e-9);
        assert_relative_eq!(m.eps_eff_per_volt.im, 4.150_257_886_986_76e-5, max_relative = 1e-9);
        assert_relative_eq!(m.v_g, 3.180_875_465_967_849e6, max_relative = 1e-8);
        assert_relative_eq!(m.gamma, 1.988_215_517_763_766e12, max_relative = 1e-8);
        assert_relative_eq!(m.xi, 0.500_077_859_285_974_8, max_relative = 1e-9);
        assert!(m.v_g > 0.0 && m.v_g < C_0);
    }

    #[test]
    fn permittivity_round_trips_from_beta() {
        let m = baseline_mode(193e12);
        let eps = effective_permittivity(m.beta, m.k0);
        assert_eq!(eps, m.eps_eff);
        let shift = effective_permittivity_shift(m.beta, m.beta_per_volt, m.k0);
        assert_eq!(shift, m.eps_eff_per_volt);
    }

    #[test]
    fn field_tail_at_the_electrodes() {
        // Containment check: decay of the transverse tail across half the gap.
        let m = baseline_mode(193e12);
        let tail = (-m.alpha.re * 0.5e-6).exp();
        assert_relative_eq!(tail, 2.703_580_958e-7, max_relative = 1e-6);
        assert!(tail < 1e-6, "field tail {tail} should be far below the peak");
    }

    #[test]
    fn zero_conductivity_perturbation_means_zero_beta_shift() {
        let sigma = SheetConductivity {
            sigma_prime: Complex64::new(7.39e-6, 7.09e-4),
            sigma_dprime: Complex64::new(0.0, 0.0),
        };
        let beta = Complex64::new(3.05e7, 3.1e5);
        assert_eq!(perturbed_beta(beta, &sigma).unwrap(), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn resonant_denominator_is_reported() {
        // (Z0 sigma'/2)^2 = 1 makes the perturbation blow up.
        let sigma = SheetConductivity {
            sigma_prime: Complex64::new(2.0 / Z_0, 0.0),
            sigma_dprime: Complex64::new(1e-8, 0.0),
        };
        let err = perturbed_beta(Complex64::new(1.0, 0.0), &sigma).unwrap_err();
        assert!(matches!(err, Error::SingularPerturbation { .. }));
    }

    #[test]
    fn perturbation_halves_beta_at_the_algebraic_point() {
        // sigma'' = sigma' with (Z0 sigma'/2)^2 = -1 gives beta_per_volt = beta/2.
        let sp = Complex64::new(0.0, 2.0 / Z_0);
        let sigma = SheetConductivity {
            sigma_prime: sp,
            sigma_dprime: sp,
        };
        let beta = Complex64::new(3.0, 0.4);
        let shift = perturbed_beta(beta, &sigma).unwrap();
        assert_relative_eq!(shift.re, beta.re / 2.0, max_relative = 1e-12);
        assert_relative_eq!(shift.im, beta.im / 2.0, max_relative = 1e-12);
    }

    #[test]
    fn alpha_perfect_square() {
        // beta = k0 sqrt(1 + eps) makes beta^2 - eps k0^2 = k0^2.
        let k0 = 4.04e6;
        for &eps in &[1.0f64, 2.5, 11.9] {
            let beta = Complex64::new(k0 * (1.0 + eps).sqrt(), 0.0);
            let alpha = transverse_alpha(beta, k0, eps).unwrap();
            assert_relative_eq!(alpha.re, k0, max_relative = 1e-12);
            assert_eq!(alpha.im, 0.0);
        }
    }

    #[test]
    fn fast_wave_is_not_confined() {
        // Real beta below the light line: alpha is purely imaginary.
        let k0 = 4.04e6;
        let beta = Complex64::new(0.5 * k0, 0.0);
        let err = transverse_alpha(beta, k0, 1.0).unwrap_err();
        assert!(matches!(err, Error::NotConfined { .. }));
    }

    #[test]
    fn group_velocity_differentiates_linear_dispersion_exactly() {
        // Re beta = omega/v gives df/d(Re beta) = v/(2 pi); the refinement
        // should stop at the first comparison.
        let v = 2.9e6;
        let vg = group_velocity(193e12, |f| Ok(2.0 * std::f64::consts::PI * f / v)).unwrap();
        assert_relative_eq!(vg, v / (2.0 * std::f64::consts::PI), max_relative = 1e-8);
    }

    #[test]
    fn group_velocity_reports_nonconvergence() {
        // A noisy dispersion map never lets two estimates agree.
        let mut flip = 1.0f64;
        let err = group_velocity(193e12, |f| {
            flip = -flip;
            Ok(f * (1.0 + 0.1 * flip))
        })
        .unwrap_err();
        assert!(matches!(err, Error::NoConvergence { iterations: 10, .. }));
    }

    #[test]
    fn xi_plane_wave_limit_is_one() {
        // alpha -> 0, beta -> k0, eps_eff -> 1: the energy split is even.
        let omega = 2.0 * std::f64::consts::PI * 193e12;
        let k0 = omega / C_0;
        let xi = xi_factor(omega, 1.0, Complex64::new(k0, 0.0), Complex64::new(0.0, 0.0), 1.0);
        assert_relative_eq!(xi, 1.0, max_relative = 1e-12);
    }

    #[test]
    fn xi_exceeds_one_half() {
        for &f in &[150e12, 193e12, 250e12] {
            let m = baseline_mode(f);
            assert!(m.xi > 0.5, "xi = {} at {f}", m.xi);
            assert!(m.xi <= 1.5);
        }
    }

    #[test]
    fn self_overlap_is_exactly_one() {
        let m = baseline_mode(193e12);
        let i_mm = mode_overlap(&m, &m).unwrap();
        assert_eq!(i_mm.im, 0.0);
        assert_relative_eq!(i_mm.re, 1.0, max_relative = 1e-15);
    }

    #[test]
    fn sideband_overlaps_at_the_operating_point() {
        let p = baseline();
        let mu = chemical_potential(&p).unwrap();
        let conv = FrequencyConvention::AsPrinted;
        let pump = SppMode::solve(&p, &mu, 193e12, conv).unwrap();
        let upper = SppMode::solve(&p, &mu, 193e12 + 45e9, conv).unwrap();
        let lower = SppMode::solve(&p, &mu, 193e12 - 45e9, conv).unwrap();
        let i12 = mode_overlap(&pump, &upper).unwrap();
        let i13 = mode_overlap(&pump, &lower).unwrap();
        assert_relative_eq!(i12.re, 0.999_999_972_652_943_2, max_relative = 1e-9);
        assert_relative_eq!(i12.im, -3.573_709_546_771_109e-6, max_relative = 1e-6);
        assert_relative_eq!(i13.re, 0.999_999_972_640_258_7, max_relative = 1e-9);
        assert_relative_eq!(i13.im, 3.575_340_437_180_271e-6, max_relative = 1e-6);
    }

    #[test]
    fn overlap_of_nearly_degenerate_modes_tends_to_one() {
        let p = baseline();
        let mu = chemical_potential(&p).unwrap();
        let conv = FrequencyConvention::AsPrinted;
        let pump = SppMode::solve(&p, &mu, 193e12, conv).unwrap();
        let near = SppMode::solve(&p, &mu, 193e12 - 1e3, conv).unwrap();
        let i = mode_overlap(&pump, &near).unwrap();
        assert_relative_eq!(i.norm(), 1.0, max_relative = 1e-6);
    }

    #[test]
    fn branch_rules_hold_across_the_optical_band() {
        let p = baseline();
        let mu = chemical_potential(&p).unwrap();
        for i in 0..=20 {
            let f = 150e12 + i as f64 * 5e12;
            let m = SppMode::solve(&p, &mu, f, FrequencyConvention::AsPrinted).unwrap();
            assert!(m.beta.re > 0.0 && m.beta.im >= 0.0, "beta branch at {f}");
            assert!(m.alpha.re > 0.0, "alpha branch at {f}");
            assert!(m.v_g < C_0, "group velocity bound at {f}");
        }
    }

    #[test]
    fn more_metallic_sheet_weakens_confinement() {
        // Scaling up |Im sigma| walks beta toward k0 and opens up the mode.
        let omega = 2.0 * std::f64::consts::PI * 193e12;
        let k0 = omega / C_0;
        let base = Complex64::new(7.394_823_470_063_68e-6, 7.093_737_135_003_687e-4);
        let mut last_detune = f64::INFINITY;
        let mut last_alpha = f64::INFINITY;
        for &scale in &[1.0, 2.0, 4.0] {
            let beta = solve_dispersion(base * scale, omega).unwrap();
            let alpha = transverse_alpha(beta, k0, 1.0).unwrap();
            let detune = (beta.re - k0).abs();
            assert!(detune < last_detune, "beta should approach k0 at scale {scale}");
            assert!(alpha.re < last_alpha, "alpha should shrink at scale {scale}");
            last_detune = detune;
            last_alpha = alpha.re;
        }
    }

    #[test]
    fn profile_integrals_are_positive_and_scale_with_area() {
        let m = baseline_mode(193e12);
        let a = m.profile_integrals(2.7e-12).unwrap();
        assert!(a.int_dy2 > 0.0 && a.int_dxz2 > 0.0 && a.v_l > 0.0);
        assert_relative_eq!(a.int_dy2, 1.0 / m.alpha.re, max_relative = 1e-15);
        let b = m.profile_integrals(2.0 * 2.7e-12).unwrap();
        assert_relative_eq!(b.v_l, 2.0 * a.v_l, max_relative = 1e-15);
        assert_eq!(a.int_dxz2, b.int_dxz2);
    }
}
