//! Time evolution of the coupled microwave-optical moment vector.
//!
//! The state is the 14-entry complex vector of operator averages: the six
//! first moments (both sidebands, the microwave mode, and their daggered
//! partners) followed by the eight second moments that close under the
//! equations of motion. Everything evolves linearly,
//!
//!   dx/dt = M x + c,
//!
//! where M carries the damping on its diagonal and the pump-mediated
//! couplings off it. The only affine entry comes from normal ordering:
//! the <A3 B> equation references <A3 A3^dag> = <A3^dag A3> + 1, and the +1
//! lands in c. The corresponding daggered row does not receive that +1; the
//! two rows are deliberately not conjugates of each other, and the resulting
//! drift |<A3^dag B^dag> - <A3 B>*| is measured by the harness and reported,
//! never corrected here.
//!
//! The pump enters as a real amplitude A = sqrt(pump photons). One equation
//! (the microwave occupation row) is written against the phased pump letter;
//! `PumpLetter` selects whether that row sees the same real A as every other
//! row or the i*A variant. Both options change cross-moment phases only.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of evolved moments.
pub const DIM: usize = 14;

/// Fixed layout of the moment vector.
pub mod idx {
    /// <A2>
    pub const A2: usize = 0;
    /// <A3>
    pub const A3: usize = 1;
    /// <B>
    pub const B: usize = 2;
    /// <A2^dag>
    pub const A2D: usize = 3;
    /// <A3^dag>
    pub const A3D: usize = 4;
    /// <B^dag>
    pub const BD: usize = 5;
    /// <A3^dag A3>
    pub const N3: usize = 6;
    /// <A3 B>
    pub const A3B: usize = 7;
    /// <A3 A2>
    pub const A3A2: usize = 8;
    /// <A3^dag B^dag>
    pub const A3DBD: usize = 9;
    /// <A3^dag A2^dag>
    pub const A3DA2D: usize = 10;
    /// <B^dag B>
    pub const BDB: usize = 11;
    /// <B^dag A2>
    pub const BDA2: usize = 12;
    /// <B^dag A3^dag>
    pub const BDA3D: usize = 13;

    /// Column labels in vector order, used for trajectory headers.
    pub const NAMES: [&str; super::DIM] = [
        "a2",
        "a3",
        "b",
        "a2_dag",
        "a3_dag",
        "b_dag",
        "a3dag_a3",
        "a3_b",
        "a3_a2",
        "a3dag_bdag",
        "a3dag_a2dag",
        "bdag_b",
        "bdag_a2",
        "bdag_a3dag",
    ];
}

/// Moment vector at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentState {
    /// Elapsed time (s).
    pub t: f64,
    /// Moment values in the `idx` layout.
    pub x: [Complex64; DIM],
}

impl MomentState {
    pub fn a3(&self) -> Complex64 {
        self.x[idx::A3]
    }
    pub fn b(&self) -> Complex64 {
        self.x[idx::B]
    }
    pub fn n3(&self) -> Complex64 {
        self.x[idx::N3]
    }
    pub fn a3b(&self) -> Complex64 {
        self.x[idx::A3B]
    }
    pub fn a3dag_bdag(&self) -> Complex64 {
        self.x[idx::A3DBD]
    }
    pub fn bdag_b(&self) -> Complex64 {
        self.x[idx::BDB]
    }

    /// |<A3^dag B^dag> - <A3 B>*|, the conjugate-pair mismatch the evolved
    /// system accumulates.
    pub fn conjugate_drift(&self) -> f64 {
        (self.x[idx::A3DBD] - self.x[idx::A3B].conj()).norm()
    }
}

/// Initial microwave mean-field rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum B0Convention {
    /// <B> = sqrt(N_m): a coherent drive of N_m photons.
    #[default]
    Coherent,
    /// <B> = 0: occupation only, no mean field.
    Zero,
}

/// Which pump letter the microwave occupation row is written against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum PumpLetter {
    /// The same real amplitude A as every other row.
    #[default]
    UniformA,
    /// The phased variant i*A in that row only.
    AsPrinted,
}

/// Fixed-step integration scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Euler,
    #[default]
    Rk4,
}

/// Everything the moment system needs beyond the state itself.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    /// Pump <-> upper-sideband conversion rate (rad/s).
    pub g2: Complex64,
    /// Pump <-> lower-sideband conversion rate (rad/s).
    pub g3: Complex64,
    /// Upper-sideband amplitude decay rate (1/s).
    pub gamma2: f64,
    /// Lower-sideband amplitude decay rate (1/s).
    pub gamma3: f64,
    /// Microwave decay rate (1/s).
    pub gamma_m: f64,
    /// Real pump amplitude A = sqrt(pump photons).
    pub pump_amplitude: f64,
    /// Initial microwave photon number.
    pub n_m: f64,
    pub b0_convention: B0Convention,
    pub pump_letter: PumpLetter,
}

impl SystemParams {
    pub fn validate(&self) -> Result<()> {
        let nonneg = [
            (self.gamma2, "gamma2"),
            (self.gamma3, "gamma3"),
            (self.gamma_m, "gamma_m"),
            (self.pump_amplitude, "pump amplitude"),
            (self.n_m, "n_m"),
        ];
        for (value, name) in nonneg {
            if !(value >= 0.0) || !value.is_finite() {
                return Err(Error::Domain {
                    module: "dynamics",
                    message: format!("{name} must be nonnegative and finite, got {value}"),
                });
            }
        }
        if !self.g2.is_finite() || !self.g3.is_finite() {
            return Err(Error::Domain {
                module: "dynamics",
                message: "conversion rates must be finite".into(),
            });
        }
        Ok(())
    }
}

/// The assembled linear system dx/dt = M x + c.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentSystem {
    pub m: [[Complex64; DIM]; DIM],
    pub c: [Complex64; DIM],
}

impl MomentSystem {
    pub fn derivative(&self, x: &[Complex64; DIM]) -> [Complex64; DIM] {
        let mut out = self.c;
        for (row, coeffs) in self.m.iter().enumerate() {
            let mut acc = out[row];
            for (col, coef) in coeffs.iter().enumerate() {
                if coef.re != 0.0 || coef.im != 0.0 {
                    acc += coef * x[col];
                }
            }
            out[row] = acc;
        }
        out
    }

    /// Number of nonzero off-diagonal entries of M.
    pub fn off_diagonal_couplings(&self) -> usize {
        let mut n = 0;
        for (row, coeffs) in self.m.iter().enumerate() {
            for (col, coef) in coeffs.iter().enumerate() {
                if row != col && (coef.re != 0.0 || coef.im != 0.0) {
                    n += 1;
                }
            }
        }
        n
    }

    /// Number of nonzero affine entries of c.
    pub fn affine_couplings(&self) -> usize {
        self.c.iter().filter(|z| z.re != 0.0 || z.im != 0.0).count()
    }
}

/// Builds M and c from the conversion rates, decay rates, and pump amplitude.
pub fn build_system(params: &SystemParams) -> Result<MomentSystem> {
    params.validate()?;
    use idx::*;
    let zero = Complex64::new(0.0, 0.0);
    let mut m = [[zero; DIM]; DIM];
    let mut c = [zero; DIM];

    let a = Complex64::new(params.pump_amplitude, 0.0);
    // phased letter used by the <B^dag B> row only
    let a1 = match params.pump_letter {
        PumpLetter::UniformA => a,
        PumpLetter::AsPrinted => Complex64::new(0.0, params.pump_amplitude),
    };
    let (g2, g3) = (params.g2, params.g3);
    let half2 = Complex64::new(-params.gamma2 / 2.0, 0.0);
    let half3 = Complex64::new(-params.gamma3 / 2.0, 0.0);
    let halfm = Complex64::new(-params.gamma_m / 2.0, 0.0);

    // first moments
    m[A2][A2] = half2;
    m[A2][B] = g2 * a;
    m[A3][A3] = half3;
    m[A3][BD] = g3 * a;
    m[B][B] = halfm;
    m[B][A2] = -g2 * a;
    m[B][A3D] = g3 * a;
    // daggered partners evolve under the conjugated coefficients
    m[A2D][A2D] = half2;
    m[A2D][BD] = g2.conj() * a;
    m[A3D][A3D] = half3;
    m[A3D][B] = g3.conj() * a;
    m[BD][BD] = halfm;
    m[BD][A2D] = -g2.conj() * a;
    m[BD][A3] = g3.conj() * a;

    // second moments: the rates appear unconjugated throughout
    m[A3B][A3B] = halfm;
    m[A3B][A3A2] = -g2 * a;
    m[A3B][N3] = g3 * a;
    c[A3B] = g3 * a; // normal-ordering +1 from <A3 A3^dag>
    m[A3A2][A3A2] = half2;
    m[A3A2][A3B] = g2 * a;
    m[N3][N3] = half3;
    m[N3][A3DBD] = g3 * a;
    m[A3DBD][A3DBD] = halfm;
    m[A3DBD][A3DA2D] = -g2 * a;
    m[A3DBD][N3] = g3 * a;
    m[A3DA2D][A3DA2D] = half2;
    m[A3DA2D][A3DBD] = g2 * a;
    m[BDB][BDB] = halfm;
    m[BDB][BDA2] = -g2 * a1.conj();
    m[BDB][BDA3D] = g3 * a1;
    m[BDA2][BDA2] = half2;
    m[BDA2][BDB] = g2 * a;
    m[BDA3D][BDA3D] = halfm;
    m[BDA3D][BDB] = g3 * a;

    Ok(MomentSystem { m, c })
}

/// Uncorrelated initial data: optical moments empty, microwave occupation
/// N_m, mean field per the convention. Cross moments start at
/// sqrt(N_m * 0) = 0.
pub fn initial_state(params: &SystemParams) -> Result<MomentState> {
    params.validate()?;
    let zero = Complex64::new(0.0, 0.0);
    let mut x = [zero; DIM];
    let b0 = match params.b0_convention {
        B0Convention::Coherent => params.n_m.sqrt(),
        B0Convention::Zero => 0.0,
    };
    x[idx::B] = Complex64::new(b0, 0.0);
    x[idx::BD] = Complex64::new(b0, 0.0);
    x[idx::BDB] = Complex64::new(params.n_m, 0.0);
    Ok(MomentState { t: 0.0, x })
}

fn add_scaled(x: &[Complex64; DIM], s: f64, d: &[Complex64; DIM]) -> [Complex64; DIM] {
    let mut out = *x;
    for i in 0..DIM {
        out[i] += s * d[i];
    }
    out
}

fn step_once(system: &MomentSystem, x: &[Complex64; DIM], dt: f64, method: Method) -> [Complex64; DIM] {
    match method {
        Method::Euler => {
            let k1 = system.derivative(x);
            add_scaled(x, dt, &k1)
        }
        Method::Rk4 => {
            let k1 = system.derivative(x);
            let k2 = system.derivative(&add_scaled(x, dt / 2.0, &k1));
            let k3 = system.derivative(&add_scaled(x, dt / 2.0, &k2));
            let k4 = system.derivative(&add_scaled(x, dt, &k3));
            let mut out = *x;
            for i in 0..DIM {
                out[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
            out
        }
    }
}

fn all_finite(x: &[Complex64; DIM]) -> bool {
    x.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

fn run_steps<F>(
    system: &MomentSystem,
    state0: &MomentState,
    t_end: f64,
    dt: f64,
    method: Method,
    mut on_step: F,
) -> Result<MomentState>
where
    F: FnMut(&MomentState),
{
    if !(t_end > 0.0) || !(dt > 0.0) || !t_end.is_finite() || !dt.is_finite() {
        return Err(Error::Domain {
            module: "dynamics",
            message: format!("t_end and dt must be positive and finite, got t_end={t_end}, dt={dt}"),
        });
    }
    let n_steps = ((t_end / dt).ceil() as usize).max(1);
    let mut x = state0.x;
    for step in 0..n_steps {
        let t = step as f64 * dt;
        let last = step + 1 == n_steps;
        // the final step is shortened so the trajectory ends at t_end exactly
        let h = if last { t_end - t } else { dt };
        x = step_once(system, &x, h, method);
        if !all_finite(&x) {
            return Err(Error::NonFinite {
                context: "moment integration",
                step,
            });
        }
        on_step(&MomentState {
            t: if last { t_end } else { t + dt },
            x,
        });
    }
    Ok(MomentState { t: t_end, x })
}

/// Fixed-step integration returning the full trajectory, t = 0 and t = t_end
/// included.
pub fn integrate(
    system: &MomentSystem,
    state0: &MomentState,
    t_end: f64,
    dt: f64,
    method: Method,
) -> Result<Vec<MomentState>> {
    let mut trajectory = Vec::with_capacity(((t_end / dt).ceil() as usize).saturating_add(2));
    trajectory.push(MomentState { t: 0.0, ..*state0 });
    run_steps(system, state0, t_end, dt, method, |s| trajectory.push(*s))?;
    Ok(trajectory)
}

/// Fixed-step integration keeping only the final state.
pub fn integrate_final(
    system: &MomentSystem,
    state0: &MomentState,
    t_end: f64,
    dt: f64,
    method: Method,
) -> Result<MomentState> {
    run_steps(system, state0, t_end, dt, method, |_| {})
}

/// Accepted step size and the refinement delta that accepted it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Convergence {
    pub dt: f64,
    pub delta: f64,
}

/// Halves dt from dt0 until the caller's scalar metric of the final state
/// changes by less than `target` relative between successive refinements.
/// Gives up after 12 halvings.
pub fn convergence_check<F>(
    system: &MomentSystem,
    state0: &MomentState,
    t_end: f64,
    dt0: f64,
    target: f64,
    method: Method,
    metric: F,
) -> Result<Convergence>
where
    F: Fn(&MomentState) -> f64,
{
    if !(target > 0.0) {
        return Err(Error::Domain {
            module: "dynamics",
            message: format!("convergence target must be positive, got {target}"),
        });
    }
    let mut prev = metric(&integrate_final(system, state0, t_end, dt0, method)?);
    let mut dt = dt0;
    let mut last_delta = f64::INFINITY;
    for _ in 0..12 {
        dt /= 2.0;
        let cur = metric(&integrate_final(system, state0, t_end, dt, method)?);
        last_delta = (cur - prev).abs() / cur.abs().max(1e-30);
        if last_delta < target {
            return Ok(Convergence {
                dt,
                delta: last_delta,
            });
        }
        prev = cur;
    }
    Err(Error::NoConvergence {
        context: "time-step refinement",
        iterations: 12,
        last_delta,
    })
}
