//! Shared oracles for the integration tests: quadrature and a matrix
//! exponential, both independent of the code paths they check.

// Each test binary compiles this module separately and uses a subset.
#![allow(dead_code)]
// Index loops here write into one matrix while reading another at the same
// coordinates; iterator adapters would obscure that.
#![allow(clippy::needless_range_loop)]

use num_complex::Complex64;
use plasmonq::dynamics::{MomentState, MomentSystem, DIM};

/// Adaptive Simpson quadrature with Richardson acceptance.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(fa: f64, fm: f64, fb: f64, a: f64, b: f64) -> f64 {
        (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    }

    #[allow(clippy::too_many_arguments)]
    fn recurse<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = simpson(fa, flm, fm, a, m);
        let right = simpson(fm, frm, fb, m, b);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }

    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = simpson(fa, fm, fb, a, b);
    recurse(f, a, b, fa, fm, fb, whole, tol, 48)
}

/// Dense complex matrix, row major.
pub type Mat = Vec<Vec<Complex64>>;

pub fn mat_zero(n: usize) -> Mat {
    vec![vec![Complex64::new(0.0, 0.0); n]; n]
}

pub fn mat_identity(n: usize) -> Mat {
    let mut m = mat_zero(n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = Complex64::new(1.0, 0.0);
    }
    m
}

pub fn mat_mul(a: &Mat, b: &Mat) -> Mat {
    let n = a.len();
    let mut out = mat_zero(n);
    for i in 0..n {
        for k in 0..n {
            let aik = a[i][k];
            if aik.re == 0.0 && aik.im == 0.0 {
                continue;
            }
            for j in 0..n {
                out[i][j] += aik * b[k][j];
            }
        }
    }
    out
}

fn inf_norm(a: &Mat) -> f64 {
    a.iter()
        .map(|row| row.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// exp(A) by scaling and squaring with a Taylor series. The scaled norm is
/// kept below 1/4, where 30 Taylor terms are far past double precision.
pub fn expm(a: &Mat) -> Mat {
    let n = a.len();
    let norm = inf_norm(a);
    let squarings = if norm > 0.25 {
        (norm / 0.25).log2().ceil().max(0.0) as u32
    } else {
        0
    };
    let scale = 0.5f64.powi(squarings as i32);
    let b: Mat = a
        .iter()
        .map(|row| row.iter().map(|z| z * scale).collect())
        .collect();

    let mut result = mat_identity(n);
    let mut term = mat_identity(n);
    for j in 1..=30 {
        term = mat_mul(&term, &b);
        let factor = 1.0 / j as f64;
        let mut biggest = 0.0f64;
        for (ti, row) in term.iter_mut().enumerate() {
            for (tj, z) in row.iter_mut().enumerate() {
                *z *= factor;
                result[ti][tj] += *z;
                biggest = biggest.max(z.norm());
            }
        }
        if biggest < 1e-22 {
            break;
        }
    }
    let mut out = result;
    for _ in 0..squarings {
        out = mat_mul(&out, &out);
    }
    out
}

/// Exact final state of dx/dt = M x + c through the augmented generator
/// [[M, c], [0, 0]] acting on (x, 1).
pub fn exact_final_state(system: &MomentSystem, state0: &MomentState, t: f64) -> MomentState {
    let n = DIM + 1;
    let mut gen = mat_zero(n);
    for i in 0..DIM {
        for j in 0..DIM {
            gen[i][j] = system.m[i][j] * t;
        }
        gen[i][DIM] = system.c[i] * t;
    }
    let propagator = expm(&gen);
    let mut z0 = vec![Complex64::new(0.0, 0.0); n];
    z0[..DIM].copy_from_slice(&state0.x);
    z0[DIM] = Complex64::new(1.0, 0.0);
    let mut x = [Complex64::new(0.0, 0.0); DIM];
    for (i, xi) in x.iter_mut().enumerate() {
        *xi = propagator[i]
            .iter()
            .zip(&z0)
            .map(|(a, b)| a * b)
            .sum::<Complex64>();
    }
    MomentState { t, x }
}

/// Relative distance between two moment vectors, 2-norm over all components.
pub fn state_distance(a: &MomentState, b: &MomentState) -> f64 {
    let diff: f64 = a
        .x
        .iter()
        .zip(&b.x)
        .map(|(p, q)| (p - q).norm_sqr())
        .sum::<f64>()
        .sqrt();
    let scale: f64 = b.x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    diff / scale.max(f64::MIN_POSITIVE)
}
