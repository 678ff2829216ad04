//! Inseparability witness for the microwave mode and the lower sideband.
//!
//! The witness is the determinant of the 3x3 moment matrix
//!
//!   | 1        <A3>      <B^dag>       |
//!   | <A3^dag> <A3^dag A3> <A3^dag B^dag> |
//!   | <B>      <A3 B>    <B^dag B>     |
//!
//! whose strict negativity certifies entanglement. The moment system is not
//! exactly conjugate-symmetric, so the determinant picks up a small imaginary
//! residue; the real part is reported as the witness value and the residue is
//! carried alongside as a diagnostic rather than discarded.

use num_complex::Complex64;

use crate::dynamics::{idx, MomentState};

/// Witness value and its classification.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DuanResult {
    /// Re(det), the witness value. Negative means entangled.
    pub lambda: f64,
    /// Im(det), the asymmetry residue.
    pub lambda_imag: f64,
    /// lambda < 0, strict: no epsilon band around zero.
    pub entangled: bool,
    /// The matrix exactly as evaluated.
    pub matrix: [[Complex64; 3]; 3],
}

/// Evaluates the witness determinant on a moment state by direct cofactor
/// expansion.
pub fn duan_lambda(state: &MomentState) -> DuanResult {
    let one = Complex64::new(1.0, 0.0);
    let a3 = state.x[idx::A3];
    let a3d = state.x[idx::A3D];
    let b = state.x[idx::B];
    let bd = state.x[idx::BD];
    let n3 = state.x[idx::N3];
    let a3b = state.x[idx::A3B];
    let a3dbd = state.x[idx::A3DBD];
    let bdb = state.x[idx::BDB];

    let matrix = [[one, a3, bd], [a3d, n3, a3dbd], [b, a3b, bdb]];
    let det = one * (n3 * bdb - a3dbd * a3b) - a3 * (a3d * bdb - a3dbd * b)
        + bd * (a3d * a3b - n3 * b);
    DuanResult {
        lambda: det.re,
        lambda_imag: det.im,
        entangled: det.re < 0.0,
        matrix,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::DIM;
    use approx::assert_relative_eq;

    fn state_with(entries: &[(usize, Complex64)]) -> MomentState {
        let mut x = [Complex64::new(0.0, 0.0); DIM];
        for &(i, v) in entries {
            x[i] = v;
        }
        MomentState { t: 0.0, x }
    }

    fn re(v: f64) -> Complex64 {
        Complex64::new(v, 0.0)
    }

    #[test]
    fn uncorrelated_state_sits_on_the_boundary() {
        // middle row all zeros: no occupation, no cross moments
        let s = state_with(&[
            (idx::B, re(100.0)),
            (idx::BD, re(100.0)),
            (idx::BDB, re(1e4)),
        ]);
        let d = duan_lambda(&s);
        assert_eq!(d.lambda, 0.0);
        assert_eq!(d.lambda_imag, 0.0);
        assert!(!d.entangled);
    }

    #[test]
    fn diagonal_occupations_are_separable() {
        for &(n, m) in &[(1.0, 2.0), (3.5, 0.25), (1e4, 7.0)] {
            let s = state_with(&[(idx::N3, re(n)), (idx::BDB, re(m))]);
            let d = duan_lambda(&s);
            assert_relative_eq!(d.lambda, n * m, max_relative = 1e-15);
            assert!(!d.entangled);
        }
    }

    #[test]
    fn two_mode_squeezing_is_certified() {
        // occupations sinh^2 r, cross moments sinh r cosh r: witness -sinh^2 r
        for &r in &[0.2, 0.5, 1.0, 1f64.asinh(), 2.3] {
            let s2 = r.sinh() * r.sinh();
            let sc = r.sinh() * r.cosh();
            let s = state_with(&[
                (idx::N3, re(s2)),
                (idx::BDB, re(s2)),
                (idx::A3B, re(sc)),
                (idx::A3DBD, re(sc)),
            ]);
            let d = duan_lambda(&s);
            assert_relative_eq!(d.lambda, -s2, max_relative = 1e-12);
            assert!(d.entangled);
            assert_eq!(d.lambda_imag, 0.0);
        }
        let unit = state_with(&[
            (idx::N3, re(1.0)),
            (idx::BDB, re(1.0)),
            (idx::A3B, re(2f64.sqrt())),
            (idx::A3DBD, re(2f64.sqrt())),
        ]);
        // sinh(arcsinh 1) = 1: the witness is exactly -1
        assert_relative_eq!(duan_lambda(&unit).lambda, -1.0, max_relative = 1e-15);
    }

    #[test]
    fn coherent_product_state_is_exactly_separable() {
        // factorized moments of a product of two coherent states
        let alpha = Complex64::new(0.7, -0.3);
        let beta = Complex64::new(-1.2, 0.4);
        let s = state_with(&[
            (idx::A3, alpha),
            (idx::A3D, alpha.conj()),
            (idx::B, beta),
            (idx::BD, beta.conj()),
            (idx::N3, alpha.conj() * alpha),
            (idx::BDB, beta.conj() * beta),
            (idx::A3B, alpha * beta),
            (idx::A3DBD, alpha.conj() * beta.conj()),
        ]);
        let d = duan_lambda(&s);
        let scale = (alpha.norm_sqr() * beta.norm_sqr()).max(1.0);
        assert!(d.lambda.abs() <= 1e-12 * scale, "lambda = {}", d.lambda);
        assert!(d.lambda_imag.abs() <= 1e-12 * scale);
        assert!(!d.entangled);
    }

    #[test]
    fn hermitian_input_gives_a_real_witness() {
        // force exact Hermitian structure and a genuine mean field
        let a3 = Complex64::new(0.8, 0.5);
        let b = Complex64::new(4.0, -2.0);
        let cross = Complex64::new(1.5, 0.9);
        let s = state_with(&[
            (idx::A3, a3),
            (idx::A3D, a3.conj()),
            (idx::B, b),
            (idx::BD, b.conj()),
            (idx::N3, re(2.0)),
            (idx::BDB, re(30.0)),
            (idx::A3B, cross),
            (idx::A3DBD, cross.conj()),
        ]);
        let d = duan_lambda(&s);
        assert!(
            d.lambda_imag.abs() <= 1e-13 * d.lambda.abs().max(1.0),
            "imaginary residue {}",
            d.lambda_imag
        );
    }

    #[test]
    fn witness_is_phase_covariant() {
        let base = state_with(&[
            (idx::A3, Complex64::new(0.8, 0.5)),
            (idx::A3D, Complex64::new(0.8, -0.5)),
            (idx::B, Complex64::new(4.0, -2.0)),
            (idx::BD, Complex64::new(4.0, 2.0)),
            (idx::N3, re(2.0)),
            (idx::BDB, re(30.0)),
            (idx::A3B, Complex64::new(1.5, 0.9)),
            (idx::A3DBD, Complex64::new(1.5, -0.9)),
        ]);
        let reference = duan_lambda(&base).lambda;
        for k in 0..8 {
            let theta = k as f64 * std::f64::consts::PI / 4.0;
            let u = Complex64::new(0.0, theta).exp();
            let mut rotated = base;
            rotated.x[idx::A3] *= u;
            rotated.x[idx::A3D] *= u.conj();
            rotated.x[idx::A3B] *= u;
            rotated.x[idx::A3DBD] *= u.conj();
            let d = duan_lambda(&rotated);
            assert_relative_eq!(d.lambda, reference, max_relative = 1e-12);
        }
    }

    #[test]
    fn classification_is_a_strict_sign_test() {
        let mut s = state_with(&[(idx::N3, re(0.0)), (idx::BDB, re(0.0))]);
        assert!(!duan_lambda(&s).entangled, "zero is not negative");
        s.x[idx::N3] = re(1e-150);
        s.x[idx::BDB] = re(1e-150);
        s.x[idx::A3B] = re(2e-150);
        s.x[idx::A3DBD] = re(1e-150);
        // n m - cross^2 < 0 no matter how tiny
        assert!(duan_lambda(&s).entangled);
    }
}
