//! Exact propagation of `(ψ₁, ψ₂)` across constant pieces of
//!
//! ```text
//! ψ₁' = (k − γV) ψ₂,    ψ₂' = (k + γV) ψ₁
//! ```
//!
//! and the matching determinant `D_V(γ)` whose zeros are the coupling
//! constants with a square-integrable zero mode.
//!
//! On a piece with value `v` both components solve `ψ'' = −ω² ψ` with
//! `ω² = γ²v² − k²`, so the propagator over length `L` is
//!
//! ```text
//! [ cos ωL               (k − γv)·sin(ωL)/ω ]
//! [ (k + γv)·sin(ωL)/ω   cos ωL             ]
//! ```
//!
//! Both `cos ωL` and `sin(ωL)/ω` are entire in `ω²`, so no branch of the
//! square root is ever selected.

use num_complex::Complex;
use thiserror::Error;

use crate::potential::PiecewiseConstantPotential;
use crate::scalar::Real;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ClosedFormError {
    #[error("potential vanishes identically")]
    TrivialPotential,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinorState<T> {
    pub psi1: Complex<T>,
    pub psi2: Complex<T>,
    pub x: T,
}

impl<T: Real> SpinorState<T> {
    pub fn new(psi1: Complex<T>, psi2: Complex<T>, x: T) -> Self {
        Self { psi1, psi2, x }
    }

    pub fn real(psi1: T, psi2: T, x: T) -> Self {
        Self::new(Complex::new(psi1, T::zero()), Complex::new(psi2, T::zero()), x)
    }

    pub fn norm(&self) -> T {
        (self.psi1.norm_sqr() + self.psi2.norm_sqr()).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferMatrix<T> {
    pub m: [[Complex<T>; 2]; 2],
    pub from_x: T,
    pub to_x: T,
}

impl<T: Real> TransferMatrix<T> {
    pub fn identity(x: T) -> Self {
        let (o, z) = (Complex::new(T::one(), T::zero()), Complex::new(T::zero(), T::zero()));
        Self {
            m: [[o, z], [z, o]],
            from_x: x,
            to_x: x,
        }
    }

    pub fn det(&self) -> Complex<T> {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    /// Propagator for `self` followed by `next`.
    pub fn then(&self, next: &Self) -> Self {
        let (a, b) = (&next.m, &self.m);
        let mut m = [[Complex::new(T::zero(), T::zero()); 2]; 2];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, e) in row.iter_mut().enumerate() {
                *e = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        Self {
            m,
            from_x: self.from_x,
            to_x: next.to_x,
        }
    }

    pub fn apply(&self, s: &SpinorState<T>) -> SpinorState<T> {
        SpinorState {
            psi1: self.m[0][0] * s.psi1 + self.m[0][1] * s.psi2,
            psi2: self.m[1][0] * s.psi1 + self.m[1][1] * s.psi2,
            x: self.to_x,
        }
    }

    pub fn frobenius_sqr(&self) -> T {
        self.m.iter().flatten().fold(T::zero(), |acc, e| acc + e.norm_sqr())
    }
}

/// Below this value of `|ω²|·L²` the Taylor series replaces cos/sin.
fn series_threshold<T: Real>() -> T {
    T::lit(1e-8)
}

/// `(cos(√z·h), sin(√z·h)/√z)` for complex `z`.
pub fn cos_sinc<T: Real>(z: Complex<T>, h: T) -> (Complex<T>, Complex<T>) {
    if z.norm() * h * h < series_threshold() {
        // Six terms of Σ (−z h²)ⁿ/(2n)! and h·Σ (−z h²)ⁿ/(2n+1)!.
        let u = -z * h * h;
        let one = Complex::new(T::one(), T::zero());
        let mut c = one;
        let mut s = one;
        let mut tc = one;
        let mut ts = one;
        for n in 1..6 {
            let nn = T::from_usize_lossy(2 * n);
            tc = tc * u / (nn * (nn - T::one()));
            ts = ts * u / (nn * (nn + T::one()));
            c += tc;
            s += ts;
        }
        return (c, s * h);
    }
    let w = z.sqrt();
    let wh = w * h;
    (wh.cos(), wh.sin() / w)
}

/// Real-argument version of [`cos_sinc`].
pub fn cos_sinc_real<T: Real>(z: T, h: T) -> (T, T) {
    if z.abs() * h * h < series_threshold() {
        let u = -z * h * h;
        let (mut c, mut s, mut tc, mut ts) = (T::one(), T::one(), T::one(), T::one());
        for n in 1..6 {
            let nn = T::from_usize_lossy(2 * n);
            tc = tc * u / (nn * (nn - T::one()));
            ts = ts * u / (nn * (nn + T::one()));
            c += tc;
            s += ts;
        }
        return (c, s * h);
    }
    if z > T::zero() {
        let w = z.sqrt();
        ((w * h).cos(), (w * h).sin() / w)
    } else {
        let w = (-z).sqrt();
        ((w * h).cosh(), (w * h).sinh() / w)
    }
}

/// Propagator across a piece of value `v` and length `length ≥ 0`.
pub fn piece_transfer<T: Real>(v: T, length: T, gamma: Complex<T>, k: T) -> TransferMatrix<T> {
    piece_transfer_between(v, T::zero(), length, gamma, k)
}

/// Propagator from `from_x` to `to_x` on a constant piece (either direction).
pub fn piece_transfer_between<T: Real>(v: T, from_x: T, to_x: T, gamma: Complex<T>, k: T) -> TransferMatrix<T> {
    let length = to_x - from_x;
    let gv = gamma * v;
    let kc = Complex::new(k, T::zero());
    let w2 = gv * gv - kc * kc;
    let (c, s) = cos_sinc(w2, length);
    TransferMatrix {
        m: [[c, (kc - gv) * s], [(kc + gv) * s, c]],
        from_x,
        to_x,
    }
}

/// Real propagator `[[c, (k−γv)s], [(k+γv)s, c]]` for real `γ`.
pub fn real_transfer<T: Real>(v: T, length: T, gamma: T, k: T) -> [[T; 2]; 2] {
    let gv = gamma * v;
    let (c, s) = cos_sinc_real(gv * gv - k * k, length);
    [[c, (k - gv) * s], [(k + gv) * s, c]]
}

/// `D(γ) = ψ₁(a_m) + ψ₂(a_m)` for the solution with `ψ(a₀) = (1, 1)`.
///
/// Zero exactly when the solution decaying to the left also decays to the
/// right. The overall scale differs from other normalisations, so only
/// zero sets and winding numbers are meaningful.
pub fn determinant<T: Real>(v: &PiecewiseConstantPotential<T>, gamma: Complex<T>, k: T) -> Result<Complex<T>, ClosedFormError> {
    let t = v.trimmed().map_err(|_| ClosedFormError::TrivialPotential)?;
    let one = Complex::new(T::one(), T::zero());
    let (mut p1, mut p2) = (one, one);
    for (a, b, val) in t.pieces() {
        let m = piece_transfer(val, b - a, gamma, k).m;
        let n1 = m[0][0] * p1 + m[0][1] * p2;
        let n2 = m[1][0] * p1 + m[1][1] * p2;
        p1 = n1;
        p2 = n2;
    }
    Ok(p1 + p2)
}

/// Residual of `sin(θ_b − θ_a) = tanh(k·L)·cos(θ_b + θ_a)`, which holds for
/// any solution of `θ' = k cos 2θ` across an interval of length `L`.
pub fn gap_angle_relation_check<T: Real>(theta_a: T, theta_b: T, k: T, length: T) -> T {
    (theta_b - theta_a).sin() - (k * length).tanh() * (theta_b + theta_a).cos()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use std::f64::consts::FRAC_PI_4;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn zero_potential_piece_has_exponential_eigenvectors() {
        let (g, k) = (0.8, 1.3);
        let t = piece_transfer(0.0, g, c(2.7, 0.4), k);
        let plus = t.apply(&SpinorState::real(1.0, 1.0, 0.0));
        let minus = t.apply(&SpinorState::real(1.0, -1.0, 0.0));
        let (ep, em) = ((k * g).exp(), (-k * g).exp());
        assert!((plus.psi1 - ep).norm() < 1e-13 && (plus.psi2 - ep).norm() < 1e-13);
        assert!((minus.psi1 - em).norm() < 1e-13 && (minus.psi2 + em).norm() < 1e-13);
    }

    #[test]
    fn zero_length_is_identity() {
        let t = piece_transfer(1.7, 0.0, c(3.0, -1.0), 1.0);
        assert_eq!(t.m, TransferMatrix::identity(0.0).m);
    }

    #[test]
    fn half_pieces_compose() {
        for &(v, l, g) in &[(1.0, 2.0, c(3.3, 0.2)), (-0.5, 1.1, c(0.7, -1.5)), (2.0, 0.9, c(0.5, 0.0))] {
            let full = piece_transfer(v, l, g, 1.0);
            let h1 = piece_transfer_between(v, 0.0, l / 2.0, g, 1.0);
            let h2 = piece_transfer_between(v, l / 2.0, l, g, 1.0);
            let comp = h1.then(&h2);
            for i in 0..2 {
                for j in 0..2 {
                    assert!((comp.m[i][j] - full.m[i][j]).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn removable_singularity_is_smooth() {
        // γv = k exactly, and just off it on both sides of the series switch.
        let k = 1.0;
        let exact = piece_transfer(1.0, 2.0, c(1.0, 0.0), k);
        // ω² = 0: ψ₁ = ψ₁(0), ψ₂ = ψ₂(0) + 2k·L·ψ₁(0).
        assert!((exact.m[0][0] - 1.0).norm() < 1e-15);
        assert!(exact.m[0][1].norm() < 1e-15);
        assert!((exact.m[1][0] - 4.0).norm() < 1e-14);
        for d in [1e-12, 1e-9, 2.4e-9, 2.6e-9, 1e-6] {
            let t = piece_transfer(1.0, 2.0, c(1.0 + d, 0.0), k);
            assert!((t.m[1][0] - exact.m[1][0]).norm() < 1e-4, "{d}");
            assert!((t.det() - 1.0).norm() < 1e-12);
        }
    }

    #[test]
    fn real_and_complex_paths_agree() {
        for &(v, l, g) in &[(1.0, 2.0, 5.5), (-1.0, 0.3, 0.2), (0.0, 1.0, 9.0), (3.0, 1.0, 0.333_333_333_3)] {
            let r = real_transfer(v, l, g, 1.0);
            let cm = piece_transfer(v, l, c(g, 0.0), 1.0).m;
            for i in 0..2 {
                for j in 0..2 {
                    assert!((cm[i][j].re - r[i][j]).abs() < 1e-12 * (1.0 + r[i][j].abs()));
                    assert!(cm[i][j].im.abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn determinant_trivial_potential() {
        let z = crate::potential::build_w(&[0.0, 1.0], &[0.0]).unwrap();
        assert_eq!(determinant(&z, c(1.0, 0.0), 1.0), Err(ClosedFormError::TrivialPotential));
    }

    #[test]
    fn determinant_nonzero_at_origin() {
        for v in [catalog::unit_barrier(), catalog::step_pair(1.0, 2.0), catalog::twin_gap(0.5)] {
            assert!(determinant(&v, c(0.0, 0.0), 1.0).unwrap().norm() > 1.0);
        }
    }

    #[test]
    fn gap_relation_on_constant_branches() {
        assert!(gap_angle_relation_check(FRAC_PI_4, FRAC_PI_4, 1.0, 2.0).abs() < 1e-15);
        assert!(gap_angle_relation_check(-FRAC_PI_4, -FRAC_PI_4, 1.0, 2.0).abs() < 1e-15);
    }

    #[test]
    fn single_precision_transfer() {
        let t = piece_transfer(1.0f32, 2.0, Complex::new(3.0f32, 0.5), 1.0);
        assert!((t.det() - Complex::new(1.0, 0.0)).norm() < 1e-4);
    }
}
