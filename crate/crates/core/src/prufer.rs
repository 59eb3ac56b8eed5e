//! Prüfer angle `θ` with `e^{iθ} = (ψ₁ + iψ₂)/|ψ|`, solving
//! `θ' = γV + k cos 2θ`, and the angle defect
//!
//! ```text
//! Δ_V(γ) = −π/2 − θ₊(x₀) + θ₋(x₀)
//! ```
//!
//! where `θ₋ → π/4` at `−∞` and `θ₊ → −π/4` at `+∞`. A real `γ` belongs to
//! the spectrum iff `Δ_V(γ) ∈ π/2 + πℤ`.
//!
//! Piecewise-constant potentials are matched at the left edge of their
//! support, analytic ones at `x₀ = 0`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::closedform::real_transfer;
use crate::ode::{Dopri, OdeError};
use crate::potential::{AnalyticPotential, PiecewiseConstantPotential, Potential};
use crate::quad::GaussRule;
use crate::roots::bisect;
use crate::scalar::{floor_i64, Real};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PruferError {
    #[error("k must be positive, got {0}")]
    NonPositiveK(f64),
    #[error("adaptive step underflow at x = {x}")]
    StepUnderflow { x: f64 },
    #[error("adaptive step budget exhausted at x = {x}")]
    TooManySteps { x: f64 },
}

impl From<OdeError> for PruferError {
    fn from(e: OdeError) -> Self {
        match e {
            OdeError::StepUnderflow { x } => PruferError::StepUnderflow { x },
            OdeError::TooManySteps { x } => PruferError::TooManySteps { x },
        }
    }
}

/// Local error per unit length of the adaptive propagator.
pub const ODE_TOL: f64 = 1e-10;

/// Target for the tail truncation error in `θ`.
pub const TRUNCATION_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PruferState<T> {
    pub theta: T,
    pub x: T,
    pub gamma: T,
    pub k: T,
}

impl<T: Real> PruferState<T> {
    pub fn new(theta: T, x: T, gamma: T, k: T) -> Self {
        Self { theta, x, gamma, k }
    }
}

/// Constant stretches between `from` and `to` in travel order, including
/// the zero regions outside the support.
fn segments<T: Real>(pw: &PiecewiseConstantPotential<T>, from: T, to: T) -> Vec<(T, T, T)> {
    let (lo, hi) = if from <= to { (from, to) } else { (to, from) };
    let mut cuts = vec![lo];
    cuts.extend(pw.breakpoints().iter().copied().filter(|&a| a > lo && a < hi));
    cuts.push(hi);
    let half = T::lit(0.5);
    let segs = cuts
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| (w[0], w[1], pw.eval(half * (w[0] + w[1]))));
    if from <= to {
        segs.collect()
    } else {
        segs.rev().map(|(a, b, v)| (b, a, v)).collect()
    }
}

/// Substeps short enough that `θ` moves by at most π/4 on each.
fn substeps<T: Real>(len: T, v: T, gamma: T, k: T) -> usize {
    let rate = (gamma * v).abs() + k;
    (len.abs() * rate / T::FRAC_PI_4()).ceil().to_usize().unwrap_or(1).max(1)
}

/// Unit spinor with a continuously lifted angle.
#[derive(Clone, Copy)]
struct Lifted<T> {
    psi: [T; 2],
    theta: T,
}

impl<T: Real> Lifted<T> {
    fn new(theta: T) -> Self {
        Self {
            psi: [theta.cos(), theta.sin()],
            theta,
        }
    }

    fn moved(&self, m: &[[T; 2]; 2]) -> Self {
        let p = [
            m[0][0] * self.psi[0] + m[0][1] * self.psi[1],
            m[1][0] * self.psi[0] + m[1][1] * self.psi[1],
        ];
        let r = p[0].hypot(p[1]);
        let p = [p[0] / r, p[1] / r];
        let cross = self.psi[0] * p[1] - self.psi[1] * p[0];
        let dot = self.psi[0] * p[0] + self.psi[1] * p[1];
        Self {
            psi: p,
            theta: self.theta + cross.atan2(dot),
        }
    }
}

fn propagate_piecewise<T: Real>(pw: &PiecewiseConstantPotential<T>, s: PruferState<T>, to_x: T) -> PruferState<T> {
    let mut cur = Lifted::new(s.theta);
    for (a, b, v) in segments(pw, s.x, to_x) {
        let n = substeps(b - a, v, s.gamma, s.k);
        let m = real_transfer(v, (b - a) / T::from_usize_lossy(n), s.gamma, s.k);
        for _ in 0..n {
            cur = cur.moved(&m);
        }
    }
    PruferState { theta: cur.theta, x: to_x, ..s }
}

/// Adaptive propagation of `θ' = γV + k cos 2θ` for any evaluator.
pub fn propagate_adaptive<T: Real, F: Fn(T) -> T>(v: F, s: PruferState<T>, to_x: T, tol: T) -> Result<PruferState<T>, PruferError> {
    let (g, k) = (s.gamma, s.k);
    let y = Dopri::new(tol)
        .with_max_increment(T::FRAC_PI_4())
        .solve(|x, y: &[T; 1]| [g * v(x) + k * (y[0] + y[0]).cos()], s.x, [s.theta], to_x)?;
    Ok(PruferState { theta: y[0], x: to_x, ..s })
}

/// Moves `state` to `to_x` (either direction).
pub fn propagate<T: Real>(state: PruferState<T>, v: &Potential<T>, to_x: T) -> Result<PruferState<T>, PruferError> {
    match v {
        Potential::Piecewise(pw) => Ok(propagate_piecewise(pw, state, to_x)),
        Potential::Analytic(an) => propagate_adaptive(|x| an.eval(x), state, to_x, T::lit(ODE_TOL)),
    }
}

/// `h(a) = a + (π/2)⌊2a/π⌋`.
pub fn h_function<T: Real>(a: T) -> T {
    a + T::FRAC_PI_2() * T::lit(floor_i64(a / T::FRAC_PI_2()) as f64)
}

/// `h(|γ|·∫_{|x|>X}|V|)`, bounding the error in `θ` from starting the
/// propagation at `±X` instead of `±∞`.
pub fn truncation_bound<T: Real>(v: &AnalyticPotential<T>, gamma: T, x: T) -> T {
    let tail = v.right_tail(x).max(v.left_tail(x));
    h_function(gamma.abs() * tail)
}

/// Smallest `X ≤ decay_hint` (to bisection accuracy) with
/// `truncation_bound < 1e−8`; the decay hint when none is found.
pub fn truncation_radius<T: Real>(v: &AnalyticPotential<T>, gamma: T) -> T {
    let target = T::lit(TRUNCATION_TOL);
    let hint = v.decay_hint();
    if gamma == T::zero() {
        return T::zero();
    }
    if truncation_bound(v, gamma, T::zero()) < target {
        return T::zero();
    }
    if truncation_bound(v, gamma, hint) >= target {
        return hint;
    }
    let mut lo = T::zero();
    let mut hi = hint;
    while hi - lo > T::lit(1e-3) {
        let mid = T::lit(0.5) * (lo + hi);
        if truncation_bound(v, gamma, mid) < target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

fn check_k<T: Real>(k: T) -> Result<(), PruferError> {
    if k > T::zero() {
        Ok(())
    } else {
        Err(PruferError::NonPositiveK(k.to_f64_lossy()))
    }
}

/// Backward sweep over the support of a piecewise potential: returns
/// `θ₊(a)` and, when asked, `∫_a^b e^{2kΨ_{[a,x]}} V(x) dx`.
fn sweep_piecewise<T: Real>(pw: &PiecewiseConstantPotential<T>, gamma: T, k: T, derivative: bool) -> (T, T) {
    let Some((a, b)) = pw.support() else {
        return (-T::FRAC_PI_4(), T::zero());
    };
    let rule = GaussRule::<T>::new();
    let half = T::lit(0.5);
    let two_k = k + k;
    let mut cur = Lifted::new(-T::FRAC_PI_4());
    // Running ∫_x^b e^{2kΨ_{[x,t]}} V(t) dt at the current point x.
    let mut acc = T::zero();
    for (x1, x0, v) in segments(pw, b, a) {
        let n = substeps(x1 - x0, v, gamma, k);
        let h = (x0 - x1) / T::from_usize_lossy(n);
        let m = real_transfer(v, h, gamma, k);
        let mut right = x1;
        for _ in 0..n {
            let next = cur.moved(&m);
            if derivative {
                let left = right + h;
                let w = -h;
                // sin 2θ at the Gauss nodes of [left, right].
                let mut s = [T::zero(); 8];
                for (j, sj) in s.iter_mut().enumerate() {
                    let node = left + half * w * (rule.nodes[j] + T::one());
                    let at = cur.moved(&real_transfer(v, node - right, gamma, k));
                    *sj = (at.theta + at.theta).sin();
                }
                let mut local = T::zero();
                let mut total = T::zero();
                for i in 0..8 {
                    let psi_i: T = (0..8).fold(T::zero(), |acc, j| acc + rule.cumulative[i][j] * s[j]);
                    local += rule.weights[i] * (two_k * half * w * psi_i).exp();
                    total += rule.weights[i] * s[i];
                }
                acc = half * w * v * local + (two_k * half * w * total).exp() * acc;
            }
            cur = next;
            right = right + h;
        }
    }
    (cur.theta, acc)
}

struct AnalyticSweep<T> {
    theta_plus: T,
    theta_minus: T,
    omega_plus: T,
    omega_minus: T,
}

fn sweep_analytic<T: Real>(an: &AnalyticPotential<T>, gamma: T, k: T, derivative: bool) -> Result<AnalyticSweep<T>, PruferError> {
    let x = truncation_radius(an, gamma);
    let tol = T::lit(ODE_TOL);
    let q = T::FRAC_PI_4();
    if !derivative {
        let p = propagate_adaptive(|t| an.eval(t), PruferState::new(-q, x, gamma, k), T::zero(), tol)?;
        let m = propagate_adaptive(|t| an.eval(t), PruferState::new(q, -x, gamma, k), T::zero(), tol)?;
        return Ok(AnalyticSweep {
            theta_plus: p.theta,
            theta_minus: m.theta,
            omega_plus: T::zero(),
            omega_minus: T::zero(),
        });
    }
    // Variational equation ω = ∂θ/∂γ: ω' = V − 2k sin(2θ) ω, ω(±X) = 0.
    let rhs = |t: T, y: &[T; 2]| {
        let v = an.eval(t);
        let s = (y[0] + y[0]).sin();
        [gamma * v + k * (y[0] + y[0]).cos(), v - (k + k) * s * y[1]]
    };
    let ode = Dopri::new(tol).with_max_increment(q);
    let p = ode.solve(rhs, x, [-q, T::zero()], T::zero())?;
    let m = ode.solve(rhs, -x, [q, T::zero()], T::zero())?;
    Ok(AnalyticSweep {
        theta_plus: p[0],
        theta_minus: m[0],
        omega_plus: p[1],
        omega_minus: m[1],
    })
}

/// `Δ_V(γ)`.
pub fn delta_v<T: Real>(v: &Potential<T>, gamma: T, k: T) -> Result<T, PruferError> {
    check_k(k)?;
    if gamma == T::zero() {
        return Ok(T::zero());
    }
    match v {
        Potential::Piecewise(pw) => {
            let (tp, _) = sweep_piecewise(pw, gamma, k, false);
            Ok(-T::FRAC_PI_4() - tp)
        }
        Potential::Analytic(an) => {
            let s = sweep_analytic(an, gamma, k, false)?;
            Ok(-T::FRAC_PI_2() - s.theta_plus + s.theta_minus)
        }
    }
}

/// `dΔ_V/dγ = −ω₊(x₀) + ω₋(x₀)`, with
/// `ω₊(x₀) = −∫_{x₀}^∞ e^{2kΨ_{[x₀,x]}} V(x) dx` and `Ψ_J = ∫_J sin 2θ`.
pub fn delta_derivative<T: Real>(v: &Potential<T>, gamma: T, k: T) -> Result<T, PruferError> {
    Ok(delta_with_derivative(v, gamma, k)?.1)
}

/// `(Δ_V(γ), dΔ_V/dγ)` from a single sweep.
pub fn delta_with_derivative<T: Real>(v: &Potential<T>, gamma: T, k: T) -> Result<(T, T), PruferError> {
    check_k(k)?;
    match v {
        Potential::Piecewise(pw) => {
            let (tp, integral) = sweep_piecewise(pw, gamma, k, true);
            Ok((-T::FRAC_PI_4() - tp, integral))
        }
        Potential::Analytic(an) => {
            let s = sweep_analytic(an, gamma, k, true)?;
            Ok((
                -T::FRAC_PI_2() - s.theta_plus + s.theta_minus,
                -s.omega_plus + s.omega_minus,
            ))
        }
    }
}

/// Distance from `Δ` to the nearest level `(n + ½)π`.
pub fn level_residual<T: Real>(delta: T) -> T {
    let shifted = delta / T::PI() - T::lit(0.5);
    (shifted - shifted.round()).abs() * T::PI()
}

/// Whether `Δ_V(γ)` lies within `tol` of `π/2 + πℤ`, with that distance.
pub fn is_eigenvalue<T: Real>(v: &Potential<T>, gamma: T, k: T, tol: T) -> Result<(bool, T), PruferError> {
    let r = level_residual(delta_v(v, gamma, k)?);
    Ok((r < tol, r))
}

/// Finds `γ ∈ [lo, hi]` where `Δ_V` crosses `level`, by bisection.
pub fn refine_crossing<T: Real>(v: &Potential<T>, k: T, level: T, lo: T, hi: T, tol: T) -> Option<T> {
    bisect(
        |g| delta_v(v, g, k).map(|d| d - level).unwrap_or(T::nan()),
        lo,
        hi,
        tol,
        200,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DeltaMethod {
    ExactPiecewise,
    AdaptiveODE,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeltaCurve<T> {
    pub gammas: Vec<T>,
    pub delta_values: Vec<T>,
    pub method: DeltaMethod,
}

impl<T: Real> DeltaCurve<T> {
    /// Evaluates `Δ_V` on a grid, in parallel.
    pub fn compute(v: &Potential<T>, gammas: &[T], k: T) -> Result<Self, PruferError> {
        let delta_values = gammas
            .par_iter()
            .map(|&g| delta_v(v, g, k))
            .collect::<Result<Vec<_>, _>>()?;
        let method = match v {
            Potential::Piecewise(_) => DeltaMethod::ExactPiecewise,
            Potential::Analytic(_) => DeltaMethod::AdaptiveODE,
        };
        Ok(Self {
            gammas: gammas.to_vec(),
            delta_values,
            method,
        })
    }

    /// `gamma,delta,method` rows with a header.
    pub fn to_csv(&self) -> String {
        let method = match self.method {
            DeltaMethod::ExactPiecewise => "exact_piecewise",
            DeltaMethod::AdaptiveODE => "adaptive_ode",
        };
        let mut out = String::from("gamma,delta,method\n");
        for (g, d) in self.gammas.iter().zip(&self.delta_values) {
            out.push_str(&format!("{g},{d},{method}\n"));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::closedform::gap_angle_relation_check;
    use crate::potential::{build_w, hrp_potential};
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    fn pw(p: PiecewiseConstantPotential<f64>) -> Potential<f64> {
        Potential::Piecewise(p)
    }

    #[test]
    fn fixed_point_on_gap() {
        let v = pw(catalog::step_pair(1.0, 2.0));
        let s = propagate(PruferState::new(FRAC_PI_4, -0.9, 3.0, 1.0), &v, -0.1).unwrap();
        assert!((s.theta - FRAC_PI_4).abs() < 1e-14);
    }

    #[test]
    fn gap_relation_from_exact_propagation() {
        let v = pw(catalog::step_pair(1.5, 2.0));
        for th in [-1.0, 0.2, 0.7, 2.5] {
            let s = propagate(PruferState::new(th, -1.5, 7.0, 1.3), &v, 0.0).unwrap();
            assert!(gap_angle_relation_check(th, s.theta, 1.3, 1.5).abs() < 1e-12);
        }
    }

    #[test]
    fn exact_and_adaptive_agree() {
        let p = catalog::step_pair(1.0, 2.0);
        let v = pw(p.clone());
        for gamma in [0.5, 4.0, 11.0] {
            let s0 = PruferState::new(-FRAC_PI_4, 2.0, gamma, 1.0);
            let exact = propagate(s0, &v, -2.0).unwrap();
            // Split at breakpoints so the adaptive solver never straddles a jump.
            let mut s = s0;
            for &x in p.breakpoints().iter().rev().skip(1) {
                let val = p.eval(0.5 * (s.x + x));
                s = propagate_adaptive(|_| val, s, x, 1e-12).unwrap();
            }
            assert!((exact.theta - s.theta).abs() < 1e-8, "{gamma}: {} vs {}", exact.theta, s.theta);
        }
    }

    #[test]
    fn delta_at_zero() {
        assert_eq!(delta_v(&pw(catalog::unit_barrier()), 0.0, 1.0).unwrap(), 0.0);
        assert!(delta_v(&Potential::Analytic(hrp_potential::<f64>()), 0.0, 1.0).unwrap().abs() < 1e-15);
    }

    #[test]
    fn non_positive_k_rejected() {
        let v = pw(catalog::unit_barrier());
        assert_eq!(delta_v(&v, 1.0, 0.0), Err(PruferError::NonPositiveK(0.0)));
        assert!(delta_derivative(&v, 1.0, -1.0).is_err());
    }

    #[test]
    fn single_sign_is_monotone_with_integral_slope() {
        let v = pw(catalog::unit_barrier());
        let mut prev = f64::NEG_INFINITY;
        for i in 0..200 {
            let d = delta_v(&v, i as f64 * 0.25, 1.0).unwrap();
            assert!(d > prev);
            prev = d;
        }
        let d = delta_v(&v, 200.0, 1.0).unwrap();
        assert!((d / 200.0 - 2.0).abs() < 0.05);
    }

    #[test]
    fn first_root_of_unit_barrier() {
        // D ∝ γ̃ cos 2γ̃ + sin 2γ̃ with γ̃ = √(γ² − 1) for V₁, k = 1.
        let f = |g: f64| {
            let t = (g * g - 1.0).sqrt();
            t * (2.0 * t).cos() + (2.0 * t).sin()
        };
        let oracle = crate::roots::brent(f, 1.3, 1.7, 1e-14, 200).unwrap();
        let v = pw(catalog::unit_barrier());
        let root = refine_crossing(&v, 1.0, FRAC_PI_2, 1.0, 2.0, 1e-13).unwrap();
        assert!((root - oracle).abs() < 1e-8, "{root} vs {oracle}");
        let (hit, res) = is_eigenvalue(&v, root, 1.0, 1e-8).unwrap();
        assert!(hit, "{res}");
        assert!(!is_eigenvalue(&v, 0.0, 1.0, 1e-6).unwrap().0);
    }

    #[test]
    fn h_function_properties() {
        assert_eq!(h_function(0.0), 0.0);
        assert_eq!(h_function(1.0), 1.0);
        let grid: Vec<f64> = (0..60).map(|i| i as f64 * 0.173).collect();
        for &a in &grid {
            let h = h_function(a);
            assert!(a <= h && h <= 2.0 * a + 1e-15);
            for &b in &grid {
                assert!(h + h_function(b) <= h_function(a + b) + 1e-12);
            }
        }
    }

    #[test]
    fn truncation_bound_selects_radius() {
        let v = hrp_potential::<f64>();
        assert_eq!(truncation_bound(&v, 0.0, 3.0), 0.0);
        let x = truncation_radius(&v, 10.0);
        assert!(truncation_bound(&v, 10.0, x) < TRUNCATION_TOL);
        assert!(truncation_bound(&v, 10.0, x - 0.01) >= TRUNCATION_TOL);
    }

    #[test]
    fn delta_bounded_by_h() {
        let v = pw(catalog::twin_gap(0.7));
        let l1 = v.l1_norm();
        for i in 0..80 {
            let g = -20.0 + 0.5 * i as f64;
            assert!(delta_v(&v, g, 1.0).unwrap().abs() <= h_function(g.abs() * l1) + 1e-12);
        }
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let v = pw(catalog::unit_barrier());
        let e = 1e-5;
        let fd = (delta_v(&v, 3.0 + e, 1.0).unwrap() - delta_v(&v, 3.0 - e, 1.0).unwrap()) / (2.0 * e);
        let d = delta_derivative(&v, 3.0, 1.0).unwrap();
        assert!((d - fd).abs() < 1e-5, "{d} vs {fd}");

        let v = pw(build_w(&[-1.0, 0.0, 0.5, 2.0], &[1.5, 0.0, -0.7]).unwrap());
        for g in [-4.0, 1.3, 6.0] {
            let fd = (delta_v(&v, g + e, 0.8).unwrap() - delta_v(&v, g - e, 0.8).unwrap()) / (2.0 * e);
            let d = delta_derivative(&v, g, 0.8).unwrap();
            assert!((d - fd).abs() < 1e-5, "{g}: {d} vs {fd}");
        }
    }

    #[test]
    fn analytic_derivative_matches_finite_difference() {
        let v = Potential::Analytic(hrp_potential::<f64>());
        let e = 1e-4;
        let fd = (delta_v(&v, 2.2 + e, 1.0).unwrap() - delta_v(&v, 2.2 - e, 1.0).unwrap()) / (2.0 * e);
        let d = delta_derivative(&v, 2.2, 1.0).unwrap();
        assert!((d - fd).abs() < 1e-5, "{d} vs {fd}");
        // V ≤ 0 makes Δ decreasing.
        assert!(d < 0.0);
    }

    #[test]
    fn zero_potential_has_zero_derivative() {
        let v = pw(build_w(&[0.0, 1.0], &[0.0]).unwrap());
        assert_eq!(delta_with_derivative(&v, 3.0, 1.0).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn level_residual_wraps() {
        assert!(level_residual(FRAC_PI_2).abs() < 1e-15);
        assert!((level_residual(-FRAC_PI_2 + 0.1) - 0.1).abs() < 1e-15);
        assert!((level_residual(0.0) - FRAC_PI_2).abs() < 1e-15);
        assert!(level_residual(7.0 * PI / 2.0) < 1e-14);
    }

    #[test]
    fn csv_export() {
        let v = pw(catalog::unit_barrier());
        let c = DeltaCurve::compute(&v, &[0.0, 1.0], 1.0).unwrap();
        let csv = c.to_csv();
        assert!(csv.starts_with("gamma,delta,method\n0,0,exact_piecewise\n"));
        assert_eq!(csv.lines().count(), 3);
    }

    #[test]
    fn single_precision_delta() {
        let v: Potential<f32> = Potential::Piecewise(catalog::unit_barrier());
        let d = delta_v(&v, 3.0f32, 1.0).unwrap();
        let d64 = delta_v(&pw(catalog::unit_barrier()), 3.0, 1.0).unwrap();
        assert!((d as f64 - d64).abs() < 1e-4);
    }
}
