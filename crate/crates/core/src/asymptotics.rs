//! Counting-function densities: `ν_{α,β}`, the arithmetic density
//! `A(α,β)`, per-shape slope predictions and empirical comparison.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::potential::{classify_gaps, one_gap_params, GapKind, PiecewiseConstantPotential, PotentialError};
use crate::scalar::{floor_i64, Real};
use crate::spectra::GammaSpectrum;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AsymptoticsError {
    #[error("ν is defined only for 0 < α < 1 and αβ > 1 (α = {alpha}, β = {beta})")]
    OutOfDomain { alpha: f64, beta: f64 },
    #[error("p = {p} and q = {q} are not coprime positive integers")]
    NotCoprime { p: u64, q: u64 },
    #[error("αβ = 1 is excluded")]
    CriticalProduct,
    #[error("need at least 10 roots, got {0}")]
    InsufficientRoots(usize),
    #[error(transparent)]
    Potential(#[from] PotentialError),
}

fn clamp_unit<T: Real>(x: T) -> T {
    let slack = T::lit(1e-12);
    if x > T::one() && x <= T::one() + slack {
        T::one()
    } else if x < -T::one() && x >= -T::one() - slack {
        -T::one()
    } else {
        x
    }
}

/// `ν_{α,β} = (2/π)[β·arcsin(√(α²β²−1)/√(β²−1)) + arcsin(√(1−α²)/(α√(β²−1)))]`.
pub fn nu<T: Real>(alpha: T, beta: T) -> Result<T, AsymptoticsError> {
    if !(alpha > T::zero() && alpha < T::one() && alpha * beta > T::one()) {
        return Err(AsymptoticsError::OutOfDomain {
            alpha: alpha.to_f64_lossy(),
            beta: beta.to_f64_lossy(),
        });
    }
    let root_b = (beta * beta - T::one()).sqrt();
    let s1 = clamp_unit((alpha * alpha * beta * beta - T::one()).sqrt() / root_b);
    let s2 = clamp_unit((T::one() - alpha * alpha).sqrt() / (alpha * root_b));
    Ok(T::lit(2.0) / T::PI() * (beta * s1.asin() + s2.asin()))
}

/// `p_β, q_β`: both odd, or doubled when `p`, `q` have opposite parity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParityNormalizedBeta {
    pub p_beta: u64,
    pub q_beta: u64,
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub fn parity_normalize(p: u64, q: u64) -> Result<ParityNormalizedBeta, AsymptoticsError> {
    if p == 0 || q == 0 || gcd(p, q) != 1 {
        return Err(AsymptoticsError::NotCoprime { p, q });
    }
    Ok(if (p + q) % 2 == 0 {
        ParityNormalizedBeta { p_beta: p, q_beta: q }
    } else {
        ParityNormalizedBeta {
            p_beta: 2 * p,
            q_beta: 2 * q,
        }
    })
}

/// Best rational approximation `p/q` of `x ≥ 0` with `q ≤ max_den` that
/// explains `x` to within `tol`, or `None`.
///
/// Every double has convergents closer than `tol` once `q` is large, so a
/// convergent only counts when the continued fraction effectively stops
/// there: its error must also be below `10⁻³/q²`, i.e. the next partial
/// quotient would exceed a thousand.
pub fn detect_rational<T: Real>(x: T, max_den: u64, tol: T) -> Option<(u64, u64)> {
    if !(x >= T::zero()) || !x.is_finite() {
        return None;
    }
    let xf = x.to_f64_lossy();
    let (mut p0, mut q0, mut p1, mut q1) = (0u128, 1u128, 1u128, 0u128);
    let mut r = xf;
    for _ in 0..64 {
        let a = r.floor();
        if a > 1e15 {
            break;
        }
        let ai = a as u128;
        let (p2, q2) = (ai * p1 + p0, ai * q1 + q0);
        if q2 > max_den as u128 {
            break;
        }
        let err = (xf - p2 as f64 / q2 as f64).abs();
        let qf = q2 as f64;
        if err <= tol.to_f64_lossy() && err * qf * qf <= 1e-3 {
            let g = gcd(p2 as u64, q2 as u64).max(1);
            return Some((p2 as u64 / g, q2 as u64 / g));
        }
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
        let frac = r - a;
        if frac <= 0.0 {
            break;
        }
        r = 1.0 / frac;
    }
    None
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DensityBranch {
    /// `αβ < 1`: `A = 1`.
    SubCritical,
    /// `αβ > 1`, `β ∉ ℚ`: `A = ν`.
    IrrationalSuper,
    /// `αβ > 1`, `β = p/q`.
    RationalSuper { p_beta: u64, q_beta: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ADensity<T> {
    pub value: T,
    pub branch: DensityBranch,
    /// Rational branch with `p_β + q_β·ν ∈ 4ℤ` (tangential zeros).
    pub degenerate: bool,
}

/// `A(α, β)`. Rationality of `β` comes from `rational_hint` when given,
/// otherwise from [`detect_rational`] with denominators up to 10⁶.
pub fn a_density<T: Real>(alpha: T, beta: T, rational_hint: Option<(u64, u64)>) -> Result<ADensity<T>, AsymptoticsError> {
    if !(alpha >= T::zero() && alpha < T::one() && beta >= T::zero()) {
        return Err(AsymptoticsError::OutOfDomain {
            alpha: alpha.to_f64_lossy(),
            beta: beta.to_f64_lossy(),
        });
    }
    let prod = alpha * beta;
    if (prod - T::one()).abs() < T::lit(1e-9) {
        return Err(AsymptoticsError::CriticalProduct);
    }
    if prod < T::one() {
        return Ok(ADensity {
            value: T::one(),
            branch: DensityBranch::SubCritical,
            degenerate: false,
        });
    }
    let nu = nu(alpha, beta)?;
    let rational = match rational_hint {
        Some((p, q)) => {
            let g = gcd(p, q);
            if g == 0 {
                return Err(AsymptoticsError::NotCoprime { p, q });
            }
            Some((p / g, q / g))
        }
        None => detect_rational(beta, 1_000_000, T::lit(1e-9)),
    };
    let Some((p, q)) = rational else {
        return Ok(ADensity {
            value: nu,
            branch: DensityBranch::IrrationalSuper,
            degenerate: false,
        });
    };
    let pq = parity_normalize(p, q)?;
    let (pb, qb) = (T::lit(pq.p_beta as f64), T::lit(pq.q_beta as f64));
    let s = pb + qb * nu;
    let four = T::lit(4.0);
    let dist = (s / four - (s / four).round()).abs() * four;
    let value = four / qb * T::lit(floor_i64(s / four) as f64) - pb / qb + T::lit(2.0) / qb;
    Ok(ADensity {
        value,
        branch: DensityBranch::RationalSuper {
            p_beta: pq.p_beta,
            q_beta: pq.q_beta,
        },
        degenerate: dist < T::lit(1e-6),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PredictionTheorem {
    /// Single-signed: slope `‖V‖₁/π`.
    SingleSign,
    /// No gaps: slope `|∫V|/π`.
    NoGap,
    /// One gap: slope `A(α,β)·|v₁+v₂|/π`.
    OneGap,
    /// One gap with `∫V = 0`: finitely many real points.
    ZeroIntegralFinite,
    /// Antisymmetric: no real points.
    AntisymmetricEmpty,
    /// Only the lower bound `|∫V|/π` is known.
    LowerBoundOnly,
    /// Only the upper bound `(4e/π)‖V‖₁` is known.
    UpperBoundOnly,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityPrediction<T> {
    /// Expected `#(Γ ∩ [0,R]) ≈ slope·R`.
    pub slope: T,
    pub theorem: PredictionTheorem,
    pub case_info: Option<DensityBranch>,
    pub degenerate: bool,
    /// `|∫V|/π`.
    pub lower: T,
    /// `‖V‖₁/π`.
    pub upper: T,
}

/// Routes a piecewise-constant potential to the applicable counting law.
pub fn predict<T: Real>(v: &PiecewiseConstantPotential<T>, k: T) -> Result<DensityPrediction<T>, AsymptoticsError> {
    let gaps = classify_gaps(v)?;
    let lower = v.integral().abs() / T::PI();
    let upper = v.l1_norm() / T::PI();
    let base = |slope, theorem| DensityPrediction {
        slope,
        theorem,
        case_info: None,
        degenerate: false,
        lower,
        upper,
    };
    if v.is_single_signed() {
        return Ok(base(upper, PredictionTheorem::SingleSign));
    }
    if v.is_antisymmetric() {
        return Ok(base(T::zero(), PredictionTheorem::AntisymmetricEmpty));
    }
    let tiny = T::lit(16.0) * T::eps() * v.l1_norm();
    Ok(match gaps.kind {
        GapKind::NoGap => base(lower, PredictionTheorem::NoGap),
        GapKind::OneGap => match one_gap_params(v, k) {
            Err(PotentialError::ZeroIntegral) => base(T::zero(), PredictionTheorem::ZeroIntegralFinite),
            Err(e) => return Err(e.into()),
            Ok(p) => {
                let scale = (p.v1 + p.v2).abs() / T::PI();
                match a_density(p.alpha, p.beta, None) {
                    Ok(a) => DensityPrediction {
                        slope: a.value * scale,
                        theorem: PredictionTheorem::OneGap,
                        case_info: Some(a.branch),
                        degenerate: a.degenerate,
                        lower,
                        upper,
                    },
                    Err(AsymptoticsError::CriticalProduct) => DensityPrediction {
                        slope: scale,
                        theorem: PredictionTheorem::OneGap,
                        case_info: None,
                        degenerate: true,
                        lower,
                        upper,
                    },
                    Err(e) => return Err(e),
                }
            }
        },
        GapKind::MultiGap(_) if lower > tiny => base(lower, PredictionTheorem::LowerBoundOnly),
        GapKind::MultiGap(_) => base(
            T::lit(4.0) * T::E() / T::PI() * v.l1_norm(),
            PredictionTheorem::UpperBoundOnly,
        ),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    /// Least-squares slope of `n` against `γ_n`.
    pub empirical_slope: f64,
    pub predicted_slope: f64,
    /// `|empirical − predicted| / predicted`, or the absolute gap when the
    /// prediction is zero.
    pub relative_gap: f64,
    /// Least-squares slope of `γ_n` against `n` (mean spacing).
    pub spacing_slope: Option<f64>,
    pub roots_used: usize,
    pub radius: f64,
    pub theorem: PredictionTheorem,
}

/// Least-squares slope of `y` against `x`.
pub fn ls_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// Compares the positive real roots up to `radius` against a prediction.
pub fn compare<T: Real>(
    spectrum: &GammaSpectrum<T>,
    prediction: &DensityPrediction<T>,
    radius: T,
) -> Result<ComparisonReport, AsymptoticsError> {
    let roots: Vec<f64> = spectrum
        .real_values()
        .into_iter()
        .filter(|g| *g > T::zero() && *g <= radius)
        .map(|g| g.to_f64_lossy())
        .collect();
    let predicted = prediction.slope.to_f64_lossy();
    let r = radius.to_f64_lossy();
    let (empirical, spacing) = if roots.len() >= 10 {
        let idx: Vec<f64> = (1..=roots.len()).map(|n| n as f64).collect();
        (ls_slope(&roots, &idx), Some(ls_slope(&idx, &roots)))
    } else if predicted == 0.0 {
        (roots.len() as f64 / r, None)
    } else {
        return Err(AsymptoticsError::InsufficientRoots(roots.len()));
    };
    let gap = if predicted == 0.0 {
        empirical.abs()
    } else {
        (empirical - predicted).abs() / predicted
    };
    Ok(ComparisonReport {
        empirical_slope: empirical,
        predicted_slope: predicted,
        relative_gap: gap,
        spacing_slope: spacing,
        roots_used: roots.len(),
        radius: r,
        theorem: prediction.theorem,
    })
}
