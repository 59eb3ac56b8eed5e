//! Potentials: piecewise-constant `W(x; [a₀..a_m]; {v₁..v_m})` and analytic
//! decaying shapes, with their integrals, gap structure and builders.

use std::fmt;
use std::sync::Arc;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::asymptotics;
use crate::quad;
use crate::scalar::Real;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PotentialError {
    #[error("breakpoints must be non-decreasing (violated at index {index})")]
    NonMonotoneBreakpoints { index: usize },
    #[error("{breakpoints} breakpoints need {} values, got {values}", breakpoints.saturating_sub(1))]
    LengthMismatch { breakpoints: usize, values: usize },
    #[error("a potential needs at least two breakpoints")]
    TooFewBreakpoints,
    #[error("non-finite breakpoint or value")]
    NonFinite,
    #[error("potential vanishes identically")]
    TrivialPotential,
    #[error("potential is not a one-gap potential ({0:?})")]
    NotOneGap(GapKind),
    #[error("component integrals cancel: v₁ + v₂ = 0")]
    ZeroIntegral,
    #[error("need 0 < v < A < u, got v = {v}, A = {a}, u = {u}")]
    InfeasibleTriple { v: f64, a: f64, u: f64 },
    #[error("shape `{0}` has no serialisable form")]
    Unserializable(String),
    #[error("malformed potential record: {0}")]
    Record(String),
}

/// `W(x; [a₀,…,a_m]; {v₁,…,v_m})`: value `v_j` on `(a_{j−1}, a_j)`, zero
/// outside `[a₀, a_m]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Serialize + DeserializeOwned")]
pub struct PiecewiseConstantPotential<T> {
    breakpoints: Vec<T>,
    values: Vec<T>,
}

/// Builds `W(x; breakpoints; values)`. Zero-length pieces are dropped.
pub fn build_w<T: Real>(breakpoints: &[T], values: &[T]) -> Result<PiecewiseConstantPotential<T>, PotentialError> {
    if breakpoints.len() < 2 {
        return Err(PotentialError::TooFewBreakpoints);
    }
    if values.len() + 1 != breakpoints.len() {
        return Err(PotentialError::LengthMismatch {
            breakpoints: breakpoints.len(),
            values: values.len(),
        });
    }
    if breakpoints.iter().chain(values).any(|x| !x.is_finite()) {
        return Err(PotentialError::NonFinite);
    }
    if let Some(i) = (1..breakpoints.len()).find(|&i| breakpoints[i] < breakpoints[i - 1]) {
        return Err(PotentialError::NonMonotoneBreakpoints { index: i });
    }
    let mut bps = vec![breakpoints[0]];
    let mut vals = Vec::with_capacity(values.len());
    for (j, &v) in values.iter().enumerate() {
        if breakpoints[j + 1] > breakpoints[j] {
            bps.push(breakpoints[j + 1]);
            vals.push(v);
        }
    }
    if vals.is_empty() {
        return Err(PotentialError::TooFewBreakpoints);
    }
    Ok(PiecewiseConstantPotential {
        breakpoints: bps,
        values: vals,
    })
}

impl<T: Real> PiecewiseConstantPotential<T> {
    pub fn breakpoints(&self) -> &[T] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    /// Iterates `(left, right, value)` over the pieces.
    pub fn pieces(&self) -> impl DoubleEndedIterator<Item = (T, T, T)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(move |(j, &v)| (self.breakpoints[j], self.breakpoints[j + 1], v))
    }

    /// Point value; at a breakpoint the right limit.
    pub fn eval(&self, x: T) -> T {
        let bps = &self.breakpoints;
        if x < bps[0] || x >= bps[bps.len() - 1] {
            return T::zero();
        }
        let idx = bps.partition_point(|&a| a <= x);
        self.values[idx - 1]
    }

    pub fn l1_norm(&self) -> T {
        self.pieces().fold(T::zero(), |acc, (a, b, v)| acc + v.abs() * (b - a))
    }

    pub fn integral(&self) -> T {
        self.pieces().fold(T::zero(), |acc, (a, b, v)| acc + v * (b - a))
    }

    pub fn is_trivial(&self) -> bool {
        self.values.iter().all(|v| *v == T::zero())
    }

    /// Smallest closed interval containing the support, `None` if trivial.
    pub fn support(&self) -> Option<(T, T)> {
        let first = self.pieces().find(|p| p.2 != T::zero())?;
        let last = self.pieces().rev().find(|p| p.2 != T::zero())?;
        Some((first.0, last.1))
    }

    /// Restriction to the convex hull of the support.
    pub fn trimmed(&self) -> Result<Self, PotentialError> {
        let (lo, hi) = self.support().ok_or(PotentialError::TrivialPotential)?;
        let pieces: Vec<_> = self.pieces().filter(|p| p.0 >= lo && p.1 <= hi).collect();
        let mut bps: Vec<T> = vec![pieces[0].0];
        bps.extend(pieces.iter().map(|p| p.1));
        let vals: Vec<T> = pieces.iter().map(|p| p.2).collect();
        build_w(&bps, &vals)
    }

    pub fn is_single_signed(&self) -> bool {
        let pos = self.values.iter().any(|v| *v > T::zero());
        let neg = self.values.iter().any(|v| *v < T::zero());
        pos != neg
    }

    /// `V(c + x) = −V(c − x)` about the midpoint `c` of the support hull.
    pub fn is_antisymmetric(&self) -> bool {
        let Ok(t) = self.trimmed() else {
            return false;
        };
        let n = t.breakpoints.len();
        let (lo, hi) = (t.breakpoints[0], t.breakpoints[n - 1]);
        let scale = T::one() + lo.abs().max(hi.abs());
        let vscale = t.values.iter().fold(T::zero(), |m, v| m.max(v.abs()));
        let tol = T::lit(64.0) * T::eps();
        let bps_ok = (0..n).all(|i| ((t.breakpoints[i] - lo) - (hi - t.breakpoints[n - 1 - i])).abs() <= tol * scale);
        let m = t.values.len();
        let vals_ok = (0..m).all(|j| (t.values[j] + t.values[m - 1 - j]).abs() <= tol * vscale);
        bps_ok && vals_ok
    }

    fn map(&self, op: Transform<T>) -> Self {
        let (bps, vals): (Vec<T>, Vec<T>) = match op {
            Transform::Translate(c) => (
                self.breakpoints.iter().map(|&a| a + c).collect(),
                self.values.clone(),
            ),
            Transform::Negate => (self.breakpoints.clone(), self.values.iter().map(|&v| -v).collect()),
            Transform::Mirror => (
                self.breakpoints.iter().rev().map(|&a| -a).collect(),
                self.values.iter().rev().copied().collect(),
            ),
        };
        PiecewiseConstantPotential {
            breakpoints: bps,
            values: vals,
        }
    }
}

/// Closed-form shapes an analytic potential can be built from. Every shape
/// except `Custom` has a text record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
#[serde(bound = "T: Serialize + DeserializeOwned")]
pub enum AnalyticShape<T> {
    /// `x ↦ −1/cosh x`.
    Hrp,
    /// `x ↦ amplitude / cosh(x / width)`.
    Sech { amplitude: T, width: T },
    Translate { inner: Box<AnalyticShape<T>>, shift: T },
    Negate { inner: Box<AnalyticShape<T>> },
    Mirror { inner: Box<AnalyticShape<T>> },
    #[serde(skip)]
    Custom(String),
}

type ScalarFn<T> = Arc<dyn Fn(T) -> T + Send + Sync>;

/// Real potential given by an evaluator, integrable on ℝ.
#[derive(Clone)]
pub struct AnalyticPotential<T> {
    shape: AnalyticShape<T>,
    evaluator: ScalarFn<T>,
    decay_hint: T,
    right_tail: Option<ScalarFn<T>>,
    left_tail: Option<ScalarFn<T>>,
}

impl<T: fmt::Debug> fmt::Debug for AnalyticPotential<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AnalyticPotential")
            .field("shape", &self.shape)
            .field("decay_hint", &self.decay_hint)
            .finish()
    }
}

/// `∫_X^∞ sech(x) dx = π − 2 arctan(eˣ)`, evaluated without overflow.
fn sech_right_tail<T: Real>(x: T) -> T {
    if x > T::zero() {
        T::lit(2.0) * (-x).exp().atan()
    } else {
        T::PI() - T::lit(2.0) * x.exp().atan()
    }
}

impl<T: Real> AnalyticPotential<T> {
    /// Wraps an arbitrary evaluator. `decay_hint` is a radius beyond which
    /// `∫|V|` is negligible.
    pub fn custom<F>(name: &str, evaluator: F, decay_hint: T) -> Self
    where
        F: Fn(T) -> T + Send + Sync + 'static,
    {
        Self {
            shape: AnalyticShape::Custom(name.to_string()),
            evaluator: Arc::new(evaluator),
            decay_hint,
            right_tail: None,
            left_tail: None,
        }
    }

    pub fn from_shape(shape: AnalyticShape<T>) -> Result<Self, PotentialError> {
        Ok(match shape {
            AnalyticShape::Hrp => Self {
                shape: AnalyticShape::Hrp,
                evaluator: Arc::new(|x: T| -T::one() / x.cosh()),
                decay_hint: T::lit(40.0),
                right_tail: Some(Arc::new(sech_right_tail)),
                left_tail: Some(Arc::new(|x: T| sech_right_tail(x))),
            },
            AnalyticShape::Sech { amplitude, width } => {
                if !(width > T::zero()) || !amplitude.is_finite() {
                    return Err(PotentialError::Record("sech needs width > 0".into()));
                }
                Self {
                    shape: AnalyticShape::Sech { amplitude, width },
                    evaluator: Arc::new(move |x: T| amplitude / (x / width).cosh()),
                    decay_hint: T::lit(40.0) * width,
                    right_tail: Some(Arc::new(move |x: T| amplitude.abs() * width * sech_right_tail(x / width))),
                    left_tail: Some(Arc::new(move |x: T| amplitude.abs() * width * sech_right_tail(x / width))),
                }
            }
            AnalyticShape::Translate { inner, shift } => Self::from_shape(*inner)?.apply(Transform::Translate(shift)),
            AnalyticShape::Negate { inner } => Self::from_shape(*inner)?.apply(Transform::Negate),
            AnalyticShape::Mirror { inner } => Self::from_shape(*inner)?.apply(Transform::Mirror),
            AnalyticShape::Custom(name) => return Err(PotentialError::Unserializable(name)),
        })
    }

    pub fn shape(&self) -> &AnalyticShape<T> {
        &self.shape
    }

    pub fn decay_hint(&self) -> T {
        self.decay_hint
    }

    pub fn eval(&self, x: T) -> T {
        (self.evaluator)(x)
    }

    /// `∫_X^∞ |V|`.
    pub fn right_tail(&self, x: T) -> T {
        match &self.right_tail {
            Some(t) => t(x),
            None if x >= self.decay_hint => T::zero(),
            None => quad::integrate(|t| self.eval(t).abs(), x, self.decay_hint, T::lit(1e-12)),
        }
    }

    /// `∫_{−∞}^{−X} |V|`.
    pub fn left_tail(&self, x: T) -> T {
        match &self.left_tail {
            Some(t) => t(x),
            None if x >= self.decay_hint => T::zero(),
            None => quad::integrate(|t| self.eval(t).abs(), -self.decay_hint, -x, T::lit(1e-12)),
        }
    }

    pub fn l1_norm(&self) -> T {
        let r = self.decay_hint;
        quad::integrate(|x| self.eval(x).abs(), -r, r, T::lit(1e-10)) + self.right_tail(r) + self.left_tail(r)
    }

    pub fn integral(&self) -> T {
        let r = self.decay_hint;
        quad::integrate(|x| self.eval(x), -r, r, T::lit(1e-10))
    }

    fn apply(self, op: Transform<T>) -> Self {
        let f = self.evaluator.clone();
        match op {
            Transform::Translate(c) => {
                let (rt, lt) = (self.right_tail.clone(), self.left_tail.clone());
                Self {
                    shape: wrap_shape(self.shape, op),
                    evaluator: Arc::new(move |x| f(x - c)),
                    decay_hint: self.decay_hint + c.abs(),
                    right_tail: rt.map(|t| Arc::new(move |x: T| t(x - c)) as ScalarFn<T>),
                    left_tail: lt.map(|t| Arc::new(move |x: T| t(x + c)) as ScalarFn<T>),
                }
            }
            Transform::Negate => Self {
                shape: wrap_shape(self.shape, op),
                evaluator: Arc::new(move |x| -f(x)),
                ..self
            },
            Transform::Mirror => Self {
                shape: wrap_shape(self.shape, op),
                evaluator: Arc::new(move |x| f(-x)),
                right_tail: self.left_tail,
                left_tail: self.right_tail,
                decay_hint: self.decay_hint,
            },
        }
    }
}

fn wrap_shape<T: Real>(inner: AnalyticShape<T>, op: Transform<T>) -> AnalyticShape<T> {
    let inner = Box::new(inner);
    match op {
        Transform::Translate(shift) => AnalyticShape::Translate { inner, shift },
        Transform::Negate => AnalyticShape::Negate { inner },
        Transform::Mirror => AnalyticShape::Mirror { inner },
    }
}

/// `x ↦ −sech x`, decaying with `sech(40) < 1e−17`.
pub fn hrp_potential<T: Real>() -> AnalyticPotential<T> {
    AnalyticPotential::from_shape(AnalyticShape::Hrp).expect("built-in shape")
}

/// Pointwise transforms that leave the spectrum invariant as a set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Transform<T> {
    /// `V(x) ↦ V(x − c)`.
    Translate(T),
    Negate,
    /// `V(x) ↦ V(−x)`.
    Mirror,
}

#[derive(Debug, Clone)]
pub enum Potential<T> {
    Piecewise(PiecewiseConstantPotential<T>),
    Analytic(AnalyticPotential<T>),
}

impl<T: Real> From<PiecewiseConstantPotential<T>> for Potential<T> {
    fn from(p: PiecewiseConstantPotential<T>) -> Self {
        Potential::Piecewise(p)
    }
}

impl<T: Real> From<AnalyticPotential<T>> for Potential<T> {
    fn from(p: AnalyticPotential<T>) -> Self {
        Potential::Analytic(p)
    }
}

impl<T: Real> Potential<T> {
    pub fn eval(&self, x: T) -> T {
        match self {
            Potential::Piecewise(p) => p.eval(x),
            Potential::Analytic(p) => p.eval(x),
        }
    }

    /// `‖V‖₁`: exact for piecewise-constant, adaptive quadrature otherwise.
    pub fn l1_norm(&self) -> T {
        match self {
            Potential::Piecewise(p) => p.l1_norm(),
            Potential::Analytic(p) => p.l1_norm(),
        }
    }

    /// `∫V`.
    pub fn integral(&self) -> T {
        match self {
            Potential::Piecewise(p) => p.integral(),
            Potential::Analytic(p) => p.integral(),
        }
    }

    pub fn transform(&self, op: Transform<T>) -> Self {
        match self {
            Potential::Piecewise(p) => Potential::Piecewise(p.map(op)),
            Potential::Analytic(p) => Potential::Analytic(p.clone().apply(op)),
        }
    }

    pub fn as_piecewise(&self) -> Option<&PiecewiseConstantPotential<T>> {
        match self {
            Potential::Piecewise(p) => Some(p),
            Potential::Analytic(_) => None,
        }
    }

    /// Interval outside which the potential is zero (piecewise) or
    /// negligible (analytic, from the decay hint).
    pub fn extent(&self) -> Option<(T, T)> {
        match self {
            Potential::Piecewise(p) => p.support(),
            Potential::Analytic(p) => Some((-p.decay_hint, p.decay_hint)),
        }
    }

    pub fn to_record(&self) -> Result<PotentialRecord<T>, PotentialError> {
        match self {
            Potential::Piecewise(p) => Ok(PotentialRecord::Piecewise {
                breakpoints: p.breakpoints.clone(),
                values: p.values.clone(),
            }),
            Potential::Analytic(p) => {
                if let Some(name) = custom_name(&p.shape) {
                    return Err(PotentialError::Unserializable(name.to_string()));
                }
                Ok(PotentialRecord::Analytic {
                    shape: p.shape.clone(),
                })
            }
        }
    }

    pub fn from_record(record: PotentialRecord<T>) -> Result<Self, PotentialError> {
        match record {
            PotentialRecord::Piecewise { breakpoints, values } => Ok(Potential::Piecewise(build_w(&breakpoints, &values)?)),
            PotentialRecord::Analytic { shape } => Ok(Potential::Analytic(AnalyticPotential::from_shape(shape)?)),
        }
    }
}

fn custom_name<T>(shape: &AnalyticShape<T>) -> Option<&str> {
    match shape {
        AnalyticShape::Custom(n) => Some(n),
        AnalyticShape::Translate { inner, .. } | AnalyticShape::Negate { inner } | AnalyticShape::Mirror { inner } => {
            custom_name(inner)
        }
        _ => None,
    }
}

/// Structured text record of a potential.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
#[serde(bound = "T: Serialize + DeserializeOwned")]
pub enum PotentialRecord<T> {
    Piecewise { breakpoints: Vec<T>, values: Vec<T> },
    Analytic { shape: AnalyticShape<T> },
}

impl<T: Real + Serialize + DeserializeOwned> Potential<T> {
    /// One-line JSON record; piecewise-constant potentials round-trip bit-exactly.
    pub fn to_record_string(&self) -> Result<String, PotentialError> {
        serde_json::to_string(&self.to_record()?).map_err(|e| PotentialError::Record(e.to_string()))
    }

    pub fn from_record_str(s: &str) -> Result<Self, PotentialError> {
        let rec: PotentialRecord<T> = serde_json::from_str(s).map_err(|e| PotentialError::Record(e.to_string()))?;
        Self::from_record(rec)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GapKind {
    NoGap,
    OneGap,
    /// Number of gaps, at least two.
    MultiGap(usize),
}

/// Maximal run of non-zero pieces.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Component<T> {
    pub start: T,
    pub end: T,
    pub integral: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GapStructure<T> {
    pub kind: GapKind,
    pub components: Vec<Component<T>>,
}

/// Splits the support into maximal runs of non-zero pieces; every interior
/// zero piece of positive length separates two runs.
pub fn classify_gaps<T: Real>(v: &PiecewiseConstantPotential<T>) -> Result<GapStructure<T>, PotentialError> {
    if v.is_trivial() {
        return Err(PotentialError::TrivialPotential);
    }
    let mut components: Vec<Component<T>> = Vec::new();
    let mut open: Option<Component<T>> = None;
    for (a, b, val) in v.pieces() {
        if val == T::zero() {
            if let Some(c) = open.take() {
                components.push(c);
            }
        } else {
            let c = open.get_or_insert(Component {
                start: a,
                end: b,
                integral: T::zero(),
            });
            c.end = b;
            c.integral += val * (b - a);
        }
    }
    if let Some(c) = open {
        components.push(c);
    }
    let kind = match components.len() {
        1 => GapKind::NoGap,
        2 => GapKind::OneGap,
        n => GapKind::MultiGap(n - 1),
    };
    Ok(GapStructure { kind, components })
}

/// Gap length parameter `α = tanh(k·gap)` and integral contrast
/// `β = |v₁ − v₂| / |v₁ + v₂|` of a one-gap potential.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OneGapParams<T> {
    pub alpha: T,
    pub beta: T,
    pub k: T,
    /// Integrals of the two components, left to right.
    pub v1: T,
    pub v2: T,
}

pub fn one_gap_params<T: Real>(v: &PiecewiseConstantPotential<T>, k: T) -> Result<OneGapParams<T>, PotentialError> {
    let gaps = classify_gaps(v)?;
    if gaps.kind != GapKind::OneGap {
        return Err(PotentialError::NotOneGap(gaps.kind));
    }
    let (c1, c2) = (gaps.components[0], gaps.components[1]);
    let (v1, v2) = (c1.integral, c2.integral);
    let sum = v1 + v2;
    if sum.abs() <= T::lit(16.0) * T::eps() * (v1.abs() + v2.abs()) {
        return Err(PotentialError::ZeroIntegral);
    }
    Ok(OneGapParams {
        alpha: (k * (c2.start - c1.end)).tanh(),
        beta: ((v1 - v2) / sum).abs(),
        k,
        v1,
        v2,
    })
}

/// Builds a one-gap potential with `|∫V| = v`, `‖V‖₁ = u` and counting
/// slope `A/π`: components `W([−1,0];{v₁})` and `W([g,g+1,g+2];{v₂+v₀,−v₀})`
/// with `β = w/v` irrational-looking and `α` solving `ν_{α,β} = A/v`.
pub fn synthesize_one_gap<T: Real>(v: T, a: T, u: T, k: T) -> Result<PiecewiseConstantPotential<T>, PotentialError> {
    let infeasible = || PotentialError::InfeasibleTriple {
        v: v.to_f64_lossy(),
        a: a.to_f64_lossy(),
        u: u.to_f64_lossy(),
    };
    if !(T::zero() < v && v < a && a < u) || !(k > T::zero()) {
        return Err(infeasible());
    }
    let half = T::lit(0.5);
    let mid = half * (u + v);
    let mut w = if mid > a { mid } else { half * (a + u) };
    // Push w/v off every rational with a small denominator.
    let nudge = v * T::SQRT_2() * T::lit(1e-3);
    let room = (u - w).min(w - a);
    let mut step = nudge.min(half * room);
    for _ in 0..8 {
        if asymptotics::detect_rational(w / v, 1_000_000, T::lit(1e-9)).is_none() {
            break;
        }
        w += step;
        step *= half;
    }
    if !(w > a && w < u) {
        return Err(infeasible());
    }
    let beta = w / v;
    let target = a / v;
    let lo = T::one() / beta;
    let alpha = crate::roots::bisect(
        |al: T| asymptotics::nu(al, beta).map(|n| n - target).unwrap_or(-T::one()),
        lo + T::eps() * T::lit(4.0),
        T::one() - T::eps() * T::lit(4.0),
        T::eps() * T::lit(8.0),
        200,
    )
    .ok_or_else(infeasible)?;
    let g = alpha.atanh() / k;
    let v0 = half * (u - w);
    let v1 = half * (v - w);
    let v2 = half * (v + w);
    build_w(
        &[-T::one(), T::zero(), g, g + T::one(), g + T::lit(2.0)],
        &[v1, T::zero(), v2 + v0, -v0],
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn unit_barrier_values() {
        let v1 = build_w(&[-1.0, 1.0], &[1.0]).unwrap();
        assert_eq!(v1.eval(0.0), 1.0);
        assert_eq!(v1.eval(2.0), 0.0);
        assert_eq!(v1.eval(-1.0), 1.0);
        assert_eq!(v1.eval(1.0), 0.0);
        assert_eq!(v1.l1_norm(), 2.0);
    }

    #[test]
    fn zero_potential() {
        let z = build_w(&[0.0, 1.0], &[0.0]).unwrap();
        assert_eq!(z.l1_norm(), 0.0);
        assert_eq!(z.integral(), 0.0);
        assert_eq!(classify_gaps(&z), Err(PotentialError::TrivialPotential));
    }

    #[test]
    fn construction_errors() {
        let eps = 1e-3;
        assert_eq!(
            build_w(&[-2.0, -1.0, -1.0 + eps, -1.5], &[1.0, 2.0, 3.0]),
            Err(PotentialError::NonMonotoneBreakpoints { index: 3 })
        );
        assert!(matches!(
            build_w(&[0.0, 1.0, 2.0], &[1.0]),
            Err(PotentialError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn zero_length_pieces_are_dropped() {
        let v = catalog::step_pair(0.0, 2.0);
        assert_eq!(v.breakpoints(), &[-1.0, 0.0, 2.0]);
        assert_eq!(v.values(), &[-1.0, 1.0]);
    }

    #[test]
    fn catalog_integrals_and_norms() {
        for g in [0.0f64, 0.5, 1.0, 3.0] {
            let v4 = catalog::twin_gap(g);
            assert!((v4.l1_norm() - 4.0).abs() < 1e-14);
            assert!(v4.integral().abs() < 1e-14);
        }
        let v3 = catalog::step_pair(0.7f64, 2.5);
        assert!((v3.integral() - 1.5).abs() < 1e-14);
        assert!((v3.l1_norm() - 3.5).abs() < 1e-14);
    }

    #[test]
    fn gap_classification() {
        assert_eq!(classify_gaps(&catalog::step_pair(0.0, 2.0)).unwrap().kind, GapKind::NoGap);
        let one = classify_gaps(&catalog::step_pair(1.0, 2.0)).unwrap();
        assert_eq!(one.kind, GapKind::OneGap);
        assert_eq!(one.components[0].end, -1.0);
        assert_eq!(one.components[1].start, 0.0);
        assert_eq!(classify_gaps(&catalog::twin_gap(1.0)).unwrap().kind, GapKind::MultiGap(2));
        assert_eq!(classify_gaps(&catalog::unit_barrier::<f64>()).unwrap().kind, GapKind::NoGap);
    }

    #[test]
    fn one_gap_parameters() {
        let p = one_gap_params(&catalog::step_pair(1.0, 2.0), 1.0).unwrap();
        assert!((p.alpha - 1f64.tanh()).abs() < 1e-15);
        assert!((p.beta - 3.0).abs() < 1e-15);
        assert_eq!(
            one_gap_params(&catalog::step_pair(0.4, 1.0), 1.0),
            Err(PotentialError::ZeroIntegral)
        );
        assert!(matches!(
            one_gap_params(&catalog::twin_gap(1.0), 1.0),
            Err(PotentialError::NotOneGap(GapKind::MultiGap(2)))
        ));
        // Independent recomputation from the definitions: v₁ = −1, v₂ = 3.
        let p = one_gap_params(&catalog::step_pair(0.5, 3.0), 1.0).unwrap();
        let (v1, v2) = (-1.0f64, 3.0f64);
        assert!((p.alpha - (0.5f64).tanh()).abs() < 1e-15);
        assert!((p.beta - ((v1 - v2) / (v1 + v2)).abs()).abs() < 1e-15);
        assert!((p.beta - 2.0).abs() < 1e-15);
    }

    #[test]
    fn hrp_shape() {
        let v = hrp_potential::<f64>();
        assert_eq!(v.eval(0.0), -1.0);
        for x in [0.3, 1.7, 12.0] {
            assert_eq!(v.eval(x), v.eval(-x));
        }
        assert!((v.integral() + std::f64::consts::PI).abs() < 1e-9);
        assert!((v.l1_norm() - std::f64::consts::PI).abs() < 1e-9);
        assert!((40f64).cosh().recip() < 1e-17);
    }

    #[test]
    fn hrp_tail_matches_quadrature() {
        let v = hrp_potential::<f64>();
        for x in [0.0, 2.0, 10.0, -3.0] {
            let q = quad::integrate(|t: f64| v.eval(t).abs(), x, 60.0, 1e-13);
            assert!((v.right_tail(x) - q).abs() < 1e-10, "{x}");
        }
        let shifted = Potential::Analytic(v).transform(Transform::Translate(3.0));
        if let Potential::Analytic(s) = shifted {
            let q = quad::integrate(|t: f64| s.eval(t).abs(), 5.0, 80.0, 1e-13);
            assert!((s.right_tail(5.0) - q).abs() < 1e-10);
            let q = quad::integrate(|t: f64| s.eval(t).abs(), -80.0, -1.0, 1e-13);
            assert!((s.left_tail(1.0) - q).abs() < 1e-10);
        }
    }

    #[test]
    fn mirror_negate_of_antisymmetric_is_identity() {
        let v = Potential::Piecewise(catalog::antisymmetric_pair(1.0));
        let w = v.transform(Transform::Negate).transform(Transform::Mirror);
        let (a, b) = (v.as_piecewise().unwrap(), w.as_piecewise().unwrap());
        assert_eq!(a, b);
        assert!(a.is_antisymmetric());
        assert!(!catalog::step_pair(1.0, 2.0).is_antisymmetric());
    }

    #[test]
    fn synthesized_potential_hits_targets() {
        let v = synthesize_one_gap(1.0f64, 2.0, 4.0, 1.0).unwrap();
        assert!((v.integral().abs() - 1.0).abs() < 1e-12);
        assert!((v.l1_norm() - 4.0).abs() < 1e-12);
        let p = one_gap_params(&v, 1.0).unwrap();
        assert!(p.alpha * p.beta > 1.0);
        assert!(asymptotics::detect_rational(p.beta, 1_000_000, 1e-9).is_none());
        let nu = asymptotics::nu(p.alpha, p.beta).unwrap();
        assert!((nu - 2.0).abs() < 1e-9);
    }

    #[test]
    fn synthesize_rejects_bad_triples() {
        assert!(matches!(
            synthesize_one_gap(1.0, 0.5, 4.0, 1.0),
            Err(PotentialError::InfeasibleTriple { .. })
        ));
        assert!(matches!(
            synthesize_one_gap(1.0, 2.0, 2.0, 1.0),
            Err(PotentialError::InfeasibleTriple { .. })
        ));
    }

    #[test]
    fn synthesize_when_midpoint_below_target() {
        let v = synthesize_one_gap(1.0f64, 3.5, 4.0, 2.0).unwrap();
        let p = one_gap_params(&v, 2.0).unwrap();
        assert!((asymptotics::nu(p.alpha, p.beta).unwrap() - 3.5).abs() < 1e-9);
        assert!((v.l1_norm() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn record_round_trip() {
        let v = Potential::Piecewise(build_w(&[-0.1, 0.3, 1.0 / 3.0], &[std::f64::consts::E, -1e-300]).unwrap());
        let s = v.to_record_string().unwrap();
        let back = Potential::<f64>::from_record_str(&s).unwrap();
        assert_eq!(back.as_piecewise(), v.as_piecewise());

        let h = Potential::Analytic(hrp_potential::<f64>()).transform(Transform::Translate(2.5));
        let s = h.to_record_string().unwrap();
        let back = Potential::<f64>::from_record_str(&s).unwrap();
        assert_eq!(back.eval(1.25), h.eval(1.25));

        let c = Potential::Analytic(AnalyticPotential::custom("bump", |x: f64| (-x * x).exp(), 10.0));
        assert!(matches!(c.to_record_string(), Err(PotentialError::Unserializable(_))));
    }
}
