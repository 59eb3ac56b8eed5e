//! Locating points of `Γ(V)`: real roots from level crossings of `Δ_V`,
//! complex roots of `D_V` by argument tracking and quadrisection, counting
//! functions and phase plots.

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::closedform::{determinant, ClosedFormError};
use crate::potential::{PiecewiseConstantPotential, Potential};
use crate::prufer::{delta_v, delta_with_derivative, level_residual, truncation_radius, PruferError};
use crate::roots::brent;
use crate::scalar::{floor_i64, Real};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectraError {
    #[error(transparent)]
    Prufer(#[from] PruferError),
    #[error(transparent)]
    ClosedForm(#[from] ClosedFormError),
    #[error("radius must be positive, got {0}")]
    NonPositiveRadius(f64),
    #[error("scan still finds double crossings after {restarts} step halvings")]
    ScanStepTooCoarse { restarts: usize },
    #[error("root near {gamma} has residual {residual} above tolerance")]
    ResidualTooLarge { gamma: f64, residual: f64 },
    #[error("spectrum covers [0, {covered}] but [0, {requested}] was requested")]
    RegionTooSmall { requested: f64, covered: f64 },
    #[error("winding {expected} split into sub-rectangles totalling {found}")]
    WindingMismatch { expected: i64, found: i64 },
    #[error("a root lies on the contour near ({re}, {im})")]
    BoundaryRoot { re: f64, im: f64 },
    #[error("invalid rectangle: {0}")]
    InvalidRectangle(String),
    #[error("grid needs at least 2 points per axis")]
    GridTooSmall,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RootMethod {
    DeltaBisect,
    DeterminantBrent,
    WindingNewton,
}

impl RootMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            RootMethod::DeltaBisect => "DeltaBisect",
            RootMethod::DeterminantBrent => "DeterminantBrent",
            RootMethod::WindingNewton => "WindingNewton",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Root<T> {
    pub value: Complex<T>,
    /// Distance of `Δ_V` to its level for real roots; `|D/D'|` for complex ones.
    pub residual: T,
    pub method: RootMethod,
    /// Winding multiplicity; always 1 for real roots.
    pub multiplicity: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rectangle<T> {
    pub re_min: T,
    pub re_max: T,
    pub im_min: T,
    pub im_max: T,
}

impl<T: Real> Rectangle<T> {
    pub fn new(re_min: T, re_max: T, im_min: T, im_max: T) -> Result<Self, SpectraError> {
        let ok = [re_min, re_max, im_min, im_max].iter().all(|v| v.is_finite());
        if !ok || !(re_max > re_min) || !(im_max > im_min) {
            return Err(SpectraError::InvalidRectangle(format!(
                "[{re_min}, {re_max}] × [{im_min}, {im_max}] has no interior"
            )));
        }
        Ok(Self {
            re_min,
            re_max,
            im_min,
            im_max,
        })
    }

    pub fn diameter(&self) -> T {
        (self.re_max - self.re_min).hypot(self.im_max - self.im_min)
    }

    pub fn center(&self) -> Complex<T> {
        let h = T::lit(0.5);
        Complex::new(h * (self.re_min + self.re_max), h * (self.im_min + self.im_max))
    }

    pub fn contains(&self, z: Complex<T>, slack: T) -> bool {
        z.re >= self.re_min - slack && z.re <= self.re_max + slack && z.im >= self.im_min - slack && z.im <= self.im_max + slack
    }

    fn expanded(&self, d: T) -> Self {
        Self {
            re_min: self.re_min - d,
            re_max: self.re_max + d,
            im_min: self.im_min - d,
            im_max: self.im_max + d,
        }
    }

    /// Counter-clockwise corners from the bottom left.
    fn corners(&self) -> [Complex<T>; 4] {
        [
            Complex::new(self.re_min, self.im_min),
            Complex::new(self.re_max, self.im_min),
            Complex::new(self.re_max, self.im_max),
            Complex::new(self.re_min, self.im_max),
        ]
    }

    /// Children split at the given fractions of width and height.
    fn quadrants(&self, fx: T, fy: T) -> [Self; 4] {
        let xm = self.re_min + fx * (self.re_max - self.re_min);
        let ym = self.im_min + fy * (self.im_max - self.im_min);
        [
            Self { re_max: xm, im_max: ym, ..*self },
            Self { re_min: xm, im_max: ym, ..*self },
            Self { re_min: xm, im_min: ym, ..*self },
            Self { re_max: xm, im_min: ym, ..*self },
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SearchRegion<T> {
    Interval { lo: T, hi: T },
    Rectangle(Rectangle<T>),
}

/// Determinant roots located independently of `Δ_V`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossCheck<T> {
    pub determinant_roots: Vec<T>,
    /// Largest elementwise distance to the `Δ_V` roots; infinite when the
    /// counts differ.
    pub max_deviation: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaSpectrum<T> {
    pub roots: Vec<Root<T>>,
    pub search_region: SearchRegion<T>,
    pub k: T,
    pub cross_check: Option<CrossCheck<T>>,
}

impl<T: Real> GammaSpectrum<T> {
    /// Real parts of the roots on the real axis, ascending.
    pub fn real_values(&self) -> Vec<T> {
        self.roots.iter().filter(|r| r.value.im == T::zero()).map(|r| r.value.re).collect()
    }

    /// One JSON object per root: `re`, `im`, `residual`, `method`, `multiplicity`.
    pub fn to_json_lines(&self) -> String {
        let mut out = String::new();
        for r in &self.roots {
            let line = serde_json::json!({
                "re": r.value.re.to_f64_lossy(),
                "im": r.value.im.to_f64_lossy(),
                "residual": r.residual.to_f64_lossy(),
                "method": r.method.as_str(),
                "multiplicity": r.multiplicity,
            });
            out.push_str(&line.to_string());
            out.push('\n');
        }
        out
    }
}

/// Halvings of the scan step tolerated before giving up.
const MAX_RESTARTS: usize = 6;

/// Separation below which two roots are merged.
const SEPARATION: f64 = 1e-7;

fn scan_step<T: Real>(v: &Potential<T>, k: T, radius: T) -> T {
    let diam = match v {
        Potential::Piecewise(p) => p.support().map(|(a, b)| b - a).unwrap_or(T::zero()),
        Potential::Analytic(a) => T::lit(2.0) * truncation_radius(a, radius),
    };
    T::FRAC_PI_4() / (T::lit(1.1) * v.l1_norm() + k * diam)
}

/// Level indices `n` with `(n + ½)π` strictly between `d0` and `d1`
/// (or equal to `d1`).
fn levels_between<T: Real>(d0: T, d1: T) -> Vec<i64> {
    let idx = |d: T| floor_i64(d / T::PI() - T::lit(0.5));
    let (i0, i1) = (idx(d0), idx(d1));
    if i1 > i0 {
        ((i0 + 1)..=i1).collect()
    } else if i0 > i1 {
        ((i1 + 1)..=i0).rev().collect()
    } else {
        Vec::new()
    }
}

fn level<T: Real>(n: i64) -> T {
    (T::lit(n as f64) + T::lit(0.5)) * T::PI()
}

/// Whether the cubic Hermite interpolant on a cell reaches a level that
/// the endpoint values do not bracket.
fn hidden_crossing<T: Real>(h: T, d0: T, d1: T, s0: T, s1: T) -> bool {
    // p(t) = h00 d0 + h10 h s0 + h01 d1 + h11 h s1 on t ∈ [0, 1].
    let (m0, m1) = (h * s0, h * s1);
    let c3 = T::lit(2.0) * d0 + m0 - T::lit(2.0) * d1 + m1;
    let c2 = -T::lit(3.0) * d0 - T::lit(2.0) * m0 + T::lit(3.0) * d1 - m1;
    let c1 = m0;
    let p = |t: T| ((c3 * t + c2) * t + c1) * t + d0;
    let mut lo = d0.min(d1);
    let mut hi = d0.max(d1);
    // Stationary points of the cubic.
    let (a, b, c) = (T::lit(3.0) * c3, T::lit(2.0) * c2, c1);
    let mut ts: Vec<T> = Vec::new();
    if a.abs() > T::eps() * (b.abs() + c.abs()) {
        let disc = b * b - T::lit(4.0) * a * c;
        if disc >= T::zero() {
            let r = disc.sqrt();
            ts.push((-b + r) / (a + a));
            ts.push((-b - r) / (a + a));
        }
    } else if b != T::zero() {
        ts.push(-c / b);
    }
    for t in ts {
        if t > T::zero() && t < T::one() {
            let y = p(t);
            lo = lo.min(y);
            hi = hi.max(y);
        }
    }
    levels_between(lo, hi).len() != levels_between(d0, d1).len()
}

/// All real points of `Γ(V)` in `[0, R]`.
///
/// `Δ_V` and `dΔ_V/dγ` are sampled on a uniform grid; every level `(n+½)π`
/// bracketed by adjacent samples is refined by Brent's method. A cubic
/// Hermite check flags cells where `Δ_V` may cross a level twice, in which
/// case the whole scan restarts at half the step. For piecewise-constant
/// potentials the sign changes of `D_V` between consecutive roots are
/// located as an independent cross-check.
pub fn real_spectrum<T: Real>(v: &Potential<T>, k: T, radius: T, tol: T) -> Result<GammaSpectrum<T>, SpectraError> {
    if !(radius > T::zero()) {
        return Err(SpectraError::NonPositiveRadius(radius.to_f64_lossy()));
    }
    delta_v(v, T::zero(), k)?;
    let region = SearchRegion::Interval { lo: T::zero(), hi: radius };
    let trivial = match v {
        Potential::Piecewise(p) => p.is_trivial(),
        Potential::Analytic(_) => false,
    };
    if trivial {
        return Ok(GammaSpectrum {
            roots: Vec::new(),
            search_region: region,
            k,
            cross_check: None,
        });
    }
    let mut step = scan_step(v, k, radius);
    for restart in 0..=MAX_RESTARTS {
        let n = (radius / step).ceil().to_usize().unwrap_or(1).max(1);
        let h = radius / T::from_usize_lossy(n);
        let grid: Vec<T> = (0..=n).map(|i| if i == n { radius } else { T::from_usize_lossy(i) * h }).collect();
        let samples = grid
            .par_iter()
            .map(|&g| delta_with_derivative(v, g, k))
            .collect::<Result<Vec<_>, _>>()?;
        let coarse = (0..n).any(|i| {
            let (d0, s0) = samples[i];
            let (d1, s1) = samples[i + 1];
            hidden_crossing(grid[i + 1] - grid[i], d0, d1, s0, s1)
        });
        if coarse {
            if restart == MAX_RESTARTS {
                return Err(SpectraError::ScanStepTooCoarse { restarts: restart });
            }
            step = step * T::lit(0.5);
            continue;
        }
        let brackets: Vec<(T, T, i64)> = (0..n)
            .flat_map(|i| {
                let (g0, g1) = (grid[i], grid[i + 1]);
                levels_between(samples[i].0, samples[i + 1].0)
                    .into_iter()
                    .map(move |l| (g0, g1, l))
            })
            .collect();
        let found = brackets
            .par_iter()
            .map(|&(g0, g1, l)| refine_real(v, k, g0, g1, l, tol))
            .collect::<Result<Vec<_>, _>>()?;
        let roots = merge_real(found);
        let cross_check = match v {
            Potential::Piecewise(p) => Some(determinant_cross_check(p, k, radius, &roots)?),
            Potential::Analytic(_) => None,
        };
        return Ok(GammaSpectrum {
            roots,
            search_region: region,
            k,
            cross_check,
        });
    }
    unreachable!("loop returns on its last iteration")
}

fn refine_real<T: Real>(v: &Potential<T>, k: T, g0: T, g1: T, l: i64, tol: T) -> Result<Root<T>, SpectraError> {
    let target = level::<T>(l);
    // The scan samples come from the joint (θ, ω) integration; a crossing
    // within ODE tolerance of a cell edge may not be bracketed by Δ alone.
    let (mut g0, mut g1) = (g0, g1);
    let width = g1 - g0;
    for _ in 0..4 {
        let f0 = delta_v(v, g0, k)? - target;
        let f1 = delta_v(v, g1, k)? - target;
        if f0 * f1 <= T::zero() {
            break;
        }
        g0 = (g0 - width).max(T::zero());
        g1 = g1 + width;
    }
    let mut failure = None;
    let root = brent(
        |g| match delta_v(v, g, k) {
            Ok(d) => d - target,
            Err(e) => {
                failure = Some(e);
                T::nan()
            }
        },
        g0,
        g1,
        T::lit(4.0) * T::eps() * (T::one() + g1.abs()),
        200,
    );
    if let Some(e) = failure {
        return Err(e.into());
    }
    let g = root.unwrap_or(T::lit(0.5) * (g0 + g1));
    let residual = level_residual(delta_v(v, g, k)?);
    if !(residual < tol) {
        return Err(SpectraError::ResidualTooLarge {
            gamma: g.to_f64_lossy(),
            residual: residual.to_f64_lossy(),
        });
    }
    Ok(Root {
        value: Complex::new(g, T::zero()),
        residual,
        method: RootMethod::DeltaBisect,
        multiplicity: 1,
    })
}

fn merge_real<T: Real>(mut found: Vec<Root<T>>) -> Vec<Root<T>> {
    found.sort_by(|a, b| a.value.re.partial_cmp(&b.value.re).expect("finite roots"));
    let mut out: Vec<Root<T>> = Vec::with_capacity(found.len());
    for r in found {
        match out.last_mut() {
            Some(last) if (r.value.re - last.value.re).abs() < T::lit(SEPARATION) => {
                if r.residual < last.residual {
                    *last = r;
                }
            }
            _ => out.push(r),
        }
    }
    out
}

/// Brent on `D_V` between midpoints of consecutive `Δ_V` roots.
fn determinant_cross_check<T: Real>(
    p: &PiecewiseConstantPotential<T>,
    k: T,
    radius: T,
    roots: &[Root<T>],
) -> Result<CrossCheck<T>, SpectraError> {
    let d = |g: T| determinant(p, Complex::new(g, T::zero()), k).map(|z| z.re);
    let vals: Vec<T> = roots.iter().map(|r| r.value.re).collect();
    let mut edges = vec![T::zero()];
    edges.extend(vals.windows(2).map(|w| T::lit(0.5) * (w[0] + w[1])));
    edges.push(radius);
    let found = edges
        .par_windows(2)
        .map(|w| -> Result<Option<T>, ClosedFormError> {
            let (fa, fb) = (d(w[0])?, d(w[1])?);
            if fa == T::zero() {
                return Ok(Some(w[0]));
            }
            if fa * fb > T::zero() {
                return Ok(None);
            }
            let xtol = T::lit(4.0) * T::eps() * (T::one() + w[1].abs());
            Ok(brent(|g| d(g).unwrap_or(T::nan()), w[0], w[1], xtol, 200))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let determinant_roots: Vec<T> = found.into_iter().flatten().filter(|g| *g > T::zero()).collect();
    let max_deviation = if determinant_roots.len() == vals.len() {
        determinant_roots
            .iter()
            .zip(&vals)
            .fold(T::zero(), |m, (a, b)| m.max((*a - *b).abs()))
    } else {
        T::infinity()
    };
    Ok(CrossCheck {
        determinant_roots,
        max_deviation,
    })
}

/// `#(Γ(V) ∩ (0, R])` from a real spectrum covering `[0, R]`.
pub fn counting_function<T: Real>(spectrum: &GammaSpectrum<T>, radius: T) -> Result<usize, SpectraError> {
    let covered = match spectrum.search_region {
        SearchRegion::Interval { lo, hi } if lo <= T::zero() => hi,
        SearchRegion::Interval { .. } => T::zero(),
        SearchRegion::Rectangle(r) if r.re_min <= T::zero() && r.im_min <= T::zero() && r.im_max >= T::zero() => r.re_max,
        SearchRegion::Rectangle(_) => T::zero(),
    };
    if radius > covered {
        return Err(SpectraError::RegionTooSmall {
            requested: radius.to_f64_lossy(),
            covered: covered.to_f64_lossy(),
        });
    }
    Ok(spectrum
        .real_values()
        .into_iter()
        .filter(|g| *g > T::zero() && *g <= radius)
        .count())
}

struct ContourFail<T> {
    at: Complex<T>,
}

/// Total change of `arg f` along the segment, with every accepted piece
/// changing the argument by less than π/2.
fn track_segment<T: Real, F: Fn(Complex<T>) -> Complex<T>>(
    f: &F,
    z0: Complex<T>,
    z1: Complex<T>,
    f0: Complex<T>,
    f1: Complex<T>,
    depth: usize,
) -> Result<T, ContourFail<T>> {
    let bad = |w: Complex<T>| !(w.re.is_finite() && w.im.is_finite()) || w.norm() == T::zero();
    if bad(f0) {
        return Err(ContourFail { at: z0 });
    }
    if bad(f1) {
        return Err(ContourFail { at: z1 });
    }
    let zm = (z0 + z1) * T::lit(0.5);
    let fm = f(zm);
    if bad(fm) {
        return Err(ContourFail { at: zm });
    }
    let a1 = (fm * f0.conj()).arg();
    let a2 = (f1 * fm.conj()).arg();
    let whole = (f1 * f0.conj()).arg();
    let consistent = (a1 + a2 - whole).abs() < T::lit(1e-6);
    if consistent && a1.abs() + a2.abs() < T::FRAC_PI_2() {
        return Ok(a1 + a2);
    }
    if depth >= 60 || (z1 - z0).norm() < T::lit(1e-13) * (T::one() + z0.norm()) {
        return Err(ContourFail { at: zm });
    }
    Ok(track_segment(f, z0, zm, f0, fm, depth + 1)? + track_segment(f, zm, z1, fm, f1, depth + 1)?)
}

fn winding<T: Real, F: Fn(Complex<T>) -> Complex<T> + Sync>(f: &F, rect: &Rectangle<T>, h0: T) -> Result<i64, ContourFail<T>> {
    let c = rect.corners();
    let mut total = T::zero();
    for e in 0..4 {
        let (za, zb) = (c[e], c[(e + 1) % 4]);
        let n = ((zb - za).norm() / h0).ceil().to_usize().unwrap_or(1).max(1);
        let pts: Vec<Complex<T>> = (0..=n)
            .map(|i| za + (zb - za) * T::from_usize_lossy(i) / T::from_usize_lossy(n))
            .collect();
        let vals: Vec<Complex<T>> = pts.iter().map(|&z| f(z)).collect();
        for i in 0..n {
            total += track_segment(f, pts[i], pts[i + 1], vals[i], vals[i + 1], 0)?;
        }
    }
    let w = total / T::TAU();
    let n = w.round();
    if (w - n).abs() > T::lit(0.1) {
        return Err(ContourFail { at: c[0] });
    }
    Ok(n.to_i64().unwrap_or(0))
}

fn derivative<T: Real, F: Fn(Complex<T>) -> Complex<T>>(f: &F, z: Complex<T>) -> Complex<T> {
    let h = T::lit(1e-6) * (T::one() + z.norm());
    let hr = Complex::new(h, T::zero());
    let hi = Complex::new(T::zero(), h);
    // Average of the real- and imaginary-direction central differences.
    ((f(z + hr) - f(z - hr)) / (hr + hr) + (f(z + hi) - f(z - hi)) / (hi + hi)) * T::lit(0.5)
}

fn newton<T: Real, F: Fn(Complex<T>) -> Complex<T>>(f: &F, start: Complex<T>, rect: &Rectangle<T>) -> (Complex<T>, T) {
    let mut z = start;
    let mut step_norm = T::infinity();
    for _ in 0..60 {
        let fz = f(z);
        let d = derivative(f, z);
        if d.norm() == T::zero() || fz.norm() == T::zero() {
            return (z, T::zero());
        }
        let step = fz / d;
        step_norm = step.norm();
        let next = z - step;
        if !rect.contains(next, rect.diameter()) {
            break;
        }
        z = next;
        if step_norm < T::lit(64.0) * T::eps() * (T::one() + z.norm()) {
            break;
        }
    }
    let d = derivative(f, z);
    let res = if d.norm() == T::zero() { step_norm } else { (f(z) / d).norm() };
    (z, res)
}

/// Interior cut fractions tried in turn when a cut passes through a root.
const CUT_FRACTIONS: [f64; 4] = [0.5, 0.5123, 0.4871, 0.5347];

/// Leaf size for quadrisection.
const LEAF_DIAMETER: f64 = 1e-3;

fn subdivide<T: Real, F: Fn(Complex<T>) -> Complex<T> + Sync>(
    f: &F,
    rect: Rectangle<T>,
    count: i64,
    h0: T,
) -> Result<Vec<Root<T>>, SpectraError> {
    if count <= 0 {
        return Ok(Vec::new());
    }
    if rect.diameter() < T::lit(LEAF_DIAMETER) {
        let (z, residual) = newton(f, rect.center(), &rect);
        return Ok(vec![Root {
            value: z,
            residual,
            method: RootMethod::WindingNewton,
            multiplicity: count as usize,
        }]);
    }
    let mut last_fail = rect.center();
    for frac in CUT_FRACTIONS {
        let fr = T::lit(frac);
        let kids = rect.quadrants(fr, fr);
        let counts: Vec<Result<i64, ContourFail<T>>> = kids.par_iter().map(|q| winding(f, q, h0)).collect();
        if let Some(Err(e)) = counts.iter().find(|c| c.is_err()) {
            last_fail = e.at;
            continue;
        }
        let counts: Vec<i64> = counts.into_iter().map(|c| c.unwrap_or(0)).collect();
        let sum: i64 = counts.iter().sum();
        if sum != count {
            return Err(SpectraError::WindingMismatch { expected: count, found: sum });
        }
        let parts = kids
            .par_iter()
            .zip(counts.par_iter())
            .map(|(q, &c)| subdivide(f, *q, c, h0))
            .collect::<Result<Vec<_>, _>>()?;
        return Ok(parts.into_iter().flatten().collect());
    }
    Err(SpectraError::BoundaryRoot {
        re: last_fail.re.to_f64_lossy(),
        im: last_fail.im.to_f64_lossy(),
    })
}

/// Complex points of `Γ(V)` inside a rectangle, from the winding number of
/// `D_V` along nested rectangle boundaries.
///
/// A boundary through a root is moved outwards by `10⁻⁶` once; if that does
/// not help the call fails with [`SpectraError::BoundaryRoot`].
pub fn complex_spectrum<T: Real>(
    v: &PiecewiseConstantPotential<T>,
    k: T,
    rect: Rectangle<T>,
    tol: T,
) -> Result<GammaSpectrum<T>, SpectraError> {
    Rectangle::new(rect.re_min, rect.re_max, rect.im_min, rect.im_max)?;
    let t = v.trimmed().map_err(|_| ClosedFormError::TrivialPotential)?;
    if !(k > T::zero()) {
        return Err(PruferError::NonPositiveK(k.to_f64_lossy()).into());
    }
    let f = |z: Complex<T>| determinant(&t, z, k).unwrap_or(Complex::new(T::nan(), T::nan()));
    let diam = t.support().map(|(a, b)| b - a).unwrap_or(T::one());
    let h0 = T::FRAC_PI_4() / (t.l1_norm() + k * diam);
    let (rect_used, count) = match winding(&f, &rect, h0) {
        Ok(n) => (rect, n),
        Err(_) => {
            let r = rect.expanded(T::lit(1e-6));
            match winding(&f, &r, h0) {
                Ok(n) => (r, n),
                Err(e) => {
                    return Err(SpectraError::BoundaryRoot {
                        re: e.at.re.to_f64_lossy(),
                        im: e.at.im.to_f64_lossy(),
                    })
                }
            }
        }
    };
    let mut roots = subdivide(&f, rect_used, count, h0)?;
    for r in &roots {
        if r.multiplicity == 1 && !(r.residual < tol) {
            return Err(SpectraError::ResidualTooLarge {
                gamma: r.value.re.to_f64_lossy(),
                residual: r.residual.to_f64_lossy(),
            });
        }
    }
    // D is real on the real axis, so a simple root this close to it is real.
    for r in &mut roots {
        if r.value.im.abs() <= tol * (T::one() + r.value.re.abs()) {
            r.value.im = T::zero();
        }
    }
    roots.sort_by(|a, b| {
        (a.value.re, a.value.im)
            .partial_cmp(&(b.value.re, b.value.im))
            .expect("finite roots")
    });
    Ok(GammaSpectrum {
        roots,
        search_region: SearchRegion::Rectangle(rect_used),
        k,
        cross_check: None,
    })
}

/// `arg D_V` sampled at cell centres; row 0 is the top (largest `Im γ`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseGrid<T> {
    pub rectangle: Rectangle<T>,
    pub nx: usize,
    pub ny: usize,
    /// Row-major, `ny` rows of `nx` values in `(−π, π]`.
    pub arg_values: Vec<T>,
}

impl<T: Real> PhaseGrid<T> {
    pub fn cell_center(&self, ix: usize, iy: usize) -> Complex<T> {
        let r = &self.rectangle;
        let half = T::lit(0.5);
        let dx = (r.re_max - r.re_min) / T::from_usize_lossy(self.nx);
        let dy = (r.im_max - r.im_min) / T::from_usize_lossy(self.ny);
        Complex::new(
            r.re_min + (T::from_usize_lossy(ix) + half) * dx,
            r.im_max - (T::from_usize_lossy(iy) + half) * dy,
        )
    }

    pub fn arg_at(&self, ix: usize, iy: usize) -> T {
        self.arg_values[iy * self.nx + ix]
    }

    /// Binary portable pixmap, hue `(arg + π)/2π` at full saturation and value.
    pub fn to_ppm(&self) -> Vec<u8> {
        let mut out = format!("P6\n{} {}\n255\n", self.nx, self.ny).into_bytes();
        for a in &self.arg_values {
            let hue = ((a.to_f64_lossy() + std::f64::consts::PI) / std::f64::consts::TAU).rem_euclid(1.0);
            out.extend_from_slice(&hue_to_rgb(hue));
        }
        out
    }

    /// `re,im,arg` rows with a header.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("re,im,arg\n");
        for iy in 0..self.ny {
            for ix in 0..self.nx {
                let z = self.cell_center(ix, iy);
                out.push_str(&format!("{},{},{}\n", z.re, z.im, self.arg_at(ix, iy)));
            }
        }
        out
    }
}

/// RGB of an HSV colour with `s = v = 1`.
pub fn hue_to_rgb(hue: f64) -> [u8; 3] {
    let h6 = hue * 6.0;
    let sector = (h6.floor() as i64).rem_euclid(6);
    let f = h6 - h6.floor();
    let up = (255.0 * f).round() as u8;
    let down = (255.0 * (1.0 - f)).round() as u8;
    match sector {
        0 => [255, up, 0],
        1 => [down, 255, 0],
        2 => [0, 255, up],
        3 => [0, down, 255],
        4 => [up, 0, 255],
        _ => [255, 0, down],
    }
}

pub fn phase_grid<T: Real>(
    v: &PiecewiseConstantPotential<T>,
    k: T,
    rect: Rectangle<T>,
    nx: usize,
    ny: usize,
) -> Result<PhaseGrid<T>, SpectraError> {
    if nx < 2 || ny < 2 {
        return Err(SpectraError::GridTooSmall);
    }
    Rectangle::new(rect.re_min, rect.re_max, rect.im_min, rect.im_max)?;
    let mut grid = PhaseGrid {
        rectangle: rect,
        nx,
        ny,
        arg_values: Vec::new(),
    };
    let values = (0..nx * ny)
        .into_par_iter()
        .map(|i| determinant(v, grid.cell_center(i % nx, i / nx), k).map(|d| d.arg()))
        .collect::<Result<Vec<_>, _>>()?;
    grid.arg_values = values;
    Ok(grid)
}
