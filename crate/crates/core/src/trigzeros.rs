//! Zeros of `f_φ(x) = cos x + α cos βx + φ(x)` on `[0, R]`: brute-force
//! counting, the per-period multiplicity `m(t)` and the exact density for
//! rational `β`.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use thiserror::Error;

use crate::roots::{brent, golden_min};
use crate::scalar::Real;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TrigError {
    #[error("parameters outside the domain: {0}")]
    OutOfDomain(String),
    #[error("a lattice point 2πn/q falls on an endpoint of J")]
    DegenerateEndpoint,
    #[error("cannot decide whether the cell near x = {x} holds a tangential zero")]
    UnresolvedCell { x: f64 },
    #[error("grid step {step} exceeds min(π, π/β)/8 = {max}")]
    StepTooLarge { step: f64, max: f64 },
    #[error("p = {p} and q = {q} are not coprime positive integers")]
    NotCoprime { p: u64, q: u64 },
}

type ScalarFn<T> = Arc<dyn Fn(T) -> T + Send + Sync>;

/// Decaying perturbation with its first (and optionally second) derivative.
#[derive(Clone)]
pub struct Perturbation<T> {
    pub value: ScalarFn<T>,
    pub derivative: ScalarFn<T>,
    pub second_derivative: Option<ScalarFn<T>>,
}

impl<T> fmt::Debug for Perturbation<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Perturbation")
            .field("second_derivative", &self.second_derivative.is_some())
            .finish()
    }
}

impl<T: Real> Perturbation<T> {
    pub fn new<F, G>(value: F, derivative: G) -> Self
    where
        F: Fn(T) -> T + Send + Sync + 'static,
        G: Fn(T) -> T + Send + Sync + 'static,
    {
        Self {
            value: Arc::new(value),
            derivative: Arc::new(derivative),
            second_derivative: None,
        }
    }

    pub fn with_second<H: Fn(T) -> T + Send + Sync + 'static>(mut self, h: H) -> Self {
        self.second_derivative = Some(Arc::new(h));
        self
    }
}

#[derive(Debug, Clone)]
pub struct TrigParams<T> {
    pub alpha: T,
    pub beta: T,
    pub phi: Option<Perturbation<T>>,
}

impl<T: Real> TrigParams<T> {
    pub fn new(alpha: T, beta: T) -> Result<Self, TrigError> {
        if !(alpha >= T::zero() && alpha < T::one() && beta >= T::zero() && beta.is_finite()) {
            return Err(TrigError::OutOfDomain(format!("need 0 ≤ α < 1 and β ≥ 0, got α = {alpha}, β = {beta}")));
        }
        Ok(Self { alpha, beta, phi: None })
    }

    pub fn with_phi(mut self, phi: Perturbation<T>) -> Self {
        self.phi = Some(phi);
        self
    }

    pub fn f(&self, x: T) -> T {
        let p = self.phi.as_ref().map_or(T::zero(), |p| (p.value)(x));
        x.cos() + self.alpha * (self.beta * x).cos() + p
    }

    pub fn df(&self, x: T) -> T {
        let p = self.phi.as_ref().map_or(T::zero(), |p| (p.derivative)(x));
        -x.sin() - self.alpha * self.beta * (self.beta * x).sin() + p
    }

    /// Largest admissible grid step, `min(π, π/β)/8`.
    pub fn max_step(&self) -> T {
        let base = if self.beta > T::one() { T::PI() / self.beta } else { T::PI() };
        base / T::lit(8.0)
    }
}

/// Angles `ξ, η ∈ (0, π/2)`, their complements, `μ = βξ − η'` and the open
/// interval `J = 3π/2 − βπ/2 + (−μ, μ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngleConstants<T> {
    pub xi: T,
    pub eta: T,
    pub xi_prime: T,
    pub eta_prime: T,
    pub mu: T,
    pub j_lo: T,
    pub j_hi: T,
}

fn clamp_unit<T: Real>(x: T) -> T {
    x.min(T::one()).max(-T::one())
}

impl<T: Real> AngleConstants<T> {
    pub fn new(alpha: T, beta: T) -> Result<Self, TrigError> {
        if !(alpha > T::zero() && alpha < T::one() && alpha * beta > T::one()) {
            return Err(TrigError::OutOfDomain(format!("need 0 < α < 1 < αβ, got α = {alpha}, β = {beta}")));
        }
        let root_b = (beta * beta - T::one()).sqrt();
        let xi = clamp_unit((alpha * alpha * beta * beta - T::one()).sqrt() / root_b).asin();
        let eta = clamp_unit((T::one() - alpha * alpha).sqrt() / (alpha * root_b)).asin();
        let xi_prime = T::FRAC_PI_2() - xi;
        let eta_prime = T::FRAC_PI_2() - eta;
        let mu = beta * xi - eta_prime;
        let center = T::lit(1.5) * T::PI() - beta * T::FRAC_PI_2();
        Ok(Self {
            xi,
            eta,
            xi_prime,
            eta_prime,
            mu,
            j_lo: center - mu,
            j_hi: center + mu,
        })
    }

    /// `ν = 1 + (2/π)μ`.
    pub fn nu(&self) -> T {
        T::one() + T::lit(2.0) / T::PI() * self.mu
    }

    /// `1` on `J`, `½` at its endpoints, `0` elsewhere.
    pub fn indicator(&self, t: T) -> T {
        let tol = T::lit(1e-12) * (T::one() + t.abs());
        if (t - self.j_lo).abs() <= tol || (t - self.j_hi).abs() <= tol {
            T::lit(0.5)
        } else if t > self.j_lo && t < self.j_hi {
            T::one()
        } else {
            T::zero()
        }
    }
}

/// `m(t) = 1 + 2 Σ_n 1̄_J(t − 2πn)`: the number of zeros of
/// `cos x + α cos(βx + t)` in `[0, π)`.
pub fn multiplicity_m<T: Real>(t: T, c: &AngleConstants<T>) -> T {
    let tau = T::TAU();
    let n_lo = ((t - c.j_hi) / tau).floor().to_i64().unwrap_or(0) - 1;
    let n_hi = ((t - c.j_lo) / tau).ceil().to_i64().unwrap_or(0) + 1;
    let s = (n_lo..=n_hi).fold(T::zero(), |acc, n| acc + c.indicator(t - tau * T::lit(n as f64)));
    T::one() + T::lit(2.0) * s
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// `lim N(R)/R = (1/π)(1 + (2/q) Σ_n 1̄_J(2πn/q))` for `β = p/q`.
pub fn rational_density<T: Real>(p: u64, q: u64, alpha: T) -> Result<T, TrigError> {
    if p == 0 || q == 0 || gcd(p, q) != 1 {
        return Err(TrigError::NotCoprime { p, q });
    }
    let beta = T::lit(p as f64) / T::lit(q as f64);
    let c = AngleConstants::new(alpha, beta)?;
    let step = T::TAU() / T::lit(q as f64);
    let n_lo = (c.j_lo / step).floor().to_i64().unwrap_or(0) - 1;
    let n_hi = (c.j_hi / step).ceil().to_i64().unwrap_or(0) + 1;
    let mut sum = T::zero();
    for n in n_lo..=n_hi {
        let v = c.indicator(step * T::lit(n as f64));
        if v == T::lit(0.5) {
            return Err(TrigError::DegenerateEndpoint);
        }
        sum += v;
    }
    Ok((T::one() + T::lit(2.0) / T::lit(q as f64) * sum) / T::PI())
}

/// `E_f(x) = f(x)² + f'(x)² < 10⁻¹⁸`.
pub fn tangency_test<T: Real>(params: &TrigParams<T>, x: T) -> bool {
    let (f, d) = (params.f(x), params.df(x));
    (f * f + d * d).to_f64_lossy() < 1e-18
}

#[derive(Debug, Clone, PartialEq)]
pub struct BruteCount<T> {
    pub count: usize,
    /// Located zeros, ascending.
    pub zeros: Vec<T>,
    /// Zeros where `f` and `f'` vanish together.
    pub tangential: Vec<T>,
}

impl<T: Real> BruteCount<T> {
    /// `R,count,density` rows at each checkpoint.
    pub fn trace_csv(&self, checkpoints: &[T]) -> String {
        let mut out = String::from("R,count,density\n");
        for &r in checkpoints {
            let n = self.zeros.partition_point(|z| *z <= r);
            out.push_str(&format!("{r},{n},{}\n", T::lit(n as f64) / r));
        }
        out
    }
}

/// Below this `|f|` at a local extremum the cell is treated as tangential.
const TANGENT_BAND: f64 = 1e-9;

/// Zeros of `f` in one cell `[a, b)`, with tangency flags.
fn cell_zeros<T: Real>(params: &TrigParams<T>, a: T, b: T) -> Result<Vec<(T, bool)>, TrigError> {
    let f = |x| params.f(x);
    let (fa, fb) = (f(a), f(b));
    let xtol = T::lit(4.0) * T::eps() * (T::one() + b.abs());
    let locate = |lo: T, hi: T| -> (T, bool) {
        let z = brent(f, lo, hi, xtol, 200).unwrap_or(lo);
        (z, tangency_test(params, z))
    };
    if fa == T::zero() {
        return Ok(vec![(a, tangency_test(params, a))]);
    }
    if fa * fb < T::zero() {
        return Ok(vec![locate(a, b)]);
    }
    if fb == T::zero() {
        return Ok(Vec::new());
    }
    // Same sign at both ends: look for an extremum of f heading towards zero.
    let s = fa.signum();
    let (da, db) = (params.df(a) * s, params.df(b) * s);
    if !(da < T::zero() && db > T::zero()) {
        return Ok(Vec::new());
    }
    let (xm, gm) = golden_min(|x| s * f(x), a, b, T::lit(1e-13) * (T::one() + b.abs()), 200);
    let band = T::lit(TANGENT_BAND);
    if gm > band {
        return Ok(Vec::new());
    }
    if gm < -band {
        return Ok(vec![locate(a, xm), locate(xm, b)]);
    }
    if tangency_test(params, xm) {
        Ok(vec![(xm, true)])
    } else {
        Err(TrigError::UnresolvedCell { x: xm.to_f64_lossy() })
    }
}

/// Counts zeros of `f_φ` in `[0, R]` on a uniform grid: sign changes are
/// refined by Brent's method and cells where `f` turns back towards zero
/// are examined by golden-section search.
pub fn brute_count<T: Real>(params: &TrigParams<T>, radius: T, grid_step: T) -> Result<BruteCount<T>, TrigError> {
    if !(radius > T::zero()) {
        return Err(TrigError::OutOfDomain(format!("R must be positive, got {radius}")));
    }
    let max = params.max_step();
    if !(grid_step > T::zero() && grid_step <= max * (T::one() + T::lit(1e-12))) {
        return Err(TrigError::StepTooLarge {
            step: grid_step.to_f64_lossy(),
            max: max.to_f64_lossy(),
        });
    }
    let n = (radius / grid_step).ceil().to_usize().unwrap_or(1).max(1);
    let h = radius / T::from_usize_lossy(n);
    let cells = (0..n)
        .into_par_iter()
        .map(|i| {
            let a = T::from_usize_lossy(i) * h;
            let b = if i + 1 == n { radius } else { T::from_usize_lossy(i + 1) * h };
            cell_zeros(params, a, b)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut found: Vec<(T, bool)> = Vec::new();
    // A zero on a cell boundary can be reported by both neighbours; the
    // left one keeps it.
    for z in cells.into_iter().flatten() {
        match found.last() {
            Some(last) if z.0 - last.0 <= T::lit(1e-9) * (T::one() + z.0.abs()) => {}
            _ => found.push(z),
        }
    }
    if params.f(radius) == T::zero() && found.last().map_or(true, |l| radius - l.0 > T::lit(1e-9) * (T::one() + radius)) {
        found.push((radius, tangency_test(params, radius)));
    }
    let zeros: Vec<T> = found.iter().map(|z| z.0).collect();
    let tangential: Vec<T> = found.iter().filter(|z| z.1).map(|z| z.0).collect();
    Ok(BruteCount {
        count: zeros.len(),
        zeros,
        tangential,
    })
}
