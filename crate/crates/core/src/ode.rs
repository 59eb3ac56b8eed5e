//! Adaptive Dormand–Prince 5(4) integrator for small fixed-size systems.
//!
//! Error control is per unit length: a step of size `h` is accepted when its
//! embedded error estimate does not exceed `tol·|h|` in every component, so
//! the accumulated error over an interval of length `L` is of order `tol·L`.

use thiserror::Error;

use crate::scalar::Real;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OdeError {
    #[error("step size underflow at x = {x}")]
    StepUnderflow { x: f64 },
    #[error("step budget exhausted at x = {x}")]
    TooManySteps { x: f64 },
}

#[derive(Debug, Clone, Copy)]
pub struct Dopri<T> {
    pub tol: T,
    pub max_step: T,
    pub max_steps: usize,
    /// Cap on the change of component 0 per accepted step.
    pub max_increment: Option<T>,
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

impl<T: Real> Dopri<T> {
    pub fn new(tol: T) -> Self {
        Self {
            tol,
            max_step: T::lit(0.5),
            max_steps: 2_000_000,
            max_increment: None,
        }
    }

    pub fn with_max_step(mut self, h: T) -> Self {
        self.max_step = h;
        self
    }

    pub fn with_max_increment(mut self, d: T) -> Self {
        self.max_increment = Some(d);
        self
    }

    /// Integrates `y' = f(x, y)` from `x0` to `x1` (either direction).
    pub fn solve<const N: usize, F>(&self, mut f: F, x0: T, y0: [T; N], x1: T) -> Result<[T; N], OdeError>
    where
        F: FnMut(T, &[T; N]) -> [T; N],
    {
        let span = x1 - x0;
        if span == T::zero() {
            return Ok(y0);
        }
        let dir = span.signum();
        let mut x = x0;
        let mut y = y0;
        let mut h = span.abs().min(self.max_step).min(T::lit(0.05));
        let h_min = T::lit(64.0) * T::eps() * (T::one() + x0.abs().max(x1.abs()));
        let mut k = [[T::zero(); N]; 7];
        k[0] = f(x, &y);
        let mut steps = 0usize;
        while (x1 - x) * dir > T::zero() {
            steps += 1;
            if steps > self.max_steps {
                return Err(OdeError::TooManySteps { x: x.to_f64_lossy() });
            }
            let remaining = (x1 - x).abs();
            let last = h >= remaining;
            if last {
                h = remaining;
            }
            let hs = h * dir;
            for s in 1..7 {
                let mut ys = y;
                for (i, yi) in ys.iter_mut().enumerate() {
                    let mut acc = T::zero();
                    for (j, kj) in k.iter().enumerate().take(s) {
                        acc += T::lit(A[s][j]) * kj[i];
                    }
                    *yi += hs * acc;
                }
                k[s] = f(x + T::lit(C[s]) * hs, &ys);
            }
            let mut y_new = y;
            let mut err = T::zero();
            for i in 0..N {
                let mut s5 = T::zero();
                let mut s4 = T::zero();
                for (s, ks) in k.iter().enumerate() {
                    s5 += T::lit(B5[s]) * ks[i];
                    s4 += T::lit(B4[s]) * ks[i];
                }
                y_new[i] = y[i] + hs * s5;
                let scale = self.tol * h + T::eps() * y_new[i].abs();
                err = err.max((hs * (s5 - s4)).abs() / scale);
            }
            let too_big = match self.max_increment {
                Some(cap) if N > 0 => (y_new[0] - y[0]).abs() >= cap,
                _ => false,
            };
            if err <= T::one() && !too_big && err.is_finite() {
                x = if last { x1 } else { x + hs };
                y = y_new;
                k[0] = k[6];
                let fac = if err == T::zero() {
                    T::lit(5.0)
                } else {
                    (T::lit(0.9) * err.powf(T::lit(-0.2))).min(T::lit(5.0))
                };
                h = (h * fac).min(self.max_step);
            } else {
                let fac = if too_big || !err.is_finite() {
                    T::lit(0.25)
                } else {
                    (T::lit(0.9) * err.powf(T::lit(-0.25))).max(T::lit(0.1))
                };
                h *= fac;
                if h < h_min {
                    return Err(OdeError::StepUnderflow { x: x.to_f64_lossy() });
                }
            }
        }
        Ok(y)
    }
}
