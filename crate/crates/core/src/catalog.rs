//! Standard piecewise-constant test potentials.

use crate::potential::{build_w, PiecewiseConstantPotential};
use crate::scalar::Real;

/// `W(x; [−1, 1]; {1})`.
pub fn unit_barrier<T: Real>() -> PiecewiseConstantPotential<T> {
    build_w(&[-T::one(), T::one()], &[T::one()]).expect("valid")
}

/// Antisymmetric `W(x; [−1−g/2, −g/2, g/2, g/2+1]; {−1, 0, 1})`.
pub fn antisymmetric_pair<T: Real>(g: T) -> PiecewiseConstantPotential<T> {
    let h = g * T::lit(0.5);
    let one = T::one();
    build_w(&[-one - h, -h, h, h + one], &[-one, T::zero(), one]).expect("valid")
}

/// `W(x; [−g−1, −g, 0, b]; {−1, 0, 1})`; one gap of length `g` when `g > 0`.
pub fn step_pair<T: Real>(g: T, b: T) -> PiecewiseConstantPotential<T> {
    let one = T::one();
    build_w(&[-g - one, -g, T::zero(), b], &[-one, T::zero(), one]).expect("valid")
}

/// Symmetric twin-gap `W(x; [−g−2, −g−1, −1, 1, g+1, g+2]; {−1, 0, 1, 0, −1})`.
pub fn twin_gap<T: Real>(g: T) -> PiecewiseConstantPotential<T> {
    let one = T::one();
    let two = T::lit(2.0);
    build_w(
        &[-g - two, -g - one, -one, one, g + one, g + two],
        &[-one, T::zero(), one, T::zero(), -one],
    )
    .expect("valid")
}

/// Twin-gap threshold `arctanh(1/√2)` separating finitely many real
/// eigenvalues from linear growth.
pub fn twin_gap_threshold<T: Real>() -> T {
    T::FRAC_1_SQRT_2().atanh()
}
