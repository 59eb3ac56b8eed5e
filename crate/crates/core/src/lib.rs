//! Coupling-constant spectra `Γ(V)` of the one-dimensional Dirac pencil
//! `T₀ + γV`: the coupling constants `γ` for which the system
//!
//! ```text
//! ψ₁' = (k − γV) ψ₂,    ψ₂' = (k + γV) ψ₁
//! ```
//!
//! has a square-integrable solution.
//!
//! The numerical core is generic over [`Real`] (`f32` or `f64`); the
//! `*64` aliases fix the scalar to `f64`.

pub mod asymptotics;
pub mod catalog;
pub mod closedform;
pub mod ode;
pub mod potential;
pub mod prufer;
pub mod quad;
pub mod roots;
pub mod scalar;
pub mod spectra;
pub mod trigzeros;

pub use asymptotics::{a_density, compare, nu, predict, ADensity, ComparisonReport, DensityBranch, DensityPrediction};
pub use closedform::{determinant, TransferMatrix};
pub use potential::{
    build_w, hrp_potential, AnalyticPotential, AnalyticShape, PiecewiseConstantPotential, Potential, PotentialError,
    PotentialRecord, Transform,
};
pub use prufer::{delta_derivative, delta_v, is_eigenvalue, DeltaCurve, PruferState};
pub use scalar::Real;
pub use spectra::{complex_spectrum, counting_function, phase_grid, real_spectrum, GammaSpectrum, PhaseGrid, Rectangle};
pub use trigzeros::{brute_count, multiplicity_m, rational_density, tangency_test, AngleConstants, TrigParams};

pub type Potential64 = Potential<f64>;
pub type PiecewiseConstantPotential64 = PiecewiseConstantPotential<f64>;
pub type AnalyticPotential64 = AnalyticPotential<f64>;
pub type GammaSpectrum64 = GammaSpectrum<f64>;
pub type Rectangle64 = Rectangle<f64>;
pub type PhaseGrid64 = PhaseGrid<f64>;
pub type DeltaCurve64 = DeltaCurve<f64>;
pub type TrigParams64 = TrigParams<f64>;
pub type DensityPrediction64 = DensityPrediction<f64>;
