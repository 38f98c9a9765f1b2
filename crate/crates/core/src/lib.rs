//! Phase-space simulation and Fisher-information analysis of weak-value
//! parameter estimation.
//!
//! A Gaussian meter of width `sigma` is coupled through `g·Â⊗k̂` to a qudit
//! that is pre-selected into `|i⟩` and post-selected onto `|f⟩`. In the linear
//! regime the post-selected meter is the initial Wigner function displaced by
//! `(g·Re A_w, g·Im A_w / 2σ²)` and attenuated by `|⟨f|i⟩|²`. The crate
//! provides:
//!
//! - [`phase_space`]: the meter, its Wigner function and rotated quadrature
//!   marginals;
//! - [`selection`]: qudit states, observables, weak values, the standard
//!   eigenstate scheme and an exact-evolution oracle;
//! - [`fisher`]: classical and quantum Fisher information about `g`, the
//!   optimal measurement angle and a numeric Fisher oracle;
//! - [`noise`]: jitter, pixelation and saturation efficiency functions;
//! - [`estimation`]: seeded Monte Carlo trials and Cramér–Rao checks.
//!
//! Units have `ħ = 1`; `x` and `g·λ` share units, `k` has inverse units.

#![forbid(unsafe_code)]

pub mod error;
pub mod estimation;
pub mod fisher;
pub mod noise;
pub mod phase_space;
pub mod quadrature;
pub mod selection;

pub use error::{Error, Result};
pub use estimation::{cramer_rao_check, estimate_g, run_batch, EstimationSummary, TrialBatch};
pub use fisher::{
    fisher_gaussian_shift, fisher_numeric, optimal_angle, quantum_fisher_information,
    standard_fisher, weak_value_fisher, FisherReport,
};
pub use noise::{NoiseModel, Pixelation};
pub use phase_space::{
    GaussianMeter, PhaseSpacePoint, PhaseSpaceShift, QuadratureAxis, QuadratureDistribution,
};
pub use quadrature::Grid;
pub use selection::{Observable, QuditState, SelectionScheme, StandardScheme, WeakValue};

/// Complex amplitude type used for qudit states and observables.
pub type Complex = num_complex::Complex64;
