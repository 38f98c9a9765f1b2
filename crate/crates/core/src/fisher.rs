//! Fisher information about the coupling constant `g`.
//!
//! For a distribution that is a rigid shift `p(s − νg)` of a Gaussian of
//! width `σ_θ`, the Fisher information is `ν²/σ_θ²`. The weak-value scheme
//! reads out `ν = |A_w|(cos θ cos φ + sin θ sin φ / 2σ²)` on a fraction
//! `|⟨f|i⟩|²` of the trials, and the per-emitted-trial ("corrected")
//! information obeys
//!
//! ```text
//! |⟨f|i⟩|² F_g ≤ |⟨f|Â|i⟩|²/σ² ≤ ⟨i|Â²|i⟩/σ² = H_g ≤ λ_*²/σ²
//! ```
//!
//! with the first bound attained at `θ = arctan(2σ² tan φ)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::phase_space::{GaussianMeter, QuadratureAxis};
use crate::quadrature::Grid;
use crate::selection::{weak_value, Observable, QuditState, SelectionScheme, WeakValue};

/// Fisher information figures for one scheme and measurement axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FisherReport {
    /// `F_g` of the normalized post-selected distribution.
    pub fisher_ideal: f64,
    /// `|⟨f|i⟩|² F_g`, information per emitted trial.
    pub corrected: f64,
    /// `H_g = ⟨i|Â²|i⟩/σ²`.
    pub qfi: f64,
    /// `λ_*²/σ²`, the information of the standard scheme.
    pub qfi_standard: f64,
    /// `ν`, the coefficient of `g` in the mean of the measured quadrature.
    pub shift_coefficient: f64,
    pub theta: f64,
    pub phi: f64,
    pub weak_value_re: f64,
    pub weak_value_im: f64,
    pub postselection_probability: f64,
}

/// `F_g[p(s − νg)] = ν²/σ_θ²` for a Gaussian of the given width.
pub fn fisher_gaussian_shift(nu: f64, std: f64) -> f64 {
    nu * nu / (std * std)
}

/// Coefficient `ν` of `g` in the mean of `s_θ` after a weak-value shift.
pub fn shift_coefficient(wv: &WeakValue, meter: &GaussianMeter, axis: QuadratureAxis) -> f64 {
    axis.project(wv.re, wv.im / (2.0 * meter.position_variance()))
}

pub fn quantum_fisher_information(
    pre: &QuditState,
    observable: &Observable,
    meter: &GaussianMeter,
) -> f64 {
    observable.second_moment(pre) / meter.position_variance()
}

fn standard_information(observable: &Observable, meter: &GaussianMeter) -> f64 {
    let l = observable.eigensystem().values()[0];
    l * l / meter.position_variance()
}

pub fn weak_value_fisher(
    scheme: &SelectionScheme,
    meter: &GaussianMeter,
    axis: QuadratureAxis,
) -> Result<FisherReport> {
    let wv = weak_value(scheme)?;
    let nu = shift_coefficient(&wv, meter, axis);
    let fisher_ideal = fisher_gaussian_shift(nu, meter.quadrature_std(axis));
    let p = scheme.postselection_probability();
    Ok(FisherReport {
        fisher_ideal,
        corrected: p * fisher_ideal,
        qfi: quantum_fisher_information(scheme.pre(), scheme.observable(), meter),
        qfi_standard: standard_information(scheme.observable(), meter),
        shift_coefficient: nu,
        theta: axis.theta(),
        phi: wv.phase,
        weak_value_re: wv.re,
        weak_value_im: wv.im,
        postselection_probability: p,
    })
}

/// Report for the standard eigenstate scheme, always read out in position
/// with `ν = λ_*`.
pub fn standard_fisher(observable: &Observable, meter: &GaussianMeter) -> FisherReport {
    let l = observable.eigensystem().values()[0];
    let f = standard_information(observable, meter);
    FisherReport {
        fisher_ideal: f,
        corrected: f,
        qfi: f,
        qfi_standard: f,
        shift_coefficient: l,
        theta: 0.0,
        phi: if l < 0.0 { std::f64::consts::PI } else { 0.0 },
        weak_value_re: l,
        weak_value_im: 0.0,
        postselection_probability: 1.0,
    }
}

/// Measurement axis maximizing the Fisher information for a weak value of
/// phase `phi`: `tan θ = 2σ² tan φ`, oriented so the shift coefficient is
/// non-negative.
pub fn optimal_angle(phi: f64, meter: &GaussianMeter) -> QuadratureAxis {
    let (sin, cos) = phi.sin_cos();
    QuadratureAxis::new((2.0 * meter.position_variance() * sin).atan2(cos))
}

/// Default finite-difference increment in `g` for [`fisher_numeric`].
pub fn default_step(std: f64, nu: f64) -> f64 {
    1e-5 * std / nu.abs().max(1.0)
}

/// Fisher information of the family `p_g(s) = density(s − ν(g − g₀))` at
/// `g₀`, by Simpson quadrature of `(∂_g p)²/p` over `grid`.
///
/// `∂_g p` is a central difference with increment `step` in `g`. Nodes where
/// the density falls below `1e−15` of its peak on the grid are skipped.
pub fn fisher_numeric<F: Fn(f64) -> f64>(
    density: F,
    nu: f64,
    step: f64,
    grid: &Grid,
) -> Result<f64> {
    if !(step.is_finite() && step > 0.0) {
        return Err(Error::InvalidParameter {
            name: "step",
            value: step,
            reason: "must be finite and > 0",
        });
    }
    let values: Vec<f64> = grid.points().map(&density).collect();
    let peak = values.iter().copied().fold(0.0, f64::max);
    if peak < 1e-300 {
        return Err(Error::NumericalUnderflow);
    }
    let floor = 1e-15 * peak;
    let dv = nu * step;
    let integrand: Vec<f64> = grid
        .points()
        .zip(&values)
        .map(|(s, &p)| {
            if p < floor {
                0.0
            } else {
                let dp = (density(s - dv) - density(s + dv)) / (2.0 * step);
                dp * dp / p
            }
        })
        .collect();
    Ok(grid.integrate_samples(&integrand))
}
