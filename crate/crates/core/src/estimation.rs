//! Seeded Monte Carlo simulation of repeated weak-value experiments.
//!
//! Each trial survives postselection with probability `|⟨f|i⟩|²`; survivors
//! yield `s_θ ~ N(νg, σ_θ²)` (linear model), optionally degraded by the
//! detector. Batch `b` of a run with seed `seed` draws from ChaCha8 stream `b`
//! of that seed, so replicates are reproducible in any execution order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fisher::{fisher_gaussian_shift, shift_coefficient};
use crate::noise::{eta_jitter, eta_pixel, NoiseModel};
use crate::phase_space::{GaussianMeter, QuadratureAxis};
use crate::selection::{weak_value, weak_value_shift, SelectionScheme};

/// Detected samples from `n_emitted` system–meter pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialBatch {
    pub n_emitted: u64,
    pub n_detected: u64,
    pub samples: Vec<f64>,
    pub seed: u64,
    pub batch_index: u64,
}

/// Everything needed to draw trials for one configuration.
#[derive(Debug, Clone, Copy)]
pub struct SamplingModel {
    p_success: f64,
    mean: f64,
    std: f64,
    nu: f64,
    noise: Option<NoiseModel>,
    /// Fisher information about `g` per emitted trial, detector included.
    information: f64,
}

impl SamplingModel {
    pub fn new(
        scheme: &SelectionScheme,
        meter: &GaussianMeter,
        axis: QuadratureAxis,
        noise: Option<&NoiseModel>,
    ) -> Result<Self> {
        let wv = weak_value(scheme)?;
        let shift = weak_value_shift(scheme, meter)?;
        let dist = meter.shifted_quadrature(axis, shift).normalized();
        let p = shift.weight();
        let nu = shift_coefficient(&wv, meter, axis);
        let eta = match noise {
            None => 1.0,
            Some(NoiseModel::Jitter { zeta }) => eta_jitter(&dist, *zeta),
            Some(NoiseModel::Pixelation(pix)) => eta_pixel(&dist, pix),
            Some(&NoiseModel::Saturation { p_sat }) => {
                if p > p_sat {
                    return Err(Error::SaturatedDetector {
                        p_arrival: p,
                        p_sat,
                    });
                }
                1.0
            }
        };
        Ok(Self {
            p_success: p,
            mean: dist.mean(),
            std: dist.std(),
            nu,
            noise: noise.copied(),
            information: p * eta * fisher_gaussian_shift(nu, dist.std()),
        })
    }

    pub fn shift_coefficient(&self) -> f64 {
        self.nu
    }

    pub fn success_probability(&self) -> f64 {
        self.p_success
    }

    /// Fisher information about `g` per emitted trial.
    pub fn information_per_trial(&self) -> f64 {
        self.information
    }

    pub fn sample(&self, n_emitted: u64, seed: u64, batch_index: u64) -> TrialBatch {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(batch_index);

        let n_detected = if self.p_success >= 1.0 {
            n_emitted
        } else if self.p_success <= 0.0 {
            0
        } else {
            Binomial::new(n_emitted, self.p_success)
                .expect("probability in (0, 1)")
                .sample(&mut rng)
        };

        let meter = Normal::new(self.mean, self.std).expect("std > 0");
        let jitter = match self.noise {
            Some(NoiseModel::Jitter { zeta }) => Some(Normal::new(0.0, zeta).expect("zeta > 0")),
            _ => None,
        };
        let samples = (0..n_detected)
            .map(|_| {
                let mut s = meter.sample(&mut rng);
                if let Some(j) = &jitter {
                    s += j.sample(&mut rng);
                }
                if let Some(NoiseModel::Pixelation(pix)) = &self.noise {
                    s = pix.center(pix.index_of(s));
                }
                s
            })
            .collect();

        TrialBatch {
            n_emitted,
            n_detected,
            samples,
            seed,
            batch_index,
        }
    }
}

fn require_trials(n_emitted: u64) -> Result<()> {
    if n_emitted == 0 {
        return Err(Error::InvalidParameter {
            name: "n_emitted",
            value: 0.0,
            reason: "must be at least 1",
        });
    }
    Ok(())
}

/// Simulate `n_emitted` trials (batch index 0 of `seed`).
pub fn run_batch(
    scheme: &SelectionScheme,
    meter: &GaussianMeter,
    axis: QuadratureAxis,
    noise: Option<&NoiseModel>,
    n_emitted: u64,
    seed: u64,
) -> Result<TrialBatch> {
    run_batch_indexed(scheme, meter, axis, noise, n_emitted, seed, 0)
}

pub fn run_batch_indexed(
    scheme: &SelectionScheme,
    meter: &GaussianMeter,
    axis: QuadratureAxis,
    noise: Option<&NoiseModel>,
    n_emitted: u64,
    seed: u64,
    batch_index: u64,
) -> Result<TrialBatch> {
    require_trials(n_emitted)?;
    let model = SamplingModel::new(scheme, meter, axis, noise)?;
    Ok(model.sample(n_emitted, seed, batch_index))
}

/// `g̃ = ⟨s_θ⟩ / ν`.
pub fn estimate_g(batch: &TrialBatch, nu: f64) -> Result<f64> {
    if batch.samples.is_empty() {
        return Err(Error::EmptyBatch);
    }
    if nu == 0.0 {
        return Err(Error::NullCoefficient);
    }
    let mean = batch.samples.iter().sum::<f64>() / batch.samples.len() as f64;
    Ok(mean / nu)
}

/// Spread of the estimator across replicate batches, against the
/// Cramér–Rao bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimationSummary {
    pub g_true: f64,
    pub g_hat_mean: f64,
    pub bias: f64,
    pub empirical_variance: f64,
    /// `1 / (n_emitted · F_per_trial)`.
    pub cr_bound: f64,
    /// `empirical_variance / cr_bound`.
    pub ratio: f64,
    pub n_emitted: u64,
    pub n_detected_mean: f64,
    pub replicates: u64,
    pub seed: u64,
    /// Replicates dropped because nothing survived postselection.
    pub empty_batches: u64,
}

#[allow(clippy::too_many_arguments)]
pub fn cramer_rao_check(
    scheme: &SelectionScheme,
    meter: &GaussianMeter,
    axis: QuadratureAxis,
    noise: Option<&NoiseModel>,
    g_true: f64,
    n_emitted: u64,
    replicates: u64,
    seed: u64,
) -> Result<EstimationSummary> {
    require_trials(n_emitted)?;
    if replicates < 100 {
        return Err(Error::InvalidParameter {
            name: "replicates",
            value: replicates as f64,
            reason: "must be at least 100",
        });
    }
    let scheme = scheme.with_g(g_true)?;
    let model = SamplingModel::new(&scheme, meter, axis, noise)?;
    let nu = model.shift_coefficient();
    if nu == 0.0 {
        return Err(Error::NullCoefficient);
    }

    let outcomes: Vec<(u64, Option<f64>)> = (0..replicates)
        .into_par_iter()
        .map(|b| {
            let batch = model.sample(n_emitted, seed, b);
            (batch.n_detected, estimate_g(&batch, nu).ok())
        })
        .collect();

    let estimates: Vec<f64> = outcomes.iter().filter_map(|o| o.1).collect();
    let empty_batches = replicates - estimates.len() as u64;
    if estimates.len() < 2 {
        return Err(Error::EmptyBatch);
    }
    let n = estimates.len() as f64;
    let g_hat_mean = estimates.iter().sum::<f64>() / n;
    let empirical_variance = estimates
        .iter()
        .map(|g| (g - g_hat_mean).powi(2))
        .sum::<f64>()
        / (n - 1.0);
    let n_detected_mean = outcomes.iter().map(|o| o.0 as f64).sum::<f64>() / replicates as f64;
    let cr_bound = 1.0 / (n_emitted as f64 * model.information_per_trial());

    Ok(EstimationSummary {
        g_true,
        g_hat_mean,
        bias: g_hat_mean - g_true,
        empirical_variance,
        cr_bound,
        ratio: empirical_variance / cr_bound,
        n_emitted,
        n_detected_mean,
        replicates,
        seed,
        empty_batches,
    })
}
