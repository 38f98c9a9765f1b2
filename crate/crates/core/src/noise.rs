//! Detector imperfections and their Fisher-information efficiencies.
//!
//! Each model maps the ideal quadrature distribution to a degraded one, and
//! `η = F_g[degraded] / F_g[ideal]`. Efficiencies are always taken on the
//! normalized distribution; postselection enters only through the arrival
//! probability seen by the saturation model.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use serde::{Deserialize, Serialize};
use statrs::function::erf::{erf, erfc};

use crate::error::{require_positive, Error, Result};
use crate::fisher::weak_value_fisher;
use crate::phase_space::{GaussianMeter, QuadratureAxis, QuadratureDistribution};
use crate::selection::{standard_scheme, weak_value_shift, SelectionScheme};

/// Bins lighter than this are left out of the pixel Fisher sum.
pub const PIXEL_PROBABILITY_FLOOR: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum NoiseModel {
    /// Random detector displacement with RMS `zeta` along the measured axis.
    Jitter {
        zeta: f64,
    },
    Pixelation(Pixelation),
    /// Hard ceiling on the arrival probability.
    Saturation {
        p_sat: f64,
    },
}

impl NoiseModel {
    pub fn jitter(zeta: f64) -> Result<Self> {
        Self::Jitter { zeta }.validated()
    }

    pub fn pixelation(r: f64, offset: f64) -> Result<Self> {
        Ok(Self::Pixelation(Pixelation::new(r, offset)?))
    }

    pub fn saturation(p_sat: f64) -> Result<Self> {
        Self::Saturation { p_sat }.validated()
    }

    /// Check parameter ranges, e.g. after deserializing.
    pub fn validated(self) -> Result<Self> {
        match self {
            Self::Jitter { zeta } => {
                require_positive("zeta", zeta)?;
            }
            Self::Pixelation(p) => {
                Pixelation::new(p.r, p.offset)?;
            }
            Self::Saturation { p_sat } => {
                if !(p_sat > 0.0 && p_sat <= 1.0) {
                    return Err(Error::InvalidParameter {
                        name: "p_sat",
                        value: p_sat,
                        reason: "must lie in (0, 1]",
                    });
                }
            }
        }
        Ok(self)
    }

    /// `η` for a distribution that reaches the detector with probability
    /// `p_arrival`.
    pub fn efficiency(&self, dist: &QuadratureDistribution, p_arrival: f64) -> f64 {
        match *self {
            Self::Jitter { zeta } => eta_jitter(dist, zeta),
            Self::Pixelation(pix) => eta_pixel(dist, &pix),
            Self::Saturation { p_sat } => eta_saturation(p_arrival, p_sat),
        }
    }
}

/// Pixel array of width `r` whose boundaries sit at `n·r + offset`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pixelation {
    pub r: f64,
    #[serde(default)]
    pub offset: f64,
}

impl Pixelation {
    pub fn new(r: f64, offset: f64) -> Result<Self> {
        require_positive("r", r)?;
        if !(offset >= 0.0 && offset < r) {
            return Err(Error::InvalidParameter {
                name: "offset",
                value: offset,
                reason: "must lie in [0, r)",
            });
        }
        Ok(Self { r, offset })
    }

    pub fn lower_edge(&self, n: i64) -> f64 {
        n as f64 * self.r + self.offset
    }

    pub fn center(&self, n: i64) -> f64 {
        (n as f64 + 0.5) * self.r + self.offset
    }

    /// Index of the pixel containing `s`.
    pub fn index_of(&self, s: f64) -> i64 {
        ((s - self.offset) / self.r).floor() as i64
    }
}

/// `η_jitter = (1 + ζ²/σ_θ²)^{-1}`, independent of the mean and weight.
pub fn eta_jitter(dist: &QuadratureDistribution, zeta: f64) -> f64 {
    let ratio = zeta / dist.std();
    1.0 / (1.0 + ratio * ratio)
}

/// Distribution after convolution with the Gaussian jitter kernel.
pub fn jittered_density(dist: &QuadratureDistribution, zeta: f64) -> QuadratureDistribution {
    dist.with_std(dist.std().hypot(zeta))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PixelBin {
    pub n: i64,
    pub prob: f64,
}

/// Standard normal mass on `[za, zb]`, computed on whichever side avoids
/// cancellation.
fn normal_mass(za: f64, zb: f64) -> f64 {
    let (a, b) = (za * FRAC_1_SQRT_2, zb * FRAC_1_SQRT_2);
    if za >= 0.0 {
        0.5 * (erfc(a) - erfc(b))
    } else if zb <= 0.0 {
        0.5 * (erfc(-b) - erfc(-a))
    } else {
        0.5 * (erf(b) - erf(a))
    }
}

fn std_normal_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * PI).sqrt()
}

/// Pixels whose centers lie within `10(σ_θ + r)` of the mean.
fn pixel_range(dist: &QuadratureDistribution, pix: &Pixelation) -> std::ops::RangeInclusive<i64> {
    let reach = 10.0 * (dist.std() + pix.r);
    let lo = ((dist.mean() - reach - pix.offset) / pix.r - 0.5).ceil() as i64;
    let hi = ((dist.mean() + reach - pix.offset) / pix.r - 0.5).floor() as i64;
    lo..=hi
}

/// Standardized pixel edges and mass, before scaling by the weight.
fn pixel_cells(
    dist: &QuadratureDistribution,
    pix: &Pixelation,
) -> impl Iterator<Item = (i64, f64, f64, f64)> {
    let (mu, sd) = (dist.mean(), dist.std());
    let pix = *pix;
    pixel_range(dist, &pix).map(move |n| {
        let za = (pix.lower_edge(n) - mu) / sd;
        let zb = (pix.lower_edge(n + 1) - mu) / sd;
        (n, za, zb, normal_mass(za, zb))
    })
}

/// Probability of each pixel for the distribution centred at `dist.mean()`
/// (the shift `νg`), scaled by `dist.weight()`. Pixels below
/// [`PIXEL_PROBABILITY_FLOOR`] are omitted.
pub fn pixel_probabilities(dist: &QuadratureDistribution, pix: &Pixelation) -> Vec<PixelBin> {
    pixel_cells(dist, pix)
        .filter(|&(_, _, _, m)| m >= PIXEL_PROBABILITY_FLOOR)
        .map(|(n, _, _, m)| PixelBin {
            n,
            prob: dist.weight() * m,
        })
        .collect()
}

/// Fisher information about `g` of the pixel counts, for a distribution
/// whose mean moves as `νg`.
///
/// Uses `∂_g Pr(n) = ν [p(nr − νg) − p((n+1)r − νg)]`.
pub fn pixel_fisher(dist: &QuadratureDistribution, pix: &Pixelation, nu: f64) -> f64 {
    nu * nu * eta_pixel(dist, pix) / (dist.std() * dist.std())
}

/// `η_pixel`, the discrete Fisher information of the pixel counts over the
/// continuous `ν²/σ_θ²`.
pub fn eta_pixel(dist: &QuadratureDistribution, pix: &Pixelation) -> f64 {
    pixel_cells(dist, pix)
        .filter(|&(_, _, _, m)| m >= PIXEL_PROBABILITY_FLOOR)
        .map(|(_, za, zb, m)| {
            let d = std_normal_pdf(za) - std_normal_pdf(zb);
            d * d / m
        })
        .sum()
}

/// `Θ(p_sat − p_arrival)` with `Θ(0) = 1`.
pub fn eta_saturation(p_arrival: f64, p_sat: f64) -> f64 {
    if p_arrival <= p_sat {
        1.0
    } else {
        0.0
    }
}

/// Noisy, postselection-corrected information of a weak-value scheme
/// relative to the standard scheme for the same observable and `g`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RelativeEfficiency {
    pub eta_wv: f64,
    pub eta_std: f64,
    /// `|⟨f|i⟩|² F_g` of the weak-value scheme under ideal detection.
    pub corrected_wv: f64,
    /// `λ_*²/σ²`.
    pub fisher_std: f64,
    /// `(η_wv/η_std)(corrected_wv/fisher_std)`; `+∞` when only the standard
    /// scheme is wiped out, NaN when both are.
    pub ratio: f64,
    /// The standard scheme retains no information.
    pub saturated_standard: bool,
}

impl RelativeEfficiency {
    /// Weak-value information per emitted trial after detection noise.
    pub fn noisy_corrected_wv(&self) -> f64 {
        self.eta_wv * self.corrected_wv
    }
}

/// [`efficiency_ratio_split`] with one detector model for both schemes.
pub fn efficiency_ratio(
    scheme_wv: &SelectionScheme,
    meter: &GaussianMeter,
    axis: QuadratureAxis,
    noise: Option<&NoiseModel>,
) -> Result<RelativeEfficiency> {
    efficiency_ratio_split(scheme_wv, meter, axis, noise, noise)
}

/// Relative efficiency when the weak-value readout (along `axis`) and the
/// standard readout (in position) see different detector noise.
pub fn efficiency_ratio_split(
    scheme_wv: &SelectionScheme,
    meter: &GaussianMeter,
    axis: QuadratureAxis,
    noise_wv: Option<&NoiseModel>,
    noise_std: Option<&NoiseModel>,
) -> Result<RelativeEfficiency> {
    let report = weak_value_fisher(scheme_wv, meter, axis)?;
    let shift = weak_value_shift(scheme_wv, meter)?;
    let dist_wv = meter.shifted_quadrature(axis, shift).normalized();
    let p = shift.weight();
    let eta_wv = noise_wv.map_or(1.0, |n| n.efficiency(&dist_wv, p));

    let standard = standard_scheme(scheme_wv.observable(), scheme_wv.g())?;
    let dist_std = meter.shifted_quadrature(QuadratureAxis::position(), standard.shift());
    let eta_std = noise_std.map_or(1.0, |n| n.efficiency(&dist_std, 1.0));
    let fisher_std = report.qfi_standard;

    let wv = eta_wv * report.corrected;
    let ratio = if eta_std == 0.0 {
        if wv > 0.0 {
            f64::INFINITY
        } else {
            f64::NAN
        }
    } else {
        (eta_wv / eta_std) * (report.corrected / fisher_std)
    };
    Ok(RelativeEfficiency {
        eta_wv,
        eta_std,
        corrected_wv: report.corrected,
        fisher_std,
        ratio,
        saturated_standard: eta_std == 0.0,
    })
}
