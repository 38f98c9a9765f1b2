//! Gaussian meter states in phase space.
//!
//! The meter is the real Gaussian `ψ(x) = (2π)^{-1/4} σ^{-1/2} exp(−x²/4σ²)`
//! with Wigner function `W(x, k) = (1/π) exp(−2σ²k²) exp(−x²/2σ²)`. Weak
//! interactions followed by postselection act on it as a displacement plus an
//! attenuation of the Wigner volume ([`PhaseSpaceShift`]). Measuring the rotated
//! quadrature `s_θ = x cos θ + k sin θ` yields a shifted Gaussian
//! ([`QuadratureDistribution`]).

use std::f64::consts::{FRAC_1_PI, PI};

use serde::{Deserialize, Serialize};

use crate::error::{require_positive, require_unit_interval, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianMeter {
    sigma: f64,
}

impl GaussianMeter {
    pub fn new(sigma: f64) -> Result<Self> {
        Ok(Self {
            sigma: require_positive("sigma", sigma)?,
        })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn position_variance(&self) -> f64 {
        self.sigma * self.sigma
    }

    pub fn momentum_variance(&self) -> f64 {
        1.0 / (4.0 * self.sigma * self.sigma)
    }

    /// Position wavefunction `ψ(x)`.
    pub fn position_amplitude(&self, x: f64) -> f64 {
        let s = self.sigma;
        (2.0 * PI).powf(-0.25) / s.sqrt() * (-x * x / (4.0 * s * s)).exp()
    }

    /// Momentum wavefunction `φ(k)`.
    pub fn momentum_amplitude(&self, k: f64) -> f64 {
        let s = self.sigma;
        (2.0 / PI).powf(0.25) * s.sqrt() * (-k * k * s * s).exp()
    }

    /// Wigner function of the displaced, attenuated meter at `pt`.
    pub fn wigner_value(&self, pt: PhaseSpacePoint, shift: PhaseSpaceShift) -> f64 {
        let s2 = self.sigma * self.sigma;
        let x = pt.x - shift.dx;
        let k = pt.k - shift.dk;
        shift.weight * FRAC_1_PI * (-2.0 * s2 * k * k).exp() * (-x * x / (2.0 * s2)).exp()
    }

    /// Standard deviation `σ_θ` of the quadrature `s_θ`:
    /// `σ_θ² = σ² cos²θ + sin²θ / (4σ²)`.
    pub fn quadrature_std(&self, axis: QuadratureAxis) -> f64 {
        let (sin, cos) = axis.theta.sin_cos();
        (self.position_variance() * cos * cos + self.momentum_variance() * sin * sin).sqrt()
    }

    /// Marginal of the shifted Wigner function along `axis`.
    pub fn shifted_quadrature(
        &self,
        axis: QuadratureAxis,
        shift: PhaseSpaceShift,
    ) -> QuadratureDistribution {
        QuadratureDistribution {
            mean: axis.project(shift.dx, shift.dk),
            std: self.quadrature_std(axis),
            weight: shift.weight,
        }
    }

    /// Sample the shifted Wigner function on a rectangular grid, row-major in
    /// `x` then `k`.
    pub fn wigner_grid(&self, shift: PhaseSpaceShift, spec: &WignerGridSpec) -> Vec<WignerSample> {
        let xs = linspace(spec.x_min, spec.x_max, spec.nx);
        let ks = linspace(spec.k_min, spec.k_max, spec.nk);
        let mut rows = Vec::with_capacity(xs.len() * ks.len());
        for &x in &xs {
            for &k in &ks {
                rows.push(WignerSample {
                    x,
                    k,
                    w: self.wigner_value(PhaseSpacePoint { x, k }, shift),
                });
            }
        }
        rows
    }
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n)
            .map(|i| {
                if i + 1 == n {
                    hi
                } else {
                    lo + (hi - lo) * i as f64 / (n - 1) as f64
                }
            })
            .collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseSpacePoint {
    pub x: f64,
    pub k: f64,
}

impl PhaseSpacePoint {
    pub fn new(x: f64, k: f64) -> Self {
        Self { x, k }
    }
}

/// Displacement `(dx, dk)` of the Wigner function together with the factor
/// `weight` by which its volume is attenuated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseSpaceShift {
    dx: f64,
    dk: f64,
    weight: f64,
}

impl PhaseSpaceShift {
    pub fn new(dx: f64, dk: f64, weight: f64) -> Result<Self> {
        Ok(Self {
            dx,
            dk,
            weight: require_unit_interval("weight", weight)?,
        })
    }

    pub fn identity() -> Self {
        Self {
            dx: 0.0,
            dk: 0.0,
            weight: 1.0,
        }
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn dk(&self) -> f64 {
        self.dk
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }
}

/// Measurement direction in phase space.
///
/// `theta` is kept in `[0, π)`. Reducing an angle by `π` reverses the
/// quadrature (`s_{θ+π} = −s_θ`); that reversal is kept in `orientation` so
/// projections of a shift keep the sign of the angle the caller asked for.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureAxis {
    theta: f64,
    orientation: f64,
}

impl QuadratureAxis {
    pub fn new(theta: f64) -> Self {
        let turns = (theta / PI).floor();
        let mut reduced = theta - turns * PI;
        let mut odd = (turns as i64).rem_euclid(2) == 1;
        // guard against rounding up to exactly π
        if reduced >= PI {
            reduced -= PI;
            odd = !odd;
        }
        if reduced < 0.0 {
            reduced = 0.0;
        }
        Self {
            theta: reduced,
            orientation: if odd { -1.0 } else { 1.0 },
        }
    }

    pub fn position() -> Self {
        Self::new(0.0)
    }

    pub fn momentum() -> Self {
        Self::new(PI / 2.0)
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// `+1` if the axis points along `(cos θ, sin θ)`, `−1` if reversed.
    pub fn orientation(&self) -> f64 {
        self.orientation
    }

    /// Component of the phase-space vector `(x, k)` along the axis.
    pub fn project(&self, x: f64, k: f64) -> f64 {
        let (sin, cos) = self.theta.sin_cos();
        self.orientation * (x * cos + k * sin)
    }
}

/// A weighted Gaussian on the measured quadrature axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureDistribution {
    mean: f64,
    std: f64,
    weight: f64,
}

impl QuadratureDistribution {
    pub fn new(mean: f64, std: f64, weight: f64) -> Result<Self> {
        Ok(Self {
            mean,
            std: require_positive("std", std)?,
            weight: require_unit_interval("weight", weight)?,
        })
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn std(&self) -> f64 {
        self.std
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    /// Same shape with unit total mass.
    pub fn normalized(&self) -> Self {
        Self {
            weight: 1.0,
            ..*self
        }
    }

    pub fn with_mean(&self, mean: f64) -> Self {
        Self { mean, ..*self }
    }

    pub(crate) fn with_std(&self, std: f64) -> Self {
        Self { std, ..*self }
    }

    pub fn density_at(&self, s: f64) -> f64 {
        let z = (s - self.mean) / self.std;
        self.weight * (-0.5 * z * z).exp() / (self.std * (2.0 * PI).sqrt())
    }
}

/// Bounds and resolution of a Wigner-function export.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WignerGridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub nx: usize,
    pub k_min: f64,
    pub k_max: f64,
    pub nk: usize,
}

impl WignerGridSpec {
    /// `±half_widths` standard deviations around `center` in each direction.
    pub fn around(
        meter: &GaussianMeter,
        center: PhaseSpacePoint,
        half_widths: f64,
        n: usize,
    ) -> Self {
        let hx = half_widths * meter.sigma();
        let hk = half_widths * meter.momentum_variance().sqrt();
        Self {
            x_min: center.x - hx,
            x_max: center.x + hx,
            nx: n,
            k_min: center.k - hk,
            k_max: center.k + hk,
            nk: n,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WignerSample {
    pub x: f64,
    pub k: f64,
    pub w: f64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::Grid;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    /// Wigner function evaluated from its defining integral over `ψ`.
    fn wigner_by_transform(meter: &GaussianMeter, x: f64, k: f64) -> f64 {
        let grid = Grid::centered(0.0, 40.0 * meter.sigma(), 4000).unwrap();
        grid.integrate(|y| {
            meter.position_amplitude(x + y / 2.0)
                * meter.position_amplitude(x - y / 2.0)
                * (k * y).cos()
        }) / (2.0 * PI)
    }

    #[test]
    fn peak_value_at_origin() {
        let m = GaussianMeter::new(1.0).unwrap();
        let w = m.wigner_value(PhaseSpacePoint::new(0.0, 0.0), PhaseSpaceShift::identity());
        assert_relative_eq!(w, FRAC_1_PI, max_relative = 1e-15);
    }

    #[test]
    fn peak_moves_with_the_shift() {
        let m = GaussianMeter::new(1.0).unwrap();
        let shift = PhaseSpaceShift::new(0.7, -0.2, 1.0).unwrap();
        let w = m.wigner_value(PhaseSpacePoint::new(0.7, -0.2), shift);
        assert_relative_eq!(w, FRAC_1_PI, max_relative = 1e-15);
    }

    #[test]
    fn attenuated_shift_example() {
        let m = GaussianMeter::new(1.0).unwrap();
        let shift = PhaseSpaceShift::new(0.3, 0.0, 0.1).unwrap();
        let w = m.wigner_value(PhaseSpacePoint::new(0.0, 0.0), shift);
        assert_relative_eq!(w, 0.1 * FRAC_1_PI * (-0.045f64).exp(), max_relative = 1e-14);
        assert!((w - 0.030432).abs() < 5e-6);
        let oracle = 0.1 * wigner_by_transform(&m, -0.3, 0.0);
        assert_relative_eq!(w, oracle, max_relative = 1e-10);
    }

    #[test]
    fn closed_form_matches_defining_transform() {
        for &sigma in &[0.5, 1.0, 2.0] {
            let m = GaussianMeter::new(sigma).unwrap();
            for &(x, k) in &[(0.0, 0.0), (0.4, 0.3), (-1.1, 0.9), (2.0, -0.25)] {
                let x = x * sigma;
                let k = k / sigma;
                let w = m.wigner_value(PhaseSpacePoint::new(x, k), PhaseSpaceShift::identity());
                let oracle = wigner_by_transform(&m, x, k);
                assert!(
                    (w - oracle).abs() < 1e-12,
                    "sigma {sigma} ({x},{k}): {w} vs {oracle}"
                );
            }
        }
    }

    #[test]
    fn quadrature_std_examples() {
        let m = GaussianMeter::new(1.0).unwrap();
        assert_relative_eq!(m.quadrature_std(QuadratureAxis::position()), 1.0);
        assert_relative_eq!(
            m.quadrature_std(QuadratureAxis::momentum()),
            0.5,
            max_relative = 1e-15
        );
        let s = m.quadrature_std(QuadratureAxis::new(2f64.atan()));
        assert_relative_eq!(s, (0.4f64).sqrt(), max_relative = 1e-14);
    }

    #[test]
    fn shifted_quadrature_examples() {
        let m = GaussianMeter::new(1.0).unwrap();
        let d = m.shifted_quadrature(
            QuadratureAxis::position(),
            PhaseSpaceShift::new(0.1, 0.0, 1.0).unwrap(),
        );
        assert_relative_eq!(d.mean(), 0.1);
        assert_relative_eq!(d.std(), 1.0);
        assert_eq!(d.weight(), 1.0);

        let d = m.shifted_quadrature(
            QuadratureAxis::momentum(),
            PhaseSpaceShift::new(0.0, 0.15, 0.1).unwrap(),
        );
        assert_relative_eq!(d.mean(), 0.15, max_relative = 1e-15);
        assert_relative_eq!(d.std(), 0.5, max_relative = 1e-15);
        assert_eq!(d.weight(), 0.1);

        let d = m.shifted_quadrature(
            QuadratureAxis::new(PI / 4.0),
            PhaseSpaceShift::new(0.3, 0.15, 0.1).unwrap(),
        );
        assert_relative_eq!(d.mean(), 0.45 / 2f64.sqrt(), max_relative = 1e-15);
        assert!((d.mean() - 0.31820).abs() < 1e-5);
        assert_relative_eq!(d.std(), (5.0f64 / 8.0).sqrt(), max_relative = 1e-15);
    }

    #[test]
    fn density_examples() {
        let d = QuadratureDistribution::new(0.0, 1.0, 1.0).unwrap();
        assert_relative_eq!(
            d.density_at(0.0),
            0.398_942_280_401_432_7,
            max_relative = 1e-15
        );
        let d = QuadratureDistribution::new(0.0, 1.0, 0.5).unwrap();
        assert!((d.density_at(0.0) - 0.19947).abs() < 1e-5);
        let d = QuadratureDistribution::new(0.1, 1.0, 1.0).unwrap();
        assert_relative_eq!(
            d.density_at(0.1),
            0.398_942_280_401_432_7,
            max_relative = 1e-15
        );
    }

    #[test]
    fn angle_reduction_keeps_the_distribution() {
        let m = GaussianMeter::new(1.3).unwrap();
        let shift = PhaseSpaceShift::new(0.2, -0.4, 0.5).unwrap();
        for &theta in &[0.3, 1.2, 2.9] {
            let base = m.shifted_quadrature(QuadratureAxis::new(theta), shift);
            for turns in [-2.0, -1.0, 1.0, 3.0] {
                let ax = QuadratureAxis::new(theta + turns * PI);
                assert!(ax.theta() >= 0.0 && ax.theta() < PI);
                let d = m.shifted_quadrature(ax, shift);
                let sign = if (turns as i64).rem_euclid(2) == 1 {
                    -1.0
                } else {
                    1.0
                };
                assert_relative_eq!(d.std(), base.std(), max_relative = 1e-12);
                assert_relative_eq!(d.mean(), sign * base.mean(), epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn marginals_match_density_pointwise() {
        let m = GaussianMeter::new(1.0).unwrap();
        let shift = PhaseSpaceShift::new(0.3, 0.15, 0.1).unwrap();
        let pos = m.shifted_quadrature(QuadratureAxis::position(), shift);
        let mom = m.shifted_quadrature(QuadratureAxis::momentum(), shift);
        let kgrid = Grid::centered(shift.dk(), 10.0 / (2.0 * m.sigma()), 800).unwrap();
        let xgrid = Grid::centered(shift.dx(), 10.0 * m.sigma(), 800).unwrap();
        for i in 0..101 {
            let u = -5.0 + 10.0 * i as f64 / 100.0;
            let x = u * m.sigma();
            let px = kgrid.integrate(|k| m.wigner_value(PhaseSpacePoint::new(x, k), shift));
            assert!((px - pos.density_at(x)).abs() < 1e-8);
            let k = u / (2.0 * m.sigma());
            let pk = xgrid.integrate(|x| m.wigner_value(PhaseSpacePoint::new(x, k), shift));
            assert!((pk - mom.density_at(k)).abs() < 1e-8);
        }
    }

    #[test]
    fn grid_export_shape() {
        let m = GaussianMeter::new(1.0).unwrap();
        let spec = WignerGridSpec::around(&m, PhaseSpacePoint::new(0.0, 0.0), 4.0, 5);
        let rows = m.wigner_grid(PhaseSpaceShift::identity(), &spec);
        assert_eq!(rows.len(), 25);
        assert_eq!(rows[0].x, -4.0);
        assert_eq!(rows[0].k, -2.0);
        assert_eq!(rows[24].x, 4.0);
        assert_relative_eq!(rows[12].w, FRAC_1_PI);
    }

    #[test]
    fn invalid_inputs_are_rejected() {
        assert!(GaussianMeter::new(0.0).is_err());
        assert!(GaussianMeter::new(-1.0).is_err());
        assert!(GaussianMeter::new(f64::NAN).is_err());
        assert!(PhaseSpaceShift::new(0.0, 0.0, 1.5).is_err());
        assert!(QuadratureDistribution::new(0.0, 0.0, 1.0).is_err());
        assert!(QuadratureDistribution::new(0.0, 1.0, -0.1).is_err());
    }

    proptest! {
        #[test]
        fn wigner_is_nonnegative(sigma in 0.1f64..5.0, x in -20.0f64..20.0, k in -20.0f64..20.0,
                                 dx in -3.0f64..3.0, dk in -3.0f64..3.0, w in 0.0f64..=1.0) {
            let m = GaussianMeter::new(sigma).unwrap();
            let shift = PhaseSpaceShift::new(dx, dk, w).unwrap();
            prop_assert!(m.wigner_value(PhaseSpacePoint::new(x, k), shift) >= 0.0);
        }

        #[test]
        fn uncertainty_product_is_minimal(sigma in 0.01f64..100.0) {
            let m = GaussianMeter::new(sigma).unwrap();
            let p = m.position_variance() * m.momentum_variance();
            prop_assert!((p - 0.25).abs() < 1e-14);
        }
    }
}
