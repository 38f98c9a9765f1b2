//! Composite Simpson quadrature on uniform grids.

use crate::error::{Error, Result};

/// A uniform grid `lo = s_0 < s_1 < … < s_n = hi` with an even number of
/// intervals `n`, suitable for composite Simpson integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    lo: f64,
    hi: f64,
    intervals: usize,
}

impl Grid {
    pub fn new(lo: f64, hi: f64, intervals: usize) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi)
            || intervals == 0
            || !intervals.is_multiple_of(2)
        {
            return Err(Error::InvalidGrid { lo, hi, intervals });
        }
        Ok(Self { lo, hi, intervals })
    }

    /// Grid spanning `center ± half_width`.
    pub fn centered(center: f64, half_width: f64, intervals: usize) -> Result<Self> {
        Self::new(center - half_width, center + half_width, intervals)
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn intervals(&self) -> usize {
        self.intervals
    }

    pub fn len(&self) -> usize {
        self.intervals + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn step(&self) -> f64 {
        (self.hi - self.lo) / self.intervals as f64
    }

    pub fn point(&self, i: usize) -> f64 {
        if i == self.intervals {
            self.hi
        } else {
            self.lo + i as f64 * self.step()
        }
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len()).map(move |i| self.point(i))
    }

    /// Simpson weight of node `i` (without the `h/3` factor).
    fn weight(&self, i: usize) -> f64 {
        if i == 0 || i == self.intervals {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        }
    }

    /// Integrate `f` over the grid.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        let sum: f64 = (0..self.len())
            .map(|i| self.weight(i) * f(self.point(i)))
            .sum();
        sum * self.step() / 3.0
    }

    /// Integrate values already sampled on the grid nodes.
    pub fn integrate_samples(&self, samples: &[f64]) -> f64 {
        assert_eq!(samples.len(), self.len(), "sample count must match grid");
        let sum: f64 = samples
            .iter()
            .enumerate()
            .map(|(i, v)| self.weight(i) * v)
            .sum();
        sum * self.step() / 3.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simpson_is_exact_for_cubics() {
        let grid = Grid::new(-1.0, 2.0, 6).unwrap();
        let v = grid.integrate(|x| x * x * x - 2.0 * x + 1.0);
        // ∫ x³ − 2x + 1 on [−1, 2] = 15/4 − 3 + 3
        assert!((v - 3.75).abs() < 1e-14);
    }

    #[test]
    fn gaussian_integrates_to_one() {
        let grid = Grid::centered(0.0, 10.0, 400).unwrap();
        let v = grid.integrate(|x| (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt());
        assert!((v - 1.0).abs() < 1e-13);
    }

    #[test]
    fn rejects_odd_interval_counts() {
        assert!(Grid::new(0.0, 1.0, 3).is_err());
        assert!(Grid::new(1.0, 0.0, 4).is_err());
        assert!(Grid::new(0.0, 1.0, 0).is_err());
    }

    #[test]
    fn last_point_is_exact() {
        let grid = Grid::new(0.1, 0.7, 6).unwrap();
        assert_eq!(grid.point(6), 0.7);
        assert_eq!(grid.points().count(), 7);
    }
}
