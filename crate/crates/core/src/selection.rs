//! The pre- and post-selected qudit.

use std::f64::consts::PI;
use std::sync::{Arc, OnceLock};

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::phase_space::{GaussianMeter, PhaseSpaceShift, QuadratureAxis};
use crate::quadrature::Grid;
use crate::Complex;

const NORM_TOLERANCE: f64 = 1e-12;
const HERMITIAN_TOLERANCE: f64 = 1e-12;
const OVERLAP_FLOOR: f64 = 1e-14;
/// Relative gap under which two eigenvalue magnitudes count as tied.
const TIE_TOLERANCE: f64 = 1e-12;

/// Normalized pure state of a qudit with `d ≥ 2` levels.
#[derive(Debug, Clone, PartialEq)]
pub struct QuditState {
    amplitudes: Vec<Complex>,
}

impl QuditState {
    pub fn new(amplitudes: Vec<Complex>) -> Result<Self> {
        if amplitudes.len() < 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                actual: amplitudes.len(),
            });
        }
        let norm = norm(&amplitudes);
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self { amplitudes })
    }

    /// Rescale `amplitudes` to unit norm.
    pub fn normalized(amplitudes: Vec<Complex>) -> Result<Self> {
        let n = norm(&amplitudes);
        if !(n.is_finite() && n > 0.0) {
            return Err(Error::NotNormalized { norm: n });
        }
        Self::new(amplitudes.into_iter().map(|a| a / n).collect())
    }

    /// Computational basis state `|j⟩` of a `d`-level system.
    pub fn basis(d: usize, j: usize) -> Result<Self> {
        if j >= d {
            return Err(Error::DimensionMismatch {
                expected: d,
                actual: j + 1,
            });
        }
        let mut amps = vec![Complex::new(0.0, 0.0); d];
        amps[j] = Complex::new(1.0, 0.0);
        Self::new(amps)
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex] {
        &self.amplitudes
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &QuditState) -> Complex {
        inner(&self.amplitudes, &other.amplitudes)
    }
}

fn norm(v: &[Complex]) -> f64 {
    v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
}

fn inner(bra: &[Complex], ket: &[Complex]) -> Complex {
    bra.iter().zip(ket).map(|(b, k)| b.conj() * k).sum()
}

/// Eigenvalues and eigenvectors of an [`Observable`], ordered by descending
/// magnitude with ties broken by descending signed value.
#[derive(Debug, Clone)]
pub struct Eigensystem {
    values: Vec<f64>,
    vectors: Vec<Vec<Complex>>,
}

impl Eigensystem {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn vector(&self, j: usize) -> &[Complex] {
        &self.vectors[j]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Hermitian operator `Â` on the qudit. Cloning shares the cached
/// eigendecomposition.
#[derive(Debug, Clone)]
pub struct Observable {
    matrix: DMatrix<Complex>,
    eigen: Arc<OnceLock<Eigensystem>>,
}

impl Observable {
    pub fn new(matrix: DMatrix<Complex>) -> Result<Self> {
        let (rows, cols) = matrix.shape();
        if rows != cols {
            return Err(Error::NotSquare { rows, cols });
        }
        if rows < 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                actual: rows,
            });
        }
        let deviation = (0..rows)
            .flat_map(|r| (0..cols).map(move |c| (r, c)))
            .map(|(r, c)| (matrix[(r, c)] - matrix[(c, r)].conj()).norm())
            .fold(0.0, f64::max);
        if deviation > HERMITIAN_TOLERANCE {
            return Err(Error::NotHermitian { deviation });
        }
        Ok(Self {
            matrix,
            eigen: Arc::new(OnceLock::new()),
        })
    }

    /// Build from row-major complex entries.
    pub fn from_rows(rows: &[Vec<Complex>]) -> Result<Self> {
        let d = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != d) {
            return Err(Error::NotSquare {
                rows: d,
                cols: bad.len(),
            });
        }
        Self::new(DMatrix::from_fn(d, d, |r, c| rows[r][c]))
    }

    pub fn diagonal(values: &[f64]) -> Result<Self> {
        let d = values.len();
        Self::new(DMatrix::from_fn(d, d, |r, c| {
            if r == c {
                Complex::new(values[r], 0.0)
            } else {
                Complex::new(0.0, 0.0)
            }
        }))
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex> {
        &self.matrix
    }

    pub fn apply(&self, state: &QuditState) -> Vec<Complex> {
        let d = self.dim();
        (0..d)
            .map(|r| {
                (0..d)
                    .map(|c| self.matrix[(r, c)] * state.amplitudes[c])
                    .sum()
            })
            .collect()
    }

    /// `⟨bra|Â|ket⟩`.
    pub fn matrix_element(&self, bra: &QuditState, ket: &QuditState) -> Complex {
        inner(&bra.amplitudes, &self.apply(ket))
    }

    /// `⟨state|Â²|state⟩ = ‖Â|state⟩‖²`.
    pub fn second_moment(&self, state: &QuditState) -> f64 {
        self.apply(state).iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn eigensystem(&self) -> &Eigensystem {
        self.eigen.get_or_init(|| decompose(&self.matrix))
    }
}

fn decompose(matrix: &DMatrix<Complex>) -> Eigensystem {
    let eig = SymmetricEigen::new(matrix.clone());
    let d = matrix.nrows();
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| {
        let (la, lb) = (eig.eigenvalues[a], eig.eigenvalues[b]);
        lb.abs()
            .total_cmp(&la.abs())
            .then_with(|| lb.total_cmp(&la))
    });
    let values = order.iter().map(|&j| eig.eigenvalues[j]).collect();
    let vectors = order
        .iter()
        .map(|&j| {
            let col: Vec<Complex> = eig.eigenvectors.column(j).iter().copied().collect();
            fix_phase(col)
        })
        .collect();
    Eigensystem { values, vectors }
}

/// Rotate the global phase so the largest-magnitude component is real and
/// positive; the first such component wins among equal magnitudes.
fn fix_phase(mut v: Vec<Complex>) -> Vec<Complex> {
    let n = norm(&v);
    let mut pivot = 0;
    for (j, a) in v.iter().enumerate() {
        if a.norm() > v[pivot].norm() * (1.0 + 1e-12) {
            pivot = j;
        }
    }
    let p = v[pivot];
    if p.norm() > 0.0 {
        let phase = p.conj() / p.norm();
        for a in &mut v {
            *a = *a * phase / n;
        }
        v[pivot] = Complex::new(v[pivot].re, 0.0);
    }
    v
}

/// Pre-selection, post-selection, observable and coupling constant `g`.
#[derive(Debug, Clone)]
pub struct SelectionScheme {
    pre: QuditState,
    post: QuditState,
    observable: Observable,
    g: f64,
}

impl SelectionScheme {
    pub fn new(pre: QuditState, post: QuditState, observable: Observable, g: f64) -> Result<Self> {
        let d = observable.dim();
        for s in [&pre, &post] {
            if s.dim() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    actual: s.dim(),
                });
            }
        }
        if !g.is_finite() {
            return Err(Error::InvalidParameter {
                name: "g",
                value: g,
                reason: "must be finite",
            });
        }
        Ok(Self {
            pre,
            post,
            observable,
            g,
        })
    }

    pub fn pre(&self) -> &QuditState {
        &self.pre
    }

    pub fn post(&self) -> &QuditState {
        &self.post
    }

    pub fn observable(&self) -> &Observable {
        &self.observable
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    pub fn with_g(&self, g: f64) -> Result<Self> {
        Self::new(
            self.pre.clone(),
            self.post.clone(),
            self.observable.clone(),
            g,
        )
    }

    /// `⟨f|i⟩`.
    pub fn overlap(&self) -> Complex {
        self.post.inner(&self.pre)
    }

    pub fn weak_value(&self) -> Result<WeakValue> {
        weak_value(self)
    }

    pub fn postselection_probability(&self) -> f64 {
        postselection_probability(self)
    }
}

/// A weak value in Cartesian and polar form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeakValue {
    pub re: f64,
    pub im: f64,
    pub magnitude: f64,
    /// Polar angle `φ` in `(−π, π]`.
    pub phase: f64,
}

impl WeakValue {
    pub fn from_complex(z: Complex) -> Self {
        let mut phase = z.im.atan2(z.re);
        if phase <= -PI {
            phase += 2.0 * PI;
        }
        Self {
            re: z.re,
            im: z.im,
            magnitude: z.norm(),
            phase,
        }
    }

    pub fn as_complex(&self) -> Complex {
        Complex::new(self.re, self.im)
    }
}

/// `A_w = ⟨f|Â|i⟩ / ⟨f|i⟩`.
pub fn weak_value(scheme: &SelectionScheme) -> Result<WeakValue> {
    let overlap = scheme.overlap();
    if overlap.norm() < OVERLAP_FLOOR {
        return Err(Error::OverlapZero {
            overlap: overlap.norm(),
        });
    }
    let numerator = scheme.observable.matrix_element(&scheme.post, &scheme.pre);
    Ok(WeakValue::from_complex(numerator / overlap))
}

/// `|⟨f|i⟩|²`, the success probability in the linear regime.
pub fn postselection_probability(scheme: &SelectionScheme) -> f64 {
    scheme.overlap().norm_sqr().min(1.0)
}

/// Phase-space displacement `(g Re A_w, g Im A_w / 2σ², |⟨f|i⟩|²)`.
pub fn weak_value_shift(
    scheme: &SelectionScheme,
    meter: &GaussianMeter,
) -> Result<PhaseSpaceShift> {
    let wv = weak_value(scheme)?;
    let s2 = meter.position_variance();
    PhaseSpaceShift::new(
        scheme.g * wv.re,
        scheme.g * wv.im / (2.0 * s2),
        postselection_probability(scheme),
    )
}

/// Deterministic eigenstate scheme built by [`standard_scheme`].
#[derive(Debug, Clone)]
pub struct StandardScheme {
    pub scheme: SelectionScheme,
    /// Eigenvalue of greatest magnitude.
    pub lambda_star: f64,
    /// Set when another eigenvalue shares `|λ_*|`; the larger signed value is
    /// then used (and the first eigenvector among equal values).
    pub degenerate_max: bool,
}

impl StandardScheme {
    pub fn shift(&self) -> PhaseSpaceShift {
        PhaseSpaceShift::new(self.scheme.g * self.lambda_star, 0.0, 1.0)
            .expect("unit weight is valid")
    }
}

/// `|i⟩ = |f⟩ =` eigenvector of the largest-magnitude eigenvalue.
pub fn standard_scheme(observable: &Observable, g: f64) -> Result<StandardScheme> {
    let eig = observable.eigensystem();
    let lambda_star = eig.values[0];
    let scale = lambda_star.abs().max(f64::MIN_POSITIVE);
    let degenerate_max = eig
        .values
        .get(1)
        .is_some_and(|l| (l.abs() - lambda_star.abs()).abs() <= TIE_TOLERANCE * scale);
    let state = QuditState::normalized(eig.vectors[0].clone())?;
    Ok(StandardScheme {
        scheme: SelectionScheme::new(state.clone(), state, observable.clone(), g)?,
        lambda_star,
        degenerate_max,
    })
}

/// `g|A_w|/σ`; the linear model needs this well below 1.
pub fn aav_validity(scheme: &SelectionScheme, meter: &GaussianMeter) -> Result<f64> {
    let wv = weak_value(scheme)?;
    Ok(scheme.g.abs() * wv.magnitude / meter.sigma())
}

/// Post-selected meter density sampled on a grid, from the exact evolution
/// `⟨f|exp(−i g Â k̂)|i⟩|m⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactDistribution {
    pub points: Vec<f64>,
    /// Unnormalized density; integrates to `probability`.
    pub density: Vec<f64>,
    /// Exact success probability of the postselection.
    pub probability: f64,
}

impl ExactDistribution {
    /// Density rescaled to unit mass.
    pub fn normalized_density(&self) -> Vec<f64> {
        self.density.iter().map(|p| p / self.probability).collect()
    }
}

/// Exact post-selected meter marginal in position (`θ = 0`) or momentum
/// (`θ = π/2`).
///
/// With `Â = Σ_λ λ P_λ` and `c_λ = ⟨f|P_λ|i⟩`, the post-selected meter is
/// `Σ_λ c_λ ψ(x − gλ)` in position and `Σ_λ c_λ e^{−igλk} φ(k)` in momentum.
pub fn exact_postselected_distribution(
    scheme: &SelectionScheme,
    meter: &GaussianMeter,
    axis: QuadratureAxis,
    grid: &Grid,
) -> Result<ExactDistribution> {
    let theta = axis.theta();
    let momentum = if theta == 0.0 {
        false
    } else if (theta - PI / 2.0).abs() < 1e-15 {
        true
    } else {
        return Err(Error::UnsupportedAxis { theta });
    };
    let sign = axis.orientation();

    let eig = scheme.observable.eigensystem();
    let branches: Vec<(f64, Complex)> = (0..eig.len())
        .map(|j| {
            let v = eig.vector(j);
            let c = inner(scheme.post.amplitudes(), v) * inner(v, scheme.pre.amplitudes());
            (eig.values[j], c)
        })
        .collect();
    let g = scheme.g;

    let amplitude = |u: f64| -> Complex {
        if momentum {
            let phi = meter.momentum_amplitude(u);
            branches
                .iter()
                .map(|&(l, c)| c * Complex::from_polar(1.0, -g * l * u))
                .sum::<Complex>()
                * phi
        } else {
            branches
                .iter()
                .map(|&(l, c)| c * meter.position_amplitude(u - g * l))
                .sum()
        }
    };

    let points: Vec<f64> = grid.points().collect();
    // a reversed axis samples the same physical density at −s
    let density = points
        .iter()
        .map(|&s| amplitude(sign * s).norm_sqr())
        .collect();

    // ⟨ψ(x − gλ)|ψ(x − gμ)⟩ = exp(−g²(λ − μ)² / 8σ²)
    let s2 = meter.position_variance();
    let mut probability = 0.0;
    for &(l, cl) in &branches {
        for &(m, cm) in &branches {
            let d = g * (l - m);
            probability += (cl * cm.conj()).re * (-d * d / (8.0 * s2)).exp();
        }
    }

    Ok(ExactDistribution {
        points,
        density,
        probability,
    })
}

/// L1 distance between the normalized exact post-selected density and the
/// normalized linear-model Gaussian on `grid`.
pub fn linear_model_l1_distance(
    scheme: &SelectionScheme,
    meter: &GaussianMeter,
    axis: QuadratureAxis,
    grid: &Grid,
) -> Result<f64> {
    let exact = exact_postselected_distribution(scheme, meter, axis, grid)?;
    let linear = meter
        .shifted_quadrature(axis, weak_value_shift(scheme, meter)?)
        .normalized();
    let diffs: Vec<f64> = exact
        .points
        .iter()
        .zip(exact.normalized_density())
        .map(|(&s, p)| (p - linear.density_at(s)).abs())
        .collect();
    Ok(grid.integrate_samples(&diffs))
}
