//! TOML scenario files.
//!
//! ```toml
//! [meter]
//! sigma = 1.0
//!
//! [scheme]
//! observable = [[[1, 0], [0, 0]], [[0, 0], [-1, 0]]]
//! g = 0.05
//! pre = [[1, 0], [1, 0]]      # normalized on load
//! post = [[2, 0], [-1, 0]]
//! # or: selection = "standard"
//!
//! [axis]
//! theta = "optimal"           # or an angle in radians
//!
//! [noise]
//! type = "jitter"
//! zeta = 0.333
//! ```
//!
//! Optional tables: `[mc]`, `[sweep]`, `[efficiency]`, `[wigner]`.

use std::path::Path;

use serde::{Deserialize, Serialize};
use weakmeter::phase_space::WignerGridSpec;
use weakmeter::selection::standard_scheme;
use weakmeter::{
    optimal_angle, Complex, GaussianMeter, NoiseModel, Observable, PhaseSpacePoint,
    PhaseSpaceShift, QuadratureAxis, QuditState, SelectionScheme,
};

use crate::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub meter: MeterSpec,
    pub scheme: SchemeSpec,
    #[serde(default)]
    pub axis: AxisSpec,
    pub noise: Option<NoiseModel>,
    pub mc: Option<MonteCarloSpec>,
    pub sweep: Option<SweepSpec>,
    pub efficiency: Option<EfficiencySpec>,
    pub wigner: Option<WignerGridSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeterSpec {
    pub sigma: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemeSpec {
    /// Row-major matrix of `[re, im]` entries.
    pub observable: Vec<Vec<[f64; 2]>>,
    pub g: f64,
    pub selection: Option<SelectionKeyword>,
    pub pre: Option<Vec<[f64; 2]>>,
    pub post: Option<Vec<[f64; 2]>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SelectionKeyword {
    Standard,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisSpec {
    pub theta: Theta,
}

impl Default for AxisSpec {
    fn default() -> Self {
        Self {
            theta: Theta::Keyword(AxisKeyword::Optimal),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Theta {
    Angle(f64),
    Keyword(AxisKeyword),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AxisKeyword {
    Optimal,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonteCarloSpec {
    pub n_emitted: u64,
    pub replicates: u64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    /// Dotted path such as `noise.zeta` or `scheme.g`.
    pub parameter: String,
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
}

impl SweepSpec {
    /// Evenly spaced values from `start` to `stop` inclusive.
    pub fn values(&self) -> Vec<f64> {
        let n = self.steps;
        (0..n)
            .map(|i| {
                if i + 1 == n {
                    self.stop
                } else {
                    self.start + (self.stop - self.start) * i as f64 / (n - 1) as f64
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EfficiencySpec {
    #[serde(default = "default_efficiency_steps")]
    pub steps: usize,
    /// Width of the shift range; defaults to one pixel period, or `σ_θ` for
    /// jitter.
    pub span: Option<f64>,
}

fn default_efficiency_steps() -> usize {
    151
}

impl Default for EfficiencySpec {
    fn default() -> Self {
        Self {
            steps: default_efficiency_steps(),
            span: None,
        }
    }
}

pub const SWEEP_PARAMETERS: &[&str] = &[
    "meter.sigma",
    "scheme.g",
    "axis.theta",
    "noise.zeta",
    "noise.r",
    "noise.offset",
    "noise.p_sat",
];

impl Scenario {
    pub fn from_toml(text: &str) -> Result<Self> {
        let scenario: Scenario =
            toml::from_str(text).map_err(|e| CliError::Validation(format!("scenario: {e}")))?;
        scenario.check()?;
        Ok(scenario)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_toml(&text).map_err(|e| match e {
            CliError::Validation(m) => CliError::Validation(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    /// Structural checks beyond what the TOML schema enforces.
    fn check(&self) -> Result<()> {
        let s = &self.scheme;
        let explicit = s.pre.is_some() || s.post.is_some();
        match (s.selection, explicit) {
            (Some(_), true) => {
                return Err(CliError::Validation(
                    "scheme: give either selection = \"standard\" or pre/post states, not both"
                        .into(),
                ))
            }
            (None, false) => {
                return Err(CliError::Validation(
                    "scheme: missing pre/post states (or selection = \"standard\")".into(),
                ))
            }
            (None, true) if s.pre.is_none() || s.post.is_none() => {
                return Err(CliError::Validation(
                    "scheme: both pre and post states are required".into(),
                ))
            }
            _ => {}
        }
        if let Some(sw) = &self.sweep {
            if sw.steps < 2 {
                return Err(CliError::Validation(format!(
                    "sweep.steps: must be at least 2, got {}",
                    sw.steps
                )));
            }
            if !SWEEP_PARAMETERS.contains(&sw.parameter.as_str()) {
                return Err(CliError::Validation(format!(
                    "sweep.parameter: unknown path {:?} (expected one of {})",
                    sw.parameter,
                    SWEEP_PARAMETERS.join(", ")
                )));
            }
        }
        if let Some(e) = &self.efficiency {
            if e.steps < 2 {
                return Err(CliError::Validation(
                    "efficiency.steps: must be at least 2".into(),
                ));
            }
        }
        Ok(())
    }

    /// Copy of the scenario with one sweepable parameter replaced.
    pub fn with_parameter(&self, path: &str, value: f64) -> Result<Self> {
        let mut s = self.clone();
        let missing_noise =
            || CliError::Validation(format!("{path}: scenario has no matching [noise] model"));
        match (path, s.noise.as_mut()) {
            ("meter.sigma", _) => s.meter.sigma = value,
            ("scheme.g", _) => s.scheme.g = value,
            ("axis.theta", _) => s.axis.theta = Theta::Angle(value),
            ("noise.zeta", Some(NoiseModel::Jitter { zeta })) => *zeta = value,
            ("noise.r", Some(NoiseModel::Pixelation(p))) => p.r = value,
            ("noise.offset", Some(NoiseModel::Pixelation(p))) => p.offset = value,
            ("noise.p_sat", Some(NoiseModel::Saturation { p_sat })) => *p_sat = value,
            (p, _) if SWEEP_PARAMETERS.contains(&p) => return Err(missing_noise()),
            _ => {
                return Err(CliError::Validation(format!(
                    "unknown sweep parameter {path:?}"
                )))
            }
        }
        Ok(s)
    }

    pub fn resolve(&self) -> Result<Resolved> {
        let meter = GaussianMeter::new(self.meter.sigma)
            .map_err(|e| CliError::Validation(format!("meter: {e}")))?;
        let observable = Observable::from_rows(
            &self
                .scheme
                .observable
                .iter()
                .map(|row| row.iter().map(to_complex).collect())
                .collect::<Vec<_>>(),
        )
        .map_err(|e| CliError::Validation(format!("scheme.observable: {e}")))?;
        let g = self.scheme.g;

        let (scheme, standard) = match self.scheme.selection {
            Some(SelectionKeyword::Standard) => {
                let st = standard_scheme(&observable, g)
                    .map_err(|e| CliError::Validation(format!("scheme: {e}")))?;
                (
                    st.scheme.clone(),
                    Some(StandardInfo {
                        lambda_star: st.lambda_star,
                        degenerate_max: st.degenerate_max,
                    }),
                )
            }
            None => {
                let state = |name: &str, v: &Option<Vec<[f64; 2]>>| {
                    let amps = v
                        .as_ref()
                        .expect("checked on load")
                        .iter()
                        .map(to_complex)
                        .collect();
                    QuditState::normalized(amps)
                        .map_err(|e| CliError::Validation(format!("scheme.{name}: {e}")))
                };
                let pre = state("pre", &self.scheme.pre)?;
                let post = state("post", &self.scheme.post)?;
                let scheme = SelectionScheme::new(pre, post, observable, g)
                    .map_err(|e| CliError::Validation(format!("scheme: {e}")))?;
                (scheme, None)
            }
        };

        let axis = match (self.axis.theta, standard.is_some()) {
            (_, true) => {
                if let Theta::Angle(t) = self.axis.theta {
                    if t != 0.0 {
                        return Err(CliError::Validation(format!(
                            "axis.theta: the standard scheme is read out in position (theta = 0), got {t}"
                        )));
                    }
                }
                QuadratureAxis::position()
            }
            (Theta::Angle(t), false) => {
                if !t.is_finite() {
                    return Err(CliError::Validation(format!(
                        "axis.theta: not finite ({t})"
                    )));
                }
                QuadratureAxis::new(t)
            }
            (Theta::Keyword(AxisKeyword::Optimal), false) => {
                let wv = scheme.weak_value().map_err(CliError::computation(format!(
                    "resolving optimal axis (g = {g}, |<f|i>|^2 = {:e})",
                    scheme.postselection_probability()
                )))?;
                optimal_angle(wv.phase, &meter)
            }
        };

        let noise = self
            .noise
            .map(|n| n.validated())
            .transpose()
            .map_err(|e| CliError::Validation(format!("noise: {e}")))?;

        if let Some(mc) = &self.mc {
            if mc.n_emitted == 0 || mc.replicates < 100 {
                return Err(CliError::Validation(format!(
                    "mc: need n_emitted >= 1 and replicates >= 100 (got {} and {})",
                    mc.n_emitted, mc.replicates
                )));
            }
        }

        Ok(Resolved {
            meter,
            scheme,
            standard,
            axis,
            noise,
        })
    }
}

fn to_complex(c: &[f64; 2]) -> Complex {
    Complex::new(c[0], c[1])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StandardInfo {
    pub lambda_star: f64,
    pub degenerate_max: bool,
}

/// Validated domain objects for one scenario.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub meter: GaussianMeter,
    pub scheme: SelectionScheme,
    pub standard: Option<StandardInfo>,
    pub axis: QuadratureAxis,
    pub noise: Option<NoiseModel>,
}

impl Resolved {
    pub fn shift(&self) -> Result<PhaseSpaceShift> {
        weakmeter::selection::weak_value_shift(&self.scheme, &self.meter).map_err(
            CliError::computation(format!(
                "weak-value shift (g = {}, |<f|i>|^2 = {:e})",
                self.scheme.g(),
                self.scheme.postselection_probability()
            )),
        )
    }

    /// Default Wigner export window: ±4 standard deviations around the
    /// shifted peak, 81 × 81 points.
    pub fn default_wigner_grid(&self) -> Result<WignerGridSpec> {
        let shift = self.shift()?;
        Ok(WignerGridSpec::around(
            &self.meter,
            PhaseSpacePoint::new(shift.dx(), shift.dk()),
            4.0,
            81,
        ))
    }
}
