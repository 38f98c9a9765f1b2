//! One function per subcommand, each returning the table it would write.

use rayon::prelude::*;
use weakmeter::noise::{efficiency_ratio, eta_saturation};
use weakmeter::selection::aav_validity;
use weakmeter::{
    cramer_rao_check, weak_value_fisher, FisherReport, NoiseModel, QuadratureDistribution,
};

use crate::output::{Table, Value};
use crate::scenario::{EfficiencySpec, Resolved, Scenario};
use crate::{CliError, Result};

pub const DEFAULT_WARN_AAV: f64 = 0.2;

/// Figures shared by `report` and each `sweep` row.
#[derive(Debug, Clone, Copy)]
struct Evaluation {
    fisher: FisherReport,
    aav_validity: f64,
    eta: f64,
    noisy_corrected: f64,
    efficiency_ratio: f64,
}

fn evaluate(r: &Resolved) -> Result<Evaluation> {
    let g = r.scheme.g();
    let p = r.scheme.postselection_probability();
    let ctx = |what: &str| {
        format!(
            "{what} (g = {g}, sigma = {}, |<f|i>|^2 = {p:e})",
            r.meter.sigma()
        )
    };
    let fisher = weak_value_fisher(&r.scheme, &r.meter, r.axis)
        .map_err(CliError::computation(ctx("fisher report")))?;
    let aav =
        aav_validity(&r.scheme, &r.meter).map_err(CliError::computation(ctx("aav validity")))?;
    let rel = efficiency_ratio(&r.scheme, &r.meter, r.axis, r.noise.as_ref())
        .map_err(CliError::computation(ctx("efficiency ratio")))?;
    Ok(Evaluation {
        fisher,
        aav_validity: aav,
        eta: rel.eta_wv,
        noisy_corrected: rel.noisy_corrected_wv(),
        efficiency_ratio: rel.ratio,
    })
}

/// The scheme's readout distribution along the chosen axis, normalized.
fn readout(r: &Resolved) -> Result<QuadratureDistribution> {
    Ok(r.meter.shifted_quadrature(r.axis, r.shift()?).normalized())
}

pub fn report(scenario: &Scenario, warn_aav: f64) -> Result<(Table, Option<String>)> {
    let r = scenario.resolve()?;
    let e = evaluate(&r)?;
    let f = e.fisher;
    let warning = e.aav_validity > warn_aav;
    let mut fields: Vec<(&str, Value)> = vec![
        ("fisher_ideal", f.fisher_ideal.into()),
        ("corrected", f.corrected.into()),
        ("qfi", f.qfi.into()),
        ("qfi_standard", f.qfi_standard.into()),
        ("shift_coefficient", f.shift_coefficient.into()),
        ("theta", f.theta.into()),
        ("phi", f.phi.into()),
        ("weak_value_re", f.weak_value_re.into()),
        ("weak_value_im", f.weak_value_im.into()),
        (
            "postselection_probability",
            f.postselection_probability.into(),
        ),
        ("aav_validity", e.aav_validity.into()),
        ("aav_threshold", warn_aav.into()),
        ("aav_warning", warning.into()),
        ("standard", r.standard.is_some().into()),
        ("lambda_star", r.standard.map(|s| s.lambda_star).into()),
        (
            "degenerate_max",
            r.standard.map(|s| s.degenerate_max).into(),
        ),
    ];
    if r.noise.is_some() {
        fields.push(("eta", e.eta.into()));
        fields.push(("noisy_corrected", e.noisy_corrected.into()));
        fields.push(("efficiency_ratio", e.efficiency_ratio.into()));
    }
    let message = warning.then(|| {
        format!(
            "warning: g|A_w|/sigma = {:.6} exceeds {warn_aav}; the linear weak-value model may be inaccurate",
            e.aav_validity
        )
    });
    Ok((Table::record(fields), message))
}

pub fn wigner(scenario: &Scenario) -> Result<Table> {
    let r = scenario.resolve()?;
    let spec = match scenario.wigner {
        Some(s) => s,
        None => r.default_wigner_grid()?,
    };
    if spec.nx == 0
        || spec.nk == 0
        || spec
            .x_max
            .partial_cmp(&spec.x_min)
            .is_none_or(|o| o.is_lt())
        || spec
            .k_max
            .partial_cmp(&spec.k_min)
            .is_none_or(|o| o.is_lt())
    {
        return Err(CliError::Validation(format!(
            "wigner: need nx, nk >= 1 and ordered bounds, got x [{}, {}] x {}, k [{}, {}] x {}",
            spec.x_min, spec.x_max, spec.nx, spec.k_min, spec.k_max, spec.nk
        )));
    }
    let shift = r.shift()?;
    let mut t = Table::new(["x", "k", "W"]);
    for s in r.meter.wigner_grid(shift, &spec) {
        t.push(vec![s.x.into(), s.k.into(), s.w.into()]);
    }
    Ok(t)
}

/// Detector efficiency as the readout moves across the detector
/// (pixelation, jitter) or as the arrival probability grows (saturation).
pub fn efficiency(scenario: &Scenario) -> Result<Table> {
    let r = scenario.resolve()?;
    let noise = r
        .noise
        .ok_or_else(|| CliError::Validation("efficiency: scenario has no [noise] table".into()))?;
    let spec = scenario.efficiency.unwrap_or_default();
    let EfficiencySpec { steps, span } = spec;
    if let Some(s) = span {
        if !(s > 0.0 && s.is_finite()) {
            return Err(CliError::Validation(format!(
                "efficiency.span: must be positive, got {s}"
            )));
        }
    }

    let dist = readout(&r)?;
    let mut t;
    match noise {
        NoiseModel::Saturation { p_sat } => {
            t = Table::new(["p_arrival", "eta"]);
            for i in 0..steps {
                let p = if i + 1 == steps {
                    1.0
                } else {
                    i as f64 / (steps - 1) as f64
                };
                t.push(vec![p.into(), eta_saturation(p, p_sat).into()]);
            }
        }
        NoiseModel::Pixelation(pix) => {
            // One detector period, half open, so the pattern is not repeated.
            let span = span.unwrap_or(pix.r);
            t = Table::new(["shift", "eta"]);
            for i in 0..steps {
                let s = span * i as f64 / steps as f64;
                t.push(vec![
                    s.into(),
                    noise.efficiency(&dist.with_mean(s), 1.0).into(),
                ]);
            }
        }
        NoiseModel::Jitter { .. } => {
            let span = span.unwrap_or(dist.std());
            t = Table::new(["shift", "eta"]);
            for i in 0..steps {
                let s = span * i as f64 / steps as f64;
                t.push(vec![
                    s.into(),
                    noise.efficiency(&dist.with_mean(s), 1.0).into(),
                ]);
            }
        }
    }
    Ok(t)
}

pub const SWEEP_COLUMNS: &[&str] = &[
    "fisher_ideal",
    "corrected",
    "qfi",
    "qfi_standard",
    "shift_coefficient",
    "theta",
    "eta",
    "noisy_corrected",
    "efficiency_ratio",
    "aav_validity",
];

/// One row per step, computed in parallel and emitted in step order.
pub fn sweep(scenario: &Scenario) -> Result<Table> {
    let sw = scenario
        .sweep
        .as_ref()
        .ok_or_else(|| CliError::Validation("sweep: scenario has no [sweep] table".into()))?;
    let rows: Vec<Vec<Value>> = sw
        .values()
        .into_par_iter()
        .map(|v| {
            let r = scenario.with_parameter(&sw.parameter, v)?.resolve()?;
            let e = evaluate(&r).map_err(|err| match err {
                CliError::Computation { context, source } => CliError::Computation {
                    context: format!("{context} at {} = {v}", sw.parameter),
                    source,
                },
                other => other,
            })?;
            let f = e.fisher;
            Ok(vec![
                v.into(),
                f.fisher_ideal.into(),
                f.corrected.into(),
                f.qfi.into(),
                f.qfi_standard.into(),
                f.shift_coefficient.into(),
                f.theta.into(),
                e.eta.into(),
                e.noisy_corrected.into(),
                e.efficiency_ratio.into(),
                e.aav_validity.into(),
            ])
        })
        .collect::<Result<_>>()?;
    let mut t =
        Table::new(std::iter::once(sw.parameter.as_str()).chain(SWEEP_COLUMNS.iter().copied()));
    t.rows = rows;
    Ok(t)
}

pub fn montecarlo(scenario: &Scenario) -> Result<Table> {
    let r = scenario.resolve()?;
    let mc = scenario
        .mc
        .ok_or_else(|| CliError::Validation("montecarlo: scenario has no [mc] table".into()))?;
    let g = r.scheme.g();
    let s = cramer_rao_check(
        &r.scheme,
        &r.meter,
        r.axis,
        r.noise.as_ref(),
        g,
        mc.n_emitted,
        mc.replicates,
        mc.seed,
    )
    .map_err(CliError::computation(format!(
        "monte carlo (g = {g}, n_emitted = {}, replicates = {}, seed = {}, |<f|i>|^2 = {:e})",
        mc.n_emitted,
        mc.replicates,
        mc.seed,
        r.scheme.postselection_probability()
    )))?;
    Ok(Table::record(vec![
        ("g_true", s.g_true.into()),
        ("g_hat_mean", s.g_hat_mean.into()),
        ("bias", s.bias.into()),
        ("empirical_variance", s.empirical_variance.into()),
        ("cr_bound", s.cr_bound.into()),
        ("ratio", s.ratio.into()),
        ("n_emitted", s.n_emitted.into()),
        ("n_detected_mean", s.n_detected_mean.into()),
        ("replicates", s.replicates.into()),
        ("seed", s.seed.into()),
        ("empty_batches", s.empty_batches.into()),
    ]))
}
