use weakmeter::estimation::SamplingModel;
use weakmeter::selection::{exact_postselected_distribution, standard_scheme};
use weakmeter::{
    cramer_rao_check, run_batch, Complex, GaussianMeter, Grid, NoiseModel, Observable,
    QuadratureAxis, QuditState, SelectionScheme,
};

fn meter() -> GaussianMeter {
    GaussianMeter::new(1.0).unwrap()
}

fn wv_scheme(g: f64) -> SelectionScheme {
    let c = Complex::new;
    let pre = QuditState::normalized(vec![c(1.0, 0.0), c(1.0, 0.0)]).unwrap();
    let post = QuditState::normalized(vec![c(2.0, 0.0), c(-1.0, 0.0)]).unwrap();
    SelectionScheme::new(pre, post, Observable::diagonal(&[1.0, -1.0]).unwrap(), g).unwrap()
}

fn standard(g: f64) -> SelectionScheme {
    standard_scheme(&Observable::diagonal(&[1.0, -1.0]).unwrap(), g)
        .unwrap()
        .scheme
}

fn unbiased(s: &weakmeter::EstimationSummary) -> bool {
    s.bias.abs() < 3.0 * (s.empirical_variance / s.replicates as f64).sqrt()
}

#[test]
fn standard_estimator_is_unbiased_for_several_couplings() {
    for (k, g) in [0.0, 0.1, 1.5].into_iter().enumerate() {
        let s = cramer_rao_check(
            &standard(g),
            &meter(),
            QuadratureAxis::position(),
            None,
            g,
            2000,
            400,
            100 + k as u64,
        )
        .unwrap();
        assert!(unbiased(&s), "{s:?}");
        assert!(s.ratio > 0.85 && s.ratio < 1.15, "{s:?}");
    }
}

#[test]
fn weak_value_estimator_is_unbiased_in_linear_regime() {
    // g|A_w|/σ = 0.03
    let s = cramer_rao_check(
        &wv_scheme(0.01),
        &meter(),
        QuadratureAxis::position(),
        None,
        0.01,
        20_000,
        400,
        8,
    )
    .unwrap();
    assert!(unbiased(&s), "{s:?}");
}

#[test]
fn jitter_inflates_variance_by_inverse_efficiency() {
    let noise = NoiseModel::jitter(1.0 / 3.0).unwrap();
    let s = cramer_rao_check(
        &wv_scheme(0.01),
        &meter(),
        QuadratureAxis::position(),
        Some(&noise),
        0.01,
        100_000,
        1000,
        21,
    )
    .unwrap();
    assert!(s.ratio > 0.9 && s.ratio < 1.1, "{s:?}");
    // cr bound already carries 1/η = 1/0.9
    assert!((s.cr_bound * 1e5 * 0.9 * 0.9 - 1.0).abs() < 1e-12);
}

#[test]
fn pixelated_estimator_within_relaxed_ratio() {
    let noise = NoiseModel::pixelation(1.5, 0.0).unwrap();
    let s = cramer_rao_check(
        &standard(0.1),
        &meter(),
        QuadratureAxis::position(),
        Some(&noise),
        0.1,
        10_000,
        1000,
        4,
    )
    .unwrap();
    assert!(s.ratio > 0.9 && s.ratio < 1.2, "{s:?}");
}

#[test]
fn detected_fraction_tracks_exact_probability() {
    // g|A_w|/σ = 0.03, where the exact and linear success probabilities agree
    let scheme = wv_scheme(0.01);
    let grid = Grid::centered(0.0, 12.0, 100).unwrap();
    let exact =
        exact_postselected_distribution(&scheme, &meter(), QuadratureAxis::position(), &grid)
            .unwrap();
    let n = 200_000u64;
    for seed in 0..5 {
        let b = run_batch(&scheme, &meter(), QuadratureAxis::position(), None, n, seed).unwrap();
        let p = exact.probability;
        let sd = (n as f64 * p * (1.0 - p)).sqrt();
        assert!(
            (b.n_detected as f64 - n as f64 * p).abs() < 4.0 * sd,
            "seed {seed}"
        );
    }
}

#[test]
fn information_per_trial_composes() {
    let m =
        SamplingModel::new(&wv_scheme(0.05), &meter(), QuadratureAxis::position(), None).unwrap();
    assert!((m.information_per_trial() - 0.9).abs() < 1e-12);
    assert!((m.shift_coefficient() - 3.0).abs() < 1e-12);
    let noise = NoiseModel::saturation(0.5).unwrap();
    let m = SamplingModel::new(
        &wv_scheme(0.05),
        &meter(),
        QuadratureAxis::position(),
        Some(&noise),
    )
    .unwrap();
    assert!((m.information_per_trial() - 0.9).abs() < 1e-12);
}
