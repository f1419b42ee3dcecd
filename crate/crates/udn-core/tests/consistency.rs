//! Cross-path consistency: the general conditional-coverage machinery, the
//! all-NLoS/Rayleigh closed form, and the Monte Carlo engine must agree on
//! their common ground.

use udn_core::analytic::{
    coverage_analytic, coverage_special_case, rx_ase_analytic, EvalSettings, SignalCombining,
};
use udn_core::association::calibrate_eta;
use udn_core::geometry::window_radius_for;
use udn_core::model::presets::{paper_two_tier, single_tier_nlos_rayleigh};
use udn_core::model::{CompPolicy, EtaMatrix};
use udn_core::sim::{metrics_report, run_trials, TrialEvaluator};

fn settings_fast(seed: u64) -> EvalSettings {
    EvalSettings {
        outer_nodes: 16,
        inner_samples_min: 256,
        inner_samples_max: 2048,
        seed,
        ..EvalSettings::default()
    }
}

/// Coverage at several thresholds by simulation.
fn mc_coverage(
    model: &udn_core::model::NetworkModel,
    eta: f64,
    gammas: &[f64],
    trials: u64,
    seed: u64,
) -> Vec<f64> {
    let k = model.num_tiers();
    let window = window_radius_for(model, 1e-3).unwrap();
    let eval = TrialEvaluator {
        model: model.clone(),
        policies: vec![CompPolicy::rrlp(k, eta)],
        gammas: gammas.to_vec(),
        window_radius: window,
        seed,
    };
    let accs = run_trials(&eval, trials);
    let rep = metrics_report(&eval, &accs, 0, 1.96);
    assert!(rep.sentinel_fraction < 1e-6, "window too small");
    rep.coverage.iter().map(|e| e.value).collect()
}

#[test]
fn lemma3_pipeline_matches_theorem1_on_rayleigh_inputs() {
    // same model reaches the general machinery and the closed form
    let model = single_tier_nlos_rayleigh(1e-4, 4.0);
    let eta_lin = calibrate_eta(&model, 2.0).unwrap();
    let eta = EtaMatrix::scalar(1, eta_lin);
    for gt in [0.5, 2.0] {
        let s1 = settings_fast(7);
        let a = coverage_special_case(&model, &eta, gt, SignalCombining::CoherentAmplitude, &s1)
            .unwrap();
        let b = coverage_analytic(&model, &eta, gt, &s1).unwrap();
        assert!(
            (a.point - b.point).abs() < 1e-3 + 2.0 * (a.std_err + b.std_err),
            "gt={gt}: special {} vs general {} (se {} / {})",
            a.point,
            b.point,
            a.std_err,
            b.std_err
        );
        assert!((a.lower - b.lower).abs() < 2e-3 + 2.0 * (a.std_err + b.std_err));
        assert!((a.upper - b.upper).abs() < 2e-3 + 2.0 * (a.std_err + b.std_err));
    }
}

#[test]
fn special_case_tracks_monte_carlo() {
    // the Fig.-2 style agreement at one density and three thresholds
    let model = single_tier_nlos_rayleigh(1e-4, 4.0);
    let eta_lin = calibrate_eta(&model, 2.0).unwrap();
    let eta = EtaMatrix::scalar(1, eta_lin);
    let gammas = [0.1, 1.0, 10.0];
    let mc = mc_coverage(&model, eta_lin, &gammas, 30_000, 11);
    for (i, &gt) in gammas.iter().enumerate() {
        let a = coverage_special_case(
            &model,
            &eta,
            gt,
            SignalCombining::CoherentAmplitude,
            &settings_fast(3),
        )
        .unwrap();
        let mc_se = (mc[i] * (1.0 - mc[i]) / 30_000f64).sqrt();
        assert!(
            (a.point - mc[i]).abs() < 0.02 + 3.0 * mc_se,
            "gt={gt}: analytic {} vs mc {} (bracket [{}, {}])",
            a.point,
            mc[i],
            a.lower,
            a.upper
        );
        // and the bracket must straddle the simulation up to noise
        assert!(
            mc[i] > a.lower - 0.03 - 3.0 * mc_se && mc[i] < a.upper + 0.03 + 3.0 * mc_se,
            "gt={gt}: mc {} outside bracket [{}, {}]",
            mc[i],
            a.lower,
            a.upper
        );
    }
}

#[test]
fn theorem1_bracket_contains_mc_two_tier() {
    // one LoS/NLoS two-tier point at a desk-scale density
    let model = paper_two_tier(1e-4);
    let eta_lin = calibrate_eta(&model, 2.0).unwrap();
    let eta = EtaMatrix::scalar(2, eta_lin);
    let gt = 1.0;
    let b = coverage_analytic(&model, &eta, gt, &settings_fast(5)).unwrap();
    let mc = mc_coverage(&model, eta_lin, &[gt], 30_000, 19)[0];
    let mc_se = (mc * (1.0 - mc) / 30_000f64).sqrt();
    assert!(
        mc > b.lower - 0.03 - 3.0 * mc_se && mc < b.upper + 0.03 + 3.0 * mc_se,
        "mc {mc} outside bracket [{}, {}] (point {})",
        b.lower,
        b.upper,
        b.point
    );
}

#[test]
fn rx_ase_analytic_tracks_simulation() {
    let model = single_tier_nlos_rayleigh(1e-4, 4.0);
    let eta_lin = calibrate_eta(&model, 2.0).unwrap();
    let eta = EtaMatrix::scalar(1, eta_lin);
    let gt = 1.0;
    let coarse = EvalSettings {
        outer_nodes: 12,
        inner_samples_min: 128,
        inner_samples_max: 512,
        seed: 2,
        ..EvalSettings::default()
    };
    let analytic = rx_ase_analytic(&model, &eta, gt, &coarse).unwrap();
    let window = window_radius_for(&model, 1e-3).unwrap();
    let eval = TrialEvaluator {
        model: model.clone(),
        policies: vec![CompPolicy::rrlp(1, eta_lin)],
        gammas: vec![gt],
        window_radius: window,
        seed: 31,
    };
    let accs = run_trials(&eval, 30_000);
    let rep = metrics_report(&eval, &accs, 0, 2.58);
    let mc = rep.per_user_se[0].value;
    let slack = (analytic.per_user_se.upper - analytic.per_user_se.lower)
        + 3.0 * (rep.per_user_se[0].ci_hi - rep.per_user_se[0].value)
        + 3.0 * analytic.per_user_se.std_err
        + 0.05;
    assert!(
        (analytic.per_user_se.point - mc).abs() < slack,
        "per-user SE: analytic {} [{}, {}] vs mc {mc} (slack {slack})",
        analytic.per_user_se.point,
        analytic.per_user_se.lower,
        analytic.per_user_se.upper
    );
    // rx_ase is the user-density multiple
    assert!((analytic.rx_ase.point - model.user_density * analytic.per_user_se.point).abs() < 1e-12);
}

#[test]
fn conditional_coverage_bracket_contains_conditioned_mc() {
    // condition Monte Carlo trials on the main link landing in a narrow
    // distance bin around the branch median and compare with the
    // conditional bracket evaluated at that distance
    use udn_core::analytic::conditional_coverage;
    use udn_core::association::assign;
    use udn_core::geometry::{sample_realization, LosProfile};
    use udn_core::model::LinkClass;
    use udn_core::sim::{draw_point_fading, trial_sir};

    let model = single_tier_nlos_rayleigh(1e-3, 4.0);
    let eta_lin = calibrate_eta(&model, 2.0).unwrap();
    let eta = EtaMatrix::scalar(1, eta_lin);
    let profile = LosProfile::new(&model);
    let laws = udn_core::analytic::association_law(&model).unwrap();
    let law = laws.iter().find(|l| l.class == LinkClass::Nlos).unwrap();
    let r_med = law.quantile(&model, &profile, 0.5).unwrap();
    let dr = 1.0;
    let gamma_t = 1.0;

    let window = window_radius_for(&model, 1e-3).unwrap();
    let policy = CompPolicy::rrlp(1, eta_lin);
    let mut kept = 0u64;
    let mut covered = 0u64;
    for trial in 0..60_000u64 {
        let real = sample_realization(&model, window, 474, trial).unwrap();
        let Some(asg) = assign(&real, &policy, &model) else { continue };
        let x_main = real.points[asg.main].x;
        if (x_main - r_med).abs() > dr {
            continue;
        }
        let fading = draw_point_fading(&model, &real);
        let out = trial_sir(&real, &asg, &model, &fading);
        kept += 1;
        if out.sir >= gamma_t {
            covered += 1;
        }
    }
    assert!(kept > 1500, "conditioning bin too narrow: {kept}");
    let mc = covered as f64 / kept as f64;
    let se = (mc * (1.0 - mc) / kept as f64).sqrt();

    let settings = settings_fast(13);
    let b = conditional_coverage(&model, &eta, r_med, 0, LinkClass::Nlos, gamma_t, &settings, 3)
        .unwrap();
    assert!(
        mc > b.lower - 0.03 - 3.0 * se && mc < b.upper + 0.03 + 3.0 * se,
        "conditioned mc {mc:.4} (n={kept}) outside bracket [{:.4}, {:.4}] (point {:.4})",
        b.lower,
        b.upper,
        b.point
    );
}
