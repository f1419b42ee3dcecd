use udn_cli::engine;
use udn_core::association::calibrate_eta;
use udn_core::geometry::window_radius_for;
use udn_core::model::presets::paper_two_tier;
use udn_core::model::CompPolicy;
use udn_core::sim::{metrics_report, TrialEvaluator};

fn main() {
    for lam in [5e-3, 1e-2, 2e-2, 5e-2] {
        let model = paper_two_tier(lam);
        let eta = calibrate_eta(&model, 2.0).unwrap();
        let window = window_radius_for(&model, 3e-3).unwrap();
        let trials = if lam >= 2e-2 { 4000 } else { 10_000 };
        let eval = TrialEvaluator {
            model: model.clone(),
            policies: vec![CompPolicy::rrlp(2, eta), CompPolicy::fnsb(2, 2)],
            gammas: vec![0.5, 1.0, 2.0],
            window_radius: window,
            seed: 505,
        };
        let accs = engine::run_parallel(&eval, trials, 2).unwrap();
        let r = metrics_report(&eval, &accs, 0, 1.96);
        let f = metrics_report(&eval, &accs, 1, 1.96);
        for (gi, db) in [(0, -3.0), (1, 0.0), (2, 3.0)] {
            println!(
                "lam={lam:.0e} g={db:+.0}dB: txase rrlp {:.4e} fnsb {:.4e} ratio {:.3} | cov {:.3}/{:.3} | N {:.2}/{:.2}",
                r.tx_ase[gi].value, f.tx_ase[gi].value,
                r.tx_ase[gi].value / f.tx_ase[gi].value,
                r.coverage[gi].value, f.coverage[gi].value,
                r.mean_comp_size.value, f.mean_comp_size.value,
            );
        }
    }
}
