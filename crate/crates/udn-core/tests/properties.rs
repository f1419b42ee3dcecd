//! Property tests for the numeric kernels and the assignment rules.

use proptest::prelude::*;
use udn_core::association::assign;
use udn_core::geometry::sample_realization;
use udn_core::model::presets::paper_two_tier;
use udn_core::model::CompPolicy;
use udn_core::numerics::{
    erf, hyp2f1, integrate_1d, poisson_pmf, poisson_truncation, QuadSpec, TruncationBudget,
};

fn hyp2f1_direct_series(a: f64, b: f64, c: f64, z: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    for n in 0..4000 {
        let nf = n as f64;
        term *= (a + nf) * (b + nf) / ((c + nf) * (nf + 1.0)) * z;
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn erf_is_odd_monotone_bounded(x in -5.0f64..5.0, dx in 1e-6f64..1.0) {
        prop_assert!((erf(x) + erf(-x)).abs() < 1e-15);
        prop_assert!(erf(x + dx) >= erf(x));
        prop_assert!(erf(x).abs() < 1.0);
    }

    #[test]
    fn hyp2f1_pfaff_agrees_with_direct_series(
        a in 0.2f64..3.0,
        b in 0.1f64..2.5,
        cextra in 0.1f64..2.0,
        z in -0.95f64..0.0,
    ) {
        let c = b + cextra; // keeps both series well behaved
        let got = hyp2f1(a, b, c, z).unwrap();
        let want = hyp2f1_direct_series(a, b, c, z);
        prop_assert!(((got - want) / want).abs() < 1e-10, "{got} vs {want}");
    }

    #[test]
    fn quadrature_normalizes_scaled_exponential_pdfs(rate in 0.05f64..20.0) {
        let spec = QuadSpec::default();
        let r = integrate_1d(|t| rate * (-rate * t).exp(), 0.0, f64::INFINITY, &spec).unwrap();
        prop_assert!((r.value - 1.0).abs() < 1e-7, "{}", r.value);
    }

    #[test]
    fn poisson_truncation_minimal(mean in 0.01f64..30.0) {
        let budget = TruncationBudget { tail_mass: 1e-4, max_terms_per_sum: 512 };
        let n = poisson_truncation(mean, &budget).unwrap();
        let cum: f64 = (0..=n).map(|k| poisson_pmf(mean, k)).sum();
        prop_assert!(cum >= 1.0 - 1e-4);
        if n > 0 {
            let prev: f64 = (0..n).map(|k| poisson_pmf(mean, k)).sum();
            prop_assert!(prev < 1.0 - 1e-4);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn assignment_partitions_and_respects_boundaries(
        trial in 0u64..500,
        eta_db in -12.0f64..-0.1,
        lam_exp in -4.0f64..-2.7,
    ) {
        let model = paper_two_tier(10f64.powf(lam_exp));
        let eta = 10f64.powf(eta_db / 10.0);
        let real = sample_realization(&model, 260.0, 1234, trial).unwrap();
        prop_assume!(!real.points.is_empty());
        let asg = assign(&real, &CompPolicy::rrlp(2, eta), &model).unwrap();
        prop_assert_eq!(asg.cooperators.len() + asg.interferers.len() + 1, real.points.len());
        let arlp = |i: usize| {
            let p = &real.points[i];
            udn_core::channel::arlp(&model, p.tier as usize, p.x, p.class).unwrap()
        };
        let main = arlp(asg.main);
        for &i in &asg.cooperators {
            prop_assert!(arlp(i) >= eta * main);
            prop_assert!(arlp(i) <= main * (1.0 + 1e-12));
        }
        for &i in &asg.interferers {
            prop_assert!(arlp(i) < eta * main);
        }
        // scaling all powers leaves the partition untouched
        let mut scaled = model.clone();
        for t in &mut scaled.tiers {
            t.tx_power *= 31.7;
        }
        let asg2 = assign(&real, &CompPolicy::rrlp(2, eta), &scaled).unwrap();
        prop_assert_eq!(asg.main, asg2.main);
        prop_assert_eq!(&asg.cooperators, &asg2.cooperators);
    }
}
