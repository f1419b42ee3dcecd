//! Main-link selection, CoMP set formation under the RRLP rule and the
//! baseline schemes, and eta calibration against a target mean set size.

use alloc::vec::Vec;

use crate::analytic;
use crate::geometry::BsRealization;
use crate::model::{CompPolicy, CompScheme, EtaMatrix, LinkClass, NetworkModel};
use crate::numerics::{find_root_monotone, MeanVar, NumericError};
use crate::{channel, mathx};

/// Partition of one realization into main link, cooperators and interferers.
#[derive(Debug, Clone)]
pub struct CompAssignment {
    /// Index of the main (maximum-ARLP) point.
    pub main: usize,
    pub main_tier: usize,
    pub main_class: LinkClass,
    /// Cooperating points, excluding the main link.
    pub cooperators: Vec<usize>,
    /// Everything else; these add interference power.
    pub interferers: Vec<usize>,
    /// Cooperating-set counts per (tier, class), main link included in its
    /// own tier and class.
    pub counts: Vec<[u64; 2]>,
}

impl CompAssignment {
    /// Total cooperating-set size `N = 1 + sum n_j^{(c)}`.
    pub fn comp_size(&self) -> u64 {
        self.counts.iter().map(|c| c[0] + c[1]).sum()
    }

    /// Cooperating-set size of tier `j` (main included when applicable).
    pub fn tier_count(&self, j: usize) -> u64 {
        self.counts[j][0] + self.counts[j][1]
    }
}

/// Form the cooperation set for the typical user.
///
/// Returns `None` on an empty realization (counted as outage downstream).
/// ARLP ties are broken deterministically by (tier, point index).
pub fn assign(real: &BsRealization, policy: &CompPolicy, model: &NetworkModel) -> Option<CompAssignment> {
    if real.points.is_empty() {
        return None;
    }
    let arlps: Vec<f64> = real
        .points
        .iter()
        .map(|p| channel::arlp(model, p.tier as usize, p.x, p.class).unwrap_or(0.0))
        .collect();
    // argmax with first-wins tie break: points are stored tier-major in draw
    // order, so index order equals (tier, index) order
    let mut main = 0usize;
    for (i, &a) in arlps.iter().enumerate() {
        if a > arlps[main] {
            main = i;
        }
    }
    let main_tier = real.points[main].tier as usize;
    let main_class = real.points[main].class;
    let main_arlp = arlps[main];

    let mut cooperators = Vec::new();
    let mut interferers = Vec::new();
    match policy.scheme {
        CompScheme::Rrlp => {
            for (i, &a) in arlps.iter().enumerate() {
                if i == main {
                    continue;
                }
                let j = real.points[i].tier as usize;
                if a >= policy.eta.get(j, main_tier) * main_arlp {
                    cooperators.push(i);
                } else {
                    interferers.push(i);
                }
            }
        }
        CompScheme::Fnsb => {
            let mut order: Vec<usize> = (0..arlps.len()).collect();
            order.sort_by(|&a, &b| {
                arlps[b]
                    .partial_cmp(&arlps[a])
                    .unwrap_or(core::cmp::Ordering::Equal)
                    .then(a.cmp(&b))
            });
            for (rank, &i) in order.iter().enumerate() {
                if i == main {
                    continue;
                }
                if rank < policy.n_strongest {
                    cooperators.push(i);
                } else {
                    interferers.push(i);
                }
            }
            cooperators.sort_unstable();
            interferers.sort_unstable();
        }
        CompScheme::ArlpThreshold => {
            for (i, &a) in arlps.iter().enumerate() {
                if i == main {
                    continue;
                }
                if a >= policy.arlp_floor {
                    cooperators.push(i);
                } else {
                    interferers.push(i);
                }
            }
        }
        CompScheme::NoComp => {
            interferers.extend((0..arlps.len()).filter(|&i| i != main));
        }
    }

    let mut counts = alloc::vec![[0u64; 2]; model.num_tiers()];
    counts[main_tier][main_class.index()] += 1;
    for &i in &cooperators {
        let p = &real.points[i];
        counts[p.tier as usize][p.class.index()] += 1;
    }
    Some(CompAssignment { main, main_tier, main_class, cooperators, interferers, counts })
}

/// Monte Carlo mean CoMP set size with a normal-approximation CI.
///
/// Trials are processed in fixed blocks and merged in block order, so the
/// result is bit-identical to the parallel engine's reduction.
pub fn mean_comp_size_mc(
    model: &NetworkModel,
    policy: &CompPolicy,
    window_radius: f64,
    trials: u64,
    seed: u64,
) -> (f64, (f64, f64)) {
    const BLOCK: u64 = 1024;
    let mut acc = MeanVar::new();
    let mut t = 0;
    while t < trials {
        let hi = (t + BLOCK).min(trials);
        let mut block = MeanVar::new();
        for trial in t..hi {
            let real = crate::geometry::sample_realization(model, window_radius, seed, trial)
                .expect("window within capacity");
            let n = assign(&real, policy, model).map(|a| a.comp_size()).unwrap_or(0);
            block.add(n as f64);
        }
        acc.merge(&block);
        t = hi;
    }
    (acc.mean(), acc.ci(2.5758293035489004)) // 99% normal CI
}

/// Calibrate a scalar RRLP threshold so the analytic mean CoMP set size
/// (Lemma-2 machinery) hits `target_n_avg`. Returns the linear eta.
pub fn calibrate_eta(
    model: &NetworkModel,
    target_n_avg: f64,
) -> Result<f64, NumericError> {
    if !(target_n_avg > 1.0) {
        return Err(NumericError::InvalidParameter("target mean set size must exceed 1"));
    }
    let k = model.num_tiers();
    let f = |ln_eta: f64| -> f64 {
        let eta = mathx::exp(ln_eta);
        let m = EtaMatrix::scalar(k, eta);
        analytic::mean_comp_size_analytic(model, &m).unwrap_or(f64::NAN) - target_n_avg
    };
    // N_avg(eta) decreases monotonically from its eta->0 limit to 1 at eta=1
    let lo = mathx::ln(1e-9);
    let hi = -1e-12;
    let root = find_root_monotone(f, lo, hi, 1e-10)?;
    Ok(mathx::exp(root))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{sample_realization, BsPoint};
    use crate::model::presets::{paper_two_tier, single_tier_nlos_rayleigh};
    use crate::model::{dbm_to_watts, CompPolicy};

    fn manual_realization(points: Vec<BsPoint>) -> BsRealization {
        BsRealization { points, window_radius: 1e4, seed: 0, trial: 0 }
    }

    #[test]
    fn single_bs_any_scheme() {
        let m = paper_two_tier(1e-4);
        let real = manual_realization(alloc::vec![BsPoint {
            tier: 0,
            y: 60.0,
            x: 64.4,
            class: LinkClass::Nlos
        }]);
        for policy in [
            CompPolicy::rrlp(2, 0.5),
            CompPolicy::fnsb(2, 3),
            CompPolicy::no_comp(2),
            CompPolicy::arlp_threshold(2, 1e-9),
        ] {
            let a = assign(&real, &policy, &m).unwrap();
            assert_eq!(a.main, 0);
            assert!(a.cooperators.is_empty() && a.interferers.is_empty());
            assert_eq!(a.comp_size(), 1);
        }
    }

    #[test]
    fn empty_realization_is_outage_sentinel() {
        let m = paper_two_tier(1e-4);
        let real = manual_realization(Vec::new());
        assert!(assign(&real, &CompPolicy::rrlp(2, 0.5), &m).is_none());
    }

    #[test]
    fn rrlp_ratio_boundary() {
        // two same-tier NLoS BSs at 100 m and 120 m, alpha 3.5:
        // ratio (100/120)^3.5 = 0.5283 - cooperates at eta 0.5, not at 0.6
        let m = paper_two_tier(1e-4);
        let real = manual_realization(alloc::vec![
            BsPoint { tier: 0, y: 97.2, x: 100.0, class: LinkClass::Nlos },
            BsPoint { tier: 0, y: 117.7, x: 120.0, class: LinkClass::Nlos },
        ]);
        let a = assign(&real, &CompPolicy::rrlp(2, 0.5), &m).unwrap();
        assert_eq!(a.main, 0);
        assert_eq!(a.cooperators, alloc::vec![1]);
        assert!(a.interferers.is_empty());
        assert_eq!(a.comp_size(), 2);
        let a = assign(&real, &CompPolicy::rrlp(2, 0.6), &m).unwrap();
        assert!(a.cooperators.is_empty());
        assert_eq!(a.interferers, alloc::vec![1]);
    }

    #[test]
    fn tx_power_scale_invariance() {
        let m = paper_two_tier(1e-3);
        let mut scaled = m.clone();
        for t in &mut scaled.tiers {
            t.tx_power *= 10.0;
        }
        for trial in 0..50 {
            let real = sample_realization(&m, 300.0, 21, trial).unwrap();
            for policy in [CompPolicy::rrlp(2, 0.4), CompPolicy::fnsb(2, 3)] {
                let a = assign(&real, &policy, &m).unwrap();
                let b = assign(&real, &policy, &scaled).unwrap();
                assert_eq!(a.main, b.main);
                assert_eq!(a.cooperators, b.cooperators);
                assert_eq!(a.interferers, b.interferers);
            }
        }
    }

    #[test]
    fn partition_and_boundary_exactness() {
        let m = paper_two_tier(1e-3);
        let eta = 0.35;
        let policy = CompPolicy::rrlp(2, eta);
        for trial in 0..200 {
            let real = sample_realization(&m, 250.0, 33, trial).unwrap();
            if real.points.is_empty() {
                continue;
            }
            let a = assign(&real, &policy, &m).unwrap();
            assert_eq!(
                a.cooperators.len() + a.interferers.len() + 1,
                real.points.len(),
                "partition property"
            );
            let main_arlp =
                channel::arlp(&m, a.main_tier, real.points[a.main].x, a.main_class).unwrap();
            for &i in &a.cooperators {
                let p = &real.points[i];
                let r = channel::arlp(&m, p.tier as usize, p.x, p.class).unwrap() / main_arlp;
                assert!(r >= eta, "cooperator below threshold: {r}");
                assert!(r <= 1.0 + 1e-12, "no point may beat the main link");
            }
            for &i in &a.interferers {
                let p = &real.points[i];
                let r = channel::arlp(&m, p.tier as usize, p.x, p.class).unwrap() / main_arlp;
                assert!(r < eta, "interferer above threshold: {r}");
            }
            // comp_size consistency with counts
            assert_eq!(a.comp_size(), 1 + a.cooperators.len() as u64);
        }
    }

    #[test]
    fn lowering_eta_never_removes_cooperators() {
        let m = paper_two_tier(1e-3);
        for trial in 0..100 {
            let real = sample_realization(&m, 250.0, 55, trial).unwrap();
            if real.points.is_empty() {
                continue;
            }
            let hi = assign(&real, &CompPolicy::rrlp(2, 0.6), &m).unwrap();
            let lo = assign(&real, &CompPolicy::rrlp(2, 0.3), &m).unwrap();
            for c in &hi.cooperators {
                assert!(lo.cooperators.contains(c));
            }
        }
    }

    #[test]
    fn fnsb_takes_strongest() {
        let m = paper_two_tier(1e-4);
        // three BSs with distinct ARLPs
        let real = manual_realization(alloc::vec![
            BsPoint { tier: 0, y: 95.0, x: 100.0, class: LinkClass::Nlos },
            BsPoint { tier: 1, y: 50.0, x: 50.7, class: LinkClass::Nlos },
            BsPoint { tier: 1, y: 300.0, x: 300.1, class: LinkClass::Nlos },
        ]);
        // tier-0 at 100m: 25.12*100^-3.5 = 2.51e-6; tier-1 at 50.7m:
        // 2.0*50.7^-3.5 = 2.27e-6 -> main is tier 0
        let a = assign(&real, &CompPolicy::fnsb(2, 2), &m).unwrap();
        assert_eq!(a.main, 0);
        assert_eq!(a.cooperators, alloc::vec![1]);
        assert_eq!(a.interferers, alloc::vec![2]);
        let a = assign(&real, &CompPolicy::fnsb(2, 5), &m).unwrap();
        assert_eq!(a.cooperators.len(), 2);
    }

    #[test]
    fn arlp_threshold_includes_main_even_below_floor() {
        let m = paper_two_tier(1e-4);
        let real = manual_realization(alloc::vec![BsPoint {
            tier: 1,
            y: 900.0,
            x: 900.0,
            class: LinkClass::Nlos
        }]);
        let a = assign(&real, &CompPolicy::arlp_threshold(2, 1.0), &m).unwrap();
        assert_eq!(a.main, 0);
        assert_eq!(a.comp_size(), 1);
    }

    #[test]
    fn no_comp_mean_size_is_one() {
        let m = paper_two_tier(1e-4);
        let (mean, _) = mean_comp_size_mc(&m, &CompPolicy::no_comp(2), 800.0, 300, 3);
        assert_eq!(mean, 1.0);
    }

    #[test]
    fn eta_one_gives_mean_one() {
        let m = paper_two_tier(1e-4);
        let (mean, _) = mean_comp_size_mc(&m, &CompPolicy::rrlp(2, 1.0), 800.0, 500, 4);
        assert_eq!(mean, 1.0, "only the main link satisfies ratio >= 1 a.s.");
    }

    #[test]
    fn calibrate_matches_remark1_closed_form() {
        // single tier, NLoS only, alpha = 4: invert
        // lambda = (N q^{-1} ... ) via q = eta^{-2/alpha}:
        // N = q + pi lam h^2 (q - 1)
        let lam = 1e-4;
        let m = single_tier_nlos_rayleigh(lam, 4.0);
        let h = 23.5;
        for target in [1.5, 2.0, 3.0] {
            let eta = calibrate_eta(&m, target).unwrap();
            let q = mathx::powf(eta, -0.5);
            let n_closed = q + core::f64::consts::PI * lam * h * h * (q - 1.0);
            assert!(
                (n_closed - target).abs() < 1e-6,
                "target {target}: closed-form gives {n_closed}"
            );
            // and the algebraic inversion of the closed form recovers lambda
            let lam_back = (target - q) / (core::f64::consts::PI * h * h * (q - 1.0));
            assert!(((lam_back - lam) / lam).abs() < 1e-6);
        }
    }

    #[test]
    fn calibrate_monotone_in_target() {
        let m = paper_two_tier(1e-3);
        let e2 = calibrate_eta(&m, 2.0).unwrap();
        let e3 = calibrate_eta(&m, 3.0).unwrap();
        assert!(e3 < e2, "larger target must lower eta: {e3} vs {e2}");
    }

    #[test]
    fn calibrate_rejects_bad_target() {
        let m = paper_two_tier(1e-3);
        assert!(calibrate_eta(&m, 1.0).is_err());
    }

    #[test]
    fn power_floor_vs_dbm() {
        // floor between the two ARLPs: tier-0 at 100 m has
        // 25.12*100^-3.5 = 2.5e-6 W (-56 dBm), tier-1 at 500 m has
        // 2*500^-3.5 = 7.2e-10 W (-61.4 dBm)
        let m = paper_two_tier(1e-4);
        let real = manual_realization(alloc::vec![
            BsPoint { tier: 0, y: 95.0, x: 100.0, class: LinkClass::Nlos },
            BsPoint { tier: 1, y: 500.0, x: 500.1, class: LinkClass::Nlos },
        ]);
        let a = assign(&real, &CompPolicy::arlp_threshold(2, dbm_to_watts(-58.0)), &m).unwrap();
        assert_eq!(a.cooperators.len(), 0);
        assert_eq!(a.interferers, alloc::vec![1]);
        // a floor below both turns the far BS into a cooperator
        let a = assign(&real, &CompPolicy::arlp_threshold(2, dbm_to_watts(-70.0)), &m).unwrap();
        assert_eq!(a.cooperators, alloc::vec![1]);
    }
}
