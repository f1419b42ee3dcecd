//! Main-link association law and the mean cooperating-set size.
//!
//! The main link is the maximum-ARLP point over all tiers and link classes.
//! With the closed-form band masses, the void probability of "no stronger
//! point" is `exp(-v(r))` with
//! `v(r) = 2 pi sum_j lam_j sum_c int_{h_j}^{theta_j^c(r)} t p^c(t) dt`,
//! and everything downstream is one-dimensional quadrature.

use alloc::vec::Vec;

use crate::geometry::{theta_bound, LosProfile};
use crate::mathx;
use crate::model::{EtaMatrix, LinkClass, NetworkModel};
use crate::numerics::{self, NumericError, QuadSpec};

/// Association probability and conditional main-link distance law for one
/// (tier, class) branch.
#[derive(Debug, Clone)]
pub struct MainLinkLaw {
    pub tier: usize,
    pub class: LinkClass,
    /// Probability the main link lands in this branch.
    pub assoc_prob: f64,
    /// Lower support bound (the tier height difference).
    pub support_lo: f64,
}

/// Total intensity mass of points with ARLP above the tier-`k` class-`co`
/// level at distance `r`.
pub(crate) fn void_exponent(
    model: &NetworkModel,
    profile: &LosProfile,
    k: usize,
    co: LinkClass,
    r: f64,
) -> f64 {
    let mut v = 0.0;
    for (j, tier) in model.tiers.iter().enumerate() {
        if tier.density == 0.0 {
            continue;
        }
        for c in LinkClass::BOTH {
            let theta = theta_bound(model, j, c, k, co, r);
            v += 2.0 * core::f64::consts::PI * tier.density * profile.band_mass(j, c, theta);
        }
    }
    v
}

/// Unnormalized main-link density of branch `(k, co)` at distance `r`.
pub(crate) fn branch_density(
    model: &NetworkModel,
    profile: &LosProfile,
    k: usize,
    co: LinkClass,
    r: f64,
) -> f64 {
    let p = profile.p_class(k, co, r);
    if p <= 0.0 {
        return 0.0;
    }
    2.0 * core::f64::consts::PI
        * model.tiers[k].density
        * r
        * p
        * mathx::exp(-void_exponent(model, profile, k, co, r))
}

fn default_spec() -> QuadSpec {
    QuadSpec { abs_tol: 1e-12, rel_tol: 1e-9, ..QuadSpec::default() }
}

/// Association probabilities for all `2K` (tier, class) branches.
pub fn association_law(model: &NetworkModel) -> Result<Vec<MainLinkLaw>, NumericError> {
    let profile = LosProfile::new(model);
    let spec = default_spec();
    let mut laws = Vec::with_capacity(2 * model.num_tiers());
    for k in 0..model.num_tiers() {
        for co in LinkClass::BOTH {
            let h_k = profile.heights[k];
            let prob = if model.tiers[k].density == 0.0 {
                0.0
            } else {
                numerics::integrate_1d(
                    |r| branch_density(model, &profile, k, co, r),
                    h_k,
                    f64::INFINITY,
                    &spec,
                )?
                .value
            };
            laws.push(MainLinkLaw { tier: k, class: co, assoc_prob: prob, support_lo: h_k });
        }
    }
    Ok(laws)
}

impl MainLinkLaw {
    /// Normalized pdf of the main-link distance for this branch.
    pub fn pdf(&self, model: &NetworkModel, r: f64) -> f64 {
        if self.assoc_prob <= 0.0 || r < self.support_lo {
            return 0.0;
        }
        let profile = LosProfile::new(model);
        branch_density(model, &profile, self.tier, self.class, r) / self.assoc_prob
    }

    /// Branch CDF at `r` (normalized).
    pub fn cdf(
        &self,
        model: &NetworkModel,
        profile: &LosProfile,
        r: f64,
    ) -> Result<f64, NumericError> {
        if self.assoc_prob <= 0.0 {
            return Ok(0.0);
        }
        if r <= self.support_lo {
            return Ok(0.0);
        }
        let spec = default_spec();
        let mass = numerics::integrate_1d(
            |t| branch_density(model, profile, self.tier, self.class, t),
            self.support_lo,
            r,
            &spec,
        )?
        .value;
        Ok((mass / self.assoc_prob).clamp(0.0, 1.0))
    }

    /// Inverse branch CDF by bracketed root finding.
    pub fn quantile(
        &self,
        model: &NetworkModel,
        profile: &LosProfile,
        u: f64,
    ) -> Result<f64, NumericError> {
        if !(0.0 < u && u < 1.0) {
            return Err(NumericError::InvalidParameter("quantile level must lie in (0,1)"));
        }
        // expand an upper bracket until the CDF exceeds u
        let mut hi = self.support_lo.max(1.0) * 2.0;
        for _ in 0..80 {
            if self.cdf(model, profile, hi)? >= u {
                break;
            }
            hi *= 2.0;
        }
        let lo = self.support_lo;
        numerics::find_root_monotone(
            |r| self.cdf(model, profile, r).map(|c| c - u).unwrap_or(f64::NAN),
            lo,
            hi,
            1e-9 * hi.max(1.0),
        )
    }
}

/// Mean cooperating-set size under the RRLP thresholds (main link counted
/// once through its own tier's band, as the radial-band form implies).
pub fn mean_comp_size_analytic(model: &NetworkModel, eta: &EtaMatrix) -> Result<f64, NumericError> {
    eta.validate().map_err(|_| NumericError::InvalidParameter("eta out of (0,1]"))?;
    let profile = LosProfile::new(model);
    let spec = default_spec();
    let mut total = 0.0;
    for k in 0..model.num_tiers() {
        if model.tiers[k].density == 0.0 {
            continue;
        }
        for co in LinkClass::BOTH {
            let h_k = profile.heights[k];
            let contribution = numerics::integrate_1d(
                |r| {
                    let dens = branch_density(model, &profile, k, co, r);
                    if dens == 0.0 {
                        return 0.0;
                    }
                    let mut w = 0.0;
                    for (j, tier) in model.tiers.iter().enumerate() {
                        if tier.density == 0.0 {
                            continue;
                        }
                        for c in LinkClass::BOTH {
                            let theta = theta_bound(model, j, c, k, co, r);
                            let upper = theta
                                * mathx::powf(eta.get(j, k), -1.0 / model.channel.alpha(c));
                            w += 2.0
                                * core::f64::consts::PI
                                * tier.density
                                * profile.band_mass(j, c, upper);
                        }
                    }
                    dens * w
                },
                h_k,
                f64::INFINITY,
                &spec,
            )?;
            total += contribution.value;
        }
    }
    Ok(total)
}
