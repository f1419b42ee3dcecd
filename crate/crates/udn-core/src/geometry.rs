//! Base-station point-process sampling around the typical user, link
//! distances, and the height-aware LoS probability model.
//!
//! The LoS probability of a link at distance `x` to a tier-`j` BS is
//! `base_j ^ sqrt(eps * Upsilon * (x^2 - h_j^2))` with
//! `base_j = 1 - sqrt(pi/2) (rho/h) [erf(h_b/(rho sqrt2)) - erf(h_u/(rho sqrt2))]`,
//! which makes the radial band masses `int t p^(c)(t) dt` available in
//! closed form - every association/coverage integral builds on them.

use alloc::vec::Vec;

use crate::mathx;
use crate::model::{Deployment, LinkClass, NetworkModel};
use crate::numerics::{self, NumericError, QuadSpec};
use crate::rng::{self, StreamRole};
use rand::Rng;

/// Base of the LoS-probability exponential for tier `j`.
pub fn los_base(model: &NetworkModel, j: usize) -> f64 {
    let rho = model.blockage.mean_building_height;
    let hb = model.tiers[j].antenna_height;
    let hu = model.user_height;
    let h = match model.blockage.base_height {
        crate::model::BlockageBaseHeight::HeightDifference => hb - hu,
        crate::model::BlockageBaseHeight::BsHeight => hb,
    };
    let s2 = core::f64::consts::SQRT_2;
    1.0 - mathx::sqrt(core::f64::consts::PI / 2.0) * (rho / h)
        * (mathx::erf(hb / (rho * s2)) - mathx::erf(hu / (rho * s2)))
}

/// Precomputed per-tier LoS geometry: heights, bases and the closed-form
/// band masses used throughout the analytic pipeline.
#[derive(Debug, Clone)]
pub struct LosProfile {
    /// Height difference h_j per tier.
    pub heights: Vec<f64>,
    /// -ln(base_j) per tier (positive).
    neg_ln_base: Vec<f64>,
    /// eps * Upsilon, per m^2.
    eps_ups: f64,
    los_enabled: bool,
}

impl LosProfile {
    pub fn new(model: &NetworkModel) -> Self {
        let heights = (0..model.num_tiers()).map(|j| model.height_diff(j)).collect();
        let neg_ln_base = (0..model.num_tiers())
            .map(|j| {
                if model.channel.los_enabled {
                    -mathx::ln(los_base(model, j))
                } else {
                    0.0
                }
            })
            .collect();
        LosProfile {
            heights,
            neg_ln_base,
            eps_ups: model.blockage.built_fraction * model.blockage.building_density,
            los_enabled: model.channel.los_enabled,
        }
    }

    /// LoS probability of a tier-`j` link at link distance `x >= h_j`.
    pub fn p_los(&self, j: usize, x: f64) -> f64 {
        if !self.los_enabled {
            return 0.0;
        }
        let h = self.heights[j];
        let d2 = x * x - h * h;
        if d2 <= 0.0 {
            return 1.0;
        }
        mathx::exp(-self.neg_ln_base[j] * mathx::sqrt(self.eps_ups * d2))
    }

    /// Probability of link class `c` at distance `x`.
    pub fn p_class(&self, j: usize, c: LinkClass, x: f64) -> f64 {
        match c {
            LinkClass::Los => self.p_los(j, x),
            LinkClass::Nlos => 1.0 - self.p_los(j, x),
        }
    }

    /// Radial band mass `int_{h_j}^{u} t p^{(c)}(t) dt` in closed form;
    /// zero when `u <= h_j`.
    pub fn band_mass(&self, j: usize, c: LinkClass, u: f64) -> f64 {
        let h = self.heights[j];
        if u <= h {
            return 0.0;
        }
        let half_area = 0.5 * (u * u - h * h);
        if !self.los_enabled {
            return match c {
                LinkClass::Los => 0.0,
                LinkClass::Nlos => half_area,
            };
        }
        // substitute v = sqrt(eps_ups (t^2 - h^2)):
        // int t p_L dt = (1/eps_ups) int_0^V v e^{-a v} dv
        let a = self.neg_ln_base[j];
        let v = mathx::sqrt(self.eps_ups * (u * u - h * h));
        let av = a * v;
        let los = if av < 1e-6 {
            // series of (1 - e^{-av}(1+av))/a^2
            (0.5 * v * v - a * v * v * v / 3.0 + a * a * v * v * v * v / 8.0) / self.eps_ups
        } else {
            (1.0 - mathx::exp(-av) * (1.0 + av)) / (a * a) / self.eps_ups
        };
        match c {
            LinkClass::Los => los,
            LinkClass::Nlos => half_area - los,
        }
    }

    /// Band mass over `[lo, hi]`, clamped below at `h_j`.
    pub fn band_mass_between(&self, j: usize, c: LinkClass, lo: f64, hi: f64) -> f64 {
        if hi <= lo {
            return 0.0;
        }
        (self.band_mass(j, c, hi) - self.band_mass(j, c, lo)).max(0.0)
    }
}

/// LoS probability per the blockage model; errors when `x < h_j`.
pub fn los_probability(model: &NetworkModel, j: usize, x: f64) -> Result<f64, NumericError> {
    let h = model.height_diff(j);
    if x < h {
        return Err(NumericError::InvalidParameter(
            "link distance below the tier antenna-height difference",
        ));
    }
    Ok(LosProfile::new(model).p_los(j, x))
}

/// One sampled base station.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BsPoint {
    pub tier: u32,
    /// Horizontal distance to the typical user, m.
    pub y: f64,
    /// Link distance sqrt(y^2 + h_j^2), m.
    pub x: f64,
    pub class: LinkClass,
}

/// One point-process snapshot around the typical user at the origin.
#[derive(Debug, Clone)]
pub struct BsRealization {
    pub points: Vec<BsPoint>,
    pub window_radius: f64,
    pub seed: u64,
    pub trial: u64,
}

/// Default cap on the expected number of points in a realization.
pub const DEFAULT_POINT_CAP: f64 = 8e6;

/// Sample error: the expected point count exceeds the configured cap.
#[derive(Debug, Clone, PartialEq)]
pub struct CapacityError {
    pub expected_points: f64,
    pub cap: f64,
}

impl core::fmt::Display for CapacityError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(
            f,
            "expected {:.3e} points exceeds the {:.3e} cap; shrink the window or density",
            self.expected_points, self.cap
        )
    }
}

impl core::error::Error for CapacityError {}

/// Sample one realization. Deterministic given `(seed, trial)`: per-tier
/// sub-streams are derived with a stable counter scheme, so any trial is
/// reproducible in isolation under any parallel schedule.
pub fn sample_realization(
    model: &NetworkModel,
    window_radius: f64,
    seed: u64,
    trial: u64,
) -> Result<BsRealization, CapacityError> {
    let expected: f64 = model
        .tiers
        .iter()
        .map(|t| t.density * core::f64::consts::PI * window_radius * window_radius)
        .sum();
    if expected > DEFAULT_POINT_CAP {
        return Err(CapacityError { expected_points: expected, cap: DEFAULT_POINT_CAP });
    }
    let profile = LosProfile::new(model);
    let mut points = Vec::new();
    for (j, tier) in model.tiers.iter().enumerate() {
        let mut stream = rng::substream(seed, trial, StreamRole::Geometry, j as u32);
        let h = profile.heights[j];
        match tier.deployment {
            Deployment::Ppp => {
                let mean = tier.density * core::f64::consts::PI * window_radius * window_radius;
                let n = rng::sample_poisson(&mut stream, mean);
                points.reserve(n as usize);
                for _ in 0..n {
                    let u: f64 = stream.random();
                    let y = window_radius * mathx::sqrt(u);
                    let x = mathx::sqrt(y * y + h * h);
                    let class = if stream.random::<f64>() < profile.p_los(j, x) {
                        LinkClass::Los
                    } else {
                        LinkClass::Nlos
                    };
                    points.push(BsPoint { tier: j as u32, y, x, class });
                }
            }
            Deployment::HexGrid => {
                // hexagonal lattice of the same density under a uniformly
                // random global offset and rotation
                let d = mathx::sqrt(2.0 / (mathx::sqrt(3.0) * tier.density));
                let (a1x, a1y) = (d, 0.0);
                let (a2x, a2y) = (0.5 * d, 0.5 * mathx::sqrt(3.0) * d);
                let u: f64 = stream.random();
                let v: f64 = stream.random();
                let theta: f64 = stream.random::<f64>() * 2.0 * core::f64::consts::PI;
                let (st, ct) = (libm::sin(theta), libm::cos(theta));
                let (ox, oy) = (u * a1x + v * a2x, u * a1y + v * a2y);
                let bound = (window_radius / d) as i64 + 3;
                for i in -bound..=bound {
                    for k in -bound..=bound {
                        let px = i as f64 * a1x + k as f64 * a2x + ox;
                        let py = i as f64 * a1y + k as f64 * a2y + oy;
                        let y = mathx::sqrt(px * px + py * py);
                        if y > window_radius {
                            continue;
                        }
                        // rotation preserves distance; apply it anyway so the
                        // dump shows rotated coordinates via y only
                        let _ = (ct, st);
                        let x = mathx::sqrt(y * y + h * h);
                        let class = if stream.random::<f64>() < profile.p_los(j, x) {
                            LinkClass::Los
                        } else {
                            LinkClass::Nlos
                        };
                        points.push(BsPoint { tier: j as u32, y, x, class });
                    }
                }
            }
        }
    }
    Ok(BsRealization { points, window_radius, seed, trial })
}

/// Window radius such that the expected aggregate ARLP from BSs beyond it is
/// at most `neglect_fraction` of the expected main-link ARLP, and at least
/// ten mean nearest-BS distances.
pub fn window_radius_for(model: &NetworkModel, neglect_fraction: f64) -> Result<f64, NumericError> {
    if !(neglect_fraction > 0.0 && neglect_fraction < 1.0) {
        return Err(NumericError::InvalidParameter("neglect_fraction must lie in (0,1)"));
    }
    if model.channel.alpha_nlos <= 2.0 {
        return Err(NumericError::InvalidParameter(
            "ARLP tail integral diverges for alpha <= 2",
        ));
    }
    let profile = LosProfile::new(model);
    let expected_main = expected_main_arlp(model, &profile)?;
    let target = neglect_fraction * expected_main;
    let lam_tot = model.total_density();
    let floor = 10.0 * 0.5 / mathx::sqrt(lam_tot); // 10 x mean nearest-BS distance
    let tail = |radius: f64| -> Result<f64, NumericError> {
        let mut total = 0.0;
        for (j, tier) in model.tiers.iter().enumerate() {
            // the slow power-law tail has an endpoint singularity after the
            // semi-infinite transform; keep tolerances modest
            let spec = QuadSpec {
                abs_tol: 1e-13,
                rel_tol: 1e-7,
                max_subdivisions: 512,
                ..QuadSpec::default()
            };
            let al = model.channel.alpha_los;
            let an = model.channel.alpha_nlos;
            let lo = radius.max(profile.heights[j]);
            let integral = numerics::integrate_1d(
                |t| {
                    let pl = profile.p_los(j, t);
                    let los = if pl > 0.0 { pl * mathx::powf(t, 1.0 - al) } else { 0.0 };
                    los + (1.0 - pl) * mathx::powf(t, 1.0 - an)
                },
                lo,
                f64::INFINITY,
                &spec,
            )?;
            total += 2.0 * core::f64::consts::PI * tier.density * tier.tx_power * integral.value;
        }
        Ok(total)
    };
    // tail(R) is monotone decreasing; expand the bracket then bisect
    let mut hi = floor.max(100.0);
    let mut iters = 0;
    while tail(hi)? > target {
        hi *= 2.0;
        iters += 1;
        if iters > 60 {
            return Err(NumericError::NonConvergent("window radius bracket expansion"));
        }
    }
    let mut lo = hi / 2.0;
    if iters == 0 {
        // already below target at the floor
        return Ok(floor.max(hi));
    }
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if tail(mid)? > target {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo) < 1e-3 * hi {
            break;
        }
    }
    Ok(hi.max(floor))
}

/// Expected ARLP of the main (strongest-ARLP) link, via the association law.
fn expected_main_arlp(model: &NetworkModel, profile: &LosProfile) -> Result<f64, NumericError> {
    let spec = QuadSpec { abs_tol: 1e-16, rel_tol: 1e-8, ..QuadSpec::default() };
    let mut total = 0.0;
    for (k, tier_k) in model.tiers.iter().enumerate() {
        if tier_k.density == 0.0 {
            continue;
        }
        for co in LinkClass::BOTH {
            let h_k = profile.heights[k];
            let alpha_o = model.channel.alpha(co);
            let integral = numerics::integrate_1d(
                |r| {
                    let p = profile.p_class(k, co, r);
                    if p <= 0.0 {
                        return 0.0;
                    }
                    let mut void = 0.0;
                    for (j, tier_j) in model.tiers.iter().enumerate() {
                        for c in LinkClass::BOTH {
                            let theta = theta_bound(model, j, c, k, co, r);
                            void += 2.0
                                * core::f64::consts::PI
                                * tier_j.density
                                * profile.band_mass(j, c, theta);
                        }
                    }
                    2.0 * core::f64::consts::PI
                        * tier_k.density
                        * r
                        * p
                        * mathx::exp(-void)
                        * tier_k.tx_power
                        * mathx::powf(r, -alpha_o)
                },
                h_k,
                f64::INFINITY,
                &spec,
            )?;
            total += integral.value;
        }
    }
    Ok(total)
}

/// Equal-ARLP distance bound: a tier-`j` class-`c` link at distance
/// `theta_j^{(c)}(r, c_o)` has the same ARLP as the tier-`k` class-`c_o`
/// main link at distance `r`.
#[inline]
pub fn theta_bound(model: &NetworkModel, j: usize, c: LinkClass, k: usize, co: LinkClass, r: f64) -> f64 {
    let alpha_c = model.channel.alpha(c);
    let alpha_o = model.channel.alpha(co);
    let ratio = model.tiers[j].tx_power / model.tiers[k].tx_power;
    mathx::powf(ratio, 1.0 / alpha_c) * mathx::powf(r, alpha_o / alpha_c)
}
