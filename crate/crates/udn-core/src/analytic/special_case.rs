//! Closed-form coverage for the all-NLoS, Rayleigh, common-exponent
//! special case: the interference Laplace transform reduces to a Gauss
//! hypergeometric expression per tier and the cooperator-distance law is an
//! explicit triangular density, leaving a Poisson-mixed low-dimensional
//! integral.
//!
//! Two conventions for combining the cooperating signals are provided. The
//! published form treats the combined power as exponential with mean equal
//! to the ARLP sum (`PowerSum`), which is exact only for random-phase
//! combining. `CoherentAmplitude` applies the same Gamma moment match the
//! general pipeline uses to the coherent amplitude sum and is the
//! convention consistent with the simulator; the two differ visibly
//! whenever multi-BS sets are common.

use alloc::vec::Vec;

use super::assoc::association_law;
use super::coverage::{Bracket, EvalSettings};
use super::gamma_approx::{gamma_approx, AmpMoments};
use super::laplace::{coverage_terms, InterferenceField};
use crate::geometry::LosProfile;
use crate::mathx;
use crate::model::{EtaMatrix, LinkClass, NetworkModel};
use crate::numerics::special::hyp2f1;
use crate::numerics::sum::MeanVar;
use crate::numerics::{poisson_pmf, poisson_truncation, NumericError, TruncationBudget};
use crate::rng::{self, StreamRole};
use rand::Rng;

/// How cooperating signals combine into the received power.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignalCombining {
    /// Gamma moment match of the coherent amplitude sum (matches the
    /// simulator's conjugate-precoded model).
    CoherentAmplitude,
    /// Exponential with mean equal to the ARLP sum, as printed in the
    /// closed-form derivation.
    PowerSum,
}

/// `ln` of the tier band integral
/// `(-1)^{n+1} Delta^{(n)}(s) = n!/alpha sigma^n V^{n-2/alpha}/(n-2/alpha)
///  2F1(n+1, n-2/alpha; n+1-2/alpha; -s sigma V)` with `V = R^{-alpha}`
/// (for `n = 0` the `1-MGF` form). `None` when the series argument is too
/// deep for the hypergeometric series.
fn ln_delta_rayleigh(n: u32, s: f64, sigma: f64, big_r: f64, alpha: f64) -> Option<f64> {
    let v = mathx::powf(big_r, -alpha);
    let z = s * sigma * v;
    if z > 1e4 {
        return None;
    }
    if n == 0 {
        let b = 1.0 - 2.0 / alpha;
        let f = hyp2f1(1.0, b, b + 1.0, -z).ok()?;
        // s sigma V^{1-2/alpha} / (alpha (1-2/alpha)) * F
        Some(mathx::ln(z) - (2.0 / alpha) * mathx::ln(v) - mathx::ln(alpha * b) + mathx::ln(f))
    } else {
        let nf = n as f64;
        let b = nf - 2.0 / alpha;
        let f = hyp2f1(nf + 1.0, b, b + 1.0, -z).ok()?;
        Some(
            mathx::lgamma(nf + 1.0) - mathx::ln(alpha) + nf * mathx::ln(sigma * v)
                - (2.0 / alpha) * mathx::ln(v)
                - mathx::ln(b)
                + mathx::ln(f),
        )
    }
}

struct TierBand {
    tier: usize,
    lam: f64,
    sigma: f64,
    lo: f64,
    hi: f64,
    mean: f64,
    n_max: u32,
}

/// Coverage probability for the all-NLoS Rayleigh common-exponent network.
pub fn coverage_special_case(
    model: &NetworkModel,
    eta: &EtaMatrix,
    gamma_t: f64,
    combining: SignalCombining,
    settings: &EvalSettings,
) -> Result<Bracket, NumericError> {
    if model.channel.los_enabled
        || model.channel.m_nlos != 1
        || model.channel.alpha_los != model.channel.alpha_nlos
    {
        return Err(NumericError::InvalidParameter(
            "special case requires all-NLoS Rayleigh with a common exponent",
        ));
    }
    let alpha = model.channel.alpha_nlos;
    if !(alpha > 2.0) {
        return Err(NumericError::InvalidParameter("special case requires alpha > 2"));
    }
    if gamma_t <= 0.0 {
        return Ok(Bracket { lower: 1.0, upper: 1.0, point: 1.0, std_err: 0.0 });
    }
    let profile = LosProfile::new(model);
    let laws = association_law(model)?;
    let (nodes, weights) = crate::numerics::quad::gauss_legendre(settings.outer_nodes);
    let moments = AmpMoments::new(&model.channel);
    let mut lower = 0.0;
    let mut upper = 0.0;
    let mut point = 0.0;
    let mut var = 0.0;
    for (li, law) in laws.iter().enumerate() {
        if law.assoc_prob < 1e-9 || law.class == LinkClass::Los {
            continue;
        }
        let k = law.tier;
        for (ni, (&xu, &wu)) in nodes.iter().zip(weights.iter()).enumerate() {
            let u = 0.5 * (xu + 1.0);
            let w = 0.5 * wu * law.assoc_prob;
            let r = law.quantile(model, &profile, u)?;
            let lane = (li * settings.outer_nodes + ni) as u64;
            let b = conditional_special(
                model, eta, &moments, k, r, alpha, gamma_t, combining, settings, lane,
            )?;
            lower += w * b.lower;
            upper += w * b.upper;
            point += w * b.point;
            var += (w * b.std_err) * (w * b.std_err);
        }
    }
    Ok(Bracket {
        lower: lower.clamp(0.0, 1.0),
        upper: upper.clamp(0.0, 1.0),
        point: point.clamp(0.0, 1.0),
        std_err: mathx::sqrt(var),
    })
}

#[allow(clippy::too_many_arguments)]
fn conditional_special(
    model: &NetworkModel,
    eta: &EtaMatrix,
    moments: &AmpMoments,
    k: usize,
    r: f64,
    alpha: f64,
    gamma_t: f64,
    combining: SignalCombining,
    settings: &EvalSettings,
    lane: u64,
) -> Result<Bracket, NumericError> {
    let profile = LosProfile::new(model);
    // cooperator bands per tier: [nu r, eta^{-1/alpha} nu r] clamped at h_j
    let mut bands = Vec::new();
    let active = model.tiers.iter().filter(|t| t.density > 0.0).count();
    for (j, tier) in model.tiers.iter().enumerate() {
        if tier.density == 0.0 {
            continue;
        }
        let nu = mathx::powf(tier.tx_power / model.tiers[k].tx_power, 1.0 / alpha);
        let lo = (nu * r).max(profile.heights[j]);
        let hi = (mathx::powf(eta.get(j, k), -1.0 / alpha) * nu * r).max(profile.heights[j]);
        let mean = core::f64::consts::PI * tier.density * (hi * hi - lo * lo).max(0.0);
        let per_sum_tail =
            1.0 - mathx::powf(1.0 - settings.budget.tail_mass, 1.0 / active as f64);
        let n_max = if mean > 0.0 {
            poisson_truncation(mean, &TruncationBudget { tail_mass: per_sum_tail, ..settings.budget })?
        } else {
            0
        };
        bands.push(TierBand { tier: j, lam: tier.density, sigma: tier.tx_power, lo, hi, mean, n_max });
    }
    // interferers of tier j live beyond the band's upper edge
    let field_bounds: Vec<[f64; 2]> = {
        let mut v = Vec::new();
        let mut bi = 0;
        for tier in model.tiers.iter() {
            if tier.density == 0.0 {
                v.push([f64::INFINITY, f64::INFINITY]);
            } else {
                v.push([bands[bi].hi, bands[bi].hi]);
                bi += 1;
            }
        }
        v
    };
    let field = InterferenceField::with_bounds(model, field_bounds);

    // enumerate tier-count configurations
    let mut configs: Vec<(Vec<u32>, f64)> = Vec::new();
    let mut missing = 0.0;
    {
        fn dfs(
            bands: &[TierBand],
            idx: usize,
            weight: f64,
            floor: f64,
            counts: &mut Vec<u32>,
            out: &mut Vec<(Vec<u32>, f64)>,
            missing: &mut f64,
        ) {
            if weight < floor {
                *missing += weight;
                return;
            }
            if idx == bands.len() {
                out.push((counts.clone(), weight));
                return;
            }
            let mut kept = 0.0;
            for n in 0..=bands[idx].n_max {
                let w = poisson_pmf(bands[idx].mean, n);
                counts[idx] = n;
                dfs(bands, idx + 1, weight * w, floor, counts, out, missing);
                kept += w;
            }
            counts[idx] = 0;
            *missing += weight * (1.0 - kept).max(0.0);
        }
        let mut counts = alloc::vec![0u32; bands.len()];
        dfs(&bands, 0, 1.0, settings.config_weight_floor, &mut counts, &mut configs, &mut missing);
    }

    let main_arlp = model.tiers[k].tx_power * mathx::powf(r, -alpha);
    let ln_laplace = |s: f64| -> f64 {
        // 2 pi sum_j lam_j Delta0_j(s), hypergeometric when shallow enough
        let mut total = 0.0;
        for b in &bands {
            match ln_delta_rayleigh(0, s, b.sigma, b.hi, alpha) {
                Some(ld) => total += b.lam * mathx::exp(ld),
                // deep argument: direct quadrature fallback
                None => total += b.lam * field.delta_hat(b.tier, LinkClass::Nlos, 0, s),
            }
        }
        -2.0 * core::f64::consts::PI * total
    };

    let mut lower = 0.0;
    let mut upper = 0.0;
    let mut point = 0.0;
    let mut var = 0.0;
    let mut links: Vec<(f64, LinkClass)> = Vec::new();
    for (ci, (counts, weight)) in configs.iter().enumerate() {
        let total_n: u32 = counts.iter().sum();
        let mut stream =
            rng::substream(settings.seed, (lane << 20) | ci as u64, StreamRole::AnalyticInner, 1);
        let mut acc_lo = MeanVar::new();
        let mut acc_hi = MeanVar::new();
        let mut acc_pt = MeanVar::new();
        let mut target = if total_n == 0 { 1 } else { settings.inner_samples_min };
        loop {
            while (acc_pt.count() as usize) < target {
                // draw cooperator distances: pdf 2x/(hi^2 - lo^2) on the band
                links.clear();
                links.push((mathx::sqrt(main_arlp), LinkClass::Nlos));
                let mut arlp_sum = main_arlp;
                for (b, &n) in bands.iter().zip(counts.iter()) {
                    for _ in 0..n {
                        let uu: f64 = stream.random();
                        let x2 = b.lo * b.lo + uu * (b.hi * b.hi - b.lo * b.lo);
                        let arlp = b.sigma * mathx::powf(x2, -0.5 * alpha);
                        arlp_sum += arlp;
                        links.push((mathx::sqrt(arlp), LinkClass::Nlos));
                    }
                }
                match combining {
                    SignalCombining::PowerSum => {
                        let s = gamma_t / arlp_sum;
                        let v = mathx::exp(ln_laplace(s)).clamp(0.0, 1.0);
                        acc_lo.add(v);
                        acc_hi.add(v);
                        acc_pt.add(v);
                    }
                    SignalCombining::CoherentAmplitude => {
                        let g = gamma_approx(moments, &links)?;
                        let s = gamma_t / g.beta;
                        let need = g.k0_ceil.saturating_sub(1) as usize;
                        let exponent0 = -ln_laplace(s);
                        let mut ln_d = alloc::vec![f64::NEG_INFINITY; need.max(1)];
                        for (n, slot) in ln_d.iter_mut().enumerate().take(need) {
                            let order = (n + 1) as u32;
                            let mut acc = 0.0;
                            for b in &bands {
                                match ln_delta_rayleigh(order, s, b.sigma, b.hi, alpha) {
                                    Some(ld) => acc += b.lam * mathx::exp(ld),
                                    None => {
                                        acc += b.lam
                                            * field.delta_hat(b.tier, LinkClass::Nlos, order, s)
                                    }
                                }
                            }
                            let d = 2.0 * core::f64::consts::PI * acc * mathx::powf(s, order as f64)
                                / mathx::exp(mathx::lgamma(order as f64 + 1.0));
                            *slot = if d > 0.0 { mathx::ln(d) } else { f64::NEG_INFINITY };
                        }
                        let terms = coverage_terms(exponent0, &ln_d, need);
                        let sum_floor: f64 =
                            terms[..(g.k0_floor as usize).min(terms.len())].iter().sum();
                        let sum_ceil: f64 = terms.iter().sum();
                        let frac = g.zeta - g.k0_floor as f64;
                        acc_lo.add(sum_floor.clamp(0.0, 1.0));
                        acc_hi.add(sum_ceil.clamp(0.0, 1.0));
                        acc_pt.add(((1.0 - frac) * sum_floor + frac * sum_ceil).clamp(0.0, 1.0));
                    }
                }
            }
            if total_n == 0 || acc_pt.std_err() < 1e-3 || target >= settings.inner_samples_max {
                break;
            }
            target = (target * 2).min(settings.inner_samples_max);
        }
        lower += weight * acc_lo.mean();
        upper += weight * acc_hi.mean();
        point += weight * acc_pt.mean();
        let se = acc_pt.std_err();
        var += (weight * se) * (weight * se);
    }
    upper += missing;
    point += 0.5 * missing;
    Ok(Bracket {
        lower: lower.clamp(0.0, 1.0),
        upper: upper.clamp(0.0, 1.0),
        point: point.clamp(0.0, 1.0),
        std_err: mathx::sqrt(var) + 0.5 * missing,
    })
}
