//! Conditional coverage for a fixed main link (the truncated Poisson
//! mixture over cooperating-set configurations), the overall coverage
//! integral against the main-link law, and the receive-ASE layer cake.
//!
//! For each configuration the inner expectation over cooperator distances is
//! Monte Carlo with the conditional band pdf as the sampling measure; each
//! sample yields a Gamma moment match `(zeta, beta)` and the series
//! `sum_{m<k0} l_m` is evaluated at `k0 = floor(zeta)` and `ceil(zeta)`,
//! giving a two-sided bracket. A fractional-`zeta` interpolation of the two
//! ends serves as the point estimate.

use alloc::vec::Vec;

use super::assoc::association_law;
use super::gamma_approx::{gamma_approx, AmpMoments};
use super::laplace::{coverage_terms, InterferenceField};
use crate::geometry::{theta_bound, LosProfile};
use crate::mathx;
use crate::model::{EtaMatrix, LinkClass, NetworkModel};
use crate::numerics::quad::gauss_legendre;
use crate::numerics::sum::MeanVar;
use crate::numerics::{
    poisson_pmf, poisson_truncation, NumericError, PchipInterp, QuadSpec, TruncationBudget,
};
use crate::rng::{self, StreamRole};
use rand::Rng;

/// Tunables of the analytic coverage evaluation.
#[derive(Debug, Clone)]
pub struct EvalSettings {
    pub quad: QuadSpec,
    pub budget: TruncationBudget,
    /// Initial inner-MC samples per configuration (doubling from here).
    pub inner_samples_min: usize,
    /// Hard cap per configuration.
    pub inner_samples_max: usize,
    /// Gauss-Legendre nodes for the outer main-link-distance integral.
    pub outer_nodes: usize,
    /// Configurations lighter than this joint Poisson weight widen the
    /// bracket instead of being evaluated.
    pub config_weight_floor: f64,
    pub seed: u64,
}

impl Default for EvalSettings {
    fn default() -> Self {
        EvalSettings {
            quad: QuadSpec::default(),
            budget: TruncationBudget::default(),
            inner_samples_min: 512,
            inner_samples_max: 4096,
            outer_nodes: 24,
            config_weight_floor: 1e-6,
            seed: 0,
        }
    }
}

/// Two-sided coverage value: `lower <= point <= upper` up to MC noise.
#[derive(Debug, Clone, Copy)]
pub struct Bracket {
    pub lower: f64,
    pub upper: f64,
    /// Fractional-shape interpolation between the bracket ends.
    pub point: f64,
    pub std_err: f64,
}

impl Bracket {
    fn certain(v: f64) -> Self {
        Bracket { lower: v, upper: v, point: v, std_err: 0.0 }
    }
}

/// Tabulated log series coefficients over a log grid in `s`: order 0 holds
/// `ln(2 pi sum lam Delta^{(0)}(s))` (the Laplace exponent) and order
/// `n >= 1` holds `ln D_n(s)` with the rescaled coefficients of the
/// coverage series.
struct WeightedDeltaTables {
    ln_lo: f64,
    ln_hi: f64,
    grid: Vec<f64>,
    per_order: Vec<Option<PchipInterp>>,
    all_zero: bool,
}

impl WeightedDeltaTables {
    fn order_values(field: &InterferenceField<'_>, grid: &[f64], n: usize) -> Option<PchipInterp> {
        let vals: Vec<f64> = grid
            .iter()
            .map(|&ls| {
                let s = mathx::exp(ls);
                if n == 0 {
                    field.weighted_delta(0, s)
                } else {
                    field.scaled_coefficient(n as u32, s)
                }
            })
            .collect();
        if vals.iter().all(|&v| v <= 0.0) {
            None
        } else {
            let ln_vals: Vec<f64> = vals.iter().map(|&v| mathx::ln(v.max(1e-300))).collect();
            Some(PchipInterp::new(grid.to_vec(), ln_vals))
        }
    }

    fn build(field: &InterferenceField<'_>, s_lo: f64, s_hi: f64, orders: usize) -> Self {
        let ln_lo = mathx::ln(s_lo);
        let ln_hi = mathx::ln(s_hi.max(s_lo * 1.0001));
        let npts = 48;
        let grid: Vec<f64> = (0..npts)
            .map(|i| ln_lo + (ln_hi - ln_lo) * i as f64 / (npts - 1) as f64)
            .collect();
        let mut per_order = Vec::with_capacity(orders + 1);
        for n in 0..=orders {
            per_order.push(Self::order_values(field, &grid, n));
        }
        let all_zero = per_order[0].is_none();
        WeightedDeltaTables { ln_lo, ln_hi, grid, per_order, all_zero }
    }

    fn extend_orders(&mut self, field: &InterferenceField<'_>, orders: usize) {
        for n in self.per_order.len()..=orders {
            self.per_order.push(Self::order_values(field, &self.grid, n));
        }
    }

    /// Log coefficient at order `n`, falling back to direct quadrature
    /// outside the tabulated range.
    fn ln_coeff(&self, field: &InterferenceField<'_>, n: usize, s: f64) -> f64 {
        let ls = mathx::ln(s);
        if ls < self.ln_lo || ls > self.ln_hi || n >= self.per_order.len() {
            let v = if n == 0 {
                field.weighted_delta(0, s)
            } else {
                field.scaled_coefficient(n as u32, s)
            };
            return if v > 0.0 { mathx::ln(v) } else { f64::NEG_INFINITY };
        }
        match &self.per_order[n] {
            Some(t) => t.eval(ls),
            None => f64::NEG_INFINITY,
        }
    }
}

/// Inverse-CDF sampler for the conditional cooperator distance on one
/// (tier, class) band, pdf proportional to `x p^{(c)}(x)`.
struct BandSampler {
    interp: PchipInterp,
}

impl BandSampler {
    fn new(profile: &LosProfile, j: usize, c: LinkClass, lo: f64, hi: f64, mass: f64) -> Self {
        let npts = 129;
        let mut us = Vec::with_capacity(npts);
        let mut xs = Vec::with_capacity(npts);
        let lo2 = lo * lo;
        let hi2 = hi * hi;
        let mut last_u = -1.0;
        for i in 0..npts {
            let t = i as f64 / (npts - 1) as f64;
            let x = mathx::sqrt(lo2 + t * (hi2 - lo2));
            let u = (profile.band_mass_between(j, c, lo, x) / mass).clamp(0.0, 1.0);
            // keep the grid strictly increasing in u
            if u > last_u + 1e-12 {
                us.push(u);
                xs.push(x);
                last_u = u;
            }
        }
        if us.len() < 2 {
            us = alloc::vec![0.0, 1.0];
            xs = alloc::vec![lo, hi];
        } else {
            us[0] = 0.0;
            let n = us.len();
            us[n - 1] = 1.0;
        }
        BandSampler { interp: PchipInterp::new(us, xs) }
    }

    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.interp.eval(rng.random::<f64>())
    }
}

struct Slot {
    tier: usize,
    class: LinkClass,
    mean: f64,
    n_max: u32,
    sampler: BandSampler,
}

/// Conditional coverage probability for a main link in tier `k`, class
/// `co`, at distance `r`, under the RRLP thresholds.
///
/// `lane` decorrelates the inner-MC streams between call sites while
/// keeping every call deterministic.
pub fn conditional_coverage(
    model: &NetworkModel,
    eta: &EtaMatrix,
    r: f64,
    k: usize,
    co: LinkClass,
    gamma_t: f64,
    settings: &EvalSettings,
    lane: u64,
) -> Result<Bracket, NumericError> {
    if gamma_t <= 0.0 {
        return Ok(Bracket::certain(1.0));
    }
    let profile = LosProfile::new(model);
    if r < profile.heights[k] {
        return Err(NumericError::InvalidParameter("main-link distance below tier height"));
    }
    let field = InterferenceField::for_main_link(model, eta, k, co, r);
    let moments = AmpMoments::new(&model.channel);
    let main_amp =
        mathx::sqrt(model.tiers[k].tx_power) * mathx::powf(r, -0.5 * model.channel.alpha(co));

    // cooperator bands and Poisson means
    let mut slots = Vec::new();
    for j in 0..model.num_tiers() {
        if model.tiers[j].density == 0.0 {
            continue;
        }
        for c in LinkClass::BOTH {
            let theta = theta_bound(model, j, c, k, co, r);
            let lo = theta.max(profile.heights[j]);
            let hi = field.lower[j][c.index()];
            let mass = profile.band_mass_between(j, c, lo, hi);
            let mean = 2.0 * core::f64::consts::PI * model.tiers[j].density * mass;
            if mean <= 0.0 {
                continue;
            }
            let per_sum_tail =
                1.0 - mathx::powf(1.0 - settings.budget.tail_mass, 1.0 / (2.0 * model.num_tiers() as f64));
            let n_max = poisson_truncation(
                mean,
                &TruncationBudget { tail_mass: per_sum_tail, ..settings.budget },
            )?;
            slots.push(Slot {
                tier: j,
                class: c,
                mean,
                n_max,
                sampler: BandSampler::new(&profile, j, c, lo, hi, mass),
            });
        }
    }

    // enumerate configurations by DFS with weight pruning
    let mut configs: Vec<(Vec<u32>, f64)> = Vec::new();
    let mut missing = 0.0;
    {
        let mut counts = alloc::vec![0u32; slots.len()];
        dfs_configs(
            &slots,
            0,
            1.0,
            settings.config_weight_floor,
            &mut counts,
            &mut configs,
            &mut missing,
        );
    }

    // pass 1: determine the s-range and maximum series order
    let mut s_min = f64::INFINITY;
    let mut s_max = 0.0f64;
    let mut m_max = 0usize;
    let mut links: Vec<(f64, LinkClass)> = Vec::new();
    for (ci, (counts, _w)) in configs.iter().enumerate() {
        let total_n: u32 = counts.iter().sum();
        let n_samples = if total_n == 0 { 1 } else { settings.inner_samples_min };
        let mut stream =
            rng::substream(settings.seed, (lane << 20) | ci as u64, StreamRole::AnalyticInner, 0);
        for _ in 0..n_samples {
            links.clear();
            links.push((main_amp, co));
            push_config_links(model, &slots, counts, &mut stream, &mut links);
            let g = gamma_approx(&moments, &links)?;
            let s = gamma_t / g.beta;
            s_min = s_min.min(s);
            s_max = s_max.max(s);
            m_max = m_max.max(g.k0_ceil.saturating_sub(1) as usize);
        }
    }
    if configs.is_empty() || !s_min.is_finite() {
        // nothing to evaluate; all mass missing
        return Ok(Bracket { lower: 0.0, upper: 1.0, point: 0.5, std_err: 0.5 });
    }
    if m_max > 220 {
        return Err(NumericError::NonConvergent("coverage series order beyond 220"));
    }
    let mut tables = WeightedDeltaTables::build(&field, s_min / 4.0, s_max * 4.0, m_max);
    if tables.all_zero {
        // no interference anywhere: covered with probability one
        return Ok(Bracket::certain(1.0));
    }

    // pass 2: evaluate configurations with per-config doubling
    let mut lower = 0.0;
    let mut upper = 0.0;
    let mut point = 0.0;
    let mut var = 0.0;
    let mut ln_d = alloc::vec![0.0; m_max + 1];
    for (ci, (counts, weight)) in configs.iter().enumerate() {
        let total_n: u32 = counts.iter().sum();
        let mut stream =
            rng::substream(settings.seed, (lane << 20) | ci as u64, StreamRole::AnalyticInner, 0);
        let mut acc_lo = MeanVar::new();
        let mut acc_hi = MeanVar::new();
        let mut acc_pt = MeanVar::new();
        let mut target = if total_n == 0 { 1 } else { settings.inner_samples_min };
        loop {
            while (acc_pt.count() as usize) < target {
                links.clear();
                links.push((main_amp, co));
                push_config_links(model, &slots, counts, &mut stream, &mut links);
                let g = gamma_approx(&moments, &links)?;
                let s = gamma_t / g.beta;
                let need = g.k0_ceil.saturating_sub(1) as usize;
                if need > m_max {
                    m_max = need;
                    if m_max > 220 {
                        return Err(NumericError::NonConvergent("coverage series order beyond 220"));
                    }
                    tables.extend_orders(&field, m_max);
                    ln_d.resize(m_max + 1, 0.0);
                }
                let exponent0 = mathx::exp(tables.ln_coeff(&field, 0, s));
                for n in 1..=need.max(1) {
                    ln_d[n - 1] = tables.ln_coeff(&field, n, s);
                }
                let terms = coverage_terms(exponent0, &ln_d, need);
                let sum_floor: f64 = terms[..(g.k0_floor as usize).min(terms.len())].iter().sum();
                let sum_ceil: f64 = terms.iter().sum();
                let frac = g.zeta - g.k0_floor as f64;
                acc_lo.add(sum_floor.clamp(0.0, 1.0));
                acc_hi.add(sum_ceil.clamp(0.0, 1.0));
                acc_pt.add(((1.0 - frac) * sum_floor + frac * sum_ceil).clamp(0.0, 1.0));
            }
            // contribution stabilized to ~1e-3, or the cap reached
            if total_n == 0
                || acc_pt.std_err() < 1e-3
                || target >= settings.inner_samples_max
            {
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
    // configurations below the weight floor can take any value in [0,1]
    upper += missing;
    point += 0.5 * missing;
    let std_err = mathx::sqrt(var) + 0.5 * missing;
    Ok(Bracket {
        lower: lower.clamp(0.0, 1.0),
        upper: upper.clamp(0.0, 1.0),
        point: point.clamp(0.0, 1.0),
        std_err,
    })
}

fn dfs_configs(
    slots: &[Slot],
    idx: usize,
    weight: f64,
    floor: f64,
    counts: &mut Vec<u32>,
    out: &mut Vec<(Vec<u32>, f64)>,
    missing: &mut f64,
) {
    if weight < floor {
        // pmf factors are <= 1, so every completion of this prefix stays
        // below the floor; its total mass is at most `weight`
        *missing += weight;
        return;
    }
    if idx == slots.len() {
        out.push((counts.clone(), weight));
        return;
    }
    let mut kept = 0.0;
    for n in 0..=slots[idx].n_max {
        let w = poisson_pmf(slots[idx].mean, n);
        counts[idx] = n;
        dfs_configs(slots, idx + 1, weight * w, floor, counts, out, missing);
        kept += w;
    }
    counts[idx] = 0;
    // truncated Poisson tail of this sum under the current prefix
    *missing += weight * (1.0 - kept).max(0.0);
}

fn push_config_links<R: Rng + ?Sized>(
    model: &NetworkModel,
    slots: &[Slot],
    counts: &[u32],
    stream: &mut R,
    links: &mut Vec<(f64, LinkClass)>,
) {
    for (slot, &n) in slots.iter().zip(counts.iter()) {
        let sqrt_power = mathx::sqrt(model.tiers[slot.tier].tx_power);
        let alpha = model.channel.alpha(slot.class);
        for _ in 0..n {
            let x = slot.sampler.draw(stream);
            links.push((sqrt_power * mathx::powf(x, -0.5 * alpha), slot.class));
        }
    }
}

/// Overall coverage probability: the conditional bracket integrated against
/// the main-link law over all (tier, class) branches.
pub fn coverage_analytic(
    model: &NetworkModel,
    eta: &EtaMatrix,
    gamma_t: f64,
    settings: &EvalSettings,
) -> Result<Bracket, NumericError> {
    if gamma_t <= 0.0 {
        return Ok(Bracket::certain(1.0));
    }
    let profile = LosProfile::new(model);
    let laws = association_law(model)?;
    let (nodes, weights) = gauss_legendre(settings.outer_nodes);
    let mut lower = 0.0;
    let mut upper = 0.0;
    let mut point = 0.0;
    let mut var = 0.0;
    for (li, law) in laws.iter().enumerate() {
        if law.assoc_prob < 1e-9 {
            continue;
        }
        for (ni, (&xu, &wu)) in nodes.iter().zip(weights.iter()).enumerate() {
            let u = 0.5 * (xu + 1.0);
            let w = 0.5 * wu * law.assoc_prob;
            let r = law.quantile(model, &profile, u)?;
            let lane = (li * settings.outer_nodes + ni) as u64;
            let b =
                conditional_coverage(model, eta, r, law.tier, law.class, gamma_t, settings, lane)?;
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

/// Receive-ASE result.
#[derive(Debug, Clone, Copy)]
pub struct RxAse {
    pub per_user_se: Bracket,
    pub rx_ase: Bracket,
}

/// Layer-cake spectral efficiency
/// `E[log2(1+gamma) 1{gamma >= g}] = log2(1+g) p(g) + int_g^inf p(t)/((1+t) ln 2) dt`
/// on a log-spaced knot grid; avoids differentiating the coverage curve.
pub fn layer_cake_se(
    mut p_cov: impl FnMut(f64) -> Result<Bracket, NumericError>,
    gamma_t: f64,
    knot_step: f64,
    cutoff: f64,
    max_knots: usize,
) -> Result<Bracket, NumericError> {
    let ln2 = core::f64::consts::LN_2;
    let head = p_cov(gamma_t)?;
    let base = mathx::log2(1.0 + gamma_t.max(0.0));
    // integrate in phi = ln(1+t): d phi = dt/(1+t)
    let mut phi = mathx::ln_1p(gamma_t.max(0.0));
    let mut prev = head;
    let mut lower = base * head.lower;
    let mut upper = base * head.upper;
    let mut point = base * head.point;
    let mut var = (base * head.std_err) * (base * head.std_err);
    for _ in 0..max_knots {
        let phi_next = phi + knot_step;
        let t_next = mathx::expm1(phi_next);
        let cur = p_cov(t_next)?;
        let w = 0.5 * knot_step / ln2;
        lower += w * (prev.lower + cur.lower);
        upper += w * (prev.upper + cur.upper);
        point += w * (prev.point + cur.point);
        var += (w * (prev.std_err + cur.std_err)) * (w * (prev.std_err + cur.std_err));
        phi = phi_next;
        prev = cur;
        if cur.point < cutoff {
            break;
        }
    }
    // residual beyond the last knot: the integrand decays with the coverage
    // curve itself, so a few knot widths of the final value bound it
    let tail_slack = prev.upper * 4.0 * knot_step / ln2;
    upper += tail_slack;
    point += 0.5 * tail_slack;
    var += (0.5 * tail_slack) * (0.5 * tail_slack);
    Ok(Bracket { lower, upper, point, std_err: mathx::sqrt(var) })
}

/// Per-user SE and Rx ASE from the coverage pipeline.
pub fn rx_ase_analytic(
    model: &NetworkModel,
    eta: &EtaMatrix,
    gamma_t: f64,
    settings: &EvalSettings,
) -> Result<RxAse, NumericError> {
    let se = layer_cake_se(
        |t| coverage_analytic(model, eta, t, settings),
        gamma_t,
        0.5,
        1e-3,
        40,
    )?;
    let lam_u = model.user_density;
    let rx = Bracket {
        lower: lam_u * se.lower,
        upper: lam_u * se.upper,
        point: lam_u * se.point,
        std_err: lam_u * se.std_err,
    };
    Ok(RxAse { per_user_se: se, rx_ase: rx })
}
