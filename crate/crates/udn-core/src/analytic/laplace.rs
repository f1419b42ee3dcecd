//! Laplace transform of the interference field and its derivatives.
//!
//! `L_I(s) = exp(-2 pi sum_{j,c} lam_j Delta_{j,c}(s))` with band integrals
//! over the interferer region `(R_j^{(c)}, inf)`. Derivatives follow the
//! Leibniz recursion; the coverage series consumes them in the rescaled,
//! sign-free form `l_m = (-1)^m s^m L^{(m)}(s) / m! >= 0`, which is stable
//! for large orders.

use alloc::vec::Vec;

use crate::channel::exp_tilted_moment;
use crate::geometry::{theta_bound, LosProfile};
use crate::mathx;
use crate::model::{EtaMatrix, LinkClass, NetworkModel};
use crate::numerics::quad::{fixed_gl_semi_infinite, gauss_legendre};
use crate::numerics::NumericError;

/// Interferer geometry for a fixed main link `(k, c_o, r)` under RRLP
/// thresholds: per (tier, class) the band lower bound and intensity.
pub struct InterferenceField<'m> {
    pub model: &'m NetworkModel,
    pub profile: LosProfile,
    /// Interferer-band lower bound per (tier, class), clamped at `h_j`.
    pub lower: Vec<[f64; 2]>,
    gl_nodes: Vec<f64>,
    gl_weights: Vec<f64>,
}

impl<'m> InterferenceField<'m> {
    /// Field for the typical user with main link `(k, co, r)`: tier-j
    /// class-c interferers live beyond `R_j^{(c)} = eta^{-1/alpha_c} theta_j^{(c)}(r)`.
    pub fn for_main_link(
        model: &'m NetworkModel,
        eta: &EtaMatrix,
        k: usize,
        co: LinkClass,
        r: f64,
    ) -> Self {
        let profile = LosProfile::new(model);
        let lower = (0..model.num_tiers())
            .map(|j| {
                let mut b = [0.0; 2];
                for c in LinkClass::BOTH {
                    let theta = theta_bound(model, j, c, k, co, r);
                    let r_hi = theta * mathx::powf(eta.get(j, k), -1.0 / model.channel.alpha(c));
                    b[c.index()] = r_hi.max(profile.heights[j]);
                }
                b
            })
            .collect();
        let (gl_nodes, gl_weights) = gauss_legendre(128);
        InterferenceField { model, profile, lower, gl_nodes, gl_weights }
    }

    /// Field with explicit per-(tier, class) lower bounds.
    pub fn with_bounds(model: &'m NetworkModel, lower: Vec<[f64; 2]>) -> Self {
        let profile = LosProfile::new(model);
        let (gl_nodes, gl_weights) = gauss_legendre(128);
        InterferenceField { model, profile, lower, gl_nodes, gl_weights }
    }

    fn class_active(&self, j: usize, c: LinkClass) -> bool {
        if self.model.tiers[j].density == 0.0 {
            return false;
        }
        if c == LinkClass::Los && !self.model.channel.los_enabled {
            return false;
        }
        true
    }

    /// Sign-folded band integral `(-1)^{n+1} Delta_{j,c}^{(n)}(s) >= 0`
    /// (`Delta^{(0)}` for `n = 0`), by fixed Gauss-Legendre quadrature on a
    /// decay-scaled semi-infinite transform.
    pub fn delta_hat(&self, j: usize, c: LinkClass, n: u32, s: f64) -> f64 {
        if !self.class_active(j, c) {
            return 0.0;
        }
        let sigma = self.model.tiers[j].tx_power;
        let alpha = self.model.channel.alpha(c);
        let m = self.model.channel.m(c);
        let lo = self.lower[j][c.index()];
        if s == 0.0 {
            if n == 0 {
                return 0.0;
            }
            if n == 1 {
                // Campbell value: integral of sigma E[g] z^{1-alpha} p(z)
                return fixed_gl_semi_infinite(
                    |z| sigma * mathx::powf(z, 1.0 - alpha) * self.profile.p_class(j, c, z),
                    lo,
                    lo.max(1.0),
                    &self.gl_nodes,
                    &self.gl_weights,
                );
            }
        }
        // the integrand peaks near s sigma z^-alpha ~ max(1, n)
        let peak = mathx::powf(s.max(0.0) * sigma / (n.max(1) as f64), 1.0 / alpha);
        let scale = lo.max(peak).max(1.0);
        let f = |z: f64| -> f64 {
            let p = self.profile.p_class(j, c, z);
            if p <= 0.0 {
                return 0.0;
            }
            let w = sigma * mathx::powf(z, -alpha);
            let t = s * w;
            if n == 0 {
                let mf = m as f64;
                // 1 - (1 + t/m)^{-m}, stable for small t
                let one_minus = -mathx::expm1(-mf * mathx::ln_1p(t / mf));
                one_minus * z * p
            } else {
                let tilt = exp_tilted_moment(&self.model.channel, c, n, t)
                    .unwrap_or(0.0);
                mathx::powf(w, n as f64) * tilt * z * p
            }
        };
        fixed_gl_semi_infinite(f, lo, scale, &self.gl_nodes, &self.gl_weights).max(0.0)
    }

    /// `2 pi sum_{j,c} lam_j delta_hat_{j,c}^{(n)}(s)`.
    pub fn weighted_delta(&self, n: u32, s: f64) -> f64 {
        let mut total = 0.0;
        for j in 0..self.model.num_tiers() {
            for c in LinkClass::BOTH {
                if self.class_active(j, c) {
                    total += self.model.tiers[j].density * self.delta_hat(j, c, n, s);
                }
            }
        }
        2.0 * core::f64::consts::PI * total
    }

    /// Rescaled series coefficient
    /// `D_n(s) = (s^n/n!) (-1)^{n+1} 2 pi sum_{j,c} lam_j Delta^{(n)}(s)`,
    /// `n >= 1`, computed with a log-space integrand so that deep orders
    /// neither overflow nor underflow.
    pub fn scaled_coefficient(&self, n: u32, s: f64) -> f64 {
        debug_assert!(n >= 1);
        let nf = n as f64;
        let ln_fact = mathx::lgamma(nf + 1.0);
        let mut total = 0.0;
        for j in 0..self.model.num_tiers() {
            for c in LinkClass::BOTH {
                if !self.class_active(j, c) {
                    continue;
                }
                let sigma = self.model.tiers[j].tx_power;
                let alpha = self.model.channel.alpha(c);
                let m = self.model.channel.m(c) as f64;
                let lo = self.lower[j][c.index()];
                let ln_gam = mathx::lgamma(m + nf) - mathx::lgamma(m) - nf * mathx::ln(m);
                let peak = mathx::powf(s.max(0.0) * sigma / nf, 1.0 / alpha);
                let scale = lo.max(peak).max(1.0);
                let f = |z: f64| -> f64 {
                    let p = self.profile.p_class(j, c, z);
                    if p <= 0.0 {
                        return 0.0;
                    }
                    let t = s * sigma * mathx::powf(z, -alpha);
                    if t <= 0.0 {
                        return 0.0;
                    }
                    let ln_term = nf * mathx::ln(t) - ln_fact + ln_gam
                        - (m + nf) * mathx::ln_1p(t / m);
                    mathx::exp(ln_term) * z * p
                };
                total += self.model.tiers[j].density
                    * fixed_gl_semi_infinite(f, lo, scale, &self.gl_nodes, &self.gl_weights)
                        .max(0.0);
            }
        }
        2.0 * core::f64::consts::PI * total
    }

    /// `L_I(s)` itself.
    pub fn laplace(&self, s: f64) -> f64 {
        mathx::exp(-self.weighted_delta(0, s))
    }
}

/// Raw Laplace-transform derivatives `L_I^{(0..m_max)}(s)` via the Leibniz
/// recursion. Signs alternate: `(-1)^m L^{(m)} >= 0`.
///
/// Suited to small orders (tests, Campbell checks); the coverage series
/// uses the rescaled form internally.
pub fn interference_laplace_derivs(
    field: &InterferenceField<'_>,
    s: f64,
    m_max: u32,
) -> Result<Vec<f64>, NumericError> {
    if !(s >= 0.0) {
        return Err(NumericError::InvalidParameter("laplace argument must be >= 0"));
    }
    if m_max > 40 {
        return Err(NumericError::InvalidParameter(
            "raw derivative recursion overflows beyond order 40; use the scaled series",
        ));
    }
    let mut deltas = Vec::with_capacity(m_max as usize + 1);
    for n in 0..=m_max {
        // true-signed Delta^{(n)}: (-1)^{n+1} |Delta| for n >= 1
        let hat = field.weighted_delta(n, s);
        let signed = if n == 0 {
            hat
        } else if n % 2 == 1 {
            hat
        } else {
            -hat
        };
        deltas.push(signed);
    }
    let mut derivs = Vec::with_capacity(m_max as usize + 1);
    derivs.push(mathx::exp(-deltas[0]));
    for m in 1..=m_max as usize {
        let mut acc = 0.0;
        for i in 0..m {
            acc += binom(m - 1, i) * derivs[i] * deltas[m - i];
        }
        derivs.push(-acc);
    }
    Ok(derivs)
}

fn binom(n: usize, k: usize) -> f64 {
    mathx::exp(
        mathx::lgamma(n as f64 + 1.0) - mathx::lgamma(k as f64 + 1.0)
            - mathx::lgamma((n - k) as f64 + 1.0),
    )
}

/// Coverage series terms `l_m = (-1)^m s^m L^{(m)}(s) / m!` for
/// `m = 0..m_max`, from the log of the zeroth exponent and the log-space
/// weighted deltas. All terms are non-negative.
pub(crate) fn coverage_terms(exponent0: f64, ln_d: &[f64], m_max: usize) -> Vec<f64> {
    // ln_d[n-1] = ln(2 pi sum lam delta_hat^{(n)}(s) * s^n / n!) for n >= 1
    let mut l = Vec::with_capacity(m_max + 1);
    l.push(mathx::exp(-exponent0));
    for m in 1..=m_max {
        let mut acc = 0.0;
        for i in 0..m {
            let n = m - i;
            let d = mathx::exp(ln_d[n - 1]);
            acc += n as f64 * d * l[i];
        }
        l.push(acc / m as f64);
    }
    l
}
