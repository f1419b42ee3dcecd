//! Gamma approximation of the combined (coherently added) signal power for
//! a fixed set of cooperating links.
//!
//! The combined amplitude is `sum_i a_i sqrt(g_i)` with per-link amplitude
//! factors `a_i = sqrt(sigma_j) x_i^{-alpha/2}`; its first, second and
//! fourth moments give the moment-matched Gamma shape/scale. The variance
//! bookkeeping uses `Omega_1 = xi - (mu^2 + Omega)^2`, which is forced by
//! the single-link exactness check (`zeta = m`, `beta = sigma r^-alpha / m`).


use crate::channel::{nakagami_amp_moment, nakagami_chi};
use crate::mathx;
use crate::model::{ChannelParams, LinkClass};
use crate::numerics::NumericError;

/// Amplitude moments `tau_{c,w} = E[g^{w/2}]` for `w = 0..4` and the
/// variance factor `chi_c`, per link class.
#[derive(Debug, Clone, Copy)]
pub struct AmpMoments {
    pub tau: [[f64; 5]; 2],
    pub chi: [f64; 2],
}

impl AmpMoments {
    pub fn new(channel: &ChannelParams) -> Self {
        let mut tau = [[0.0; 5]; 2];
        let mut chi = [0.0; 2];
        for c in LinkClass::BOTH {
            for w in 0..5 {
                tau[c.index()][w] = nakagami_amp_moment(channel, c, w as u32);
            }
            chi[c.index()] = nakagami_chi(channel, c);
        }
        AmpMoments { tau, chi }
    }
}

/// Moment-matched Gamma parameters (with intermediates) of the combined
/// signal power.
#[derive(Debug, Clone, Copy)]
pub struct GammaApprox {
    /// Mean combined amplitude, (watt)^(1/2).
    pub mu: f64,
    /// Amplitude variance, watt.
    pub omega: f64,
    /// Fourth amplitude moment, watt^2.
    pub xi: f64,
    /// Power variance, watt^2.
    pub omega1: f64,
    /// Shape.
    pub zeta: f64,
    /// Scale, watt.
    pub beta: f64,
    pub k0_floor: u32,
    pub k0_ceil: u32,
}

/// Compute the Gamma approximation for links given as `(amplitude, class)`
/// pairs, amplitude `a_i = sqrt(sigma_j) x_i^{-alpha^{(c)}/2}`.
pub fn gamma_approx(moments: &AmpMoments, links: &[(f64, LinkClass)]) -> Result<GammaApprox, NumericError> {
    if links.is_empty() {
        return Err(NumericError::InvalidParameter("gamma_approx needs at least one link"));
    }
    // normalize by the largest amplitude to keep the fourth-moment algebra
    // well conditioned
    let scale = links.iter().map(|l| l.0).fold(0.0f64, f64::max);
    if !(scale > 0.0) {
        return Err(NumericError::InvalidParameter("link amplitudes must be positive"));
    }
    let inv = 1.0 / scale;
    let mut mu = 0.0;
    let mut omega = 0.0;
    for &(a, c) in links {
        let an = a * inv;
        mu += moments.tau[c.index()][1] * an;
        omega += moments.chi[c.index()] * an * an;
    }
    let xi = fourth_moment(moments, links, inv);
    let mean = mu * mu + omega;
    let omega1 = xi - mean * mean;
    if !(omega1 > 0.0) {
        return Err(NumericError::DegenerateApproximation);
    }
    let zeta = mean * mean / omega1;
    let beta = scale * scale * omega1 / mean;
    // snap shapes that are integer up to rounding noise, so exact cases
    // (e.g. a single Nakagami link) produce a degenerate bracket
    let rounded = libm::round(zeta);
    let (k0_floor, k0_ceil) = if rounded >= 1.0 && (zeta - rounded).abs() < 1e-9 * zeta.max(1.0) {
        (rounded as u32, rounded as u32)
    } else {
        (mathx::floor(zeta) as u32, mathx::ceil(zeta) as u32)
    };
    Ok(GammaApprox {
        mu: mu * scale,
        omega: omega * scale * scale,
        xi: xi * scale * scale * scale * scale,
        omega1: omega1 * scale * scale * scale * scale,
        zeta,
        beta,
        k0_floor,
        k0_ceil,
    })
}

/// `E[(sum_i a_i sqrt(g_i))^4]` by degree-4 polynomial convolution over the
/// per-link moment generating coefficients.
fn fourth_moment(moments: &AmpMoments, links: &[(f64, LinkClass)], inv: f64) -> f64 {
    const FACT: [f64; 5] = [1.0, 1.0, 2.0, 6.0, 24.0];
    let mut coeff = [0.0f64; 5];
    coeff[0] = 1.0;
    for &(a, c) in links {
        let an = a * inv;
        let tau = &moments.tau[c.index()];
        let mut pw = [1.0f64; 5];
        for w in 1..5 {
            pw[w] = pw[w - 1] * an;
        }
        let mut next = [0.0f64; 5];
        for t in 0..5 {
            if coeff[t] == 0.0 {
                continue;
            }
            for w in 0..5 - t {
                next[t + w] += coeff[t] * tau[w] * pw[w] / FACT[w];
            }
        }
        coeff = next;
    }
    24.0 * coeff[4]
}

/// Exhaustive multinomial expansion of the fourth moment; the independent
/// oracle for small instances.
#[doc(hidden)]
pub fn fourth_moment_bruteforce(moments: &AmpMoments, links: &[(f64, LinkClass)]) -> f64 {
    fn rec(moments: &AmpMoments, links: &[(f64, LinkClass)], idx: usize, remaining: u32, coeff: f64, acc: f64) -> f64 {
        const FACT: [f64; 5] = [1.0, 1.0, 2.0, 6.0, 24.0];
        if idx == links.len() {
            return if remaining == 0 { coeff * acc } else { 0.0 };
        }
        let mut total = 0.0;
        for w in 0..=remaining {
            let (a, c) = links[idx];
            let term = moments.tau[c.index()][w as usize] * mathx::powf(a, w as f64)
                / FACT[w as usize];
            total += rec(moments, links, idx + 1, remaining - w, coeff, acc * term);
        }
        total
    }
    24.0 * rec(moments, links, 0, 4, 1.0, 1.0)
}
