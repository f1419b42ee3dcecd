//! Pathloss, average received link power, Nakagami-m fading draws and the
//! closed-form fading moments consumed by the analytic pipeline.
//!
//! Coherent joint transmission adds amplitudes: each cooperating link
//! contributes `sqrt(sigma g) x^{-alpha/2}` to a real amplitude sum, which
//! reproduces the conjugate-precoded received signal without materializing
//! complex phases. Interferers add powers.

use crate::mathx;
use crate::model::{ChannelParams, LinkClass, NetworkModel};
use crate::numerics::NumericError;
use crate::rng;
use rand::Rng;

/// Fading draw for one link: power `g` with `E[g] = 1` and its amplitude.
#[derive(Debug, Clone, Copy)]
pub struct LinkGain {
    pub fading_power: f64,
    pub fading_amplitude: f64,
}

/// Average received link power `sigma_j x^{-alpha^{(c)}}`.
pub fn arlp(model: &NetworkModel, j: usize, x: f64, c: LinkClass) -> Result<f64, NumericError> {
    if x < model.height_diff(j) {
        return Err(NumericError::InvalidParameter(
            "link distance below the tier antenna-height difference",
        ));
    }
    Ok(model.tiers[j].tx_power * mathx::powf(x, -model.channel.alpha(c)))
}

/// Draw a Nakagami-m fading gain for link class `c`:
/// `g ~ Gamma(m^{(c)}, 1/m^{(c)})`.
pub fn draw_fading<R: Rng + ?Sized>(rng_stream: &mut R, channel: &ChannelParams, c: LinkClass) -> LinkGain {
    let g = rng::sample_fading_power(rng_stream, channel.m(c));
    LinkGain { fading_power: g, fading_amplitude: mathx::sqrt(g) }
}

/// Amplitude moment `tau_{c,w} = E[g^{w/2}] = Gamma(m + w/2) / (Gamma(m) m^{w/2})`.
pub fn nakagami_amp_moment(channel: &ChannelParams, c: LinkClass, w: u32) -> f64 {
    let m = channel.m(c) as f64;
    mathx::exp(mathx::lgamma(m + 0.5 * w as f64) - mathx::lgamma(m)) / mathx::powf(m, 0.5 * w as f64)
}

/// Amplitude-variance factor `chi_c = 1 - tau_{c,1}^2`.
pub fn nakagami_chi(channel: &ChannelParams, c: LinkClass) -> f64 {
    let t1 = nakagami_amp_moment(channel, c, 1);
    1.0 - t1 * t1
}

/// Exponentially tilted power moment `E[g^w e^{-t g}]` for
/// `g ~ Gamma(m, 1/m)`: `Gamma(m+w)/(Gamma(m) m^w) (1 + t/m)^{-(m+w)}`.
pub fn exp_tilted_moment(channel: &ChannelParams, c: LinkClass, w: u32, t: f64) -> Result<f64, NumericError> {
    if !(t >= 0.0) {
        return Err(NumericError::InvalidParameter("tilt must be non-negative"));
    }
    let m = channel.m(c) as f64;
    let wf = w as f64;
    let factor = mathx::exp(mathx::lgamma(m + wf) - mathx::lgamma(m)) / mathx::powf(m, wf);
    Ok(factor * mathx::powf(1.0 + t / m, -(m + wf)))
}
