//! Special functions: error function, (incomplete) gamma functions and the
//! Gauss hypergeometric function on the half-line `z <= 0`.

use super::NumericError;
use crate::mathx;

/// Error function, `erf(z) = (2/sqrt(pi)) * int_0^z e^{-t^2} dt`.
#[inline]
pub fn erf(x: f64) -> f64 {
    mathx::erf(x)
}

/// Gamma function for positive real arguments.
pub fn gamma_fn(x: f64) -> Result<f64, NumericError> {
    if !(x > 0.0) {
        return Err(NumericError::InvalidParameter("gamma_fn requires x > 0"));
    }
    Ok(mathx::tgamma(x))
}

/// Natural log of the gamma function for positive arguments.
pub fn ln_gamma(x: f64) -> Result<f64, NumericError> {
    if !(x > 0.0) {
        return Err(NumericError::InvalidParameter("ln_gamma requires x > 0"));
    }
    Ok(mathx::lgamma(x))
}

/// Lower incomplete gamma function `gamma(a, x) = int_0^x t^{a-1} e^{-t} dt`.
pub fn lower_incomplete_gamma(a: f64, x: f64) -> Result<f64, NumericError> {
    if !(a > 0.0) || !(x >= 0.0) {
        return Err(NumericError::InvalidParameter(
            "lower_incomplete_gamma requires a > 0, x >= 0",
        ));
    }
    let p = regularized_lower(a, x)?;
    Ok(p * mathx::tgamma(a))
}

/// Regularized upper incomplete gamma `Q(a, x) = Gamma(a, x) / Gamma(a)`.
pub fn regularized_upper_gamma(a: f64, x: f64) -> Result<f64, NumericError> {
    if !(a > 0.0) || !(x >= 0.0) {
        return Err(NumericError::InvalidParameter(
            "regularized_upper_gamma requires a > 0, x >= 0",
        ));
    }
    Ok(1.0 - regularized_lower(a, x)?)
}

/// Regularized lower incomplete gamma via series (x < a+1) or continued
/// fraction (x >= a+1).
fn regularized_lower(a: f64, x: f64) -> Result<f64, NumericError> {
    if x == 0.0 {
        return Ok(0.0);
    }
    let ln_ga = mathx::lgamma(a);
    let prefix = mathx::exp(a * mathx::ln(x) - x - ln_ga);
    if x < a + 1.0 {
        // series for P(a,x)
        let mut term = 1.0 / a;
        let mut sum = term;
        for n in 1..500 {
            term *= x / (a + n as f64);
            sum += term;
            if term.abs() < sum.abs() * 1e-16 {
                return Ok(prefix * sum);
            }
        }
        Err(NumericError::NonConvergent("incomplete gamma series"))
    } else {
        // Lentz continued fraction for Q(a,x)
        let tiny = 1e-300;
        let mut b = x + 1.0 - a;
        let mut c = 1.0 / tiny;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..500 {
            let an = -(i as f64) * (i as f64 - a);
            b += 2.0;
            d = an * d + b;
            if d.abs() < tiny {
                d = tiny;
            }
            c = b + an / c;
            if c.abs() < tiny {
                c = tiny;
            }
            d = 1.0 / d;
            let del = d * c;
            h *= del;
            if (del - 1.0).abs() < 1e-16 {
                return Ok(1.0 - prefix * h);
            }
        }
        Err(NumericError::NonConvergent("incomplete gamma continued fraction"))
    }
}

/// Gauss hypergeometric function `2F1(a, b; c; z)` for `z <= 0`.
///
/// The argument is mapped into `[0, 1)` with the Pfaff transformation
/// `2F1(a,b;c;z) = (1-z)^{-a} 2F1(a, c-b; c; z/(z-1))` and the series is
/// summed there. Arguments far into the left half-line converge slowly;
/// callers with `z < -1e4` should integrate directly instead.
pub fn hyp2f1(a: f64, b: f64, c: f64, z: f64) -> Result<f64, NumericError> {
    if z > 0.0 {
        return Err(NumericError::InvalidParameter("hyp2f1 implemented for z <= 0 only"));
    }
    if c <= 0.0 && c == mathx::floor(c) {
        return Err(NumericError::InvalidParameter(
            "hyp2f1 undefined for c a non-positive integer",
        ));
    }
    if z == 0.0 {
        return Ok(1.0);
    }
    let w = z / (z - 1.0); // in (0, 1)
    let bp = c - b;
    let mut term = 1.0_f64;
    let mut sum = 1.0_f64;
    let max_terms = 20_000;
    for n in 0..max_terms {
        let nf = n as f64;
        term *= (a + nf) * (bp + nf) / ((c + nf) * (nf + 1.0)) * w;
        sum += term;
        if term.abs() < sum.abs() * 1e-15 && n > 4 {
            return Ok(mathx::powf(1.0 - z, -a) * sum);
        }
    }
    Err(NumericError::NonConvergent("hyp2f1 series (argument too negative?)"))
}
