//! Special functions and generic numerical kernels: quadrature,
//! root-finding, truncated Poisson sums, interpolation and compensated
//! accumulation. Everything here is a total or `Result`-returning pure
//! function; tolerances are carried explicitly by [`QuadSpec`] and
//! [`TruncationBudget`].

pub mod interp;
pub mod poisson;
pub mod quad;
pub mod roots;
pub mod special;
pub mod sum;

pub use interp::PchipInterp;
pub use poisson::{poisson_pmf, poisson_truncation};
pub use quad::{gauss_legendre, integrate_1d, Integral};
pub use roots::find_root_monotone;
pub use special::{
    erf, gamma_fn, hyp2f1, ln_gamma, lower_incomplete_gamma, regularized_upper_gamma,
};
pub use sum::{Accumulator, MeanVar};

use core::fmt;

/// Controls for one-dimensional adaptive quadrature.
#[derive(Debug, Clone, Copy)]
pub struct QuadSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
    pub tail_policy: TailPolicy,
}

/// How an infinite upper integration limit is handled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TailPolicy {
    /// Map `[lo, inf)` onto `(0, 1]` with `t = lo + u/(1-u)`.
    Transform,
    /// Extend the finite endpoint by doubling until the integrand tail is
    /// negligible. Only appropriate for super-exponentially decaying tails.
    TruncateAtNegligible,
}

impl Default for QuadSpec {
    fn default() -> Self {
        QuadSpec {
            abs_tol: 1e-9,
            rel_tol: 1e-7,
            max_subdivisions: 256,
            tail_policy: TailPolicy::Transform,
        }
    }
}

impl QuadSpec {
    pub fn validate(&self) -> Result<(), NumericError> {
        if !(self.abs_tol > 0.0) || !(self.rel_tol > 0.0) || self.max_subdivisions < 1 {
            return Err(NumericError::InvalidParameter(
                "quadrature tolerances must be positive and max_subdivisions >= 1",
            ));
        }
        Ok(())
    }
}

/// Budget for truncating the infinite Poisson sums of the coverage series.
#[derive(Debug, Clone, Copy)]
pub struct TruncationBudget {
    /// Total probability mass that may be dropped across a family of sums.
    pub tail_mass: f64,
    /// Hard cap on the number of terms kept in any one sum.
    pub max_terms_per_sum: usize,
}

impl Default for TruncationBudget {
    fn default() -> Self {
        TruncationBudget {
            tail_mass: 1e-4,
            max_terms_per_sum: 64,
        }
    }
}

impl TruncationBudget {
    pub fn validate(&self) -> Result<(), NumericError> {
        if !(self.tail_mass > 0.0 && self.tail_mass < 1.0) {
            return Err(NumericError::InvalidParameter(
                "tail_mass must lie strictly between 0 and 1",
            ));
        }
        Ok(())
    }
}

/// Errors surfaced by the numerical kernels.
#[derive(Debug, Clone, PartialEq)]
pub enum NumericError {
    /// A parameter is outside the stated domain.
    InvalidParameter(&'static str),
    /// Adaptive subdivision exhausted its budget; carries the best estimate
    /// and the error bound reached.
    QuadratureBudget { estimate: f64, error: f64 },
    /// The bracket handed to the root finder does not straddle a sign change.
    NoSignChange { f_lo: f64, f_hi: f64 },
    /// A series or recursion failed to converge.
    NonConvergent(&'static str),
    /// Poisson truncation hit `max_terms_per_sum`; carries the mass reached.
    TruncationBudget { achieved_mass: f64 },
    /// The Gamma moment-match degenerated (non-positive variance).
    DegenerateApproximation,
}

impl fmt::Display for NumericError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NumericError::InvalidParameter(s) => write!(f, "invalid parameter: {s}"),
            NumericError::QuadratureBudget { estimate, error } => write!(
                f,
                "quadrature subdivision budget exhausted (estimate {estimate:e}, error bound {error:e})"
            ),
            NumericError::NoSignChange { f_lo, f_hi } => {
                write!(f, "no sign change over bracket: f(lo)={f_lo:e}, f(hi)={f_hi:e}")
            }
            NumericError::NonConvergent(s) => write!(f, "non-convergent: {s}"),
            NumericError::TruncationBudget { achieved_mass } => {
                write!(f, "truncation budget exceeded (mass reached {achieved_mass})")
            }
            NumericError::DegenerateApproximation => {
                write!(f, "gamma moment match degenerated (non-positive variance)")
            }
        }
    }
}

impl core::error::Error for NumericError {}
