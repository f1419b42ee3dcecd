//! Semi-analytic evaluation pipeline: association probabilities and the
//! main-link law, mean CoMP set size, the Gamma approximation of the
//! combined signal power, interference Laplace-transform derivatives, the
//! conditional-coverage series, and the all-NLoS/Rayleigh closed form.

mod assoc;
mod coverage;
mod gamma_approx;
mod laplace;
mod special_case;

pub use assoc::{association_law, mean_comp_size_analytic, MainLinkLaw};
pub use coverage::{
    conditional_coverage, coverage_analytic, layer_cake_se, rx_ase_analytic, Bracket,
    EvalSettings, RxAse,
};
pub use gamma_approx::{gamma_approx, fourth_moment_bruteforce, AmpMoments, GammaApprox};
pub use laplace::{interference_laplace_derivs, InterferenceField};
pub use special_case::{coverage_special_case, SignalCombining};
