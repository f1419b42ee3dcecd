//! Core library for evaluating relative-received-link-power (RRLP) CoMP
//! joint transmission in K-tier ultra-dense cellular networks.
//!
//! Two independent evaluation paths are provided and cross-validate each
//! other:
//!
//! * a Monte Carlo engine ([`sim`]) that samples base-station point
//!   processes, forms cooperation sets, and measures coverage, area
//!   spectral efficiency and network energy efficiency;
//! * a semi-analytic pipeline ([`analytic`]) built on association
//!   probabilities, a Gamma approximation of the combined signal power and
//!   the Laplace transform of the interference field.
//!
//! The crate is `no_std` (with `alloc`); all IO, configuration parsing and
//! parallel orchestration live in the companion CLI crate. Every operation
//! is a pure function of its inputs, so concurrent use needs no locking.

#![no_std]
#![deny(unsafe_code)]

extern crate alloc;

#[cfg(any(test, feature = "std"))]
extern crate std;

pub mod analytic;
pub mod association;
pub mod channel;
pub mod geometry;
pub(crate) mod mathx;
pub mod model;
pub mod numerics;
pub mod rng;
pub mod sim;

pub use model::{
    BlockageBaseHeight, BlockageParams, ChannelParams, CompPolicy, CompScheme, Deployment,
    EtaMatrix, LinkClass, ModelError, NetworkModel, PaTerm, PowerModel, TierParams,
};
pub use numerics::{NumericError, QuadSpec, TruncationBudget};
