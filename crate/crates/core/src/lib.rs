//! Weighted Steklov eigenvalues on the unit disk and their Weyl asymptotics.
//!
//! A rough simply connected domain is replaced by the disk carrying the
//! boundary weight `β = |φ'|` of a uniformizing map `φ`. The weighted problem
//! `Δu = 0`, `∂_ν u = σ β u` is discretized with trigonometric modes
//! ([`solver`]), its counting function is compared against `σ ∫β / π`
//! ([`asymptotics`]), and the `L log L` regularity of `β` is probed
//! numerically ([`orlicz`]).

pub mod asymptotics;
pub mod error;
pub mod fourier;
pub mod linalg;
pub mod mobius;
pub mod orlicz;
pub mod quadrature;
pub mod solver;
pub mod weights;

pub use asymptotics::{
    counting, default_window, n_alpha_estimate, signed_weyl_fits, stability_report,
    trusted_signed_spectrum, trusted_spectrum, weyl_slope, CountingFunction, StabilityReport,
    WeylFit,
};
pub use error::{Error, Result};
pub use fourier::{fourier_coeffs, perimeter, signed_masses, FourierCoefficients};
pub use mobius::DiskAutomorphism;
pub use orlicz::{
    expl_norm, holder_check, llog_membership_scan, llog_modular, llog_norm, MembershipScan,
    OrliczNorm, SampledFunction, Verdict,
};
pub use solver::{
    assemble, deflate_constants, solve, solve_indefinite, solve_reduced, GalerkinSystem,
    SignedSpectralResult, SpectralResult,
};
pub use weights::{eval_weight, mobius_pushforward, Singularity, TabulatedWeight, WeightDescriptor};
