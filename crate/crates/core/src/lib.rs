//! Peaks-over-threshold tail modeling.
//!
//! Everything needed to run a POT analysis end to end, as pure functions over
//! in-memory samples:
//!
//! - [`dist`] — generalized Pareto and generalized extreme value kernels
//!   (cdf/pdf/quantile/moments) with seeded inversion samplers.
//! - [`doa`] — numeric domain-of-attraction classification (Fréchet / Gumbel /
//!   Weibull) for user-supplied distribution specs, plus Karamata-style
//!   quantile representations for building test distributions with a known
//!   extreme value index.
//! - [`threshold`] — exceedance extraction and the three standard
//!   threshold-selection diagnostics (mean residual life, parameter
//!   stability, L-moment curve), plus a mechanized threshold suggestion.
//! - [`fit`] — GPD fitting by maximum likelihood (PWM-initialized
//!   Nelder–Mead) and probability-weighted moments, the Hill estimator, and
//!   AIC/deviance model ranking.
//! - [`tail`] — tail probabilities, VaR, expected shortfall and return
//!   levels from a fitted tail model.
//! - [`diagnostics`] — plot-ready series for QQ/PP/return-level/density
//!   model checks.
//!
//! The crate is `no_std` (with `alloc`); all transcendental math goes through
//! [`libm`] so results are bit-reproducible across platforms. Nothing here
//! does IO — file formats and the CLI live in the companion `tailrisk-cli`
//! crate.

#![no_std]
// `!(x > 0.0)`-style guards are deliberate: they reject NaN along with the
// wrong sign.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

#[cfg(test)]
extern crate std;

use alloc::string::String;
use core::fmt;

pub mod diagnostics;
pub mod dist;
pub mod doa;
pub mod fit;
pub mod math;
pub mod rng;
pub mod tail;
pub mod threshold;

pub use dist::{GevParams, GpdParams};
pub use fit::GpdFit;
pub use tail::TailModel;
pub use threshold::ExcessSample;

/// Errors shared by every module in the crate.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A distribution parameter violates its constraint (e.g. `beta <= 0`).
    InvalidParameter(String),
    /// An argument is outside the mathematical domain of the operation.
    Domain(String),
    /// A tail integral does not converge (infinite mean beyond the point).
    DivergentIntegral(String),
    /// A domain-of-attraction check was called on the wrong endpoint branch.
    WrongBranch(String),
    /// A criterion needs a spec capability (derivative, ...) that is absent.
    MissingCapability(&'static str),
    /// Not enough observations for the estimator.
    InsufficientData { required: usize, got: usize },
    /// The sample is degenerate for this estimator (e.g. zero L-scale).
    DegenerateSample(String),
    /// No observation exceeds the threshold.
    NoExceedances,
    /// The requested level lies at or below the model threshold.
    BelowThreshold(String),
    /// A Karamata-style representation is self-inconsistent.
    InvalidRepresentation(String),
    /// Optimizer failed to converge; carries the best point found.
    NonConvergence(alloc::boxed::Box<GpdFit>),
    /// A caller-supplied input violates an operation's contract.
    InvalidInput(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParameter(m) => write!(f, "invalid parameter: {m}"),
            Error::Domain(m) => write!(f, "domain error: {m}"),
            Error::DivergentIntegral(m) => write!(f, "divergent integral: {m}"),
            Error::WrongBranch(m) => write!(f, "wrong branch: {m}"),
            Error::MissingCapability(m) => write!(f, "spec is missing capability: {m}"),
            Error::InsufficientData { required, got } => {
                write!(f, "insufficient data: need {required}, got {got}")
            }
            Error::DegenerateSample(m) => write!(f, "degenerate sample: {m}"),
            Error::NoExceedances => write!(f, "no observations exceed the threshold"),
            Error::BelowThreshold(m) => write!(f, "level at or below threshold: {m}"),
            Error::InvalidRepresentation(m) => write!(f, "invalid representation: {m}"),
            Error::NonConvergence(fit) => {
                write!(
                    f,
                    "fit did not converge (best xi={}, beta={})",
                    fit.params.xi, fit.params.beta
                )
            }
            Error::InvalidInput(m) => write!(f, "invalid input: {m}"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
