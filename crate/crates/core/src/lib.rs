//! Product-code FEC toolkit.
//!
//! The library builds square product codes from shortened binary BCH
//! components, decodes them iteratively with bounded-distance component
//! decoding (plain, genie-aided, and soft-aided with scaled reliabilities),
//! predicts waterfall thresholds by scalar density evolution, searches the
//! component-parameter space for the best code at a target overhead, and
//! converts post-FEC quality targets into optical reach over a GN-model
//! fiber link.
//!
//! Modules mirror the processing chain:
//!
//! * [`gf`] / [`bch`] — finite-field tables and the BCH component code
//!   (construction, systematic encoding, bounded-distance decoding).
//! * [`product`] — bit matrices, product-code encoding, and the three
//!   iterative decoders.
//! * [`de`] / [`transfer`] — density evolution, decoding thresholds,
//!   reliability-weight optimization, and miscorrection transfer models.
//! * [`optimizer`] — overhead-targeted parameter search and error-floor
//!   estimates.
//! * [`sim`] / [`rng`] — Monte Carlo BER measurement over BI-AWGN with a
//!   counter-based deterministic RNG.
//! * [`reach`] — incoherent GN-model link budget and reach conversion.
//! * [`cli`] — config resolution and subcommand runners behind the
//!   `pcfec` binary.

pub mod bch;
pub mod cli;
pub mod de;
pub mod gf;
pub mod optimizer;
pub mod product;
pub mod reach;
pub mod rng;
pub mod sim;
pub mod transfer;

use std::fmt;

/// Crate-wide error type.
#[derive(Debug)]
pub enum Error {
    /// Parameters or inputs violate a documented precondition.
    InvalidInput(String),
    /// An iterative numerical procedure failed to converge or bracket.
    NonConvergence(String),
    /// Underlying I/O failure (config files, output directories).
    Io(std::io::Error),
    /// JSON (de)serialization failure.
    Json(serde_json::Error),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidInput(msg) => write!(f, "invalid input: {msg}"),
            Error::NonConvergence(msg) => write!(f, "no convergence: {msg}"),
            Error::Io(e) => write!(f, "i/o error: {e}"),
            Error::Json(e) => write!(f, "json error: {e}"),
        }
    }
}

impl std::error::Error for Error {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            Error::Io(e) => Some(e),
            Error::Json(e) => Some(e),
            _ => None,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e)
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e)
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}

pub(crate) fn no_convergence(msg: impl Into<String>) -> Error {
    Error::NonConvergence(msg.into())
}
