//! Monte Carlo laboratory for supercritical bond percolation on random
//! recursive trees and rooted regular trees.
//!
//! The crate simulates the growth of random recursive trees, Bernoulli bond
//! percolation (equivalently, Yule processes with rare neutral mutations),
//! the Meir–Moon root-isolation algorithm and its random-walk coupling, and
//! the limit objects these dynamics converge to: Luria–Delbrück laws, the
//! Poisson measure of rescaled cluster sizes, and the spectrally positive
//! Lévy process governing regular-tree fluctuations.
//!
//! Everything is driven by explicit counter-based random [`rng::Stream`]s,
//! so replica sets are reproducible byte-for-byte regardless of worker
//! count. The [`experiments`] module orchestrates replicas, statistical
//! comparisons, file export, and the named verification checks.

pub mod experiments;
pub mod isolation;
pub mod limits;
pub mod percolation;
pub mod regular;
pub mod rng;
pub mod stats;
pub mod tree;
pub mod yule;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A parameter is outside the domain an operation accepts.
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    /// Malformed serialized data (binary tree dumps, CSV, config files).
    #[error("format error: {0}")]
    Format(String),
    /// Configuration problems: unknown experiment, missing or unknown keys.
    #[error("configuration error: {0}")]
    Config(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
