//! Exact construction and verification of spectrum-isolating Hecke
//! multipliers for toy function-field spectra.
//!
//! A spectrum is given as Satake parameters at finitely many places: a target
//! representation π, finitely many cuspidal representations, and finitely many
//! Eisenstein families. [`isolator::build_mu`] produces a Weyl-invariant
//! Laurent polynomial μ that is 1 at π, vanishes on every Eisenstein family,
//! and vanishes at every cuspidal not nearly equivalent to π;
//! [`spectrum::verify`] checks those claims by exact substitution.

pub mod config;
pub mod demo;
pub mod isolator;
pub mod laurent;
pub mod satake;
pub mod spectrum;
pub mod torus;

use std::path::PathBuf;

use thiserror::Error;

use isolator::IsolatorError;
use spectrum::ConfigError;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}: {message}", path.display())]
    Parse { path: PathBuf, message: String },
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Isolator(#[from] IsolatorError),
}

impl Error {
    /// 2 for obstructions to the construction, 3 for bad input.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io { .. } | Error::Parse { .. } | Error::Config(_) => 3,
            Error::Isolator(IsolatorError::Config(_)) => 3,
            Error::Isolator(_) => 2,
        }
    }
}
