use thiserror::Error;

use crate::atom::Configuration;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("singular denominator (modulus {0:e})")]
    SingularDenominator(f64),

    #[error("degenerate regime: {0}")]
    DegenerateRegime(&'static str),

    #[error("exceptional point: Z_II and Z_III coincide (|Z_II - Z_III| = {0:e})")]
    ExceptionalPoint(f64),

    #[error("regime violation: {0}")]
    RegimeViolation(String),

    #[error("grid error: {0}")]
    Grid(String),

    #[error("no peak-count transition found for coupling Rabi frequency in [{lo}, {hi}]")]
    Bracket { lo: f64, hi: f64 },

    #[error("operation requires {expected:?} but drive is configured as {found:?}")]
    WrongConfiguration {
        expected: Configuration,
        found: Configuration,
    },

    #[error("{0}")]
    Unsupported(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;
