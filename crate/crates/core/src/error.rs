use std::path::PathBuf;

use crate::state::BellLabel;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A Bell eigenvalue is negative beyond the physicality tolerance.
    #[error("unphysical state: lambda_{label} = {value:e} < 0")]
    Unphysical { label: BellLabel, value: f64 },

    #[error("spectrum sums to {0}, expected 1")]
    SpectrumNotNormalized(f64),

    #[error("{name} = {value} is outside its domain {domain}")]
    Domain {
        name: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("measurement direction has norm {0}, expected 1")]
    NonUnitDirection(f64),

    #[error("level {level} is not strictly inside the field range ({min}, {max})")]
    LevelOutOfRange { level: f64, min: f64, max: f64 },

    #[error("level surface is empty")]
    EmptyMesh,

    #[error("POVM completeness could not be satisfied: {accepted} accepted after {drawn} draws")]
    PovmRejected { accepted: usize, drawn: usize },

    #[error("discord evaluated to {0:e}, below -1e-12")]
    NegativeDiscord(f64),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
