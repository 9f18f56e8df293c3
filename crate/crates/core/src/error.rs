use thiserror::Error;

/// Errors raised by the channel, precoding and analysis stages.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// The scenario (clusters, fractions, powers) is inconsistent.
    #[error("configuration error: {0}")]
    Config(String),
    /// Matrix or vector dimensions do not agree.
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    Dimension {
        context: &'static str,
        expected: usize,
        found: usize,
    },
    /// The first users of two clusters are (nearly) indistinguishable, so the
    /// zero-forcing inverse does not exist.
    #[error(
        "singular clustering: first users of clusters {first} and {second} are not separable \
         (condition number {condition:.3e})"
    )]
    SingularClustering {
        first: usize,
        second: usize,
        condition: f64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
