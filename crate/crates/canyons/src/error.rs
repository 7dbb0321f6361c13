//! Error type shared by all stages of the pipeline.

use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unbound parameter `{0}`")]
    UnboundParameter(String),
    #[error("exponent at byte {pos} must be a nonnegative integer")]
    NonIntegerExponent { pos: usize },
    #[error("polynomial does not vanish at the origin")]
    NotVanishingAtOrigin,
    #[error("germ is not mini-regular in x")]
    NotMiniRegular,
    #[error("germ has a multiple root")]
    MultipleRoot,
    #[error("precision exhausted (cap reached while a zero test stayed undecided)")]
    PrecisionExhausted,
    #[error("truncation cap exceeded while expanding a series")]
    TruncationCapExceeded,
    #[error("sampling grid too coarse: order still changing at the largest grid points")]
    GridTooCoarse,
    #[error("arcs indistinguishable at the current truncation")]
    IndistinguishableArcs,
    #[error("candidate/matching search exceeded the explosion guard")]
    ExplosionGuard,
    #[error("precondition not met: {0}")]
    PreconditionNotMet(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code used by the CLI.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Syntax { .. }
            | Error::UnboundParameter(_)
            | Error::NonIntegerExponent { .. }
            | Error::NotVanishingAtOrigin
            | Error::NotMiniRegular
            | Error::MultipleRoot
            | Error::PreconditionNotMet(_) => 2,
            Error::PrecisionExhausted => 3,
            Error::TruncationCapExceeded => 4,
            _ => 5,
        }
    }
}
