use thiserror::Error;

use crate::laurent::LaurentPoly;
use crate::word::Word;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("integer overflow in {0}")]
    Overflow(&'static str),

    #[error("division by the zero polynomial")]
    DivisionByZero,

    /// The quotient does not exist in the Laurent ring; `remainder` is the
    /// normal form of the dividend modulo the divisor.
    #[error("not divisible, remainder {remainder}")]
    NotDivisible { remainder: LaurentPoly },

    #[error("specialization y = 0 is undefined: term {term} has a negative y-exponent")]
    IllDefinedSpecialization { term: String },

    #[error("operation undefined on the zero polynomial")]
    ZeroPolynomial,

    #[error("expansion is not pointed: {reason}")]
    NotPointed { reason: String },

    #[error("matrix is not skew-symmetrizable: {reason}")]
    NotSkewSymmetrizable { reason: String },

    #[error("direction {k} out of range for rank {n}")]
    DirectionOutOfRange { k: usize, n: usize },

    #[error("Laurent phenomenon violated mutating {word} in direction {}: remainder {remainder}", direction + 1)]
    LaurentViolation {
        word: Word,
        direction: usize,
        remainder: LaurentPoly,
    },

    #[error("word {0} is not reduced")]
    UnreducedWord(Word),

    #[error("vertex {0} is not in the explored region")]
    NotExplored(Word),

    #[error("no cluster variable with id {0}")]
    UnknownVariable(usize),

    #[error("exponent vector {0:?} is not in N^n")]
    NegativeExponent(Vec<i64>),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid input: {0}")]
    Invalid(String),
}

impl Error {
    pub(crate) fn check_len(expected: usize, found: usize) -> Result<()> {
        if expected == found {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { expected, found })
        }
    }
}
