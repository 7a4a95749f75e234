use core::fmt;

/// Failure modes shared by every module of the crate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Error {
    DivisionByZero,
    /// Conjugation over `Q`, or an involution/sign pair outside the three normalized types.
    InvalidFieldSpec,
    ParseScalar(alloc::string::String),
    InadmissibleParameters,
    DimensionMismatch {
        expected: usize,
        found: usize,
    },
    NotAnIsometry,
    DegenerateAmbient,
    NoIsotropicVectors,
    HypothesisViolated(&'static str),
    IndexOutOfRange {
        index: usize,
        len: usize,
    },
    NotGeneralPosition,
    LengthMismatch,
    NotStandard,
    NotInvertible,
    NotATopChain,
    /// The bounded search for an anisotropic isometry gave up.
    SearchExhausted,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DivisionByZero => f.write_str("division by zero"),
            Error::InvalidFieldSpec => f.write_str("invalid field specification"),
            Error::ParseScalar(s) => write!(f, "cannot parse scalar {s:?}"),
            Error::InadmissibleParameters => f.write_str("inadmissible (r, d) for this field type"),
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::NotAnIsometry => f.write_str("map does not preserve the form"),
            Error::DegenerateAmbient => f.write_str("ambient space is degenerate"),
            Error::NoIsotropicVectors => f.write_str("space has no isotropic vectors"),
            Error::HypothesisViolated(what) => write!(f, "hypothesis violated: {what}"),
            Error::IndexOutOfRange { index, len } => write!(f, "index {index} out of range for length {len}"),
            Error::NotGeneralPosition => f.write_str("points are not in general position"),
            Error::LengthMismatch => f.write_str("length mismatch"),
            Error::NotStandard => f.write_str("space is not a standard space"),
            Error::NotInvertible => f.write_str("matrix is not invertible"),
            Error::NotATopChain => f.write_str("chain is not top-dimensional"),
            Error::SearchExhausted => f.write_str("bounded search exhausted"),
        }
    }
}

pub type Result<T> = core::result::Result<T, Error>;
