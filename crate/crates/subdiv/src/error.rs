//! Crate-wide error type.
//!
//! Errors are grouped by what went wrong rather than by module: bad arguments
//! (dimension mismatches, out-of-range cosets), domain violations (parameter
//! outside the polytope, evaluation on a coordinate axis), structural failures
//! (a symbol that lacks the smoothing factor required for a restriction), and
//! I/O or parse failures from the file interfaces.

use thiserror::Error;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Two operands live in different numbers of variables.
    #[error("dimension mismatch: expected {expected} variables, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// Laurent polynomials cannot be evaluated where a coordinate vanishes.
    #[error(
        "evaluation point has a zero coordinate (index {coord}); Laurent terms are undefined there"
    )]
    ZeroCoordinate { coord: usize },

    /// Derivative orders must be non-negative integers.
    #[error("derivative order must be non-negative, got {got} in coordinate {coord}")]
    NegativeDerivativeOrder { coord: usize, got: i64 },

    /// The zero polynomial has no support box / mask form.
    #[error("the zero polynomial has no mask representation")]
    EmptyMask,

    /// Dilation factors must be integers of modulus at least 2 (and positive
    /// wherever transition matrices are built).
    #[error("invalid dilation factor m = {m}: {reason}")]
    InvalidDilation { m: i64, reason: &'static str },

    /// A coset representative lies outside {0, …, m-1}^s.
    #[error("coset representative {got:?} out of range for m = {m}")]
    InvalidCoset { got: Vec<i64>, m: i64 },

    /// Parameter outside the polytope spanned by the domain vertices.
    #[error("parameter outside domain: {detail}")]
    OutsideDomain { detail: String },

    /// A vertex symbol is not divisible by the requested smoothing factor.
    #[error("insufficient sum rules: restriction to differences of order {required} needs sum rules of order {required}, but the family only attains order {achieved}")]
    NotEnoughSumRules { required: usize, achieved: usize },

    /// Numerical invariance check of a restricted family failed.
    #[error("difference subspace is not invariant within tolerance: residual {residual:.3e} exceeds {tolerance:.3e}")]
    InvarianceCheckFailed { residual: f64, tolerance: f64 },

    /// Matrix families must be non-empty and of consistent square shape.
    #[error("invalid matrix family: {reason}")]
    InvalidFamily { reason: String },

    /// A matrix contains NaN or infinite entries.
    #[error("matrix contains non-finite entries")]
    NonFiniteEntries,

    /// Mask supports fed to the support-interval sum never settle down.
    #[error("mask supports are not eventually constant: level {level} has {got:?} but the tail is {tail:?}")]
    NonConstantSupport {
        level: usize,
        got: (i64, i64),
        tail: (i64, i64),
    },

    /// A rational literal could not be parsed.
    #[error("cannot parse {text:?} as a rational number")]
    ParseRational { text: String },

    /// Scheme-definition JSON was syntactically or semantically malformed.
    #[error("malformed scheme file: {msg} (line {line}, column {column})")]
    SchemeJson {
        msg: String,
        line: usize,
        column: usize,
    },

    /// Semantic problem in an otherwise well-formed scheme document.
    #[error("invalid scheme document: {0}")]
    SchemeInvalid(String),

    /// Free-form argument error for CLI and top-level entry points.
    #[error("{0}")]
    Argument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Construct an argument error from anything printable.
    pub fn arg(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }
}
