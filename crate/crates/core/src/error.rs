use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A curve violates its construction invariants.
    InvalidCurve(String),
    /// A flow history violates its invariants (time order, point count, topology).
    InvalidHistory(String),
    /// A numeric parameter is outside the admissible range of the operation.
    InvalidParameter { name: &'static str, reason: String },
    /// Geometry too degenerate for the requested stencil (zero length, cusp).
    Degenerate(String),
    /// The backward heat kernel was evaluated at or after its singular time.
    KernelDomain { t: f64, t0: f64 },
    /// A time step produced an invalid curve (`t` is filled in by `evolve`).
    StepRejected { t: Option<f64>, reason: String },
    /// The Gaussian functional of the initial slice is not (numerically) finite.
    DivergentFunctional { value: f64, tail: f64 },
    /// The cyclic index correspondence cannot act on a curve of this shape.
    IncompatibleShift { offset: i64, count: usize },
    /// An analysis window or index falls outside the available data.
    OutOfRange(String),
    /// A diagnostic cannot be evaluated on this data.
    Inconclusive(String),
}

impl Error {
    /// Short machine-readable tag, used by the command line error lines.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidCurve(_) => "invalid_curve",
            Error::InvalidHistory(_) => "invalid_history",
            Error::InvalidParameter { .. } => "invalid_parameter",
            Error::Degenerate(_) => "degenerate",
            Error::KernelDomain { .. } => "kernel_domain",
            Error::StepRejected { .. } => "step_rejected",
            Error::DivergentFunctional { .. } => "divergent_functional",
            Error::IncompatibleShift { .. } => "incompatible_shift",
            Error::OutOfRange(_) => "out_of_range",
            Error::Inconclusive(_) => "inconclusive",
        }
    }

    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidCurve(msg) => write!(f, "invalid curve: {msg}"),
            Error::InvalidHistory(msg) => write!(f, "invalid flow history: {msg}"),
            Error::InvalidParameter { name, reason } => {
                write!(f, "invalid parameter `{name}`: {reason}")
            }
            Error::Degenerate(msg) => write!(f, "degenerate geometry: {msg}"),
            Error::KernelDomain { t, t0 } => {
                write!(f, "backward heat kernel needs t < t0 (t = {t}, t0 = {t0})")
            }
            Error::StepRejected { t: Some(t), reason } => {
                write!(f, "step rejected at t = {t}: {reason}")
            }
            Error::StepRejected { t: None, reason } => write!(f, "step rejected: {reason}"),
            Error::DivergentFunctional { value, tail } => write!(
                f,
                "initial Gaussian functional is not finite within tolerance \
                 (partial value {value}, tail estimate {tail})"
            ),
            Error::IncompatibleShift { offset, count } => write!(
                f,
                "index shift with offset {offset} does not act on an open curve of {count} points"
            ),
            Error::OutOfRange(msg) => write!(f, "out of range: {msg}"),
            Error::Inconclusive(msg) => write!(f, "inconclusive: {msg}"),
        }
    }
}

impl core::error::Error for Error {}
