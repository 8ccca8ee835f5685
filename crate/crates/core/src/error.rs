use core::fmt;

/// Errors raised by path construction, parameter validation and the
/// post-processing of simulation results.
///
/// Numerical breakdowns during integration are not errors: they end the run
/// and are reported through [`RunStatus`](crate::RunStatus).
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Arc length outside `[0, L]`.
    OutOfDomain { s: f64, length: f64 },
    /// Segment list does not tile `[0, L]`.
    InvalidPath(&'static str),
    /// A parameter violates the invariant of its owning type.
    InvalidParameter {
        name: &'static str,
        reason: &'static str,
    },
    /// No sample reached the metric onset arc length.
    NoQualifyingSamples { skip_arclength: f64 },
    EmptySweep,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::OutOfDomain { s, length } => {
                write!(f, "arc length s = {s} is outside the path domain [0, {length}]")
            }
            Error::InvalidPath(why) => write!(f, "invalid path: {why}"),
            Error::InvalidParameter { name, reason } => write!(f, "invalid `{name}`: {reason}"),
            Error::NoQualifyingSamples { skip_arclength } => write!(
                f,
                "no sample reached s_r >= {skip_arclength} m; use a smaller skip arc length"
            ),
            Error::EmptySweep => f.write_str("sweep needs at least one resistance value"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}

pub(crate) fn invalid(name: &'static str, reason: &'static str) -> Error {
    Error::InvalidParameter { name, reason }
}
