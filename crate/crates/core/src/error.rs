use core::fmt;

/// Errors raised by the solvers and analysis routines.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A scalar parameter is outside its admissible domain.
    InvalidParameter {
        name: &'static str,
        reason: &'static str,
    },
    /// Unknown initial-data preset name.
    UnknownPreset,
    /// Sample arrays do not line up with the grid.
    SampleMismatch { expected: usize, found: usize },
    /// A length is not an integer multiple of the grid step.
    NotCommensurate,
    /// A trace was read outside its defined range.
    OutOfFrontier { index: i64 },
    /// `mu1 == 1` leaves the reflection factor undefined.
    KappaUndefined,
    /// Rate prediction requested outside the stability region.
    NotStable,
    /// The discrete time step violates `dt <= h_x`.
    CflViolation { dt: f64, hx: f64 },
    /// Initial energy is zero, a ratio is meaningless.
    DegenerateInitialData,
    /// Nothing positive to fit.
    Degenerate,
    /// The series is too short for the requested operation.
    SeriesTooShort,
    /// The delayed rule is not active at the requested time.
    DelayInactive,
    /// Two grids or configurations cannot be compared.
    IncompatibleGrids,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParameter { name, reason } => write!(f, "invalid {name}: {reason}"),
            Error::UnknownPreset => f.write_str("unknown initial-data preset"),
            Error::SampleMismatch { expected, found } => {
                write!(f, "expected {expected} samples, found {found}")
            }
            Error::NotCommensurate => f.write_str("length is not a multiple of the grid step"),
            Error::OutOfFrontier { index } => write!(f, "trace index {index} is not defined"),
            Error::KappaUndefined => f.write_str("kappa undefined (mu1 = 1)"),
            Error::NotStable => f.write_str("not in stability region"),
            Error::CflViolation { dt, hx } => write!(f, "CFL violated: dt = {dt} > h_x = {hx}"),
            Error::DegenerateInitialData => f.write_str("degenerate initial data"),
            Error::Degenerate => f.write_str("degenerate"),
            Error::SeriesTooShort => f.write_str("series too short"),
            Error::DelayInactive => f.write_str("delayed rule not active at this time"),
            Error::IncompatibleGrids => f.write_str("incompatible grids"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
