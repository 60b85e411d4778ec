//! Solvers for the 1-D wave equation stabilized by switching and delayed
//! feedback.
//!
//! * [`pointwise`] and [`boundary`] march the exact characteristic
//!   recurrences of the two 1-D systems on a commensurate [`grid::Grid`].
//! * [`spectral`] holds the per-period transfer matrices, their eigenvalues
//!   and the resulting stability verdicts and decay-rate predictions.
//! * [`fd`] is an independent leapfrog solver, used both to cross-check the
//!   characteristic solvers and to run the switched internal-damping scheme.
//! * [`analysis`] fits exponential envelopes to energy series.
//!
//! The crate is `no_std` and only needs `alloc`.
#![no_std]

extern crate alloc;

pub mod analysis;
pub mod boundary;
pub mod error;
pub mod fd;
pub mod grid;
pub mod pointwise;
pub mod spectral;

pub use analysis::{fit_decay_rate, EnergySeries, RateFit, SweepRow};
pub use boundary::{BoundaryState, Window};
pub use error::{Error, Result};
pub use grid::{Grid, InitialData, Preset, Trace};
pub use pointwise::{FieldSample, PointwiseState, StateVector4};
pub use spectral::{SpectralReport, SystemTag};
