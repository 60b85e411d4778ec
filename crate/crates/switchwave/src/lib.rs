//! File formats, simulation pipelines and the command-line front end for
//! [`switchwave_core`].

pub mod cli;
pub mod io;
pub mod pipeline;

pub use cli::run_command;
pub use io::{read_series_csv, write_series_csv, Summary};
