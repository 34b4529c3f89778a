//! Library side of the `crossent` binary: argument definitions, command
//! implementations, CSV tables and SVG plots.

pub mod args;
pub mod commands;
pub mod figure1;
pub mod plot;
pub mod table;

pub use commands::run;

/// Process exit codes.
pub mod exit {
    pub const OK: u8 = 0;
    /// Validation failure, audit violation or runtime error.
    pub const FAILURE: u8 = 1;
    /// Bad command line (clap's own code).
    pub const USAGE: u8 = 2;
}
