//! File formats, experiment suites and the `vnet` command line on top of
//! [`vnet_core`].

mod cli;
mod error;
pub mod formats;
pub mod suites;

pub use cli::run_cli;
pub use error::{Error, Result};
pub use vnet_core;
