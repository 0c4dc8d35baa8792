//! Command line and HTTP front ends for the `contribkit` library.

pub mod cli;
pub mod server;

pub use cli::{run, Cli};
