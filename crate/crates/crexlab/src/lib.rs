//! Monte Carlo harness, file formats and command-line front end for the
//! `crexlab-core` measures and estimators.

pub mod cli;
pub mod config;
pub mod csv_io;
pub mod simulation;
