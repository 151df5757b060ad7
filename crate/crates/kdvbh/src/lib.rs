//! Identity suites, reports, the acceptance battery and the command-line
//! driver for [`kdvbh_core`].

pub mod acceptance;
pub mod cli;
pub mod config;
pub mod pages;
pub mod report;
pub mod verify;
