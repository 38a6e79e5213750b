//! Command-line front end for the citeclass pipeline.

pub mod commands;
pub mod config;
