//! Command-line and HTTP front end for the negotiation engine.

pub mod cli;
pub mod config;
pub mod export;
pub mod run;
pub mod server;
