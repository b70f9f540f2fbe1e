//! Parameter sweeps, file output and CLI plumbing on top of `sgqc-core`.

pub mod config;
pub mod ensemble;
pub mod output;
