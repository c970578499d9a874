//! Configuration, checkpointing, metrics, and benchmark plumbing behind the
//! `swarm-gass` binary. Kept as a library so integration tests can exercise
//! the file formats directly.

pub mod benchfn;
pub mod checkpoint;
pub mod config;
pub mod metrics;
