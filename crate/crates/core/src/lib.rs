//! Edge/cloud computation offloading with a similarity-driven edge cache.
//!
//! * [`channel`]: Shannon-rate uplink model with equal bandwidth sharing.
//! * [`cache`]: feature-vector cache with rounded best-match hits and LRU eviction.
//! * [`offload`]: edge vs. cloud branch delays and the min-delay decision.
//! * [`sim`]: analytic and discrete-event experiment engines, workload sweeps.
//! * [`config`], [`report`], [`cli`]: config files, CSV output, command handlers.

pub mod cache;
pub mod channel;
pub mod cli;
pub mod config;
pub mod error;
pub mod offload;
pub mod report;
pub mod sim;

pub use error::{ModelError, Result};
