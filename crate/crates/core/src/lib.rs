//! Average fronthaul rate of MDS-coded group coded caching in fog radio
//! access networks.
//!
//! The crate is split along the pipeline it models:
//!
//! - [`model`]: system configuration, Zipf popularity and shared combinatorics.
//! - [`analytic`]: closed-form average rate, the delivery quota solver, the
//!   demand-enumeration oracle and the LFU / decentralized / RLFU baselines.
//! - [`optimizer`]: grid traversal over the file split point and code rate.
//! - [`sim`]: symbol-level Monte Carlo of placement and delivery on virtual
//!   MDS-coded files.
//! - [`cli`]: experiment orchestration and CSV output behind the `fogcache`
//!   binary.
//!
//! All rates are in file units (multiples of the file size `F`).

pub mod analytic;
pub mod cli;
mod error;
pub mod exec;
pub mod model;
pub mod optimizer;
pub mod sim;

pub use error::{Error, Result};
pub use exec::Execution;
pub use model::{PlacementParams, PopularityDist, SystemConfig};
