//! Link-budget and Shannon-capacity simulator for ground, HAP and satellite
//! links.
//!
//! The pipeline for one hop is [`geometry`] (slant range and delay) →
//! [`channel`] (staged path loss) → [`linkbudget`] (SNR and capacity).
//! [`relay`] composes hops into chains and [`harness`] runs parameter sweeps
//! and writes CSV.

pub mod channel;
pub mod error;
pub mod geometry;
pub mod harness;
pub mod linkbudget;
pub mod relay;

pub use channel::{ChannelTables, LossBreakdown, LossMode, Scenario};
pub use error::{Error, Result};
pub use geometry::{LinkGeometry, Platform, Station};
pub use linkbudget::{evaluate_link, LinkResult, RadioConfig};
pub use relay::{evaluate_chain, RelayChain, RelayMode};
