//! Bid shading against auctions that price from estimated value
//! distributions.
//!
//! The crate covers value and bid distributions ([`dist`]), shading
//! strategies ([`shade`]), auction mechanisms ([`mech`]), expected payoffs by
//! quadrature and Monte Carlo ([`payoff`]) and the optimizers built on top
//! of them ([`opt`]). JSON-facing configuration types live in [`config`].

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod dist;
pub mod error;
pub mod mech;
pub mod numeric;
pub mod opt;
pub mod payoff;
pub mod rng;
pub mod shade;

pub use dist::{DistributionModel, GpParams, GridFunction};
pub use shade::{ShadingStrategy, VirtualTarget};
pub use error::{Error, Result};
pub use mech::{AuctionOutcome, MechanismConfig, MechanismKind};
pub use payoff::{CompetitionDistribution, PayoffEstimate};
