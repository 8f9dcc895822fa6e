//! Limit-order-book market simulator that reads each trade through fluid
//! analogs: a viscosity built from the notional imbalance between an
//! incoming order and the best opposite level, and a Reynolds number
//! `v²·l·P/(1−P)` from the price speed, the spread and the odds of a
//! collision between supply and demand.

pub mod agents;
pub mod book;
pub mod config;
pub mod engine;
pub mod error;
pub mod io;
pub mod physics;
pub mod sweep;

pub use agents::AgentSampler;
pub use book::{FluidAgent, InteractionOutcome, OrderBook, PriceLevel, Side};
pub use config::SimConfig;
pub use engine::{run, SeriesBundle, Simulation, TickRecord};
pub use error::{Error, Result};
pub use physics::{FlowRegime, Viscosity};
