//! Tolerance-based equilibrium analysis for finite normal-form games.
//!
//! A player with tolerance `t` is content with any pure strategy whose
//! payoff is within `t` of a best response. Given a distribution over
//! tolerances for every player, a mixed profile is a *tolerant
//! equilibrium* when each player's mixture can be split across tolerance
//! types so that every type only plays strategies it tolerates.
//!
//! Modules:
//!
//! - [`games`]: normal-form games, expected utility, regret, consistency.
//! - [`tolerance`]: discrete and continuous tolerance distributions,
//!   stochastic dominance and the dominance remapping of type strategies.
//! - [`equilibrium`]: verification of tolerant equilibria with witnesses.
//! - [`dilemmas`]: four social dilemmas, cooperation thresholds and rates.
//! - [`pd_tolerant`]: particularly cooperative equilibria of the
//!   Prisoner's Dilemma and their comparative statics.
//! - [`io`]: JSON file schemas and CSV emission shared with the CLI.

pub mod dilemmas;
pub mod equilibrium;
mod error;
pub mod games;
pub mod io;
pub mod pd_tolerant;
pub mod tolerance;

pub use error::{Error, Result};

/// Default numeric slack used for every equality and inequality test.
pub const DEFAULT_EPS: f64 = 1e-9;
