//! Core library for repeated normal-form coordination games: game
//! abstractions, welfare-seeking regret-matching dynamics, brute-force
//! equilibrium oracles, and communication-cost accounting.
//!
//! The crate is `no_std` (with `alloc`) so the algorithmic core stays free
//! of IO concerns; file formats and the CLI live in the companion
//! `arena-cli` crate.
//!
//! Module map:
//! - [`game`]: finite games, payoff/counterfactual queries, matrix fixtures
//! - [`models`]: resource-allocation and task-assignment game generators
//! - [`dynamics`]: the SORM / LURM / GURM learning loops and run traces
//! - [`equilibria`]: PSNE / Pareto / social-optimum enumeration oracles and
//!   CCE regret evaluation
//! - [`comms`]: counterfactual-message accounting and complexity formulas

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod comms;
pub mod dynamics;
pub mod equilibria;
pub mod game;
pub mod models;

mod rand_util;

pub use dynamics::{Algorithm, DynamicsConfig, RunOutcome, RunTrace};
pub use game::{ActionProfile, GameError, GameSpec, MatrixGame};
