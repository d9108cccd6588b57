//! Lazy online convex optimization.
//!
//! The library plays `T`-round games between an online player choosing
//! `w_t` in a convex set and an adversary choosing convex losses, and counts
//! both regret and the number of times the player changes its decision.
//!
//! * [`geometry`]: feasible sets with exact projections.
//! * [`losses`]: loss families, hindsight optima, leader sequences.
//! * [`coupling`]: the maximal-coupling sampler and total-variation tools.
//! * [`algorithms`]: FTPRLL, Lazy SGD, OGD and blocked OGD.
//! * [`adversaries`]: i.i.d., replay and lower-bound loss generators.
//! * [`harness`]: game runner, tuning, conversions and sweeps.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod adversaries;
pub mod algorithms;
pub mod coupling;
pub mod error;
pub mod geometry;
pub mod harness;
pub mod linalg;
pub mod losses;
pub mod numeric;
pub mod solver;

pub use error::{Error, Result};
pub use geometry::Domain;
pub use losses::{LossFn, LossSequence};
