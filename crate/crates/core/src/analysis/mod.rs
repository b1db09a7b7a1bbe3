//! Mixing times, cut conductance, the barrier lower bound, and the Monte
//! Carlo experiments on the counterexample family.

mod cuts;
mod experiments;
mod mixing;

pub use cuts::*;
pub use experiments::*;
pub use mixing::*;
