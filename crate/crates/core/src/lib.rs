//! Cycle objectives on directed graphs of low treewidth: minimum mean and
//! ratio cycle values, minimum initial credit (energy), tree
//! decompositions to run them on, and brute-force oracles to check them.

pub mod energy;
pub mod energy_tw;
pub mod error;
pub mod gen;
pub mod graph;
pub mod mincycle;
pub mod oracles;
pub mod ratio;
pub mod rational;
pub mod treedec;

pub use error::{Error, Result};
pub use graph::{NodeId, WeightedDigraph};
pub use rational::Rational;
