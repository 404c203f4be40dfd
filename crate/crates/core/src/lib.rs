//! Exact synthesis of delay-optimum AND2/OR2 circuits for generalized And-Or
//! paths, and depth-optimum adder carry networks assembled from them.

pub mod adders;
pub mod aop;
pub mod bounds;
pub mod circuit;
pub mod error;
pub mod fractional;
pub mod normalization;
pub mod oracle;
pub mod scalar;
pub mod solver;
pub mod subset;

pub use adders::{build_adder, depth_table, verify_adder, AdderPlan};
pub use aop::{AopSpec, GateKind};
pub use circuit::{Circuit, Metrics, Node};
pub use error::{Error, Result};
pub use fractional::{FractionalResult, FractionalSpec};
pub use solver::{solve, OptResult, SolveOptions, SolveStats, Solver};
pub use subset::InputSubset;

/// Integral delay used by the exact solver.
pub type Delay = u32;
/// Exact arrival times and delays of the fractional extension.
pub type Rational = num_rational::Ratio<i64>;
