//! k-copy online bin packing with Predictive Harmonic 3 (PH3).
//!
//! * [`model`]: exact item sizes, size classes, bins and instance files.
//! * [`packers`]: PH3, Next/First/Best Fit and offline First Fit Decreasing.
//! * [`ratio`]: lower bounds on the optimum and the closed-form PH3 ratio bound.
//! * [`planner`]: interval covers of `r_L*` that assemble k PH3 copies for a target ratio.
//! * [`adversary`]: tightness instances keyed to a shadow PH3 run.

pub mod adversary;
pub mod error;
pub mod model;
pub mod packers;
pub mod planner;
pub mod ratio;
pub mod rational;

pub use error::{Error, Result};
pub use model::{classify, parse_instance, size_of, Bin, BinCategory, Instance, Item, ItemClass};
pub use rational::{q, Rational};
