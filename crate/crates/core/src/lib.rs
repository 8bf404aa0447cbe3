//! Bounds on Bayes risk for M-ary hypothesis testing, and the equivocation
//! and capacity bounds they induce for memoryless channels.
//!
//! * [`prob`]: probability vectors, entropy, posteriors, MAP error.
//! * [`numerics`]: quadrature, root finding, scalar and simplex optimization.
//! * [`bounds`]: per-observation bounds on the MAP conditional error.
//! * [`hypothesis`]: binary tests with continuous observations.
//! * [`channels`]: discrete and binary-input Gaussian channels, `ρ`, capacity.
//! * [`coding`]: random-coding lower bounds and an exact ensemble simulator.

// Guards such as `!(x > 0.0)` are written that way so NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod channels;
pub mod coding;
pub mod hypothesis;
pub mod numerics;
pub mod prob;

pub use bounds::{full_report, BoundReport};
pub use channels::{BiAwgnChannel, Channel, ChannelSpec, Dmc};
pub use hypothesis::{Appendix1Instance, BinaryContinuousProblem};
pub use numerics::QuadratureSpec;
pub use prob::{Pmf, Posterior};
