//! Convergence analysis of series by asymptotic comparison at infinity.

pub mod asymptotics;
pub mod bignum;
pub mod convergence;
pub mod corpus;
pub mod expr;
pub mod oracle;
pub mod power_series;
pub mod rearrange;
pub mod report;

pub use convergence::{auto, Outcome, Verdict};
pub use expr::{parse, Expr};
