//! Finite-horizon robust stabilization toolkit for linear time-varying
//! discrete-time systems.
//!
//! Every system is lifted to a block matrix over a horizon of `T` steps:
//! block `(i, j)` maps the input at time `j` to the output at time `i`, and
//! causal systems are exactly the block lower-triangular ones. On top of that
//! algebra the crate computes
//!
//! * normalized right/left coprime factorizations with a doubly-coprime
//!   completion ([`coprime`]),
//! * time-varying Hankel operators on the causal Hilbert-Schmidt class and the
//!   optimal causal (Nehari) approximation ([`nehari`]),
//! * the time-varying gap metric between two plants ([`gap`]),
//! * stability-margin quantities: `r_o` through two independent formulas,
//!   the truncated lower-bound profile, the Corona criterion and an LTI
//!   closed-form oracle ([`margin`]),
//! * the operators `Ξ`, `Γ`, `Υ`, their Schmidt pairs, the optimal Youla
//!   parameter and the robust controller ([`synthesis`]).
//!
//! The crate is `no_std` and only needs `alloc`.
#![no_std]
#![warn(missing_debug_implementations)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod coprime;
pub mod error;
pub mod flatten;
pub mod gap;
pub mod lift;
pub mod linalg;
pub mod margin;
pub mod nehari;
pub mod operator;
pub mod random;
pub mod space;
pub mod synthesis;

pub use coprime::{factorize, CoprimeFactorization, FactorizationResiduals};
pub use error::{Error, Result};
pub use flatten::{CoordSpace, FlattenedMap, Region};
pub use gap::{tv_gap, GapReport, Graph};
pub use margin::MarginReport;
pub use operator::{LtvOperator, Side};
pub use space::{NestIndex, SignalSpace};
pub use synthesis::{ProofOperators, SchmidtData};

/// Default tolerance for structural checks (causality, block patterns).
pub const STRUCTURAL_TOL: f64 = 1e-10;
/// Default tolerance for numerical identities that involve no iteration.
pub const IDENTITY_TOL: f64 = 1e-8;
