//! Gap of loneliness for integer speed vectors, and upper/lower bounds on it
//! obtained from linear programs over even trigonometric polynomials.
//!
//! * [`exact`] computes `gap(v)` exactly by exhaustive search over rational times.
//! * [`trigpoly`] holds the polynomial representation, closed-form extremal
//!   polynomials and rigorous interval minima.
//! * [`lpcore`] is a dense two-phase simplex solver.
//! * [`bounds`] assembles and solves the sampled programs and certifies the results.
//! * [`equality`] recognises the closed-form equality cases.

pub mod bounds;
pub mod equality;
pub mod error;
pub mod exact;
pub mod lpcore;
pub mod rational;
pub mod trigpoly;

pub use bounds::{BoundResult, BoundSpec, BoundStatus, Sign};
pub use equality::{CaseKind, EqualityCase};

pub use error::{Error, Result};
pub use exact::{gap, GapResult, SpeedVector};
pub use lpcore::{LinearProgram, LpOutcome, LpStatus, Relation};
pub use rational::Rational;
pub use trigpoly::{CertifiedExtremum, TrigPoly};
