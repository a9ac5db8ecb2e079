//! Exact-arithmetic laboratory for series of translates `sum f(x + lambda)`.
//!
//! Three explicit constructions of translation sets are built as implicit
//! arithmetic-progression structures over dyadic rationals, and every finite,
//! checkable inequality of each construction is verified exactly:
//!
//! * [`universal`]: a decreasing-gap set whose translate series can be made to
//!   diverge on any prescribed open set.
//! * [`dense_divergence`]: an asymptotically dense set with divergence set
//!   exactly a prescribed open set.
//! * [`interior_gap`]: a decreasing-gap set and a continuous function with a
//!   divergence interval to the left of a convergence interval.
//!
//! Nothing here uses floating point; see [`exactnum::Dyadic`].

pub mod error;
pub mod exactnum;
pub mod exec;
pub mod lattice;
pub mod report;
pub mod sampling;

pub mod dense_divergence;
pub mod interior_gap;
pub mod universal;

pub mod suites;

pub use error::{Error, Result};
pub use exactnum::{DyInterval, Dyadic, IntervalUnion, PiecewiseLinear};
pub use exec::Exec;
pub use report::{Outcome, WitnessReport};
