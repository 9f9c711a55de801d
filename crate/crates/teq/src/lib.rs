//! `teq` computes the time-energy cost of quantum operations: the largest
//! absolute eigenphase of a unitary, lower and upper bounds for measurements
//! described by POVMs, linear-optics element costs with optimal time
//! allocation, and the cost of optimal unambiguous state discrimination for
//! geometrically uniform families.
//!
//! Modules mirror the problem layers: [`matcore`] holds validated dense
//! complex-matrix primitives, [`ucost`] the unitary/partial-completion costs,
//! [`povm`] the measurement bound engine, [`optics`] beam-splitter models,
//! and [`usd`] state-discrimination families and sweeps. [`schema`] pins the
//! JSON/CSV wire formats and [`check`] runs the seeded property suites.

pub mod check;
pub mod error;
pub mod matcore;
pub mod optics;
mod par;
pub mod povm;
pub mod presets;
pub mod random;
pub mod schema;
pub mod ucost;
pub mod usd;

pub use error::{Result, TeqError};
pub use matcore::{ComplexMatrix, ComplexVector, Tolerance, C64};
pub use povm::{BoundReport, EnumerationBudget, Povm};
pub use ucost::{CostAngle, KrausStack, PartialUBounds};
