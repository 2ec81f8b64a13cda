//! Chart-local verification engine for Kropina metrics `F = α²/β`.
//!
//! Every closed-form curvature quantity (spray, Ricci curvature, S-curvature,
//! the Einstein characterization and the navigation criteria) is paired with
//! a definitional route computed by exact forward-mode jets, so the two can be
//! compared sample by sample.
//!
//! The crate is `no_std` and only needs `alloc`. IO, configuration files and
//! the command line live in the `kropina` companion crate.

#![no_std]
// Index loops mirror the tensor notation; `!(x > y)` guards also reject NaN.
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

#[cfg(test)]
extern crate std;

mod error;
pub mod expr;
pub mod field;
pub mod jet;
pub mod kropina;
pub mod linalg;
pub mod navigation;
pub mod residual;
pub mod riemannian;
pub mod sampling;
pub mod scalar;
pub mod spaceforms;
pub mod tensor;

pub use error::{Error, Result};
pub use expr::{parse, Expr};
pub use field::{ChartRegion, MetricField, OneFormField, Params, VectorField};
pub use jet::{lift_variable, Jet, JetSpace};
pub use kropina::{EinsteinReport, KropinaMetric, Verdict};
pub use navigation::NavigationData;
pub use riemannian::BetaInvariants;
pub use sampling::{Sample, SampleSet};
pub use scalar::Scalar;
