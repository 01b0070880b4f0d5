//! Entropy and entanglement production for open quantum systems.
//!
//! The crate evolves density matrices under time-independent Lindblad
//! dynamics and tracks, along each trajectory, the Spohn entropy production
//! rate and the rate of change of the relative entropy of entanglement.

// `!(x > 0.0)` deliberately rejects NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dynamics;
pub mod entanglement;
pub mod error;
pub mod linalg;
pub mod papermodels;
pub mod production;
pub mod states;

pub use dynamics::{LindbladModel, Trajectory};
pub use error::{Error, Result};
pub use linalg::{FactorLayout, Operator, C64};
pub use papermodels::{CollisionAudit, CollisionConfig, PaperModelParams};
pub use production::{ProductionSeries, ScanConfig, ScanReport};
pub use states::{DensityMatrix, EntropyValue};
