//! Numerical laboratory for pluripotential estimates: explicit plurisubharmonic
//! models, grid Monge-Ampère diagnostics, relative capacities, slice energies
//! and the explicit constants of the volume and integrability bounds.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod capacity;
pub mod domain;
pub mod error;
pub mod green;
pub mod grid;
pub mod harness;
pub mod model;
pub mod newton;
pub mod planar;
pub mod quad;
pub mod report;

pub use domain::{Domain, DomainKind};
pub use error::{Error, Result};
pub use model::{Family, FamilyKind, MeasureSummary, ModelSpec, PshModel, Symmetry};
pub use newton::NewtonPolygon;
