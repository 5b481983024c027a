//! Curvature and canonical forms of left-invariant Lorentzian metrics on
//! the three-dimensional non-unimodular Lie groups G_I and G_c.
//!
//! Everything happens at the Lie-algebra level:
//!
//! - [`core`]: structure constants, metrics of signature (+,+,−),
//!   orthonormal frames, automorphism groups.
//! - [`curvature`]: Levi-Civita connection, Riemann and Ricci tensors,
//!   scalar and sectional curvature in an orthonormal frame.
//! - [`oneill`]: O'Neill (Segrè) type of an h-self-adjoint operator and
//!   its normalising O(2,1) frame change.
//! - [`classify`]: reduction of a metric to its canonical form under the
//!   automorphism group, equivalence, constant-curvature detection.
//! - [`atlas`]: per-form orthonormal frames and closed-form curvature,
//!   cross-checked against the engine.
//! - [`io`]: the JSON input document and 17-significant-digit output.

// `!(x > t)` is used on purpose so NaN takes the failing branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod atlas;
pub mod classify;
pub mod core;
pub mod curvature;
pub mod error;
pub mod io;
pub mod linalg;
pub mod oneill;

pub use crate::core::{BasisLabel, FamilyTag, LieAlgebra3, MetricTensor, ToleranceConfig};
pub use error::{Error, Result};
