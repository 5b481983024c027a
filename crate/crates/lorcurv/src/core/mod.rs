//! Lie algebras, metrics, frames, automorphisms and tolerances.

pub mod algebra;
pub mod automorphism;
pub mod metric;
pub mod tolerance;

pub use algebra::{
    change_basis, is_automorphism, is_automorphism_tol, make_family_algebra, BasisLabel,
    FamilyTag, LieAlgebra3, Regime,
};
pub use automorphism::{automorphism_matrix, AutomorphismParams};
pub use metric::{
    gram_residual, orthonormal_frame, pull_back_metric, validate_metric, MetricTensor,
    OrthonormalFrame, SignatureDiagnostics,
};
pub use tolerance::ToleranceConfig;
