//! Canonical forms of left-invariant Lorentzian metrics under the
//! automorphism group, equivalence, and constant-curvature detection.
//!
//! For c ≤ 1 the canonical matrices live in the adapted bases (Q-adapted
//! for c = 1, P-adapted for c < 1); natural-basis input is converted by
//! congruence with the matrix whose columns are the adapted vectors.
//! Witnesses are automorphisms of the working-basis algebra.

pub mod forms;
mod reduce;

use nalgebra::Matrix3;
use serde::{Deserialize, Serialize};

pub use forms::{canonical_matrix, check_domain, FormId, ParamName, Params};

use crate::core::automorphism::adapted_vectors;
use crate::core::{
    make_family_algebra, orthonormal_frame, BasisLabel, FamilyTag, LieAlgebra3, MetricTensor, Regime,
    ToleranceConfig,
};
use crate::curvature::FrameGeometry;
use crate::error::{Error, Result};
use crate::linalg::{lorentz_dot, mat3_rows, max_abs};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CanonicalForm {
    pub family: FamilyTag,
    pub form_id: FormId,
    #[serde(flatten)]
    pub params: Params,
    #[serde(with = "mat3_rows")]
    pub canonical_matrix: Matrix3<f64>,
    /// Automorphism A of the working-basis algebra with Aᵗ h A = canonical.
    #[serde(with = "mat3_rows")]
    pub witness: Matrix3<f64>,
    pub basis_label: BasisLabel,
}

/// The family algebra in the basis canonical forms are written in.
pub fn working_algebra(family: FamilyTag) -> Result<LieAlgebra3> {
    let family = family.validate()?;
    make_family_algebra(family, family.regime().working_basis())
}

fn adapted_label(family: FamilyTag) -> Result<BasisLabel> {
    match family.regime() {
        Regime::G1 | Regime::GcLt1 => Ok(family.regime().working_basis()),
        _ => Err(Error::BasisMismatch {
            family: family.to_string(),
            basis: "adapted".into(),
        }),
    }
}

/// Natural-basis metric → adapted basis: Tᵗ h T, T = adapted vectors.
pub fn to_adapted_basis(family: FamilyTag, h: &MetricTensor) -> Result<MetricTensor> {
    let label = adapted_label(family)?;
    if h.basis_label != BasisLabel::Natural {
        return Err(Error::BasisMismatch {
            family: family.to_string(),
            basis: h.basis_label.to_string(),
        });
    }
    let t = adapted_vectors(family);
    MetricTensor::new(t.transpose() * h.matrix() * t, label, h.tolerance)
}

/// Adapted-basis metric → natural basis (inverse of [`to_adapted_basis`]).
pub fn from_adapted_basis(family: FamilyTag, h: &MetricTensor) -> Result<MetricTensor> {
    let label = adapted_label(family)?;
    if h.basis_label != label {
        return Err(Error::BasisMismatch {
            family: family.to_string(),
            basis: h.basis_label.to_string(),
        });
    }
    let q = adapted_vectors(family)
        .try_inverse()
        .ok_or_else(|| Error::Internal("adapted basis matrix is singular".into()))?;
    MetricTensor::new(q.transpose() * h.matrix() * q, BasisLabel::Natural, h.tolerance)
}

/// Re-expresses `h` in the working basis of `family`.
pub fn to_working_basis(family: FamilyTag, h: &MetricTensor) -> Result<MetricTensor> {
    let target = family.regime().working_basis();
    if h.basis_label == target {
        Ok(h.clone())
    } else if h.basis_label == BasisLabel::Natural {
        to_adapted_basis(family, h)
    } else {
        Err(Error::BasisMismatch {
            family: family.to_string(),
            basis: h.basis_label.to_string(),
        })
    }
}

pub fn canonical_form(family: FamilyTag, h: &MetricTensor) -> Result<CanonicalForm> {
    let family = family.validate()?;
    let hw = to_working_basis(family, h)?;
    let alg = working_algebra(family)?;
    let tol = hw.tolerance;
    let (form_id, params, witness) = reduce::reduce(family, &alg, *hw.matrix(), &tol)?;
    let params = params.restrict(form_id);
    let canonical = canonical_matrix(family, form_id, &params)
        .map_err(|e| Error::Internal(format!("reduction left the domain of {form_id}: {e}")))?;
    let reached = witness.transpose() * hw.matrix() * witness;
    let res = max_abs(&(reached - canonical));
    let scale = 1.0 + max_abs(hw.matrix()) * max_abs(&witness).powi(2);
    if res > 1e-9 * scale.max(1e2) {
        return Err(Error::Internal(format!(
            "{form_id}: witness reproduces the canonical matrix only to {res:e}"
        )));
    }
    Ok(CanonicalForm {
        family,
        form_id,
        params,
        canonical_matrix: canonical,
        witness,
        basis_label: family.regime().working_basis(),
    })
}

/// Relative parameter agreement used by [`equivalent`].
fn same_params(a: &CanonicalForm, b: &CanonicalForm, tol: &ToleranceConfig) -> bool {
    let (x, y) = (a.params.values(a.form_id), b.params.values(b.form_id));
    x.len() == y.len()
        && x.iter().zip(&y).all(|(p, q)| {
            (p - q).abs() <= 10.0 * tol.classification_tol * 1f64.max(p.abs()).max(q.abs())
        })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Equivalence {
    pub equivalent: bool,
    /// A with Aᵗ h₁ A = h₂ (working basis), when equivalent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<[[f64; 3]; 3]>,
    pub first: CanonicalForm,
    pub second: CanonicalForm,
}

impl Equivalence {
    pub fn witness_matrix(&self) -> Option<Matrix3<f64>> {
        self.witness.map(crate::linalg::mat)
    }
}

pub fn equivalent(family: FamilyTag, h1: &MetricTensor, h2: &MetricTensor) -> Result<Equivalence> {
    let first = canonical_form(family, h1)?;
    let second = canonical_form(family, h2)?;
    let same = first.form_id == second.form_id && same_params(&first, &second, &h1.tolerance);
    let witness = if same {
        let inv = second
            .witness
            .try_inverse()
            .ok_or_else(|| Error::Internal("witness is singular".into()))?;
        Some(crate::linalg::rows(&(first.witness * inv)))
    } else {
        None
    };
    Ok(Equivalence {
        equivalent: same,
        witness,
        first,
        second,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConstantCurvature {
    Flat,
    PositiveConstant,
    NegativeConstant,
    NonConstant,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantCurvatureReport {
    pub class: ConstantCurvature,
    /// The constant sectional curvature, when there is one.
    pub kappa: Option<f64>,
    pub form: CanonicalForm,
}

/// Classification read off the canonical form, with the constant value.
fn class_of_form(family: FamilyTag, cf: &CanonicalForm) -> (ConstantCurvature, Option<f64>) {
    let mu = cf.params.mu.unwrap_or(f64::NAN);
    let id = cf.form_id;
    match (id.regime, id.case) {
        (Regime::GI, 3) | (Regime::G1, 1) => (ConstantCurvature::Flat, Some(0.0)),
        (Regime::GcLt1, 1) if family.c().is_some_and(|c| c.abs() <= 1e-12) => (ConstantCurvature::Flat, Some(0.0)),
        (Regime::GI, 2) => (ConstantCurvature::PositiveConstant, Some(1.0 / mu)),
        // ν = c makes Ric = (2/μ)I, and a 3-dimensional Einstein metric has
        // constant curvature
        (Regime::GcGt1, 3)
            if family
                .c()
                .zip(cf.params.nu)
                .is_some_and(|(c, nu)| (nu - c).abs() <= 1e-9 * c) =>
        {
            (ConstantCurvature::PositiveConstant, Some(1.0 / mu))
        }
        (Regime::GI, 1) | (Regime::GcLt1, 7) => (ConstantCurvature::NegativeConstant, Some(-1.0 / mu)),
        // at w = 1 both blocks collapse to Ric = −(2/μ)I
        (Regime::GcLt1, 8 | 9) if family.c().is_some_and(|c| c.abs() <= 1e-12) => {
            (ConstantCurvature::NegativeConstant, Some(-1.0 / mu))
        }
        _ => (ConstantCurvature::NonConstant, None),
    }
}

/// Largest deviation of R from the constant-curvature model
/// R_uv w = k(h(u,w)v − h(v,w)u) over frame triples.
pub fn constant_curvature_residual(geo: &FrameGeometry, k: f64) -> f64 {
    let e = [nalgebra::Vector3::x(), nalgebra::Vector3::y(), nalgebra::Vector3::z()];
    let mut worst = 0.0_f64;
    for u in &e {
        for v in &e {
            for w in &e {
                let model = (v * lorentz_dot(u, w) - u * lorentz_dot(v, w)) * k;
                worst = worst.max((geo.riemann(u, v, w) - model).amax());
            }
        }
    }
    worst
}

pub fn constant_curvature_class(family: FamilyTag, h: &MetricTensor) -> Result<ConstantCurvatureReport> {
    let form = canonical_form(family, h)?;
    let (class, kappa) = class_of_form(family, &form);

    let hw = to_working_basis(family, h)?;
    let geo = FrameGeometry::new(&working_algebra(family)?, &orthonormal_frame(&hw)?, hw.tolerance)?;
    let k = geo.frame_sectionals()[0];
    let size = geo.ricci_tensor().amax();
    let engine_constant = constant_curvature_residual(&geo, k) <= 1e-8 * (1.0 + size);
    let agrees = match kappa {
        Some(kf) => engine_constant && (kf - k).abs() <= 1e-8 * (1.0 + kf.abs()),
        None => !engine_constant,
    };
    if !agrees {
        return Err(Error::Internal(format!(
            "{}: canonical form says {class:?} but the curvature engine finds sectional curvature {k} (constant: {engine_constant})",
            form.form_id
        )));
    }
    Ok(ConstantCurvatureReport { class, kappa, form })
}
