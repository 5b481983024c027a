//! Three-dimensional real Lie algebras given by structure constants,
//! and the non-unimodular families g_I and g_c in their natural and
//! adapted bases.

use std::fmt;

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Values of c closer than this to 1 are treated as the c = 1 family.
const C_ONE_EPS: f64 = 1e-12;

/// Which non-unimodular family an algebra belongs to. Serialises as
/// `"GI"` or `{"Gc": c}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum FamilyTag {
    GI,
    Gc(f64),
}

/// The four classification regimes: each has its own list of canonical forms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Regime {
    GI,
    GcGt1,
    G1,
    GcLt1,
}

impl Regime {
    pub fn prefix(self) -> &'static str {
        match self {
            Regime::GI => "GI",
            Regime::GcGt1 => "Gc_gt1",
            Regime::G1 => "G1",
            Regime::GcLt1 => "Gc_lt1",
        }
    }

    /// Basis in which canonical matrices and reference frames are expressed.
    pub fn working_basis(self) -> BasisLabel {
        match self {
            Regime::GI | Regime::GcGt1 => BasisLabel::Natural,
            Regime::G1 => BasisLabel::QAdapted,
            Regime::GcLt1 => BasisLabel::PAdapted,
        }
    }
}

impl FamilyTag {
    pub fn validate(self) -> Result<Self> {
        match self {
            FamilyTag::Gc(c) if !c.is_finite() => {
                Err(Error::InvalidFamily(format!("c = {c} is not finite")))
            }
            _ => Ok(self),
        }
    }

    pub fn c(self) -> Option<f64> {
        match self {
            FamilyTag::GI => None,
            FamilyTag::Gc(c) => Some(c),
        }
    }

    /// w = √(1−c), defined for c ≤ 1.
    pub fn w(self) -> Option<f64> {
        match self.regime() {
            Regime::G1 => Some(0.0),
            Regime::GcLt1 => self.c().map(|c| (1.0 - c).sqrt()),
            _ => None,
        }
    }

    /// z = √(c−1), defined for c ≥ 1.
    pub fn z(self) -> Option<f64> {
        match self.regime() {
            Regime::G1 => Some(0.0),
            Regime::GcGt1 => self.c().map(|c| (c - 1.0).sqrt()),
            _ => None,
        }
    }

    pub fn regime(self) -> Regime {
        match self {
            FamilyTag::GI => Regime::GI,
            FamilyTag::Gc(c) if (c - 1.0).abs() <= C_ONE_EPS => Regime::G1,
            FamilyTag::Gc(c) if c > 1.0 => Regime::GcGt1,
            FamilyTag::Gc(_) => Regime::GcLt1,
        }
    }
}

impl fmt::Display for FamilyTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilyTag::GI => write!(f, "GI"),
            FamilyTag::Gc(c) => write!(f, "Gc(c={c})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BasisLabel {
    #[serde(rename = "natural")]
    Natural,
    #[serde(rename = "Q_adapted")]
    QAdapted,
    #[serde(rename = "P_adapted")]
    PAdapted,
    #[serde(rename = "custom")]
    Custom,
}

impl fmt::Display for BasisLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BasisLabel::Natural => "natural",
            BasisLabel::QAdapted => "Q_adapted",
            BasisLabel::PAdapted => "P_adapted",
            BasisLabel::Custom => "custom",
        })
    }
}

/// Structure constants `c[i][j][k]` with `[e_i, e_j] = Σ_k c[i][j][k] e_k`.
/// Antisymmetry in (i, j) holds by construction: only i < j is ever set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LieAlgebra3 {
    structure_constants: [[[f64; 3]; 3]; 3],
    pub family: Option<FamilyTag>,
    pub basis_label: BasisLabel,
}

impl LieAlgebra3 {
    /// Builds an algebra from the three brackets `[e1,e2]`, `[e1,e3]`, `[e2,e3]`.
    pub fn from_brackets(
        e12: [f64; 3],
        e13: [f64; 3],
        e23: [f64; 3],
        family: Option<FamilyTag>,
        basis_label: BasisLabel,
    ) -> Self {
        let mut c = [[[0.0; 3]; 3]; 3];
        for (i, j, v) in [(0, 1, e12), (0, 2, e13), (1, 2, e23)] {
            for k in 0..3 {
                c[i][j][k] = v[k];
                c[j][i][k] = -v[k];
            }
        }
        Self {
            structure_constants: c,
            family,
            basis_label,
        }
    }

    pub fn abelian() -> Self {
        Self::from_brackets([0.0; 3], [0.0; 3], [0.0; 3], None, BasisLabel::Custom)
    }

    /// c^k_ij, zero-based indices.
    pub fn constant(&self, i: usize, j: usize, k: usize) -> f64 {
        self.structure_constants[i][j][k]
    }

    pub fn constants(&self) -> &[[[f64; 3]; 3]; 3] {
        &self.structure_constants
    }

    pub fn bracket(&self, u: &Vector3<f64>, v: &Vector3<f64>) -> Vector3<f64> {
        let mut w = Vector3::zeros();
        for i in 0..3 {
            for j in 0..3 {
                let uv = u[i] * v[j];
                if uv != 0.0 {
                    for k in 0..3 {
                        w[k] += uv * self.structure_constants[i][j][k];
                    }
                }
            }
        }
        w
    }

    /// Largest |Jacobi(e_i, e_j, e_k)| over all basis triples.
    pub fn jacobi_residual(&self) -> f64 {
        let e = [Vector3::x(), Vector3::y(), Vector3::z()];
        let mut worst = 0.0_f64;
        for a in &e {
            for b in &e {
                for c in &e {
                    let j = self.bracket(&self.bracket(a, b), c)
                        + self.bracket(&self.bracket(b, c), a)
                        + self.bracket(&self.bracket(c, a), b);
                    worst = worst.max(j.amax());
                }
            }
        }
        worst
    }

    fn max_constant(&self) -> f64 {
        self.structure_constants
            .iter()
            .flatten()
            .flatten()
            .fold(0.0_f64, |a, x| a.max(x.abs()))
    }
}

/// Natural-basis algebra (x, y, z) or the adapted basis (x1, x2, x3).
pub fn make_family_algebra(tag: FamilyTag, basis: BasisLabel) -> Result<LieAlgebra3> {
    let tag = tag.validate()?;
    let mismatch = || Error::BasisMismatch {
        family: tag.to_string(),
        basis: basis.to_string(),
    };
    let z = [0.0; 3];
    // [e1,e3] = -[e3,e1], [e2,e3] = -[e3,e2]
    let (e13, e23) = match (tag, basis) {
        (FamilyTag::GI, BasisLabel::Natural) => ([-1.0, 0.0, 0.0], [0.0, -1.0, 0.0]),
        (FamilyTag::Gc(c), BasisLabel::Natural) => ([0.0, -1.0, 0.0], [c, -2.0, 0.0]),
        (FamilyTag::Gc(_), BasisLabel::QAdapted) if tag.regime() == Regime::G1 => {
            ([-1.0, 0.0, 0.0], [-1.0, -1.0, 0.0])
        }
        (FamilyTag::Gc(c), BasisLabel::PAdapted) if tag.regime() == Regime::GcLt1 => {
            let w = (1.0 - c).sqrt();
            ([-(1.0 + w), 0.0, 0.0], [0.0, -(1.0 - w), 0.0])
        }
        _ => return Err(mismatch()),
    };
    Ok(LieAlgebra3::from_brackets(z, e13, e23, Some(tag), basis))
}

fn check_invertible(s: &Matrix3<f64>) -> Result<Matrix3<f64>> {
    let det = s.determinant();
    // Hadamard bound: |det| ≤ Π‖col‖, so the ratio ignores column scaling
    // and accepts exact shears with large translations
    let scale = s.column_iter().map(|c| c.norm()).product::<f64>().max(f64::MIN_POSITIVE);
    if !det.is_finite() || det.abs() <= 1e-13 * scale {
        return Err(Error::Singular(det));
    }
    s.try_inverse().ok_or(Error::Singular(det))
}

/// Re-expresses the algebra in the basis e'_j = Σ_a S_aj e_a (column j of S).
/// The result carries the `custom` basis label.
pub fn change_basis(alg: &LieAlgebra3, s: &Matrix3<f64>) -> Result<LieAlgebra3> {
    let s_inv = check_invertible(s)?;
    let cols: [Vector3<f64>; 3] = [s.column(0).into(), s.column(1).into(), s.column(2).into()];
    let mut out = [[0.0; 3]; 3];
    for (slot, (i, j)) in [(0, 1), (0, 2), (1, 2)].into_iter().enumerate() {
        let w = s_inv * alg.bracket(&cols[i], &cols[j]);
        out[slot] = [w[0], w[1], w[2]];
    }
    Ok(LieAlgebra3::from_brackets(
        out[0],
        out[1],
        out[2],
        alg.family,
        BasisLabel::Custom,
    ))
}

/// Default relative tolerance for [`is_automorphism`].
pub const AUTOMORPHISM_TOL: f64 = 1e-9;

/// A[e_i,e_j] = [A e_i, A e_j] for all i < j, relative to the size of A.
pub fn is_automorphism(alg: &LieAlgebra3, a: &Matrix3<f64>) -> bool {
    is_automorphism_tol(alg, a, AUTOMORPHISM_TOL)
}

pub fn is_automorphism_tol(alg: &LieAlgebra3, a: &Matrix3<f64>, tol: f64) -> bool {
    if check_invertible(a).is_err() {
        return false;
    }
    let na = crate::linalg::max_abs(a).max(1.0);
    let scale = na * na * alg.max_constant().max(1.0);
    let e = [Vector3::x(), Vector3::y(), Vector3::z()];
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        let lhs = a * alg.bracket(&e[i], &e[j]);
        let rhs = alg.bracket(&(a * e[i]), &(a * e[j]));
        if (lhs - rhs).amax() > tol * scale {
            return false;
        }
    }
    true
}
