//! Automorphism groups of g_I and g_c, in the natural basis and in the
//! adapted bases used for c = 1 and c < 1.

use nalgebra::{Matrix2, Matrix3};
use serde::{Deserialize, Serialize};

use super::algebra::{FamilyTag, Regime};
use crate::error::{Error, Result};
use crate::linalg::mat;

/// Parameters of one automorphism. `translation` is the (∗, ∗) column.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum AutomorphismParams {
    /// g_I: invertible 2×2 block.
    GI { g: [[f64; 2]; 2], translation: [f64; 2] },
    /// g_c natural basis: block [[β−α, −cα], [α, β+α]].
    Gc { alpha: f64, beta: f64, translation: [f64; 2] },
}

/// The block matrix [[G, t], [0, 1]].
pub fn automorphism_matrix(tag: FamilyTag, p: &AutomorphismParams) -> Result<Matrix3<f64>> {
    let (g, t) = match (tag, p) {
        (FamilyTag::GI, AutomorphismParams::GI { g, translation }) => {
            let det = g[0][0] * g[1][1] - g[0][1] * g[1][0];
            if det == 0.0 || !det.is_finite() {
                return Err(Error::InvalidAutomorphism(format!("det G = {det}")));
            }
            (*g, *translation)
        }
        (FamilyTag::Gc(c), AutomorphismParams::Gc { alpha, beta, translation }) => {
            let inv = beta * beta + (c - 1.0) * alpha * alpha;
            if inv == 0.0 || !inv.is_finite() {
                return Err(Error::InvalidAutomorphism(format!(
                    "beta^2 + (c-1) alpha^2 = {inv}"
                )));
            }
            (
                [[beta - alpha, -c * alpha], [*alpha, beta + alpha]],
                *translation,
            )
        }
        _ => {
            return Err(Error::InvalidAutomorphism(format!(
                "parameters do not match family {tag}"
            )))
        }
    };
    Ok(block(Matrix2::new(g[0][0], g[0][1], g[1][0], g[1][1]), t))
}

/// [[G, t], [0, 1]] for a 2×2 block G and translation t.
pub fn block(g: Matrix2<f64>, t: [f64; 2]) -> Matrix3<f64> {
    mat([
        [g[(0, 0)], g[(0, 1)], t[0]],
        [g[(1, 0)], g[(1, 1)], t[1]],
        [0.0, 0.0, 1.0],
    ])
}

/// Pure translation x3 ↦ x3 + a x1 + b x2 (an automorphism of every family).
pub fn translation(a: f64, b: f64) -> Matrix3<f64> {
    block(Matrix2::identity(), [a, b])
}

/// Q = [id]_{natural → Q-adapted} for c = 1.
pub fn q_matrix() -> Matrix3<f64> {
    mat([[-2.0, -1.0, 0.0], [1.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
}

/// P = [id]_{natural → P-adapted} for c < 1, w = √(1−c).
pub fn p_matrix(w: f64) -> Matrix3<f64> {
    let d = 2.0 * w;
    mat([
        [1.0 / d, (1.0 + w) / d, 0.0],
        [-1.0 / d, (w - 1.0) / d, 0.0],
        [0.0, 0.0, 1.0],
    ])
}

/// Matrix whose columns are the adapted basis vectors in natural
/// coordinates (Q⁻¹ or P⁻¹); identity for GI and c > 1.
pub fn adapted_vectors(tag: FamilyTag) -> Matrix3<f64> {
    match tag.regime() {
        Regime::G1 => mat([[-1.0, -1.0, 0.0], [1.0, 2.0, 0.0], [0.0, 0.0, 1.0]]),
        Regime::GcLt1 => {
            let w = tag.w().expect("c < 1");
            mat([[w - 1.0, -(1.0 + w), 0.0], [1.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
        }
        _ => Matrix3::identity(),
    }
}
