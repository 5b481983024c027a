//! Levi-Civita connection and curvature of a left-invariant metric,
//! computed in an orthonormal frame (h = diag(1,1,−1) there).
//!
//! Sign convention: R_uv = ∇_[u,v] − [∇_u, ∇_v]. This is the negative of
//! the common R(u,v) = [∇_u,∇_v] − ∇_[u,v]; with it, the sectional
//! curvature is κ(u,v) = h(R_uv u, v) / (h(u,u)h(v,v) − h(u,v)²).

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::core::{change_basis, LieAlgebra3, OrthonormalFrame, ToleranceConfig};
use crate::error::{Error, Result};
use crate::linalg::{self, j21, lorentz_dot, mat3_rows};
use crate::oneill::{self, ComplexValue, ONeillClassification};

/// Components with respect to an orthonormal frame.
pub type FrameVector = Vector3<f64>;

const SIGNS: [f64; 3] = [1.0, 1.0, -1.0];

/// Γ^k_ij with ∇_{y_i} y_j = Σ_k Γ^k_ij y_k, stored as `gamma[i][j][k]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Connection {
    pub gamma: [[[f64; 3]; 3]; 3],
}

impl Connection {
    pub fn nabla(&self, u: &FrameVector, v: &FrameVector) -> FrameVector {
        let mut w = FrameVector::zeros();
        for i in 0..3 {
            for j in 0..3 {
                let uv = u[i] * v[j];
                if uv != 0.0 {
                    for k in 0..3 {
                        w[k] += uv * self.gamma[i][j][k];
                    }
                }
            }
        }
        w
    }
}

/// Koszul formula in an orthonormal frame:
/// Γ^k_ij = s_k · ½(h([y_i,y_j],y_k) + h([y_k,y_i],y_j) + h([y_k,y_j],y_i)).
pub fn levi_civita(frame_alg: &LieAlgebra3) -> Connection {
    let c = |i: usize, j: usize, k: usize| frame_alg.constant(i, j, k);
    let mut gamma = [[[0.0; 3]; 3]; 3];
    for (i, gi) in gamma.iter_mut().enumerate() {
        for (j, gij) in gi.iter_mut().enumerate() {
            for (k, g) in gij.iter_mut().enumerate() {
                let s = SIGNS;
                *g = s[k] * 0.5 * (s[k] * c(i, j, k) + s[j] * c(k, i, j) + s[i] * c(k, j, i));
            }
        }
    }
    Connection { gamma }
}

/// An algebra seen through an orthonormal frame: the frame's own structure
/// constants plus the connection, computed once.
#[derive(Debug, Clone)]
pub struct FrameGeometry {
    pub frame: OrthonormalFrame,
    pub frame_algebra: LieAlgebra3,
    pub connection: Connection,
    pub tolerance: ToleranceConfig,
}

impl FrameGeometry {
    pub fn new(alg: &LieAlgebra3, frame: &OrthonormalFrame, tolerance: ToleranceConfig) -> Result<Self> {
        let frame_algebra = change_basis(alg, frame.matrix())?;
        let connection = levi_civita(&frame_algebra);
        Ok(Self {
            frame: frame.clone(),
            frame_algebra,
            connection,
            tolerance,
        })
    }

    pub fn bracket(&self, u: &FrameVector, v: &FrameVector) -> FrameVector {
        self.frame_algebra.bracket(u, v)
    }

    /// R_uv w = ∇_[u,v] w − ∇_u ∇_v w + ∇_v ∇_u w.
    pub fn riemann(&self, u: &FrameVector, v: &FrameVector, w: &FrameVector) -> FrameVector {
        let n = |a: &FrameVector, b: &FrameVector| self.connection.nabla(a, b);
        n(&self.bracket(u, v), w) - n(u, &n(v, w)) + n(v, &n(u, w))
    }

    /// [ric]_ij = Σ_k s_k h(R_{y_i y_k} y_j, y_k).
    pub fn ricci_tensor(&self) -> Matrix3<f64> {
        let e = basis();
        let mut ric = Matrix3::zeros();
        for i in 0..3 {
            for j in 0..3 {
                ric[(i, j)] = (0..3)
                    .map(|k| SIGNS[k] * lorentz_dot(&self.riemann(&e[i], &e[k], &e[j]), &e[k]))
                    .sum();
            }
        }
        ric
    }

    pub fn sectional(&self, u: &FrameVector, v: &FrameVector) -> Result<f64> {
        let den = lorentz_dot(u, u) * lorentz_dot(v, v) - lorentz_dot(u, v).powi(2);
        let scale = (u.norm_squared() * v.norm_squared()).max(f64::MIN_POSITIVE);
        if den.abs() <= self.tolerance.abs_tol * scale {
            return Err(Error::LightlikePlane(den));
        }
        Ok(lorentz_dot(&self.riemann(u, v, u), v) / den)
    }

    /// (κ(y1,y2), κ(y2,y3), κ(y3,y1)).
    pub fn frame_sectionals(&self) -> [f64; 3] {
        let e = basis();
        let r = |a: usize, b: usize| lorentz_dot(&self.riemann(&e[a], &e[b], &e[a]), &e[b]);
        [r(0, 1), -r(1, 2), -r(0, 2)]
    }

    /// Sectional curvature of an orthogonal pair through the identity
    /// h(u,u)h(v,v)κ(u,v) = −(‖u×v‖²ρ/2 − ric(u×v, u×v)).
    pub fn milnor_sectional(&self, u: &FrameVector, v: &FrameVector) -> Result<f64> {
        let huv = lorentz_dot(u, v);
        let scale = u.norm() * v.norm();
        if huv.abs() > self.tolerance.abs_tol.max(1e-9) * scale.max(1.0) {
            return Err(Error::NotOrthogonal(huv));
        }
        let den = lorentz_dot(u, u) * lorentz_dot(v, v);
        if den.abs() <= self.tolerance.abs_tol * (scale * scale).max(f64::MIN_POSITIVE) {
            return Err(Error::LightlikePlane(den));
        }
        let ric = self.ricci_tensor();
        let rho = ricci_operator(&ric).trace();
        let w = cross(u, v);
        let ric_ww = (w.transpose() * ric * w)[0];
        Ok(-(lorentz_dot(&w, &w) * rho / 2.0 - ric_ww) / den)
    }
}

fn basis() -> [FrameVector; 3] {
    [FrameVector::x(), FrameVector::y(), FrameVector::z()]
}

/// [Ric] = J·[ric].
pub fn ricci_operator(ric: &Matrix3<f64>) -> Matrix3<f64> {
    j21() * ric
}

pub fn scalar_curvature(ricci_operator: &Matrix3<f64>) -> f64 {
    ricci_operator.trace()
}

/// Lorentzian cross product: y1×y2 = −y3, y2×y3 = y1, y3×y1 = y2.
pub fn cross(u: &FrameVector, v: &FrameVector) -> FrameVector {
    FrameVector::new(
        u[1] * v[2] - u[2] * v[1],
        u[2] * v[0] - u[0] * v[2],
        -(u[0] * v[1] - u[1] * v[0]),
    )
}

/// All curvature data of a metric in one frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvatureReport {
    pub frame: OrthonormalFrame,
    pub connection: Connection,
    #[serde(with = "mat3_rows")]
    pub ric_matrix: Matrix3<f64>,
    #[serde(with = "mat3_rows")]
    pub ricci_operator: Matrix3<f64>,
    pub scalar: f64,
    /// (κ(y1,y2), κ(y2,y3), κ(y3,y1)).
    pub sectional: [f64; 3],
    pub principal_ricci: [ComplexValue; 3],
    pub oneill: ONeillClassification,
}

impl CurvatureReport {
    /// `alg` and `frame` must share the same ambient basis.
    pub fn compute(alg: &LieAlgebra3, frame: &OrthonormalFrame, tol: ToleranceConfig) -> Result<Self> {
        let geo = FrameGeometry::new(alg, frame, tol)?;
        let ric_matrix = linalg::symmetrize(&geo.ricci_tensor());
        let ricci_operator = ricci_operator(&ric_matrix);
        let oneill = oneill::classify_self_adjoint(&ricci_operator, &tol)?;
        Ok(Self {
            frame: frame.clone(),
            sectional: geo.frame_sectionals(),
            scalar: scalar_curvature(&ricci_operator),
            principal_ricci: oneill::principal_values(&ricci_operator, oneill.type_tag).map(ComplexValue::from),
            connection: geo.connection,
            ric_matrix,
            ricci_operator,
            oneill,
        })
    }

    /// ρ − 2(κ12 + κ23 + κ31).
    pub fn scalar_identity_residual(&self) -> f64 {
        self.scalar - 2.0 * self.sectional.iter().sum::<f64>()
    }
}
