//! Lorentzian metrics of signature (+,+,−) and their orthonormal frames.

use nalgebra::{Matrix3, SymmetricEigen, Vector3};
use serde::{Deserialize, Serialize};

use super::algebra::BasisLabel;
use super::tolerance::ToleranceConfig;
use crate::error::{Error, Result};
use crate::linalg::{self, j21, max_abs, mat3_rows};

/// A validated symmetric matrix [h] of signature (+,+,−).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricTensor {
    #[serde(with = "mat3_rows")]
    entries: Matrix3<f64>,
    pub basis_label: BasisLabel,
    pub tolerance: ToleranceConfig,
}

/// Everything `validate_metric` learns about a candidate matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignatureDiagnostics {
    pub symmetry_residual: f64,
    pub det: f64,
    /// Ascending.
    pub eigenvalues: [f64; 3],
    /// Counts of (positive, zero, negative) eigenvalues.
    pub signature: (usize, usize, usize),
    pub accepted: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

impl SignatureDiagnostics {
    pub fn signature_string(&self) -> String {
        let (p, z, n) = self.signature;
        let signs: Vec<&str> = std::iter::repeat_n("+", p)
            .chain(std::iter::repeat_n("0", z))
            .chain(std::iter::repeat_n("-", n))
            .collect();
        format!("({})", signs.join(","))
    }
}

/// Inspects a candidate metric. Rejection is reported in the diagnostics,
/// not as an error; only non-finite input is an error.
pub fn validate_metric(m: &Matrix3<f64>, tol: &ToleranceConfig) -> Result<SignatureDiagnostics> {
    if !linalg::is_finite(m) {
        return Err(Error::NonFinite);
    }
    let symmetry_residual = max_abs(&(m - m.transpose()));
    let sym = linalg::symmetrize(m);
    let mut ev: Vec<f64> = SymmetricEigen::new(sym).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    let eigenvalues = [ev[0], ev[1], ev[2]];
    let scale = eigenvalues.iter().fold(0.0_f64, |a, x| a.max(x.abs()));
    let thr = tol.classification_tol * scale;
    let pos = eigenvalues.iter().filter(|x| **x > thr).count();
    let neg = eigenvalues.iter().filter(|x| **x < -thr).count();
    let signature = (pos, 3 - pos - neg, neg);
    let det = m.determinant();

    let mut d = SignatureDiagnostics {
        symmetry_residual,
        det,
        eigenvalues,
        signature,
        accepted: false,
        reason: None,
    };
    d.reason = if symmetry_residual > tol.abs_tol * (1.0 + max_abs(m)) {
        Some(format!("not symmetric (residual {symmetry_residual:e})"))
    } else if scale == 0.0 || signature.1 > 0 {
        Some(format!("degenerate metric, signature {}", d.signature_string()))
    } else if signature != (2, 0, 1) {
        Some(format!("signature {}", d.signature_string()))
    } else if det >= 0.0 {
        Some(format!("det = {det:e} is not negative"))
    } else {
        None
    };
    d.accepted = d.reason.is_none();
    Ok(d)
}

impl MetricTensor {
    /// Validates and symmetrises `m` (asymmetry within `abs_tol` is removed).
    pub fn new(m: Matrix3<f64>, basis_label: BasisLabel, tolerance: ToleranceConfig) -> Result<Self> {
        let d = validate_metric(&m, &tolerance)?;
        if !d.accepted {
            return Err(if d.symmetry_residual > tolerance.abs_tol * (1.0 + max_abs(&m)) {
                Error::NotSymmetric(d.symmetry_residual)
            } else if d.signature.1 > 0 {
                Error::DegenerateMetric {
                    det: d.det,
                    eigenvalues: d.eigenvalues,
                }
            } else {
                Error::WrongSignature {
                    signature: d.signature_string(),
                    eigenvalues: d.eigenvalues,
                }
            });
        }
        Ok(Self {
            entries: linalg::symmetrize(&m),
            basis_label,
            tolerance,
        })
    }

    pub fn from_rows(rows: [[f64; 3]; 3], basis_label: BasisLabel) -> Result<Self> {
        Self::new(linalg::mat(rows), basis_label, ToleranceConfig::default())
    }

    pub fn j21() -> Self {
        Self::new(j21(), BasisLabel::Custom, ToleranceConfig::default()).expect("J is Lorentzian")
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.entries
    }

    pub fn inner(&self, u: &Vector3<f64>, v: &Vector3<f64>) -> f64 {
        (u.transpose() * self.entries * v)[0]
    }

    pub fn with_basis(mut self, basis_label: BasisLabel) -> Self {
        self.basis_label = basis_label;
        self
    }
}

/// Sᵗ[h]S. The basis label is kept; relabel with [`MetricTensor::with_basis`]
/// when S is a change of basis rather than an automorphism.
pub fn pull_back_metric(h: &MetricTensor, s: &Matrix3<f64>) -> Result<MetricTensor> {
    let det = s.determinant();
    let scale = max_abs(s).max(f64::MIN_POSITIVE).powi(3);
    if !det.is_finite() || det.abs() <= 1e-13 * scale {
        return Err(Error::Singular(det));
    }
    MetricTensor::new(s.transpose() * h.entries * s, h.basis_label, h.tolerance)
}

/// Columns are the frame vectors y_1, y_2, y_3 in ambient coordinates,
/// with h(y_i, y_j) = diag(1, 1, −1).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrthonormalFrame {
    #[serde(with = "mat3_rows")]
    columns: Matrix3<f64>,
}

impl OrthonormalFrame {
    /// Wraps `s` after checking the Gram condition against `h`.
    pub fn new(s: Matrix3<f64>, h: &MetricTensor) -> Result<Self> {
        let r = gram_residual(&s, h.matrix());
        let tol = h.tolerance.abs_tol.max(1e-9) * (1.0 + max_abs(h.matrix()) * max_abs(&s).powi(2));
        if r > tol {
            return Err(Error::Internal(format!(
                "frame is not orthonormal (Gram residual {r:e})"
            )));
        }
        Ok(Self { columns: s })
    }

    /// Wraps `s` without checking; for frames already known to be orthonormal.
    pub fn from_columns_unchecked(s: Matrix3<f64>) -> Self {
        Self { columns: s }
    }

    pub fn identity() -> Self {
        Self {
            columns: Matrix3::identity(),
        }
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.columns
    }

    pub fn vector(&self, j: usize) -> Vector3<f64> {
        self.columns.column(j).into()
    }
}

/// ‖Sᵗ h S − J‖_∞.
pub fn gram_residual(s: &Matrix3<f64>, h: &Matrix3<f64>) -> f64 {
    max_abs(&(s.transpose() * h * s - j21()))
}

/// Orthonormal frame built from the timelike eigenvector of [h] (scaled by
/// 1/√|λ|) followed by h-Gram–Schmidt of the standard basis inside its
/// orthogonal complement. This makes the choice canonical: J gives the
/// identity and diagonal metrics give diagonal frames.
pub fn orthonormal_frame(h: &MetricTensor) -> Result<OrthonormalFrame> {
    let m = h.matrix();
    let eig = SymmetricEigen::new(*m);
    let (idx, lam) = eig
        .eigenvalues
        .iter()
        .copied()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("three eigenvalues");
    let mut y3: Vector3<f64> = eig.eigenvectors.column(idx).into();
    y3 /= (-lam).sqrt();
    canonical_sign(&mut y3);

    let hy3 = m * y3;
    let project = |e: Vector3<f64>| e + hy3.dot(&e) * y3;
    let q = |v: &Vector3<f64>| v.dot(&(m * v));
    let basis = [Vector3::x(), Vector3::y(), Vector3::z()];

    let cands: Vec<Vector3<f64>> = basis.iter().map(|e| project(*e)).collect();
    let best1 = cands.iter().map(q).fold(0.0_f64, f64::max);
    let v1 = *cands
        .iter()
        .find(|v| q(v) > 0.25 * best1)
        .expect("complement of a timelike vector is spacelike");
    let y1 = v1 / q(&v1).sqrt();
    let hy1 = m * y1;
    let cands2: Vec<Vector3<f64>> = cands.iter().map(|v| v - hy1.dot(v) * y1).collect();
    let best2 = cands2.iter().map(q).fold(0.0_f64, f64::max);
    let v2 = *cands2
        .iter()
        .find(|v| q(v) > 0.25 * best2)
        .expect("two-dimensional spacelike complement");
    let y2 = v2 / q(&v2).sqrt();

    OrthonormalFrame::new(Matrix3::from_columns(&[y1, y2, y3]), h)
}

/// Flips `v` so that its first component of (near-)maximal magnitude is positive.
fn canonical_sign(v: &mut Vector3<f64>) {
    let m = v.amax();
    if let Some(x) = v.iter().find(|x| x.abs() >= m * (1.0 - 1e-9)) {
        if *x < 0.0 {
            *v = -*v;
        }
    }
}
