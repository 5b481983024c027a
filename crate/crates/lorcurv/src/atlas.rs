//! Reference orthonormal frames and closed-form curvature for every
//! canonical form, cross-checked against the curvature engine, plus
//! CSV/JSON table generation over parameter grids.
//!
//! Closed forms are stored in their corrected form. Cells whose printed
//! value is known to be wrong carry the printed value in
//! [`ClosedForm::known_typos`] so that reports can show both.

use std::io::Write;

use nalgebra::{Matrix3, Vector3};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classify::{canonical_matrix, check_domain, working_algebra, FormId, ParamName, Params};
use crate::core::{FamilyTag, MetricTensor, OrthonormalFrame, Regime, ToleranceConfig};
use crate::curvature::CurvatureReport;
use crate::error::{Error, Result};
use crate::io;
use crate::linalg::{j21, mat, mat3_rows};
use crate::oneill::ONeillType;

/// Relative agreement demanded between closed form and engine.
pub const CROSS_CHECK_TOL: f64 = 1e-7;

fn cols(c: [[f64; 3]; 3]) -> Matrix3<f64> {
    Matrix3::from_columns(&c.map(|v| Vector3::new(v[0], v[1], v[2])))
}

fn p(params: &Params, n: ParamName) -> f64 {
    params.get(n).unwrap_or(f64::NAN)
}

/// The orthonormal frame {y_i} attached to each canonical form, as
/// columns in the working basis.
pub fn paper_frame(family: FamilyTag, form: FormId, params: &Params) -> Result<OrthonormalFrame> {
    let h = canonical_matrix(family, form, params)?;
    let (mu, nu, tau, eta) = (
        p(params, ParamName::Mu),
        p(params, ParamName::Nu),
        p(params, ParamName::Tau),
        p(params, ParamName::Eta),
    );
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let (sm, sn) = (1.0 / mu.sqrt(), 1.0 / nu.sqrt());
    let s = match (form.regime, form.case, form.sub) {
        (Regime::GI, 1, _) => cols([[1., 0., 0.], [0., 0., sm], [0., 1., 0.]]),
        (Regime::GI, 2, _) => cols([[1., 0., 0.], [0., 1., 0.], [0., 0., sm]]),
        (Regime::GI, 3, _) => cols([[1., 0., 0.], [0., r, r], [0., r, -r]]),
        (Regime::GcGt1, 1, _) => cols([[sm, 0., 0.], [0., r, r], [0., r, -r]]),
        (Regime::GcGt1, 2, _) => {
            let t = 1.0 / (1.0 - tau).sqrt();
            cols([[0., 0., sm], [1., 0., 0.], [t, -t, 0.]])
        }
        (Regime::GcGt1, 3, _) => {
            let t = 1.0 / (nu - 1.0).sqrt();
            cols([[1., 0., 0.], [t, -t, 0.], [0., 0., sm]])
        }
        (Regime::G1, 1, _) => cols([[0., sm, 0.], [r, 0., r], [r, 0., -r]]),
        (Regime::G1, 2, _) => cols([[sm, 0., 0.], [0., r, r], [0., r, -r]]),
        (Regime::G1, 3, _) => cols([[1., 0., 0.], [0., 0., sm], [0., sn, 0.]]),
        (Regime::G1, 4, _) => cols([[1., 0., 0.], [0., sn, 0.], [0., 0., sm]]),
        (Regime::G1, 5, _) => cols([[0., sn, 0.], [0., 0., sm], [1., 0., 0.]]),
        (Regime::G1, 6, _) => cols([[0., 0., sm], [r, r, 0.], [r, -r, 0.]]),
        (Regime::G1, 7, _) => cols([[0., 0., sm], [r, -r, 0.], [r, r, 0.]]),
        (Regime::GcLt1, 1, _) => cols([[0., 1., 0.], [r, 0., r], [r, 0., -r]]),
        (Regime::GcLt1, 2, _) => cols([[1., 0., 0.], [0., r, r], [0., r, -r]]),
        (Regime::GcLt1, 3, _) => {
            let k = 1.0 / (2.0 * mu);
            cols([[1., 0., 0.], [1., -1., -k], [1., -1., k]])
        }
        (Regime::GcLt1, 4, _) => cols([[1., 0., 0.], [0., 1., 0.], [0., 0., sm]]),
        (Regime::GcLt1, 5, _) => cols([[1., 0., 0.], [0., 0., sm], [0., 1., 0.]]),
        (Regime::GcLt1, 6, _) => cols([[0., 1., 0.], [0., 0., sm], [1., 0., 0.]]),
        (Regime::GcLt1, 7, _) => cols([[0., 0., sm], [r, r, 0.], [r, -r, 0.]]),
        (Regime::GcLt1, 8, _) => cols([[0., 0., sm], [0., 1., 0.], [1., -1., 0.]]),
        (Regime::GcLt1, 9, _) => cols([[0., 0., sm], [1., 1., 0.], [0., 1., 0.]]),
        (Regime::GcLt1, 10, 1) => {
            let t = 1.0 / (1.0 - tau).sqrt();
            cols([[1., 0., 0.], [0., 0., sn], [t, -t, 0.]])
        }
        (Regime::GcLt1, 10, _) => {
            let t = 1.0 / (tau - 1.0).sqrt();
            cols([[1., 0., 0.], [t, -t, 0.], [0., 0., sn]])
        }
        (Regime::GcLt1, 11, _) => {
            let t = 1.0 / (1.0 - eta).sqrt();
            cols([[0., 0., sm], [t, t, 0.], [1., 0., 0.]])
        }
        _ => return Err(Error::OutOfDomain(format!("no frame for {form}"))),
    };
    let metric = MetricTensor::new(h, family.regime().working_basis(), ToleranceConfig::default())?;
    OrthonormalFrame::new(s, &metric)
}

/// A cell whose printed value differs from the corrected one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnownTypo {
    /// "Ric[i][j]" (1-based), "k31", or "type".
    pub cell: String,
    /// The printed value, `None` when it cannot be evaluated.
    pub printed: Option<f64>,
    /// The printed type, for type-column cells.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub printed_type: Option<ONeillType>,
    pub corrected: Option<f64>,
}

/// Ricci operator, scalar curvature, frame sectional curvatures and
/// O'Neill type evaluated from the closed-form tables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClosedForm {
    #[serde(with = "mat3_rows")]
    pub ricci_operator: Matrix3<f64>,
    #[serde(with = "mat3_rows")]
    pub ric_matrix: Matrix3<f64>,
    pub scalar: f64,
    /// (κ(y1,y2), κ(y2,y3), κ(y3,y1)).
    pub sectional: [f64; 3],
    #[serde(rename = "type")]
    pub oneill: ONeillType,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub known_typos: Vec<KnownTypo>,
}

fn typo(cell: &str, printed: Option<f64>, corrected: f64) -> KnownTypo {
    KnownTypo {
        cell: cell.into(),
        printed,
        printed_type: None,
        corrected: Some(corrected),
    }
}

/// Sign trichotomy with an exact-arithmetic-scale zero band.
fn trichotomy(x: f64, scale: f64) -> ONeillType {
    ONeillType::from_trichotomy(x, 1e-12 * (1.0 + scale))
}

pub fn closed_form_report(family: FamilyTag, form: FormId, params: &Params) -> Result<ClosedForm> {
    check_domain(family, form, params)?;
    let (mu, nu, tau, eta) = (
        p(params, ParamName::Mu),
        p(params, ParamName::Nu),
        p(params, ParamName::Tau),
        p(params, ParamName::Eta),
    );
    let c = family.c().unwrap_or(f64::NAN);
    let w = family.w().unwrap_or(f64::NAN);
    let w_is_one = (w - 1.0).abs() <= 1e-12;
    let diag = |a: f64, b: f64, d: f64| mat([[a, 0., 0.], [0., b, 0.], [0., 0., d]]);
    let mut typos = Vec::new();
    use ONeillType::*;
    let (ric, rho, k, ty): (Matrix3<f64>, f64, [f64; 3], ONeillType) = match (form.regime, form.case, form.sub) {
        (Regime::GI, 1, _) => (diag(-2. / mu, -2. / mu, -2. / mu), -6. / mu, [-1. / mu; 3], T11_1),
        (Regime::GI, 2, _) => (diag(2. / mu, 2. / mu, 2. / mu), 6. / mu, [1. / mu; 3], T11_1),
        (Regime::GI, 3, _) => (Matrix3::zeros(), 0., [0.; 3], T11_1),

        (Regime::GcGt1, 1, _) => (
            mat([
                [-c * c * mu / 2., 0., 0.],
                [0., c * (c * mu + 1.) / 2., -c / 2.],
                [0., c / 2., c * (c * mu - 1.) / 2.],
            ]),
            c * c * mu / 2.,
            [-c * (c * mu - 2.) / 4., 3. * c * c * mu / 4., -c * (c * mu + 2.) / 4.],
            T21,
        ),
        (Regime::GcGt1, 2, _) => {
            let t = tau;
            let d = 2. * (1. - t) * mu;
            let r23 = -(c - t) / (mu * (1. - t).sqrt());
            let k31_num = -(t * t + 2. * (c - 4.) * t - (3. * c * c - 4. * c - 4.));
            typos.push(typo("k31", Some(k31_num / ((1. - t) * mu)), k31_num / (2. * d)));
            (
                mat([
                    [(t * t + (4. - 2. * c) * t + c * c - 4.) / d, 0., 0.],
                    [0., (t * t + 2. * t - (c * c - 2. * c + 4.)) / d, r23],
                    [0., -r23, -(t * t - 6. * t - (c * c - 2. * c - 4.)) / d],
                ]),
                (t * t - 2. * (c - 6.) * t + c * c - 12.) / d,
                [
                    (3. * t * t - 2. * c * t - (c * c - 4. * c + 4.)) / (2. * d),
                    -(t * t - 2. * (c + 2.) * t + (c * c + 4.)) / (2. * d),
                    k31_num / (2. * d),
                ],
                trichotomy((c + t).powi(2) - 4. * c, c * c + t * t),
            )
        }
        (Regime::GcGt1, 3, _) => {
            let n = nu;
            let d = 2. * (n - 1.) * mu;
            let r11 = (n * n + 2. * n - (c * c - 2. * c + 4.)) / d;
            let r12 = (c - n) / (mu * (n - 1.).sqrt());
            typos.push(typo("Ric[1][1]", Some(-r11), r11));
            (
                mat([
                    [r11, r12, 0.],
                    [r12, -(n * n - 6. * n - (c * c - 2. * c - 4.)) / d, 0.],
                    [0., 0., ((n - c).powi(2) + 4. * (n - 1.)) / d],
                ]),
                ((n - c).powi(2) + 12. * (n - 1.)) / d,
                [
                    -(n * n - (2. * c + 4.) * n + (c * c + 4.)) / (2. * d),
                    -(n * n + 2. * (c - 4.) * n - (3. * c * c - 4. * c - 4.)) / (2. * d),
                    (3. * n * n - 2. * c * n - (c * c - 4. * c + 4.)) / (2. * d),
                ],
                T11_1,
            )
        }

        (Regime::G1, 1, _) => (Matrix3::zeros(), 0., [0.; 3], T11_1),
        (Regime::G1, 2, _) => {
            let a = (mu / 2.).sqrt();
            (
                mat([[-mu / 2., a, -a], [a, mu / 2., 0.], [a, 0., mu / 2.]]),
                mu / 2.,
                [-mu / 4., 3. * mu / 4., -mu / 4.],
                T21,
            )
        }
        (Regime::G1, 3, _) => {
            let d = 2. * mu * nu;
            let e = 1. / (mu * nu.sqrt());
            (
                mat([[-(4. * nu + 1.) / d, 0., -e], [0., (1. - 4. * nu) / d, 0.], [e, 0., (1. - 4. * nu) / d]]),
                (1. - 12. * nu) / d,
                [-(1. + 4. * nu) / (2. * d), (3. - 4. * nu) / (2. * d), -(1. + 4. * nu) / (2. * d)],
                trichotomy(1. - 4. * nu, nu),
            )
        }
        (Regime::G1, 4, _) => {
            let d = 2. * mu * nu;
            let e = 1. / (mu * nu.sqrt());
            let r = (4. * nu + 1.) / d;
            let printed = (4. * mu + 1.) / d;
            typos.push(typo("Ric[2][2]", Some(printed), r));
            typos.push(typo("Ric[3][3]", Some(printed), r));
            (
                mat([[(4. * nu - 1.) / d, e, 0.], [e, r, 0.], [0., 0., r]]),
                (1. + 12. * nu) / d,
                [(4. * nu - 1.) / (2. * d), (4. * nu + 3.) / (2. * d), (4. * nu - 1.) / (2. * d)],
                T11_1,
            )
        }
        (Regime::G1, 5, _) => {
            let d = 2. * mu * nu;
            let e = 1. / (mu * nu.sqrt());
            let (r22, r33) = ((1. - 4. * nu) / d, -(4. * nu + 1.) / d);
            typos.push(typo("Ric[2][2]", Some((1. - 4. * mu) / d), r22));
            typos.push(typo("Ric[3][3]", Some(-(4. * mu + 1.) / d), r33));
            (
                mat([[(1. - 4. * nu) / d, 0., e], [0., r22, 0.], [-e, 0., r33]]),
                (1. - 12. * nu) / d,
                [(3. - 4. * nu) / (2. * d), -(1. + 4. * nu) / (2. * d), -(1. + 4. * nu) / (2. * d)],
                trichotomy(1. - 4. * nu, nu),
            )
        }
        (Regime::G1, 6, _) => (
            mat([[-2. / mu, 0., 0.], [0., -3. / mu, 1. / mu], [0., -1. / mu, -1. / mu]]),
            -6. / mu,
            [-2. / mu, -1. / mu, 0.],
            T21,
        ),
        (Regime::G1, 7, _) => (
            mat([[-2. / mu, 0., 0.], [0., -1. / mu, -1. / mu], [0., 1. / mu, -3. / mu]]),
            -6. / mu,
            [0., -1. / mu, -2. / mu],
            T21,
        ),

        (Regime::GcLt1, 1 | 2, _) => {
            let q = if form.case == 1 { w * (w - 1.) } else { w * (w + 1.) };
            let ty = if form.case == 1 && w_is_one { T11_1 } else { T21 };
            (mat([[0., 0., 0.], [0., -q, q], [0., -q, q]]), 0., [-q, 0., q], ty)
        }
        (Regime::GcLt1, 3, _) => {
            let m2 = mu * mu;
            let q = w * (1. + w) / m2;
            let r33 = w * (1. + 5. * w) / (2. * m2);
            typos.push(typo("Ric[3][3]", None, r33));
            let ty = if w_is_one { T11_1 } else { T21 };
            if w_is_one {
                typos.push(KnownTypo {
                    cell: "type".into(),
                    printed: None,
                    printed_type: Some(T21),
                    corrected: None,
                });
            }
            (
                mat([[-2. * w * w / m2, q, -q], [q, w * (3. * w - 1.) / (2. * m2), q / 2.], [q, -q / 2., r33]]),
                2. * w * w / m2,
                [-w * (1. + 3. * w) / (2. * m2), 3. * w * w / m2, w * (1. - w) / (2. * m2)],
                ty,
            )
        }
        (Regime::GcLt1, 4, _) => (
            diag(2. * (1. + w) / mu, 2. * (1. - w) / mu, 2. * (1. + w * w) / mu),
            2. * (3. + w * w) / mu,
            [(1. - w * w) / mu, (1. - w).powi(2) / mu, (1. + w).powi(2) / mu],
            T11_1,
        ),
        (Regime::GcLt1, 5, _) => {
            let r33 = 2. * (w - 1.) / mu;
            typos.push(typo("Ric[3][3]", Some(-r33), r33));
            (
                diag(-2. * (1. + w) / mu, -2. * (1. + w * w) / mu, r33),
                -2. * (3. + w * w) / mu,
                [-(1. + w).powi(2) / mu, -(1. - w).powi(2) / mu, -(1. - w * w) / mu],
                T11_1,
            )
        }
        (Regime::GcLt1, 6, _) => (
            diag(2. * (w - 1.) / mu, -2. * (1. + w * w) / mu, -2. * (1. + w) / mu),
            -2. * (3. + w * w) / mu,
            [-(1. - w).powi(2) / mu, -(1. + w).powi(2) / mu, -(1. - w * w) / mu],
            T11_1,
        ),
        (Regime::GcLt1, 7, _) => (diag(-2. / mu, -2. / mu, -2. / mu), -6. / mu, [-1. / mu; 3], T11_1),
        (Regime::GcLt1, 8 | 9, _) => {
            let a = 2. * (w * w - w + 1.) / mu;
            let b = 2. * (w * w - w - 1.) / mu;
            let o = 2. * w * (w - 1.) / mu;
            let ka = (2. * w * w - 2. * w + 1.) / mu;
            let kb = (2. * w * w - 2. * w - 1.) / mu;
            let ty = if w_is_one { T11_1 } else { T21 };
            if form.case == 8 {
                (mat([[-2. / mu, 0., 0.], [0., -a, o], [0., -o, b]]), -6. / mu, [-ka, -1. / mu, kb], ty)
            } else {
                (mat([[-2. / mu, 0., 0.], [0., b, o], [0., -o, -a]]), -6. / mu, [kb, -1. / mu, -ka], ty)
            }
        }
        (Regime::GcLt1, 10, 1) => {
            let (t, n, w2) = (tau, nu, w * w);
            let r = 2. * w * (1. + w) / (n * (1. - t).sqrt());
            let dd = n * (1. - t);
            let r33_num = 2. * (w2 + w - 1. + (1. - w) * t);
            typos.push(typo("Ric[3][3]", Some(r33_num / (n * (1. - t).sqrt())), r33_num / dd));
            (
                mat([
                    [-2. * (w2 + w + 1. - (1. + w) * t) / dd, 0., -r],
                    [0., 2. * (w2 * t + t - 1.) / dd, 0.],
                    [r, 0., r33_num / dd],
                ]),
                2. * (w2 * t + 3. * t - 3.) / dd,
                [
                    ((w2 + 2. * w + 1.) * t - (2. * w2 + 2. * w + 1.)) / dd,
                    ((w2 - 2. * w + 1.) * t + (2. * w2 + 2. * w - 1.)) / dd,
                    -(w2 * t - t + 1.) / dd,
                ],
                trichotomy(t * (t - 1. + w2), t * t + w2 * w2),
            )
        }
        (Regime::GcLt1, 10, _) => {
            // formulas in terms of the signed parameter ν < 0
            let (t, n, w2) = (tau, -nu, w * w);
            let r = -2. * w * (1. + w) / (n * (t - 1.).sqrt());
            let dd = n * (t - 1.);
            (
                mat([
                    [2. * (w2 + w + 1. - (1. + w) * t) / dd, r, 0.],
                    [r, -2. * (w2 + w - 1. + (1. - w) * t) / dd, 0.],
                    [0., 0., -2. * (w2 * t + t - 1.) / dd],
                ]),
                -2. * (w2 * t + 3. * t - 3.) / dd,
                [
                    (w2 * t - t + 1.) / dd,
                    -((w2 - 2. * w + 1.) * t + (2. * w2 + 2. * w - 1.)) / dd,
                    -((w2 + 2. * w + 1.) * t - (2. * w2 + 2. * w + 1.)) / dd,
                ],
                T11_1,
            )
        }
        (Regime::GcLt1, 11, _) => {
            let (e, w2) = (eta, w * w);
            let r = 2. * w * (1. + w) / (mu * (1. - e).sqrt());
            let dd = mu * (1. - e);
            (
                mat([
                    [2. * (w2 * e + e - 1.) / dd, 0., 0.],
                    [0., 2. * (w2 + w - 1. + e - w * e) / dd, r],
                    [0., -r, -2. * (w2 + w + 1. - (1. + w) * e) / dd],
                ]),
                2. * (w2 * e + 3. * e - 3.) / dd,
                [
                    ((w2 - 2. * w + 1.) * e + (2. * w2 + 2. * w - 1.)) / dd,
                    -(1. - e + w2 * e) / dd,
                    ((w2 + 2. * w + 1.) * e - (2. * w2 + 2. * w + 1.)) / dd,
                ],
                trichotomy(e * (e - 1. + w2), e * e + w2 * w2),
            )
        }
        _ => return Err(Error::OutOfDomain(format!("no closed form for {form}"))),
    };
    Ok(ClosedForm {
        ricci_operator: ric,
        ric_matrix: j21() * ric,
        scalar: rho,
        sectional: k,
        oneill: ty,
        known_typos: typos,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtlasEntry {
    pub family: FamilyTag,
    pub form_id: FormId,
    #[serde(flatten)]
    pub params: Params,
    pub paper_frame: OrthonormalFrame,
    pub closed_form: ClosedForm,
    pub engine_form: CurvatureReport,
    /// max |closed − engine| / (1 + |closed|) over Ric entries, ρ and κ.
    pub residual: f64,
    /// Cells exceeding [`CROSS_CHECK_TOL`], plus a type mismatch if any.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub flagged: Vec<String>,
}

/// Evaluates closed form and engine on the reference frame. Disagreements
/// are reported in `flagged`, not raised.
pub fn cross_check(family: FamilyTag, form: FormId, params: &Params) -> Result<AtlasEntry> {
    let params = params.restrict(form);
    let frame = paper_frame(family, form, &params)?;
    let closed = closed_form_report(family, form, &params)?;
    let engine = CurvatureReport::compute(&working_algebra(family)?, &frame, ToleranceConfig::default())?;
    let mut residual = 0.0_f64;
    let mut flagged = Vec::new();
    let mut cmp = |name: String, a: f64, b: f64| {
        let r = (a - b).abs() / (1.0 + a.abs());
        residual = residual.max(r);
        if !(r <= CROSS_CHECK_TOL) {
            flagged.push(format!("{name}: closed {a} vs engine {b}"));
        }
    };
    for i in 0..3 {
        for j in 0..3 {
            cmp(
                format!("Ric[{}][{}]", i + 1, j + 1),
                closed.ricci_operator[(i, j)],
                engine.ricci_operator[(i, j)],
            );
        }
    }
    cmp("rho".into(), closed.scalar, engine.scalar);
    for (n, (a, b)) in ["k12", "k23", "k31"].iter().zip(closed.sectional.iter().zip(&engine.sectional)) {
        cmp(n.to_string(), *a, *b);
    }
    if closed.oneill != engine.oneill.type_tag {
        flagged.push(format!("type: closed {} vs engine {}", closed.oneill, engine.oneill.type_tag));
    }
    Ok(AtlasEntry {
        family,
        form_id: form,
        params,
        paper_frame: frame,
        closed_form: closed,
        engine_form: engine,
        residual,
        flagged,
    })
}

/// Lists of parameter values, parsed from e.g. `"mu=1,2;tau=0"`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ParamGrid {
    pub mu: Vec<f64>,
    pub nu: Vec<f64>,
    pub tau: Vec<f64>,
    pub eta: Vec<f64>,
}

impl std::str::FromStr for ParamGrid {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |m: String| Error::Parse { path: "grid".into(), message: m };
        let mut g = ParamGrid::default();
        for part in s.split(';').map(str::trim).filter(|p| !p.is_empty()) {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| bad(format!("expected name=values in {part:?}")))?;
            let vals = v
                .split(',')
                .map(|x| {
                    let x = x.trim();
                    parse_number(x).ok_or_else(|| bad(format!("{x:?} is not a finite number")))
                })
                .collect::<Result<Vec<f64>>>()?;
            let slot = match k.trim() {
                "mu" | "μ" => &mut g.mu,
                "nu" | "ν" => &mut g.nu,
                "tau" | "τ" => &mut g.tau,
                "eta" | "η" => &mut g.eta,
                other => return Err(bad(format!("unknown parameter {other:?}"))),
            };
            if !slot.is_empty() {
                return Err(bad(format!("parameter {k:?} given twice")));
            }
            *slot = vals;
        }
        if g.points().is_empty() {
            return Err(bad("grid is empty".into()));
        }
        Ok(g)
    }
}

/// Accepts decimal numbers and simple fractions such as `1/2`.
fn parse_number(s: &str) -> Option<f64> {
    let v = match s.split_once('/') {
        Some((a, b)) => a.trim().parse::<f64>().ok()? / b.trim().parse::<f64>().ok()?,
        None => s.parse::<f64>().ok()?,
    };
    v.is_finite().then_some(v)
}

impl ParamGrid {
    /// Cartesian product of all supplied lists.
    pub fn points(&self) -> Vec<Params> {
        let mut out = vec![Params::default()];
        for (name, vals) in [
            (ParamName::Mu, &self.mu),
            (ParamName::Nu, &self.nu),
            (ParamName::Tau, &self.tau),
            (ParamName::Eta, &self.eta),
        ] {
            if vals.is_empty() {
                continue;
            }
            out = out
                .iter()
                .flat_map(|p| {
                    vals.iter().map(move |&v| {
                        let mut q = *p;
                        q.set(name, v);
                        q
                    })
                })
                .collect();
        }
        if out.len() == 1 && out[0] == Params::default() {
            return Vec::new();
        }
        out
    }
}

/// Every (form, parameter point) of the grid that lies in the form's
/// domain, sorted by form then parameter tuple. Parameterless forms get
/// one row per grid point.
pub fn grid_jobs(family: FamilyTag, grid: &ParamGrid) -> Vec<(FormId, Params)> {
    let mut jobs = Vec::new();
    for form in FormId::all(family.regime()) {
        for pt in grid.points() {
            let q = pt.restrict(form);
            if check_domain(family, form, &q).is_ok() {
                jobs.push((form, q));
            }
        }
    }
    jobs.sort_by(|a, b| {
        a.0.cmp(&b.0).then_with(|| {
            let (x, y) = (a.1.values(a.0), b.1.values(b.0));
            x.iter().zip(&y).map(|(p, q)| p.total_cmp(q)).find(|o| o.is_ne()).unwrap_or(std::cmp::Ordering::Equal)
        })
    });
    jobs
}

/// Cross-checks every grid row, in parallel, preserving the sorted order.
pub fn atlas_entries(family: FamilyTag, grid: &ParamGrid) -> Result<Vec<AtlasEntry>> {
    grid_jobs(family, grid)
        .par_iter()
        .map(|(form, q)| cross_check(family, *form, q))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableFormat {
    Csv,
    Json,
}

impl std::str::FromStr for TableFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(TableFormat::Csv),
            "json" => Ok(TableFormat::Json),
            _ => Err(Error::Parse { path: "format".into(), message: format!("unknown format {s:?}") }),
        }
    }
}

pub const CSV_HEADER: [&str; 24] = [
    "family", "c", "form_id", "mu", "nu", "tau", "eta", "Ric11", "Ric12", "Ric13", "Ric21", "Ric22", "Ric23",
    "Ric31", "Ric32", "Ric33", "rho", "k12", "k23", "k31", "type", "residual", "flagged", "typos",
];

fn csv_row(e: &AtlasEntry) -> Vec<String> {
    let num = io::format_f64;
    let opt = |v: Option<f64>| v.map(num).unwrap_or_default();
    let (fam, c) = match e.family {
        FamilyTag::GI => ("GI".to_string(), String::new()),
        FamilyTag::Gc(c) => ("Gc".to_string(), num(c)),
    };
    let cf = &e.closed_form;
    let mut row = vec![fam, c, e.form_id.to_string(), opt(e.params.mu), opt(e.params.nu), opt(e.params.tau), opt(e.params.eta)];
    for i in 0..3 {
        for j in 0..3 {
            row.push(num(cf.ricci_operator[(i, j)]));
        }
    }
    row.push(num(cf.scalar));
    row.extend(cf.sectional.iter().map(|&k| num(k)));
    row.push(cf.oneill.to_string());
    row.push(num(e.residual));
    row.push(e.flagged.len().to_string());
    row.push(cf.known_typos.iter().map(|t| t.cell.as_str()).collect::<Vec<_>>().join(" "));
    row
}

/// Writes the grid table as CSV (header + one row per entry) or as a JSON
/// array of [`AtlasEntry`].
pub fn emit_tables<W: Write>(family: FamilyTag, grid: &ParamGrid, format: TableFormat, out: W) -> Result<usize> {
    let entries = atlas_entries(family, grid)?;
    write_entries(&entries, format, out)?;
    Ok(entries.len())
}

pub fn write_entries<W: Write>(entries: &[AtlasEntry], format: TableFormat, mut out: W) -> Result<()> {
    match format {
        TableFormat::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(CSV_HEADER)?;
            for e in entries {
                w.write_record(csv_row(e))?;
            }
            w.flush()?;
        }
        TableFormat::Json => {
            out.write_all(io::to_json_string(&entries)?.as_bytes())?;
            out.write_all(b"\n")?;
        }
    }
    Ok(())
}
