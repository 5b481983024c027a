//! Step-by-step reduction of a metric to canonical form. Every step is an
//! automorphism B of the working-basis algebra applied as h ← Bᵗ h B; the
//! witness accumulates W ← W·B and the congruence W ᵗ h₀ W = h is checked
//! after each step.

use nalgebra::{Matrix2, Matrix3};

use super::forms::{FormId, Params};
use crate::core::automorphism::{block, translation};
use crate::core::{is_automorphism, FamilyTag, LieAlgebra3, Regime, ToleranceConfig};
use crate::error::{Error, Result};
use crate::linalg::{self, max_abs};

pub(crate) struct Reducer<'a> {
    alg: &'a LieAlgebra3,
    h0: Matrix3<f64>,
    pub h: Matrix3<f64>,
    pub w: Matrix3<f64>,
    ctol: f64,
    /// Zero thresholds for entries and for the pivot h11 h22 − h12²,
    /// scaled by the current ‖h‖ and ‖h‖².
    zero: f64,
    pivot_zero: f64,
}

impl<'a> Reducer<'a> {
    pub fn new(alg: &'a LieAlgebra3, h: Matrix3<f64>, tol: &ToleranceConfig) -> Self {
        let n = max_abs(&h);
        Self {
            alg,
            h0: h,
            h,
            w: Matrix3::identity(),
            ctol: tol.classification_tol,
            zero: tol.classification_tol * n,
            pivot_zero: tol.classification_tol * n * n,
        }
    }

    fn apply(&mut self, b: Matrix3<f64>) -> Result<()> {
        if !is_automorphism(self.alg, &b) {
            return Err(Error::Internal(format!("reduction step is not an automorphism: {b}")));
        }
        self.h = linalg::symmetrize(&(b.transpose() * self.h * b));
        self.w *= b;
        let direct = self.w.transpose() * self.h0 * self.w;
        let scale = 1.0 + max_abs(&self.h0) * max_abs(&self.w).powi(2);
        let res = max_abs(&(direct - self.h));
        if res > 1e-9 * scale {
            return Err(Error::Internal(format!("witness congruence drifted by {res:e}")));
        }
        let n = max_abs(&self.h);
        self.zero = self.ctol * n;
        self.pivot_zero = self.ctol * n * n;
        Ok(())
    }

    fn is_zero(&self, x: f64) -> bool {
        x.abs() <= self.zero
    }

    fn e(&self, i: usize, j: usize) -> f64 {
        self.h[(i - 1, j - 1)]
    }

    fn pivot(&self) -> f64 {
        self.e(1, 1) * self.e(2, 2) - self.e(1, 2).powi(2)
    }

    fn pivot_is_zero(&self) -> bool {
        self.pivot().abs() <= self.pivot_zero
    }

    /// Kills h13 and h23 with a translation (needs a nonzero pivot).
    fn clear_translations(&mut self) -> Result<()> {
        let h2 = Matrix2::new(self.e(1, 1), self.e(1, 2), self.e(1, 2), self.e(2, 2));
        let rhs = nalgebra::Vector2::new(-self.e(1, 3), -self.e(2, 3));
        let ab = h2
            .try_inverse()
            .ok_or_else(|| Error::AmbiguousPivot(format!("h11 h22 - h12^2 = {:e}", self.pivot())))?
            * rhs;
        self.apply(translation(ab[0], ab[1]))
    }

    /// Translation in slot 1 or 2 that makes h33 vanish; requires h_slot,slot
    /// and h12 to be zero already, so only the linear term 2 h_slot,3 t acts.
    fn zero_h33_via(&mut self, slot: usize) -> Result<()> {
        let (p, q) = (self.e(slot, 3), self.e(3, 3));
        if self.is_zero(p) {
            return Err(Error::AmbiguousPivot(format!("h{slot}3 = {p:e} is too small to normalise h33")));
        }
        let t = -q / (2.0 * p);
        self.apply(if slot == 1 { translation(t, 0.0) } else { translation(0.0, t) })
    }

    fn done(&self, form: FormId, params: Params) -> (FormId, Params, Matrix3<f64>) {
        (form, params, self.w)
    }
}

fn internal(regime: Regime, h: &Matrix3<f64>) -> Error {
    Error::Internal(format!("{} reduction reached an impossible state: {h}", regime.prefix()))
}

fn scale_block(g: Matrix2<f64>) -> Matrix3<f64> {
    block(g, [0.0, 0.0])
}

fn diag2(a: f64, b: f64) -> Matrix3<f64> {
    scale_block(Matrix2::new(a, 0.0, 0.0, b))
}

/// Runs the reduction for `family` on `h` (already in the working basis).
pub(crate) fn reduce(
    family: FamilyTag,
    alg: &LieAlgebra3,
    h: Matrix3<f64>,
    tol: &ToleranceConfig,
) -> Result<(FormId, Params, Matrix3<f64>)> {
    let mut r = Reducer::new(alg, h, tol);
    match family.regime() {
        Regime::GI => reduce_gi(&mut r),
        Regime::GcGt1 => reduce_gt1(&mut r, family.c().expect("Gc")),
        Regime::G1 => reduce_g1(&mut r),
        Regime::GcLt1 => reduce_lt1(&mut r),
    }
}

fn reduce_gi(r: &mut Reducer) -> Result<(FormId, Params, Matrix3<f64>)> {
    let id = |k| FormId::new(Regime::GI, k);
    let h2 = Matrix2::new(r.e(1, 1), r.e(1, 2), r.e(1, 2), r.e(2, 2));
    if !r.pivot_is_zero() {
        r.clear_translations()?;
        let m = r.e(3, 3);
        let h2 = Matrix2::new(r.e(1, 1), r.e(1, 2), r.e(1, 2), r.e(2, 2));
        let (l, v) = linalg::sym2_eigen(&h2);
        // columns ordered with the larger eigenvalue first
        let g = Matrix2::from_columns(&[v.column(1) / l[1].abs().sqrt(), v.column(0) / l[0].abs().sqrt()]);
        r.apply(scale_block(g))?;
        return if m > 0.0 && l[0] < 0.0 && l[1] > 0.0 {
            Ok(r.done(id(1), Params::mu(m)))
        } else if m < 0.0 && l[0] > 0.0 {
            Ok(r.done(id(2), Params::mu(-m)))
        } else {
            Err(internal(Regime::GI, &r.h))
        };
    }
    let (l, v) = linalg::sym2_eigen(&h2);
    if !(l[1] > 0.0) {
        return Err(internal(Regime::GI, &r.h));
    }
    // put H2 into diag(1, 0)
    let g = Matrix2::from_columns(&[v.column(1) / l[1].sqrt(), v.column(0).into_owned()]);
    r.apply(scale_block(g))?;
    r.apply(translation(-r.e(1, 3), 0.0))?;
    let (b, n) = (r.e(2, 3), r.e(3, 3));
    if r.is_zero(b) {
        return Err(Error::AmbiguousPivot(format!("h23 = {b:e} after clearing h13")));
    }
    r.apply(block(Matrix2::new(1.0, 0.0, 0.0, 1.0 / b), [0.0, -n / (2.0 * b)]))?;
    Ok(r.done(id(3), Params::default()))
}

/// Natural-basis automorphism of g_c with parameters α, β.
fn gc_block(c: f64, alpha: f64, beta: f64) -> Matrix3<f64> {
    scale_block(Matrix2::new(beta - alpha, -c * alpha, alpha, beta + alpha))
}

fn reduce_gt1(r: &mut Reducer, c: f64) -> Result<(FormId, Params, Matrix3<f64>)> {
    let id = |k| FormId::new(Regime::GcGt1, k);
    if r.pivot_is_zero() {
        let h2 = Matrix2::new(r.e(1, 1), r.e(1, 2), r.e(1, 2), r.e(2, 2));
        // kernel vector: eigenvector of the eigenvalue closest to zero
        let (l, v) = linalg::sym2_eigen(&h2);
        let k = if l[0].abs() <= l[1].abs() { v.column(0) } else { v.column(1) };
        r.apply(gc_block(c, -k[0] / c, k[1] + k[0] / c))?;
        let m1 = r.e(1, 1);
        if !(m1 > 0.0) {
            return Err(internal(Regime::GcGt1, &r.h));
        }
        r.apply(translation(-r.e(1, 3) / m1, 0.0))?;
        r.zero_h33_via(2)?;
        let s = 1.0 / r.e(2, 3);
        r.apply(gc_block(c, 0.0, s))?;
        return Ok(r.done(id(1), Params::mu(r.e(1, 1))));
    }
    r.clear_translations()?;
    let m = r.e(3, 3);
    let (h11, h12, h22) = (r.e(1, 1), r.e(1, 2), r.e(2, 2));
    if !r.is_zero(h11 - h12) {
        let a = h11 - h12;
        let b = (c - 2.0) * h11 + 2.0 * h12 - h22;
        let cc = -(c - 1.0) * a;
        let disc = (b * b - 4.0 * a * cc).max(0.0).sqrt();
        // roots via the numerically stable pair, smaller magnitude chosen
        let q = -0.5 * (b + b.signum() * disc);
        let (r1, r2) = (q / a, if q != 0.0 { cc / q } else { 0.0 });
        let (mut beta, other) = if r1.abs() < r2.abs() || (r1.abs() == r2.abs() && r1 >= 0.0) { (r1, r2) } else { (r2, r1) };
        // the other root when the preferred one leaves h11 below the rescaled zero
        let h11_ratio = |beta: f64| {
            let b = gc_block(c, 1.0, beta);
            let h = b.transpose() * r.h * b;
            h[(0, 0)].abs() / max_abs(&h)
        };
        if h11_ratio(beta) <= r.ctol && h11_ratio(other) > r.ctol {
            beta = other;
        }
        r.apply(gc_block(c, 1.0, beta))?;
    }
    let h11 = r.e(1, 1);
    if r.is_zero(h11) || !r.is_zero(h11 - r.e(1, 2)) {
        return Err(Error::AmbiguousPivot(format!(
            "could not reach h11 = h12 (h11 = {h11:e}, h12 = {:e})",
            r.e(1, 2)
        )));
    }
    r.apply(gc_block(c, 0.0, 1.0 / h11.abs().sqrt()))?;
    let tau = r.e(2, 2) / r.e(1, 1);
    let positive = r.e(1, 1) > 0.0;
    let fix_tau = |r: &mut Reducer, alpha: f64| r.apply(gc_block(c, alpha, 0.0));
    match (positive, tau < 1.0) {
        (true, true) if m > 0.0 => Ok(r.done(id(2), Params { mu: Some(m), tau: Some(tau), ..Default::default() })),
        (true, false) if m < 0.0 => {
            if tau > c {
                fix_tau(r, 1.0 / (tau - 1.0).sqrt())?;
            }
            let nu = r.e(2, 2);
            Ok(r.done(id(3), Params { mu: Some(-m), nu: Some(nu.min(c)), ..Default::default() }))
        }
        (false, true) => {
            fix_tau(r, 1.0 / (1.0 - tau).sqrt())?;
            let m = r.e(3, 3);
            if !(m > 0.0 && r.e(1, 1) > 0.0) {
                return Err(internal(Regime::GcGt1, &r.h));
            }
            Ok(r.done(id(2), Params { mu: Some(m), tau: Some(r.e(2, 2)), ..Default::default() }))
        }
        _ => Err(internal(Regime::GcGt1, &r.h)),
    }
}

/// Adapted-basis automorphism block [[γ, δ], [0, γ]] of g_1.
fn g1_block(gamma: f64, delta: f64) -> Matrix3<f64> {
    scale_block(Matrix2::new(gamma, delta, 0.0, gamma))
}

fn reduce_g1(r: &mut Reducer) -> Result<(FormId, Params, Matrix3<f64>)> {
    let id = |k| FormId::new(Regime::G1, k);
    let h11_zero = r.is_zero(r.e(1, 1));
    if r.pivot_is_zero() {
        if !h11_zero {
            let h11 = r.e(1, 1);
            if h11 < 0.0 {
                return Err(internal(Regime::G1, &r.h));
            }
            r.apply(g1_block(1.0, -r.e(1, 2) / h11))?;
            r.apply(translation(-r.e(1, 3) / h11, 0.0))?;
            r.zero_h33_via(2)?;
            r.apply(g1_block(1.0 / r.e(2, 3), 0.0))?;
            return Ok(r.done(id(2), Params::mu(r.e(1, 1))));
        }
        if !r.is_zero(r.e(1, 2)) || !(r.e(2, 2) > 0.0) {
            return Err(Error::AmbiguousPivot(format!("degenerate pivot with h11 ≈ 0 but h12 = {:e}", r.e(1, 2))));
        }
        r.apply(translation(0.0, -r.e(2, 3) / r.e(2, 2)))?;
        r.zero_h33_via(1)?;
        r.apply(g1_block(1.0 / r.e(1, 3), 0.0))?;
        return Ok(r.done(id(1), Params::mu(r.e(2, 2))));
    }
    r.clear_translations()?;
    let m = r.e(3, 3);
    if !h11_zero {
        let h11 = r.e(1, 1);
        r.apply(g1_block(1.0, -r.e(1, 2) / h11))?;
        r.apply(g1_block(1.0 / h11.abs().sqrt(), 0.0))?;
        let (d1, d2) = (r.e(1, 1), r.e(2, 2));
        let nu = d2.abs();
        let p = |mu: f64| Params { mu: Some(mu), nu: Some(nu), ..Default::default() };
        return match (d1 > 0.0, d2 > 0.0, m > 0.0) {
            (true, false, true) => Ok(r.done(id(3), p(m))),
            (true, true, false) => Ok(r.done(id(4), p(-m))),
            (false, true, true) => Ok(r.done(id(5), p(m))),
            _ => Err(internal(Regime::G1, &r.h)),
        };
    }
    let h12 = r.e(1, 2);
    r.apply(g1_block(1.0, -r.e(2, 2) / (2.0 * h12)))?;
    r.apply(g1_block(1.0 / h12.abs().sqrt(), 0.0))?;
    if !(m > 0.0) {
        return Err(internal(Regime::G1, &r.h));
    }
    Ok(r.done(id(if h12 > 0.0 { 6 } else { 7 }), Params::mu(m)))
}

fn reduce_lt1(r: &mut Reducer) -> Result<(FormId, Params, Matrix3<f64>)> {
    let id = |k| FormId::new(Regime::GcLt1, k);
    let (z11, z12, z22) = (r.is_zero(r.e(1, 1)), r.is_zero(r.e(1, 2)), r.is_zero(r.e(2, 2)));
    if r.pivot_is_zero() {
        if z11 || z22 {
            if !z12 {
                return Err(Error::AmbiguousPivot(format!("degenerate pivot with h12 = {:e}", r.e(1, 2))));
            }
            if z11 {
                let h22 = r.e(2, 2);
                if !(h22 > 0.0) {
                    return Err(internal(Regime::GcLt1, &r.h));
                }
                r.apply(translation(0.0, -r.e(2, 3) / h22))?;
                r.zero_h33_via(1)?;
                r.apply(diag2(1.0 / r.e(1, 3), 1.0 / r.e(2, 2).sqrt()))?;
                return Ok(r.done(id(1), Params::default()));
            }
            let h11 = r.e(1, 1);
            if !(h11 > 0.0) {
                return Err(internal(Regime::GcLt1, &r.h));
            }
            r.apply(translation(-r.e(1, 3) / h11, 0.0))?;
            r.zero_h33_via(2)?;
            r.apply(diag2(1.0 / r.e(1, 1).sqrt(), 1.0 / r.e(2, 3)))?;
            return Ok(r.done(id(2), Params::default()));
        }
        let (h11, h12, h22) = (r.e(1, 1), r.e(1, 2), r.e(2, 2));
        if !(h11 > 0.0 && h22 > 0.0) {
            return Err(internal(Regime::GcLt1, &r.h));
        }
        r.apply(diag2(1.0 / h11.sqrt(), h12.signum() / h22.sqrt()))?;
        let (nu, lambda, k) = (r.e(1, 3), r.e(2, 3), r.e(3, 3));
        if r.is_zero(lambda - nu) {
            return Err(Error::AmbiguousPivot(format!("h23 - h13 = {:e}", lambda - nu)));
        }
        let a = (k - 2.0 * nu * lambda + nu * nu) / (2.0 * (lambda - nu));
        r.apply(translation(a, -nu - a))?;
        if r.e(2, 3) < 0.0 {
            r.apply(diag2(-1.0, -1.0))?;
        }
        return Ok(r.done(id(3), Params::mu(r.e(2, 3))));
    }
    r.clear_translations()?;
    let m = r.e(3, 3);
    let (h11, h12, h22) = (r.e(1, 1), r.e(1, 2), r.e(2, 2));
    if z12 {
        r.apply(diag2(1.0 / h11.abs().sqrt(), 1.0 / h22.abs().sqrt()))?;
        return match (h11 > 0.0, h22 > 0.0, m > 0.0) {
            (true, true, false) => Ok(r.done(id(4), Params::mu(-m))),
            (true, false, true) => Ok(r.done(id(5), Params::mu(m))),
            (false, true, true) => Ok(r.done(id(6), Params::mu(m))),
            _ => Err(internal(Regime::GcLt1, &r.h)),
        };
    }
    if z11 && z22 {
        r.apply(diag2(1.0 / h12, 1.0))?;
        return if m > 0.0 { Ok(r.done(id(7), Params::mu(m))) } else { Err(internal(Regime::GcLt1, &r.h)) };
    }
    if z11 {
        let d = 1.0 / h22.abs().sqrt();
        r.apply(diag2(h22.abs().sqrt() / h12, d))?;
        if !(m > 0.0) {
            return Err(internal(Regime::GcLt1, &r.h));
        }
        return Ok(r.done(id(if h22 > 0.0 { 8 } else { 9 }), Params::mu(m)));
    }
    r.apply(diag2(1.0 / h11.abs().sqrt(), h11.abs().sqrt() / h12))?;
    let t = h11 * h22 / (h12 * h12);
    if h11 > 0.0 {
        return if t < 1.0 && m > 0.0 {
            Ok(r.done(FormId::split(Regime::GcLt1, 10, 1), Params { nu: Some(m), tau: Some(t), ..Default::default() }))
        } else if t > 1.0 && m < 0.0 {
            Ok(r.done(FormId::split(Regime::GcLt1, 10, 2), Params { nu: Some(-m), tau: Some(t), ..Default::default() }))
        } else {
            Err(internal(Regime::GcLt1, &r.h))
        };
    }
    if t < 1.0 && m > 0.0 {
        Ok(r.done(id(11), Params { mu: Some(m), eta: Some(t), ..Default::default() }))
    } else {
        Err(internal(Regime::GcLt1, &r.h))
    }
}
