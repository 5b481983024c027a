//! Canonical-form identifiers, their parameters and matrices.

use std::fmt;
use std::str::FromStr;

use nalgebra::Matrix3;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::core::{FamilyTag, Regime};
use crate::error::{Error, Result};
use crate::linalg::mat;

/// A canonical form: regime plus case number, with `sub` distinguishing
/// 10-1 / 10-2 in the c < 1 list (0 otherwise). Orders by regime, then
/// case, then sub-case.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FormId {
    pub regime: Regime,
    pub case: u8,
    pub sub: u8,
}

impl FormId {
    pub const fn new(regime: Regime, case: u8) -> Self {
        Self { regime, case, sub: 0 }
    }

    pub const fn split(regime: Regime, case: u8, sub: u8) -> Self {
        Self { regime, case, sub }
    }

    /// All forms of a regime, in list order.
    pub fn all(regime: Regime) -> Vec<FormId> {
        let n = match regime {
            Regime::GI | Regime::GcGt1 => 3,
            Regime::G1 => 7,
            Regime::GcLt1 => 11,
        };
        let mut v = Vec::new();
        for case in 1..=n {
            if regime == Regime::GcLt1 && case == 10 {
                v.push(FormId::split(regime, 10, 1));
                v.push(FormId::split(regime, 10, 2));
            } else {
                v.push(FormId::new(regime, case));
            }
        }
        v
    }

    /// Parameter names the form depends on.
    pub fn param_names(self) -> &'static [ParamName] {
        use ParamName::*;
        match (self.regime, self.case) {
            (Regime::GI, 3) => &[],
            (Regime::GI, _) => &[Mu],
            (Regime::GcGt1, 1) => &[Mu],
            (Regime::GcGt1, 2) => &[Mu, Tau],
            (Regime::GcGt1, _) => &[Mu, Nu],
            (Regime::G1, 3..=5) => &[Mu, Nu],
            (Regime::G1, _) => &[Mu],
            (Regime::GcLt1, 1 | 2) => &[],
            (Regime::GcLt1, 10) => &[Nu, Tau],
            (Regime::GcLt1, 11) => &[Mu, Eta],
            (Regime::GcLt1, _) => &[Mu],
        }
    }
}

impl fmt::Display for FormId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.regime.prefix(), self.case)?;
        if self.sub != 0 {
            write!(f, "-{}", self.sub)?;
        }
        Ok(())
    }
}

impl FromStr for FormId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse {
            path: "form_id".into(),
            message: format!("unknown form id {s:?}"),
        };
        let (prefix, rest) = s.rsplit_once('.').ok_or_else(bad)?;
        let regime = [Regime::GI, Regime::GcGt1, Regime::G1, Regime::GcLt1]
            .into_iter()
            .find(|r| r.prefix() == prefix)
            .ok_or_else(bad)?;
        let (case, sub) = match rest.split_once('-') {
            Some((c, s)) => (c.parse().map_err(|_| bad())?, s.parse().map_err(|_| bad())?),
            None => (rest.parse().map_err(|_| bad())?, 0),
        };
        let id = FormId { regime, case, sub };
        if FormId::all(regime).contains(&id) {
            Ok(id)
        } else {
            Err(bad())
        }
    }
}

impl Serialize for FormId {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for FormId {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamName {
    Mu,
    Nu,
    Tau,
    Eta,
}

impl ParamName {
    pub fn as_str(self) -> &'static str {
        match self {
            ParamName::Mu => "mu",
            ParamName::Nu => "nu",
            ParamName::Tau => "tau",
            ParamName::Eta => "eta",
        }
    }
}

/// Continuous parameters of a canonical form; absent ones are `None`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Params {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
}

impl Params {
    pub fn mu(mu: f64) -> Self {
        Self { mu: Some(mu), ..Self::default() }
    }

    pub fn get(&self, name: ParamName) -> Option<f64> {
        match name {
            ParamName::Mu => self.mu,
            ParamName::Nu => self.nu,
            ParamName::Tau => self.tau,
            ParamName::Eta => self.eta,
        }
    }

    pub fn set(&mut self, name: ParamName, v: f64) {
        let slot = match name {
            ParamName::Mu => &mut self.mu,
            ParamName::Nu => &mut self.nu,
            ParamName::Tau => &mut self.tau,
            ParamName::Eta => &mut self.eta,
        };
        *slot = Some(v);
    }

    /// Keeps only the parameters `form` uses.
    pub fn restrict(&self, form: FormId) -> Self {
        let mut p = Params::default();
        for &n in form.param_names() {
            if let Some(v) = self.get(n) {
                p.set(n, v);
            }
        }
        p
    }

    /// The used parameters in (μ, ν, τ, η) order.
    pub fn values(&self, form: FormId) -> Vec<f64> {
        form.param_names().iter().filter_map(|&n| self.get(n)).collect()
    }
}

fn need(form: FormId, p: &Params, n: ParamName) -> Result<f64> {
    let v = p
        .get(n)
        .ok_or_else(|| Error::OutOfDomain(format!("{form} needs parameter {}", n.as_str())))?;
    if !v.is_finite() {
        return Err(Error::OutOfDomain(format!("{form}: {} = {v}", n.as_str())));
    }
    Ok(v)
}

/// Checks that `p` supplies every parameter of `form` inside its domain.
pub fn check_domain(family: FamilyTag, form: FormId, p: &Params) -> Result<()> {
    if family.regime() != form.regime {
        return Err(Error::OutOfDomain(format!("{form} is not a form of family {family}")));
    }
    let fail = |what: &str| Err(Error::OutOfDomain(format!("{form}: {what}")));
    for &n in form.param_names() {
        let v = need(form, p, n)?;
        let ok = match n {
            ParamName::Mu | ParamName::Nu => v > 0.0,
            ParamName::Tau => match (form.regime, form.sub) {
                (Regime::GcLt1, 2) => v > 1.0,
                _ => v < 1.0,
            },
            ParamName::Eta => v < 1.0,
        };
        if !ok {
            return fail(&format!("{} = {v} out of range", n.as_str()));
        }
    }
    if form == FormId::new(Regime::GcGt1, 3) {
        let nu = need(form, p, ParamName::Nu)?;
        let c = family.c().unwrap_or(f64::NAN);
        if !(nu > 1.0 && nu <= c) {
            return fail(&format!("nu = {nu} must lie in (1, c = {c}]"));
        }
    }
    Ok(())
}

/// The canonical matrix (adapted basis for c ≤ 1, natural otherwise).
pub fn canonical_matrix(family: FamilyTag, form: FormId, p: &Params) -> Result<Matrix3<f64>> {
    check_domain(family, form, p)?;
    let g = |n| p.get(n).unwrap_or(0.0);
    let (mu, nu, tau, eta) = (g(ParamName::Mu), g(ParamName::Nu), g(ParamName::Tau), g(ParamName::Eta));
    let swap23 = |a: f64| mat([[a, 0.0, 0.0], [0.0, 0.0, 1.0], [0.0, 1.0, 0.0]]);
    let diag = |a: f64, b: f64, c: f64| mat([[a, 0.0, 0.0], [0.0, b, 0.0], [0.0, 0.0, c]]);
    let off12 = |s: f64, d: f64, m: f64| mat([[0.0, s, 0.0], [s, d, 0.0], [0.0, 0.0, m]]);
    let pair = |t: f64, m: f64| mat([[1.0, 1.0, 0.0], [1.0, t, 0.0], [0.0, 0.0, m]]);
    let anti13 = |m: f64| mat([[0.0, 0.0, 1.0], [0.0, m, 0.0], [1.0, 0.0, 0.0]]);
    Ok(match (form.regime, form.case, form.sub) {
        (Regime::GI, 1, _) => diag(1.0, -1.0, mu),
        (Regime::GI, 2, _) => diag(1.0, 1.0, -mu),
        (Regime::GI, 3, _) => swap23(1.0),
        (Regime::GcGt1, 1, _) => swap23(mu),
        (Regime::GcGt1, 2, _) => pair(tau, mu),
        (Regime::GcGt1, 3, _) => pair(nu, -mu),
        (Regime::G1, 1, _) => anti13(mu),
        (Regime::G1, 2, _) => swap23(mu),
        (Regime::G1, 3, _) => diag(1.0, -nu, mu),
        (Regime::G1, 4, _) => diag(1.0, nu, -mu),
        (Regime::G1, 5, _) => diag(-1.0, nu, mu),
        (Regime::G1, 6, _) => off12(1.0, 0.0, mu),
        (Regime::G1, 7, _) => off12(-1.0, 0.0, mu),
        (Regime::GcLt1, 1, _) => anti13(1.0),
        (Regime::GcLt1, 2, _) => swap23(1.0),
        (Regime::GcLt1, 3, _) => mat([[1.0, 1.0, 0.0], [1.0, 1.0, mu], [0.0, mu, 0.0]]),
        (Regime::GcLt1, 4, _) => diag(1.0, 1.0, -mu),
        (Regime::GcLt1, 5, _) => diag(1.0, -1.0, mu),
        (Regime::GcLt1, 6, _) => diag(-1.0, 1.0, mu),
        (Regime::GcLt1, 7, _) => off12(1.0, 0.0, mu),
        (Regime::GcLt1, 8, _) => off12(1.0, 1.0, mu),
        (Regime::GcLt1, 9, _) => off12(1.0, -1.0, mu),
        (Regime::GcLt1, 10, 1) => pair(tau, nu),
        (Regime::GcLt1, 10, _) => pair(tau, -nu),
        (Regime::GcLt1, 11, _) => mat([[-1.0, 1.0, 0.0], [1.0, -eta, 0.0], [0.0, 0.0, mu]]),
        _ => return Err(Error::OutOfDomain(format!("no canonical matrix for {form}"))),
    })
}
