//! Shared fixtures: families, parameter grids, automorphisms and
//! Lorentz transformations of the working bases.
#![allow(dead_code)]

use lorcurv::classify::{canonical_matrix, FormId, ParamName, Params};
use lorcurv::core::{MetricTensor, Regime, ToleranceConfig};
use lorcurv::linalg::{j21, mat, singular_values};
use lorcurv::FamilyTag;
use nalgebra::{Matrix2, Matrix3};

/// One representative family per regime plus the extra c values of the
/// sweep grids.
pub const FAMILIES: [FamilyTag; 7] = [
    FamilyTag::GI,
    FamilyTag::Gc(2.0),
    FamilyTag::Gc(5.0),
    FamilyTag::Gc(1.0),
    FamilyTag::Gc(-3.0),
    FamilyTag::Gc(0.0),
    FamilyTag::Gc(0.75),
];

fn cartesian(lists: &[(ParamName, Vec<f64>)]) -> Vec<Params> {
    let mut out = vec![Params::default()];
    for (name, vals) in lists {
        out = out
            .iter()
            .flat_map(|p| {
                vals.iter().map(move |&v| {
                    let mut q = *p;
                    q.set(*name, v);
                    q
                })
            })
            .collect();
    }
    out
}

/// The table sweep grid: μ, ν ∈ {1/2, 1, 2, 5}; τ ∈ {−2, 0, 1/2} (τ ∈ {3/2,
/// 2, 3} for 10-2); η ∈ {−1, 0, 1/2}; ν ∈ (1, c] sampled at quarter steps
/// for the c > 1 form 3.
pub fn sweep_points(family: FamilyTag, form: FormId) -> Vec<Params> {
    let base = vec![0.5, 1.0, 2.0, 5.0];
    let lists: Vec<_> = form
        .param_names()
        .iter()
        .map(|&n| {
            let vals = match n {
                ParamName::Mu => base.clone(),
                ParamName::Nu if form.regime == Regime::GcGt1 => {
                    let c = family.c().unwrap();
                    (1..=4).map(|k| 1.0 + (c - 1.0) * k as f64 / 4.0).collect()
                }
                ParamName::Nu => base.clone(),
                ParamName::Tau if form.sub == 2 => vec![1.5, 2.0, 3.0],
                ParamName::Tau => vec![-2.0, 0.0, 0.5],
                ParamName::Eta => vec![-1.0, 0.0, 0.5],
            };
            (n, vals)
        })
        .collect();
    cartesian(&lists)
}

/// Five or more values per parameter, spread over the whole domain.
pub fn dense_points(family: FamilyTag, form: FormId) -> Vec<Params> {
    let lists: Vec<_> = form
        .param_names()
        .iter()
        .map(|&n| {
            let vals = match n {
                ParamName::Mu => vec![0.2, 0.5, 1.0, 3.0, 10.0],
                ParamName::Nu if form.regime == Regime::GcGt1 => {
                    let c = family.c().unwrap();
                    (1..=5).map(|k| 1.0 + (c - 1.0) * k as f64 / 5.0).collect()
                }
                ParamName::Nu => vec![0.2, 0.25, 1.0, 3.0, 10.0],
                ParamName::Tau if form.sub == 2 => vec![1.1, 1.5, 2.0, 4.0, 10.0],
                ParamName::Tau => vec![-5.0, -1.0, 0.0, 0.5, 0.9],
                ParamName::Eta => vec![-5.0, -1.0, 0.0, 0.5, 0.9],
            };
            (n, vals)
        })
        .collect();
    cartesian(&lists)
}

pub fn forms(family: FamilyTag) -> Vec<FormId> {
    FormId::all(family.regime())
}

pub fn working_metric(family: FamilyTag, m: Matrix3<f64>) -> MetricTensor {
    MetricTensor::new(m, family.regime().working_basis(), ToleranceConfig::default()).unwrap()
}

pub fn canonical_metric(family: FamilyTag, form: FormId, p: &Params) -> MetricTensor {
    working_metric(family, canonical_matrix(family, form, p).unwrap())
}

/// An automorphism of the working-basis algebra built from six numbers in
/// [−3, 3]; `None` when the block is too close to singular.
pub fn working_automorphism(family: FamilyTag, x: [f64; 6]) -> Option<Matrix3<f64>> {
    let [a, b, c, d, t1, t2] = x;
    let g = match family.regime() {
        Regime::GI => Matrix2::new(a, b, c, d),
        Regime::GcGt1 => {
            let cc = family.c().unwrap();
            Matrix2::new(b - a, -cc * a, a, b + a)
        }
        Regime::G1 => Matrix2::new(a, b, 0.0, a),
        Regime::GcLt1 => Matrix2::new(a, 0.0, 0.0, b),
    };
    if g.determinant().abs() < 0.1 {
        return None;
    }
    Some(mat([[g[(0, 0)], g[(0, 1)], t1], [g[(1, 0)], g[(1, 1)], t2], [0.0, 0.0, 1.0]]))
}

pub fn rotation12(t: f64) -> Matrix3<f64> {
    let (s, c) = t.sin_cos();
    mat([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])
}

pub fn boost23(p: f64) -> Matrix3<f64> {
    let (s, c) = (p.sinh(), p.cosh());
    mat([[1.0, 0.0, 0.0], [0.0, c, s], [0.0, s, c]])
}

/// Element of O(2,1): rotation · boost · rotation, then the reflections
/// selected by the low three bits of `refl`.
pub fn lorentz(t1: f64, p: f64, t2: f64, refl: u8) -> Matrix3<f64> {
    let r = Matrix3::from_diagonal(&nalgebra::Vector3::from_fn(|i, _| {
        if refl & (1 << i) != 0 {
            -1.0
        } else {
            1.0
        }
    }));
    rotation12(t1) * boost23(p) * rotation12(t2) * r
}

/// Aᵗ J A for a reasonably conditioned A, i.e. a random Lorentzian metric.
pub fn lorentzian_from(a: [f64; 9]) -> Option<Matrix3<f64>> {
    let a = Matrix3::from_row_slice(&a);
    let sv = singular_values(&a);
    if sv[2] < 0.1 || sv[0] / sv[2] > 30.0 {
        return None;
    }
    Some(a.transpose() * j21() * a)
}

/// |x − y| ≤ tol·(1 + |x|).
pub fn close(x: f64, y: f64, tol: f64) -> bool {
    (x - y).abs() <= tol * (1.0 + x.abs())
}

/// Greedy matching of two multisets of complex numbers.
pub fn same_multiset(a: &[(f64, f64)], b: &[(f64, f64)], tol: f64) -> bool {
    let mut used = vec![false; b.len()];
    a.iter().all(|x| {
        let hit = (0..b.len())
            .filter(|&j| !used[j])
            .min_by(|&i, &j| dist(*x, b[i]).total_cmp(&dist(*x, b[j])));
        match hit {
            Some(j) if dist(*x, b[j]) <= tol * (1.0 + x.0.abs().max(x.1.abs())) => {
                used[j] = true;
                true
            }
            _ => false,
        }
    })
}

fn dist(a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - b.0).hypot(a.1 - b.1)
}

/// Fixed-seed proptest configuration; `PROPTEST_CASES` overrides the count
/// and `PROPTEST_RANDOM=1` switches to a fresh seed for exploratory runs.
pub fn config(cases: u32) -> proptest::test_runner::Config {
    use proptest::test_runner::{Config, RngSeed};
    let cases = std::env::var("PROPTEST_CASES").ok().and_then(|s| s.parse().ok()).unwrap_or(cases);
    let rng_seed = if std::env::var_os("PROPTEST_RANDOM").is_some() {
        RngSeed::Random
    } else {
        RngSeed::Fixed(0x1f2e_3d4c)
    };
    Config { cases, rng_seed, failure_persistence: None, max_global_rejects: 4 * cases.max(256), ..Config::default() }
}
