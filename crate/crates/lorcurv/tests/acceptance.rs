//! Acceptance criteria 1–10. Runs without the libtest harness so that each
//! criterion prints exactly one PASS/FAIL line; exits non-zero on failure.

mod common;

use common::{canonical_metric, forms, lorentz, sweep_points, working_automorphism, working_metric, FAMILIES};
use lorcurv::atlas::{cross_check, grid_jobs, AtlasEntry, ParamGrid};
use lorcurv::classify::{
    canonical_form, constant_curvature_class, equivalent, working_algebra, ConstantCurvature, FormId, Params,
};
use lorcurv::core::{is_automorphism, orthonormal_frame, MetricTensor, Regime};
use lorcurv::curvature::{CurvatureReport, FrameGeometry};
use lorcurv::linalg::{j21, lorentz_dot, lorentz_inverse, mat, max_abs};
use lorcurv::oneill::{classify_self_adjoint, ONeillType};
use lorcurv::{BasisLabel, FamilyTag, ToleranceConfig};
use nalgebra::{Matrix3, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

type Outcome = Result<String, String>;

const TABLE_TOL: f64 = 1e-9;

/// Every report computed along the way, for the scalar identity check.
#[derive(Default)]
struct Seen {
    reports: Vec<(String, f64, f64)>,
}

impl Seen {
    fn record(&mut self, label: impl Into<String>, r: &CurvatureReport) {
        self.reports.push((label.into(), r.scalar_identity_residual(), r.scalar));
    }
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn rel(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * 1f64.max(b.abs())
}

fn trichotomy(x: f64) -> ONeillType {
    if x == 0.0 {
        ONeillType::T21
    } else if x > 0.0 {
        ONeillType::T11_1
    } else {
        ONeillType::T1zz
    }
}

fn grid(s: &str) -> ParamGrid {
    s.parse().expect("grid literal")
}

fn form_id(s: &str) -> FormId {
    s.parse().expect("form literal")
}

fn engine_cell(r: &CurvatureReport, cell: &str) -> Option<f64> {
    match cell {
        "rho" => Some(r.scalar),
        "k12" => Some(r.sectional[0]),
        "k23" => Some(r.sectional[1]),
        "k31" => Some(r.sectional[2]),
        _ => {
            let b = cell.strip_prefix("Ric[")?.strip_suffix(']')?;
            let (i, j) = b.split_once("][")?;
            Some(r.ricci_operator[(i.parse::<usize>().ok()? - 1, j.parse::<usize>().ok()? - 1)])
        }
    }
}

/// Cross-checks one table row: closed form vs engine within `TABLE_TOL`,
/// and every catalogued typo cell against the engine's value.
fn table_row(seen: &mut Seen, family: FamilyTag, form: FormId, p: &Params) -> Result<AtlasEntry, String> {
    let e = cross_check(family, form, p).map_err(|err| format!("{family} {form}: {err}"))?;
    seen.record(format!("{family} {form} reference frame"), &e.engine_form);
    ensure(e.flagged.is_empty() && e.residual <= TABLE_TOL, || {
        format!("{family} {form} {p:?}: residual {:e}, flagged {:?}", e.residual, e.flagged)
    })?;
    for t in &e.closed_form.known_typos {
        if let (Some(corrected), Some(engine)) = (t.corrected, engine_cell(&e.engine_form, &t.cell)) {
            ensure(rel(engine, corrected, TABLE_TOL), || {
                format!("{family} {form}: typo cell {} engine {engine} vs corrected {corrected}", t.cell)
            })?;
        }
    }
    Ok(e)
}

fn criterion_1(seen: &mut Seen) -> Outcome {
    let mut rows = 0;
    for mu in [0.5, 1.0, 2.0, 5.0] {
        for (form, s) in [("GI.1", -1.0), ("GI.2", 1.0), ("GI.3", 0.0)] {
            let e = table_row(seen, FamilyTag::GI, form_id(form), &Params::mu(mu))?;
            let r = &e.engine_form;
            let want = Matrix3::identity() * (2.0 * s / mu);
            ensure(max_abs(&(r.ricci_operator - want)) <= TABLE_TOL * 1f64.max(2.0 / mu), || {
                format!("{form} μ={mu}: Ric {:?}", r.ricci_operator)
            })?;
            ensure(rel(r.scalar, 6.0 * s / mu, TABLE_TOL), || format!("{form} μ={mu}: ρ {}", r.scalar))?;
            ensure(r.sectional.iter().all(|&k| rel(k, s / mu, TABLE_TOL)), || {
                format!("{form} μ={mu}: κ {:?}", r.sectional)
            })?;
            rows += 1;
        }
    }
    Ok(format!("{rows} GI rows match ±(2/μ)I, ±6/μ, ±1/μ and the flat form"))
}

fn criterion_2(seen: &mut Seen) -> Outcome {
    let mut rows = 0;
    let mut typos = 0;
    for c in [2.0, 5.0] {
        let fam = FamilyTag::Gc(c);
        for mu in [1.0, 3.0] {
            let e = table_row(seen, fam, form_id("Gc_gt1.1"), &Params::mu(mu))?;
            let r = &e.engine_form;
            ensure(rel(r.scalar, c * c * mu / 2.0, TABLE_TOL), || format!("c={c} μ={mu}: ρ {}", r.scalar))?;
            ensure(rel(r.sectional[1], 3.0 * c * c * mu / 4.0, TABLE_TOL), || {
                format!("c={c} μ={mu}: κ(y2,y3) {}", r.sectional[1])
            })?;
            rows += 1;
            for tau in [-2.0, 0.0, 0.5] {
                let p = Params { mu: Some(mu), tau: Some(tau), ..Default::default() };
                let e = table_row(seen, fam, form_id("Gc_gt1.2"), &p)?;
                let want = trichotomy((c + tau).powi(2) - 4.0 * c);
                ensure(e.engine_form.oneill.type_tag == want, || {
                    format!("c={c} τ={tau}: type {} expected {want}", e.engine_form.oneill.type_tag)
                })?;
                let t = e.closed_form.known_typos.iter().find(|t| t.cell == "k31").ok_or("k31 typo not catalogued")?;
                let engine = e.engine_form.sectional[2];
                let printed = t.printed.ok_or("k31 typo without printed value")?;
                ensure(rel(engine, t.corrected.unwrap(), TABLE_TOL), || format!("k31 engine {engine}"))?;
                ensure((engine - printed).abs() > 1e-6 * (1.0 + engine.abs()) || engine.abs() < 1e-12, || {
                    format!("c={c} τ={tau}: printed k31 {printed} unexpectedly agrees with the engine")
                })?;
                typos += 1;
                rows += 1;
            }
            for k in 1..=4 {
                let nu = 1.0 + (c - 1.0) * k as f64 / 4.0;
                let p = Params { mu: Some(mu), nu: Some(nu), ..Default::default() };
                let e = table_row(seen, fam, form_id("Gc_gt1.3"), &p)?;
                ensure(e.engine_form.oneill.type_tag == ONeillType::T11_1, || format!("c={c} ν={nu}: not {{11,1}}"))?;
                rows += 1;
            }
        }
    }
    Ok(format!("{rows} c>1 rows match; k31 typo checked against the engine in {typos} rows"))
}

fn criterion_3(seen: &mut Seen) -> Outcome {
    let fam = FamilyTag::Gc(1.0);
    let mut jobs = grid_jobs(fam, &grid("mu=1/2,1,2;nu=1/2,1,2"));
    jobs.dedup_by(|a, b| a.0 == b.0 && a.1.values(a.0) == b.1.values(b.0));
    let mut covered = BTreeSet::new();
    for (form, p) in &jobs {
        let e = table_row(seen, fam, *form, p)?;
        covered.insert(form.to_string());
        let r = &e.engine_form;
        match form.case {
            1 => ensure(max_abs(&r.ricci_operator) < TABLE_TOL && r.scalar.abs() < TABLE_TOL, || {
                format!("G1.1 not flat: {:?}", r.ricci_operator)
            })?,
            3 | 5 => {
                let want = trichotomy(1.0 - 4.0 * p.nu.unwrap());
                ensure(r.oneill.type_tag == want, || format!("{form} {p:?}: type {}", r.oneill.type_tag))?;
            }
            _ => {}
        }
    }
    ensure(covered.len() == 7, || format!("only {} forms covered", covered.len()))?;
    let e = table_row(seen, fam, form_id("G1.2"), &Params::mu(2.0))?;
    let want = mat([[-1.0, 1.0, -1.0], [1.0, 1.0, 0.0], [1.0, 0.0, 1.0]]);
    ensure(max_abs(&(e.engine_form.ricci_operator - want)) < TABLE_TOL, || {
        format!("G1.2 μ=2: {:?}", e.engine_form.ricci_operator)
    })?;
    for form in ["G1.3", "G1.5"] {
        for mu in [0.5, 1.0, 2.0] {
            let p = Params { mu: Some(mu), nu: Some(0.25), ..Default::default() };
            let e = table_row(seen, fam, form_id(form), &p)?;
            ensure(e.engine_form.oneill.type_tag == ONeillType::T21, || format!("{form} ν=1/4 not {{21}}"))?;
        }
    }
    Ok(format!("{} G1 rows over 7 forms; ν=1/4 boundary gives {{21}}", jobs.len() + 7))
}

fn criterion_4(seen: &mut Seen) -> Outcome {
    let g = grid("mu=1/2,1,2;nu=1/2,1,2;tau=-2,0,1/2,3/2,2,3;eta=-1,0,1/2");
    let mut rows = 0;
    for c in [-3.0, 0.0, 0.75] {
        let fam = FamilyTag::Gc(c);
        let w = fam.w().unwrap();
        let mut covered = BTreeSet::new();
        let mut jobs = grid_jobs(fam, &g);
        jobs.dedup_by(|a, b| a.0 == b.0 && a.1.values(a.0) == b.1.values(b.0));
        for (form, p) in jobs {
            let e = table_row(seen, fam, form, &p)?;
            covered.insert(form.to_string());
            let ty = e.engine_form.oneill.type_tag;
            let want = match (form.case, form.sub) {
                (10, 1) => Some(trichotomy(p.tau.unwrap() * (p.tau.unwrap() - 1.0 + w * w))),
                (11, _) => Some(trichotomy(p.eta.unwrap() * (p.eta.unwrap() - 1.0 + w * w))),
                (1 | 3 | 8 | 9, _) => Some(if c == 0.0 { ONeillType::T11_1 } else { ONeillType::T21 }),
                _ => None,
            };
            if let Some(want) = want {
                ensure(ty == want, || format!("c={c} {form} {p:?}: type {ty} expected {want}"))?;
            }
            rows += 1;
        }
        ensure(covered.len() == 12, || format!("c={c}: {} forms covered", covered.len()))?;
    }
    Ok(format!("{rows} c<1 rows over 12 forms (10 split) for c ∈ {{−3, 0, 3/4}}; w=1 switches hold"))
}

fn criterion_5(seen: &mut Seen, rng: &mut ChaCha8Rng) -> Outcome {
    let tol = ToleranceConfig::default();
    let mut groups = 0;
    let mut worst = 0.0_f64;
    for fam in FAMILIES {
        let alg = working_algebra(fam).map_err(|e| e.to_string())?;
        for form in forms(fam) {
            let pts = sweep_points(fam, form);
            let geos: Vec<FrameGeometry> = pts
                .iter()
                .map(|p| {
                    let frame = orthonormal_frame(&canonical_metric(fam, form, p))?;
                    seen.record(format!("{fam} {form} auto frame"), &CurvatureReport::compute(&alg, &frame, tol)?);
                    FrameGeometry::new(&alg, &frame, tol)
                })
                .collect::<lorcurv::Result<_>>()
                .map_err(|e| format!("{fam} {form}: {e}"))?;
            let mut pairs = 0;
            while pairs < 1000 {
                let geo = &geos[pairs % geos.len()];
                let u = Vector3::from_fn(|_, _| rng.gen_range(-2.0..2.0));
                let v = Vector3::from_fn(|_, _| rng.gen_range(-2.0..2.0));
                let uu = lorentz_dot(&u, &u);
                if uu.abs() < 0.1 {
                    continue;
                }
                let v = v - u * (lorentz_dot(&u, &v) / uu);
                if (uu * lorentz_dot(&v, &v)).abs() < 0.1 {
                    continue;
                }
                let direct = geo.sectional(&u, &v).map_err(|e| e.to_string())?;
                let identity = geo.milnor_sectional(&u, &v).map_err(|e| e.to_string())?;
                let d = (direct - identity).abs();
                worst = worst.max(d);
                ensure(d < 1e-8, || format!("{fam} {form}: κ {direct} vs identity {identity}"))?;
                pairs += 1;
            }
            groups += 1;
        }
    }
    Ok(format!("1000 pairs in each of {groups} family/form groups; max deviation {worst:.1e}"))
}

fn criterion_6(seen: &Seen) -> Outcome {
    let mut worst = 0.0_f64;
    for (label, res, rho) in &seen.reports {
        let r = res.abs() / 1f64.max(rho.abs());
        worst = worst.max(r);
        ensure(r <= TABLE_TOL, || format!("{label}: tr Ric − 2Σκ = {res:e}"))?;
    }
    Ok(format!("{} reports; max relative residual {worst:.1e}", seen.reports.len()))
}

fn criterion_7(seen: &mut Seen, rng: &mut ChaCha8Rng) -> Outcome {
    let mut total = 0;
    let mut worst = 0.0_f64;
    for fam in FAMILIES {
        let alg = working_algebra(fam).map_err(|e| e.to_string())?;
        for form in forms(fam) {
            let pts = sweep_points(fam, form);
            let mut done = 0;
            while done < 100 {
                let p = pts[done % pts.len()];
                let Some(a) = working_automorphism(fam, std::array::from_fn(|_| rng.gen_range(-3.0..3.0))) else {
                    continue;
                };
                let canon = canonical_metric(fam, form, &p);
                let h = working_metric(fam, a.transpose() * canon.matrix() * a);
                let cf = canonical_form(fam, &h).map_err(|e| format!("{fam} {form} {p:?}: {e}"))?;
                ensure(cf.form_id == form, || format!("{fam} {form} {p:?}: re-canonicalized to {}", cf.form_id))?;
                for (got, want) in cf.params.values(form).iter().zip(p.values(form)) {
                    ensure((got - want).abs() <= 1e-6 * 1f64.max(want.abs()), || {
                        format!("{fam} {form}: parameter {got} vs {want}")
                    })?;
                }
                let w = cf.witness;
                let res = max_abs(&(w.transpose() * h.matrix() * w - cf.canonical_matrix))
                    / (1.0 + max_abs(h.matrix()) * max_abs(&w).powi(2));
                worst = worst.max(res);
                ensure(res < 1e-7 && is_automorphism(&alg, &w), || {
                    format!("{fam} {form}: witness residual {res:e}")
                })?;
                if done == 0 {
                    let frame = orthonormal_frame(&h).map_err(|e| e.to_string())?;
                    let r = CurvatureReport::compute(&alg, &frame, h.tolerance).map_err(|e| e.to_string())?;
                    seen.record(format!("{fam} {form} moved metric"), &r);
                }
                done += 1;
                total += 1;
            }
        }
    }
    Ok(format!("{total} automorphism round trips; max witness residual {worst:.1e}"))
}

fn criterion_8(rng: &mut ChaCha8Rng) -> Outcome {
    let tol = ToleranceConfig::default();
    let sep = |rng: &mut ChaCha8Rng| rng.gen_range(0.5..3.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
    let mut total = 0;
    for ty in [ONeillType::T11_1, ONeillType::T1zz, ONeillType::T21, ONeillType::T3] {
        for _ in 0..500 {
            let (a, s, r) = (rng.gen_range(-3.0..3.0), sep(rng), sep(rng));
            let t = match ty {
                ONeillType::T11_1 => Matrix3::from_diagonal(&Vector3::new(a, a + s, a - 2.0 * s)),
                ONeillType::T1zz => mat([[a, 0.0, 0.0], [0.0, a + s, r], [0.0, -r, a + s]]),
                ONeillType::T21 => {
                    let n = mat([[0.0, 0.0, 0.0], [0.0, 0.5, 0.5], [0.0, -0.5, -0.5]]);
                    Matrix3::from_diagonal(&Vector3::new(a, a + s, a + s)) + n * r.signum()
                }
                ONeillType::T3 => Matrix3::identity() * a + mat([[0.0, r, r], [r, 0.0, 0.0], [-r, 0.0, 0.0]]),
            };
            let b = lorentz(
                rng.gen_range(-3.2..3.2),
                rng.gen_range(-1.5..1.5),
                rng.gen_range(-3.2..3.2),
                rng.gen_range(0..8),
            );
            ensure(max_abs(&(b.transpose() * j21() * b - j21())) < 1e-9, || "generator left O(2,1)".into())?;
            let got = classify_self_adjoint(&(lorentz_inverse(&b) * t * b), &tol).map_err(|e| e.to_string())?;
            ensure(got.type_tag == ty, || format!("{ty} conjugated to {}", got.type_tag))?;
            total += 1;
        }
    }
    Ok(format!("{total} conjugations (500 per type) keep their type"))
}

fn criterion_9() -> Outcome {
    let expected: BTreeSet<(String, String)> = [
        ("GI", "GI.3"),
        ("Gc(c=1)", "G1.1"),
        ("Gc(c=0)", "Gc_lt1.1"),
        ("GI", "GI.2"),
        ("GI", "GI.1"),
        ("Gc(c=-3)", "Gc_lt1.7"),
        ("Gc(c=0)", "Gc_lt1.7"),
        ("Gc(c=0.75)", "Gc_lt1.7"),
    ]
    .iter()
    .map(|(f, g)| (f.to_string(), g.to_string()))
    .collect();
    let mut found = BTreeSet::new();
    let mut extra: BTreeMap<(String, String), (usize, f64)> = BTreeMap::new();
    let mut checked = 0;
    for fam in FAMILIES {
        for form in forms(fam) {
            for p in sweep_points(fam, form) {
                let rep = constant_curvature_class(fam, &canonical_metric(fam, form, &p)).map_err(|e| e.to_string())?;
                checked += 1;
                if rep.class == ConstantCurvature::NonConstant {
                    continue;
                }
                let key = (fam.to_string(), form.to_string());
                let want = match (form.regime, form.case) {
                    (Regime::GI, 1) | (Regime::GcLt1, 7) => Some((ConstantCurvature::NegativeConstant, -1.0)),
                    (Regime::GI, 2) => Some((ConstantCurvature::PositiveConstant, 1.0)),
                    _ => None,
                };
                if let Some((class, sign)) = want {
                    let mu = p.mu.unwrap();
                    ensure(rep.class == class && rel(rep.kappa.unwrap_or(f64::NAN), sign / mu, TABLE_TOL), || {
                        format!("{fam} {form} μ={mu}: {:?} κ={:?}", rep.class, rep.kappa)
                    })?;
                } else if expected.contains(&key) {
                    ensure(rep.class == ConstantCurvature::Flat, || format!("{fam} {form}: {:?}", rep.class))?;
                } else {
                    // κ·μ is the same on every row of a form
                    let e = extra.entry(key.clone()).or_insert((0, rep.kappa.unwrap_or(f64::NAN) * p.mu.unwrap()));
                    e.0 += 1;
                }
                found.insert(key);
            }
        }
    }
    let missing: Vec<_> = expected.difference(&found).collect();
    ensure(missing.is_empty(), || format!("listed cases not recovered: {missing:?}"))?;
    ensure(extra.is_empty(), || {
        let list: Vec<String> = extra
            .iter()
            .map(|((f, g), (n, k))| format!("{f} {g} (κ = {k}/μ, {n} rows)"))
            .collect();
        format!(
            "all {} listed cases recovered, but Ric is a multiple of the identity, hence constant curvature, on \
             unlisted rows: {}",
            expected.len(),
            list.join(", ")
        )
    })?;
    Ok(format!("{checked} sweep metrics; exactly the {} listed family/form pairs are constant", found.len()))
}

fn criterion_10() -> Outcome {
    let c2 = FamilyTag::Gc(2.0);
    let natural = |m: [[f64; 3]; 3]| MetricTensor::from_rows(m, BasisLabel::Natural).map_err(|e| e.to_string());
    let witness_ok = |fam: FamilyTag, h1: &MetricTensor, h2: &MetricTensor| -> Result<(), String> {
        let eq = equivalent(fam, h1, h2).map_err(|e| e.to_string())?;
        let a = eq.witness_matrix().ok_or("no witness")?;
        let alg = working_algebra(fam).map_err(|e| e.to_string())?;
        let res = max_abs(&(a.transpose() * h1.matrix() * a - h2.matrix()));
        ensure(eq.equivalent && is_automorphism(&alg, &a) && res < 1e-9, || format!("witness residual {res:e}"))
    };
    for mu in [0.5, 2.0] {
        // τ = 3 lies outside τ < 1 and is identified with τ' = 1 + (c−1)²/(τ−1) = 3/2
        let far = natural([[1.0, 1.0, 0.0], [1.0, 3.0, 0.0], [0.0, 0.0, -mu]])?;
        let near = natural([[1.0, 1.0, 0.0], [1.0, 1.5, 0.0], [0.0, 0.0, -mu]])?;
        let cf = canonical_form(c2, &far).map_err(|e| e.to_string())?;
        ensure(cf.form_id == form_id("Gc_gt1.3") && rel(cf.params.nu.unwrap(), 1.5, 1e-12), || {
            format!("τ=3 canonicalized to {} {:?}", cf.form_id, cf.params)
        })?;
        witness_ok(c2, &far, &near)?;
    }
    for mu in [1.0, 4.0] {
        let neg = natural([[-1.0, -1.0, 0.0], [-1.0, 0.0, 0.0], [0.0, 0.0, mu]])?;
        let pos = natural([[1.0, 1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, mu]])?;
        witness_ok(c2, &neg, &pos)?;
    }
    let gi = FamilyTag::GI;
    let reps: Vec<MetricTensor> = [("GI.1", 1.0), ("GI.1", 2.0), ("GI.2", 1.0), ("GI.2", 2.0), ("GI.3", 1.0)]
        .iter()
        .map(|&(f, mu)| canonical_metric(gi, form_id(f), &Params::mu(mu).restrict(form_id(f))))
        .collect();
    for (i, a) in reps.iter().enumerate() {
        for b in &reps[i + 1..] {
            let eq = equivalent(gi, a, b).map_err(|e| e.to_string())?;
            ensure(!eq.equivalent, || format!("{} ~ {} in GI", eq.first.form_id, eq.second.form_id))?;
        }
    }
    Ok("τ=3 ~ τ'=3/2 and the mixed-sign pair have witnesses; GI forms pairwise inequivalent".into())
}

fn main() {
    let start = Instant::now();
    let mut seen = Seen::default();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_2101);
    let timed = |f: &mut dyn FnMut() -> Outcome| {
        let t = Instant::now();
        let o = f();
        if std::env::var_os("ACCEPTANCE_TIMING").is_some() {
            eprintln!("  ({:.2}s)", t.elapsed().as_secs_f64());
        }
        o
    };
    let outcomes: Vec<Outcome> = vec![
        timed(&mut || criterion_1(&mut seen)),
        timed(&mut || criterion_2(&mut seen)),
        timed(&mut || criterion_3(&mut seen)),
        timed(&mut || criterion_4(&mut seen)),
        timed(&mut || criterion_5(&mut seen, &mut rng)),
        timed(&mut || criterion_7(&mut seen, &mut rng)),
        timed(&mut || criterion_8(&mut rng)),
        timed(&mut criterion_9),
        timed(&mut criterion_10),
    ];
    let mut outcomes = outcomes.into_iter();
    let mut all = Vec::new();
    for n in 1..=10 {
        let o = if n == 6 { criterion_6(&seen) } else { outcomes.next().unwrap() };
        all.push((n, o));
    }
    let mut failed = 0;
    for (n, o) in &all {
        match o {
            Ok(msg) => println!("criterion {n}: PASS — {msg}"),
            Err(msg) => {
                failed += 1;
                println!("criterion {n}: FAIL — {msg}");
            }
        }
    }
    println!("acceptance: {} of 10 passed in {:.1}s", 10 - failed, start.elapsed().as_secs_f64());
    if failed > 0 {
        std::process::exit(1);
    }
}
