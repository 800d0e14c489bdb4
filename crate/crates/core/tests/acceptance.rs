//! Acceptance suite: one pass/fail line per criterion.
//!
//! Every criterion writes its results to a file under the run directory. The
//! last criterion repeats the others with the same seed in a second directory
//! and compares the files byte for byte.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use tracelab_core::cache::Compute;
use tracelab_core::experiments::{vanishing_scan, Family, ScanPlan};
use tracelab_core::gns::{center, decompose_trace, gns, is_character};
use tracelab_core::group::IntMatrix;
use tracelab_core::linalg;
use tracelab_core::relative::{
    is_relative_character, lambda_average, relative_character_dims, torus_limit_scan, AutomorphismAction,
};
use tracelab_core::spectral::{
    beta_grid, certificate_propagation, complement_norm_lemma, conj_gap, identity_checks, norm_conj, norm_pi,
    random_complement_instance, restricted_conj_norm, CheckOptions, GroupAlgebraElement, PropagationOptions,
};
use tracelab_core::trace::{convex_combine, convex_combine_exact, normalized_character, pullback};
use tracelab_core::{
    build_group, character_table, CharacterTable, Cyclotomic, GroupHandle, IntegerMatrixElement, Trace,
};

const SEED: u64 = 20_240_611;
/// Residual tolerance for the norm/inequality comparisons.
const RESIDUAL_TOL: f64 = 1e-9;
const IDENTITY_TOL: f64 = 1e-10;
const WEIGHT_TOL: f64 = 1e-8;
const RECOMBINE_TOL: f64 = 1e-10;
const LIMIT_TOL: f64 = 1e-8;

const GROUPS: [&str; 17] = [
    "cyclic(1)", "cyclic(2)", "cyclic(3)", "cyclic(4)", "cyclic(5)", "cyclic(6)", "cyclic(7)", "cyclic(8)",
    "cyclic(9)", "cyclic(10)", "cyclic(11)", "cyclic(12)", "q8", "sl(2,3)", "sl(2,5)", "sl(2,7)", "sl(2,4)",
];
const VANISHING_PRIMES: [u32; 8] = [3, 5, 7, 11, 13, 17, 19, 23];
const TORUS_PRIMES: [u32; 6] = [2, 3, 5, 7, 11, 13];
const PROPAGATION_PRIMES: [u32; 7] = [5, 7, 11, 13, 17, 19, 23];

type Tables = Vec<(String, Arc<GroupHandle>, Arc<CharacterTable>)>;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn write_json(dir: &Path, name: &str, value: &serde_json::Value) {
    fs::write(dir.join(name), serde_json::to_string_pretty(value).unwrap() + "\n").unwrap();
}

fn rows_of(g: &Arc<GroupHandle>, t: &CharacterTable) -> Vec<Trace> {
    (0..t.len()).map(|i| normalized_character(g.clone(), t, i).unwrap()).collect()
}

fn generator_average(g: &GroupHandle) -> GroupAlgebraElement<usize> {
    if g.generators().is_empty() {
        GroupAlgebraElement::delta(g.identity())
    } else {
        GroupAlgebraElement::symmetric_uniform(g, g.generators()).unwrap()
    }
}

/// Both orthogonality relations, summed directly in `ℤ[ζ_n]`.
fn exact_orthogonality(g: &GroupHandle, t: &CharacterTable) -> bool {
    let classes = g.classes();
    let k = classes.len();
    let n = g.order() as i64;
    let e = t.exponent() as u32;
    let lift = |c: &Cyclotomic| c.lift(e);
    let value = |i: usize, j: usize| lift(t.value(i, j));
    for i in 0..k {
        for l in 0..k {
            let mut s = Cyclotomic::zero(e);
            for j in 0..k {
                s = s.add(&value(i, j).mul(&value(l, j).conj()).scale(classes.sizes()[j] as i64));
            }
            if s != Cyclotomic::from_int(e, if i == l { n } else { 0 }) {
                return false;
            }
        }
    }
    for j in 0..k {
        for m in 0..k {
            let mut s = Cyclotomic::zero(e);
            for i in 0..k {
                s = s.add(&value(i, j).mul(&value(i, m).conj()));
            }
            let expected = if j == m { n / classes.sizes()[j] as i64 } else { 0 };
            if s != Cyclotomic::from_int(e, expected) {
                return false;
            }
        }
    }
    t.degrees().iter().map(|d| d * d).sum::<u64>() == g.order() as u64
}

fn criterion_1(dir: &Path, tables: &mut Tables) -> Outcome {
    let mut report = Vec::new();
    let mut bad = Vec::new();
    for name in GROUPS {
        let g = Arc::new(build_group(&name.parse().unwrap()).unwrap());
        let t = Arc::new(character_table(&g, g.classes()).unwrap());
        let ok = exact_orthogonality(&g, &t);
        if !ok {
            bad.push(name);
        }
        report.push(json!({ "group": name, "order": g.order(), "degrees": t.degree_multiset(), "exact": ok }));
        tables.push((name.to_string(), g, t));
    }
    write_json(dir, "c01_tables.json", &json!(report));
    outcome(bad.is_empty(), format!("{} groups exact, failures {:?}", GROUPS.len() - bad.len(), bad))
}

/// Rows of the table plus 50 two-row mixtures, labelled with the ground truth.
fn character_candidates(g: &Arc<GroupHandle>, t: &CharacterTable, rng: &mut ChaCha8Rng) -> Vec<(String, Trace, bool)> {
    let rows = rows_of(g, t);
    let mut out: Vec<(String, Trace, bool)> =
        rows.iter().enumerate().map(|(i, r)| (format!("row:{i}"), r.clone(), true)).collect();
    if rows.len() < 2 {
        return out;
    }
    for _ in 0..50 {
        let i = rng.random_range(0..rows.len());
        let mut j = rng.random_range(0..rows.len() - 1);
        if j >= i {
            j += 1;
        }
        let w: f64 = rng.random_range(0.05..0.95);
        let mix = convex_combine(&[w, 1.0 - w], &[&rows[i], &rows[j]]).unwrap();
        out.push((format!("mix:{i}:{j}:{w:.6}"), mix, false));
    }
    out
}

fn criteria_2_3(dir: &Path, tables: &Tables) -> (Outcome, Outcome) {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 2);
    let (mut tested, mut wrong, mut center_bad) = (0, Vec::new(), Vec::new());
    let mut report = Vec::new();
    for (name, g, t) in tables {
        for (label, phi, truth) in character_candidates(g, t, &mut rng) {
            let verdict = is_character(&phi).unwrap();
            let model = gns(&phi).unwrap();
            let z = center(&model).unwrap().center_dim();
            let h = model.invariant_dimension();
            tested += 1;
            if verdict != truth {
                wrong.push(format!("{name}/{label}"));
            }
            if z != h {
                center_bad.push(format!("{name}/{label}"));
            }
            report.push(json!({ "group": name, "trace": label, "is_character": verdict, "center": z, "invariants": h }));
        }
    }
    write_json(dir, "c02_c03_characters.json", &json!(report));
    (
        outcome(wrong.is_empty(), format!("{tested} traces, disagreements {wrong:?}")),
        outcome(center_bad.is_empty(), format!("{tested} traces, dimension mismatches {center_bad:?}")),
    )
}

fn criterion_4(dir: &Path, tables: &Tables) -> Outcome {
    let opts = CheckOptions { random_vectors: 1000, seed: SEED ^ 4, tol: RESIDUAL_TOL };
    let mut report = Vec::new();
    let (mut models, mut disagree, mut worst_identity) = (0, Vec::new(), 0.0f64);
    for (name, g, t) in tables {
        let a = generator_average(g);
        for (row, phi) in rows_of(g, t).iter().enumerate() {
            let model = gns(phi).unwrap();
            let terms: Vec<(usize, Complex64)> = a.terms().map(|(&x, c)| (x, c)).collect();
            let left = linalg::operator_norm(&model.pi_of(&terms));
            let conj = restricted_conj_norm(&model, &a).unwrap().value;
            let l = norm_pi(&model, &a, &beta_grid(left, 20), &opts).unwrap();
            let c = norm_conj(&model, &a, &beta_grid(conj, 20), &opts).unwrap();
            let ids = identity_checks(&model, 1000, SEED ^ (4 + row as u64)).unwrap();
            models += 1;
            let agree = l.iter().chain(&c).filter(|r| r.agree).count();
            if agree != l.len() + c.len() || l.len() != 20 || c.len() != 20 {
                disagree.push(format!("{name}/row:{row}"));
            }
            let id = ids.norm_error.max(ids.conjugation_error);
            worst_identity = worst_identity.max(id);
            report.push(json!({
                "group": name, "row": row, "left_norm": left, "conj_norm": conj,
                "agreeing": agree, "identity_error": id,
            }));
        }
    }
    write_json(dir, "c04_gaps.json", &json!(report));
    let pass = disagree.is_empty() && worst_identity <= IDENTITY_TOL;
    outcome(pass, format!("{models} models x 40 betas, disagreements {disagree:?}, worst identity error {worst_identity:.2e}"))
}

fn criterion_5(dir: &Path) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 5);
    let mut report = BTreeMap::new();
    let mut disagreements = 0;
    for n in 2..=10 {
        let mut bad = 0;
        for k in 0..500 {
            let (a, v) = random_complement_instance(n, rng.random_range(0.0..1.3), &mut rng);
            let beta = rng.random_range(0.01..0.99);
            let r = complement_norm_lemma(&a, &v, beta, 50, SEED ^ k).unwrap();
            if !r.agree {
                bad += 1;
            }
        }
        disagreements += bad;
        report.insert(n.to_string(), bad);
    }
    write_json(dir, "c05_complement.json", &json!(report));
    outcome(disagreements == 0, format!("4500 instances, {disagreements} disagreements"))
}

fn criterion_6(dir: &Path, tables: &Tables) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 6);
    let (mut worst_weight, mut worst_recombine, mut failures) = (0.0f64, 0.0f64, 0);
    let mut report = Vec::new();
    for (name, g, t) in tables {
        let rows = rows_of(g, t);
        for _ in 0..100 {
            let k = rng.random_range(1..=rows.len().min(4));
            let mut picked: Vec<usize> = (0..rows.len()).collect();
            for i in 0..k {
                let j = rng.random_range(i..picked.len());
                picked.swap(i, j);
            }
            picked.truncate(k);
            let raw: Vec<f64> = (0..k).map(|_| rng.random_range(0.05..1.0)).collect();
            let total: f64 = raw.iter().sum();
            let weights: Vec<f64> = raw.iter().map(|w| w / total).collect();
            let parts: Vec<&Trace> = picked.iter().map(|&i| &rows[i]).collect();
            let phi = convex_combine(&weights, &parts).unwrap();
            let model = gns(&phi).unwrap();
            let c = center(&model).unwrap();
            let found = decompose_trace(&model, &c).unwrap();
            if found.len() != k {
                failures += 1;
                continue;
            }
            for comp in &found {
                let matched = picked.iter().position(|&i| {
                    (0..g.order()).all(|x| (comp.trace.eval(x) - rows[i].eval(x)).norm() < 1e-6)
                });
                match matched {
                    Some(p) => worst_weight = worst_weight.max((comp.weight - weights[p]).abs()),
                    None => failures += 1,
                }
            }
            for x in 0..g.order() {
                let back: Complex64 = found.iter().map(|c| c.trace.eval(x) * c.weight).sum();
                worst_recombine = worst_recombine.max((back - phi.eval(x)).norm());
            }
        }
        report.push(json!({ "group": name, "worst_weight_error": worst_weight, "worst_recombination": worst_recombine }));
    }
    write_json(dir, "c06_decompose.json", &json!(report));
    let pass = failures == 0 && worst_weight <= WEIGHT_TOL && worst_recombine <= RECOMBINE_TOL;
    outcome(
        pass,
        format!("{} mixtures, {failures} unmatched, weight error {worst_weight:.2e}, recombination {worst_recombine:.2e}", 100 * GROUPS.len()),
    )
}

/// `(1+√p)/(p−1)` for `p ≡ 1 (mod 4)`, `√(p+1)/(p−1)` for `p ≡ 3 (mod 4)`.
fn closed_form(p: u32) -> f64 {
    let p = p as f64;
    if p as u32 % 4 == 1 {
        (1.0 + p.sqrt()) / (p - 1.0)
    } else {
        (p + 1.0).sqrt() / (p - 1.0)
    }
}

/// The squared value satisfies `(s(p−1)² − (p+1))² = 4p` when `p ≡ 1 (mod 4)`
/// and equals `(p+1)/(p−1)²` otherwise.
fn matches_exactly(p: u32, s: &tracelab_core::CycloRational) -> bool {
    let p = p as i64;
    if p % 4 == 3 {
        return s.as_rational() == Some(Ratio::new(p + 1, (p - 1) * (p - 1)));
    }
    let shifted = s
        .scale(Ratio::from_integer((p - 1) * (p - 1)))
        .sub(&tracelab_core::CycloRational::from_ratio(s.order(), Ratio::from_integer(p + 1)));
    shifted.mul(&shifted).as_rational() == Some(Ratio::from_integer(4 * p))
}

/// Normalized character values at the class of `u`, read off the isotypic
/// projections of a Hermitian central element acting on the regular representation.
///
/// Class weights `a_C` with `a_{C⁻¹} = conj(a_C)` keep the element Hermitian
/// while still separating a character from its complex conjugate.
fn regular_representation_values(g: &GroupHandle, u: usize) -> Vec<(usize, f64)> {
    let n = g.order();
    let left = |x: usize| {
        DMatrix::<Complex64>::from_fn(n, n, |i, j| if g.mul(x, j) == i { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) })
    };
    let classes = g.classes();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 7);
    let raw: Vec<Complex64> =
        (0..classes.len()).map(|_| Complex64::new(rng.random_range(0.0..1.0), rng.random_range(0.0..1.0))).collect();
    let mut z = DMatrix::<Complex64>::zeros(n, n);
    for x in 0..n {
        let c = classes.class_of(x);
        let w = raw[c] + raw[classes.inverse_class()[c]].conj();
        z += left(x) * w;
    }
    let eig = nalgebra::SymmetricEigen::new(z);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let lu = left(u);
    let mut out = Vec::new();
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && (eig.eigenvalues[order[end]] - eig.eigenvalues[order[start]]).abs() < 1e-6 {
            end += 1;
        }
        let cols: Vec<_> = order[start..end].iter().map(|&k| eig.eigenvectors.column(k).into_owned()).collect();
        let v = DMatrix::from_columns(&cols);
        let proj = &v * v.adjoint();
        let rank = end - start;
        let degree = (rank as f64).sqrt().round() as usize;
        // χ(u)·d = tr(P L(u)), since P is the isotypic projection of dimension d²
        let chi = (&proj * &lu).trace() / degree as f64;
        out.push((degree, chi.norm() / degree as f64));
        start = end;
    }
    out
}

fn criterion_7(dir: &Path) -> Outcome {
    let u = IntegerMatrixElement::from_rows(&[vec![1, 1], vec![0, 1]]).unwrap();
    let plan = ScanPlan::new(Family::Sl, 2, VANISHING_PRIMES.to_vec(), vec![u.clone()]);
    let s = vanishing_scan(&plan, &Compute::default()).unwrap();
    fs::write(dir.join("c07_vanishing.csv"), s.to_csv()).unwrap();
    let series = s.series(0);
    let mut problems = Vec::new();
    if s.truncated.is_some() || series.len() != VANISHING_PRIMES.len() || !s.consistent() {
        problems.push("scan incomplete or inconsistent".to_string());
    }
    for (e, &p) in s.entries.iter().zip(&VANISHING_PRIMES) {
        let v = &e.probes[0];
        let exact = v.witness.as_ref().map(|w| matches_exactly(p, &w.abs_squared)).unwrap_or(false);
        if v.max_abs <= 0.0 || !exact || (v.max_abs - closed_form(p)).abs() > 1e-12 {
            problems.push(format!("p = {p}: {}", v.max_abs));
        }
    }
    if series.len() == VANISHING_PRIMES.len() && series[series.len() - 1] * 2.0 > series[0] {
        problems.push("no factor-2 decay between 3 and 23".into());
    }
    // p = 3 against the regular representation of SL(2,3)
    let g = build_group(&"sl(2,3)".parse().unwrap()).unwrap();
    let brute = regular_representation_values(&g, g.reduce(&u).unwrap());
    let nontrivial: Vec<f64> = {
        let mut all: Vec<(usize, f64)> = brute.clone();
        all.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
        // drop one copy of the trivial character (degree 1, value 1)
        let pos = all.iter().position(|&(d, v)| d == 1 && (v - 1.0).abs() < 1e-9).unwrap();
        all.remove(pos);
        all.into_iter().map(|(_, v)| v).collect()
    };
    let degrees: Vec<usize> = {
        let mut d: Vec<usize> = brute.iter().map(|x| x.0).collect();
        d.sort();
        d
    };
    let brute_value = nontrivial.iter().copied().fold(0.0, f64::max);
    if degrees != vec![1, 1, 1, 2, 2, 2, 3] || series.is_empty() || (brute_value - series[0]).abs() > 1e-9 {
        problems.push(format!("regular representation disagrees at p = 3: {brute_value} {degrees:?}"));
    }
    write_json(dir, "c07_series.json", &json!({ "series": series, "regular_representation_p3": brute_value }));
    outcome(
        problems.is_empty(),
        format!("series {:.4?}, ratio 3/23 = {:.3}, problems {problems:?}", series, series[0] / series[series.len() - 1]),
    )
}

fn criterion_8(dir: &Path) -> Outcome {
    let s = torus_limit_scan(3, &TORUS_PRIMES, 2, tracelab_core::relative::torus::ORBIT_BUDGET).unwrap();
    fs::write(dir.join("c08_torus.csv"), s.to_csv()).unwrap();
    let mut problems = Vec::new();
    for (row, &q) in s.rows.iter().zip(&TORUS_PRIMES) {
        let size = (q as usize).pow(3) - 1;
        if row.orbits.len() != 1 || row.orbits[0].size != size {
            problems.push(format!("q = {q}: orbits {:?}", row.orbits.iter().map(|o| o.size).collect::<Vec<_>>()));
        }
    }
    let expected_count: usize = TORUS_PRIMES
        .iter()
        .map(|&q| {
            let q = q as i64;
            let mut c = 0;
            for a in -2i64..=2 {
                for b in -2i64..=2 {
                    for d in -2i64..=2 {
                        if [a, b, d].iter().any(|x| x.rem_euclid(q) != 0) {
                            c += 1;
                        }
                    }
                }
            }
            c
        })
        .sum();
    if s.values.len() != expected_count {
        problems.push(format!("{} values, expected {expected_count}", s.values.len()));
    }
    for v in &s.values {
        let expected = Ratio::new(-1, (v.q as i64).pow(3) - 1);
        if v.exact != Some(expected) {
            problems.push(format!("q = {}, m = {:?}: {:?}", v.q, v.m, v.exact));
        }
    }
    outcome(problems.is_empty(), format!("{} exact values checked, problems {:?}", s.values.len(), problems))
}

fn criterion_9(dir: &Path) -> Outcome {
    let g = Arc::new(build_group(&"abelian(3,3)".parse().unwrap()).unwrap());
    let t = character_table(&g, g.classes()).unwrap();
    let mats: Vec<IntMatrix> =
        IntegerMatrixElement::elementary_generators(2).iter().map(|e| e.matrix().clone()).collect();
    let action = AutomorphismAction::linear(g.clone(), &mats).unwrap().with_inner().unwrap();
    let orbit = lambda_average(&normalized_character(g.clone(), &t, 1).unwrap(), &action).unwrap();
    let one = Trace::one(g.clone());
    let mix = convex_combine_exact(&[Ratio::new(1, 2), Ratio::new(1, 2)], &[&orbit, &one]).unwrap();
    let m_orbit = gns(&orbit).unwrap();
    let m_mix = gns(&mix).unwrap();
    let yes = is_relative_character(&m_orbit, &action).unwrap();
    let no = is_relative_character(&m_mix, &action).unwrap();
    let r1 = relative_character_dims(&m_orbit, &action, None).unwrap();
    let r2 = relative_character_dims(&m_mix, &action, None).unwrap();
    write_json(
        dir,
        "c09_relative.json",
        &json!({
            "acting_order": action.order(),
            "orbit": { "relative_character": yes, "eigenspace": r1.eigenspace_dim, "commutant": r1.commutant_dim },
            "mixture": { "relative_character": no, "eigenspace": r2.eigenspace_dim, "commutant": r2.commutant_dim },
        }),
    );
    let pass = yes && !no && r1.routes_agree() && r2.routes_agree() && action.order() == 24;
    outcome(
        pass,
        format!(
            "orbit trace {yes} ({}={}), mixture {no} ({}={})",
            r1.eigenspace_dim, r1.commutant_dim, r2.eigenspace_dim, r2.commutant_dim
        ),
    )
}

fn criterion_10(dir: &Path) -> Outcome {
    let gens = IntegerMatrixElement::elementary_generators(2);
    let a = GroupAlgebraElement::uniform(&gens).unwrap();
    let traces: Vec<Trace> = PROPAGATION_PRIMES
        .iter()
        .map(|&p| {
            let g = Arc::new(build_group(&format!("sl(2,{p})").parse().unwrap()).unwrap());
            let t = Arc::new(character_table(&g, g.classes()).unwrap());
            let row = (0..t.len()).find(|&i| t.degrees()[i] == p as u64).unwrap();
            pullback(g, t, row).unwrap()
        })
        .collect();
    let betas: Vec<f64> = traces.iter().map(|t| conj_gap(t, &a).unwrap()).collect();
    let ball = IntegerMatrixElement::ball(&gens, 4);
    let opts = PropagationOptions { inequality_tol: LIMIT_TOL, ..PropagationOptions::default() };
    let r = certificate_propagation(&traces, &betas, &a, &ball, &opts).unwrap();
    write_json(dir, "c10_propagation.json", &serde_json::to_value(&r).unwrap());
    let pass = r.common_beta.is_some_and(|b| b < 1.0)
        && r.finite_hold
        && r.propagated
        && r.limit_defect.is_some_and(|d| d <= LIMIT_TOL);
    outcome(
        pass,
        format!(
            "beta* = {:.5?}, ball {} elements, limit defect {:.2e}",
            r.common_beta,
            r.ball_size,
            r.limit_defect.unwrap_or(f64::NAN)
        ),
    )
}

struct Line {
    id: &'static str,
    name: &'static str,
    outcome: Outcome,
    elapsed: Duration,
    budget: Option<Duration>,
}

fn run_all(dir: &Path) -> Vec<Line> {
    fs::create_dir_all(dir).unwrap();
    let mut lines = Vec::new();
    let mut tables = Tables::new();
    let mut push = |id, name, budget: Option<u64>, elapsed, outcome| {
        lines.push(Line { id, name, outcome, elapsed, budget: budget.map(Duration::from_secs) })
    };
    let t = Instant::now();
    let o = criterion_1(dir, &mut tables);
    push("1", "character tables are exact", Some(60), t.elapsed(), o);
    // criteria 2 and 3 share one pass over the traces
    let t = Instant::now();
    let (o2, o3) = criteria_2_3(dir, &tables);
    let shared = t.elapsed();
    push("2", "factor criterion matches ground truth", None, shared, o2);
    push("3", "center dimension equals invariant dimension", None, shared, o3);
    let t = Instant::now();
    let o = criterion_4(dir, &tables);
    push("4", "norm and inequality sides agree", Some(300), t.elapsed(), o);
    let t = Instant::now();
    let o = criterion_5(dir);
    push("5", "complement-norm equivalence", None, t.elapsed(), o);
    let t = Instant::now();
    let o = criterion_6(dir, &tables);
    push("6", "trace decomposition round trip", None, t.elapsed(), o);
    let t = Instant::now();
    let o = criterion_7(dir);
    push("7", "vanishing scan over SL(2,p)", Some(600), t.elapsed(), o);
    let t = Instant::now();
    let o = criterion_8(dir);
    push("8", "torus limit values", Some(60), t.elapsed(), o);
    let t = Instant::now();
    let o = criterion_9(dir);
    push("9", "relative character routes", None, t.elapsed(), o);
    let t = Instant::now();
    let o = criterion_10(dir);
    push("10", "certificate propagation", None, t.elapsed(), o);
    lines
}

fn files_of(dir: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    let mut out = BTreeMap::new();
    for entry in fs::read_dir(dir).unwrap() {
        let p = entry.unwrap().path();
        out.insert(PathBuf::from(p.file_name().unwrap()), fs::read(&p).unwrap());
    }
    out
}

fn report(line: &Line) -> bool {
    let in_time = line.budget.is_none_or(|b| line.elapsed <= b);
    let pass = line.outcome.pass && in_time;
    let budget = line.budget.map(|b| format!(" (limit {}s)", b.as_secs())).unwrap_or_default();
    println!(
        "[{}] {:>2} {}: {} in {:.1}s{}",
        if pass { "PASS" } else { "FAIL" },
        line.id,
        line.name,
        line.outcome.detail,
        line.elapsed.as_secs_f64(),
        budget
    );
    pass
}

fn main() {
    let root = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("acceptance");
    let _ = fs::remove_dir_all(&root);
    let first = root.join("run-a");
    let second = root.join("run-b");
    let lines = run_all(&first);
    let mut all = true;
    for line in &lines {
        all &= report(line);
    }
    let t = Instant::now();
    run_all(&second);
    let (a, b) = (files_of(&first), files_of(&second));
    let differing: Vec<String> = a
        .iter()
        .filter(|(k, v)| b.get(*k) != Some(*v))
        .map(|(k, _)| k.display().to_string())
        .collect();
    let same = differing.is_empty() && a.len() == b.len();
    all &= report(&Line {
        id: "11",
        name: "repeated run is byte-identical",
        outcome: outcome(same, format!("{} files compared, differing {differing:?}", a.len())),
        elapsed: t.elapsed(),
        budget: None,
    });
    println!("outputs in {}", root.display());
    if !all {
        std::process::exit(1);
    }
}
