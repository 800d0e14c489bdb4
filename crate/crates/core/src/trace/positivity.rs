use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::{BigRational, Ratio};
use num_traits::{Signed, Zero};
use rand::seq::index::sample;
use rand::SeedableRng;
use serde::Serialize;

use super::{same_group, ClassValues, Trace};
use crate::chartable::CharacterTable;
use crate::cyclo::CycloRational;
use crate::error::{Error, Result};
use crate::group::GroupHandle;
use crate::linalg::{hermitian_eigen, CMat};
use crate::ops::GroupOps;

/// Largest subset tested with exact rational arithmetic.
const EXACT_GRAM_LIMIT: usize = 200;
/// Largest subset tested with a dense float Gram matrix.
const FLOAT_GRAM_LIMIT: usize = 2000;
const SAMPLED_SUBSETS: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PsdRegime {
    /// Exact nonnegativity of the Fourier coefficients against the character table.
    FourierExact,
    FourierFloat,
    /// Exact pivoted LDLᵀ of a rational Gram matrix.
    ExactLdl,
    FloatGram,
    /// Random subsets plus the cyclic subgroups generated by class representatives.
    Sampled,
}

#[derive(Clone, Debug, Serialize)]
pub struct TraceReport {
    pub normalized: bool,
    pub conjugation_invariant: bool,
    pub hermitian: bool,
    pub positive: bool,
    /// Smallest Gram eigenvalue (or `|G|·c_i/d_i` in the Fourier regimes).
    pub min_eigenvalue: f64,
    pub regime: PsdRegime,
    pub points: usize,
}

impl TraceReport {
    pub fn passes(&self) -> bool {
        self.normalized && self.conjugation_invariant && self.hermitian && self.positive
    }
}

/// `c_i = (1/|G|) Σ_j |C_j| φ(g_j) conj χ_i(g_j)`, so that `φ = Σ_i c_i χ_i`.
pub fn fourier_coefficients(phi: &Trace, table: &CharacterTable) -> Result<Vec<CycloRational>> {
    let values = phi
        .exact_class_values()
        .ok_or_else(|| Error::Precondition("exact Fourier coefficients need exact values".into()))?;
    exact_fourier(&values, table)
}

fn exact_fourier(values: &[CycloRational], table: &CharacterTable) -> Result<Vec<CycloRational>> {
    let n = table.group_order() as i64;
    if values.len() != table.len() {
        return Err(Error::Mismatch("trace and table have different class counts".into()));
    }
    Ok((0..table.len())
        .map(|i| {
            let mut acc = CycloRational::zero(1);
            for (j, v) in values.iter().enumerate() {
                let chi = CycloRational::from_cyclotomic(table.value(i, j).conj());
                acc = acc.add(&v.mul(&chi).scale(Ratio::new(table.class_sizes()[j] as i64, n)));
            }
            acc
        })
        .collect())
}

fn float_fourier(values: &[Complex64], table: &CharacterTable) -> Vec<Complex64> {
    let n = table.group_order() as f64;
    (0..table.len())
        .map(|i| {
            values
                .iter()
                .enumerate()
                .map(|(j, v)| v * table.complex_row(i)[j].conj() * table.class_sizes()[j] as f64)
                .sum::<Complex64>()
                / n
        })
        .collect()
}

/// Tests the three trace axioms on a finite group.
///
/// With `subset = None` the whole group is used; the positivity regime is chosen
/// from the available data (see [`PsdRegime`]). `tol = 0` asks for exact checks
/// where the values allow it.
pub fn is_trace(
    phi: &Trace,
    subset: Option<&[usize]>,
    tol: f64,
    table: Option<&CharacterTable>,
) -> TraceReport {
    let group = phi.group();
    let values = phi.class_values();
    let normalized = match &values {
        ClassValues::Exact(v) => v[0] == CycloRational::one(1),
        ClassValues::Float(v) => (v[0] - 1.0).norm() <= tol.max(1e-15),
    };
    let hermitian = is_hermitian(group, &values, tol);
    let (positive, min_eigenvalue, regime, points) =
        positivity(group, &values, subset, tol, table);
    TraceReport {
        normalized,
        // class functions are conjugation invariant by construction
        conjugation_invariant: true,
        hermitian,
        positive: positive && hermitian,
        min_eigenvalue,
        regime,
        points,
    }
}

fn is_hermitian(group: &GroupHandle, values: &ClassValues, tol: f64) -> bool {
    let inv = group.classes().inverse_class();
    match values {
        ClassValues::Exact(v) => (0..v.len()).all(|j| v[inv[j]] == v[j].conj()),
        ClassValues::Float(v) => (0..v.len()).all(|j| (v[inv[j]] - v[j].conj()).norm() <= tol.max(1e-12)),
    }
}

fn positivity(
    group: &GroupHandle,
    values: &ClassValues,
    subset: Option<&[usize]>,
    tol: f64,
    table: Option<&CharacterTable>,
) -> (bool, f64, PsdRegime, usize) {
    let n = group.order();
    if let (None, Some(table)) = (subset, table) {
        let degrees = table.degrees();
        if let ClassValues::Exact(v) = values {
            if let Ok(coeffs) = exact_fourier(v, table) {
                let rational: Option<Vec<Ratio<i64>>> = coeffs.iter().map(|c| c.as_rational()).collect();
                if let Some(rs) = rational {
                    let ok = rs.iter().all(|r| *r >= Ratio::from_integer(0));
                    let min = rs
                        .iter()
                        .zip(degrees)
                        .map(|(r, &d)| n as f64 * (*r.numer() as f64 / *r.denom() as f64) / d as f64)
                        .fold(f64::INFINITY, f64::min);
                    return (ok, min, PsdRegime::FourierExact, n);
                }
                return (false, f64::NAN, PsdRegime::FourierExact, n);
            }
        }
        let coeffs = float_fourier(&values.to_complex(), table);
        let ok = coeffs.iter().all(|c| c.re >= -tol && c.im.abs() <= tol.max(1e-12));
        let min = coeffs
            .iter()
            .zip(degrees)
            .map(|(c, &d)| n as f64 * c.re / d as f64)
            .fold(f64::INFINITY, f64::min);
        return (ok, min, PsdRegime::FourierFloat, n);
    }
    let all: Vec<usize>;
    let points = match subset {
        Some(s) => s,
        None => {
            all = (0..n).collect();
            &all
        }
    };
    if points.len() <= EXACT_GRAM_LIMIT {
        if let ClassValues::Exact(v) = values {
            if let Some(rs) = v.iter().map(|c| c.as_rational()).collect::<Option<Vec<_>>>() {
                let gram = |i: usize, j: usize| {
                    let c = group.classes().class_of(group.mul(group.inv(points[i]), points[j]));
                    BigRational::new(BigInt::from(*rs[c].numer()), BigInt::from(*rs[c].denom()))
                };
                let ok = exact_psd(points.len(), gram);
                let min = min_gram_eigenvalue(group, &values.to_complex(), points);
                return (ok, min, PsdRegime::ExactLdl, points.len());
            }
        }
    }
    let complex = values.to_complex();
    if points.len() <= FLOAT_GRAM_LIMIT {
        let min = min_gram_eigenvalue(group, &complex, points);
        return (min >= -tol, min, PsdRegime::FloatGram, points.len());
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0);
    let mut min = f64::INFINITY;
    let mut tested = 0;
    for _ in 0..SAMPLED_SUBSETS {
        let idx = sample(&mut rng, points.len(), EXACT_GRAM_LIMIT);
        let chosen: Vec<usize> = idx.iter().map(|i| points[i]).collect();
        min = min.min(min_gram_eigenvalue(group, &complex, &chosen));
        tested += chosen.len();
    }
    for &r in group.classes().representatives() {
        let mut cyc = vec![0usize];
        let mut x = r;
        while x != 0 {
            cyc.push(x);
            x = group.mul(x, r);
        }
        min = min.min(min_gram_eigenvalue(group, &complex, &cyc));
        tested += cyc.len();
    }
    (min >= -tol, min, PsdRegime::Sampled, tested)
}

fn min_gram_eigenvalue(group: &GroupHandle, class_values: &[Complex64], points: &[usize]) -> f64 {
    let m = points.len();
    let classes = group.classes();
    let gram = CMat::from_fn(m, m, |i, j| {
        class_values[classes.class_of(group.mul(group.inv(points[i]), points[j]))]
    });
    hermitian_eigen(&gram).0.first().copied().unwrap_or(0.0)
}

/// Exact positive-semidefiniteness of a symmetric rational matrix by pivoted LDLᵀ.
fn exact_psd(m: usize, entry: impl Fn(usize, usize) -> BigRational) -> bool {
    let mut a: Vec<Vec<BigRational>> = (0..m).map(|i| (0..m).map(|j| entry(i, j)).collect()).collect();
    let mut active: Vec<usize> = (0..m).collect();
    while !active.is_empty() {
        if active.iter().any(|&i| a[i][i].is_negative()) {
            return false;
        }
        let pivot = active.iter().copied().find(|&i| !a[i][i].is_zero());
        let Some(p) = pivot else {
            // all remaining diagonal entries vanish, so PSD forces the block to vanish
            return active
                .iter()
                .all(|&i| active.iter().all(|&j| a[i][j].is_zero()));
        };
        active.retain(|&i| i != p);
        let d = a[p][p].clone();
        for &i in &active {
            if a[i][p].is_zero() {
                continue;
            }
            let f = &a[i][p] / &d;
            for &j in &active {
                let t = &f * &a[p][j];
                a[i][j] -= t;
            }
        }
    }
    true
}

/// Gram-matrix trace test on an arbitrary finite set of elements, for traces
/// given by an evaluator (pulled-back traces, partial traces on balls).
///
/// The evaluator must be defined on all `s⁻¹t` for `s, t` in `points`;
/// conjugation invariance is checked on those pairs `(x, y)` of points for which
/// `x⁻¹yx` is evaluable.
pub fn is_trace_on<G: GroupOps>(
    ops: &G,
    points: &[G::Elem],
    eval: impl Fn(&G::Elem) -> Option<Complex64>,
    tol: f64,
) -> Result<TraceReport> {
    let id = ops.identity();
    let e = eval(&id).ok_or_else(|| Error::Precondition("trace undefined at the identity".into()))?;
    let m = points.len();
    let mut gram = CMat::zeros(m, m);
    for i in 0..m {
        let si = ops.inv(&points[i]);
        for j in 0..m {
            let x = ops.mul(&si, &points[j]);
            gram[(i, j)] = eval(&x).ok_or_else(|| {
                Error::Precondition(format!("trace undefined at {x:?}"))
            })?;
        }
    }
    let hermitian = (0..m).all(|i| (0..m).all(|j| (gram[(i, j)] - gram[(j, i)].conj()).norm() <= tol.max(1e-12)));
    let mut invariant = true;
    let limit = m.min(40);
    for x in &points[..limit] {
        let xi = ops.inv(x);
        for y in &points[..limit] {
            let c = ops.mul(&ops.mul(&xi, y), x);
            if let (Some(a), Some(b)) = (eval(&c), eval(y)) {
                invariant &= (a - b).norm() <= tol.max(1e-12);
            }
        }
    }
    let min = hermitian_eigen(&gram).0.first().copied().unwrap_or(0.0);
    Ok(TraceReport {
        normalized: (e - 1.0).norm() <= tol.max(1e-12),
        conjugation_invariant: invariant,
        hermitian,
        positive: min >= -tol && hermitian,
        min_eigenvalue: min,
        regime: PsdRegime::FloatGram,
        points: m,
    })
}

/// Whether `φ − αψ` is positive definite on the whole group (float test).
pub fn dominates(phi: &Trace, psi: &Trace, alpha: f64, table: Option<&CharacterTable>) -> Result<bool> {
    if !same_group(phi, psi) {
        return Err(Error::Mismatch("traces live on different groups".into()));
    }
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::Precondition("α must lie in (0, 1]".into()));
    }
    let diff: Vec<Complex64> = phi
        .class_values_complex()
        .iter()
        .zip(psi.class_values_complex())
        .map(|(a, b)| a - b * alpha)
        .collect();
    let values = ClassValues::Float(diff);
    Ok(positivity(phi.group(), &values, None, super::DEFAULT_TOL, table).0)
}

/// Exact version of [`dominates`] through Fourier coefficients.
pub fn dominates_exact(
    phi: &Trace,
    psi: &Trace,
    alpha: Ratio<i64>,
    table: &CharacterTable,
) -> Result<bool> {
    if !same_group(phi, psi) {
        return Err(Error::Mismatch("traces live on different groups".into()));
    }
    if !(alpha > Ratio::from_integer(0) && alpha <= Ratio::from_integer(1)) {
        return Err(Error::Precondition("α must lie in (0, 1]".into()));
    }
    let a = fourier_coefficients(phi, table)?;
    let b = fourier_coefficients(psi, table)?;
    for (x, y) in a.iter().zip(&b) {
        match x.sub(&y.scale(alpha)).as_rational() {
            Some(r) if r >= Ratio::from_integer(0) => {}
            _ => return Ok(false),
        }
    }
    Ok(true)
}
