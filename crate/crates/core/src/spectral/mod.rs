//! Operator-norm gaps of GNS representations checked against their
//! trace-inequality formulations.

mod algebra;
pub mod forms;
mod propagation;
mod tensor;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use algebra::GroupAlgebraElement;
pub use forms::{quadratic_forms, FormKind, Forms, SideResult, Violation};
pub use propagation::{certificate_propagation, conj_gap, PropagationOptions, PropagationReport};
pub use tensor::{norm_tensor, TensorBetaCheck, TensorReport};

use crate::error::{Error, Result};
use crate::gns::GnsModel;
use crate::linalg::{self, CMat, CVec};

/// Residual tolerance shared by both sides of every check.
pub const RESIDUAL_TOL: f64 = 1e-9;
/// Largest group on which the trace side uses every element as a test coordinate.
const ALL_POINTS_LIMIT: usize = 2048;

#[derive(Clone, Debug)]
pub struct CheckOptions {
    pub random_vectors: usize,
    pub seed: u64,
    pub tol: f64,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions { random_vectors: 1000, seed: 0, tol: RESIDUAL_TOL }
    }
}

/// One `β` of a two-sided gap check.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GapReport {
    pub check: String,
    pub beta: f64,
    pub exact_norm: Option<f64>,
    /// Residual bound on `exact_norm` from the singular-vector equations.
    pub norm_error_bound: Option<f64>,
    pub certified_digits: Option<u32>,
    /// `exact_norm ≤ √β` (up to `tol` on the squares).
    pub norm_side: Option<bool>,
    pub worst_residual: f64,
    /// No tested vector has a residual above `tol`.
    pub inequality_side: bool,
    pub violations: Vec<Violation>,
    pub test_set: String,
    pub tested: usize,
    /// Both sides agree, or `|norm² − β| ≤ tol` (boundary case).
    pub agree: bool,
}

impl GapReport {
    pub(crate) fn two_sided(check: &str, norm: &linalg::TopSingular, side: SideResult, test_set: String, tol: f64) -> Self {
        let sq = norm.value * norm.value;
        let norm_side = sq <= side.beta + tol;
        let inequality_side = side.worst_residual <= tol;
        GapReport {
            check: check.to_string(),
            beta: side.beta,
            exact_norm: Some(norm.value),
            norm_error_bound: Some(norm.error_bound),
            certified_digits: Some(certified_digits(norm.error_bound)),
            norm_side: Some(norm_side),
            worst_residual: side.worst_residual,
            inequality_side,
            violations: side.violations,
            test_set,
            tested: side.tested,
            agree: norm_side == inequality_side || (sq - side.beta).abs() <= tol,
        }
    }
}

fn certified_digits(err: f64) -> u32 {
    if err <= 0.0 {
        16
    } else {
        (-err.log10()).floor().clamp(0.0, 16.0) as u32
    }
}

/// `β` grid of `count` points spanning `[max(norm² − 0.05, 0), 1]`.
pub fn beta_grid(norm: f64, count: usize) -> Vec<f64> {
    let lo = (norm * norm - 0.05).max(0.0);
    if count <= 1 {
        return vec![1.0];
    }
    (0..count)
        .map(|i| lo + (1.0 - lo) * i as f64 / (count - 1) as f64)
        .collect()
}

fn test_points(model: &GnsModel) -> (Vec<usize>, String) {
    let n = model.group().order();
    if n <= ALL_POINTS_LIMIT {
        ((0..n).collect(), format!("all {n} group elements"))
    } else {
        (model.pivots().to_vec(), format!("{} GNS pivot elements", model.dim()))
    }
}

fn finite_forms(model: &GnsModel, b: &GroupAlgebraElement<usize>, kind: FormKind) -> Result<(Forms, String)> {
    let (points, desc) = test_points(model);
    let group = model.group();
    let forms = quadratic_forms(group.as_ref(), &points, b, kind, |&g| Some(model.value(g)))?;
    Ok((forms, desc))
}

fn describe(desc: &str, opts: &CheckOptions) -> String {
    format!("{desc}: basis, pairwise sums/differences, {} random (seed {}), extremal vector", opts.random_vectors, opts.seed)
}

fn check_element(model: &GnsModel, a: &GroupAlgebraElement<usize>) -> Result<Vec<(usize, Complex64)>> {
    let n = model.group().order();
    let terms: Vec<(usize, Complex64)> = a.terms().map(|(g, c)| (*g, c)).collect();
    if let Some(&(g, _)) = terms.iter().find(|(g, _)| *g >= n) {
        return Err(Error::NotInGroup(format!("index {g} in a group of order {n}")));
    }
    Ok(terms)
}

/// `‖π_φ(a)‖` against `φ(x*bx) ≤ βφ(x*x)`, `b = a*a`.
pub fn norm_pi(
    model: &GnsModel,
    a: &GroupAlgebraElement<usize>,
    betas: &[f64],
    opts: &CheckOptions,
) -> Result<Vec<GapReport>> {
    let terms = check_element(model, a)?;
    let top = linalg::top_singular(&model.pi_of(&terms));
    let b = a.star_square(model.group().as_ref());
    let (forms, desc) = finite_forms(model, &b, FormKind::Left)?;
    let test_set = describe(&desc, opts);
    Ok(forms
        .inequality_side(betas, opts.random_vectors, opts.seed, opts.tol)
        .into_iter()
        .map(|side| GapReport::two_sided("left", &top, side, test_set.clone(), opts.tol))
        .collect())
}

/// `‖c_φ(a)` restricted to `v_φ^⊥‖`.
pub fn restricted_conj_norm(model: &GnsModel, a: &GroupAlgebraElement<usize>) -> Result<linalg::TopSingular> {
    let terms = check_element(model, a)?;
    if (a.mass() - 1.0).norm() > 1e-12 {
        return Err(Error::Precondition(
            "the conjugation gap needs coefficients summing to 1 so that v is fixed".into(),
        ));
    }
    let c = model.conj_rep_of(&terms);
    let v = model.cyclic_vector();
    let n = model.dim();
    let q = CMat::identity(n, n) - v * v.adjoint();
    Ok(linalg::top_singular(&(c * q)))
}

/// `‖c_φ(a)|v^⊥‖` against `φ(Σ b_γ γ*x*γx − βx*x) ≤ (1−β)|φ(x)|²`.
pub fn norm_conj(
    model: &GnsModel,
    a: &GroupAlgebraElement<usize>,
    betas: &[f64],
    opts: &CheckOptions,
) -> Result<Vec<GapReport>> {
    let top = restricted_conj_norm(model, a)?;
    let b = a.star_square(model.group().as_ref());
    let (forms, desc) = finite_forms(model, &b, FormKind::Conjugation)?;
    let test_set = describe(&desc, opts);
    Ok(forms
        .inequality_side(betas, opts.random_vectors, opts.seed, opts.tol)
        .into_iter()
        .map(|side| GapReport::two_sided("conjugation", &top, side, test_set.clone(), opts.tol))
        .collect())
}

/// Largest deviations between matrix-side and trace-side values of
/// `‖π(x)v‖² = φ(x*x)` and `⟨c(γ)π(x)v, π(x)v⟩ = φ(γ*x*γx)` (generators `γ`).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IdentityReport {
    pub samples: usize,
    pub norm_error: f64,
    pub conjugation_error: f64,
}

pub fn identity_checks(model: &GnsModel, samples: usize, seed: u64) -> Result<IdentityReport> {
    let group = model.group();
    let (points, _) = test_points(model);
    let m = points.len();
    let k = CMat::from_fn(m, m, |i, j| model.value(group.mul(group.inv(points[i]), points[j])));
    let gens = group.generators().to_vec();
    let conj_forms: Vec<CMat> = gens
        .iter()
        .map(|&g| {
            let gi = group.inv(g);
            CMat::from_fn(m, m, |i, j| {
                let y = group.mul(group.mul(group.mul(gi, group.inv(points[i])), g), points[j]);
                model.value(y)
            })
        })
        .collect();
    let conj_mats: Vec<CMat> = gens.iter().map(|&g| model.conj_rep(g)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut norm_error: f64 = 0.0;
    let mut conjugation_error: f64 = 0.0;
    let order = group.order();
    for _ in 0..samples {
        let mut x = CVec::from_fn(m, |_, _| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        x /= Complex64::new(x.norm(), 0.0);
        let mut full = vec![Complex64::new(0.0, 0.0); order];
        for (i, &p) in points.iter().enumerate() {
            full[p] = x[i];
        }
        let w = model.vector_of(&full);
        norm_error = norm_error.max((w.norm_squared() - x.dotc(&(&k * &x)).re).abs());
        for (cm, form) in conj_mats.iter().zip(&conj_forms) {
            let lhs = w.dotc(&(cm * &w));
            let rhs = x.dotc(&(form * &x));
            conjugation_error = conjugation_error.max((lhs - rhs).norm());
        }
    }
    Ok(IdentityReport { samples, norm_error, conjugation_error })
}

/// Outcome of the complement-norm equivalence for one matrix.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ComplementReport {
    pub beta: f64,
    pub restricted_norm: f64,
    /// `λ_max(A*A − β − (1−β)vv*)`, the supremum of the inequality defect.
    pub form_max_eigenvalue: f64,
    pub sampled_worst: f64,
    pub norm_side: bool,
    pub inequality_side: bool,
    pub agree: bool,
}

/// `‖A|v^⊥‖ ≤ √β` versus `β‖w‖² − ‖Aw‖² ≥ (β−1)|⟨w,v⟩|²` for all `w`.
///
/// Besides `Av = v` this needs `A*v = v`: otherwise `A` does not preserve
/// `v^⊥` and the cross term `⟨Au, v⟩` breaks the equivalence.
pub fn complement_norm_lemma(a: &CMat, v: &CVec, beta: f64, samples: usize, seed: u64) -> Result<ComplementReport> {
    let n = a.nrows();
    if a.ncols() != n || v.len() != n {
        return Err(Error::Precondition("A must be square and match v".into()));
    }
    if (v.norm() - 1.0).abs() > 1e-10 {
        return Err(Error::Precondition("v is not a unit vector".into()));
    }
    if (a * v - v).norm() > 1e-10 || (a.adjoint() * v - v).norm() > 1e-10 {
        return Err(Error::Precondition("v is not invariant under A and A*".into()));
    }
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::Precondition("β must lie in (0, 1)".into()));
    }
    let id = CMat::identity(n, n);
    let restricted_norm = linalg::operator_norm(&(a * (&id - v * v.adjoint())));
    let form = a.adjoint() * a - &id * Complex64::new(beta, 0.0) - (v * v.adjoint()) * Complex64::new(1.0 - beta, 0.0);
    let form_max_eigenvalue = linalg::max_hermitian_eigenvalue(&form);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sampled_worst = f64::NEG_INFINITY;
    let probes = (0..n)
        .map(|i| CVec::from_fn(n, |r, _| if r == i { linalg::ONE } else { linalg::ZERO }))
        .chain((0..samples).map(|_| {
            CVec::from_fn(n, |_, _| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        }))
        .collect::<Vec<_>>();
    for w in &probes {
        let w = w / Complex64::new(w.norm(), 0.0);
        let lhs = (a * &w).norm_squared() - beta;
        let rhs = (1.0 - beta) * w.dotc(v).norm_sqr();
        sampled_worst = sampled_worst.max(lhs - rhs);
    }
    let tol = RESIDUAL_TOL;
    let norm_side = restricted_norm * restricted_norm <= beta + tol;
    let inequality_side = form_max_eigenvalue <= tol && sampled_worst <= tol;
    let agree = norm_side == inequality_side || (restricted_norm * restricted_norm - beta).abs() <= tol;
    Ok(ComplementReport {
        beta,
        restricted_norm,
        form_max_eigenvalue,
        sampled_worst,
        norm_side,
        inequality_side,
        agree,
    })
}

/// Random `A = V diag(1, B) V*` with `V` unitary and `B` a random complex block
/// scaled to operator norm `scale`; returns `(A, v = V e₁)`.
pub fn random_complement_instance(n: usize, scale: f64, rng: &mut impl Rng) -> (CMat, CVec) {
    let g = CMat::from_fn(n, n, |_, _| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    let q = g.qr().q();
    let mut d = CMat::zeros(n, n);
    d[(0, 0)] = linalg::ONE;
    if n > 1 {
        let b = CMat::from_fn(n - 1, n - 1, |_, _| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        let nb = linalg::operator_norm(&b).max(1e-300);
        d.view_mut((1, 1), (n - 1, n - 1)).copy_from(&(b * Complex64::new(scale / nb, 0.0)));
    }
    let a = &q * d * q.adjoint();
    (a, q.column(0).into_owned())
}
