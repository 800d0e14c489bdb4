//! GNS data of traces on finite groups: left and right regular-type
//! representations on the Gram quotient, conjugation representation, centre.

mod center;
mod dump;

use std::sync::Arc;

use nalgebra::Cholesky;
use num_rational::BigRational;
use num_traits::Zero;
use num_complex::Complex64;

use crate::chartable::CharacterTable;
use crate::error::{Error, Result};
use crate::group::GroupHandle;
use crate::linalg::{self, CMat, CVec};
use crate::trace::{is_trace, Trace, DEFAULT_TOL};

pub use center::{center, decompose_trace, fd_subrep_detector, CenterData, CenterRoute, TraceComponent};
pub use dump::GnsDump;

/// Rank tolerance relative to `φ(e) = 1`.
pub const RANK_TOL: f64 = 1e-8;
/// Groups up to this order are factorized over all elements.
const FULL_GRAM_LIMIT: usize = 2048;
/// Keep the full coordinate matrix when `dim · |G|` is at most this.
const FULL_COORDS_LIMIT: usize = 4_000_000;
const EXACT_LIMIT: usize = 200;

#[derive(Clone, Debug, Default)]
pub struct GnsOptions<'a> {
    /// Character table of the group; lets large groups use a candidate subset of
    /// the right size instead of the whole Gram matrix.
    pub table: Option<&'a CharacterTable>,
    /// Skip the positivity validation of the trace.
    pub trusted: bool,
}

/// Finite-dimensional GNS data `(π, ρ, H, v)`.
///
/// `H` is identified with `ℂ^n` through the coordinates `C(g) = L⁻¹ K[P, g]`,
/// where `P` are the pivots of a pivoted Cholesky factorization of the Gram
/// matrix `K[g][h] = φ(g⁻¹h)` and `K[P,P] = L L*`.
#[derive(Clone, Debug)]
pub struct GnsModel {
    group: Arc<GroupHandle>,
    trace: Trace,
    class_values: Vec<Complex64>,
    pivots: Vec<usize>,
    chol: CMat,
    r_inv: CMat,
    coords: Option<CMat>,
    pi_gens: Vec<CMat>,
    rho_gens: Vec<CMat>,
    v: CVec,
}

pub fn gns(phi: &Trace) -> Result<GnsModel> {
    gns_with(phi, GnsOptions::default())
}

pub fn gns_with(phi: &Trace, options: GnsOptions<'_>) -> Result<GnsModel> {
    let group = phi.group().clone();
    let n = group.order();
    if !options.trusted {
        let report = is_trace(phi, None, DEFAULT_TOL, options.table);
        if !report.passes() {
            return Err(Error::InvalidTrace(format!(
                "{} is not a trace (min Gram eigenvalue {:.3e})",
                phi.label(),
                report.min_eigenvalue
            )));
        }
    }
    let class_values = phi.class_values_complex();
    let classes = group.classes();
    let k = |g: usize, h: usize| class_values[classes.class_of(group.mul(group.inv(g), h))];

    let target = options.table.map(|t| expected_rank(&class_values, t));
    let pivots = if n <= FULL_GRAM_LIMIT {
        let all: Vec<usize> = (0..n).collect();
        pivots_on(&all, &k)
    } else {
        let target = target.ok_or(Error::BudgetExceeded {
            what: "group order for a GNS model without a character table",
            actual: n as u64,
            limit: FULL_GRAM_LIMIT as u64,
        })?;
        let mut size = (2 * target + 32).min(n);
        loop {
            let cand: Vec<usize> = (0..size).collect();
            let p = pivots_on(&cand, &k);
            if p.len() >= target || size == n {
                break p;
            }
            if size * size > 64 * FULL_GRAM_LIMIT * FULL_GRAM_LIMIT {
                return Err(Error::BudgetExceeded {
                    what: "GNS candidate set",
                    actual: size as u64,
                    limit: (8 * FULL_GRAM_LIMIT) as u64,
                });
            }
            size = (2 * size).min(n);
        }
    };
    let r = pivots.len();
    let kpp = CMat::from_fn(r, r, |i, j| k(pivots[i], pivots[j]));
    let chol = Cholesky::new(kpp)
        .ok_or_else(|| Error::InvalidTrace("Gram matrix on pivots is not positive definite".into()))?
        .l();
    let r_inv = chol
        .adjoint()
        .solve_upper_triangular(&CMat::identity(r, r))
        .ok_or_else(|| Error::InvalidTrace("singular pivot block".into()))?;
    let mut model = GnsModel {
        group: group.clone(),
        trace: phi.clone(),
        class_values,
        pivots,
        chol,
        r_inv,
        coords: None,
        pi_gens: Vec::new(),
        rho_gens: Vec::new(),
        v: CVec::zeros(0),
    };
    if r * n <= FULL_COORDS_LIMIT {
        let all: Vec<usize> = (0..n).collect();
        model.coords = Some(model.coords_of(&all));
    }
    model.v = model.coords_of(&[0]).column(0).into_owned();
    model.pi_gens = group.generators().iter().map(|&g| model.pi(g)).collect();
    model.rho_gens = group.generators().iter().map(|&g| model.rho(g)).collect();
    Ok(model)
}

fn pivots_on(cand: &[usize], k: &impl Fn(usize, usize) -> Complex64) -> Vec<usize> {
    let m = cand.len();
    let gram = CMat::from_fn(m, m, |i, j| k(cand[i], cand[j]));
    let (piv, _) = linalg::pivoted_cholesky(&gram, RANK_TOL);
    piv.into_iter().map(|i| cand[i]).collect()
}

/// `Σ_{c_i > 0} d_i²`, the dimension of the GNS space.
fn expected_rank(class_values: &[Complex64], table: &CharacterTable) -> usize {
    let n = table.group_order() as f64;
    (0..table.len())
        .filter(|&i| {
            let c: Complex64 = class_values
                .iter()
                .enumerate()
                .map(|(j, v)| v * table.complex_row(i)[j].conj() * table.class_sizes()[j] as f64)
                .sum::<Complex64>()
                / n;
            c.re > RANK_TOL
        })
        .map(|i| (table.degrees()[i] * table.degrees()[i]) as usize)
        .sum()
}

impl GnsModel {
    pub fn dim(&self) -> usize {
        self.pivots.len()
    }

    pub fn group(&self) -> &Arc<GroupHandle> {
        &self.group
    }

    pub fn trace(&self) -> &Trace {
        &self.trace
    }

    /// Group elements whose images form the chosen basis of `H`.
    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn cyclic_vector(&self) -> &CVec {
        &self.v
    }

    pub fn pi_generators(&self) -> &[CMat] {
        &self.pi_gens
    }

    pub fn rho_generators(&self) -> &[CMat] {
        &self.rho_gens
    }

    pub fn value(&self, g: usize) -> Complex64 {
        self.class_values[self.group.classes().class_of(g)]
    }

    /// `R⁻¹`, where `R = L*` holds the coordinates of the pivot vectors.
    pub fn pivot_inverse(&self) -> &CMat {
        &self.r_inv
    }

    pub fn has_full_coordinates(&self) -> bool {
        self.coords.is_some()
    }

    /// Coordinates of `δ_g` for each listed element, as columns.
    pub fn coords_of(&self, elements: &[usize]) -> CMat {
        if let Some(c) = &self.coords {
            return CMat::from_fn(c.nrows(), elements.len(), |i, j| c[(i, elements[j])]);
        }
        let r = self.dim();
        let g = &self.group;
        let kpg = CMat::from_fn(r, elements.len(), |i, j| {
            self.value(g.mul(g.inv(self.pivots[i]), elements[j]))
        });
        self.chol
            .solve_lower_triangular(&kpg)
            .expect("Cholesky factor is invertible")
    }

    /// The full coordinate matrix (`dim × |G|`), when it was kept.
    pub fn full_coordinates(&self) -> Result<&CMat> {
        self.coords.as_ref().ok_or(Error::BudgetExceeded {
            what: "GNS coordinate matrix entries",
            actual: (self.dim() * self.group.order()) as u64,
            limit: FULL_COORDS_LIMIT as u64,
        })
    }

    fn matrix_from_images(&self, images: &[usize]) -> CMat {
        self.coords_of(images) * &self.r_inv
    }

    /// `π(g)`, i.e. `δ_h ↦ δ_{gh}`.
    pub fn pi(&self, g: usize) -> CMat {
        let imgs: Vec<usize> = self.pivots.iter().map(|&p| self.group.mul(g, p)).collect();
        self.matrix_from_images(&imgs)
    }

    /// `ρ(g)`, i.e. `δ_h ↦ δ_{hg⁻¹}`.
    pub fn rho(&self, g: usize) -> CMat {
        let gi = self.group.inv(g);
        let imgs: Vec<usize> = self.pivots.iter().map(|&p| self.group.mul(p, gi)).collect();
        self.matrix_from_images(&imgs)
    }

    /// `c(g) = π(g)ρ(g)`, i.e. `δ_h ↦ δ_{ghg⁻¹}`.
    pub fn conj_rep(&self, g: usize) -> CMat {
        let gi = self.group.inv(g);
        let imgs: Vec<usize> = self
            .pivots
            .iter()
            .map(|&p| self.group.mul(self.group.mul(g, p), gi))
            .collect();
        self.matrix_from_images(&imgs)
    }

    /// `Σ a_g π(g)` for a finitely supported `a`.
    pub fn pi_of(&self, a: &[(usize, Complex64)]) -> CMat {
        let n = self.dim();
        a.iter().fold(CMat::zeros(n, n), |acc, &(g, c)| acc + self.pi(g) * c)
    }

    pub fn conj_rep_of(&self, a: &[(usize, Complex64)]) -> CMat {
        let n = self.dim();
        a.iter()
            .fold(CMat::zeros(n, n), |acc, &(g, c)| acc + self.conj_rep(g) * c)
    }

    /// `π(x) v = Σ x_g C(g)` for `x` given by one coefficient per element.
    pub fn vector_of(&self, x: &[Complex64]) -> CVec {
        match &self.coords {
            Some(c) => c * CVec::from_column_slice(x),
            None => {
                let support: Vec<usize> = (0..x.len()).filter(|&g| x[g] != linalg::ZERO).collect();
                let coeffs = CVec::from_iterator(support.len(), support.iter().map(|&g| x[g]));
                self.coords_of(&support) * coeffs
            }
        }
    }

    /// `max_g |⟨π(g)v, v⟩ − φ(g)|` over the whole group.
    pub fn reconstruction_error(&self) -> f64 {
        let n = self.group.order();
        let mut worst: f64 = 0.0;
        for chunk in (0..n).collect::<Vec<_>>().chunks(4096) {
            let c = self.coords_of(chunk);
            for (j, &g) in chunk.iter().enumerate() {
                let z = self.v.dotc(&c.column(j));
                worst = worst.max((z - self.value(g)).norm());
            }
        }
        worst
    }

    /// Largest deviation among: unitarity of `π`, `ρ` on generators,
    /// `π(g)ρ(h) = ρ(h)π(g)` on generator pairs, and `π(g)v = ρ(g⁻¹)v`.
    pub fn structure_error(&self) -> f64 {
        let n = self.dim();
        let id = CMat::identity(n, n);
        let mut worst: f64 = 0.0;
        for (p, r) in self.pi_gens.iter().zip(&self.rho_gens) {
            worst = worst.max((p.adjoint() * p - &id).norm());
            worst = worst.max((r.adjoint() * r - &id).norm());
            // ρ(g⁻¹) = ρ(g)*
            worst = worst.max((p * &self.v - r.adjoint() * &self.v).norm());
        }
        for p in &self.pi_gens {
            for r in &self.rho_gens {
                worst = worst.max((p * r - r * p).norm());
            }
        }
        worst
    }

    /// Matrices `c(g)` for the generators.
    pub fn conjugation_rep(&self) -> Vec<CMat> {
        self.pi_gens.iter().zip(&self.rho_gens).map(|(p, r)| p * r).collect()
    }

    /// `dim H^c`, the space of vectors fixed by the conjugation representation.
    pub fn invariant_dimension(&self) -> usize {
        self.invariant_vectors().ncols()
    }

    pub fn invariant_vectors(&self) -> CMat {
        let n = self.dim();
        let cs = self.conjugation_rep();
        if cs.is_empty() {
            return CMat::identity(n, n);
        }
        let mut stacked = CMat::zeros(n * cs.len(), n);
        for (k, c) in cs.iter().enumerate() {
            stacked
                .view_mut((k * n, 0), (n, n))
                .copy_from(&(c - CMat::identity(n, n)));
        }
        linalg::null_space(&stacked, RANK_TOL)
    }
}

/// Exact rank of the Gram matrix for rational-valued traces on groups of
/// order at most 200; `None` outside that range.
pub fn exact_dimension(phi: &Trace) -> Option<usize> {
    let group = phi.group();
    let n = group.order();
    if n > EXACT_LIMIT {
        return None;
    }
    let values: Vec<BigRational> = phi
        .exact_class_values()?
        .iter()
        .map(|c| c.as_rational().map(|r| BigRational::new((*r.numer()).into(), (*r.denom()).into())))
        .collect::<Option<_>>()?;
    let classes = group.classes();
    let mut a: Vec<Vec<BigRational>> = (0..n)
        .map(|g| (0..n).map(|h| values[classes.class_of(group.mul(group.inv(g), h))].clone()).collect())
        .collect();
    let mut rank = 0;
    for col in 0..n {
        let Some(p) = (rank..n).find(|&r| !a[r][col].is_zero()) else { continue };
        a.swap(rank, p);
        let pivot = a[rank][col].clone();
        for r in rank + 1..n {
            if a[r][col].is_zero() {
                continue;
            }
            let f = &a[r][col] / &pivot;
            for c in col..n {
                let t = &f * &a[rank][c];
                a[r][c] -= t;
            }
        }
        rank += 1;
    }
    Some(rank)
}

/// Conjugation representation on generators (free-function form).
pub fn conjugation_rep(model: &GnsModel) -> Vec<CMat> {
    model.conjugation_rep()
}

/// Character test through `dim H^c = 1`.
pub fn is_character(phi: &Trace) -> Result<bool> {
    Ok(gns(phi)?.invariant_dimension() == 1)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::trace::{convex_combine, normalized_character};
    use crate::trace::tests::setup;

    #[test]
    fn trivial_and_regular() {
        let (g, _) = setup("sl(2,3)");
        let one = gns(&Trace::one(g.clone())).unwrap();
        assert_eq!(one.dim(), 1);
        assert!((one.pi_generators()[0][(0, 0)] - 1.0).norm() < 1e-12);
        let (z2, _) = setup("cyclic(2)");
        let reg = gns(&Trace::delta(z2.clone())).unwrap();
        assert_eq!(exact_dimension(&Trace::delta(z2.clone())), Some(2));
        assert_eq!(reg.dim(), 2);
        let p = &reg.pi_generators()[0];
        assert!((p.trace()).norm() < 1e-12);
        assert!((p * p - CMat::identity(2, 2)).norm() < 1e-12);
    }

    #[test]
    fn characters_have_square_dimension() {
        for s in ["sl(2,3)", "q8", "sl(2,5)"] {
            let (g, t) = setup(s);
            for i in 0..t.len() {
                let phi = normalized_character(g.clone(), &t, i).unwrap();
                let m = gns(&phi).unwrap();
                let d = t.degrees()[i] as usize;
                assert_eq!(m.dim(), d * d, "{s} row {i}");
                if let Some(e) = exact_dimension(&phi) {
                    assert_eq!(e, d * d);
                }
                assert!(m.reconstruction_error() < 1e-10);
                assert!(m.structure_error() < 1e-9);
                assert_eq!(m.invariant_dimension(), 1);
                let c = m.conjugation_rep();
                for ci in &c {
                    assert!((ci * m.cyclic_vector() - m.cyclic_vector()).norm() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn table_guided_model_matches_full() {
        let (g, t) = setup("sl(2,5)");
        let phi = normalized_character(g.clone(), &t, t.len() - 1).unwrap();
        let full = gns(&phi).unwrap();
        let guided = gns_with(&phi, GnsOptions { table: Some(&t), trusted: false }).unwrap();
        assert_eq!(full.dim(), guided.dim());
    }

    #[test]
    fn large_group_with_table() {
        let (g, t) = setup("sl(2,17)");
        let st = (0..t.len()).find(|&i| t.degrees()[i] == 17).unwrap();
        let phi = normalized_character(g.clone(), &t, st).unwrap();
        let m = gns_with(&phi, GnsOptions { table: Some(&t), trusted: false }).unwrap();
        assert_eq!(m.dim(), 289);
        assert!(m.structure_error() < 1e-8);
        for x in [0usize, 1, 2, 100, 2000] {
            let z = m.cyclic_vector().dotc(&(m.pi(x) * m.cyclic_vector()));
            assert!((z - phi.eval(x)).norm() < 1e-10);
        }
    }

    #[test]
    fn mixtures_are_not_characters() {
        let (g, t) = setup("q8");
        let a = normalized_character(g.clone(), &t, 1).unwrap();
        let b = normalized_character(g.clone(), &t, 4).unwrap();
        let mix = convex_combine(&[0.5, 0.5], &[&a, &b]).unwrap();
        assert!(!is_character(&mix).unwrap());
        assert_eq!(gns(&mix).unwrap().invariant_dimension(), 2);
        assert!(is_character(&Trace::one(g.clone())).unwrap());
    }

    #[test]
    fn regular_trace_invariants_count_classes() {
        let (g, _) = setup("sl(2,2)");
        let m = gns(&Trace::delta(g.clone())).unwrap();
        assert_eq!(m.invariant_dimension(), g.classes().len());
        let (a, _) = setup("abelian(2,3)");
        let m = gns(&Trace::delta(a.clone())).unwrap();
        for c in m.conjugation_rep() {
            assert!((c - CMat::identity(6, 6)).norm() < 1e-10);
        }
    }

    #[test]
    fn random_mixtures_are_never_characters() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for s in ["q8", "sl(2,3)"] {
            let (g, t) = setup(s);
            let rows: Vec<Trace> = (0..t.len()).map(|i| normalized_character(g.clone(), &t, i).unwrap()).collect();
            for _ in 0..50 {
                let mut w: Vec<f64> = (0..t.len()).map(|_| if rng.random_bool(0.5) { rng.random::<f64>() } else { 0.0 }).collect();
                let support = w.iter().filter(|&&x| x > 0.0).count();
                if support == 0 {
                    w[0] = 1.0;
                }
                let total: f64 = w.iter().sum();
                w.iter_mut().for_each(|x| *x /= total);
                let refs: Vec<&Trace> = rows.iter().collect();
                let mix = convex_combine(&w, &refs).unwrap();
                assert_eq!(is_character(&mix).unwrap(), support <= 1);
            }
        }
    }
}
