//! Traces invariant under an acting group of automorphisms, the `α_φ`
//! representation, and invariant traces on `ℤ^d` from finite torus orbits.

pub mod torus;

use std::collections::HashMap;
use std::sync::Arc;

use num_complex::Complex64;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::cyclo::CycloRational;
use crate::error::{Error, Result};
use crate::gns::{center, CenterData, GnsModel, RANK_TOL};
use crate::group::{GroupHandle, IntMatrix};
use crate::linalg::{self, CMat};
use crate::ops::GroupOps;
use crate::spectral::{forms::Forms, CheckOptions, FormKind, GapReport, GroupAlgebraElement};
use crate::trace::{ClassValues, Trace};

pub use torus::{orbit, orbit_trace, orbits_of_denominator, torus_limit_scan, RationalOrbit, TorusScan, TorusTrace};

/// Largest acting group that is enumerated explicitly.
pub const ACTING_GROUP_LIMIT: usize = 200_000;

/// A group `Λ` acting on a finite group `Γ` by automorphisms, given by the
/// permutations of element indices induced by its generators.
#[derive(Clone, Debug)]
pub struct AutomorphismAction {
    group: Arc<GroupHandle>,
    generators: Vec<Vec<usize>>,
    elements: Vec<Vec<usize>>,
    index: HashMap<Vec<usize>, usize>,
    inner_contained: bool,
}

fn compose(a: &[usize], b: &[usize]) -> Vec<usize> {
    // x ↦ a(b(x))
    b.iter().map(|&x| a[x]).collect()
}

fn invert(a: &[usize]) -> Vec<usize> {
    let mut out = vec![0; a.len()];
    for (x, &y) in a.iter().enumerate() {
        out[y] = x;
    }
    out
}

impl AutomorphismAction {
    pub fn new(group: Arc<GroupHandle>, generators: Vec<Vec<usize>>) -> Result<Self> {
        let n = group.order();
        for (k, p) in generators.iter().enumerate() {
            if p.len() != n {
                return Err(Error::Precondition(format!("automorphism {k} has the wrong length")));
            }
            let mut seen = vec![false; n];
            for &y in p {
                if y >= n || std::mem::replace(&mut seen[y], true) {
                    return Err(Error::Precondition(format!("automorphism {k} is not a bijection")));
                }
            }
            for x in 0..n {
                for y in 0..n {
                    if p[group.mul(x, y)] != group.mul(p[x], p[y]) {
                        return Err(Error::Precondition(format!("automorphism {k} is not a homomorphism")));
                    }
                }
            }
        }
        let identity: Vec<usize> = (0..n).collect();
        let mut elements = vec![identity.clone()];
        let mut index = HashMap::from([(identity, 0usize)]);
        let mut head = 0;
        while head < elements.len() {
            for g in &generators {
                let next = compose(&elements[head], g);
                if !index.contains_key(&next) {
                    if elements.len() >= ACTING_GROUP_LIMIT {
                        return Err(Error::BudgetExceeded {
                            what: "acting group order",
                            actual: elements.len() as u64 + 1,
                            limit: ACTING_GROUP_LIMIT as u64,
                        });
                    }
                    index.insert(next.clone(), elements.len());
                    elements.push(next);
                }
            }
            head += 1;
        }
        let inner_contained = group
            .generators()
            .iter()
            .all(|&g| index.contains_key(&inner_automorphism(&group, g)));
        Ok(AutomorphismAction { group, generators, elements, index, inner_contained })
    }

    /// `Λ = Γ` acting by conjugation `h ↦ γhγ⁻¹`, generated by the generators of `Γ`.
    pub fn inner(group: Arc<GroupHandle>) -> Result<Self> {
        let gens = group.generators().iter().map(|&g| inner_automorphism(&group, g)).collect();
        Self::new(group, gens)
    }

    /// Integer matrices acting linearly on an elementary abelian group
    /// `(ℤ/p)^d` presented as `abelian(p,…,p)`.
    pub fn linear(group: Arc<GroupHandle>, matrices: &[IntMatrix]) -> Result<Self> {
        let n = group.order();
        let factors = group
            .descriptor()
            .abelian_factors()
            .ok_or_else(|| Error::Precondition("linear actions need an abelian group".into()))?;
        let mut gens = Vec::new();
        for m in matrices {
            let d = m.dim();
            let mut perm = Vec::with_capacity(n);
            for x in 0..n {
                let digits = group.digits(x);
                if digits.len() != d {
                    return Err(Error::Mismatch(format!("{d}×{d} matrix on a group with {} coordinates", digits.len())));
                }
                let v: Vec<i64> = digits.iter().map(|&c| c as i64).collect();
                let image: Vec<u32> = m
                    .apply(&v)
                    .iter()
                    .zip(factors.iter().copied())
                    .map(|(&c, q)| c.rem_euclid(q as i64) as u32)
                    .collect();
                perm.push(group.index_of_digits(&image)?);
            }
            gens.push(perm);
        }
        Self::new(group, gens)
    }

    /// Adds the inner automorphisms of `Γ` to the generators.
    pub fn with_inner(self) -> Result<Self> {
        let mut gens = self.generators;
        for &g in self.group.generators() {
            gens.push(inner_automorphism(&self.group, g));
        }
        Self::new(self.group, gens)
    }

    pub fn group(&self) -> &Arc<GroupHandle> {
        &self.group
    }

    pub fn generators(&self) -> &[Vec<usize>] {
        &self.generators
    }

    /// Number of distinct automorphisms in `θ(Λ)`.
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn element(&self, i: usize) -> &[usize] {
        &self.elements[i]
    }

    /// Indices (into the enumerated image) of the generators.
    pub fn generator_indices(&self) -> Vec<usize> {
        self.generators.iter().map(|g| self.index[g]).collect()
    }

    /// Whether every inner automorphism lies in `θ(Λ)`.
    pub fn contains_inner(&self) -> bool {
        self.inner_contained
    }

    /// Number of `Λ`-orbits on conjugacy classes of `Γ`.
    pub fn class_orbit_count(&self) -> usize {
        let classes = self.group.classes();
        let k = classes.len();
        let mut parent: Vec<usize> = (0..k).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            p[x] = r;
            r
        }
        for g in &self.generators {
            for (j, &rep) in classes.representatives().iter().enumerate() {
                let (a, b) = (find(&mut parent, j), find(&mut parent, classes.class_of(g[rep])));
                parent[a.max(b)] = a.min(b);
            }
        }
        (0..k).filter(|&j| find(&mut parent, j) == j).count()
    }
}

fn inner_automorphism(group: &GroupHandle, g: usize) -> Vec<usize> {
    let gi = group.inv(g);
    (0..group.order()).map(|h| group.mul(group.mul(g, h), gi)).collect()
}

impl GroupOps for AutomorphismAction {
    type Elem = usize;

    fn mul(&self, a: &usize, b: &usize) -> usize {
        self.index[&compose(&self.elements[*a], &self.elements[*b])]
    }

    fn inv(&self, a: &usize) -> usize {
        self.index[&invert(&self.elements[*a])]
    }

    fn identity(&self) -> usize {
        0
    }
}

/// `φ∘θ(λ) = φ` for every generator.
pub fn relative_invariance(phi: &Trace, action: &AutomorphismAction) -> Result<bool> {
    if !Arc::ptr_eq(phi.group(), action.group()) && phi.group().descriptor() != action.group().descriptor() {
        return Err(Error::Mismatch("trace and action live on different groups".into()));
    }
    let n = action.group().order();
    if phi.is_exact() {
        for g in action.generators() {
            for x in 0..n {
                if phi.eval_exact(g[x]) != phi.eval_exact(x) {
                    return Ok(false);
                }
            }
        }
        return Ok(true);
    }
    let values = phi.element_values();
    Ok(action
        .generators()
        .iter()
        .all(|g| (0..n).all(|x| (values[g[x]] - values[x]).norm() <= 1e-10)))
}

/// `(1/|θ(Λ)|) Σ_λ φ∘θ(λ)`, exact when `φ` is.
pub fn lambda_average(phi: &Trace, action: &AutomorphismAction) -> Result<Trace> {
    let group = action.group();
    let classes = group.classes();
    let count = action.order();
    let label = format!("avg({})", phi.label());
    if let Some(exact) = phi.exact_class_values() {
        let order = exact.iter().fold(1u64, |acc, c| crate::modp::lcm(acc, c.order() as u64)) as u32;
        let values = classes
            .representatives()
            .iter()
            .map(|&r| {
                let mut acc = CycloRational::zero(order);
                for e in &action.elements {
                    acc = acc.add(&exact[classes.class_of(e[r])]);
                }
                acc.scale(Ratio::new(1, count as i64))
            })
            .collect();
        return Trace::finite(group.clone(), ClassValues::Exact(values), label);
    }
    let cv = phi.class_values_complex();
    let values = classes
        .representatives()
        .iter()
        .map(|&r| action.elements.iter().map(|e| cv[classes.class_of(e[r])]).sum::<Complex64>() / count as f64)
        .collect();
    Trace::finite(group.clone(), ClassValues::Float(values), label)
}

/// `U_φ(λ)`: `δ_h ↦ δ_{θ_λ(h)}` on the GNS space.
pub fn unitary_of(model: &GnsModel, theta: &[usize]) -> CMat {
    let images: Vec<usize> = model.pivots().iter().map(|&p| theta[p]).collect();
    model.coords_of(&images) * model.pivot_inverse()
}

fn check_invariant(model: &GnsModel, action: &AutomorphismAction) -> Result<()> {
    if !relative_invariance(model.trace(), action)? {
        return Err(Error::Precondition(
            "the action does not extend to the GNS space: the trace is not Λ-invariant".into(),
        ));
    }
    Ok(())
}

/// `‖α_φ(a)|v^⊥‖` against `φ(Σ_λ b_λ x* x^λ − βx*x) ≤ (1−β)|φ(x)|²`, with `a`
/// given over the enumerated image of `Λ`.
pub fn alpha_gap(
    model: &GnsModel,
    action: &AutomorphismAction,
    a: &GroupAlgebraElement<usize>,
    betas: &[f64],
    opts: &CheckOptions,
) -> Result<Vec<GapReport>> {
    check_invariant(model, action)?;
    if (a.mass() - 1.0).norm() > 1e-12 {
        return Err(Error::Precondition("a must have coefficients summing to 1".into()));
    }
    let n = model.dim();
    let mut alpha = CMat::zeros(n, n);
    for (&l, c) in a.terms() {
        if l >= action.order() {
            return Err(Error::NotInGroup(format!("acting element {l}")));
        }
        alpha += unitary_of(model, action.element(l)) * c;
    }
    let v = model.cyclic_vector();
    let top = linalg::top_singular(&(alpha * (CMat::identity(n, n) - v * v.adjoint())));
    let b = a.star_square(action);
    let group = model.group();
    let m = group.order();
    let k = CMat::from_fn(m, m, |g, h| model.value(group.mul(group.inv(g), h)));
    let mut form = CMat::zeros(m, m);
    for (&l, c) in b.terms() {
        let theta = action.element(l);
        form += CMat::from_fn(m, m, |g, h| model.value(group.mul(group.inv(g), theta[h]))) * c;
    }
    let f = crate::linalg::CVec::from_fn(m, |g, _| model.value(g).conj());
    let forms = Forms { kind: FormKind::Conjugation, k, m: form, f };
    let test_set = format!(
        "all {m} group elements: basis, pairwise sums/differences, {} random (seed {}), extremal vector",
        opts.random_vectors, opts.seed
    );
    Ok(forms
        .inequality_side(betas, opts.random_vectors, opts.seed, opts.tol)
        .into_iter()
        .map(|side| GapReport::two_sided("alpha", &top, side, test_set.clone(), opts.tol))
        .collect())
}

/// Dimension of `H^α` computed as an eigenspace and as `Z(M_φ) ∩ U(Λ)′`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelativeCharacterReport {
    pub eigenspace_dim: usize,
    pub commutant_dim: usize,
}

impl RelativeCharacterReport {
    pub fn is_relative_character(&self) -> bool {
        self.eigenspace_dim == 1 && self.commutant_dim == 1
    }

    pub fn routes_agree(&self) -> bool {
        self.eigenspace_dim == self.commutant_dim
    }
}

pub fn relative_character_dims(
    model: &GnsModel,
    action: &AutomorphismAction,
    center_data: Option<&CenterData>,
) -> Result<RelativeCharacterReport> {
    if !action.contains_inner() {
        return Err(Error::Precondition("Inn(Γ) is not contained in θ(Λ)".into()));
    }
    check_invariant(model, action)?;
    let n = model.dim();
    let us: Vec<CMat> = action.generators().iter().map(|g| unitary_of(model, g)).collect();
    let eigenspace_dim = if us.is_empty() {
        n
    } else {
        let mut stacked = CMat::zeros(n * us.len(), n);
        for (k, u) in us.iter().enumerate() {
            stacked
                .view_mut((k * n, 0), (n, n))
                .copy_from(&(u - CMat::identity(n, n)));
        }
        linalg::null_space(&stacked, RANK_TOL).ncols()
    };
    let owned;
    let cd = match center_data {
        Some(c) => c,
        None => {
            owned = center(model)?;
            &owned
        }
    };
    let z = &cd.center;
    let commutant_dim = if us.is_empty() || z.is_empty() {
        z.len()
    } else {
        let mut eqs = CMat::zeros(n * n * us.len(), z.len());
        for (k, u) in us.iter().enumerate() {
            for (i, zi) in z.iter().enumerate() {
                let c = u * zi - zi * u;
                eqs.view_mut((k * n * n, i), (n * n, 1))
                    .copy_from(&CMat::from_column_slice(n * n, 1, c.as_slice()));
            }
        }
        linalg::null_space(&eqs, RANK_TOL).ncols()
    };
    Ok(RelativeCharacterReport { eigenspace_dim, commutant_dim })
}

/// `dim H_φ^{α_φ} = 1`, cross-checked against `Z(M_φ) ∩ U(Λ)′`.
pub fn is_relative_character(model: &GnsModel, action: &AutomorphismAction) -> Result<bool> {
    let r = relative_character_dims(model, action, None)?;
    if !r.routes_agree() {
        return Err(Error::Mismatch(format!(
            "α-invariant dimension {} differs from Z(M) ∩ U(Λ)′ dimension {}",
            r.eigenspace_dim, r.commutant_dim
        )));
    }
    Ok(r.is_relative_character())
}
