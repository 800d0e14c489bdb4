use std::collections::BTreeMap;

use num_complex::Complex64;
use num_rational::Ratio;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ops::GroupOps;

/// Finitely supported element `Σ a_g δ_g` of a group algebra.
///
/// Rational coefficients are kept exactly alongside their float images, so that
/// products such as `a*a` do not lose mass.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupAlgebraElement<E: Ord> {
    terms: BTreeMap<E, Complex64>,
    exact: Option<BTreeMap<E, Ratio<i64>>>,
}

impl<E: Ord + Clone> GroupAlgebraElement<E> {
    pub fn from_terms(terms: impl IntoIterator<Item = (E, Complex64)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (g, c) in terms {
            *map.entry(g).or_insert(Complex64::new(0.0, 0.0)) += c;
        }
        map.retain(|_, c| *c != Complex64::new(0.0, 0.0));
        if map.is_empty() {
            return Err(Error::Precondition("group algebra element with empty support".into()));
        }
        Ok(GroupAlgebraElement { terms: map, exact: None })
    }

    pub fn from_rational(terms: impl IntoIterator<Item = (E, Ratio<i64>)>) -> Result<Self> {
        let mut map: BTreeMap<E, Ratio<i64>> = BTreeMap::new();
        for (g, c) in terms {
            *map.entry(g).or_insert_with(Ratio::zero) += c;
        }
        map.retain(|_, c| !c.is_zero());
        if map.is_empty() {
            return Err(Error::Precondition("group algebra element with empty support".into()));
        }
        let terms = map
            .iter()
            .map(|(g, c)| (g.clone(), Complex64::new(*c.numer() as f64 / *c.denom() as f64, 0.0)))
            .collect();
        Ok(GroupAlgebraElement { terms, exact: Some(map) })
    }

    pub fn delta(g: E) -> Self {
        Self::from_rational([(g, Ratio::from_integer(1))]).expect("nonempty")
    }

    /// Uniform probability measure on the listed elements (with multiplicity).
    pub fn uniform(elements: &[E]) -> Result<Self> {
        let n = elements.len() as i64;
        Self::from_rational(elements.iter().map(|g| (g.clone(), Ratio::new(1, n))))
    }

    /// Uniform probability measure on `S ∪ S⁻¹` (as a set).
    pub fn symmetric_uniform<G: GroupOps<Elem = E>>(ops: &G, generators: &[E]) -> Result<Self> {
        let mut set: Vec<E> = generators.iter().flat_map(|g| [g.clone(), ops.inv(g)]).collect();
        set.sort();
        set.dedup();
        Self::uniform(&set)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&E, Complex64)> {
        self.terms.iter().map(|(g, c)| (g, *c))
    }

    pub fn support(&self) -> Vec<E> {
        self.terms.keys().cloned().collect()
    }

    pub fn coefficient(&self, g: &E) -> Complex64 {
        self.terms.get(g).copied().unwrap_or_default()
    }

    pub fn exact_terms(&self) -> Option<&BTreeMap<E, Ratio<i64>>> {
        self.exact.as_ref()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn l1_norm(&self) -> f64 {
        match &self.exact {
            Some(m) => {
                let s: Ratio<i64> = m.values().map(|c| c.abs()).sum();
                *s.numer() as f64 / *s.denom() as f64
            }
            None => self.terms.values().map(|c| c.norm()).sum(),
        }
    }

    pub fn exact_l1_norm(&self) -> Option<Ratio<i64>> {
        self.exact.as_ref().map(|m| m.values().map(|c| c.abs()).sum())
    }

    /// `Σ a_g`.
    pub fn mass(&self) -> Complex64 {
        self.terms.values().sum()
    }

    /// `a* = Σ conj(a_g) δ_{g⁻¹}`.
    pub fn star<G: GroupOps<Elem = E>>(&self, ops: &G) -> Self {
        let terms = self.terms.iter().map(|(g, c)| (ops.inv(g), c.conj())).collect();
        let exact = self
            .exact
            .as_ref()
            .map(|m| m.iter().map(|(g, c)| (ops.inv(g), *c)).collect());
        GroupAlgebraElement { terms, exact }
    }

    pub fn mul<G: GroupOps<Elem = E>>(&self, other: &Self, ops: &G) -> Self {
        if let (Some(a), Some(b)) = (&self.exact, &other.exact) {
            let mut out: BTreeMap<E, Ratio<i64>> = BTreeMap::new();
            for (g, x) in a {
                for (h, y) in b {
                    *out.entry(ops.mul(g, h)).or_insert_with(Ratio::zero) += x * y;
                }
            }
            out.retain(|_, c| !c.is_zero());
            if !out.is_empty() {
                return Self::from_rational(out).expect("nonempty");
            }
        }
        let mut out: BTreeMap<E, Complex64> = BTreeMap::new();
        for (g, x) in &self.terms {
            for (h, y) in &other.terms {
                *out.entry(ops.mul(g, h)).or_default() += x * y;
            }
        }
        out.retain(|_, c| c.norm() > 0.0);
        GroupAlgebraElement { terms: out, exact: None }
    }

    /// `b = a*a`.
    pub fn star_square<G: GroupOps<Elem = E>>(&self, ops: &G) -> Self {
        self.star(ops).mul(self, ops)
    }

    /// Image under a map of groups (e.g. reduction modulo an ideal).
    pub fn map<F: Ord + Clone>(&self, mut f: impl FnMut(&E) -> Result<F>) -> Result<GroupAlgebraElement<F>> {
        if let Some(m) = &self.exact {
            let pairs = m.iter().map(|(g, c)| Ok((f(g)?, *c))).collect::<Result<Vec<_>>>()?;
            return GroupAlgebraElement::from_rational(pairs);
        }
        let pairs = self.terms.iter().map(|(g, c)| Ok((f(g)?, *c))).collect::<Result<Vec<_>>>()?;
        GroupAlgebraElement::from_terms(pairs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{build_group, GroupDescriptor};
    use rand::{Rng, SeedableRng};

    #[test]
    fn involution_and_products() {
        let g = build_group(&"cyclic(2)".parse::<GroupDescriptor>().unwrap()).unwrap();
        let a = GroupAlgebraElement::delta(1usize);
        assert_eq!(a.star(&g).support(), vec![g.inv(1)]);
        let half = GroupAlgebraElement::uniform(&[0usize, 1]).unwrap();
        let b = half.star_square(&g);
        assert_eq!(b.exact_terms().unwrap()[&0], Ratio::new(1, 2));
        assert_eq!(b.exact_terms().unwrap()[&1], Ratio::new(1, 2));
    }

    #[test]
    fn submultiplicative() {
        let g = build_group(&"sl(2,3)".parse::<GroupDescriptor>().unwrap()).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        for _ in 0..50 {
            let a = GroupAlgebraElement::from_terms((0..5).map(|_| {
                (
                    rng.random_range(0..g.order()),
                    Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
                )
            }))
            .unwrap();
            assert_eq!(a.star(&g).star(&g), a);
            let b = a.star_square(&g);
            assert!(b.l1_norm() <= a.l1_norm().powi(2) + 1e-12);
        }
    }
}
