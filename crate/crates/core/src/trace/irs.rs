use std::collections::{BTreeSet, HashSet};
use std::sync::Arc;

use num_rational::Ratio;

use super::{ClassValues, Trace};
use crate::cyclo::CycloRational;
use crate::error::{Error, Result};
use crate::group::GroupHandle;

/// Largest group for which subgroup enumeration is attempted.
pub const SUBGROUP_ORDER_LIMIT: usize = 500;

/// A conjugation-invariant probability measure on subgroups of a finite group.
#[derive(Clone, Debug)]
pub struct InvariantRandomSubgroup {
    group: Arc<GroupHandle>,
    /// Subgroups as sorted element lists, with their weights.
    atoms: Vec<(Vec<usize>, Ratio<i64>)>,
}

impl InvariantRandomSubgroup {
    /// Validates subgroup closure, total mass and conjugation invariance.
    pub fn new(group: Arc<GroupHandle>, atoms: Vec<(Vec<usize>, Ratio<i64>)>) -> Result<Self> {
        let mut normalized = Vec::with_capacity(atoms.len());
        for (h, w) in atoms {
            if w < Ratio::from_integer(0) {
                return Err(Error::InvalidTrace("negative weight".into()));
            }
            let set: BTreeSet<usize> = h.into_iter().collect();
            if !is_subgroup(&group, &set) {
                return Err(Error::InvalidTrace("support element is not a subgroup".into()));
            }
            normalized.push((set.into_iter().collect::<Vec<_>>(), w));
        }
        let total: Ratio<i64> = normalized.iter().map(|(_, w)| *w).sum();
        if total != Ratio::from_integer(1) {
            return Err(Error::InvalidTrace(format!("weights sum to {total}, not 1")));
        }
        let weight_of = |h: &[usize]| -> Ratio<i64> {
            normalized
                .iter()
                .filter(|(k, _)| k.as_slice() == h)
                .map(|(_, w)| *w)
                .sum()
        };
        for (h, _) in &normalized {
            let w = weight_of(h);
            for &g in group.generators() {
                let mut conj: Vec<usize> = h.iter().map(|&x| group.conjugate(x, g)).collect();
                conj.sort_unstable();
                if weight_of(&conj) != w {
                    return Err(Error::InvalidTrace(
                        "weights are not constant on conjugacy orbits of subgroups".into(),
                    ));
                }
            }
        }
        Ok(InvariantRandomSubgroup {
            group,
            atoms: normalized,
        })
    }

    /// Uniform measure on the conjugates of `h`.
    pub fn uniform_conjugates(group: Arc<GroupHandle>, h: &[usize]) -> Result<Self> {
        let mut orbit: Vec<Vec<usize>> = Vec::new();
        let mut seen = HashSet::new();
        let mut start = h.to_vec();
        start.sort_unstable();
        seen.insert(start.clone());
        orbit.push(start);
        let mut i = 0;
        while i < orbit.len() {
            for &g in group.generators() {
                let mut c: Vec<usize> = orbit[i].iter().map(|&x| group.conjugate(x, g)).collect();
                c.sort_unstable();
                if seen.insert(c.clone()) {
                    orbit.push(c);
                }
            }
            i += 1;
        }
        let w = Ratio::new(1, orbit.len() as i64);
        Self::new(group, orbit.into_iter().map(|h| (h, w)).collect())
    }

    pub fn atoms(&self) -> &[(Vec<usize>, Ratio<i64>)] {
        &self.atoms
    }
}

fn is_subgroup(group: &GroupHandle, set: &BTreeSet<usize>) -> bool {
    set.contains(&0)
        && set.iter().all(|&x| {
            set.contains(&group.inv(x)) && set.iter().all(|&y| set.contains(&group.mul(x, y)))
        })
}

/// `φ_μ(γ) = μ({H : γ ∈ H})`.
pub fn irs_to_trace(mu: &InvariantRandomSubgroup) -> Result<Trace> {
    let group = &mu.group;
    let classes = group.classes();
    let values: Vec<CycloRational> = classes
        .representatives()
        .iter()
        .map(|&r| {
            let w: Ratio<i64> = mu
                .atoms
                .iter()
                .filter(|(h, _)| h.binary_search(&r).is_ok())
                .map(|(_, w)| *w)
                .sum();
            CycloRational::from_ratio(1, w)
        })
        .collect();
    Trace::finite(group.clone(), ClassValues::Exact(values), "irs")
}

/// All subgroups, as sorted element lists, by closing cyclic subgroups under joins.
pub fn subgroups(group: &GroupHandle) -> Result<Vec<Vec<usize>>> {
    let n = group.order();
    if n > SUBGROUP_ORDER_LIMIT {
        return Err(Error::BudgetExceeded {
            what: "subgroup enumeration order",
            actual: n as u64,
            limit: SUBGROUP_ORDER_LIMIT as u64,
        });
    }
    let generate = |gens: &[usize]| -> Vec<usize> {
        let mut seen = vec![false; n];
        seen[0] = true;
        let mut out = vec![0];
        let mut i = 0;
        while i < out.len() {
            for &g in gens {
                let y = group.mul(out[i], g);
                if !seen[y] {
                    seen[y] = true;
                    out.push(y);
                }
            }
            i += 1;
        }
        out.sort_unstable();
        out
    };
    let mut all: Vec<Vec<usize>> = Vec::new();
    let mut seen: HashSet<Vec<usize>> = HashSet::new();
    for x in 0..n {
        let c = generate(&[x]);
        if seen.insert(c.clone()) {
            all.push(c);
        }
    }
    let cyclic = all.clone();
    let mut i = 0;
    while i < all.len() {
        for c in &cyclic {
            if c.iter().all(|x| all[i].binary_search(x).is_ok()) {
                continue;
            }
            let mut gens = all[i].clone();
            gens.extend(c);
            let j = generate(&gens);
            if seen.insert(j.clone()) {
                all.push(j);
            }
        }
        i += 1;
    }
    all.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
    Ok(all)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::build_group;
    use crate::trace::is_trace;

    fn g(s: &str) -> Arc<GroupHandle> {
        Arc::new(build_group(&s.parse().unwrap()).unwrap())
    }

    #[test]
    fn dirac_measures() {
        let grp = g("sl(2,3)");
        let whole: Vec<usize> = (0..grp.order()).collect();
        let one = irs_to_trace(&InvariantRandomSubgroup::new(grp.clone(), vec![(whole, Ratio::from_integer(1))]).unwrap()).unwrap();
        assert_eq!(one.exact_class_values(), Trace::one(grp.clone()).exact_class_values());
        let trivial = irs_to_trace(&InvariantRandomSubgroup::new(grp.clone(), vec![(vec![0], Ratio::from_integer(1))]).unwrap()).unwrap();
        assert_eq!(trivial.exact_class_values(), Trace::delta(grp.clone()).exact_class_values());
    }

    #[test]
    fn quaternion_cyclic_subgroups() {
        let grp = g("q8");
        let subs = subgroups(&grp).unwrap();
        // {1}, {±1}, three of order 4, Q8
        assert_eq!(subs.len(), 6);
        let order4: Vec<Vec<usize>> = subs.iter().filter(|h| h.len() == 4).cloned().collect();
        let w = Ratio::new(1, 3);
        let mu = InvariantRandomSubgroup::new(grp.clone(), order4.iter().map(|h| (h.clone(), w)).collect()).unwrap();
        let phi = irs_to_trace(&mu).unwrap();
        let minus_one = (1..8).find(|&x| grp.element_order(x) == 2).unwrap();
        let i = (1..8).find(|&x| grp.element_order(x) == 4).unwrap();
        assert_eq!(phi.eval_exact(minus_one).unwrap().as_rational(), Some(Ratio::from_integer(1)));
        assert_eq!(phi.eval_exact(i).unwrap().as_rational(), Some(Ratio::new(1, 3)));
        assert!(is_trace(&phi, None, 0.0, None).passes());
    }

    #[test]
    fn non_invariant_weights_rejected() {
        let grp = g("sl(2,3)");
        let subs = subgroups(&grp).unwrap();
        // a non-normal subgroup of order 3 on its own is not conjugation invariant
        let h = subs.iter().find(|h| h.len() == 3).unwrap().clone();
        assert!(InvariantRandomSubgroup::new(grp.clone(), vec![(h.clone(), Ratio::from_integer(1))]).is_err());
        let mu = InvariantRandomSubgroup::uniform_conjugates(grp.clone(), &h).unwrap();
        assert_eq!(mu.atoms().len(), 4);
        let phi = irs_to_trace(&mu).unwrap();
        let r = is_trace(&phi, None, 0.0, None);
        assert!(r.passes());
        for v in phi.class_values_complex() {
            assert!(v.im == 0.0 && (0.0..=1.0).contains(&v.re));
        }
    }
}
