use serde::{Deserialize, Serialize};

use super::GroupHandle;

/// Partition of a finite group into conjugacy classes.
///
/// Classes are numbered by increasing representative index, and the
/// representative is the least element index in its class, so class 0 is `{e}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConjClassTable {
    class_of: Vec<u32>,
    sizes: Vec<usize>,
    representatives: Vec<usize>,
    inverse_class: Vec<usize>,
    orders: Vec<u64>,
}

pub fn conjugacy_classes(group: &GroupHandle) -> ConjClassTable {
    let n = group.order();
    let gens = group.generators();
    let gen_inv: Vec<usize> = gens.iter().map(|&g| group.inv(g)).collect();
    let mut class_of = vec![u32::MAX; n];
    let mut sizes = Vec::new();
    let mut representatives = Vec::new();
    let mut stack = Vec::new();
    for x in 0..n {
        if class_of[x] != u32::MAX {
            continue;
        }
        let id = representatives.len() as u32;
        representatives.push(x);
        class_of[x] = id;
        let mut size = 1;
        stack.push(x);
        while let Some(y) = stack.pop() {
            for (&g, &gi) in gens.iter().zip(&gen_inv) {
                let z = group.mul(group.mul(gi, y), g);
                if class_of[z] == u32::MAX {
                    class_of[z] = id;
                    size += 1;
                    stack.push(z);
                }
            }
        }
        sizes.push(size);
    }
    let inverse_class = representatives
        .iter()
        .map(|&r| class_of[group.inv(r)] as usize)
        .collect();
    let orders = representatives.iter().map(|&r| group.element_order(r)).collect();
    ConjClassTable {
        class_of,
        sizes,
        representatives,
        inverse_class,
        orders,
    }
}

impl ConjClassTable {
    pub fn len(&self) -> usize {
        self.sizes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sizes.is_empty()
    }

    pub fn class_of(&self, element: usize) -> usize {
        self.class_of[element] as usize
    }

    pub fn class_ids(&self) -> &[u32] {
        &self.class_of
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn representatives(&self) -> &[usize] {
        &self.representatives
    }

    /// Class of `g⁻¹` as a function of the class of `g`.
    pub fn inverse_class(&self) -> &[usize] {
        &self.inverse_class
    }

    /// Element order of each class.
    pub fn orders(&self) -> &[u64] {
        &self.orders
    }

    /// All members of every class, each list in increasing index order.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.len()];
        for (x, &c) in self.class_of.iter().enumerate() {
            out[c as usize].push(x);
        }
        out
    }

    /// `pow[j][t]` is the class of `g_j^t` for `t ∈ 0..e`.
    pub fn power_map(&self, group: &GroupHandle, e: u64) -> Vec<Vec<usize>> {
        self.representatives
            .iter()
            .map(|&r| {
                let mut out = Vec::with_capacity(e as usize);
                let mut x = 0;
                for _ in 0..e {
                    out.push(self.class_of(x));
                    x = group.mul(x, r);
                }
                out
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::build_group;

    fn classes(s: &str) -> (GroupHandle, ConjClassTable) {
        let g = build_group(&s.parse().unwrap()).unwrap();
        let c = conjugacy_classes(&g);
        (g, c)
    }

    /// Orbit partition by conjugating with every element, not just generators.
    fn brute_force_count(g: &GroupHandle) -> usize {
        let n = g.order();
        let mut seen = vec![false; n];
        let mut count = 0;
        for x in 0..n {
            if !seen[x] {
                count += 1;
                for h in 0..n {
                    seen[g.conjugate(x, h)] = true;
                }
            }
        }
        count
    }

    #[test]
    fn class_counts() {
        let (g, c) = classes("sl(2,3)");
        assert_eq!(c.len(), 7);
        assert_eq!(brute_force_count(&g), 7);
        assert_eq!(classes("q8").1.len(), 5);
        let (_, c) = classes("cyclic(7)");
        assert_eq!(c.len(), 7);
        assert!(c.sizes().iter().all(|&s| s == 1));
    }

    #[test]
    fn sl2_has_p_plus_4_classes() {
        for p in [3u32, 5, 7, 11, 13, 17, 19, 23] {
            let (g, c) = classes(&format!("sl(2,{p})"));
            assert_eq!(c.len(), p as usize + 4, "p = {p}");
            if p <= 7 {
                assert_eq!(brute_force_count(&g), c.len());
            }
        }
    }

    #[test]
    fn structure() {
        for s in ["sl(2,5)", "aff(2,3)", "sl(2,4)", "q8"] {
            let (g, c) = classes(s);
            assert_eq!(c.sizes().iter().sum::<usize>(), g.order());
            assert_eq!(c.sizes()[0], 1);
            assert_eq!(c.representatives()[0], 0);
            for j in 0..c.len() {
                assert_eq!(c.inverse_class()[c.inverse_class()[j]], j);
                assert!(c.members()[j][0] == c.representatives()[j]);
            }
        }
    }
}
