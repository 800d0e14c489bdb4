//! Exact character tables by the modular class-matrix method.

mod dixon;
pub(crate) mod fp;

use std::cmp::Ordering;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::cyclo::{reduce_dense, Cyclotomic};
use crate::error::{Error, Result};
use crate::group::{ConjClassTable, GroupDescriptor, GroupHandle};
use crate::modp::{lcm, primes_one_mod};

/// Default bound on the number of conjugacy classes.
pub const DEFAULT_CLASS_BUDGET: usize = 400;

/// How many admissible primes to try before giving up.
const PRIME_ATTEMPTS: usize = 8;

/// Class matrices `M_j` with `(M_j)_{i,l} = #{(x, y) ∈ C_j × C_i : xy = z_l}`.
pub fn class_matrices(group: &GroupHandle, classes: &ConjClassTable) -> Vec<Vec<Vec<u64>>> {
    let k = classes.len();
    let a = dixon::structure_constants(group, classes);
    (0..k)
        .map(|j| {
            (0..k)
                .map(|i| (0..k).map(|l| a[(j * k + i) * k + l] as u64).collect())
                .collect()
        })
        .collect()
}

/// Irreducible characters of a finite group with exact cyclotomic values.
///
/// Row 0 is the trivial character; the remaining rows are sorted by degree and
/// then lexicographically by canonical value. Columns follow the class order of
/// [`ConjClassTable`].
#[derive(Clone, Debug)]
pub struct CharacterTable {
    descriptor: GroupDescriptor,
    order: usize,
    exponent: u64,
    prime: u64,
    class_sizes: Vec<usize>,
    class_representatives: Vec<usize>,
    class_orders: Vec<u64>,
    inverse_class: Vec<usize>,
    degrees: Vec<u64>,
    values: Vec<Vec<Cyclotomic>>,
    complex: Vec<Vec<Complex64>>,
}

#[derive(Clone, Copy, Debug)]
pub struct DixonOptions {
    /// Skip this many admissible primes before the first attempt.
    pub skip_primes: usize,
    pub max_classes: usize,
}

impl Default for DixonOptions {
    fn default() -> Self {
        DixonOptions {
            skip_primes: 0,
            max_classes: DEFAULT_CLASS_BUDGET,
        }
    }
}

pub fn character_table(group: &GroupHandle, classes: &ConjClassTable) -> Result<CharacterTable> {
    character_table_with(group, classes, DixonOptions::default())
}

pub fn character_table_with(
    group: &GroupHandle,
    classes: &ConjClassTable,
    options: DixonOptions,
) -> Result<CharacterTable> {
    if classes.len() > options.max_classes {
        return Err(Error::BudgetExceeded {
            what: "class count",
            actual: classes.len() as u64,
            limit: options.max_classes as u64,
        });
    }
    let exponent = classes.orders().iter().fold(1, |acc, &o| lcm(acc, o));
    let n = group.order() as u64;
    let lower = (2.0 * (n as f64).sqrt()).floor() as u64;
    let a = dixon::structure_constants(group, classes);
    let mut last = Error::SplittingFailure { prime: 0 };
    for ell in primes_one_mod(exponent, lower)
        .skip(options.skip_primes)
        .take(PRIME_ATTEMPTS)
    {
        match dixon::dixon_at_prime(group, classes, &a, exponent, ell) {
            Ok(raw) => {
                let degrees = raw.iter().map(|r| r.degree).collect();
                let values = raw.into_iter().map(|r| r.values).collect();
                let table = CharacterTable::assemble(
                    group.descriptor().clone(),
                    group.order(),
                    exponent,
                    ell,
                    classes,
                    degrees,
                    values,
                );
                match table.verify() {
                    Ok(()) => return Ok(table),
                    Err(e) => last = e,
                }
            }
            Err(e @ Error::SplittingFailure { .. }) => last = e,
            Err(e) => return Err(e),
        }
    }
    Err(last)
}

impl CharacterTable {
    fn assemble(
        descriptor: GroupDescriptor,
        order: usize,
        exponent: u64,
        prime: u64,
        classes: &ConjClassTable,
        degrees: Vec<u64>,
        values: Vec<Vec<Cyclotomic>>,
    ) -> Self {
        let mut rows: Vec<(u64, Vec<Cyclotomic>)> = degrees.into_iter().zip(values).collect();
        let is_trivial = |r: &(u64, Vec<Cyclotomic>)| {
            r.0 == 1 && r.1.iter().all(|v| v.as_integer() == Some(1))
        };
        rows.sort_by(|x, y| {
            is_trivial(y)
                .cmp(&is_trivial(x))
                .then(x.0.cmp(&y.0))
                .then_with(|| {
                    x.1.iter()
                        .zip(&y.1)
                        .map(|(a, b)| a.canonical_cmp(b))
                        .find(|o| *o != Ordering::Equal)
                        .unwrap_or(Ordering::Equal)
                })
        });
        let (degrees, values): (Vec<u64>, Vec<Vec<Cyclotomic>>) = rows.into_iter().unzip();
        Self::from_parts(
            descriptor,
            order,
            exponent,
            prime,
            classes.sizes().to_vec(),
            classes.representatives().to_vec(),
            classes.orders().to_vec(),
            classes.inverse_class().to_vec(),
            degrees,
            values,
        )
    }

    /// Rebuilds a table from stored data; call [`CharacterTable::verify`] before trusting it.
    #[allow(clippy::too_many_arguments)]
    pub fn from_parts(
        descriptor: GroupDescriptor,
        order: usize,
        exponent: u64,
        prime: u64,
        class_sizes: Vec<usize>,
        class_representatives: Vec<usize>,
        class_orders: Vec<u64>,
        inverse_class: Vec<usize>,
        degrees: Vec<u64>,
        values: Vec<Vec<Cyclotomic>>,
    ) -> Self {
        let complex = values
            .iter()
            .map(|row| row.iter().map(|v| v.to_complex()).collect())
            .collect();
        CharacterTable {
            descriptor,
            order,
            exponent,
            prime,
            class_sizes,
            class_representatives,
            class_orders,
            inverse_class,
            degrees,
            values,
            complex,
        }
    }

    pub fn descriptor(&self) -> &GroupDescriptor {
        &self.descriptor
    }

    pub fn group_order(&self) -> usize {
        self.order
    }

    pub fn exponent(&self) -> u64 {
        self.exponent
    }

    /// The prime ℓ at which the table was computed.
    pub fn prime(&self) -> u64 {
        self.prime
    }

    /// Number of irreducible characters (equal to the number of classes).
    pub fn len(&self) -> usize {
        self.degrees.len()
    }

    pub fn is_empty(&self) -> bool {
        self.degrees.is_empty()
    }

    pub fn degrees(&self) -> &[u64] {
        &self.degrees
    }

    /// Degrees in increasing order.
    pub fn degree_multiset(&self) -> Vec<u64> {
        let mut d = self.degrees.clone();
        d.sort_unstable();
        d
    }

    pub fn class_sizes(&self) -> &[usize] {
        &self.class_sizes
    }

    pub fn class_representatives(&self) -> &[usize] {
        &self.class_representatives
    }

    pub fn class_orders(&self) -> &[u64] {
        &self.class_orders
    }

    pub fn inverse_class(&self) -> &[usize] {
        &self.inverse_class
    }

    pub fn value(&self, row: usize, class: usize) -> &Cyclotomic {
        &self.values[row][class]
    }

    pub fn row(&self, row: usize) -> &[Cyclotomic] {
        &self.values[row]
    }

    pub fn rows(&self) -> &[Vec<Cyclotomic>] {
        &self.values
    }

    pub fn complex_row(&self, row: usize) -> &[Complex64] {
        &self.complex[row]
    }

    /// `χ_i / χ_i(e)` in floating point.
    pub fn normalized_complex_row(&self, row: usize) -> Vec<Complex64> {
        let d = self.degrees[row] as f64;
        self.complex[row].iter().map(|z| z / d).collect()
    }

    /// Classes on which the character takes its degree, i.e. the kernel.
    pub fn kernel_classes(&self, row: usize) -> Vec<usize> {
        let d = self.degrees[row] as i64;
        let target = Cyclotomic::from_int(self.exponent as u32, d);
        (0..self.len())
            .filter(|&j| self.values[row][j] == target)
            .collect()
    }

    /// Size of the kernel as a subgroup.
    pub fn kernel_order(&self, row: usize) -> usize {
        self.kernel_classes(row)
            .iter()
            .map(|&j| self.class_sizes[j])
            .sum()
    }

    pub fn is_faithful(&self, row: usize) -> bool {
        self.kernel_order(row) == 1
    }

    /// Checks both orthogonality relations and `Σ d² = |G|` in exact arithmetic.
    pub fn verify(&self) -> Result<()> {
        let k = self.len();
        let n = self.order as i64;
        if self.values.len() != k
            || self.values.iter().any(|r| r.len() != k)
            || self.class_sizes.len() != k
        {
            return Err(Error::Mismatch("character table is not square".into()));
        }
        if self.class_sizes.iter().sum::<usize>() != self.order {
            return Err(Error::Mismatch("class sizes do not sum to the group order".into()));
        }
        let sum_sq: u64 = self.degrees.iter().map(|d| d * d).sum();
        if sum_sq != self.order as u64 {
            return Err(Error::Mismatch(format!(
                "sum of squared degrees {sum_sq} differs from |G| = {}",
                self.order
            )));
        }
        for i in 0..k {
            if self.values[i][0].as_integer() != Some(self.degrees[i] as i64) {
                return Err(Error::Mismatch(format!("row {i} does not start with its degree")));
            }
        }
        if !self.values[0].iter().all(|v| v.as_integer() == Some(1)) {
            return Err(Error::Mismatch("first row is not the trivial character".into()));
        }
        let e = self.exponent as usize;
        let pairs: Vec<(usize, usize)> = (0..k).flat_map(|i| (i..k).map(move |l| (i, l))).collect();
        let row_bad = pairs.par_iter().find_any(|&&(i, l)| {
            let expected = if i == l { n } else { 0 };
            let terms = (0..k).map(|j| (self.class_sizes[j] as i64, &self.values[i][j], &self.values[l][j]));
            !hermitian_sum_equals(e, terms, expected)
        });
        if let Some((i, l)) = row_bad {
            return Err(Error::Mismatch(format!("row orthogonality fails for rows {i}, {l}")));
        }
        let col_bad = pairs.par_iter().find_any(|&&(j, m)| {
            if j == m && n % self.class_sizes[j] as i64 != 0 {
                return true;
            }
            let expected = if j == m { n / self.class_sizes[j] as i64 } else { 0 };
            let terms = (0..k).map(|i| (1i64, &self.values[i][j], &self.values[i][m]));
            !hermitian_sum_equals(e, terms, expected)
        });
        if let Some((j, m)) = col_bad {
            return Err(Error::Mismatch(format!("column orthogonality fails for classes {j}, {m}")));
        }
        Ok(())
    }
}

/// Exact test of `Σ w · x · conj(y) = expected` in `ℚ(ζ_e)`.
fn hermitian_sum_equals<'a>(
    e: usize,
    terms: impl Iterator<Item = (i64, &'a Cyclotomic, &'a Cyclotomic)>,
    expected: i64,
) -> bool {
    let mut dense = vec![0i64; e];
    for (w, x, y) in terms {
        let (x, y) = (x.lift(e as u32), y.lift(e as u32));
        for &(p, c) in x.terms() {
            for &(q, d) in y.terms() {
                let idx = (p as usize + e - q as usize) % e;
                dense[idx] += w * c * d;
            }
        }
    }
    dense[0] -= expected;
    reduce_dense(e as u32, &dense).iter().all(|&c| c == 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{build_group, conjugacy_classes};

    fn table(s: &str) -> (GroupHandle, ConjClassTable, CharacterTable) {
        let g = build_group(&s.parse().unwrap()).unwrap();
        let c = conjugacy_classes(&g);
        let t = character_table(&g, &c).unwrap();
        (g, c, t)
    }

    #[test]
    fn class_matrices_of_z2() {
        let g = build_group(&"cyclic(2)".parse().unwrap()).unwrap();
        let c = conjugacy_classes(&g);
        let m = class_matrices(&g, &c);
        assert_eq!(m[1], vec![vec![0, 1], vec![1, 0]]);
    }

    #[test]
    fn class_matrix_identities() {
        for s in ["sl(2,3)", "q8"] {
            let g = build_group(&s.parse().unwrap()).unwrap();
            let c = conjugacy_classes(&g);
            let m = class_matrices(&g, &c);
            let k = c.len();
            let sz = c.sizes();
            for j in 0..k {
                for i in 0..k {
                    let s: u64 = (0..k).map(|l| m[j][i][l] * sz[l] as u64).sum();
                    assert_eq!(s, (sz[i] * sz[j]) as u64);
                }
            }
            for a in 0..k {
                for b in 0..k {
                    for i in 0..k {
                        for l in 0..k {
                            let ab: u64 = (0..k).map(|t| m[a][i][t] * m[b][t][l]).sum();
                            let ba: u64 = (0..k).map(|t| m[b][i][t] * m[a][t][l]).sum();
                            assert_eq!(ab, ba);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn degrees() {
        assert_eq!(table("sl(2,3)").2.degree_multiset(), vec![1, 1, 1, 2, 2, 2, 3]);
        assert_eq!(table("q8").2.degree_multiset(), vec![1, 1, 1, 1, 2]);
        assert_eq!(table("sl(2,5)").2.degree_multiset(), vec![1, 2, 2, 3, 3, 4, 4, 5, 6]);
        assert_eq!(table("sl(2,2)").2.degree_multiset(), vec![1, 1, 2]);
    }

    #[test]
    fn cyclic_three() {
        let (_, _, t) = table("cyclic(3)");
        let z = Cyclotomic::root(3, 1);
        let z2 = Cyclotomic::root(3, 2);
        let one = Cyclotomic::from_int(3, 1);
        let mut values: Vec<Vec<Cyclotomic>> = t.rows().to_vec();
        assert_eq!(values.remove(0), vec![one.clone(), one.clone(), one.clone()]);
        assert!(values.contains(&vec![one.clone(), z.clone(), z2.clone()]));
        assert!(values.contains(&vec![one, z2, z]));
    }

    #[test]
    fn second_prime_gives_the_same_table() {
        for s in ["sl(2,3)", "sl(2,5)", "q8", "aff(2,3)"] {
            let g = build_group(&s.parse().unwrap()).unwrap();
            let c = conjugacy_classes(&g);
            let a = character_table(&g, &c).unwrap();
            let b = character_table_with(&g, &c, DixonOptions { skip_primes: 1, ..Default::default() })
                .unwrap();
            assert_ne!(a.prime(), b.prime());
            assert_eq!(a.rows(), b.rows(), "{s}");
        }
    }

    #[test]
    fn corrupted_table_fails_verification() {
        let (_, c, t) = table("sl(2,3)");
        let mut rows = t.rows().to_vec();
        rows[3][2] = rows[3][2].add(&Cyclotomic::from_int(t.exponent() as u32, 1));
        let bad = CharacterTable::from_parts(
            t.descriptor().clone(),
            24,
            t.exponent(),
            t.prime(),
            c.sizes().to_vec(),
            c.representatives().to_vec(),
            c.orders().to_vec(),
            c.inverse_class().to_vec(),
            t.degrees().to_vec(),
            rows,
        );
        assert!(bad.verify().is_err());
    }

    #[test]
    fn faithful_rows_of_sl2() {
        // For SL(2,p) the kernels are {e}, the center {±I}, or everything.
        for p in [5u32, 7] {
            let (g, c, t) = table(&format!("sl(2,{p})"));
            for i in 0..t.len() {
                let ker = t.kernel_order(i);
                assert!(ker == 1 || ker == 2 || ker == g.order(), "p={p} row {i}");
                // brute-force kernel from complex values
                let brute: usize = (0..c.len())
                    .filter(|&j| (t.complex_row(i)[j] - t.degrees()[i] as f64).norm() < 1e-9)
                    .map(|j| c.sizes()[j])
                    .sum();
                assert_eq!(ker, brute);
            }
            // faithful ⇔ −I acts as −1 ⇔ even-degree-sign rows
            let faithful = (0..t.len()).filter(|&i| t.is_faithful(i)).count();
            assert!(faithful > 0 && faithful < t.len());
        }
    }
}
