//! Finite groups enumerated from generators, with canonical element indexing.

mod classes;
mod descriptor;
mod matrix;

use std::collections::HashMap;

pub use classes::{conjugacy_classes, ConjClassTable};
pub use descriptor::GroupDescriptor;
pub use matrix::{IntMatrix, IntegerMatrices, IntegerMatrixElement};

use crate::error::{Error, Result};
use crate::modp;
use crate::ops::GroupOps;

/// Default upper bound on the number of enumerated elements.
pub const DEFAULT_ORDER_BUDGET: usize = 500_000;

/// Orders at or below this get a precomputed multiplication table.
const CAYLEY_LIMIT: usize = 2048;

#[derive(Clone, Debug)]
enum Arith {
    /// `d×d` matrices over ℤ/m, optionally followed by a translation vector.
    Matrix { d: usize, m: u32, affine: bool },
    /// Direct product of cyclic groups with the given orders.
    Mixed { radices: Vec<u32> },
    /// Explicit table on `0..n`.
    Table { n: usize, table: Vec<u32> },
}

impl Arith {
    fn digit_count(&self) -> usize {
        match self {
            Arith::Matrix { d, affine, .. } => d * d + if *affine { *d } else { 0 },
            Arith::Mixed { radices } => radices.len(),
            Arith::Table { .. } => 1,
        }
    }

    fn radix(&self, k: usize) -> u128 {
        match self {
            Arith::Matrix { m, .. } => *m as u128,
            Arith::Mixed { radices } => radices[k] as u128,
            Arith::Table { n, .. } => *n as u128,
        }
    }

    fn encode(&self, digits: &[u32]) -> u128 {
        let mut code = 0u128;
        for k in 0..digits.len() {
            code = code * self.radix(k) + digits[k] as u128;
        }
        code
    }

    fn decode(&self, mut code: u128, out: &mut [u32]) {
        for k in (0..out.len()).rev() {
            let r = self.radix(k);
            out[k] = (code % r) as u32;
            code /= r;
        }
    }

    fn combine(&self, a: u128, b: u128) -> u128 {
        match self {
            Arith::Matrix { d, m, affine } => {
                let (d, m) = (*d, *m as u64);
                let n = self.digit_count();
                let mut x = [0u32; MAX_DIGITS];
                let mut y = [0u32; MAX_DIGITS];
                let mut z = [0u32; MAX_DIGITS];
                self.decode(a, &mut x[..n]);
                self.decode(b, &mut y[..n]);
                for i in 0..d {
                    for j in 0..d {
                        let mut s = 0u64;
                        for k in 0..d {
                            s += x[i * d + k] as u64 * y[k * d + j] as u64;
                        }
                        z[i * d + j] = (s % m) as u32;
                    }
                }
                if *affine {
                    // (A, v)(B, w) = (AB, v + Aw)
                    let off = d * d;
                    for i in 0..d {
                        let mut s = x[off + i] as u64;
                        for k in 0..d {
                            s += x[i * d + k] as u64 * y[off + k] as u64;
                        }
                        z[off + i] = (s % m) as u32;
                    }
                }
                self.encode(&z[..n])
            }
            Arith::Mixed { radices } => {
                let n = radices.len();
                let mut x = [0u32; MAX_DIGITS];
                let mut y = [0u32; MAX_DIGITS];
                self.decode(a, &mut x[..n]);
                self.decode(b, &mut y[..n]);
                for k in 0..n {
                    x[k] = (x[k] + y[k]) % radices[k];
                }
                self.encode(&x[..n])
            }
            Arith::Table { n, table } => table[a as usize * n + b as usize] as u128,
        }
    }

    fn identity(&self) -> u128 {
        match self {
            Arith::Matrix { d, .. } => {
                let mut z = [0u32; MAX_DIGITS];
                for i in 0..*d {
                    z[i * d + i] = 1;
                }
                self.encode(&z[..self.digit_count()])
            }
            Arith::Mixed { .. } => 0,
            Arith::Table { .. } => 0,
        }
    }
}

const MAX_DIGITS: usize = 20;

/// A fully enumerated finite group.
///
/// Element 0 is the identity; the remaining indices follow breadth-first
/// insertion order over the generators, so indexing is reproducible.
#[derive(Clone, Debug)]
pub struct GroupHandle {
    descriptor: GroupDescriptor,
    arith: Arith,
    codes: Vec<u128>,
    index: HashMap<u128, u32>,
    generators: Vec<usize>,
    inverses: Vec<u32>,
    cayley: Option<Vec<u32>>,
    classes: std::sync::OnceLock<ConjClassTable>,
}

/// Builds a group with the default size budget.
pub fn build_group(descriptor: &GroupDescriptor) -> Result<GroupHandle> {
    GroupHandle::build(descriptor, DEFAULT_ORDER_BUDGET)
}

impl GroupHandle {
    pub fn build(descriptor: &GroupDescriptor, budget: usize) -> Result<Self> {
        if let Some(expected) = descriptor.expected_order() {
            if expected > budget as u128 {
                return Err(Error::BudgetExceeded {
                    what: "group order",
                    actual: expected.min(u64::MAX as u128) as u64,
                    limit: budget as u64,
                });
            }
        }
        match descriptor {
            GroupDescriptor::SpecialLinear { d, modulus } => {
                Self::matrix_group(descriptor.clone(), *d, *modulus, false, budget)
            }
            GroupDescriptor::Affine { d, modulus } => {
                Self::matrix_group(descriptor.clone(), *d, *modulus, true, budget)
            }
            GroupDescriptor::Cyclic(n) => Self::abelian(descriptor.clone(), vec![*n], budget),
            GroupDescriptor::Abelian(ns) => Self::abelian(descriptor.clone(), ns.clone(), budget),
            GroupDescriptor::Quaternion => Ok(quaternion_group()),
            GroupDescriptor::Table(name) => Err(Error::BadDescriptor(format!(
                "table({name}) has no built-in construction; use GroupHandle::from_table"
            ))),
        }
    }

    fn matrix_group(
        descriptor: GroupDescriptor,
        d: usize,
        m: u32,
        affine: bool,
        budget: usize,
    ) -> Result<Self> {
        let arith = Arith::Matrix { d, m, affine };
        if arith.digit_count() > MAX_DIGITS {
            return Err(Error::BadDescriptor(format!("{descriptor}: dimension too large")));
        }
        if (m as f64).powi(arith.digit_count() as i32) >= 2f64.powi(127) {
            return Err(Error::BadDescriptor(format!("{descriptor}: modulus too large")));
        }
        let mut gens = Vec::new();
        for i in 0..d {
            for j in 0..d {
                if i != j {
                    let mut entries = IntMatrix::identity(d).entries().to_vec();
                    entries[i * d + j] = 1;
                    let mut e = IntegerMatrixElement::linear(IntMatrix::from_row_major(d, entries)?)?
                        .residues(m);
                    if affine {
                        e.extend(std::iter::repeat(0).take(d));
                    }
                    gens.push(e);
                }
            }
        }
        if affine {
            for k in 0..d {
                let mut e = IntMatrix::identity(d).residues(m);
                e.extend((0..d).map(|i| u32::from(i == k)));
                gens.push(e);
            }
        }
        let gens: Vec<u128> = gens.iter().map(|g| arith.encode(g)).collect();
        Self::enumerate(descriptor, arith, &gens, budget)
    }

    fn abelian(descriptor: GroupDescriptor, radices: Vec<u32>, budget: usize) -> Result<Self> {
        let arith = Arith::Mixed {
            radices: radices.clone(),
        };
        if radices.len() > MAX_DIGITS {
            return Err(Error::BadDescriptor(descriptor.to_string()));
        }
        let gens: Vec<u128> = (0..radices.len())
            .map(|k| {
                let digits: Vec<u32> = (0..radices.len())
                    .map(|i| u32::from(i == k) % radices[i])
                    .collect();
                arith.encode(&digits)
            })
            .collect();
        Self::enumerate(descriptor, arith, &gens, budget)
    }

    /// Builds a group from generator matrices over ℤ/m (determinant must be a unit).
    pub fn from_matrix_generators(
        name: &str,
        modulus: u32,
        generators: &[IntMatrix],
        budget: usize,
    ) -> Result<Self> {
        let d = generators
            .first()
            .map(|g| g.dim())
            .ok_or_else(|| Error::Precondition("at least one generator is required".into()))?;
        let arith = Arith::Matrix {
            d,
            m: modulus,
            affine: false,
        };
        let mut codes = Vec::new();
        for (index, g) in generators.iter().enumerate() {
            if g.dim() != d {
                return Err(Error::Precondition("generators must share a dimension".into()));
            }
            let det = g.det().rem_euclid(modulus as i64) as u64;
            if modp::gcd(det, modulus as u64) != 1 {
                return Err(Error::NonInvertibleGenerator { index, modulus });
            }
            codes.push(arith.encode(&g.residues(modulus)));
        }
        Self::enumerate(GroupDescriptor::Table(name.to_string()), arith, &codes, budget)
    }

    /// Builds a group from a multiplication table on `0..n`, validated exhaustively
    /// (associativity is sampled above 64 elements).
    pub fn from_table(name: &str, table: &[Vec<usize>]) -> Result<Self> {
        let n = table.len();
        if n == 0 || table.iter().any(|r| r.len() != n || r.iter().any(|&x| x >= n)) {
            return Err(Error::Precondition("table must be a square array over 0..n".into()));
        }
        let e = (0..n)
            .find(|&e| (0..n).all(|x| table[e][x] == x && table[x][e] == x))
            .ok_or_else(|| Error::Precondition("table has no identity".into()))?;
        for x in 0..n {
            if !(0..n).any(|y| table[x][y] == e && table[y][x] == e) {
                return Err(Error::Precondition(format!("element {x} has no inverse")));
            }
        }
        let assoc = |x: usize, y: usize, z: usize| table[table[x][y]][z] == table[x][table[y][z]];
        if n <= 64 {
            for x in 0..n {
                for y in 0..n {
                    for z in 0..n {
                        if !assoc(x, y, z) {
                            return Err(Error::Precondition("table is not associative".into()));
                        }
                    }
                }
            }
        } else {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0);
            for _ in 0..100_000 {
                let (x, y, z) = (rng.random_range(0..n), rng.random_range(0..n), rng.random_range(0..n));
                if !assoc(x, y, z) {
                    return Err(Error::Precondition("table is not associative".into()));
                }
            }
        }
        // Relabel so that the identity is 0, then greedily pick generators.
        let mut perm: Vec<usize> = (0..n).collect();
        perm.swap(0, e);
        let mut inv_perm = vec![0; n];
        for (i, &p) in perm.iter().enumerate() {
            inv_perm[p] = i;
        }
        let mut flat = vec![0u32; n * n];
        for a in 0..n {
            for b in 0..n {
                flat[a * n + b] = inv_perm[table[perm[a]][perm[b]]] as u32;
            }
        }
        let mut gens: Vec<u128> = Vec::new();
        let mut reached = vec![false; n];
        reached[0] = true;
        for x in 0..n {
            if !reached[x] {
                gens.push(x as u128);
                reached = closure(n, &flat, &gens);
            }
        }
        let arith = Arith::Table { n, table: flat };
        Self::enumerate(GroupDescriptor::Table(name.to_string()), arith, &gens, n)
    }

    fn enumerate(
        descriptor: GroupDescriptor,
        arith: Arith,
        generator_codes: &[u128],
        budget: usize,
    ) -> Result<Self> {
        let id = arith.identity();
        let mut codes = vec![id];
        let mut index = HashMap::new();
        index.insert(id, 0u32);
        let mut head = 0;
        while head < codes.len() {
            let x = codes[head];
            head += 1;
            for &s in generator_codes {
                let y = arith.combine(x, s);
                if !index.contains_key(&y) {
                    if codes.len() >= budget {
                        return Err(Error::BudgetExceeded {
                            what: "group order",
                            actual: codes.len() as u64 + 1,
                            limit: budget as u64,
                        });
                    }
                    index.insert(y, codes.len() as u32);
                    codes.push(y);
                }
            }
        }
        let mut generators = Vec::new();
        for s in generator_codes {
            let g = index[s] as usize;
            if g != 0 && !generators.contains(&g) {
                generators.push(g);
            }
        }
        let n = codes.len();
        let cayley = (n <= CAYLEY_LIMIT).then(|| {
            let mut t = vec![0u32; n * n];
            for a in 0..n {
                for b in 0..n {
                    t[a * n + b] = index[&arith.combine(codes[a], codes[b])];
                }
            }
            t
        });
        let mut group = GroupHandle {
            descriptor,
            arith,
            codes,
            index,
            generators,
            inverses: Vec::new(),
            cayley,
            classes: std::sync::OnceLock::new(),
        };
        group.inverses = group.compute_inverses();
        Ok(group)
    }

    /// Inverses by walking cyclic subgroups: for x of order k, x⁻¹ = x^{k−1}.
    fn compute_inverses(&self) -> Vec<u32> {
        let n = self.order();
        let mut inv = vec![u32::MAX; n];
        for x in 0..n {
            if inv[x] != u32::MAX {
                continue;
            }
            let mut powers = vec![0usize, x];
            while *powers.last().unwrap() != 0 {
                let next = self.mul(*powers.last().unwrap(), x);
                powers.push(next);
            }
            // powers = [e, x, x², …, x^k = e]
            let k = powers.len() - 1;
            for t in 1..k {
                inv[powers[t]] = powers[k - t] as u32;
            }
            inv[0] = 0;
        }
        inv
    }

    /// Conjugacy classes, computed on first use.
    pub fn classes(&self) -> &ConjClassTable {
        self.classes.get_or_init(|| conjugacy_classes(self))
    }

    pub fn descriptor(&self) -> &GroupDescriptor {
        &self.descriptor
    }

    pub fn order(&self) -> usize {
        self.codes.len()
    }

    pub fn identity(&self) -> usize {
        0
    }

    /// Indices of the generators used for enumeration, in their fixed order.
    pub fn generators(&self) -> &[usize] {
        &self.generators
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        let n = self.codes.len();
        match &self.cayley {
            Some(t) => t[a * n + b] as usize,
            None => self.index[&self.arith.combine(self.codes[a], self.codes[b])] as usize,
        }
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverses[a] as usize
    }

    /// `g⁻¹ x g`.
    pub fn conjugate(&self, x: usize, g: usize) -> usize {
        self.mul(self.mul(self.inv(g), x), g)
    }

    pub fn pow(&self, a: usize, mut k: u64) -> usize {
        let mut base = a;
        let mut acc = 0;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            k >>= 1;
        }
        acc
    }

    pub fn element_order(&self, a: usize) -> u64 {
        let mut x = a;
        let mut k = 1;
        while x != 0 {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    /// Least common multiple of all element orders.
    pub fn exponent(&self) -> u64 {
        self.classes()
            .orders()
            .iter()
            .fold(1, |acc, &o| modp::lcm(acc, o))
    }

    pub fn is_central(&self, a: usize) -> bool {
        self.generators
            .iter()
            .all(|&g| self.mul(a, g) == self.mul(g, a))
    }

    pub fn is_abelian(&self) -> bool {
        self.generators.iter().all(|&g| self.is_central(g))
    }

    /// Digits of the element: matrix entries row-major (then the translation)
    /// for matrix groups, coordinates for abelian groups, the table label otherwise.
    pub fn digits(&self, a: usize) -> Vec<u32> {
        let mut out = vec![0u32; self.arith.digit_count()];
        self.arith.decode(self.codes[a], &mut out);
        out
    }

    pub fn index_of_digits(&self, digits: &[u32]) -> Result<usize> {
        let n = self.arith.digit_count();
        if digits.len() != n || (0..n).any(|k| digits[k] as u128 >= self.arith.radix(k)) {
            return Err(Error::NotInGroup(format!("{digits:?} in {}", self.descriptor)));
        }
        self.index
            .get(&self.arith.encode(digits))
            .map(|&i| i as usize)
            .ok_or_else(|| Error::NotInGroup(format!("{digits:?} in {}", self.descriptor)))
    }

    /// Canonical byte encoding (big-endian, fixed width for the group).
    pub fn encode(&self, a: usize) -> Vec<u8> {
        let width = self.encoding_width();
        self.codes[a].to_be_bytes()[16 - width..].to_vec()
    }

    pub fn decode(&self, bytes: &[u8]) -> Result<usize> {
        if bytes.len() != self.encoding_width() {
            return Err(Error::NotInGroup(format!("encoding of length {}", bytes.len())));
        }
        let mut buf = [0u8; 16];
        buf[16 - bytes.len()..].copy_from_slice(bytes);
        let code = u128::from_be_bytes(buf);
        self.index
            .get(&code)
            .map(|&i| i as usize)
            .ok_or_else(|| Error::NotInGroup(format!("encoding {bytes:?}")))
    }

    fn encoding_width(&self) -> usize {
        let mut bound = 1u128;
        for k in 0..self.arith.digit_count() {
            bound = bound.saturating_mul(self.arith.radix(k));
        }
        let bits = 128 - (bound - 1).leading_zeros() as usize;
        bits.div_ceil(8).max(1)
    }

    /// Reduction of an integer matrix element into this matrix group.
    pub fn reduce(&self, gamma: &IntegerMatrixElement) -> Result<usize> {
        let (d, m, affine) = match &self.arith {
            Arith::Matrix { d, m, affine } => (*d, *m, *affine),
            _ => {
                return Err(Error::NotInGroup(format!(
                    "{} is not a matrix group",
                    self.descriptor
                )))
            }
        };
        if gamma.dim() != d || (gamma.is_affine() && !affine) {
            return Err(Error::NotInGroup(format!("{gamma} in {}", self.descriptor)));
        }
        let mut digits = gamma.residues(m);
        if affine && !gamma.is_affine() {
            digits.extend(std::iter::repeat(0).take(d));
        }
        self.index_of_digits(&digits)
    }

    /// The element as an integer matrix element with entries in `[0, m)`.
    pub fn lift(&self, a: usize) -> Option<IntegerMatrixElement> {
        let Arith::Matrix { d, affine, .. } = &self.arith else {
            return None;
        };
        let digits = self.digits(a);
        let matrix =
            IntMatrix::from_row_major(*d, digits[..d * d].iter().map(|&x| x as i64).collect()).ok()?;
        Some(if *affine {
            IntegerMatrixElement::Affine {
                matrix,
                translation: digits[d * d..].iter().map(|&x| x as i64).collect(),
            }
        } else {
            IntegerMatrixElement::Linear { matrix }
        })
    }
}

/// Free-function form of [`GroupHandle::reduce`].
pub fn reduce(gamma: &IntegerMatrixElement, group: &GroupHandle) -> Result<usize> {
    group.reduce(gamma)
}

fn closure(n: usize, table: &[u32], gens: &[u128]) -> Vec<bool> {
    let mut reached = vec![false; n];
    reached[0] = true;
    let mut stack = vec![0usize];
    while let Some(x) = stack.pop() {
        for &g in gens {
            let y = table[x * n + g as usize] as usize;
            if !reached[y] {
                reached[y] = true;
                stack.push(y);
            }
        }
    }
    reached
}

/// The quaternion group `{±1, ±i, ±j, ±k}`, generated by `i` and `j`.
fn quaternion_group() -> GroupHandle {
    // label = 2·unit + sign bit, unit ∈ {1, i, j, k}
    let unit_mul = |a: usize, b: usize| -> (usize, bool) {
        match (a, b) {
            (0, x) | (x, 0) => (x, false),
            (x, y) if x == y => (0, true),
            (1, 2) => (3, false),
            (2, 3) => (1, false),
            (3, 1) => (2, false),
            (2, 1) => (3, true),
            (3, 2) => (1, true),
            (1, 3) => (2, true),
            _ => unreachable!(),
        }
    };
    let mut table = vec![0u32; 64];
    for a in 0..8 {
        for b in 0..8 {
            let (u, neg) = unit_mul(a / 2, b / 2);
            let sign = (a % 2) ^ (b % 2) ^ usize::from(neg);
            table[a * 8 + b] = (2 * u + sign) as u32;
        }
    }
    let arith = Arith::Table { n: 8, table };
    GroupHandle::enumerate(GroupDescriptor::Quaternion, arith, &[2, 4], 8)
        .expect("quaternion group is well formed")
}

impl GroupOps for GroupHandle {
    type Elem = usize;

    fn mul(&self, a: &usize, b: &usize) -> usize {
        GroupHandle::mul(self, *a, *b)
    }

    fn inv(&self, a: &usize) -> usize {
        GroupHandle::inv(self, *a)
    }

    fn identity(&self) -> usize {
        0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn g(s: &str) -> GroupHandle {
        build_group(&s.parse().unwrap()).unwrap()
    }

    #[test]
    fn orders() {
        assert_eq!(g("sl(2,3)").order(), 24);
        assert_eq!(g("cyclic(5)").order(), 5);
        assert_eq!(g("aff(2,3)").order(), 216);
        assert_eq!(g("q8").order(), 8);
        assert_eq!(g("sl(2,4)").order(), 48);
        for p in [5u32, 7, 11] {
            assert_eq!(g(&format!("sl(2,{p})")).order() as u32, p * (p * p - 1));
        }
        assert_eq!(g("cyclic(1)").order(), 1);
    }

    #[test]
    fn group_axioms_sampled() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for s in ["sl(2,5)", "aff(2,3)", "q8", "abelian(2,4)", "sl(3,2)"] {
            let grp = g(s);
            let n = grp.order();
            for _ in 0..1000 {
                let (x, y, z) = (rng.random_range(0..n), rng.random_range(0..n), rng.random_range(0..n));
                assert_eq!(grp.mul(grp.mul(x, y), z), grp.mul(x, grp.mul(y, z)));
                assert_eq!(grp.mul(x, grp.inv(x)), 0);
                assert_eq!(grp.mul(grp.inv(x), x), 0);
            }
            for x in 0..n {
                assert_eq!(grp.decode(&grp.encode(x)).unwrap(), x);
            }
        }
    }

    #[test]
    fn budget_is_enforced() {
        let err = GroupHandle::build(&"sl(2,13)".parse().unwrap(), 1000).unwrap_err();
        assert!(err.is_budget());
    }

    #[test]
    fn reduction() {
        let grp = g("sl(2,3)");
        let a = IntegerMatrixElement::from_rows(&[vec![4, 1], vec![3, 1]]).unwrap();
        let u = IntegerMatrixElement::from_rows(&[vec![1, 1], vec![0, 1]]).unwrap();
        assert_eq!(grp.reduce(&a).unwrap(), grp.reduce(&u).unwrap());
        assert_eq!(grp.digits(grp.reduce(&u).unwrap()), vec![1, 1, 0, 1]);
        let l = IntegerMatrixElement::from_rows(&[vec![1, 0], vec![1, 1]]).unwrap();
        assert_eq!(
            grp.reduce(&u.mul(&l)).unwrap(),
            grp.mul(grp.reduce(&u).unwrap(), grp.reduce(&l).unwrap())
        );
        let g2 = g("sl(2,2)");
        assert_eq!(g2.digits(g2.reduce(&u).unwrap()), vec![1, 1, 0, 1]);
        let neg = IntegerMatrixElement::from_rows(&[vec![-1, 0], vec![0, -1]]).unwrap();
        assert!(grp.is_central(grp.reduce(&neg).unwrap()));
        assert!(!grp.is_central(grp.reduce(&u).unwrap()));
    }

    #[test]
    fn reduction_is_a_homomorphism_on_ball() {
        let gens = IntegerMatrixElement::elementary_generators(2);
        let ball = IntegerMatrixElement::ball(&gens, 4);
        let grp = g("sl(2,7)");
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..1000 {
            let a = &ball[rng.random_range(0..ball.len())];
            let b = &ball[rng.random_range(0..ball.len())];
            let ra = grp.reduce(a).unwrap();
            let rb = grp.reduce(b).unwrap();
            assert_eq!(grp.reduce(&a.mul(b)).unwrap(), grp.mul(ra, rb));
        }
    }

    #[test]
    fn affine_translation() {
        let grp = g("aff(2,3)");
        let m = IntMatrix::identity(2);
        let t = IntegerMatrixElement::affine(m, vec![4, -1]).unwrap();
        let i = grp.reduce(&t).unwrap();
        assert_eq!(grp.digits(i), vec![1, 0, 0, 1, 1, 2]);
        assert_eq!(grp.element_order(i), 3);
    }

    #[test]
    fn explicit_table() {
        // ℤ/4 with a shuffled identity label
        let lab = [2usize, 0, 3, 1];
        let mut t = vec![vec![0; 4]; 4];
        for a in 0..4 {
            for b in 0..4 {
                t[lab[a]][lab[b]] = lab[(a + b) % 4];
            }
        }
        let grp = GroupHandle::from_table("z4", &t).unwrap();
        assert_eq!(grp.order(), 4);
        assert!(grp.is_abelian());
        assert_eq!(grp.exponent(), 4);
        let mut bad = t.clone();
        bad[1][1] = 1;
        assert!(GroupHandle::from_table("bad", &bad).is_err());
    }

    #[test]
    fn non_invertible_generator() {
        let m = IntMatrix::from_rows(&[vec![2, 0], vec![0, 1]]).unwrap();
        let err = GroupHandle::from_matrix_generators("x", 4, &[m], 100).unwrap_err();
        assert!(matches!(err, Error::NonInvertibleGenerator { index: 0, modulus: 4 }));
        let m = IntMatrix::from_rows(&[vec![2, 0], vec![0, 1]]).unwrap();
        assert_eq!(GroupHandle::from_matrix_generators("x", 5, &[m], 100).unwrap().order(), 4);
    }
}
