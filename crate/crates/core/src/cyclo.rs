//! Exact arithmetic in cyclotomic integers and their rational multiples.
//!
//! A [`Cyclotomic`] stores `Σ c_k ζ_n^k` sparsely as an element of
//! `ℤ[x]/(x^n − 1)`. That representation is not unique; equality and
//! ordering go through [`Cyclotomic::canonical`], the remainder modulo the
//! cyclotomic polynomial `Φ_n`, which is.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use num_integer::Integer;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

/// Dense integer coefficients of `Φ_n`, lowest degree first.
pub fn cyclotomic_polynomial(n: u32) -> Arc<Vec<i64>> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Arc<Vec<i64>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(p) = cache.lock().unwrap().get(&n) {
        return p.clone();
    }
    let poly = Arc::new(compute_cyclotomic_polynomial(n));
    cache.lock().unwrap().insert(n, poly.clone());
    poly
}

fn mobius(mut n: u32) -> i32 {
    let mut result = 1;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return 0;
            }
            result = -result;
        }
        p += 1;
    }
    if n > 1 {
        result = -result;
    }
    result
}

fn compute_cyclotomic_polynomial(n: u32) -> Vec<i64> {
    assert!(n >= 1);
    let divisors: Vec<u32> = (1..=n).filter(|d| n % d == 0).collect();
    let mut poly: Vec<i128> = vec![1];
    // Φ_n = Π_{d | n} (x^d − 1)^{μ(n/d)}; multiply first so every division is exact.
    for &d in &divisors {
        if mobius(n / d) == 1 {
            let mut next = vec![0i128; poly.len() + d as usize];
            for (k, &c) in poly.iter().enumerate() {
                next[k + d as usize] += c;
                next[k] -= c;
            }
            poly = next;
        }
    }
    for &d in &divisors {
        if mobius(n / d) == -1 {
            let d = d as usize;
            let qlen = poly.len() - d;
            let mut q = vec![0i128; qlen];
            for k in 0..qlen {
                let prev = if k >= d { q[k - d] } else { 0 };
                q[k] = prev - poly[k];
            }
            poly = q;
        }
    }
    poly.into_iter().map(|c| c as i64).collect()
}

/// Euler's totient.
pub fn totient(n: u32) -> u32 {
    (1..=n).filter(|&k| k.gcd(&n) == 1).count() as u32
}

/// An element of `ℤ[ζ_n]`, written as `Σ c_k ζ_n^k`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Cyclotomic {
    order: u32,
    terms: Vec<(u32, i64)>,
}

impl Cyclotomic {
    pub fn new(order: u32, terms: impl IntoIterator<Item = (u32, i64)>) -> Self {
        assert!(order >= 1, "cyclotomic order must be positive");
        let mut acc: Vec<(u32, i64)> = terms
            .into_iter()
            .map(|(k, c)| (k % order, c))
            .collect();
        acc.sort_unstable_by_key(|t| t.0);
        let mut terms: Vec<(u32, i64)> = Vec::with_capacity(acc.len());
        for (k, c) in acc {
            match terms.last_mut() {
                Some(last) if last.0 == k => last.1 += c,
                _ => terms.push((k, c)),
            }
        }
        terms.retain(|t| t.1 != 0);
        Cyclotomic { order, terms }
    }

    pub fn zero(order: u32) -> Self {
        Cyclotomic {
            order,
            terms: Vec::new(),
        }
    }

    pub fn from_int(order: u32, c: i64) -> Self {
        Self::new(order, [(0, c)])
    }

    /// `ζ_order^k`.
    pub fn root(order: u32, k: u32) -> Self {
        Self::new(order, [(k, 1)])
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn terms(&self) -> &[(u32, i64)] {
        &self.terms
    }

    /// Re-express in `ℤ[ζ_m]` for a multiple `m` of the current order.
    pub fn lift(&self, m: u32) -> Self {
        assert_eq!(m % self.order, 0, "{m} is not a multiple of {}", self.order);
        let f = m / self.order;
        Cyclotomic {
            order: m,
            terms: self.terms.iter().map(|&(k, c)| (k * f, c)).collect(),
        }
    }

    fn common(&self, other: &Self) -> (Self, Self) {
        if self.order == other.order {
            return (self.clone(), other.clone());
        }
        let m = self.order.lcm(&other.order);
        (self.lift(m), other.lift(m))
    }

    pub fn add(&self, other: &Self) -> Self {
        let (a, b) = self.common(other);
        Self::new(a.order, a.terms.into_iter().chain(b.terms))
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        Cyclotomic {
            order: self.order,
            terms: self.terms.iter().map(|&(k, c)| (k, -c)).collect(),
        }
    }

    pub fn scale(&self, s: i64) -> Self {
        Self::new(self.order, self.terms.iter().map(|&(k, c)| (k, c * s)))
    }

    pub fn mul(&self, other: &Self) -> Self {
        let (a, b) = self.common(other);
        let n = a.order;
        let mut dense = vec![0i64; n as usize];
        for &(i, x) in &a.terms {
            for &(j, y) in &b.terms {
                dense[((i + j) % n) as usize] += x * y;
            }
        }
        Self::from_dense(n, &dense)
    }

    /// Complex conjugate: `ζ^k ↦ ζ^{−k}`.
    pub fn conj(&self) -> Self {
        let n = self.order;
        Self::new(n, self.terms.iter().map(|&(k, c)| ((n - k) % n, c)))
    }

    pub fn from_dense(order: u32, dense: &[i64]) -> Self {
        Self::new(
            order,
            dense
                .iter()
                .enumerate()
                .filter(|(_, &c)| c != 0)
                .map(|(k, &c)| (k as u32, c)),
        )
    }

    pub fn dense(&self) -> Vec<i64> {
        let mut out = vec![0i64; self.order as usize];
        for &(k, c) in &self.terms {
            out[k as usize] += c;
        }
        out
    }

    /// Remainder modulo `Φ_n` in the power basis `1, ζ, …, ζ^{φ(n)−1}`.
    pub fn canonical(&self) -> Vec<i64> {
        reduce_dense(self.order, &self.dense())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty() || self.canonical().iter().all(|&c| c == 0)
    }

    /// The value as an integer, when it is one.
    pub fn as_integer(&self) -> Option<i64> {
        let c = self.canonical();
        if c.iter().skip(1).all(|&x| x == 0) {
            Some(c.first().copied().unwrap_or(0))
        } else {
            None
        }
    }

    pub fn to_complex(&self) -> Complex64 {
        let n = self.order as f64;
        self.terms
            .iter()
            .map(|&(k, c)| Complex64::from_polar(c as f64, std::f64::consts::TAU * k as f64 / n))
            .sum()
    }

    /// Sum of absolute coefficients; bounds `|σ(x)|` for every embedding `σ`.
    pub fn coefficient_norm(&self) -> i64 {
        self.terms.iter().map(|t| t.1.abs()).sum()
    }

    /// Lexicographic order on canonical forms of equal-order values.
    pub fn canonical_cmp(&self, other: &Self) -> Ordering {
        let (a, b) = self.common(other);
        a.canonical().cmp(&b.canonical())
    }
}

/// Reduce a dense vector in `ℤ[x]/(x^n − 1)` modulo `Φ_n`.
pub fn reduce_dense(n: u32, dense: &[i64]) -> Vec<i64> {
    let phi = cyclotomic_polynomial(n);
    let deg = phi.len() - 1;
    let nonzero: Vec<(usize, i128)> = phi[..deg]
        .iter()
        .enumerate()
        .filter(|(_, &c)| c != 0)
        .map(|(j, &c)| (j, c as i128))
        .collect();
    let mut work: Vec<i128> = dense.iter().map(|&c| c as i128).collect();
    work.resize(work.len().max(deg), 0);
    for i in (deg..work.len()).rev() {
        let c = work[i];
        if c == 0 {
            continue;
        }
        work[i] = 0;
        for &(j, p) in &nonzero {
            work[i - deg + j] -= c * p;
        }
    }
    work.truncate(deg);
    work.into_iter()
        .map(|c| i64::try_from(c).expect("cyclotomic coefficient overflow"))
        .collect()
}

impl PartialEq for Cyclotomic {
    fn eq(&self, other: &Self) -> bool {
        self.sub(other).is_zero()
    }
}

impl Eq for Cyclotomic {}

impl fmt::Display for Cyclotomic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(c) = self.as_integer() {
            return write!(f, "{c}");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|&(k, c)| format!("{c}*z{}^{k}", self.order))
            .collect();
        write!(f, "{}", parts.join("+"))
    }
}

/// A rational multiple of a cyclotomic integer, `num / den` with `den > 0`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CycloRational {
    num: Cyclotomic,
    den: i64,
}

impl CycloRational {
    pub fn new(num: Cyclotomic, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        let (num, den) = if den < 0 { (num.neg(), -den) } else { (num, den) };
        let g = num
            .terms
            .iter()
            .fold(den, |g, &(_, c)| g.gcd(&c));
        if g > 1 {
            let terms = num.terms.iter().map(|&(k, c)| (k, c / g)).collect();
            CycloRational {
                num: Cyclotomic {
                    order: num.order,
                    terms,
                },
                den: den / g,
            }
        } else {
            CycloRational { num, den }
        }
    }

    pub fn from_cyclotomic(num: Cyclotomic) -> Self {
        CycloRational { num, den: 1 }
    }

    pub fn from_ratio(order: u32, r: Ratio<i64>) -> Self {
        Self::new(Cyclotomic::from_int(order, *r.numer()), *r.denom())
    }

    pub fn zero(order: u32) -> Self {
        Self::from_cyclotomic(Cyclotomic::zero(order))
    }

    pub fn one(order: u32) -> Self {
        Self::from_cyclotomic(Cyclotomic::from_int(order, 1))
    }

    pub fn numerator(&self) -> &Cyclotomic {
        &self.num
    }

    pub fn denominator(&self) -> i64 {
        self.den
    }

    pub fn order(&self) -> u32 {
        self.num.order
    }

    pub fn add(&self, other: &Self) -> Self {
        let l = self.den.lcm(&other.den);
        let a = self.num.scale(l / self.den);
        let b = other.num.scale(l / other.den);
        Self::new(a.add(&b), l)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        CycloRational {
            num: self.num.neg(),
            den: self.den,
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self::new(self.num.mul(&other.num), self.den * other.den)
    }

    pub fn scale(&self, r: Ratio<i64>) -> Self {
        Self::new(self.num.scale(*r.numer()), self.den * r.denom())
    }

    pub fn conj(&self) -> Self {
        CycloRational {
            num: self.num.conj(),
            den: self.den,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn as_rational(&self) -> Option<Ratio<i64>> {
        self.num.as_integer().map(|n| Ratio::new(n, self.den))
    }

    pub fn to_complex(&self) -> Complex64 {
        self.num.to_complex() / self.den as f64
    }
}

impl PartialEq for CycloRational {
    fn eq(&self, other: &Self) -> bool {
        self.sub(other).is_zero()
    }
}

impl Eq for CycloRational {}

impl fmt::Display for CycloRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.as_rational() {
            Some(r) if *r.denom() == 1 => write!(f, "{}", r.numer()),
            Some(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            None if self.den == 1 => write!(f, "{}", self.num),
            None => write!(f, "({})/{}", self.num, self.den),
        }
    }
}
