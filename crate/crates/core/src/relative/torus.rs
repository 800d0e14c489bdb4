//! Finite `SL_d(ℤ)`-orbits of rational points on the torus and the invariant
//! traces on `ℤ^d` they define through exponential sums.

use std::collections::HashMap;
use std::fmt::Write as _;

use num_complex::Complex64;
use num_rational::Ratio;
use num_traits::Signed;
use serde::{Deserialize, Serialize};

use crate::cyclo::{CycloRational, Cyclotomic};
use crate::error::{Error, Result};
use crate::group::IntMatrix;
use crate::modp;
use crate::ops::GroupOps;
use crate::trace::{is_trace_on, TraceReport};

/// Default cap on the number of torus points visited.
pub const ORBIT_BUDGET: usize = 2_000_000;
/// Exponential sums are exact for denominators up to this bound.
pub const EXACT_DENOMINATOR_LIMIT: u32 = 64;

/// Points `x/q ∈ (ℚ/ℤ)^d`, stored as numerators in `[0, q)`, closed under the
/// generators. Points are listed in breadth-first order from the seed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RationalOrbit {
    pub d: usize,
    pub q: u32,
    pub points: Vec<Vec<u32>>,
}

impl RationalOrbit {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains(&self, x: &[u32]) -> bool {
        self.points.iter().any(|p| p == x)
    }
}

fn act(m: &IntMatrix, x: &[u32], q: u32) -> Vec<u32> {
    let v: Vec<i64> = x.iter().map(|&c| c as i64).collect();
    m.apply(&v).into_iter().map(|c| c.rem_euclid(q as i64) as u32).collect()
}

/// Orbit of `v/q` under the generator matrices acting by `x ↦ γx mod 1`.
pub fn orbit(v: &[u32], q: u32, generators: &[IntMatrix], budget: usize) -> Result<RationalOrbit> {
    if q == 0 {
        return Err(Error::Precondition("denominator must be positive".into()));
    }
    let d = v.len();
    if generators.iter().any(|g| g.dim() != d) {
        return Err(Error::Mismatch("generator dimension differs from the point dimension".into()));
    }
    let start: Vec<u32> = v.iter().map(|&c| c % q).collect();
    let mut seen: HashMap<Vec<u32>, ()> = HashMap::from([(start.clone(), ())]);
    let mut points = vec![start];
    let mut head = 0;
    while head < points.len() {
        for g in generators {
            let y = act(g, &points[head], q);
            if seen.insert(y.clone(), ()).is_none() {
                if points.len() >= budget {
                    return Err(Error::BudgetExceeded {
                        what: "orbit size",
                        actual: points.len() as u64 + 1,
                        limit: budget as u64,
                    });
                }
                points.push(y);
            }
        }
        head += 1;
    }
    Ok(RationalOrbit { d, q, points })
}

/// All orbits of points of exact denominator `q`, seeded in lexicographic order.
pub fn orbits_of_denominator(d: usize, q: u32, generators: &[IntMatrix], budget: usize) -> Result<Vec<RationalOrbit>> {
    let total = (q as u128).pow(d as u32);
    if total > budget as u128 {
        return Err(Error::BudgetExceeded {
            what: "torus points of the given denominator",
            actual: total.min(u64::MAX as u128) as u64,
            limit: budget as u64,
        });
    }
    let mut visited: HashMap<Vec<u32>, ()> = HashMap::new();
    let mut out = Vec::new();
    let mut x = vec![0u32; d];
    loop {
        let g = x.iter().fold(q as u64, |acc, &c| modp::gcd(acc, c as u64));
        if g == 1 && !visited.contains_key(&x) {
            let o = orbit(&x, q, generators, budget)?;
            for p in &o.points {
                visited.insert(p.clone(), ());
            }
            out.push(o);
        }
        // next point in lexicographic order
        let mut k = d;
        loop {
            if k == 0 {
                return Ok(out);
            }
            k -= 1;
            x[k] += 1;
            if x[k] < q {
                break;
            }
            x[k] = 0;
        }
        if d == 0 {
            return Ok(out);
        }
    }
}

/// The additive group `ℤ^d`.
#[derive(Clone, Copy, Debug)]
pub struct Lattice {
    pub d: usize,
}

impl GroupOps for Lattice {
    type Elem = Vec<i64>;

    fn mul(&self, a: &Vec<i64>, b: &Vec<i64>) -> Vec<i64> {
        a.iter().zip(b).map(|(x, y)| x + y).collect()
    }

    fn inv(&self, a: &Vec<i64>) -> Vec<i64> {
        a.iter().map(|x| -x).collect()
    }

    fn identity(&self) -> Vec<i64> {
        vec![0; self.d]
    }
}

/// `φ(m) = (1/|O|) Σ_{x∈O} exp(2πi⟨x, m⟩)` on `ℤ^d`.
#[derive(Clone, Debug)]
pub struct TorusTrace {
    orbit: RationalOrbit,
}

pub fn orbit_trace(o: &RationalOrbit) -> Result<TorusTrace> {
    if o.is_empty() {
        return Err(Error::Precondition("empty orbit".into()));
    }
    Ok(TorusTrace { orbit: o.clone() })
}

impl TorusTrace {
    pub fn orbit(&self) -> &RationalOrbit {
        &self.orbit
    }

    fn exponent_counts(&self, m: &[i64]) -> Vec<i64> {
        let q = self.orbit.q as i64;
        let mut counts = vec![0i64; q as usize];
        for x in &self.orbit.points {
            let k: i64 = x.iter().zip(m).map(|(&a, &b)| a as i64 * b.rem_euclid(q)).sum();
            counts[k.rem_euclid(q) as usize] += 1;
        }
        counts
    }

    /// Exact value in `ℚ(ζ_q)` for `q ≤ 64`.
    pub fn eval_exact(&self, m: &[i64]) -> Option<CycloRational> {
        let q = self.orbit.q;
        if q > EXACT_DENOMINATOR_LIMIT || m.len() != self.orbit.d {
            return None;
        }
        let num = Cyclotomic::from_dense(q, &self.exponent_counts(m));
        Some(CycloRational::new(num, self.orbit.len() as i64))
    }

    pub fn eval(&self, m: &[i64]) -> Complex64 {
        if let Some(v) = self.eval_exact(m) {
            return v.to_complex();
        }
        let q = self.orbit.q as f64;
        let counts = self.exponent_counts(m);
        let s: Complex64 = counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(k, &c)| Complex64::from_polar(c as f64, std::f64::consts::TAU * k as f64 / q))
            .sum();
        s / self.orbit.len() as f64
    }

    /// Bound on the floating error of [`TorusTrace::eval`] beyond the exact range.
    pub fn float_error_bound(&self) -> f64 {
        if self.orbit.q <= EXACT_DENOMINATOR_LIMIT {
            0.0
        } else {
            4.0 * f64::EPSILON * self.orbit.q as f64
        }
    }

    /// Gram test on the ball `‖m‖_∞ ≤ radius`.
    pub fn check_on_ball(&self, radius: i64) -> Result<TraceReport> {
        let ball = lattice_ball(self.orbit.d, radius);
        is_trace_on(&Lattice { d: self.orbit.d }, &ball, |m| Some(self.eval(m)), 1e-10)
    }

    /// `φ(γᵀ m) = φ(m)` for every generator and every `m` in the ball, exactly
    /// when the values are exact.
    pub fn invariant_on_ball(&self, generators: &[IntMatrix], radius: i64) -> bool {
        let ball = lattice_ball(self.orbit.d, radius);
        generators.iter().all(|g| {
            let t = g.transpose();
            ball.iter().all(|m| {
                let img = t.apply(m);
                match (self.eval_exact(m), self.eval_exact(&img)) {
                    (Some(a), Some(b)) => a == b,
                    _ => (self.eval(m) - self.eval(&img)).norm() <= self.float_error_bound().max(1e-12),
                }
            })
        })
    }
}

/// `{m ∈ ℤ^d : ‖m‖_∞ ≤ radius}` in lexicographic order.
pub fn lattice_ball(d: usize, radius: i64) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..d {
        out = out
            .into_iter()
            .flat_map(|v| {
                (-radius..=radius).map(move |c| {
                    let mut w = v.clone();
                    w.push(c);
                    w
                })
            })
            .collect();
    }
    out
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OrbitSummary {
    pub id: usize,
    pub size: usize,
    pub representative: Vec<u32>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TorusValue {
    pub q: u32,
    pub orbit_id: usize,
    pub orbit_size: usize,
    pub m: Vec<i64>,
    /// `φ(m)` when it is rational.
    pub exact: Option<Ratio<i64>>,
    pub value: [f64; 2],
    pub abs_exact: Option<Ratio<i64>>,
    pub abs: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TorusRow {
    pub q: u32,
    /// `q = 1`: only the zero orbit, whose trace is constant.
    pub trivial_denominator: bool,
    pub orbits: Vec<OrbitSummary>,
    pub max_abs: f64,
    pub max_abs_exact: Option<Ratio<i64>>,
    pub argmax: Vec<i64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TorusScan {
    pub d: usize,
    pub radius: i64,
    /// `d ≥ 3`; smaller dimensions are reported without the limit statement.
    pub covered: bool,
    pub rows: Vec<TorusRow>,
    pub values: Vec<TorusValue>,
}

/// For each `q`: all orbits of exact denominator `q` and the values `|φ(m)|`
/// over `0 < ‖m‖_∞ ≤ radius`, `m ≢ 0 (mod q)` (all nonzero `m` when `q = 1`).
pub fn torus_limit_scan(d: usize, denominators: &[u32], radius: i64, budget: usize) -> Result<TorusScan> {
    if d == 0 {
        return Err(Error::Precondition("dimension must be positive".into()));
    }
    let gens: Vec<IntMatrix> = crate::group::IntegerMatrixElement::elementary_generators(d)
        .iter()
        .map(|g| g.matrix().clone())
        .collect();
    let ball = lattice_ball(d, radius);
    let mut rows = Vec::new();
    let mut values = Vec::new();
    for &q in denominators {
        let orbits = orbits_of_denominator(d, q, &gens, budget)?;
        let probes: Vec<&Vec<i64>> = ball
            .iter()
            .filter(|m| m.iter().any(|&c| c != 0))
            .filter(|m| q == 1 || m.iter().any(|&c| c.rem_euclid(q as i64) != 0))
            .collect();
        let mut best: Option<(f64, Option<Ratio<i64>>, Vec<i64>)> = None;
        let mut summaries = Vec::new();
        for (id, o) in orbits.iter().enumerate() {
            summaries.push(OrbitSummary { id, size: o.len(), representative: o.points[0].clone() });
            let t = orbit_trace(o)?;
            for m in &probes {
                let signed = t.eval_exact(m).and_then(|v| v.as_rational());
                let exact = signed.map(|r| r.abs());
                let z = t.eval(m);
                let abs = match &exact {
                    Some(r) => *r.numer() as f64 / *r.denom() as f64,
                    None => z.norm(),
                };
                let better = match &best {
                    None => true,
                    Some((b, be, _)) => match (&exact, be) {
                        (Some(x), Some(y)) => x > y,
                        _ => abs > *b,
                    },
                };
                if better {
                    best = Some((abs, exact, (*m).clone()));
                }
                values.push(TorusValue {
                    q,
                    orbit_id: id,
                    orbit_size: o.len(),
                    m: (*m).clone(),
                    exact: signed,
                    value: [z.re, z.im],
                    abs_exact: exact,
                    abs,
                });
            }
        }
        let (max_abs, max_abs_exact, argmax) = best.unwrap_or((0.0, None, Vec::new()));
        rows.push(TorusRow {
            q,
            trivial_denominator: q == 1,
            orbits: summaries,
            max_abs,
            max_abs_exact,
            argmax,
        });
    }
    Ok(TorusScan { d, radius, covered: d >= 3, rows, values })
}

impl TorusScan {
    /// `q,orbit_id,orbit_size,m,phi,abs_phi` with `m` space-separated, exact
    /// values written as reduced fractions and inexact `φ(m)` as `re im`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("q,orbit_id,orbit_size,m,phi,abs_phi\n");
        for v in &self.values {
            let m: Vec<String> = v.m.iter().map(i64::to_string).collect();
            let phi = match &v.exact {
                Some(r) => fraction(r),
                None => format!("{:.17e} {:.17e}", v.value[0], v.value[1]),
            };
            let abs = match &v.abs_exact {
                Some(r) => fraction(r),
                None => format!("{:.17e}", v.abs),
            };
            let _ = writeln!(s, "{},{},{},{},{},{}", v.q, v.orbit_id, v.orbit_size, m.join(" "), phi, abs);
        }
        s
    }
}

fn fraction(r: &Ratio<i64>) -> String {
    if *r.denom() == 1 {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::IntegerMatrixElement;

    fn gens(d: usize) -> Vec<IntMatrix> {
        IntegerMatrixElement::elementary_generators(d).iter().map(|g| g.matrix().clone()).collect()
    }

    #[test]
    fn orbit_examples() {
        let g = gens(3);
        assert_eq!(orbit(&[0, 0, 0], 5, &g, ORBIT_BUDGET).unwrap().len(), 1);
        let two = orbit(&[1, 0, 0], 2, &g, ORBIT_BUDGET).unwrap();
        assert_eq!(two.len(), 7);
        assert!(!two.contains(&[0, 0, 0]));
        for q in [3u32, 5, 7] {
            assert_eq!(orbit(&[1, 0, 0], q, &g, ORBIT_BUDGET).unwrap().len() as u32, q.pow(3) - 1);
        }
        assert!(orbit(&[1, 0, 0], 7, &g, 10).unwrap_err().is_budget());
    }

    #[test]
    fn orbit_trace_values() {
        let g = gens(3);
        let zero = orbit_trace(&orbit(&[0, 0, 0], 1, &g, ORBIT_BUDGET).unwrap()).unwrap();
        assert_eq!(zero.eval_exact(&[3, -1, 2]).unwrap().as_rational(), Some(Ratio::from_integer(1)));
        let two = orbit_trace(&orbit(&[1, 0, 0], 2, &g, ORBIT_BUDGET).unwrap()).unwrap();
        assert_eq!(two.eval_exact(&[1, 0, 0]).unwrap().as_rational(), Some(Ratio::new(-1, 7)));
        let five = orbit_trace(&orbit(&[1, 0, 0], 5, &g, ORBIT_BUDGET).unwrap()).unwrap();
        assert_eq!(five.eval_exact(&[2, 1, -1]).unwrap().as_rational(), Some(Ratio::new(-1, 124)));
        assert!(five.check_on_ball(1).unwrap().passes());
        assert!(five.invariant_on_ball(&g, 1));
    }

    #[test]
    fn composite_denominators_split_by_exact_denominator() {
        let g = gens(2);
        // primitive vectors mod 4: 16 - 4 = 12, a single orbit
        let o = orbits_of_denominator(2, 4, &g, ORBIT_BUDGET).unwrap();
        assert_eq!(o.len(), 1);
        assert_eq!(o[0].len(), 12);
    }

    #[test]
    fn scan_examples() {
        let s = torus_limit_scan(3, &[1, 2, 3], 2, ORBIT_BUDGET).unwrap();
        assert!(s.covered);
        assert!(s.rows[0].trivial_denominator);
        assert_eq!(s.rows[0].max_abs_exact, Some(Ratio::from_integer(1)));
        assert_eq!(s.rows[1].max_abs_exact, Some(Ratio::new(1, 7)));
        assert_eq!(s.rows[2].max_abs_exact, Some(Ratio::new(1, 26)));
        let csv = s.to_csv();
        assert!(csv.starts_with("q,orbit_id,orbit_size,m,phi,abs_phi\n"));
        assert!(csv.contains("\n2,0,7,-2 -2 -1,-1/7,1/7\n"));
        assert!(!torus_limit_scan(2, &[3], 1, ORBIT_BUDGET).unwrap().covered);
    }
}
