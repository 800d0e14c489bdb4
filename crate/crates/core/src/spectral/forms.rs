//! Trace-side quadratic forms on test vectors supported on a finite point set.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::GroupAlgebraElement;
use crate::error::{Error, Result};
use crate::linalg::{self, CMat, CVec};
use crate::ops::GroupOps;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FormKind {
    /// `x ↦ φ(x* b x)`.
    Left,
    /// `x ↦ Σ_γ b_γ φ(γ* x* γ x)`, paired with the `|φ(x)|²` correction.
    Conjugation,
}

/// Hermitian forms `K`, `M` and the vector `f` on `ℂ^points`, with
/// `x*Kx = φ(x*x)`, `x*Mx` the `b`-weighted form and `f*x = φ(x)`.
#[derive(Clone, Debug)]
pub struct Forms {
    pub kind: FormKind,
    pub k: CMat,
    pub m: CMat,
    pub f: CVec,
}

pub fn quadratic_forms<G: GroupOps>(
    ops: &G,
    points: &[G::Elem],
    b: &GroupAlgebraElement<G::Elem>,
    kind: FormKind,
    eval: impl Fn(&G::Elem) -> Option<Complex64> + Sync,
) -> Result<Forms>
where
    G: Sync,
    G::Elem: Send + Sync,
{
    use rayon::prelude::*;
    let n = points.len();
    let missing = |x: &G::Elem| Error::Precondition(format!("trace undefined at {x:?}"));
    let inverses: Vec<G::Elem> = points.iter().map(|p| ops.inv(p)).collect();
    let terms: Vec<(G::Elem, Complex64)> = b.terms().map(|(g, c)| (g.clone(), c)).collect();
    let rows: Vec<Result<(Vec<Complex64>, Vec<Complex64>)>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut krow = Vec::with_capacity(n);
            let mut mrow = Vec::with_capacity(n);
            for p in points {
                let x = ops.mul(&inverses[i], p);
                krow.push(eval(&x).ok_or_else(|| missing(&x))?);
                let mut s = Complex64::new(0.0, 0.0);
                for (g, c) in &terms {
                    let y = match kind {
                        FormKind::Left => ops.mul(&ops.mul(&inverses[i], g), p),
                        FormKind::Conjugation => {
                            let gi = ops.inv(g);
                            ops.mul(&ops.mul(&ops.mul(&gi, &inverses[i]), g), p)
                        }
                    };
                    s += c * eval(&y).ok_or_else(|| missing(&y))?;
                }
                mrow.push(s);
            }
            Ok((krow, mrow))
        })
        .collect();
    let mut k = CMat::zeros(n, n);
    let mut m = CMat::zeros(n, n);
    for (i, r) in rows.into_iter().enumerate() {
        let (kr, mr) = r?;
        for j in 0..n {
            k[(i, j)] = kr[j];
            m[(i, j)] = mr[j];
        }
    }
    let f = CVec::from_iterator(
        n,
        points
            .iter()
            .map(|p| eval(p).map(|z| z.conj()).ok_or_else(|| missing(p)))
            .collect::<Result<Vec<_>>>()?,
    );
    Ok(Forms { kind, k, m, f })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub vector: String,
    pub residual: f64,
}

/// Outcome of the inequality side at one `β`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SideResult {
    pub beta: f64,
    pub worst_residual: f64,
    pub violations: Vec<Violation>,
    pub tested: usize,
}

const MAX_REPORTED: usize = 5;

struct Sample {
    label: String,
    mx: f64,
    kx: f64,
    fx: f64,
}

impl Forms {
    fn correction(&self) -> f64 {
        match self.kind {
            FormKind::Left => 0.0,
            FormKind::Conjugation => 1.0,
        }
    }

    /// `D(β) = M − βK − c(1−β) ff*` with `c = 1` for the conjugation form.
    pub fn defect(&self, beta: f64) -> CMat {
        let c = self.correction() * (1.0 - beta);
        &self.m - &self.k * Complex64::new(beta, 0.0) - (&self.f * self.f.adjoint()) * Complex64::new(c, 0.0)
    }

    /// Largest eigenvalue of the Hermitian part of `D(β)` (unnormalized test
    /// vectors of unit ℓ² norm).
    pub fn max_defect_eigenvalue(&self, beta: f64) -> f64 {
        linalg::max_hermitian_eigenvalue(&self.defect(beta))
    }

    fn residual(&self, s: &Sample, beta: f64) -> f64 {
        let r = s.mx - beta * s.kx - self.correction() * (1.0 - beta) * s.fx;
        if s.kx > 1e-12 {
            r / s.kx
        } else {
            r
        }
    }

    fn sample(&self, label: String, x: &CVec) -> Sample {
        Sample {
            label,
            mx: x.dotc(&(&self.m * x)).re,
            kx: x.dotc(&(&self.k * x)).re,
            fx: self.f.dotc(x).norm_sqr(),
        }
    }

    /// Evaluates the inequality `residual ≤ tol` for every `β` over the standard
    /// basis, pairwise sums and differences, `random` seeded random vectors and
    /// the extremal vector of the form on a pivot basis of `K`.
    pub fn inequality_side(&self, betas: &[f64], random: usize, seed: u64, tol: f64) -> Vec<SideResult> {
        let n = self.k.nrows();
        let mut samples: Vec<Sample> = Vec::new();
        for i in 0..n {
            samples.push(Sample {
                label: format!("e{i}"),
                mx: self.m[(i, i)].re,
                kx: self.k[(i, i)].re,
                fx: self.f[i].norm_sqr(),
            });
        }
        for i in 0..n {
            for j in i + 1..n {
                for (sign, tag) in [(1.0, '+'), (-1.0, '-')] {
                    let s = Complex64::new(sign, 0.0);
                    samples.push(Sample {
                        label: format!("e{i}{tag}e{j}"),
                        mx: (self.m[(i, i)] + self.m[(j, j)] + s * (self.m[(i, j)] + self.m[(j, i)])).re,
                        kx: (self.k[(i, i)] + self.k[(j, j)] + s * (self.k[(i, j)] + self.k[(j, i)])).re,
                        fx: (self.f[i].conj() + s * self.f[j].conj()).norm_sqr(),
                    });
                }
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for r in 0..random {
            let x = CVec::from_fn(n, |_, _| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
            samples.push(self.sample(format!("random{r}"), &x));
        }
        let (pivots, _) = linalg::pivoted_cholesky(&self.k, 1e-10);
        let chol = if pivots.is_empty() {
            None
        } else {
            let kq = CMat::from_fn(pivots.len(), pivots.len(), |a, b| self.k[(pivots[a], pivots[b])]);
            nalgebra::Cholesky::new(kq).map(|c| c.l())
        };
        betas
            .iter()
            .map(|&beta| {
                let mut extra = Vec::new();
                if let Some(l) = &chol {
                    let d = self.defect(beta);
                    let dq = CMat::from_fn(pivots.len(), pivots.len(), |a, b| d[(pivots[a], pivots[b])]);
                    let li = l.solve_lower_triangular(&CMat::identity(l.nrows(), l.nrows())).expect("invertible");
                    let w = &li * dq * li.adjoint();
                    let (vals, vecs) = linalg::hermitian_eigen(&w);
                    if let Some(last) = vals.len().checked_sub(1) {
                        let xq = li.adjoint() * vecs.column(last);
                        let mut x = CVec::zeros(n);
                        for (a, &p) in pivots.iter().enumerate() {
                            x[p] = xq[a];
                        }
                        extra.push(self.sample("witness".into(), &x));
                    }
                }
                let mut worst = f64::NEG_INFINITY;
                let mut violations = Vec::new();
                for s in samples.iter().chain(&extra) {
                    let r = self.residual(s, beta);
                    worst = worst.max(r);
                    if r > tol && violations.len() < MAX_REPORTED {
                        violations.push(Violation { vector: s.label.clone(), residual: r });
                    }
                }
                SideResult {
                    beta,
                    worst_residual: worst,
                    violations,
                    tested: samples.len() + extra.len(),
                }
            })
            .collect()
    }
}
