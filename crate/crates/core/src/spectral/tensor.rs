use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{check_element, CheckOptions, GroupAlgebraElement};
use crate::error::{Error, Result};
use crate::gns::GnsModel;
use crate::linalg::{self, CMat, CVec};

/// Largest GNS dimension for which `π ⊗ π*` is formed densely.
pub const TENSOR_DIM_LIMIT: usize = 40;
const FAMILY_SIZE: usize = 3;
const FAMILY_SUPPORT: usize = 4;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TensorBetaCheck {
    pub beta: f64,
    /// `‖(π⊗π*)(a)|Id^⊥‖ ≤ √β`.
    pub hypothesis: bool,
    /// Largest `lhs − rhs` with `rhs = (1−β)(Σ‖x_i‖₁‖y_i‖₁)² / n³`.
    pub worst_margin_cubic: f64,
    /// Same with the bound `(1−β)(Σ‖x_i‖₁‖y_i‖₁)² / n` obtained from the unit vector `Id/√n`.
    pub worst_margin_unit: f64,
    /// Implication holds on every sampled family (vacuous without the hypothesis).
    pub implication_holds: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TensorReport {
    pub dim: usize,
    pub full_norm: f64,
    /// Norm on the orthocomplement of `Id` (zero when `dim = 1`).
    pub restricted_norm: f64,
    /// Dimension of the `(π⊗π*)(a)`-fixed space, i.e. of the commutant when `a` generates.
    pub fixed_dim: usize,
    /// Deviation between `‖w‖²` from matrices and from `Σ φ(x_j*x_i) φ̄(y_j*y_i)`.
    pub norm_w_error: f64,
    /// Deviation between `⟨(π⊗π*)(γ)w, w⟩` from matrices and from traces.
    pub norm_pi_tensor_error: f64,
    pub families: usize,
    pub betas: Vec<TensorBetaCheck>,
}

fn conj_mat(m: &CMat) -> CMat {
    m.map(|z| z.conj())
}

/// `(π⊗π*)(γ)` acting on column-major `vec(T)` as `T ↦ π(γ) T π(γ)*`.
fn tensor_of(p: &CMat) -> CMat {
    conj_mat(p).kronecker(p)
}

struct Family {
    xs: Vec<Vec<(usize, Complex64)>>,
    ys: Vec<Vec<(usize, Complex64)>>,
}

impl Family {
    fn l1_bound(&self) -> f64 {
        self.xs
            .iter()
            .zip(&self.ys)
            .map(|(x, y)| x.iter().map(|t| t.1.norm()).sum::<f64>() * y.iter().map(|t| t.1.norm()).sum::<f64>())
            .sum()
    }
}

fn random_element(rng: &mut ChaCha8Rng, order: usize) -> Vec<(usize, Complex64)> {
    (0..FAMILY_SUPPORT)
        .map(|_| {
            (
                rng.random_range(0..order),
                Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
            )
        })
        .collect()
}

/// `(π⊗π*)(a)` norms against the trace formulas for `‖w‖²` and
/// `‖(π⊗π*)(a)w‖²`, and the finite-dimensional one-way bound.
pub fn norm_tensor(
    model: &GnsModel,
    a: &GroupAlgebraElement<usize>,
    betas: &[f64],
    opts: &CheckOptions,
) -> Result<TensorReport> {
    let n = model.dim();
    if n > TENSOR_DIM_LIMIT {
        return Err(Error::BudgetExceeded {
            what: "GNS dimension for the dense tensor representation",
            actual: n as u64,
            limit: TENSOR_DIM_LIMIT as u64,
        });
    }
    let terms = check_element(model, a)?;
    let group = model.group();
    let order = group.order();
    let nn = n * n;
    let mut t = CMat::zeros(nn, nn);
    for &(g, c) in &terms {
        t += tensor_of(&model.pi(g)) * c;
    }
    let full_norm = linalg::operator_norm(&t);
    let mut id = CVec::zeros(nn);
    for i in 0..n {
        id[i * n + i] = Complex64::new(1.0 / (n as f64).sqrt(), 0.0);
    }
    let q = CMat::identity(nn, nn) - &id * id.adjoint();
    let restricted_norm = if n == 1 { 0.0 } else { linalg::operator_norm(&(&t * q)) };
    let fixed_dim = linalg::null_space(&(&t - CMat::identity(nn, nn)), 1e-9).ncols();

    let b = a.star_square(group.as_ref());
    let b_terms: Vec<(usize, Complex64)> = b.terms().map(|(g, c)| (*g, c)).collect();
    let phi = |g: usize| model.value(g);
    // φ(x* γ x') for sparse x, x'
    let pair = |x: &[(usize, Complex64)], gamma: usize, y: &[(usize, Complex64)]| -> Complex64 {
        let mut s = Complex64::new(0.0, 0.0);
        for &(g, cg) in x {
            let left = group.mul(group.inv(g), gamma);
            for &(h, ch) in y {
                s += cg.conj() * ch * phi(group.mul(left, h));
            }
        }
        s
    };
    let vec_of = |x: &[(usize, Complex64)]| -> CVec {
        let mut full = vec![Complex64::new(0.0, 0.0); order];
        for &(g, c) in x {
            full[g] += c;
        }
        model.vector_of(&full)
    };
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let families = opts.random_vectors.clamp(1, 200);
    let mut norm_w_error: f64 = 0.0;
    let mut norm_pi_tensor_error: f64 = 0.0;
    let mut samples: Vec<(f64, f64, f64)> = Vec::with_capacity(families);
    let gens = group.generators().to_vec();
    let gen_tensors: Vec<CMat> = gens.iter().map(|&g| tensor_of(&model.pi(g))).collect();
    for _ in 0..families {
        let k = rng.random_range(1..=FAMILY_SIZE);
        let fam = Family {
            xs: (0..k).map(|_| random_element(&mut rng, order)).collect(),
            ys: (0..k).map(|_| random_element(&mut rng, order)).collect(),
        };
        // w = Σ π(x_i)v ⊗ conj(π(y_i)v), i.e. the operator Σ u_i w_i*
        let mut w = CVec::zeros(nn);
        for (x, y) in fam.xs.iter().zip(&fam.ys) {
            let u = vec_of(x);
            let z = vec_of(y);
            w += conj_mat(&CMat::from_column_slice(n, 1, z.as_slice())).kronecker(&CMat::from_column_slice(n, 1, u.as_slice())).column(0);
        }
        let mut w2 = Complex64::new(0.0, 0.0);
        let mut tw2 = Complex64::new(0.0, 0.0);
        for i in 0..k {
            for j in 0..k {
                w2 += pair(&fam.xs[j], 0, &fam.xs[i]) * pair(&fam.ys[j], 0, &fam.ys[i]).conj();
                for &(g, c) in &b_terms {
                    tw2 += c * pair(&fam.xs[j], g, &fam.xs[i]) * pair(&fam.ys[j], g, &fam.ys[i]).conj();
                }
            }
        }
        norm_w_error = norm_w_error.max((w2 - w.norm_squared()).norm());
        norm_w_error = norm_w_error.max(w2.im.abs());
        let tw = &t * &w;
        norm_pi_tensor_error = norm_pi_tensor_error.max((tw2 - tw.norm_squared()).norm());
        for (&g, m) in gens.iter().zip(&gen_tensors) {
            let mut s = Complex64::new(0.0, 0.0);
            for i in 0..k {
                for j in 0..k {
                    s += pair(&fam.xs[j], g, &fam.xs[i]) * pair(&fam.ys[j], g, &fam.ys[i]).conj();
                }
            }
            norm_pi_tensor_error = norm_pi_tensor_error.max((s - w.dotc(&(m * &w))).norm());
        }
        samples.push((tw2.re, w2.re, fam.l1_bound()));
    }
    let tol = opts.tol;
    let checks = betas
        .iter()
        .map(|&beta| {
            let hypothesis = restricted_norm * restricted_norm <= beta + tol;
            let nf = n as f64;
            let mut cubic = f64::NEG_INFINITY;
            let mut unit = f64::NEG_INFINITY;
            for &(tw2, w2, l1) in &samples {
                let lhs = tw2 - beta * w2;
                cubic = cubic.max(lhs - (1.0 - beta) * l1 * l1 / nf.powi(3));
                unit = unit.max(lhs - (1.0 - beta) * l1 * l1 / nf);
            }
            TensorBetaCheck {
                beta,
                hypothesis,
                worst_margin_cubic: cubic,
                worst_margin_unit: unit,
                implication_holds: !hypothesis || cubic <= tol,
            }
        })
        .collect();
    Ok(TensorReport {
        dim: n,
        full_norm,
        restricted_norm,
        fixed_dim,
        norm_w_error,
        norm_pi_tensor_error,
        families,
        betas: checks,
    })
}
