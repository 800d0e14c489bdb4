use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{GnsModel, RANK_TOL};
use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::trace::{ClassValues, Trace};

/// Above this dimension commutants are not formed as explicit `n² × n²` systems.
pub const DENSE_COMMUTANT_LIMIT: usize = 24;
const PROJECTION_TOL: f64 = 1e-8;
const MAX_DRAWS: u64 = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CenterRoute {
    /// Commutant and bicommutant solved as linear systems.
    Commutant,
    /// Centre spanned by the images of class sums.
    ClassSums,
}

#[derive(Clone, Debug)]
pub struct CenterData {
    pub route: CenterRoute,
    /// Basis of `π(G)′` (dense route only).
    pub commutant: Option<Vec<CMat>>,
    /// Basis of `M = π(G)″` (dense route only).
    pub algebra: Option<Vec<CMat>>,
    pub center: Vec<CMat>,
    pub projections: Vec<CMat>,
}

impl CenterData {
    pub fn center_dim(&self) -> usize {
        self.center.len()
    }

    pub fn commutant_dim(&self) -> Option<usize> {
        self.commutant.as_ref().map(Vec::len)
    }

    pub fn algebra_dim(&self) -> Option<usize> {
        self.algebra.as_ref().map(Vec::len)
    }
}

fn unvec(x: &[Complex64], n: usize) -> CMat {
    CMat::from_column_slice(n, n, x)
}

fn columns_to_mats(basis: &CMat, n: usize) -> Vec<CMat> {
    (0..basis.ncols())
        .map(|c| unvec(basis.column(c).as_slice(), n))
        .collect()
}

/// `π(K_j)` for every conjugacy class `j`, where `K_j` is the class sum.
pub fn class_sum_images(model: &GnsModel) -> Result<Vec<CMat>> {
    let coords = model.full_coordinates()?;
    let group = model.group();
    let classes = group.classes();
    let r = model.dim();
    let mut sums = vec![CMat::zeros(r, r); classes.len()];
    for g in 0..group.order() {
        let j = classes.class_of(g);
        for (b, &p) in model.pivots().iter().enumerate() {
            let col = coords.column(group.mul(g, p));
            let mut target = sums[j].column_mut(b);
            target += col;
        }
    }
    Ok(sums.into_iter().map(|s| s * &model.r_inv).collect())
}

fn dense_commutant(model: &GnsModel) -> CMat {
    let blocks: Vec<CMat> = model
        .pi_generators()
        .iter()
        .map(linalg::commutator_operator)
        .collect();
    let n = model.dim();
    if blocks.is_empty() {
        return CMat::identity(n * n, n * n);
    }
    linalg::common_null_space(&blocks, RANK_TOL)
}

/// Commutant, bicommutant and centre of the GNS algebra, with its minimal
/// central projections.
pub fn center(model: &GnsModel) -> Result<CenterData> {
    let n = model.dim();
    let sums = class_sum_images(model)?;
    let mut data = if n <= DENSE_COMMUTANT_LIMIT {
        let commutant = columns_to_mats(&dense_commutant(model), n);
        // M is the span of π(g) over the finite group
        let group = model.group();
        let mut span = CMat::zeros(n * n, group.order());
        for g in 0..group.order() {
            span.set_column(g, &CMat::from_column_slice(n * n, 1, model.pi(g).as_slice()).column(0));
        }
        let m_basis = linalg::range_basis(&span, RANK_TOL);
        let keep = m_basis.ncols();
        // Z = elements of M commuting with every π(g)
        let mut eqs = CMat::zeros(n * n * model.pi_generators().len(), keep);
        for (k, p) in model.pi_generators().iter().enumerate() {
            let block = linalg::commutator_operator(p) * &m_basis;
            eqs.view_mut((k * n * n, 0), (n * n, keep)).copy_from(&block);
        }
        let coeffs = if model.pi_generators().is_empty() {
            CMat::identity(keep, keep)
        } else {
            linalg::null_space(&eqs, RANK_TOL)
        };
        let z_basis = &m_basis * coeffs;
        CenterData {
            route: CenterRoute::Commutant,
            commutant: Some(commutant),
            algebra: Some(columns_to_mats(&m_basis, n)),
            center: columns_to_mats(&z_basis, n),
            projections: Vec::new(),
        }
    } else {
        CenterData {
            route: CenterRoute::ClassSums,
            commutant: None,
            algebra: None,
            center: independent(&sums, model),
            projections: Vec::new(),
        }
    };
    data.projections = minimal_projections(model, &sums, data.center_dim())?;
    Ok(data)
}

/// A maximal linearly independent subfamily of the class-sum images, detected
/// through their action on the cyclic vector (which is separating for `M`).
fn independent(sums: &[CMat], model: &GnsModel) -> Vec<CMat> {
    let v = model.cyclic_vector();
    let mut chosen: Vec<CMat> = Vec::new();
    let mut cols: Vec<_> = Vec::new();
    for s in sums {
        cols.push(s * v);
        let m = CMat::from_columns(&cols);
        if linalg::rank(&m, RANK_TOL) == cols.len() {
            chosen.push(s.clone());
        } else {
            cols.pop();
        }
    }
    chosen
}

fn minimal_projections(model: &GnsModel, sums: &[CMat], expected: usize) -> Result<Vec<CMat>> {
    let n = model.dim();
    let inverse = model.group().classes().inverse_class().to_vec();
    for draw in 0..MAX_DRAWS {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed + draw);
        let mut coeff = vec![Complex64::new(0.0, 0.0); sums.len()];
        for j in 0..sums.len() {
            let i = inverse[j];
            if i < j {
                coeff[j] = coeff[i].conj();
            } else if i == j {
                coeff[j] = Complex64::new(rng.random_range(-1.0..1.0), 0.0);
            } else {
                coeff[j] = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            }
        }
        let z = sums
            .iter()
            .zip(&coeff)
            .fold(CMat::zeros(n, n), |acc, (s, c)| acc + s * *c);
        let (vals, vecs) = linalg::hermitian_eigen(&z);
        let spread = vals.last().copied().unwrap_or(0.0) - vals.first().copied().unwrap_or(0.0);
        let gap = 1e-6 * spread.max(1.0);
        let mut groups: Vec<Vec<usize>> = Vec::new();
        for i in 0..n {
            match groups.last_mut() {
                Some(g) if vals[i] - vals[*g.last().unwrap()] <= gap => g.push(i),
                _ => groups.push(vec![i]),
            }
        }
        if groups.len() != expected {
            continue;
        }
        let projections: Vec<CMat> = groups
            .iter()
            .map(|g| {
                let vs = CMat::from_fn(n, g.len(), |r, c| vecs[(r, g[c])]);
                &vs * vs.adjoint()
            })
            .collect();
        if projections.iter().all(|p| is_central_projection(model, p)) {
            return Ok(projections);
        }
    }
    Err(Error::Precondition(format!(
        "could not separate {expected} minimal central projections"
    )))
}

fn is_central_projection(model: &GnsModel, p: &CMat) -> bool {
    let tol = PROJECTION_TOL * (model.dim() as f64).max(1.0);
    if (p * p - p).norm() > tol || (p - p.adjoint()).norm() > tol {
        return false;
    }
    model
        .pi_generators()
        .iter()
        .chain(model.rho_generators())
        .all(|u| (u * p - p * u).norm() <= tol)
}

#[derive(Clone, Debug)]
pub struct TraceComponent {
    pub weight: f64,
    pub trace: Trace,
    /// Rank of the minimal central projection (`d²` for a degree-`d` character).
    pub rank: usize,
}

/// Decomposition `φ = Σ w_i φ_i` into characters along the minimal central
/// projections; components are ordered by decreasing weight.
pub fn decompose_trace(model: &GnsModel, center: &CenterData) -> Result<Vec<TraceComponent>> {
    let group = model.group();
    let reps = group.classes().representatives().to_vec();
    let v = model.cyclic_vector();
    let pi_reps: Vec<CMat> = reps.iter().map(|&g| model.pi(g)).collect();
    let mut out = Vec::new();
    for (k, p) in center.projections.iter().enumerate() {
        let u = p * v;
        let w = u.norm_squared();
        if w <= PROJECTION_TOL {
            continue;
        }
        let values = pi_reps
            .iter()
            .map(|m| u.dotc(&(m * &u)) / w)
            .collect();
        let trace = Trace::finite(group.clone(), ClassValues::Float(values), format!("component:{k}"))?;
        let rank = linalg::rank(p, 1e-6);
        out.push(TraceComponent { weight: w, trace, rank });
    }
    out.sort_by(|a, b| b.weight.total_cmp(&a.weight));
    Ok(out)
}

/// Dimension of `{X : Xπ(g) = π(g)X}`, i.e. `Σ m_i²` over irreducible
/// constituents of `π`.
pub fn fd_subrep_detector(model: &GnsModel) -> Result<usize> {
    let n = model.dim();
    if n <= DENSE_COMMUTANT_LIMIT {
        return Ok(dense_commutant(model).ncols());
    }
    // character inner product ⟨χ_π, χ_π⟩
    let coords = model.full_coordinates()?;
    let group = model.group();
    let mut acc = 0.0;
    for g in 0..group.order() {
        let mut tr = Complex64::new(0.0, 0.0);
        for (b, &p) in model.pivots().iter().enumerate() {
            let col = coords.column(group.mul(g, p));
            tr += col.dot(&model.r_inv.row(b).transpose());
        }
        acc += tr.norm_sqr();
    }
    let x = acc / group.order() as f64;
    if (x - x.round()).abs() > 1e-6 * x.max(1.0) {
        return Err(Error::Precondition(format!("commutant dimension {x} is not an integer")));
    }
    Ok(x.round() as usize)
}
