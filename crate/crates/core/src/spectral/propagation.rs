use std::collections::{HashMap, HashSet};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{quadratic_forms, restricted_conj_norm, FormKind, GroupAlgebraElement};
use crate::error::{Error, Result};
use crate::gns::{gns_with, GnsOptions};
use crate::group::{IntegerMatrices, IntegerMatrixElement};
use crate::ops::GroupOps;
use crate::trace::pointwise_limit;
use crate::trace::{normalized_character, Trace, TraceBackend};

#[derive(Clone, Debug)]
pub struct PropagationOptions {
    /// Convergence tolerance for the pointwise limit.
    pub limit_tol: f64,
    /// Snap radius for limit values near Gaussian integers.
    pub snap: Option<f64>,
    /// Allowed positive defect of the inequality.
    pub inequality_tol: f64,
}

impl Default for PropagationOptions {
    fn default() -> Self {
        PropagationOptions { limit_tol: 0.25, snap: Some(0.1), inequality_tol: 1e-8 }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PropagationReport {
    pub betas: Vec<f64>,
    /// `max β_n`, when it stays below 1.
    pub common_beta: Option<f64>,
    pub ball_size: usize,
    /// Elements on which the traces are evaluated to build the forms.
    pub products: usize,
    /// `λ_max` of the inequality defect at the common `β` for each trace.
    pub finite_defects: Vec<f64>,
    pub limit_defect: Option<f64>,
    pub limit_achieved_tolerance: Option<f64>,
    pub limit_snapped: bool,
    pub finite_hold: bool,
    pub propagated: bool,
}

/// `‖c_φ(a)|v^⊥‖²` for a pulled-back character and `a` on the integer group.
pub fn conj_gap(trace: &Trace, a: &GroupAlgebraElement<IntegerMatrixElement>) -> Result<f64> {
    let TraceBackend::PulledBack { group, table, row } = trace.backend() else {
        return Err(Error::Precondition("conj_gap expects a pulled-back trace".into()));
    };
    let phi = normalized_character(group.clone(), table, *row)?;
    let model = gns_with(&phi, GnsOptions { table: Some(table), trusted: false })?;
    let reduced = a.map(|g| group.reduce(g))?;
    let top = restricted_conj_norm(&model, &reduced)?;
    Ok(top.value * top.value)
}

/// Checks the conjugation-gap inequality at `β* = max β_n` for every trace of
/// the sequence on test vectors supported in `ball`, then for the pointwise
/// limit of the sequence on the same vectors.
pub fn certificate_propagation(
    traces: &[Trace],
    betas: &[f64],
    a: &GroupAlgebraElement<IntegerMatrixElement>,
    ball: &[IntegerMatrixElement],
    opts: &PropagationOptions,
) -> Result<PropagationReport> {
    if traces.is_empty() || traces.len() != betas.len() {
        return Err(Error::Precondition("need one β per trace and a nonempty sequence".into()));
    }
    let first = ball.first().ok_or_else(|| Error::Precondition("empty ball".into()))?;
    let ops = IntegerMatrices { d: first.dim(), affine: first.is_affine() };
    let worst = betas.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let common_beta = (worst < 1.0 - 1e-9).then_some(worst);
    let b = a.star_square(&ops);
    let support = needed_products(&ops, ball, &b);
    let mut report = PropagationReport {
        betas: betas.to_vec(),
        common_beta,
        ball_size: ball.len(),
        products: support.len(),
        finite_defects: Vec::new(),
        limit_defect: None,
        limit_achieved_tolerance: None,
        limit_snapped: false,
        finite_hold: false,
        propagated: false,
    };
    let Some(beta) = common_beta else {
        return Ok(report);
    };
    let sequence: Vec<Vec<Complex64>> = traces
        .iter()
        .map(|t| support.par_iter().map(|g| t.eval_matrix(g)).collect::<Result<Vec<_>>>())
        .collect::<Result<_>>()?;
    for values in &sequence {
        let lookup: HashMap<&IntegerMatrixElement, Complex64> = support.iter().zip(values.iter().copied()).collect();
        let forms = quadratic_forms(&ops, ball, &b, FormKind::Conjugation, |g| lookup.get(g).copied())?;
        report.finite_defects.push(forms.max_defect_eigenvalue(beta));
    }
    report.finite_hold = report.finite_defects.iter().all(|&d| d <= opts.inequality_tol);
    let limit = pointwise_limit(&support, &sequence, opts.limit_tol, opts.snap)?;
    let forms = quadratic_forms(&ops, ball, &b, FormKind::Conjugation, |g| limit.get(g))?;
    let defect = forms.max_defect_eigenvalue(beta);
    report.limit_defect = Some(defect);
    report.limit_achieved_tolerance = Some(limit.achieved_tolerance);
    report.limit_snapped = limit.snapped;
    report.propagated = report.finite_hold && defect <= opts.inequality_tol;
    Ok(report)
}

/// Every element at which the conjugation form on `ball` evaluates the trace.
fn needed_products<G: GroupOps>(ops: &G, ball: &[G::Elem], b: &GroupAlgebraElement<G::Elem>) -> Vec<G::Elem> {
    let mut seen: HashSet<G::Elem> = HashSet::new();
    let mut out = Vec::new();
    let mut push = |x: G::Elem, out: &mut Vec<G::Elem>| {
        if seen.insert(x.clone()) {
            out.push(x);
        }
    };
    let support = b.support();
    for s in ball {
        push(s.clone(), &mut out);
        let si = ops.inv(s);
        for t in ball {
            push(ops.mul(&si, t), &mut out);
            for g in &support {
                let gi = ops.inv(g);
                push(ops.mul(&ops.mul(&ops.mul(&gi, &si), g), t), &mut out);
            }
        }
    }
    out
}
