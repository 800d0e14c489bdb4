use std::collections::HashMap;
use std::hash::Hash;

use num_complex::Complex64;

use super::Trace;
use crate::error::{Error, Result};
use crate::group::IntegerMatrixElement;

/// Number of trailing terms used to judge convergence.
const TAIL: usize = 3;

/// Limit values of a sequence of traces on a finite set of elements.
#[derive(Clone, Debug)]
pub struct PartialTrace<E: Eq + Hash> {
    pub values: HashMap<E, Complex64>,
    /// Largest distance between the reported values and the tail of the sequence.
    pub achieved_tolerance: f64,
    /// Whether values were snapped to nearby Gaussian integers.
    pub snapped: bool,
}

impl<E: Eq + Hash + Clone> PartialTrace<E> {
    pub fn get(&self, e: &E) -> Option<Complex64> {
        self.values.get(e).copied()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Pointwise limit of a sequence given as value vectors over `support`.
///
/// Convergence means that the last few terms agree with the final one within
/// `tol` everywhere on the support. With `snap = Some(r)`, final values that are
/// all within `r` of Gaussian integers are replaced by those integers.
pub fn pointwise_limit<E: Eq + Hash + Clone>(
    support: &[E],
    sequence: &[Vec<Complex64>],
    tol: f64,
    snap: Option<f64>,
) -> Result<PartialTrace<E>> {
    let last = sequence
        .last()
        .ok_or_else(|| Error::Precondition("empty sequence".into()))?;
    if sequence.iter().any(|v| v.len() != support.len()) {
        return Err(Error::Precondition("every term needs one value per support point".into()));
    }
    let tail = &sequence[sequence.len().saturating_sub(TAIL)..];
    let mut spread: f64 = 0.0;
    for term in tail {
        for (a, b) in term.iter().zip(last) {
            spread = spread.max((a - b).norm());
        }
    }
    if spread > tol {
        return Err(Error::NonConvergence { spread, tol });
    }
    let mut values = last.clone();
    let mut achieved = spread;
    let mut snapped = false;
    if let Some(r) = snap {
        let rounded: Vec<Complex64> = last
            .iter()
            .map(|z| Complex64::new(z.re.round(), z.im.round()))
            .collect();
        let dist = last
            .iter()
            .zip(&rounded)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        if dist <= r {
            // distance from the tail terms to the snapped values
            achieved = tail
                .iter()
                .flat_map(|t| t.iter().zip(&rounded).map(|(a, b)| (a - b).norm()))
                .fold(0.0, f64::max);
            values = rounded;
            snapped = true;
        }
    }
    Ok(PartialTrace {
        values: support.iter().cloned().zip(values).collect(),
        achieved_tolerance: achieved,
        snapped,
    })
}

/// Evaluates pulled-back traces on integer matrices and takes their pointwise limit.
pub fn pointwise_limit_of(
    traces: &[Trace],
    support: &[IntegerMatrixElement],
    tol: f64,
    snap: Option<f64>,
) -> Result<PartialTrace<IntegerMatrixElement>> {
    let sequence = traces
        .iter()
        .map(|t| support.iter().map(|g| t.eval_matrix(g)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    pointwise_limit(support, &sequence, tol, snap)
}
