//! Traces on finite groups and pulled-back traces on integer matrix groups.

mod io;
mod irs;
mod limit;
mod positivity;

use std::sync::Arc;

use num_complex::Complex64;
use num_rational::Ratio;

use crate::chartable::CharacterTable;
use crate::cyclo::CycloRational;
use crate::error::{Error, Result};
use crate::group::{GroupHandle, IntegerMatrixElement};

pub use io::{read_ball, write_ball, TraceRecord};
pub use irs::{irs_to_trace, subgroups, InvariantRandomSubgroup};
pub use limit::{pointwise_limit, pointwise_limit_of, PartialTrace};
pub use positivity::{
    dominates, dominates_exact, fourier_coefficients, is_trace, is_trace_on, PsdRegime,
    TraceReport,
};

/// Default tolerance for float comparisons.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Values of a class function, one per conjugacy class.
#[derive(Clone, Debug, PartialEq)]
pub enum ClassValues {
    Exact(Vec<CycloRational>),
    Float(Vec<Complex64>),
}

impl ClassValues {
    pub fn len(&self) -> usize {
        match self {
            ClassValues::Exact(v) => v.len(),
            ClassValues::Float(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn to_complex(&self) -> Vec<Complex64> {
        match self {
            ClassValues::Exact(v) => v.iter().map(|x| x.to_complex()).collect(),
            ClassValues::Float(v) => v.clone(),
        }
    }
}

#[derive(Clone, Debug)]
pub enum TraceBackend {
    /// A class function on a finite group.
    Finite {
        group: Arc<GroupHandle>,
        values: ClassValues,
    },
    /// A normalized character of a finite matrix quotient, evaluated on integer
    /// matrices through reduction.
    PulledBack {
        group: Arc<GroupHandle>,
        table: Arc<CharacterTable>,
        row: usize,
    },
}

/// A normalized, conjugation-invariant, positive-definite function.
///
/// Construction does not check positivity; use [`is_trace`] for that.
#[derive(Clone, Debug)]
pub struct Trace {
    label: String,
    backend: TraceBackend,
}

impl Trace {
    pub fn finite(group: Arc<GroupHandle>, values: ClassValues, label: impl Into<String>) -> Result<Self> {
        let k = group.classes().len();
        if values.len() != k {
            return Err(Error::InvalidTrace(format!(
                "expected {k} class values, got {}",
                values.len()
            )));
        }
        Ok(Trace {
            label: label.into(),
            backend: TraceBackend::Finite { group, values },
        })
    }

    /// Builds a class function from one value per element; fails unless the
    /// values are constant on conjugacy classes.
    pub fn from_element_values(
        group: Arc<GroupHandle>,
        values: &[Complex64],
        tol: f64,
        label: impl Into<String>,
    ) -> Result<Self> {
        if values.len() != group.order() {
            return Err(Error::InvalidTrace("one value per element is required".into()));
        }
        let classes = group.classes();
        for (x, v) in values.iter().enumerate() {
            let rep = classes.representatives()[classes.class_of(x)];
            if (v - values[rep]).norm() > tol {
                return Err(Error::InvalidTrace(format!(
                    "value at element {x} differs from its class representative"
                )));
            }
        }
        let per_class = classes.representatives().iter().map(|&r| values[r]).collect();
        Self::finite(group, ClassValues::Float(per_class), label)
    }

    /// The constant function 1.
    pub fn one(group: Arc<GroupHandle>) -> Self {
        let k = group.classes().len();
        let values = ClassValues::Exact(vec![CycloRational::one(1); k]);
        Trace {
            label: "one".into(),
            backend: TraceBackend::Finite { group, values },
        }
    }

    /// The Dirac function at the identity (regular trace).
    pub fn delta(group: Arc<GroupHandle>) -> Self {
        let k = group.classes().len();
        let mut v = vec![CycloRational::zero(1); k];
        v[0] = CycloRational::one(1);
        Trace {
            label: "delta".into(),
            backend: TraceBackend::Finite {
                group,
                values: ClassValues::Exact(v),
            },
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn backend(&self) -> &TraceBackend {
        &self.backend
    }

    pub fn group(&self) -> &Arc<GroupHandle> {
        match &self.backend {
            TraceBackend::Finite { group, .. } | TraceBackend::PulledBack { group, .. } => group,
        }
    }

    pub fn is_exact(&self) -> bool {
        match &self.backend {
            TraceBackend::Finite { values, .. } => matches!(values, ClassValues::Exact(_)),
            TraceBackend::PulledBack { .. } => true,
        }
    }

    /// Exact class values, when available.
    pub fn exact_class_values(&self) -> Option<Vec<CycloRational>> {
        match &self.backend {
            TraceBackend::Finite {
                values: ClassValues::Exact(v),
                ..
            } => Some(v.clone()),
            TraceBackend::Finite { .. } => None,
            TraceBackend::PulledBack { table, row, .. } => {
                let d = table.degrees()[*row] as i64;
                Some(
                    table
                        .row(*row)
                        .iter()
                        .map(|v| CycloRational::new(v.clone(), d))
                        .collect(),
                )
            }
        }
    }

    pub fn class_values(&self) -> ClassValues {
        match self.exact_class_values() {
            Some(v) => ClassValues::Exact(v),
            None => match &self.backend {
                TraceBackend::Finite { values, .. } => values.clone(),
                TraceBackend::PulledBack { .. } => unreachable!(),
            },
        }
    }

    pub fn class_values_complex(&self) -> Vec<Complex64> {
        match &self.backend {
            TraceBackend::Finite { values, .. } => values.to_complex(),
            TraceBackend::PulledBack { table, row, .. } => table.normalized_complex_row(*row),
        }
    }

    /// Value at a finite group element.
    pub fn eval(&self, g: usize) -> Complex64 {
        let class = self.group().classes().class_of(g);
        match &self.backend {
            TraceBackend::Finite { values, .. } => match values {
                ClassValues::Exact(v) => v[class].to_complex(),
                ClassValues::Float(v) => v[class],
            },
            TraceBackend::PulledBack { table, row, .. } => {
                table.complex_row(*row)[class] / table.degrees()[*row] as f64
            }
        }
    }

    pub fn eval_exact(&self, g: usize) -> Option<CycloRational> {
        let class = self.group().classes().class_of(g);
        match &self.backend {
            TraceBackend::Finite {
                values: ClassValues::Exact(v),
                ..
            } => Some(v[class].clone()),
            TraceBackend::Finite { .. } => None,
            TraceBackend::PulledBack { table, row, .. } => Some(CycloRational::new(
                table.value(*row, class).clone(),
                table.degrees()[*row] as i64,
            )),
        }
    }

    /// Values at every element, in index order.
    pub fn element_values(&self) -> Vec<Complex64> {
        let per_class = self.class_values_complex();
        let classes = self.group().classes();
        (0..self.group().order())
            .map(|g| per_class[classes.class_of(g)])
            .collect()
    }

    /// Value at an integer matrix, through reduction into the finite group.
    pub fn eval_matrix(&self, gamma: &IntegerMatrixElement) -> Result<Complex64> {
        Ok(self.eval(self.group().reduce(gamma)?))
    }

    pub fn eval_matrix_exact(&self, gamma: &IntegerMatrixElement) -> Result<Option<CycloRational>> {
        Ok(self.eval_exact(self.group().reduce(gamma)?))
    }

    /// The complex conjugate trace.
    pub fn conj(&self) -> Trace {
        let values = match self.class_values() {
            ClassValues::Exact(v) => ClassValues::Exact(v.iter().map(|x| x.conj()).collect()),
            ClassValues::Float(v) => ClassValues::Float(v.iter().map(|x| x.conj()).collect()),
        };
        Trace {
            label: format!("conj({})", self.label),
            backend: TraceBackend::Finite {
                group: self.group().clone(),
                values,
            },
        }
    }

    /// A copy with float class values.
    pub fn to_float(&self) -> Trace {
        Trace {
            label: self.label.clone(),
            backend: TraceBackend::Finite {
                group: self.group().clone(),
                values: ClassValues::Float(self.class_values_complex()),
            },
        }
    }
}

/// `χ_i / χ_i(e)` as an exact finite trace.
pub fn normalized_character(group: Arc<GroupHandle>, table: &CharacterTable, row: usize) -> Result<Trace> {
    if row >= table.len() {
        return Err(Error::Precondition(format!(
            "row {row} out of range for a table with {} rows",
            table.len()
        )));
    }
    if table.group_order() != group.order() || table.len() != group.classes().len() {
        return Err(Error::Mismatch("table does not belong to this group".into()));
    }
    let d = table.degrees()[row] as i64;
    let values = table
        .row(row)
        .iter()
        .map(|v| CycloRational::new(v.clone(), d))
        .collect();
    Trace::finite(group, ClassValues::Exact(values), format!("irr:{row}"))
}

/// The normalized character of row `row`, as a function on integer matrices.
pub fn pullback(group: Arc<GroupHandle>, table: Arc<CharacterTable>, row: usize) -> Result<Trace> {
    if row >= table.len() {
        return Err(Error::Precondition(format!("row {row} out of range")));
    }
    if group.descriptor().modulus().is_none() {
        return Err(Error::Precondition("pullbacks need a matrix group quotient".into()));
    }
    Ok(Trace {
        label: format!("pullback({},{row})", group.descriptor()),
        backend: TraceBackend::PulledBack { group, table, row },
    })
}

/// Value of a pulled-back normalized character at an integer matrix.
pub fn pullback_value(
    group: &GroupHandle,
    table: &CharacterTable,
    row: usize,
    gamma: &IntegerMatrixElement,
) -> Result<CycloRational> {
    let g = group.reduce(gamma)?;
    let class = group.classes().class_of(g);
    Ok(CycloRational::new(
        table.value(row, class).clone(),
        table.degrees()[row] as i64,
    ))
}

fn same_group(a: &Trace, b: &Trace) -> bool {
    Arc::ptr_eq(a.group(), b.group())
        || (a.group().descriptor() == b.group().descriptor()
            && a.group().order() == b.group().order())
}

fn check_combinable(traces: &[&Trace], weights_len: usize) -> Result<()> {
    if traces.is_empty() || traces.len() != weights_len {
        return Err(Error::Precondition("one weight per trace is required".into()));
    }
    for t in traces {
        if !same_group(t, traces[0]) {
            return Err(Error::Mismatch("traces live on different groups".into()));
        }
        if matches!(t.backend, TraceBackend::PulledBack { .. })
            != matches!(traces[0].backend, TraceBackend::PulledBack { .. })
        {
            return Err(Error::Mismatch("traces have different backends".into()));
        }
    }
    Ok(())
}

/// Pointwise convex combination with float weights.
pub fn convex_combine(weights: &[f64], traces: &[&Trace]) -> Result<Trace> {
    check_combinable(traces, weights.len())?;
    if weights.iter().any(|&w| !(w >= 0.0)) || (weights.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
        return Err(Error::Precondition("weights must be nonnegative and sum to 1".into()));
    }
    let k = traces[0].group().classes().len();
    let mut acc = vec![Complex64::new(0.0, 0.0); k];
    for (w, t) in weights.iter().zip(traces) {
        for (a, v) in acc.iter_mut().zip(t.class_values_complex()) {
            *a += v * *w;
        }
    }
    let label = combination_label(weights.iter().map(|w| format!("{w}")), traces);
    Trace::finite(traces[0].group().clone(), ClassValues::Float(acc), label)
}

/// Pointwise convex combination with exact rational weights; all traces must be exact.
pub fn convex_combine_exact(weights: &[Ratio<i64>], traces: &[&Trace]) -> Result<Trace> {
    check_combinable(traces, weights.len())?;
    let zero = Ratio::from_integer(0);
    if weights.iter().any(|w| *w < zero) || weights.iter().sum::<Ratio<i64>>() != Ratio::from_integer(1) {
        return Err(Error::Precondition("weights must be nonnegative and sum to 1".into()));
    }
    let k = traces[0].group().classes().len();
    let mut acc = vec![CycloRational::zero(1); k];
    for (w, t) in weights.iter().zip(traces) {
        let values = t
            .exact_class_values()
            .ok_or_else(|| Error::Mismatch("exact combination of a float trace".into()))?;
        for (a, v) in acc.iter_mut().zip(values) {
            *a = a.add(&v.scale(*w));
        }
    }
    let label = combination_label(weights.iter().map(|w| w.to_string()), traces);
    Trace::finite(traces[0].group().clone(), ClassValues::Exact(acc), label)
}

fn combination_label(weights: impl Iterator<Item = String>, traces: &[&Trace]) -> String {
    weights
        .zip(traces)
        .map(|(w, t)| format!("{w}*{}", t.label()))
        .collect::<Vec<_>>()
        .join("+")
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::chartable::character_table;
    use crate::group::build_group;

    pub(crate) fn setup(s: &str) -> (Arc<GroupHandle>, Arc<CharacterTable>) {
        let g = Arc::new(build_group(&s.parse().unwrap()).unwrap());
        let t = Arc::new(character_table(&g, g.classes()).unwrap());
        (g, t)
    }

    #[test]
    fn normalized_rows_start_at_one() {
        let (g, t) = setup("sl(2,5)");
        for i in 0..t.len() {
            let phi = normalized_character(g.clone(), &t, i).unwrap();
            assert_eq!(phi.eval_exact(0).unwrap(), CycloRational::one(1));
        }
        let triv = normalized_character(g.clone(), &t, 0).unwrap();
        assert!((0..g.order()).all(|x| (triv.eval(x) - 1.0).norm() < 1e-12));
    }

    #[test]
    fn regular_decomposition_reproduces_delta() {
        // Σ_i (d_i²/|G|) χ_i/d_i = δ_e
        let (g, t) = setup("sl(2,3)");
        let rows: Vec<Trace> = (0..t.len())
            .map(|i| normalized_character(g.clone(), &t, i).unwrap())
            .collect();
        let weights: Vec<Ratio<i64>> = t
            .degrees()
            .iter()
            .map(|&d| Ratio::new((d * d) as i64, g.order() as i64))
            .collect();
        let refs: Vec<&Trace> = rows.iter().collect();
        let mix = convex_combine_exact(&weights, &refs).unwrap();
        let delta = Trace::delta(g.clone());
        assert_eq!(mix.exact_class_values(), delta.exact_class_values());
    }

    #[test]
    fn combine_two_on_z2() {
        let (g, _) = setup("cyclic(2)");
        let d = Trace::delta(g.clone());
        let one = Trace::one(g.clone());
        let half = Ratio::new(1, 2);
        let mix = convex_combine_exact(&[half, half], &[&d, &one]).unwrap();
        let v = mix.exact_class_values().unwrap();
        assert_eq!(v[0], CycloRational::one(1));
        assert_eq!(v[1].as_rational(), Some(half));
        let same = convex_combine(&[1.0, 0.0], &[&d, &one]).unwrap();
        assert_eq!(same.class_values_complex(), d.class_values_complex());
        assert!(convex_combine(&[0.7, 0.7], &[&d, &one]).is_err());
        let (h, _) = setup("cyclic(3)");
        assert!(convex_combine(&[0.5, 0.5], &[&d, &Trace::one(h)]).is_err());
    }

    #[test]
    fn pullback_values() {
        let (g, t) = setup("sl(2,3)");
        let u = IntegerMatrixElement::from_rows(&[vec![1, 1], vec![0, 1]]).unwrap();
        let neg = IntegerMatrixElement::from_rows(&[vec![-1, 0], vec![0, -1]]).unwrap();
        let triv = pullback(g.clone(), t.clone(), 0).unwrap();
        assert!((triv.eval_matrix(&u).unwrap() - 1.0).norm() < 1e-12);
        let st = t.degrees().iter().position(|&d| d == 3).unwrap();
        let direct = t.complex_row(st)[g.classes().class_of(g.reduce(&u).unwrap())] / 3.0;
        let phi = pullback(g.clone(), t.clone(), st).unwrap();
        assert!((phi.eval_matrix(&u).unwrap() - direct).norm() < 1e-12);
        for i in 0..t.len() {
            if t.is_faithful(i) {
                let v = pullback(g.clone(), t.clone(), i).unwrap().eval_matrix(&neg).unwrap();
                assert!((v.norm() - 1.0).abs() < 1e-12);
            }
        }
        let exact = pullback_value(&g, &t, st, &u).unwrap();
        assert!((exact.to_complex() - direct).norm() < 1e-12);
    }

    #[test]
    fn pullbacks_are_conjugation_invariant_on_samples() {
        use rand::{Rng, SeedableRng};
        let (g, t) = setup("sl(2,7)");
        let gens = IntegerMatrixElement::elementary_generators(2);
        let ball = IntegerMatrixElement::ball(&gens, 3);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for row in 0..t.len() {
            let phi = pullback(g.clone(), t.clone(), row).unwrap();
            for _ in 0..1000 / t.len() + 1 {
                let x = &ball[rng.random_range(0..ball.len())];
                let y = &ball[rng.random_range(0..ball.len())];
                let conj = x.inv().mul(y).mul(x);
                assert!((phi.eval_matrix(&conj).unwrap() - phi.eval_matrix(y).unwrap()).norm() < 1e-12);
            }
        }
    }
}
