//! Finite scans over congruence quotients: vanishing of normalized characters
//! at fixed probes, the affine analogue, and degree censuses.

mod census;
mod output;

use std::path::PathBuf;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cache::{CacheOutcome, TableSource};
use crate::chartable::CharacterTable;
use crate::cyclo::{CycloRational, Cyclotomic};
use crate::error::{Error, Result};
use crate::group::{GroupDescriptor, GroupHandle, IntegerMatrixElement, DEFAULT_ORDER_BUDGET};

pub use census::{dimension_census, CensusReport, CensusRow, DegreeCount};
pub use output::{coefficient_list, csv_field, exact_text, sha256_hex, Manifest, ManifestEntry, MANIFEST_VERSION};

/// Two table values whose squared moduli differ by less than this are ties,
/// broken by the smaller row index.
const TIE_TOL: f64 = 1e-12;
/// Allowed gap between the exact argmax and the independent float sweep.
const SWEEP_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    /// `SL(d, ℤ/m)`.
    Sl,
    /// `SL(d, ℤ/m) ⋉ (ℤ/m)^d`.
    Aff,
}

impl Family {
    pub fn descriptor(self, d: usize, modulus: u32) -> GroupDescriptor {
        match self {
            Family::Sl => GroupDescriptor::sl(d, modulus),
            Family::Aff => GroupDescriptor::aff(d, modulus),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RowFilter {
    /// Every row except the trivial one.
    #[default]
    Nontrivial,
    /// Rows with trivial kernel.
    Faithful,
}

impl RowFilter {
    pub fn admits(self, table: &CharacterTable, row: usize) -> bool {
        match self {
            RowFilter::Nontrivial => row != 0,
            RowFilter::Faithful => row != 0 && table.is_faithful(row),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct ScanBudget {
    pub order: usize,
    pub classes: usize,
}

impl Default for ScanBudget {
    fn default() -> Self {
        ScanBudget { order: DEFAULT_ORDER_BUDGET, classes: crate::chartable::DEFAULT_CLASS_BUDGET }
    }
}

/// A vanishing scan as read from a plan file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanPlan {
    pub family: Family,
    pub d: usize,
    /// Strictly increasing moduli, each at least 2.
    pub moduli: Vec<u32>,
    pub probes: Vec<IntegerMatrixElement>,
    #[serde(default)]
    pub filter: RowFilter,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub budget: ScanBudget,
}

impl ScanPlan {
    pub fn new(family: Family, d: usize, moduli: Vec<u32>, probes: Vec<IntegerMatrixElement>) -> Self {
        ScanPlan {
            family,
            d,
            moduli,
            probes,
            filter: RowFilter::Nontrivial,
            output: None,
            budget: ScanBudget::default(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let plan: ScanPlan = serde_json::from_str(text)?;
        plan.validate()?;
        Ok(plan)
    }

    pub fn validate(&self) -> Result<()> {
        if self.d < 2 {
            return Err(Error::Precondition("matrix dimension must be at least 2".into()));
        }
        if self.moduli.is_empty() || self.moduli[0] < 2 {
            return Err(Error::Precondition("moduli must be nonempty and at least 2".into()));
        }
        if self.moduli.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Precondition("moduli must be strictly increasing".into()));
        }
        if self.probes.is_empty() {
            return Err(Error::Precondition("at least one probe is required".into()));
        }
        for p in &self.probes {
            if p.dim() != self.d {
                return Err(Error::Precondition(format!("probe {p} is not {0}x{0}", self.d)));
            }
            if p.is_affine() && self.family == Family::Sl {
                return Err(Error::Precondition(format!("affine probe {p} in a linear family")));
            }
        }
        if self.budget.order == 0 || self.budget.classes == 0 {
            return Err(Error::Precondition("budgets must be positive".into()));
        }
        Ok(())
    }
}

/// The row attaining the maximum, with its exact value at the probe.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Witness {
    pub row: usize,
    pub degree: u64,
    /// `χ(γ)` for the unnormalized character.
    pub value: Cyclotomic,
    /// `|χ(γ)|² / χ(e)²`.
    pub abs_squared: CycloRational,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProbeValue {
    pub probe: usize,
    pub element: usize,
    pub class: usize,
    /// The reduced probe is central; vanishing is not expected.
    pub central: bool,
    pub rows_considered: usize,
    /// Maximum of `|χ(γ)| / χ(e)` over admitted rows, 0 when none are admitted.
    pub max_abs: f64,
    pub witness: Option<Witness>,
    /// The same maximum from an independent float sweep over every row.
    pub sweep_max_abs: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ModulusEntry {
    pub modulus: u32,
    pub group: GroupDescriptor,
    pub order: usize,
    pub classes: usize,
    pub cache: CacheOutcome,
    pub probes: Vec<ProbeValue>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Truncation {
    pub modulus: u32,
    pub reason: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VanishingSeries {
    pub family: Family,
    pub d: usize,
    pub filter: RowFilter,
    /// False for affine scans with `d < 3`, which lie outside the theorem's range.
    pub in_hypothesis: bool,
    pub entries: Vec<ModulusEntry>,
    pub truncated: Option<Truncation>,
}

impl VanishingSeries {
    /// `max_abs` per modulus for one probe.
    pub fn series(&self, probe: usize) -> Vec<f64> {
        self.entries.iter().map(|e| e.probes[probe].max_abs).collect()
    }

    pub fn running_min(&self, probe: usize) -> Vec<f64> {
        let mut out = Vec::new();
        let mut m = f64::INFINITY;
        for v in self.series(probe) {
            m = m.min(v);
            out.push(m);
        }
        out
    }

    /// Every probe was central in some quotient.
    pub fn central_probes(&self) -> Vec<usize> {
        let n = self.entries.first().map_or(0, |e| e.probes.len());
        (0..n)
            .filter(|&p| self.entries.iter().any(|e| e.probes[p].central))
            .collect()
    }

    /// Exact argmax and the independent sweep agree at every modulus, and the
    /// running minimum never increases.
    pub fn consistent(&self) -> bool {
        let n = self.entries.first().map_or(0, |e| e.probes.len());
        let sweeps = self
            .entries
            .iter()
            .flat_map(|e| &e.probes)
            .all(|p| (p.max_abs - p.sweep_max_abs).abs() <= SWEEP_TOL && (0.0..=1.0 + SWEEP_TOL).contains(&p.max_abs));
        let monotone = (0..n).all(|p| self.running_min(p).windows(2).all(|w| w[1] <= w[0]));
        sweeps && monotone
    }
}

fn probe_value(
    group: &GroupHandle,
    table: &CharacterTable,
    filter: RowFilter,
    probe: usize,
    element: usize,
) -> ProbeValue {
    let classes = group.classes();
    let class = classes.class_of(element);
    let mut best: Option<(f64, usize, CycloRational)> = None;
    let mut rows_considered = 0;
    for row in 0..table.len() {
        if !filter.admits(table, row) {
            continue;
        }
        rows_considered += 1;
        let chi = table.value(row, class);
        let d = table.degrees()[row] as i64;
        let sq = CycloRational::new(chi.mul(&chi.conj()), d * d);
        let f = match sq.as_rational() {
            Some(r) => *r.numer() as f64 / *r.denom() as f64,
            None => sq.to_complex().re.max(0.0),
        };
        if best.as_ref().is_none_or(|(b, _, _)| f > b + TIE_TOL) {
            best = Some((f, row, sq));
        }
    }
    // independent pass over the float table, filtering after evaluation
    let sweep_max_abs = (0..table.len())
        .map(|row| (row, table.normalized_complex_row(row)[class].norm()))
        .filter(|&(row, _)| filter.admits(table, row))
        .map(|(_, v)| v)
        .fold(0.0, f64::max);
    let (max_abs, witness) = match best {
        Some((f, row, sq)) => (
            f.sqrt(),
            Some(Witness {
                row,
                degree: table.degrees()[row],
                value: table.value(row, class).clone(),
                abs_squared: sq,
            }),
        ),
        None => (0.0, None),
    };
    ProbeValue {
        probe,
        element,
        class,
        central: group.is_central(element),
        rows_considered,
        max_abs,
        witness,
        sweep_max_abs,
    }
}

fn scan_modulus(plan: &ScanPlan, modulus: u32, source: &dyn TableSource) -> Result<ModulusEntry> {
    let descriptor = plan.family.descriptor(plan.d, modulus);
    let group = GroupHandle::build(&descriptor, plan.budget.order)?;
    if group.classes().len() > plan.budget.classes {
        return Err(Error::BudgetExceeded {
            what: "class count",
            actual: group.classes().len() as u64,
            limit: plan.budget.classes as u64,
        });
    }
    let mut elements = Vec::with_capacity(plan.probes.len());
    for p in &plan.probes {
        let e = group.reduce(p).map_err(|e| match e {
            Error::NotInGroup(msg) => Error::Precondition(format!("probe does not reduce into {descriptor}: {msg}")),
            other => other,
        })?;
        elements.push(e);
    }
    let (table, cache) = source.table(&group)?;
    let probes = elements
        .iter()
        .enumerate()
        .map(|(i, &e)| probe_value(&group, &table, plan.filter, i, e))
        .collect();
    Ok(ModulusEntry {
        modulus,
        group: descriptor,
        order: group.order(),
        classes: group.classes().len(),
        cache,
        probes,
    })
}

/// Maximum normalized character value at each probe, per modulus.
///
/// Moduli are processed in parallel and merged in plan order. A budget failure
/// truncates the series at that modulus; any other failure is returned.
pub fn vanishing_scan(plan: &ScanPlan, source: &dyn TableSource) -> Result<VanishingSeries> {
    plan.validate()?;
    let results: Vec<Result<ModulusEntry>> = plan
        .moduli
        .par_iter()
        .map(|&m| scan_modulus(plan, m, source))
        .collect();
    let mut entries = Vec::new();
    let mut truncated = None;
    for (&m, r) in plan.moduli.iter().zip(results) {
        match r {
            Ok(e) => entries.push(e),
            Err(e) if e.is_budget() => {
                truncated = Some(Truncation { modulus: m, reason: e.to_string() });
                break;
            }
            Err(e) => return Err(e),
        }
    }
    Ok(VanishingSeries {
        family: plan.family,
        d: plan.d,
        filter: plan.filter,
        in_hypothesis: plan.family == Family::Sl || plan.d >= 3,
        entries,
        truncated,
    })
}

/// Vanishing scan of `SL(d, 𝔽_p) ⋉ 𝔽_p^d` at the probe `(A, v)` over the given primes.
pub fn semidirect_scan(
    d: usize,
    primes: &[u32],
    probe: IntegerMatrixElement,
    budget: ScanBudget,
    source: &dyn TableSource,
) -> Result<VanishingSeries> {
    if let Some(&p) = primes.iter().find(|&&p| !crate::modp::is_prime(p as u64)) {
        return Err(Error::Precondition(format!("{p} is not prime")));
    }
    let probe = match probe {
        IntegerMatrixElement::Linear { matrix } => IntegerMatrixElement::affine(matrix, vec![0; d])?,
        affine => affine,
    };
    let plan = ScanPlan {
        budget,
        ..ScanPlan::new(Family::Aff, d, primes.to_vec(), vec![probe])
    };
    vanishing_scan(&plan, source)
}

/// Fetches a group and its table through a source, honoring the order budget.
pub fn group_and_table(
    descriptor: &GroupDescriptor,
    order_budget: usize,
    source: &dyn TableSource,
) -> Result<(Arc<GroupHandle>, Arc<CharacterTable>, CacheOutcome)> {
    let group = Arc::new(GroupHandle::build(descriptor, order_budget)?);
    let (table, outcome) = source.table(&group)?;
    Ok((group, table, outcome))
}

#[cfg(test)]
mod tests;
