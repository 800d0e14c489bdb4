use std::collections::BTreeMap;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::output::csv_field;
use super::{Family, ScanBudget};
use crate::cache::{CacheOutcome, TableSource};
use crate::error::Result;
use crate::group::{GroupDescriptor, GroupHandle};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CensusRow {
    pub modulus: u32,
    pub group: GroupDescriptor,
    pub order: usize,
    /// Irreducible degrees in ascending order, with multiplicity.
    pub degrees: Vec<u64>,
    /// Number of linear characters, the order of the abelianization.
    pub linear: usize,
    pub cache: CacheOutcome,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DegreeCount {
    pub degree: u64,
    /// Characters of this degree summed over all moduli.
    pub total: usize,
    /// Moduli at which the degree occurs.
    pub moduli: Vec<u32>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CensusReport {
    pub family: Family,
    pub d: usize,
    pub rows: Vec<CensusRow>,
    pub degrees: Vec<DegreeCount>,
}

/// Degree multisets of the family over the moduli, plus per-degree totals.
pub fn dimension_census(
    family: Family,
    d: usize,
    moduli: &[u32],
    budget: ScanBudget,
    source: &dyn TableSource,
) -> Result<CensusReport> {
    let rows: Vec<CensusRow> = moduli
        .par_iter()
        .map(|&m| {
            let descriptor = family.descriptor(d, m);
            let group = GroupHandle::build(&descriptor, budget.order)?;
            let (table, cache) = source.table(&group)?;
            let degrees = table.degree_multiset();
            let linear = degrees.iter().filter(|&&x| x == 1).count();
            Ok(CensusRow { modulus: m, group: descriptor, order: group.order(), degrees, linear, cache })
        })
        .collect::<Result<_>>()?;
    let mut counts: BTreeMap<u64, DegreeCount> = BTreeMap::new();
    for r in &rows {
        for &deg in &r.degrees {
            let c = counts.entry(deg).or_insert(DegreeCount { degree: deg, total: 0, moduli: Vec::new() });
            c.total += 1;
            if c.moduli.last() != Some(&r.modulus) {
                c.moduli.push(r.modulus);
            }
        }
    }
    Ok(CensusReport { family, d, rows, degrees: counts.into_values().collect() })
}

impl CensusReport {
    /// `modulus,group,order,linear,degrees` with the multiset space-separated.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("modulus,group,order,linear,degrees\n");
        for r in &self.rows {
            let ds: Vec<String> = r.degrees.iter().map(u64::to_string).collect();
            let _ = writeln!(s, "{},{},{},{},{}", r.modulus, csv_field(&r.group.to_string()), r.order, r.linear, ds.join(" "));
        }
        s
    }
}
