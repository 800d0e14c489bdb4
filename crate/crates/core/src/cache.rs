//! On-disk cache of character tables.
//!
//! Entries are JSON files named after the sanitized descriptor. Writes go
//! through a temporary file in the same directory followed by an atomic rename,
//! so concurrent readers only ever see complete files. Entries with another
//! format version are ignored; unreadable or inconsistent ones are renamed to
//! `*.corrupt` and recomputed.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::chartable::{character_table_with, CharacterTable, DixonOptions};
use crate::cyclo::Cyclotomic;
use crate::error::{Error, Result};
use crate::group::{GroupDescriptor, GroupHandle};

pub const CACHE_FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct StoredTable {
    format_version: u32,
    descriptor: GroupDescriptor,
    order: usize,
    exponent: u64,
    prime: u64,
    class_sizes: Vec<usize>,
    class_representatives: Vec<usize>,
    /// Digits of the representatives, guarding against a changed enumeration.
    representative_digits: Vec<Vec<u32>>,
    class_orders: Vec<u64>,
    inverse_class: Vec<usize>,
    degrees: Vec<u64>,
    values: Vec<Vec<Cyclotomic>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CacheOutcome {
    Hit,
    Miss,
    /// A stored entry had another format version.
    Stale,
    /// A stored entry was unreadable or failed verification and was quarantined.
    Quarantined,
}

#[derive(Clone, Debug)]
pub struct TableCache {
    dir: PathBuf,
    version: u32,
}

impl TableCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        TableCache { dir: dir.into(), version: CACHE_FORMAT_VERSION }
    }

    /// A cache that writes and accepts a different format version (for tests of the version guard).
    pub fn with_version(dir: impl Into<PathBuf>, version: u32) -> Self {
        TableCache { dir: dir.into(), version }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path_for(&self, descriptor: &GroupDescriptor) -> PathBuf {
        self.dir.join(format!("{}.table.json", descriptor.sanitized()))
    }

    fn quarantine(&self, path: &Path) -> Result<()> {
        let mut target = path.as_os_str().to_owned();
        target.push(".corrupt");
        fs::rename(path, PathBuf::from(target))?;
        Ok(())
    }

    /// Looks up the table of `group`, validating it against the group.
    pub fn get(&self, group: &GroupHandle) -> Result<(Option<CharacterTable>, CacheOutcome)> {
        let path = self.path_for(group.descriptor());
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok((None, CacheOutcome::Miss)),
            Err(e) => return Err(e.into()),
        };
        let version = serde_json::from_str::<serde_json::Value>(&text)
            .ok()
            .and_then(|v| v.get("format_version").and_then(|x| x.as_u64()));
        match version {
            Some(v) if v != self.version as u64 => return Ok((None, CacheOutcome::Stale)),
            Some(_) => {}
            None => {
                self.quarantine(&path)?;
                return Ok((None, CacheOutcome::Quarantined));
            }
        }
        match serde_json::from_str::<StoredTable>(&text).map_err(Error::from).and_then(|s| restore(s, group)) {
            Ok(t) => Ok((Some(t), CacheOutcome::Hit)),
            Err(_) => {
                self.quarantine(&path)?;
                Ok((None, CacheOutcome::Quarantined))
            }
        }
    }

    pub fn put(&self, group: &GroupHandle, table: &CharacterTable) -> Result<PathBuf> {
        fs::create_dir_all(&self.dir)?;
        let stored = StoredTable {
            format_version: self.version,
            descriptor: table.descriptor().clone(),
            order: table.group_order(),
            exponent: table.exponent(),
            prime: table.prime(),
            class_sizes: table.class_sizes().to_vec(),
            class_representatives: table.class_representatives().to_vec(),
            representative_digits: table.class_representatives().iter().map(|&r| group.digits(r)).collect(),
            class_orders: table.class_orders().to_vec(),
            inverse_class: table.inverse_class().to_vec(),
            degrees: table.degrees().to_vec(),
            values: table.rows().to_vec(),
        };
        let path = self.path_for(table.descriptor());
        let mut tmp = tempfile::NamedTempFile::new_in(&self.dir)?;
        tmp.write_all(serde_json::to_string(&stored)?.as_bytes())?;
        tmp.flush()?;
        tmp.persist(&path).map_err(|e| Error::Io(e.error))?;
        Ok(path)
    }

    /// Table of `group` from the cache, computing and storing it on a miss.
    pub fn get_or_compute(
        &self,
        group: &GroupHandle,
        options: DixonOptions,
    ) -> Result<(CharacterTable, CacheOutcome)> {
        let (found, outcome) = self.get(group)?;
        if let Some(t) = found {
            return Ok((t, outcome));
        }
        let table = character_table_with(group, group.classes(), options)?;
        self.put(group, &table)?;
        Ok((table, outcome))
    }
}

fn restore(s: StoredTable, group: &GroupHandle) -> Result<CharacterTable> {
    let classes = group.classes();
    let consistent = s.descriptor == *group.descriptor()
        && s.order == group.order()
        && s.class_sizes == classes.sizes()
        && s.class_representatives == classes.representatives()
        && s.class_orders == classes.orders()
        && s.inverse_class == classes.inverse_class()
        && s.representative_digits.len() == s.class_representatives.len()
        && s
            .class_representatives
            .iter()
            .zip(&s.representative_digits)
            .all(|(&r, d)| group.digits(r) == *d)
        && s.values.len() == s.degrees.len()
        && s.values.iter().all(|r| r.len() == s.class_sizes.len());
    if !consistent {
        return Err(Error::Cache("stored table does not match the group".into()));
    }
    let table = CharacterTable::from_parts(
        s.descriptor,
        s.order,
        s.exponent,
        s.prime,
        s.class_sizes,
        s.class_representatives,
        s.class_orders,
        s.inverse_class,
        s.degrees,
        s.values,
    );
    table.verify()?;
    Ok(table)
}

/// Where tables come from during scans.
pub trait TableSource: Sync {
    fn table(&self, group: &GroupHandle) -> Result<(Arc<CharacterTable>, CacheOutcome)>;
}

/// Computes every table afresh.
#[derive(Clone, Copy, Debug, Default)]
pub struct Compute(pub DixonOptions);

impl TableSource for Compute {
    fn table(&self, group: &GroupHandle) -> Result<(Arc<CharacterTable>, CacheOutcome)> {
        Ok((Arc::new(character_table_with(group, group.classes(), self.0)?), CacheOutcome::Miss))
    }
}

/// Cached tables with a class budget for fresh computations.
#[derive(Clone, Debug)]
pub struct Cached {
    pub cache: TableCache,
    pub options: DixonOptions,
}

impl TableSource for Cached {
    fn table(&self, group: &GroupHandle) -> Result<(Arc<CharacterTable>, CacheOutcome)> {
        let (t, o) = self.cache.get_or_compute(group, self.options)?;
        Ok((Arc::new(t), o))
    }
}
