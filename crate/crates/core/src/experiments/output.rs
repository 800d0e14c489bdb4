//! CSV rendering and run manifests.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::VanishingSeries;
use crate::cache::CacheOutcome;
use crate::cyclo::{CycloRational, Cyclotomic};
use crate::error::Result;

pub const MANIFEST_VERSION: u32 = 1;

/// `z<n>:[c_0 c_1 …]` in the power basis of `ℚ(ζ_n)`; integers print plainly.
pub fn coefficient_list(c: &Cyclotomic) -> String {
    if let Some(k) = c.as_integer() {
        return k.to_string();
    }
    let coeffs: Vec<String> = c.canonical().iter().map(i64::to_string).collect();
    format!("z{}:[{}]", c.order(), coeffs.join(" "))
}

/// `p/q` for rationals, otherwise a coefficient list over a denominator.
pub fn exact_text(v: &CycloRational) -> String {
    match v.as_rational() {
        Some(r) if *r.denom() == 1 => r.numer().to_string(),
        Some(r) => format!("{}/{}", r.numer(), r.denom()),
        None if v.denominator() == 1 => coefficient_list(v.numerator()),
        None => format!("{}/{}", coefficient_list(v.numerator()), v.denominator()),
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    digest.iter().fold(String::with_capacity(64), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

/// Quotes a CSV field when it holds a comma, quote or line break.
pub fn csv_field(text: &str) -> String {
    if text.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", text.replace('"', "\"\""))
    } else {
        text.to_string()
    }
}

impl VanishingSeries {
    /// One line per modulus and probe.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("modulus,group,probe,central,rows,max_abs,argmax_row,degree,chi,abs_squared\n");
        for e in &self.entries {
            for p in &e.probes {
                let (row, degree, chi, sq) = match &p.witness {
                    Some(w) => (
                        w.row.to_string(),
                        w.degree.to_string(),
                        coefficient_list(&w.value),
                        exact_text(&w.abs_squared),
                    ),
                    None => Default::default(),
                };
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{:.17e},{},{},{},{}",
                    e.modulus,
                    csv_field(&e.group.to_string()),
                    p.probe, p.central, p.rows_considered, p.max_abs, row, degree, chi, sq
                );
            }
        }
        s
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub name: String,
    pub sha256: String,
}

impl ManifestEntry {
    pub fn of_bytes(name: impl Into<String>, bytes: &[u8]) -> Self {
        ManifestEntry { name: name.into(), sha256: sha256_hex(bytes) }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CacheRecord {
    pub group: String,
    pub outcome: CacheOutcome,
}

/// Provenance of one command run: configuration echo, input and output
/// digests, cache outcomes and command-specific details such as witnesses.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub manifest_version: u32,
    pub tool_version: String,
    pub command: String,
    pub seed: u64,
    pub config: serde_json::Value,
    pub inputs: Vec<ManifestEntry>,
    pub outputs: Vec<ManifestEntry>,
    pub cache: Vec<CacheRecord>,
    pub details: serde_json::Value,
}

impl Manifest {
    pub fn new(command: impl Into<String>, seed: u64, config: serde_json::Value) -> Self {
        Manifest {
            manifest_version: MANIFEST_VERSION,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.into(),
            seed,
            config,
            inputs: Vec::new(),
            outputs: Vec::new(),
            cache: Vec::new(),
            details: serde_json::Value::Null,
        }
    }

    pub fn record_cache(&mut self, group: impl ToString, outcome: CacheOutcome) {
        self.cache.push(CacheRecord { group: group.to_string(), outcome });
    }

    /// Writes `contents` to `path` and records its digest.
    pub fn write_output(&mut self, path: &Path, contents: &[u8]) -> Result<()> {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir)?;
        }
        std::fs::write(path, contents)?;
        self.outputs.push(ManifestEntry::of_bytes(path.display().to_string(), contents));
        Ok(())
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir)?;
        }
        std::fs::write(path, serde_json::to_string_pretty(self)? + "\n")?;
        Ok(())
    }
}
