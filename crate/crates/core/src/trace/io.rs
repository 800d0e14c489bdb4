use std::fs;
use std::io::Write;
use std::path::Path;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{ClassValues, Trace, TraceBackend};
use crate::cyclo::{CycloRational, Cyclotomic};
use crate::error::{Error, Result};
use crate::group::{GroupDescriptor, GroupHandle, IntMatrix, IntegerMatrixElement};

/// JSON form of a trace.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub backend: String,
    pub group: GroupDescriptor,
    pub label: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub row: Option<usize>,
    pub values: Vec<ValueRecord>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ValueRecord {
    /// `Σ_k c_k ζ_order^k / den`, as `(k, c_k)` pairs.
    Exact {
        order: u32,
        den: i64,
        terms: Vec<(u32, i64)>,
    },
    Float {
        re: f64,
        im: f64,
    },
}

impl Trace {
    pub fn to_record(&self) -> TraceRecord {
        let values = match self.class_values() {
            ClassValues::Exact(v) => v
                .iter()
                .map(|x| ValueRecord::Exact {
                    order: x.order(),
                    den: x.denominator(),
                    terms: x.numerator().terms().to_vec(),
                })
                .collect(),
            ClassValues::Float(v) => v.iter().map(|z| ValueRecord::Float { re: z.re, im: z.im }).collect(),
        };
        let (backend, row) = match self.backend() {
            TraceBackend::Finite { .. } => ("finite", None),
            TraceBackend::PulledBack { row, .. } => ("pulled_back", Some(*row)),
        };
        TraceRecord {
            backend: backend.into(),
            group: self.group().descriptor().clone(),
            label: self.label().to_string(),
            row,
            values,
        }
    }

    /// Rebuilds a finite trace from its record over an already built group.
    pub fn from_record(record: &TraceRecord, group: Arc<GroupHandle>) -> Result<Trace> {
        if &record.group != group.descriptor() {
            return Err(Error::Mismatch(format!(
                "record is for {}, group is {}",
                record.group,
                group.descriptor()
            )));
        }
        let exact: Option<Vec<CycloRational>> = record
            .values
            .iter()
            .map(|v| match v {
                ValueRecord::Exact { order, den, terms } if *den != 0 && *order > 0 => Some(
                    CycloRational::new(Cyclotomic::new(*order, terms.iter().copied()), *den),
                ),
                _ => None,
            })
            .collect();
        let values = match exact {
            Some(v) => ClassValues::Exact(v),
            None => ClassValues::Float(
                record
                    .values
                    .iter()
                    .map(|v| match v {
                        ValueRecord::Float { re, im } => Ok(Complex64::new(*re, *im)),
                        ValueRecord::Exact { .. } => Err(Error::InvalidTrace("mixed value kinds".into())),
                    })
                    .collect::<Result<_>>()?,
            ),
        };
        Trace::finite(group, values, record.label.clone())
    }
}

/// Writes matrices one per line, entries row-major separated by spaces
/// (affine elements append their translation).
pub fn write_ball(path: &Path, ball: &[IntegerMatrixElement]) -> Result<()> {
    let mut out = fs::File::create(path)?;
    for g in ball {
        let mut entries: Vec<String> = g.matrix().entries().iter().map(|x| x.to_string()).collect();
        if let IntegerMatrixElement::Affine { translation, .. } = g {
            entries.extend(translation.iter().map(|x| x.to_string()));
        }
        writeln!(out, "{}", entries.join(" "))?;
    }
    Ok(())
}

/// Reads a ball file of `d×d` matrices (or `d×d` plus translation when `affine`).
pub fn read_ball(path: &Path, d: usize, affine: bool) -> Result<Vec<IntegerMatrixElement>> {
    let text = fs::read_to_string(path)?;
    let want = d * d + if affine { d } else { 0 };
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let nums: Vec<i64> = line
            .split_whitespace()
            .map(|t| t.parse::<i64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Precondition(format!("line {}: {e}", lineno + 1)))?;
        if nums.len() != want {
            return Err(Error::Precondition(format!(
                "line {}: expected {want} integers, got {}",
                lineno + 1,
                nums.len()
            )));
        }
        let m = IntMatrix::from_row_major(d, nums[..d * d].to_vec())?;
        out.push(if affine {
            IntegerMatrixElement::affine(m, nums[d * d..].to_vec())?
        } else {
            IntegerMatrixElement::linear(m)?
        });
    }
    Ok(out)
}
