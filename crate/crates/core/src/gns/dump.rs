use std::path::Path;

use serde::{Deserialize, Serialize};

use super::GnsModel;
use crate::error::Result;
use crate::linalg::CMat;

/// JSON bundle of a model. Matrices are row-major lists of `[re, im]` pairs.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GnsDump {
    pub group: String,
    pub trace: String,
    pub dimension: usize,
    pub pivots: Vec<usize>,
    pub cyclic_vector: Vec<[f64; 2]>,
    pub pi: Vec<Vec<Vec<[f64; 2]>>>,
    pub rho: Vec<Vec<Vec<[f64; 2]>>>,
}

fn rows(m: &CMat) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

impl GnsDump {
    pub fn from_model(model: &GnsModel) -> Self {
        GnsDump {
            group: model.group().descriptor().to_string(),
            trace: model.trace().label().to_string(),
            dimension: model.dim(),
            pivots: model.pivots().to_vec(),
            cyclic_vector: model.cyclic_vector().iter().map(|z| [z.re, z.im]).collect(),
            pi: model.pi_generators().iter().map(rows).collect(),
            rho: model.rho_generators().iter().map(rows).collect(),
        }
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }
}
