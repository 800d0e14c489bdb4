use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Environment variable overriding the cache directory.
pub const CACHE_ENV: &str = "TRACELAB_CACHE";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Config {
    pub cache_dir: PathBuf,
    pub order_budget: usize,
    pub class_budget: usize,
    pub orbit_budget: usize,
    pub tol: f64,
    pub seed: u64,
    /// Worker threads; 0 lets the pool decide.
    pub threads: usize,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            cache_dir: std::env::var_os(CACHE_ENV)
                .map(PathBuf::from)
                .unwrap_or_else(|| PathBuf::from(".tracelab-cache")),
            order_budget: crate::group::DEFAULT_ORDER_BUDGET,
            class_budget: crate::chartable::DEFAULT_CLASS_BUDGET,
            orbit_budget: crate::relative::torus::ORBIT_BUDGET,
            tol: crate::trace::DEFAULT_TOL,
            seed: 0,
            threads: 0,
        }
    }
}

impl Config {
    pub fn validate(&self) -> Result<()> {
        if self.order_budget == 0 || self.class_budget == 0 || self.orbit_budget == 0 {
            return Err(Error::Precondition("budgets must be positive".into()));
        }
        if !(self.tol > 0.0 && self.tol <= 1e-3) {
            return Err(Error::Precondition("tolerance must lie in (0, 1e-3]".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        assert!(Config::default().validate().is_ok());
        let bad = Config { tol: 0.1, ..Config::default() };
        assert!(bad.validate().is_err());
        let bad = Config { class_budget: 0, ..Config::default() };
        assert!(bad.validate().is_err());
    }
}
