//! Size limits for the exponential enumerations.
//!
//! Every exact routine checks its input against a [`Guards`] value before
//! starting; [`Guards::off`] lifts all limits.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Guards {
    pub enabled: bool,
    /// Largest pattern size `k` for map enumeration.
    pub hom_max_k: usize,
    /// Largest host size `n` for map enumeration.
    pub hom_max_n: usize,
    /// Largest `k` for the full law of `ξ(k, G)`.
    pub sample_max_k: usize,
    /// Cap on `n^k · 2^C(k,2)` for the full law of `ξ(k, G)`.
    pub sample_max_work: f64,
    /// Cap on the number of labeled assignments `q^n` (or compressed count
    /// vectors) a partition enumeration may visit.
    pub max_assignments: f64,
    /// Largest step count for the exact cut-norm.
    pub cutnorm_max_steps: usize,
    /// Largest vertex count for the permutation cut distance.
    pub perm_max_n: usize,
    /// Largest matrix order for the dense eigensolver.
    pub eigen_max_n: usize,
    /// Largest `q·n` for which `A ⊗ B` is materialized and solved directly.
    pub kron_direct_max: usize,
}

impl Default for Guards {
    fn default() -> Self {
        Self {
            enabled: true,
            hom_max_k: 8,
            hom_max_n: 32,
            sample_max_k: 6,
            sample_max_work: 2e9,
            max_assignments: 2e7,
            cutnorm_max_steps: 22,
            perm_max_n: 8,
            eigen_max_n: 512,
            kron_direct_max: 256,
        }
    }
}

impl Guards {
    pub fn off() -> Self {
        Self {
            enabled: false,
            ..Self::default()
        }
    }

    pub(crate) fn check_hom(&self, k: usize, n: usize) -> Result<()> {
        if !self.enabled {
            return Ok(());
        }
        if k > self.hom_max_k {
            return Err(Error::resource(
                "hom_max_k",
                format!("pattern size k = {k}"),
                self.hom_max_k,
            ));
        }
        if n > self.hom_max_n {
            return Err(Error::resource(
                "hom_max_n",
                format!("host size n = {n}"),
                self.hom_max_n,
            ));
        }
        Ok(())
    }

    pub(crate) fn check_sample_distribution(&self, k: usize, n: usize) -> Result<()> {
        if k > 10 {
            // 2^C(k,2) no longer fits an edge mask
            return Err(Error::resource("sample_max_k", format!("k = {k}"), 10));
        }
        if !self.enabled {
            return Ok(());
        }
        if k > self.sample_max_k {
            return Err(Error::resource(
                "sample_max_k",
                format!("k = {k}"),
                self.sample_max_k,
            ));
        }
        let work = (n as f64).powi(k as i32) * 2f64.powi((k * (k - 1) / 2) as i32);
        if work > self.sample_max_work {
            return Err(Error::resource(
                "sample_max_work",
                format!("n^k · 2^C(k,2) = {work:e}"),
                self.sample_max_work,
            ));
        }
        Ok(())
    }

    pub(crate) fn check_assignments(&self, what: &str, count: f64) -> Result<()> {
        if self.enabled && count > self.max_assignments {
            return Err(Error::resource(
                "max_assignments",
                format!("{what} needs {count:e} assignments"),
                self.max_assignments,
            ));
        }
        Ok(())
    }

    pub(crate) fn check_cutnorm(&self, m: usize) -> Result<()> {
        if m > 40 || (self.enabled && m > self.cutnorm_max_steps) {
            return Err(Error::resource(
                "cutnorm_max_steps",
                format!("{m} steps (use the heuristic cut-norm instead)"),
                self.cutnorm_max_steps,
            ));
        }
        Ok(())
    }

    pub(crate) fn check_perm(&self, n: usize) -> Result<()> {
        if self.enabled && n > self.perm_max_n {
            return Err(Error::resource(
                "perm_max_n",
                format!("n = {n}"),
                self.perm_max_n,
            ));
        }
        Ok(())
    }

    pub(crate) fn check_eigen(&self, n: usize) -> Result<()> {
        if self.enabled && n > self.eigen_max_n {
            return Err(Error::resource(
                "eigen_max_n",
                format!("matrix order {n}"),
                self.eigen_max_n,
            ));
        }
        Ok(())
    }
}
