//! Wire formats: chain specs, rates, certificates, profiles and estimate
//! records as JSON; profiles and bound tables as CSV with full binary64
//! round-trip precision (17 significant digits).

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::chain::FiniteKernel;
use crate::error::Result;
use crate::rate::ConvergenceProfile;

/// `{"states": n, "matrix": [[...]], "mu": [...]?}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChainSpecJson {
    pub states: usize,
    pub matrix: Vec<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu: Option<Vec<f64>>,
}

impl ChainSpecJson {
    pub fn to_kernel(&self) -> Result<FiniteKernel> {
        match &self.mu {
            Some(mu) => FiniteKernel::with_stationary(self.matrix.clone(), mu.clone()),
            None => FiniteKernel::from_rows(self.matrix.clone()),
        }
    }

    pub fn from_kernel(kernel: &FiniteKernel) -> Self {
        ChainSpecJson {
            states: kernel.n(),
            matrix: kernel.rows(),
            mu: Some(kernel.mu().to_vec()),
        }
    }
}

/// Reproducibility envelope attached to every CLI artifact.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunMetadata {
    pub seed: u64,
    pub parallelism: usize,
}

/// Format a float with 17 significant digits (exact binary64 round trip).
pub fn fmt_f64(v: f64) -> String {
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    format!("{v:.16e}")
}

/// Write a CSV table; every cell goes through [`fmt_f64`].
pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<f64>]) -> Result<()> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(out, "{}", header.join(","))?;
    for row in rows {
        let line: Vec<String> = row.iter().map(|v| fmt_f64(*v)).collect();
        writeln!(out, "{}", line.join(","))?;
    }
    Ok(())
}

/// `(n, gamma)` rows for a convergence profile.
pub fn profile_rows(profile: &ConvergenceProfile) -> Vec<Vec<f64>> {
    profile
        .gamma
        .iter()
        .enumerate()
        .map(|(n, g)| vec![n as f64, *g])
        .collect()
}
