//! Monte Carlo estimation of `E (1/N) Tr(A^(1) ... A^(L))` for correlated GOE
//! families.
//!
//! Samples are independent and run on the ambient rayon pool. Each sample's
//! randomness depends only on `(seed, sample_index)` and the per-sample traces
//! are reduced in sample order, so results are bit-identical for any number
//! of worker threads.

mod generator;
mod matrix;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use generator::{row_stream, FamilyGenerator};
pub use matrix::{trace_product_sample, Matrix};

use crate::error::{Error, Result};
pub use crate::kernel::KernelSpec;
use crate::pairings::{weighted_sum_general, EnumerationCaps, PairingClass};
use crate::qcatalan::bk_recurrence;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RmtConfig {
    /// Matrix dimension `N`.
    pub n: usize,
    /// Half the product length.
    pub k: usize,
    pub kernel: KernelSpec,
    pub samples: usize,
    pub seed: u64,
    /// Also estimate the `(2k + 1)`-factor product.
    #[serde(default)]
    pub odd_probe: bool,
}

impl RmtConfig {
    pub fn geometric(n: usize, k: usize, p: f64, samples: usize, seed: u64) -> Result<Self> {
        Ok(Self {
            n,
            k,
            kernel: KernelSpec::geometric(p)?,
            samples,
            seed,
            odd_probe: false,
        })
    }

    fn validate(&self, factors: usize) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidConfig("N must be at least 1".into()));
        }
        if self.samples < 2 {
            return Err(Error::InvalidConfig(format!(
                "need at least 2 samples for a standard error, got {}",
                self.samples
            )));
        }
        if factors == 0 {
            return Err(Error::InvalidConfig("product must have at least one factor".into()));
        }
        self.kernel.validate()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentEstimate {
    pub mean: f64,
    /// `sqrt(var_trace / samples)`.
    pub stderr: f64,
    /// Unbiased sample variance of the per-sample normalised trace.
    pub var_trace: f64,
    pub samples: usize,
    /// Number of matrices in the product.
    pub factors: usize,
    /// Index offset: the product uses `A^(shift+1) ... A^(shift+factors)`.
    pub shift: usize,
    pub config: RmtConfig,
}

impl MomentEstimate {
    pub fn z_score(&self, reference: f64) -> f64 {
        (self.mean - reference) / self.stderr
    }

    /// `|mean - reference| <= sigmas * stderr`.
    pub fn within(&self, reference: f64, sigmas: f64) -> bool {
        (self.mean - reference).abs() <= sigmas * self.stderr
    }
}

/// The `2k` matrices of sample `sample_index`.
pub fn generate_family(cfg: &RmtConfig, sample_index: u64) -> Result<Vec<Matrix>> {
    cfg.validate(2 * cfg.k)?;
    let gen = FamilyGenerator::new(&cfg.kernel, cfg.n, 2 * cfg.k, false)?;
    Ok(gen.sample(cfg.seed, sample_index))
}

/// Mean and variance of `values` in index order.
fn summarize(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    (mean, ss / (n - 1.0))
}

/// Estimates `E (1/N) Tr(A^(shift+1) ... A^(shift+factors))`.
pub fn estimate_product(cfg: &RmtConfig, factors: usize, shift: usize, force_factor: bool) -> Result<MomentEstimate> {
    cfg.validate(factors)?;
    let gen = FamilyGenerator::new(&cfg.kernel, cfg.n, shift + factors, force_factor)?;
    let traces: Vec<f64> = (0..cfg.samples as u64)
        .into_par_iter()
        .map(|s| {
            let family = gen.sample(cfg.seed, s);
            trace_product_sample(&family[shift..]).expect("generated family is well formed")
        })
        .collect();
    let (mean, var_trace) = summarize(&traces);
    Ok(MomentEstimate {
        mean,
        stderr: (var_trace / cfg.samples as f64).sqrt(),
        var_trace,
        samples: cfg.samples,
        factors,
        shift,
        config: cfg.clone(),
    })
}

/// `E <Q_2k>` over `samples` independent families.
pub fn estimate_moment(cfg: &RmtConfig) -> Result<MomentEstimate> {
    if cfg.k == 0 {
        return Err(Error::InvalidConfig("k must be at least 1".into()));
    }
    estimate_product(cfg, 2 * cfg.k, 0, false)
}

/// Same moment from the factors `A^(shift+1) ... A^(shift+2k)`.
pub fn estimate_shifted(cfg: &RmtConfig, shift: usize) -> Result<MomentEstimate> {
    if cfg.k == 0 {
        return Err(Error::InvalidConfig("k must be at least 1".into()));
    }
    estimate_product(cfg, 2 * cfg.k, shift, false)
}

/// The `(2k + 1)`-factor product, whose expectation vanishes.
pub fn odd_moment_probe(cfg: &RmtConfig) -> Result<MomentEstimate> {
    estimate_product(cfg, 2 * cfg.k + 1, 0, false)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VarianceRow {
    pub n: usize,
    pub var_trace: f64,
    pub mean: f64,
    pub stderr: f64,
}

/// Sample variance of `<Q_2k>` for each `N` in the grid, all other settings
/// taken from `cfg`.
pub fn variance_decay_probe(cfg: &RmtConfig, n_grid: &[usize]) -> Result<Vec<VarianceRow>> {
    if n_grid.len() < 2 {
        return Err(Error::InsufficientGrid(n_grid.len()));
    }
    n_grid
        .iter()
        .map(|&n| {
            let est = estimate_moment(&RmtConfig { n, ..cfg.clone() })?;
            Ok(VarianceRow {
                n,
                var_trace: est.var_trace,
                mean: est.mean,
                stderr: est.stderr,
            })
        })
        .collect()
}

/// Large-`N` limit of `E <Q_2k>`: the non-crossing pairing sum of the kernel.
/// `B_k(p)` for the geometric kernel; enumerated for table kernels.
pub fn limit_reference(kernel: &KernelSpec, k: usize) -> Result<f64> {
    match kernel {
        KernelSpec::Geometric { p } => Ok(bk_recurrence(k).entries[k].eval_f64(*p)),
        KernelSpec::Table { .. } => {
            weighted_sum_general(k, PairingClass::NonCrossing, kernel, &EnumerationCaps::default())
        }
    }
}

/// JSON record of one simulation run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub config: RmtConfig,
    pub factors: usize,
    pub mean: f64,
    pub stderr: f64,
    pub var_trace: f64,
    pub samples: usize,
    #[serde(rename = "reference_Bk")]
    pub reference_bk: f64,
    pub z_score: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub odd_probe: Option<Box<SimulationReport>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub variance_probe: Option<Vec<VarianceRow>>,
}

impl SimulationReport {
    pub fn new(est: &MomentEstimate, reference: f64) -> Self {
        Self {
            config: est.config.clone(),
            factors: est.factors,
            mean: est.mean,
            stderr: est.stderr,
            var_trace: est.var_trace,
            samples: est.samples,
            reference_bk: reference,
            z_score: est.z_score(reference),
            odd_probe: None,
            variance_probe: None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_validation() {
        let mut cfg = RmtConfig::geometric(3, 1, 0.5, 1, 0).unwrap();
        assert!(matches!(estimate_moment(&cfg), Err(Error::InvalidConfig(_))));
        cfg.samples = 10;
        cfg.k = 0;
        assert!(estimate_moment(&cfg).is_err());
        assert!(odd_moment_probe(&cfg).is_ok());
        cfg.k = 1;
        cfg.n = 0;
        assert!(estimate_moment(&cfg).is_err());
        assert!(RmtConfig::geometric(3, 1, 1.0, 10, 0).is_err());
    }

    #[test]
    fn insufficient_grid() {
        let cfg = RmtConfig::geometric(3, 1, 0.5, 10, 0).unwrap();
        assert_eq!(variance_decay_probe(&cfg, &[10]), Err(Error::InsufficientGrid(1)));
    }

    #[test]
    fn summary_statistics() {
        let (m, v) = summarize(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m, 2.5);
        assert!((v - 5.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn references() {
        let geo = KernelSpec::geometric(0.5).unwrap();
        assert_eq!(limit_reference(&geo, 2).unwrap(), 0.3125);
        let delta = KernelSpec::table(vec![1.0, 0.0, 0.0, 0.0]).unwrap();
        assert_eq!(limit_reference(&delta, 2).unwrap(), 0.0);
    }

    #[test]
    fn report_json_shape() {
        let cfg = RmtConfig::geometric(2, 1, 0.5, 4, 9).unwrap();
        let est = estimate_moment(&cfg).unwrap();
        let json = serde_json::to_value(SimulationReport::new(&est, 0.5)).unwrap();
        for key in [
            "config",
            "mean",
            "stderr",
            "var_trace",
            "samples",
            "reference_Bk",
            "z_score",
        ] {
            assert!(json.get(key).is_some(), "missing {key}");
        }
        assert!(json.get("odd_probe").is_none());
    }
}
