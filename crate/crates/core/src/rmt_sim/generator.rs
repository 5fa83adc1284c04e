//! Correlated GOE families `A^(1), ..., A^(L)`.
//!
//! Each upper-triangular entry `(i, j)` carries its own stationary Gaussian
//! sequence `a_ij^(1..L)` with autocovariance `V(r - r')` (doubled on the
//! diagonal), and `A^(r)_ij = a_ij^(r) / sqrt(N)`. Entries are independent of
//! each other.
//!
//! Randomness is counter-based: sample `s` of a run seeded with `seed` keys a
//! ChaCha8 generator with `(seed, s)`, and row `i` of every matrix reads its
//! own 64-bit stream of that key. Entry `(i, j)` with `j >= i` consumes `L`
//! normals from row `i`'s stream in order of `j`. The family is therefore a
//! pure function of `(seed, sample_index)`, independent of scheduling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::matrix::Matrix;
use crate::error::{Error, Result};
use crate::kernel::KernelSpec;

const DOMAIN_TAG: u64 = 0x7170_6169_7273_0001;

/// Per-sample random source for row `row`.
pub fn row_stream(seed: u64, sample_index: u64, row: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&sample_index.to_le_bytes());
    key[16..24].copy_from_slice(&DOMAIN_TAG.to_le_bytes());
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(row);
    rng
}

#[derive(Clone, Debug)]
enum Law {
    /// Stationary AR(1): `a_{r+1} = p a_r + sqrt(1 - p^2) xi_{r+1}`.
    Ar1 { p: f64, innovation: f64 },
    /// Lower Cholesky factor of the `L x L` Toeplitz covariance, row-major.
    Factor(Vec<f64>),
}

/// Prepared sampler for families of `len` matrices of dimension `n`.
#[derive(Clone, Debug)]
pub struct FamilyGenerator {
    n: usize,
    len: usize,
    variance: f64,
    law: Law,
}

impl FamilyGenerator {
    /// Geometric kernels use the AR(1) recursion unless `force_factor` is set,
    /// in which case they go through the Toeplitz factor like any table.
    pub fn new(kernel: &KernelSpec, n: usize, len: usize, force_factor: bool) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidConfig("matrix dimension must be at least 1".into()));
        }
        if len == 0 {
            return Err(Error::InvalidConfig("family must contain at least one matrix".into()));
        }
        kernel.validate()?;
        let law = match kernel {
            KernelSpec::Geometric { p } if !force_factor => Law::Ar1 {
                p: *p,
                innovation: (1.0 - p * p).sqrt(),
            },
            _ => Law::Factor(kernel.toeplitz_factor(len)?),
        };
        Ok(Self {
            n,
            len,
            variance: kernel.variance(),
            law,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Standard deviation of `a_ij` before the `1/sqrt(N)` scaling. The
    /// diagonal carries twice the variance for `N >= 2`; a `1 x 1` matrix is
    /// the plain scalar Gaussian sequence with covariance `V`.
    fn entry_scale(&self, diagonal: bool) -> f64 {
        let doubled = diagonal && self.n >= 2;
        let var = if doubled { 2.0 } else { 1.0 };
        match self.law {
            Law::Ar1 { .. } => (var * self.variance).sqrt(),
            // The factor already carries V(0).
            Law::Factor(_) => var.sqrt(),
        }
    }

    /// Fills `out[r]` with `a^(r+1)` for one entry process from `normals`.
    fn entry_process(&self, normals: &[f64], scale: f64, out: &mut [f64]) {
        match &self.law {
            Law::Ar1 { p, innovation } => {
                let mut a = scale * normals[0];
                out[0] = a;
                for r in 1..self.len {
                    a = p * a + innovation * scale * normals[r];
                    out[r] = a;
                }
            }
            Law::Factor(l) => {
                let len = self.len;
                for r in 0..len {
                    let row = &l[r * len..r * len + r + 1];
                    let s: f64 = row.iter().zip(normals).map(|(c, z)| c * z).sum();
                    out[r] = scale * s;
                }
            }
        }
    }

    pub fn sample(&self, seed: u64, sample_index: u64) -> Vec<Matrix> {
        let n = self.n;
        let norm = 1.0 / (n as f64).sqrt();
        let mut mats = vec![Matrix::zeros(n); self.len];
        let mut normals = vec![0.0; self.len];
        let mut process = vec![0.0; self.len];
        for i in 0..n {
            let mut rng = row_stream(seed, sample_index, i as u64);
            for j in i..n {
                for z in normals.iter_mut() {
                    *z = rng.sample(StandardNormal);
                }
                self.entry_process(&normals, self.entry_scale(i == j), &mut process);
                for (m, a) in mats.iter_mut().zip(&process) {
                    m.set(i, j, a * norm);
                }
            }
        }
        for m in &mut mats {
            m.mirror_upper();
        }
        mats
    }
}
