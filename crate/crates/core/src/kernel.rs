//! Covariance kernels `V(r - r')` for the correlated matrix family.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance used when factoring the Toeplitz covariance.
pub const PSD_TOLERANCE: f64 = 1e-10;

/// An even, positive-definite covariance function of the matrix index.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum KernelSpec {
    /// `V(r) = p^|r|` with `0 < p < 1`.
    Geometric { p: f64 },
    /// `V(0), V(1), ..., V(r_max)`; negative lags mirror positive ones.
    Table { values: Vec<f64> },
}

impl KernelSpec {
    pub fn geometric(p: f64) -> Result<Self> {
        let k = KernelSpec::Geometric { p };
        k.validate()?;
        Ok(k)
    }

    pub fn table(values: Vec<f64>) -> Result<Self> {
        let k = KernelSpec::Table { values };
        k.validate()?;
        Ok(k)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            KernelSpec::Geometric { p } => {
                if !(*p > 0.0 && *p < 1.0) {
                    return Err(Error::InvalidKernel(format!(
                        "geometric kernel needs 0 < p < 1, got {p}"
                    )));
                }
            }
            KernelSpec::Table { values } => {
                if values.iter().any(|v| !v.is_finite()) {
                    return Err(Error::InvalidKernel("non-finite table value".into()));
                }
                match values.first() {
                    Some(v0) if *v0 > 0.0 => {}
                    _ => return Err(Error::InvalidKernel("table kernel needs V(0) > 0".into())),
                }
            }
        }
        Ok(())
    }

    /// `V(lag)`, or `None` when a table kernel does not reach that far.
    pub fn value(&self, lag: usize) -> Option<f64> {
        match self {
            KernelSpec::Geometric { p } => Some(p.powi(lag as i32)),
            KernelSpec::Table { values } => values.get(lag).copied(),
        }
    }

    pub fn value_or_err(&self, lag: usize) -> Result<f64> {
        self.value(lag).ok_or(Error::KernelDomain { lag })
    }

    pub fn variance(&self) -> f64 {
        match self {
            KernelSpec::Geometric { .. } => 1.0,
            KernelSpec::Table { values } => values[0],
        }
    }

    /// Lower Cholesky factor (row-major, `len x len`) of the Toeplitz matrix
    /// `[V(r - r')]`. Pivots within the tolerance of zero are treated as
    /// exact zeros so that semi-definite kernels are accepted.
    pub fn toeplitz_factor(&self, len: usize) -> Result<Vec<f64>> {
        let lags: Vec<f64> = (0..len).map(|r| self.value_or_err(r)).collect::<Result<_>>()?;
        let tol = PSD_TOLERANCE * lags.first().copied().unwrap_or(1.0).abs().max(1.0);
        let mut l = vec![0.0; len * len];
        for j in 0..len {
            let mut d = lags[0];
            for m in 0..j {
                d -= l[j * len + m] * l[j * len + m];
            }
            if d < -tol {
                return Err(Error::KernelNotPsd { index: j, pivot: d });
            }
            let diag = if d <= tol { 0.0 } else { d.sqrt() };
            l[j * len + j] = diag;
            for i in j + 1..len {
                let mut s = lags[i - j];
                for m in 0..j {
                    s -= l[i * len + m] * l[j * len + m];
                }
                if diag == 0.0 {
                    if s.abs() > tol.sqrt() {
                        return Err(Error::KernelNotPsd { index: j, pivot: d });
                    }
                } else {
                    l[i * len + j] = s / diag;
                }
            }
        }
        Ok(l)
    }

    /// Reads a kernel file: one `lag value` pair per line, lag 0 first, lags
    /// consecutive. Negative lags are optional and must mirror the positive
    /// ones. Blank lines and `#` comments are ignored.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::InvalidKernel(format!("{}: {e}", path.display())))?;
        text.parse()
    }
}

impl FromStr for KernelSpec {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut values: Vec<f64> = Vec::new();
        let mut negatives: Vec<(i64, f64, usize)> = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = || Error::InvalidKernel(format!("line {}: expected `lag value`", lineno + 1));
            let mut fields = line.split_whitespace();
            let lag: i64 = fields.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
            let value: f64 = fields.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
            if fields.next().is_some() {
                return Err(bad());
            }
            if lag < 0 {
                negatives.push((lag, value, lineno + 1));
            } else if lag as usize == values.len() {
                values.push(value);
            } else {
                return Err(Error::InvalidKernel(format!(
                    "line {}: expected lag {}, found {lag}",
                    lineno + 1,
                    values.len()
                )));
            }
        }
        for (lag, value, line) in negatives {
            match values.get(lag.unsigned_abs() as usize) {
                Some(v) if (v - value).abs() <= 1e-12 * v.abs().max(1.0) => {}
                _ => {
                    return Err(Error::InvalidKernel(format!(
                        "line {line}: V({lag}) = {value} is not mirrored by V({})",
                        -lag
                    )))
                }
            }
        }
        let len = values.len();
        let kernel = KernelSpec::table(values)?;
        kernel.toeplitz_factor(len)?;
        Ok(kernel)
    }
}

impl fmt::Display for KernelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KernelSpec::Geometric { p } => write!(f, "geometric(p={p})"),
            KernelSpec::Table { values } => write!(f, "table({} lags)", values.len()),
        }
    }
}
