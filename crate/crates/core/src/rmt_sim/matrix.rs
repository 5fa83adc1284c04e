use crate::error::{Error, Result};

/// Dense square matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    n: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn from_row_major(n: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: data.len(),
            });
        }
        Ok(Self { n, data })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// Copies the upper triangle onto the lower one, tile by tile.
    pub fn mirror_upper(&mut self) {
        const TILE: usize = 32;
        let n = self.n;
        for bi in (0..n).step_by(TILE) {
            for bj in (bi..n).step_by(TILE) {
                for i in bi..(bi + TILE).min(n) {
                    for j in bj.max(i + 1)..(bj + TILE).min(n) {
                        self.data[j * n + i] = self.data[i * n + j];
                    }
                }
            }
        }
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| (i + 1..self.n).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.data[i * self.n + i]).sum()
    }

    /// `out = self * rhs`.
    pub fn mul_into(&self, rhs: &Matrix, out: &mut Matrix) {
        let n = self.n;
        assert!(rhs.n == n && out.n == n, "dimension mismatch in mul_into");
        // SAFETY: all three buffers hold n*n elements, are row-major with
        // row stride n, and `out` does not alias the inputs (&mut borrow).
        unsafe {
            matrixmultiply::dgemm(
                n,
                n,
                n,
                1.0,
                self.data.as_ptr(),
                n as isize,
                1,
                rhs.data.as_ptr(),
                n as isize,
                1,
                0.0,
                out.data.as_mut_ptr(),
                n as isize,
                1,
            );
        }
    }
}

/// `(1/N) Tr(A_1 A_2 ... A_L)`. The product of the first `L - 1` factors is
/// formed left to right; the last factor enters through
/// `Tr(P A_L) = sum_ij P_ij (A_L)_ji`, saving one multiplication.
pub fn trace_product_sample(family: &[Matrix]) -> Result<f64> {
    let first = family
        .first()
        .ok_or_else(|| Error::InvalidArgument("empty matrix family".into()))?;
    let n = first.dim();
    if let Some(bad) = family.iter().find(|m| m.dim() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: bad.dim(),
        });
    }
    if n == 0 {
        return Err(Error::DimensionMismatch { expected: 1, found: 0 });
    }
    let (last, init) = family.split_last().expect("non-empty");
    let trace = if init.is_empty() {
        last.trace()
    } else {
        let mut acc = init[0].clone();
        let mut scratch = Matrix::zeros(n);
        for factor in &init[1..] {
            acc.mul_into(factor, &mut scratch);
            std::mem::swap(&mut acc, &mut scratch);
        }
        let mut sum = 0.0;
        for i in 0..n {
            let row = &acc.data[i * n..(i + 1) * n];
            for (j, p) in row.iter().enumerate() {
                sum += p * last.data[j * n + i];
            }
        }
        sum
    };
    Ok(trace / n as f64)
}
