//! Minimal dense complex-matrix support.
//!
//! The arrays in this crate are small (a handful of antennas per side), so a
//! row-major `Vec<Complex64>` with the few operations the channel and modem
//! code actually needs beats pulling in a full linear-algebra stack.

use num_complex::Complex64;

/// Dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    /// All-zeros matrix.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    /// Build entrywise from `f(row, col)` (0-based).
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.cols + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: Complex64) {
        self.data[row * self.cols + col] = value;
    }

    /// y = A x.
    pub fn mul_vec(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.cols, x.len(), "matrix-vector dimension mismatch");
        (0..self.rows)
            .map(|r| {
                let row = &self.data[r * self.cols..(r + 1) * self.cols];
                row.iter().zip(x).map(|(a, b)| a * b).sum()
            })
            .collect()
    }

    /// C = A B.
    pub fn mul(&self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.cols, rhs.rows, "matrix-matrix dimension mismatch");
        ComplexMatrix::from_fn(self.rows, rhs.cols, |r, c| {
            (0..self.cols).map(|k| self.get(r, k) * rhs.get(k, c)).sum()
        })
    }

    /// Scale row `r` by `diag[r]` for every row (left-multiply by a diagonal).
    pub fn scale_rows(&self, diag: &[Complex64]) -> ComplexMatrix {
        assert_eq!(self.rows, diag.len(), "row-scaling dimension mismatch");
        ComplexMatrix::from_fn(self.rows, self.cols, |r, c| diag[r] * self.get(r, c))
    }

    /// Scale column `c` by `diag[c]` for every column (right-multiply by a diagonal).
    pub fn scale_cols(&self, diag: &[Complex64]) -> ComplexMatrix {
        assert_eq!(self.cols, diag.len(), "column-scaling dimension mismatch");
        ComplexMatrix::from_fn(self.rows, self.cols, |r, c| self.get(r, c) * diag[c])
    }

    /// Multiply every entry by a real scalar.
    pub fn scale(&self, s: f64) -> ComplexMatrix {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn sub(&self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    /// Frobenius norm.
    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Sum of |entry|^2.
    pub fn power(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }
}

/// exp(j phase).
#[inline]
pub fn cis(phase: f64) -> Complex64 {
    Complex64::new(phase.cos(), phase.sin())
}
