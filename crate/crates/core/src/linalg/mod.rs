//! Dense complex matrices and the operations the ensemble constructions are
//! built from: products, Kronecker products, conjugation/transposition,
//! unitarity checks, bit-reversal permutations, and the eigendecomposition of
//! unitary matrices.
//!
//! Storage is row-major `Complex64`, which also fixes the on-disk layout used
//! by [`io`]. Heavy kernels (matrix products, Hermitian eigensolves, QR) are
//! delegated to `faer`, pinned to sequential mode so results do not depend on
//! thread count; callers parallelize over independent matrices instead.

pub mod eig;
pub mod io;

use num_complex::Complex64;
use thiserror::Error;

pub use eig::{eig_unitary, SpectralDecomposition};

#[derive(Debug, Error)]
pub enum LinalgError {
    #[error("dimension mismatch: left is {left_rows}x{left_cols}, right is {right_rows}x{right_cols}")]
    DimensionMismatch {
        left_rows: usize,
        left_cols: usize,
        right_rows: usize,
        right_cols: usize,
    },
    #[error("operation requires a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not unitary: defect {defect:.3e} exceeds bound {bound:.3e}")]
    NotUnitary { defect: f64, bound: f64 },
    #[error("eigendecomposition residual {residual:.3e} exceeds bound {bound:.3e}")]
    ResidualBound { residual: f64, bound: f64 },
    #[error("matrix contains a non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
}

/// Dense row-major complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    /// Zero matrix of the given shape.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    /// Identity matrix of dimension `n`.
    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    /// Build a matrix from a generator over (row, col).
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Wrap an existing row-major buffer.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self, LinalgError> {
        if data.len() != rows * cols {
            return Err(LinalgError::DimensionMismatch {
                left_rows: rows,
                left_cols: cols,
                right_rows: data.len(),
                right_cols: 1,
            });
        }
        Ok(Self { rows, cols, data })
    }

    /// 2x2 matrix from row-major entries.
    pub fn two_by_two(entries: [Complex64; 4]) -> Self {
        Self {
            rows: 2,
            cols: 2,
            data: entries.to_vec(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Row-major entry slice.
    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub(crate) fn data_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    /// Contiguous view of row `i`.
    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// Column `j` copied out as a vector.
    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self.data[i * self.cols + j]).collect()
    }

    /// Error if any entry is NaN or infinite.
    pub fn check_finite(&self) -> Result<(), LinalgError> {
        for i in 0..self.rows {
            for j in 0..self.cols {
                let z = self.data[i * self.cols + j];
                if !z.re.is_finite() || !z.im.is_finite() {
                    return Err(LinalgError::NonFinite { row: i, col: j });
                }
            }
        }
        Ok(())
    }

    /// Standard matrix product.
    pub fn matmul(&self, other: &ComplexMatrix) -> Result<ComplexMatrix, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::DimensionMismatch {
                left_rows: self.rows,
                left_cols: self.cols,
                right_rows: other.rows,
                right_cols: other.cols,
            });
        }
        let a = backend::to_faer(self);
        let b = backend::to_faer(other);
        backend::seq();
        let c = &a * &b;
        Ok(backend::from_faer(&c))
    }

    /// Kronecker product with `self`'s index most significant.
    pub fn kron(&self, other: &ComplexMatrix) -> ComplexMatrix {
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        let mut out = ComplexMatrix::zeros(rows, cols);
        for i1 in 0..self.rows {
            for j1 in 0..self.cols {
                let a = self.data[i1 * self.cols + j1];
                for i2 in 0..other.rows {
                    let dst = (i1 * other.rows + i2) * cols + j1 * other.cols;
                    let src = i2 * other.cols;
                    for j2 in 0..other.cols {
                        out.data[dst + j2] = a * other.data[src + j2];
                    }
                }
            }
        }
        out
    }

    /// Elementwise transpose.
    pub fn transpose(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.cols, self.rows, |i, j| self.data[j * self.cols + i])
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.cols, self.rows, |i, j| self.data[j * self.cols + i].conj())
    }

    /// Elementwise complex conjugate.
    pub fn conjugate(&self) -> ComplexMatrix {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    /// Multiply every entry by a scalar.
    pub fn scale(&self, factor: Complex64) -> ComplexMatrix {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * factor).collect(),
        }
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise difference `max |a_ij - b_ij|`.
    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> Result<f64, LinalgError> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(LinalgError::DimensionMismatch {
                left_rows: self.rows,
                left_cols: self.cols,
                right_rows: other.rows,
                right_cols: other.cols,
            });
        }
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// Max-norm of `U†U - I`; zero for exactly unitary matrices.
    pub fn unitarity_defect(&self) -> Result<f64, LinalgError> {
        if !self.is_square() {
            return Err(LinalgError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let gram = self.adjoint().matmul(self)?;
        let n = self.rows;
        let mut defect: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let expected = if i == j { 1.0 } else { 0.0 };
                let d = (gram.data[i * n + j] - Complex64::new(expected, 0.0)).norm();
                defect = defect.max(d);
            }
        }
        Ok(defect)
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Reverse the low `n` bits of `index`.
pub(crate) fn reverse_bits(index: usize, n: usize) -> usize {
    let mut out = 0usize;
    for b in 0..n {
        out |= ((index >> b) & 1) << (n - 1 - b);
    }
    out
}

/// Permutation matrix reversing the qubit order of an `n`-qubit register.
///
/// With qubit 1 as the most significant bit of the basis index, the returned
/// `M` maps basis state `|b_1 .. b_n>` to `|b_n .. b_1>`. It is symmetric and
/// an involution.
pub fn bit_reversal_permutation(n: usize) -> ComplexMatrix {
    assert!(n >= 1, "qubit count must be positive");
    let dim = 1usize << n;
    let mut m = ComplexMatrix::zeros(dim, dim);
    for b in 0..dim {
        m[(reverse_bits(b, n), b)] = Complex64::new(1.0, 0.0);
    }
    m
}

/// Bridge to the `faer` kernels, pinned to sequential execution.
pub(crate) mod backend {
    use super::ComplexMatrix;
    use faer::Mat;
    use num_complex::Complex64;
    use std::sync::Once;

    static SEQ: Once = Once::new();

    /// Force faer onto its sequential code path, once per process.
    /// Realization-level parallelism is handled by callers; keeping the
    /// kernels single-threaded makes every matrix result independent of the
    /// worker count.
    pub fn seq() {
        SEQ.call_once(|| faer::set_global_parallelism(faer::Par::Seq));
    }

    pub fn to_faer(m: &ComplexMatrix) -> Mat<Complex64> {
        Mat::from_fn(m.rows(), m.cols(), |i, j| m[(i, j)])
    }

    pub fn from_faer(m: &Mat<Complex64>) -> ComplexMatrix {
        ComplexMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
    }
}
