//! Matrix file formats.
//!
//! Binary format: magic bytes `CEM1`, an unsigned 32-bit little-endian
//! dimension `N`, then `N·N` complex entries as interleaved little-endian
//! 64-bit IEEE doubles `(re, im)` in row-major order.
//!
//! JSON format: `{"n_qubits": int, "dim": int, "entries": [[re, im], ...]}`
//! with entries row-major.

use super::{ComplexMatrix, LinalgError};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::io::{Read, Write};
use thiserror::Error;

pub const MAGIC: &[u8; 4] = b"CEM1";

#[derive(Debug, Error)]
pub enum MatrixIoError {
    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),
    #[error("bad matrix file: {0}")]
    Format(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

fn require_square(m: &ComplexMatrix) -> Result<usize, MatrixIoError> {
    if !m.is_square() {
        return Err(MatrixIoError::Linalg(LinalgError::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        }));
    }
    Ok(m.rows())
}

/// Write a square matrix in the binary format.
pub fn write_matrix_bin<W: Write>(w: &mut W, m: &ComplexMatrix) -> Result<(), MatrixIoError> {
    let n = require_square(m)?;
    w.write_all(MAGIC)?;
    w.write_all(&(n as u32).to_le_bytes())?;
    for z in m.data() {
        w.write_all(&z.re.to_le_bytes())?;
        w.write_all(&z.im.to_le_bytes())?;
    }
    Ok(())
}

/// Read a matrix in the binary format.
pub fn read_matrix_bin<R: Read>(r: &mut R) -> Result<ComplexMatrix, MatrixIoError> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(MatrixIoError::Format(format!(
            "bad magic {:?}, expected {:?}",
            magic, MAGIC
        )));
    }
    let mut dim_bytes = [0u8; 4];
    r.read_exact(&mut dim_bytes)?;
    let n = u32::from_le_bytes(dim_bytes) as usize;
    if n == 0 {
        return Err(MatrixIoError::Format("zero dimension".into()));
    }
    let mut data = Vec::with_capacity(n * n);
    let mut buf = [0u8; 16];
    for _ in 0..n * n {
        r.read_exact(&mut buf)?;
        let re = f64::from_le_bytes(buf[0..8].try_into().unwrap());
        let im = f64::from_le_bytes(buf[8..16].try_into().unwrap());
        data.push(Complex64::new(re, im));
    }
    let m = ComplexMatrix::from_vec(n, n, data)?;
    m.check_finite()?;
    Ok(m)
}

#[derive(Serialize, Deserialize)]
struct MatrixJson {
    n_qubits: u32,
    dim: usize,
    entries: Vec<(f64, f64)>,
}

/// Write a square power-of-two-dimension matrix in the JSON format.
pub fn write_matrix_json<W: Write>(w: &mut W, m: &ComplexMatrix) -> Result<(), MatrixIoError> {
    let n = require_square(m)?;
    if !n.is_power_of_two() {
        return Err(MatrixIoError::Format(format!(
            "dimension {n} is not a power of two"
        )));
    }
    let record = MatrixJson {
        n_qubits: n.trailing_zeros(),
        dim: n,
        entries: m.data().iter().map(|z| (z.re, z.im)).collect(),
    };
    serde_json::to_writer(w, &record)?;
    Ok(())
}

/// Read a matrix in the JSON format.
pub fn read_matrix_json<R: Read>(r: &mut R) -> Result<ComplexMatrix, MatrixIoError> {
    let record: MatrixJson = serde_json::from_reader(r)?;
    if record.dim != 1usize << record.n_qubits {
        return Err(MatrixIoError::Format(format!(
            "dim {} does not match n_qubits {}",
            record.dim, record.n_qubits
        )));
    }
    if record.entries.len() != record.dim * record.dim {
        return Err(MatrixIoError::Format(format!(
            "expected {} entries, got {}",
            record.dim * record.dim,
            record.entries.len()
        )));
    }
    let data = record
        .entries
        .iter()
        .map(|&(re, im)| Complex64::new(re, im))
        .collect();
    let m = ComplexMatrix::from_vec(record.dim, record.dim, data)?;
    m.check_finite()?;
    Ok(m)
}
