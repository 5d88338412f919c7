//! Vector norms, induced matrix norms and matrix measures (logarithmic norms).
//!
//! The matrix measure of `A` under an induced norm is the one-sided
//! derivative `lim_{h->0+} (||I + hA|| - 1) / h`. It is evaluated in closed
//! form here; [`matrix_measure_limit_oracle`] evaluates the limit directly and
//! exists to cross-check the closed forms.

mod eigen;
mod norm;
mod oracle;
mod spd;

use nalgebra::{DMatrix, DVector, Dim, Matrix as NaMatrix, RawStorage};

use crate::error::{Error, Result};

pub use eigen::{symmetric_eigen, symmetrize, SymmetricEigen};
pub use norm::{induced_norm, spectral_norm, vector_norm, NormKind, NormSpec, Weight};
pub use oracle::{matrix_measure_limit_oracle, OracleEstimate, DEFAULT_H_SCHEDULE};
pub use spd::{spd_eigen, spd_sqrt, weighted_transform, SPD_RATIO, SYMMETRY_TOL};

pub type Matrix = DMatrix<f64>;
pub type Vector = DVector<f64>;

/// A matrix measure together with the norm it was taken in.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasureValue {
    pub value: f64,
    pub norm: NormSpec,
}

pub(crate) fn ensure_square(a: &Matrix) -> Result<()> {
    if a.nrows() != a.ncols() || a.nrows() == 0 {
        return Err(Error::NotSquare {
            rows: a.nrows(),
            cols: a.ncols(),
        });
    }
    Ok(())
}

pub(crate) fn ensure_finite<R: Dim, C: Dim, S: RawStorage<f64, R, C>>(
    m: &NaMatrix<f64, R, C, S>,
    what: &str,
) -> Result<()> {
    if m.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite(what.to_string()))
    }
}

/// Largest eigenvalue of the symmetric part of `m`.
pub fn symmetric_max_eigenvalue(m: &Matrix) -> Result<f64> {
    Ok(symmetric_eigen(m)?.max())
}

/// Closed-form matrix measure of `a` under `norm`.
///
/// * L1: `max_j (a_jj + sum_{i != j} |a_ij|)` (columns)
/// * LInf: `max_i (a_ii + sum_{j != i} |a_ij|)` (rows)
/// * L2: `lambda_max((A + A^T) / 2)`
/// * WeightedL2: the L2 measure of `P^{1/2} A P^{-1/2}`
pub fn matrix_measure(a: &Matrix, norm: &NormSpec) -> Result<MeasureValue> {
    ensure_square(a)?;
    ensure_finite(a, "matrix")?;
    let n = a.nrows();
    let value = match norm {
        NormSpec::L1 => (0..n)
            .map(|j| a[(j, j)] + (0..n).filter(|&i| i != j).map(|i| a[(i, j)].abs()).sum::<f64>())
            .fold(f64::NEG_INFINITY, f64::max),
        NormSpec::LInf => (0..n)
            .map(|i| a[(i, i)] + (0..n).filter(|&j| j != i).map(|j| a[(i, j)].abs()).sum::<f64>())
            .fold(f64::NEG_INFINITY, f64::max),
        NormSpec::L2 => symmetric_max_eigenvalue(a)?,
        NormSpec::WeightedL2(w) => symmetric_max_eigenvalue(&w.transform(a)?)?,
    };
    Ok(MeasureValue {
        value,
        norm: norm.clone(),
    })
}
