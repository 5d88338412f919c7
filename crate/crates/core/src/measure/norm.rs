use std::fmt;

use serde::{Deserialize, Serialize};

use super::eigen::symmetric_eigen;
use super::spd::spd_eigen;
use super::{ensure_finite, ensure_square, Matrix, Vector};
use crate::error::{Error, Result};

/// Discriminant of a [`NormSpec`], used in reports and configs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NormKind {
    L1,
    L2,
    LInf,
    WeightedL2,
}

impl NormKind {
    pub fn as_str(self) -> &'static str {
        match self {
            NormKind::L1 => "L1",
            NormKind::L2 => "L2",
            NormKind::LInf => "LInf",
            NormKind::WeightedL2 => "WeightedL2",
        }
    }
}

impl fmt::Display for NormKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Validated SPD weight `P` for `|x| = (x^T P x)^{1/2}`, with its square
/// root and inverse square root cached.
#[derive(Debug, Clone, PartialEq)]
pub struct Weight {
    p: Matrix,
    sqrt: Matrix,
    inv_sqrt: Matrix,
}

impl Weight {
    pub fn new(p: Matrix) -> Result<Self> {
        let eig = spd_eigen(&p)?;
        let sqrt = eig.map_spectrum(f64::sqrt);
        let inv_sqrt = eig.map_spectrum(|l| 1.0 / l.sqrt());
        Ok(Self { p, sqrt, inv_sqrt })
    }

    pub fn matrix(&self) -> &Matrix {
        &self.p
    }

    pub fn sqrt(&self) -> &Matrix {
        &self.sqrt
    }

    pub fn inv_sqrt(&self) -> &Matrix {
        &self.inv_sqrt
    }

    pub fn dim(&self) -> usize {
        self.p.nrows()
    }

    /// `P^{1/2} A P^{-1/2}`.
    pub fn transform(&self, a: &Matrix) -> Result<Matrix> {
        ensure_square(a)?;
        self.check_dim(a.nrows())?;
        Ok(&self.sqrt * a * &self.inv_sqrt)
    }

    fn check_dim(&self, n: usize) -> Result<()> {
        if n != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: n,
                context: "weight matrix",
            });
        }
        Ok(())
    }
}

/// The vector norm in force, and by extension its induced matrix norm and
/// matrix measure.
#[derive(Debug, Clone, PartialEq)]
pub enum NormSpec {
    L1,
    L2,
    LInf,
    WeightedL2(Weight),
}

impl NormSpec {
    pub fn weighted(p: Matrix) -> Result<Self> {
        Ok(NormSpec::WeightedL2(Weight::new(p)?))
    }

    pub fn kind(&self) -> NormKind {
        match self {
            NormSpec::L1 => NormKind::L1,
            NormSpec::L2 => NormKind::L2,
            NormSpec::LInf => NormKind::LInf,
            NormSpec::WeightedL2(_) => NormKind::WeightedL2,
        }
    }

    pub fn weight(&self) -> Option<&Weight> {
        match self {
            NormSpec::WeightedL2(w) => Some(w),
            _ => None,
        }
    }
}

/// `|x|` under `norm`.
pub fn vector_norm(x: &Vector, norm: &NormSpec) -> Result<f64> {
    ensure_finite(x, "vector")?;
    Ok(match norm {
        NormSpec::L1 => x.iter().map(|v| v.abs()).sum(),
        NormSpec::L2 => x.norm(),
        NormSpec::LInf => x.amax(),
        NormSpec::WeightedL2(w) => {
            w.check_dim(x.len())?;
            // |P^{1/2} x|_2 equals (x^T P x)^{1/2} and cannot go negative
            // through cancellation.
            (w.sqrt() * x).norm()
        }
    })
}

/// Induced operator norm `||A|| = sup |Ax| / |x|`.
pub fn induced_norm(a: &Matrix, norm: &NormSpec) -> Result<f64> {
    ensure_square(a)?;
    ensure_finite(a, "matrix")?;
    match norm {
        NormSpec::L1 => Ok(a
            .column_iter()
            .map(|c| c.iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)),
        NormSpec::LInf => Ok(a
            .row_iter()
            .map(|r| r.iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)),
        NormSpec::L2 => spectral_norm(a),
        NormSpec::WeightedL2(w) => spectral_norm(&w.transform(a)?),
    }
}

/// Largest singular value, from the top eigenvalue of `A^T A`.
pub fn spectral_norm(a: &Matrix) -> Result<f64> {
    let gram = a.transpose() * a;
    Ok(symmetric_eigen(&gram)?.max().max(0.0).sqrt())
}
