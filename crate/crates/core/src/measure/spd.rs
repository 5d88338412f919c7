use super::eigen::{symmetric_eigen, SymmetricEigen};
use super::{ensure_finite, ensure_square, Matrix};
use crate::error::{Error, Result};

/// Relative asymmetry accepted for a weight matrix.
pub const SYMMETRY_TOL: f64 = 1e-12;
/// `lambda_min(P)` must exceed this fraction of `lambda_max(P)`.
pub const SPD_RATIO: f64 = 1e-10;

/// Checks symmetry and positive definiteness, returning the spectrum.
pub fn spd_eigen(p: &Matrix) -> Result<SymmetricEigen> {
    ensure_square(p)?;
    ensure_finite(p, "weight matrix")?;
    let scale = p.amax();
    let asymmetry = (p - p.transpose()).amax();
    if asymmetry > SYMMETRY_TOL * scale {
        return Err(Error::NotSymmetric { asymmetry });
    }
    let eig = symmetric_eigen(p)?;
    let (min_eig, max_eig) = (eig.min(), eig.max());
    if !(max_eig > 0.0 && min_eig > SPD_RATIO * max_eig) {
        return Err(Error::NotPositiveDefinite { min_eig, max_eig });
    }
    Ok(eig)
}

/// Symmetric square root `S` of an SPD matrix, `S * S = P`.
pub fn spd_sqrt(p: &Matrix) -> Result<Matrix> {
    Ok(spd_eigen(p)?.map_spectrum(f64::sqrt))
}

/// `P^{1/2} A P^{-1/2}`: the matrix `A` expressed in coordinates where the
/// `P`-weighted norm becomes Euclidean.
pub fn weighted_transform(a: &Matrix, p: &Matrix) -> Result<Matrix> {
    ensure_square(a)?;
    if a.nrows() != p.nrows() {
        return Err(Error::DimensionMismatch {
            expected: p.nrows(),
            got: a.nrows(),
            context: "weighted_transform",
        });
    }
    let eig = spd_eigen(p)?;
    let sqrt = eig.map_spectrum(f64::sqrt);
    let inv_sqrt = eig.map_spectrum(|l| 1.0 / l.sqrt());
    Ok(sqrt * a * inv_sqrt)
}
