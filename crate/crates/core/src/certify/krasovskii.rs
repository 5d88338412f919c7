//! The quadratic-weight special case: `mu_P(A) < -c` holds exactly when
//! `PA + A^T P + 2cP` is negative definite.

use nalgebra::linalg::QR;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::measure::{ensure_finite, ensure_square, matrix_measure, spd_eigen, spectral_norm, symmetric_max_eigenvalue, Matrix, NormSpec};

fn check_pair(a: &Matrix, p: &Matrix, c: f64) -> Result<()> {
    ensure_square(a)?;
    ensure_finite(a, "matrix A")?;
    if a.nrows() != p.nrows() || a.ncols() != p.ncols() {
        return Err(Error::DimensionMismatch {
            expected: a.nrows(),
            got: p.nrows(),
            context: "A vs P",
        });
    }
    if !c.is_finite() {
        return Err(Error::NonFinite("rate c".into()));
    }
    spd_eigen(p)?;
    Ok(())
}

/// `lambda_max(PA + A^T P + 2cP)`, symmetrised before the eigensolve.
pub fn lmi_max_eigenvalue(a: &Matrix, p: &Matrix, c: f64) -> Result<f64> {
    check_pair(a, p, c)?;
    let pa = p * a;
    let lmi = &pa + pa.transpose() + p * (2.0 * c);
    symmetric_max_eigenvalue(&lmi)
}

/// Safety margin `1e-10 * (1 + ||P|| (||A|| + 2|c|))`, spectral norms.
pub fn krasovskii_margin(a: &Matrix, p: &Matrix, c: f64) -> Result<f64> {
    Ok(1e-10 * (1.0 + spectral_norm(p)? * (spectral_norm(a)? + 2.0 * c.abs())))
}

/// `PA + A^T P < -2cP`, with the strict inequality enforced by
/// [`krasovskii_margin`].
pub fn krasovskii_check(a: &Matrix, p: &Matrix, c: f64) -> Result<bool> {
    let top = lmi_max_eigenvalue(a, p, c)?;
    Ok(top < -krasovskii_margin(a, p, c)?)
}

/// One comparison of the measure side and the LMI side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuditRecord {
    /// `mu_P(A) + c`.
    pub measure_side: f64,
    /// `lambda_max(PA + A^T P + 2cP)`.
    pub lmi_side: f64,
    /// Signs agree (`< 0` on both sides or on neither).
    pub agree: bool,
    /// `|measure_side|` fell inside the dead zone; `agree` is not meaningful.
    pub boundary: bool,
}

impl AuditRecord {
    pub fn disagrees(&self) -> bool {
        !self.boundary && !self.agree
    }
}

/// Evaluates both sides of the measure/LMI equivalence independently.
pub fn equivalence_audit(a: &Matrix, p: &Matrix, c: f64) -> Result<AuditRecord> {
    let lmi_side = lmi_max_eigenvalue(a, p, c)?;
    let norm = NormSpec::weighted(p.clone())?;
    let measure_side = matrix_measure(a, &norm)?.value + c;
    Ok(AuditRecord {
        measure_side,
        lmi_side,
        agree: (measure_side < 0.0) == (lmi_side < 0.0),
        boundary: measure_side.abs() <= 1e-8 * (1.0 + c.abs()),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuditCase {
    pub a: Matrix,
    pub p: Matrix,
    pub c: f64,
}

/// Ranges for randomly drawn audit cases.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuditSampler {
    pub min_dim: usize,
    pub max_dim: usize,
    /// Entries of `A` are uniform in `[-entry_scale, entry_scale]`.
    pub entry_scale: f64,
    /// Eigenvalues of `P` are uniform in this range.
    pub eigen_range: (f64, f64),
    pub c_range: (f64, f64),
}

impl Default for AuditSampler {
    fn default() -> Self {
        Self {
            min_dim: 1,
            max_dim: 5,
            entry_scale: 1.0,
            eigen_range: (0.1, 10.0),
            c_range: (-4.0, 4.0),
        }
    }
}

/// Draws `(A, P, c)` with `P = Q diag(lambda) Q^T`, `Q` orthogonal.
pub fn random_audit_case(rng: &mut impl Rng, sampler: &AuditSampler) -> AuditCase {
    let n = rng.gen_range(sampler.min_dim..=sampler.max_dim);
    let s = sampler.entry_scale;
    let a = Matrix::from_fn(n, n, |_, _| rng.gen_range(-s..=s));
    let g = Matrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..=1.0));
    let q = QR::new(g).q();
    let (lo, hi) = sampler.eigen_range;
    let lambda = Matrix::from_diagonal(&nalgebra::DVector::from_fn(n, |_, _| rng.gen_range(lo..=hi)));
    let p = &q * lambda * q.transpose();
    // exact symmetry so the weight passes validation regardless of rounding
    let p = (&p + p.transpose()) * 0.5;
    let c = rng.gen_range(sampler.c_range.0..=sampler.c_range.1);
    AuditCase { a, p, c }
}

/// `count` cases from a ChaCha8 stream seeded with `seed`.
pub fn random_audit_batch(count: usize, seed: u64, sampler: &AuditSampler) -> Vec<AuditCase> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_audit_case(&mut rng, sampler)).collect()
}
