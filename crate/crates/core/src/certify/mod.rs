//! Sampled contraction certificates over a box, and the weighted-Euclidean
//! (Krasovskii) LMI test.
//!
//! A certificate here is empirical: `sup mu(J(x))` is taken over a tensor grid
//! plus seeded random points of a compact box, never over all of `R^n`. Every
//! report carries the [`EMPIRICAL_ON_BOX`] caveat.

mod krasovskii;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::dynsys::DynamicalSystem;
use crate::error::{Error, Result};
use crate::measure::{matrix_measure, NormSpec, Vector};

pub use krasovskii::{
    equivalence_audit, krasovskii_check, krasovskii_margin, lmi_max_eigenvalue, random_audit_batch, random_audit_case, AuditCase,
    AuditRecord, AuditSampler,
};

pub const EMPIRICAL_ON_BOX: &str = "empirical-on-box";

/// Refuse plans that would materialise more samples than this.
const MAX_SAMPLES: usize = 20_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct BoxDomain {
    lower: Vector,
    upper: Vector,
}

impl BoxDomain {
    pub fn new(lower: Vector, upper: Vector) -> Result<Self> {
        if lower.len() != upper.len() || lower.is_empty() {
            return Err(Error::DimensionMismatch {
                expected: lower.len(),
                got: upper.len(),
                context: "box bounds",
            });
        }
        let ordered = lower.iter().zip(upper.iter()).all(|(lo, hi)| lo < hi && lo.is_finite() && hi.is_finite());
        if !ordered {
            return Err(Error::InvalidArgument("box needs finite bounds with lower < upper".into()));
        }
        Ok(Self { lower, upper })
    }

    /// `[lo, hi]^n`.
    pub fn cube(n: usize, lo: f64, hi: f64) -> Result<Self> {
        Self::new(Vector::from_element(n, lo), Vector::from_element(n, hi))
    }

    pub fn lower(&self) -> &Vector {
        &self.lower
    }

    pub fn upper(&self) -> &Vector {
        &self.upper
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn contains(&self, x: &Vector) -> bool {
        x.len() == self.dim() && x.iter().enumerate().all(|(i, &v)| self.lower[i] <= v && v <= self.upper[i])
    }
}

/// Tensor grid (`grid_points_per_axis` per axis, 0 disables it) plus
/// `random_points` uniform draws seeded by `seed`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SamplingPlan {
    pub grid_points_per_axis: usize,
    pub random_points: usize,
    pub seed: u64,
}

impl SamplingPlan {
    pub fn grid(points_per_axis: usize) -> Self {
        Self {
            grid_points_per_axis: points_per_axis,
            random_points: 0,
            seed: 0,
        }
    }

    fn validate(&self, dim: usize) -> Result<usize> {
        if self.grid_points_per_axis == 1 {
            return Err(Error::InvalidArgument("a grid needs at least 2 points per axis".into()));
        }
        let grid = if self.grid_points_per_axis == 0 {
            0
        } else {
            u32::try_from(dim)
                .ok()
                .and_then(|d| self.grid_points_per_axis.checked_pow(d))
                .filter(|&g| g <= MAX_SAMPLES)
                .ok_or_else(|| Error::InvalidArgument("grid too large".into()))?
        };
        let total = grid + self.random_points;
        if total == 0 {
            return Err(Error::InvalidArgument("sampling plan has no samples".into()));
        }
        if total > MAX_SAMPLES {
            return Err(Error::InvalidArgument("sampling plan too large".into()));
        }
        Ok(grid)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub index: usize,
    pub point: Vector,
    pub mu: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CertificationReport {
    pub norm: NormSpec,
    /// Largest sampled `mu(J(x))`.
    pub sup_measure: f64,
    /// `-sup_measure`.
    pub rate_estimate: f64,
    pub witness: Vector,
    pub sample_count: usize,
    pub certified: bool,
    pub caveat: &'static str,
    /// Every evaluated sample, grid first (last axis fastest), then random.
    pub samples: Vec<Sample>,
}

/// `mu(J(x))` under `norm`.
pub fn pointwise_rate(sys: &DynamicalSystem, x: &Vector, norm: &NormSpec) -> Result<f64> {
    let jac = sys.eval_jacobian(x)?;
    Ok(matrix_measure(&jac, norm)?.value)
}

/// The sample points of `plan` on `domain`, in report order.
pub fn sample_points(domain: &BoxDomain, plan: &SamplingPlan) -> Result<Vec<Vector>> {
    let n = domain.dim();
    let grid = plan.validate(n)?;
    let mut points = Vec::with_capacity(grid + plan.random_points);

    if grid > 0 {
        let m = plan.grid_points_per_axis;
        let axes: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                let (lo, hi) = (domain.lower[i], domain.upper[i]);
                (0..m)
                    .map(|k| if k == m - 1 { hi } else { lo + (hi - lo) * k as f64 / (m - 1) as f64 })
                    .collect()
            })
            .collect();
        let mut digits = vec![0usize; n];
        for _ in 0..grid {
            points.push(Vector::from_fn(n, |i, _| axes[i][digits[i]]));
            for i in (0..n).rev() {
                digits[i] += 1;
                if digits[i] < m {
                    break;
                }
                digits[i] = 0;
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(plan.seed);
    for _ in 0..plan.random_points {
        points.push(Vector::from_fn(n, |i, _| {
            let u: f64 = rng.gen();
            domain.lower[i] + (domain.upper[i] - domain.lower[i]) * u
        }));
    }
    Ok(points)
}

/// Estimates the contraction rate of `sys` on `domain` as `-sup mu(J(x))`.
///
/// Samples are evaluated in parallel; the maximum is reduced in sample order
/// with ties going to the lowest index, so the report is identical to a
/// sequential run.
pub fn certify_domain(
    sys: &DynamicalSystem,
    domain: &BoxDomain,
    norm: &NormSpec,
    plan: &SamplingPlan,
) -> Result<CertificationReport> {
    if domain.dim() != sys.dimension() {
        return Err(Error::DimensionMismatch {
            expected: sys.dimension(),
            got: domain.dim(),
            context: "box vs system",
        });
    }
    let points = sample_points(domain, plan)?;
    let evaluated: Vec<Result<f64>> = points.par_iter().map(|x| pointwise_rate(sys, x, norm)).collect();
    // first failure in sample order, whatever order the workers finished in
    let mus = evaluated
        .into_iter()
        .enumerate()
        .map(|(index, r)| {
            r.map_err(|e| Error::SampleFailure {
                index,
                point: points[index].iter().copied().collect(),
                source: Box::new(e),
            })
        })
        .collect::<Result<Vec<f64>>>()?;

    let mut best = 0;
    for (i, &mu) in mus.iter().enumerate() {
        if mu > mus[best] {
            best = i;
        }
    }
    let sup_measure = mus[best];
    let rate_estimate = -sup_measure;
    let witness = points[best].clone();
    let samples = points
        .into_iter()
        .zip(mus)
        .enumerate()
        .map(|(index, (point, mu))| Sample { index, point, mu })
        .collect::<Vec<_>>();
    Ok(CertificationReport {
        norm: norm.clone(),
        sup_measure,
        rate_estimate,
        witness,
        sample_count: samples.len(),
        certified: rate_estimate > 0.0,
        caveat: EMPIRICAL_ON_BOX,
        samples,
    })
}
