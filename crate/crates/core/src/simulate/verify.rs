//! Pointwise checks of the exponential decay bounds along sampled
//! trajectories.
//!
//! Each check reduces to a ratio `observed / bound` per sample; a verdict
//! passes when the worst ratio stays within `1 + tol`.

use std::fmt;

use super::Trajectory;
use crate::dynsys::DynamicalSystem;
use crate::error::{Error, Result};
use crate::measure::{matrix_measure, vector_norm, NormSpec, Vector};

/// Largest `dt * |mu(J)|` accepted by [`dini_slope_check`].
const SLOPE_DENSITY_LIMIT: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundKind {
    VelocityDecay,
    PairwiseDecay,
    DiniSlope,
}

impl BoundKind {
    pub fn as_str(self) -> &'static str {
        match self {
            BoundKind::VelocityDecay => "velocity_decay",
            BoundKind::PairwiseDecay => "pairwise_decay",
            BoundKind::DiniSlope => "dini_slope",
        }
    }
}

impl fmt::Display for BoundKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationVerdict {
    /// `worst_ratio <= 1 + tolerance_used`.
    pub passed: bool,
    pub worst_ratio: f64,
    pub worst_time: f64,
    pub tolerance_used: f64,
    pub bound_kind: BoundKind,
    /// Number of samples the bound was evaluated at.
    pub samples: usize,
}

fn verdict(ratios: impl Iterator<Item = (f64, f64)>, tol: f64, bound_kind: BoundKind) -> VerificationVerdict {
    let mut worst_ratio = f64::NEG_INFINITY;
    let mut worst_time = 0.0;
    let mut samples = 0;
    for (t, r) in ratios {
        samples += 1;
        if r > worst_ratio {
            worst_ratio = r;
            worst_time = t;
        }
    }
    VerificationVerdict {
        passed: worst_ratio <= 1.0 + tol,
        worst_ratio,
        worst_time,
        tolerance_used: tol,
        bound_kind,
        samples,
    }
}

fn check_rate(c: f64, tol: f64) -> Result<()> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::InvalidArgument(format!("rate c must be positive, got {c}")));
    }
    if !(tol >= 0.0 && tol.is_finite()) {
        return Err(Error::InvalidArgument(format!("tolerance must be non-negative, got {tol}")));
    }
    Ok(())
}

/// Compares `observed[k]` against `observed[0] * exp(-c t_k)` with the
/// absolute floor `1e-12 * (1 + observed[0])`.
fn exponential_envelope(times: &[f64], observed: &[f64], c: f64, tol: f64, kind: BoundKind) -> Result<VerificationVerdict> {
    let start = observed[0];
    let floor = 1e-12 * (1.0 + start);
    if start == 0.0 {
        if let Some((k, &v)) = observed.iter().enumerate().find(|(_, &v)| v > floor) {
            return Err(Error::SpuriousVelocity { time: times[k], value: v });
        }
    }
    let ratios = times
        .iter()
        .zip(observed)
        .map(|(&t, &v)| (t, v / (start * (-c * t).exp() + floor)));
    Ok(verdict(ratios, tol, kind))
}

/// `|f(x(t))| <= |f(x(0))| e^{-ct}` at every sample.
pub fn verify_theorem1(traj: &Trajectory, sys: &DynamicalSystem, norm: &NormSpec, c: f64, tol: f64) -> Result<VerificationVerdict> {
    check_rate(c, tol)?;
    let speeds = traj
        .states()
        .iter()
        .map(|x| vector_norm(&sys.eval_velocity(x)?, norm))
        .collect::<Result<Vec<_>>>()?;
    exponential_envelope(traj.times(), &speeds, c, tol, BoundKind::VelocityDecay)
}

/// `|x(t) - xi(t)| <= |x(0) - xi(0)| e^{-ct}` for two trajectories on the same
/// time grid.
pub fn verify_pair_contraction(traj_a: &Trajectory, traj_b: &Trajectory, norm: &NormSpec, c: f64, tol: f64) -> Result<VerificationVerdict> {
    check_rate(c, tol)?;
    if traj_a.system_name() != traj_b.system_name() {
        return Err(Error::MismatchedTrajectories(format!(
            "systems '{}' and '{}'",
            traj_a.system_name(),
            traj_b.system_name()
        )));
    }
    if traj_a.times() != traj_b.times() {
        return Err(Error::MismatchedTrajectories("time grids differ".into()));
    }
    if traj_a.dim() != traj_b.dim() {
        return Err(Error::MismatchedTrajectories("state dimensions differ".into()));
    }
    let distances = traj_a
        .states()
        .iter()
        .zip(traj_b.states())
        .map(|(x, xi)| vector_norm(&(x - xi), norm))
        .collect::<Result<Vec<_>>>()?;
    exponential_envelope(traj_a.times(), &distances, c, tol, BoundKind::PairwiseDecay)
}

/// Discretised `D^+ V <= mu(J(x)) V` with `V = |f(x)|`, together with the
/// chain-rule identity `d/dt f(x(t)) = J(x) f(x)`.
///
/// At interior sample `k` both the forward-difference excess
/// `(V_{k+1} - V_k)/dt - mu_k V_k` and the residual
/// `|(f_{k+1} - f_k)/dt - J_k f_k|` must stay below
/// `tol * (1 + |mu_k| V_k)`; the reported ratio is
/// `1 + excess / (1 + |mu_k| V_k)`.
pub fn dini_slope_check(traj: &Trajectory, sys: &DynamicalSystem, norm: &NormSpec, tol: f64) -> Result<VerificationVerdict> {
    if !(tol >= 0.0 && tol.is_finite()) {
        return Err(Error::InvalidArgument(format!("tolerance must be non-negative, got {tol}")));
    }
    if traj.len() < 3 {
        return Err(Error::InvalidArgument("slope check needs at least three samples".into()));
    }
    let mut velocities: Vec<Vector> = Vec::with_capacity(traj.len());
    let mut speeds = Vec::with_capacity(traj.len());
    let mut measures = Vec::with_capacity(traj.len());
    let mut jacobians = Vec::with_capacity(traj.len());
    for x in traj.states() {
        let f = sys.eval_velocity(x)?;
        let jac = sys.eval_jacobian(x)?;
        speeds.push(vector_norm(&f, norm)?);
        measures.push(matrix_measure(&jac, norm)?.value);
        velocities.push(f);
        jacobians.push(jac);
    }

    let times = traj.times();
    let widest = times.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
    let stiffest = measures.iter().map(|m| m.abs()).fold(0.0, f64::max);
    let density = widest * stiffest;
    if density > SLOPE_DENSITY_LIMIT {
        return Err(Error::GridTooCoarse {
            density,
            limit: SLOPE_DENSITY_LIMIT,
        });
    }

    let mut ratios = Vec::with_capacity(traj.len() - 2);
    for k in 1..traj.len() - 1 {
        let dt = times[k + 1] - times[k];
        let (v, mu) = (speeds[k], measures[k]);
        let slope_excess = (speeds[k + 1] - v) / dt - mu * v;
        let chain = (&velocities[k + 1] - &velocities[k]) / dt - &jacobians[k] * &velocities[k];
        let residual = vector_norm(&chain, norm)?;
        let scale = 1.0 + mu.abs() * v;
        ratios.push((times[k], 1.0 + slope_excess.max(residual) / scale));
    }
    Ok(verdict(ratios.into_iter(), tol, BoundKind::DiniSlope))
}
