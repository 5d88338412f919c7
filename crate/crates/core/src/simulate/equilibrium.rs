use super::integrate;
use crate::dynsys::DynamicalSystem;
use crate::error::{Error, Result};
use crate::measure::{spectral_norm, Vector};

const FLOW_CHUNK: f64 = 1.0;
const MAX_FLOW_CHUNKS: usize = 100;
const MAX_NEWTON_ITERS: usize = 100;
const MAX_HALVINGS: usize = 30;

/// Locates the equilibrium `f(x*) = 0` of a contractive system.
///
/// The flow is followed from `x0` until `|f| < 1e3 * tol` (or the flow budget
/// runs out), then damped Newton with backtracking on `|f|_2` finishes to
/// `|f(x*)| <= tol`. Uniqueness of `x*` is the caller's assumption; on a
/// non-contractive system this returns whichever root it reaches.
pub fn find_equilibrium(sys: &DynamicalSystem, x0: &Vector, tol: f64) -> Result<Vector> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    let mut x = x0.clone();
    let mut residual = sys.eval_velocity(&x)?.norm();

    for _ in 0..MAX_FLOW_CHUNKS {
        if residual < 1e3 * tol {
            break;
        }
        let stiffness = spectral_norm(&sys.eval_jacobian(&x)?)?;
        let dt = if stiffness > 0.0 { (0.05 / stiffness).min(0.01) } else { 0.01 };
        let traj = integrate(sys, &x, FLOW_CHUNK, dt)?;
        x = traj.last().1.clone();
        residual = sys.eval_velocity(&x)?.norm();
    }

    let mut fx = sys.eval_velocity(&x)?;
    for _ in 0..MAX_NEWTON_ITERS {
        if residual <= tol {
            return Ok(x);
        }
        let jac = sys.eval_jacobian(&x)?;
        let step = jac
            .lu()
            .solve(&(-&fx))
            .ok_or(Error::NewtonStagnation { residual })?;
        let mut lambda = 1.0;
        let mut accepted = None;
        for _ in 0..=MAX_HALVINGS {
            let trial = &x + &step * lambda;
            if let Ok(f_trial) = sys.eval_velocity(&trial) {
                let r = f_trial.norm();
                if r < residual {
                    accepted = Some((trial, f_trial, r));
                    break;
                }
            }
            lambda *= 0.5;
        }
        let (next, f_next, r) = accepted.ok_or(Error::NewtonStagnation { residual })?;
        x = next;
        fx = f_next;
        residual = r;
    }
    if residual <= tol {
        Ok(x)
    } else {
        Err(Error::NewtonStagnation { residual })
    }
}
