//! Fixed-step trajectories and the decay checks run on them.

mod equilibrium;
mod lyapunov;
mod verify;

use log::warn;

use crate::dynsys::DynamicalSystem;
use crate::error::{Error, Result};
use crate::measure::{ensure_finite, spectral_norm, Vector};

pub use equilibrium::find_equilibrium;
pub use lyapunov::{lyapunov_series, ClassK};
pub use verify::{dini_slope_check, verify_pair_contraction, verify_theorem1, BoundKind, VerificationVerdict};

pub const RK4: &str = "rk4";

/// Time-stamped states of one solution of `x' = f(x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    times: Vec<f64>,
    states: Vec<Vector>,
    system_name: String,
    step_size: f64,
    method: String,
}

impl Trajectory {
    /// Validates that `times` start at 0 and increase strictly and that every
    /// state is finite with a common dimension.
    pub fn new(
        system_name: impl Into<String>,
        times: Vec<f64>,
        states: Vec<Vector>,
        step_size: f64,
        method: impl Into<String>,
    ) -> Result<Self> {
        if times.is_empty() || times.len() != states.len() {
            return Err(Error::InvalidArgument("trajectory needs matching, non-empty times and states".into()));
        }
        if times[0] != 0.0 || times.windows(2).any(|w| w[1].partial_cmp(&w[0]) != Some(std::cmp::Ordering::Greater)) {
            return Err(Error::InvalidArgument("trajectory times must start at 0 and increase".into()));
        }
        let dim = states[0].len();
        for s in &states {
            if s.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: s.len(),
                    context: "trajectory state",
                });
            }
            ensure_finite(s, "trajectory state")?;
        }
        Ok(Self {
            times,
            states,
            system_name: system_name.into(),
            step_size,
            method: method.into(),
        })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[Vector] {
        &self.states
    }

    pub fn system_name(&self) -> &str {
        &self.system_name
    }

    pub fn step_size(&self) -> f64 {
        self.step_size
    }

    pub fn method(&self) -> &str {
        &self.method
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.states[0].len()
    }

    pub fn last(&self) -> (f64, &Vector) {
        let k = self.len() - 1;
        (self.times[k], &self.states[k])
    }
}

fn rk4_step(sys: &DynamicalSystem, x: &Vector, h: f64) -> Result<Vector> {
    let k1 = sys.eval_velocity(x)?;
    let k2 = sys.eval_velocity(&(x + &k1 * (h / 2.0)))?;
    let k3 = sys.eval_velocity(&(x + &k2 * (h / 2.0)))?;
    let k4 = sys.eval_velocity(&(x + &k3 * h))?;
    Ok(x + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0))
}

/// The time grid `0, dt, 2dt, ..., t_final`; the last step is shortened to
/// land on `t_final` unless `t_final / dt` is an integer up to rounding.
fn time_grid(t_final: f64, dt: f64) -> Vec<f64> {
    let ratio = t_final / dt;
    let nearest = ratio.round();
    let steps = if nearest >= 1.0 && (ratio - nearest).abs() <= 1e-9 * ratio.max(1.0) {
        nearest as usize
    } else {
        ratio.ceil() as usize
    };
    let mut times: Vec<f64> = (0..steps).map(|k| k as f64 * dt).collect();
    times.push(t_final);
    times
}

/// Classical fixed-step fourth-order Runge-Kutta from `x0` over `[0, t_final]`.
pub fn integrate(sys: &DynamicalSystem, x0: &Vector, t_final: f64, dt: f64) -> Result<Trajectory> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidArgument(format!("step size must be positive, got {dt}")));
    }
    if !(t_final > 0.0 && t_final.is_finite()) {
        return Err(Error::InvalidArgument(format!("t_final must be positive, got {t_final}")));
    }
    if dt > t_final {
        return Err(Error::InvalidArgument(format!("step size {dt} exceeds t_final {t_final}")));
    }
    sys.eval_velocity(x0)?;
    if let Ok(jac) = sys.eval_jacobian(x0) {
        let lipschitz = spectral_norm(&jac)?;
        if dt * lipschitz > 0.1 {
            warn!(
                "dt * ||J(x0)|| = {:.3} exceeds 0.1 for '{}'; RK4 accuracy may suffer",
                dt * lipschitz,
                sys.name()
            );
        }
    }

    let times = time_grid(t_final, dt);
    let mut states = Vec::with_capacity(times.len());
    states.push(x0.clone());
    for k in 0..times.len() - 1 {
        let h = times[k + 1] - times[k];
        let next = match rk4_step(sys, &states[k], h) {
            Ok(next) => next,
            Err(Error::NonFinite(_)) => return Err(Error::BlowUp { time: times[k] }),
            Err(e) => return Err(e),
        };
        if next.iter().any(|v| !v.is_finite()) {
            return Err(Error::BlowUp { time: times[k + 1] });
        }
        states.push(next);
    }
    Trajectory::new(sys.name(), times, states, dt, RK4)
}

/// Horizon and step covering ten decay constants: `t_final = 10 / c`,
/// `dt = min(0.01, 0.05 / |mu(J(x0))|)`.
pub fn default_horizon(rate: f64, mu_at_start: f64) -> (f64, f64) {
    let t_final = 10.0 / rate;
    let dt = if mu_at_start == 0.0 {
        0.01
    } else {
        (0.05 / mu_at_start.abs()).min(0.01)
    };
    (t_final, dt.min(t_final))
}
