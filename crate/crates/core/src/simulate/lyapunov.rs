use serde::{Deserialize, Serialize};

use super::Trajectory;
use crate::dynsys::DynamicalSystem;
use crate::error::{Error, Result};
use crate::measure::{vector_norm, NormSpec};

/// Class-K composition `rho(y) = alpha * y^p` with `alpha > 0`, `p >= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ClassK {
    #[default]
    Identity,
    Power { p: f64 },
    Scaled { alpha: f64, p: f64 },
}

impl ClassK {
    fn coefficients(self) -> (f64, f64) {
        match self {
            ClassK::Identity => (1.0, 1.0),
            ClassK::Power { p } => (1.0, p),
            ClassK::Scaled { alpha, p } => (alpha, p),
        }
    }

    pub fn validate(self) -> Result<Self> {
        let (alpha, p) = self.coefficients();
        if !(alpha > 0.0 && alpha.is_finite() && p >= 1.0 && p.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "class-K function needs alpha > 0 and p >= 1, got alpha = {alpha}, p = {p}"
            )));
        }
        Ok(self)
    }

    pub fn eval(self, y: f64) -> f64 {
        let (alpha, p) = self.coefficients();
        if p == 1.0 {
            alpha * y
        } else {
            alpha * y.powf(p)
        }
    }

    pub fn label(self) -> String {
        match self {
            ClassK::Identity => "identity".into(),
            ClassK::Power { p } => format!("power({p})"),
            ClassK::Scaled { alpha, p } => format!("scaled({alpha},{p})"),
        }
    }
}

/// `(t_k, rho(|f(x(t_k))|))` for every sample of `traj`.
pub fn lyapunov_series(traj: &Trajectory, sys: &DynamicalSystem, norm: &NormSpec, rho: ClassK) -> Result<Vec<(f64, f64)>> {
    let rho = rho.validate()?;
    traj.times()
        .iter()
        .zip(traj.states())
        .map(|(&t, x)| {
            let speed = vector_norm(&sys.eval_velocity(x)?, norm)?;
            Ok((t, rho.eval(speed)))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynsys::{make_system, SystemConfig};
    use crate::measure::{Matrix, Vector};
    use crate::simulate::{integrate, RK4};

    fn identity_flow() -> DynamicalSystem {
        DynamicalSystem::new("id", 2, |x: &Vector| x.clone()).unwrap()
    }

    #[test]
    fn identity_of_three_four() {
        let traj = Trajectory::new("id", vec![0.0], vec![Vector::from_vec(vec![3.0, 4.0])], 0.1, RK4).unwrap();
        let series = lyapunov_series(&traj, &identity_flow(), &NormSpec::L2, ClassK::Identity).unwrap();
        assert_eq!(series, vec![(0.0, 5.0)]);
    }

    #[test]
    fn krasovskii_quadratic_form() {
        let traj = Trajectory::new("id", vec![0.0], vec![Vector::from_vec(vec![1.0, 1.0])], 0.1, RK4).unwrap();
        let norm = NormSpec::weighted(Matrix::from_row_slice(2, 2, &[4.0, 0.0, 0.0, 1.0])).unwrap();
        let series = lyapunov_series(&traj, &identity_flow(), &norm, ClassK::Power { p: 2.0 }).unwrap();
        assert!((series[0].1 - 5.0).abs() < 1e-14);
    }

    #[test]
    fn scalar_decay() {
        let sys = make_system(&SystemConfig {
            matrix: Some(vec![vec![-1.0]]),
            ..SystemConfig::named("linear")
        })
        .unwrap();
        let traj = integrate(&sys, &Vector::from_element(1, 2.0), 1.0, 0.01).unwrap();
        let series = lyapunov_series(&traj, &sys, &NormSpec::L2, ClassK::Identity).unwrap();
        let (t, v) = *series.last().unwrap();
        assert_eq!(t, 1.0);
        assert!((v - 2.0 * (-1.0f64).exp()).abs() < 1e-6);
    }

    #[test]
    fn invalid_class_k() {
        assert!(ClassK::Power { p: 0.5 }.validate().is_err());
        assert!(ClassK::Scaled { alpha: 0.0, p: 2.0 }.validate().is_err());
        assert_eq!(ClassK::Scaled { alpha: 3.0, p: 2.0 }.eval(2.0), 12.0);
        assert_eq!(ClassK::Identity.eval(0.0), 0.0);
    }

    #[test]
    fn serde_descriptor() {
        let rho: ClassK = serde_json::from_str(r#"{"kind":"scaled","alpha":2.0,"p":3.0}"#).unwrap();
        assert_eq!(rho, ClassK::Scaled { alpha: 2.0, p: 3.0 });
        let id: ClassK = serde_json::from_str(r#"{"kind":"identity"}"#).unwrap();
        assert_eq!(id, ClassK::Identity);
    }
}
