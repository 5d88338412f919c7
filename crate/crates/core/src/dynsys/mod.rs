//! Autonomous systems `x' = f(x)` and their Jacobians.

mod catalog;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::measure::{ensure_finite, Matrix, Vector};

pub use catalog::{make_system, SystemConfig, CATALOG};

pub type VelocityFn = Arc<dyn Fn(&Vector) -> Vector + Send + Sync>;
pub type JacobianFn = Arc<dyn Fn(&Vector) -> Matrix + Send + Sync>;

/// Where `J(x) = df/dx` comes from.
#[derive(Clone)]
pub enum JacobianSource {
    Analytic(JacobianFn),
    /// Central differences, step `h_i = relative_step * max(1, |x_i|)`.
    FiniteDifference { relative_step: f64 },
}

impl JacobianSource {
    pub fn finite_difference() -> Self {
        JacobianSource::FiniteDifference {
            relative_step: f64::EPSILON.sqrt(),
        }
    }
}

impl fmt::Debug for JacobianSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            JacobianSource::Analytic(_) => f.write_str("Analytic"),
            JacobianSource::FiniteDifference { relative_step } => f
                .debug_struct("FiniteDifference")
                .field("relative_step", relative_step)
                .finish(),
        }
    }
}

/// An immutable autonomous vector field on `R^n`.
#[derive(Clone)]
pub struct DynamicalSystem {
    name: String,
    dimension: usize,
    velocity: VelocityFn,
    jacobian: JacobianSource,
    params: BTreeMap<String, f64>,
}

impl fmt::Debug for DynamicalSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DynamicalSystem")
            .field("name", &self.name)
            .field("dimension", &self.dimension)
            .field("jacobian", &self.jacobian)
            .field("params", &self.params)
            .finish()
    }
}

impl DynamicalSystem {
    /// A user-defined system with a finite-difference Jacobian. Attach an
    /// analytic one with [`DynamicalSystem::with_jacobian`].
    pub fn new(
        name: impl Into<String>,
        dimension: usize,
        velocity: impl Fn(&Vector) -> Vector + Send + Sync + 'static,
    ) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::InvalidArgument("system dimension must be positive".into()));
        }
        Ok(Self {
            name: name.into(),
            dimension,
            velocity: Arc::new(velocity),
            jacobian: JacobianSource::finite_difference(),
            params: BTreeMap::new(),
        })
    }

    pub fn with_jacobian(mut self, jacobian: impl Fn(&Vector) -> Matrix + Send + Sync + 'static) -> Self {
        self.jacobian = JacobianSource::Analytic(Arc::new(jacobian));
        self
    }

    pub fn with_jacobian_source(mut self, source: JacobianSource) -> Self {
        self.jacobian = source;
        self
    }

    pub fn with_param(mut self, key: impl Into<String>, value: f64) -> Self {
        self.params.insert(key.into(), value);
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn params(&self) -> &BTreeMap<String, f64> {
        &self.params
    }

    pub fn jacobian_source(&self) -> &JacobianSource {
        &self.jacobian
    }

    fn check_state(&self, x: &Vector) -> Result<()> {
        if x.len() != self.dimension {
            return Err(Error::DimensionMismatch {
                expected: self.dimension,
                got: x.len(),
                context: "state",
            });
        }
        ensure_finite(x, "state")
    }

    /// `f(x)`. A non-finite result means the state left the domain of `f`.
    pub fn eval_velocity(&self, x: &Vector) -> Result<Vector> {
        self.check_state(x)?;
        let v = (self.velocity)(x);
        if v.len() != self.dimension {
            return Err(Error::DimensionMismatch {
                expected: self.dimension,
                got: v.len(),
                context: "velocity output",
            });
        }
        ensure_finite(&v, &format!("velocity of '{}'", self.name))?;
        Ok(v)
    }

    /// `J(x)`, analytic or by central differences.
    pub fn eval_jacobian(&self, x: &Vector) -> Result<Matrix> {
        self.check_state(x)?;
        let n = self.dimension;
        let jac = match &self.jacobian {
            JacobianSource::Analytic(j) => j(x),
            JacobianSource::FiniteDifference { relative_step } => {
                let mut jac = Matrix::zeros(n, n);
                for i in 0..n {
                    let h = relative_step * x[i].abs().max(1.0);
                    let mut plus = x.clone();
                    let mut minus = x.clone();
                    plus[i] += h;
                    minus[i] -= h;
                    // the representable step, not the requested one
                    let span = plus[i] - minus[i];
                    let column = (self.eval_velocity(&plus)? - self.eval_velocity(&minus)?) / span;
                    jac.set_column(i, &column);
                }
                jac
            }
        };
        if jac.nrows() != n || jac.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: jac.nrows().max(jac.ncols()),
                context: "jacobian output",
            });
        }
        ensure_finite(&jac, &format!("jacobian of '{}'", self.name))?;
        Ok(jac)
    }

    /// Relative residual between a central difference of `f` along `d` and
    /// `J(x) d`; both measured in the Euclidean norm.
    pub fn jacobian_consistency_check(&self, x: &Vector, direction: &Vector, h: f64) -> Result<f64> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::InvalidArgument(format!("step must be positive, got {h}")));
        }
        if direction.len() != self.dimension {
            return Err(Error::DimensionMismatch {
                expected: self.dimension,
                got: direction.len(),
                context: "direction",
            });
        }
        if (direction.norm() - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidArgument("direction must have unit length".into()));
        }
        let forward = self.eval_velocity(&(x + direction * h))?;
        let backward = self.eval_velocity(&(x - direction * h))?;
        let jd = self.eval_jacobian(x)? * direction;
        let fd = (forward - backward) / (2.0 * h);
        Ok((fd - &jd).norm() / (1.0 + jd.norm()))
    }
}

/// Free-function form of [`DynamicalSystem::eval_velocity`].
pub fn eval_velocity(sys: &DynamicalSystem, x: &Vector) -> Result<Vector> {
    sys.eval_velocity(x)
}

/// Free-function form of [`DynamicalSystem::eval_jacobian`].
pub fn eval_jacobian(sys: &DynamicalSystem, x: &Vector) -> Result<Matrix> {
    sys.eval_jacobian(x)
}

/// Free-function form of [`DynamicalSystem::jacobian_consistency_check`].
pub fn jacobian_consistency_check(sys: &DynamicalSystem, x: &Vector, direction: &Vector, h: f64) -> Result<f64> {
    sys.jacobian_consistency_check(x, direction, h)
}
