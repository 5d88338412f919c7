//! Built-in test systems. Every entry is smooth and defined on all of `R^n`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{DynamicalSystem, JacobianSource};
use crate::error::{Error, Result};
use crate::measure::{Matrix, Vector};

pub const CATALOG: [&str; 5] = [
    "linear",
    "scalar_cubic_contractive",
    "scalar_cubic_marginal",
    "rotation",
    "diag_dominant_nl",
];

/// Catalog lookup key plus parameters; mirrors the `system` block of an
/// experiment config.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SystemConfig {
    pub name: String,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub params: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dimension: Option<usize>,
    /// `A` for `linear`, as rows.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<f64>>>,
    /// `b` for `linear`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub offset: Option<Vec<f64>>,
    /// Per-coordinate decay rates `a_i` for `diag_dominant_nl`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rates: Option<Vec<f64>>,
    /// Ignore the analytic Jacobian and use central differences.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub finite_difference: bool,
}

impl SystemConfig {
    pub fn named(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            ..Self::default()
        }
    }

    pub fn param(mut self, key: &str, value: f64) -> Self {
        self.params.insert(key.to_string(), value);
        self
    }

    fn invalid(&self, reason: impl Into<String>) -> Error {
        Error::InvalidParameter {
            system: self.name.clone(),
            reason: reason.into(),
        }
    }

    fn positive(&self, key: &str) -> Result<f64> {
        match self.params.get(key) {
            Some(&v) if v > 0.0 && v.is_finite() => Ok(v),
            Some(&v) => Err(self.invalid(format!("{key} must be positive and finite, got {v}"))),
            None => Err(self.invalid(format!("missing parameter {key}"))),
        }
    }

    fn check_dimension(&self, n: usize) -> Result<()> {
        match self.dimension {
            Some(d) if d != n => Err(self.invalid(format!("dimension {d} does not match data of size {n}"))),
            _ => Ok(()),
        }
    }
}

/// Instantiates a catalog entry, validating its parameters up front.
pub fn make_system(config: &SystemConfig) -> Result<DynamicalSystem> {
    let sys = match config.name.as_str() {
        "linear" => linear(config)?,
        "scalar_cubic_contractive" => {
            config.check_dimension(1)?;
            let a = config.positive("a")?;
            let b = config.positive("b")?;
            DynamicalSystem::new(&config.name, 1, move |x: &Vector| {
                Vector::from_element(1, -a * x[0] - b * x[0].powi(3))
            })?
            .with_jacobian(move |x: &Vector| Matrix::from_element(1, 1, -a - 3.0 * b * x[0] * x[0]))
            .with_param("a", a)
            .with_param("b", b)
        }
        "scalar_cubic_marginal" => {
            config.check_dimension(1)?;
            DynamicalSystem::new(&config.name, 1, |x: &Vector| Vector::from_element(1, -x[0].powi(3)))?
                .with_jacobian(|x: &Vector| Matrix::from_element(1, 1, -3.0 * x[0] * x[0]))
        }
        "rotation" => {
            config.check_dimension(2)?;
            let omega = match config.params.get("omega") {
                Some(&w) if w.is_finite() => w,
                Some(&w) => return Err(config.invalid(format!("omega must be finite, got {w}"))),
                None => return Err(config.invalid("missing parameter omega")),
            };
            let a = Matrix::from_row_slice(2, 2, &[0.0, omega, -omega, 0.0]);
            let jac = a.clone();
            DynamicalSystem::new(&config.name, 2, move |x: &Vector| &a * x)?
                .with_jacobian(move |_x: &Vector| jac.clone())
                .with_param("omega", omega)
        }
        "diag_dominant_nl" => diag_dominant(config)?,
        other => return Err(Error::UnknownSystem(other.to_string())),
    };
    Ok(if config.finite_difference {
        sys.with_jacobian_source(JacobianSource::finite_difference())
    } else {
        sys
    })
}

fn linear(config: &SystemConfig) -> Result<DynamicalSystem> {
    let rows = config
        .matrix
        .as_ref()
        .ok_or_else(|| config.invalid("missing matrix"))?;
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(config.invalid("matrix must be square and non-empty"));
    }
    let a = Matrix::from_fn(n, n, |i, j| rows[i][j]);
    if a.iter().any(|v| !v.is_finite()) {
        return Err(config.invalid("matrix entries must be finite"));
    }
    let b = match &config.offset {
        Some(b) if b.len() != n => return Err(config.invalid("offset length must match matrix")),
        Some(b) => Vector::from_row_slice(b),
        None => Vector::zeros(n),
    };
    if b.iter().any(|v| !v.is_finite()) {
        return Err(config.invalid("offset entries must be finite"));
    }
    config.check_dimension(n)?;
    let jac = a.clone();
    Ok(DynamicalSystem::new(&config.name, n, move |x: &Vector| &a * x + &b)?.with_jacobian(move |_x: &Vector| jac.clone()))
}

fn diag_dominant(config: &SystemConfig) -> Result<DynamicalSystem> {
    let eps = config.positive("epsilon")?;
    let rates: Vec<f64> = match (&config.rates, config.params.get("a")) {
        (Some(r), _) => r.clone(),
        (None, Some(_)) => {
            let n = config
                .dimension
                .ok_or_else(|| config.invalid("uniform rate a needs an explicit dimension"))?;
            vec![config.positive("a")?; n]
        }
        (None, None) => return Err(config.invalid("missing rates (or parameter a with dimension)")),
    };
    let n = rates.len();
    if n == 0 {
        return Err(config.invalid("dimension must be positive"));
    }
    config.check_dimension(n)?;
    if let Some(bad) = rates.iter().find(|&&a| !(a > eps && a.is_finite())) {
        return Err(config.invalid(format!("every rate must exceed epsilon = {eps}, got {bad}")));
    }
    let min_rate = rates.iter().copied().fold(f64::INFINITY, f64::min);
    let rates_v = rates.clone();
    let rates_j = rates;
    Ok(DynamicalSystem::new(&config.name, n, move |x: &Vector| {
        Vector::from_fn(n, |i, _| -rates_v[i] * x[i] + eps * x[(i + 1) % n].tanh())
    })?
    .with_jacobian(move |x: &Vector| {
        let mut j = Matrix::zeros(n, n);
        for i in 0..n {
            let next = (i + 1) % n;
            let sech = 1.0 / x[next].cosh();
            j[(i, i)] -= rates_j[i];
            j[(i, next)] += eps * sech * sech;
        }
        j
    })
    .with_param("epsilon", eps)
    .with_param("min_rate", min_rate))
}
