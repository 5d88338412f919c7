use super::norm::{induced_norm, NormSpec};
use super::{ensure_finite, ensure_square, Matrix};
use crate::error::{Error, Result};

/// Step sizes used when the caller has no particular schedule in mind.
pub const DEFAULT_H_SCHEDULE: [f64; 4] = [1e-3, 1e-4, 1e-5, 1e-6];

/// Below this `h * ||A||` the numerator `||I + hA|| - 1` is dominated by
/// rounding in the leading `1`.
const UNDERFLOW_SCALE: f64 = 1e-12;

/// Result of evaluating the measure from its limit definition.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleEstimate {
    /// `(||I + hA|| - 1) / h` at the smallest `h`.
    pub quotient: f64,
    /// Richardson extrapolation over the last two `h` (first-order error
    /// model). Equal to `quotient` when the schedule has one entry.
    pub extrapolated: f64,
    pub h_min: f64,
    /// Every `(h, quotient)` pair, in schedule order.
    pub quotients: Vec<(f64, f64)>,
}

/// Evaluates `(||I + hA|| - 1) / h` along a decreasing schedule of `h`.
pub fn matrix_measure_limit_oracle(
    a: &Matrix,
    norm: &NormSpec,
    h_schedule: &[f64],
) -> Result<OracleEstimate> {
    ensure_square(a)?;
    ensure_finite(a, "matrix")?;
    if h_schedule.is_empty() {
        return Err(Error::EmptySchedule);
    }
    let decreasing = h_schedule.windows(2).all(|w| w[1] < w[0]);
    if !decreasing || h_schedule.iter().any(|&h| !(h > 0.0 && h.is_finite())) {
        return Err(Error::InvalidSchedule);
    }

    let n = a.nrows();
    let a_norm = induced_norm(a, norm)?;
    let identity = Matrix::identity(n, n);
    let mut quotients = Vec::with_capacity(h_schedule.len());
    for &h in h_schedule {
        if a_norm > 0.0 && h * a_norm < UNDERFLOW_SCALE {
            return Err(Error::Underflow { h });
        }
        let shifted = &identity + a * h;
        let q = (induced_norm(&shifted, norm)? - 1.0) / h;
        quotients.push((h, q));
    }

    let &(h_min, quotient) = quotients.last().expect("non-empty schedule");
    let extrapolated = match quotients.len() {
        1 => quotient,
        len => {
            let (h1, d1) = quotients[len - 2];
            let (h2, d2) = quotients[len - 1];
            d2 + (d2 - d1) * h2 / (h1 - h2)
        }
    };
    Ok(OracleEstimate {
        quotient,
        extrapolated,
        h_min,
        quotients,
    })
}
