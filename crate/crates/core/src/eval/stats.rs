use std::fmt;

use serde::{Deserialize, Serialize};

pub const Z_95: f64 = 1.96;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("invalid counts: x={x}, n={n}")]
pub struct InvalidCounts {
    pub x: usize,
    pub n: usize,
}

/// Adjusted center and half-width of an Agresti–Coull interval, both as
/// unrounded percentages. `Display` rounds to two decimals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub center: f64,
    pub halfwidth: f64,
}

impl Interval {
    pub fn rounded(self) -> (f64, f64) {
        let r = |v: f64| (v * 100.0).round() / 100.0;
        (r(self.center), r(self.halfwidth))
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.2} ± {:.2}", self.center, self.halfwidth)
    }
}

pub fn agresti_coull(x: usize, n: usize, z: f64) -> Result<Interval, InvalidCounts> {
    if n == 0 || x > n || !z.is_finite() || z <= 0.0 {
        return Err(InvalidCounts { x, n });
    }
    let z2 = z * z;
    let n_t = n as f64 + z2;
    let p_t = (x as f64 + z2 / 2.0) / n_t;
    let half = z * (p_t * (1.0 - p_t) / n_t).sqrt();
    Ok(Interval { center: 100.0 * p_t, halfwidth: 100.0 * half })
}
