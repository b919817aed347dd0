pub mod design;
pub mod diagnose;
pub mod ei;
pub mod gp;
pub mod localgp;
pub mod svdgp;

use krigkit::{Bounds, Design};

use crate::failure::Failure;

/// Rows as a design, mapped through `bounds` when present.
pub(crate) fn to_unit(rows: &[Vec<f64>], bounds: Option<&Bounds>) -> Result<Design, Failure> {
    Ok(match bounds {
        Some(b) => krigkit::design::scale_to_unit(rows, b)?,
        None => Design::from_rows(rows)?,
    })
}

/// `(mean, variance) → [mean, variance, mean − 2s, mean + 2s]`.
pub(crate) fn band(mean: f64, variance: f64) -> [f64; 4] {
    let s = variance.max(0.0).sqrt();
    [mean, variance, mean - 2.0 * s, mean + 2.0 * s]
}
