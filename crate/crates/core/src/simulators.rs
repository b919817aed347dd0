//! Built-in test simulators.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// A deterministic scalar-output computer model on `[0,1]^d`.
pub trait Simulator: Send + Sync {
    fn name(&self) -> &str;
    fn input_dim(&self) -> usize;
    fn evaluate(&self, x: &[f64]) -> Result<f64>;
    fn deterministic(&self) -> bool {
        true
    }
}

fn check_unit(x: &[f64], d: usize) -> Result<()> {
    if x.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: x.len(),
        });
    }
    if let Some(v) = x.iter().find(|v| !(0.0..=1.0).contains(*v)) {
        return Err(Error::Domain(format!("input {v} outside [0, 1]")));
    }
    Ok(())
}

/// `log(x + 0.1) + sin(5πx)` on `[0, 1]`.
pub fn onedim_test(x: f64) -> Result<f64> {
    check_unit(&[x], 1)?;
    Ok((x + 0.1).ln() + (5.0 * PI * x).sin())
}

const H6_ALPHA: [f64; 4] = [1.0, 1.2, 3.0, 3.2];
const H6_A: [[f64; 6]; 4] = [
    [10.0, 3.0, 17.0, 3.5, 1.7, 8.0],
    [0.05, 10.0, 17.0, 0.1, 8.0, 14.0],
    [3.0, 3.5, 1.7, 10.0, 17.0, 8.0],
    [17.0, 8.0, 0.05, 10.0, 0.1, 14.0],
];
const H6_P: [[f64; 6]; 4] = [
    [0.1312, 0.1696, 0.5569, 0.0124, 0.8283, 0.5886],
    [0.2329, 0.4135, 0.8307, 0.3736, 0.1004, 0.9991],
    [0.2348, 0.1451, 0.3522, 0.2883, 0.3047, 0.6650],
    [0.4047, 0.8828, 0.8732, 0.5743, 0.1091, 0.0381],
];
/// Sum of every coefficient above; guards against an accidental edit.
const H6_CHECKSUM: f64 = 8.4 + 184.7 + 10.1095;

/// Location of the global minimum of [`hartman6`].
pub const HARTMAN6_ARGMIN: [f64; 6] = [0.20169, 0.150011, 0.476874, 0.275332, 0.311652, 0.6573];
pub const HARTMAN6_MIN: f64 = -3.32237;

fn hartman6_checksum() -> f64 {
    let a: f64 = H6_A.iter().flatten().sum();
    let p: f64 = H6_P.iter().flatten().sum();
    H6_ALPHA.iter().sum::<f64>() + a + p
}

/// The standard four-term Hartmann function on `[0,1]^6`:
/// `−Σᵢ αᵢ exp(−Σⱼ Aᵢⱼ (xⱼ − Pᵢⱼ)²)`.
pub fn hartman6(x: &[f64]) -> Result<f64> {
    check_unit(x, 6)?;
    debug_assert!((hartman6_checksum() - H6_CHECKSUM).abs() < 1e-9);
    let mut total = 0.0;
    for i in 0..4 {
        let inner: f64 = (0..6).map(|j| H6_A[i][j] * (x[j] - H6_P[i][j]).powi(2)).sum();
        total -= H6_ALPHA[i] * (-inner).exp();
    }
    Ok(total)
}

/// Low-rank time-series toy on `[0,1]^q`, `t = 1..L`:
/// `y_t = x₁ sin(2πt/L) + (1 − x₁) cos(πx₂t/L) + Σ_{k≥3} ½ x_k sin(2π(k−1)t/L)`.
/// With `q = 1`, `x₂` is taken as 0.
pub fn dynamic_toy(x: &[f64], len: usize) -> Result<Vec<f64>> {
    if len < 2 {
        return Err(Error::InvalidLength(len));
    }
    if x.is_empty() {
        return Err(Error::InvalidSize("dynamic_toy needs q >= 1".into()));
    }
    check_unit(x, x.len())?;
    let l = len as f64;
    let x1 = x[0];
    let x2 = x.get(1).copied().unwrap_or(0.0);
    Ok((1..=len)
        .map(|t| {
            let t = t as f64;
            let mut y = x1 * (2.0 * PI * t / l).sin() + (1.0 - x1) * (PI * x2 * t / l).cos();
            for (k, xk) in x.iter().enumerate().skip(2) {
                y += 0.5 * xk * (2.0 * PI * k as f64 * t / l).sin();
            }
            y
        })
        .collect())
}

pub struct OneDimTest;

impl Simulator for OneDimTest {
    fn name(&self) -> &str {
        "onedim"
    }
    fn input_dim(&self) -> usize {
        1
    }
    fn evaluate(&self, x: &[f64]) -> Result<f64> {
        check_unit(x, 1)?;
        onedim_test(x[0])
    }
}

pub struct Hartman6;

impl Simulator for Hartman6 {
    fn name(&self) -> &str {
        "hartman6"
    }
    fn input_dim(&self) -> usize {
        6
    }
    fn evaluate(&self, x: &[f64]) -> Result<f64> {
        hartman6(x)
    }
}

/// Scalar simulators by CLI name.
pub fn by_name(name: &str) -> Result<Box<dyn Simulator>> {
    match name {
        "onedim" => Ok(Box::new(OneDimTest)),
        "hartman6" => Ok(Box::new(Hartman6)),
        other => Err(Error::Domain(format!(
            "unknown simulator '{other}' (expected onedim or hartman6)"
        ))),
    }
}
