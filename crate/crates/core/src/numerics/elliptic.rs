//! Incomplete elliptic integral of the first kind.
//!
//! `F(angle | k) = ∫₀^angle dβ / sqrt(1 - k sin²β)`.
//!
//! **Convention:** `k` is the *parameter* (it multiplies `sin²β` directly),
//! not the modulus. Many libraries take the modulus `m = sqrt(k)` instead;
//! the analysis code always calls this with `k = 2`.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{domain, Result};

/// `1 - k sin²(angle)` within this of zero is taken to be exactly at the
/// singular endpoint (e.g. `angle = π/4`, `k = 2`). The input angle itself
/// cannot resolve the endpoint any better, and the integral has an infinite
/// slope there.
const ENDPOINT_SLACK: f64 = 8.0 * f64::EPSILON;

/// Carlson's symmetric integral `R_F(x, y, z)`.
///
/// Arguments must be non-negative with at most one of them zero.
pub fn carlson_rf(x: f64, y: f64, z: f64) -> Result<f64> {
    if x < 0.0 || y < 0.0 || z < 0.0 || x.is_nan() || y.is_nan() || z.is_nan() {
        return Err(domain(format!("R_F arguments must be >= 0, got ({x}, {y}, {z})")));
    }
    let zeros = [x, y, z].iter().filter(|v| **v == 0.0).count();
    if zeros > 1 {
        return Err(domain("R_F diverges when two arguments vanish"));
    }
    let (mut x, mut y, mut z) = (x, y, z);
    // Duplication until the arguments agree to ~1e-3; the fifth-order
    // series below then leaves a relative error near 1e-18.
    for _ in 0..100 {
        let mean = (x + y + z) / 3.0;
        let dx = 1.0 - x / mean;
        let dy = 1.0 - y / mean;
        let dz = 1.0 - z / mean;
        if dx.abs().max(dy.abs()).max(dz.abs()) < 1e-3 {
            let e2 = dx * dy - dz * dz;
            let e3 = dx * dy * dz;
            return Ok((1.0 - e2 / 10.0 + e3 / 14.0 + e2 * e2 / 24.0 - 3.0 * e2 * e3 / 44.0) / mean.sqrt());
        }
        let (sx, sy, sz) = (x.sqrt(), y.sqrt(), z.sqrt());
        let lambda = sx * (sy + sz) + sy * sz;
        x = 0.25 * (x + lambda);
        y = 0.25 * (y + lambda);
        z = 0.25 * (z + lambda);
    }
    unreachable!("R_F duplication converges geometrically")
}

/// `F(angle | k)` with `k` in the parameter convention.
///
/// Defined whenever the integrand stays real on `[0, angle]`. For `k > 1`
/// that means `|angle| <= asin(1/sqrt(k))`; the endpoint itself, where the
/// integrand has an inverse square-root singularity, is supported.
pub fn incomplete_elliptic_f(angle: f64, k: f64) -> Result<f64> {
    if !angle.is_finite() || !k.is_finite() {
        return Err(domain(format!("F({angle} | {k}) needs finite arguments")));
    }
    if angle < 0.0 {
        return incomplete_elliptic_f(-angle, k).map(|v| -v);
    }
    if angle == 0.0 {
        return Ok(0.0);
    }
    if angle > FRAC_PI_2 {
        if k >= 1.0 {
            return Err(domain(format!("F({angle} | {k}) crosses a non-integrable singularity")));
        }
        // F(angle + nπ) = F(angle) + 2n K(k).
        let n = (angle / PI).round();
        let rest = angle - n * PI;
        let complete = carlson_rf(0.0, 1.0 - k, 1.0)?;
        return Ok(2.0 * n * complete + incomplete_elliptic_f(rest, k)?);
    }
    let (s, c) = angle.sin_cos();
    let mut delta = 1.0 - k * s * s;
    if delta.abs() <= ENDPOINT_SLACK {
        delta = 0.0;
    } else if delta < 0.0 {
        return Err(domain(format!(
            "F({angle} | {k}) requires k sin²(angle) <= 1, got {}",
            k * s * s
        )));
    }
    if delta == 0.0 && c * c == 0.0 {
        return Err(domain(format!("F({angle} | {k}) diverges")));
    }
    Ok(s * carlson_rf(c * c, delta, 1.0)?)
}
