//! Quadrature engines, compensated summation and the incomplete elliptic
//! integral of the first kind.
//!
//! Integrand callbacks must be pure: engines may evaluate them in any order
//! and results are deterministic for fixed inputs and tolerance.

mod elliptic;
mod gauss_kronrod;
mod sum;
mod tanh_sinh;

pub use elliptic::{carlson_rf, incomplete_elliptic_f};
pub use gauss_kronrod::adaptive_gauss_kronrod;
pub use sum::{compensated_sum, CompensatedSum};
pub use tanh_sinh::tanh_sinh;

use std::cell::RefCell;
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Default relative tolerance for SNR integrals.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Default evaluation budget of a single one-dimensional integration.
pub const DEFAULT_MAX_EVALS: usize = 200_000;

/// Outcome of a successful quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: usize,
}

/// Tuning knobs for the one-dimensional engine.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadOptions {
    /// Relative tolerance on the integral value.
    pub tol: f64,
    /// Absolute floor below which the error is always accepted.
    pub abs_tol: f64,
    pub max_evals: usize,
    /// Interior points where the integrand changes character (peaks, kinks).
    pub breakpoints: Vec<f64>,
}

impl QuadOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            tol,
            abs_tol: 0.0,
            max_evals: DEFAULT_MAX_EVALS,
            breakpoints: Vec::new(),
        }
    }

    pub fn breakpoints(mut self, points: impl IntoIterator<Item = f64>) -> Self {
        self.breakpoints.extend(points);
        self
    }
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self::with_tol(DEFAULT_TOL)
    }
}

fn check_interval(a: f64, b: f64, tol: f64) -> Result<()> {
    if !(a.is_finite() && b.is_finite()) || a > b {
        return Err(Error::Domain(format!("invalid interval [{a}, {b}]")));
    }
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
    }
    Ok(())
}

/// Integrates `f` over `[a, b]` to relative tolerance `tol`.
///
/// Runs adaptive Gauss-Kronrod first and falls back to tanh-sinh when the
/// subdivision budget runs out, which is what happens with integrable
/// endpoint singularities.
pub fn integrate_1d<F>(f: F, a: f64, b: f64, tol: f64) -> Result<QuadratureResult>
where
    F: Fn(f64) -> f64,
{
    integrate_1d_with(f, a, b, &QuadOptions::with_tol(tol))
}

pub fn integrate_1d_with<F>(f: F, a: f64, b: f64, opts: &QuadOptions) -> Result<QuadratureResult>
where
    F: Fn(f64) -> f64,
{
    check_interval(a, b, opts.tol)?;
    if a == b {
        return Ok(QuadratureResult {
            value: 0.0,
            error_estimate: 0.0,
            evaluations: 0,
        });
    }
    let mut breaks: Vec<f64> = opts.breakpoints.iter().copied().filter(|x| *x > a && *x < b).collect();
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();

    // Keep some budget in reserve for the fallback engine.
    let gk_budget = opts.max_evals / 2;
    match adaptive_gauss_kronrod(&f, a, b, &breaks, opts.tol, opts.abs_tol, gk_budget) {
        Ok(r) => Ok(r),
        Err(Error::NoConvergence {
            estimate,
            error_estimate,
            evaluations,
        }) => {
            let mut edges = Vec::with_capacity(breaks.len() + 2);
            edges.push(a);
            edges.extend_from_slice(&breaks);
            edges.push(b);
            let mut total = QuadratureResult {
                value: 0.0,
                error_estimate: 0.0,
                evaluations,
            };
            for w in edges.windows(2) {
                let part = tanh_sinh(&f, w[0], w[1], opts.tol * 0.5, opts.max_evals - gk_budget);
                match part {
                    Ok(p) => {
                        total.value += p.value;
                        total.error_estimate += p.error_estimate;
                        total.evaluations += p.evaluations;
                    }
                    Err(_) => {
                        return Err(Error::NoConvergence {
                            estimate,
                            error_estimate,
                            evaluations: total.evaluations,
                        })
                    }
                }
            }
            let accepted = opts.tol * total.value.abs() + opts.abs_tol;
            if total.error_estimate <= accepted.max(error_floor(total.value)) {
                Ok(total)
            } else if total.error_estimate < error_estimate {
                Err(Error::NoConvergence {
                    estimate: total.value,
                    error_estimate: total.error_estimate,
                    evaluations: total.evaluations,
                })
            } else {
                Err(Error::NoConvergence {
                    estimate,
                    error_estimate,
                    evaluations: total.evaluations,
                })
            }
        }
        Err(e) => Err(e),
    }
}

/// Rounding floor for an accumulated integral value.
pub(crate) fn error_floor(value: f64) -> f64 {
    50.0 * f64::EPSILON * value.abs()
}

/// Nested adaptive quadrature over an axis-aligned rectangle.
///
/// The outer integral runs over `z`, the inner over `y`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RectOptions {
    pub tol: f64,
    pub y_breaks: Vec<f64>,
    pub z_breaks: Vec<f64>,
}

pub fn integrate_2d_rect<F>(f: F, y_range: (f64, f64), z_range: (f64, f64), tol: f64) -> Result<QuadratureResult>
where
    F: Fn(f64, f64) -> f64,
{
    integrate_2d_rect_with(
        f,
        y_range,
        z_range,
        &RectOptions {
            tol,
            ..Default::default()
        },
    )
}

pub fn integrate_2d_rect_with<F>(
    f: F,
    y_range: (f64, f64),
    z_range: (f64, f64),
    opts: &RectOptions,
) -> Result<QuadratureResult>
where
    F: Fn(f64, f64) -> f64,
{
    let inner = QuadOptions::with_tol(opts.tol * 0.1).breakpoints(opts.y_breaks.iter().copied());
    let outer = QuadOptions::with_tol(opts.tol).breakpoints(opts.z_breaks.iter().copied());
    nested(&f, y_range, z_range, &inner, &outer)
}

/// Integrates `f(r, zeta)` over the disk of radius `radius` centred at the
/// origin. `f` must already include the polar Jacobian `r`.
pub fn polar_disk_integrate<F>(f: F, radius: f64, tol: f64) -> Result<QuadratureResult>
where
    F: Fn(f64, f64) -> f64,
{
    polar_disk_integrate_with(f, radius, tol, &[], &[])
}

pub fn polar_disk_integrate_with<F>(
    f: F,
    radius: f64,
    tol: f64,
    r_breaks: &[f64],
    zeta_breaks: &[f64],
) -> Result<QuadratureResult>
where
    F: Fn(f64, f64) -> f64,
{
    if !(radius >= 0.0) {
        return Err(Error::Domain(format!("disk radius must be >= 0, got {radius}")));
    }
    let inner = QuadOptions::with_tol(tol * 0.1).breakpoints(r_breaks.iter().copied());
    let outer = QuadOptions::with_tol(tol).breakpoints(zeta_breaks.iter().copied());
    nested(&f, (0.0, radius), (0.0, 2.0 * PI), &inner, &outer)
}

fn nested<F>(
    f: &F,
    inner_range: (f64, f64),
    outer_range: (f64, f64),
    inner: &QuadOptions,
    outer: &QuadOptions,
) -> Result<QuadratureResult>
where
    F: Fn(f64, f64) -> f64,
{
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let inner_evals = RefCell::new(0usize);
    let inner_err = RefCell::new(0.0f64);
    let outer_fn = |z: f64| -> f64 {
        if failure.borrow().is_some() {
            return 0.0;
        }
        match integrate_1d_with(|y| f(y, z), inner_range.0, inner_range.1, inner) {
            Ok(r) => {
                *inner_evals.borrow_mut() += r.evaluations;
                let mut e = inner_err.borrow_mut();
                *e = e.max(r.error_estimate);
                r.value
            }
            Err(e) => {
                *failure.borrow_mut() = Some(e);
                0.0
            }
        }
    };
    let result = integrate_1d_with(outer_fn, outer_range.0, outer_range.1, outer);
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    let width = outer_range.1 - outer_range.0;
    let mut r = result?;
    r.error_estimate += width * inner_err.into_inner();
    r.evaluations = inner_evals.into_inner();
    Ok(r)
}
