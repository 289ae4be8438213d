use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};
use crate::numerics::{error_floor, CompensatedSum, QuadratureResult};

const MAX_LEVEL: u32 = 12;
const T_MAX: f64 = 6.5;
/// Coarser levels can agree by accident.
const MIN_LEVEL: u32 = 3;

/// Power-law model `v · (g / g_near)^(-β)` of the integrand next to one
/// endpoint, fitted on the closest evaluated node and the closest one at
/// least `FIT_SPREAD` times further out.
#[derive(Default)]
struct EndpointFit {
    /// Evaluated nodes keyed by the bits of their (positive) distance, which
    /// order like the distances themselves.
    nodes: BTreeMap<u64, f64>,
    /// Unresolvable nodes as `(weight, offset)`, continued by the fit.
    pending: Vec<(f64, f64)>,
}

const FIT_SPREAD: f64 = 4.0;

impl EndpointFit {
    fn record(&mut self, gap: f64, value: f64) {
        self.nodes.insert(gap.to_bits(), value);
    }

    fn model(&self) -> Option<(f64, f64, f64)> {
        let (&k1, &v1) = self.nodes.first_key_value()?;
        let g1 = f64::from_bits(k1);
        let (&k2, &v2) = self.nodes.range((FIT_SPREAD * g1).to_bits()..).next()?;
        let g2 = f64::from_bits(k2);
        if v1 == 0.0 || (v1 > 0.0) != (v2 > 0.0) {
            return None;
        }
        let beta = (v1 / v2).ln() / (g2 / g1).ln();
        if !(beta < 1.0) {
            return None;
        }
        Some((g1, v1, beta.max(0.0)))
    }

    /// Weighted sum over the unresolvable nodes under the current fit.
    fn pending_sum(&self) -> f64 {
        let Some((g1, v1, beta)) = self.model() else {
            return 0.0;
        };
        let mut acc = CompensatedSum::new();
        for &(w, g) in &self.pending {
            if g > 0.0 {
                acc.add(w * v1 * (g / g1).powf(-beta));
            }
        }
        acc.total()
    }
}

/// Offsets from an endpoint below this many ulps of the endpoint are
/// continued by the power-law fit rather than evaluated; closer nodes would
/// see `x` rounded by a sizeable fraction of their offset.
const RESOLVABLE_ULPS: f64 = 1e8;

fn ulp(x: f64) -> f64 {
    if x == 0.0 {
        f64::MIN_POSITIVE
    } else {
        f64::EPSILON * x.abs()
    }
}

/// Double-exponential (tanh-sinh) quadrature on `[a, b]`.
///
/// Abscissae are placed via their distance to the nearer endpoint. Near an
/// endpoint that `f64` cannot resolve, the integrand is continued by a power
/// law fitted on the closest evaluated nodes, which recovers the mass of
/// integrable singularities at a non-zero endpoint. Nodes where `f` is not
/// finite are dropped.
pub fn tanh_sinh<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, max_evals: usize) -> Result<QuadratureResult> {
    let half = 0.5 * (b - a);
    let mut evaluations = 0usize;
    let mut fits = [EndpointFit::default(), EndpointFit::default()];
    let limits = [RESOLVABLE_ULPS * ulp(a), RESOLVABLE_ULPS * ulp(b)];

    // Weighted contribution of the evaluated nodes of the pair at parameter
    // t > 0; None once the weights have underflowed.
    let node = |t: f64, evaluations: &mut usize, fits: &mut [EndpointFit; 2]| -> Option<f64> {
        let u = FRAC_PI_2 * t.sinh();
        let cosh_u = u.cosh();
        let weight = FRAC_PI_2 * t.cosh() / (cosh_u * cosh_u);
        if weight == 0.0 || !weight.is_finite() {
            return None;
        }
        // 1 - tanh(u) without cancellation.
        let gap = 2.0 / ((2.0 * u).exp() + 1.0);
        let offset = half * gap;
        let mut sum = 0.0;
        for (side, x) in [(0, a + offset), (1, b - offset)] {
            let fit = &mut fits[side];
            if offset > limits[side] && x > a && x < b {
                let v = f(x);
                *evaluations += 1;
                if v.is_finite() {
                    let actual = if side == 0 { x - a } else { b - x };
                    fit.record(actual, v);
                    sum += weight * v;
                }
            } else {
                fit.pending.push((weight, offset));
            }
        }
        Some(sum)
    };
    let total =
        |raw: &CompensatedSum, fits: &[EndpointFit; 2]| raw.total() + fits[0].pending_sum() + fits[1].pending_sum();

    let centre = {
        let v = f(0.5 * (a + b));
        evaluations += 1;
        if v.is_finite() {
            FRAC_PI_2 * v
        } else {
            0.0
        }
    };
    let mut step = 1.0;
    let mut raw = CompensatedSum::new();
    raw.add(centre);
    let mut k = 1u32;
    loop {
        let t = k as f64 * step;
        if t > T_MAX {
            break;
        }
        let Some(s) = node(t, &mut evaluations, &mut fits) else {
            break;
        };
        raw.add(s);
        k += 1;
    }
    let mut estimate = half * step * total(&raw, &fits);
    let mut previous_diff = f64::INFINITY;

    for level in 1..=MAX_LEVEL {
        step *= 0.5;
        let mut j = 1u64;
        loop {
            let t = j as f64 * step;
            if t > T_MAX {
                break;
            }
            let Some(s) = node(t, &mut evaluations, &mut fits) else {
                break;
            };
            raw.add(s);
            j += 2;
        }
        let next = half * step * total(&raw, &fits);
        let diff = (next - estimate).abs();
        estimate = next;
        // The level difference over-estimates the error of the finer sum;
        // extrapolating from its decay proved too optimistic near endpoints.
        let err = diff;
        previous_diff = diff;
        if level >= MIN_LEVEL && err <= (tol * estimate.abs()).max(error_floor(estimate)) {
            return Ok(QuadratureResult {
                value: estimate,
                error_estimate: err.max(error_floor(estimate)),
                evaluations,
            });
        }
        if evaluations > max_evals {
            break;
        }
    }
    Err(Error::NoConvergence {
        estimate,
        error_estimate: previous_diff,
        evaluations,
    })
}
