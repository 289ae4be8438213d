//! Far-field uniform plane wave baseline: array factor and the square power
//! scaling law.

use std::f64::consts::PI;

use crate::channel::Scenario;
use crate::error::{domain, Result};
use crate::geometry::{Direction, IrsPanel};

/// Reference channel gain at 1 m.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UpwParams {
    pub beta0: f64,
}

impl UpwParams {
    pub fn new(beta0: f64) -> Result<Self> {
        if !(beta0 > 0.0) || !beta0.is_finite() {
            return Err(domain(format!("reference gain must be positive, got {beta0}")));
        }
        Ok(Self { beta0 })
    }

    /// `β0 = (λ / 4π)²`, the centre-element Friis gain at 1 m.
    pub fn for_wavelength(wavelength: f64) -> Self {
        Self {
            beta0: (wavelength / (4.0 * PI)).powi(2),
        }
    }
}

/// `sin(n x) / sin(x)`, continuous across the zeros of `sin x`.
fn dirichlet(n: usize, x: f64) -> f64 {
    let n = n as f64;
    let s = x.sin();
    if s.abs() < 1e-9 {
        // L'Hôpital: n cos(n x) / cos(x)
        return n * (n * x).cos() / x.cos();
    }
    (n * x).sin() / s
}

/// Normalized array factor of the panel towards `dir`. Signed; equals one at
/// broadside.
pub fn array_factor(panel: &IrsPanel, dir: &Direction, wavelength: f64) -> f64 {
    let kd = 2.0 * PI / wavelength * panel.spacing();
    dirichlet(panel.count_y(), 0.5 * kd * dir.cos_y()) * dirichlet(panel.count_z(), 0.5 * kd * dir.cos_z())
        / panel.element_count() as f64
}

/// `M² β0² P̄ / (r_q² r_p²) · G_e(q) AF(q) · G_e(p) AF(p)`.
pub fn upw_snr(scn: &Scenario, params: &UpwParams) -> f64 {
    let panel = scn.panel();
    let m = panel.element_count() as f64;
    let pat = scn.pattern();
    let side = |p: &crate::geometry::Placement| {
        pat.gain_from_cosine(p.direction().cos_x()) * array_factor(panel, p.direction(), scn.wavelength())
    };
    let (rq, rp) = (scn.bs().range(), scn.user().range());
    m * m * params.beta0 * params.beta0 * scn.transmit_snr() / (rq * rq * rp * rp) * side(scn.bs()) * side(scn.user())
}
