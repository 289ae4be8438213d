//! Element directivity `γ' cos^{2q'}(ε)`, effective aperture, the Friis
//! power ratio and the per-element channel power gains.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{domain, Result};
use crate::geometry::{miso_kernel, norm, normalized_sq_distance, sub, BsArray, IrsPanel, Placement, Point3};
use crate::numerics::{integrate_1d, QuadratureResult};

/// Peak gain compatible with power conservation: `2(2q' + 1)`.
pub fn gamma_prime(q: f64) -> Result<f64> {
    if !(q >= 0.0) || !q.is_finite() {
        return Err(domain(format!("directivity exponent must be >= 0, got {q}")));
    }
    Ok(2.0 * (2.0 * q + 1.0))
}

/// Element gain family with directivity exponent `q'`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainPattern {
    q: f64,
    peak: f64,
}

impl GainPattern {
    pub fn new(q: f64) -> Result<Self> {
        Ok(Self {
            q,
            peak: gamma_prime(q)?,
        })
    }

    /// `q' = 0`, peak gain 2.
    pub fn semi_isotropic() -> Self {
        Self { q: 0.0, peak: 2.0 }
    }

    /// `q' = 1/2`, projected-aperture cosine pattern, peak gain 4.
    pub fn cosine() -> Self {
        Self { q: 0.5, peak: 4.0 }
    }

    /// `q' = 1`, peak gain 6.
    pub fn cosine_squared() -> Self {
        Self { q: 1.0, peak: 6.0 }
    }

    pub fn exponent(&self) -> f64 {
        self.q
    }

    pub fn peak_gain(&self) -> f64 {
        self.peak
    }

    /// Maximum effective aperture in m².
    pub fn effective_aperture(&self, wavelength: f64) -> EffectiveAperture {
        EffectiveAperture(wavelength * wavelength * self.peak / (4.0 * PI))
    }

    /// `γ' c^{2q'}` for an incidence cosine `c`.
    #[inline]
    pub fn gain_from_cosine(&self, cos_incidence: f64) -> f64 {
        if cos_incidence <= 0.0 {
            return 0.0;
        }
        self.peak * pow_2q(cos_incidence, self.q)
    }
}

/// `x^{2q}` with the common exponents special-cased.
#[inline]
pub(crate) fn pow_2q(x: f64, q: f64) -> f64 {
    if q == 0.0 {
        1.0
    } else if q == 0.5 {
        x
    } else if q == 1.0 {
        x * x
    } else {
        x.powf(2.0 * q)
    }
}

/// Maximum effective aperture of one element, square metres.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct EffectiveAperture(pub f64);

/// Element gain at elevation `elevation` from the element normal. The
/// azimuth `_azimuth` never changes the value.
pub fn element_gain(pattern: &GainPattern, elevation: f64, _azimuth: f64) -> f64 {
    if (0.0..FRAC_PI_2).contains(&elevation) {
        pattern.peak * elevation.cos().powf(2.0 * pattern.q)
    } else {
        0.0
    }
}

/// Integrates the pattern over the front hemisphere; equals `4π` for every
/// valid pattern.
pub fn hemisphere_power(pattern: &GainPattern, tol: f64) -> Result<QuadratureResult> {
    let elevation = integrate_1d(|e: f64| element_gain(pattern, e, 0.0) * e.sin(), 0.0, FRAC_PI_2, tol)?;
    let scale = 2.0 * PI;
    Ok(QuadratureResult {
        value: scale * elevation.value,
        error_estimate: scale * elevation.error_estimate,
        evaluations: elevation.evaluations,
    })
}

/// Received-to-transmitted power ratio `(λ / 4πr)² G_t G_e`.
pub fn friis_ratio(wavelength: f64, distance: f64, tx_gain: f64, rx_gain: f64) -> Result<f64> {
    if !(distance > 0.0) {
        return Err(domain(format!("link distance must be positive, got {distance}")));
    }
    let a = wavelength / (4.0 * PI * distance);
    Ok(a * a * tx_gain * rx_gain)
}

/// Cosine between the propagation direction `src -> element` and the
/// surface normal.
pub fn incidence_cosine(src: &Placement, element: Point3) -> Result<f64> {
    point_incidence_cosine(src.cartesian(), element)
}

pub(crate) fn point_incidence_cosine(src: Point3, element: Point3) -> Result<f64> {
    let v = sub(src, element);
    let n = norm(v);
    if n == 0.0 {
        return Err(domain("source coincides with the element"));
    }
    Ok(v[0] / n)
}

fn require_front(src: &Placement) -> Result<()> {
    if !(src.direction().cos_x() > 0.0) {
        return Err(domain("placement is behind the surface (cos_x <= 0)"));
    }
    Ok(())
}

/// Power gain between `src` and element `(i_y, i_z)` in the closed
/// near-field form.
pub fn channel_power_gain(
    pattern: &GainPattern,
    wavelength: f64,
    src: &Placement,
    panel: &IrsPanel,
    i_y: i64,
    i_z: i64,
) -> Result<f64> {
    require_front(src)?;
    panel.element_position(i_y, i_z)?;
    let r = src.range();
    let eps = panel.spacing() / r;
    let kernel = normalized_sq_distance(src.direction(), eps, i_y as f64, i_z as f64);
    Ok(center_gain(pattern, wavelength, src) / kernel.powf(pattern.q + 1.0))
}

/// `(λ / 4πr)² γ' Ψ^{2q'}`: the gain towards the surface centre.
pub(crate) fn center_gain(pattern: &GainPattern, wavelength: f64, src: &Placement) -> f64 {
    let a = wavelength / (4.0 * PI * src.range());
    a * a * pattern.gain_from_cosine(src.direction().cos_x())
}

/// Power gain between BS antenna `(n_y, n_z)` and element `(i_y, i_z)`.
#[allow(clippy::too_many_arguments)]
pub fn miso_channel_power_gain(
    pattern: &GainPattern,
    wavelength: f64,
    bs: &BsArray,
    n_y: i64,
    n_z: i64,
    panel: &IrsPanel,
    i_y: i64,
    i_z: i64,
) -> Result<f64> {
    require_front(bs.center())?;
    // Index validation.
    bs.antenna_position(n_y, n_z)?;
    panel.element_position(i_y, i_z)?;
    let kernel = miso_kernel(bs, n_y, n_z, panel, i_y, i_z);
    Ok(center_gain(pattern, wavelength, bs.center()) / kernel.powf(pattern.q + 1.0))
}
