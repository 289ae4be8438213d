//! Linear surface (a single column, `m_y = 1`): integral SNR, the
//! angular-span closed form and its large-length limit.

use std::f64::consts::{FRAC_PI_4, PI};

use crate::channel::{exact_max_snr, kernel_weight, Scenario};
use crate::error::{domain, Error, Result};
use crate::geometry::{distance_ratio, Placement};
use crate::numerics::{incomplete_elliptic_f, integrate_1d_with, QuadOptions};
use crate::pattern::center_gain;
use crate::regime::{Flagged, RegimeWarning};
use crate::upa::{continuous_kernel, foot, ReportEntry, SnrReport};
use crate::upw::{upw_snr, UpwParams};

/// Largest distance ratio for which the small-ratio closed form is used
/// without a warning.
pub const ULA_RHO_LIMIT: f64 = 0.2;

/// Angles subtended at an endpoint by the two halves of the array.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngularSpan {
    pub alpha1: f64,
    pub alpha2: f64,
}

impl AngularSpan {
    pub fn total(&self) -> f64 {
        self.alpha1 + self.alpha2
    }
}

pub fn angular_span(range: f64, zenith: f64, length_z: f64) -> Result<AngularSpan> {
    if !(range > 0.0) || !(length_z > 0.0) {
        return Err(domain(format!(
            "range and array length must be positive, got ({range}, {length_z})"
        )));
    }
    if !(zenith > 0.0 && zenith < PI) {
        return Err(domain(format!("zenith {zenith} puts the endpoint on the array axis")));
    }
    let (s, c) = zenith.sin_cos();
    let h = 0.5 * length_z;
    let across = range * s;
    Ok(AngularSpan {
        alpha1: ((h + range * c) / across).atan(),
        alpha2: ((h - range * c) / across).atan(),
    })
}

fn require_linear(scn: &Scenario) -> Result<()> {
    if scn.panel().count_y() != 1 {
        return Err(Error::Config(format!(
            "linear analysis needs a single column, got {} columns",
            scn.panel().count_y()
        )));
    }
    Ok(())
}

/// Integral-form SNR along the array axis: the planar form with one
/// transverse cell of width `d`.
pub fn ula_integral_snr(scn: &Scenario, tol: f64) -> Result<f64> {
    require_linear(scn)?;
    let q = scn.pattern().exponent();
    let h = 0.5 * scn.panel().length_z();
    let (bs, user) = (scn.bs(), scn.user());
    let opts = QuadOptions::with_tol(tol).breakpoints([foot(bs).1, foot(user).1]);
    let line = integrate_1d_with(
        |z| kernel_weight(continuous_kernel(bs, 0.0, z) * continuous_kernel(user, 0.0, z), q),
        -h,
        h,
        &opts,
    )?
    .value;
    let d = scn.panel().spacing();
    let a = center_gain(scn.pattern(), scn.wavelength(), bs);
    let b = center_gain(scn.pattern(), scn.wavelength(), user);
    Ok(scn.transmit_snr() * a * b / (d * d) * line * line)
}

/// Nearer endpoint first.
fn near_far(scn: &Scenario) -> Result<(Placement, Placement, f64)> {
    let ratio = distance_ratio(scn.bs().range(), scn.user().range())?;
    Ok(if scn.bs().range() <= scn.user().range() {
        (*scn.bs(), *scn.user(), ratio.rho)
    } else {
        (*scn.user(), *scn.bs(), ratio.rho)
    })
}

fn require_cosine(scn: &Scenario) -> Result<()> {
    if scn.pattern().exponent() != 0.5 {
        return Err(domain("linear closed form needs the cosine pattern"));
    }
    Ok(())
}

/// `λ⁴ P̄ Ψ_far cos φ_near / (π⁴ d² r_far²)`.
fn ula_scale(scn: &Scenario, near: &Placement, far: &Placement) -> f64 {
    let d = scn.panel().spacing();
    scn.wavelength().powi(4) * scn.transmit_snr() * far.direction().cos_x() * near.direction().azimuth().cos()
        / (PI.powi(4) * d * d * far.range() * far.range())
}

/// Closed form in the angular span of the nearer endpoint; flagged when the
/// distance ratio is not small.
pub fn ula_closed_snr(scn: &Scenario) -> Result<Flagged<f64>> {
    require_linear(scn)?;
    require_cosine(scn)?;
    let (near, far, rho) = near_far(scn)?;
    let span = angular_span(near.range(), near.direction().zenith(), scn.panel().length_z())?;
    let f = incomplete_elliptic_f(0.5 * span.alpha1, 2.0)? + incomplete_elliptic_f(0.5 * span.alpha2, 2.0)?;
    let value = 0.25 * ula_scale(scn, &near, &far) * f * f;
    let warnings = if rho > ULA_RHO_LIMIT {
        vec![RegimeWarning::DistanceRatioTooLarge {
            rho,
            limit: ULA_RHO_LIMIT,
        }]
    } else {
        Vec::new()
    };
    Ok(Flagged::with_warnings(value, warnings))
}

/// `[F(π/4 | 2)]²`, the limit constant of the linear closed form.
pub fn ula_limit_constant() -> Result<f64> {
    Ok(incomplete_elliptic_f(FRAC_PI_4, 2.0)?.powi(2))
}

/// Limit of the closed form as the array length grows without bound.
pub fn ula_asymptotic_snr(scn: &Scenario) -> Result<f64> {
    require_linear(scn)?;
    require_cosine(scn)?;
    let (near, far, _) = near_far(scn)?;
    Ok(ula_limit_constant()? * ula_scale(scn, &near, &far))
}

/// Linear-array report; the disk bounds do not apply and are left missing.
pub fn ula_report(scn: &Scenario, tol: f64) -> SnrReport {
    let na = || ReportEntry::NotApplicable("disk bounds are not defined for a linear array".into());
    SnrReport {
        exact: ReportEntry::Value(exact_max_snr(scn)),
        integral: ReportEntry::from_result(ula_integral_snr(scn, tol)),
        lower: na(),
        upper: na(),
        asymptote: ReportEntry::from_result(ula_asymptotic_snr(scn)),
        upw: ReportEntry::Value(upw_snr(scn, &UpwParams::for_wavelength(scn.wavelength()))),
        closed: ReportEntry::from_result(ula_closed_snr(scn).map(|f| f.value)),
    }
}
