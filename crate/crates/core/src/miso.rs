//! Multi-antenna BS in the far field: integral SNR, disk bounds and the
//! boresight closed form for the cosine pattern.

use std::f64::consts::PI;

use crate::channel::{far_field_gain, kernel_weight, miso_exact_max_snr, Scenario};
use crate::error::{domain, Result};
use crate::geometry::BORESIGHT_MARGIN_LIMIT;
use crate::numerics::{integrate_2d_rect_with, polar_disk_integrate_with, RectOptions};
use crate::pattern::{center_gain, pow_2q};
use crate::regime::{Flagged, RegimeWarning};
use crate::upa::{
    angular_breaks, continuous_kernel, foot, radial_breaks, Asymptote, BoundRegime, ReportEntry, SnrBounds, SnrReport,
    UNBOUNDED_RADIUS_FACTOR,
};
use crate::upw::{upw_snr, UpwParams};

pub use crate::channel::far_field_warning;

/// `N P̄ c_q c_p / d⁴`.
fn prefactor(scn: &Scenario) -> Result<f64> {
    let n = scn.require_bs_array()?.antenna_count() as f64;
    let d = scn.panel().spacing();
    let b = center_gain(scn.pattern(), scn.wavelength(), scn.user());
    Ok(n * scn.transmit_snr() * far_field_gain(scn) * b / d.powi(4))
}

/// Integral-form MISO SNR; only the user-side kernel varies over the surface.
pub fn miso_integral_snr(scn: &Scenario, tol: f64) -> Result<f64> {
    let pre = prefactor(scn)?;
    let q = scn.pattern().exponent();
    let user = scn.user();
    let (hy, hz) = (0.5 * scn.panel().length_y(), 0.5 * scn.panel().length_z());
    let (fy, fz) = foot(user);
    let opts = RectOptions {
        tol,
        y_breaks: vec![fy],
        z_breaks: vec![fz],
    };
    let area = integrate_2d_rect_with(
        |y, z| kernel_weight(continuous_kernel(user, y, z), q),
        (-hy, hy),
        (-hz, hz),
        &opts,
    )?;
    Ok(pre * area.value * area.value)
}

/// Bound function `U(R, q')`: the MISO integral form over a disk.
pub fn bound_function_u(scn: &Scenario, radius: f64, tol: f64) -> Result<f64> {
    if !(radius >= 0.0) {
        return Err(domain(format!("disk radius must be >= 0, got {radius}")));
    }
    let pre = prefactor(scn)?;
    let q = scn.pattern().exponent();
    let user = scn.user();
    let area = polar_disk_integrate_with(
        |r, zeta| {
            let (s, c) = zeta.sin_cos();
            r * kernel_weight(continuous_kernel(user, r * c, r * s), q)
        },
        radius,
        tol,
        &radial_breaks(&[user], radius),
        &angular_breaks(&[user]),
    )?;
    Ok(pre * area.value * area.value)
}

/// How far the user sits from the surface normal, relative to the panel.
pub fn user_boresight_margin(scn: &Scenario) -> f64 {
    let p = scn.user();
    let panel = scn.panel();
    (p.direction().cos_y().abs() * panel.length_y() / p.range())
        .max(p.direction().cos_z().abs() * panel.length_z() / p.range())
}

/// Closed-form `U(R, 1/2)` for a user on boresight. Flagged when the user
/// is off the normal or the BS is not in the far field.
pub fn closed_u_half(scn: &Scenario, radius: f64) -> Result<Flagged<f64>> {
    if scn.pattern().exponent() != 0.5 {
        return Err(domain("MISO closed form needs the cosine pattern"));
    }
    if !(radius >= 0.0) {
        return Err(domain(format!("disk radius must be >= 0, got {radius}")));
    }
    let n = scn.require_bs_array()?.antenna_count() as f64;
    let lambda = scn.wavelength();
    let gamma = scn.pattern().peak_gain();
    let d = scn.panel().spacing();
    let (rq, rp) = (scn.bs().range(), scn.user().range());
    let psi = pow_2q(scn.bs().direction().cos_x(), 0.5) * pow_2q(scn.user().direction().cos_x(), 0.5);
    let root = ((radius / rp).powi(2) + 1.0).powf(0.25) - 1.0;
    let value = n * scn.transmit_snr() * lambda.powi(4) * gamma * gamma * psi * rp * rp
        / (16.0 * PI * PI * d.powi(4) * rq * rq)
        * root
        * root;

    let mut warnings = Vec::new();
    let margin = user_boresight_margin(scn);
    if margin > BORESIGHT_MARGIN_LIMIT {
        warnings.push(RegimeWarning::NotBoresight {
            margin,
            limit: BORESIGHT_MARGIN_LIMIT,
        });
    }
    warnings.extend(far_field_warning(scn)?);
    Ok(Flagged::with_warnings(value, warnings))
}

/// Disk bounds on the MISO integral form; closed forms for a boresight
/// user with the cosine pattern, quadrature otherwise.
pub fn miso_bounds(scn: &Scenario, tol: f64) -> Result<SnrBounds> {
    let panel = scn.panel();
    let (r1, r2) = (panel.inscribed_radius(), panel.circumscribed_radius());
    if scn.pattern().exponent() == 0.5 && user_boresight_margin(scn) <= BORESIGHT_MARGIN_LIMIT {
        return Ok(SnrBounds {
            lower: closed_u_half(scn, r1)?.value,
            upper: closed_u_half(scn, r2)?.value,
            regime: BoundRegime::BoresightClosedForm,
        });
    }
    Ok(SnrBounds {
        lower: bound_function_u(scn, r1, tol)?,
        upper: bound_function_u(scn, r2, tol)?,
        regime: BoundRegime::Generic,
    })
}

/// Large-surface limit. Only the user kernel decays, so the SNR grows
/// without bound for `q' <= 1`.
pub fn miso_asymptote(scn: &Scenario, tol: f64) -> Result<Asymptote> {
    if scn.pattern().exponent() <= 1.0 {
        return Ok(Asymptote::Unbounded);
    }
    let radius = UNBOUNDED_RADIUS_FACTOR * scn.user().range();
    Ok(Asymptote::Finite(bound_function_u(scn, radius, tol)?))
}

/// MISO report. The plane-wave baseline is the single-antenna value scaled
/// by the antenna count.
pub fn miso_report(scn: &Scenario, tol: f64) -> SnrReport {
    let (lower, upper) = match miso_bounds(scn, tol) {
        Ok(b) => (ReportEntry::Value(b.lower), ReportEntry::Value(b.upper)),
        Err(e) => (ReportEntry::Failed(e.clone()), ReportEntry::Failed(e)),
    };
    let upw = scn
        .require_bs_array()
        .map(|a| a.antenna_count() as f64 * upw_snr(scn, &UpwParams::for_wavelength(scn.wavelength())));
    SnrReport {
        exact: ReportEntry::from_result(miso_exact_max_snr(scn)),
        integral: ReportEntry::from_result(miso_integral_snr(scn, tol)),
        lower,
        upper,
        asymptote: match miso_asymptote(scn, tol) {
            Ok(a) => a.into(),
            Err(e) => ReportEntry::Failed(e),
        },
        upw: ReportEntry::from_result(upw),
        closed: ReportEntry::NotApplicable("no separate closed form for the multi-antenna link".into()),
    }
}
