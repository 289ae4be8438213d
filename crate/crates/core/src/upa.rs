//! Integral-form SNR, disk bounds, boresight closed forms and the
//! large-surface asymptote for a planar (UPA) surface.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::channel::{exact_max_snr, kernel_weight, Scenario};
use crate::error::{domain, Error, Result};
use crate::geometry::{boresight_margin, distance_ratio, normalized_sq_distance, Placement, BORESIGHT_MARGIN_LIMIT};
use crate::numerics::{
    incomplete_elliptic_f, integrate_1d_with, integrate_2d_rect_with, polar_disk_integrate_with, QuadOptions,
    RectOptions,
};
use crate::pattern::{center_gain, pow_2q};
use crate::upw::{upw_snr, UpwParams};

/// Below this distance from one, `ρ` is treated as exactly one.
pub const EQUAL_RANGE_THRESHOLD: f64 = 1e-6;

/// How a pair of bounds was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundRegime {
    /// Polar quadrature of the general bound function.
    Generic,
    /// Closed forms valid near the surface normal.
    BoresightClosedForm,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnrBounds {
    pub lower: f64,
    pub upper: f64,
    pub regime: BoundRegime,
}

/// Limit of the SNR as the surface grows without bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Asymptote {
    Finite(f64),
    /// The SNR diverges (semi-isotropic elements).
    Unbounded,
}

impl Asymptote {
    pub fn finite(self) -> Option<f64> {
        match self {
            Self::Finite(v) => Some(v),
            Self::Unbounded => None,
        }
    }
}

/// `x` in dB.
pub fn to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// dB back to linear.
pub fn from_db(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// One quantity of an [`SnrReport`].
#[derive(Debug, Clone, PartialEq)]
pub enum ReportEntry {
    Value(f64),
    Unbounded,
    /// Does not apply to this scenario; carries the reason.
    NotApplicable(String),
    /// The computation failed.
    Failed(Error),
}

impl ReportEntry {
    pub fn linear(&self) -> Option<f64> {
        match self {
            Self::Value(v) => Some(*v),
            Self::Unbounded => Some(f64::INFINITY),
            Self::NotApplicable(_) | Self::Failed(_) => None,
        }
    }

    pub fn db(&self) -> Option<f64> {
        self.linear().map(to_db)
    }

    pub fn from_result(r: Result<f64>) -> Self {
        match r {
            Ok(v) => Self::Value(v),
            Err(e) => Self::Failed(e),
        }
    }

    /// The error behind a failed entry.
    pub fn error(&self) -> Option<&Error> {
        match self {
            Self::Failed(e) => Some(e),
            _ => None,
        }
    }
}

impl From<Asymptote> for ReportEntry {
    fn from(a: Asymptote) -> Self {
        match a {
            Asymptote::Finite(v) => Self::Value(v),
            Asymptote::Unbounded => Self::Unbounded,
        }
    }
}

/// SNR quantities for one scenario. `closed` is only filled by the linear
/// and multi-antenna analyses.
#[derive(Debug, Clone, PartialEq)]
pub struct SnrReport {
    pub exact: ReportEntry,
    pub integral: ReportEntry,
    pub lower: ReportEntry,
    pub upper: ReportEntry,
    pub asymptote: ReportEntry,
    pub upw: ReportEntry,
    pub closed: ReportEntry,
}

/// `P̄ c_q c_p / d⁴`, the factor in front of every squared area integral.
pub(crate) fn area_prefactor(scn: &Scenario) -> f64 {
    let d = scn.panel().spacing();
    let a = center_gain(scn.pattern(), scn.wavelength(), scn.bs());
    let b = center_gain(scn.pattern(), scn.wavelength(), scn.user());
    scn.transmit_snr() * a * b / (d * d * d * d)
}

/// `|src - (0, y, z)|² / r²`.
#[inline]
pub(crate) fn continuous_kernel(src: &Placement, y: f64, z: f64) -> f64 {
    normalized_sq_distance(src.direction(), 1.0 / src.range(), y, z)
}

/// Projection of an endpoint onto the surface plane.
pub(crate) fn foot(src: &Placement) -> (f64, f64) {
    (
        src.range() * src.direction().cos_y(),
        src.range() * src.direction().cos_z(),
    )
}

/// Integral-form SNR over the panel rectangle.
pub fn integral_snr(scn: &Scenario, tol: f64) -> Result<f64> {
    let panel = scn.panel();
    let q = scn.pattern().exponent();
    let (hy, hz) = (0.5 * panel.length_y(), 0.5 * panel.length_z());
    let (bs, user) = (scn.bs(), scn.user());
    let (fq, fp) = (foot(bs), foot(user));
    let opts = RectOptions {
        tol,
        y_breaks: vec![fq.0, fp.0],
        z_breaks: vec![fq.1, fp.1],
    };
    let area = integrate_2d_rect_with(
        |y, z| kernel_weight(continuous_kernel(bs, y, z) * continuous_kernel(user, y, z), q),
        (-hy, hy),
        (-hz, hz),
        &opts,
    )?;
    Ok(area_prefactor(scn) * area.value * area.value)
}

/// Radial breakpoints worth splitting at for a disk integral of radius `radius`.
pub(crate) fn radial_breaks(points: &[&Placement], radius: f64) -> Vec<f64> {
    let mut out = Vec::new();
    for p in points {
        let (y, z) = foot(p);
        out.push(y.hypot(z));
        out.push(p.range());
    }
    out.retain(|r| *r > 0.0 && *r < radius);
    out
}

/// Angular breakpoints at the directions of the endpoint projections.
pub(crate) fn angular_breaks(points: &[&Placement]) -> Vec<f64> {
    points
        .iter()
        .filter_map(|p| {
            let (y, z) = foot(p);
            (y != 0.0 || z != 0.0).then(|| z.atan2(y).rem_euclid(2.0 * PI))
        })
        .collect()
}

/// Bound function `f(R, q')`: the integral form over a disk of radius `R`.
pub fn bound_function_f(scn: &Scenario, radius: f64, tol: f64) -> Result<f64> {
    if !(radius >= 0.0) {
        return Err(domain(format!("disk radius must be >= 0, got {radius}")));
    }
    let q = scn.pattern().exponent();
    let (bs, user) = (scn.bs(), scn.user());
    let area = polar_disk_integrate_with(
        |r, zeta| {
            let (s, c) = zeta.sin_cos();
            let (y, z) = (r * c, r * s);
            r * kernel_weight(continuous_kernel(bs, y, z) * continuous_kernel(user, y, z), q)
        },
        radius,
        tol,
        &radial_breaks(&[bs, user], radius),
        &angular_breaks(&[bs, user]),
    )?;
    Ok(area_prefactor(scn) * area.value * area.value)
}

/// `Ψ_q^{2q'} Ψ_p^{2q'}`: the pattern weight dropped by the boresight forms.
fn pattern_weight(scn: &Scenario) -> f64 {
    let q = scn.pattern().exponent();
    pow_2q(scn.bs().direction().cos_x(), q) * pow_2q(scn.user().direction().cos_x(), q)
}

/// `μ² P̄ / (4 d⁴)`, the scale turning `G` into an SNR.
fn g_scale(scn: &Scenario) -> f64 {
    let mu = scn.pattern().effective_aperture(scn.wavelength()).0;
    let d = scn.panel().spacing();
    mu * mu * scn.transmit_snr() / (4.0 * d * d * d * d)
}

/// Whether the boresight closed forms apply to this scenario.
pub fn boresight_applicable(scn: &Scenario) -> bool {
    let q = scn.pattern().exponent();
    (q == 0.5 || q == 1.0) && boresight_margin(scn.panel(), scn.bs(), scn.user()) <= BORESIGHT_MARGIN_LIMIT
}

/// Closed-form `G(R, q')` for `q' ∈ {1/2, 1}`.
pub fn closed_g(rho: f64, near_range: f64, radius: f64, q: f64) -> Result<f64> {
    if q == 0.5 {
        closed_g_half(rho, near_range, radius)
    } else if q == 1.0 {
        closed_g_one(rho, near_range, radius)
    } else {
        Err(domain(format!("no closed form for exponent {q}")))
    }
}

/// Disk bounds `(f(R1), f(R2))` on the integral-form SNR.
pub fn snr_bounds(scn: &Scenario, tol: f64) -> Result<SnrBounds> {
    let panel = scn.panel();
    let (r1, r2) = (panel.inscribed_radius(), panel.circumscribed_radius());
    if boresight_applicable(scn) {
        let ratio = distance_ratio(scn.bs().range(), scn.user().range())?;
        let q = scn.pattern().exponent();
        let scale = g_scale(scn) * pattern_weight(scn);
        return Ok(SnrBounds {
            lower: scale * closed_g(ratio.rho, ratio.near_range, r1, q)?,
            upper: scale * closed_g(ratio.rho, ratio.near_range, r2, q)?,
            regime: BoundRegime::BoresightClosedForm,
        });
    }
    Ok(SnrBounds {
        lower: bound_function_f(scn, r1, tol)?,
        upper: bound_function_f(scn, r2, tol)?,
        regime: BoundRegime::Generic,
    })
}

fn check_rho(rho: f64) -> Result<()> {
    if !(rho > 0.0 && rho <= 1.0) {
        return Err(domain(format!("distance ratio must lie in (0, 1], got {rho}")));
    }
    Ok(())
}

fn check_radius(near_range: f64, radius: f64) -> Result<()> {
    if !(near_range > 0.0) {
        return Err(domain(format!("range must be positive, got {near_range}")));
    }
    if !(radius >= 0.0) {
        return Err(domain(format!("disk radius must be >= 0, got {radius}")));
    }
    Ok(())
}

/// Integrand of `G` in the angle `α = arctan(r / r_near)`.
fn g_integrand(alpha: f64, rho: f64, q: f64) -> f64 {
    let c = alpha.cos();
    let denom = rho * rho + (1.0 - rho * rho) * c * c;
    pow_2q(c, q) * alpha.tan() / denom.powf(0.5 * (q + 1.0))
}

/// Where the `G` integrand changes scale: `cos α = ρ`.
fn g_breaks(rho: f64, upper: f64) -> Vec<f64> {
    let knee = rho.acos();
    if knee > 0.0 && knee < upper {
        vec![knee]
    } else {
        Vec::new()
    }
}

/// Boresight `G(R, q')` by quadrature.
pub fn boresight_g(rho: f64, near_range: f64, radius: f64, q: f64, tol: f64) -> Result<f64> {
    check_rho(rho)?;
    check_radius(near_range, radius)?;
    let upper = (radius / near_range).atan();
    let opts = QuadOptions::with_tol(tol).breakpoints(g_breaks(rho, upper));
    let j = integrate_1d_with(|a| g_integrand(a, rho, q), 0.0, upper, &opts)?.value;
    Ok((rho * j).powi(2))
}

/// Closed-form `G(R, 1/2)`.
pub fn closed_g_half(rho: f64, near_range: f64, radius: f64) -> Result<f64> {
    check_rho(rho)?;
    check_radius(near_range, radius)?;
    let cos_a = 1.0 / (radius / near_range).hypot(1.0);
    if 1.0 - rho < EQUAL_RANGE_THRESHOLD {
        return Ok((1.0 - cos_a).powi(2));
    }
    let s = ((1.0 - rho) * (1.0 + rho)).sqrt();
    let t = s / rho;
    let f0 = incomplete_elliptic_f(0.5 * t.atan(), 2.0)?;
    let f1 = incomplete_elliptic_f(0.5 * (t * cos_a).atan(), 2.0)?;
    Ok(4.0 * rho / (s * s) * (f0 - f1).powi(2))
}

/// Closed-form `G(R, 1)`.
pub fn closed_g_one(rho: f64, near_range: f64, radius: f64) -> Result<f64> {
    check_rho(rho)?;
    check_radius(near_range, radius)?;
    let t = radius / near_range;
    // sin²A and cos²A of A = arctan(t) without cancellation.
    let sin2 = t * t / (1.0 + t * t);
    if 1.0 - rho < EQUAL_RANGE_THRESHOLD {
        return Ok(0.25 * sin2 * sin2);
    }
    let one_minus = (1.0 - rho) * (1.0 + rho);
    let log = (-one_minus * sin2).ln_1p();
    Ok(rho * rho / (4.0 * one_minus * one_minus) * log * log)
}

/// Exact rectangle SNR for equal ranges on boresight with `q' = 1/2`.
pub fn equal_range_closed_snr(scn: &Scenario) -> Result<f64> {
    if scn.pattern().exponent() != 0.5 {
        return Err(domain("equal-range closed form needs the cosine pattern"));
    }
    let ratio = distance_ratio(scn.bs().range(), scn.user().range())?;
    if 1.0 - ratio.rho >= EQUAL_RANGE_THRESHOLD {
        return Err(domain(format!("ranges differ (ρ = {})", ratio.rho)));
    }
    let r = ratio.near_range;
    let a = scn.panel().length_y() / (2.0 * r);
    let b = scn.panel().length_z() / (2.0 * r);
    let angle = (a * b / (a * a + b * b + 1.0).sqrt()).atan();
    let mu = scn.pattern().effective_aperture(scn.wavelength()).0;
    let d = scn.panel().spacing();
    Ok(pattern_weight(scn) * mu * mu * scn.transmit_snr() * angle * angle / (PI * PI * d.powi(4)))
}

/// SNR limit for an unbounded surface with both endpoints on boresight.
pub fn asymptotic_snr(rho: f64, q: f64, wavelength: f64, spacing: f64, transmit_snr: f64) -> Result<Asymptote> {
    check_rho(rho)?;
    if !(q >= 0.0) {
        return Err(domain(format!("directivity exponent must be >= 0, got {q}")));
    }
    if q == 0.0 {
        return Ok(Asymptote::Unbounded);
    }
    let base = wavelength.powi(4) * transmit_snr / (PI * PI * spacing.powi(4));
    let equal = 1.0 - rho < EQUAL_RANGE_THRESHOLD;
    let value = if equal {
        base * (2.0 + 1.0 / q).powi(2) / 64.0
    } else if q == 0.5 {
        let s2 = (1.0 - rho) * (1.0 + rho);
        let f = incomplete_elliptic_f(0.5 * (s2.sqrt() / rho).atan(), 2.0)?;
        base * rho / s2 * f * f
    } else if q == 1.0 {
        let s2 = (1.0 - rho) * (1.0 + rho);
        let l = rho.ln();
        base * 9.0 * rho * rho * l * l / (16.0 * s2 * s2)
    } else {
        let opts = QuadOptions::with_tol(1e-11).breakpoints(g_breaks(rho, FRAC_PI_2));
        let j = integrate_1d_with(|a| g_integrand(a, rho, q), 0.0, FRAC_PI_2, &opts)?.value;
        base * (rho * (2.0 * q + 1.0) * j).powi(2) / 16.0
    };
    Ok(Asymptote::Finite(value))
}

/// Disk radius standing in for an unbounded surface, relative to the
/// larger link range.
pub const UNBOUNDED_RADIUS_FACTOR: f64 = 1e4;

/// Large-surface limit for this scenario: the boresight formula (with the
/// pattern weight) when applicable, otherwise `f` at a very large radius.
pub fn scenario_asymptote(scn: &Scenario, tol: f64) -> Result<Asymptote> {
    let q = scn.pattern().exponent();
    if q == 0.0 {
        return Ok(Asymptote::Unbounded);
    }
    if boresight_margin(scn.panel(), scn.bs(), scn.user()) <= BORESIGHT_MARGIN_LIMIT {
        let ratio = distance_ratio(scn.bs().range(), scn.user().range())?;
        return Ok(
            match asymptotic_snr(
                ratio.rho,
                q,
                scn.wavelength(),
                scn.panel().spacing(),
                scn.transmit_snr(),
            )? {
                Asymptote::Finite(v) => Asymptote::Finite(v * pattern_weight(scn)),
                Asymptote::Unbounded => Asymptote::Unbounded,
            },
        );
    }
    let radius = UNBOUNDED_RADIUS_FACTOR * scn.bs().range().max(scn.user().range());
    Ok(Asymptote::Finite(bound_function_f(scn, radius, tol)?))
}

/// Every planar-surface quantity for one scenario. Failing parts are
/// reported as missing instead of aborting the report.
pub fn snr_report(scn: &Scenario, tol: f64) -> SnrReport {
    let bounds = snr_bounds(scn, tol);
    let (lower, upper) = match bounds {
        Ok(b) => (ReportEntry::Value(b.lower), ReportEntry::Value(b.upper)),
        Err(e) => (ReportEntry::Failed(e.clone()), ReportEntry::Failed(e)),
    };
    SnrReport {
        exact: ReportEntry::Value(exact_max_snr(scn)),
        integral: ReportEntry::from_result(integral_snr(scn, tol)),
        lower,
        upper,
        asymptote: match scenario_asymptote(scn, tol) {
            Ok(a) => a.into(),
            Err(e) => ReportEntry::Failed(e),
        },
        upw: ReportEntry::Value(upw_snr(scn, &UpwParams::for_wavelength(scn.wavelength()))),
        closed: ReportEntry::NotApplicable("no closed form for planar surfaces".into()),
    }
}
