//! Complex channels, phase profiles, received SNR, optimal phasing, MRT
//! beamforming and the exact (summation) maximum SNR.

use std::f64::consts::PI;

use nalgebra::{Complex, DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{domain, Error, Result};
use crate::geometry::{miso_kernel, normalized_sq_distance, BsArray, IrsPanel, Placement};
use crate::numerics::CompensatedSum;
use crate::pattern::{center_gain, GainPattern};
use crate::regime::{Flagged, RegimeWarning};

pub type Complex64 = Complex<f64>;

/// A complete link: wavelength, transmit SNR `P̄ = P/σ²`, surface, element
/// pattern and the two endpoints, optionally with a BS antenna array.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    wavelength: f64,
    transmit_snr: f64,
    panel: IrsPanel,
    pattern: GainPattern,
    bs: Placement,
    user: Placement,
    bs_array: Option<BsArray>,
}

impl Scenario {
    pub fn new(
        wavelength: f64,
        transmit_snr: f64,
        panel: IrsPanel,
        pattern: GainPattern,
        bs: Placement,
        user: Placement,
    ) -> Result<Self> {
        if !(wavelength > 0.0) || !wavelength.is_finite() {
            return Err(Error::Config(format!("wavelength must be positive, got {wavelength}")));
        }
        if !(transmit_snr > 0.0) || !transmit_snr.is_finite() {
            return Err(Error::Config(format!(
                "transmit SNR must be positive and finite, got {transmit_snr}"
            )));
        }
        if panel.spacing() > 0.5 * wavelength * (1.0 + 1e-12) {
            return Err(Error::Config(format!(
                "spacing exceeds half wavelength ({} > {})",
                panel.spacing(),
                0.5 * wavelength
            )));
        }
        for (name, p) in [("BS", &bs), ("user", &user)] {
            if !(p.direction().cos_x() > 0.0) {
                return Err(Error::Config(format!(
                    "{name} must lie strictly in front of the surface (cos_x > 0)"
                )));
            }
        }
        Ok(Self {
            wavelength,
            transmit_snr,
            panel,
            pattern,
            bs,
            user,
            bs_array: None,
        })
    }

    /// Attaches a BS array centred on the BS placement.
    pub fn with_bs_array(mut self, count_y: usize, count_z: usize, spacing: f64) -> Result<Self> {
        self.bs_array = Some(BsArray::new(count_y, count_z, spacing, self.bs)?);
        Ok(self)
    }

    pub fn with_panel(&self, panel: IrsPanel) -> Result<Self> {
        let mut out = Self::new(
            self.wavelength,
            self.transmit_snr,
            panel,
            self.pattern,
            self.bs,
            self.user,
        )?;
        out.bs_array = self.bs_array;
        Ok(out)
    }

    pub fn with_bs(&self, bs: Placement) -> Result<Self> {
        let out = Self::new(
            self.wavelength,
            self.transmit_snr,
            self.panel,
            self.pattern,
            bs,
            self.user,
        )?;
        match self.bs_array {
            Some(a) => out.with_bs_array(a.count_y(), a.count_z(), a.spacing()),
            None => Ok(out),
        }
    }

    pub fn with_user(&self, user: Placement) -> Result<Self> {
        let mut out = Self::new(
            self.wavelength,
            self.transmit_snr,
            self.panel,
            self.pattern,
            self.bs,
            user,
        )?;
        out.bs_array = self.bs_array;
        Ok(out)
    }

    pub fn with_transmit_snr(&self, transmit_snr: f64) -> Result<Self> {
        let mut out = Self::new(
            self.wavelength,
            transmit_snr,
            self.panel,
            self.pattern,
            self.bs,
            self.user,
        )?;
        out.bs_array = self.bs_array;
        Ok(out)
    }

    /// BS and user exchanged; any BS array is dropped.
    pub fn swapped(&self) -> Self {
        Self {
            bs: self.user,
            user: self.bs,
            bs_array: None,
            ..self.clone()
        }
    }

    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }

    pub fn wave_number(&self) -> f64 {
        2.0 * PI / self.wavelength
    }

    pub fn transmit_snr(&self) -> f64 {
        self.transmit_snr
    }

    pub fn panel(&self) -> &IrsPanel {
        &self.panel
    }

    pub fn pattern(&self) -> &GainPattern {
        &self.pattern
    }

    pub fn bs(&self) -> &Placement {
        &self.bs
    }

    pub fn user(&self) -> &Placement {
        &self.user
    }

    pub fn bs_array(&self) -> Option<&BsArray> {
        self.bs_array.as_ref()
    }

    pub(crate) fn require_bs_array(&self) -> Result<&BsArray> {
        self.bs_array
            .as_ref()
            .ok_or_else(|| Error::Config("scenario has no BS array".into()))
    }
}

/// Which hop of the cascaded link.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Bs,
    User,
}

/// Per-element phase shifts in radians, in panel linear-index order.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseProfile {
    phases: Vec<f64>,
}

impl PhaseProfile {
    pub fn new(phases: Vec<f64>) -> Result<Self> {
        if let Some(bad) = phases.iter().find(|p| !p.is_finite()) {
            return Err(domain(format!("phase shift must be finite, got {bad}")));
        }
        Ok(Self { phases })
    }

    pub fn zeros(len: usize) -> Self {
        Self { phases: vec![0.0; len] }
    }

    pub fn len(&self) -> usize {
        self.phases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phases.is_empty()
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }
}

/// Complex element amplitudes in panel linear-index order.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelVector {
    entries: Vec<Complex64>,
}

impl ChannelVector {
    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

fn placement(scn: &Scenario, side: Side) -> &Placement {
    match side {
        Side::Bs => &scn.bs,
        Side::User => &scn.user,
    }
}

/// Normalized squared distance from `src` to every element, row by row.
fn kernels<'a>(src: &'a Placement, panel: &'a IrsPanel) -> impl Iterator<Item = f64> + 'a {
    let eps = panel.spacing() / src.range();
    panel
        .indices()
        .map(move |(iy, iz)| normalized_sq_distance(src.direction(), eps, iy as f64, iz as f64))
}

/// Entry `√gain · e^{-j 2π dist / λ}` for every element.
pub fn channel_vector(scn: &Scenario, side: Side) -> Result<ChannelVector> {
    let src = placement(scn, side);
    let c = center_gain(&scn.pattern, scn.wavelength, src);
    let k = scn.wave_number();
    let q = scn.pattern.exponent();
    let entries = kernels(src, &scn.panel)
        .map(|kern| {
            let amp = (c / kern.powf(q + 1.0)).sqrt();
            let dist = src.range() * kern.sqrt();
            Complex64::from_polar(amp, -k * dist)
        })
        .collect();
    Ok(ChannelVector { entries })
}

/// Phases that co-phase every reflected path.
pub fn optimal_phases(scn: &Scenario) -> PhaseProfile {
    let k = scn.wave_number();
    let phases = kernels(&scn.bs, &scn.panel)
        .zip(kernels(&scn.user, &scn.panel))
        .map(|(kq, kp)| k * (scn.bs.range() * kq.sqrt() + scn.user.range() * kp.sqrt()))
        .collect();
    PhaseProfile { phases }
}

fn check_len(profile: &PhaseProfile, expected: usize) -> Result<()> {
    if profile.len() != expected {
        return Err(Error::Shape {
            expected,
            actual: profile.len(),
        });
    }
    Ok(())
}

/// Compensated complex sum.
fn complex_sum(terms: impl Iterator<Item = Complex64>) -> Complex64 {
    let (mut re, mut im) = (CompensatedSum::new(), CompensatedSum::new());
    for t in terms {
        re.add(t.re);
        im.add(t.im);
    }
    Complex64::new(re.total(), im.total())
}

/// `g^T Θ h` for the cascaded link.
fn cascaded(g: &[Complex64], profile: &PhaseProfile, h: &[Complex64]) -> Complex64 {
    complex_sum(
        g.iter()
            .zip(profile.phases())
            .zip(h)
            .map(|((g, t), h)| g * Complex64::from_polar(1.0, *t) * h),
    )
}

/// `P̄ |Σ g_m e^{jθ_m} h_m|²`.
pub fn received_snr(scn: &Scenario, profile: &PhaseProfile) -> Result<f64> {
    check_len(profile, scn.panel.element_count())?;
    let h = channel_vector(scn, Side::Bs)?;
    let g = channel_vector(scn, Side::User)?;
    Ok(scn.transmit_snr * cascaded(&g.entries, profile, &h.entries).norm_sqr())
}

/// `(k_q k_p)^{-(q'+1)/2}` style powers: `x^{-(q'+1)/2}`.
#[inline]
pub(crate) fn kernel_weight(x: f64, q: f64) -> f64 {
    if q == 0.0 {
        1.0 / x.sqrt()
    } else if q == 0.5 {
        let s = x.sqrt();
        1.0 / (s * s.sqrt())
    } else if q == 1.0 {
        1.0 / x
    } else {
        x.powf(-0.5 * (q + 1.0))
    }
}

/// Sums `term(i_y, i_z)` over the panel with a fixed reduction order: rows
/// of constant `i_z` in ascending order, each summed over ascending `i_y`
/// with compensation. Rows are evaluated in parallel, so the result does not
/// depend on the worker count.
pub(crate) fn grid_sum<F>(count_y: usize, count_z: usize, term: F) -> f64
where
    F: Fn(f64, f64) -> f64 + Sync,
{
    let hy = (count_y / 2) as i64;
    let hz = (count_z / 2) as i64;
    let rows: Vec<(f64, f64)> = (-hz..=hz)
        .into_par_iter()
        .map(|iz| {
            let z = iz as f64;
            let mut acc = CompensatedSum::new();
            for iy in -hy..=hy {
                acc.add(term(iy as f64, z));
            }
            acc.parts()
        })
        .collect();
    let mut total = CompensatedSum::new();
    for (sum, comp) in rows {
        total.add(sum);
        total.add(comp);
    }
    total.total()
}

/// Maximum SNR by direct summation over all elements.
pub fn exact_max_snr(scn: &Scenario) -> f64 {
    let panel = &scn.panel;
    let q = scn.pattern.exponent();
    let (dq, dp) = (scn.bs.direction(), scn.user.direction());
    let eq = panel.spacing() / scn.bs.range();
    let ep = panel.spacing() / scn.user.range();
    let sum = grid_sum(panel.count_y(), panel.count_z(), |iy, iz| {
        let kq = normalized_sq_distance(dq, eq, iy, iz);
        let kp = normalized_sq_distance(dp, ep, iy, iz);
        kernel_weight(kq * kp, q)
    });
    let a = center_gain(&scn.pattern, scn.wavelength, &scn.bs);
    let b = center_gain(&scn.pattern, scn.wavelength, &scn.user);
    scn.transmit_snr * a * b * sum * sum
}

fn bs_linear_index(bs: &BsArray, n_y: i64, n_z: i64) -> usize {
    ((n_y + bs.half_y()) as usize) * bs.count_z() + (n_z + bs.half_z()) as usize
}

/// Exact near-field BS-to-surface channel, `M × N`.
pub fn miso_channel_matrix(scn: &Scenario) -> Result<DMatrix<Complex64>> {
    let bs = scn.require_bs_array()?;
    let panel = &scn.panel;
    let c = center_gain(&scn.pattern, scn.wavelength, bs.center());
    let q = scn.pattern.exponent();
    let k = scn.wave_number();
    let r = bs.center().range();
    let mut h = DMatrix::from_element(panel.element_count(), bs.antenna_count(), Complex64::ZERO);
    for (m, (iy, iz)) in panel.indices().enumerate() {
        for (ny, nz) in bs.indices() {
            let kern = miso_kernel(bs, ny, nz, panel, iy, iz);
            let amp = (c / kern.powf(q + 1.0)).sqrt();
            h[(m, bs_linear_index(bs, ny, nz))] = Complex64::from_polar(amp, -k * r * kern.sqrt());
        }
    }
    Ok(h)
}

/// Rayleigh distance `2D²/λ` of the larger of the surface and BS apertures.
pub fn rayleigh_distance(scn: &Scenario) -> Result<f64> {
    let bs = scn.require_bs_array()?;
    let d = scn.panel.aperture().max(bs.aperture());
    Ok(2.0 * d * d / scn.wavelength)
}

/// Warning raised when the BS is not in the far field of the joint aperture.
pub fn far_field_warning(scn: &Scenario) -> Result<Option<RegimeWarning>> {
    let rayleigh = rayleigh_distance(scn)?;
    let range = scn.bs.range();
    Ok((range < rayleigh).then_some(RegimeWarning::BsNotFarField { range, rayleigh }))
}

/// Array response `[e^{jk s i_y Φ}] ⊗ [e^{jk s i_z Θ}]` over a centred grid.
fn array_response(k: f64, spacing: f64, count_y: usize, count_z: usize, cos_y: f64, cos_z: f64) -> DVector<Complex64> {
    let hy = (count_y / 2) as i64;
    let hz = (count_z / 2) as i64;
    let y: Vec<Complex64> = (-hy..=hy)
        .map(|i| Complex64::from_polar(1.0, k * spacing * i as f64 * cos_y))
        .collect();
    let z: Vec<Complex64> = (-hz..=hz)
        .map(|i| Complex64::from_polar(1.0, k * spacing * i as f64 * cos_z))
        .collect();
    DVector::from_iterator(count_y * count_z, y.iter().flat_map(|a| z.iter().map(move |b| a * b)))
}

/// Surface-side receive array response.
pub fn receive_response(scn: &Scenario) -> DVector<Complex64> {
    let d = scn.bs.direction();
    let p = &scn.panel;
    array_response(
        scn.wave_number(),
        p.spacing(),
        p.count_y(),
        p.count_z(),
        d.cos_y(),
        d.cos_z(),
    )
}

/// BS-side transmit array response.
pub fn transmit_response(scn: &Scenario) -> Result<DVector<Complex64>> {
    let bs = scn.require_bs_array()?;
    let d = scn.bs.direction();
    Ok(array_response(
        scn.wave_number(),
        bs.spacing(),
        bs.count_y(),
        bs.count_z(),
        d.cos_y(),
        d.cos_z(),
    ))
}

/// Far-field gain factor `λ²γ'Ψ_q^{2q'} / (16π² r_q²)`.
pub(crate) fn far_field_gain(scn: &Scenario) -> f64 {
    center_gain(&scn.pattern, scn.wavelength, &scn.bs)
}

/// Rank-one far-field channel `√c · e^{-j2πr_q/λ} a_R a_Tᴴ`, flagged when
/// the BS is inside the Rayleigh distance.
pub fn rank_one_far_channel(scn: &Scenario) -> Result<Flagged<DMatrix<Complex64>>> {
    let a_t = transmit_response(scn)?;
    let a_r = receive_response(scn);
    let scale = Complex64::from_polar(far_field_gain(scn).sqrt(), -scn.wave_number() * scn.bs.range());
    let h = (a_r * a_t.adjoint()) * scale;
    let warnings = far_field_warning(scn)?.into_iter().collect();
    Ok(Flagged::with_warnings(h, warnings))
}

/// Maximum-ratio transmit beamformer `a_T / √N`.
pub fn mrt_beamformer(scn: &Scenario) -> Result<DVector<Complex64>> {
    let a_t = transmit_response(scn)?;
    let n = a_t.len() as f64;
    Ok(a_t / Complex64::from(n.sqrt()))
}

/// `P̄ |gᵀ Θ H v|²` for a given BS channel matrix and beamformer.
pub fn miso_received_snr(
    scn: &Scenario,
    h: &DMatrix<Complex64>,
    profile: &PhaseProfile,
    v: &DVector<Complex64>,
) -> Result<f64> {
    let m = scn.panel.element_count();
    check_len(profile, m)?;
    if h.nrows() != m {
        return Err(Error::Shape {
            expected: m,
            actual: h.nrows(),
        });
    }
    if h.ncols() != v.len() {
        return Err(Error::Shape {
            expected: h.ncols(),
            actual: v.len(),
        });
    }
    let hv = h * v;
    let g = channel_vector(scn, Side::User)?;
    Ok(scn.transmit_snr * cascaded(&g.entries, profile, hv.as_slice()).norm_sqr())
}

/// Phases co-phasing `g_m (H v)_m` across the surface.
pub fn miso_optimal_phases(scn: &Scenario, h: &DMatrix<Complex64>, v: &DVector<Complex64>) -> Result<PhaseProfile> {
    let hv = h * v;
    let g = channel_vector(scn, Side::User)?;
    if hv.len() != g.len() {
        return Err(Error::Shape {
            expected: g.len(),
            actual: hv.len(),
        });
    }
    let phases = g.entries.iter().zip(hv.iter()).map(|(g, x)| -(g * x).arg()).collect();
    Ok(PhaseProfile { phases })
}

/// Maximum MISO SNR under the far-field BS model, by direct summation:
/// `N P̄ c_q (Σ √b_m)²`.
pub fn miso_exact_max_snr(scn: &Scenario) -> Result<f64> {
    let bs = scn.require_bs_array()?;
    let panel = &scn.panel;
    let q = scn.pattern.exponent();
    let dp = scn.user.direction();
    let ep = panel.spacing() / scn.user.range();
    let sum = grid_sum(panel.count_y(), panel.count_z(), |iy, iz| {
        kernel_weight(normalized_sq_distance(dp, ep, iy, iz), q)
    });
    let b = center_gain(&scn.pattern, scn.wavelength, &scn.user);
    Ok(bs.antenna_count() as f64 * scn.transmit_snr * far_field_gain(scn) * b * sum * sum)
}

/// Monte-Carlo run settings for [`simulate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulationConfig {
    pub symbol_count: usize,
    pub seed: u64,
    /// Drop the receiver noise entirely.
    pub noiseless: bool,
}

/// Received samples and the SNR measured from them.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationOutput {
    pub samples: Vec<Complex64>,
    /// Mean `|signal|²` over the run.
    pub signal_power: f64,
    /// Mean `|noise|²` over the run.
    pub noise_power: f64,
    /// `signal_power / noise_power`; infinite when noiseless.
    pub empirical_snr: f64,
}

/// Draws `y = √P gᵀΘh s + n` with unit-modulus random-phase symbols and
/// `CN(0, 1)` noise, `P = P̄`.
pub fn simulate(scn: &Scenario, profile: &PhaseProfile, config: SimulationConfig) -> Result<SimulationOutput> {
    if config.symbol_count == 0 {
        return Err(domain("symbol_count must be at least 1"));
    }
    check_len(profile, scn.panel.element_count())?;
    let h = channel_vector(scn, Side::Bs)?;
    let g = channel_vector(scn, Side::User)?;
    let gain = cascaded(&g.entries, profile, &h.entries) * scn.transmit_snr.sqrt();

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let noise_std = std::f64::consts::FRAC_1_SQRT_2;
    let mut samples = Vec::with_capacity(config.symbol_count);
    let (mut sig, mut noi) = (CompensatedSum::new(), CompensatedSum::new());
    for _ in 0..config.symbol_count {
        let s = Complex64::from_polar(1.0, rng.random::<f64>() * 2.0 * PI);
        let n = if config.noiseless {
            Complex64::ZERO
        } else {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex64::new(re, im) * noise_std
        };
        let x = gain * s;
        sig.add(x.norm_sqr());
        noi.add(n.norm_sqr());
        samples.push(x + n);
    }
    let count = config.symbol_count as f64;
    let signal_power = sig.total() / count;
    let noise_power = noi.total() / count;
    let empirical_snr = if noise_power == 0.0 {
        f64::INFINITY
    } else {
        signal_power / noise_power
    };
    Ok(SimulationOutput {
        samples,
        signal_power,
        noise_power,
        empirical_snr,
    })
}

/// Single-element maximum SNR `P̄ c_q c_p`.
pub fn single_element_snr(scn: &Scenario) -> f64 {
    let a = center_gain(&scn.pattern, scn.wavelength, &scn.bs);
    let b = center_gain(&scn.pattern, scn.wavelength, &scn.user);
    scn.transmit_snr * a * b
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Direction;
    use crate::pattern::channel_power_gain;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use rand::Rng;
    use std::f64::consts::{FRAC_PI_3, FRAC_PI_4, FRAC_PI_6};

    const LAMBDA: f64 = 0.125;
    const D: f64 = LAMBDA / 3.0;
    const PBAR: f64 = 1e9;

    fn scenario(panel: IrsPanel, q: f64, bs: Placement, user: Placement) -> Scenario {
        Scenario::new(LAMBDA, PBAR, panel, GainPattern::new(q).unwrap(), bs, user).unwrap()
    }

    fn generic(m: usize) -> Scenario {
        scenario(
            IrsPanel::new(m, m, D).unwrap(),
            0.5,
            Placement::from_angles(4.0, FRAC_PI_3, FRAC_PI_6).unwrap(),
            Placement::from_angles(9.0, 2.2, -0.6).unwrap(),
        )
    }

    fn boresight(m: usize, q: f64, rq: f64, rp: f64) -> Scenario {
        scenario(
            IrsPanel::new(m, m, D).unwrap(),
            q,
            Placement::on_boresight(rq).unwrap(),
            Placement::on_boresight(rp).unwrap(),
        )
    }

    #[test]
    fn validation() {
        let panel = IrsPanel::new(3, 3, 0.07).unwrap();
        let p = Placement::on_boresight(5.0).unwrap();
        let err = Scenario::new(LAMBDA, PBAR, panel, GainPattern::cosine(), p, p).unwrap_err();
        assert!(err.to_string().contains("spacing exceeds half wavelength"));
        let ok = IrsPanel::new(3, 3, D).unwrap();
        assert!(Scenario::new(LAMBDA, 0.0, ok, GainPattern::cosine(), p, p).is_err());
        let grazing = Placement::new(5.0, Direction::new(0.0, 0.0).unwrap()).unwrap();
        assert!(Scenario::new(LAMBDA, PBAR, ok, GainPattern::cosine(), grazing, p).is_err());
        assert!(Scenario::new(LAMBDA, PBAR, ok, GainPattern::cosine(), p, p)
            .unwrap()
            .require_bs_array()
            .is_err());
    }

    #[test]
    fn single_element_vector() {
        let s = boresight(1, 0.5, 7.3, 20.0);
        let h = channel_vector(&s, Side::Bs).unwrap();
        assert_eq!(h.len(), 1);
        let amp = ((LAMBDA / (4.0 * PI * 7.3)).powi(2) * 4.0).sqrt();
        assert_relative_eq!(h.entries()[0].norm(), amp, max_relative = 1e-14);
        let expected = Complex64::from_polar(1.0, -2.0 * PI * 7.3 / LAMBDA);
        assert!((h.entries()[0] / amp - expected).norm() < 1e-10);
    }

    #[test]
    fn vector_magnitudes_match_gains() {
        let s = generic(7);
        for (side, src) in [(Side::Bs, *s.bs()), (Side::User, *s.user())] {
            let v = channel_vector(&s, side).unwrap();
            for (m, (iy, iz)) in s.panel().indices().enumerate() {
                let g = channel_power_gain(s.pattern(), LAMBDA, &src, s.panel(), iy, iz).unwrap();
                assert_relative_eq!(v.entries()[m].norm(), g.sqrt(), max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn single_element_optimal_phase() {
        let s = boresight(1, 1.0, 3.0, 11.0);
        let p = optimal_phases(&s);
        assert_relative_eq!(p.phases()[0], 2.0 * PI * 14.0 / LAMBDA, max_relative = 1e-14);
        let zero = received_snr(&s, &PhaseProfile::zeros(1)).unwrap();
        assert_relative_eq!(zero, single_element_snr(&s), max_relative = 1e-12);
        assert_relative_eq!(
            single_element_snr(&s),
            PBAR * (LAMBDA / (4.0 * PI)).powi(4) * 36.0 / (9.0 * 121.0),
            max_relative = 1e-14
        );
        assert_relative_eq!(exact_max_snr(&s), single_element_snr(&s), max_relative = 1e-15);
    }

    #[test]
    fn optimal_profile_reaches_exact_snr() {
        for s in [generic(15), boresight(21, 1.0, 2.0, 5.0)] {
            let p = optimal_phases(&s);
            let snr = received_snr(&s, &p).unwrap();
            let exact = exact_max_snr(&s);
            assert_relative_eq!(snr, exact, max_relative = 1e-10);
            let h = channel_vector(&s, Side::Bs).unwrap();
            let g = channel_vector(&s, Side::User).unwrap();
            let coherent: f64 = h
                .entries()
                .iter()
                .zip(g.entries())
                .map(|(a, b)| a.norm() * b.norm())
                .sum();
            assert_relative_eq!(exact, PBAR * coherent * coherent, max_relative = 1e-10);
        }
    }

    #[test]
    fn optimal_profile_dominates_random() {
        let s = generic(9);
        let best = received_snr(&s, &optimal_phases(&s)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let phases = (0..81).map(|_| rng.random::<f64>() * 2.0 * PI).collect();
            let snr = received_snr(&s, &PhaseProfile::new(phases).unwrap()).unwrap();
            assert!(snr <= best);
        }
    }

    #[test]
    fn antiphase_cancels() {
        let s = scenario(
            IrsPanel::new(1, 3, D).unwrap(),
            0.5,
            Placement::on_boresight(2.0).unwrap(),
            Placement::on_boresight(3.0).unwrap(),
        );
        let h = channel_vector(&s, Side::Bs).unwrap();
        let g = channel_vector(&s, Side::User).unwrap();
        let opt = optimal_phases(&s);
        let mags: Vec<f64> = h
            .entries()
            .iter()
            .zip(g.entries())
            .map(|(a, b)| a.norm() * b.norm())
            .collect();
        let alpha = (-mags[1] / (2.0 * mags[0])).acos();
        let offsets = [alpha, 0.0, -alpha];
        let phases = opt.phases().iter().zip(offsets).map(|(p, o)| p + o).collect();
        let snr = received_snr(&s, &PhaseProfile::new(phases).unwrap()).unwrap();
        assert!(snr < 1e-12 * exact_max_snr(&s), "{snr}");
    }

    #[test]
    fn shape_mismatch() {
        let s = generic(3);
        assert!(matches!(
            received_snr(&s, &PhaseProfile::zeros(4)),
            Err(Error::Shape { expected: 9, actual: 4 })
        ));
        assert!(PhaseProfile::new(vec![0.0, f64::NAN]).is_err());
    }

    #[test]
    fn reciprocity() {
        let s = generic(41);
        assert_relative_eq!(exact_max_snr(&s), exact_max_snr(&s.swapped()), max_relative = 1e-12);
    }

    #[test]
    fn nondecreasing_in_size() {
        let mut last = 0.0;
        for m in [1, 3, 11, 31, 101, 301] {
            let v = exact_max_snr(&boresight(m, 0.5, 10.0, 100.0));
            assert!(v >= last);
            last = v;
        }
    }

    #[test]
    fn grid_sum_is_thread_count_independent() {
        let s = generic(301);
        let serial = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let wide = rayon::ThreadPoolBuilder::new().num_threads(7).build().unwrap();
        let a = serial.install(|| exact_max_snr(&s));
        let b = wide.install(|| exact_max_snr(&s));
        assert_eq!(a.to_bits(), b.to_bits());
    }

    fn miso(m: usize, rq: f64, n: usize, d0: f64) -> Scenario {
        scenario(
            IrsPanel::new(m, m, D).unwrap(),
            0.5,
            Placement::from_angles(rq, FRAC_PI_3, -FRAC_PI_4).unwrap(),
            Placement::on_boresight(10.0).unwrap(),
        )
        .with_bs_array(n, n, d0)
        .unwrap()
    }

    #[test]
    fn single_antenna_matrix_is_the_channel_vector() {
        let s = miso(5, 30.0, 1, LAMBDA / 2.0);
        let h = miso_channel_matrix(&s).unwrap();
        let v = channel_vector(&s, Side::Bs).unwrap();
        assert_eq!(h.shape(), (25, 1));
        for m in 0..25 {
            assert!((h[(m, 0)] - v.entries()[m]).norm() <= 1e-12 * v.entries()[m].norm());
        }
    }

    #[test]
    fn matrix_magnitudes_match_gains() {
        let s = miso(5, 20.0, 3, 0.06);
        let h = miso_channel_matrix(&s).unwrap();
        let bs = s.bs_array().unwrap();
        for (m, (iy, iz)) in s.panel().indices().enumerate() {
            for (ny, nz) in bs.indices() {
                let g = crate::pattern::miso_channel_power_gain(s.pattern(), LAMBDA, bs, ny, nz, s.panel(), iy, iz)
                    .unwrap();
                let e = h[(m, bs_linear_index(bs, ny, nz))];
                assert_relative_eq!(e.norm(), g.sqrt(), max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn rank_one_structure() {
        let s = miso(9, 1e3, 3, LAMBDA / 2.0);
        let h = rank_one_far_channel(&s).unwrap().value;
        let amp = far_field_gain(&s).sqrt();
        assert!(h.iter().all(|e| (e.norm() - amp).abs() < 1e-12 * amp));
        let a_r = receive_response(&s);
        let dir = s.bs().direction();
        for (m, (iy, iz)) in s.panel().indices().enumerate() {
            let phase = 2.0 * PI / LAMBDA * D * (iy as f64 * dir.cos_y() + iz as f64 * dir.cos_z());
            assert!((a_r[m] - Complex64::from_polar(1.0, phase)).norm() < 1e-12);
        }
        let svd = h.clone().svd(false, false);
        let mut sv: Vec<f64> = svd.singular_values.iter().copied().collect();
        sv.sort_by(|a, b| b.total_cmp(a));
        assert!(sv[1] < 1e-12 * sv[0]);
    }

    #[test]
    fn exact_matrix_approaches_rank_one_far_away() {
        let ratio = |rq: f64| {
            let h = miso_channel_matrix(&miso(31, rq, 3, LAMBDA / 2.0)).unwrap();
            let sv = h.svd(false, false).singular_values;
            let mut sv: Vec<f64> = sv.iter().copied().collect();
            sv.sort_by(|a, b| b.total_cmp(a));
            sv[1] / sv[0]
        };
        let near = ratio(20.0);
        let far = ratio(2e3);
        assert!(far < near);
        assert!(far < 1e-3, "{far}");
    }

    #[test]
    fn far_field_flag() {
        let near = miso(9, 2.0, 3, LAMBDA / 2.0);
        assert!(!rank_one_far_channel(&near).unwrap().is_clean());
        let far = miso(9, 1e3, 3, LAMBDA / 2.0);
        assert!(rank_one_far_channel(&far).unwrap().is_clean());
    }

    #[test]
    fn mrt_norm_and_dominance() {
        let s = miso(9, 500.0, 3, LAMBDA / 2.0);
        assert_relative_eq!(mrt_beamformer(&s).unwrap().norm(), 1.0, max_relative = 1e-12);
        let single = miso(3, 500.0, 1, LAMBDA / 2.0);
        let v1 = mrt_beamformer(&single).unwrap();
        assert!((v1[0] - Complex64::ONE).norm() < 1e-15);

        let h = rank_one_far_channel(&s).unwrap().value;
        let v = mrt_beamformer(&s).unwrap();
        let profile = miso_optimal_phases(&s, &h, &v).unwrap();
        let best = miso_received_snr(&s, &h, &profile, &v).unwrap();
        assert_relative_eq!(best, miso_exact_max_snr(&s).unwrap(), max_relative = 1e-10);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let w = DVector::from_fn(9, |_, _| {
                Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
            });
            let w = &w / Complex64::from(w.norm());
            assert!(miso_received_snr(&s, &h, &profile, &w).unwrap() <= best * (1.0 + 1e-12));
        }
    }

    #[test]
    fn miso_scales_with_antenna_count() {
        let one = miso_exact_max_snr(&miso(11, 500.0, 1, LAMBDA / 2.0)).unwrap();
        let nine = miso_exact_max_snr(&miso(11, 500.0, 3, LAMBDA / 2.0)).unwrap();
        assert_relative_eq!(nine, 9.0 * one, max_relative = 1e-14);
        let tiny = scenario(
            IrsPanel::new(1, 1, D).unwrap(),
            0.5,
            Placement::on_boresight(300.0).unwrap(),
            Placement::on_boresight(10.0).unwrap(),
        )
        .with_bs_array(1, 1, LAMBDA / 2.0)
        .unwrap();
        assert_relative_eq!(
            miso_exact_max_snr(&tiny).unwrap(),
            single_element_snr(&tiny),
            max_relative = 1e-14
        );
    }

    #[test]
    fn simulation_noiseless_and_deterministic() {
        let s = generic(5);
        let p = optimal_phases(&s);
        let cfg = SimulationConfig {
            symbol_count: 64,
            seed: 11,
            noiseless: true,
        };
        let out = simulate(&s, &p, cfg).unwrap();
        assert!(out.empirical_snr.is_infinite());
        assert_relative_eq!(out.signal_power, received_snr(&s, &p).unwrap(), max_relative = 1e-12);
        let noisy = SimulationConfig {
            noiseless: false,
            ..cfg
        };
        let a = simulate(&s, &p, noisy).unwrap();
        let b = simulate(&s, &p, noisy).unwrap();
        assert!(a
            .samples
            .iter()
            .zip(&b.samples)
            .all(|(x, y)| x.re.to_bits() == y.re.to_bits() && x.im.to_bits() == y.im.to_bits()));
        assert!(simulate(&s, &p, SimulationConfig { symbol_count: 0, ..cfg }).is_err());
    }

    #[test]
    fn simulation_converges() {
        let s = generic(5);
        let p = optimal_phases(&s);
        let out = simulate(
            &s,
            &p,
            SimulationConfig {
                symbol_count: 1_000_000,
                seed: 5,
                noiseless: false,
            },
        )
        .unwrap();
        let target = received_snr(&s, &p).unwrap();
        assert!((out.empirical_snr / target - 1.0).abs() < 0.01);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn dominance_property(seed in any::<u64>(), zen in 0.3f64..2.8, az in -1.2f64..1.2) {
            let s = scenario(
                IrsPanel::new(5, 7, D).unwrap(),
                1.0,
                Placement::from_angles(3.0, zen, az).unwrap(),
                Placement::from_angles(6.0, FRAC_PI_3, 0.2).unwrap(),
            );
            let best = received_snr(&s, &optimal_phases(&s)).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let phases = (0..35).map(|_| rng.random::<f64>() * 2.0 * PI).collect();
            prop_assert!(received_snr(&s, &PhaseProfile::new(phases).unwrap()).unwrap() <= best * (1.0 + 1e-12));
        }

        #[test]
        fn reciprocity_property(rq in 1.0f64..200.0, rp in 1.0f64..200.0, z1 in 0.2f64..2.9, z2 in 0.2f64..2.9) {
            let s = scenario(
                IrsPanel::new(31, 21, D).unwrap(),
                0.5,
                Placement::from_angles(rq, z1, 0.4).unwrap(),
                Placement::from_angles(rp, z2, -0.7).unwrap(),
            );
            let a = exact_max_snr(&s);
            let b = exact_max_snr(&s.swapped());
            prop_assert!((a - b).abs() <= 1e-12 * a);
        }
    }
}
