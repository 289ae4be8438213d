use std::f64::consts::{FRAC_PI_2, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use xlirs::channel::{exact_max_snr, optimal_phases, received_snr};
use xlirs::upa::{integral_snr, snr_bounds};
use xlirs::upw::upw_snr;
use xlirs::{GainPattern, IrsPanel, PhaseProfile, Placement, Scenario, UpwParams};

const LAMBDA: f64 = 0.125;
const D: f64 = LAMBDA / 3.0;

fn random_placement(rng: &mut impl Rng, lo: f64, hi: f64) -> Placement {
    loop {
        let range = rng.random_range(lo..hi);
        let zenith = rng.random_range(0.0..PI);
        let azimuth = rng.random_range(-FRAC_PI_2..FRAC_PI_2);
        if zenith.sin() * azimuth.cos() > 0.1 {
            return Placement::from_angles(range, zenith, azimuth).unwrap();
        }
    }
}

fn random_scenario(rng: &mut impl Rng, max_length: f64) -> Scenario {
    let pattern = [
        GainPattern::semi_isotropic(),
        GainPattern::cosine(),
        GainPattern::cosine_squared(),
    ][rng.random_range(0..3)];
    let length = rng.random_range(0.5..max_length);
    Scenario::new(
        LAMBDA,
        1e9,
        IrsPanel::square(length, D).unwrap(),
        pattern,
        random_placement(rng, 5.0, 500.0),
        random_placement(rng, 5.0, 500.0),
    )
    .unwrap()
}

#[test]
fn bounds_sandwich_random_scenarios() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..8 {
        let s = random_scenario(&mut rng, 6.0);
        let b = snr_bounds(&s, 1e-9).unwrap();
        let integral = integral_snr(&s, 1e-9).unwrap();
        assert!(b.lower <= integral && integral <= b.upper, "{b:?} vs {integral}");
        let exact = exact_max_snr(&s);
        assert!(b.lower / 1.015 <= exact && exact <= 1.015 * b.upper);
    }
}

#[test]
fn swap_reciprocity() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..5 {
        let s = random_scenario(&mut rng, 4.0);
        let (a, b) = (exact_max_snr(&s), exact_max_snr(&s.swapped()));
        assert!((a - b).abs() <= 1e-12 * a);
    }
}

#[test]
fn optimal_phases_beat_random_profiles() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let s = random_scenario(&mut rng, 2.0);
    let best = received_snr(&s, &optimal_phases(&s)).unwrap();
    assert!((best - exact_max_snr(&s)).abs() <= 1e-9 * best);
    for _ in 0..20 {
        let phases = (0..s.panel().element_count())
            .map(|_| rng.random_range(0.0..2.0 * PI))
            .collect();
        let v = received_snr(&s, &PhaseProfile::new(phases).unwrap()).unwrap();
        assert!(v <= best);
    }
}

#[test]
fn plane_wave_model_holds_for_small_far_panels() {
    // 0.3 m panel, both ends well beyond its Rayleigh distance.
    let s = Scenario::new(
        LAMBDA,
        1e9,
        IrsPanel::square(0.3, D).unwrap(),
        GainPattern::cosine(),
        Placement::on_boresight(10.0).unwrap(),
        Placement::on_boresight(100.0).unwrap(),
    )
    .unwrap();
    let upw = upw_snr(&s, &UpwParams::for_wavelength(LAMBDA));
    let exact = exact_max_snr(&s);
    assert!((upw - exact).abs() / exact < 0.05);
    let integral = integral_snr(&s, 1e-10).unwrap();
    assert!((upw - integral).abs() / integral < 0.05);
}
