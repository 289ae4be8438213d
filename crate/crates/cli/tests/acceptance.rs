//! Acceptance suite: one PASS/FAIL line per criterion at its pinned tolerance
//! and runtime budget. Exits non-zero if any criterion fails.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, FRAC_PI_6, PI};
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use xlirs::channel::{
    exact_max_snr, miso_channel_matrix, miso_exact_max_snr, miso_optimal_phases, miso_received_snr, mrt_beamformer,
    optimal_phases, rank_one_far_channel, received_snr,
};
use xlirs::miso::closed_u_half;
use xlirs::numerics::incomplete_elliptic_f;
use xlirs::pattern::hemisphere_power;
use xlirs::ula::{ula_asymptotic_snr, ula_closed_snr};
use xlirs::upa::{boresight_g, bound_function_f, closed_g_half, closed_g_one, integral_snr, scenario_asymptote};
use xlirs::upw::upw_snr;
use xlirs::{Complex64, DVector, GainPattern, IrsPanel, PhaseProfile, Placement, Scenario, UpwParams};

const LAMBDA: f64 = 0.125;
const D: f64 = LAMBDA / 3.0;
const SLACK: f64 = 0.015;

type Check = std::result::Result<String, String>;
/// Number, name, runtime budget in seconds, check.
type Criterion = (u8, &'static str, u64, fn() -> Check);

fn pass_if(ok: bool, detail: String) -> Check {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn boresight_link(length: f64, q: f64, transmit_snr: f64) -> Scenario {
    Scenario::new(
        LAMBDA,
        transmit_snr,
        IrsPanel::square(length, D).unwrap(),
        GainPattern::new(q).unwrap(),
        Placement::on_boresight(10.0).unwrap(),
        Placement::on_boresight(100.0).unwrap(),
    )
    .unwrap()
}

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

fn random_link(rng: &mut impl Rng, length: (f64, f64)) -> Scenario {
    let q = [0.0, 0.5, 1.0][rng.random_range(0..3)];
    let length = rng.random_range(length.0..length.1);
    Scenario::new(
        LAMBDA,
        1e9,
        IrsPanel::square(length, D).unwrap(),
        GainPattern::new(q).unwrap(),
        random_placement(rng, 5.0, 500.0),
        random_placement(rng, 5.0, 500.0),
    )
    .unwrap()
}

fn power_conservation() -> Check {
    let mut worst: f64 = 0.0;
    for q in [0.0, 0.5, 1.0, 2.0, 4.0] {
        let p = hemisphere_power(&GainPattern::new(q).unwrap(), 1e-12).map_err(|e| e.to_string())?;
        worst = worst.max(rel(p.value, 4.0 * PI));
    }
    pass_if(worst <= 1e-8, format!("max relative error {worst:.2e} (<= 1e-8)"))
}

fn elliptic_constant() -> Check {
    let f = incomplete_elliptic_f(FRAC_PI_4, 2.0).map_err(|e| e.to_string())?;
    let v = f * f;
    pass_if(
        (1.7178..=1.7198).contains(&v),
        format!("F(pi/4|2)^2 = {v:.6} (in [1.7178, 1.7198])"),
    )
}

fn sandwich() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5a4d);
    let (mut violations, mut slack_violations) = (0, 0);
    let mut worst_exact: f64 = 0.0;
    for _ in 0..50 {
        let s = random_link(&mut rng, (0.5, 20.0));
        let panel = s.panel();
        let run = || -> xlirs::Result<(f64, f64, f64)> {
            Ok((
                bound_function_f(&s, panel.inscribed_radius(), 1e-9)?,
                integral_snr(&s, 1e-9)?,
                bound_function_f(&s, panel.circumscribed_radius(), 1e-9)?,
            ))
        };
        let (lo, mid, hi) = run().map_err(|e| e.to_string())?;
        if !(lo <= mid && mid <= hi) {
            violations += 1;
        }
        let exact = exact_max_snr(&s);
        let outside = (lo - exact).max(exact - hi).max(0.0) / mid;
        worst_exact = worst_exact.max(outside);
        if !(lo * (1.0 - SLACK) <= exact && exact <= hi * (1.0 + SLACK)) {
            slack_violations += 1;
        }
    }
    pass_if(
        violations == 0 && slack_violations == 0,
        format!(
            "{violations}/50 integral outside [f(R1), f(R2)]; {slack_violations}/50 summation outside \
             1.5%-inflated bounds (worst excursion {worst_exact:.2e})"
        ),
    )
}

fn closed_forms() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0x6c6d);
    let mut worst: f64 = 0.0;
    let mut equal_range = 0;
    for i in 0..50 {
        let rho = if i % 10 == 0 {
            1.0
        } else {
            1.0 - rng.random_range(0.0..0.99)
        };
        if rho == 1.0 {
            equal_range += 1;
        }
        let near = 10.0;
        let radius = near * 10f64.powf(rng.random_range(-2.0..2.0));
        let pairs = [
            (
                closed_g_half(rho, near, radius),
                boresight_g(rho, near, radius, 0.5, 1e-12),
            ),
            (
                closed_g_one(rho, near, radius),
                boresight_g(rho, near, radius, 1.0, 1e-12),
            ),
        ];
        for (closed, quad) in pairs {
            let (c, g) = (closed.map_err(|e| e.to_string())?, quad.map_err(|e| e.to_string())?);
            worst = worst.max(rel(c, g));
        }
    }
    pass_if(
        worst <= 1e-8,
        format!("max relative gap {worst:.2e} over 100 comparisons, {equal_range} at rho = 1 (<= 1e-8)"),
    )
}

fn saturation() -> Check {
    let mut detail = Vec::new();
    let mut ok = true;
    let mut half_limit = 0.0;
    for q in [0.5, 1.0] {
        let s = boresight_link(400.0, q, 1e9);
        let exact = exact_max_snr(&s);
        let limit = scenario_asymptote(&s, 1e-10)
            .map_err(|e| e.to_string())?
            .finite()
            .unwrap();
        if q == 0.5 {
            half_limit = limit;
        }
        let r = exact / limit;
        ok &= rel(exact, limit) <= 0.05;
        detail.push(format!("q'={q}: exact/asymptote = {r:.4}"));
    }
    let iso = exact_max_snr(&boresight_link(400.0, 0.0, 1e9));
    ok &= iso > half_limit;
    detail.push(format!(
        "q'=0 exceeds the q'=1/2 limit by {:.2} dB",
        10.0 * (iso / half_limit).log10()
    ));
    pass_if(ok, format!("{} (within 5%)", detail.join("; ")))
}

fn plane_wave_regime() -> Check {
    let beta = UpwParams::for_wavelength(LAMBDA);
    let mut worst: f64 = 0.0;
    let mut largest = 0.0;
    for count in (1..).step_by(2) {
        let length = count as f64 * D;
        if length > 1.0 {
            break;
        }
        largest = length;
        let s = boresight_link(1.0, 0.5, 1e9)
            .with_panel(IrsPanel::new(count, count, D).unwrap())
            .unwrap();
        worst = worst.max(rel(upw_snr(&s, &beta), exact_max_snr(&s)));
    }
    let big = boresight_link(100.0, 0.5, 1e9);
    let limit = scenario_asymptote(&big, 1e-10)
        .map_err(|e| e.to_string())?
        .finite()
        .unwrap();
    let ratio = upw_snr(&big, &beta) / limit;
    pass_if(
        worst <= 0.05 && ratio >= 2.0,
        format!("max |upw - exact|/exact = {worst:.4} for L <= {largest:.3} m (<= 5%); upw/asymptote at 100 m = {ratio:.1} (>= 2)"),
    )
}

fn fig8(length: f64) -> Scenario {
    Scenario::new(
        LAMBDA,
        1e12,
        IrsPanel::with_size(D, length, D).unwrap(),
        GainPattern::cosine(),
        Placement::from_angles(10.0, FRAC_PI_3, FRAC_PI_6).unwrap(),
        Placement::from_angles(100.0, 3.0 * PI / 4.0, -PI / 5.0).unwrap(),
    )
    .unwrap()
}

fn linear_surface() -> Check {
    let mut worst: f64 = 0.0;
    let mut worst_at = 0.0;
    for i in 0..50 {
        let length = 50f64.powf(i as f64 / 49.0);
        let s = fig8(length);
        let closed = ula_closed_snr(&s).map_err(|e| e.to_string())?.value;
        let r = rel(closed, exact_max_snr(&s));
        if r > worst {
            worst = r;
            worst_at = length;
        }
    }
    let big = fig8(1e3);
    let limit = ula_asymptotic_snr(&big).map_err(|e| e.to_string())?;
    let ratio = exact_max_snr(&big) / limit;
    pass_if(
        worst <= 0.05 && (ratio - 1.0).abs() <= 0.05,
        format!(
            "closed vs summation: max gap {worst:.4} (at L_z = {worst_at:.1} m) over [1, 50] m (<= 5%); \
             summation/asymptote at 1 km = {ratio:.4} ({:.2} dB limit)",
            10.0 * limit.log10()
        ),
    )
}

fn fig9(length: f64) -> Scenario {
    Scenario::new(
        LAMBDA,
        1e9,
        IrsPanel::square(length, D).unwrap(),
        GainPattern::cosine(),
        Placement::from_angles(1e3, FRAC_PI_3, -FRAC_PI_4).unwrap(),
        Placement::from_angles(10.0, FRAC_PI_2, 0.0).unwrap(),
    )
    .unwrap()
    .with_bs_array(3, 3, LAMBDA / 2.0)
    .unwrap()
}

fn multi_antenna() -> Check {
    let mut ok = true;
    let mut detail = Vec::new();
    for length in [1.0, 2.0, 4.0, 8.0] {
        let s = fig9(length);
        let p = s.panel();
        let f = || -> xlirs::Result<(f64, f64, f64, f64)> {
            let lo = closed_u_half(&s, p.inscribed_radius())?.value;
            let hi = closed_u_half(&s, p.circumscribed_radius())?.value;
            let exact = miso_exact_max_snr(&s)?;
            let h = miso_channel_matrix(&s)?;
            let far = rank_one_far_channel(&s)?.value;
            Ok((lo, exact, hi, (&h - &far).norm() / h.norm()))
        };
        let (lo, exact, hi, frob) = f().map_err(|e| e.to_string())?;
        let inside = lo * (1.0 - SLACK) <= exact && exact <= hi * (1.0 + SLACK);
        ok &= inside && frob < 0.02;
        detail.push(format!(
            "L={length}: bounds {}, rank-one error {frob:.4}",
            if inside { "hold" } else { "violated" }
        ));
    }
    pass_if(ok, format!("{} (1.5% slack; error < 0.02)", detail.join("; ")))
}

fn random_unit(rng: &mut impl Rng, n: usize) -> DVector<Complex64> {
    let v = DVector::from_fn(n, |_, _| {
        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    let norm = v.norm();
    v / Complex64::from(norm)
}

fn optimality() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0x0971);
    let (mut phase_losses, mut beam_losses) = (0, 0);
    for _ in 0..10 {
        let s = random_link(&mut rng, (0.2, 1.0));
        let best = received_snr(&s, &optimal_phases(&s)).map_err(|e| e.to_string())?;
        for _ in 0..100 {
            let phases = (0..s.panel().element_count())
                .map(|_| rng.random_range(0.0..2.0 * PI))
                .collect();
            let v = received_snr(&s, &PhaseProfile::new(phases).unwrap()).map_err(|e| e.to_string())?;
            if v > best * (1.0 + 1e-12) {
                phase_losses += 1;
            }
        }
    }
    for _ in 0..10 {
        let s = random_link(&mut rng, (0.2, 1.0))
            .with_bs(random_placement(&mut rng, 200.0, 1000.0))
            .unwrap()
            .with_bs_array(3, 3, LAMBDA / 2.0)
            .unwrap();
        let run = |rng: &mut ChaCha8Rng| -> xlirs::Result<usize> {
            let h = rank_one_far_channel(&s)?.value;
            let snr = |v: &DVector<Complex64>| -> xlirs::Result<f64> {
                miso_received_snr(&s, &h, &miso_optimal_phases(&s, &h, v)?, v)
            };
            let best = snr(&mrt_beamformer(&s)?)?;
            let mut losses = 0;
            for _ in 0..100 {
                if snr(&random_unit(rng, 9))? > best * (1.0 + 1e-12) {
                    losses += 1;
                }
            }
            Ok(losses)
        };
        beam_losses += run(&mut rng).map_err(|e| e.to_string())?;
    }
    pass_if(
        phase_losses == 0 && beam_losses == 0,
        format!("{phase_losses}/1000 random phase profiles and {beam_losses}/1000 random beamformers beat the optimum"),
    )
}

fn figure_bytes(threads: &str, dir: &std::path::Path) -> Result<Vec<u8>, String> {
    let status = Command::new(env!("CARGO_BIN_EXE_xlirs"))
        .args(["figure", "fig6a", "--out"])
        .arg(dir)
        .env("XLIRS_THREADS", threads)
        .status()
        .map_err(|e| e.to_string())?;
    if !status.success() {
        return Err(format!("figure fig6a exited with {status}"));
    }
    std::fs::read(dir.join("fig6a.csv")).map_err(|e| e.to_string())
}

fn reciprocity_and_determinism() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0x1010);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let s = random_link(&mut rng, (0.5, 10.0));
        worst = worst.max(rel(exact_max_snr(&s.swapped()), exact_max_snr(&s)));
    }
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let (a, b) = (tmp.path().join("one"), tmp.path().join("four"));
    let same = figure_bytes("1", &a)? == figure_bytes("4", &b)?;
    pass_if(
        worst <= 1e-12 && same,
        format!(
            "max swap gap {worst:.2e} (<= 1e-12); fig6a CSV {} across 1 and 4 threads",
            if same { "byte-identical" } else { "differs" }
        ),
    )
}

fn main() {
    let criteria: [Criterion; 10] = [
        (1, "power conservation", 1, power_conservation),
        (2, "elliptic constant", 1, elliptic_constant),
        (3, "bounds sandwich", 120, sandwich),
        (4, "closed-form equivalence", 30, closed_forms),
        (5, "asymptotic saturation", 5, saturation),
        (6, "plane-wave regime", 10, plane_wave_regime),
        (7, "linear-surface closed form", 10, linear_surface),
        (8, "multi-antenna bounds", 30, multi_antenna),
        (9, "optimality", 30, optimality),
        (10, "reciprocity and determinism", 60, reciprocity_and_determinism),
    ];
    let mut failed = Vec::new();
    for (id, name, budget, check) in criteria {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        let in_time = elapsed <= Duration::from_secs(budget);
        let (ok, detail) = match outcome {
            Ok(d) => (in_time, d),
            Err(d) => (false, d),
        };
        println!(
            "criterion {id:>2} {}: {name}: {detail} [{:.2} s, budget {budget} s{}]",
            if ok { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            if in_time { "" } else { ", over budget" }
        );
        if !ok {
            failed.push(id);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all 10 criteria pass");
    } else {
        println!("acceptance: {} failing: {failed:?}", failed.len());
        std::process::exit(1);
    }
}
