use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::numerics::{error_floor, QuadratureResult};

// 21-point Kronrod extension of the 10-point Gauss rule (QUADPACK qk21).
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_600_525_986_979,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

// Gauss weights for the odd-indexed Kronrod nodes.
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

const EVALS_PER_PANEL: usize = 21;

// A panel this much narrower than the whole interval, still carrying the
// largest error and sitting on an edge, means an endpoint singularity.
// Bisection cannot resolve it, so we give up early and let the caller
// switch to a rule built for it.
const EDGE_PANEL_FRACTION: f64 = 1.0 / (1u64 << 36) as f64;

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    // Largest error first; ties broken by position so the order is total.
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

fn kronrod21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Panel {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = WGK[10] * fc;
    let mut gauss = 0.0;
    for j in 0..10 {
        let dx = half * XGK[j];
        let pair = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    let value = kronrod * half;
    let mut error = ((kronrod - gauss) * half).abs();
    if !value.is_finite() || !error.is_finite() {
        error = f64::INFINITY;
    }
    Panel { a, b, value, error }
}

/// Globally adaptive 21-point Gauss-Kronrod quadrature.
///
/// The interval is pre-split at `breaks` (sorted, strictly inside `(a, b)`).
/// The panel with the largest error estimate is bisected until the summed
/// error drops below `max(tol * |value|, abs_tol)` or `max_evals` is spent.
/// Nodes never touch the interval endpoints.
pub fn adaptive_gauss_kronrod<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    breaks: &[f64],
    tol: f64,
    abs_tol: f64,
    max_evals: usize,
) -> Result<QuadratureResult> {
    let mut heap = BinaryHeap::new();
    let mut evaluations = 0;
    let mut lo = a;
    for &x in breaks.iter().chain(std::iter::once(&b)) {
        heap.push(kronrod21(f, lo, x));
        evaluations += EVALS_PER_PANEL;
        lo = x;
    }
    // Panels too narrow to split further are parked here.
    let mut frozen: Vec<Panel> = Vec::new();

    loop {
        let (value, error) = totals(heap.iter().chain(frozen.iter()));
        let accepted = (tol * value.abs()).max(abs_tol).max(error_floor(value));
        if error <= accepted {
            return Ok(QuadratureResult {
                value,
                error_estimate: error,
                evaluations,
            });
        }
        let Some(worst) = heap.pop() else {
            return Err(Error::NoConvergence {
                estimate: value,
                error_estimate: error,
                evaluations,
            });
        };
        if evaluations + 2 * EVALS_PER_PANEL > max_evals {
            heap.push(worst);
            return Err(Error::NoConvergence {
                estimate: value,
                error_estimate: error,
                evaluations,
            });
        }
        let on_edge = worst.a == a || worst.b == b || breaks.contains(&worst.a) || breaks.contains(&worst.b);
        if on_edge && worst.b - worst.a < EDGE_PANEL_FRACTION * (b - a) {
            heap.push(worst);
            let (value, error) = totals(heap.iter().chain(frozen.iter()));
            return Err(Error::NoConvergence {
                estimate: value,
                error_estimate: error,
                evaluations,
            });
        }
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b)
            || (worst.b - worst.a) <= 64.0 * f64::EPSILON * worst.a.abs().max(worst.b.abs())
        {
            frozen.push(worst);
            continue;
        }
        heap.push(kronrod21(f, worst.a, mid));
        heap.push(kronrod21(f, mid, worst.b));
        evaluations += 2 * EVALS_PER_PANEL;
    }
}

fn totals<'a>(panels: impl Iterator<Item = &'a Panel>) -> (f64, f64) {
    // Sum in position order so the result does not depend on heap layout.
    let mut v: Vec<&Panel> = panels.collect();
    v.sort_by(|x, y| x.a.total_cmp(&y.a));
    let mut value = super::CompensatedSum::new();
    let mut error = 0.0;
    for p in v {
        value.add(p.value);
        error += p.error;
    }
    (value.total(), error)
}
