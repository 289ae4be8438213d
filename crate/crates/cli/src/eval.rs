use std::fmt::Write;

use xlirs::miso::miso_report;
use xlirs::ula::ula_report;
use xlirs::upa::snr_report;
use xlirs::upw::upw_snr;
use xlirs::{Error, ReportEntry, SnrReport};

use crate::config::{Analysis, RunConfig};

/// Every SNR quantity of the configured analysis. Parts that fail are
/// reported in place rather than aborting the whole report.
pub fn run_eval(cfg: &RunConfig) -> SnrReport {
    let scn = &cfg.scenario;
    let mut report = match cfg.analysis {
        Analysis::Planar => snr_report(scn, cfg.tolerance),
        Analysis::Linear => ula_report(scn, cfg.tolerance),
        Analysis::Miso => miso_report(scn, cfg.tolerance),
    };
    // The core reports use the default reference gain.
    let antennas = scn.bs_array().map_or(1, |a| a.antenna_count()) as f64;
    if cfg.analysis != Analysis::Miso {
        report.upw = ReportEntry::Value(upw_snr(scn, &cfg.upw));
    } else if report.upw.linear().is_some() {
        report.upw = ReportEntry::Value(antennas * upw_snr(scn, &cfg.upw));
    }
    report
}

/// `(name, entry)` in output order.
pub fn entries(report: &SnrReport) -> [(&'static str, &ReportEntry); 7] {
    [
        ("exact", &report.exact),
        ("integral", &report.integral),
        ("lower", &report.lower),
        ("upper", &report.upper),
        ("asymptote", &report.asymptote),
        ("upw", &report.upw),
        ("closed", &report.closed),
    ]
}

/// Whether any quantity was lost to quadrature non-convergence.
pub fn has_nonconvergence(report: &SnrReport) -> bool {
    entries(report)
        .iter()
        .any(|(_, e)| matches!(e.error(), Some(Error::NoConvergence { .. })))
}

/// Plain-text table with linear and dB columns.
pub fn format_report(report: &SnrReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{:<10} {:>20} {:>12}", "quantity", "linear", "dB");
    for (name, entry) in entries(report) {
        let _ = match entry {
            ReportEntry::Value(v) => writeln!(out, "{name:<10} {v:>20.12e} {:>12.6}", entry.db().unwrap_or(f64::NAN)),
            ReportEntry::Unbounded => writeln!(out, "{name:<10} {:>20} {:>12}", "unbounded", "inf"),
            ReportEntry::NotApplicable(why) => writeln!(out, "{name:<10} {:>20} {:>12}  ({why})", "n/a", "-"),
            ReportEntry::Failed(e) => writeln!(out, "{name:<10} {:>20} {:>12}  ({e})", "failed", "-"),
        };
    }
    out
}
