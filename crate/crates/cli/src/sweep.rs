//! One-parameter sweeps written as CSV.

use std::fs::File;
use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::Deserialize;
use xlirs::{IrsPanel, ReportEntry, SnrReport};

use crate::config::{Analysis, RunConfig};
use crate::error::{CliError, Result};
use crate::eval::{entries, has_nonconvergence, run_eval};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
pub enum Axis {
    /// Side length of a square surface, m.
    #[serde(rename = "irs_size_L")]
    #[value(name = "irs_size_L")]
    IrsSizeL,
    /// BS to surface-centre range, m.
    #[serde(rename = "link_distance_rq")]
    #[value(name = "link_distance_rq")]
    LinkDistanceRq,
    /// Length of a single-column surface, m.
    #[serde(rename = "ula_length_Lz")]
    #[value(name = "ula_length_Lz")]
    UlaLengthLz,
    /// Side length of a square surface serving a multi-antenna BS, m.
    #[serde(rename = "miso_size")]
    #[value(name = "miso_size")]
    MisoSize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    #[default]
    Linear,
    Log,
}

/// Sweep as written in a preset file.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub axis: Axis,
    pub from: f64,
    pub to: f64,
    pub points: usize,
    #[serde(default)]
    pub scale: Scale,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSpec {
    pub axis: Axis,
    pub from: f64,
    pub to: f64,
    pub points: usize,
    pub scale: Scale,
}

impl SweepSpec {
    pub fn new(axis: Axis, from: f64, to: f64, points: usize, scale: Scale) -> Result<Self> {
        if !(from < to) || !from.is_finite() || !to.is_finite() {
            return Err(CliError::Invalid(format!("sweep needs from < to, got {from} .. {to}")));
        }
        if points < 2 {
            return Err(CliError::Invalid(format!(
                "sweep needs at least 2 points, got {points}"
            )));
        }
        if scale == Scale::Log && !(from > 0.0) {
            return Err(CliError::Invalid(format!("log sweep needs from > 0, got {from}")));
        }
        if !(from > 0.0) {
            return Err(CliError::Invalid(format!(
                "{axis:?} values must be positive, got {from}"
            )));
        }
        Ok(Self {
            axis,
            from,
            to,
            points,
            scale,
        })
    }

    pub fn from_section(s: &SweepSection) -> Result<Self> {
        Self::new(s.axis, s.from, s.to, s.points, s.scale)
    }

    /// Axis values; the endpoints are hit exactly.
    pub fn values(&self) -> Vec<f64> {
        let last = (self.points - 1) as f64;
        (0..self.points)
            .map(|i| {
                if i == 0 {
                    return self.from;
                }
                if i == self.points - 1 {
                    return self.to;
                }
                let t = i as f64 / last;
                match self.scale {
                    Scale::Linear => self.from + t * (self.to - self.from),
                    Scale::Log => self.from * (self.to / self.from).powf(t),
                }
            })
            .collect()
    }
}

/// The configuration at one axis value.
pub fn apply(cfg: &RunConfig, axis: Axis, value: f64) -> Result<RunConfig> {
    let scn = &cfg.scenario;
    let spacing = scn.panel().spacing();
    let mut out = cfg.clone();
    match axis {
        Axis::IrsSizeL => {
            if cfg.analysis == Analysis::Linear {
                return Err(CliError::Invalid("use ula_length_Lz to sweep a linear surface".into()));
            }
            out.scenario = scn.with_panel(IrsPanel::square(value, spacing)?)?;
        }
        Axis::LinkDistanceRq => {
            out.scenario = scn.with_bs(scn.bs().with_range(value)?)?;
        }
        Axis::UlaLengthLz => {
            out.scenario = scn.with_panel(IrsPanel::with_size(spacing, value, spacing)?)?;
            out.analysis = Analysis::Linear;
        }
        Axis::MisoSize => {
            if scn.bs_array().is_none() {
                return Err(CliError::Invalid("miso_size needs a [bs_array] section".into()));
            }
            out.scenario = scn.with_panel(IrsPanel::square(value, spacing)?)?;
            out.analysis = Analysis::Miso;
        }
    }
    Ok(out)
}

pub const CSV_HEADER: [&str; 8] = [
    "axis_value",
    "snr_exact_db",
    "snr_integral_db",
    "snr_lower_db",
    "snr_upper_db",
    "snr_asymptote_db",
    "snr_upw_db",
    "snr_closed_db",
];

/// Twelve significant digits, locale-free, with `inf`/`nan` spelled out.
pub fn format_number(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{v:.11e}")
    }
}

/// dB value of an entry; missing quantities become NaN.
fn db_or_nan(entry: &ReportEntry) -> f64 {
    entry.db().unwrap_or(f64::NAN)
}

pub struct SweepRow {
    pub value: f64,
    pub report: SnrReport,
}

/// Evaluates every axis point. Points run concurrently; rows come back in
/// axis order.
pub fn evaluate(cfg: &RunConfig, spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    let configs: Vec<(f64, RunConfig)> = spec
        .values()
        .into_iter()
        .map(|v| apply(cfg, spec.axis, v).map(|c| (v, c)))
        .collect::<Result<_>>()?;
    Ok(configs
        .into_par_iter()
        .map(|(value, c)| SweepRow {
            value,
            report: run_eval(&c),
        })
        .collect())
}

pub fn write_csv<W: Write>(rows: &[SweepRow], out: W) -> std::io::Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(CSV_HEADER)?;
    for row in rows {
        let mut record = vec![format_number(row.value)];
        record.extend(entries(&row.report).iter().map(|(_, e)| format_number(db_or_nan(e))));
        w.write_record(&record)?;
    }
    w.flush()
}

/// Outcome of a sweep that produced its file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepStatus {
    Complete,
    /// Some quantities did not converge and were written as `nan`.
    Partial,
}

/// Runs the sweep and writes the CSV to `out_path`.
pub fn run_sweep(cfg: &RunConfig, spec: &SweepSpec, out_path: impl AsRef<Path>) -> Result<SweepStatus> {
    let out_path = out_path.as_ref();
    let rows = evaluate(cfg, spec)?;
    let mut status = SweepStatus::Complete;
    for row in &rows {
        for (name, entry) in entries(&row.report) {
            if let ReportEntry::Failed(e) = entry {
                log::warn!("{:?} = {}: {name} failed: {e}", spec.axis, row.value);
            }
        }
        if has_nonconvergence(&row.report) {
            status = SweepStatus::Partial;
        }
    }
    let file = File::create(out_path).map_err(|e| CliError::io(out_path, e))?;
    write_csv(&rows, std::io::BufWriter::new(file)).map_err(|e| CliError::io(out_path, e))?;
    Ok(status)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axis_values() {
        let s = SweepSpec::new(Axis::IrsSizeL, 1.0, 100.0, 3, Scale::Log).unwrap();
        let v = s.values();
        assert_eq!(v[0], 1.0);
        assert!((v[1] - 10.0).abs() < 1e-12);
        assert_eq!(v[2], 100.0);
        let s = SweepSpec::new(Axis::LinkDistanceRq, 5.0, 100.0, 20, Scale::Linear).unwrap();
        assert_eq!(s.values()[19], 100.0);
        assert!((s.values()[1] - 10.0).abs() < 1e-12);
    }

    #[test]
    fn spec_invariants() {
        assert!(SweepSpec::new(Axis::IrsSizeL, 2.0, 1.0, 5, Scale::Linear).is_err());
        assert!(SweepSpec::new(Axis::IrsSizeL, 1.0, 2.0, 1, Scale::Linear).is_err());
        assert!(SweepSpec::new(Axis::IrsSizeL, 0.0, 2.0, 5, Scale::Log).is_err());
    }

    #[test]
    fn number_format() {
        assert_eq!(format_number(93.12345678901234), "9.31234567890e1");
        assert_eq!(format_number(f64::INFINITY), "inf");
        assert_eq!(format_number(f64::NAN), "nan");
        assert_eq!(format_number(-0.5), "-5.00000000000e-1");
    }
}
