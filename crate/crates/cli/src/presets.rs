//! Built-in figure presets.

use std::path::{Path, PathBuf};

use crate::config::{build, parse_file, RunConfig};
use crate::error::{CliError, Result};
use crate::sweep::{run_sweep, SweepSpec, SweepStatus};

const PRESETS: [(&str, &str); 8] = [
    ("fig6a", include_str!("../presets/fig6a.toml")),
    ("fig6b", include_str!("../presets/fig6b.toml")),
    ("fig6c", include_str!("../presets/fig6c.toml")),
    ("fig7a", include_str!("../presets/fig7a.toml")),
    ("fig7b", include_str!("../presets/fig7b.toml")),
    ("fig7c", include_str!("../presets/fig7c.toml")),
    ("fig8", include_str!("../presets/fig8.toml")),
    ("fig9", include_str!("../presets/fig9.toml")),
];

/// Names accepted by [`run_figure`]. `fig7` expands to its three panels.
pub const FIGURES: [&str; 6] = ["fig6a", "fig6b", "fig6c", "fig7", "fig8", "fig9"];

/// Preset files making up one figure.
pub fn parts(figure: &str) -> Result<Vec<&'static str>> {
    match figure {
        "fig7" => Ok(vec!["fig7a", "fig7b", "fig7c"]),
        f => PRESETS
            .iter()
            .find(|(n, _)| *n == f)
            .map(|(n, _)| vec![*n])
            .ok_or_else(|| CliError::Invalid(format!("unknown figure {f:?}; expected one of {}", FIGURES.join(", ")))),
    }
}

/// Scenario and sweep of a single preset file.
pub fn load_preset(name: &str) -> Result<(RunConfig, SweepSpec)> {
    let (_, text) = PRESETS
        .iter()
        .find(|(n, _)| *n == name)
        .ok_or_else(|| CliError::Invalid(format!("unknown preset {name:?}")))?;
    let file = parse_file(text, name)?;
    let sweep = file
        .sweep
        .as_ref()
        .ok_or_else(|| CliError::Invalid(format!("preset {name} has no [sweep]")))?;
    Ok((build(&file)?, SweepSpec::from_section(sweep)?))
}

/// Writes `<out_dir>/<part>.csv` for every part of the figure.
pub fn run_figure(figure: &str, out_dir: &Path) -> Result<(Vec<PathBuf>, SweepStatus)> {
    std::fs::create_dir_all(out_dir).map_err(|e| CliError::io(out_dir, e))?;
    let mut written = Vec::new();
    let mut status = SweepStatus::Complete;
    for part in parts(figure)? {
        let (cfg, spec) = load_preset(part)?;
        let path = out_dir.join(format!("{part}.csv"));
        log::info!("{part}: {} points along {:?}", spec.points, spec.axis);
        if run_sweep(&cfg, &spec, &path)? == SweepStatus::Partial {
            status = SweepStatus::Partial;
        }
        written.push(path);
    }
    Ok((written, status))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Analysis;
    use crate::sweep::Axis;

    #[test]
    fn every_preset_loads() {
        for (name, _) in PRESETS {
            load_preset(name).unwrap();
        }
        assert_eq!(parts("fig7").unwrap().len(), 3);
        assert!(parts("fig10").is_err());
    }

    #[test]
    fn fig6_parameters() {
        let (cfg, spec) = load_preset("fig6b").unwrap();
        let s = &cfg.scenario;
        assert_eq!(s.wavelength(), 0.125);
        assert_eq!(s.panel().spacing(), 0.125 / 3.0);
        assert!((s.transmit_snr() - 1e9).abs() < 1e-3);
        assert_eq!(s.pattern().exponent(), 0.5);
        let (bs, user) = (s.bs().cartesian(), s.user().cartesian());
        assert!((bs[0] - 10.0).abs() < 1e-12 && bs[1].abs() < 1e-12 && bs[2].abs() < 1e-12);
        assert!((user[0] - 100.0).abs() < 1e-12 && user[1].abs() < 1e-12 && user[2].abs() < 1e-12);
        assert_eq!(spec.axis, Axis::IrsSizeL);
        assert_eq!(cfg.analysis, Analysis::Planar);
    }

    #[test]
    fn analyses_match_figures() {
        assert_eq!(load_preset("fig8").unwrap().0.analysis, Analysis::Linear);
        let (cfg, spec) = load_preset("fig9").unwrap();
        assert_eq!(cfg.analysis, Analysis::Miso);
        assert_eq!(spec.axis, Axis::MisoSize);
        assert_eq!(cfg.scenario.bs_array().unwrap().antenna_count(), 9);
        assert!((cfg.scenario.transmit_snr() - 1e9).abs() < 1e-3);
        assert!((load_preset("fig8").unwrap().0.scenario.transmit_snr() - 1e12).abs() < 1.0);
    }
}
