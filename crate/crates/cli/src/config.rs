//! Scenario files.
//!
//! ```toml
//! wavelength = 0.125          # m, optional
//! spacing = 0.0416667         # m, optional (wavelength / 3)
//! transmit_snr_db = 90        # optional
//! directivity = 0.5           # q', optional
//! analysis = "planar"         # planar | linear | miso, optional
//!
//! [irs]                       # optional, 8 m square by default
//! length = 8.0
//!
//! [bs]
//! range = 10
//! zenith = "pi/2"
//! azimuth = 0
//!
//! [user]
//! range = 100
//! zenith = "pi/2"
//! azimuth = 0
//! ```

use std::path::Path;

use serde::Deserialize;
use xlirs::{from_db, GainPattern, IrsPanel, Placement, Scenario, UpwParams, DEFAULT_TOL};

use crate::angle::Angle;
use crate::error::{CliError, Result};
use crate::sweep::SweepSection;

pub const DEFAULT_WAVELENGTH: f64 = 0.125;
pub const DEFAULT_TRANSMIT_SNR_DB: f64 = 90.0;
pub const DEFAULT_DIRECTIVITY: f64 = 0.5;
pub const DEFAULT_PANEL_LENGTH: f64 = 8.0;

/// Which family of formulas a scenario is evaluated with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Analysis {
    /// Square or rectangular surface, single-antenna BS.
    Planar,
    /// Single-column surface.
    Linear,
    /// Planar surface with a BS antenna array.
    Miso,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub wavelength: Option<f64>,
    pub spacing: Option<f64>,
    pub transmit_snr_db: Option<f64>,
    pub directivity: Option<f64>,
    pub analysis: Option<Analysis>,
    /// Reference gain at 1 m for the plane-wave baseline.
    pub beta0: Option<f64>,
    pub tolerance: Option<f64>,
    pub irs: Option<IrsSection>,
    pub bs: PlacementSection,
    pub user: PlacementSection,
    pub bs_array: Option<ArraySection>,
    /// Only read by figure presets.
    pub sweep: Option<SweepSection>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IrsSection {
    pub length: Option<f64>,
    pub length_y: Option<f64>,
    pub length_z: Option<f64>,
    pub count_y: Option<usize>,
    pub count_z: Option<usize>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlacementSection {
    pub range: f64,
    pub zenith: Angle,
    pub azimuth: Angle,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArraySection {
    pub count_y: usize,
    pub count_z: usize,
    /// Defaults to half a wavelength.
    pub spacing: Option<f64>,
}

/// A validated scenario with the evaluation settings that travel with it.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub scenario: Scenario,
    pub analysis: Analysis,
    pub upw: UpwParams,
    pub tolerance: f64,
}

/// Reads and validates a scenario file.
pub fn load_scenario(path: impl AsRef<Path>) -> Result<RunConfig> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let file = parse_file(&text, &path.display().to_string())?;
    build(&file)
}

pub fn parse_file(text: &str, origin: &str) -> Result<ScenarioFile> {
    toml::from_str(text).map_err(|e| CliError::Parse {
        path: origin.to_string(),
        message: e.to_string().trim_end().to_string(),
    })
}

fn placement(section: &PlacementSection, name: &str) -> Result<Placement> {
    Placement::from_angles(section.range, section.zenith.0, section.azimuth.0)
        .map_err(|e| CliError::Invalid(format!("[{name}]: {e}")))
}

fn panel(irs: &IrsSection, spacing: f64, analysis: Option<Analysis>) -> Result<IrsPanel> {
    let linear = analysis == Some(Analysis::Linear);
    let panel = match (irs.count_y, irs.count_z) {
        (Some(y), Some(z)) => IrsPanel::new(y, z, spacing)?,
        (None, None) => {
            let side = irs.length.unwrap_or(DEFAULT_PANEL_LENGTH);
            let length_z = irs.length_z.unwrap_or(side);
            let length_y = match irs.length_y {
                Some(v) => v,
                None if linear => spacing,
                None => side,
            };
            IrsPanel::with_size(length_y, length_z, spacing)?
        }
        _ => {
            return Err(CliError::Invalid(
                "[irs]: give both count_y and count_z, or lengths".into(),
            ))
        }
    };
    if linear && panel.count_y() != 1 {
        return Err(CliError::Invalid(format!(
            "linear analysis needs a single column, got count_y = {}",
            panel.count_y()
        )));
    }
    Ok(panel)
}

/// Applies defaults and validates every invariant.
pub fn build(file: &ScenarioFile) -> Result<RunConfig> {
    let wavelength = file.wavelength.unwrap_or(DEFAULT_WAVELENGTH);
    if !(wavelength > 0.0 && wavelength.is_finite()) {
        return Err(CliError::Invalid(format!(
            "wavelength must be positive, got {wavelength}"
        )));
    }
    let spacing = file.spacing.unwrap_or(wavelength / 3.0);
    let pattern = GainPattern::new(file.directivity.unwrap_or(DEFAULT_DIRECTIVITY))?;
    let panel = panel(&file.irs.clone().unwrap_or_default(), spacing, file.analysis)?;
    let transmit_snr = from_db(file.transmit_snr_db.unwrap_or(DEFAULT_TRANSMIT_SNR_DB));
    let mut scenario = Scenario::new(
        wavelength,
        transmit_snr,
        panel,
        pattern,
        placement(&file.bs, "bs")?,
        placement(&file.user, "user")?,
    )?;
    if let Some(a) = &file.bs_array {
        scenario = scenario.with_bs_array(a.count_y, a.count_z, a.spacing.unwrap_or(0.5 * wavelength))?;
    }
    let analysis = match file.analysis {
        Some(a) => a,
        None if file.bs_array.is_some() => Analysis::Miso,
        None if scenario.panel().count_y() == 1 => Analysis::Linear,
        None => Analysis::Planar,
    };
    if analysis == Analysis::Miso && file.bs_array.is_none() {
        return Err(CliError::Invalid("miso analysis needs a [bs_array] section".into()));
    }
    let upw = match file.beta0 {
        Some(b) => UpwParams::new(b)?,
        None => UpwParams::for_wavelength(wavelength),
    };
    let tolerance = file.tolerance.unwrap_or(DEFAULT_TOL);
    if !(tolerance > 0.0 && tolerance < 1.0) {
        return Err(CliError::Invalid(format!(
            "tolerance must lie in (0, 1), got {tolerance}"
        )));
    }
    Ok(RunConfig {
        scenario,
        analysis,
        upw,
        tolerance,
    })
}
