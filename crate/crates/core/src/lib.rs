//! Near-field SNR modelling for links assisted by an extremely large
//! intelligent reflecting surface (XL-IRS).
//!
//! The surface lies in the y-z plane with its normal along +x. Every SNR is
//! linear unless a function name says otherwise.

pub mod channel;
pub mod error;
pub mod geometry;
pub mod miso;
pub mod numerics;
pub mod pattern;
pub mod regime;
pub mod ula;
pub mod upa;
pub mod upw;

pub use channel::{ChannelVector, Complex64, PhaseProfile, Scenario, Side, SimulationConfig, SimulationOutput};
pub use error::{Error, Result};
pub use geometry::{BsArray, Direction, DistanceRatio, IrsPanel, Nearer, Placement, Point3};
pub use nalgebra::{DMatrix, DVector};
pub use numerics::{QuadratureResult, DEFAULT_TOL};
pub use pattern::{EffectiveAperture, GainPattern};
pub use regime::{Flagged, RegimeWarning};
pub use ula::AngularSpan;
pub use upa::{from_db, to_db, Asymptote, BoundRegime, ReportEntry, SnrBounds, SnrReport};
pub use upw::UpwParams;
