//! Applicability warnings for approximations that are evaluated anyway.

use std::fmt;

/// A condition under which an approximate formula loses accuracy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RegimeWarning {
    /// The near/far distance ratio is too large for a small-ratio form.
    DistanceRatioTooLarge { rho: f64, limit: f64 },
    /// An endpoint sits too far off the surface normal.
    NotBoresight { margin: f64, limit: f64 },
    /// The BS is closer than the Rayleigh distance of the joint aperture.
    BsNotFarField { range: f64, rayleigh: f64 },
}

impl fmt::Display for RegimeWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::DistanceRatioTooLarge { rho, limit } => {
                write!(f, "distance ratio {rho:.4} exceeds {limit}")
            }
            Self::NotBoresight { margin, limit } => {
                write!(f, "boresight margin {margin:.4} exceeds {limit}")
            }
            Self::BsNotFarField { range, rayleigh } => {
                write!(f, "BS range {range} m is inside the Rayleigh distance {rayleigh:.1} m")
            }
        }
    }
}

/// A value together with the applicability warnings raised while computing it.
#[derive(Debug, Clone, PartialEq)]
pub struct Flagged<T> {
    pub value: T,
    pub warnings: Vec<RegimeWarning>,
}

impl<T> Flagged<T> {
    pub fn clean(value: T) -> Self {
        Self {
            value,
            warnings: Vec::new(),
        }
    }

    pub fn with_warnings(value: T, warnings: Vec<RegimeWarning>) -> Self {
        Self { value, warnings }
    }

    pub fn is_clean(&self) -> bool {
        self.warnings.is_empty()
    }

    pub fn map<U>(self, f: impl FnOnce(T) -> U) -> Flagged<U> {
        Flagged {
            value: f(self.value),
            warnings: self.warnings,
        }
    }
}
