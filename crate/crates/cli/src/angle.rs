//! Angles written either as radians or as multiples of pi.

use std::f64::consts::PI;
use std::fmt;

use serde::de::{self, Deserializer, Visitor};
use serde::Deserialize;

/// An angle in radians, deserialized from a number or a string such as
/// `"pi/3"`, `"3pi/4"`, `"-pi/5"` or `"0.25*pi"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Angle(pub f64);

/// Parses `[sign][coefficient][*]pi[/denominator]` or a plain number.
pub fn parse_angle(text: &str) -> Result<f64, String> {
    let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let lower = compact.to_ascii_lowercase().replace('π', "pi");
    if let Ok(v) = lower.parse::<f64>() {
        return finite(v, text);
    }
    let bad = || format!("cannot parse angle {text:?}; use radians or a form like \"3pi/4\"");
    let Some(at) = lower.find("pi") else {
        return Err(bad());
    };
    let (head, tail) = (&lower[..at], &lower[at + 2..]);
    let head = head.strip_suffix('*').unwrap_or(head);
    let coefficient = match head {
        "" | "+" => 1.0,
        "-" => -1.0,
        h => h.parse::<f64>().map_err(|_| bad())?,
    };
    let denominator = match tail {
        "" => 1.0,
        t => {
            let d = t.strip_prefix('/').ok_or_else(bad)?;
            d.parse::<f64>().map_err(|_| bad())?
        }
    };
    if denominator == 0.0 {
        return Err(format!("angle {text:?} divides by zero"));
    }
    finite(coefficient * PI / denominator, text)
}

fn finite(v: f64, text: &str) -> Result<f64, String> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("angle {text:?} is not finite"))
    }
}

impl<'de> Deserialize<'de> for Angle {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct AngleVisitor;

        impl Visitor<'_> for AngleVisitor {
            type Value = Angle;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an angle in radians or a string like \"pi/3\"")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Angle, E> {
                Ok(Angle(v))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Angle, E> {
                Ok(Angle(v as f64))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Angle, E> {
                Ok(Angle(v as f64))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Angle, E> {
                parse_angle(v).map(Angle).map_err(E::custom)
            }
        }

        deserializer.deserialize_any(AngleVisitor)
    }
}
