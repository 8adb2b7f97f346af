//! Length units and quantities.
//!
//! Lengths are stored with the unit they were entered in so that a corpus
//! re-serializes byte-for-byte; arithmetic always goes through
//! [`Length::meters`].

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// A unit accepted for numeric `length` parameters.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LengthUnit {
    Meter,
    Millimeter,
    Centimeter,
    Inch,
}

impl LengthUnit {
    pub const ALL: [LengthUnit; 4] = [
        LengthUnit::Millimeter,
        LengthUnit::Centimeter,
        LengthUnit::Inch,
        LengthUnit::Meter,
    ];

    pub fn meters_per_unit(self) -> f64 {
        match self {
            LengthUnit::Meter => 1.0,
            LengthUnit::Millimeter => 1e-3,
            LengthUnit::Centimeter => 1e-2,
            LengthUnit::Inch => 0.0254,
        }
    }

    pub fn suffix(self) -> &'static str {
        match self {
            LengthUnit::Meter => "m",
            LengthUnit::Millimeter => "mm",
            LengthUnit::Centimeter => "cm",
            LengthUnit::Inch => "in",
        }
    }

    pub fn from_suffix(s: &str) -> Option<Self> {
        match s {
            "m" => Some(LengthUnit::Meter),
            "mm" => Some(LengthUnit::Millimeter),
            "cm" => Some(LengthUnit::Centimeter),
            "in" => Some(LengthUnit::Inch),
            _ => None,
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ParseLengthError {
    #[error("empty length literal")]
    Empty,
    #[error("invalid number in length literal {0:?}")]
    BadNumber(String),
    #[error("unknown length unit {0:?}")]
    UnknownUnit(String),
}

/// A length magnitude together with the unit it was expressed in.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Length {
    pub value: f64,
    pub unit: LengthUnit,
}

impl Length {
    pub fn new(value: f64, unit: LengthUnit) -> Self {
        Length { value, unit }
    }

    pub fn from_meters(value: f64) -> Self {
        Length {
            value,
            unit: LengthUnit::Meter,
        }
    }

    pub fn mm(value: f64) -> Self {
        Length::new(value, LengthUnit::Millimeter)
    }

    pub fn meters(&self) -> f64 {
        self.value * self.unit.meters_per_unit()
    }

    /// Re-express a metric value in the unit that needs the fewest digits,
    /// preferring mm, then cm, then inches, then meters on ties.
    pub fn shortest(meters: f64) -> Self {
        let mut best: Option<(usize, Length)> = None;
        for unit in LengthUnit::ALL {
            let value = meters / unit.meters_per_unit();
            let text = format_trimmed(value, 6);
            // only accept representations that are exact at 6 decimals
            let parsed: f64 = text.parse().unwrap_or(f64::NAN);
            if (parsed * unit.meters_per_unit() - meters).abs() > 1e-12 * meters.abs().max(1e-9) {
                continue;
            }
            let digits = text.chars().filter(|c| c.is_ascii_digit()).count();
            let len = Length::new(parsed, unit);
            match best {
                Some((d, _)) if d <= digits => {}
                _ => best = Some((digits, len)),
            }
        }
        best.map(|(_, l)| l)
            .unwrap_or_else(|| Length::from_meters(meters))
    }
}

impl fmt::Display for Length {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.value, self.unit.suffix())
    }
}

impl FromStr for Length {
    type Err = ParseLengthError;

    /// Accepts `"5 mm"`, `"5mm"`, `"0.5 in"` or a bare number in meters.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() {
            return Err(ParseLengthError::Empty);
        }
        let split = s
            .find(|c: char| c.is_ascii_alphabetic() && c != 'e' && c != 'E')
            .unwrap_or(s.len());
        let (num, unit) = s.split_at(split);
        let value: f64 = num
            .trim()
            .parse()
            .map_err(|_| ParseLengthError::BadNumber(s.to_string()))?;
        let unit = unit.trim();
        let unit = if unit.is_empty() {
            LengthUnit::Meter
        } else {
            LengthUnit::from_suffix(unit).ok_or_else(|| ParseLengthError::UnknownUnit(unit.into()))?
        };
        Ok(Length::new(value, unit))
    }
}

/// Fixed-point formatting with trailing zeros removed.
pub(crate) fn format_trimmed(value: f64, decimals: usize) -> String {
    let mut s = format!("{value:.decimals$}");
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
    if s == "-0" {
        s = "0".into();
    }
    s
}
