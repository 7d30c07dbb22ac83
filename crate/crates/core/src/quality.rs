//! Quality axes and the priority weights attached to them.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A quality dimension such as `safety` or `efficiency`. Stored lowercase.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(from = "String", into = "String")]
pub struct QualityAxis(String);

impl QualityAxis {
    pub fn new(name: impl AsRef<str>) -> Self {
        Self(name.as_ref().trim().to_lowercase())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// The five axes of the default agent roster.
    pub fn defaults() -> Vec<QualityAxis> {
        ["safety", "efficiency", "green", "trustworthiness", "responsibility"]
            .into_iter()
            .map(QualityAxis::new)
            .collect()
    }
}

impl From<String> for QualityAxis {
    fn from(value: String) -> Self {
        Self::new(value)
    }
}

impl From<QualityAxis> for String {
    fn from(value: QualityAxis) -> Self {
        value.0
    }
}

impl From<&str> for QualityAxis {
    fn from(value: &str) -> Self {
        Self::new(value)
    }
}

impl fmt::Display for QualityAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WeightError {
    #[error("weight for `{axis}` must be a finite non-negative number, got {value}")]
    Invalid { axis: QualityAxis, value: f64 },
    #[error("weights must sum to 1 (got {0})")]
    BadSum(f64),
    #[error("malformed weight entry `{0}`, expected axis=value")]
    Malformed(String),
}

/// Priority weight per quality axis, summing to one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BTreeMap<QualityAxis, f64>", into = "BTreeMap<QualityAxis, f64>")]
pub struct Weights(BTreeMap<QualityAxis, f64>);

pub const WEIGHT_SUM_TOLERANCE: f64 = 1e-9;

impl Weights {
    pub fn new(map: BTreeMap<QualityAxis, f64>) -> Result<Self, WeightError> {
        for (axis, &value) in &map {
            if !value.is_finite() || value < 0.0 {
                return Err(WeightError::Invalid { axis: axis.clone(), value });
            }
        }
        let sum: f64 = map.values().sum();
        if (sum - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
            return Err(WeightError::BadSum(sum));
        }
        Ok(Self(map))
    }

    /// 0.2 on each of the five default axes.
    pub fn uniform() -> Self {
        Self(QualityAxis::defaults().into_iter().map(|a| (a, 0.2)).collect())
    }

    /// Safety 0.3, the other four default axes 0.175 each.
    pub fn safety_critical() -> Self {
        Self(
            QualityAxis::defaults()
                .into_iter()
                .map(|a| {
                    let w = if a.as_str() == "safety" { 0.3 } else { 0.175 };
                    (a, w)
                })
                .collect(),
        )
    }

    /// Parses `safety=0.3,efficiency=0.7`.
    pub fn parse(spec: &str) -> Result<Self, WeightError> {
        let mut map = BTreeMap::new();
        for part in spec.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| WeightError::Malformed(part.to_owned()))?;
            let value: f64 = v
                .trim()
                .parse()
                .map_err(|_| WeightError::Malformed(part.to_owned()))?;
            map.insert(QualityAxis::new(k), value);
        }
        Self::new(map)
    }

    pub fn get(&self, axis: &QualityAxis) -> Option<f64> {
        self.0.get(axis).copied()
    }

    pub fn axes(&self) -> impl Iterator<Item = &QualityAxis> {
        self.0.keys()
    }

    /// Multiplies every weight by `factor` without renormalising. Only useful
    /// for checking that selection depends on relative weights alone.
    pub fn scaled_unchecked(&self, factor: f64) -> Self {
        Self(self.0.iter().map(|(k, v)| (k.clone(), v * factor)).collect())
    }
}

impl TryFrom<BTreeMap<QualityAxis, f64>> for Weights {
    type Error = WeightError;

    fn try_from(value: BTreeMap<QualityAxis, f64>) -> Result<Self, Self::Error> {
        Self::new(value)
    }
}

impl From<Weights> for BTreeMap<QualityAxis, f64> {
    fn from(value: Weights) -> Self {
        value.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_sum_to_one() {
        assert!(Weights::new(Weights::uniform().into()).is_ok());
        assert!(Weights::new(Weights::safety_critical().into()).is_ok());
        assert_eq!(Weights::safety_critical().get(&"Safety".into()), Some(0.3));
    }

    #[test]
    fn parse_and_reject() {
        let w = Weights::parse("safety=0.6, efficiency=0.4").unwrap();
        assert_eq!(w.get(&"efficiency".into()), Some(0.4));
        assert!(matches!(Weights::parse("safety=0.6"), Err(WeightError::BadSum(_))));
        assert!(matches!(Weights::parse("safety"), Err(WeightError::Malformed(_))));
        assert!(matches!(Weights::parse("safety=-1,x=2"), Err(WeightError::Invalid { .. })));
    }

    #[test]
    fn axis_is_case_insensitive() {
        assert_eq!(QualityAxis::new(" Safety "), QualityAxis::new("safety"));
    }
}
