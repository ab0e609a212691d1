//! Pass/fail reports for property checks.

use serde::{Deserialize, Serialize};

/// Whether a check enumerated everything or sampled.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum CheckMode {
    Exhaustive,
    Sampled { samples: u64, radius: f64 },
}

/// Outcome of a property check. A counterexample is present exactly when the
/// check fails.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropertyReport {
    pub property: String,
    pub pass: bool,
    pub mode: CheckMode,
    /// Number of instances examined.
    pub checked: u64,
    /// Worst observed value of the checked quantity.
    pub worst_value: f64,
    pub threshold: f64,
    pub worst_case: String,
    pub counterexample: Option<String>,
}

impl PropertyReport {
    pub fn new(
        property: impl Into<String>,
        mode: CheckMode,
        checked: u64,
        worst_value: f64,
        threshold: f64,
        worst_case: String,
        pass: bool,
    ) -> Self {
        let counterexample = if pass { None } else { Some(worst_case.clone()) };
        Self {
            property: property.into(),
            pass,
            mode,
            checked,
            worst_value,
            threshold,
            worst_case,
            counterexample,
        }
    }
}
