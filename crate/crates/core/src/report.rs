use serde::{Deserialize, Serialize};

/// Outcome of checking one quantitative bound.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub quantity: String,
    pub bound: f64,
    pub measured: f64,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<(String, f64)>,
}

impl BoundReport {
    /// `measured <= bound`.
    pub fn at_most(quantity: impl Into<String>, measured: f64, bound: f64) -> Self {
        BoundReport {
            quantity: quantity.into(),
            bound,
            measured,
            pass: measured <= bound,
            notes: Vec::new(),
        }
    }

    /// `measured > bound`.
    pub fn exceeds(quantity: impl Into<String>, measured: f64, bound: f64) -> Self {
        BoundReport {
            quantity: quantity.into(),
            bound,
            measured,
            pass: measured > bound,
            notes: Vec::new(),
        }
    }

    pub fn with_note(mut self, name: impl Into<String>, value: f64) -> Self {
        self.notes.push((name.into(), value));
        self
    }
}
