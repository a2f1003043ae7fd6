//! JSON documents for measures and reports.
//!
//! A measure file looks like
//!
//! ```json
//! {"type": "discrete", "alpha": 2.5, "regime": "A",
//!  "positions": [-0.5, 0.5], "weights": [0.5, 0.5]}
//! ```
//!
//! `type` is one of `discrete`, `grid` or `closedform`. A closed form carries
//! empty `positions`/`weights` and its centre in `center`.

use serde::{Deserialize, Serialize};

use crate::closedform::build_solution;
use crate::kernel::{Kernel, Regime};
use crate::measure::{DiscreteMeasure, GridMeasure, Measure};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MeasureKind {
    Discrete,
    Grid,
    Closedform,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureDocument {
    #[serde(rename = "type")]
    pub kind: MeasureKind,
    pub alpha: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub regime: Option<Regime>,
    #[serde(default)]
    pub positions: Vec<f64>,
    #[serde(default)]
    pub weights: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center: Option<f64>,
}

impl MeasureDocument {
    pub fn from_measure(mu: &Measure, k: &Kernel) -> Self {
        let (kind, positions, weights, center) = match mu {
            Measure::Discrete(d) => (MeasureKind::Discrete, d.positions().to_vec(), d.weights().to_vec(), None),
            Measure::Grid(g) => (MeasureKind::Grid, g.grid().to_vec(), g.weights().to_vec(), None),
            Measure::ClosedForm(s) => (MeasureKind::Closedform, Vec::new(), Vec::new(), Some(s.center)),
        };
        MeasureDocument {
            kind,
            alpha: k.alpha(),
            regime: Some(k.regime()),
            positions,
            weights,
            center,
        }
    }

    pub fn kernel(&self) -> Result<Kernel> {
        match self.regime {
            Some(r) => Kernel::new(self.alpha, r),
            None => Kernel::infer(self.alpha),
        }
    }

    pub fn to_measure(&self) -> Result<(Measure, Kernel)> {
        let k = self.kernel()?;
        let mu = match self.kind {
            MeasureKind::Discrete => Measure::Discrete(DiscreteMeasure::new(self.positions.clone(), self.weights.clone())?),
            MeasureKind::Grid => Measure::Grid(GridMeasure::new(self.positions.clone(), self.weights.clone())?),
            MeasureKind::Closedform => Measure::ClosedForm(build_solution(k, self.center.unwrap_or(0.0))?),
        };
        Ok((mu, k))
    }
}

pub fn measure_to_json(mu: &Measure, k: &Kernel) -> String {
    to_json(&MeasureDocument::from_measure(mu, k))
}

pub fn measure_from_json(text: &str) -> Result<(Measure, Kernel)> {
    let doc: MeasureDocument = serde_json::from_str(text).map_err(|e| Error::domain(format!("bad measure document: {e}")))?;
    doc.to_measure()
}

/// Pretty JSON for any report. Non-finite floats become `null`.
pub fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("report types serialize")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn discrete_round_trip() {
        let k = Kernel::infer(2.5).unwrap();
        let mu = Measure::Discrete(DiscreteMeasure::new(vec![-0.5, 0.5], vec![0.5, 0.5]).unwrap());
        let text = measure_to_json(&mu, &k);
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["type"], "discrete");
        assert_eq!(v["regime"], "A");
        let (back, k2) = measure_from_json(&text).unwrap();
        assert_eq!(back, mu);
        assert_eq!(k2, k);
    }

    #[test]
    fn closed_form_and_grid() {
        let k = Kernel::new(0.0, Regime::B).unwrap();
        let mu = Measure::ClosedForm(build_solution(k, 0.25).unwrap());
        let (back, _) = measure_from_json(&measure_to_json(&mu, &k)).unwrap();
        assert_eq!(back, mu);

        let g = Measure::Grid(GridMeasure::new(vec![0.0, 1.0, 2.0], vec![0.25, 0.5, 0.25]).unwrap());
        let (back, _) = measure_from_json(&measure_to_json(&g, &k)).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn rejects_bad_documents() {
        assert!(measure_from_json(r#"{"type":"discrete","alpha":2.5,"positions":[0],"weights":[0.5]}"#).is_err());
        assert!(measure_from_json(r#"{"type":"blob","alpha":2.5}"#).is_err());
        assert!(measure_from_json(r#"{"type":"closedform","alpha":3.5}"#).is_err());
        assert!(measure_from_json(r#"{"type":"closedform","alpha":2.5,"extra":1}"#).is_err());
        let (mu, k) = measure_from_json(r#"{"type":"closedform","alpha":1.0}"#).unwrap();
        assert_eq!(k.regime(), Regime::B);
        assert!(matches!(mu, Measure::ClosedForm(_)));
    }
}
