use serde::{Deserialize, Serialize};

use crate::error::InputError;
use crate::geometry::{squared_distance, Point};
use crate::kernel::LevelMap;
use crate::labels::{first_differing_index, LabelSpace};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Monotone,
    Binary,
}

/// The adversary's choices for one run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub model: Model,
    #[serde(rename = "L")]
    pub space: LabelSpace,
    pub label_a: u64,
    pub label_b: u64,
    pub pos_a: Point,
    pub pos_b: Point,
    #[serde(default)]
    pub start_a: Scalar,
    #[serde(default)]
    pub start_b: Scalar,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<Scalar>,
    /// Measured from the later start. Defaults depend on the model.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time_budget: Option<Scalar>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distortion: Option<LevelMap>,
    #[serde(default)]
    pub strict_paper_loop: bool,
}

impl Scenario {
    pub fn monotone(space: LabelSpace, labels: (u64, u64), pos_a: Point, pos_b: Point) -> Self {
        Scenario {
            model: Model::Monotone,
            space,
            label_a: labels.0,
            label_b: labels.1,
            pos_a,
            pos_b,
            start_a: Scalar::zero(),
            start_b: Scalar::zero(),
            rho: None,
            time_budget: None,
            distortion: None,
            strict_paper_loop: false,
        }
    }

    pub fn binary(
        space: LabelSpace,
        labels: (u64, u64),
        pos_a: Point,
        pos_b: Point,
        rho: Scalar,
    ) -> Self {
        Scenario {
            model: Model::Binary,
            rho: Some(rho),
            ..Scenario::monotone(space, labels, pos_a, pos_b)
        }
    }

    pub fn with_starts(mut self, start_a: Scalar, start_b: Scalar) -> Self {
        self.start_a = start_a;
        self.start_b = start_b;
        self
    }

    pub fn with_distortion(mut self, map: LevelMap) -> Self {
        self.distortion = Some(map);
        self
    }

    pub fn with_budget(mut self, budget: Scalar) -> Self {
        self.time_budget = Some(budget);
        self
    }

    pub fn from_json(text: &str) -> Result<Self, InputError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let scenario: Scenario =
            serde_path_to_error::deserialize(de).map_err(|e| InputError::Field {
                field: e.path().to_string(),
                message: e.inner().to_string(),
            })?;
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    pub fn validate(&self) -> Result<(), InputError> {
        self.space.check(self.label_a)?;
        self.space.check(self.label_b)?;
        if self.label_a == self.label_b {
            return Err(InputError::EqualLabels(self.label_a));
        }
        for start in [&self.start_a, &self.start_b] {
            if start.is_negative() {
                return Err(InputError::NegativeStart(start.to_string()));
            }
        }
        match self.model {
            Model::Binary => match &self.rho {
                None => return Err(InputError::MissingRho),
                Some(rho) if rho <= &Scalar::one() => {
                    return Err(InputError::RhoTooSmall(rho.to_string()))
                }
                Some(_) => {}
            },
            Model::Monotone => {}
        }
        if self.model == Model::Binary && self.distortion.is_some() {
            return Err(InputError::DistortionWithBinary);
        }
        if let Some(budget) = &self.time_budget {
            if !budget.is_positive() {
                return Err(InputError::NonPositiveBudget(budget.to_string()));
            }
        }
        Ok(())
    }

    pub fn later_start(&self) -> Scalar {
        self.start_a.clone().max(self.start_b.clone())
    }

    pub fn simultaneous(&self) -> bool {
        self.start_a == self.start_b
    }

    pub fn initial_distance_sq(&self) -> Scalar {
        squared_distance(&self.pos_a, &self.pos_b)
    }

    /// Initial distance between the agents in the vertical direction.
    pub fn vertical_gap(&self) -> Scalar {
        (&self.pos_a.y - &self.pos_b.y).abs()
    }

    /// Initial distance between the agents in the horizontal direction.
    pub fn horizontal_gap(&self) -> Scalar {
        (&self.pos_a.x - &self.pos_b.x).abs()
    }

    pub fn rho_sq(&self) -> Option<Scalar> {
        self.rho.as_ref().map(Scalar::square)
    }

    /// Binary scenarios starting at distance at least rho are outside the
    /// algorithm's guarantee.
    pub fn out_of_contract(&self) -> bool {
        match self.rho_sq() {
            Some(rho_sq) if self.model == Model::Binary => self.initial_distance_sq() >= rho_sq,
            _ => false,
        }
    }

    pub fn first_differing_bit(&self) -> Option<usize> {
        let a = self.space.transform(self.label_a).ok()?;
        let b = self.space.transform(self.label_b).ok()?;
        first_differing_index(&a, &b).ok()
    }

    /// Explicit budget, or `4(x+y)+64` (monotone) / `512 rho lambda` (binary).
    pub fn effective_budget(&self) -> Scalar {
        if let Some(b) = &self.time_budget {
            return b.clone();
        }
        match self.model {
            Model::Monotone => {
                Scalar::from_int(4) * (self.vertical_gap() + self.horizontal_gap())
                    + Scalar::from_int(64)
            }
            Model::Binary => {
                let rho = self.rho.clone().unwrap_or_else(Scalar::one);
                Scalar::from_int(512) * rho * Scalar::from(self.space.lambda() as u64)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MONOTONE: &str = r#"{
        "model": "monotone", "L": 4, "label_a": 2, "label_b": 3,
        "pos_a": ["0", "0"], "pos_b": ["3", "4"]
    }"#;

    #[test]
    fn parses_minimal_scenario_with_defaults() {
        let s = Scenario::from_json(MONOTONE).unwrap();
        assert_eq!(s.space.size(), 4);
        assert!(s.simultaneous());
        assert_eq!(s.initial_distance_sq(), Scalar::from_int(25));
        assert_eq!(s.vertical_gap(), Scalar::from_int(4));
        assert_eq!(s.horizontal_gap(), Scalar::from_int(3));
        assert_eq!(s.effective_budget(), Scalar::from_int(92));
        assert_eq!(s.first_differing_bit(), Some(2));
    }

    #[test]
    fn json_round_trip() {
        let s = Scenario::from_json(MONOTONE)
            .unwrap()
            .with_starts(Scalar::ratio(1, 3), Scalar::zero());
        assert_eq!(Scenario::from_json(&s.to_json()).unwrap(), s);
    }

    #[test]
    fn bad_rational_names_the_field() {
        let text = MONOTONE.replace(r#"["3", "4"]"#, r#"["3/0", "4"]"#);
        match Scenario::from_json(&text) {
            Err(InputError::Field { field, message }) => {
                assert_eq!(field, "pos_b[0]");
                assert!(message.contains("denominator"), "{message}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn binary_needs_rho_above_one() {
        let base = MONOTONE.replace("\"monotone\"", "\"binary\"");
        assert_eq!(Scenario::from_json(&base), Err(InputError::MissingRho));
        let one = base.replace("\"L\": 4", "\"L\": 4, \"rho\": \"1\"");
        assert_eq!(
            Scenario::from_json(&one),
            Err(InputError::RhoTooSmall("1".into()))
        );
        let ok = base.replace("\"L\": 4", "\"L\": 4, \"rho\": \"8\"");
        let s = Scenario::from_json(&ok).unwrap();
        assert_eq!(s.effective_budget(), Scalar::from_int(512 * 8 * 2));
        assert!(!s.out_of_contract());
    }

    #[test]
    fn rejects_equal_labels_and_small_space() {
        let eq = MONOTONE.replace("\"label_b\": 3", "\"label_b\": 2");
        assert_eq!(Scenario::from_json(&eq), Err(InputError::EqualLabels(2)));
        let small = MONOTONE.replace("\"L\": 4", "\"L\": 1");
        assert!(
            matches!(Scenario::from_json(&small), Err(InputError::Field { field, .. }) if field == "L")
        );
    }
}
