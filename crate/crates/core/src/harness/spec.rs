use serde::{Deserialize, Serialize};

use crate::error::{Error, InputError};
use crate::labels::LabelSpace;
use crate::scalar::Scalar;
use crate::sim::Model;

/// Name and version of the scenario generator. Changing how scenarios are
/// drawn from a seed requires a new version.
pub const GENERATOR: &str = "chacha8/v1";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistanceRange {
    pub min: Scalar,
    pub max: Scalar,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum StartLaw {
    Simultaneous,
    /// Agent `b` appears `offset` after agent `a`.
    Fixed {
        offset: Scalar,
    },
    /// A positive offset up to `max_offset`, given to a random agent.
    Random {
        max_offset: Scalar,
    },
    /// Simultaneous or random with equal probability.
    Mixed {
        max_offset: Scalar,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Contract {
    /// Binary model: initial distance below rho.
    Inside,
    /// Binary model: initial distance at least rho.
    Outside,
}

/// Binary runs with labels `2k` and `2k+1`, which differ only in the last
/// transformed bit, for growing label lengths.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeSpec {
    pub rho: Scalar,
    #[serde(default = "default_probe_lambdas")]
    pub lambdas: Vec<u32>,
    #[serde(default = "default_probe_trials")]
    pub trials: usize,
}

fn default_probe_lambdas() -> Vec<u32> {
    vec![4, 8, 16]
}

fn default_probe_trials() -> usize {
    16
}

fn default_denominator_bits() -> u32 {
    16
}

fn default_contract() -> Contract {
    Contract::Inside
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub seed: u64,
    pub count: usize,
    pub model: Model,
    #[serde(rename = "L")]
    pub label_sizes: Vec<u64>,
    pub distance: DistanceRange,
    #[serde(default)]
    pub rho: Vec<Scalar>,
    pub start: StartLaw,
    /// Coordinates and offsets are multiples of `2^-denominator_bits`.
    #[serde(default = "default_denominator_bits")]
    pub denominator_bits: u32,
    #[serde(default = "default_contract")]
    pub contract: Contract,
    /// Extra simultaneous monotone runs whose labels differ in exactly one
    /// bit `j`, placed `2^-j` apart vertically with the 1-bit agent South.
    #[serde(default)]
    pub special_pairs: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probe: Option<ProbeSpec>,
    #[serde(default)]
    pub strict_paper_loop: bool,
}

impl SweepSpec {
    pub fn from_json(text: &str) -> Result<Self, Error> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let spec: SweepSpec =
            serde_path_to_error::deserialize(de).map_err(|e| InputError::Field {
                field: e.path().to_string(),
                message: e.inner().to_string(),
            })?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serializes")
    }

    pub fn validate(&self) -> Result<(), InputError> {
        let field = |field: &str, message: String| InputError::Field {
            field: field.to_string(),
            message,
        };
        if self.label_sizes.is_empty() {
            return Err(field("L", "grid is empty".into()));
        }
        for &size in &self.label_sizes {
            LabelSpace::new(size)?;
        }
        let DistanceRange { min, max } = &self.distance;
        if min < &Scalar::one() || max <= min {
            return Err(field(
                "distance",
                format!("need 1 <= min < max, got [{min}, {max}]"),
            ));
        }
        if max > &Scalar::pow2(20) {
            return Err(field("distance.max", format!("{max} exceeds 2^20")));
        }
        if !(1..=32).contains(&self.denominator_bits) {
            return Err(field(
                "denominator_bits",
                format!("{} not in 1..=32", self.denominator_bits),
            ));
        }
        match &self.start {
            StartLaw::Simultaneous => {}
            StartLaw::Fixed { offset } if offset.is_negative() => {
                return Err(InputError::NegativeStart(offset.to_string()))
            }
            StartLaw::Fixed { .. } => {}
            StartLaw::Random { max_offset } | StartLaw::Mixed { max_offset } => {
                if !max_offset.is_positive() {
                    return Err(field(
                        "start.max_offset",
                        format!("must be positive, got {max_offset}"),
                    ));
                }
            }
        }
        if self.model == Model::Binary {
            if self.rho.is_empty() {
                return Err(InputError::MissingRho);
            }
            for rho in &self.rho {
                if rho <= &Scalar::one() {
                    return Err(InputError::RhoTooSmall(rho.to_string()));
                }
                if self.contract == Contract::Inside && rho <= min {
                    return Err(field(
                        "rho",
                        format!("{rho} leaves no distance in [{min}, rho)"),
                    ));
                }
            }
        }
        if self.special_pairs > 0 && self.model != Model::Monotone {
            return Err(field(
                "special_pairs",
                "only apply to the monotone model".into(),
            ));
        }
        if let Some(probe) = &self.probe {
            if probe.rho <= *min {
                return Err(field(
                    "probe.rho",
                    format!("{} leaves no distance in [{min}, rho)", probe.rho),
                ));
            }
            if probe.lambdas.iter().any(|&l| l == 0 || l > 62) {
                return Err(field("probe.lambdas", "each must be in 1..=62".into()));
            }
        }
        Ok(())
    }
}
