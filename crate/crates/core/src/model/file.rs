//! JSON model definition files.
//!
//! ```json
//! {"type": "markov", "alphabet": 2, "transitions": [[0.7, 0.3], [0.1, 0.9]]}
//! {"type": "function_markov", "hidden": {"type": "markov", ...}, "map": [0, 1, 1]}
//! {"type": "ladder", "gamma": 0.3, "ramp": {"kind": "identity"}, "truncation": {"j_plus": 40}}
//! {"type": "function_markov", "hidden": {"type": "ladder", ...}, "map": "sign"}
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Alphabet, FiniteMarkovChain, FunctionMarkovModel, LadderChain, Model, Ramp, Symbol};
use crate::model::DEFAULT_TAIL_TOLERANCE;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AlphabetDef {
    Size(usize),
    Labels(Vec<String>),
    Full(Alphabet),
}

impl AlphabetDef {
    fn build(&self) -> Result<Alphabet> {
        match self {
            AlphabetDef::Size(n) => Alphabet::new(*n),
            AlphabetDef::Labels(l) => Alphabet::with_labels(l.clone()),
            AlphabetDef::Full(a) => {
                a.validate()?;
                Ok(a.clone())
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NamedMap {
    /// `j > 0 -> 1`, `j <= 0 -> 0` on ladder states.
    Sign,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MapDef {
    Explicit(Vec<Symbol>),
    Named(NamedMap),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Truncation {
    pub j_plus: u64,
    /// Must equal `h(j_plus)` when given.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub j_minus: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ModelDef {
    Markov {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        alphabet: Option<AlphabetDef>,
        transitions: Vec<Vec<f64>>,
    },
    FunctionMarkov {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        alphabet: Option<AlphabetDef>,
        hidden: Box<ModelDef>,
        map: MapDef,
    },
    Ladder {
        gamma: f64,
        ramp: Ramp,
        truncation: Truncation,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tolerance: Option<f64>,
    },
}

fn to_scalar<T: Scalar>(rows: &[Vec<f64>]) -> Vec<Vec<T>> {
    rows.iter().map(|r| r.iter().map(|&v| T::of(v)).collect()).collect()
}

impl ModelDef {
    pub fn markov<T: Scalar>(chain: &FiniteMarkovChain<T>) -> Self {
        let alphabet = match chain.alphabet().labels() {
            Some(l) => AlphabetDef::Labels(l.to_vec()),
            None => AlphabetDef::Size(chain.size()),
        };
        let transitions = chain.transitions().to_rows().iter().map(|r| r.iter().map(|v| v.as_f64()).collect()).collect();
        ModelDef::Markov { alphabet: Some(alphabet), transitions }
    }

    pub fn build<T: Scalar>(&self) -> Result<Model<T>> {
        match self {
            ModelDef::Markov { alphabet, transitions } => {
                let rows = to_scalar::<T>(transitions);
                let chain = match alphabet {
                    Some(a) => FiniteMarkovChain::with_alphabet(a.build()?, &rows)?,
                    None => FiniteMarkovChain::new(&rows)?,
                };
                Ok(Model::Markov(chain))
            }
            ModelDef::Ladder { gamma, ramp, truncation, tolerance } => {
                let ladder = LadderChain::build(
                    T::of(*gamma),
                    ramp.clone(),
                    truncation.j_plus,
                    T::of(tolerance.unwrap_or(DEFAULT_TAIL_TOLERANCE)),
                )?;
                if let Some(jm) = truncation.j_minus {
                    if jm != ladder.truncation().0 {
                        return Err(Error::InvalidLadder(format!(
                            "j_minus {jm} must equal h(j_plus) = {}",
                            ladder.truncation().0
                        )));
                    }
                }
                Ok(Model::Ladder(ladder))
            }
            ModelDef::FunctionMarkov { alphabet, hidden, map } => {
                let alphabet = alphabet.as_ref().map(AlphabetDef::build).transpose()?;
                let (chain, map) = match (hidden.build::<T>()?, map) {
                    (Model::Markov(c), MapDef::Explicit(m)) => (c, m.clone()),
                    (Model::Ladder(l), MapDef::Explicit(m)) => (l.chain().clone(), m.clone()),
                    (Model::Ladder(l), MapDef::Named(NamedMap::Sign)) => (l.chain().clone(), l.sign_map()),
                    (Model::Markov(_), MapDef::Named(_)) => {
                        return Err(Error::Parse("named maps apply to ladder chains only".into()))
                    }
                    (Model::FunctionMarkov(_), _) => {
                        return Err(Error::Parse("hidden model must be a markov or ladder chain".into()))
                    }
                };
                Ok(Model::FunctionMarkov(FunctionMarkovModel::lump(chain, map, alphabet)?))
            }
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model definitions serialise")
    }
}

pub fn load_model_def(path: impl AsRef<Path>) -> Result<ModelDef> {
    ModelDef::from_json(&std::fs::read_to_string(path)?)
}

pub fn load_model<T: Scalar>(path: impl AsRef<Path>) -> Result<Model<T>> {
    load_model_def(path)?.build()
}
