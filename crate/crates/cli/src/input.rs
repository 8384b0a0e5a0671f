//! JSON schema for summand sequences.
//!
//! A sequence is a JSON array of marginals (a single object is accepted as
//! a one-entry sequence):
//!
//! ```json
//! [{"kind":"atoms","atoms":[[-1,0.5],[1,0.5]],"count":4},
//!  {"kind":"rademacher","scale":2},
//!  {"kind":"exponential","scale":1},
//!  {"kind":"uniform_sym","scale":0.5}]
//! ```
//!
//! Symmetry and nonnegativity are derived from the law and cannot be
//! supplied. Censored continuous laws serialize with an extra `cutoff`.

use latala_core::{Entry, Kind, Marginal, SummandSequence};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MarginalSpec {
    Atoms {
        atoms: Vec<(f64, f64)>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        count: Option<usize>,
    },
    Rademacher {
        scale: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        count: Option<usize>,
    },
    Exponential {
        scale: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        cutoff: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        count: Option<usize>,
    },
    UniformSym {
        scale: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        cutoff: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        count: Option<usize>,
    },
}

#[derive(Deserialize)]
#[serde(untagged)]
enum OneOrMany {
    Many(Vec<MarginalSpec>),
    One(MarginalSpec),
}

impl MarginalSpec {
    pub fn to_entry(&self) -> Result<Entry> {
        let (marginal, count) = match self {
            MarginalSpec::Atoms { atoms, count } => (Marginal::atoms(atoms.clone())?, count),
            MarginalSpec::Rademacher { scale, count } => (Marginal::rademacher(*scale)?, count),
            MarginalSpec::Exponential {
                scale,
                cutoff,
                count,
            } => {
                let m = Marginal::exponential(*scale)?;
                (cutoff.map_or(Ok(m.clone()), |c| m.truncate(c))?, count)
            }
            MarginalSpec::UniformSym {
                scale,
                cutoff,
                count,
            } => {
                let m = Marginal::uniform_symmetric(*scale)?;
                (cutoff.map_or(Ok(m.clone()), |c| m.truncate(c))?, count)
            }
        };
        let count = count.unwrap_or(1);
        if count == 0 {
            return Err(CliError::Input("count must be at least 1".into()));
        }
        Ok(Entry { marginal, count })
    }

    pub fn from_entry(entry: &Entry) -> Self {
        let count = (entry.count != 1).then_some(entry.count);
        match entry.marginal.kind() {
            Kind::DiscreteAtoms(atoms) => MarginalSpec::Atoms {
                atoms: atoms.clone(),
                count,
            },
            Kind::ScaledRademacher { scale } => MarginalSpec::Rademacher {
                scale: *scale,
                count,
            },
            Kind::Exponential { scale, cutoff } => MarginalSpec::Exponential {
                scale: *scale,
                cutoff: *cutoff,
                count,
            },
            Kind::UniformSymmetric { scale, cutoff } => MarginalSpec::UniformSym {
                scale: *scale,
                cutoff: *cutoff,
                count,
            },
        }
    }
}

pub fn parse_sequence(text: &str) -> Result<SummandSequence> {
    let specs = match serde_json::from_str::<OneOrMany>(text) {
        Ok(OneOrMany::Many(v)) => v,
        Ok(OneOrMany::One(s)) => vec![s],
        Err(_) => {
            // Re-parse strictly to surface a useful message.
            let err = serde_json::from_str::<Vec<MarginalSpec>>(text)
                .err()
                .or_else(|| serde_json::from_str::<MarginalSpec>(text).err())
                .map(|e| e.to_string())
                .unwrap_or_else(|| "unrecognized sequence".into());
            return Err(CliError::Input(err));
        }
    };
    if specs.is_empty() {
        return Err(CliError::Input(
            "sequence must contain at least one marginal".into(),
        ));
    }
    let entries = specs
        .iter()
        .map(MarginalSpec::to_entry)
        .collect::<Result<Vec<_>>>()?;
    Ok(SummandSequence::new(entries)?)
}

pub fn sequence_to_json(seq: &SummandSequence) -> String {
    let specs: Vec<MarginalSpec> = seq.entries().iter().map(MarginalSpec::from_entry).collect();
    serde_json::to_string(&specs).expect("marginal specs serialize")
}

/// `--input` accepts either inline JSON or a path to a JSON file.
pub fn load_sequence(arg: &str) -> Result<SummandSequence> {
    let trimmed = arg.trim_start();
    if trimmed.starts_with('[') || trimmed.starts_with('{') {
        parse_sequence(arg)
    } else {
        let text = std::fs::read_to_string(arg)
            .map_err(|e| CliError::Input(format!("cannot read {arg}: {e}")))?;
        parse_sequence(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_every_kind() {
        let seq = parse_sequence(
            r#"[{"kind":"atoms","atoms":[[1,0.5],[-1,0.5]],"count":3},
                {"kind":"rademacher","scale":2},
                {"kind":"exponential","scale":1,"cutoff":2},
                {"kind":"uniform_sym","scale":0.5}]"#,
        )
        .unwrap();
        assert_eq!(seq.len(), 6);
        assert!(seq.entries()[0].marginal.is_symmetric());
    }

    #[test]
    fn single_object_is_a_sequence() {
        let seq = parse_sequence(r#"{"kind":"rademacher","scale":1,"count":16}"#).unwrap();
        assert_eq!(seq.len(), 16);
    }

    #[test]
    fn flags_are_not_user_supplied() {
        let err = parse_sequence(r#"[{"kind":"rademacher","scale":1,"symmetric":true}]"#);
        assert!(matches!(err, Err(CliError::Input(_))));
    }

    #[test]
    fn malformed_inputs() {
        assert!(matches!(parse_sequence("[]"), Err(CliError::Input(_))));
        assert!(matches!(parse_sequence("{"), Err(CliError::Input(_))));
        assert!(matches!(
            parse_sequence(r#"[{"kind":"gamma","scale":1}]"#),
            Err(CliError::Input(_))
        ));
        assert!(matches!(
            parse_sequence(r#"[{"kind":"rademacher","scale":-1}]"#),
            Err(CliError::Core(_))
        ));
        assert!(parse_sequence(r#"[{"kind":"rademacher","scale":1,"count":0}]"#).is_err());
    }
}
