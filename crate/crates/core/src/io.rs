//! JSON state-set files.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::cyclo::CycloRational;
use crate::error::{Error, Result};
use crate::ket::{parse_ket, print_ket};
use crate::state::{prime_factors, LocalVector, ProductState, SpaceSpec, StateSet};

pub const SCHEMA_VERSION: u32 = 1;
pub const FIELD_TAG: &str = "cyclo-rational";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartyEntry {
    pub label: String,
    pub dim: usize,
    pub prime_factors: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateEntry {
    pub label: String,
    /// One ket expression per party.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kets: Option<Vec<String>>,
    /// Explicit coefficients per party, used when `kets` is absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub entries: Option<Vec<Vec<CycloRational>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateSetFile {
    pub schema: u32,
    pub field: String,
    /// Family id the set was constructed from, if any.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
    pub space: Vec<PartyEntry>,
    pub states: Vec<StateEntry>,
}

impl StateSetFile {
    pub fn from_set(set: &StateSet, family: Option<String>) -> Self {
        Self {
            schema: SCHEMA_VERSION,
            field: FIELD_TAG.to_string(),
            family,
            space: set
                .space()
                .parties()
                .iter()
                .map(|p| PartyEntry { label: p.label.clone(), dim: p.dim, prime_factors: p.prime_factors.clone() })
                .collect(),
            states: set
                .states()
                .iter()
                .map(|s| StateEntry {
                    label: s.label.clone(),
                    kets: Some(s.factors.iter().map(print_ket).collect()),
                    entries: None,
                })
                .collect(),
        }
    }

    pub fn to_set(&self) -> Result<StateSet> {
        if self.schema != SCHEMA_VERSION {
            return Err(Error::UnsupportedFile(format!("schema version {}", self.schema)));
        }
        if self.field != FIELD_TAG {
            return Err(Error::UnsupportedFile(format!("field `{}`", self.field)));
        }
        for p in &self.space {
            if p.prime_factors != prime_factors(p.dim) {
                return Err(Error::InvalidSpace(format!("prime factors of party `{}` do not match {}", p.label, p.dim)));
            }
        }
        let space = SpaceSpec::new(self.space.iter().map(|p| (p.label.clone(), p.dim)))?;
        let mut states = Vec::with_capacity(self.states.len());
        for s in &self.states {
            let factors = match (&s.kets, &s.entries) {
                (Some(kets), _) => {
                    if kets.len() != space.n_parties() {
                        return Err(Error::SpaceMismatch);
                    }
                    kets.iter().enumerate().map(|(p, k)| parse_ket(k, space.dim(p))).collect::<Result<Vec<_>>>()?
                }
                (None, Some(entries)) => entries.iter().map(|e| LocalVector::new(e.clone())).collect(),
                (None, None) => {
                    return Err(Error::UnsupportedFile(format!("state `{}` has neither kets nor entries", s.label)))
                }
            };
            states.push(ProductState::new(s.label.clone(), factors));
        }
        StateSet::new(space, states)
    }

    pub fn read(path: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        fs::write(path, serde_json::to_string_pretty(self)? + "\n")?;
        Ok(())
    }
}

pub fn read_state_set(path: &Path) -> Result<(StateSet, Option<String>)> {
    let f = StateSetFile::read(path)?;
    Ok((f.to_set()?, f.family.clone()))
}

pub fn write_state_set(path: &Path, set: &StateSet, family: Option<String>) -> Result<()> {
    StateSetFile::from_set(set, family).write(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{multiparty_type1, type2_set_78};

    #[test]
    fn round_trip_through_json() {
        for set in [type2_set_78().unwrap(), multiparty_type1(&[11, 13]).unwrap()] {
            let f = StateSetFile::from_set(&set, Some("x".into()));
            let text = serde_json::to_string(&f).unwrap();
            let back: StateSetFile = serde_json::from_str(&text).unwrap();
            assert_eq!(back.to_set().unwrap(), set);
        }
    }

    #[test]
    fn explicit_entries_accepted() {
        let text = r#"{"schema":1,"field":"cyclo-rational","space":[{"label":"A","dim":2,"prime_factors":[2]},{"label":"B","dim":2,"prime_factors":[2]}],
            "states":[{"label":"x","entries":[[{"a":"1","b":"0"},{"a":"0","b":"1/2"}],[{"a":"1","b":"0"},{"a":"0","b":"0"}]]}]}"#;
        let f: StateSetFile = serde_json::from_str(text).unwrap();
        let set = f.to_set().unwrap();
        assert_eq!(print_ket(&set.states()[0].factors[0]), "|0>+1/2w|1>");
    }

    #[test]
    fn bad_files_rejected() {
        let set = type2_set_78().unwrap();
        let mut f = StateSetFile::from_set(&set, None);
        f.field = "float".into();
        assert!(f.to_set().is_err());
        let mut f = StateSetFile::from_set(&set, None);
        f.space[0].prime_factors = vec![2];
        assert!(f.to_set().is_err());
        let mut f = StateSetFile::from_set(&set, None);
        f.states[0].kets = Some(vec!["|9>".into(), "|0>".into()]);
        assert!(f.to_set().is_err());
    }
}
