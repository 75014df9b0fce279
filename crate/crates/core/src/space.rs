//! Hyperparameter spaces and configurations.
//!
//! A space is an ordered list of hyperparameters, each with an ordered,
//! finite, duplicate-free domain of integer values. The Cartesian product
//! of the domains is enumerated in lexicographic order of domain indices
//! with the last hyperparameter varying fastest, and the position of a
//! configuration in that enumeration is its stable index. Domain order is
//! the canonical tie-break order for every analysis built on top.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Column names reserved by the results CSV contract.
const RESERVED_NAMES: [&str; 2] = ["dataset", "accuracy"];

/// One hyperparameter: a name and its ordered value domain.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hyperparam {
    pub name: String,
    pub domain: Vec<i64>,
}

impl Hyperparam {
    pub fn new(name: impl Into<String>, domain: Vec<i64>) -> Self {
        Hyperparam {
            name: name.into(),
            domain,
        }
    }
}

/// A validated hyperparameter space.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SpaceRepr")]
pub struct HyperparamSpace {
    hyperparams: Vec<Hyperparam>,
}

/// Raw shape of the space JSON file, validated on the way in.
#[derive(Deserialize)]
struct SpaceRepr {
    hyperparams: Vec<Hyperparam>,
}

impl TryFrom<SpaceRepr> for HyperparamSpace {
    type Error = Error;

    fn try_from(repr: SpaceRepr) -> Result<Self> {
        HyperparamSpace::new(repr.hyperparams)
    }
}

/// One configuration: a value per hyperparameter, positionally aligned
/// with the space that produced it.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Config {
    pub values: Vec<i64>,
}

impl Config {
    pub fn new(values: Vec<i64>) -> Self {
        Config { values }
    }
}

impl HyperparamSpace {
    /// Builds a space, rejecting duplicate or reserved names, empty
    /// domains and duplicate domain values.
    pub fn new(hyperparams: Vec<Hyperparam>) -> Result<Self> {
        for (i, hp) in hyperparams.iter().enumerate() {
            if hp.name.is_empty() {
                return Err(Error::InvalidSpace(format!(
                    "hyperparameter {i} has an empty name"
                )));
            }
            if RESERVED_NAMES.contains(&hp.name.as_str()) {
                return Err(Error::InvalidSpace(format!(
                    "`{}` is reserved by the results CSV format",
                    hp.name
                )));
            }
            if hyperparams[..i].iter().any(|other| other.name == hp.name) {
                return Err(Error::InvalidSpace(format!(
                    "duplicate hyperparameter name `{}`",
                    hp.name
                )));
            }
            if hp.domain.is_empty() {
                return Err(Error::InvalidSpace(format!(
                    "domain of `{}` is empty",
                    hp.name
                )));
            }
            for (j, v) in hp.domain.iter().enumerate() {
                if hp.domain[..j].contains(v) {
                    return Err(Error::InvalidSpace(format!(
                        "domain of `{}` repeats value {v}",
                        hp.name
                    )));
                }
            }
        }
        let space = HyperparamSpace { hyperparams };
        space.checked_num_configs()?;
        Ok(space)
    }

    pub fn hyperparams(&self) -> &[Hyperparam] {
        &self.hyperparams
    }

    /// Number of hyperparameters.
    pub fn len(&self) -> usize {
        self.hyperparams.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hyperparams.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.hyperparams.iter().position(|hp| hp.name == name)
    }

    fn checked_num_configs(&self) -> Result<usize> {
        self.hyperparams
            .iter()
            .try_fold(1usize, |acc, hp| acc.checked_mul(hp.domain.len()))
            .ok_or_else(|| Error::InvalidSpace("space is too large to enumerate".into()))
    }

    /// Size of the full Cartesian product.
    pub fn num_configs(&self) -> usize {
        self.hyperparams.iter().map(|hp| hp.domain.len()).product()
    }

    /// Enumeration strides: `strides[k]` is how far the flat index moves
    /// when hyperparameter `k` advances one domain step.
    pub fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1usize; self.hyperparams.len()];
        for k in (0..self.hyperparams.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * self.hyperparams[k + 1].domain.len();
        }
        strides
    }

    /// The configuration at a flat enumeration index.
    ///
    /// Panics if `index` is out of range; indices come from this crate's
    /// own enumeration.
    pub fn config_at(&self, index: usize) -> Config {
        assert!(index < self.num_configs(), "config index out of range");
        let mut rem = index;
        let mut values = vec![0i64; self.hyperparams.len()];
        for (k, hp) in self.hyperparams.iter().enumerate().rev() {
            let size = hp.domain.len();
            values[k] = hp.domain[rem % size];
            rem /= size;
        }
        Config::new(values)
    }

    /// Flat enumeration index of a configuration.
    pub fn index_of_config(&self, config: &Config) -> Result<usize> {
        let indices = self.domain_indices(config)?;
        Ok(self.flat_index(&indices))
    }

    /// Per-hyperparameter domain indices of a configuration.
    pub fn domain_indices(&self, config: &Config) -> Result<Vec<usize>> {
        if config.values.len() != self.hyperparams.len() {
            return Err(Error::ConfigLength {
                expected: self.hyperparams.len(),
                got: config.values.len(),
            });
        }
        self.hyperparams
            .iter()
            .zip(&config.values)
            .map(|(hp, &v)| {
                hp.domain
                    .iter()
                    .position(|&d| d == v)
                    .ok_or_else(|| Error::ValueNotInDomain {
                        hyperparam: hp.name.clone(),
                        value: v,
                    })
            })
            .collect()
    }

    /// Flat index from domain indices. Inverse of the decode in
    /// [`config_at`](Self::config_at).
    pub fn flat_index(&self, domain_indices: &[usize]) -> usize {
        let strides = self.strides();
        domain_indices
            .iter()
            .zip(&strides)
            .map(|(&i, &s)| i * s)
            .sum()
    }

    /// All configurations in enumeration order.
    pub fn enumerate(&self) -> impl Iterator<Item = Config> + '_ {
        (0..self.num_configs()).map(|i| self.config_at(i))
    }

    /// Reads a space from its JSON file.
    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| Error::File {
            path: path.display().to_string(),
            msg: e.to_string(),
        })
    }

    /// Serializes the space as pretty JSON (trailing newline included).
    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("space serializes");
        out.push('\n');
        out
    }

    pub fn to_json_file(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.to_json())?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_by_two() -> HyperparamSpace {
        HyperparamSpace::new(vec![
            Hyperparam::new("a", vec![1, 2]),
            Hyperparam::new("b", vec![10, 20]),
        ])
        .unwrap()
    }

    #[test]
    fn enumeration_is_lexicographic_last_fastest() {
        let space = two_by_two();
        let configs: Vec<Vec<i64>> = space.enumerate().map(|c| c.values).collect();
        assert_eq!(
            configs,
            vec![vec![1, 10], vec![1, 20], vec![2, 10], vec![2, 20]]
        );
    }

    #[test]
    fn singleton_space_has_one_config() {
        let space = HyperparamSpace::new(vec![Hyperparam::new("only", vec![3])]).unwrap();
        assert_eq!(space.num_configs(), 1);
        assert_eq!(space.config_at(0).values, vec![3]);
        assert_eq!(space.index_of_config(&Config::new(vec![3])).unwrap(), 0);
    }

    #[test]
    fn index_round_trips() {
        let space = HyperparamSpace::new(vec![
            Hyperparam::new("a", vec![1, 2, 3]),
            Hyperparam::new("b", vec![4, 5]),
            Hyperparam::new("c", vec![6, 7, 8, 9]),
        ])
        .unwrap();
        for i in 0..space.num_configs() {
            let config = space.config_at(i);
            assert_eq!(space.index_of_config(&config).unwrap(), i);
        }
    }

    #[test]
    fn validation_rejects_bad_spaces() {
        assert!(HyperparamSpace::new(vec![Hyperparam::new("a", vec![])]).is_err());
        assert!(HyperparamSpace::new(vec![Hyperparam::new("a", vec![1, 1])]).is_err());
        assert!(HyperparamSpace::new(vec![
            Hyperparam::new("a", vec![1]),
            Hyperparam::new("a", vec![2]),
        ])
        .is_err());
        assert!(HyperparamSpace::new(vec![Hyperparam::new("dataset", vec![1])]).is_err());
        assert!(HyperparamSpace::new(vec![Hyperparam::new("", vec![1])]).is_err());
    }

    #[test]
    fn json_round_trip() {
        let space = two_by_two();
        let text = space.to_json();
        let back: HyperparamSpace = serde_json::from_str(&text).unwrap();
        assert_eq!(space, back);
    }

    #[test]
    fn out_of_domain_value_is_rejected() {
        let space = two_by_two();
        let err = space
            .index_of_config(&Config::new(vec![1, 30]))
            .unwrap_err();
        assert!(matches!(err, Error::ValueNotInDomain { .. }));
    }
}
