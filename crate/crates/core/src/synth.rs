//! Seeded synthetic results tables with known structure.
//!
//! A landscape spec fixes a space, a benchmark count, per-hyperparameter
//! additive effects, optional pairwise interaction tables and a noise
//! amplitude. The accuracy of configuration `i` on benchmark `d` is
//!
//! ```text
//! clamp01(base[d] + Σ effects[hp][value]
//!                 + Σ interactions[a][b]
//!                 + noise · (2·u(seed, i, d) − 1))
//! ```
//!
//! where `u` is the counter-based sampler from [`crate::rng`], keyed by
//! (seed, configuration index, benchmark index) rather than call order.
//! Identical spec and seed therefore reproduce the table bit-for-bit on
//! any platform, in any generation order. Noise lands before the clamp,
//! so saturated landscapes acquire ties — handy for exercising tie-break
//! paths. Purely additive in-range landscapes make every pairwise
//! influence exactly zero, which is what the oracle tests lean on.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::results::ResultsTable;
use crate::rng::keyed_unit;
use crate::space::HyperparamSpace;

/// A pairwise interaction: `table[i][j]` is added whenever hyperparameter
/// `a` takes its `i`-th domain value and `b` its `j`-th.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Interaction {
    pub a: String,
    pub b: String,
    pub table: Vec<Vec<f64>>,
}

/// Everything needed to generate a synthetic results table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LandscapeSpec {
    pub space: HyperparamSpace,
    /// Number of benchmarks; datasets are named `b0`, `b1`, ...
    pub benchmarks: usize,
    /// Per-benchmark base accuracy; defaults to 0.5 everywhere.
    #[serde(default)]
    pub base: Option<Vec<f64>>,
    /// Additive effect per domain value, keyed by hyperparameter name.
    #[serde(default)]
    pub effects: BTreeMap<String, Vec<f64>>,
    #[serde(default)]
    pub interactions: Vec<Interaction>,
    /// Noise amplitude; the noise term is uniform in ±`noise`.
    #[serde(default)]
    pub noise: f64,
    pub seed: u64,
}

impl LandscapeSpec {
    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path)?;
        let spec: LandscapeSpec = serde_json::from_str(&text).map_err(|e| Error::File {
            path: path.display().to_string(),
            msg: e.to_string(),
        })?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.benchmarks == 0 {
            return Err(Error::InvalidLandscape("benchmark count is zero".into()));
        }
        if let Some(base) = &self.base {
            if base.len() != self.benchmarks {
                return Err(Error::InvalidLandscape(format!(
                    "base has {} entries for {} benchmarks",
                    base.len(),
                    self.benchmarks
                )));
            }
            if base.iter().any(|b| !b.is_finite()) {
                return Err(Error::InvalidLandscape(
                    "base contains a non-finite value".into(),
                ));
            }
        }
        if !self.noise.is_finite() || self.noise < 0.0 {
            return Err(Error::InvalidLandscape(format!(
                "noise amplitude {} is not a non-negative number",
                self.noise
            )));
        }
        for (name, effects) in &self.effects {
            let hp = self
                .space
                .index_of(name)
                .ok_or_else(|| Error::UnknownHyperparam(name.clone()))?;
            let domain_len = self.space.hyperparams()[hp].domain.len();
            if effects.len() != domain_len {
                return Err(Error::InvalidLandscape(format!(
                    "effects for `{name}` have {} entries for a domain of {domain_len}",
                    effects.len()
                )));
            }
            if effects.iter().any(|e| !e.is_finite()) {
                return Err(Error::InvalidLandscape(format!(
                    "effects for `{name}` contain a non-finite value"
                )));
            }
        }
        for interaction in &self.interactions {
            if interaction.a == interaction.b {
                return Err(Error::InvalidLandscape(format!(
                    "interaction pairs `{}` with itself",
                    interaction.a
                )));
            }
            let a = self
                .space
                .index_of(&interaction.a)
                .ok_or_else(|| Error::UnknownHyperparam(interaction.a.clone()))?;
            let b = self
                .space
                .index_of(&interaction.b)
                .ok_or_else(|| Error::UnknownHyperparam(interaction.b.clone()))?;
            let rows = self.space.hyperparams()[a].domain.len();
            let cols = self.space.hyperparams()[b].domain.len();
            if interaction.table.len() != rows
                || interaction.table.iter().any(|row| row.len() != cols)
            {
                return Err(Error::InvalidLandscape(format!(
                    "interaction table for `{}`/`{}` is not {rows}x{cols}",
                    interaction.a, interaction.b
                )));
            }
            if interaction.table.iter().flatten().any(|v| !v.is_finite()) {
                return Err(Error::InvalidLandscape(format!(
                    "interaction table for `{}`/`{}` contains a non-finite value",
                    interaction.a, interaction.b
                )));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("landscape spec serializes");
        out.push('\n');
        out
    }
}

/// Generates the deterministic results table described by the spec.
pub fn generate(spec: &LandscapeSpec) -> Result<ResultsTable> {
    spec.validate()?;
    let space = &spec.space;
    let num_configs = space.num_configs();

    // Resolve names to indices once.
    let effects: Vec<(usize, &[f64])> = spec
        .effects
        .iter()
        .map(|(name, e)| (space.index_of(name).unwrap(), e.as_slice()))
        .collect();
    let interactions: Vec<(usize, usize, &Vec<Vec<f64>>)> = spec
        .interactions
        .iter()
        .map(|i| {
            (
                space.index_of(&i.a).unwrap(),
                space.index_of(&i.b).unwrap(),
                &i.table,
            )
        })
        .collect();
    let default_base = vec![0.5; spec.benchmarks];
    let base = spec.base.as_deref().unwrap_or(&default_base);

    let mut rows = Vec::with_capacity(num_configs * spec.benchmarks);
    for config_index in 0..num_configs {
        let config = space.config_at(config_index);
        let indices = space.domain_indices(&config)?;
        let structural: f64 = effects.iter().map(|(hp, e)| e[indices[*hp]]).sum::<f64>()
            + interactions
                .iter()
                .map(|(a, b, table)| table[indices[*a]][indices[*b]])
                .sum::<f64>();
        for (d, &base_d) in base.iter().enumerate() {
            let noise = if spec.noise > 0.0 {
                spec.noise * (2.0 * keyed_unit(spec.seed, config_index as u64, d as u64) - 1.0)
            } else {
                0.0
            };
            let accuracy = (base_d + structural + noise).clamp(0.0, 1.0);
            rows.push((config.clone(), format!("b{d}"), accuracy));
        }
    }
    ResultsTable::from_rows(space.clone(), rows)
}
