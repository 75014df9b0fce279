//! Results tables: accuracies from a completed grid search.
//!
//! The on-disk format is long CSV, one row per (configuration, dataset):
//! a header with one named column per hyperparameter in space order, then
//! `dataset`, then `accuracy` as a decimal fraction in [0, 1]. The
//! hyperparameter space itself travels in a sibling JSON file. Tables are
//! immutable after construction and safe to share across threads;
//! incomplete grids load fine, and each analysis declares for itself
//! whether it needs completeness.

use std::collections::HashMap;
use std::path::Path;

use crate::error::{Error, Result};
use crate::space::{Config, HyperparamSpace};

/// A loaded, validated grid-search results table.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultsTable {
    space: HyperparamSpace,
    datasets: Vec<String>,
    /// `scores[dataset][config_index]`, dense over the enumeration.
    scores: Vec<Vec<Option<f64>>>,
}

/// An ordered set of unique dataset ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BenchmarkSet {
    ids: Vec<String>,
}

impl BenchmarkSet {
    pub fn new(ids: Vec<String>) -> Result<Self> {
        if ids.is_empty() {
            return Err(Error::TooFewBenchmarks(0));
        }
        for (i, id) in ids.iter().enumerate() {
            if id.is_empty() {
                return Err(Error::UnknownDataset(String::new()));
            }
            if ids[..i].contains(id) {
                return Err(Error::InvalidLandscape(format!(
                    "duplicate dataset id `{id}`"
                )));
            }
        }
        Ok(BenchmarkSet { ids })
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }
}

/// Per-dataset count of configurations that lack an accuracy entry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompletenessReport {
    pub total_configs: usize,
    pub missing: Vec<(String, usize)>,
}

impl CompletenessReport {
    /// True when every dataset scores every configuration.
    pub fn is_complete(&self) -> bool {
        self.missing.iter().all(|(_, n)| *n == 0)
    }
}

impl ResultsTable {
    /// Builds a table from in-memory rows. Dataset order is first
    /// appearance; the same validation as the CSV loader applies.
    pub fn from_rows<I>(space: HyperparamSpace, rows: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Config, String, f64)>,
    {
        let mut table = ResultsTable {
            space,
            datasets: Vec::new(),
            scores: Vec::new(),
        };
        let mut dataset_index: HashMap<String, usize> = HashMap::new();
        for (config, dataset, accuracy) in rows {
            let config_index = table.space.index_of_config(&config)?;
            if dataset.is_empty() {
                return Err(Error::UnknownDataset(String::new()));
            }
            if !accuracy.is_finite() || !(0.0..=1.0).contains(&accuracy) {
                return Err(Error::Range {
                    path: "<memory>".into(),
                    line: 0,
                    value: accuracy,
                });
            }
            let d = *dataset_index.entry(dataset.clone()).or_insert_with(|| {
                table.datasets.push(dataset.clone());
                table.scores.push(vec![None; table.space.num_configs()]);
                table.datasets.len() - 1
            });
            if table.scores[d][config_index].is_some() {
                return Err(Error::Duplicate {
                    path: "<memory>".into(),
                    line: 0,
                    dataset,
                });
            }
            table.scores[d][config_index] = Some(accuracy);
        }
        Ok(table)
    }

    /// An entirely unscored table with its datasets declared up front,
    /// e.g. to size a planned search.
    pub fn empty(space: HyperparamSpace, benchmarks: &BenchmarkSet) -> Self {
        let num_configs = space.num_configs();
        ResultsTable {
            space,
            datasets: benchmarks.ids().to_vec(),
            scores: vec![vec![None; num_configs]; benchmarks.len()],
        }
    }

    /// Loads and validates a long-format results CSV against a space.
    pub fn load(path: impl AsRef<Path>, space: &HyperparamSpace) -> Result<Self> {
        let path = path.as_ref();
        let path_str = path.display().to_string();
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .from_path(path)
            .map_err(|e| csv_error(&path_str, e))?;

        let headers = reader
            .headers()
            .map_err(|e| csv_error(&path_str, e))?
            .clone();
        let columns = resolve_columns(&path_str, &headers, space)?;

        let mut table = ResultsTable {
            space: space.clone(),
            datasets: Vec::new(),
            scores: Vec::new(),
        };
        let mut dataset_index: HashMap<String, usize> = HashMap::new();
        let n_hps = space.len();

        let mut record = csv::StringRecord::new();
        loop {
            match reader.read_record(&mut record) {
                Ok(false) => break,
                Ok(true) => {}
                Err(e) => return Err(csv_error(&path_str, e)),
            }
            let line = record.position().map_or(0, |p| p.line());

            let mut values = Vec::with_capacity(n_hps);
            for (k, &col) in columns.hyperparams.iter().enumerate() {
                let field = &record[col];
                let value: i64 = field.trim().parse().map_err(|_| Error::Parse {
                    path: path_str.clone(),
                    line,
                    msg: format!(
                        "cannot parse `{field}` as an integer for `{}`",
                        space.hyperparams()[k].name
                    ),
                })?;
                values.push(value);
            }
            let config = Config::new(values);
            let config_index = match space.index_of_config(&config) {
                Ok(i) => i,
                Err(Error::ValueNotInDomain { hyperparam, value }) => {
                    return Err(Error::Domain {
                        path: path_str,
                        line,
                        hyperparam,
                        value,
                    })
                }
                Err(e) => return Err(e),
            };

            let dataset = record[columns.dataset].trim().to_string();
            if dataset.is_empty() {
                return Err(Error::Parse {
                    path: path_str,
                    line,
                    msg: "empty dataset id".into(),
                });
            }

            let acc_field = record[columns.accuracy].trim().to_string();
            let accuracy: f64 = acc_field.parse().map_err(|_| Error::Parse {
                path: path_str.clone(),
                line,
                msg: format!("cannot parse `{acc_field}` as an accuracy"),
            })?;
            if !accuracy.is_finite() || !(0.0..=1.0).contains(&accuracy) {
                return Err(Error::Range {
                    path: path_str,
                    line,
                    value: accuracy,
                });
            }

            let d = *dataset_index.entry(dataset.clone()).or_insert_with(|| {
                table.datasets.push(dataset.clone());
                table.scores.push(vec![None; space.num_configs()]);
                table.datasets.len() - 1
            });
            if table.scores[d][config_index].is_some() {
                return Err(Error::Duplicate {
                    path: path_str,
                    line,
                    dataset,
                });
            }
            table.scores[d][config_index] = Some(accuracy);
        }
        Ok(table)
    }

    /// Writes the table back out in the long CSV format, configurations
    /// in enumeration order with datasets cycling innermost.
    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let path_str = path.display().to_string();
        let mut writer = csv::Writer::from_path(path).map_err(|e| csv_error(&path_str, e))?;

        let mut header: Vec<&str> = self
            .space
            .hyperparams()
            .iter()
            .map(|hp| hp.name.as_str())
            .collect();
        header.push("dataset");
        header.push("accuracy");
        writer
            .write_record(&header)
            .map_err(|e| csv_error(&path_str, e))?;

        for config_index in 0..self.space.num_configs() {
            let config = self.space.config_at(config_index);
            for (d, dataset) in self.datasets.iter().enumerate() {
                if let Some(acc) = self.scores[d][config_index] {
                    let mut row: Vec<String> =
                        config.values.iter().map(|v| v.to_string()).collect();
                    row.push(dataset.clone());
                    row.push(format!("{acc}"));
                    writer
                        .write_record(&row)
                        .map_err(|e| csv_error(&path_str, e))?;
                }
            }
        }
        writer.flush()?;
        Ok(())
    }

    pub fn space(&self) -> &HyperparamSpace {
        &self.space
    }

    pub fn datasets(&self) -> &[String] {
        &self.datasets
    }

    pub fn dataset_index(&self, dataset: &str) -> Result<usize> {
        self.datasets
            .iter()
            .position(|d| d == dataset)
            .ok_or_else(|| Error::UnknownDataset(dataset.to_string()))
    }

    /// Accuracy by dataset index and flat configuration index.
    pub fn score(&self, dataset_index: usize, config_index: usize) -> Option<f64> {
        self.scores[dataset_index][config_index]
    }

    /// Dense per-configuration scores for one dataset.
    pub fn dataset_scores(&self, dataset_index: usize) -> &[Option<f64>] {
        &self.scores[dataset_index]
    }

    /// Accuracy for a configuration given by value.
    pub fn accuracy(&self, config: &Config, dataset: &str) -> Result<Option<f64>> {
        let d = self.dataset_index(dataset)?;
        let i = self.space.index_of_config(config)?;
        Ok(self.scores[d][i])
    }

    pub fn scored_count(&self, dataset_index: usize) -> usize {
        self.scores[dataset_index]
            .iter()
            .filter(|s| s.is_some())
            .count()
    }

    /// How many enumerated configurations lack an entry, per dataset.
    pub fn validate_grid(&self) -> CompletenessReport {
        let total = self.space.num_configs();
        let missing = self
            .datasets
            .iter()
            .enumerate()
            .map(|(d, name)| (name.clone(), total - self.scored_count(d)))
            .collect();
        CompletenessReport {
            total_configs: total,
            missing,
        }
    }

    pub fn is_complete(&self) -> bool {
        self.validate_grid().is_complete()
    }

    /// Copy of the table with every accuracy passed through `f`.
    ///
    /// The closure must map [0, 1] into [0, 1]; useful for studying
    /// rank-based invariances.
    pub fn map_accuracies(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        let mut scores = Vec::with_capacity(self.scores.len());
        for per_dataset in &self.scores {
            let mut mapped = Vec::with_capacity(per_dataset.len());
            for s in per_dataset {
                match s {
                    Some(v) => {
                        let out = f(*v);
                        if !out.is_finite() || !(0.0..=1.0).contains(&out) {
                            return Err(Error::Range {
                                path: "<memory>".into(),
                                line: 0,
                                value: out,
                            });
                        }
                        mapped.push(Some(out));
                    }
                    None => mapped.push(None),
                }
            }
            scores.push(mapped);
        }
        Ok(ResultsTable {
            space: self.space.clone(),
            datasets: self.datasets.clone(),
            scores,
        })
    }
}

struct Columns {
    hyperparams: Vec<usize>,
    dataset: usize,
    accuracy: usize,
}

fn resolve_columns(
    path: &str,
    headers: &csv::StringRecord,
    space: &HyperparamSpace,
) -> Result<Columns> {
    let find = |name: &str| -> Result<usize> {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Parse {
                path: path.to_string(),
                line: 1,
                msg: format!("missing column `{name}`"),
            })
    };
    let hyperparams = space
        .hyperparams()
        .iter()
        .map(|hp| find(&hp.name))
        .collect::<Result<Vec<_>>>()?;
    let dataset = find("dataset")?;
    let accuracy = find("accuracy")?;

    let expected = space.len() + 2;
    if headers.len() != expected {
        return Err(Error::Parse {
            path: path.to_string(),
            line: 1,
            msg: format!(
                "expected {expected} columns (hyperparameters + dataset + accuracy), found {}",
                headers.len()
            ),
        });
    }
    Ok(Columns {
        hyperparams,
        dataset,
        accuracy,
    })
}

fn csv_error(path: &str, err: csv::Error) -> Error {
    let line = match err.position() {
        Some(pos) => pos.line(),
        None => 0,
    };
    Error::Parse {
        path: path.to_string(),
        line,
        msg: err.to_string(),
    }
}
