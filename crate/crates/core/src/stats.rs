//! Descriptive statistics over results tables.
//!
//! Percentiles are rank-based: a configuration's percentile on a dataset
//! is the fraction of *other* scored configurations it strictly beats,
//! `|{θ' ≠ θ : acc(θ') < acc(θ)}| / (N − 1)`, so the worst configuration
//! scores 0.0 and the best 1.0, and exact-equal accuracies share a value.
//! Quantiles use linear interpolation between order statistics at
//! position `(N − 1)·q`. Summations run in ascending configuration index
//! so repeated runs are bit-identical.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::results::ResultsTable;

/// Tukey's five-number summary of a sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FiveNumberSummary {
    pub min: f64,
    pub q25: f64,
    pub median: f64,
    pub q75: f64,
    pub max: f64,
}

/// Five-number summary with quartiles linearly interpolated on the
/// sorted sample. Inputs are expected to be finite.
pub fn five_number(values: &[f64]) -> Result<FiveNumberSummary> {
    if values.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut sorted = values.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    Ok(FiveNumberSummary {
        min: sorted[0],
        q25: interpolated(&sorted, 0.25),
        median: interpolated(&sorted, 0.5),
        q75: interpolated(&sorted, 0.75),
        max: sorted[sorted.len() - 1],
    })
}

fn interpolated(sorted: &[f64], q: f64) -> f64 {
    let pos = (sorted.len() - 1) as f64 * q;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    if lo == hi {
        sorted[lo]
    } else {
        sorted[lo] + (sorted[hi] - sorted[lo]) * frac
    }
}

/// Mean accuracy per domain value of one hyperparameter on one dataset.
///
/// Returns `(value, mean)` pairs in domain order; values with no scored
/// rows are omitted. Incomplete tables are fine: the mean runs over
/// whatever rows exist.
pub fn value_mean_accuracy(
    table: &ResultsTable,
    dataset: &str,
    hyperparam: &str,
) -> Result<Vec<(i64, f64)>> {
    let d = table.dataset_index(dataset)?;
    let hp = table
        .space()
        .index_of(hyperparam)
        .ok_or_else(|| Error::UnknownHyperparam(hyperparam.to_string()))?;

    let domain = &table.space().hyperparams()[hp].domain;
    let mut sums = vec![0.0f64; domain.len()];
    let mut counts = vec![0usize; domain.len()];

    let strides = table.space().strides();
    let stride = strides[hp];
    let block = stride * domain.len();
    let scores = table.dataset_scores(d);
    for (config_index, score) in scores.iter().enumerate() {
        if let Some(acc) = score {
            let value_index = (config_index % block) / stride;
            sums[value_index] += acc;
            counts[value_index] += 1;
        }
    }

    Ok(domain
        .iter()
        .zip(sums.iter().zip(&counts))
        .filter(|(_, (_, &count))| count > 0)
        .map(|(&value, (&sum, &count))| (value, sum / count as f64))
        .collect())
}

/// Rank percentile of every scored configuration on one dataset,
/// indexed by flat configuration index (`None` for unscored entries).
pub fn percentile_transform(table: &ResultsTable, dataset: &str) -> Result<Vec<Option<f64>>> {
    let d = table.dataset_index(dataset)?;
    percentile_slice(table.dataset_scores(d), dataset)
}

fn percentile_slice(scores: &[Option<f64>], dataset: &str) -> Result<Vec<Option<f64>>> {
    let mut scored: Vec<(usize, f64)> = scores
        .iter()
        .enumerate()
        .filter_map(|(i, s)| s.map(|acc| (i, acc)))
        .collect();
    let n = scored.len();
    if n < 2 {
        return Err(Error::TooFewConfigs {
            dataset: dataset.to_string(),
            count: n,
        });
    }
    scored.sort_unstable_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));

    let mut out = vec![None; scores.len()];
    let denom = (n - 1) as f64;
    let mut run_start = 0;
    for i in 0..=n {
        if i == n || scored[i].1 != scored[run_start].1 {
            // Everything before `run_start` is strictly lower.
            let percentile = run_start as f64 / denom;
            for &(config_index, _) in &scored[run_start..i] {
                out[config_index] = Some(percentile);
            }
            run_start = i;
        }
    }
    Ok(out)
}

/// Per-dataset rank percentiles of a whole table.
#[derive(Debug, Clone, PartialEq)]
pub struct PercentileTable {
    datasets: Vec<String>,
    /// `slices[dataset][config_index]`.
    slices: Vec<Vec<Option<f64>>>,
    num_configs: usize,
}

impl PercentileTable {
    /// Transforms every dataset of a results table. Each dataset must
    /// have at least two scored configurations.
    pub fn from_table(table: &ResultsTable) -> Result<Self> {
        let mut slices = Vec::with_capacity(table.datasets().len());
        for dataset in table.datasets() {
            slices.push(percentile_transform(table, dataset)?);
        }
        Ok(PercentileTable {
            datasets: table.datasets().to_vec(),
            slices,
            num_configs: table.space().num_configs(),
        })
    }

    /// Builds a table from precomputed per-dataset slices. Every slice
    /// must have the same length and values must lie in [0, 1].
    pub fn from_parts(datasets: Vec<String>, slices: Vec<Vec<Option<f64>>>) -> Result<Self> {
        if datasets.len() != slices.len() {
            return Err(Error::InvalidLandscape(
                "dataset names and percentile slices disagree in length".into(),
            ));
        }
        let num_configs = slices.first().map_or(0, Vec::len);
        for (dataset, slice) in datasets.iter().zip(&slices) {
            if slice.len() != num_configs {
                return Err(Error::InvalidLandscape(format!(
                    "percentile slice for `{dataset}` has length {} (expected {num_configs})",
                    slice.len()
                )));
            }
            for p in slice.iter().flatten() {
                if !p.is_finite() || !(0.0..=1.0).contains(p) {
                    return Err(Error::InvalidLandscape(format!(
                        "percentile {p} for `{dataset}` is outside [0, 1]"
                    )));
                }
            }
        }
        Ok(PercentileTable {
            datasets,
            slices,
            num_configs,
        })
    }

    pub fn datasets(&self) -> &[String] {
        &self.datasets
    }

    pub fn num_configs(&self) -> usize {
        self.num_configs
    }

    pub fn slice(&self, dataset_index: usize) -> &[Option<f64>] {
        &self.slices[dataset_index]
    }

    pub fn percentile(&self, dataset_index: usize, config_index: usize) -> Option<f64> {
        self.slices[dataset_index][config_index]
    }

    /// Errors with the first unscored (dataset, configuration) pair if
    /// any percentile is missing.
    pub fn require_complete(&self) -> Result<()> {
        for (d, slice) in self.slices.iter().enumerate() {
            if let Some(config_index) = slice.iter().position(Option::is_none) {
                return Err(Error::UnscoredConfig {
                    config_index,
                    dataset: self.datasets[d].clone(),
                });
            }
        }
        Ok(())
    }

    /// Copy of the table without one dataset.
    pub fn without_dataset(&self, dataset_index: usize) -> Self {
        let mut datasets = self.datasets.clone();
        let mut slices = self.slices.clone();
        datasets.remove(dataset_index);
        slices.remove(dataset_index);
        PercentileTable {
            datasets,
            slices,
            num_configs: self.num_configs,
        }
    }

    /// Copy with datasets reordered by the given permutation.
    pub fn permuted(&self, order: &[usize]) -> Self {
        PercentileTable {
            datasets: order.iter().map(|&i| self.datasets[i].clone()).collect(),
            slices: order.iter().map(|&i| self.slices[i].clone()).collect(),
            num_configs: self.num_configs,
        }
    }
}

/// How to correlate accuracy vectors across table versions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorrelationMethod {
    Pearson,
    /// Spearman rank correlation (average ranks for ties). A variant,
    /// not a claim about how any published heatmap was computed.
    Spearman,
}

/// Correlation matrix between the accuracy vectors of several tables on
/// one dataset, aligned by configuration index.
///
/// All tables must share an identical space and be complete for the
/// dataset. A table with constant accuracy has no defined correlation;
/// its entries (including the diagonal) are `None` rather than a silent
/// zero.
pub fn cross_version_correlation(
    tables: &[&ResultsTable],
    dataset: &str,
    method: CorrelationMethod,
) -> Result<Vec<Vec<Option<f64>>>> {
    if tables.is_empty() {
        return Err(Error::EmptyInput);
    }
    let space = tables[0].space();
    let n = space.num_configs();
    if n < 2 {
        return Err(Error::TooFewConfigs {
            dataset: dataset.to_string(),
            count: n,
        });
    }

    let mut vectors: Vec<Vec<f64>> = Vec::with_capacity(tables.len());
    for (index, table) in tables.iter().enumerate() {
        if table.space() != space {
            return Err(Error::SpaceMismatch);
        }
        let d = table.dataset_index(dataset)?;
        let scores = table.dataset_scores(d);
        let missing = scores.iter().filter(|s| s.is_none()).count();
        if missing > 0 {
            return Err(Error::IncompleteTable {
                index,
                dataset: dataset.to_string(),
                missing,
            });
        }
        let vector: Vec<f64> = scores.iter().map(|s| s.unwrap()).collect();
        vectors.push(match method {
            CorrelationMethod::Pearson => vector,
            CorrelationMethod::Spearman => average_ranks(&vector),
        });
    }

    let k = vectors.len();
    let mut matrix = vec![vec![None; k]; k];
    let variances: Vec<f64> = vectors.iter().map(|v| centered_sum_sq(v)).collect();
    for i in 0..k {
        if variances[i] > 0.0 {
            matrix[i][i] = Some(1.0);
        }
        for j in (i + 1)..k {
            let entry = pearson(&vectors[i], &vectors[j]);
            matrix[i][j] = entry;
            matrix[j][i] = entry;
        }
    }
    Ok(matrix)
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

fn centered_sum_sq(values: &[f64]) -> f64 {
    let m = mean(values);
    values.iter().map(|v| (v - m) * (v - m)).sum()
}

fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    let mx = mean(x);
    let my = mean(y);
    let mut cov = 0.0;
    let mut vx = 0.0;
    let mut vy = 0.0;
    for (a, b) in x.iter().zip(y) {
        let dx = a - mx;
        let dy = b - my;
        cov += dx * dy;
        vx += dx * dx;
        vy += dy * dy;
    }
    if vx == 0.0 || vy == 0.0 {
        None
    } else {
        Some(cov / (vx.sqrt() * vy.sqrt()))
    }
}

/// Midranks: tied values share the average of the ranks they span.
fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_unstable_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        let midrank = (start + end - 1) as f64 / 2.0;
        for &index in &order[start..end] {
            ranks[index] = midrank;
        }
        start = end;
    }
    ranks
}
