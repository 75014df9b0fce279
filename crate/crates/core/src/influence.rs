//! Pairwise influence between hyperparameters.
//!
//! Tuning a hyperparameter individually means sweeping its domain with
//! every other coordinate held fixed and keeping the best value. The
//! influence of `A` on `B` is the probability, over starting
//! configurations, that individually tuning `A` changes the individually
//! tuned optimum of `B`: for each start `c`, tune `B`, then replace
//! `c[A]` with its tuned value and tune `B` again; count the starts where
//! the two tuned values differ, and divide by the number of starts.
//!
//! Sweeps break ties toward the lowest domain index, so the procedure is
//! deterministic and the probability depends only on the accuracy
//! *ordering* — any strictly increasing transform of the accuracies
//! leaves every influence unchanged. The scan over starting
//! configurations parallelises freely; difference counts merge by integer
//! addition, so results are identical at any worker count.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::results::{BenchmarkSet, ResultsTable};
use crate::space::Config;

/// Outcome of one influence scan: how many starts were tried and how
/// many re-tunes changed the target's value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Influence {
    pub differences: u64,
    pub trials: u64,
}

impl Influence {
    pub fn probability(&self) -> f64 {
        if self.trials == 0 {
            0.0
        } else {
            self.differences as f64 / self.trials as f64
        }
    }
}

/// The value of `hyperparam` that maximises accuracy with every other
/// coordinate of `config` held fixed; ties go to the lowest domain index.
pub fn tune(table: &ResultsTable, dataset: &str, config: &Config, hyperparam: &str) -> Result<i64> {
    let d = table.dataset_index(dataset)?;
    let hp = table
        .space()
        .index_of(hyperparam)
        .ok_or_else(|| Error::UnknownHyperparam(hyperparam.to_string()))?;
    let indices = table.space().domain_indices(config)?;
    let flat = table.space().flat_index(&indices);
    let scan = Scan::unrestricted(table, d);
    let best = scan.tune_at(flat, indices[hp], hp)?;
    Ok(table.space().hyperparams()[hp].domain[best])
}

/// Influence of `source` on `target` over one dataset.
///
/// `fixed` pins hyperparameters to constant values; the scan then
/// enumerates only the free ones (a restricted subspace). Pins must not
/// name `source` or `target`. The table must score every configuration
/// the sweeps touch.
pub fn influence(
    table: &ResultsTable,
    dataset: &str,
    source: &str,
    target: &str,
    fixed: &[(String, i64)],
) -> Result<Influence> {
    if source == target {
        return Err(Error::SameHyperparam(source.to_string()));
    }
    let d = table.dataset_index(dataset)?;
    let src = table
        .space()
        .index_of(source)
        .ok_or_else(|| Error::UnknownHyperparam(source.to_string()))?;
    let dst = table
        .space()
        .index_of(target)
        .ok_or_else(|| Error::UnknownHyperparam(target.to_string()))?;
    let scan = Scan::restricted(table, d, fixed, &[src, dst])?;
    scan.influence(src, dst)
}

/// Influence for every ordered pair of the chosen hyperparameters, per
/// dataset and pooled (unweighted mean of per-dataset probabilities).
#[derive(Debug, Clone, PartialEq)]
pub struct InfluenceMatrix {
    hyperparams: Vec<String>,
    datasets: Vec<String>,
    /// `per_dataset[dataset][source][target]`; the diagonal is `None`.
    per_dataset: Vec<Vec<Vec<Option<Influence>>>>,
}

impl InfluenceMatrix {
    /// Assembles a matrix from per-dataset counts (used for fixtures and
    /// by the scan itself).
    pub fn from_parts(
        hyperparams: Vec<String>,
        datasets: Vec<String>,
        per_dataset: Vec<Vec<Vec<Option<Influence>>>>,
    ) -> Result<Self> {
        let k = hyperparams.len();
        if per_dataset.len() != datasets.len() {
            return Err(Error::InvalidLandscape(
                "per-dataset matrices and dataset names disagree in length".into(),
            ));
        }
        for matrix in &per_dataset {
            if matrix.len() != k || matrix.iter().any(|row| row.len() != k) {
                return Err(Error::InvalidLandscape(
                    "influence matrix is not square over the hyperparameter subset".into(),
                ));
            }
        }
        Ok(InfluenceMatrix {
            hyperparams,
            datasets,
            per_dataset,
        })
    }

    pub fn hyperparams(&self) -> &[String] {
        &self.hyperparams
    }

    pub fn datasets(&self) -> &[String] {
        &self.datasets
    }

    pub fn per_dataset(&self, dataset: usize, source: usize, target: usize) -> Option<Influence> {
        self.per_dataset[dataset][source][target]
    }

    /// Pooled probability: unweighted mean over datasets.
    pub fn pooled(&self, source: usize, target: usize) -> Option<f64> {
        if source == target {
            return None;
        }
        let sum: f64 = self
            .per_dataset
            .iter()
            .map(|m| m[source][target].map_or(0.0, |inf| inf.probability()))
            .sum();
        Some(sum / self.per_dataset.len() as f64)
    }

    /// Total outgoing influence of one hyperparameter (sum of pooled
    /// probabilities over all targets).
    pub fn outgoing_total(&self, source: usize) -> f64 {
        (0..self.hyperparams.len())
            .filter_map(|target| self.pooled(source, target))
            .sum()
    }
}

/// Influence over every ordered pair of `hyperparams` (all hyperparameters
/// when `None`), computed per dataset in `benchmarks` and pooled.
pub fn influence_matrix(
    table: &ResultsTable,
    benchmarks: &BenchmarkSet,
    hyperparams: Option<&[String]>,
    fixed: &[(String, i64)],
) -> Result<InfluenceMatrix> {
    let space = table.space();
    let subset: Vec<usize> = match hyperparams {
        None => (0..space.len()).collect(),
        Some(names) => {
            let mut subset = Vec::with_capacity(names.len());
            for name in names {
                let hp = space
                    .index_of(name)
                    .ok_or_else(|| Error::UnknownHyperparam(name.clone()))?;
                if subset.contains(&hp) {
                    return Err(Error::InvalidFixed(
                        name.clone(),
                        "hyperparameter listed twice".into(),
                    ));
                }
                subset.push(hp);
            }
            // Space order keeps downstream tie-breaks canonical.
            subset.sort_unstable();
            subset
        }
    };

    let mut per_dataset = Vec::with_capacity(benchmarks.len());
    for dataset in benchmarks.ids() {
        let d = table.dataset_index(dataset)?;
        let scan = Scan::restricted(table, d, fixed, &subset)?;
        let k = subset.len();
        let mut matrix = vec![vec![None; k]; k];
        for (i, &src) in subset.iter().enumerate() {
            for (j, &dst) in subset.iter().enumerate() {
                if i != j {
                    matrix[i][j] = Some(scan.influence(src, dst)?);
                }
            }
        }
        per_dataset.push(matrix);
    }

    InfluenceMatrix::from_parts(
        subset
            .iter()
            .map(|&hp| space.hyperparams()[hp].name.clone())
            .collect(),
        benchmarks.ids().to_vec(),
        per_dataset,
    )
}

/// Hyperparameters sorted by descending total outgoing influence, ties
/// broken by space order; the recommended one-at-a-time tuning order.
pub fn tuning_order(matrix: &InfluenceMatrix) -> Vec<String> {
    let mut order: Vec<usize> = (0..matrix.hyperparams().len()).collect();
    order.sort_by(|&a, &b| {
        matrix
            .outgoing_total(b)
            .total_cmp(&matrix.outgoing_total(a))
            .then(a.cmp(&b))
    });
    order
        .into_iter()
        .map(|i| matrix.hyperparams()[i].clone())
        .collect()
}

/// A (possibly restricted) scan over starting configurations of one
/// dataset's landscape.
struct Scan<'a> {
    scores: &'a [Option<f64>],
    dataset: &'a str,
    strides: Vec<usize>,
    domain_sizes: Vec<usize>,
    /// Hyperparameter indices enumerated by the scan, in space order.
    free: Vec<usize>,
    /// Flat-index contribution of the pinned coordinates.
    fixed_offset: usize,
}

impl<'a> Scan<'a> {
    fn unrestricted(table: &'a ResultsTable, dataset_index: usize) -> Self {
        let space = table.space();
        Scan {
            scores: table.dataset_scores(dataset_index),
            dataset: &table.datasets()[dataset_index],
            strides: space.strides(),
            domain_sizes: space
                .hyperparams()
                .iter()
                .map(|hp| hp.domain.len())
                .collect(),
            free: (0..space.len()).collect(),
            fixed_offset: 0,
        }
    }

    /// `must_be_free` lists hyperparameter indices that a pin may not
    /// cover (the pair being scanned, or the whole matrix subset).
    fn restricted(
        table: &'a ResultsTable,
        dataset_index: usize,
        fixed: &[(String, i64)],
        must_be_free: &[usize],
    ) -> Result<Self> {
        let space = table.space();
        let mut pinned: Vec<Option<usize>> = vec![None; space.len()];
        for (name, value) in fixed {
            let hp = space
                .index_of(name)
                .ok_or_else(|| Error::UnknownHyperparam(name.clone()))?;
            let value_index = space.hyperparams()[hp]
                .domain
                .iter()
                .position(|v| v == value)
                .ok_or_else(|| {
                    Error::InvalidFixed(name.clone(), format!("{value} is not in its domain"))
                })?;
            if pinned[hp].is_some() {
                return Err(Error::InvalidFixed(name.clone(), "pinned twice".into()));
            }
            if must_be_free.contains(&hp) {
                return Err(Error::InvalidFixed(
                    name.clone(),
                    "it is being tuned or scanned".into(),
                ));
            }
            pinned[hp] = Some(value_index);
        }

        let strides = space.strides();
        let fixed_offset = pinned
            .iter()
            .enumerate()
            .filter_map(|(hp, p)| p.map(|v| v * strides[hp]))
            .sum();
        Ok(Scan {
            scores: table.dataset_scores(dataset_index),
            dataset: &table.datasets()[dataset_index],
            strides,
            domain_sizes: space
                .hyperparams()
                .iter()
                .map(|hp| hp.domain.len())
                .collect(),
            free: (0..space.len())
                .filter(|hp| pinned[*hp].is_none())
                .collect(),
            fixed_offset,
        })
    }

    fn num_starts(&self) -> usize {
        self.free.iter().map(|&hp| self.domain_sizes[hp]).product()
    }

    /// Decodes a scan rank into (flat index, per-free-coordinate domain
    /// indices), mixed radix with the last free hyperparameter fastest.
    fn decode(&self, mut rank: usize) -> (usize, Vec<usize>) {
        let mut coords = vec![0usize; self.free.len()];
        let mut flat = self.fixed_offset;
        for (slot, &hp) in self.free.iter().enumerate().rev() {
            let size = self.domain_sizes[hp];
            let v = rank % size;
            rank /= size;
            coords[slot] = v;
            flat += v * self.strides[hp];
        }
        (flat, coords)
    }

    fn score_at(&self, flat: usize) -> Result<f64> {
        self.scores[flat].ok_or_else(|| Error::MissingRows {
            config_index: flat,
            dataset: self.dataset.to_string(),
        })
    }

    /// Sweep hyperparameter `hp` out of the configuration at `flat`
    /// (whose current domain index for `hp` is `current`); returns the
    /// winning domain index.
    fn tune_at(&self, flat: usize, current: usize, hp: usize) -> Result<usize> {
        let stride = self.strides[hp];
        let base = flat - current * stride;
        let mut best_index = 0;
        let mut best = self.score_at(base)?;
        for v in 1..self.domain_sizes[hp] {
            let candidate = self.score_at(base + v * stride)?;
            if candidate > best {
                best = candidate;
                best_index = v;
            }
        }
        Ok(best_index)
    }

    fn influence(&self, src: usize, dst: usize) -> Result<Influence> {
        let trials = self.num_starts();
        let src_slot = self
            .free
            .iter()
            .position(|&hp| hp == src)
            .expect("src is free");
        let dst_slot = self
            .free
            .iter()
            .position(|&hp| hp == dst)
            .expect("dst is free");

        let differences = (0..trials)
            .into_par_iter()
            .map(|rank| -> Result<u64> {
                let (flat, coords) = self.decode(rank);
                let target_tuned = self.tune_at(flat, coords[dst_slot], dst)?;
                let source_tuned = self.tune_at(flat, coords[src_slot], src)?;
                let delta = (source_tuned as isize - coords[src_slot] as isize)
                    * self.strides[src] as isize;
                let moved = (flat as isize + delta) as usize;
                let target_retuned = self.tune_at(moved, coords[dst_slot], dst)?;
                Ok(u64::from(target_tuned != target_retuned))
            })
            .try_reduce(|| 0, |a, b| Ok(a + b))?;

        Ok(Influence {
            differences,
            trials: trials as u64,
        })
    }
}
