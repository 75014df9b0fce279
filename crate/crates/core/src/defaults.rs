//! Greedy search for multiple default configurations.
//!
//! Given per-dataset percentile tables, the expected best performance of
//! a prefix of configurations is the mean over datasets of the best
//! percentile any prefix member reaches on that dataset; the empty prefix
//! scores 0. The search repeatedly scans *every* configuration and
//! appends the one that raises the expected best the most (ties toward
//! the lowest configuration index), stopping as soon as no configuration
//! improves it or the cap is reached — appending can never lower the
//! expectation, so the trajectory is strictly increasing up to the stop.
//!
//! Leave-one-out evaluation reruns the search with one dataset held out
//! and reports the best percentile the found sequence reaches on it, as
//! an estimate of how the defaults transfer to unseen data.

use rayon::prelude::*;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::stats::PercentileTable;

/// An ordered list of default configurations with its expected-best
/// trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct DefaultsSequence {
    /// Flat configuration indices, in pick order.
    pub config_indices: Vec<usize>,
    /// Expected best after each prefix; strictly increasing.
    pub trajectory: Vec<f64>,
    /// `best_matrix[step][dataset]`: running best percentile per dataset
    /// after the first `step + 1` picks.
    pub best_matrix: Vec<Vec<f64>>,
}

impl DefaultsSequence {
    pub fn len(&self) -> usize {
        self.config_indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.config_indices.is_empty()
    }

    /// Final expected best (0 for an empty sequence).
    pub fn final_expected_best(&self) -> f64 {
        self.trajectory.last().copied().unwrap_or(0.0)
    }
}

/// One fold of leave-one-out evaluation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LooFold {
    pub held_out: String,
    /// Best percentile the fold's sequence reaches on the held-out
    /// dataset.
    pub holdout_best: f64,
    pub sequence: Vec<usize>,
}

/// All leave-one-out folds plus their mean holdout best.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LooReport {
    pub folds: Vec<LooFold>,
    pub mean: f64,
}

/// Expected best percentile of a prefix of configurations: mean over
/// datasets of the per-dataset maximum. The empty prefix scores 0.
pub fn expected_best(percentiles: &PercentileTable, prefix: &[usize]) -> Result<f64> {
    if prefix.is_empty() {
        return Ok(0.0);
    }
    let datasets = percentiles.datasets().len();
    let mut sum = 0.0;
    for d in 0..datasets {
        let mut best = 0.0f64;
        for &config_index in prefix {
            let p =
                percentiles
                    .percentile(d, config_index)
                    .ok_or_else(|| Error::UnscoredConfig {
                        config_index,
                        dataset: percentiles.datasets()[d].clone(),
                    })?;
            best = best.max(p);
        }
        sum += best;
    }
    Ok(sum / datasets as f64)
}

/// Greedy forward selection with an exact full-table scan per step.
///
/// Stops after at most `max_m` picks, or earlier as soon as the best
/// attainable improvement is zero. With a degenerate table whose every
/// percentile is 0 the result is an empty sequence.
pub fn greedy_defaults(percentiles: &PercentileTable, max_m: usize) -> Result<DefaultsSequence> {
    percentiles.require_complete()?;
    let datasets = percentiles.datasets().len();
    let num_configs = percentiles.num_configs();

    let mut sequence = DefaultsSequence {
        config_indices: Vec::new(),
        trajectory: Vec::new(),
        best_matrix: Vec::new(),
    };
    if datasets == 0 || num_configs == 0 {
        return Ok(sequence);
    }

    let mut current_best = vec![0.0f64; datasets];
    let mut expected = 0.0f64;

    while sequence.len() < max_m {
        // Candidate score = sum over datasets of max(running best, its
        // percentile); the reduction picks the highest sum and breaks
        // ties toward the lowest index, so the result is independent of
        // how the scan is partitioned.
        let (best_sum, best_config) = (0..num_configs)
            .into_par_iter()
            .map(|config_index| {
                let mut sum = 0.0;
                for (d, best) in current_best.iter().enumerate() {
                    let p = percentiles.percentile(d, config_index).unwrap();
                    sum += best.max(p);
                }
                (sum, config_index)
            })
            .reduce(
                || (f64::NEG_INFINITY, usize::MAX),
                |a, b| {
                    if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) {
                        b
                    } else {
                        a
                    }
                },
            );

        let best_expected = best_sum / datasets as f64;
        if best_expected <= expected {
            break;
        }
        expected = best_expected;
        for (d, best) in current_best.iter_mut().enumerate() {
            let p = percentiles.percentile(d, best_config).unwrap();
            *best = best.max(p);
        }
        sequence.config_indices.push(best_config);
        sequence.trajectory.push(expected);
        sequence.best_matrix.push(current_best.clone());
    }
    Ok(sequence)
}

/// Expected best after the first `k` picks of a sequence.
pub fn performance_curve(sequence: &DefaultsSequence, k: usize) -> Result<f64> {
    if k == 0 || k > sequence.len() {
        return Err(Error::OutOfRange {
            k,
            m: sequence.len(),
        });
    }
    Ok(sequence.trajectory[k - 1])
}

/// Leave-one-out evaluation of the greedy search.
///
/// For each dataset, reruns the search on the remaining ones and scores
/// the found sequence by the best percentile it reaches on the held-out
/// dataset (0 for an empty sequence). Requires a complete table over at
/// least two datasets.
pub fn loo_evaluate(percentiles: &PercentileTable, max_m: usize) -> Result<LooReport> {
    let datasets = percentiles.datasets().len();
    if datasets < 2 {
        return Err(Error::TooFewBenchmarks(datasets));
    }
    percentiles.require_complete()?;

    let mut folds = Vec::with_capacity(datasets);
    for d in 0..datasets {
        let training = percentiles.without_dataset(d);
        let sequence = greedy_defaults(&training, max_m)?;
        let holdout_best = sequence
            .config_indices
            .iter()
            .map(|&c| percentiles.percentile(d, c).unwrap())
            .fold(0.0f64, f64::max);
        folds.push(LooFold {
            held_out: percentiles.datasets()[d].clone(),
            holdout_best,
            sequence: sequence.config_indices,
        });
    }
    let mean = folds.iter().map(|f| f.holdout_best).sum::<f64>() / datasets as f64;
    Ok(LooReport { folds, mean })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn percentile_table(datasets: &[(&str, &[f64])]) -> PercentileTable {
        PercentileTable::from_parts(
            datasets.iter().map(|(name, _)| name.to_string()).collect(),
            datasets
                .iter()
                .map(|(_, slice)| slice.iter().map(|&p| Some(p)).collect())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn empty_prefix_scores_zero() {
        let table = percentile_table(&[("d", &[0.0, 1.0])]);
        assert_eq!(expected_best(&table, &[]).unwrap(), 0.0);
    }

    #[test]
    fn single_benchmark_argmax_scores_one() {
        let table = percentile_table(&[("d", &[0.0, 0.5, 1.0])]);
        assert_eq!(expected_best(&table, &[2]).unwrap(), 1.0);
    }

    #[test]
    fn two_benchmarks_average_their_maxima() {
        let table = percentile_table(&[("cwru", &[0.96]), ("seu", &[0.57])]);
        let e = expected_best(&table, &[0]).unwrap();
        assert!((e - 0.765).abs() < 1e-12);
    }

    #[test]
    fn unscored_config_is_reported() {
        let table = PercentileTable::from_parts(vec!["d".to_string()], vec![vec![Some(0.5), None]])
            .unwrap();
        assert!(matches!(
            expected_best(&table, &[1]),
            Err(Error::UnscoredConfig {
                config_index: 1,
                ..
            })
        ));
    }

    #[test]
    fn single_benchmark_terminates_after_one_pick() {
        let table = percentile_table(&[("d", &[0.25, 1.0, 0.5, 0.75])]);
        let seq = greedy_defaults(&table, 25).unwrap();
        assert_eq!(seq.config_indices, vec![1]);
        assert_eq!(seq.trajectory, vec![1.0]);
    }

    #[test]
    fn anti_correlated_benchmarks_need_two_picks() {
        // Each benchmark's best configuration is the other's worst.
        let table = percentile_table(&[("d0", &[1.0, 0.5, 0.0]), ("d1", &[0.0, 0.5, 1.0])]);
        let seq = greedy_defaults(&table, 25).unwrap();
        assert_eq!(seq.len(), 2);
        assert_eq!(seq.final_expected_best(), 1.0);
        // First pick ties at 0.5 expected for indices 0, 1, 2; the tie
        // breaks to index 0, then index 2 completes the cover.
        assert_eq!(seq.config_indices, vec![0, 2]);
        assert_eq!(seq.trajectory, vec![0.5, 1.0]);
    }

    #[test]
    fn duplicate_benchmarks_terminate_at_one() {
        let table = percentile_table(&[("d0", &[0.0, 0.5, 1.0]), ("d1", &[0.0, 0.5, 1.0])]);
        let seq = greedy_defaults(&table, 25).unwrap();
        assert_eq!(seq.config_indices, vec![2]);
    }

    #[test]
    fn all_zero_percentiles_give_an_empty_sequence() {
        let table = percentile_table(&[("d", &[0.0, 0.0, 0.0])]);
        let seq = greedy_defaults(&table, 25).unwrap();
        assert!(seq.is_empty());
        assert_eq!(seq.final_expected_best(), 0.0);
    }

    #[test]
    fn best_matrix_tracks_running_maxima() {
        let table = percentile_table(&[("d0", &[1.0, 0.0]), ("d1", &[0.25, 1.0])]);
        let seq = greedy_defaults(&table, 25).unwrap();
        assert_eq!(seq.config_indices, vec![0, 1]);
        assert_eq!(seq.best_matrix, vec![vec![1.0, 0.25], vec![1.0, 1.0]]);
    }

    #[test]
    fn curve_returns_trajectory_prefixes() {
        let table = percentile_table(&[("d0", &[1.0, 0.5, 0.0]), ("d1", &[0.0, 0.5, 1.0])]);
        let seq = greedy_defaults(&table, 25).unwrap();
        assert_eq!(performance_curve(&seq, 1).unwrap(), seq.trajectory[0]);
        assert_eq!(
            performance_curve(&seq, seq.len()).unwrap(),
            seq.final_expected_best()
        );
        assert!(matches!(
            performance_curve(&seq, 0),
            Err(Error::OutOfRange { .. })
        ));
        assert!(matches!(
            performance_curve(&seq, seq.len() + 1),
            Err(Error::OutOfRange { .. })
        ));
    }

    #[test]
    fn curve_is_monotone() {
        let slices: Vec<Vec<f64>> = (0..3)
            .map(|d| (0..8).map(|c| crate::rng::keyed_unit(42, c, d)).collect())
            .collect();
        let table = percentile_table(&[("d0", &slices[0]), ("d1", &slices[1]), ("d2", &slices[2])]);
        let seq = greedy_defaults(&table, 25).unwrap();
        for k in 2..=seq.len() {
            assert!(performance_curve(&seq, k).unwrap() > performance_curve(&seq, k - 1).unwrap());
        }
        // Re-evaluating each prefix from scratch agrees with the stored
        // trajectory.
        for k in 1..=seq.len() {
            let prefix = &seq.config_indices[..k];
            assert_eq!(
                expected_best(&table, prefix).unwrap(),
                performance_curve(&seq, k).unwrap()
            );
        }
    }

    #[test]
    fn identical_benchmarks_transfer_perfectly() {
        let column = [0.0, 0.25, 0.5, 0.75, 1.0];
        let table = percentile_table(&[("d0", &column), ("d1", &column), ("d2", &column)]);
        let report = loo_evaluate(&table, 25).unwrap();
        assert_eq!(report.folds.len(), 3);
        for fold in &report.folds {
            assert_eq!(fold.holdout_best, 1.0);
        }
        assert_eq!(report.mean, 1.0);
    }

    #[test]
    fn loo_needs_at_least_two_benchmarks() {
        let table = percentile_table(&[("d", &[0.0, 1.0])]);
        assert!(matches!(
            loo_evaluate(&table, 25),
            Err(Error::TooFewBenchmarks(1))
        ));
    }

    #[test]
    fn loo_matches_a_hand_trace() {
        // Four configurations, three benchmarks, dyadic percentiles.
        //   d0: [1.0, 0.0, 0.5, 0.25]
        //   d1: [0.0, 1.0, 0.5, 0.25]
        //   d2: [0.25, 0.5, 1.0, 0.0]
        //
        // Fold d0 (train d1, d2): step 1 scores are the means of the
        // d1/d2 rows: c0 0.125, c1 0.75, c2 0.75, c3 0.125 — tie at
        // 0.75 picks c1; step 2 picks c2 to reach 1.0. Holdout best on
        // d0 over {c1, c2} is 0.5.
        // Fold d1 (train d0, d2): step 1 means are 0.625, 0.25, 0.75,
        // 0.125 — picks c2; step 2 picks c0 to reach 1.0. Holdout best
        // on d1 over {c2, c0} is 0.5.
        // Fold d2 (train d0, d1): step 1 means are 0.5, 0.5, 0.5, 0.25 —
        // tie picks c0; step 2 picks c1 to reach 1.0. Holdout best on d2
        // over {c0, c1} is 0.5.
        let table = percentile_table(&[
            ("d0", &[1.0, 0.0, 0.5, 0.25]),
            ("d1", &[0.0, 1.0, 0.5, 0.25]),
            ("d2", &[0.25, 0.5, 1.0, 0.0]),
        ]);
        let report = loo_evaluate(&table, 25).unwrap();
        assert_eq!(report.folds[0].sequence, vec![1, 2]);
        assert_eq!(report.folds[0].holdout_best, 0.5);
        assert_eq!(report.folds[1].sequence, vec![2, 0]);
        assert_eq!(report.folds[1].holdout_best, 0.5);
        assert_eq!(report.folds[2].sequence, vec![0, 1]);
        assert_eq!(report.folds[2].holdout_best, 0.5);
        assert_eq!(report.mean, 0.5);
    }
}
