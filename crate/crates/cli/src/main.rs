//! Command-line front end for grid-search landscape analytics and
//! vibration-signal preprocessing.
//!
//! One subcommand per operation; every run is fully specified by argv
//! plus the input files, all randomness flows through an explicit
//! `--seed`, and identical invocations produce byte-identical outputs at
//! any `--jobs` setting.

mod output;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use gridatlas::defaults::{greedy_defaults, loo_evaluate};
use gridatlas::influence::{influence_matrix, tuning_order, InfluenceMatrix};
use gridatlas::signal::{self, io as signal_io, Signal};
use gridatlas::stats::{
    cross_version_correlation, five_number, percentile_transform, value_mean_accuracy,
    CorrelationMethod, PercentileTable,
};
use gridatlas::synth;
use gridatlas::{BenchmarkSet, HyperparamSpace, ResultsTable};

use output::{atomic_write_with, csv_bytes, emit, fmt_f64, json_bytes};

#[derive(Parser)]
#[command(
    name = "gridatlas",
    version,
    about = "Analyze hyperparameter grid-search results and preprocess vibration signals",
    propagate_version = true
)]
struct Cli {
    /// Worker threads for parallel scans (default: available cores).
    /// Results are identical at any value.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    jobs: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Pearson,
    Spearman,
}

/// The table-plus-space pair taken by every analysis subcommand.
#[derive(Args)]
struct TableArgs {
    /// Long-format results CSV.
    #[arg(long)]
    results: PathBuf,
    /// Hyperparameter space JSON.
    #[arg(long)]
    space: PathBuf,
}

impl TableArgs {
    fn load(&self) -> Result<(HyperparamSpace, ResultsTable), CliError> {
        let space = HyperparamSpace::from_json_file(&self.space)?;
        let table = ResultsTable::load(&self.results, &space)?;
        Ok((space, table))
    }
}

#[derive(Subcommand)]
enum Command {
    /// Check a results table for grid completeness.
    Validate {
        #[command(flatten)]
        table: TableArgs,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Mean accuracy per value of one hyperparameter on one dataset.
    Summarize {
        #[command(flatten)]
        table: TableArgs,
        #[arg(long)]
        dataset: String,
        /// Hyperparameter whose values are compared.
        #[arg(long)]
        by: String,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Five-number summary of the accuracies per dataset.
    Fivenum {
        #[command(flatten)]
        table: TableArgs,
        /// Restrict to one dataset (default: all).
        #[arg(long)]
        dataset: Option<String>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Rank percentile of every scored configuration per dataset.
    Percentile {
        #[command(flatten)]
        table: TableArgs,
        #[arg(long)]
        dataset: Option<String>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Correlate accuracy vectors of several table versions on one dataset.
    Correlate {
        /// Hyperparameter space JSON shared by all tables.
        #[arg(long)]
        space: PathBuf,
        #[arg(long)]
        dataset: String,
        #[arg(long, value_enum, default_value = "pearson")]
        method: Method,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[arg(long)]
        output: Option<PathBuf>,
        /// Results CSV files, one per version.
        #[arg(required = true, num_args = 1..)]
        tables: Vec<PathBuf>,
    },
    /// Probability that tuning one hyperparameter forces re-tuning another.
    Influence {
        #[command(flatten)]
        table: TableArgs,
        /// Datasets to scan (default: all in the table).
        #[arg(long, value_delimiter = ',')]
        datasets: Option<Vec<String>>,
        /// Hyperparameters to scan pairwise (default: all).
        #[arg(long, value_delimiter = ',')]
        hyperparams: Option<Vec<String>>,
        /// Pin a hyperparameter to a constant, e.g. --fixed stride_l1=16.
        /// Repeatable; pinned hyperparameters are excluded from the scan.
        #[arg(long, value_parser = parse_fixed)]
        fixed: Vec<(String, i64)>,
        /// Emit per-dataset rows instead of only the pooled matrix.
        #[arg(long)]
        per_dataset: bool,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Recommended one-at-a-time tuning order from the influence matrix.
    Order {
        #[command(flatten)]
        table: TableArgs,
        #[arg(long, value_delimiter = ',')]
        datasets: Option<Vec<String>>,
        #[arg(long, value_delimiter = ',')]
        hyperparams: Option<Vec<String>>,
        #[arg(long, value_parser = parse_fixed)]
        fixed: Vec<(String, i64)>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Greedy search for a sequence of default configurations.
    Defaults {
        #[command(flatten)]
        table: TableArgs,
        /// Cap on the sequence length; the search usually stops earlier.
        #[arg(long, default_value_t = 25, value_parser = clap::value_parser!(u64).range(1..))]
        max_m: u64,
        /// Also write the expected-best curve as two-column CSV (k, E).
        #[arg(long)]
        curve: Option<PathBuf>,
        /// Also write the expected-best trajectory as JSON.
        #[arg(long)]
        trajectory: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Leave-one-out evaluation of the defaults search.
    Loo {
        #[command(flatten)]
        table: TableArgs,
        #[arg(long, default_value_t = 25, value_parser = clap::value_parser!(u64).range(1..))]
        max_m: u64,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Cut a signal into fixed-length non-overlapping windows.
    Window {
        /// Input signal: `.csv` (one sample per line) or binary container.
        #[arg(long)]
        input: PathBuf,
        /// Sampling rate in Hz; required for CSV input, embedded in the
        /// binary container.
        #[arg(long)]
        rate: Option<f64>,
        /// Samples per window.
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        length: u64,
        /// Label applied to every window.
        #[arg(long)]
        label: Option<String>,
        /// Output window-set CSV.
        #[arg(long)]
        output: PathBuf,
    },
    /// Decimate a signal by an integer factor with anti-aliasing.
    Resample {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        rate: Option<f64>,
        #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
        factor: u64,
        /// Output signal; `.csv` writes CSV, anything else the container.
        #[arg(long)]
        output: PathBuf,
    },
    /// Zero-phase low-pass filter; rate and length are unchanged.
    Filter {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        rate: Option<f64>,
        /// Cutoff frequency in Hz.
        #[arg(long)]
        cutoff: f64,
        #[arg(long)]
        output: PathBuf,
    },
    /// Stratified, seed-deterministic train/test split of labelled windows.
    Split {
        /// Labelled window-set CSV.
        #[arg(long)]
        input: PathBuf,
        /// Rate metadata carried through to the outputs.
        #[arg(long, default_value_t = 1.0)]
        rate: f64,
        #[arg(long)]
        train_fraction: f64,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        train_out: PathBuf,
        #[arg(long)]
        test_out: PathBuf,
    },
    /// Generate a synthetic results table from a landscape spec.
    Synth {
        /// Landscape spec JSON.
        #[arg(long)]
        landscape: PathBuf,
        #[arg(long)]
        results_out: PathBuf,
        #[arg(long)]
        space_out: PathBuf,
    },
}

fn parse_fixed(text: &str) -> Result<(String, i64), String> {
    let (name, value) = text
        .split_once('=')
        .ok_or_else(|| format!("expected name=value, got `{text}`"))?;
    let value: i64 = value
        .trim()
        .parse()
        .map_err(|_| format!("`{value}` is not an integer"))?;
    if name.trim().is_empty() {
        return Err("empty hyperparameter name".into());
    }
    Ok((name.trim().to_string(), value))
}

/// Domain/validation failures exit 1; bad flag combinations exit 2.
enum CliError {
    Usage(String),
    Run(anyhow::Error),
}

impl From<gridatlas::Error> for CliError {
    fn from(e: gridatlas::Error) -> Self {
        CliError::Run(anyhow::Error::new(e))
    }
}

impl From<anyhow::Error> for CliError {
    fn from(e: anyhow::Error) -> Self {
        CliError::Run(e)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs as usize)
            .build_global();
    }
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Run(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Validate {
            table,
            format,
            output,
        } => {
            let (_, table) = table.load()?;
            let report = table.validate_grid();
            let bytes = match format {
                Format::Csv => {
                    let rows: Vec<Vec<String>> = report
                        .missing
                        .iter()
                        .map(|(dataset, n)| vec![dataset.clone(), n.to_string()])
                        .collect();
                    csv_bytes(&[s("dataset"), s("missing")], &rows)?
                }
                Format::Json => json_bytes(&json!({
                    "complete": report.is_complete(),
                    "total_configs": report.total_configs,
                    "missing": report
                        .missing
                        .iter()
                        .cloned()
                        .collect::<BTreeMap<String, usize>>(),
                })),
            };
            emit(output.as_deref(), &bytes)?;
            Ok(())
        }

        Command::Summarize {
            table,
            dataset,
            by,
            format,
            output,
        } => {
            let (_, table) = table.load()?;
            let means = value_mean_accuracy(&table, &dataset, &by)?;
            let bytes = match format {
                Format::Csv => {
                    let rows: Vec<Vec<String>> = means
                        .iter()
                        .map(|(value, mean)| vec![value.to_string(), fmt_f64(*mean)])
                        .collect();
                    csv_bytes(&[s("value"), s("mean_accuracy")], &rows)?
                }
                Format::Json => json_bytes(&json!({
                    "hyperparam": by,
                    "dataset": dataset,
                    "means": means
                        .iter()
                        .map(|(value, mean)| json!({"value": value, "mean": mean}))
                        .collect::<Vec<_>>(),
                })),
            };
            emit(output.as_deref(), &bytes)?;
            Ok(())
        }

        Command::Fivenum {
            table,
            dataset,
            format,
            output,
        } => {
            let (_, table) = table.load()?;
            let datasets = select_datasets(&table, dataset.as_deref())?;
            let mut summaries = Vec::new();
            for name in &datasets {
                let d = table.dataset_index(name)?;
                let accuracies: Vec<f64> =
                    table.dataset_scores(d).iter().filter_map(|s| *s).collect();
                summaries.push((name.clone(), five_number(&accuracies)?));
            }
            let bytes = match format {
                Format::Csv => {
                    let rows: Vec<Vec<String>> = summaries
                        .iter()
                        .map(|(name, f)| {
                            vec![
                                name.clone(),
                                fmt_f64(f.min),
                                fmt_f64(f.q25),
                                fmt_f64(f.median),
                                fmt_f64(f.q75),
                                fmt_f64(f.max),
                            ]
                        })
                        .collect();
                    csv_bytes(
                        &[
                            s("dataset"),
                            s("min"),
                            s("q25"),
                            s("median"),
                            s("q75"),
                            s("max"),
                        ],
                        &rows,
                    )?
                }
                Format::Json => json_bytes(&json!(summaries
                    .iter()
                    .map(|(name, f)| json!({
                        "dataset": name,
                        "min": f.min,
                        "q25": f.q25,
                        "median": f.median,
                        "q75": f.q75,
                        "max": f.max,
                    }))
                    .collect::<Vec<_>>())),
            };
            emit(output.as_deref(), &bytes)?;
            Ok(())
        }

        Command::Percentile {
            table,
            dataset,
            format,
            output,
        } => {
            let (space, table) = table.load()?;
            let datasets = select_datasets(&table, dataset.as_deref())?;
            let mut slices = Vec::new();
            for name in &datasets {
                slices.push(percentile_transform(&table, name)?);
            }
            let bytes = match format {
                Format::Csv => {
                    let mut header: Vec<String> = space
                        .hyperparams()
                        .iter()
                        .map(|hp| hp.name.clone())
                        .collect();
                    header.push(s("dataset"));
                    header.push(s("percentile"));
                    let mut rows = Vec::new();
                    for config_index in 0..space.num_configs() {
                        let config = space.config_at(config_index);
                        for (slice, name) in slices.iter().zip(&datasets) {
                            if let Some(p) = slice[config_index] {
                                let mut row: Vec<String> =
                                    config.values.iter().map(|v| v.to_string()).collect();
                                row.push(name.clone());
                                row.push(fmt_f64(p));
                                rows.push(row);
                            }
                        }
                    }
                    csv_bytes(&header, &rows)?
                }
                Format::Json => json_bytes(&json!({
                    "datasets": datasets,
                    "percentiles": datasets
                        .iter()
                        .zip(&slices)
                        .map(|(name, slice)| (name.clone(), json!(slice)))
                        .collect::<BTreeMap<String, serde_json::Value>>(),
                })),
            };
            emit(output.as_deref(), &bytes)?;
            Ok(())
        }

        Command::Correlate {
            space,
            dataset,
            method,
            format,
            output,
            tables,
        } => {
            let space = HyperparamSpace::from_json_file(&space)?;
            let mut loaded = Vec::with_capacity(tables.len());
            for path in &tables {
                loaded.push(ResultsTable::load(path, &space)?);
            }
            let refs: Vec<&ResultsTable> = loaded.iter().collect();
            let matrix = cross_version_correlation(
                &refs,
                &dataset,
                match method {
                    Method::Pearson => CorrelationMethod::Pearson,
                    Method::Spearman => CorrelationMethod::Spearman,
                },
            )?;
            let labels: Vec<String> = tables.iter().map(|p| p.display().to_string()).collect();
            let bytes = match format {
                Format::Csv => {
                    let mut header = vec![s("table")];
                    header.extend(labels.iter().cloned());
                    let rows: Vec<Vec<String>> = labels
                        .iter()
                        .enumerate()
                        .map(|(i, label)| {
                            let mut row = vec![label.clone()];
                            row.extend(matrix[i].iter().map(|entry| match entry {
                                Some(r) => fmt_f64(*r),
                                None => s("NA"),
                            }));
                            row
                        })
                        .collect();
                    csv_bytes(&header, &rows)?
                }
                Format::Json => json_bytes(&json!({
                    "labels": labels,
                    "method": match method {
                        Method::Pearson => "pearson",
                        Method::Spearman => "spearman",
                    },
                    "matrix": matrix,
                })),
            };
            emit(output.as_deref(), &bytes)?;
            Ok(())
        }

        Command::Influence {
            table,
            datasets,
            hyperparams,
            fixed,
            per_dataset,
            format,
            output,
        } => {
            let (_, table) = table.load()?;
            let matrix = compute_matrix(&table, datasets, hyperparams, &fixed)?;
            let bytes = match format {
                Format::Csv => influence_csv(&matrix, per_dataset)?,
                Format::Json => json_bytes(&influence_json(&matrix, per_dataset)),
            };
            emit(output.as_deref(), &bytes)?;
            Ok(())
        }

        Command::Order {
            table,
            datasets,
            hyperparams,
            fixed,
            format,
            output,
        } => {
            let (_, table) = table.load()?;
            let matrix = compute_matrix(&table, datasets, hyperparams, &fixed)?;
            let order = tuning_order(&matrix);
            let totals: BTreeMap<String, f64> = matrix
                .hyperparams()
                .iter()
                .enumerate()
                .map(|(i, name)| (name.clone(), matrix.outgoing_total(i)))
                .collect();
            let bytes = match format {
                Format::Csv => {
                    let rows: Vec<Vec<String>> = order
                        .iter()
                        .enumerate()
                        .map(|(rank, name)| {
                            vec![(rank + 1).to_string(), name.clone(), fmt_f64(totals[name])]
                        })
                        .collect();
                    csv_bytes(
                        &[s("rank"), s("hyperparameter"), s("outgoing_influence")],
                        &rows,
                    )?
                }
                Format::Json => json_bytes(&json!({
                    "order": order,
                    "outgoing": totals,
                })),
            };
            emit(output.as_deref(), &bytes)?;
            Ok(())
        }

        Command::Defaults {
            table,
            max_m,
            curve,
            trajectory,
            format,
            output,
        } => {
            let (space, table) = table.load()?;
            let percentiles = PercentileTable::from_table(&table)?;
            let sequence = greedy_defaults(&percentiles, max_m as usize)?;

            if let Some(curve_path) = &curve {
                let rows: Vec<Vec<String>> = sequence
                    .trajectory
                    .iter()
                    .enumerate()
                    .map(|(i, e)| vec![(i + 1).to_string(), fmt_f64(*e)])
                    .collect();
                let bytes = csv_bytes(&[s("k"), s("expected_best")], &rows)?;
                emit(Some(curve_path), &bytes)?;
            }
            if let Some(trajectory_path) = &trajectory {
                let bytes = json_bytes(&json!({
                    "trajectory": sequence.trajectory,
                    "config_indices": sequence.config_indices,
                }));
                emit(Some(trajectory_path), &bytes)?;
            }

            let datasets = percentiles.datasets().to_vec();
            let bytes = match format {
                Format::Csv => {
                    let mut header = vec![s("step")];
                    header.extend(space.hyperparams().iter().map(|hp| hp.name.clone()));
                    header.extend(datasets.iter().cloned());
                    let mut rows = Vec::new();
                    for (step, &config_index) in sequence.config_indices.iter().enumerate() {
                        let config = space.config_at(config_index);
                        let mut row = vec![(step + 1).to_string()];
                        row.extend(config.values.iter().map(|v| v.to_string()));
                        for d in 0..datasets.len() {
                            row.push(fmt_f64(percentiles.percentile(d, config_index).unwrap()));
                        }
                        rows.push(row);
                    }
                    csv_bytes(&header, &rows)?
                }
                Format::Json => {
                    let steps: Vec<serde_json::Value> = sequence
                        .config_indices
                        .iter()
                        .enumerate()
                        .map(|(step, &config_index)| {
                            let config = space.config_at(config_index);
                            let per_dataset: Vec<f64> = (0..datasets.len())
                                .map(|d| percentiles.percentile(d, config_index).unwrap())
                                .collect();
                            json!({
                                "step": step + 1,
                                "config_index": config_index,
                                "values": config.values,
                                "percentiles": per_dataset,
                                "expected_best": sequence.trajectory[step],
                            })
                        })
                        .collect();
                    json_bytes(&json!({
                        "hyperparams": space
                            .hyperparams()
                            .iter()
                            .map(|hp| hp.name.clone())
                            .collect::<Vec<_>>(),
                        "datasets": datasets,
                        "sequence": steps,
                        "trajectory": sequence.trajectory,
                    }))
                }
            };
            emit(output.as_deref(), &bytes)?;
            Ok(())
        }

        Command::Loo {
            table,
            max_m,
            format,
            output,
        } => {
            let (_, table) = table.load()?;
            let percentiles = PercentileTable::from_table(&table)?;
            let report = loo_evaluate(&percentiles, max_m as usize)?;
            let bytes = match format {
                Format::Csv => {
                    let mut rows: Vec<Vec<String>> = report
                        .folds
                        .iter()
                        .map(|fold| vec![fold.held_out.clone(), fmt_f64(fold.holdout_best)])
                        .collect();
                    // Mean row last; the empty dataset id cannot collide.
                    rows.push(vec![String::new(), fmt_f64(report.mean)]);
                    csv_bytes(&[s("held_out"), s("holdout_best")], &rows)?
                }
                Format::Json => json_bytes(&json!({
                    "folds": report.folds,
                    "mean": report.mean,
                })),
            };
            emit(output.as_deref(), &bytes)?;
            Ok(())
        }

        Command::Window {
            input,
            rate,
            length,
            label,
            output,
        } => {
            let signal = read_signal(&input, rate)?;
            let mut set = signal::window(&signal, length as usize);
            if let Some(label) = label {
                let labels = vec![label; set.len()];
                set = set.with_labels(labels)?;
            }
            atomic_write_with(&output, |path| signal_io::write_windows_csv(path, &set))?;
            Ok(())
        }

        Command::Resample {
            input,
            rate,
            factor,
            output,
        } => {
            let signal = read_signal(&input, rate)?;
            let resampled = signal::resample(&signal, factor as usize)?;
            write_signal(&output, &resampled)?;
            Ok(())
        }

        Command::Filter {
            input,
            rate,
            cutoff,
            output,
        } => {
            let signal = read_signal(&input, rate)?;
            let filtered = signal::lowpass(&signal, cutoff)?;
            write_signal(&output, &filtered)?;
            Ok(())
        }

        Command::Split {
            input,
            rate,
            train_fraction,
            seed,
            train_out,
            test_out,
        } => {
            if !(train_fraction > 0.0 && train_fraction < 1.0) {
                return Err(CliError::Usage(format!(
                    "--train-fraction must be strictly between 0 and 1, got {train_fraction}"
                )));
            }
            let set = signal_io::read_windows_csv(&input, rate)?;
            let (train, test) = signal::split(&set, train_fraction, seed)?;
            atomic_write_with(&train_out, |path| {
                signal_io::write_windows_csv(path, &train)
            })?;
            atomic_write_with(&test_out, |path| signal_io::write_windows_csv(path, &test))?;
            Ok(())
        }

        Command::Synth {
            landscape,
            results_out,
            space_out,
        } => {
            let spec = synth::LandscapeSpec::from_json_file(&landscape)?;
            let table = synth::generate(&spec)?;
            atomic_write_with(&results_out, |path| table.write(path))?;
            atomic_write_with(&space_out, |path| spec.space.to_json_file(path))?;
            Ok(())
        }
    }
}

fn s(text: &str) -> String {
    text.to_string()
}

fn select_datasets(table: &ResultsTable, dataset: Option<&str>) -> Result<Vec<String>, CliError> {
    match dataset {
        Some(name) => {
            table.dataset_index(name)?;
            Ok(vec![name.to_string()])
        }
        None => Ok(table.datasets().to_vec()),
    }
}

fn compute_matrix(
    table: &ResultsTable,
    datasets: Option<Vec<String>>,
    hyperparams: Option<Vec<String>>,
    fixed: &[(String, i64)],
) -> Result<InfluenceMatrix, CliError> {
    let benchmarks = match datasets {
        Some(ids) => BenchmarkSet::new(ids)?,
        None => BenchmarkSet::new(table.datasets().to_vec())?,
    };
    Ok(influence_matrix(
        table,
        &benchmarks,
        hyperparams.as_deref(),
        fixed,
    )?)
}

fn influence_csv(matrix: &InfluenceMatrix, per_dataset: bool) -> Result<Vec<u8>, CliError> {
    let names = matrix.hyperparams();
    let bytes = if per_dataset {
        let mut rows = Vec::new();
        for (d, dataset) in matrix.datasets().iter().enumerate() {
            for (i, source) in names.iter().enumerate() {
                for (j, target) in names.iter().enumerate() {
                    if let Some(inf) = matrix.per_dataset(d, i, j) {
                        rows.push(vec![
                            dataset.clone(),
                            source.clone(),
                            target.clone(),
                            fmt_f64(inf.probability()),
                            inf.differences.to_string(),
                            inf.trials.to_string(),
                        ]);
                    }
                }
            }
        }
        csv_bytes(
            &[
                s("dataset"),
                s("source"),
                s("target"),
                s("probability"),
                s("differences"),
                s("trials"),
            ],
            &rows,
        )?
    } else {
        let mut rows = Vec::new();
        for (i, source) in names.iter().enumerate() {
            for (j, target) in names.iter().enumerate() {
                if i == j {
                    continue;
                }
                let (differences, trials) = pooled_counts(matrix, i, j);
                rows.push(vec![
                    source.clone(),
                    target.clone(),
                    fmt_f64(matrix.pooled(i, j).unwrap()),
                    differences.to_string(),
                    trials.to_string(),
                ]);
            }
        }
        csv_bytes(
            &[
                s("source"),
                s("target"),
                s("probability"),
                s("differences"),
                s("trials"),
            ],
            &rows,
        )?
    };
    Ok(bytes)
}

fn pooled_counts(matrix: &InfluenceMatrix, source: usize, target: usize) -> (u64, u64) {
    let mut differences = 0;
    let mut trials = 0;
    for d in 0..matrix.datasets().len() {
        if let Some(inf) = matrix.per_dataset(d, source, target) {
            differences += inf.differences;
            trials += inf.trials;
        }
    }
    (differences, trials)
}

fn influence_json(matrix: &InfluenceMatrix, per_dataset: bool) -> serde_json::Value {
    let names = matrix.hyperparams();
    let pair_object = |lookup: &dyn Fn(usize, usize) -> Option<serde_json::Value>| {
        names
            .iter()
            .enumerate()
            .map(|(i, source)| {
                let targets: BTreeMap<String, serde_json::Value> = names
                    .iter()
                    .enumerate()
                    .filter_map(|(j, target)| lookup(i, j).map(|v| (target.clone(), v)))
                    .collect();
                (source.clone(), json!(targets))
            })
            .collect::<BTreeMap<String, serde_json::Value>>()
    };

    let pooled = pair_object(&|i, j| {
        matrix.pooled(i, j).map(|p| {
            let (differences, trials) = pooled_counts(matrix, i, j);
            json!({
                "probability": p,
                "differences": differences,
                "trials": trials,
            })
        })
    });

    let mut object = json!({
        "hyperparams": names,
        "datasets": matrix.datasets(),
        "pooled": pooled,
    });
    if per_dataset {
        let per: BTreeMap<String, serde_json::Value> = matrix
            .datasets()
            .iter()
            .enumerate()
            .map(|(d, dataset)| {
                let pairs = pair_object(&|i, j| {
                    matrix.per_dataset(d, i, j).map(|inf| {
                        json!({
                            "probability": inf.probability(),
                            "differences": inf.differences,
                            "trials": inf.trials,
                        })
                    })
                });
                (dataset.clone(), json!(pairs))
            })
            .collect();
        object["per_dataset"] = json!(per);
    }
    object
}

fn is_csv(path: &Path) -> bool {
    path.extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"))
}

fn read_signal(path: &Path, rate: Option<f64>) -> Result<Signal, CliError> {
    if is_csv(path) {
        let rate =
            rate.ok_or_else(|| CliError::Usage("--rate is required for CSV signal input".into()))?;
        if !(rate.is_finite() && rate > 0.0) {
            return Err(CliError::Usage(format!(
                "--rate must be positive, got {rate}"
            )));
        }
        Ok(signal_io::read_signal_csv(path, rate)?)
    } else {
        if rate.is_some() {
            return Err(CliError::Usage(
                "--rate conflicts with the rate embedded in the binary container".into(),
            ));
        }
        Ok(signal_io::read_signal_bin(path)?)
    }
}

fn write_signal(path: &Path, signal: &Signal) -> Result<(), CliError> {
    if is_csv(path) {
        atomic_write_with(path, |p| signal_io::write_signal_csv(p, signal))?;
    } else {
        atomic_write_with(path, |p| signal_io::write_signal_bin(p, signal))?;
    }
    Ok(())
}
