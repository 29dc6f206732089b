//! Repeated split/train/test experiments and their reports.

use std::fmt::Write as _;
use std::path::PathBuf;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{
    load_csv, split, Dataset, MissingPolicy, NormalizationParams, SplitSpec, SyntheticKind,
};
use crate::error::{Error, Result};
use crate::inference::classify_normalized;
use crate::rulebase::{build_rulebase, Fuzzifiers, PrototypeSelection, RuleBase};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub enum DataSource {
    File {
        path: PathBuf,
        label_column: usize,
        missing: MissingPolicy,
    },
    Generator {
        kind: SyntheticKind,
        seed: u64,
    },
}

impl DataSource {
    pub fn load<T: Scalar>(&self) -> Result<Dataset<T>> {
        match self {
            DataSource::File {
                path,
                label_column,
                missing,
            } => load_csv(path, *label_column, *missing),
            DataSource::Generator { kind, seed } => Ok(kind.generate(*seed)),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            DataSource::File {
                path, label_column, ..
            } => {
                format!("file:{} (label column {label_column})", path.display())
            }
            DataSource::Generator { kind, seed } => format!("generator:{kind} (seed {seed})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig<T> {
    pub source: DataSource,
    pub runs: usize,
    pub train_fraction: f64,
    pub stratified: bool,
    pub master_seed: u64,
    pub selection: PrototypeSelection<T>,
    pub fuzzifiers: Fuzzifiers<T>,
    pub aggregation_p: T,
    /// Worker threads for independent runs; 0 lets the pool decide.
    pub threads: usize,
}

impl<T: Scalar> ExperimentConfig<T> {
    /// 32 runs of 50/50 shuffled splits, `m1 = 1.5`, `m2 = 2.5`, `p = 2`.
    pub fn new(source: DataSource, selection: PrototypeSelection<T>, master_seed: u64) -> Self {
        Self {
            source,
            runs: 32,
            train_fraction: 0.5,
            stratified: false,
            master_seed,
            selection,
            fuzzifiers: Fuzzifiers {
                m1: T::lit(1.5),
                m2: T::lit(2.5),
            },
            aggregation_p: T::lit(2.0),
            threads: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.runs == 0 {
            return Err(Error::param("runs must be at least 1"));
        }
        SplitSpec::new(self.train_fraction, 0, self.stratified)?;
        self.fuzzifiers.validate()?;
        crate::rulebase::check_aggregation_p(self.aggregation_p)?;
        if let PrototypeSelection::Subtractive(p) = &self.selection {
            p.validate()?;
        }
        Ok(())
    }

    pub fn settings(&self) -> ExperimentSettings {
        let sc = match &self.selection {
            PrototypeSelection::ClassMean => None,
            PrototypeSelection::Subtractive(p) => Some(SubclustSettings {
                r_a: p.radius.to_f64_lossy(),
                r_b_ratio: p.squash_ratio.to_f64_lossy(),
                accept_ratio: p.accept_ratio.to_f64_lossy(),
                reject_ratio: p.reject_ratio.to_f64_lossy(),
                max_centers: p.max_centers,
            }),
        };
        ExperimentSettings {
            source: self.source.describe(),
            runs: self.runs,
            train_fraction: self.train_fraction,
            stratified: self.stratified,
            master_seed: self.master_seed,
            subclust: sc,
            m1: self.fuzzifiers.m1.to_f64_lossy(),
            m2: self.fuzzifiers.m2.to_f64_lossy(),
            aggregation_p: self.aggregation_p.to_f64_lossy(),
        }
    }
}

/// Fully resolved configuration, recorded in every report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSettings {
    pub source: String,
    pub runs: usize,
    pub train_fraction: f64,
    pub stratified: bool,
    pub master_seed: u64,
    /// `None` for the class-mean baseline.
    pub subclust: Option<SubclustSettings>,
    pub m1: f64,
    pub m2: f64,
    pub aggregation_p: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubclustSettings {
    pub r_a: f64,
    pub r_b_ratio: f64,
    pub accept_ratio: f64,
    pub reject_ratio: f64,
    pub max_centers: Option<usize>,
}

/// Rows are true classes, columns predicted classes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub counts: Vec<Vec<usize>>,
}

impl ConfusionMatrix {
    pub fn new(num_classes: usize) -> Self {
        Self {
            counts: vec![vec![0; num_classes]; num_classes],
        }
    }

    pub fn record(&mut self, actual: usize, predicted: usize) {
        self.counts[actual][predicted] += 1;
    }

    pub fn total(&self) -> usize {
        self.counts.iter().flatten().sum()
    }

    pub fn correct(&self) -> usize {
        (0..self.counts.len()).map(|j| self.counts[j][j]).sum()
    }

    pub fn row_total(&self, class: usize) -> usize {
        self.counts[class].iter().sum()
    }
}

/// `100 · trace / total`
pub fn accuracy(conf: &ConfusionMatrix) -> Result<f64> {
    let total = conf.total();
    if total == 0 {
        return Err(Error::InvalidData(
            "accuracy of an empty confusion matrix".into(),
        ));
    }
    Ok(100.0 * conf.correct() as f64 / total as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum RunOutcome {
    Completed {
        accuracy: f64,
        rule_count: usize,
        confusion: ConfusionMatrix,
    },
    Failed {
        reason: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub run: usize,
    pub seed: u64,
    #[serde(flatten)]
    pub outcome: RunOutcome,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub best: f64,
    pub average: f64,
    pub worst: f64,
    /// Population standard deviation of the run accuracies.
    pub sigma: f64,
    pub rules_min: usize,
    pub rules_max: usize,
}

impl Aggregate {
    pub fn from_runs(runs: &[RunRecord]) -> Option<Self> {
        let done: Vec<(f64, usize)> = runs
            .iter()
            .filter_map(|r| match &r.outcome {
                RunOutcome::Completed {
                    accuracy,
                    rule_count,
                    ..
                } => Some((*accuracy, *rule_count)),
                RunOutcome::Failed { .. } => None,
            })
            .collect();
        if done.is_empty() {
            return None;
        }
        let n = done.len() as f64;
        let average = done.iter().map(|d| d.0).sum::<f64>() / n;
        let variance = done.iter().map(|d| (d.0 - average).powi(2)).sum::<f64>() / n;
        Some(Self {
            best: done.iter().map(|d| d.0).fold(f64::NEG_INFINITY, f64::max),
            average,
            worst: done.iter().map(|d| d.0).fold(f64::INFINITY, f64::min),
            sigma: variance.sqrt(),
            rules_min: done.iter().map(|d| d.1).min().expect("non-empty"),
            rules_max: done.iter().map(|d| d.1).max().expect("non-empty"),
        })
    }

    pub fn mean_rules(runs: &[RunRecord]) -> Option<f64> {
        let counts: Vec<usize> = runs
            .iter()
            .filter_map(|r| match &r.outcome {
                RunOutcome::Completed { rule_count, .. } => Some(*rule_count),
                RunOutcome::Failed { .. } => None,
            })
            .collect();
        (!counts.is_empty()).then(|| counts.iter().sum::<usize>() as f64 / counts.len() as f64)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub settings: ExperimentSettings,
    pub class_names: Vec<String>,
    pub runs: Vec<RunRecord>,
    pub completed: usize,
    pub failed: usize,
    /// `None` when every run failed.
    pub aggregate: Option<Aggregate>,
}

impl ExperimentReport {
    pub fn accuracies(&self) -> Vec<f64> {
        self.runs
            .iter()
            .filter_map(|r| match &r.outcome {
                RunOutcome::Completed { accuracy, .. } => Some(*accuracy),
                RunOutcome::Failed { .. } => None,
            })
            .collect()
    }

    pub fn rule_counts(&self) -> Vec<usize> {
        self.runs
            .iter()
            .filter_map(|r| match &r.outcome {
                RunOutcome::Completed { rule_count, .. } => Some(*rule_count),
                RunOutcome::Failed { .. } => None,
            })
            .collect()
    }

    pub fn confusions(&self) -> Vec<&ConfusionMatrix> {
        self.runs
            .iter()
            .filter_map(|r| match &r.outcome {
                RunOutcome::Completed { confusion, .. } => Some(confusion),
                RunOutcome::Failed { .. } => None,
            })
            .collect()
    }
}

/// Seed of run `index`, derived from the master seed on an independent stream.
pub fn run_seed(master_seed: u64, index: usize) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(index as u64);
    rng.next_u64()
}

/// Classifies every pattern of an already-normalized test set.
pub fn evaluate<T: Scalar>(rb: &RuleBase<T>, test: &Dataset<T>) -> Result<ConfusionMatrix> {
    let mut conf = ConfusionMatrix::new(rb.num_classes());
    for (i, p) in test.patterns().iter().enumerate() {
        let actual = p.label.ok_or(Error::Unlabeled(i))?;
        conf.record(actual, classify_normalized(&p.features, rb)?.predicted);
    }
    Ok(conf)
}

/// One split/train/test cycle. The normalizer is fitted on the training part only.
pub fn run_once<T: Scalar>(
    ds: &Dataset<T>,
    cfg: &ExperimentConfig<T>,
    seed: u64,
) -> Result<RunOutcome> {
    let spec = SplitSpec {
        train_fraction: cfg.train_fraction,
        seed,
        stratified: cfg.stratified,
    };
    let (train, test) = split(ds, &spec)?;
    let normalization = NormalizationParams::fit(&train)?;
    let train = normalization.apply_dataset(&train)?;
    let test = normalization.apply_dataset(&test)?;
    let rb = build_rulebase(
        &train,
        normalization,
        &cfg.selection,
        cfg.fuzzifiers,
        cfg.aggregation_p,
    )?;
    let confusion = evaluate(&rb, &test)?;
    Ok(RunOutcome::Completed {
        accuracy: accuracy(&confusion)?,
        rule_count: rb.len(),
        confusion,
    })
}

/// Runs every repetition on a resolved dataset. Data-dependent failures of a
/// single run (for example a class missing from its training part) are
/// recorded in that run and excluded from the aggregate.
pub fn run_experiment_on<T: Scalar>(
    ds: &Dataset<T>,
    cfg: &ExperimentConfig<T>,
) -> Result<ExperimentReport> {
    cfg.validate()?;
    let one = |i: usize| {
        let seed = run_seed(cfg.master_seed, i);
        let outcome = match run_once(ds, cfg, seed) {
            Ok(o) => o,
            Err(e @ (Error::Invariant(_) | Error::InvalidParameter(_))) => return Err(e),
            Err(e) => RunOutcome::Failed {
                reason: e.to_string(),
            },
        };
        Ok(RunRecord {
            run: i + 1,
            seed,
            outcome,
        })
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build()
        .map_err(|e| Error::Invariant(format!("thread pool: {e}")))?;
    let runs: Vec<RunRecord> = pool.install(|| {
        (0..cfg.runs)
            .into_par_iter()
            .map(one)
            .collect::<Result<_>>()
    })?;
    let failed = runs
        .iter()
        .filter(|r| matches!(r.outcome, RunOutcome::Failed { .. }))
        .count();
    Ok(ExperimentReport {
        settings: cfg.settings(),
        class_names: ds.class_names().to_vec(),
        aggregate: Aggregate::from_runs(&runs),
        completed: runs.len() - failed,
        failed,
        runs,
    })
}

pub fn run_experiment<T: Scalar>(cfg: &ExperimentConfig<T>) -> Result<ExperimentReport> {
    cfg.validate()?;
    let ds = cfg.source.load::<T>()?;
    run_experiment_on(&ds, cfg)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Table,
    Csv,
    Json,
}

impl std::str::FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "table" | "text_table" => Ok(ReportFormat::Table),
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            other => Err(Error::Config(format!("unknown report format `{other}`"))),
        }
    }
}

/// Percentages are reported to two decimals in every format.
fn round2(v: f64) -> f64 {
    (v * 100.0).round() / 100.0
}

fn fmt2(v: f64) -> String {
    format!("{:.2}", round2(v))
}

fn rule_interval(a: &Aggregate) -> String {
    if a.rules_min == a.rules_max {
        a.rules_min.to_string()
    } else {
        format!("[{},{}]", a.rules_min, a.rules_max)
    }
}

fn ra_label(s: &ExperimentSettings) -> String {
    s.subclust
        .as_ref()
        .map_or_else(|| "none".to_string(), |sc| sc.r_a.to_string())
}

fn settings_lines(s: &ExperimentSettings) -> Vec<String> {
    let mut lines = vec![
        format!("source={}", s.source),
        format!("runs={}", s.runs),
        format!("train_fraction={}", s.train_fraction),
        format!("stratified={}", s.stratified),
        format!("master_seed={}", s.master_seed),
    ];
    match &s.subclust {
        None => lines.push("prototypes=class-mean".into()),
        Some(sc) => {
            lines.push("prototypes=subtractive-clustering".into());
            lines.push(format!("r_a={}", sc.r_a));
            lines.push(format!("r_b_ratio={}", sc.r_b_ratio));
            lines.push(format!("accept_ratio={}", sc.accept_ratio));
            lines.push(format!("reject_ratio={}", sc.reject_ratio));
            lines.push(format!(
                "max_centers={}",
                sc.max_centers
                    .map_or_else(|| "points".to_string(), |m| m.to_string())
            ));
        }
    }
    lines.push(format!("m1={}", s.m1));
    lines.push(format!("m2={}", s.m2));
    lines.push(format!("aggregation_p={}", s.aggregation_p));
    lines
}

#[derive(Serialize)]
struct JsonReport<'a> {
    settings: &'a ExperimentSettings,
    class_names: &'a [String],
    runs: Vec<RunRecord>,
    completed: usize,
    failed: usize,
    aggregate: Option<Aggregate>,
}

pub fn emit_report(report: &ExperimentReport, format: ReportFormat) -> Result<String> {
    let mut out = String::new();
    match format {
        ReportFormat::Table => {
            for line in settings_lines(&report.settings) {
                writeln!(out, "# {line}").unwrap();
            }
            writeln!(
                out,
                "{:>8} {:>15} {:>8} {:>8} {:>8} {:>8}",
                "r_a", "Clusters/rules", "Best", "Average", "Worst", "sigma"
            )
            .unwrap();
            match &report.aggregate {
                Some(a) => writeln!(
                    out,
                    "{:>8} {:>15} {:>8} {:>8} {:>8} {:>8}",
                    ra_label(&report.settings),
                    rule_interval(a),
                    fmt2(a.best),
                    fmt2(a.average),
                    fmt2(a.worst),
                    fmt2(a.sigma)
                )
                .unwrap(),
                None => writeln!(
                    out,
                    "{:>8} {:>15}",
                    ra_label(&report.settings),
                    "all runs failed"
                )
                .unwrap(),
            }
            writeln!(
                out,
                "completed runs: {}, failed runs: {}",
                report.completed, report.failed
            )
            .unwrap();
            for r in &report.runs {
                if let RunOutcome::Failed { reason } = &r.outcome {
                    writeln!(out, "run {} failed: {reason}", r.run).unwrap();
                }
            }
        }
        ReportFormat::Csv => {
            for line in settings_lines(&report.settings) {
                writeln!(out, "# {line}").unwrap();
            }
            writeln!(out, "record,run,seed,status,accuracy,rules").unwrap();
            for r in &report.runs {
                match &r.outcome {
                    RunOutcome::Completed {
                        accuracy,
                        rule_count,
                        ..
                    } => writeln!(
                        out,
                        "run,{},{},completed,{},{}",
                        r.run,
                        r.seed,
                        fmt2(*accuracy),
                        rule_count
                    ),
                    RunOutcome::Failed { .. } => writeln!(out, "run,{},{},failed,,", r.run, r.seed),
                }
                .unwrap();
            }
            if let Some(a) = &report.aggregate {
                for (name, v) in [
                    ("best", a.best),
                    ("average", a.average),
                    ("worst", a.worst),
                    ("sigma", a.sigma),
                ] {
                    writeln!(out, "{name},,,,{},", fmt2(v)).unwrap();
                }
                writeln!(out, "rules_min,,,,,{}", a.rules_min).unwrap();
                writeln!(out, "rules_max,,,,,{}", a.rules_max).unwrap();
            }
            writeln!(out, "failed,,,,,{}", report.failed).unwrap();
        }
        ReportFormat::Json => {
            let runs = report
                .runs
                .iter()
                .map(|r| RunRecord {
                    outcome: match &r.outcome {
                        RunOutcome::Completed {
                            accuracy,
                            rule_count,
                            confusion,
                        } => RunOutcome::Completed {
                            accuracy: round2(*accuracy),
                            rule_count: *rule_count,
                            confusion: confusion.clone(),
                        },
                        failed => failed.clone(),
                    },
                    ..r.clone()
                })
                .collect();
            let aggregate = report.aggregate.as_ref().map(|a| Aggregate {
                best: round2(a.best),
                average: round2(a.average),
                worst: round2(a.worst),
                sigma: round2(a.sigma),
                ..a.clone()
            });
            let doc = JsonReport {
                settings: &report.settings,
                class_names: &report.class_names,
                runs,
                completed: report.completed,
                failed: report.failed,
                aggregate,
            };
            out = serde_json::to_string_pretty(&doc)?;
            out.push('\n');
        }
    }
    Ok(out)
}
