use std::fmt::Display;
use std::fs::{self, File};
use std::io::{self, Write};
use std::path::Path;

use it2frbc::dataset::{read_csv, read_feature_rows, read_table, split, write_csv, RawTable};
use it2frbc::evaluation::{accuracy, emit_report, evaluate, run_experiment_on};
use it2frbc::rulebase::{build_rulebase, export_rules_text, load_rulebase, save_rulebase};
use it2frbc::subclust::subtractive_cluster;
use it2frbc::{
    ConfusionMatrix, DataSource, Dataset, Error, ExperimentConfig, Fuzzifiers, MissingPolicy,
    NormalizationParams, PrototypeSelection, Result, RuleBase, SplitSpec, SubclustParams,
    SyntheticKind,
};
use time::format_description::well_known::Rfc3339;
use time::OffsetDateTime;

use crate::{
    Cli, ClusterArgs, Command, EvalArgs, ExportRulesArgs, FuzzyArgs, GenDataArgs, PredictArgs,
    SelectionArgs, TrainArgs, TuningArgs,
};

pub const THREADS_ENV: &str = "IT2FRBC_THREADS";

pub fn run(cli: Cli) -> Result<()> {
    let header = Header {
        command: command_name(&cli.command),
        timestamp: !cli.no_timestamp,
    };
    match cli.command {
        Command::GenData(a) => gen_data(&header, a),
        Command::Cluster(a) => cluster(&header, a),
        Command::Train(a) => train(&header, a),
        Command::Predict(a) => predict(&header, a),
        Command::Eval(a) => eval(&header, a),
        Command::ExportRules(a) => export_rules(&header, a),
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::GenData(_) => "gen-data",
        Command::Cluster(_) => "cluster",
        Command::Train(_) => "train",
        Command::Predict(_) => "predict",
        Command::Eval(_) => "eval",
        Command::ExportRules(_) => "export-rules",
    }
}

/// Resolved configuration, printed to stderr before any work starts.
struct Header {
    command: &'static str,
    timestamp: bool,
}

impl Header {
    fn print(&self, settings: &[(&str, String)]) {
        let mut err = io::stderr().lock();
        if self.timestamp {
            let now = OffsetDateTime::now_utc()
                .format(&Rfc3339)
                .unwrap_or_default();
            let _ = writeln!(err, "# started {now}");
        }
        let _ = writeln!(err, "# command={}", self.command);
        for (k, v) in settings {
            let _ = writeln!(err, "# {k}={v}");
        }
    }
}

fn kv(key: &'static str, value: impl Display) -> (&'static str, String) {
    (key, value.to_string())
}

fn opt(value: Option<impl Display>, none: &str) -> String {
    value.map_or_else(|| none.to_string(), |v| v.to_string())
}

fn usage(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}

fn open_table(path: &Path) -> Result<RawTable> {
    let file = File::open(path)
        .map_err(|e| Error::Io(io::Error::new(e.kind(), format!("{}: {e}", path.display()))))?;
    read_table(file, &path.display().to_string())
}

/// The label column defaults to the last column of the table.
fn resolve_label(table: &RawTable, label_col: Option<usize>) -> Result<usize> {
    let width = table.width().ok_or(Error::EmptyDataset)?;
    Ok(label_col.unwrap_or(width - 1))
}

fn write_file(path: &Path, contents: &[u8]) -> Result<()> {
    fs::write(path, contents)
        .map_err(|e| Error::Io(io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn subclust_params(ra: f64, t: &TuningArgs) -> Result<SubclustParams<f64>> {
    let params = SubclustParams {
        radius: ra,
        squash_ratio: t.rb_ratio,
        accept_ratio: t.accept,
        reject_ratio: t.reject,
        max_centers: t.max_centers,
    };
    params.validate()?;
    Ok(params)
}

fn selection(s: &SelectionArgs) -> Result<PrototypeSelection<f64>> {
    match s.ra {
        Some(ra) => Ok(PrototypeSelection::Subtractive(subclust_params(
            ra, &s.tuning,
        )?)),
        None => Ok(PrototypeSelection::ClassMean),
    }
}

fn selection_settings(s: &SelectionArgs) -> Vec<(&'static str, String)> {
    match s.ra {
        None => vec![kv("prototypes", "class-mean")],
        Some(ra) => tuning_settings(ra, &s.tuning),
    }
}

fn tuning_settings(ra: f64, t: &TuningArgs) -> Vec<(&'static str, String)> {
    vec![
        kv("prototypes", "subtractive-clustering"),
        kv("r_a", ra),
        kv("r_b_ratio", t.rb_ratio),
        kv("accept_ratio", t.accept),
        kv("reject_ratio", t.reject),
        kv("max_centers", opt(t.max_centers, "points")),
    ]
}

fn fuzzy(f: &FuzzyArgs) -> Result<(Fuzzifiers<f64>, f64)> {
    let fz = Fuzzifiers::new(f.m1, f.m2)?;
    if !f.p.is_finite() || f.p == 0.0 {
        return Err(usage(format!(
            "aggregation exponent p must be finite and non-zero, got {}",
            f.p
        )));
    }
    Ok((fz, f.p))
}

fn check_fraction(frac: f64) -> Result<()> {
    if !(frac > 0.0 && frac <= 1.0) {
        return Err(usage(format!(
            "train fraction must lie in (0, 1], got {frac}"
        )));
    }
    Ok(())
}

fn gen_data(header: &Header, a: GenDataArgs) -> Result<()> {
    let kind: SyntheticKind = a.which.into();
    header.print(&[
        kv("which", kind),
        kv("seed", a.seed),
        kv("out", a.out.display()),
    ]);
    let ds = kind.generate::<f64>(a.seed);
    let mut buf = Vec::new();
    write_csv(&ds, &mut buf)?;
    write_file(&a.out, &buf)?;
    let counts: Vec<String> = ds.class_counts().iter().map(usize::to_string).collect();
    println!(
        "wrote {} patterns (class counts {}) to {}",
        ds.len(),
        counts.join("/"),
        a.out.display()
    );
    Ok(())
}

fn cluster(header: &Header, a: ClusterArgs) -> Result<()> {
    let params = subclust_params(a.ra, &a.tuning)?;
    let mut settings = vec![
        kv("in", a.input.display()),
        kv("label_col", opt(a.label_col, "none")),
    ];
    settings.extend(tuning_settings(a.ra, &a.tuning));
    settings.push(kv("out", a.out.display()));
    header.print(&settings);

    let table = open_table(&a.input)?;
    let rows: Vec<Vec<f64>> = read_feature_rows(&table, a.label_col)?
        .into_iter()
        .map(|(_, f)| f)
        .collect();
    let dim = rows[0].len();
    let mut min = rows[0].clone();
    let mut max = rows[0].clone();
    for r in &rows[1..] {
        for j in 0..dim {
            min[j] = min[j].min(r[j]);
            max[j] = max[j].max(r[j]);
        }
    }
    let norm = NormalizationParams::new(min, max)?;
    let normalized = rows
        .iter()
        .map(|r| norm.apply(r))
        .collect::<Result<Vec<_>>>()?;
    let centers = subtractive_cluster(&normalized, &params)?;

    let names = feature_names(&table, a.label_col, dim);
    let mut wtr = csv::Writer::from_writer(Vec::new());
    wtr.write_record(&names).map_err(io::Error::from)?;
    for c in &centers {
        let row: Vec<String> = norm.invert(c)?.iter().map(f64::to_string).collect();
        wtr.write_record(&row).map_err(io::Error::from)?;
    }
    let buf = wtr.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    write_file(&a.out, &buf)?;
    println!(
        "{} centers from {} points written to {}",
        centers.len(),
        rows.len(),
        a.out.display()
    );
    Ok(())
}

/// Header names of the feature columns, or `x1..xN` for a headerless file.
fn feature_names(table: &RawTable, label_col: Option<usize>, dim: usize) -> Vec<String> {
    match &table.header {
        Some(h) => h
            .iter()
            .enumerate()
            .filter(|(i, _)| Some(*i) != label_col)
            .map(|(_, n)| n.clone())
            .collect(),
        None => (1..=dim).map(|i| format!("x{i}")).collect(),
    }
}

fn load_labeled(
    path: &Path,
    label_col: Option<usize>,
    policy: MissingPolicy,
) -> Result<(Dataset<f64>, usize)> {
    let table = open_table(path)?;
    let label = resolve_label(&table, label_col)?;
    Ok((read_csv(&table, label, policy)?, label))
}

fn train(header: &Header, a: TrainArgs) -> Result<()> {
    let sel = selection(&a.selection)?;
    let (fz, p) = fuzzy(&a.fuzzy)?;
    check_fraction(a.train_frac)?;
    let (ds, label) = load_labeled(&a.input.input, a.input.label_col, a.input.missing.into())?;

    let mut settings = vec![
        kv("in", a.input.input.display()),
        kv("label_col", label),
        kv("missing", format!("{:?}", a.input.missing).to_lowercase()),
    ];
    settings.extend(selection_settings(&a.selection));
    settings.extend([
        kv("m1", fz.m1),
        kv("m2", fz.m2),
        kv("aggregation_p", p),
        kv("seed", a.seed),
        kv("train_fraction", a.train_frac),
        kv("stratified", a.stratified),
        kv("model", a.model.display()),
    ]);
    header.print(&settings);

    let (train_part, test_part) = if a.train_frac < 1.0 {
        let (tr, te) = split(&ds, &SplitSpec::new(a.train_frac, a.seed, a.stratified)?)?;
        (tr, Some(te))
    } else {
        (ds, None)
    };
    let norm = NormalizationParams::fit(&train_part)?;
    let rb = build_rulebase(&norm.apply_dataset(&train_part)?, norm, &sel, fz, p)?;
    save_rulebase(&rb, &a.model)?;

    println!("rules: {}", rb.len());
    println!("train patterns: {}", train_part.len());
    if let Some(test) = test_part {
        let conf = evaluate(&rb, &rb.normalization.apply_dataset(&test)?)?;
        println!("test patterns: {}", test.len());
        println!("test accuracy: {:.2}", accuracy(&conf)?);
    }
    println!("model written to {}", a.model.display());
    Ok(())
}

fn predict(header: &Header, a: PredictArgs) -> Result<()> {
    header.print(&[
        kv("model", a.model.display()),
        kv("in", a.input.display()),
        kv("label_col", opt(a.label_col, "none")),
        kv("out", a.out.display()),
    ]);
    let rb: RuleBase<f64> = load_rulebase(&a.model)?;
    let table = open_table(&a.input)?;
    let rows = read_feature_rows::<f64>(&table, a.label_col)?;
    let found = rows[0].1.len();
    if found != rb.num_features() {
        return Err(Error::DimensionMismatch {
            expected: rb.num_features(),
            found,
        });
    }

    let width = table.width().expect("non-empty table");
    let mut out_header: Vec<String> = match &table.header {
        Some(h) => h.clone(),
        None => (0..width)
            .map(|i| {
                if Some(i) == a.label_col {
                    "class".to_string()
                } else {
                    format!("x{}", i + 1)
                }
            })
            .collect(),
    };
    out_header.push("predicted".into());
    out_header.extend(rb.class_names.iter().map(|c| format!("score_{c}")));

    let mut wtr = csv::Writer::from_writer(Vec::new());
    wtr.write_record(&out_header).map_err(io::Error::from)?;
    let mut conf = ConfusionMatrix::new(rb.num_classes());
    let mut unknown_labels = 0;
    for ((_, features), (_, fields)) in rows.iter().zip(&table.rows) {
        let result = rb.classify(features)?;
        let mut record = fields.clone();
        record.push(rb.class_names[result.predicted].clone());
        record.extend(result.scores.iter().map(f64::to_string));
        wtr.write_record(&record).map_err(io::Error::from)?;
        if let Some(col) = a.label_col {
            match rb.class_names.iter().position(|c| *c == fields[col]) {
                Some(actual) => conf.record(actual, result.predicted),
                None => unknown_labels += 1,
            }
        }
    }
    let buf = wtr.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    write_file(&a.out, &buf)?;

    println!(
        "predicted {} patterns, written to {}",
        rows.len(),
        a.out.display()
    );
    if a.label_col.is_some() {
        if conf.total() > 0 {
            println!(
                "accuracy: {:.2} ({} labeled patterns)",
                accuracy(&conf)?,
                conf.total()
            );
        }
        if unknown_labels > 0 {
            println!("labels unknown to the model: {unknown_labels}");
        }
    }
    Ok(())
}

fn threads(flag: Option<usize>) -> Result<usize> {
    if let Some(n) = flag {
        return Ok(n);
    }
    match std::env::var(THREADS_ENV) {
        Ok(v) => v.trim().parse().map_err(|_| {
            Error::Config(format!(
                "{THREADS_ENV} must be a non-negative integer, got `{v}`"
            ))
        }),
        Err(_) => Ok(0),
    }
}

fn eval(header: &Header, a: EvalArgs) -> Result<()> {
    let sel = selection(&a.selection)?;
    let (fz, p) = fuzzy(&a.fuzzy)?;
    let threads = threads(a.threads)?;
    if a.runs == 0 {
        return Err(usage("runs must be at least 1"));
    }
    SplitSpec::new(a.train_frac, 0, a.stratified)?;

    let (ds, source) = match (&a.input, a.gen) {
        (Some(path), _) => {
            let policy: MissingPolicy = a.missing.into();
            let (ds, label_column) = load_labeled(path, a.label_col, policy)?;
            (
                ds,
                DataSource::File {
                    path: path.clone(),
                    label_column,
                    missing: policy,
                },
            )
        }
        (None, Some(g)) => {
            let source = DataSource::Generator {
                kind: g.into(),
                seed: a.data_seed,
            };
            (source.load()?, source)
        }
        (None, None) => return Err(usage("one of --in or --gen is required")),
    };

    let mut settings = vec![kv("source", source.describe())];
    settings.extend(selection_settings(&a.selection));
    settings.extend([
        kv("m1", fz.m1),
        kv("m2", fz.m2),
        kv("aggregation_p", p),
        kv("runs", a.runs),
        kv("seed", a.seed),
        kv("train_fraction", a.train_frac),
        kv("stratified", a.stratified),
        kv("format", format!("{:?}", a.format).to_lowercase()),
        kv("out", opt(a.out.as_ref().map(|p| p.display()), "stdout")),
        kv("threads", threads),
    ]);
    header.print(&settings);

    let mut cfg = ExperimentConfig::new(source, sel, a.seed);
    cfg.runs = a.runs;
    cfg.train_fraction = a.train_frac;
    cfg.stratified = a.stratified;
    cfg.fuzzifiers = fz;
    cfg.aggregation_p = p;
    cfg.threads = threads;
    let report = run_experiment_on(&ds, &cfg)?;
    let text = emit_report(&report, a.format.into())?;
    match &a.out {
        Some(path) => write_file(path, text.as_bytes())?,
        None => print!("{text}"),
    }
    Ok(())
}

fn export_rules(header: &Header, a: ExportRulesArgs) -> Result<()> {
    header.print(&[kv("model", a.model.display())]);
    let rb: RuleBase<f64> = load_rulebase(&a.model)?;
    print!("{}", export_rules_text(&rb)?);
    Ok(())
}
