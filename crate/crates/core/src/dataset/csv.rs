use std::collections::HashMap;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use csv::{ReaderBuilder, Trim, WriterBuilder};

use super::{Dataset, Pattern};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// What to do with a row that has an empty or `?` field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MissingPolicy {
    #[default]
    DropRow,
    Error,
}

/// A delimiter-separated file as strings, with the header split off when the
/// first row looks like one.
#[derive(Debug, Clone, Default)]
pub struct RawTable {
    pub header: Option<Vec<String>>,
    /// `(line number, fields)` for every data row.
    pub rows: Vec<(usize, Vec<String>)>,
    pub source_name: String,
}

impl RawTable {
    pub fn width(&self) -> Option<usize> {
        self.header
            .as_ref()
            .map(Vec::len)
            .or_else(|| self.rows.first().map(|(_, f)| f.len()))
    }

    fn parse_error(&self, line: usize, message: impl Into<String>) -> Error {
        Error::Parse {
            source_name: self.source_name.clone(),
            line,
            message: message.into(),
        }
    }
}

pub(crate) fn is_missing(field: &str) -> bool {
    field.is_empty() || field == "?"
}

fn looks_numeric(field: &str) -> bool {
    field.parse::<f64>().is_ok()
}

/// Reads a comma-separated table. The first row is treated as a header when
/// none of its fields parse as a number and at least one is present.
pub fn read_table<R: Read>(reader: R, source_name: &str) -> Result<RawTable> {
    let mut rdr = ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(Trim::All)
        .comment(Some(b'#'))
        .from_reader(reader);
    let mut table = RawTable {
        source_name: source_name.to_string(),
        ..Default::default()
    };
    let mut width = None;
    for record in rdr.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            table.parse_error(line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let fields: Vec<String> = record.iter().map(str::to_string).collect();
        if fields.len() == 1 && fields[0].is_empty() {
            continue;
        }
        match width {
            None => {
                width = Some(fields.len());
                let header = !fields.iter().any(|f| looks_numeric(f))
                    && fields.iter().any(|f| !is_missing(f));
                if header {
                    table.header = Some(fields);
                    continue;
                }
            }
            Some(w) if w != fields.len() => {
                return Err(
                    table.parse_error(line, format!("expected {w} fields, found {}", fields.len()))
                );
            }
            _ => {}
        }
        table.rows.push((line, fields));
    }
    Ok(table)
}

/// Parses one row into features, skipping `label_column` if given. Returns
/// `Ok(None)` when the row has a missing feature and the policy drops it.
pub(crate) fn parse_features<T: Scalar>(
    table: &RawTable,
    line: usize,
    fields: &[String],
    label_column: Option<usize>,
    policy: MissingPolicy,
) -> Result<Option<Vec<T>>> {
    let mut features = Vec::with_capacity(fields.len());
    for (col, field) in fields.iter().enumerate() {
        if Some(col) == label_column {
            continue;
        }
        if is_missing(field) {
            return match policy {
                MissingPolicy::DropRow => Ok(None),
                MissingPolicy::Error => {
                    Err(table.parse_error(line, format!("missing value in column {col}")))
                }
            };
        }
        let value: T = field.parse().map_err(|_| {
            table.parse_error(line, format!("column {col}: `{field}` is not a number"))
        })?;
        if !value.is_finite() {
            return Err(table.parse_error(line, format!("column {col}: `{field}` is not finite")));
        }
        features.push(value);
    }
    Ok(Some(features))
}

/// Builds a labeled dataset from an already-read table. Label strings are
/// mapped to class indices in order of first appearance.
pub fn read_csv<T: Scalar>(
    table: &RawTable,
    label_column: usize,
    policy: MissingPolicy,
) -> Result<Dataset<T>> {
    let width = table.width().ok_or(Error::EmptyDataset)?;
    if label_column >= width {
        return Err(Error::Config(format!(
            "unknown label column {label_column} ({} has {width} columns)",
            table.source_name
        )));
    }
    let mut class_index: HashMap<String, usize> = HashMap::new();
    let mut class_names = Vec::new();
    let mut patterns = Vec::new();
    for (line, fields) in &table.rows {
        let label = &fields[label_column];
        if is_missing(label) {
            match policy {
                MissingPolicy::DropRow => continue,
                MissingPolicy::Error => {
                    return Err(table.parse_error(*line, "missing class label"));
                }
            }
        }
        let Some(features) = parse_features(table, *line, fields, Some(label_column), policy)?
        else {
            continue;
        };
        let next = class_names.len();
        let idx = *class_index.entry(label.clone()).or_insert_with(|| {
            class_names.push(label.clone());
            next
        });
        patterns.push(Pattern::labeled(features, idx));
    }
    if patterns.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if class_names.len() < 2 {
        return Err(Error::InvalidData(format!(
            "{} has {} distinct class label(s); at least 2 are required",
            table.source_name,
            class_names.len()
        )));
    }
    Dataset::new(width - 1, class_names, patterns)
}

/// Feature vectors of every row, skipping `label_column` if given, paired with
/// their line numbers. Missing values are an error.
pub fn read_feature_rows<T: Scalar>(
    table: &RawTable,
    label_column: Option<usize>,
) -> Result<Vec<(usize, Vec<T>)>> {
    let width = table.width().ok_or(Error::EmptyDataset)?;
    if let Some(col) = label_column.filter(|&c| c >= width) {
        return Err(Error::Config(format!(
            "unknown label column {col} ({} has {width} columns)",
            table.source_name
        )));
    }
    let rows = table
        .rows
        .iter()
        .map(|(line, fields)| {
            let features =
                parse_features(table, *line, fields, label_column, MissingPolicy::Error)?
                    .expect("missing values are rejected");
            Ok((*line, features))
        })
        .collect::<Result<Vec<_>>>()?;
    if rows.is_empty() {
        return Err(Error::EmptyDataset);
    }
    Ok(rows)
}

/// Loads a labeled dataset from a CSV file.
pub fn load_csv<T: Scalar>(
    path: impl AsRef<Path>,
    label_column: usize,
    policy: MissingPolicy,
) -> Result<Dataset<T>> {
    let path = path.as_ref();
    let table = read_table(File::open(path)?, &path.display().to_string())?;
    read_csv(&table, label_column, policy)
}

/// Writes `ds` with a header `x1,...,xN,class`; the class is written by name.
pub fn write_csv<T: Scalar, W: Write>(ds: &Dataset<T>, writer: W) -> Result<()> {
    let mut wtr = WriterBuilder::new().from_writer(writer);
    let mut header: Vec<String> = (1..=ds.num_features()).map(|i| format!("x{i}")).collect();
    header.push("class".into());
    wtr.write_record(&header).map_err(csv_io)?;
    for p in ds.patterns() {
        let mut row: Vec<String> = p.features.iter().map(|v| v.to_string()).collect();
        row.push(
            p.label
                .map(|l| ds.class_names()[l].clone())
                .unwrap_or_default(),
        );
        wtr.write_record(&row).map_err(csv_io)?;
    }
    wtr.flush()?;
    Ok(())
}

fn csv_io(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}
