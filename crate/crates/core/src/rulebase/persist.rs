use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{ClusterPrototype, Fuzzifiers, Rule, RuleBase};
use crate::dataset::NormalizationParams;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
#[serde(bound = "T: Scalar", deny_unknown_fields)]
struct ModelFile<T> {
    format_version: u32,
    num_classes: usize,
    class_names: Vec<String>,
    fuzzifiers: Fuzzifiers<T>,
    aggregation_p: T,
    normalization: NormalizationParams<T>,
    rules: Vec<RuleRecord<T>>,
}

#[derive(Serialize, Deserialize)]
#[serde(bound = "T: Scalar", deny_unknown_fields)]
struct RuleRecord<T> {
    center: Vec<T>,
    source_class: usize,
    certainty: Vec<T>,
}

impl<T: Scalar> RuleBase<T> {
    /// JSON model document. Numbers use the shortest decimal form that parses
    /// back to the identical binary value.
    pub fn to_json(&self) -> Result<String> {
        let file = ModelFile {
            format_version: FORMAT_VERSION,
            num_classes: self.num_classes(),
            class_names: self.class_names.clone(),
            fuzzifiers: self.fuzzifiers,
            aggregation_p: self.aggregation_p,
            normalization: self.normalization.clone(),
            rules: self
                .rules
                .iter()
                .map(|r| RuleRecord {
                    center: r.antecedent.center.clone(),
                    source_class: r.antecedent.source_class,
                    certainty: r.certainty.clone(),
                })
                .collect(),
        };
        let mut text = serde_json::to_string_pretty(&file)?;
        text.push('\n');
        Ok(text)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text)
            .map_err(|e| Error::ModelFormat(format!("not a JSON document: {e}")))?;
        match value
            .get("format_version")
            .and_then(serde_json::Value::as_u64)
        {
            Some(v) if v == u64::from(FORMAT_VERSION) => {}
            Some(v) => {
                return Err(Error::ModelFormat(format!(
                    "unsupported format_version {v} (this build reads {FORMAT_VERSION})"
                )))
            }
            None => return Err(Error::ModelFormat("missing format_version".into())),
        }
        let file: ModelFile<T> =
            serde_json::from_value(value).map_err(|e| Error::ModelFormat(e.to_string()))?;
        if file.num_classes != file.class_names.len() {
            return Err(Error::ModelFormat(format!(
                "num_classes is {} but {} class names are given",
                file.num_classes,
                file.class_names.len()
            )));
        }
        let normalization =
            NormalizationParams::new(file.normalization.min, file.normalization.max)
                .map_err(|e| Error::ModelFormat(e.to_string()))?;
        let rb = RuleBase {
            rules: file
                .rules
                .into_iter()
                .map(|r| Rule {
                    antecedent: ClusterPrototype {
                        center: r.center,
                        source_class: r.source_class,
                    },
                    certainty: r.certainty,
                })
                .collect(),
            fuzzifiers: file.fuzzifiers,
            normalization,
            class_names: file.class_names,
            aggregation_p: file.aggregation_p,
        };
        rb.validate()
            .map_err(|e| Error::ModelFormat(e.to_string()))?;
        Ok(rb)
    }
}

pub fn save_rulebase<T: Scalar>(rb: &RuleBase<T>, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, rb.to_json()?)?;
    Ok(())
}

pub fn load_rulebase<T: Scalar>(path: impl AsRef<Path>) -> Result<RuleBase<T>> {
    RuleBase::from_json(&fs::read_to_string(path)?)
}

/// One line per rule, centers in original feature units.
pub fn export_rules_text<T: Scalar>(rb: &RuleBase<T>) -> Result<String> {
    let mut out = String::new();
    for (k, rule) in rb.rules.iter().enumerate() {
        let center = rb.normalization.invert(&rule.antecedent.center)?;
        let coords: Vec<String> = center
            .iter()
            .map(|v| format!("{:.4}", v.to_f64_lossy()))
            .collect();
        let then: Vec<String> = rule
            .certainty
            .iter()
            .zip(&rb.class_names)
            .map(|(r, name)| format!("{name}: {:.3}", r.to_f64_lossy()))
            .collect();
        writeln!(
            out,
            "R{}: IF x is A{} centered at ({}) [from class {}] THEN ({})",
            k + 1,
            k + 1,
            coords.join(", "),
            rb.class_names[rule.antecedent.source_class],
            then.join(", ")
        )
        .expect("writing to String");
    }
    Ok(out)
}
