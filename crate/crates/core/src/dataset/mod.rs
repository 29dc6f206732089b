//! Labeled pattern sets, min-max normalization, splitting and the two
//! synthetic non-linear problems.

mod csv;
mod split;
mod synthetic;

pub use self::csv::{
    load_csv, read_csv, read_feature_rows, read_table, write_csv, MissingPolicy, RawTable,
};
pub use self::split::{split, SplitSpec};
pub use self::synthetic::{gen_circular, gen_irregular, SyntheticKind};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// One observation.
#[derive(Debug, Clone, PartialEq)]
pub struct Pattern<T> {
    pub features: Vec<T>,
    pub label: Option<usize>,
}

impl<T: Scalar> Pattern<T> {
    pub fn labeled(features: Vec<T>, label: usize) -> Self {
        Self {
            features,
            label: Some(label),
        }
    }

    pub fn unlabeled(features: Vec<T>) -> Self {
        Self {
            features,
            label: None,
        }
    }
}

impl<T> AsRef<[T]> for Pattern<T> {
    fn as_ref(&self) -> &[T] {
        &self.features
    }
}

/// A validated collection of patterns sharing dimensionality `num_features`
/// over `num_classes` classes.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset<T> {
    patterns: Vec<Pattern<T>>,
    num_features: usize,
    class_names: Vec<String>,
}

impl<T: Scalar> Dataset<T> {
    pub fn new(
        num_features: usize,
        class_names: Vec<String>,
        patterns: Vec<Pattern<T>>,
    ) -> Result<Self> {
        if num_features == 0 {
            return Err(Error::param("a dataset needs at least one feature"));
        }
        if class_names.len() < 2 {
            return Err(Error::param(format!(
                "a dataset needs at least two classes, got {}",
                class_names.len()
            )));
        }
        for (i, p) in patterns.iter().enumerate() {
            if p.features.len() != num_features {
                return Err(Error::DimensionMismatch {
                    expected: num_features,
                    found: p.features.len(),
                });
            }
            if let Some(v) = p.features.iter().find(|v| !v.is_finite()) {
                return Err(Error::param(format!(
                    "pattern {i} has non-finite feature {v}"
                )));
            }
            if let Some(label) = p.label {
                if label >= class_names.len() {
                    return Err(Error::param(format!(
                        "pattern {i} has label {label} but only {} classes exist",
                        class_names.len()
                    )));
                }
            }
        }
        Ok(Self {
            patterns,
            num_features,
            class_names,
        })
    }

    /// Same classes and dimensionality, different patterns.
    pub(crate) fn with_patterns(&self, patterns: Vec<Pattern<T>>) -> Self {
        Self {
            patterns,
            num_features: self.num_features,
            class_names: self.class_names.clone(),
        }
    }

    pub fn patterns(&self) -> &[Pattern<T>] {
        &self.patterns
    }

    pub fn len(&self) -> usize {
        self.patterns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }

    pub fn num_features(&self) -> usize {
        self.num_features
    }

    pub fn num_classes(&self) -> usize {
        self.class_names.len()
    }

    pub fn class_names(&self) -> &[String] {
        &self.class_names
    }

    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.num_classes()];
        for label in self.patterns.iter().filter_map(|p| p.label) {
            counts[label] += 1;
        }
        counts
    }

    /// Feature vectors of the patterns labeled `class`.
    pub fn class_points(&self, class: usize) -> Vec<&[T]> {
        self.patterns
            .iter()
            .filter(|p| p.label == Some(class))
            .map(|p| p.features.as_slice())
            .collect()
    }
}

/// Per-feature min/max used to map features onto `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct NormalizationParams<T> {
    pub min: Vec<T>,
    pub max: Vec<T>,
}

impl<T: Scalar> NormalizationParams<T> {
    pub fn new(min: Vec<T>, max: Vec<T>) -> Result<Self> {
        if min.len() != max.len() {
            return Err(Error::DimensionMismatch {
                expected: min.len(),
                found: max.len(),
            });
        }
        if min.is_empty() {
            return Err(Error::param("normalization needs at least one feature"));
        }
        for (i, (lo, hi)) in min.iter().zip(&max).enumerate() {
            if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                return Err(Error::param(format!(
                    "feature {i}: normalization range [{lo}, {hi}] is invalid"
                )));
            }
        }
        Ok(Self { min, max })
    }

    /// Identity map on `[0, 1]^n`.
    pub fn unit(num_features: usize) -> Self {
        Self {
            min: vec![T::zero(); num_features],
            max: vec![T::one(); num_features],
        }
    }

    /// Per-feature minimum and maximum over every pattern in `ds`.
    pub fn fit(ds: &Dataset<T>) -> Result<Self> {
        let first = ds.patterns().first().ok_or(Error::EmptyDataset)?;
        let mut min = first.features.clone();
        let mut max = first.features.clone();
        for p in &ds.patterns()[1..] {
            for (j, &v) in p.features.iter().enumerate() {
                min[j] = min[j].min(v);
                max[j] = max[j].max(v);
            }
        }
        Ok(Self { min, max })
    }

    pub fn num_features(&self) -> usize {
        self.min.len()
    }

    /// `(x - min) / (max - min)` per feature, unclamped. A constant feature maps to 0.5.
    pub fn apply(&self, features: &[T]) -> Result<Vec<T>> {
        self.check_dim(features)?;
        Ok(features
            .iter()
            .zip(self.min.iter().zip(&self.max))
            .map(|(&x, (&lo, &hi))| {
                if hi > lo {
                    (x - lo) / (hi - lo)
                } else {
                    T::lit(0.5)
                }
            })
            .collect())
    }

    pub fn apply_pattern(&self, p: &Pattern<T>) -> Result<Pattern<T>> {
        Ok(Pattern {
            features: self.apply(&p.features)?,
            label: p.label,
        })
    }

    pub fn apply_dataset(&self, ds: &Dataset<T>) -> Result<Dataset<T>> {
        let patterns = ds
            .patterns()
            .iter()
            .map(|p| self.apply_pattern(p))
            .collect::<Result<Vec<_>>>()?;
        Ok(ds.with_patterns(patterns))
    }

    /// Maps a normalized vector back to original units.
    pub fn invert(&self, normalized: &[T]) -> Result<Vec<T>> {
        self.check_dim(normalized)?;
        Ok(normalized
            .iter()
            .zip(self.min.iter().zip(&self.max))
            .map(|(&u, (&lo, &hi))| if hi > lo { lo + u * (hi - lo) } else { lo })
            .collect())
    }

    fn check_dim(&self, features: &[T]) -> Result<()> {
        if features.len() != self.num_features() {
            return Err(Error::DimensionMismatch {
                expected: self.num_features(),
                found: features.len(),
            });
        }
        Ok(())
    }
}

pub(crate) fn default_class_names(m: usize) -> Vec<String> {
    (1..=m).map(|j| j.to_string()).collect()
}
