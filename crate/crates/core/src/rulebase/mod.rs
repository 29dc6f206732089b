//! Rule-base construction: prototypes per class, interval memberships and
//! certainty degrees.

mod membership;
mod persist;

pub use membership::{
    membership_interval, memberships_single_fuzzifier, Fuzzifiers, MembershipInterval,
};
pub use persist::{export_rules_text, load_rulebase, save_rulebase, FORMAT_VERSION};

use crate::dataset::{Dataset, NormalizationParams};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::subclust::{subtractive_cluster, SubclustParams};

#[derive(Debug, Clone, PartialEq)]
pub struct ClusterPrototype<T> {
    pub center: Vec<T>,
    pub source_class: usize,
}

impl<T> AsRef<[T]> for ClusterPrototype<T> {
    fn as_ref(&self) -> &[T] {
        &self.center
    }
}

/// `IF x is Ã_k THEN (r_1^k, ..., r_M^k)`
#[derive(Debug, Clone, PartialEq)]
pub struct Rule<T> {
    pub antecedent: ClusterPrototype<T>,
    pub certainty: Vec<T>,
}

/// How class prototypes are chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PrototypeSelection<T> {
    /// One prototype per class at the class mean.
    ClassMean,
    /// Subtractive clustering on each class's patterns.
    Subtractive(SubclustParams<T>),
}

impl<T: Scalar> PrototypeSelection<T> {
    pub fn radius(&self) -> Option<T> {
        match self {
            PrototypeSelection::ClassMean => None,
            PrototypeSelection::Subtractive(p) => Some(p.radius),
        }
    }
}

/// A trained classifier: rules plus everything needed to evaluate them.
#[derive(Debug, Clone, PartialEq)]
pub struct RuleBase<T> {
    pub rules: Vec<Rule<T>>,
    pub fuzzifiers: Fuzzifiers<T>,
    pub normalization: NormalizationParams<T>,
    pub class_names: Vec<String>,
    /// Exponent of the quasiarithmetic mean used by the reasoning method.
    pub aggregation_p: T,
}

impl<T: Scalar> RuleBase<T> {
    pub fn num_classes(&self) -> usize {
        self.class_names.len()
    }

    pub fn num_features(&self) -> usize {
        self.normalization.num_features()
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn prototypes(&self) -> impl Iterator<Item = &ClusterPrototype<T>> {
        self.rules.iter().map(|r| &r.antecedent)
    }

    /// Checks every structural invariant; used after loading from disk.
    pub fn validate(&self) -> Result<()> {
        let m = self.num_classes();
        let n = self.num_features();
        if m < 2 {
            return Err(Error::InvalidData(format!(
                "{m} classes; at least 2 required"
            )));
        }
        if self.rules.is_empty() {
            return Err(Error::InvalidData("rule base has no rules".into()));
        }
        self.fuzzifiers.validate()?;
        check_aggregation_p(self.aggregation_p)?;
        for (k, rule) in self.rules.iter().enumerate() {
            if rule.antecedent.center.len() != n {
                return Err(Error::InvalidData(format!(
                    "rule {k}: center has {} coordinates, expected {n}",
                    rule.antecedent.center.len()
                )));
            }
            if rule.antecedent.center.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidData(format!("rule {k}: non-finite center")));
            }
            if rule.antecedent.source_class >= m {
                return Err(Error::InvalidData(format!(
                    "rule {k}: source class {} out of range",
                    rule.antecedent.source_class
                )));
            }
            if rule.certainty.len() != m {
                return Err(Error::InvalidData(format!(
                    "rule {k}: {} certainty degrees, expected {m}",
                    rule.certainty.len()
                )));
            }
            if rule
                .certainty
                .iter()
                .any(|r| !(*r >= T::zero() && *r <= T::one()))
            {
                return Err(Error::InvalidData(format!(
                    "rule {k}: certainty outside [0, 1]"
                )));
            }
        }
        Ok(())
    }
}

pub(crate) fn check_aggregation_p<T: Scalar>(p: T) -> Result<()> {
    if !p.is_finite() || p == T::zero() {
        return Err(Error::param(format!(
            "aggregation exponent p must be finite and non-zero, got {p}"
        )));
    }
    Ok(())
}

/// Certainty matrix `r[k][j]`: the share of cluster k's mean interval
/// membership `U_k = (lower + upper)/2` carried by training patterns of class j.
pub fn certainty_degrees<T: Scalar, P: AsRef<[T]>>(
    train: &Dataset<T>,
    prototypes: &[P],
    fz: &Fuzzifiers<T>,
) -> Result<Vec<Vec<T>>> {
    if train.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let m = train.num_classes();
    let mut per_class = vec![vec![T::zero(); m]; prototypes.len()];
    for (i, p) in train.patterns().iter().enumerate() {
        let label = p.label.ok_or(Error::Unlabeled(i))?;
        for (k, iv) in membership_interval(&p.features, prototypes, fz)
            .iter()
            .enumerate()
        {
            per_class[k][label] = per_class[k][label] + iv.midpoint();
        }
    }
    let uniform = T::one() / T::from_usize(m).expect("class count fits");
    Ok(per_class
        .into_iter()
        .map(|row| {
            let total: T = row.iter().copied().sum();
            if total > T::zero() {
                row.into_iter().map(|v| v / total).collect()
            } else {
                vec![uniform; m]
            }
        })
        .collect())
}

fn class_mean<T: Scalar>(points: &[&[T]]) -> Vec<T> {
    let n = T::from_usize(points.len()).expect("count fits");
    let dim = points[0].len();
    (0..dim)
        .map(|j| points.iter().map(|p| p[j]).sum::<T>() / n)
        .collect()
}

/// Prototypes for every class, in class order.
pub fn select_prototypes<T: Scalar>(
    train: &Dataset<T>,
    selection: &PrototypeSelection<T>,
) -> Result<Vec<ClusterPrototype<T>>> {
    let mut prototypes = Vec::new();
    for class in 0..train.num_classes() {
        let points = train.class_points(class);
        if points.is_empty() {
            return Err(Error::EmptyClass(train.class_names()[class].clone()));
        }
        let centers = match selection {
            PrototypeSelection::ClassMean => vec![class_mean(&points)],
            PrototypeSelection::Subtractive(params) => subtractive_cluster(&points, params)?,
        };
        prototypes.extend(centers.into_iter().map(|center| ClusterPrototype {
            center,
            source_class: class,
        }));
    }
    Ok(prototypes)
}

/// Builds the rule base from an already-normalized training set.
///
/// Certainty degrees are computed for all training patterns against the joint
/// prototype set of every class.
pub fn build_rulebase<T: Scalar>(
    train: &Dataset<T>,
    normalization: NormalizationParams<T>,
    selection: &PrototypeSelection<T>,
    fuzzifiers: Fuzzifiers<T>,
    aggregation_p: T,
) -> Result<RuleBase<T>> {
    fuzzifiers.validate()?;
    check_aggregation_p(aggregation_p)?;
    if let PrototypeSelection::Subtractive(p) = selection {
        p.validate()?;
    }
    if normalization.num_features() != train.num_features() {
        return Err(Error::DimensionMismatch {
            expected: normalization.num_features(),
            found: train.num_features(),
        });
    }
    let prototypes = select_prototypes(train, selection)?;
    let certainty = certainty_degrees(train, &prototypes, &fuzzifiers)?;
    let rules = prototypes
        .into_iter()
        .zip(certainty)
        .map(|(antecedent, certainty)| Rule {
            antecedent,
            certainty,
        })
        .collect();
    Ok(RuleBase {
        rules,
        fuzzifiers,
        normalization,
        class_names: train.class_names().to_vec(),
        aggregation_p,
    })
}

/// Fits the normalizer on `raw_train`, normalizes it and builds the rule base.
pub fn train<T: Scalar>(
    raw_train: &Dataset<T>,
    selection: &PrototypeSelection<T>,
    fuzzifiers: Fuzzifiers<T>,
    aggregation_p: T,
) -> Result<RuleBase<T>> {
    let normalization = NormalizationParams::fit(raw_train)?;
    let normalized = normalization.apply_dataset(raw_train)?;
    build_rulebase(
        &normalized,
        normalization,
        selection,
        fuzzifiers,
        aggregation_p,
    )
}
