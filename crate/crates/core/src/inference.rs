//! Interval fuzzy reasoning: matching, association, aggregation and decision.
//!
//! For a pattern `x` and rule `k`, the matching degree is the interval
//! membership of `x` in `Ã_k` (rules have a single antecedent, so no t-norm is
//! involved). The association with class `j` scales that interval by the
//! certainty `r_j^k`; the weighting function is the identity. Per class, the
//! quasiarithmetic mean of the lower bounds and of the upper bounds over the
//! rules with a positive upper association gives the soundness interval, and
//! the class with the largest interval midpoint wins.
//!
//! With a single certainty per rule (one class 1, the rest 0) this reduces to
//! rules with a class in the consequent; with `m1 == m2` it reduces to the
//! type-1 method.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rulebase::{check_aggregation_p, membership_interval, MembershipInterval, RuleBase};
use crate::scalar::Scalar;

/// `b_j^k = [lower_k · r_j^k, upper_k · r_j^k]`
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct AssociationInterval<T> {
    pub lower: T,
    pub upper: T,
}

/// `Y_j = [Y_jl, Y_jr]`
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct SoundnessInterval<T> {
    pub lower: T,
    pub upper: T,
}

impl<T: Scalar> SoundnessInterval<T> {
    pub fn midpoint(&self) -> T {
        (self.lower + self.upper) / T::lit(2.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassificationResult<T> {
    pub predicted: usize,
    pub soundness: Vec<SoundnessInterval<T>>,
    /// Midpoints of the soundness intervals.
    pub scores: Vec<T>,
    /// Set when every class had zero soundness; `predicted` is then 0.
    pub no_evidence: bool,
}

/// Interval membership of an already-normalized pattern in every rule antecedent.
pub fn matching_degree<T: Scalar>(x: &[T], rb: &RuleBase<T>) -> Result<Vec<MembershipInterval<T>>> {
    if x.len() != rb.num_features() {
        return Err(Error::DimensionMismatch {
            expected: rb.num_features(),
            found: x.len(),
        });
    }
    let prototypes: Vec<&[T]> = rb.prototypes().map(|p| p.center.as_slice()).collect();
    Ok(membership_interval(x, &prototypes, &rb.fuzzifiers))
}

/// Association intervals indexed `[rule][class]`.
pub fn association_degrees<T: Scalar>(
    matching: &[MembershipInterval<T>],
    rb: &RuleBase<T>,
) -> Vec<Vec<AssociationInterval<T>>> {
    matching
        .iter()
        .zip(&rb.rules)
        .map(|(iv, rule)| {
            rule.certainty
                .iter()
                .map(|&r| AssociationInterval {
                    lower: iv.lower * r,
                    upper: iv.upper * r,
                })
                .collect()
        })
        .collect()
}

/// Power mean `((1/s) Σ a^p)^(1/p)` of non-negative values.
///
/// Evaluated relative to the largest value (smallest for `p < 0`) so that large
/// `|p|` neither overflows nor underflows.
pub fn quasiarithmetic_mean<T: Scalar>(values: &[T], p: T) -> Result<T> {
    if values.is_empty() {
        return Err(Error::param("quasiarithmetic mean of an empty list"));
    }
    check_aggregation_p(p)?;
    if let Some(v) = values.iter().find(|v| !(**v >= T::zero() && v.is_finite())) {
        return Err(Error::param(format!(
            "quasiarithmetic mean of invalid value {v}"
        )));
    }
    let pivot = if p > T::zero() {
        values.iter().copied().fold(T::zero(), T::max)
    } else {
        values.iter().copied().fold(T::infinity(), T::min)
    };
    if pivot == T::zero() {
        // p > 0: all values are zero. p < 0: a zero term drives the mean to 0.
        return Ok(T::zero());
    }
    let s = T::from_usize(values.len()).expect("count fits");
    let mean: T = values.iter().map(|&a| (a / pivot).powf(p)).sum::<T>() / s;
    Ok(pivot * mean.powf(p.recip()))
}

/// Soundness interval per class from the `[rule][class]` association matrix.
///
/// A rule contributes to class `j` when its upper association with `j` is
/// positive; classes with no contributing rule get `[0, 0]`.
pub fn soundness<T: Scalar>(
    assoc: &[Vec<AssociationInterval<T>>],
    num_classes: usize,
    p: T,
) -> Result<Vec<SoundnessInterval<T>>> {
    let mut lower = Vec::with_capacity(assoc.len());
    let mut upper = Vec::with_capacity(assoc.len());
    (0..num_classes)
        .map(|j| {
            lower.clear();
            upper.clear();
            for row in assoc {
                let b = row[j];
                if b.upper > T::zero() {
                    lower.push(b.lower);
                    upper.push(b.upper);
                }
            }
            if upper.is_empty() {
                return Ok(SoundnessInterval {
                    lower: T::zero(),
                    upper: T::zero(),
                });
            }
            Ok(SoundnessInterval {
                lower: quasiarithmetic_mean(&lower, p)?,
                upper: quasiarithmetic_mean(&upper, p)?,
            })
        })
        .collect()
}

/// Index of the largest score; the lowest index wins ties.
pub fn argmax_lowest<T: Scalar>(scores: &[T]) -> usize {
    let mut best = 0;
    for (j, &s) in scores.iter().enumerate().skip(1) {
        if s > scores[best] {
            best = j;
        }
    }
    best
}

/// Runs the full reasoning method on an already-normalized pattern.
pub fn classify_normalized<T: Scalar>(
    x: &[T],
    rb: &RuleBase<T>,
) -> Result<ClassificationResult<T>> {
    let matching = matching_degree(x, rb)?;
    let assoc = association_degrees(&matching, rb);
    let soundness = soundness(&assoc, rb.num_classes(), rb.aggregation_p)?;
    let scores: Vec<T> = soundness.iter().map(SoundnessInterval::midpoint).collect();
    let no_evidence = scores.iter().all(|s| *s == T::zero());
    Ok(ClassificationResult {
        predicted: argmax_lowest(&scores),
        soundness,
        scores,
        no_evidence,
    })
}

/// Classifies a pattern given in original feature units.
pub fn classify<T: Scalar>(x: &[T], rb: &RuleBase<T>) -> Result<ClassificationResult<T>> {
    let normalized = rb.normalization.apply(x)?;
    classify_normalized(&normalized, rb)
}

impl<T: Scalar> RuleBase<T> {
    pub fn classify(&self, x: &[T]) -> Result<ClassificationResult<T>> {
        classify(x, self)
    }

    pub fn predict(&self, x: &[T]) -> Result<usize> {
        Ok(classify(x, self)?.predicted)
    }
}
