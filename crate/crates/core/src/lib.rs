//! Interval type-2 fuzzy rule-based classification with cluster-based class
//! representation.
//!
//! Each class of the training data is summarised by one or more prototypes
//! (found by subtractive clustering, or the plain class mean). Every prototype
//! becomes a rule `IF x is Ã_k THEN (r_1^k, ..., r_M^k)` whose antecedent is an
//! interval type-2 fuzzy set built from two fuzzifiers. Classification runs the
//! interval fuzzy reasoning method: matching, association, quasiarithmetic
//! aggregation and a midpoint decision.
//!
//! All numeric code is generic over [`Scalar`] (`f32` or `f64`); the aliases at
//! the bottom of this file fix the common `f64` instantiation.

pub mod dataset;
pub mod error;
pub mod evaluation;
pub mod inference;
pub mod rulebase;
pub mod scalar;
pub mod subclust;

pub use dataset::{Dataset, MissingPolicy, NormalizationParams, Pattern, SplitSpec, SyntheticKind};
pub use error::{Error, ErrorKind, Result};
pub use evaluation::{
    ConfusionMatrix, DataSource, ExperimentConfig, ExperimentReport, ReportFormat,
};
pub use inference::{AssociationInterval, ClassificationResult, SoundnessInterval};
pub use rulebase::{
    ClusterPrototype, Fuzzifiers, MembershipInterval, PrototypeSelection, Rule, RuleBase,
};
pub use scalar::Scalar;
pub use subclust::{PotentialField, SubclustParams};

pub type Pattern64 = Pattern<f64>;
pub type Dataset64 = Dataset<f64>;
pub type NormalizationParams64 = NormalizationParams<f64>;
pub type SubclustParams64 = SubclustParams<f64>;
pub type Fuzzifiers64 = Fuzzifiers<f64>;
pub type RuleBase64 = RuleBase<f64>;
pub type ExperimentConfig64 = ExperimentConfig<f64>;

pub type Dataset32 = Dataset<f32>;
pub type RuleBase32 = RuleBase<f32>;
