use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{squared_distance, Scalar};

/// Lower and upper fuzzifier of the interval membership.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct Fuzzifiers<T> {
    pub m1: T,
    pub m2: T,
}

impl<T: Scalar> Fuzzifiers<T> {
    /// `m1 == m2` is allowed and yields a type-1 (zero-width) membership.
    pub fn new(m1: T, m2: T) -> Result<Self> {
        let fz = Self { m1, m2 };
        fz.validate()?;
        Ok(fz)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, m) in [("m1", self.m1), ("m2", self.m2)] {
            if !(m.is_finite() && m > T::one()) {
                return Err(Error::param(format!(
                    "fuzzifier {name} must be finite and > 1, got {m}"
                )));
            }
        }
        if self.m1 > self.m2 {
            return Err(Error::param(format!(
                "lower fuzzifier m1 = {} exceeds upper fuzzifier m2 = {}",
                self.m1, self.m2
            )));
        }
        Ok(())
    }
}

impl Default for Fuzzifiers<f64> {
    fn default() -> Self {
        Self { m1: 1.5, m2: 2.5 }
    }
}

impl Default for Fuzzifiers<f32> {
    fn default() -> Self {
        Self { m1: 1.5, m2: 2.5 }
    }
}

/// Primary membership interval `[lower, upper]` of one pattern to one cluster.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct MembershipInterval<T> {
    pub lower: T,
    pub upper: T,
}

impl<T: Scalar> MembershipInterval<T> {
    pub fn new(a: T, b: T) -> Self {
        Self {
            lower: a.min(b),
            upper: a.max(b),
        }
    }

    pub fn width(&self) -> T {
        self.upper - self.lower
    }

    pub fn midpoint(&self) -> T {
        (self.lower + self.upper) / T::lit(2.0)
    }
}

/// Fuzzy-partition memberships of `x` to each prototype at fuzzifier `m`:
/// `μ_k = 1 / Σ_q (d_k / d_q)^(2/(m-1))`.
///
/// If `x` sits exactly on `t` prototypes, each of them gets `1/t` and the rest 0.
pub fn memberships_single_fuzzifier<T: Scalar, P: AsRef<[T]>>(
    x: &[T],
    prototypes: &[P],
    m: T,
) -> Vec<T> {
    let sq: Vec<T> = prototypes
        .iter()
        .map(|p| squared_distance(x, p.as_ref()))
        .collect();
    let coincident = sq.iter().filter(|d| **d == T::zero()).count();
    if coincident > 0 {
        let share = T::one() / T::from_usize(coincident).expect("count fits");
        return sq
            .iter()
            .map(|d| if *d == T::zero() { share } else { T::zero() })
            .collect();
    }
    // (d_min/d_q)^(2/(m-1)) = (d²_min/d²_q)^(1/(m-1)) ∈ (0, 1]; normalizing these
    // weights is the same ratio sum without overflow for tiny distances.
    let exponent = T::one() / (m - T::one());
    let nearest = sq.iter().copied().fold(T::infinity(), T::min);
    let weights: Vec<T> = sq.iter().map(|&d| (nearest / d).powf(exponent)).collect();
    let total: T = weights.iter().copied().sum();
    weights.into_iter().map(|w| w / total).collect()
}

/// Interval memberships: per cluster, the min and max of the two
/// single-fuzzifier memberships.
pub fn membership_interval<T: Scalar, P: AsRef<[T]>>(
    x: &[T],
    prototypes: &[P],
    fz: &Fuzzifiers<T>,
) -> Vec<MembershipInterval<T>> {
    let a = memberships_single_fuzzifier(x, prototypes, fz.m1);
    if fz.m1 == fz.m2 {
        return a
            .into_iter()
            .map(|v| MembershipInterval { lower: v, upper: v })
            .collect();
    }
    let b = memberships_single_fuzzifier(x, prototypes, fz.m2);
    a.into_iter()
        .zip(b)
        .map(|(u, v)| MembershipInterval::new(u, v))
        .collect()
}
