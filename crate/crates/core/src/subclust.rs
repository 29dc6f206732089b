//! Subtractive clustering.
//!
//! Every point starts with a potential equal to the sum of Gaussian kernels of
//! its squared distances to all points. The highest-potential point becomes a
//! center, potentials are reduced around it with a wider kernel, and the loop
//! repeats until the remaining potential is too small relative to the first
//! center's.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{distance, squared_distance, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct SubclustParams<T> {
    /// Neighborhood radius `r_a`.
    pub radius: T,
    /// `r_b / r_a`.
    pub squash_ratio: T,
    /// Candidates at or above this fraction of the first potential are accepted outright.
    pub accept_ratio: T,
    /// Candidates below this fraction of the first potential end the search.
    pub reject_ratio: T,
    /// Upper bound on the number of centers; `None` means the number of points.
    pub max_centers: Option<usize>,
}

impl<T: Scalar> SubclustParams<T> {
    pub fn new(radius: T) -> Result<Self> {
        let params = Self {
            radius,
            squash_ratio: T::lit(1.25),
            accept_ratio: T::lit(0.5),
            reject_ratio: T::lit(0.15),
            max_centers: None,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.radius.is_finite() && self.radius > T::zero()) {
            return Err(Error::param(format!(
                "r_a must be positive, got {}",
                self.radius
            )));
        }
        if !(self.squash_ratio.is_finite() && self.squash_ratio > T::zero()) {
            return Err(Error::param(format!(
                "r_b ratio must be positive, got {}",
                self.squash_ratio
            )));
        }
        if !(self.accept_ratio > T::zero() && self.accept_ratio <= T::one()) {
            return Err(Error::param(format!(
                "accept ratio must lie in (0, 1], got {}",
                self.accept_ratio
            )));
        }
        if !(self.reject_ratio >= T::zero() && self.reject_ratio < T::one()) {
            return Err(Error::param(format!(
                "reject ratio must lie in [0, 1), got {}",
                self.reject_ratio
            )));
        }
        if self.reject_ratio >= self.accept_ratio {
            return Err(Error::param(format!(
                "reject ratio {} must be below accept ratio {}",
                self.reject_ratio, self.accept_ratio
            )));
        }
        if self.max_centers == Some(0) {
            return Err(Error::param("max centers must be at least 1"));
        }
        Ok(())
    }

    /// `4 / r_a²`
    pub fn alpha(&self) -> T {
        T::lit(4.0) / (self.radius * self.radius)
    }

    /// `4 / r_b²` with `r_b = squash_ratio · r_a`
    pub fn beta(&self) -> T {
        let rb = self.squash_ratio * self.radius;
        T::lit(4.0) / (rb * rb)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PotentialField<T> {
    potentials: Vec<T>,
}

impl<T: Scalar> PotentialField<T> {
    pub fn potentials(&self) -> &[T] {
        &self.potentials
    }

    pub fn len(&self) -> usize {
        self.potentials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.potentials.is_empty()
    }

    /// Index of the largest potential; the lowest index wins ties.
    pub fn argmax(&self) -> Option<usize> {
        let mut best: Option<usize> = None;
        for (i, &p) in self.potentials.iter().enumerate() {
            if best.is_none_or(|b| p > self.potentials[b]) {
                best = Some(i);
            }
        }
        best
    }
}

fn check_points<T: Scalar, P: AsRef<[T]>>(points: &[P]) -> Result<usize> {
    let dim = points.first().ok_or(Error::EmptyDataset)?.as_ref().len();
    for p in points {
        if p.as_ref().len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: p.as_ref().len(),
            });
        }
    }
    Ok(dim)
}

/// `P_i = Σ_j exp(-α‖x_i - x_j‖²)`, including the self term.
pub fn initial_potentials<T: Scalar, P: AsRef<[T]>>(
    points: &[P],
    params: &SubclustParams<T>,
) -> Result<PotentialField<T>> {
    check_points(points)?;
    let alpha = params.alpha();
    let potentials = points
        .iter()
        .map(|xi| {
            points
                .iter()
                .map(|xj| (-alpha * squared_distance(xi.as_ref(), xj.as_ref())).exp())
                .sum()
        })
        .collect();
    Ok(PotentialField { potentials })
}

/// `P_i ← P_i - P*·exp(-β‖x_i - x*‖²)` around the point at `center`.
pub fn revise_potentials<T: Scalar, P: AsRef<[T]>>(
    field: &mut PotentialField<T>,
    points: &[P],
    center: usize,
    params: &SubclustParams<T>,
) {
    debug_assert_eq!(field.len(), points.len());
    let beta = params.beta();
    let peak = field.potentials[center];
    let c = points[center].as_ref();
    for (p, x) in field.potentials.iter_mut().zip(points) {
        *p = *p - peak * (-beta * squared_distance(x.as_ref(), c)).exp();
    }
}

/// Indices of the selected centers, in selection order.
pub fn subtractive_cluster_indices<T: Scalar, P: AsRef<[T]>>(
    points: &[P],
    params: &SubclustParams<T>,
) -> Result<Vec<usize>> {
    params.validate()?;
    let mut field = initial_potentials(points, params)?;
    let cap = params.max_centers.unwrap_or(points.len());

    let first = field.argmax().expect("non-empty");
    let first_potential = field.potentials[first];
    let mut centers = vec![first];
    revise_potentials(&mut field, points, first, params);

    while centers.len() < cap {
        let k = field.argmax().expect("non-empty");
        let pk = field.potentials[k];
        if pk <= T::zero() || pk < params.reject_ratio * first_potential {
            break;
        }
        let ratio = pk / first_potential;
        let accepted = ratio >= params.accept_ratio || {
            let d_min = centers
                .iter()
                .map(|&c| distance(points[k].as_ref(), points[c].as_ref()))
                .fold(T::infinity(), T::min);
            d_min / params.radius + ratio >= T::one()
        };
        if accepted {
            centers.push(k);
            revise_potentials(&mut field, points, k, params);
        } else {
            field.potentials[k] = T::zero();
        }
    }
    Ok(centers)
}

/// Cluster centers (copies of input points) found by subtractive clustering.
pub fn subtractive_cluster<T: Scalar, P: AsRef<[T]>>(
    points: &[P],
    params: &SubclustParams<T>,
) -> Result<Vec<Vec<T>>> {
    Ok(subtractive_cluster_indices(points, params)?
        .into_iter()
        .map(|i| points[i].as_ref().to_vec())
        .collect())
}
