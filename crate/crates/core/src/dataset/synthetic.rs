use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{default_class_names, Dataset, Pattern};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// The two built-in non-linear problems.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SyntheticKind {
    Circular,
    Irregular,
}

impl SyntheticKind {
    pub fn generate<T: Scalar>(self, seed: u64) -> Dataset<T> {
        match self {
            SyntheticKind::Circular => gen_circular(seed),
            SyntheticKind::Irregular => gen_irregular(seed),
        }
    }
}

impl fmt::Display for SyntheticKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SyntheticKind::Circular => "circular",
            SyntheticKind::Irregular => "irregular",
        })
    }
}

impl FromStr for SyntheticKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "circular" => Ok(SyntheticKind::Circular),
            "irregular" => Ok(SyntheticKind::Irregular),
            other => Err(Error::Config(format!("unknown generator `{other}`"))),
        }
    }
}

pub const CIRCULAR_INNER: usize = 63;
pub const CIRCULAR_OUTER: usize = 123;
pub const CIRCULAR_CENTER: (f64, f64) = (10.0, 10.0);
pub const CIRCULAR_INNER_RADIUS: f64 = 5.0;
pub const CIRCULAR_OUTER_RADIUS: f64 = 7.0;

pub const IRREGULAR_SURROUNDING: usize = 480;
pub const IRREGULAR_BLOB: usize = 383;

fn assemble<T: Scalar>(classes: [Vec<(f64, f64)>; 2]) -> Dataset<T> {
    let patterns = classes
        .into_iter()
        .enumerate()
        .flat_map(|(label, pts)| {
            pts.into_iter()
                .map(move |(x, y)| Pattern::labeled(vec![T::lit(x), T::lit(y)], label))
        })
        .collect();
    Dataset::new(2, default_class_names(2), patterns).expect("generated dataset is valid")
}

/// A disk of 63 class-1 points (radius < 5 around (10, 10)) surrounded by 123
/// class-2 points (radius > 7), all drawn uniformly from `[0, 20]²`. Draws in
/// the annulus between the radii, or beyond a class's quota, are discarded.
///
/// Patterns are emitted class by class so that label order survives a CSV
/// round trip.
pub fn gen_circular<T: Scalar>(seed: u64) -> Dataset<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut inner = Vec::with_capacity(CIRCULAR_INNER);
    let mut outer = Vec::with_capacity(CIRCULAR_OUTER);
    while inner.len() < CIRCULAR_INNER || outer.len() < CIRCULAR_OUTER {
        let x: f64 = rng.random_range(0.0..=20.0);
        let y: f64 = rng.random_range(0.0..=20.0);
        let d = (x - CIRCULAR_CENTER.0).hypot(y - CIRCULAR_CENTER.1);
        if d < CIRCULAR_INNER_RADIUS {
            if inner.len() < CIRCULAR_INNER {
                inner.push((x, y));
            }
        } else if d > CIRCULAR_OUTER_RADIUS && outer.len() < CIRCULAR_OUTER {
            outer.push((x, y));
        }
    }
    assemble([inner, outer])
}

/// Axis-aligned ellipses `(cx, cy, rx, ry)` whose union is the class-2 blob.
pub const IRREGULAR_LOBES: [(f64, f64, f64, f64); 4] = [
    (5.5, 7.0, 3.0, 1.8),
    (9.5, 10.0, 2.0, 3.4),
    (13.5, 12.5, 3.2, 2.0),
    (14.0, 6.5, 1.6, 2.2),
];

/// Clearance between the blob and the surrounding class, in lobe-radius units.
pub const IRREGULAR_GAP: f64 = 1.2;

/// Inside the lobe union, each lobe grown by `grow` along both radii.
pub fn in_irregular_blob(x: f64, y: f64, grow: f64) -> bool {
    IRREGULAR_LOBES.iter().any(|&(cx, cy, rx, ry)| {
        let u = (x - cx) / (rx + grow);
        let v = (y - cy) / (ry + grow);
        u * u + v * v <= 1.0
    })
}

/// 863 points in `[0, 20]²`: 383 class-2 points fill an elongated blob made of
/// four overlapping ellipses, and 480 class-1 points surround it outside a
/// clearance band. The surrounding class is denser left of `x = 10` than right
/// of it.
pub fn gen_irregular<T: Scalar>(seed: u64) -> Dataset<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut blob = Vec::with_capacity(IRREGULAR_BLOB);
    while blob.len() < IRREGULAR_BLOB {
        let x: f64 = rng.random_range(0.0..=20.0);
        let y: f64 = rng.random_range(0.0..=20.0);
        if in_irregular_blob(x, y, 0.0) {
            blob.push((x, y));
        }
    }
    let mut surround = Vec::with_capacity(IRREGULAR_SURROUNDING);
    while surround.len() < IRREGULAR_SURROUNDING {
        let x: f64 = rng.random_range(0.0..=20.0);
        let y: f64 = rng.random_range(0.0..=20.0);
        if in_irregular_blob(x, y, IRREGULAR_GAP) {
            continue;
        }
        let keep = if x < 10.0 { 1.0 } else { 0.4 };
        if rng.random::<f64>() < keep {
            surround.push((x, y));
        }
    }
    assemble([surround, blob])
}
