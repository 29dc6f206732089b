use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::Dataset;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitSpec {
    pub train_fraction: f64,
    pub seed: u64,
    pub stratified: bool,
}

impl SplitSpec {
    pub fn new(train_fraction: f64, seed: u64, stratified: bool) -> Result<Self> {
        let spec = Self {
            train_fraction,
            seed,
            stratified,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return Err(Error::param(format!(
                "train fraction must lie in (0, 1), got {}",
                self.train_fraction
            )));
        }
        Ok(())
    }
}

/// Number of training patterns for `n` patterns, kept inside `[1, n-1]`.
fn train_size(n: usize, fraction: f64) -> usize {
    ((n as f64 * fraction).round() as usize).clamp(1, n - 1)
}

/// Shuffles `ds` with a seeded generator and splits it into `(train, test)`.
///
/// The stratified mode allocates per-class training counts by largest
/// remainder so the total still matches the requested fraction, and fails if
/// any class would end up absent from the training part.
pub fn split<T: Scalar>(ds: &Dataset<T>, spec: &SplitSpec) -> Result<(Dataset<T>, Dataset<T>)> {
    spec.validate()?;
    let n = ds.len();
    if n < 2 {
        return Err(Error::InvalidData(format!("cannot split {n} pattern(s)")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let n_train = train_size(n, spec.train_fraction);

    let (train_idx, test_idx) = if spec.stratified {
        let m = ds.num_classes();
        let mut by_class: Vec<Vec<usize>> = vec![Vec::new(); m];
        for (i, p) in ds.patterns().iter().enumerate() {
            let label = p.label.ok_or(Error::Unlabeled(i))?;
            by_class[label].push(i);
        }
        let quotas: Vec<f64> = by_class
            .iter()
            .map(|c| c.len() as f64 * spec.train_fraction)
            .collect();
        let mut take: Vec<usize> = quotas.iter().map(|q| q.floor() as usize).collect();
        let mut order: Vec<usize> = (0..m).collect();
        // Largest fractional part first, lowest class index on ties.
        order.sort_by(|&a, &b| {
            let fa = quotas[a] - quotas[a].floor();
            let fb = quotas[b] - quotas[b].floor();
            fb.total_cmp(&fa).then(a.cmp(&b))
        });
        let mut remaining = n_train.saturating_sub(take.iter().sum());
        for &j in order.iter().cycle().take(m * 2) {
            if remaining == 0 {
                break;
            }
            if take[j] < by_class[j].len() {
                take[j] += 1;
                remaining -= 1;
            }
        }
        let mut train = Vec::with_capacity(n_train);
        let mut test = Vec::with_capacity(n - n_train);
        for (j, members) in by_class.iter_mut().enumerate() {
            if take[j] == 0 {
                return Err(Error::EmptyClass(ds.class_names()[j].clone()));
            }
            members.shuffle(&mut rng);
            train.extend_from_slice(&members[..take[j]]);
            test.extend_from_slice(&members[take[j]..]);
        }
        (train, test)
    } else {
        let mut idx: Vec<usize> = (0..n).collect();
        idx.shuffle(&mut rng);
        let test = idx.split_off(n_train);
        (idx, test)
    };

    let pick =
        |idx: &[usize]| ds.with_patterns(idx.iter().map(|&i| ds.patterns()[i].clone()).collect());
    Ok((pick(&train_idx), pick(&test_idx)))
}
