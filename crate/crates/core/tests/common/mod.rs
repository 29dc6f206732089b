#![allow(dead_code, clippy::needless_range_loop)]

use std::path::PathBuf;

use it2frbc::{ClusterPrototype, Fuzzifiers, NormalizationParams, Rule, RuleBase};

pub fn data_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("data")
        .join(name)
}

/// Straight-line evaluation of the interval reasoning method, written directly
/// from the formulas and sharing no code with the library:
///
/// * `μ_k^m = 1 / Σ_q (d_k/d_q)^(2/(m-1))` with plain Euclidean distances
/// * `[min(μ^m1, μ^m2), max(μ^m1, μ^m2)]` per rule
/// * `b_j^k = [lower·r_j^k, upper·r_j^k]`
/// * `Y_j = [f_Q(lower b), f_Q(upper b)]` over rules with upper `b > 0`,
///   `f_Q(a) = ((1/s) Σ a^p)^(1/p)`
/// * score `(Y_jl + Y_jr)/2`
///
/// Probes must not coincide with a prototype.
pub struct OracleOutput {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub soundness: Vec<(f64, f64)>,
    pub scores: Vec<f64>,
}

pub fn oracle_classify(
    x: &[f64],
    centers: &[Vec<f64>],
    certainty: &[Vec<f64>],
    m1: f64,
    m2: f64,
    p: f64,
) -> OracleOutput {
    let c = centers.len();
    let mut d = vec![0.0; c];
    for k in 0..c {
        let mut s = 0.0;
        for i in 0..x.len() {
            s += (x[i] - centers[k][i]) * (x[i] - centers[k][i]);
        }
        d[k] = s.sqrt();
    }
    let memb = |m: f64| -> Vec<f64> {
        let mut out = vec![0.0; c];
        for k in 0..c {
            let mut denom = 0.0;
            for q in 0..c {
                denom += (d[k] / d[q]).powf(2.0 / (m - 1.0));
            }
            out[k] = 1.0 / denom;
        }
        out
    };
    let mu1 = memb(m1);
    let mu2 = memb(m2);
    let mut lower = vec![0.0; c];
    let mut upper = vec![0.0; c];
    for k in 0..c {
        lower[k] = if mu1[k] < mu2[k] { mu1[k] } else { mu2[k] };
        upper[k] = if mu1[k] > mu2[k] { mu1[k] } else { mu2[k] };
    }
    let m = certainty[0].len();
    let mut soundness = Vec::new();
    let mut scores = Vec::new();
    for j in 0..m {
        let mut lo = Vec::new();
        let mut hi = Vec::new();
        for k in 0..c {
            let bl = lower[k] * certainty[k][j];
            let br = upper[k] * certainty[k][j];
            if br > 0.0 {
                lo.push(bl);
                hi.push(br);
            }
        }
        let fq = |a: &[f64]| -> f64 {
            let mut s = 0.0;
            for v in a {
                s += v.powf(p);
            }
            (s / a.len() as f64).powf(1.0 / p)
        };
        let y = if hi.is_empty() {
            (0.0, 0.0)
        } else {
            (fq(&lo), fq(&hi))
        };
        soundness.push(y);
        scores.push((y.0 + y.1) / 2.0);
    }
    OracleOutput {
        lower,
        upper,
        soundness,
        scores,
    }
}

/// Plain-loop subtractive clustering used to cross-check the library on small
/// inputs: potentials from the Gaussian sum, argmax with lowest index, accept
/// / reject / gray-zone test against the first potential.
pub fn oracle_subclust(points: &[Vec<f64>], ra: f64, accept: f64, reject: f64) -> Vec<usize> {
    let n = points.len();
    let alpha = 4.0 / (ra * ra);
    let rb = 1.25 * ra;
    let beta = 4.0 / (rb * rb);
    let d2 =
        |a: &[f64], b: &[f64]| -> f64 { a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum() };
    let mut pot: Vec<f64> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (-alpha * d2(&points[i], &points[j])).exp())
                .sum()
        })
        .collect();
    let argmax = |pot: &[f64]| -> usize {
        let mut b = 0;
        for i in 1..pot.len() {
            if pot[i] > pot[b] {
                b = i;
            }
        }
        b
    };
    let first = argmax(&pot);
    let p1 = pot[first];
    let mut centers = vec![first];
    let revise = |pot: &mut Vec<f64>, k: usize| {
        let pk = pot[k];
        for i in 0..n {
            pot[i] -= pk * (-beta * d2(&points[i], &points[k])).exp();
        }
    };
    revise(&mut pot, first);
    while centers.len() < n {
        let k = argmax(&pot);
        let pk = pot[k];
        if pk <= 0.0 || pk < reject * p1 {
            break;
        }
        let ok = if pk >= accept * p1 {
            true
        } else {
            let dmin = centers
                .iter()
                .map(|&c| d2(&points[k], &points[c]).sqrt())
                .fold(f64::INFINITY, f64::min);
            dmin / ra + pk / p1 >= 1.0
        };
        if ok {
            centers.push(k);
            revise(&mut pot, k);
        } else {
            pot[k] = 0.0;
        }
    }
    centers
}

/// Rule base over `[0, 1]^N` with the given prototypes and certainty rows.
/// Rule k is attributed to the class with its largest certainty.
pub fn make_rulebase(
    centers: &[Vec<f64>],
    certainty: &[Vec<f64>],
    m1: f64,
    m2: f64,
    p: f64,
) -> RuleBase<f64> {
    let m = certainty[0].len();
    let rules = centers
        .iter()
        .zip(certainty)
        .map(|(c, r)| {
            let source_class = (0..m).fold(0, |b, j| if r[j] > r[b] { j } else { b });
            Rule {
                antecedent: ClusterPrototype {
                    center: c.clone(),
                    source_class,
                },
                certainty: r.clone(),
            }
        })
        .collect();
    let rb = RuleBase {
        rules,
        fuzzifiers: Fuzzifiers::new(m1, m2).unwrap(),
        normalization: NormalizationParams::unit(centers[0].len()),
        class_names: (1..=m).map(|j| j.to_string()).collect(),
        aggregation_p: p,
    };
    rb.validate().unwrap();
    rb
}

/// Normalizes a non-negative row to sum 1; an all-zero row becomes uniform.
pub fn to_simplex(row: &[f64]) -> Vec<f64> {
    let total: f64 = row.iter().sum();
    if total > 0.0 {
        row.iter().map(|v| v / total).collect()
    } else {
        vec![1.0 / row.len() as f64; row.len()]
    }
}
