//! Dissimilarity measures between feature vectors.
//!
//! Two geometric measures apply to arbitrary equal-dimension vectors:
//!
//! * `Euclidean`        sqrt(sum_d (a_d - b_d)^2)
//! * `SquaredEuclidean` sum_d (a_d - b_d)^2
//!
//! Three probabilistic measures are defined on distributions only and
//! reject operands that do not lie on the simplex:
//!
//! * `KullbackLeibler`  sum_d a_d ln(a_d / b_d), natural log, asymmetric
//! * `ChiSquared`       sum_d (a_d - b_d)^2 / b_d  (Pearson form, asymmetric)
//! * `JensenShannon`    (KL(a:m) + KL(b:m)) / 2 with m = (a+b)/2, symmetric
//!   and bounded by ln 2
//!
//! Zero components contribute `0 ln 0 = 0` to a KL numerator; a zero in a
//! denominator position yields `+inf`. Projecting inputs through
//! [`l1_normalize_to_prob`](crate::feature::l1_normalize_to_prob) with a
//! positive floor avoids both cases.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::feature::{FeatureVector, ProbVector, SIMPLEX_SUM_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DissimilarityKind {
    Euclidean,
    SquaredEuclidean,
    KullbackLeibler,
    ChiSquared,
    JensenShannon,
}

impl DissimilarityKind {
    pub const ALL: [DissimilarityKind; 5] = [
        DissimilarityKind::Euclidean,
        DissimilarityKind::SquaredEuclidean,
        DissimilarityKind::KullbackLeibler,
        DissimilarityKind::ChiSquared,
        DissimilarityKind::JensenShannon,
    ];

    /// Kinds that require both operands to be probability distributions.
    pub fn is_probabilistic(self) -> bool {
        !matches!(
            self,
            DissimilarityKind::Euclidean | DissimilarityKind::SquaredEuclidean
        )
    }

    /// Evaluates the measure without dimension or domain checks.
    /// Callers validate operands once and may then loop over many pairs.
    pub(crate) fn eval_raw(self, a: &[f64], b: &[f64]) -> f64 {
        match self {
            DissimilarityKind::Euclidean => squared_euclidean_raw(a, b).sqrt(),
            DissimilarityKind::SquaredEuclidean => squared_euclidean_raw(a, b),
            DissimilarityKind::KullbackLeibler => kl_raw(a, b),
            DissimilarityKind::ChiSquared => chi_squared_raw(a, b),
            DissimilarityKind::JensenShannon => jensen_shannon_raw(a, b),
        }
    }
}

impl fmt::Display for DissimilarityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let token = match self {
            DissimilarityKind::Euclidean => "euclid",
            DissimilarityKind::SquaredEuclidean => "sq-euclid",
            DissimilarityKind::KullbackLeibler => "kl",
            DissimilarityKind::ChiSquared => "chi2",
            DissimilarityKind::JensenShannon => "js",
        };
        f.write_str(token)
    }
}

impl FromStr for DissimilarityKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "euclid" => Ok(DissimilarityKind::Euclidean),
            "sq-euclid" => Ok(DissimilarityKind::SquaredEuclidean),
            "kl" => Ok(DissimilarityKind::KullbackLeibler),
            "chi2" => Ok(DissimilarityKind::ChiSquared),
            "js" => Ok(DissimilarityKind::JensenShannon),
            other => Err(Error::InvalidConfig(format!(
                "unknown dissimilarity {other:?}, expected one of euclid, sq-euclid, kl, chi2, js"
            ))),
        }
    }
}

fn squared_euclidean_raw(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let d = x - y;
            d * d
        })
        .sum()
}

fn kl_raw(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .filter(|(x, _)| **x > 0.0)
        .map(|(x, y)| x * (x / y).ln())
        .sum()
}

fn chi_squared_raw(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let d = x - y;
            if d == 0.0 {
                0.0
            } else {
                d * d / y
            }
        })
        .sum()
}

fn jensen_shannon_raw(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (x, y) in a.iter().zip(b) {
        let m = 0.5 * (x + y);
        let tx = if *x > 0.0 { 0.5 * x * (x / m).ln() } else { 0.0 };
        let ty = if *y > 0.0 { 0.5 * y * (y / m).ln() } else { 0.0 };
        // One commutative addition per component keeps the result bitwise
        // symmetric in its arguments.
        acc += tx + ty;
    }
    acc
}

/// Checks that `v` is usable as a distribution for a probabilistic kind.
pub(crate) fn check_prob_domain(kind: DissimilarityKind, v: &FeatureVector) -> Result<()> {
    if !kind.is_probabilistic() {
        return Ok(());
    }
    if v.values().iter().any(|&x| x < 0.0) {
        return Err(Error::DomainMismatch(format!(
            "{kind} requires probability vectors, got a negative component"
        )));
    }
    let sum: f64 = v.values().iter().sum();
    if (sum - 1.0).abs() > SIMPLEX_SUM_TOL {
        return Err(Error::DomainMismatch(format!(
            "{kind} requires probability vectors, got component sum {sum}"
        )));
    }
    Ok(())
}

/// Evaluates `kind` on a validated pair of vectors.
pub fn dissimilarity(kind: DissimilarityKind, a: &FeatureVector, b: &FeatureVector) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            got: b.dim(),
        });
    }
    check_prob_domain(kind, a)?;
    check_prob_domain(kind, b)?;
    Ok(kind.eval_raw(a.values(), b.values()))
}

/// KL divergence of `p` from `q` in nats. Asymmetric: the first argument
/// weights the log-ratios.
pub fn kl_divergence(p: &ProbVector, q: &ProbVector) -> Result<f64> {
    check_dims(p, q)?;
    Ok(kl_raw(p.values(), q.values()))
}

/// Pearson chi-squared divergence of `p` from `q`; the second argument is
/// the reference distribution in the denominator.
pub fn chi_squared(p: &ProbVector, q: &ProbVector) -> Result<f64> {
    check_dims(p, q)?;
    Ok(chi_squared_raw(p.values(), q.values()))
}

/// Jensen-Shannon divergence; symmetric and at most ln 2.
pub fn jensen_shannon(p: &ProbVector, q: &ProbVector) -> Result<f64> {
    check_dims(p, q)?;
    Ok(jensen_shannon_raw(p.values(), q.values()))
}

fn check_dims(p: &ProbVector, q: &ProbVector) -> Result<()> {
    if p.dim() != q.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            got: q.dim(),
        });
    }
    Ok(())
}
