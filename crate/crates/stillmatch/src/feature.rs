//! Feature vectors, probability vectors, and probe sequences.
//!
//! Nothing here normalizes implicitly. A raw descriptor becomes unit-length
//! via [`l2_normalize`] or a probability distribution via
//! [`l1_normalize_to_prob`], and callers decide whether to apply one, both,
//! or neither before building a gallery. The distance layer rejects vectors
//! outside the domain a dissimilarity expects, so skipping the right
//! normalization fails loudly rather than silently skewing scores.

use crate::error::{Error, Result};

/// Default floor for simplex projection. Keeps every component strictly
/// positive so logarithm- and ratio-based dissimilarities stay finite.
pub const DEFAULT_PROB_FLOOR: f64 = 1e-10;

/// Tolerance on `|sum - 1|` for a vector to count as a distribution.
pub const SIMPLEX_SUM_TOL: f64 = 1e-9;

/// Dense feature vector: at least two components, all finite.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector(Vec<f64>);

impl FeatureVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::TooFewComponents(values.len()));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NotFinite(i));
        }
        Ok(Self(values))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn into_values(self) -> Vec<f64> {
        self.0
    }
}

/// Probability vector: nonnegative components summing to one within
/// [`SIMPLEX_SUM_TOL`]. Produced by [`l1_normalize_to_prob`], which with a
/// positive floor also guarantees strictly positive components.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbVector(FeatureVector);

impl ProbVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        let inner = FeatureVector::new(values)?;
        if let Some(i) = inner.values().iter().position(|&v| v < 0.0) {
            return Err(Error::NegativeFeature(i));
        }
        let sum: f64 = inner.values().iter().sum();
        if (sum - 1.0).abs() > SIMPLEX_SUM_TOL {
            return Err(Error::DomainMismatch(format!(
                "component sum {sum} is not a probability distribution"
            )));
        }
        Ok(Self(inner))
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn values(&self) -> &[f64] {
        self.0.values()
    }

    pub fn as_feature(&self) -> &FeatureVector {
        &self.0
    }

    pub fn into_feature(self) -> FeatureVector {
        self.0
    }
}

/// Scales `v` to unit Euclidean length.
///
/// Idempotent up to rounding: renormalizing an already unit-length vector
/// moves components by less than 1e-12.
pub fn l2_normalize(v: &FeatureVector) -> Result<FeatureVector> {
    let norm = v.values().iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err(Error::ZeroVector);
    }
    FeatureVector::new(v.values().iter().map(|x| x / norm).collect())
}

/// Projects a nonnegative vector onto the probability simplex: floors every
/// component at `floor`, then rescales to unit sum.
///
/// Rejects negative components rather than clamping them; a negative value
/// means the caller fed a descriptor that was never count-like.
pub fn l1_normalize_to_prob(v: &FeatureVector, floor: f64) -> Result<ProbVector> {
    if let Some(i) = v.values().iter().position(|&x| x < 0.0) {
        return Err(Error::NegativeFeature(i));
    }
    let floored: Vec<f64> = v.values().iter().map(|&x| x.max(floor)).collect();
    let sum: f64 = floored.iter().sum();
    if sum == 0.0 {
        return Err(Error::ZeroVector);
    }
    ProbVector::new(floored.iter().map(|x| x / sum).collect())
}

/// Ordered frames of one probe: nonempty, all the same dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeSequence {
    frames: Vec<FeatureVector>,
}

impl ProbeSequence {
    pub fn new(frames: Vec<FeatureVector>) -> Result<Self> {
        let first = frames.first().ok_or(Error::EmptyProbe)?;
        let dim = first.dim();
        for f in &frames {
            if f.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: f.dim(),
                });
            }
        }
        Ok(Self { frames })
    }

    pub fn from_prob_frames(frames: Vec<ProbVector>) -> Result<Self> {
        Self::new(frames.into_iter().map(ProbVector::into_feature).collect())
    }

    pub fn frames(&self) -> &[FeatureVector] {
        &self.frames
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.frames[0].dim()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn fv(values: &[f64]) -> FeatureVector {
        FeatureVector::new(values.to_vec()).unwrap()
    }

    #[test]
    fn l2_known_value() {
        let out = l2_normalize(&fv(&[3.0, 4.0])).unwrap();
        assert_eq!(out.values(), &[0.6, 0.8]);
    }

    #[test]
    fn l2_zero_vector_rejected() {
        assert!(matches!(
            l2_normalize(&fv(&[0.0, 0.0])),
            Err(Error::ZeroVector)
        ));
    }

    #[test]
    fn l1_known_value() {
        let out = l1_normalize_to_prob(&fv(&[1.0, 1.0, 2.0]), 0.0).unwrap();
        assert_eq!(out.values(), &[0.25, 0.25, 0.5]);
    }

    #[test]
    fn l1_rejects_negative_component() {
        assert!(matches!(
            l1_normalize_to_prob(&fv(&[0.5, -0.1]), 0.0),
            Err(Error::NegativeFeature(1))
        ));
    }

    #[test]
    fn l1_zero_vector_with_zero_floor_rejected() {
        assert!(matches!(
            l1_normalize_to_prob(&fv(&[0.0, 0.0]), 0.0),
            Err(Error::ZeroVector)
        ));
    }

    #[test]
    fn l1_default_floor_keeps_components_positive() {
        let out = l1_normalize_to_prob(&fv(&[1.0, 0.0]), DEFAULT_PROB_FLOOR).unwrap();
        assert!(out.values().iter().all(|&x| x > 0.0));
        assert!((out.values().iter().sum::<f64>() - 1.0).abs() <= SIMPLEX_SUM_TOL);
    }

    #[test]
    fn feature_vector_validation() {
        assert!(matches!(
            FeatureVector::new(vec![1.0]),
            Err(Error::TooFewComponents(1))
        ));
        assert!(matches!(
            FeatureVector::new(vec![1.0, f64::NAN]),
            Err(Error::NotFinite(1))
        ));
        assert!(matches!(
            FeatureVector::new(vec![1.0, f64::INFINITY]),
            Err(Error::NotFinite(1))
        ));
    }

    #[test]
    fn prob_vector_validation() {
        assert!(ProbVector::new(vec![0.25, 0.75]).is_ok());
        assert!(matches!(
            ProbVector::new(vec![0.5, 0.6]),
            Err(Error::DomainMismatch(_))
        ));
        assert!(matches!(
            ProbVector::new(vec![-0.1, 1.1]),
            Err(Error::NegativeFeature(0))
        ));
    }

    #[test]
    fn probe_sequence_validation() {
        assert!(matches!(ProbeSequence::new(vec![]), Err(Error::EmptyProbe)));
        let err = ProbeSequence::new(vec![fv(&[1.0, 2.0]), fv(&[1.0, 2.0, 3.0])]);
        assert!(matches!(
            err,
            Err(Error::DimensionMismatch {
                expected: 2,
                got: 3
            })
        ));
        let ok = ProbeSequence::new(vec![fv(&[1.0, 2.0]), fv(&[3.0, 4.0])]).unwrap();
        assert_eq!(ok.len(), 2);
        assert_eq!(ok.dim(), 2);
    }

    proptest! {
        #[test]
        fn l2_is_idempotent(values in proptest::collection::vec(-1e6..1e6f64, 2..32)) {
            prop_assume!(values.iter().any(|&x| x != 0.0));
            let v = FeatureVector::new(values).unwrap();
            let once = l2_normalize(&v).unwrap();
            let twice = l2_normalize(&once).unwrap();
            for (a, b) in once.values().iter().zip(twice.values()) {
                prop_assert!((a - b).abs() <= 1e-12);
            }
        }

        #[test]
        fn l1_output_is_a_distribution(values in proptest::collection::vec(0.0..1e6f64, 2..32)) {
            let v = FeatureVector::new(values).unwrap();
            let p = l1_normalize_to_prob(&v, DEFAULT_PROB_FLOOR).unwrap();
            prop_assert!(p.values().iter().all(|&x| x > 0.0));
            prop_assert!((p.values().iter().sum::<f64>() - 1.0).abs() <= SIMPLEX_SUM_TOL);
        }
    }
}
