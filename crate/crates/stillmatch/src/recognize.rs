//! Sequence classifiers over a gallery index.
//!
//! All rules start from the per-frame class distances `rho[t][c]` (single
//! linkage against the gallery) and differ in how they turn those into a
//! decision:
//!
//! * [`ml_classify`]: argmin over classes of the accumulated distance
//! * [`ml_clustering_classify`]: [`ml_classify`] on the probe's medoid frame only
//! * [`map_classify`]: argmax of per-frame posteriors averaged over frames
//! * [`proposed_classify`]: posterior aggregation with a distance-profile
//!   penalty and candidate pruning
//! * [`oracle_classify_full`]: the same criterion evaluated naively over every
//!   class, kept as ground truth for the pruned path
//!
//! The profile penalty compares the probe's distance to every class against
//! the reference distances stored in the index: a probe that truly belongs to
//! class `c` should sit at roughly the same distance from class `i` as class
//! `c` itself does. Candidate pruning shortlists the `M` classes with the
//! smallest accumulated distance before the penalty is evaluated, which cuts
//! the per-probe cost from `O(T(R + C^2))` to `O(T(R + M*C))`.
//!
//! Per-frame posteriors are `exp(-scale * score)` rows normalized with the
//! usual max-subtraction, so scores in the hundreds of thousands neither
//! overflow nor collapse to zero.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::distance::{check_prob_domain, DissimilarityKind};
use crate::error::{Error, Result};
use crate::feature::{FeatureVector, ProbeSequence};
use crate::gallery::{class_distance, ClassId, GalleryIndex, MIN_USABLE_DISTANCE};

/// How per-frame evidence is combined into one posterior per candidate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Aggregation {
    /// Mean of the normalized per-frame posteriors. Robust to a few bad
    /// frames, since each frame contributes at most `1/T`.
    SumRule,
    /// Posterior proportional to the product of per-frame likelihoods,
    /// computed as a log-domain sum with one final normalization.
    ProductRule,
}

impl fmt::Display for Aggregation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Aggregation::SumRule => "sum",
            Aggregation::ProductRule => "product",
        })
    }
}

impl FromStr for Aggregation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sum" => Ok(Aggregation::SumRule),
            "product" => Ok(Aggregation::ProductRule),
            other => Err(Error::InvalidConfig(format!(
                "unknown aggregation {other:?}, expected sum or product"
            ))),
        }
    }
}

/// Which profile penalty the criterion uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PhiMode {
    /// [`phi_approx`]: quadratic gap over the reference distance.
    Approximate,
    /// [`phi_exact`] with the given nominal dimension.
    Exact { dim: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecognizerConfig {
    pub kind: DissimilarityKind,
    /// Sharpness of the per-frame posterior, `exp(-scale * score)`. Plays
    /// the role of a sample count behind each distance estimate.
    pub scale: f64,
    /// Weight of the distance-profile penalty; zero disables it.
    pub lambda: f64,
    /// Shortlist size for candidate pruning; clamped to the class count.
    pub candidate_count: usize,
    pub aggregation: Aggregation,
    pub phi: PhiMode,
}

impl Default for RecognizerConfig {
    fn default() -> Self {
        Self {
            kind: DissimilarityKind::SquaredEuclidean,
            scale: 100.0,
            lambda: 7.0,
            candidate_count: 64,
            aggregation: Aggregation::SumRule,
            phi: PhiMode::Approximate,
        }
    }
}

impl RecognizerConfig {
    pub fn validate(&self, index: &GalleryIndex) -> Result<()> {
        if self.kind != index.kind() {
            return Err(Error::InvalidConfig(format!(
                "config dissimilarity {} does not match index dissimilarity {}",
                self.kind,
                index.kind()
            )));
        }
        if !(self.scale.is_finite() && self.scale > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "scale must be positive and finite, got {}",
                self.scale
            )));
        }
        if !(self.lambda.is_finite() && self.lambda >= 0.0) {
            return Err(Error::InvalidConfig(format!(
                "lambda must be nonnegative and finite, got {}",
                self.lambda
            )));
        }
        if self.candidate_count == 0 {
            return Err(Error::InvalidConfig(
                "candidate_count must be at least 1".into(),
            ));
        }
        if let PhiMode::Exact { dim } = self.phi {
            if dim < 2 {
                return Err(Error::InvalidConfig(format!(
                    "exact penalty needs dim >= 2, got {dim}"
                )));
            }
        }
        Ok(())
    }
}

/// Outcome of classifying one probe sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct RecognitionResult {
    pub predicted: ClassId,
    /// Shortlisted classes in ascending id order. Unpruned rules list every
    /// class.
    pub candidates: Vec<ClassId>,
    /// Aggregated posterior per shortlisted class; sums to one.
    pub candidate_posteriors: Vec<f64>,
    /// One normalized posterior row over the shortlist per frame.
    pub frame_posteriors: Vec<Vec<f64>>,
}

impl RecognitionResult {
    /// Aggregated posterior of a class, if it was shortlisted.
    pub fn posterior_of(&self, c: ClassId) -> Option<f64> {
        self.candidates
            .iter()
            .position(|&x| x == c)
            .map(|i| self.candidate_posteriors[i])
    }
}

/// Quadratic profile penalty: squared gap between the probe's distance to a
/// class and the reference distance, over the reference distance.
///
/// Requires `rho_ref > 0`; callers skip reference distances below
/// [`MIN_USABLE_DISTANCE`].
pub fn phi_approx(rho_probe: f64, rho_ref: f64) -> f64 {
    let gap = rho_probe - rho_ref;
    gap * gap / rho_ref
}

/// Profile penalty from the asymptotic normal law of a sampled divergence:
/// a variance log-term plus the squared standardized gap, both shrinking as
/// `scale` grows. For fixed inputs it converges to `phi_approx / 4` as
/// `scale -> inf` with `dim / scale -> 0`.
///
/// Unlike [`phi_approx`] the result can be negative: the log term drops
/// below zero once its argument falls under one.
pub fn phi_exact(rho_probe: f64, rho_ref: f64, dim: usize, scale: f64) -> f64 {
    let df = (dim - 1) as f64;
    let log_term = (4.0 * rho_ref + (PI + df) / scale).ln() / (2.0 * scale);
    let gap = rho_probe - rho_ref - df / scale;
    log_term + gap * gap / (4.0 * rho_ref + df / scale)
}

/// Nearest-class rule: picks the class with the smallest distance
/// accumulated over all frames; lowest class id wins ties.
///
/// The posterior fields are diagnostics at unit scale; the decision itself
/// uses the raw accumulated distances.
pub fn ml_classify(index: &GalleryIndex, probe: &ProbeSequence) -> Result<RecognitionResult> {
    let (rows, sums) = distance_rows(index, probe)?;
    let frame_posteriors: Vec<Vec<f64>> =
        rows.iter().map(|r| posterior_from_scores(r, 1.0)).collect();
    let candidate_posteriors = posterior_from_scores(&sums, 1.0);
    Ok(RecognitionResult {
        predicted: argmin(&sums),
        candidates: (0..sums.len()).collect(),
        candidate_posteriors,
        frame_posteriors,
    })
}

/// Posterior-averaging rule: normalizes `exp(-scale * rho[t][c])` per frame
/// and picks the class with the largest mean posterior.
pub fn map_classify(
    index: &GalleryIndex,
    probe: &ProbeSequence,
    scale: f64,
) -> Result<RecognitionResult> {
    if !(scale.is_finite() && scale > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "scale must be positive and finite, got {scale}"
        )));
    }
    let (rows, _) = distance_rows(index, probe)?;
    let (frame_posteriors, aggregated) = map_aggregate(&rows, scale);
    Ok(RecognitionResult {
        predicted: argmax(&aggregated),
        candidates: (0..rows[0].len()).collect(),
        candidate_posteriors: aggregated,
        frame_posteriors,
    })
}

/// Reduces the probe to its medoid frame and applies [`ml_classify`].
pub fn ml_clustering_classify(
    index: &GalleryIndex,
    probe: &ProbeSequence,
) -> Result<RecognitionResult> {
    let medoid = medoid_frame(index.kind(), probe)?;
    let single = ProbeSequence::new(vec![probe.frames()[medoid].clone()])?;
    ml_classify(index, &single)
}

/// Frame with the smallest summed dissimilarity to every other frame;
/// lowest frame index wins ties.
pub fn medoid_frame(kind: DissimilarityKind, probe: &ProbeSequence) -> Result<usize> {
    for frame in probe.frames() {
        check_prob_domain(kind, frame)?;
    }
    let frames = probe.frames();
    let mut best = 0;
    let mut best_sum = f64::INFINITY;
    for (t, frame) in frames.iter().enumerate() {
        let sum: f64 = frames
            .iter()
            .map(|other| kind.eval_raw(frame.values(), other.values()))
            .sum();
        if sum < best_sum {
            best = t;
            best_sum = sum;
        }
    }
    Ok(best)
}

/// Regularized criterion with candidate pruning.
///
/// Shortlists the `candidate_count` classes with the smallest accumulated
/// distance, then scores each shortlisted class per frame as its distance
/// plus `lambda / C` times the profile penalty summed over all `C` classes,
/// and aggregates the normalized posteriors across frames.
pub fn proposed_classify(
    index: &GalleryIndex,
    probe: &ProbeSequence,
    cfg: &RecognizerConfig,
) -> Result<RecognitionResult> {
    cfg.validate(index)?;
    let (rows, sums) = distance_rows(index, probe)?;
    let shortlist = cfg.candidate_count.min(index.gallery().num_classes());
    let candidates = rank_candidates(&sums, shortlist);
    Ok(criterion_result(index, cfg, &rows, candidates))
}

/// The criterion of [`proposed_classify`] evaluated naively over every
/// class, with no pruning and no shared aggregation code. Ground truth for
/// equivalence tests; `candidate_count` is ignored.
#[allow(clippy::needless_range_loop)] // naive index loops are the point here
pub fn oracle_classify_full(
    index: &GalleryIndex,
    probe: &ProbeSequence,
    cfg: &RecognizerConfig,
) -> Result<RecognitionResult> {
    cfg.validate(index)?;
    let gallery = index.gallery();
    let c_count = gallery.num_classes();
    let t_count = probe.len();

    let mut rho = vec![vec![0.0; c_count]; t_count];
    for (t, frame) in probe.frames().iter().enumerate() {
        for (c, slot) in rho[t].iter_mut().enumerate() {
            *slot = class_distance(gallery, index.kind(), frame, c)?;
        }
    }

    let mut exponents = vec![vec![0.0; c_count]; t_count];
    for t in 0..t_count {
        for c in 0..c_count {
            let mut penalty = 0.0;
            for i in 0..c_count {
                let ref_d = index.interclass(c, i);
                if ref_d < MIN_USABLE_DISTANCE {
                    continue;
                }
                penalty += match cfg.phi {
                    PhiMode::Approximate => phi_approx(rho[t][i], ref_d),
                    PhiMode::Exact { dim } => phi_exact(rho[t][i], ref_d, dim, cfg.scale),
                };
            }
            exponents[t][c] = -cfg.scale * (rho[t][c] + cfg.lambda / c_count as f64 * penalty);
        }
    }

    let mut frame_posteriors = Vec::with_capacity(t_count);
    for row in &exponents {
        let mut peak = f64::NEG_INFINITY;
        for &v in row {
            if v > peak {
                peak = v;
            }
        }
        let mut post: Vec<f64> = row.iter().map(|&v| (v - peak).exp()).collect();
        let z: f64 = post.iter().sum();
        for p in &mut post {
            *p /= z;
        }
        frame_posteriors.push(post);
    }

    let candidate_posteriors = match cfg.aggregation {
        Aggregation::SumRule => {
            let mut agg = vec![0.0; c_count];
            for post in &frame_posteriors {
                for (a, &p) in agg.iter_mut().zip(post) {
                    *a += p;
                }
            }
            for a in &mut agg {
                *a /= t_count as f64;
            }
            agg
        }
        Aggregation::ProductRule => {
            let mut logs = vec![0.0; c_count];
            for row in &exponents {
                for (l, &v) in logs.iter_mut().zip(row) {
                    *l += v;
                }
            }
            softmax(&logs)
        }
    };

    Ok(RecognitionResult {
        predicted: argmax(&candidate_posteriors),
        candidates: (0..c_count).collect(),
        candidate_posteriors,
        frame_posteriors,
    })
}

/// Frame-by-frame recognizer. Push frames as they arrive; [`classify`]
/// scores the frames seen so far and, after the last frame, returns exactly
/// the batch [`proposed_classify`] result for the same sequence.
///
/// Each push costs one pass over the gallery. Classification reuses the
/// cached distance rows but reevaluates the criterion, since the shortlist
/// can change as frames accumulate: `O(T * M * C)` per call when the
/// penalty is active.
///
/// [`classify`]: OnlineRecognizer::classify
pub struct OnlineRecognizer<'a> {
    index: &'a GalleryIndex,
    cfg: RecognizerConfig,
    rows: Vec<Vec<f64>>,
    sums: Vec<f64>,
}

impl<'a> OnlineRecognizer<'a> {
    pub fn new(index: &'a GalleryIndex, cfg: RecognizerConfig) -> Result<Self> {
        cfg.validate(index)?;
        let classes = index.gallery().num_classes();
        Ok(Self {
            index,
            cfg,
            rows: Vec::new(),
            sums: vec![0.0; classes],
        })
    }

    pub fn push_frame(&mut self, frame: &FeatureVector) -> Result<()> {
        let row = self.index.all_class_distances(frame)?;
        for (s, &d) in self.sums.iter_mut().zip(&row) {
            *s += d;
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn frames_seen(&self) -> usize {
        self.rows.len()
    }

    pub fn classify(&self) -> Result<RecognitionResult> {
        if self.rows.is_empty() {
            return Err(Error::EmptyProbe);
        }
        let shortlist = self
            .cfg
            .candidate_count
            .min(self.index.gallery().num_classes());
        let candidates = rank_candidates(&self.sums, shortlist);
        Ok(criterion_result(self.index, &self.cfg, &self.rows, candidates))
    }
}

/// Per-frame class distances and their per-class accumulation over frames.
fn distance_rows(index: &GalleryIndex, probe: &ProbeSequence) -> Result<(Vec<Vec<f64>>, Vec<f64>)> {
    let mut sums = vec![0.0; index.gallery().num_classes()];
    let mut rows = Vec::with_capacity(probe.len());
    for frame in probe.frames() {
        let row = index.all_class_distances(frame)?;
        for (s, &d) in sums.iter_mut().zip(&row) {
            *s += d;
        }
        rows.push(row);
    }
    Ok((rows, sums))
}

/// The `count` classes with the smallest accumulated distance, selected in
/// average linear time; ties prefer the lower class id. Returned in
/// ascending id order so downstream summations stay aligned across pruning
/// levels.
fn rank_candidates(sums: &[f64], count: usize) -> Vec<ClassId> {
    let mut order: Vec<ClassId> = (0..sums.len()).collect();
    if count < order.len() {
        order.select_nth_unstable_by(count - 1, |&a, &b| {
            sums[a].total_cmp(&sums[b]).then(a.cmp(&b))
        });
        order.truncate(count);
    }
    order.sort_unstable();
    order
}

/// Evaluates the regularized criterion on precomputed distance rows for a
/// fixed shortlist. Shared by the batch and online paths so both produce
/// identical results.
fn criterion_result(
    index: &GalleryIndex,
    cfg: &RecognizerConfig,
    rows: &[Vec<f64>],
    candidates: Vec<ClassId>,
) -> RecognitionResult {
    let c_total = index.gallery().num_classes() as f64;
    let t_count = rows.len();
    let mut exponents = vec![vec![0.0; candidates.len()]; t_count];
    for (t, row) in rows.iter().enumerate() {
        for (m, &c) in candidates.iter().enumerate() {
            let mut score = row[c];
            if cfg.lambda > 0.0 {
                score += cfg.lambda / c_total * profile_penalty(index, cfg, row, c);
            }
            exponents[t][m] = -cfg.scale * score;
        }
    }

    let frame_posteriors: Vec<Vec<f64>> = exponents.iter().map(|e| softmax(e)).collect();
    let candidate_posteriors = match cfg.aggregation {
        Aggregation::SumRule => {
            let mut agg = vec![0.0; candidates.len()];
            for post in &frame_posteriors {
                for (a, &p) in agg.iter_mut().zip(post) {
                    *a += p;
                }
            }
            for a in &mut agg {
                *a /= t_count as f64;
            }
            agg
        }
        Aggregation::ProductRule => {
            let mut logs = vec![0.0; candidates.len()];
            for row in &exponents {
                for (l, &v) in logs.iter_mut().zip(row) {
                    *l += v;
                }
            }
            softmax(&logs)
        }
    };

    let predicted = candidates[argmax(&candidate_posteriors)];
    RecognitionResult {
        predicted,
        candidates,
        candidate_posteriors,
        frame_posteriors,
    }
}

/// Profile penalty of one candidate against one frame's distance row:
/// sum over all classes of the configured penalty term. Reference distances
/// below [`MIN_USABLE_DISTANCE`] are skipped, which covers both degenerate
/// duplicates and single-instance diagonal cells.
fn profile_penalty(index: &GalleryIndex, cfg: &RecognizerConfig, row: &[f64], c: ClassId) -> f64 {
    let refs = index.interclass_row(c);
    let mut acc = 0.0;
    for (&rho_i, &ref_d) in row.iter().zip(refs) {
        if ref_d < MIN_USABLE_DISTANCE {
            continue;
        }
        acc += match cfg.phi {
            PhiMode::Approximate => phi_approx(rho_i, ref_d),
            PhiMode::Exact { dim } => phi_exact(rho_i, ref_d, dim, cfg.scale),
        };
    }
    acc
}

/// `softmax(-scale * scores)` as a normalized posterior row.
fn posterior_from_scores(scores: &[f64], scale: f64) -> Vec<f64> {
    let exponents: Vec<f64> = scores.iter().map(|&s| -scale * s).collect();
    softmax(&exponents)
}

/// Per-frame posteriors at the given scale and their mean across frames.
pub(crate) fn map_aggregate(rows: &[Vec<f64>], scale: f64) -> (Vec<Vec<f64>>, Vec<f64>) {
    let frame_posteriors: Vec<Vec<f64>> = rows
        .iter()
        .map(|r| posterior_from_scores(r, scale))
        .collect();
    let mut aggregated = vec![0.0; rows[0].len()];
    for post in &frame_posteriors {
        for (a, &p) in aggregated.iter_mut().zip(post) {
            *a += p;
        }
    }
    for a in &mut aggregated {
        *a /= rows.len() as f64;
    }
    (frame_posteriors, aggregated)
}

fn softmax(exponents: &[f64]) -> Vec<f64> {
    let peak = exponents.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
    if peak == f64::NEG_INFINITY {
        // Every score is infinitely bad; report no information.
        return vec![1.0 / exponents.len() as f64; exponents.len()];
    }
    let mut post: Vec<f64> = exponents.iter().map(|&e| (e - peak).exp()).collect();
    let z: f64 = post.iter().sum();
    for p in &mut post {
        *p /= z;
    }
    post
}

fn argmin(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v < values[best] {
            best = i;
        }
    }
    best
}

fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::feature::l1_normalize_to_prob;
    use crate::gallery::{build_index, Gallery};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn fv(values: &[f64]) -> FeatureVector {
        FeatureVector::new(values.to_vec()).unwrap()
    }

    /// Test-local problem generator, deliberately separate from the synth
    /// module: unit-sphere classes for geometric kinds, floored simplexes
    /// for probabilistic ones.
    fn random_problem(
        seed: u64,
        kind: DissimilarityKind,
        classes: usize,
        per_class: usize,
        frames: usize,
        dim: usize,
    ) -> (GalleryIndex, ProbeSequence, ClassId) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let simplex = kind.is_probabilistic();
        let mut make = |center: Option<&Vec<f64>>, spread: f64| -> Vec<f64> {
            let raw: Vec<f64> = (0..dim)
                .map(|d| {
                    let base = center.map_or(0.0, |c| c[d]);
                    base + spread * rng.gen_range(-1.0..1.0)
                })
                .collect();
            if simplex {
                let shifted: Vec<f64> = raw.iter().map(|x| (x * 3.0).exp()).collect();
                l1_normalize_to_prob(&fv(&shifted), 1e-9)
                    .unwrap()
                    .into_feature()
                    .into_values()
            } else {
                raw
            }
        };
        let centers: Vec<Vec<f64>> = (0..classes).map(|_| make(None, 1.0)).collect();
        let mut entries = Vec::new();
        for (c, center) in centers.iter().enumerate() {
            for _ in 0..per_class {
                entries.push((fv(&make(Some(center), 0.15)), c));
            }
        }
        let gallery = Gallery::new(entries).unwrap();
        let index = build_index(gallery, kind).unwrap();
        let truth = seed as usize % classes;
        let probe = ProbeSequence::new(
            (0..frames)
                .map(|_| fv(&make(Some(&centers[truth]), 0.3)))
                .collect(),
        )
        .unwrap();
        (index, probe, truth)
    }

    #[test]
    fn phi_approx_known_values() {
        assert_eq!(phi_approx(1.0, 1.0), 0.0);
        assert_eq!(phi_approx(2.0, 1.0), 1.0);
        assert_eq!(phi_approx(0.5, 2.0), 1.125);
    }

    #[test]
    #[allow(clippy::excessive_precision)] // constants frozen from an external computation
    fn phi_exact_known_values() {
        let v = phi_exact(0.5, 0.5, 4097, 1e6);
        assert!((v - 8.7190605702035403e-6).abs() < 1e-20, "got {v}");
        // Zero reference distance: the quadratic term vanishes when the gap
        // equals (dim-1)/scale, leaving the log term, negative here.
        let log_only = phi_exact(15.0 / 1e4, 0.0, 16, 1e4);
        assert!((log_only - (-3.1560665666303164e-4)).abs() < 1e-18, "got {log_only}");
    }

    #[test]
    fn phi_exact_approaches_quarter_of_phi_approx() {
        let target = phi_approx(2.0, 1.0) / 4.0;
        let mut last = f64::INFINITY;
        for scale in [1e2, 1e4, 1e6, 1e8] {
            let gap = (phi_exact(2.0, 1.0, 16, scale) - target).abs();
            assert!(gap < last, "gap {gap} did not shrink at scale {scale}");
            last = gap;
        }
        assert!(last < 1e-7);
    }

    #[test]
    fn map_aggregate_toy_rows() {
        // Frames 1 and 2 vote for opposite classes; frame 3 leans class 0.
        let rows = vec![vec![0.0, 10.0], vec![10.0, 0.0], vec![0.1, 0.2]];
        let (posts, agg) = map_aggregate(&rows, 50.0);
        for row in &posts {
            assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
        assert!((agg[0] - 0.664435716358572).abs() < 1e-12);
        assert!((agg[1] - 0.335564283641428).abs() < 1e-12);
        assert!(agg[0] > agg[1]);
    }

    #[test]
    fn ties_break_to_the_lowest_class_id() {
        // Classes 1 and 2 hold identical instances; the probe sits exactly
        // between them and class 0 is far away.
        let gallery = Gallery::new(vec![
            (fv(&[10.0, 0.0]), 0),
            (fv(&[0.0, 1.0]), 1),
            (fv(&[0.0, 1.0]), 2),
        ])
        .unwrap();
        let index = build_index(gallery, DissimilarityKind::SquaredEuclidean).unwrap();
        let probe = ProbeSequence::new(vec![fv(&[0.0, 1.0]), fv(&[0.1, 1.0])]).unwrap();
        assert_eq!(ml_classify(&index, &probe).unwrap().predicted, 1);
        assert_eq!(map_classify(&index, &probe, 10.0).unwrap().predicted, 1);
        let cfg = RecognizerConfig {
            scale: 10.0,
            candidate_count: 3,
            ..RecognizerConfig::default()
        };
        assert_eq!(proposed_classify(&index, &probe, &cfg).unwrap().predicted, 1);
        assert_eq!(
            oracle_classify_full(&index, &probe, &cfg).unwrap().predicted,
            1
        );
    }

    #[test]
    fn medoid_picks_the_central_frame() {
        let probe = ProbeSequence::new(vec![fv(&[0.0, 0.0]), fv(&[1.0, 0.0]), fv(&[3.0, 0.0])])
            .unwrap();
        // Summed distances: 4, 3, 5.
        assert_eq!(medoid_frame(DissimilarityKind::Euclidean, &probe).unwrap(), 1);
        // Exhaustive oracle over a random sequence.
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let frames: Vec<FeatureVector> = (0..7)
            .map(|_| fv(&[rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen()]))
            .collect();
        let seq = ProbeSequence::new(frames.clone()).unwrap();
        let got = medoid_frame(DissimilarityKind::SquaredEuclidean, &seq).unwrap();
        let mut best = (f64::INFINITY, 0);
        for (t, f) in frames.iter().enumerate() {
            let s: f64 = frames
                .iter()
                .map(|g| {
                    crate::distance::dissimilarity(DissimilarityKind::SquaredEuclidean, f, g)
                        .unwrap()
                })
                .sum();
            if s < best.0 {
                best = (s, t);
            }
        }
        assert_eq!(got, best.1);
    }

    #[test]
    fn clustering_rule_equals_ml_on_the_medoid() {
        let (index, probe, _) =
            random_problem(5, DissimilarityKind::SquaredEuclidean, 6, 3, 5, 8);
        let medoid = medoid_frame(index.kind(), &probe).unwrap();
        let single = ProbeSequence::new(vec![probe.frames()[medoid].clone()]).unwrap();
        assert_eq!(
            ml_clustering_classify(&index, &probe).unwrap(),
            ml_classify(&index, &single).unwrap()
        );
    }

    #[test]
    fn shortlist_always_contains_the_ml_winner() {
        for seed in 0..20u64 {
            let (index, probe, _) =
                random_problem(seed, DissimilarityKind::SquaredEuclidean, 8, 2, 4, 6);
            let ml = ml_classify(&index, &probe).unwrap().predicted;
            for m in 1..=8usize {
                let cfg = RecognizerConfig {
                    candidate_count: m,
                    scale: 20.0,
                    ..RecognizerConfig::default()
                };
                let res = proposed_classify(&index, &probe, &cfg).unwrap();
                assert_eq!(res.candidates.len(), m);
                assert!(res.candidates.contains(&ml), "seed {seed} m {m}");
            }
        }
    }

    #[test]
    fn single_candidate_reduces_to_ml() {
        for seed in 0..25u64 {
            for kind in [
                DissimilarityKind::SquaredEuclidean,
                DissimilarityKind::KullbackLeibler,
            ] {
                let (index, probe, _) = random_problem(seed, kind, 7, 2, 5, 6);
                let cfg = RecognizerConfig {
                    kind,
                    candidate_count: 1,
                    scale: 30.0,
                    ..RecognizerConfig::default()
                };
                let pruned = proposed_classify(&index, &probe, &cfg).unwrap();
                let ml = ml_classify(&index, &probe).unwrap();
                assert_eq!(pruned.predicted, ml.predicted, "seed {seed} kind {kind}");
            }
        }
    }

    #[test]
    fn unpenalized_full_shortlist_reduces_to_map() {
        for seed in 0..25u64 {
            let (index, probe, _) =
                random_problem(seed, DissimilarityKind::SquaredEuclidean, 6, 2, 4, 5);
            let cfg = RecognizerConfig {
                lambda: 0.0,
                candidate_count: 6,
                scale: 40.0,
                ..RecognizerConfig::default()
            };
            let pruned = proposed_classify(&index, &probe, &cfg).unwrap();
            let map = map_classify(&index, &probe, 40.0).unwrap();
            assert_eq!(pruned.predicted, map.predicted);
            for (a, b) in pruned
                .candidate_posteriors
                .iter()
                .zip(&map.candidate_posteriors)
            {
                assert!((a - b).abs() <= 1e-9 * a.abs().max(*b).max(1e-12));
            }
        }
    }

    #[test]
    fn full_shortlist_matches_the_oracle() {
        for seed in 0..15u64 {
            for aggregation in [Aggregation::SumRule, Aggregation::ProductRule] {
                let (index, probe, _) =
                    random_problem(seed, DissimilarityKind::SquaredEuclidean, 6, 2, 4, 5);
                let cfg = RecognizerConfig {
                    candidate_count: 6,
                    scale: 25.0,
                    lambda: 5.0,
                    aggregation,
                    ..RecognizerConfig::default()
                };
                let pruned = proposed_classify(&index, &probe, &cfg).unwrap();
                let oracle = oracle_classify_full(&index, &probe, &cfg).unwrap();
                assert_eq!(pruned, oracle, "seed {seed} {aggregation}");
            }
        }
    }

    #[test]
    fn posterior_rows_are_normalized() {
        let (index, probe, _) = random_problem(9, DissimilarityKind::JensenShannon, 5, 2, 6, 8);
        let cfg = RecognizerConfig {
            kind: DissimilarityKind::JensenShannon,
            candidate_count: 3,
            scale: 200.0,
            ..RecognizerConfig::default()
        };
        let res = proposed_classify(&index, &probe, &cfg).unwrap();
        assert_eq!(res.frame_posteriors.len(), probe.len());
        for row in &res.frame_posteriors {
            assert_eq!(row.len(), 3);
            assert!((row.iter().sum::<f64>() - 1.0).abs() <= 1e-9);
        }
        assert!((res.candidate_posteriors.iter().sum::<f64>() - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn product_rule_matches_log_domain_identity() {
        // ln(L_a / L_b) must equal the summed exponent difference.
        let (index, probe, _) =
            random_problem(12, DissimilarityKind::SquaredEuclidean, 4, 2, 3, 5);
        // Mild sharpness keeps every posterior well away from underflow so
        // the ratios below stay finite.
        let cfg = RecognizerConfig {
            candidate_count: 4,
            scale: 0.5,
            lambda: 0.5,
            aggregation: Aggregation::ProductRule,
            ..RecognizerConfig::default()
        };
        let res = proposed_classify(&index, &probe, &cfg).unwrap();
        assert!(res.candidate_posteriors.iter().all(|&p| p > 1e-300));
        let sum_cfg = RecognizerConfig {
            aggregation: Aggregation::SumRule,
            ..cfg
        };
        let frames = proposed_classify(&index, &probe, &sum_cfg).unwrap();
        // Recover per-frame exponent differences from the normalized rows.
        let mut expected = 0.0;
        for row in &frames.frame_posteriors {
            expected += (row[0] / row[1]).ln();
        }
        let got = (res.candidate_posteriors[0] / res.candidate_posteriors[1]).ln();
        assert!((got - expected).abs() < 1e-9, "{got} vs {expected}");
    }

    #[test]
    fn scaling_distances_and_inverse_scale_is_exact_for_powers_of_two() {
        // Doubling every vector quadruples squared distances; dividing the
        // scale by four multiplies the exponents back bit for bit.
        let (index, probe, _) =
            random_problem(21, DissimilarityKind::SquaredEuclidean, 5, 2, 4, 6);
        let scaled_entries: Vec<(FeatureVector, ClassId)> = index
            .gallery()
            .entries()
            .map(|(v, c)| (fv(&v.values().iter().map(|x| x * 2.0).collect::<Vec<_>>()), c))
            .collect();
        let scaled_index = build_index(
            Gallery::new(scaled_entries).unwrap(),
            DissimilarityKind::SquaredEuclidean,
        )
        .unwrap();
        let scaled_probe = ProbeSequence::new(
            probe
                .frames()
                .iter()
                .map(|f| fv(&f.values().iter().map(|x| x * 2.0).collect::<Vec<_>>()))
                .collect(),
        )
        .unwrap();
        let base = map_classify(&index, &probe, 48.0).unwrap();
        let scaled = map_classify(&scaled_index, &scaled_probe, 12.0).unwrap();
        assert_eq!(base.predicted, scaled.predicted);
        assert_eq!(base.candidate_posteriors, scaled.candidate_posteriors);
        assert_eq!(
            ml_classify(&index, &probe).unwrap().predicted,
            ml_classify(&scaled_index, &scaled_probe).unwrap().predicted
        );
    }

    #[test]
    fn extreme_scales_stay_finite() {
        let gallery = Gallery::new(vec![
            (fv(&[0.0, 0.0]), 0),
            (fv(&[1000.0, 0.0]), 1),
            (fv(&[0.0, 1000.0]), 2),
        ])
        .unwrap();
        let index = build_index(gallery, DissimilarityKind::Euclidean).unwrap();
        let probe = ProbeSequence::new(vec![fv(&[1.0, 1.0]), fv(&[2.0, 0.5])]).unwrap();
        let cfg = RecognizerConfig {
            kind: DissimilarityKind::Euclidean,
            scale: 1e6,
            candidate_count: 3,
            ..RecognizerConfig::default()
        };
        for res in [
            proposed_classify(&index, &probe, &cfg).unwrap(),
            map_classify(&index, &probe, 1e6).unwrap(),
        ] {
            for row in res
                .frame_posteriors
                .iter()
                .chain(std::iter::once(&res.candidate_posteriors))
            {
                assert!(row.iter().all(|p| p.is_finite()));
                assert!((row.iter().sum::<f64>() - 1.0).abs() <= 1e-9);
            }
        }
    }

    #[test]
    fn online_recognizer_matches_batch_exactly() {
        let (index, probe, _) = random_problem(31, DissimilarityKind::KullbackLeibler, 6, 2, 7, 8);
        let cfg = RecognizerConfig {
            kind: DissimilarityKind::KullbackLeibler,
            candidate_count: 3,
            scale: 60.0,
            ..RecognizerConfig::default()
        };
        let mut online = OnlineRecognizer::new(&index, cfg.clone()).unwrap();
        assert!(matches!(online.classify(), Err(Error::EmptyProbe)));
        for (t, frame) in probe.frames().iter().enumerate() {
            online.push_frame(frame).unwrap();
            assert_eq!(online.frames_seen(), t + 1);
            let partial = online.classify().unwrap();
            let prefix =
                ProbeSequence::new(probe.frames()[..=t].to_vec()).unwrap();
            assert_eq!(partial, proposed_classify(&index, &prefix, &cfg).unwrap());
        }
    }

    #[test]
    fn shortlist_clamps_to_class_count() {
        let (index, probe, _) = random_problem(2, DissimilarityKind::SquaredEuclidean, 4, 2, 3, 5);
        let cfg = RecognizerConfig {
            candidate_count: 64,
            scale: 10.0,
            ..RecognizerConfig::default()
        };
        let res = proposed_classify(&index, &probe, &cfg).unwrap();
        assert_eq!(res.candidates, vec![0, 1, 2, 3]);
    }

    #[test]
    fn config_validation_rejects_bad_values() {
        let (index, probe, _) = random_problem(2, DissimilarityKind::SquaredEuclidean, 3, 2, 2, 4);
        let base = RecognizerConfig {
            scale: 10.0,
            ..RecognizerConfig::default()
        };
        for bad in [
            RecognizerConfig { scale: 0.0, ..base.clone() },
            RecognizerConfig { scale: f64::NAN, ..base.clone() },
            RecognizerConfig { lambda: -1.0, ..base.clone() },
            RecognizerConfig { candidate_count: 0, ..base.clone() },
            RecognizerConfig { kind: DissimilarityKind::Euclidean, ..base.clone() },
            RecognizerConfig { phi: PhiMode::Exact { dim: 1 }, ..base.clone() },
        ] {
            assert!(matches!(
                proposed_classify(&index, &probe, &bad),
                Err(Error::InvalidConfig(_))
            ));
        }
        assert!(matches!(
            map_classify(&index, &probe, -3.0),
            Err(Error::InvalidConfig(_))
        ));
    }
}
