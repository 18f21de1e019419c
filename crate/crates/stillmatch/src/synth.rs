//! Synthetic recognition problems, feature-level noise, and a Monte-Carlo
//! check of the scaled-divergence asymptotics.
//!
//! Problems are generated per class from a random prototype: reference
//! stills perturb the prototype by `still_spread` per component, probe
//! sequences first displace the prototype by a shared per-sequence vector
//! of norm `video_shift` (the still-versus-video domain gap; the shared
//! direction keeps frames correlated on purpose) and then perturb each
//! frame independently. Vectors are realized on the unit sphere or, for
//! probabilistic dissimilarities, on the simplex via a multiplicative
//! log-space perturbation.
//!
//! Generation is deterministic per seed and split into two phases with
//! independent streams, so changing the probe layout never disturbs the
//! gallery draw and vice versa.
//!
//! The asymptotics validator draws multinomial samples of size `n` from one
//! distribution and compares moments of twice the scaled divergence to a
//! second distribution against the noncentral chi-squared prediction:
//! mean `(D-1) + 2nI`, variance `2(D-1) + 8nI`, where `I` is the divergence
//! between the true distributions. The variance prediction assumes the two
//! distributions are close; for far pairs the empirical variance drifts off
//! the formula even at large `n`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, Gamma, StandardNormal};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::distance::DissimilarityKind;
use crate::error::{Error, Result};
use crate::feature::{
    l1_normalize_to_prob, l2_normalize, FeatureVector, ProbVector, ProbeSequence,
    DEFAULT_PROB_FLOOR,
};
use crate::gallery::{ClassId, Gallery};

/// Separates the gallery stream from the probe stream for one seed.
const PROBE_PHASE: u64 = 0x9E37_79B9_7F4A_7C15;

/// How raw draws are turned into valid feature vectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GeneratorFamily {
    /// Simplex vectors for probabilistic dissimilarities; perturbations act
    /// multiplicatively in log space so results stay on the simplex.
    DirichletSimplex,
    /// Unit-sphere vectors for geometric dissimilarities; perturbations are
    /// additive followed by renormalization.
    GaussianUnitSphere,
}

impl GeneratorFamily {
    /// The family whose outputs are valid operands for `kind`.
    pub fn for_kind(kind: DissimilarityKind) -> Self {
        if kind.is_probabilistic() {
            GeneratorFamily::DirichletSimplex
        } else {
            GeneratorFamily::GaussianUnitSphere
        }
    }

    pub fn matches(self, kind: DissimilarityKind) -> bool {
        self == GeneratorFamily::for_kind(kind)
    }
}

impl fmt::Display for GeneratorFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GeneratorFamily::DirichletSimplex => "dirichlet",
            GeneratorFamily::GaussianUnitSphere => "gaussian",
        })
    }
}

impl FromStr for GeneratorFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dirichlet" => Ok(GeneratorFamily::DirichletSimplex),
            "gaussian" => Ok(GeneratorFamily::GaussianUnitSphere),
            other => Err(Error::InvalidSpec(format!(
                "unknown generator family {other:?}, expected dirichlet or gaussian"
            ))),
        }
    }
}

/// Layout and difficulty of a synthetic problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub classes: usize,
    /// Reference stills per class, drawn uniformly from this inclusive range.
    pub instances_min: usize,
    pub instances_max: usize,
    /// Frames per probe sequence, drawn uniformly from this inclusive range.
    pub frames_min: usize,
    pub frames_max: usize,
    pub probes_per_class: usize,
    pub dim: usize,
    pub family: GeneratorFamily,
    /// Per-component standard deviation of still and frame perturbations.
    pub still_spread: f64,
    /// Norm of the shared per-sequence displacement away from the prototype.
    pub video_shift: f64,
    pub seed: u64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        Self {
            classes: 10,
            instances_min: 2,
            instances_max: 3,
            frames_min: 5,
            frames_max: 10,
            probes_per_class: 2,
            dim: 32,
            family: GeneratorFamily::GaussianUnitSphere,
            still_spread: 0.2,
            video_shift: 0.2,
            seed: 42,
        }
    }
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<()> {
        if self.classes == 0 {
            return Err(Error::InvalidSpec("classes must be positive".into()));
        }
        if self.instances_min == 0 || self.instances_min > self.instances_max {
            return Err(Error::InvalidSpec(format!(
                "instances range {}..{} is empty or starts at zero",
                self.instances_min, self.instances_max
            )));
        }
        if self.frames_min == 0 || self.frames_min > self.frames_max {
            return Err(Error::InvalidSpec(format!(
                "frames range {}..{} is empty or starts at zero",
                self.frames_min, self.frames_max
            )));
        }
        if self.probes_per_class == 0 {
            return Err(Error::InvalidSpec("probes must be positive".into()));
        }
        if self.dim < 2 {
            return Err(Error::InvalidSpec(format!(
                "dim must be at least 2, got {}",
                self.dim
            )));
        }
        for (name, v) in [
            ("still-spread", self.still_spread),
            ("video-shift", self.video_shift),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::InvalidSpec(format!(
                    "{name} must be nonnegative and finite, got {v}"
                )));
            }
        }
        Ok(())
    }

    /// Applies one `KEY=VAL` override as accepted on the command line.
    ///
    /// Keys: `classes`, `instances`, `frames`, `probes`, `dim`, `family`,
    /// `still-spread`, `video-shift`, `seed`. Count ranges accept either a
    /// single value or `min..max` inclusive.
    pub fn apply_key_val(&mut self, pair: &str) -> Result<()> {
        let (key, val) = pair.split_once('=').ok_or_else(|| {
            Error::InvalidSpec(format!("expected KEY=VAL, got {pair:?}"))
        })?;
        match key {
            "classes" => self.classes = parse_num(key, val)?,
            "instances" => (self.instances_min, self.instances_max) = parse_range(key, val)?,
            "frames" => (self.frames_min, self.frames_max) = parse_range(key, val)?,
            "probes" => self.probes_per_class = parse_num(key, val)?,
            "dim" => self.dim = parse_num(key, val)?,
            "family" => self.family = val.parse()?,
            "still-spread" => self.still_spread = parse_num(key, val)?,
            "video-shift" => self.video_shift = parse_num(key, val)?,
            "seed" => self.seed = parse_num(key, val)?,
            other => {
                return Err(Error::InvalidSpec(format!(
                    "unknown spec key {other:?}"
                )))
            }
        }
        Ok(())
    }
}

fn parse_num<T: FromStr>(key: &str, val: &str) -> Result<T> {
    val.parse()
        .map_err(|_| Error::InvalidSpec(format!("{key}: cannot parse {val:?}")))
}

fn parse_range(key: &str, val: &str) -> Result<(usize, usize)> {
    if let Some((lo, hi)) = val.split_once("..") {
        Ok((parse_num(key, lo)?, parse_num(key, hi)?))
    } else {
        let v = parse_num(key, val)?;
        Ok((v, v))
    }
}

/// Uniform per-component feature noise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    /// Half-width of the uniform perturbation; zero means identity.
    pub x_max: f64,
    pub seed: u64,
}

impl NoiseSpec {
    /// Sub-seeded copy for one probe, so corpora can be perturbed
    /// deterministically yet independently per sequence.
    pub fn for_probe(&self, probe_idx: u64) -> NoiseSpec {
        NoiseSpec {
            x_max: self.x_max,
            seed: self.seed ^ probe_idx.wrapping_mul(PROBE_PHASE),
        }
    }
}

/// Draws a synthetic gallery and labeled probe sequences.
///
/// Both phases are deterministic given `spec.seed`; the gallery and the
/// probes consume independent streams.
pub fn generate_problem(spec: &SyntheticSpec) -> Result<(Gallery, Vec<(ProbeSequence, ClassId)>)> {
    spec.validate()?;
    let mut gallery_rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut probe_rng = ChaCha8Rng::seed_from_u64(spec.seed ^ PROBE_PHASE);

    let prototypes: Vec<Vec<f64>> = (0..spec.classes)
        .map(|_| raw_prototype(&mut gallery_rng, spec.family, spec.dim))
        .collect();

    let mut entries = Vec::new();
    for (c, proto) in prototypes.iter().enumerate() {
        let count = gallery_rng.gen_range(spec.instances_min..=spec.instances_max);
        for _ in 0..count {
            let disp = scaled_normals(&mut gallery_rng, spec.dim, spec.still_spread);
            entries.push((realize(spec.family, proto, &disp)?, c));
        }
    }
    let gallery = Gallery::new(entries)?;

    let mut probes = Vec::new();
    for (c, proto) in prototypes.iter().enumerate() {
        for _ in 0..spec.probes_per_class {
            let frames_count = probe_rng.gen_range(spec.frames_min..=spec.frames_max);
            let shift = unit_direction(&mut probe_rng, spec.dim, spec.video_shift);
            let mut frames = Vec::with_capacity(frames_count);
            for _ in 0..frames_count {
                let mut disp = scaled_normals(&mut probe_rng, spec.dim, spec.still_spread);
                for (d, s) in disp.iter_mut().zip(&shift) {
                    *d += s;
                }
                frames.push(realize(spec.family, proto, &disp)?);
            }
            probes.push((ProbeSequence::new(frames)?, c));
        }
    }
    Ok((gallery, probes))
}

/// Perturbs every component by an i.i.d. uniform draw in `[-x_max, x_max]`
/// and renormalizes per the family; `x_max = 0` returns the input as is.
///
/// Simplex frames clamp negative components to zero before renormalizing.
pub fn inject_noise(
    seq: &ProbeSequence,
    noise: &NoiseSpec,
    family: GeneratorFamily,
) -> Result<ProbeSequence> {
    if !(noise.x_max.is_finite() && noise.x_max >= 0.0) {
        return Err(Error::InvalidSpec(format!(
            "x_max must be nonnegative and finite, got {}",
            noise.x_max
        )));
    }
    if noise.x_max == 0.0 {
        return Ok(seq.clone());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(noise.seed);
    let mut frames = Vec::with_capacity(seq.len());
    for frame in seq.frames() {
        let mut values: Vec<f64> = frame
            .values()
            .iter()
            .map(|&x| x + rng.gen_range(-noise.x_max..=noise.x_max))
            .collect();
        let frame = match family {
            GeneratorFamily::GaussianUnitSphere => l2_normalize(&FeatureVector::new(values)?)?,
            GeneratorFamily::DirichletSimplex => {
                for v in &mut values {
                    *v = v.max(0.0);
                }
                l1_normalize_to_prob(&FeatureVector::new(values)?, DEFAULT_PROB_FLOOR)?
                    .into_feature()
            }
        };
        frames.push(frame);
    }
    ProbeSequence::new(frames)
}

fn raw_prototype(rng: &mut ChaCha8Rng, family: GeneratorFamily, dim: usize) -> Vec<f64> {
    match family {
        GeneratorFamily::GaussianUnitSphere => {
            (0..dim).map(|_| rng.sample(StandardNormal)).collect()
        }
        GeneratorFamily::DirichletSimplex => {
            // Gamma(1,1) draws normalized at realization: a flat Dirichlet.
            let gamma = Gamma::new(1.0, 1.0).expect("valid shape");
            (0..dim).map(|_| gamma.sample(rng)).collect()
        }
    }
}

fn scaled_normals(rng: &mut ChaCha8Rng, dim: usize, scale: f64) -> Vec<f64> {
    (0..dim)
        .map(|_| scale * rng.sample::<f64, _>(StandardNormal))
        .collect()
}

/// Random direction of the given norm.
fn unit_direction(rng: &mut ChaCha8Rng, dim: usize, norm: f64) -> Vec<f64> {
    let raw = scaled_normals(rng, dim, 1.0);
    let len = raw.iter().map(|x| x * x).sum::<f64>().sqrt();
    if len == 0.0 {
        return vec![0.0; dim];
    }
    raw.into_iter().map(|x| x * norm / len).collect()
}

/// Turns a prototype plus displacement into a valid vector of the family.
fn realize(family: GeneratorFamily, proto: &[f64], disp: &[f64]) -> Result<FeatureVector> {
    match family {
        GeneratorFamily::GaussianUnitSphere => {
            let raw: Vec<f64> = proto.iter().zip(disp).map(|(p, d)| p + d).collect();
            l2_normalize(&FeatureVector::new(raw)?)
        }
        GeneratorFamily::DirichletSimplex => {
            let raw: Vec<f64> = proto
                .iter()
                .zip(disp)
                .map(|(p, d)| p * d.exp())
                .collect();
            Ok(l1_normalize_to_prob(&FeatureVector::new(raw)?, DEFAULT_PROB_FLOOR)?.into_feature())
        }
    }
}

/// Empirical versus predicted moments of one statistic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentComparison {
    pub empirical_mean: f64,
    pub empirical_var: f64,
    pub predicted_mean: f64,
    pub predicted_var: f64,
}

impl MomentComparison {
    pub fn mean_rel_err(&self) -> f64 {
        (self.empirical_mean - self.predicted_mean).abs() / self.predicted_mean.abs()
    }

    pub fn var_rel_err(&self) -> f64 {
        (self.empirical_var - self.predicted_var).abs() / self.predicted_var.abs()
    }
}

/// Monte-Carlo summary from [`validate_kl_asymptotics`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticsReport {
    pub dim: usize,
    pub sample_size: u64,
    pub trials: u64,
    /// Divergence between the true distributions.
    pub divergence: f64,
    /// Moments of twice the scaled divergence, against the noncentral
    /// chi-squared prediction.
    pub scaled: MomentComparison,
    /// Moments of the divergence itself, against the first-order normal
    /// prediction.
    pub distance: MomentComparison,
}

/// Predicted mean and variance of `2n * KL(sample : q)` for samples of size
/// `n` drawn from `p` with `I = KL(p : q)`.
pub(crate) fn predicted_scaled_moments(dim: usize, n: f64, divergence: f64) -> (f64, f64) {
    let df = (dim - 1) as f64;
    (df + 2.0 * n * divergence, 2.0 * df + 8.0 * n * divergence)
}

/// Draws `trials` multinomial samples of size `n` from `x_r`, measures the
/// divergence of each empirical distribution to `x_i`, and reports moments
/// against the asymptotic predictions.
///
/// `x_i` must be floored (strictly positive components) or empirical zeros
/// in a trial could produce an infinite divergence.
pub fn validate_kl_asymptotics(
    x_r: &ProbVector,
    x_i: &ProbVector,
    n: u64,
    trials: u64,
    seed: u64,
) -> Result<AsymptoticsReport> {
    let p = x_r.as_feature().values();
    let q = x_i.as_feature().values();
    if p.len() != q.len() {
        return Err(Error::DimensionMismatch {
            expected: p.len(),
            got: q.len(),
        });
    }
    if p == q {
        return Err(Error::DegenerateCase(
            "identical distributions: the asymptotic law does not apply".into(),
        ));
    }
    if n == 0 {
        return Err(Error::InvalidConfig("sample size must be positive".into()));
    }
    if trials < 2 {
        return Err(Error::InvalidConfig(
            "need at least 2 trials to estimate a variance".into(),
        ));
    }

    let dim = p.len();
    let divergence = DissimilarityKind::KullbackLeibler.eval_raw(p, q);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = vec![0u64; dim];
    let mut p_hat = vec![0.0; dim];
    let mut mean = 0.0;
    let mut m2 = 0.0;
    for k in 1..=trials {
        sample_multinomial(&mut rng, n, p, &mut counts);
        for (ph, &c) in p_hat.iter_mut().zip(&counts) {
            *ph = c as f64 / n as f64;
        }
        let v = 2.0 * n as f64 * DissimilarityKind::KullbackLeibler.eval_raw(&p_hat, q);
        let delta = v - mean;
        mean += delta / k as f64;
        m2 += delta * (v - mean);
    }
    let var = m2 / (trials - 1) as f64;

    let nf = n as f64;
    let (pm_scaled, pv_scaled) = predicted_scaled_moments(dim, nf, divergence);
    let df = (dim - 1) as f64;
    Ok(AsymptoticsReport {
        dim,
        sample_size: n,
        trials,
        divergence,
        scaled: MomentComparison {
            empirical_mean: mean,
            empirical_var: var,
            predicted_mean: pm_scaled,
            predicted_var: pv_scaled,
        },
        distance: MomentComparison {
            // The statistic is a fixed linear rescaling of the scaled one.
            empirical_mean: mean / (2.0 * nf),
            empirical_var: var / (4.0 * nf * nf),
            predicted_mean: divergence + df / nf,
            predicted_var: (4.0 * nf * divergence + df) / (2.0 * nf * nf),
        },
    })
}

/// Multinomial sample by the conditional binomial chain.
fn sample_multinomial(rng: &mut ChaCha8Rng, n: u64, p: &[f64], counts: &mut [u64]) {
    let mut remaining = n;
    let mut rest = 1.0;
    let last = p.len() - 1;
    for d in 0..last {
        if remaining == 0 {
            counts[d] = 0;
            continue;
        }
        let cond = if rest > 0.0 {
            (p[d] / rest).clamp(0.0, 1.0)
        } else {
            0.0
        };
        let draw = Binomial::new(remaining, cond)
            .expect("conditional probability stays in [0,1]")
            .sample(rng);
        counts[d] = draw;
        remaining -= draw;
        rest -= p[d];
    }
    counts[last] = remaining;
}
