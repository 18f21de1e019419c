//! Benchmark runner: evaluates classification methods over a problem from
//! files or the synthetic generator, with optional feature noise and
//! one-dimensional parameter sweeps.
//!
//! A run produces a [`RunReport`] holding per-method top-1 accuracy,
//! per-probe predictions, and timing. Timing keeps index construction
//! separate from per-probe classification so the cost of pruning is
//! observable. Everything except the timing fields is deterministic for a
//! fixed config, including sweeps and noise.
//!
//! Artifacts on disk: `results.csv` with plot-ready `x,method,accuracy`
//! rows (the base run uses `x=base`), `config.json` echoing the full
//! configuration for re-running, and `report.json` with the whole report.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use crate::dataset::{load_gallery, load_probes, DatasetFiles, LabelTable};
use crate::error::{Error, Result};
use crate::feature::ProbeSequence;
use crate::gallery::{build_index, ClassId, Gallery, GalleryIndex};
use crate::recognize::{
    map_classify, ml_classify, ml_clustering_classify, oracle_classify_full, proposed_classify,
    RecognitionResult, RecognizerConfig,
};
use crate::synth::{generate_problem, inject_noise, GeneratorFamily, NoiseSpec, SyntheticSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Ml,
    MlCluster,
    Map,
    Proposed,
    Oracle,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::Ml,
        Method::MlCluster,
        Method::Map,
        Method::Proposed,
        Method::Oracle,
    ];
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Ml => "ml",
            Method::MlCluster => "ml-cluster",
            Method::Map => "map",
            Method::Proposed => "proposed",
            Method::Oracle => "oracle",
        })
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ml" => Ok(Method::Ml),
            "ml-cluster" => Ok(Method::MlCluster),
            "map" => Ok(Method::Map),
            "proposed" => Ok(Method::Proposed),
            "oracle" => Ok(Method::Oracle),
            other => Err(Error::InvalidConfig(format!(
                "unknown method {other:?}, expected ml, ml-cluster, map, proposed, or oracle"
            ))),
        }
    }
}

/// Parses a comma-separated method list, preserving order.
pub fn parse_methods(s: &str) -> Result<Vec<Method>> {
    s.split(',').map(|tok| tok.trim().parse()).collect()
}

/// Which parameter a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepParam {
    Lambda,
    CandidateCount,
    Noise,
}

/// An inclusive arithmetic grid `PARAM=START:END:STEP`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub param: SweepParam,
    pub start: f64,
    pub end: f64,
    pub step: f64,
}

impl SweepSpec {
    pub fn parse(s: &str) -> Result<Self> {
        let Some((name, grid)) = s.split_once('=') else {
            return Err(Error::InvalidConfig(format!(
                "expected PARAM=START:END:STEP, got {s:?}"
            )));
        };
        let param = match name {
            "lambda" => SweepParam::Lambda,
            "m" => SweepParam::CandidateCount,
            "noise" => SweepParam::Noise,
            other => {
                return Err(Error::InvalidConfig(format!(
                    "unknown sweep parameter {other:?}, expected lambda, m, or noise"
                )))
            }
        };
        let parts: Vec<&str> = grid.split(':').collect();
        if parts.len() != 3 {
            return Err(Error::InvalidConfig(format!(
                "expected START:END:STEP, got {grid:?}"
            )));
        }
        let nums: Vec<f64> = parts
            .iter()
            .map(|p| {
                p.parse().map_err(|_| {
                    Error::InvalidConfig(format!("cannot parse sweep bound {p:?}"))
                })
            })
            .collect::<Result<_>>()?;
        let (start, end, step) = (nums[0], nums[1], nums[2]);
        if !(start.is_finite() && end.is_finite() && step.is_finite() && step > 0.0 && end >= start)
        {
            return Err(Error::InvalidConfig(format!(
                "sweep grid {grid:?} must satisfy step > 0 and end >= start"
            )));
        }
        Ok(Self {
            param,
            start,
            end,
            step,
        })
    }

    /// Grid points, inclusive of both ends when the step lands on the end.
    pub fn values(&self) -> Vec<f64> {
        let count = ((self.end - self.start) / self.step + 1e-9).floor() as usize + 1;
        (0..count).map(|i| self.start + i as f64 * self.step).collect()
    }
}

/// Where the gallery and probes come from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProblemSource {
    Synthetic(SyntheticSpec),
    Files(DatasetFiles),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub source: ProblemSource,
    pub methods: Vec<Method>,
    pub recognizer: RecognizerConfig,
    pub noise: Option<NoiseSpec>,
    pub sweep: Option<SweepSpec>,
}

/// Per-probe classification time summary, milliseconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub mean_ms: f64,
    pub p50_ms: f64,
    pub p90_ms: f64,
}

impl Timing {
    fn from_samples(samples: &[f64]) -> Self {
        if samples.is_empty() {
            return Timing {
                mean_ms: 0.0,
                p50_ms: 0.0,
                p90_ms: 0.0,
            };
        }
        let mut sorted = samples.to_vec();
        sorted.sort_by(f64::total_cmp);
        let rank = |q: f64| {
            let idx = ((q * sorted.len() as f64).ceil() as usize).max(1) - 1;
            sorted[idx.min(sorted.len() - 1)]
        };
        Timing {
            mean_ms: sorted.iter().sum::<f64>() / sorted.len() as f64,
            p50_ms: rank(0.5),
            p90_ms: rank(0.9),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodReport {
    pub method: Method,
    /// Exactly `correct / total` over labeled probes; 0 when none carry a
    /// label.
    pub accuracy: f64,
    pub correct: usize,
    pub total: usize,
    /// Predicted label name per probe, in probe order.
    pub predictions: Vec<String>,
    pub timing: Timing,
}

/// One sweep measurement: accuracy of a method at a parameter value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub x: f64,
    pub method: Method,
    pub accuracy: f64,
    pub correct: usize,
    pub total: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub config: BenchConfig,
    pub seed: u64,
    pub dim: usize,
    pub classes: usize,
    pub gallery_size: usize,
    pub probe_count: usize,
    pub index_build_ms: f64,
    pub methods: Vec<MethodReport>,
    pub sweep: Vec<SweepRow>,
}

impl RunReport {
    /// The report as JSON with all timing fields removed; byte-identical
    /// across reruns of the same config.
    pub fn deterministic_view(&self) -> serde_json::Value {
        let mut value = serde_json::to_value(self).expect("report serializes");
        let obj = value.as_object_mut().expect("report is an object");
        obj.remove("index_build_ms");
        if let Some(methods) = obj.get_mut("methods").and_then(|m| m.as_array_mut()) {
            for method in methods {
                if let Some(m) = method.as_object_mut() {
                    m.remove("timing");
                }
            }
        }
        value
    }
}

struct Problem {
    gallery: Gallery,
    probes: Vec<(ProbeSequence, Option<ClassId>)>,
    labels: LabelTable,
    seed: u64,
}

fn acquire(source: &ProblemSource) -> Result<Problem> {
    match source {
        ProblemSource::Synthetic(spec) => {
            let (gallery, probes) = generate_problem(spec)?;
            let labels = LabelTable::numeric(gallery.num_classes());
            Ok(Problem {
                gallery,
                probes: probes.into_iter().map(|(s, c)| (s, Some(c))).collect(),
                labels,
                seed: spec.seed,
            })
        }
        ProblemSource::Files(files) => {
            let loaded = load_gallery(&files.gallery)?;
            let mut probes = Vec::new();
            for probe in load_probes(&files.probes)? {
                let truth = match &probe.label {
                    Some(name) => Some(loaded.labels.id_of(name).ok_or_else(|| {
                        Error::InvalidConfig(format!(
                            "probe label {name:?} does not appear in the gallery"
                        ))
                    })?),
                    None => None,
                };
                probes.push((probe.sequence, truth));
            }
            Ok(Problem {
                gallery: loaded.gallery,
                probes,
                labels: loaded.labels,
                seed: 0,
            })
        }
    }
}

fn classify(
    method: Method,
    index: &GalleryIndex,
    probe: &ProbeSequence,
    rc: &RecognizerConfig,
) -> Result<RecognitionResult> {
    match method {
        Method::Ml => ml_classify(index, probe),
        Method::MlCluster => ml_clustering_classify(index, probe),
        Method::Map => map_classify(index, probe, rc.scale),
        Method::Proposed => proposed_classify(index, probe, rc),
        Method::Oracle => oracle_classify_full(index, probe, rc),
    }
}

fn noisy_probes(
    base: &[(ProbeSequence, Option<ClassId>)],
    noise: &NoiseSpec,
    family: GeneratorFamily,
) -> Result<Vec<(ProbeSequence, Option<ClassId>)>> {
    base.iter()
        .enumerate()
        .map(|(i, (seq, truth))| {
            Ok((inject_noise(seq, &noise.for_probe(i as u64), family)?, *truth))
        })
        .collect()
}

fn score(
    method: Method,
    index: &GalleryIndex,
    probes: &[(ProbeSequence, Option<ClassId>)],
    rc: &RecognizerConfig,
) -> Result<(usize, usize)> {
    let mut correct = 0;
    let mut labeled = 0;
    for (probe, truth) in probes {
        let res = classify(method, index, probe, rc)?;
        if let Some(truth) = truth {
            labeled += 1;
            if res.predicted == *truth {
                correct += 1;
            }
        }
    }
    Ok((correct, labeled))
}

pub fn run_benchmark(cfg: &BenchConfig) -> Result<RunReport> {
    if cfg.methods.is_empty() {
        return Err(Error::InvalidConfig("no methods selected".into()));
    }
    let problem = acquire(&cfg.source)?;
    let family = GeneratorFamily::for_kind(cfg.recognizer.kind);
    let base_noise = cfg.noise.unwrap_or(NoiseSpec {
        x_max: 0.0,
        seed: problem.seed,
    });
    let probes = noisy_probes(&problem.probes, &base_noise, family)?;

    let start = Instant::now();
    let index = build_index(problem.gallery, cfg.recognizer.kind)?;
    let index_build_ms = start.elapsed().as_secs_f64() * 1e3;

    let mut methods = Vec::with_capacity(cfg.methods.len());
    for &method in &cfg.methods {
        let mut correct = 0;
        let mut labeled = 0;
        let mut predictions = Vec::with_capacity(probes.len());
        let mut times = Vec::with_capacity(probes.len());
        for (probe, truth) in &probes {
            let t = Instant::now();
            let res = classify(method, &index, probe, &cfg.recognizer)?;
            times.push(t.elapsed().as_secs_f64() * 1e3);
            if let Some(truth) = truth {
                labeled += 1;
                if res.predicted == *truth {
                    correct += 1;
                }
            }
            predictions.push(
                problem
                    .labels
                    .name_of(res.predicted)
                    .unwrap_or("?")
                    .to_string(),
            );
        }
        methods.push(MethodReport {
            method,
            accuracy: if labeled > 0 {
                correct as f64 / labeled as f64
            } else {
                0.0
            },
            correct,
            total: labeled,
            predictions,
            timing: Timing::from_samples(&times),
        });
    }

    let mut sweep_rows = Vec::new();
    if let Some(sweep) = &cfg.sweep {
        for x in sweep.values() {
            let mut rc = cfg.recognizer.clone();
            let point_probes = match sweep.param {
                SweepParam::Lambda => {
                    rc.lambda = x;
                    None
                }
                SweepParam::CandidateCount => {
                    rc.candidate_count = (x.round() as usize).max(1);
                    None
                }
                SweepParam::Noise => {
                    let noise = NoiseSpec {
                        x_max: x,
                        seed: base_noise.seed,
                    };
                    Some(noisy_probes(&problem.probes, &noise, family)?)
                }
            };
            let point_probes = point_probes.as_deref().unwrap_or(&probes);
            for &method in &cfg.methods {
                let (correct, labeled) = score(method, &index, point_probes, &rc)?;
                sweep_rows.push(SweepRow {
                    x,
                    method,
                    accuracy: if labeled > 0 {
                        correct as f64 / labeled as f64
                    } else {
                        0.0
                    },
                    correct,
                    total: labeled,
                });
            }
        }
    }

    Ok(RunReport {
        config: cfg.clone(),
        seed: problem.seed,
        dim: index.gallery().dim(),
        classes: index.gallery().num_classes(),
        gallery_size: index.gallery().len(),
        probe_count: probes.len(),
        index_build_ms,
        methods,
        sweep: sweep_rows,
    })
}

/// Writes `results.csv`, `config.json`, and `report.json` into `dir`.
pub fn write_artifacts(report: &RunReport, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let mut csv = String::from("x,method,accuracy,correct,total\n");
    for m in &report.methods {
        csv.push_str(&format!(
            "base,{},{},{},{}\n",
            m.method, m.accuracy, m.correct, m.total
        ));
    }
    for row in &report.sweep {
        csv.push_str(&format!(
            "{},{},{},{},{}\n",
            row.x, row.method, row.accuracy, row.correct, row.total
        ));
    }
    std::fs::write(dir.join("results.csv"), csv)?;
    std::fs::write(
        dir.join("config.json"),
        serde_json::to_string_pretty(&report.config)
            .map_err(|e| Error::InvalidConfig(format!("cannot encode config: {e}")))?,
    )?;
    std::fs::write(
        dir.join("report.json"),
        serde_json::to_string_pretty(report)
            .map_err(|e| Error::InvalidConfig(format!("cannot encode report: {e}")))?,
    )?;
    Ok(())
}

/// Fixed-width summary table for terminal output.
pub fn render_table(report: &RunReport) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "classes {}  gallery {}  probes {}  dim {}  seed {}  index build {:.2} ms\n",
        report.classes,
        report.gallery_size,
        report.probe_count,
        report.dim,
        report.seed,
        report.index_build_ms
    ));
    out.push_str(&format!(
        "{:<12} {:>9} {:>13} {:>9} {:>9} {:>9}\n",
        "method", "accuracy", "correct/total", "mean ms", "p50 ms", "p90 ms"
    ));
    for m in &report.methods {
        out.push_str(&format!(
            "{:<12} {:>9.4} {:>13} {:>9.3} {:>9.3} {:>9.3}\n",
            m.method.to_string(),
            m.accuracy,
            format!("{}/{}", m.correct, m.total),
            m.timing.mean_ms,
            m.timing.p50_ms,
            m.timing.p90_ms
        ));
    }
    if !report.sweep.is_empty() {
        out.push_str("\nsweep points (x, method, accuracy):\n");
        for row in &report.sweep {
            out.push_str(&format!(
                "{:<10} {:<12} {:.4}\n",
                row.x,
                row.method.to_string(),
                row.accuracy
            ));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use tempfile::tempdir;

    fn small_config() -> BenchConfig {
        BenchConfig {
            source: ProblemSource::Synthetic(SyntheticSpec {
                classes: 6,
                dim: 8,
                probes_per_class: 2,
                frames_min: 3,
                frames_max: 5,
                seed: 17,
                ..SyntheticSpec::default()
            }),
            methods: vec![Method::Ml, Method::Map, Method::Proposed],
            recognizer: RecognizerConfig {
                scale: 30.0,
                candidate_count: 3,
                ..RecognizerConfig::default()
            },
            noise: None,
            sweep: None,
        }
    }

    #[test]
    fn method_tokens_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.to_string().parse::<Method>().unwrap(), m);
        }
        assert!(parse_methods("ml,map").is_ok());
        assert!(parse_methods("ml,nope").is_err());
    }

    #[test]
    fn sweep_grid_counts() {
        let sweep = SweepSpec::parse("lambda=0:16:1").unwrap();
        assert_eq!(sweep.values().len(), 17);
        assert_eq!(sweep.values()[0], 0.0);
        assert_eq!(*sweep.values().last().unwrap(), 16.0);
        let m = SweepSpec::parse("m=16:256:16").unwrap();
        assert_eq!(m.values().len(), 16);
        let noise = SweepSpec::parse("noise=0:0.5:0.25").unwrap();
        assert_eq!(noise.values().len(), 3);
        for bad in ["lambda", "q=0:1:1", "lambda=0:1", "lambda=1:0:1", "lambda=0:1:0"] {
            assert!(SweepSpec::parse(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn benchmark_reports_one_row_per_method() {
        let report = run_benchmark(&small_config()).unwrap();
        assert_eq!(report.methods.len(), 3);
        assert_eq!(report.classes, 6);
        assert_eq!(report.probe_count, 12);
        for m in &report.methods {
            assert_eq!(m.predictions.len(), 12);
            assert_eq!(m.total, 12);
            assert!((0.0..=1.0).contains(&m.accuracy));
            assert_eq!(m.accuracy, m.correct as f64 / m.total as f64);
        }
        assert!(report.sweep.is_empty());
    }

    #[test]
    fn report_is_deterministic_apart_from_timing() {
        let cfg = BenchConfig {
            sweep: Some(SweepSpec::parse("lambda=0:4:2").unwrap()),
            noise: Some(NoiseSpec { x_max: 0.1, seed: 4 }),
            ..small_config()
        };
        let a = run_benchmark(&cfg).unwrap();
        let b = run_benchmark(&cfg).unwrap();
        assert_eq!(a.deterministic_view(), b.deterministic_view());
        assert_eq!(a.sweep.len(), 3 * 3);
    }

    #[test]
    fn noise_sweep_reperturbs_from_clean_probes() {
        let cfg = BenchConfig {
            sweep: Some(SweepSpec::parse("noise=0:0.4:0.4").unwrap()),
            methods: vec![Method::Ml],
            ..small_config()
        };
        let report = run_benchmark(&cfg).unwrap();
        assert_eq!(report.sweep.len(), 2);
        // The x=0 sweep point equals the clean base run.
        assert_eq!(report.sweep[0].accuracy, report.methods[0].accuracy);
    }

    #[test]
    fn artifacts_round_trip_the_config() {
        let dir = tempdir().unwrap();
        let cfg = small_config();
        let report = run_benchmark(&cfg).unwrap();
        write_artifacts(&report, dir.path()).unwrap();
        let echoed: BenchConfig = serde_json::from_str(
            &std::fs::read_to_string(dir.path().join("config.json")).unwrap(),
        )
        .unwrap();
        assert_eq!(echoed, cfg);
        let csv = std::fs::read_to_string(dir.path().join("results.csv")).unwrap();
        assert_eq!(csv.lines().count(), 1 + 3);
        assert!(csv.starts_with("x,method,accuracy,correct,total\n"));
        let table = render_table(&report);
        assert!(table.contains("proposed"));
    }
}
