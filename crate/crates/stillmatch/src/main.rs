//! Thin command-line front end over the benchmark runner and the
//! asymptotics validator. All logic lives in the library; this binary only
//! parses flags, assembles a config, and prints reports.

use clap::Parser;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use std::path::PathBuf;
use std::process::ExitCode;

use stillmatch::bench::{
    parse_methods, run_benchmark, render_table, write_artifacts, BenchConfig, ProblemSource,
    SweepSpec,
};
use stillmatch::dataset::DatasetFiles;
use stillmatch::{
    l1_normalize_to_prob, validate_kl_asymptotics, DissimilarityKind, Error, FeatureVector,
    GeneratorFamily, NoiseSpec, ProbVector, RecognizerConfig, Result, SyntheticSpec,
    DEFAULT_PROB_FLOOR,
};

#[derive(Parser)]
#[command(
    name = "stillmatch",
    version,
    about = "Classify probe sequences against a labeled gallery and benchmark the criteria"
)]
struct Args {
    /// Gallery CSV file: header `dim=D`, rows `label,f_1,...,f_D`
    #[arg(long, value_name = "PATH")]
    gallery: Option<PathBuf>,

    /// Probe JSON-lines file: one {"label"?, "frames": [[...], ...]} per line
    #[arg(long, value_name = "PATH")]
    probes: Option<PathBuf>,

    /// Generate a synthetic problem instead of loading files
    #[arg(long)]
    synthetic: bool,

    /// Synthetic overrides: classes, instances, frames, probes, dim, family,
    /// still-spread, video-shift, seed (repeatable)
    #[arg(long = "spec", value_name = "KEY=VAL")]
    spec: Vec<String>,

    /// Comma-separated subset of: ml, ml-cluster, map, proposed, oracle
    #[arg(long, default_value = "ml,ml-cluster,map,proposed")]
    methods: String,

    /// Dissimilarity: euclid, sq-euclid, kl, chi2, js
    #[arg(long, default_value = "sq-euclid")]
    distance: String,

    /// Profile-penalty weight of the proposed criterion
    #[arg(long)]
    lambda: Option<f64>,

    /// Shortlist size of the proposed criterion
    #[arg(long)]
    m: Option<usize>,

    /// Posterior sharpness (sample-count scale)
    #[arg(long)]
    n: Option<f64>,

    /// Frame aggregation: sum or product
    #[arg(long, default_value = "sum")]
    aggregation: String,

    /// One-dimensional grid PARAM=START:END:STEP, PARAM in {lambda, m, noise}
    #[arg(long, value_name = "PARAM=START:END:STEP")]
    sweep: Option<String>,

    /// Half-width of uniform per-component probe noise
    #[arg(long, value_name = "X_MAX")]
    noise: Option<f64>,

    /// Overrides the synthetic seed and seeds the noise
    #[arg(long)]
    seed: Option<u64>,

    /// Directory for results.csv, config.json, and report.json
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Monte-Carlo check of the scaled-divergence moments instead of a
    /// benchmark (uses --spec dim/seed, --n, --trials)
    #[arg(long)]
    validate_asymptotics: bool,

    /// Trials for --validate-asymptotics
    #[arg(long, default_value_t = 10_000)]
    trials: u64,
}

fn main() -> ExitCode {
    match run(Args::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run(args: Args) -> Result<()> {
    if args.validate_asymptotics {
        return validate_asymptotics(&args);
    }

    let kind: DissimilarityKind = args.distance.parse()?;
    let source = if args.synthetic {
        let mut spec = SyntheticSpec::default();
        let mut family_given = false;
        for pair in &args.spec {
            family_given |= pair.starts_with("family=");
            spec.apply_key_val(pair)?;
        }
        if !family_given {
            spec.family = GeneratorFamily::for_kind(kind);
        }
        if let Some(seed) = args.seed {
            spec.seed = seed;
        }
        ProblemSource::Synthetic(spec)
    } else {
        match (&args.gallery, &args.probes) {
            (Some(g), Some(p)) => ProblemSource::Files(DatasetFiles::new(g, p)),
            _ => {
                return Err(Error::InvalidConfig(
                    "provide --gallery and --probes, or --synthetic".into(),
                ))
            }
        }
    };

    let mut recognizer = RecognizerConfig {
        kind,
        aggregation: args.aggregation.parse()?,
        ..RecognizerConfig::default()
    };
    if let Some(lambda) = args.lambda {
        recognizer.lambda = lambda;
    }
    if let Some(m) = args.m {
        recognizer.candidate_count = m;
    }
    if let Some(n) = args.n {
        recognizer.scale = n;
    }

    let cfg = BenchConfig {
        source,
        methods: parse_methods(&args.methods)?,
        recognizer,
        noise: args.noise.map(|x_max| NoiseSpec {
            x_max,
            seed: args.seed.unwrap_or(0),
        }),
        sweep: args.sweep.as_deref().map(SweepSpec::parse).transpose()?,
    };

    let report = run_benchmark(&cfg)?;
    print!("{}", render_table(&report));
    if let Some(dir) = &args.out {
        write_artifacts(&report, dir)?;
        println!("artifacts written to {}", dir.display());
    }
    Ok(())
}

fn validate_asymptotics(args: &Args) -> Result<()> {
    let mut spec = SyntheticSpec {
        dim: 16,
        ..SyntheticSpec::default()
    };
    for pair in &args.spec {
        spec.apply_key_val(pair)?;
    }
    if let Some(seed) = args.seed {
        spec.seed = seed;
    }
    let n = args.n.unwrap_or(1e4);
    if !(n.is_finite() && n >= 1.0) {
        return Err(Error::InvalidConfig(format!(
            "--n must be a sample size of at least 1, got {n}"
        )));
    }
    let (p, q) = close_simplex_pair(spec.dim, spec.seed)?;
    let report = validate_kl_asymptotics(&p, &q, n as u64, args.trials, spec.seed)?;
    println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
    println!(
        "scaled statistic: mean {:.4} vs predicted {:.4} ({:.3}% off), \
         variance {:.4} vs {:.4} ({:.3}% off)",
        report.scaled.empirical_mean,
        report.scaled.predicted_mean,
        100.0 * report.scaled.mean_rel_err(),
        report.scaled.empirical_var,
        report.scaled.predicted_var,
        100.0 * report.scaled.var_rel_err(),
    );
    Ok(())
}

/// Two nearby random distributions; the variance prediction of the
/// asymptotic law assumes the pair is close.
fn close_simplex_pair(dim: usize, seed: u64) -> Result<(ProbVector, ProbVector)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = |sigma: f64| -> Result<ProbVector> {
        let raw: Vec<f64> = (0..dim)
            .map(|_| {
                let z: f64 = StandardNormal.sample(&mut rng);
                (sigma * z).exp()
            })
            .collect();
        l1_normalize_to_prob(&FeatureVector::new(raw)?, DEFAULT_PROB_FLOOR)
    };
    Ok((draw(0.3)?, draw(0.3)?))
}
