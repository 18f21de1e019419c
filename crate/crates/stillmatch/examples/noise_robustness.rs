//! Degrade probes with uniform feature noise and watch accuracy fall.
//!
//! Posterior averaging holds up longer than single-frame matching because
//! per-frame errors cancel; the profile penalty, by contrast, trusts the
//! whole distance profile and becomes a liability once noise corrupts it.
//! Run with:
//!
//! ```text
//! cargo run --release --example noise_robustness
//! ```

use stillmatch::bench::{
    run_benchmark, BenchConfig, Method, ProblemSource, SweepSpec,
};
use stillmatch::{GeneratorFamily, NoiseSpec, RecognizerConfig, SyntheticSpec};

fn main() -> stillmatch::Result<()> {
    let spec = SyntheticSpec {
        classes: 40,
        instances_min: 2,
        instances_max: 2,
        frames_min: 10,
        frames_max: 10,
        probes_per_class: 3,
        dim: 8,
        family: GeneratorFamily::GaussianUnitSphere,
        still_spread: 0.15,
        video_shift: 0.15,
        seed: 29,
    };
    let methods = vec![Method::MlCluster, Method::Map, Method::Proposed];
    let cfg = BenchConfig {
        source: ProblemSource::Synthetic(spec),
        methods: methods.clone(),
        recognizer: RecognizerConfig {
            scale: 30.0,
            candidate_count: 20,
            ..RecognizerConfig::default()
        },
        noise: Some(NoiseSpec { x_max: 0.0, seed: 29 }),
        sweep: Some(SweepSpec::parse("noise=0:1.0:0.2")?),
    };
    let report = run_benchmark(&cfg)?;

    print!("{:<8}", "x_max");
    for m in &methods {
        print!(" {:>10}", m.to_string());
    }
    println!();
    let points = SweepSpec::parse("noise=0:1.0:0.2")?.values();
    for x in points {
        print!("{x:<8.1}");
        for m in &methods {
            let row = report
                .sweep
                .iter()
                .find(|r| r.x == x && r.method == *m)
                .expect("sweep point exists");
            print!(" {:>10.3}", row.accuracy);
        }
        println!();
    }
    Ok(())
}
