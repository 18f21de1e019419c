//! Classify a probe as its frames arrive, one at a time.
//!
//! The running decision is available after every push and the final one is
//! bit-identical to classifying the whole sequence at once. Run with:
//!
//! ```text
//! cargo run --release --example online_stream
//! ```

use stillmatch::{
    build_index, generate_problem, proposed_classify, DissimilarityKind, GeneratorFamily,
    OnlineRecognizer, RecognizerConfig, SyntheticSpec,
};

fn main() -> stillmatch::Result<()> {
    let spec = SyntheticSpec {
        classes: 30,
        instances_min: 2,
        instances_max: 2,
        frames_min: 12,
        frames_max: 12,
        probes_per_class: 1,
        dim: 8,
        family: GeneratorFamily::GaussianUnitSphere,
        still_spread: 0.35,
        video_shift: 0.25,
        seed: 8,
    };
    let (gallery, probes) = generate_problem(&spec)?;
    let index = build_index(gallery, DissimilarityKind::SquaredEuclidean)?;
    let (probe, truth) = &probes[4];

    let cfg = RecognizerConfig {
        scale: 30.0,
        candidate_count: 10,
        ..RecognizerConfig::default()
    };
    let mut online = OnlineRecognizer::new(&index, cfg.clone())?;

    println!("true class: {truth}");
    println!("{:<7} {:>9} {:>22}", "frames", "predicted", "posterior of truth");
    for frame in probe.frames() {
        online.push_frame(frame)?;
        let running = online.classify()?;
        println!(
            "{:<7} {:>9} {:>22.4}",
            online.frames_seen(),
            running.predicted,
            running.posterior_of(*truth).unwrap_or(0.0)
        );
    }

    let batch = proposed_classify(&index, probe, &cfg)?;
    assert_eq!(online.classify()?, batch);
    println!("final online result is bit-identical to the batch result");
    Ok(())
}
