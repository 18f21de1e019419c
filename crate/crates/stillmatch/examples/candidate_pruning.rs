//! Show that candidate pruning cuts classification cost without changing
//! decisions in practice.
//!
//! Classifies the same probes with shortlist sizes from 8 up to the full
//! class count, timing each, and cross-checks every pruned decision
//! against the unpruned criterion. Run with:
//!
//! ```text
//! cargo run --release --example candidate_pruning
//! ```

use std::time::Instant;
use stillmatch::{
    build_index, generate_problem, oracle_classify_full, proposed_classify, DissimilarityKind,
    GeneratorFamily, RecognizerConfig, SyntheticSpec,
};

fn main() -> stillmatch::Result<()> {
    let spec = SyntheticSpec {
        classes: 300,
        instances_min: 2,
        instances_max: 2,
        frames_min: 10,
        frames_max: 10,
        probes_per_class: 1,
        dim: 32,
        family: GeneratorFamily::GaussianUnitSphere,
        still_spread: 0.25,
        video_shift: 0.25,
        seed: 15,
    };
    let (gallery, probes) = generate_problem(&spec)?;
    let index = build_index(gallery, DissimilarityKind::SquaredEuclidean)?;
    let probes: Vec<_> = probes.into_iter().take(30).collect();

    let cfg = RecognizerConfig {
        scale: 50.0,
        candidate_count: spec.classes,
        ..RecognizerConfig::default()
    };
    let full: Vec<_> = probes
        .iter()
        .map(|(p, _)| oracle_classify_full(&index, p, &cfg))
        .collect::<stillmatch::Result<_>>()?;

    println!("{} classes, {} probes, 10 frames each", spec.classes, probes.len());
    println!("{:<10} {:>12} {:>18}", "shortlist", "ms/probe", "vs full criterion");
    for m in [8, 32, 128, 300] {
        let cfg = RecognizerConfig {
            candidate_count: m,
            ..cfg.clone()
        };
        let start = Instant::now();
        let mut agree = 0;
        for ((probe, _), reference) in probes.iter().zip(&full) {
            let res = proposed_classify(&index, probe, &cfg)?;
            if res.predicted == reference.predicted {
                agree += 1;
            }
        }
        let ms = start.elapsed().as_secs_f64() * 1e3 / probes.len() as f64;
        println!(
            "{:<10} {:>12.3} {:>13}/{} match",
            m,
            ms,
            agree,
            probes.len()
        );
    }
    Ok(())
}
