//! Save a problem to the text dataset formats and load it back.
//!
//! The gallery CSV stores components with 17 significant digits and probes
//! are JSON lines, so a round trip reproduces recognition results exactly.
//! Run with:
//!
//! ```text
//! cargo run --release --example dataset_files
//! ```

use stillmatch::dataset::{
    load_gallery, load_probes, save_gallery, save_probes, LabelTable, LoadedProbe,
};
use stillmatch::{
    build_index, generate_problem, proposed_classify, DissimilarityKind, GeneratorFamily,
    RecognizerConfig, SyntheticSpec,
};

fn main() -> stillmatch::Result<()> {
    let spec = SyntheticSpec {
        classes: 12,
        dim: 6,
        probes_per_class: 2,
        family: GeneratorFamily::DirichletSimplex,
        seed: 23,
        ..SyntheticSpec::default()
    };
    let (gallery, probes) = generate_problem(&spec)?;

    let dir = tempfile::tempdir()?;
    let gallery_path = dir.path().join("gallery.csv");
    let probes_path = dir.path().join("probes.jsonl");
    save_gallery(&gallery_path, &gallery, &LabelTable::numeric(spec.classes))?;
    let records: Vec<LoadedProbe> = probes
        .iter()
        .map(|(seq, c)| LoadedProbe {
            sequence: seq.clone(),
            label: Some(c.to_string()),
        })
        .collect();
    save_probes(&probes_path, &records)?;

    let gallery_text = std::fs::read_to_string(&gallery_path)?;
    println!("gallery.csv starts with:");
    for line in gallery_text.lines().take(2) {
        println!("  {line}");
    }
    println!("probes.jsonl holds {} records", records.len());

    let reloaded = load_gallery(&gallery_path)?;
    let reloaded_probes = load_probes(&probes_path)?;

    let cfg = RecognizerConfig {
        kind: DissimilarityKind::KullbackLeibler,
        scale: 100.0,
        candidate_count: 6,
        ..RecognizerConfig::default()
    };
    let index = build_index(gallery, DissimilarityKind::KullbackLeibler)?;
    let index2 = build_index(reloaded.gallery, DissimilarityKind::KullbackLeibler)?;

    let mut identical = 0;
    for ((seq, _), probe) in probes.iter().zip(&reloaded_probes) {
        let before = proposed_classify(&index, seq, &cfg)?;
        let after = proposed_classify(&index2, &probe.sequence, &cfg)?;
        assert_eq!(before, after, "round trip changed a result");
        identical += 1;
    }
    println!("{identical}/{} probes classify bit-identically after the round trip", probes.len());
    Ok(())
}
