//! Enroll a tiny gallery and classify one probe sequence.
//!
//! Three identities with two reference stills each; the probe is a short
//! "video" of identity 1 in which the middle frame is blurry enough to be
//! confusable with identity 2. The per-frame posteriors show the ambiguity,
//! and the aggregate over the whole sequence resolves it. Run with:
//!
//! ```text
//! cargo run --release --example recognize_sequence
//! ```

use stillmatch::{
    build_index, l2_normalize, proposed_classify, DissimilarityKind, FeatureVector, Gallery,
    ProbeSequence, RecognizerConfig,
};

fn unit(values: &[f64]) -> stillmatch::Result<FeatureVector> {
    l2_normalize(&FeatureVector::new(values.to_vec())?)
}

fn main() -> stillmatch::Result<()> {
    let gallery = Gallery::new(vec![
        (unit(&[0.9, 0.1, 0.0, 0.1])?, 0),
        (unit(&[0.8, 0.2, 0.1, 0.0])?, 0),
        (unit(&[0.1, 0.9, 0.1, 0.0])?, 1),
        (unit(&[0.0, 0.8, 0.2, 0.1])?, 1),
        (unit(&[0.1, 0.0, 0.9, 0.2])?, 2),
        (unit(&[0.0, 0.1, 0.8, 0.1])?, 2),
    ])?;
    let index = build_index(gallery, DissimilarityKind::SquaredEuclidean)?;

    let probe = ProbeSequence::new(vec![
        unit(&[0.15, 0.75, 0.25, 0.05])?,
        unit(&[0.05, 0.50, 0.55, 0.10])?, // blurry frame: between identities 1 and 2
        unit(&[0.20, 0.70, 0.15, 0.00])?,
    ])?;

    let cfg = RecognizerConfig {
        kind: DissimilarityKind::SquaredEuclidean,
        scale: 2.0,
        lambda: 1.0,
        candidate_count: 3,
        ..RecognizerConfig::default()
    };
    let result = proposed_classify(&index, &probe, &cfg)?;

    println!("predicted class: {}", result.predicted);
    println!("shortlisted classes and aggregated posteriors:");
    for (c, p) in result.candidates.iter().zip(&result.candidate_posteriors) {
        println!("  class {c}: {p:.4}");
    }
    println!("per-frame posteriors over the shortlist:");
    for (t, row) in result.frame_posteriors.iter().enumerate() {
        let cells: Vec<String> = row.iter().map(|p| format!("{p:.4}")).collect();
        println!("  frame {t}: [{}]", cells.join(", "));
    }
    assert_eq!(result.predicted, 1);
    Ok(())
}
