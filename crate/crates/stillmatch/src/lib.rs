//! Still-to-sequence recognition over a small labeled gallery.
//!
//! A gallery holds a handful of labeled reference vectors per class; a probe
//! is an ordered sequence of frame vectors of the same dimension. The crate
//! builds a class-to-class distance index from the gallery and classifies
//! probes with several rules, from plain nearest-class accumulation to a
//! regularized posterior aggregation that matches each candidate's whole
//! distance profile and prunes candidates for speed.
//!
//! Runnable walkthroughs live under `examples/`:
//!
//! ```text
//! cargo run --release --example recognize_sequence    classify one probe, inspect posteriors
//! cargo run --release --example method_comparison     accuracy of every rule on one problem
//! cargo run --release --example online_stream         frame-by-frame streaming recognition
//! cargo run --release --example candidate_pruning     accuracy and speed across pruning levels
//! cargo run --release --example lambda_sweep          effect of the regularizer weight
//! cargo run --release --example noise_robustness      degradation under frame noise
//! cargo run --release --example distance_asymptotics  sampling distribution of the divergence
//! cargo run --release --example dataset_files         on-disk formats round trip
//! ```
//!
//! The `stillmatch` binary wraps the same benchmark runner behind flags; see
//! the crate README.

pub mod bench;
pub mod dataset;
pub mod distance;
pub mod error;
pub mod feature;
pub mod gallery;
pub mod recognize;
pub mod synth;

pub use distance::{chi_squared, dissimilarity, jensen_shannon, kl_divergence, DissimilarityKind};
pub use error::{Error, Result};
pub use feature::{
    l1_normalize_to_prob, l2_normalize, FeatureVector, ProbVector, ProbeSequence,
    DEFAULT_PROB_FLOOR,
};
pub use gallery::{
    all_class_distances, build_index, build_index_with, class_distance, ClassId, DiagonalMode,
    Gallery, GalleryIndex, MIN_USABLE_DISTANCE,
};
pub use recognize::{
    map_classify, medoid_frame, ml_classify, ml_clustering_classify, oracle_classify_full,
    phi_approx, phi_exact, proposed_classify, Aggregation, OnlineRecognizer, PhiMode,
    RecognitionResult, RecognizerConfig,
};
pub use synth::{
    generate_problem, inject_noise, validate_kl_asymptotics, AsymptoticsReport, GeneratorFamily,
    MomentComparison, NoiseSpec, SyntheticSpec,
};
