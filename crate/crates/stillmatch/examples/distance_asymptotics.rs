//! Monte-Carlo check of the scaled-divergence moments.
//!
//! Drawing multinomial samples of size n from p, the statistic
//! 2n*KL(sample : q) follows a noncentral chi-squared law with mean
//! (D-1) + 2nI and variance 2(D-1) + 8nI. The fit tightens as n grows.
//! Run with:
//!
//! ```text
//! cargo run --release --example distance_asymptotics
//! ```

use stillmatch::{
    l1_normalize_to_prob, validate_kl_asymptotics, FeatureVector, ProbVector,
};

fn simplex(raw: &[f64]) -> stillmatch::Result<ProbVector> {
    l1_normalize_to_prob(&FeatureVector::new(raw.to_vec())?, 1e-10)
}

fn main() -> stillmatch::Result<()> {
    let p = simplex(&[
        4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0, 11.0, 12.0, 11.0, 10.0, 9.0, 8.0, 7.0, 6.0, 5.0,
    ])?;
    let q = simplex(&[
        5.0, 4.0, 7.0, 6.0, 9.0, 8.0, 11.0, 10.0, 13.0, 10.0, 11.0, 8.0, 9.0, 6.0, 7.0, 4.0,
    ])?;

    println!("D = 16 components, 5000 trials per row");
    println!(
        "{:>8} {:>12} {:>12} {:>9} {:>12} {:>12} {:>9}",
        "n", "mean", "predicted", "off", "variance", "predicted", "off"
    );
    for n in [1_000, 10_000, 100_000] {
        let report = validate_kl_asymptotics(&p, &q, n, 5_000, 5)?;
        println!(
            "{:>8} {:>12.2} {:>12.2} {:>8.2}% {:>12.1} {:>12.1} {:>8.2}%",
            n,
            report.scaled.empirical_mean,
            report.scaled.predicted_mean,
            100.0 * report.scaled.mean_rel_err(),
            report.scaled.empirical_var,
            report.scaled.predicted_var,
            100.0 * report.scaled.var_rel_err(),
        );
    }
    println!();
    println!("the distance itself concentrates at I + (D-1)/n:");
    let report = validate_kl_asymptotics(&p, &q, 10_000, 5_000, 5)?;
    println!(
        "  I = {:.6}, empirical mean {:.6}, predicted {:.6}",
        report.divergence, report.distance.empirical_mean, report.distance.predicted_mean
    );
    Ok(())
}
