//! Randomized testing of the generalized metric axioms and estimation of
//! the best triangle-inequality constant.
//!
//! Run with: cargo run --example metric_axioms

use graphdist::metriclab::{check_n_metric_axioms, estimate_c_constant, DistanceMethod};
use graphdist::relax::SolverConfig;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = SolverConfig::default();

    // Exact and spectral distances satisfy all four axioms to machine
    // precision: non-negativity, self-identity, order symmetry, and the
    // generalized triangle inequality.
    for method in [DistanceMethod::GalignSpectral, DistanceMethod::FermatSpectral] {
        let report = check_n_metric_axioms(method, 4, 5, 100, 42, 1e-8, &cfg)?;
        println!(
            "{}: {} trials, {} violations, max margin {:.2e}, passed: {}",
            method.id(),
            report.trials,
            report.violations.len(),
            report.max_violation,
            report.passed()
        );
    }

    // The triangle constant: largest observed ratio of the left side over
    // the right side; a value of at most 1 means the plain inequality holds.
    for method in [DistanceMethod::GalignSpectral, DistanceMethod::FermatSpectral] {
        let est = estimate_c_constant(method, 3, 4, 300, 42, &cfg)?;
        println!(
            "{}: max ratio {:.9} over {} trials ({} skipped), argmax {}",
            method.id(),
            est.max_ratio,
            est.trials,
            est.skipped,
            est.argmax
        );
    }
    Ok(())
}
