//! Exact and relaxed pairwise alignment distance between two small graphs.
//!
//! Run with: cargo run --example pairwise_distance

use graphdist::graphs::GraphMatrix;
use graphdist::linalg::NormKind;
use graphdist::pscore::{pscore, sb_distance_exact, sb_distance_relaxed, Alignment, AlignmentKind, BiasMatrix};
use graphdist::relax::SolverConfig;
use nalgebra::DMatrix;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // A path and a triangle on three nodes.
    let path = GraphMatrix::new(DMatrix::from_row_slice(
        3,
        3,
        &[0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0],
    ))?;
    let triangle = GraphMatrix::new(DMatrix::from_row_slice(
        3,
        3,
        &[0.0, 1.0, 1.0, 1.0, 0.0, 1.0, 1.0, 1.0, 0.0],
    ))?;

    // Score of a fixed alignment (the identity), then the minimum over all
    // node permutations.
    let identity = Alignment::identity(3, AlignmentKind::Permutation);
    let fixed = pscore(&path, &triangle, &identity, NormKind::Frobenius)?;
    println!("identity-alignment score: {fixed:.6}");

    let bias = BiasMatrix::zero(3);
    let (exact, best) = sb_distance_exact(&path, &triangle, &bias, NormKind::Frobenius)?;
    println!("exact distance:           {exact:.6}");
    println!("optimal alignment:\n{}", best.matrix());

    // The doubly stochastic relaxation lower-bounds the exact distance.
    let cfg = SolverConfig {
        tol_primal: 1e-7,
        tol_dual: 1e-7,
        ..SolverConfig::default()
    };
    let (relaxed, _) = sb_distance_relaxed(&path, &triangle, &bias, NormKind::Frobenius, &cfg)?;
    println!("relaxed distance:         {relaxed:.6}");

    // Other matrix norms give other distances.
    for norm in [NormKind::Operator2, NormKind::EntrywiseP(1.0)] {
        let (value, _) = sb_distance_exact(&path, &triangle, &bias, norm)?;
        println!("exact distance, {norm:?}: {value:.6}");
    }
    Ok(())
}
