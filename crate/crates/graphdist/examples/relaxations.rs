//! Convex relaxations of the multi-way distance and their gap to the exact
//! value.
//!
//! Run with: cargo run --example relaxations

use graphdist::graphs::{generate_graph, GraphModel, GraphSet};
use graphdist::linalg::NormKind;
use graphdist::relax::{d_cg, d_scg, relaxation_gap, SolverConfig};
use std::collections::BTreeMap;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut params = BTreeMap::new();
    params.insert("p".to_string(), 0.4);
    let graphs = vec![
        generate_graph(GraphModel::ErdosRenyi, 4, &params, 3)?,
        generate_graph(GraphModel::ErdosRenyi, 4, &params, 4)?,
        generate_graph(GraphModel::Complete, 4, &BTreeMap::new(), 0)?,
    ];
    let gs = GraphSet::from_graphs(graphs)?;
    let cfg = SolverConfig {
        tol_primal: 1e-7,
        tol_dual: 1e-7,
        ..SolverConfig::default()
    };

    // Positive semidefinite coupling of the block alignment matrix.
    let scg = d_scg(&gs, NormKind::Frobenius, &cfg)?;
    println!(
        "PSD relaxation:     value {:.6}, {} iterations, min eigenvalue {:.2e}",
        scg.value, scg.diagnostics.iterations, scg.diagnostics.min_eigenvalue
    );

    // Nuclear-norm ball coupling.
    let cg = d_cg(&gs, NormKind::Frobenius, &cfg)?;
    println!(
        "nuclear relaxation: value {:.6}, {} iterations, nuclear norm {:.4}",
        cg.value, cg.diagnostics.iterations, cg.diagnostics.nuclear_norm
    );

    // Side-by-side comparison against exact enumeration and the spectral
    // lower bound.
    let report = relaxation_gap(&gs, NormKind::Frobenius, &cfg)?;
    println!(
        "exact {:.6} | scg {:.6} | cg {:.6} | spectral {:.6}",
        report.exact, report.scg, report.cg, report.spectral
    );
    println!("gaps: scg {:.2e}, cg {:.2e}", report.scg_gap, report.cg_gap);
    assert!(report.ordering_ok);
    Ok(())
}
