//! The Fermat (median-center) distance: find a center graph minimizing the
//! summed distance to every input graph.
//!
//! Run with: cargo run --example fermat_center

use graphdist::graphs::{generate_graph, GraphModel, GraphSet};
use graphdist::linalg::NormKind;
use graphdist::multidist::{fermat_bruteforce, fermat_spectral, CenterSpace, Witness};
use std::collections::BTreeMap;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let graphs = vec![
        generate_graph(GraphModel::Path, 4, &BTreeMap::new(), 0)?,
        generate_graph(GraphModel::Cycle, 4, &BTreeMap::new(), 0)?,
        generate_graph(GraphModel::Star, 4, &BTreeMap::new(), 0)?,
    ];
    let gs = GraphSet::from_graphs(graphs)?;

    // Spectral version: geometric median of the sorted spectra; the center
    // is a diagonal (weighted) graph.
    let spectral = fermat_spectral(&gs, 1e-10)?;
    println!("spectral Fermat distance: {:.6}", spectral.value);
    if let Some(Witness::Center { center, .. }) = &spectral.witness {
        println!("median spectrum: {:?}", center.entries().diagonal().as_slice());
    }

    // Brute force over all simple-graph centers with exact alignments.
    let exact = fermat_bruteforce(&gs, CenterSpace::BinaryGraphs, NormKind::Frobenius)?;
    println!("simple-graph Fermat distance: {:.6}", exact.value);
    if let Some(Witness::Center { center, .. }) = &exact.witness {
        println!("best center graph:\n{}", center.entries());
    }
    Ok(())
}
