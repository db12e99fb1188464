//! Graph generators and the JSON set format: build a mixed set of model
//! graphs, serialize it, and read it back unchanged.
//!
//! Run with: cargo run --example generate_graphs

use graphdist::graphs::{
    generate_graph, graph_set_to_json, parse_graph_set, GraphModel, GraphSet,
};
use std::collections::BTreeMap;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut er = BTreeMap::new();
    er.insert("p".to_string(), 0.3);
    let mut ba = BTreeMap::new();
    ba.insert("k".to_string(), 2.0);
    let specs = [
        (GraphModel::ErdosRenyi, &er),
        (GraphModel::BarabasiAlbert, &ba),
        (GraphModel::PowerLawTree, &BTreeMap::new()),
        (GraphModel::Cycle, &BTreeMap::new()),
    ];

    let mut graphs = Vec::new();
    for (i, (model, params)) in specs.iter().enumerate() {
        let g = generate_graph(*model, 6, params, i as u64)?;
        let edges = g.entries().iter().filter(|&&v| v != 0.0).count() / 2;
        println!("{model:?}: 6 nodes, {edges} edges");
        graphs.push(g);
    }
    let gs = GraphSet::from_graphs(graphs)?;

    // The on-disk format is versioned JSON with row-major adjacency lists.
    let json = graph_set_to_json(&gs)?;
    println!("serialized set: {} bytes", json.len());
    let back = parse_graph_set(&json)?;
    assert_eq!(back.len(), gs.len());
    for (a, b) in gs.graphs().iter().zip(back.graphs()) {
        assert_eq!(a.entries(), b.entries());
    }
    println!("round trip: exact");
    Ok(())
}
