//! Graph-set data model, seeded random generators, and JSON file I/O.
//!
//! A graph is a real symmetric `m x m` matrix. Weighted graphs are allowed;
//! the unweighted generators emit `{0, 1}` entries with a zero diagonal.
//! A [`GraphSet`] holds equal-sized graphs only; padding smaller graphs with
//! isolated nodes is the caller's responsibility.

use std::collections::BTreeMap;
use std::path::Path;

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A real symmetric `m x m` matrix representing a graph.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphMatrix {
    entries: DMatrix<f64>,
}

impl GraphMatrix {
    /// Wrap a matrix, enforcing squareness, symmetry, and finiteness.
    pub fn new(entries: DMatrix<f64>) -> Result<Self> {
        if entries.nrows() != entries.ncols() {
            return Err(Error::NonSquare {
                rows: entries.nrows(),
                cols: entries.ncols(),
            });
        }
        for i in 0..entries.nrows() {
            for j in 0..entries.ncols() {
                if !entries[(i, j)].is_finite() {
                    return Err(Error::NonFinite { i, j });
                }
                if entries[(i, j)] != entries[(j, i)] {
                    return Err(Error::Asymmetric {
                        i,
                        j,
                        delta: (entries[(i, j)] - entries[(j, i)]).abs(),
                    });
                }
            }
        }
        Ok(Self { entries })
    }

    /// Number of nodes.
    pub fn node_count(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn into_entries(self) -> DMatrix<f64> {
        self.entries
    }

    /// Conjugate by a permutation: returns the graph with adjacency `P A P^T`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let m = self.node_count();
        if perm.len() != m {
            return Err(Error::DimensionMismatch(format!(
                "permutation length {} vs {} nodes",
                perm.len(),
                m
            )));
        }
        let mut out = DMatrix::zeros(m, m);
        for i in 0..m {
            for j in 0..m {
                out[(perm[i], perm[j])] = self.entries[(i, j)];
            }
        }
        Self::new(out)
    }
}

/// True iff `max |A - A^T| <= tol`. Errors on non-square input.
pub fn validate_omega(a: &DMatrix<f64>, tol: f64) -> Result<bool> {
    if a.nrows() != a.ncols() {
        return Err(Error::NonSquare {
            rows: a.nrows(),
            cols: a.ncols(),
        });
    }
    for i in 0..a.nrows() {
        for j in 0..i {
            if (a[(i, j)] - a[(j, i)]).abs() > tol {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// An ordered sequence of equal-sized graphs with string labels.
#[derive(Debug, Clone)]
pub struct GraphSet {
    graphs: Vec<GraphMatrix>,
    ids: Vec<String>,
}

impl GraphSet {
    pub fn new(graphs: Vec<GraphMatrix>, ids: Vec<String>) -> Result<Self> {
        assert_eq!(graphs.len(), ids.len());
        if let Some(first) = graphs.first() {
            let m = first.node_count();
            for (g, id) in graphs.iter().zip(&ids) {
                if g.node_count() != m {
                    return Err(Error::SizeMismatch {
                        id: id.clone(),
                        expected: m,
                        found: g.node_count(),
                    });
                }
            }
        }
        Ok(Self { graphs, ids })
    }

    /// Build a set with generated ids `g0, g1, ...`.
    pub fn from_graphs(graphs: Vec<GraphMatrix>) -> Result<Self> {
        let ids = (0..graphs.len()).map(|i| format!("g{i}")).collect();
        Self::new(graphs, ids)
    }

    pub fn len(&self) -> usize {
        self.graphs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.graphs.is_empty()
    }

    /// Node count shared by every member graph (0 for an empty set).
    pub fn node_count(&self) -> usize {
        self.graphs.first().map_or(0, GraphMatrix::node_count)
    }

    pub fn graphs(&self) -> &[GraphMatrix] {
        &self.graphs
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn get(&self, index: usize) -> Result<&GraphMatrix> {
        self.graphs.get(index).ok_or(Error::IndexOutOfRange {
            index,
            len: self.graphs.len(),
        })
    }

    /// New set with members reordered by `order`.
    pub fn reordered(&self, order: &[usize]) -> Result<Self> {
        let mut graphs = Vec::with_capacity(order.len());
        let mut ids = Vec::with_capacity(order.len());
        for &k in order {
            graphs.push(self.get(k)?.clone());
            ids.push(self.ids[k].clone());
        }
        Self::new(graphs, ids)
    }

    /// Sub-set picked by `indices` (used for set-function evaluation).
    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        self.reordered(indices)
    }
}

// ---------------------------------------------------------------------------
// JSON file format
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct GraphSetFile {
    m: usize,
    graphs: Vec<GraphFile>,
}

#[derive(Serialize, Deserialize)]
struct GraphFile {
    id: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    adjacency: Option<Vec<Vec<f64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    edges: Option<Vec<(usize, usize, f64)>>,
}

/// Load a graph set from the JSON schema
/// `{"m": int, "graphs": [{"id", "adjacency" | "edges"}]}`.
///
/// Adjacency matrices are checked for symmetry (not repaired); the edge-list
/// form implies symmetric fill and a zero diagonal, with 0-based indices.
pub fn load_graph_set(path: impl AsRef<Path>) -> Result<GraphSet> {
    let text = std::fs::read_to_string(path)?;
    parse_graph_set(&text)
}

/// Parse a graph set from JSON text. See [`load_graph_set`].
pub fn parse_graph_set(text: &str) -> Result<GraphSet> {
    let file: GraphSetFile = serde_json::from_str(text)?;
    let m = file.m;
    let mut graphs = Vec::with_capacity(file.graphs.len());
    let mut ids = Vec::with_capacity(file.graphs.len());
    for g in file.graphs {
        let mat = match (g.adjacency, g.edges) {
            (Some(rows), None) => {
                if rows.len() != m || rows.iter().any(|r| r.len() != m) {
                    return Err(Error::SizeMismatch {
                        id: g.id,
                        expected: m,
                        found: rows.len(),
                    });
                }
                DMatrix::from_fn(m, m, |i, j| rows[i][j])
            }
            (None, Some(edges)) => {
                let mut mat = DMatrix::zeros(m, m);
                for (i, j, w) in edges {
                    if i >= m || j >= m {
                        return Err(Error::InvalidParams(format!(
                            "edge ({i},{j}) out of range for m={m}"
                        )));
                    }
                    if i == j {
                        continue; // zero diagonal by schema
                    }
                    mat[(i, j)] = w;
                    mat[(j, i)] = w;
                }
                mat
            }
            _ => {
                return Err(Error::InvalidParams(format!(
                    "graph '{}' must have exactly one of 'adjacency' or 'edges'",
                    g.id
                )))
            }
        };
        graphs.push(GraphMatrix::new(mat)?);
        ids.push(g.id);
    }
    GraphSet::new(graphs, ids)
}

/// Save a graph set in the adjacency form of the JSON schema.
pub fn save_graph_set(gs: &GraphSet, path: impl AsRef<Path>) -> Result<()> {
    let text = graph_set_to_json(gs)?;
    std::fs::write(path, text)?;
    Ok(())
}

pub fn graph_set_to_json(gs: &GraphSet) -> Result<String> {
    let file = GraphSetFile {
        m: gs.node_count(),
        graphs: gs
            .graphs()
            .iter()
            .zip(gs.ids())
            .map(|(g, id)| GraphFile {
                id: id.clone(),
                adjacency: Some(
                    (0..g.node_count())
                        .map(|i| (0..g.node_count()).map(|j| g.entries()[(i, j)]).collect())
                        .collect(),
                ),
                edges: None,
            })
            .collect(),
    };
    Ok(serde_json::to_string_pretty(&file)?)
}

// ---------------------------------------------------------------------------
// Generators
// ---------------------------------------------------------------------------

/// Random and deterministic graph models for the generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GraphModel {
    ErdosRenyi,
    BarabasiAlbert,
    PowerLawTree,
    Regular,
    SmallWorld,
    Empty,
    Complete,
    Path,
    Cycle,
    Star,
}

impl std::str::FromStr for GraphModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        // Accept either dash or underscore word separators.
        Ok(match s.replace('-', "_").as_str() {
            "erdos_renyi" => Self::ErdosRenyi,
            "barabasi_albert" => Self::BarabasiAlbert,
            "power_law_tree" => Self::PowerLawTree,
            "regular" => Self::Regular,
            "small_world" => Self::SmallWorld,
            "empty" => Self::Empty,
            "complete" => Self::Complete,
            "path" => Self::Path,
            "cycle" => Self::Cycle,
            "star" => Self::Star,
            other => return Err(Error::InvalidParams(format!("unknown model '{other}'"))),
        })
    }
}

fn param(params: &BTreeMap<String, f64>, key: &str, default: Option<f64>) -> Result<f64> {
    match (params.get(key), default) {
        (Some(&v), _) => Ok(v),
        (None, Some(d)) => Ok(d),
        (None, None) => Err(Error::InvalidParams(format!("missing parameter '{key}'"))),
    }
}

/// Generate a graph. Deterministic given `(model, m, params, seed)`.
///
/// Recognized parameters: `p` (edge probability, Erdos-Renyi and small-world
/// rewiring), `k` (attachments per node for Barabasi-Albert, degree for
/// regular, ring neighbors for small-world).
pub fn generate_graph(
    model: GraphModel,
    m: usize,
    params: &BTreeMap<String, f64>,
    seed: u64,
) -> Result<GraphMatrix> {
    if m < 1 {
        return Err(Error::InvalidParams("m must be >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut adj = DMatrix::zeros(m, m);
    let add = |adj: &mut DMatrix<f64>, i: usize, j: usize| {
        if i != j {
            adj[(i, j)] = 1.0;
            adj[(j, i)] = 1.0;
        }
    };
    match model {
        GraphModel::Empty => {}
        GraphModel::Complete => {
            for i in 0..m {
                for j in 0..i {
                    add(&mut adj, i, j);
                }
            }
        }
        GraphModel::Path => {
            for i in 1..m {
                add(&mut adj, i - 1, i);
            }
        }
        GraphModel::Cycle => {
            for i in 1..m {
                add(&mut adj, i - 1, i);
            }
            if m > 2 {
                add(&mut adj, m - 1, 0);
            }
        }
        GraphModel::Star => {
            for i in 1..m {
                add(&mut adj, 0, i);
            }
        }
        GraphModel::ErdosRenyi => {
            let p = param(params, "p", Some(0.5))?;
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidParams(format!("p={p} not in [0,1]")));
            }
            for i in 0..m {
                for j in 0..i {
                    if rng.gen::<f64>() < p {
                        add(&mut adj, i, j);
                    }
                }
            }
        }
        GraphModel::BarabasiAlbert | GraphModel::PowerLawTree => {
            let k = if model == GraphModel::PowerLawTree {
                1
            } else {
                param(params, "k", Some(2.0))? as usize
            };
            if k < 1 {
                return Err(Error::InvalidParams("k must be >= 1".into()));
            }
            // Seed clique of k+1 nodes, then preferential attachment.
            let core = (k + 1).min(m);
            let mut stubs: Vec<usize> = Vec::new();
            for i in 0..core {
                for j in 0..i {
                    add(&mut adj, i, j);
                    stubs.push(i);
                    stubs.push(j);
                }
            }
            if core == 1 {
                stubs.push(0);
            }
            for v in core..m {
                let mut targets = Vec::new();
                while targets.len() < k.min(v) {
                    let t = stubs[rng.gen_range(0..stubs.len())];
                    if t != v && !targets.contains(&t) {
                        targets.push(t);
                    }
                }
                for &t in &targets {
                    add(&mut adj, v, t);
                    stubs.push(v);
                    stubs.push(t);
                }
            }
        }
        GraphModel::Regular => {
            let k = param(params, "k", Some(2.0))? as usize;
            if k >= m || !(k * m).is_multiple_of(2) {
                return Err(Error::InvalidParams(format!(
                    "no {k}-regular graph on {m} nodes"
                )));
            }
            // Pairing model with rejection; retry until a simple graph shows up.
            let mut ok = false;
            for _ in 0..500 {
                let mut stubs: Vec<usize> = (0..m).flat_map(|v| std::iter::repeat_n(v, k)).collect();
                stubs.shuffle(&mut rng);
                let mut cand = DMatrix::zeros(m, m);
                let mut good = true;
                for pair in stubs.chunks(2) {
                    let (a, b) = (pair[0], pair[1]);
                    if a == b || cand[(a, b)] != 0.0 {
                        good = false;
                        break;
                    }
                    cand[(a, b)] = 1.0;
                    cand[(b, a)] = 1.0;
                }
                if good {
                    adj = cand;
                    ok = true;
                    break;
                }
            }
            if !ok {
                return Err(Error::InvalidParams(format!(
                    "failed to sample a simple {k}-regular graph on {m} nodes"
                )));
            }
        }
        GraphModel::SmallWorld => {
            let k = param(params, "k", Some(2.0))? as usize;
            let p = param(params, "p", Some(0.1))?;
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidParams(format!("p={p} not in [0,1]")));
            }
            if !k.is_multiple_of(2) || k >= m {
                return Err(Error::InvalidParams(format!(
                    "small-world requires even k < m, got k={k}, m={m}"
                )));
            }
            // Watts-Strogatz: ring lattice, then rewire each edge with prob p.
            for i in 0..m {
                for d in 1..=(k / 2) {
                    add(&mut adj, i, (i + d) % m);
                }
            }
            for i in 0..m {
                for d in 1..=(k / 2) {
                    let j = (i + d) % m;
                    if adj[(i, j)] == 1.0 && rng.gen::<f64>() < p {
                        let candidates: Vec<usize> = (0..m)
                            .filter(|&t| t != i && adj[(i, t)] == 0.0)
                            .collect();
                        if let Some(&t) = candidates.as_slice().choose(&mut rng) {
                            adj[(i, j)] = 0.0;
                            adj[(j, i)] = 0.0;
                            add(&mut adj, i, t);
                        }
                    }
                }
            }
        }
    }
    GraphMatrix::new(adj)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k3() -> GraphMatrix {
        generate_graph(GraphModel::Complete, 3, &BTreeMap::new(), 0).unwrap()
    }

    #[test]
    fn complete_3_is_k3() {
        let g = k3();
        let expect = DMatrix::from_row_slice(3, 3, &[0., 1., 1., 1., 0., 1., 1., 1., 0.]);
        assert_eq!(g.entries(), &expect);
    }

    #[test]
    fn empty_3_is_zero() {
        let g = generate_graph(GraphModel::Empty, 3, &BTreeMap::new(), 0).unwrap();
        assert!(g.entries().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn erdos_renyi_is_deterministic() {
        let mut params = BTreeMap::new();
        params.insert("p".to_string(), 0.5);
        let a = generate_graph(GraphModel::ErdosRenyi, 5, &params, 7).unwrap();
        let b = generate_graph(GraphModel::ErdosRenyi, 5, &params, 7).unwrap();
        assert_eq!(a.entries(), b.entries());
    }

    #[test]
    fn generators_satisfy_omega_with_zero_tol() {
        let params = BTreeMap::new();
        for model in [
            GraphModel::ErdosRenyi,
            GraphModel::BarabasiAlbert,
            GraphModel::PowerLawTree,
            GraphModel::Regular,
            GraphModel::SmallWorld,
            GraphModel::Empty,
            GraphModel::Complete,
            GraphModel::Path,
            GraphModel::Cycle,
            GraphModel::Star,
        ] {
            let g = generate_graph(model, 6, &params, 42).unwrap();
            assert!(validate_omega(g.entries(), 0.0).unwrap(), "{model:?}");
            for i in 0..6 {
                assert_eq!(g.entries()[(i, i)], 0.0, "{model:?} diagonal");
            }
        }
    }

    #[test]
    fn validate_omega_respects_tolerance() {
        let a = DMatrix::from_row_slice(2, 2, &[0., 1. + 1e-12, 1., 0.]);
        assert!(validate_omega(&a, 1e-9).unwrap());
        assert!(!validate_omega(&a, 1e-15).unwrap());
        let b = DMatrix::from_row_slice(2, 2, &[0., 1., 0., 0.]);
        assert!(!validate_omega(&b, 0.0).unwrap());
    }

    #[test]
    fn schema_round_trip() {
        let text = r#"{"m": 3, "graphs": [
            {"id": "g0", "adjacency": [[0,1,1],[1,0,1],[1,1,0]]},
            {"id": "g1", "edges": [[0,1,1.0],[1,2,0.5]]}
        ]}"#;
        let gs = parse_graph_set(text).unwrap();
        assert_eq!(gs.len(), 2);
        assert_eq!(gs.node_count(), 3);
        assert_eq!(gs.get(1).unwrap().entries()[(2, 1)], 0.5);

        let json = graph_set_to_json(&gs).unwrap();
        let back = parse_graph_set(&json).unwrap();
        for (a, b) in gs.graphs().iter().zip(back.graphs()) {
            assert_eq!(a.entries(), b.entries());
        }
    }

    #[test]
    fn asymmetric_adjacency_rejected() {
        let text = r#"{"m": 3, "graphs": [
            {"id": "g0", "adjacency": [[0,1,0],[0,0,0],[0,0,0]]}
        ]}"#;
        let err = parse_graph_set(text).unwrap_err();
        assert!(matches!(err, Error::Asymmetric { .. }), "{err}");
    }

    #[test]
    fn size_mismatch_rejected() {
        let text = r#"{"m": 3, "graphs": [
            {"id": "g0", "adjacency": [[0,1,1],[1,0,1],[1,1,0]]},
            {"id": "g1", "adjacency": [[0,1,1,0],[1,0,1,0],[1,1,0,0],[0,0,0,0]]}
        ]}"#;
        let err = parse_graph_set(text).unwrap_err();
        assert!(matches!(err, Error::SizeMismatch { .. }), "{err}");
    }
}
