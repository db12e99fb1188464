//! Multi-way distances over a graph set: the pairwise-sum alignment distance
//! and the Fermat (median-center) distance, each with an exact brute-force
//! form and a spectral closed form.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::consistency::ConsistentTuple;
use crate::graphs::{GraphMatrix, GraphSet};
use crate::linalg::{geometric_median, matrix_norm, sorted_eigen, NormKind};
use crate::pscore::{
    permutation_matrix, permutations_lex, sb_distance_exact, Alignment, AlignmentKind, BiasMatrix,
};

/// Cap on `(m!)^(n-1)` enumeration size for the exact multi-distance.
pub const ENUMERATION_CAP: usize = 1_000_000;

/// Caps for the Fermat brute force (`2^(m(m-1)/2)` centers, each scored with
/// `n` exact pairwise solves).
pub const FERMAT_NODE_CAP: usize = 4;
pub const FERMAT_GRAPH_CAP: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MultiMethod {
    Bruteforce,
    Spectral,
    Relaxed,
}

/// An optimal solution certificate accompanying a multi-distance value.
#[derive(Debug, Clone)]
pub enum Witness {
    /// Alignment tuple realizing a pairwise-sum distance.
    Tuple(ConsistentTuple),
    /// Center graph and per-graph alignments realizing a Fermat distance,
    /// plus the alignment tuple they induce.
    Center {
        center: GraphMatrix,
        alignments: Vec<Alignment>,
        induced: ConsistentTuple,
    },
}

#[derive(Debug, Clone)]
pub struct MultiDistanceResult {
    pub value: f64,
    pub witness: Option<Witness>,
    pub method: MultiMethod,
}

// ---------------------------------------------------------------------------
// Pairwise-sum alignment distance
// ---------------------------------------------------------------------------

/// Exact minimum of `sum_{i<j} |||A_i P_{i,j} - P_{i,j} A_j|||` over
/// consistent permutation tuples, by enumerating Q-factor sequences with the
/// last factor fixed to the identity.
///
/// Sequences are visited in lexicographic order with strict improvement, so
/// the returned tuple is the lexicographically smallest minimizer. For n = 2
/// this reduces to the same enumeration as the exact pairwise distance and
/// returns a bit-identical value.
pub fn galign_bruteforce(gs: &GraphSet, norm: NormKind) -> Result<MultiDistanceResult> {
    let n = gs.len();
    let m = gs.node_count();
    if n < 2 {
        return Err(Error::InvalidParams("need at least two graphs".into()));
    }
    norm.validate()?;
    let factorial: usize = (1..=m).product();
    let mut total: usize = 1;
    for _ in 0..n - 1 {
        total = total.saturating_mul(factorial);
        if total > ENUMERATION_CAP {
            return Err(Error::CapExceeded {
                what: "Q-factor enumeration size",
                value: total,
                cap: ENUMERATION_CAP,
            });
        }
    }

    let perms: Vec<DMatrix<f64>> = permutations_lex(m).map(|p| permutation_matrix(&p)).collect();
    let id = DMatrix::<f64>::identity(m, m);
    let adj: Vec<&DMatrix<f64>> = gs.graphs().iter().map(|g| g.entries()).collect();

    // Odometer over the n-1 free factors; the last digit moves fastest, so
    // the visit order is lexicographic on the whole sequence.
    let mut digits = vec![0usize; n - 1];
    let mut best: Option<(f64, Vec<usize>)> = None;
    loop {
        let q = |k: usize| -> &DMatrix<f64> {
            if k == n - 1 {
                &id
            } else {
                &perms[digits[k]]
            }
        };
        let mut value = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                let p = if j == n - 1 {
                    q(i).clone()
                } else {
                    q(i) * q(j).transpose()
                };
                value += matrix_norm(&(adj[i] * &p - &p * adj[j]), norm);
            }
        }
        match &best {
            Some((v, _)) if value >= *v => {}
            _ => best = Some((value, digits.clone())),
        }

        // Increment the odometer.
        let mut k = n - 1;
        loop {
            if k == 0 {
                break;
            }
            k -= 1;
            digits[k] += 1;
            if digits[k] < perms.len() {
                break;
            }
            digits[k] = 0;
        }
        if digits.iter().all(|&d| d == 0) {
            break;
        }
    }

    let (value, digits) = best.expect("at least one tuple enumerated");
    let mut qs: Vec<Alignment> = digits
        .iter()
        .map(|&d| Alignment::new(perms[d].clone(), AlignmentKind::Permutation))
        .collect::<Result<Vec<_>>>()?;
    qs.push(Alignment::identity(m, AlignmentKind::Permutation));
    Ok(MultiDistanceResult {
        value,
        witness: Some(Witness::Tuple(ConsistentTuple::from_q_factors(&qs)?)),
        method: MultiMethod::Bruteforce,
    })
}

/// Closed form over orthogonal alignments: `sum_{i<j} ||lambda_i - lambda_j||`
/// on ascending sorted spectra, with the eigenvector matrices as Q-factors.
pub fn galign_spectral(gs: &GraphSet) -> Result<MultiDistanceResult> {
    let n = gs.len();
    if n < 2 {
        return Err(Error::InvalidParams("need at least two graphs".into()));
    }
    let mut spectra = Vec::with_capacity(n);
    let mut qs = Vec::with_capacity(n);
    for g in gs.graphs() {
        let (values, vectors) = sorted_eigen(g.entries())?;
        spectra.push(values);
        qs.push(Alignment::new(vectors, AlignmentKind::Orthogonal)?);
    }
    let mut value = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            value += (&spectra[i] - &spectra[j]).norm();
        }
    }
    Ok(MultiDistanceResult {
        value,
        witness: Some(Witness::Tuple(ConsistentTuple::from_q_factors(&qs)?)),
        method: MultiMethod::Spectral,
    })
}

/// Quadratic-mean variant `sqrt(1/2 sum_{i,j} ||lambda_i - lambda_j||^2)`,
/// cross-checked against the sample-variance identity `n^2 Var(lambda)`
/// within 1e-8 before returning.
pub fn galign_mean_variance(gs: &GraphSet) -> Result<f64> {
    let n = gs.len();
    if n < 2 {
        return Err(Error::InvalidParams("need at least two graphs".into()));
    }
    let spectra: Vec<DVector<f64>> = gs
        .graphs()
        .iter()
        .map(|g| Ok(sorted_eigen(g.entries())?.0))
        .collect::<Result<Vec<_>>>()?;
    let mut half_double_sum = 0.0;
    for i in 0..n {
        for j in 0..n {
            half_double_sum += (&spectra[i] - &spectra[j]).norm_squared();
        }
    }
    half_double_sum *= 0.5;

    let dim = spectra[0].len();
    let mean = spectra
        .iter()
        .fold(DVector::zeros(dim), |acc, s| acc + s)
        / n as f64;
    let variance = spectra
        .iter()
        .map(|s| (s - &mean).norm_squared())
        .sum::<f64>()
        / n as f64;
    let check = (n * n) as f64 * variance;
    let diff = (half_double_sum - check).abs();
    if diff > 1e-8 * (1.0 + half_double_sum) {
        return Err(Error::NonConvergence {
            iters: 0,
            residual: diff,
        });
    }
    Ok(half_double_sum.sqrt())
}

// ---------------------------------------------------------------------------
// Fermat distance
// ---------------------------------------------------------------------------

/// Closed form over orthogonal alignments: the geometric-median objective of
/// the sorted spectra. The witness center is the diagonal matrix of the
/// median spectrum, aligned to each graph by its eigenvector matrix.
pub fn fermat_spectral(gs: &GraphSet, tol: f64) -> Result<MultiDistanceResult> {
    if gs.is_empty() {
        return Err(Error::InvalidParams("need at least one graph".into()));
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidParams(format!("tol = {tol}")));
    }
    let mut spectra = Vec::with_capacity(gs.len());
    let mut qs = Vec::with_capacity(gs.len());
    for g in gs.graphs() {
        let (values, vectors) = sorted_eigen(g.entries())?;
        spectra.push(values);
        qs.push(Alignment::new(vectors, AlignmentKind::Orthogonal)?);
    }
    let (median, value) = geometric_median(&spectra, tol, 100_000)?;
    let center = GraphMatrix::new(DMatrix::from_diagonal(&median))?;
    Ok(MultiDistanceResult {
        value,
        witness: Some(Witness::Center {
            center,
            alignments: qs.clone(),
            induced: ConsistentTuple::from_q_factors(&qs)?,
        }),
        method: MultiMethod::Spectral,
    })
}

/// Center spaces supported by the Fermat brute force.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CenterSpace {
    /// Simple graphs: binary adjacency with zero diagonal.
    BinaryGraphs,
}

/// Exact Fermat distance by enumerating every simple-graph center and scoring
/// it with the exact pairwise distance to each input graph.
///
/// Centers are enumerated as edge bitmasks in increasing order with strict
/// improvement, so ties resolve to the smallest mask.
pub fn fermat_bruteforce(
    gs: &GraphSet,
    center_space: CenterSpace,
    norm: NormKind,
) -> Result<MultiDistanceResult> {
    let CenterSpace::BinaryGraphs = center_space;
    let n = gs.len();
    let m = gs.node_count();
    if n == 0 {
        return Err(Error::InvalidParams("need at least one graph".into()));
    }
    if m > FERMAT_NODE_CAP {
        return Err(Error::CapExceeded {
            what: "node count for Fermat brute force",
            value: m,
            cap: FERMAT_NODE_CAP,
        });
    }
    if n > FERMAT_GRAPH_CAP {
        return Err(Error::CapExceeded {
            what: "graph count for Fermat brute force",
            value: n,
            cap: FERMAT_GRAPH_CAP,
        });
    }
    norm.validate()?;

    let edges: Vec<(usize, usize)> = (0..m)
        .flat_map(|i| (i + 1..m).map(move |j| (i, j)))
        .collect();
    let zero_bias = BiasMatrix::zero(m);
    let mut best: Option<(f64, GraphMatrix, Vec<Alignment>)> = None;
    for mask in 0..(1usize << edges.len()) {
        let mut adjacency = DMatrix::zeros(m, m);
        for (k, &(i, j)) in edges.iter().enumerate() {
            if mask & (1 << k) != 0 {
                adjacency[(i, j)] = 1.0;
                adjacency[(j, i)] = 1.0;
            }
        }
        let center = GraphMatrix::new(adjacency)?;
        let mut total = 0.0;
        let mut alignments = Vec::with_capacity(n);
        for g in gs.graphs() {
            let (value, p) = sb_distance_exact(g, &center, &zero_bias, norm)?;
            total += value;
            alignments.push(p);
        }
        match &best {
            Some((v, _, _)) if total >= *v => {}
            _ => best = Some((total, center, alignments)),
        }
    }

    let (value, center, alignments) = best.expect("at least the empty center enumerated");
    let induced = ConsistentTuple::from_q_factors(&alignments)?;
    Ok(MultiDistanceResult {
        value,
        witness: Some(Witness::Center {
            center,
            alignments,
            induced,
        }),
        method: MultiMethod::Bruteforce,
    })
}

// ---------------------------------------------------------------------------
// Spectral equivalence and subset structure
// ---------------------------------------------------------------------------

/// True iff the sorted spectra of `a` and `b` agree entrywise within `tol`:
/// the equivalence relation under which the spectral distances are metrics.
pub fn quotient_equal(a: &GraphMatrix, b: &GraphMatrix, tol: f64) -> Result<bool> {
    if a.node_count() != b.node_count() {
        return Err(Error::DimensionMismatch(format!(
            "graphs of sizes {} and {}",
            a.node_count(),
            b.node_count()
        )));
    }
    let (la, _) = sorted_eigen(a.entries())?;
    let (lb, _) = sorted_eigen(b.entries())?;
    Ok(la.iter().zip(lb.iter()).all(|(x, y)| (x - y).abs() <= tol))
}

/// Modularity structure of the two spectral multi-distances viewed as set
/// functions over subsets of the graph set.
#[derive(Debug, Clone, Serialize)]
pub struct SetFunctionReport {
    pub n: usize,
    pub tol: f64,
    /// Violations of supermodularity for the pairwise-sum distance; expected
    /// to be zero since every pairwise term is non-negative.
    pub galign_supermodularity_violations: usize,
    pub fermat_supermodularity_violations: usize,
    pub fermat_submodularity_violations: usize,
    pub fermat_max_super_margin: f64,
    pub fermat_max_sub_margin: f64,
}

/// Exhaustively checks `f(S + x) - f(S) <= f(T + x) - f(T)` for all nested
/// pairs `S` inside `T` and every `x` outside `T`, for both spectral
/// multi-distances restricted to subsets.
pub fn set_function_report(gs: &GraphSet) -> Result<SetFunctionReport> {
    let n = gs.len();
    if n > 8 {
        return Err(Error::CapExceeded {
            what: "graph count for subset enumeration",
            value: n,
            cap: 8,
        });
    }
    let spectra: Vec<DVector<f64>> = gs
        .graphs()
        .iter()
        .map(|g| Ok(sorted_eigen(g.entries())?.0))
        .collect::<Result<Vec<_>>>()?;
    let mut pair_cost = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            pair_cost[i][j] = (&spectra[i] - &spectra[j]).norm();
        }
    }

    let full = 1usize << n;
    let members = |mask: usize| (0..n).filter(move |&i| mask & (1 << i) != 0);
    let mut f_galign = vec![0.0; full];
    let mut f_fermat = vec![0.0; full];
    for mask in 0..full {
        let idx: Vec<usize> = members(mask).collect();
        if idx.len() >= 2 {
            for a in 0..idx.len() {
                for b in a + 1..idx.len() {
                    f_galign[mask] += pair_cost[idx[a]][idx[b]];
                }
            }
            let pts: Vec<DVector<f64>> = idx.iter().map(|&i| spectra[i].clone()).collect();
            f_fermat[mask] = geometric_median(&pts, 1e-11, 200_000)?.1;
        }
    }

    let tol = 1e-8;
    let mut report = SetFunctionReport {
        n,
        tol,
        galign_supermodularity_violations: 0,
        fermat_supermodularity_violations: 0,
        fermat_submodularity_violations: 0,
        fermat_max_super_margin: 0.0,
        fermat_max_sub_margin: 0.0,
    };
    for t in 0..full {
        for x in 0..n {
            if t & (1 << x) != 0 {
                continue;
            }
            let xbit = 1 << x;
            // Enumerate all subsets s of t.
            let mut s = t;
            loop {
                let lhs_g = f_galign[s | xbit] - f_galign[s];
                let rhs_g = f_galign[t | xbit] - f_galign[t];
                if lhs_g > rhs_g + tol {
                    report.galign_supermodularity_violations += 1;
                }
                let lhs_f = f_fermat[s | xbit] - f_fermat[s];
                let rhs_f = f_fermat[t | xbit] - f_fermat[t];
                if lhs_f > rhs_f + tol {
                    report.fermat_supermodularity_violations += 1;
                    report.fermat_max_super_margin =
                        report.fermat_max_super_margin.max(lhs_f - rhs_f);
                }
                if lhs_f < rhs_f - tol {
                    report.fermat_submodularity_violations += 1;
                    report.fermat_max_sub_margin = report.fermat_max_sub_margin.max(rhs_f - lhs_f);
                }
                if s == 0 {
                    break;
                }
                s = (s - 1) & t;
            }
        }
    }
    Ok(report)
}
