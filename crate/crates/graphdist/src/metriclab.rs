//! Randomized verification harness: axiom suites for the multi-way
//! distances, the generalized triangle inequality, the best-constant
//! estimate for the scaled triangle bound, and sampled diameter estimation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graphs::{generate_graph, GraphMatrix, GraphSet, GraphModel};
use crate::linalg::{sorted_eigen, NormKind};
use crate::multidist::{
    fermat_bruteforce, fermat_spectral, galign_bruteforce, galign_spectral, CenterSpace,
};
use crate::pscore::{random_permutation_vec, sb_distance_exact, BiasMatrix};
use crate::relax::{d_cg, d_scg, SolverConfig};

/// Distance methods the harness can exercise, keyed by a stable id.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DistanceMethod {
    GalignBruteforce,
    GalignSpectral,
    FermatSpectral,
    FermatBruteforce,
    Scg,
    Cg,
}

impl DistanceMethod {
    pub const ALL: [DistanceMethod; 6] = [
        DistanceMethod::GalignBruteforce,
        DistanceMethod::GalignSpectral,
        DistanceMethod::FermatSpectral,
        DistanceMethod::FermatBruteforce,
        DistanceMethod::Scg,
        DistanceMethod::Cg,
    ];

    pub fn id(&self) -> &'static str {
        match self {
            DistanceMethod::GalignBruteforce => "galign-bruteforce",
            DistanceMethod::GalignSpectral => "galign-spectral",
            DistanceMethod::FermatSpectral => "fermat-spectral",
            DistanceMethod::FermatBruteforce => "fermat-bruteforce",
            DistanceMethod::Scg => "scg",
            DistanceMethod::Cg => "cg",
        }
    }

    /// Evaluate this distance on a graph set. Spectral methods use the
    /// Euclidean norm on spectra and ignore `norm`.
    pub fn evaluate(&self, gs: &GraphSet, norm: NormKind, cfg: &SolverConfig) -> Result<f64> {
        match self {
            DistanceMethod::GalignBruteforce => Ok(galign_bruteforce(gs, norm)?.value),
            DistanceMethod::GalignSpectral => Ok(galign_spectral(gs)?.value),
            DistanceMethod::FermatSpectral => Ok(fermat_spectral(gs, 1e-10)?.value),
            DistanceMethod::FermatBruteforce => {
                Ok(fermat_bruteforce(gs, CenterSpace::BinaryGraphs, norm)?.value)
            }
            DistanceMethod::Scg => Ok(d_scg(gs, norm, cfg)?.value),
            DistanceMethod::Cg => Ok(d_cg(gs, norm, cfg)?.value),
        }
    }
}

impl std::str::FromStr for DistanceMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        DistanceMethod::ALL
            .iter()
            .find(|m| m.id() == s)
            .copied()
            .ok_or_else(|| Error::InvalidParams(format!("unknown distance method '{s}'")))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MetricViolation {
    pub description: String,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct MetricReport {
    pub method: DistanceMethod,
    pub trials: usize,
    pub skipped: usize,
    pub violations: Vec<MetricViolation>,
    pub max_violation: f64,
}

impl MetricReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Mixed-model random graph: model and parameters drawn from the rng, so
/// tuples rarely share a spectrum by accident.
pub fn random_model_graph(m: usize, rng: &mut impl Rng) -> Result<GraphMatrix> {
    let mut params = std::collections::BTreeMap::new();
    let model = match rng.gen_range(0..7u8) {
        0 => {
            params.insert("p".to_string(), rng.gen_range(0.2..0.8));
            GraphModel::ErdosRenyi
        }
        1 => {
            params.insert("k".to_string(), 2.0);
            GraphModel::BarabasiAlbert
        }
        2 => GraphModel::PowerLawTree,
        3 => GraphModel::Path,
        4 => GraphModel::Cycle,
        5 => GraphModel::Star,
        _ => {
            params.insert("k".to_string(), 2.0);
            params.insert("p".to_string(), 0.2);
            GraphModel::SmallWorld
        }
    };
    generate_graph(model, m, &params, rng.gen())
}

fn random_graph_set(n: usize, m: usize, rng: &mut impl Rng) -> Result<GraphSet> {
    let graphs = (0..n)
        .map(|_| random_model_graph(m, rng))
        .collect::<Result<Vec<_>>>()?;
    GraphSet::from_graphs(graphs)
}

/// Both sides of the generalized triangle inequality: the left side on `gs`,
/// the right side summing the distance over `gs` with each graph replaced in
/// turn by `extra`.
pub fn check_generalized_triangle(
    dist: DistanceMethod,
    gs: &GraphSet,
    extra: &GraphMatrix,
    tol: f64,
    cfg: &SolverConfig,
) -> Result<(f64, f64, bool)> {
    if extra.node_count() != gs.node_count() {
        return Err(Error::DimensionMismatch(format!(
            "extra graph has {} nodes, set has {}",
            extra.node_count(),
            gs.node_count()
        )));
    }
    let lhs = dist.evaluate(gs, NormKind::Frobenius, cfg)?;
    let mut rhs = 0.0;
    for i in 0..gs.len() {
        let mut graphs = gs.graphs().to_vec();
        graphs[i] = extra.clone();
        rhs += dist.evaluate(&GraphSet::from_graphs(graphs)?, NormKind::Frobenius, cfg)?;
    }
    Ok((lhs, rhs, lhs <= rhs + tol))
}

/// Randomized axiom suite: non-negativity, self-identity, order symmetry
/// under a random permutation, and the generalized triangle inequality with
/// a fresh extra graph, each within `tol`.
pub fn check_n_metric_axioms(
    dist: DistanceMethod,
    n: usize,
    m: usize,
    trials: usize,
    seed: u64,
    tol: f64,
    cfg: &SolverConfig,
) -> Result<MetricReport> {
    if n < 2 {
        return Err(Error::InvalidParams("need n >= 2".into()));
    }
    let results: Vec<Result<Vec<MetricViolation>>> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let trial_seed = seed ^ (trial as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
            let mut rng = ChaCha8Rng::seed_from_u64(trial_seed);
            let gs = random_graph_set(n, m, &mut rng)?;
            let extra = random_model_graph(m, &mut rng)?;
            let mut violations = Vec::new();
            let mut record = |description: String, lhs: f64, rhs: f64| {
                if lhs > rhs + tol {
                    violations.push(MetricViolation {
                        description,
                        lhs,
                        rhs,
                        margin: lhs - rhs,
                    });
                }
            };

            let value = dist.evaluate(&gs, NormKind::Frobenius, cfg)?;
            record(format!("trial {trial}: non-negativity"), 0.0 - value, 0.0);

            let first = gs.graphs()[0].clone();
            let same = GraphSet::from_graphs(vec![first; n])?;
            let self_value = dist.evaluate(&same, NormKind::Frobenius, cfg)?;
            record(format!("trial {trial}: self-identity"), self_value, 0.0);

            let sigma = random_permutation_vec(n, &mut rng);
            let permuted = dist.evaluate(&gs.reordered(&sigma)?, NormKind::Frobenius, cfg)?;
            record(
                format!("trial {trial}: order symmetry"),
                (value - permuted).abs(),
                0.0,
            );

            let (lhs, rhs, _) = check_generalized_triangle(dist, &gs, &extra, tol, cfg)?;
            record(format!("trial {trial}: generalized triangle"), lhs, rhs);
            Ok(violations)
        })
        .collect();

    let mut violations = Vec::new();
    for r in results {
        violations.extend(r?);
    }
    let max_violation = violations.iter().map(|v| v.margin).fold(0.0, f64::max);
    Ok(MetricReport {
        method: dist,
        trials,
        skipped: 0,
        violations,
        max_violation,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct CnEstimate {
    pub method: DistanceMethod,
    pub trials: usize,
    pub skipped: usize,
    pub max_ratio: f64,
    pub argmax: String,
}

/// Empirical largest ratio of the two triangle-inequality sides over random
/// tuples; degenerate denominators below 1e-12 are skipped and counted.
pub fn estimate_c_constant(
    dist: DistanceMethod,
    n: usize,
    m: usize,
    trials: usize,
    seed: u64,
    cfg: &SolverConfig,
) -> Result<CnEstimate> {
    let results: Vec<Result<Option<(f64, u64)>>> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let trial_seed = seed ^ (trial as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
            let mut rng = ChaCha8Rng::seed_from_u64(trial_seed);
            let gs = random_graph_set(n, m, &mut rng)?;
            let extra = random_model_graph(m, &mut rng)?;
            let (lhs, rhs, _) = check_generalized_triangle(dist, &gs, &extra, 0.0, cfg)?;
            if rhs < 1e-12 {
                return Ok(None);
            }
            Ok(Some((lhs / rhs, trial_seed)))
        })
        .collect();

    let mut max_ratio = 0.0;
    let mut argmax = String::from("none");
    let mut skipped = 0;
    for r in results {
        match r? {
            None => skipped += 1,
            Some((ratio, trial_seed)) => {
                if ratio > max_ratio {
                    max_ratio = ratio;
                    argmax = format!("tuple seed {trial_seed}");
                }
            }
        }
    }
    Ok(CnEstimate {
        method: dist,
        trials,
        skipped,
        max_ratio,
        argmax,
    })
}

/// Pairwise distances usable for diameter estimation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PairwiseMethod {
    /// Euclidean distance between sorted spectra.
    Spectral,
    /// Exact permutation-alignment distance (small graphs only).
    Exact,
}

impl std::str::FromStr for PairwiseMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "spectral" => Ok(PairwiseMethod::Spectral),
            "exact" => Ok(PairwiseMethod::Exact),
            _ => Err(Error::InvalidParams(format!(
                "unknown pairwise method '{s}'"
            ))),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DiameterEstimate {
    pub delta_hat: f64,
    pub exact_delta: f64,
    /// `delta_hat / exact_delta`, defined as 1 when the exact diameter is 0.
    pub ratio: f64,
    pub sampled_pairs: usize,
}

/// Exact diameter by all-pairs evaluation, plus a sampled estimate using
/// `budget` uniformly random pairs. If the budget covers all pairs the
/// sampling is exhaustive.
pub fn estimate_diameter(
    gs: &GraphSet,
    method: PairwiseMethod,
    budget: usize,
    seed: u64,
) -> Result<DiameterEstimate> {
    let n = gs.len();
    if n < 2 {
        return Err(Error::InvalidParams("need at least two graphs".into()));
    }

    // Cache spectra so the all-pairs pass is O(n^2) vector distances.
    let spectra = match method {
        PairwiseMethod::Spectral => Some(
            gs.graphs()
                .iter()
                .map(|g| Ok(sorted_eigen(g.entries())?.0))
                .collect::<Result<Vec<_>>>()?,
        ),
        PairwiseMethod::Exact => None,
    };
    let pair_distance = |i: usize, j: usize| -> Result<f64> {
        match &spectra {
            Some(s) => Ok((&s[i] - &s[j]).norm()),
            None => {
                let m = gs.node_count();
                Ok(sb_distance_exact(
                    &gs.graphs()[i],
                    &gs.graphs()[j],
                    &BiasMatrix::zero(m),
                    NormKind::Frobenius,
                )?
                .0)
            }
        }
    };

    let mut exact_delta: f64 = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            exact_delta = exact_delta.max(pair_distance(i, j)?);
        }
    }

    let all_pairs = n * (n - 1) / 2;
    let mut delta_hat: f64 = 0.0;
    let sampled = budget.min(all_pairs);
    if budget >= all_pairs {
        delta_hat = exact_delta;
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..budget {
            let i = rng.gen_range(0..n);
            let mut j = rng.gen_range(0..n - 1);
            if j >= i {
                j += 1;
            }
            delta_hat = delta_hat.max(pair_distance(i, j)?);
        }
    }

    let ratio = if exact_delta <= 1e-15 {
        1.0
    } else {
        delta_hat / exact_delta
    };
    Ok(DiameterEstimate {
        delta_hat,
        exact_delta,
        ratio,
        sampled_pairs: sampled,
    })
}
