//! Dense symmetric linear algebra: spectra, matrix norms, convex projections,
//! and the Weiszfeld geometric median.
//!
//! Eigenvalues are sorted ascending everywhere in this crate.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphs::GraphMatrix;

/// Sorted (ascending) eigenvalue vector of a symmetric matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    values: DVector<f64>,
}

impl Spectrum {
    pub fn values(&self) -> &DVector<f64> {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Matrix norm selector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormKind {
    Frobenius,
    Operator2,
    /// Entrywise p-norm, `p >= 1`.
    EntrywiseP(f64),
}

impl NormKind {
    pub fn validate(self) -> Result<()> {
        if let NormKind::EntrywiseP(p) = self {
            if p.is_nan() || p < 1.0 {
                return Err(Error::InvalidParams(format!("entrywise norm needs p >= 1, got {p}")));
            }
        }
        Ok(())
    }
}

impl std::str::FromStr for NormKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let kind = match s {
            "frobenius" => NormKind::Frobenius,
            "operator2" => NormKind::Operator2,
            other => match other.strip_prefix("p:") {
                Some(val) => NormKind::EntrywiseP(val.parse().map_err(|_| {
                    Error::InvalidParams(format!("bad norm spec '{other}'"))
                })?),
                None => return Err(Error::InvalidParams(format!("unknown norm '{other}'"))),
            },
        };
        kind.validate()?;
        Ok(kind)
    }
}

/// Evaluate `|||M|||` under `kind`.
pub fn matrix_norm(m: &DMatrix<f64>, kind: NormKind) -> f64 {
    match kind {
        NormKind::Frobenius => m.iter().map(|x| x * x).sum::<f64>().sqrt(),
        NormKind::Operator2 => {
            if m.iter().all(|&x| x == 0.0) {
                0.0
            } else {
                m.clone().svd(false, false).singular_values.max()
            }
        }
        NormKind::EntrywiseP(p) => m
            .iter()
            .map(|x| x.abs().powf(p))
            .sum::<f64>()
            .powf(1.0 / p),
    }
}

/// Sum of singular values.
pub fn nuclear_norm(m: &DMatrix<f64>) -> f64 {
    m.clone().svd(false, false).singular_values.iter().sum()
}

/// Ascending eigendecomposition of a symmetric matrix.
///
/// Returns `(values, vectors)` with `A = V diag(values) V^T` and columns of
/// `V` in the same ascending order. The reconstruction residual is verified
/// to satisfy `||A - V L V^T||_F <= 1e-8 (1 + ||A||_F)`.
pub fn sorted_eigen(a: &DMatrix<f64>) -> Result<(DVector<f64>, DMatrix<f64>)> {
    let m = a.nrows();
    let scale = 1.0 + matrix_norm(a, NormKind::Frobenius);
    let check = |values: &DVector<f64>, vectors: &DMatrix<f64>| -> f64 {
        let recon = vectors * DMatrix::from_diagonal(values) * vectors.transpose();
        matrix_norm(&(a - &recon), NormKind::Frobenius)
    };
    let sort = |raw_values: DVector<f64>, raw_vectors: DMatrix<f64>| {
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by(|&i, &j| raw_values[i].total_cmp(&raw_values[j]));
        let values = DVector::from_fn(m, |i, _| raw_values[order[i]]);
        let vectors = DMatrix::from_fn(m, m, |r, c| raw_vectors[(r, order[c])]);
        (values, vectors)
    };

    let sym = nalgebra::SymmetricEigen::new(a.clone());
    let (values, vectors) = sort(sym.eigenvalues, sym.eigenvectors);
    if check(&values, &vectors) <= 1e-8 * scale {
        return Ok((values, vectors));
    }

    // The QR iteration occasionally misconverges on clustered spectra; fall
    // back to cyclic Jacobi, which is slower but dependable.
    let (raw_values, raw_vectors) = jacobi_eigen(a);
    let (values, vectors) = sort(raw_values, raw_vectors);
    let residual = check(&values, &vectors);
    if residual > 1e-8 * scale {
        return Err(Error::NonConvergence {
            iters: 0,
            residual,
        });
    }
    Ok((values, vectors))
}

/// Cyclic Jacobi eigendecomposition of a symmetric matrix; eigenvalues on
/// the diagonal of the rotated matrix, accumulated rotations as vectors.
fn jacobi_eigen(a: &DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let m = a.nrows();
    let mut b = (a + a.transpose()) * 0.5;
    let mut v = DMatrix::<f64>::identity(m, m);
    let off = |b: &DMatrix<f64>| -> f64 {
        let mut sum = 0.0;
        for i in 0..m {
            for j in 0..m {
                if i != j {
                    sum += b[(i, j)] * b[(i, j)];
                }
            }
        }
        sum.sqrt()
    };
    let threshold = 1e-14 * (1.0 + b.norm());
    for _ in 0..100 {
        if off(&b) <= threshold {
            break;
        }
        for p in 0..m {
            for q in p + 1..m {
                if b[(p, q)].abs() <= threshold / (m * m) as f64 {
                    continue;
                }
                let theta = (b[(q, q)] - b[(p, p)]) / (2.0 * b[(p, q)]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..m {
                    let bkp = b[(k, p)];
                    let bkq = b[(k, q)];
                    b[(k, p)] = c * bkp - s * bkq;
                    b[(k, q)] = s * bkp + c * bkq;
                }
                for k in 0..m {
                    let bpk = b[(p, k)];
                    let bqk = b[(q, k)];
                    b[(p, k)] = c * bpk - s * bqk;
                    b[(q, k)] = s * bpk + c * bqk;
                }
                for k in 0..m {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    (b.diagonal(), v)
}

/// Ascending eigenvalues of a graph matrix.
pub fn sorted_spectrum(a: &GraphMatrix) -> Result<Spectrum> {
    let (values, _) = sorted_eigen(a.entries())?;
    Ok(Spectrum { values })
}

/// Nearest positive semidefinite matrix in Frobenius norm.
///
/// The input is symmetrized as `(M + M^T)/2` first; negative eigenvalues are
/// clipped to zero.
pub fn project_psd(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let sym = (m + m.transpose()) * 0.5;
    let (values, vectors) = sorted_eigen(&sym)?;
    let clipped = values.map(|v| v.max(0.0));
    Ok(&vectors * DMatrix::from_diagonal(&clipped) * vectors.transpose())
}

/// Projection onto the affine space of matrices with unit row and column sums.
fn project_sum_affine(x: &DMatrix<f64>) -> DMatrix<f64> {
    let m = x.nrows() as f64;
    let row_sums: Vec<f64> = (0..x.nrows()).map(|i| x.row(i).sum()).collect();
    let col_sums: Vec<f64> = (0..x.ncols()).map(|j| x.column(j).sum()).collect();
    let total: f64 = row_sums.iter().sum();
    let shift = (m - total) / (m * m);
    DMatrix::from_fn(x.nrows(), x.ncols(), |i, j| {
        x[(i, j)] + (1.0 - row_sums[i]) / m + (1.0 - col_sums[j]) / m - shift
    })
}

/// Project onto the Birkhoff polytope (doubly stochastic matrices) by
/// Dykstra's alternating projection between the unit row/column-sum affine
/// space and the nonnegative orthant.
pub fn project_birkhoff(m: &DMatrix<f64>, tol: f64, max_iter: usize) -> Result<DMatrix<f64>> {
    let n = m.nrows();
    if n != m.ncols() {
        return Err(Error::NonSquare {
            rows: n,
            cols: m.ncols(),
        });
    }
    let mut x = m.clone();
    let mut increment = DMatrix::zeros(n, n); // Dykstra correction for the orthant
    let mut result = None;
    for _ in 0..max_iter {
        let y = project_sum_affine(&x);
        let corrected = &y + &increment;
        let z = corrected.map(|v| v.max(0.0));
        increment = corrected - &z;

        let row_err = (0..n)
            .map(|i| (z.row(i).sum() - 1.0).abs())
            .fold(0.0, f64::max);
        let col_err = (0..n)
            .map(|j| (z.column(j).sum() - 1.0).abs())
            .fold(0.0, f64::max);
        let neg_err = z.iter().fold(0.0f64, |acc, &v| acc.max(-v));
        if row_err.max(col_err).max(neg_err) <= tol {
            result = Some(z);
            break;
        }
        x = z;
    }
    let z = result.ok_or_else(|| {
        let row_err = (0..n)
            .map(|i| (x.row(i).sum() - 1.0).abs())
            .fold(0.0, f64::max);
        Error::NonConvergence {
            iters: max_iter,
            residual: row_err,
        }
    })?;
    // Clamp round-off into [0, 1].
    Ok(z.map(|v| v.clamp(0.0, 1.0)))
}

/// Euclidean projection of a nonnegative vector onto the l1 ball of the given
/// radius (soft-thresholding with a water-filling threshold).
fn project_l1_nonneg(values: &[f64], radius: f64) -> Vec<f64> {
    let total: f64 = values.iter().sum();
    if total <= radius {
        return values.to_vec();
    }
    let mut sorted: Vec<f64> = values.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumulative = 0.0;
    let mut theta = 0.0;
    for (k, &v) in sorted.iter().enumerate() {
        cumulative += v;
        let t = (cumulative - radius) / (k as f64 + 1.0);
        if k + 1 == sorted.len() || sorted[k + 1] <= t {
            theta = t;
            break;
        }
    }
    values.iter().map(|&v| (v - theta).max(0.0)).collect()
}

/// Project onto the nuclear-norm ball of the given radius: SVD, shrink the
/// singular values onto the l1 ball, recompose. A no-op if already inside.
pub fn project_nuclear_ball(m: &DMatrix<f64>, radius: f64) -> Result<DMatrix<f64>> {
    if radius <= 0.0 {
        return Err(Error::InvalidParams("radius must be > 0".into()));
    }
    let svd = m.clone().svd(true, true);
    let current: f64 = svd.singular_values.iter().sum();
    if current <= radius {
        return Ok(m.clone());
    }
    let shrunk = project_l1_nonneg(svd.singular_values.as_slice(), radius);
    let u = svd.u.ok_or(Error::NonConvergence {
        iters: 0,
        residual: f64::NAN,
    })?;
    let v_t = svd.v_t.ok_or(Error::NonConvergence {
        iters: 0,
        residual: f64::NAN,
    })?;
    let sigma = DVector::from_vec(shrunk);
    Ok(&u * DMatrix::from_diagonal(&sigma) * v_t)
}

/// Weiszfeld iteration for the geometric median of `points`.
///
/// Starts at the coordinatewise mean; returns the point together with the
/// objective `sum_i ||x_i - c||`. Converged when the subgradient-optimality
/// residual is at most `tol`. If an iterate lands on a data point, the
/// standard subgradient test decides optimality; otherwise the modified step
/// excluding the coincident point is taken.
pub fn geometric_median(
    points: &[DVector<f64>],
    tol: f64,
    max_iter: usize,
) -> Result<(DVector<f64>, f64)> {
    if points.is_empty() {
        return Err(Error::InvalidParams("need at least one point".into()));
    }
    let dim = points[0].len();
    if points.iter().any(|p| p.len() != dim) {
        return Err(Error::DimensionMismatch("points of unequal dimension".into()));
    }
    let objective = |c: &DVector<f64>| points.iter().map(|p| (p - c).norm()).sum::<f64>();

    let mut c: DVector<f64> =
        points.iter().fold(DVector::zeros(dim), |acc, p| acc + p) / points.len() as f64;

    const COINCIDENT: f64 = 1e-12;
    for _ in 0..max_iter {
        // Pull of the non-coincident points and multiplicity of coincident ones.
        let mut pull = DVector::zeros(dim);
        let mut coincident = 0usize;
        for p in points {
            let d = (p - &c).norm();
            if d < COINCIDENT {
                coincident += 1;
            } else {
                pull += (p - &c) / d;
            }
        }
        let residual = (pull.norm() - coincident as f64).max(0.0);
        if residual <= tol {
            return Ok((c.clone(), objective(&c)));
        }

        // Weiszfeld step over the non-coincident points, nudged along the
        // subgradient direction when sitting on a non-optimal data point.
        let mut num = DVector::zeros(dim);
        let mut den = 0.0;
        for p in points {
            let d = (p - &c).norm();
            if d >= COINCIDENT {
                num += p / d;
                den += 1.0 / d;
            }
        }
        if den == 0.0 {
            // All points coincide with the iterate.
            return Ok((c.clone(), objective(&c)));
        }
        let step = num / den;
        if coincident > 0 {
            let beta = (1.0 - coincident as f64 / pull.norm()).max(0.0);
            c = step * beta + &c * (1.0 - beta);
        } else {
            c = step;
        }
    }
    let mut pull = DVector::zeros(dim);
    let mut coincident = 0usize;
    for p in points {
        let d = (p - &c).norm();
        if d < COINCIDENT {
            coincident += 1;
        } else {
            pull += (p - &c) / d;
        }
    }
    Err(Error::NonConvergence {
        iters: max_iter,
        residual: (pull.norm() - coincident as f64).max(0.0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::{generate_graph, GraphModel};
    use approx::assert_abs_diff_eq;
    use std::collections::BTreeMap;

    fn graph(model: GraphModel, m: usize) -> GraphMatrix {
        generate_graph(model, m, &BTreeMap::new(), 0).unwrap()
    }

    #[test]
    fn spectrum_of_empty_graph_is_zero() {
        let s = sorted_spectrum(&graph(GraphModel::Empty, 3)).unwrap();
        assert_eq!(s.values().as_slice(), &[0.0, 0.0, 0.0]);
    }

    #[test]
    fn spectrum_of_k3() {
        let s = sorted_spectrum(&graph(GraphModel::Complete, 3)).unwrap();
        assert_abs_diff_eq!(s.values()[0], -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s.values()[1], -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s.values()[2], 2.0, epsilon = 1e-12);
    }

    #[test]
    fn spectrum_of_p3() {
        let s = sorted_spectrum(&graph(GraphModel::Path, 3)).unwrap();
        let r2 = 2.0f64.sqrt();
        assert_abs_diff_eq!(s.values()[0], -r2, epsilon = 1e-12);
        assert_abs_diff_eq!(s.values()[1], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s.values()[2], r2, epsilon = 1e-12);
    }

    #[test]
    fn norms_on_simple_matrices() {
        let zero = DMatrix::<f64>::zeros(3, 3);
        for kind in [NormKind::Frobenius, NormKind::Operator2, NormKind::EntrywiseP(1.5)] {
            assert_eq!(matrix_norm(&zero, kind), 0.0);
        }
        let id = DMatrix::<f64>::identity(3, 3);
        assert_abs_diff_eq!(matrix_norm(&id, NormKind::Frobenius), 3.0f64.sqrt());
        assert_abs_diff_eq!(matrix_norm(&id, NormKind::Operator2), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn nuclear_norm_examples() {
        let id = DMatrix::<f64>::identity(8, 8);
        assert_abs_diff_eq!(nuclear_norm(&id), 8.0, epsilon = 1e-10);
        let d = DMatrix::from_diagonal(&DVector::from_vec(vec![3.0, -4.0]));
        assert_abs_diff_eq!(nuclear_norm(&d), 7.0, epsilon = 1e-12);
    }

    #[test]
    fn psd_projection_examples() {
        let d = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, -1.0]));
        let p = project_psd(&d).unwrap();
        assert_abs_diff_eq!(p[(0, 0)], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(p[(1, 1)], 0.0, epsilon = 1e-12);

        let neg = -DMatrix::<f64>::identity(3, 3);
        let p = project_psd(&neg).unwrap();
        assert!(p.iter().all(|&v| v.abs() < 1e-12));

        let psd = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 2.0]);
        let p = project_psd(&psd).unwrap();
        assert_abs_diff_eq!((p - psd).norm(), 0.0, epsilon = 1e-10);
    }

    #[test]
    fn birkhoff_projection_examples() {
        // Permutation matrix maps to itself.
        let perm = DMatrix::from_row_slice(3, 3, &[0., 1., 0., 1., 0., 0., 0., 0., 1.]);
        let p = project_birkhoff(&perm, 1e-9, 10000).unwrap();
        assert_abs_diff_eq!((&p - &perm).norm(), 0.0, epsilon = 1e-8);

        // All-ones maps to the barycenter.
        let ones = DMatrix::from_element(3, 3, 1.0);
        let p = project_birkhoff(&ones, 1e-9, 10000).unwrap();
        for v in p.iter() {
            assert_abs_diff_eq!(*v, 1.0 / 3.0, epsilon = 1e-8);
        }

        // Idempotent on a doubly stochastic input.
        let ds = DMatrix::from_row_slice(2, 2, &[0.3, 0.7, 0.7, 0.3]);
        let p = project_birkhoff(&ds, 1e-9, 10000).unwrap();
        assert_abs_diff_eq!((&p - &ds).norm(), 0.0, epsilon = 1e-8);
    }

    #[test]
    fn nuclear_ball_projection_examples() {
        let id = DMatrix::<f64>::identity(4, 4);
        let p = project_nuclear_ball(&id, 2.0).unwrap();
        assert_abs_diff_eq!((&p - &id * 0.5).norm(), 0.0, epsilon = 1e-10);

        let inside = DMatrix::from_row_slice(2, 2, &[0.1, 0.0, 0.0, 0.1]);
        let p = project_nuclear_ball(&inside, 1.0).unwrap();
        assert_eq!(p, inside);

        let u = DVector::from_vec(vec![1.0, 2.0]);
        let rank1 = &u * u.transpose(); // nuclear norm = ||u||^2 = 5
        let p = project_nuclear_ball(&rank1, 1.0).unwrap();
        assert_abs_diff_eq!((&p - &rank1 / 5.0).norm(), 0.0, epsilon = 1e-10);
    }

    #[test]
    fn geometric_median_examples() {
        let x = DVector::from_vec(vec![1.0, 2.0]);
        let pts = vec![x.clone(), x.clone(), x.clone()];
        let (c, obj) = geometric_median(&pts, 1e-9, 10000).unwrap();
        assert_abs_diff_eq!((c - x).norm(), 0.0, epsilon = 1e-9);
        assert_abs_diff_eq!(obj, 0.0, epsilon = 1e-9);

        // Equilateral triangle: the median is the centroid.
        let a = DVector::from_vec(vec![0.0, 0.0]);
        let b = DVector::from_vec(vec![1.0, 0.0]);
        let c3 = DVector::from_vec(vec![0.5, 3.0f64.sqrt() / 2.0]);
        let centroid = (&a + &b + &c3) / 3.0;
        let (med, _) = geometric_median(&[a, b, c3], 1e-9, 10000).unwrap();
        assert_abs_diff_eq!((med - centroid).norm(), 0.0, epsilon = 1e-7);

        // Two points: objective equals their distance.
        let a = DVector::from_vec(vec![0.0, 1.0, 0.0]);
        let b = DVector::from_vec(vec![2.0, -1.0, 1.0]);
        let dist = (&a - &b).norm();
        let (_, obj) = geometric_median(&[a, b], 1e-9, 10000).unwrap();
        assert_abs_diff_eq!(obj, dist, epsilon = 1e-9);
    }

    #[test]
    fn norm_parsing() {
        use std::str::FromStr;
        assert_eq!(NormKind::from_str("frobenius").unwrap(), NormKind::Frobenius);
        assert_eq!(NormKind::from_str("operator2").unwrap(), NormKind::Operator2);
        assert_eq!(NormKind::from_str("p:1.5").unwrap(), NormKind::EntrywiseP(1.5));
        assert!(NormKind::from_str("p:0.5").is_err());
        assert!(NormKind::from_str("spectral").is_err());
    }
}
