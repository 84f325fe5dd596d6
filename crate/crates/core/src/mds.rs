//! Multidimensional scaling.
//!
//! [`classical_mds`] is the spectral (Torgerson) method: double-center the
//! squared distances and embed with the top eigenpairs. [`smacof`] refines a
//! configuration by stress majorization (Guttman transforms), which never
//! increases the raw stress.

use crate::error::MdsError;
use crate::linalg::{euclidean, symmetric_eigen, Matrix};

/// Largest tolerated `|d_ij - d_ji|`.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Eigenvalues below this fraction of the largest magnitude are solver
/// round-off and contribute no coordinate.
pub const EIGEN_NOISE_RTOL: f64 = 1e-10;

/// Symmetric, nonnegative, zero-diagonal `n x n` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    values: Matrix,
}

impl DistanceMatrix {
    pub fn new(values: Matrix) -> Result<Self, MdsError> {
        if values.rows() != values.cols() {
            return Err(MdsError::ShapeMismatch {
                expected_rows: values.rows(),
                expected_cols: values.rows(),
                actual_rows: values.rows(),
                actual_cols: values.cols(),
            });
        }
        if values.as_slice().iter().any(|v| !v.is_finite()) {
            return Err(MdsError::NonFinite);
        }
        let n = values.rows();
        for i in 0..n {
            if values[(i, i)] != 0.0 {
                return Err(MdsError::NonzeroDiagonal(i));
            }
            for j in 0..n {
                if values[(i, j)] < 0.0 {
                    return Err(MdsError::Negative { row: i, col: j });
                }
            }
        }
        let asym = values.asymmetry().unwrap_or(0.0);
        if asym > SYMMETRY_TOL {
            return Err(MdsError::Asymmetric(asym));
        }
        Ok(Self { values })
    }

    pub fn n(&self) -> usize {
        self.values.rows()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[(i, j)]
    }

    pub fn as_matrix(&self) -> &Matrix {
        &self.values
    }
}

/// Euclidean distances between the rows of `points`. Each unordered pair is
/// computed once, so the result is exactly symmetric.
pub fn pairwise_distances(points: &Matrix) -> Result<DistanceMatrix, MdsError> {
    let n = points.rows();
    if n < 2 {
        return Err(MdsError::TooFewPoints {
            required: 2,
            actual: n,
        });
    }
    if points.as_slice().iter().any(|v| !v.is_finite()) {
        return Err(MdsError::NonFinite);
    }
    let mut values = Matrix::zeros(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            let d = euclidean(points.row(i), points.row(j));
            values[(i, j)] = d;
            values[(j, i)] = d;
        }
    }
    Ok(DistanceMatrix { values })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MdsMethod {
    Classical,
    Smacof,
}

impl MdsMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            MdsMethod::Classical => "classical",
            MdsMethod::Smacof => "smacof",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MdsResult {
    /// `n x k` embedding.
    pub coordinates: Matrix,
    /// All `n` eigenvalues of the double-centered matrix, descending and
    /// unclamped. Empty for a bare [`smacof`] run.
    pub eigenvalues: Vec<f64>,
    /// Stress of the starting configuration followed by one entry per
    /// accepted iteration. Empty for classical MDS.
    pub stress_trace: Vec<f64>,
    pub method: MdsMethod,
}

/// `B = -1/2 * J * D^2 * J` with `J = I - (1/n) * 1 * 1^T`.
pub fn double_center(dist: &DistanceMatrix) -> Matrix {
    let n = dist.n();
    let nf = n as f64;
    let mut sq = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let d = dist.get(i, j);
            sq[(i, j)] = d * d;
        }
    }
    let row_means: Vec<f64> = sq.iter_rows().map(|r| r.iter().sum::<f64>() / nf).collect();
    let grand = row_means.iter().sum::<f64>() / nf;
    let mut b = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let v = -0.5 * (sq[(i, j)] - row_means[i] - row_means[j] + grand);
            b[(i, j)] = v;
            b[(j, i)] = v;
        }
    }
    b
}

/// Flips each column so its largest-magnitude entry (first on ties) is
/// positive.
pub fn canonicalize_signs(coords: &mut Matrix) {
    for j in 0..coords.cols() {
        let mut best = 0.0f64;
        let mut best_val = 0.0;
        for i in 0..coords.rows() {
            let v = coords[(i, j)];
            if v.abs() > best {
                best = v.abs();
                best_val = v;
            }
        }
        if best_val < 0.0 {
            for i in 0..coords.rows() {
                coords[(i, j)] = -coords[(i, j)];
            }
        }
    }
}

/// Classical (Torgerson) MDS into `k` dimensions.
pub fn classical_mds(dist: &DistanceMatrix, k: usize) -> Result<MdsResult, MdsError> {
    let n = dist.n();
    if k == 0 {
        return Err(MdsError::InvalidParameter("k must be at least 1".into()));
    }
    let required = k.max(2);
    if n < required {
        return Err(MdsError::TooFewPoints {
            required,
            actual: n,
        });
    }

    let b = double_center(dist);
    let eig = symmetric_eigen(&b)?;
    let scale_ref = eig.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let noise = scale_ref * EIGEN_NOISE_RTOL;

    let mut coordinates = Matrix::zeros(n, k);
    for axis in 0..k {
        let lambda = eig.values[axis];
        if lambda <= noise {
            continue;
        }
        let s = lambda.sqrt();
        let v = eig.vectors.row(axis);
        for i in 0..n {
            coordinates[(i, axis)] = v[i] * s;
        }
    }
    canonicalize_signs(&mut coordinates);

    Ok(MdsResult {
        coordinates,
        eigenvalues: eig.values,
        stress_trace: Vec::new(),
        method: MdsMethod::Classical,
    })
}

/// Raw stress `sum_{i<j} (|x_i - x_j| - d_ij)^2`.
pub fn stress(dist: &DistanceMatrix, coords: &Matrix) -> f64 {
    let n = dist.n().min(coords.rows());
    let mut total = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            let r = euclidean(coords.row(i), coords.row(j)) - dist.get(i, j);
            total += r * r;
        }
    }
    total
}

/// One Guttman transform `X' = (1/n) * B(X) * X`.
fn guttman(dist: &DistanceMatrix, x: &Matrix) -> Matrix {
    let n = x.rows();
    let k = x.cols();
    let nf = n as f64;
    let mut out = Matrix::zeros(n, k);
    for i in 0..n {
        let xi = x.row(i);
        let mut diag = 0.0;
        let mut acc = vec![0.0; k];
        for j in 0..n {
            if j == i {
                continue;
            }
            let dij = euclidean(xi, x.row(j));
            if dij > 0.0 {
                let bij = -dist.get(i, j) / dij;
                diag -= bij;
                for (a, &xj) in acc.iter_mut().zip(x.row(j)) {
                    *a += bij * xj;
                }
            }
        }
        for (c, a) in acc.iter().enumerate() {
            out[(i, c)] = (a + diag * xi[c]) / nf;
        }
    }
    out
}

/// Stress majorization starting from `init`.
///
/// Stops when the relative stress decrease falls below `tol`, after
/// `max_iter` transforms, or when round-off makes a transform fail to
/// decrease the stress (that step is discarded). The recorded trace is
/// therefore nonincreasing.
pub fn smacof(
    dist: &DistanceMatrix,
    init: &Matrix,
    max_iter: usize,
    tol: f64,
) -> Result<MdsResult, MdsError> {
    let n = dist.n();
    if init.rows() != n || init.cols() == 0 {
        return Err(MdsError::ShapeMismatch {
            expected_rows: n,
            expected_cols: init.cols().max(1),
            actual_rows: init.rows(),
            actual_cols: init.cols(),
        });
    }
    if max_iter == 0 {
        return Err(MdsError::InvalidParameter(
            "max_iter must be at least 1".into(),
        ));
    }
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(MdsError::InvalidParameter(format!(
            "tol must be positive, got {tol}"
        )));
    }
    if init.as_slice().iter().any(|v| !v.is_finite()) {
        return Err(MdsError::NonFinite);
    }
    if dist.as_matrix().as_slice().iter().all(|&v| v == 0.0) {
        return Err(MdsError::Degenerate);
    }

    let mut x = init.clone();
    let mut current = stress(dist, &x);
    let mut trace = vec![current];
    for _ in 0..max_iter {
        if current == 0.0 {
            break;
        }
        let next = guttman(dist, &x);
        let s = stress(dist, &next);
        if s > current {
            break;
        }
        x = next;
        trace.push(s);
        let rel = (current - s) / current;
        current = s;
        if rel < tol {
            break;
        }
    }

    Ok(MdsResult {
        coordinates: x,
        eigenvalues: Vec::new(),
        stress_trace: trace,
        method: MdsMethod::Smacof,
    })
}

/// Classical MDS followed by SMACOF refinement seeded with its output. The
/// classical eigenvalues are kept in the result.
pub fn smacof_from_classical(
    dist: &DistanceMatrix,
    k: usize,
    max_iter: usize,
    tol: f64,
) -> Result<MdsResult, MdsError> {
    let seed = classical_mds(dist, k)?;
    let mut refined = smacof(dist, &seed.coordinates, max_iter, tol)?;
    refined.eigenvalues = seed.eigenvalues;
    Ok(refined)
}
