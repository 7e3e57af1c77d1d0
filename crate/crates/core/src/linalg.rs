//! Data containers and the small amount of dense linear algebra the depth
//! notions need: moment estimates of location and scatter, whitening, and
//! affine maps used by the invariance tests.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{DepthError, Result};

/// Condition numbers above this are treated as singular.
pub const MAX_CONDITION: f64 = 1e12;

/// `n` observations in `R^d`, stored row-major. All entries are finite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct DataMatrix {
    n: usize,
    d: usize,
    values: Vec<f64>,
}

impl DataMatrix {
    pub fn new(n: usize, d: usize, values: Vec<f64>) -> Result<Self> {
        if n == 0 || d == 0 {
            return Err(DepthError::EmptyData);
        }
        if values.len() != n * d {
            return Err(DepthError::InvalidInput(format!(
                "expected {} values for a {n}x{d} matrix, got {}",
                n * d,
                values.len()
            )));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(DepthError::InvalidInput(format!(
                "non-finite entry at row {}, column {}",
                pos / d,
                pos % d
            )));
        }
        Ok(Self { n, d, values })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let first = rows.first().ok_or(DepthError::EmptyData)?;
        let d = first.len();
        let mut values = Vec::with_capacity(rows.len() * d);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != d {
                return Err(DepthError::InvalidInput(format!(
                    "row {i} has {} columns, expected {d}",
                    r.len()
                )));
            }
            values.extend_from_slice(r);
        }
        Self::new(rows.len(), d, values)
    }

    #[inline]
    pub fn nrows(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn ncols(&self) -> usize {
        self.d
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.d..(i + 1) * self.d]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.values.chunks_exact(self.d)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.rows().map(<[f64]>::to_vec).collect()
    }

    /// Rows at `indices`, in the given order.
    pub fn select_rows(&self, indices: &[usize]) -> Result<Self> {
        let mut values = Vec::with_capacity(indices.len() * self.d);
        for &i in indices {
            if i >= self.n {
                return Err(DepthError::InvalidInput(format!("row index {i} out of range")));
            }
            values.extend_from_slice(self.row(i));
        }
        Self::new(indices.len(), self.d, values)
    }

    /// Projections `x_i^T u` of every row onto `u`, written into `out`.
    pub fn project_into(&self, u: &[f64], out: &mut Vec<f64>) {
        debug_assert_eq!(u.len(), self.d);
        out.clear();
        out.extend(self.rows().map(|r| dot(r, u)));
    }

    pub fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.d {
            return Err(DepthError::DimensionMismatch { expected: self.d, got: x.len() });
        }
        Ok(())
    }

    /// `A x_i + b` for every row; `a` is `d x d` row-major.
    pub fn affine_map(&self, a: &[f64], b: &[f64]) -> Result<Self> {
        let values = self.rows().flat_map(|r| affine_apply(a, b, r)).collect();
        Self::new(self.n, self.d, values)
    }

    pub fn column_means(&self) -> Vec<f64> {
        let mut mean = vec![0.0; self.d];
        for r in self.rows() {
            for (m, v) in mean.iter_mut().zip(r) {
                *m += v;
            }
        }
        mean.iter_mut().for_each(|m| *m /= self.n as f64);
        mean
    }
}

impl TryFrom<Vec<Vec<f64>>> for DataMatrix {
    type Error = DepthError;

    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        Self::from_rows(&rows)
    }
}

impl From<DataMatrix> for Vec<Vec<f64>> {
    fn from(m: DataMatrix) -> Self {
        m.to_rows()
    }
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// `A x + b` with `A` row-major `d x d`.
pub fn affine_apply(a: &[f64], b: &[f64], x: &[f64]) -> Vec<f64> {
    let d = x.len();
    (0..d).map(|i| dot(&a[i * d..(i + 1) * d], x) + b[i]).collect()
}

/// A vector on the unit sphere `S^{d-1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct UnitDirection(Vec<f64>);

impl UnitDirection {
    pub const NORM_TOLERANCE: f64 = 1e-9;

    /// Accepts a vector that is already unit length.
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        let nrm = norm(&coords);
        if coords.is_empty() || !nrm.is_finite() || (nrm - 1.0).abs() > Self::NORM_TOLERANCE {
            return Err(DepthError::InvalidInput(format!("not a unit vector (norm {nrm})")));
        }
        Ok(Self(coords))
    }

    /// Scales a nonzero vector onto the sphere; `None` for zero or non-finite input.
    pub fn normalize(mut coords: Vec<f64>) -> Option<Self> {
        let nrm = norm(&coords);
        if coords.is_empty() || !(nrm.is_finite() && nrm > 0.0) {
            return None;
        }
        coords.iter_mut().for_each(|c| *c /= nrm);
        Some(Self(coords))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn dot(&self, other: &UnitDirection) -> f64 {
        dot(&self.0, &other.0)
    }

    pub fn negated(&self) -> Self {
        Self(self.0.iter().map(|c| -c).collect())
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }
}

impl TryFrom<Vec<f64>> for UnitDirection {
    type Error = DepthError;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<UnitDirection> for Vec<f64> {
    fn from(u: UnitDirection) -> Self {
        u.0
    }
}

/// Location `mu` and symmetric positive-definite scatter `sigma`, together with
/// the inverse and determinant the depth notions consume.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocationScatter {
    pub mu: Vec<f64>,
    /// Row-major `d x d`.
    pub sigma: Vec<f64>,
    pub sigma_inv: Vec<f64>,
    pub sigma_det: f64,
}

impl LocationScatter {
    pub fn new(mu: Vec<f64>, sigma: Vec<f64>) -> Result<Self> {
        let d = mu.len();
        if d == 0 {
            return Err(DepthError::EmptyData);
        }
        if sigma.len() != d * d {
            return Err(DepthError::DimensionMismatch { expected: d * d, got: sigma.len() });
        }
        if mu.iter().chain(&sigma).any(|v| !v.is_finite()) {
            return Err(DepthError::SingularScatter("non-finite entries".into()));
        }
        let scale = sigma.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for i in 0..d {
            for j in (i + 1)..d {
                if (sigma[i * d + j] - sigma[j * d + i]).abs() > 1e-9 * scale.max(f64::MIN_POSITIVE) {
                    return Err(DepthError::InvalidInput("scatter matrix is not symmetric".into()));
                }
            }
        }
        let s = DMatrix::from_row_slice(d, d, &sigma);
        let eig = s.clone().symmetric_eigenvalues();
        let (lo, hi) = eig.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &e| (lo.min(e), hi.max(e)));
        if !(lo > 0.0) || hi / lo > MAX_CONDITION {
            return Err(DepthError::SingularScatter(format!(
                "eigenvalue range [{lo:e}, {hi:e}] exceeds condition cutoff {MAX_CONDITION:e}"
            )));
        }
        let chol = s
            .clone()
            .cholesky()
            .ok_or_else(|| DepthError::SingularScatter("Cholesky factorization failed".into()))?;
        let l = chol.l();
        let sigma_det = l.diagonal().iter().map(|v| v * v).product::<f64>();
        let inv = chol.inverse();
        let check = &inv * &s;
        let err = (check - DMatrix::<f64>::identity(d, d)).amax();
        if err > 1e-6 || !(sigma_det > 0.0) {
            return Err(DepthError::SingularScatter(format!("inverse check residual {err:e}")));
        }
        // symmetrize the inverse so quadratic forms are exactly symmetric
        let inv = (&inv + inv.transpose()) * 0.5;
        Ok(Self { mu, sigma, sigma_inv: row_major(&inv), sigma_det })
    }

    pub fn dim(&self) -> usize {
        self.mu.len()
    }

    /// Squared Mahalanobis distance `(x - mu)^T Sigma^{-1} (x - mu)`.
    pub fn mahalanobis_sq(&self, x: &[f64]) -> Result<f64> {
        let d = self.dim();
        if x.len() != d {
            return Err(DepthError::DimensionMismatch { expected: d, got: x.len() });
        }
        let diff: Vec<f64> = x.iter().zip(&self.mu).map(|(a, b)| a - b).collect();
        let mut q = 0.0;
        for i in 0..d {
            q += diff[i] * dot(&self.sigma_inv[i * d..(i + 1) * d], &diff);
        }
        Ok(q.max(0.0))
    }

    /// Lower-triangular `L` with `L^T L = Sigma^{-1}`: the inverse of the
    /// Cholesky factor of `Sigma`. Row-major.
    pub fn whitening_factor(&self) -> Result<Vec<f64>> {
        let d = self.dim();
        let chol = DMatrix::from_row_slice(d, d, &self.sigma)
            .cholesky()
            .ok_or_else(|| DepthError::SingularScatter("Cholesky factorization failed".into()))?;
        let l_inv = chol
            .l()
            .solve_lower_triangular(&DMatrix::identity(d, d))
            .ok_or_else(|| DepthError::SingularScatter("triangular solve failed".into()))?;
        Ok(row_major(&l_inv))
    }

    /// Eigenvalues (ascending) and matching unit eigenvectors of `sigma`.
    pub fn principal_axes(&self) -> (Vec<f64>, Vec<Vec<f64>>) {
        symmetric_eigen(&self.sigma, self.dim())
    }
}

fn row_major(m: &DMatrix<f64>) -> Vec<f64> {
    let (r, c) = m.shape();
    let mut out = Vec::with_capacity(r * c);
    for i in 0..r {
        for j in 0..c {
            out.push(m[(i, j)]);
        }
    }
    out
}

/// Eigen-decomposition of a symmetric row-major matrix. Eigenvalues ascending;
/// each eigenvector is sign-normalized so its largest-magnitude entry is positive.
pub fn symmetric_eigen(a: &[f64], d: usize) -> (Vec<f64>, Vec<Vec<f64>>) {
    let eig = DMatrix::from_row_slice(d, d, a).symmetric_eigen();
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = order
        .iter()
        .map(|&i| {
            let mut v: Vec<f64> = eig.eigenvectors.column(i).iter().copied().collect();
            let pivot = v.iter().copied().fold(0.0f64, |m, c| if c.abs() > m.abs() { c } else { m });
            if pivot < 0.0 {
                v.iter_mut().for_each(|c| *c = -*c);
            }
            v
        })
        .collect();
    (values, vectors)
}

/// Lower Cholesky factor of a symmetric positive-definite row-major matrix.
pub fn cholesky_lower(a: &[f64], d: usize) -> Result<Vec<f64>> {
    let chol = DMatrix::from_row_slice(d, d, a)
        .cholesky()
        .ok_or_else(|| DepthError::SingularScatter("Cholesky factorization failed".into()))?;
    Ok(row_major(&chol.l()))
}

/// Determinant of a square row-major matrix (LU).
pub fn determinant(a: &[f64], d: usize) -> f64 {
    DMatrix::from_row_slice(d, d, a).determinant()
}

/// Solve `A x = b` for square row-major `A`; `None` when singular.
pub fn solve(a: &[f64], b: &[f64]) -> Option<Vec<f64>> {
    let d = b.len();
    let lu = DMatrix::from_row_slice(d, d, a).lu();
    lu.solve(&DVector::from_column_slice(b)).map(|v| v.iter().copied().collect())
}

/// Sample mean and unbiased (divisor `n - 1`), mean-centered covariance.
pub fn moment_estimates(data: &DataMatrix) -> Result<LocationScatter> {
    let (n, d) = (data.nrows(), data.ncols());
    if n <= d {
        return Err(DepthError::SingularScatter(format!(
            "need more than d = {d} observations, got {n}"
        )));
    }
    let mu = data.column_means();
    let mut cov = vec![0.0; d * d];
    let mut centered = vec![0.0; d];
    for r in data.rows() {
        for (c, (v, m)) in centered.iter_mut().zip(r.iter().zip(&mu)) {
            *c = v - m;
        }
        for i in 0..d {
            for j in i..d {
                cov[i * d + j] += centered[i] * centered[j];
            }
        }
    }
    let denom = (n - 1) as f64;
    for i in 0..d {
        for j in i..d {
            let v = cov[i * d + j] / denom;
            cov[i * d + j] = v;
            cov[j * d + i] = v;
        }
    }
    LocationScatter::new(mu, cov)
}

/// `L (x_i - mu)` for every row, with `L^T L = Sigma^{-1}`.
pub fn whiten(data: &DataMatrix, ls: &LocationScatter) -> Result<DataMatrix> {
    let d = data.ncols();
    if ls.dim() != d {
        return Err(DepthError::DimensionMismatch { expected: ls.dim(), got: d });
    }
    let l = ls.whitening_factor()?;
    let mut values = Vec::with_capacity(data.nrows() * d);
    let mut centered = vec![0.0; d];
    for r in data.rows() {
        for (c, (v, m)) in centered.iter_mut().zip(r.iter().zip(&ls.mu)) {
            *c = v - m;
        }
        for i in 0..d {
            // L is lower triangular
            values.push(dot(&l[i * d..i * d + i + 1], &centered[..i + 1]));
        }
    }
    DataMatrix::new(data.nrows(), d, values)
}
