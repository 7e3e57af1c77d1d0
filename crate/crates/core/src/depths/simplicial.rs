//! Simplicial depth and simplicial volume (Oja) depth, by full enumeration of
//! index subsets or by Monte Carlo sampling of them.

use rand::seq::index::sample;
use rayon::prelude::*;

use super::{binomial, Combinations, DepthNotion, DepthValue, Exactness, COMBINATORIAL_BUDGET};
use crate::error::{DepthError, Result};
use crate::linalg::{determinant, norm, DataMatrix, LocationScatter};
use crate::seeding::{derive, rng_from};

/// Barycentric coordinates above `-BARY_TOL` count as inside.
const BARY_TOL: f64 = 1e-12;
/// Relative determinant size below which a simplex is treated as flat.
const DEGENERATE_TOL: f64 = 1e-12;
/// Draws per Monte Carlo work unit; fixed so results do not depend on the
/// number of workers.
const MC_CHUNK: usize = 4096;

/// The per-simplex statistic averaged by [`monte_carlo_simplex_depth`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SimplexNotion {
    Simplicial,
    SimplicialVolume,
    SimplicialVolumeAffineInvariant,
}

impl SimplexNotion {
    fn depth_notion(self) -> DepthNotion {
        match self {
            SimplexNotion::Simplicial => DepthNotion::Simplicial,
            SimplexNotion::SimplicialVolume => DepthNotion::SimplicialVolume,
            SimplexNotion::SimplicialVolumeAffineInvariant => DepthNotion::SimplicialVolumeAffineInvariant,
        }
    }

    fn subset_size(self, d: usize) -> usize {
        match self {
            SimplexNotion::Simplicial => d + 1,
            _ => d,
        }
    }
}

impl TryFrom<DepthNotion> for SimplexNotion {
    type Error = DepthError;

    fn try_from(n: DepthNotion) -> Result<Self> {
        match n {
            DepthNotion::Simplicial => Ok(SimplexNotion::Simplicial),
            DepthNotion::SimplicialVolume => Ok(SimplexNotion::SimplicialVolume),
            DepthNotion::SimplicialVolumeAffineInvariant => Ok(SimplexNotion::SimplicialVolumeAffineInvariant),
            other => Err(DepthError::InvalidInput(format!("{other} is not a simplex-based notion"))),
        }
    }
}

/// Does the closed convex hull of `vertices` contain `x`?
///
/// A full-dimensional simplex is decided by its barycentric coordinates. A
/// flat one (fewer affinely independent points than vertices) contains `x`
/// exactly when one of its faces does, which is checked recursively.
pub fn simplex_contains(vertices: &[&[f64]], x: &[f64]) -> bool {
    let k = vertices.len();
    if k == 0 {
        return false;
    }
    let d = x.len();
    let p0 = vertices[0];
    if k == 1 {
        return p0.iter().zip(x).all(|(a, b)| (a - b).abs() <= BARY_TOL);
    }
    // edges as columns, k - 1 of them in R^d
    let edges: Vec<Vec<f64>> =
        vertices[1..].iter().map(|p| p.iter().zip(p0).map(|(a, b)| a - b).collect()).collect();
    let rhs: Vec<f64> = x.iter().zip(p0).map(|(a, b)| a - b).collect();
    let m = k - 1;
    let edge_scale: f64 = edges.iter().map(|e| norm(e)).product();

    let coords = if m == d {
        let mut a = vec![0.0; d * d];
        for (j, e) in edges.iter().enumerate() {
            for i in 0..d {
                a[i * d + j] = e[i];
            }
        }
        let det = determinant(&a, d);
        if det.abs() <= DEGENERATE_TOL * edge_scale || edge_scale == 0.0 {
            None
        } else {
            solve_small(&a, &rhs, d)
        }
    } else if m < d {
        // least squares in the affine hull, then require a zero residual
        let mut g = vec![0.0; m * m];
        let mut b = vec![0.0; m];
        for i in 0..m {
            for j in 0..m {
                g[i * m + j] = crate::linalg::dot(&edges[i], &edges[j]);
            }
            b[i] = crate::linalg::dot(&edges[i], &rhs);
        }
        let gram_det = determinant(&g, m);
        if gram_det.abs() <= DEGENERATE_TOL * edge_scale * edge_scale || edge_scale == 0.0 {
            None
        } else {
            match solve_small(&g, &b, m) {
                Some(c) => {
                    let resid: Vec<f64> = (0..d)
                        .map(|i| rhs[i] - (0..m).map(|j| c[j] * edges[j][i]).sum::<f64>())
                        .collect();
                    let scale = 1.0 + norm(&rhs) + edges.iter().map(|e| norm(e)).fold(0.0, f64::max);
                    if norm(&resid) > BARY_TOL * scale {
                        return false;
                    }
                    Some(c)
                }
                None => None,
            }
        }
    } else {
        None
    };

    match coords {
        Some(c) => {
            let first = 1.0 - c.iter().sum::<f64>();
            first >= -BARY_TOL && c.iter().all(|&l| l >= -BARY_TOL)
        }
        None => (0..k).any(|skip| {
            let face: Vec<&[f64]> =
                vertices.iter().enumerate().filter(|(i, _)| *i != skip).map(|(_, v)| *v).collect();
            simplex_contains(&face, x)
        }),
    }
}

/// Gaussian elimination with partial pivoting on a small row-major system.
fn solve_small(a: &[f64], b: &[f64], n: usize) -> Option<Vec<f64>> {
    let mut m = a.to_vec();
    let mut r = b.to_vec();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| m[i * n + col].abs().total_cmp(&m[j * n + col].abs()))?;
        if m[piv * n + col] == 0.0 {
            return None;
        }
        if piv != col {
            for k in 0..n {
                m.swap(col * n + k, piv * n + k);
            }
            r.swap(col, piv);
        }
        for row in col + 1..n {
            let f = m[row * n + col] / m[col * n + col];
            if f != 0.0 {
                for k in col..n {
                    m[row * n + k] -= f * m[col * n + k];
                }
                r[row] -= f * r[col];
            }
        }
    }
    let mut out = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|k| m[row * n + k] * out[k]).sum();
        out[row] = (r[row] - s) / m[row * n + row];
    }
    Some(out)
}

/// Containment fast path for triangles in the plane.
#[inline]
fn triangle_contains(a: &[f64], b: &[f64], c: &[f64], x: &[f64]) -> bool {
    let (e1, e2) = ([b[0] - a[0], b[1] - a[1]], [c[0] - a[0], c[1] - a[1]]);
    let det = e1[0] * e2[1] - e1[1] * e2[0];
    let scale = (e1[0].hypot(e1[1])) * (e2[0].hypot(e2[1]));
    if det.abs() <= DEGENERATE_TOL * scale || scale == 0.0 {
        return simplex_contains(&[a, b, c], x);
    }
    let r = [x[0] - a[0], x[1] - a[1]];
    let l1 = (r[0] * e2[1] - r[1] * e2[0]) / det;
    let l2 = (e1[0] * r[1] - e1[1] * r[0]) / det;
    l1 >= -BARY_TOL && l2 >= -BARY_TOL && 1.0 - l1 - l2 >= -BARY_TOL
}

fn contains_subset(data: &DataMatrix, idx: &[usize], x: &[f64]) -> bool {
    if data.ncols() == 2 {
        triangle_contains(data.row(idx[0]), data.row(idx[1]), data.row(idx[2]), x)
    } else {
        let verts: Vec<&[f64]> = idx.iter().map(|&i| data.row(i)).collect();
        simplex_contains(&verts, x)
    }
}

/// `d`-volume of `conv{x, x_i1, ..., x_id}`.
fn simplex_volume(data: &DataMatrix, idx: &[usize], x: &[f64], scratch: &mut [f64], inv_fact: f64) -> f64 {
    let d = x.len();
    for (j, &i) in idx.iter().enumerate() {
        let row = data.row(i);
        for r in 0..d {
            scratch[r * d + j] = row[r] - x[r];
        }
    }
    let det = match d {
        1 => scratch[0],
        2 => scratch[0] * scratch[3] - scratch[1] * scratch[2],
        _ => determinant(scratch, d),
    };
    det.abs() * inv_fact
}

fn factorial(d: usize) -> f64 {
    (1..=d).map(|k| k as f64).product()
}

/// Sums `f` over all `k`-subsets, splitting the work by smallest index so
/// the floating-point summation order is fixed.
fn enumerate_sum<F>(n: usize, k: usize, f: F) -> f64
where
    F: Fn(&[usize]) -> f64 + Sync,
{
    if k == 0 || k > n {
        return 0.0;
    }
    let partial: Vec<f64> = (0..=n - k)
        .into_par_iter()
        .map(|first| {
            let rest = n - first - 1;
            let mut comb = Combinations::new(rest, k - 1);
            let mut idx = vec![first; k];
            let mut acc = 0.0;
            while let Some(s) = comb.next_subset() {
                for (slot, &j) in idx[1..].iter_mut().zip(s) {
                    *slot = first + 1 + j;
                }
                acc += f(&idx);
            }
            acc
        })
        .collect();
    partial.iter().sum()
}

fn check_budget(count: u128) -> Result<()> {
    if count > COMBINATORIAL_BUDGET {
        Err(DepthError::BudgetExceeded { count, cap: COMBINATORIAL_BUDGET })
    } else {
        Ok(())
    }
}

/// Fraction of the `C(n, d + 1)` closed data simplices that contain `x`.
pub fn simplicial_depth(x: &[f64], data: &DataMatrix) -> Result<DepthValue> {
    data.check_point(x)?;
    let (n, d) = (data.nrows(), data.ncols());
    if n < d + 1 {
        return Err(DepthError::InvalidInput(format!("simplicial depth needs n >= d + 1, got n = {n}")));
    }
    let total = binomial(n, d + 1);
    check_budget(total)?;
    let hits = enumerate_sum(n, d + 1, |idx| contains_subset(data, idx, x) as u8 as f64);
    Ok(DepthValue::new(hits / total as f64, DepthNotion::Simplicial, Exactness::Exact))
}

fn volume_scale(d: usize, affine_invariant: bool, ls: Option<&LocationScatter>) -> Result<f64> {
    let mut scale = 1.0 / factorial(d);
    if affine_invariant {
        let ls = ls.ok_or_else(|| {
            DepthError::InvalidInput("affine-invariant volume depth needs a location-scatter estimate".into())
        })?;
        if ls.dim() != d {
            return Err(DepthError::DimensionMismatch { expected: d, got: ls.dim() });
        }
        if !(ls.sigma_det > 0.0) {
            return Err(DepthError::SingularScatter(format!("scatter determinant {}", ls.sigma_det)));
        }
        scale /= ls.sigma_det.sqrt();
    }
    Ok(scale)
}

/// `1 / (1 + mean volume)` over all simplices spanned by `x` and `d` data
/// points. The affine-invariant form divides each volume by `sqrt(det Sigma)`.
pub fn simplicial_volume_depth(
    x: &[f64],
    data: &DataMatrix,
    affine_invariant: bool,
    ls: Option<&LocationScatter>,
) -> Result<DepthValue> {
    data.check_point(x)?;
    let (n, d) = (data.nrows(), data.ncols());
    if n < d {
        return Err(DepthError::InvalidInput(format!("volume depth needs n >= d, got n = {n}")));
    }
    let scale = volume_scale(d, affine_invariant, ls)?;
    let total = binomial(n, d);
    check_budget(total)?;
    let sum = enumerate_sum(n, d, |idx| {
        let mut scratch = [0.0f64; 64];
        if d * d <= scratch.len() {
            simplex_volume(data, idx, x, &mut scratch[..d * d], scale)
        } else {
            simplex_volume(data, idx, x, &mut vec![0.0; d * d], scale)
        }
    });
    let notion = if affine_invariant { DepthNotion::SimplicialVolumeAffineInvariant } else { DepthNotion::SimplicialVolume };
    Ok(DepthValue::new(1.0 / (1.0 + sum / total as f64), notion, Exactness::Exact))
}

/// Unbiased Monte Carlo estimate of a simplex-based depth from `budget`
/// uniformly drawn index subsets. Simplicial depth is the hit fraction;
/// volume depths are `1 / (1 + mean sampled volume)`.
pub fn monte_carlo_simplex_depth(
    x: &[f64],
    data: &DataMatrix,
    notion: SimplexNotion,
    ls: Option<&LocationScatter>,
    budget: usize,
    seed: u64,
) -> Result<DepthValue> {
    data.check_point(x)?;
    if budget < 1000 {
        return Err(DepthError::InvalidInput(format!("Monte Carlo budget must be >= 1000, got {budget}")));
    }
    let (n, d) = (data.nrows(), data.ncols());
    let k = notion.subset_size(d);
    if n < k {
        return Err(DepthError::InvalidInput(format!("need at least {k} rows, got {n}")));
    }
    let scale = match notion {
        SimplexNotion::Simplicial => 1.0,
        SimplexNotion::SimplicialVolume => volume_scale(d, false, None)?,
        SimplexNotion::SimplicialVolumeAffineInvariant => volume_scale(d, true, ls)?,
    };
    let chunks = budget.div_ceil(MC_CHUNK);
    let partial: Vec<f64> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let draws = MC_CHUNK.min(budget - c * MC_CHUNK);
            let mut rng = rng_from(derive(seed, c as u64));
            let mut idx = vec![0usize; k];
            let mut scratch = vec![0.0; d * d];
            let mut acc = 0.0;
            for _ in 0..draws {
                for (slot, i) in idx.iter_mut().zip(sample(&mut rng, n, k)) {
                    *slot = i;
                }
                acc += match notion {
                    SimplexNotion::Simplicial => contains_subset(data, &idx, x) as u8 as f64,
                    _ => simplex_volume(data, &idx, x, &mut scratch, scale),
                };
            }
            acc
        })
        .collect();
    let mean = partial.iter().sum::<f64>() / budget as f64;
    let value = match notion {
        SimplexNotion::Simplicial => mean,
        _ => 1.0 / (1.0 + mean),
    };
    Ok(DepthValue::new(value, notion.depth_notion(), Exactness::Approximate))
}
