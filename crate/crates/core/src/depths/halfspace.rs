//! Halfspace (Tukey) depth: an angular sweep for `d = 2` and a brute-force
//! enumeration over the cells of the hyperplane arrangement for `d <= 3`.

use std::cmp::Ordering;

use super::{DepthNotion, DepthValue, Exactness};
use crate::error::{DepthError, Result};
use crate::linalg::{dot, DataMatrix};
use crate::robust::univariate_halfspace_depth;

/// Candidate-direction cap for the oracle.
const ORACLE_BUDGET: u128 = 10_000_000;

/// Exact halfspace depth for `d = 1` and `d = 2`.
pub fn halfspace_depth_exact(x: &[f64], data: &DataMatrix) -> Result<DepthValue> {
    data.check_point(x)?;
    match data.ncols() {
        1 => Ok(DepthValue::new(
            univariate_halfspace_depth(x[0], data.as_slice()),
            DepthNotion::Halfspace,
            Exactness::Exact,
        )),
        2 => halfspace_depth_2d(x, data),
        d => Err(DepthError::InvalidInput(format!(
            "exact halfspace depth is available for d <= 2, got d = {d}"
        ))),
    }
}

#[inline]
fn cross(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

#[inline]
fn upper_half(v: [f64; 2]) -> bool {
    v[1] > 0.0 || (v[1] == 0.0 && v[0] > 0.0)
}

fn angular_cmp(a: [f64; 2], b: [f64; 2]) -> Ordering {
    match (upper_half(a), upper_half(b)) {
        (true, false) => Ordering::Less,
        (false, true) => Ordering::Greater,
        _ => 0.0.partial_cmp(&cross(a, b)).unwrap_or(Ordering::Equal),
    }
}

/// Is `b` within the half-open angular range `[angle(a), angle(a) + pi)`?
#[inline]
fn within_half_turn(a: [f64; 2], b: [f64; 2]) -> bool {
    let c = cross(a, b);
    c > 0.0 || (c == 0.0 && a[0] * b[0] + a[1] * b[1] > 0.0)
}

/// Exact bivariate halfspace depth in `O(n log n)`.
///
/// The depth is `(n - M) / n`, where `M` is the largest number of points
/// (relative to `x`) strictly inside an open half-plane through `x`. Any such
/// half-plane can be rotated until a point sits on its leading edge, so `M` is
/// the maximum over points `j` of the count of angles in `[theta_j, theta_j + pi)`,
/// found with one sort and a two-pointer sweep. Points equal to `x` lie in
/// every closed half-plane and never count toward `M`.
pub fn halfspace_depth_2d(x: &[f64], data: &DataMatrix) -> Result<DepthValue> {
    if data.ncols() != 2 {
        return Err(DepthError::DimensionMismatch { expected: 2, got: data.ncols() });
    }
    data.check_point(x)?;
    let n = data.nrows();
    let mut v: Vec<[f64; 2]> = data
        .rows()
        .map(|r| [r[0] - x[0], r[1] - x[1]])
        .filter(|p| p[0] != 0.0 || p[1] != 0.0)
        .collect();
    let m = v.len();
    if m == 0 {
        return Ok(DepthValue::new(1.0, DepthNotion::Halfspace, Exactness::Exact));
    }
    v.sort_unstable_by(|a, b| angular_cmp(*a, *b));

    let mut best = 0usize;
    let mut end = 0usize;
    for j in 0..m {
        if end < j + 1 {
            end = j + 1;
        }
        while end < j + m && within_half_turn(v[j], v[end % m]) {
            end += 1;
        }
        best = best.max(end - j);
    }
    Ok(DepthValue::new((n - best) as f64 / n as f64, DepthNotion::Halfspace, Exactness::Exact))
}

/// Number of rows with `(x_i - x)^T u <= 0`.
fn closed_count(diffs: &[Vec<f64>], u: &[f64]) -> usize {
    diffs.iter().filter(|v| dot(v, u) <= 0.0).count()
}

/// Brute-force halfspace depth for `d <= 3` and `n <= 200`.
///
/// Every cell of the arrangement of hyperplanes `{u : (x_i - x)^T u = 0}` on the
/// sphere has a vertex spanned by `d - 1` of the differences. Each vertex and
/// its antipode are evaluated, together with small perturbations that move
/// into every adjacent cell (the step is chosen per vertex so that no other
/// point changes side). Coordinate axes and the differences themselves cover
/// arrangements without vertices.
pub fn halfspace_depth_oracle(x: &[f64], data: &DataMatrix) -> Result<DepthValue> {
    data.check_point(x)?;
    let (n, d) = (data.nrows(), data.ncols());
    if d > 3 {
        return Err(DepthError::InvalidInput(format!("oracle supports d <= 3, got {d}")));
    }
    if n > 200 {
        return Err(DepthError::InvalidInput(format!("oracle supports n <= 200, got {n}")));
    }
    let diffs: Vec<Vec<f64>> =
        data.rows().map(|r| r.iter().zip(x).map(|(a, b)| a - b).collect()).collect();
    let nonzero: Vec<&Vec<f64>> = diffs.iter().filter(|v| v.iter().any(|c| *c != 0.0)).collect();

    let vertex_count = super::binomial(nonzero.len(), d.saturating_sub(1)) * 2 * 3u128.pow(d as u32 - 1);
    if vertex_count > ORACLE_BUDGET {
        return Err(DepthError::BudgetExceeded { count: vertex_count, cap: ORACLE_BUDGET });
    }

    let mut best = n;
    let mut consider = |u: &[f64]| {
        best = best.min(closed_count(&diffs, u));
        let neg: Vec<f64> = u.iter().map(|c| -c).collect();
        best = best.min(closed_count(&diffs, &neg));
    };

    for k in 0..d {
        let mut e = vec![0.0; d];
        e[k] = 1.0;
        consider(&e);
    }
    for v in &nonzero {
        consider(v);
    }

    match d {
        1 => {}
        2 => {
            for v in &nonzero {
                let w = [-v[1], v[0]];
                for s in [-1.0, 1.0] {
                    let a = [s * v[0], s * v[1]];
                    let step = safe_step(&nonzero, &w, &a);
                    consider(&[w[0] + step * a[0], w[1] + step * a[1]]);
                }
                consider(&w);
            }
        }
        3 => {
            for i in 0..nonzero.len() {
                for j in (i + 1)..nonzero.len() {
                    let (p, q) = (nonzero[i], nonzero[j]);
                    let w = [
                        p[1] * q[2] - p[2] * q[1],
                        p[2] * q[0] - p[0] * q[2],
                        p[0] * q[1] - p[1] * q[0],
                    ];
                    if w.iter().all(|c| *c == 0.0) {
                        continue;
                    }
                    // dual basis in span(p, q): p^T a_p = 1, q^T a_p = 0, ...
                    let (pp, pq, qq) = (dot(p, p), dot(p, q), dot(q, q));
                    let det = pp * qq - pq * pq;
                    if det == 0.0 {
                        continue;
                    }
                    let a_p: Vec<f64> = (0..3).map(|c| (qq * p[c] - pq * q[c]) / det).collect();
                    let a_q: Vec<f64> = (0..3).map(|c| (pp * q[c] - pq * p[c]) / det).collect();
                    consider(&w);
                    for sp in [-1.0, 0.0, 1.0] {
                        for sq in [-1.0, 0.0, 1.0] {
                            if sp == 0.0 && sq == 0.0 {
                                continue;
                            }
                            let a: Vec<f64> = (0..3).map(|c| sp * a_p[c] + sq * a_q[c]).collect();
                            let step = safe_step(&nonzero, &w, &a);
                            let u: Vec<f64> = (0..3).map(|c| w[c] + step * a[c]).collect();
                            consider(&u);
                        }
                    }
                }
            }
        }
        _ => unreachable!(),
    }
    Ok(DepthValue::new((best as f64) / n as f64, DepthNotion::Halfspace, Exactness::Oracle))
}

/// Largest-safe step along `a` from vertex `w`: half the distance at which
/// any point strictly off the vertex's hyperplanes would change side.
fn safe_step(points: &[&Vec<f64>], w: &[f64], a: &[f64]) -> f64 {
    let mut step = f64::INFINITY;
    for v in points {
        let on = dot(v, w);
        let off = dot(v, a);
        if on != 0.0 && off != 0.0 {
            step = step.min((on / off).abs());
        }
    }
    if step.is_finite() {
        0.5 * step
    } else {
        1.0
    }
}
