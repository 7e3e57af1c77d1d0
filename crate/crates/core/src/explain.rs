//! Explanations built from depth-minimizing directions.
//!
//! For a projection-depth model every point has an optimal direction `u*`,
//! the projection on which it looks most outlying. The direction's
//! coordinates say which variables drive the abnormality; the sorted
//! projections on `u*` show where the point sits relative to the data; and
//! inner products between the directions of different points reveal
//! anomalies that leave the data the same way.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::depths::DepthValue;
use crate::detect::{score, score_batch, DepthModel};
use crate::error::{DepthError, Result};
use crate::linalg::{DataMatrix, UnitDirection};
use crate::robust::median;

pub const DEFAULT_GROUP_SIMILARITY: f64 = 0.95;

/// Projections of a data set on one direction, sorted and shifted so the
/// left-most value is zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectionSequence {
    pub point_index: usize,
    pub projections: Vec<f64>,
    /// 1-based rank of the explained point; ties go to the lower row index.
    pub own_position: usize,
    /// Median of the projections, shifted like them.
    pub median: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Explanation {
    pub point_index: usize,
    pub depth: DepthValue,
    pub direction: UnitDirection,
    pub sequence: ProjectionSequence,
    /// Signed per-variable weight; the coordinates of the direction.
    pub contribution: Vec<f64>,
}

/// Inner products between optimal directions, rows and columns ordered by
/// increasing depth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectionSimilarity {
    /// Original row indices by increasing depth.
    pub order: Vec<usize>,
    /// Depths aligned with `order`.
    pub depths: Vec<f64>,
    /// Directions aligned with the original rows.
    pub directions: Vec<UnitDirection>,
    /// Row-major `n x n`.
    pub matrix: Vec<f64>,
}

impl DirectionSimilarity {
    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Entry at sorted positions `(a, b)`.
    pub fn at(&self, a: usize, b: usize) -> f64 {
        self.matrix[a * self.len() + b]
    }

    /// Inner product between the directions of original rows `i` and `j`.
    pub fn between(&self, i: usize, j: usize) -> f64 {
        self.directions[i].dot(&self.directions[j])
    }
}

fn require_directions(model: &DepthModel) -> Result<()> {
    if model.notion.is_projection() {
        Ok(())
    } else {
        Err(DepthError::NoDirections(model.notion.to_string()))
    }
}

/// Sorted projections of `data` on `u`, relative to row `i`.
pub fn projection_sequence(data: &DataMatrix, u: &UnitDirection, i: usize) -> Result<ProjectionSequence> {
    if i >= data.nrows() {
        return Err(DepthError::InvalidInput(format!("row {i} out of range for {} rows", data.nrows())));
    }
    let mut proj = Vec::with_capacity(data.nrows());
    data.project_into(u.as_slice(), &mut proj);
    let own = proj[i];
    let own_position = 1 + proj
        .iter()
        .enumerate()
        .filter(|&(j, &p)| p < own || (p == own && j < i))
        .count();
    proj.sort_by(f64::total_cmp);
    let lo = proj[0];
    let med = median(&proj) - lo;
    proj.iter_mut().for_each(|p| *p -= lo);
    Ok(ProjectionSequence { point_index: i, projections: proj, own_position, median: med })
}

/// Explains row `i` of `data` under a projection-depth model.
pub fn explain_point(model: &DepthModel, data: &DataMatrix, i: usize) -> Result<Explanation> {
    require_directions(model)?;
    if i >= data.nrows() {
        return Err(DepthError::InvalidInput(format!("row {i} out of range for {} rows", data.nrows())));
    }
    let report = score(model, data.row(i))?;
    if report.ambiguous {
        return Err(DepthError::AmbiguousDirection);
    }
    let direction = report.direction.ok_or_else(|| DepthError::NoDirections(model.notion.to_string()))?;
    let sequence = projection_sequence(data, &direction, i)?;
    Ok(Explanation {
        point_index: i,
        depth: report.depth,
        contribution: direction.as_slice().to_vec(),
        direction,
        sequence,
    })
}

/// Optimal directions of every row and their inner products. Ambiguous
/// directions are kept as reported.
pub fn direction_similarity(model: &DepthModel, data: &DataMatrix) -> Result<DirectionSimilarity> {
    require_directions(model)?;
    let reports = score_batch(model, data)?;
    let directions = reports
        .into_iter()
        .map(|r| r.direction.map(|u| (r.depth.value, u)))
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| DepthError::NoDirections(model.notion.to_string()))?;
    let n = directions.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| directions[a].0.total_cmp(&directions[b].0).then(a.cmp(&b)));

    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|a| {
            let ua = &directions[order[a]].1;
            (0..n).map(|b| if a == b { 1.0 } else { ua.dot(&directions[order[b]].1) }).collect()
        })
        .collect();
    let mut matrix = vec![0.0; n * n];
    for a in 0..n {
        matrix[a * n + a] = rows[a][a];
        for b in (a + 1)..n {
            // take the upper triangle so the matrix is exactly symmetric
            matrix[a * n + b] = rows[a][b];
            matrix[b * n + a] = rows[a][b];
        }
    }
    let depths = order.iter().map(|&i| directions[i].0).collect();
    Ok(DirectionSimilarity {
        order,
        depths,
        directions: directions.into_iter().map(|(_, u)| u).collect(),
        matrix,
    })
}

/// Connected components among `flagged` rows of the graph joining rows whose
/// directions have inner product `>= min_similarity`. Members are original
/// row indices in depth order; groups are ordered by their shallowest member.
pub fn anomaly_groups(sim: &DirectionSimilarity, flagged: &[bool], min_similarity: f64) -> Result<Vec<Vec<usize>>> {
    if flagged.len() != sim.len() {
        return Err(DepthError::DimensionMismatch { expected: sim.len(), got: flagged.len() });
    }
    // sorted positions of flagged rows
    let members: Vec<usize> = (0..sim.len()).filter(|&a| flagged[sim.order[a]]).collect();
    let mut parent: Vec<usize> = (0..members.len()).collect();
    fn root(parent: &mut [usize], mut k: usize) -> usize {
        while parent[k] != k {
            parent[k] = parent[parent[k]];
            k = parent[k];
        }
        k
    }
    for x in 0..members.len() {
        for y in (x + 1)..members.len() {
            if sim.at(members[x], members[y]) >= min_similarity {
                let (rx, ry) = (root(&mut parent, x), root(&mut parent, y));
                if rx != ry {
                    parent[rx.max(ry)] = rx.min(ry);
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; members.len()];
    for x in 0..members.len() {
        let r = root(&mut parent, x);
        if slot[r] == usize::MAX {
            slot[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[slot[r]].push(sim.order[members[x]]);
    }
    Ok(groups)
}

/// Mean inner product over distinct pairs of `rows`.
pub fn mean_pairwise_similarity(sim: &DirectionSimilarity, rows: &[usize]) -> f64 {
    let mut sum = 0.0;
    let mut count = 0usize;
    for (k, &i) in rows.iter().enumerate() {
        for &j in &rows[k + 1..] {
            sum += sim.between(i, j);
            count += 1;
        }
    }
    if count == 0 {
        1.0
    } else {
        sum / count as f64
    }
}

/// Depth on a regular `steps x steps` grid over `[lo, hi]` for two-dimensional
/// models, row-major with the first coordinate varying fastest.
pub fn depth_grid(model: &DepthModel, lo: [f64; 2], hi: [f64; 2], steps: usize) -> Result<Vec<([f64; 2], f64)>> {
    if model.dim != 2 {
        return Err(DepthError::DimensionMismatch { expected: 2, got: model.dim });
    }
    if steps < 2 {
        return Err(DepthError::InvalidInput("grid needs at least 2 steps per axis".into()));
    }
    let at = |k: usize, a: usize| lo[a] + (hi[a] - lo[a]) * k as f64 / (steps - 1) as f64;
    (0..steps * steps)
        .into_par_iter()
        .map(|k| {
            let p = [at(k % steps, 0), at(k / steps, 1)];
            model.depth(&p).map(|(v, _)| (p, v.value))
        })
        .collect()
}
