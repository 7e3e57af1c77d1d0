//! Direction search on the unit sphere for depths with the projection
//! property.
//!
//! Halfspace and projection depth are minima of a univariate depth over all
//! directions `u`. Searching a finite set of directions can only miss the
//! minimum, so every approximation here is an upper bound on the exact depth.
//! Three strategies are provided: plain random search (RS), refined random
//! search (RRS) that samples shrinking caps around the incumbent, and a
//! Nelder-Mead simplex method kept on the sphere by renormalization.

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::depths::{DepthNotion, DepthValue, Exactness};
use crate::error::{DepthError, Result};
use crate::linalg::{dot, norm, DataMatrix, UnitDirection};
use crate::robust::{location_scale, median_in_place, standardized, univariate_halfspace_depth};
use crate::seeding::{rng_from, DepthRng};

pub const DEFAULT_RRS_ROUNDS: usize = 10;
pub const DEFAULT_RRS_SHRINK: f64 = 0.5;
/// Angle between the initial Nelder-Mead vertices and the starting direction.
const NM_INITIAL_STEP: f64 = 0.1;
/// A Nelder-Mead run stops once its simplex is this small (radians).
const NM_TOLERANCE: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    #[serde(rename = "rs")]
    RandomSearch,
    #[serde(rename = "rrs")]
    RefinedRandomSearch,
    NelderMead,
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::RandomSearch => "rs",
            Strategy::RefinedRandomSearch => "rrs",
            Strategy::NelderMead => "nelder_mead",
        })
    }
}

impl FromStr for Strategy {
    type Err = DepthError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "rs" | "random" | "random_search" => Ok(Strategy::RandomSearch),
            "rrs" | "refined" | "refined_random_search" => Ok(Strategy::RefinedRandomSearch),
            "nm" | "nelder_mead" | "neldermead" => Ok(Strategy::NelderMead),
            _ => Err(DepthError::InvalidInput(format!("unknown search strategy '{s}'"))),
        }
    }
}

/// How many directions a search may evaluate, and how.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchBudget {
    pub strategy: Strategy,
    pub n_directions: usize,
    pub seed: u64,
    /// Nelder-Mead restarts; `None` picks `max(1, n_directions / (20 d))`.
    #[serde(default)]
    pub restarts: Option<usize>,
    #[serde(default = "default_rounds")]
    pub rrs_rounds: usize,
    #[serde(default = "default_shrink")]
    pub rrs_shrink: f64,
}

fn default_rounds() -> usize {
    DEFAULT_RRS_ROUNDS
}

fn default_shrink() -> f64 {
    DEFAULT_RRS_SHRINK
}

impl SearchBudget {
    pub fn new(strategy: Strategy, n_directions: usize, seed: u64) -> Self {
        Self {
            strategy,
            n_directions,
            seed,
            restarts: None,
            rrs_rounds: DEFAULT_RRS_ROUNDS,
            rrs_shrink: DEFAULT_RRS_SHRINK,
        }
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        Self { seed, ..self.clone() }
    }

    pub fn restarts_for(&self, d: usize) -> usize {
        self.restarts.unwrap_or_else(|| (self.n_directions / (20 * d)).max(1))
    }

    pub fn validate(&self, d: usize) -> Result<()> {
        if self.n_directions == 0 {
            return Err(DepthError::InvalidInput("direction budget must be positive".into()));
        }
        match self.strategy {
            Strategy::NelderMead => {
                let r = self.restarts_for(d);
                if r == 0 || self.n_directions < (d + 1) * r {
                    return Err(DepthError::InvalidInput(format!(
                        "Nelder-Mead needs at least (d + 1) * restarts = {} directions, got {}",
                        (d + 1) * r,
                        self.n_directions
                    )));
                }
            }
            Strategy::RefinedRandomSearch => {
                if self.rrs_rounds == 0 || !(self.rrs_shrink > 0.0 && self.rrs_shrink <= 1.0) {
                    return Err(DepthError::InvalidInput("RRS needs rounds >= 1 and shrink in (0, 1]".into()));
                }
            }
            Strategy::RandomSearch => {}
        }
        Ok(())
    }
}

/// Outcome of a direction search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApproxDepthResult {
    pub value: DepthValue,
    pub best_direction: UnitDirection,
    pub evaluations_used: usize,
}

/// The univariate depth of `x` along a direction, with buffers reused across
/// evaluations.
pub struct ProjectionObjective<'a> {
    x: &'a [f64],
    data: &'a DataMatrix,
    notion: DepthNotion,
    proj: Vec<f64>,
    scratch: Vec<f64>,
    evaluations: usize,
}

impl<'a> ProjectionObjective<'a> {
    pub fn new(x: &'a [f64], data: &'a DataMatrix, notion: DepthNotion) -> Result<Self> {
        data.check_point(x)?;
        if !notion.has_projection_property() {
            return Err(DepthError::InvalidInput(format!("{notion} has no projection property")));
        }
        let n = data.nrows();
        Ok(Self { x, data, notion, proj: Vec::with_capacity(n), scratch: Vec::with_capacity(n), evaluations: 0 })
    }

    pub fn evaluations(&self) -> usize {
        self.evaluations
    }

    /// Univariate depth along `u` (not required to be normalized for
    /// halfspace, but projection outlyingness is scale invariant too).
    pub fn eval(&mut self, u: &[f64]) -> f64 {
        self.evaluations += 1;
        self.data.project_into(u, &mut self.proj);
        let xu = dot(self.x, u);
        match self.notion {
            DepthNotion::Halfspace => univariate_halfspace_depth(xu, &self.proj),
            DepthNotion::Projection | DepthNotion::ProjectionAsymmetric => {
                let asym = self.notion == DepthNotion::ProjectionAsymmetric;
                let (med, scale) = location_scale(&mut self.proj, &mut self.scratch, asym);
                1.0 / (1.0 + standardized(xu, med, scale, asym))
            }
            _ => unreachable!("checked in new"),
        }
    }
}

/// Univariate depth of `x` along `u`, the quantity every search minimizes.
pub fn univariate_objective(x: &[f64], data: &DataMatrix, notion: DepthNotion, u: &[f64]) -> Result<f64> {
    Ok(ProjectionObjective::new(x, data, notion)?.eval(u))
}

/// Uniform direction on `S^{d-1}`: a normalized standard normal vector.
pub fn uniform_sphere_direction(d: usize, rng: &mut DepthRng) -> UnitDirection {
    loop {
        let g: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
        if let Some(u) = UnitDirection::normalize(g) {
            return u;
        }
    }
}

/// Keeps the first direction attaining the lowest value.
struct Incumbent {
    value: f64,
    direction: Vec<f64>,
}

impl Incumbent {
    fn new(d: usize) -> Self {
        let mut e = vec![0.0; d];
        e[0] = 1.0;
        Self { value: f64::INFINITY, direction: e }
    }

    fn offer(&mut self, value: f64, u: &[f64]) -> bool {
        if value < self.value {
            self.value = value;
            self.direction.clear();
            self.direction.extend_from_slice(u);
            true
        } else {
            false
        }
    }

    fn finish(self, notion: DepthNotion, evaluations: usize) -> ApproxDepthResult {
        ApproxDepthResult {
            value: DepthValue::new(self.value, notion, Exactness::Approximate),
            best_direction: UnitDirection::new(self.direction).expect("search directions are unit vectors"),
            evaluations_used: evaluations,
        }
    }
}

fn check_strategy(budget: &SearchBudget, expected: Strategy) -> Result<()> {
    if budget.strategy != expected {
        return Err(DepthError::InvalidInput(format!(
            "budget strategy {} passed to the {expected} search",
            budget.strategy
        )));
    }
    Ok(())
}

/// Random search: the minimum over `n_directions` independent uniform
/// directions. The directions for budget `B` are a prefix of those for any
/// larger budget with the same seed.
pub fn approx_depth_rs(
    x: &[f64],
    data: &DataMatrix,
    notion: DepthNotion,
    budget: &SearchBudget,
) -> Result<ApproxDepthResult> {
    check_strategy(budget, Strategy::RandomSearch)?;
    budget.validate(data.ncols())?;
    let mut obj = ProjectionObjective::new(x, data, notion)?;
    let mut rng = rng_from(budget.seed);
    let mut best = Incumbent::new(data.ncols());
    for _ in 0..budget.n_directions {
        let u = uniform_sphere_direction(data.ncols(), &mut rng);
        let v = obj.eval(u.as_slice());
        best.offer(v, u.as_slice());
    }
    Ok(best.finish(notion, obj.evaluations()))
}

/// Direction at a polar angle drawn uniformly from `[0, max_angle]` around
/// `center`, in a uniformly random tangent direction. Small angles are
/// favored over area-uniform sampling, which in high dimension would put
/// almost every draw on the rim of the cap.
fn cap_direction(center: &[f64], max_angle: f64, rng: &mut DepthRng) -> Vec<f64> {
    let d = center.len();
    let phi = max_angle * rng.random::<f64>();
    let tangent = loop {
        let g: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
        let c = dot(&g, center);
        let t: Vec<f64> = g.iter().zip(center).map(|(gi, ui)| gi - c * ui).collect();
        if let Some(t) = normalized(&t) {
            break t;
        }
    };
    let (s, c) = phi.sin_cos();
    let v: Vec<f64> = center.iter().zip(&tangent).map(|(ui, ti)| c * ui + s * ti).collect();
    normalized(&v).expect("cap direction has unit norm")
}

/// Refined random search. Starting from a uniform direction, round
/// `k = 0, 1, ..` of `rrs_rounds` draws its share of the budget from the cap
/// of half-angle `(pi / 2) * shrink^k` around the incumbent, which moves as
/// soon as a draw improves on it. The last round takes the remainder.
pub fn approx_depth_rrs(
    x: &[f64],
    data: &DataMatrix,
    notion: DepthNotion,
    budget: &SearchBudget,
) -> Result<ApproxDepthResult> {
    check_strategy(budget, Strategy::RefinedRandomSearch)?;
    let d = data.ncols();
    budget.validate(d)?;
    let mut obj = ProjectionObjective::new(x, data, notion)?;
    let mut rng = rng_from(budget.seed);
    let mut best = Incumbent::new(d);
    if d == 1 {
        for _ in 0..budget.n_directions {
            let u = uniform_sphere_direction(1, &mut rng);
            let v = obj.eval(u.as_slice());
            best.offer(v, u.as_slice());
        }
        return Ok(best.finish(notion, obj.evaluations()));
    }
    let mut center = uniform_sphere_direction(d, &mut rng).into_vec();
    let mut center_value = f64::INFINITY;
    let rounds = budget.rrs_rounds.min(budget.n_directions);
    let per = budget.n_directions / rounds;
    let mut theta = FRAC_PI_2;
    for r in 0..rounds {
        let count = if r + 1 == rounds { budget.n_directions - per * r } else { per };
        for _ in 0..count {
            let u = cap_direction(&center, theta, &mut rng);
            let v = obj.eval(&u);
            best.offer(v, &u);
            if v < center_value {
                center_value = v;
                center = u;
            }
        }
        theta *= budget.rrs_shrink;
    }
    Ok(best.finish(notion, obj.evaluations()))
}

fn normalized(v: &[f64]) -> Option<Vec<f64>> {
    let n = norm(v);
    (n > 1e-12 && n.is_finite()).then(|| v.iter().map(|c| c / n).collect())
}

/// Orthonormal basis of the tangent space at `u`.
fn tangent_basis(u: &[f64]) -> Vec<Vec<f64>> {
    let d = u.len();
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(d - 1);
    // axes in order of increasing alignment with u give the best conditioning
    let mut axes: Vec<usize> = (0..d).collect();
    axes.sort_by(|&a, &b| u[a].abs().total_cmp(&u[b].abs()));
    for &k in &axes {
        if basis.len() == d - 1 {
            break;
        }
        let mut v = vec![0.0; d];
        v[k] = 1.0;
        for b in std::iter::once(u).chain(basis.iter().map(|b| b.as_slice())) {
            let c = dot(&v, b);
            v.iter_mut().zip(b).for_each(|(vi, bi)| *vi -= c * bi);
        }
        if let Some(v) = normalized(&v) {
            basis.push(v);
        }
    }
    basis
}

/// Spherical Nelder-Mead.
///
/// Each restart starts from a uniform direction `u0` and a simplex of `d`
/// unit vectors (`u0` plus `u0` tilted by 0.1 rad along each tangent axis).
/// Reflection, expansion, contraction and shrink steps are taken in the
/// ambient space and projected back onto the sphere. The evaluation budget is
/// shared evenly between restarts; evaluations left over by runs whose
/// simplex collapses early fund further restarts.
pub fn approx_depth_neldermead(
    x: &[f64],
    data: &DataMatrix,
    notion: DepthNotion,
    budget: &SearchBudget,
) -> Result<ApproxDepthResult> {
    check_strategy(budget, Strategy::NelderMead)?;
    let d = data.ncols();
    budget.validate(d)?;
    let mut obj = ProjectionObjective::new(x, data, notion)?;
    let mut best = Incumbent::new(d);
    if d == 1 {
        for u in [[1.0], [-1.0]] {
            let v = obj.eval(&u);
            best.offer(v, &u);
        }
        return Ok(best.finish(notion, obj.evaluations()));
    }
    let mut rng = rng_from(budget.seed);
    let restarts = budget.restarts_for(d);
    let per = budget.n_directions / restarts;
    let mut r = 0;
    loop {
        let remaining = budget.n_directions - obj.evaluations();
        if remaining < d + 1 {
            break;
        }
        // leftovers of collapsed runs buy extra restarts
        let allot = if r < restarts { remaining / (restarts - r) } else { per.min(remaining) };
        let start = uniform_sphere_direction(d, &mut rng).into_vec();
        nelder_mead_run(&mut obj, &mut best, start, allot);
        r += 1;
    }
    Ok(best.finish(notion, obj.evaluations()))
}

fn nelder_mead_run(obj: &mut ProjectionObjective<'_>, best: &mut Incumbent, start: Vec<f64>, allot: usize) {
    const ALPHA: f64 = 1.0;
    const GAMMA: f64 = 2.0;
    const RHO: f64 = 0.5;
    const SIGMA: f64 = 0.5;

    let d = start.len();
    let limit = obj.evaluations() + allot;
    let (s, c) = NM_INITIAL_STEP.sin_cos();
    let mut simplex: Vec<Vec<f64>> = vec![start.clone()];
    for t in tangent_basis(&start) {
        let v: Vec<f64> = start.iter().zip(&t).map(|(u, ti)| c * u + s * ti).collect();
        simplex.push(normalized(&v).expect("tilted vector is nonzero"));
    }
    let mut values = Vec::with_capacity(d);
    for v in &simplex {
        let f = obj.eval(v);
        best.offer(f, v);
        values.push(f);
    }
    let m = simplex.len();
    let budget_left = |obj: &ProjectionObjective<'_>| obj.evaluations() < limit;

    let point = |c: &[f64], w: &[f64], coef: f64| -> Option<Vec<f64>> {
        let v: Vec<f64> = c.iter().zip(w).map(|(ci, wi)| ci + coef * (ci - wi)).collect();
        normalized(&v)
    };

    while budget_left(obj) {
        // stable order: ties keep earlier vertices first
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();

        let diameter = simplex[1..]
            .iter()
            .map(|v| v.iter().zip(&simplex[0]).map(|(a, b)| (a - b) * (a - b)).sum::<f64>())
            .fold(0.0, f64::max)
            .sqrt();
        if diameter < NM_TOLERANCE {
            return;
        }

        let worst = m - 1;
        let mut centroid = vec![0.0; d];
        for v in &simplex[..worst] {
            centroid.iter_mut().zip(v).for_each(|(c, vi)| *c += vi);
        }
        centroid.iter_mut().for_each(|c| *c /= worst as f64);

        let mut shrink = false;
        match point(&centroid, &simplex[worst], ALPHA) {
            Some(xr) => {
                let fr = obj.eval(&xr);
                best.offer(fr, &xr);
                if fr < values[0] {
                    let mut accepted = (xr.clone(), fr);
                    if budget_left(obj) {
                        if let Some(xe) = point(&centroid, &simplex[worst], ALPHA * GAMMA) {
                            let fe = obj.eval(&xe);
                            best.offer(fe, &xe);
                            if fe < fr {
                                accepted = (xe, fe);
                            }
                        }
                    }
                    simplex[worst] = accepted.0;
                    values[worst] = accepted.1;
                } else if fr < values[worst - 1] {
                    simplex[worst] = xr;
                    values[worst] = fr;
                } else if budget_left(obj) {
                    // outside contraction when the reflection beat the worst,
                    // inside contraction otherwise
                    let coef = if fr < values[worst] { ALPHA * RHO } else { -RHO };
                    match point(&centroid, &simplex[worst], coef) {
                        Some(xc) => {
                            let fc = obj.eval(&xc);
                            best.offer(fc, &xc);
                            if fc < values[worst].min(fr) {
                                simplex[worst] = xc;
                                values[worst] = fc;
                            } else {
                                shrink = true;
                            }
                        }
                        None => shrink = true,
                    }
                }
            }
            None => shrink = true,
        }

        if shrink {
            for i in 1..m {
                if !budget_left(obj) {
                    return;
                }
                let v: Vec<f64> =
                    simplex[0].iter().zip(&simplex[i]).map(|(b, vi)| b + SIGMA * (vi - b)).collect();
                if let Some(v) = normalized(&v) {
                    let f = obj.eval(&v);
                    best.offer(f, &v);
                    simplex[i] = v;
                    values[i] = f;
                }
            }
        }
    }
}

/// Dispatch on `budget.strategy`.
pub fn approx_depth(
    x: &[f64],
    data: &DataMatrix,
    notion: DepthNotion,
    budget: &SearchBudget,
) -> Result<ApproxDepthResult> {
    match budget.strategy {
        Strategy::RandomSearch => approx_depth_rs(x, data, notion, budget),
        Strategy::RefinedRandomSearch => approx_depth_rrs(x, data, notion, budget),
        Strategy::NelderMead => approx_depth_neldermead(x, data, notion, budget),
    }
}

/// Minimum over `k` equally spaced directions of the half circle and their
/// antipodes (`2k` evaluations). A dense-grid reference for `d = 2`.
pub fn grid_depth_2d(x: &[f64], data: &DataMatrix, notion: DepthNotion, k: usize) -> Result<ApproxDepthResult> {
    if data.ncols() != 2 {
        return Err(DepthError::DimensionMismatch { expected: 2, got: data.ncols() });
    }
    let mut obj = ProjectionObjective::new(x, data, notion)?;
    let mut best = Incumbent::new(2);
    for i in 0..k {
        let a = std::f64::consts::PI * i as f64 / k as f64;
        let (s, c) = a.sin_cos();
        for u in [[c, s], [-c, -s]] {
            let v = obj.eval(&u);
            best.offer(v, &u);
        }
    }
    let mut out = best.finish(notion, obj.evaluations());
    out.value.exactness = Exactness::Oracle;
    Ok(out)
}

/// Largest sample accepted by [`projection_depth_2d_oracle`].
pub const ORACLE_MAX_N: usize = 40;

/// Angular offset at which the oracle also probes each event direction; the
/// one-sided scale jumps there, so the supremum may be a one-sided limit.
const ORACLE_EVENT_OFFSET: f64 = 1e-9;

/// Exact projection depth (symmetric or asymmetric) for `d = 2`, up to
/// `ORACLE_EVENT_OFFSET`.
///
/// Between two consecutive angles at which `(x_i + x_j - x_k - x_l)^T u = 0`
/// the order of the projections and of their deviations from the median is
/// fixed, so the outlyingness is a ratio of two linear forms in `u` and
/// monotone in the angle. Its supremum over the circle is therefore reached
/// at, or next to, one of those event angles, all of which are evaluated.
/// Cost is `O(n^5 log n)`; `n` is capped at [`ORACLE_MAX_N`].
pub fn projection_depth_2d_oracle(x: &[f64], data: &DataMatrix, notion: DepthNotion) -> Result<DepthValue> {
    if data.ncols() != 2 {
        return Err(DepthError::DimensionMismatch { expected: 2, got: data.ncols() });
    }
    if !notion.is_projection() {
        return Err(DepthError::InvalidInput(format!("the event oracle covers projection notions, not {notion}")));
    }
    let n = data.nrows();
    if n > ORACLE_MAX_N {
        return Err(DepthError::InvalidInput(format!("oracle sample size {n} exceeds {ORACLE_MAX_N}")));
    }
    let sums: Vec<[f64; 2]> = (0..n)
        .flat_map(|i| (i..n).map(move |j| (i, j)))
        .map(|(i, j)| {
            let (a, b) = (data.row(i), data.row(j));
            [a[0] + b[0], a[1] + b[1]]
        })
        .collect();
    let mut angles = vec![0.0];
    for (k, s) in sums.iter().enumerate() {
        for t in &sums[k + 1..] {
            let v = [s[0] - t[0], s[1] - t[1]];
            if v != [0.0, 0.0] {
                angles.push(v[0].atan2(-v[1]));
            }
        }
    }
    let mut obj = ProjectionObjective::new(x, data, notion)?;
    let mut best = f64::INFINITY;
    for a in angles {
        for base in [a, a + std::f64::consts::PI] {
            for t in [base - ORACLE_EVENT_OFFSET, base, base + ORACLE_EVENT_OFFSET] {
                let (s, c) = t.sin_cos();
                best = best.min(obj.eval(&[c, s]));
            }
        }
    }
    Ok(DepthValue::new(best, notion, Exactness::Oracle))
}

/// A search result's direction with its sign fixed so that
/// `u^T x - med(X^T u) >= 0`, i.e. pointing from the data center toward `x`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimalDirection {
    pub direction: UnitDirection,
    /// No direction separates `x` from the center: the point is as deep as
    /// the search can tell, so any direction is as good as the reported one.
    pub ambiguous: bool,
}

pub fn optimal_direction(result: &ApproxDepthResult, x: &[f64], data: &DataMatrix) -> Result<OptimalDirection> {
    data.check_point(x)?;
    let u = &result.best_direction;
    if u.dim() != data.ncols() {
        return Err(DepthError::DimensionMismatch { expected: data.ncols(), got: u.dim() });
    }
    let mut proj = Vec::with_capacity(data.nrows());
    data.project_into(u.as_slice(), &mut proj);
    let offset = dot(x, u.as_slice()) - median_in_place(&mut proj);
    let direction = if offset < 0.0 { u.negated() } else { u.clone() };
    let ambiguous = offset == 0.0 || (result.value.notion.is_projection() && result.value.value >= 1.0);
    Ok(OptimalDirection { direction, ambiguous })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::depths::halfspace_depth_2d;

    fn gaussian(n: usize, d: usize, seed: u64) -> DataMatrix {
        let mut rng = rng_from(seed);
        DataMatrix::new(n, d, (0..n * d).map(|_| rng.sample(StandardNormal)).collect()).unwrap()
    }

    fn square() -> DataMatrix {
        DataMatrix::from_rows(&[vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]]).unwrap()
    }

    #[test]
    fn uniform_directions() {
        let mut rng = rng_from(3);
        let mut mean = [0.0; 5];
        let draws = 100_000;
        for _ in 0..draws {
            let u = uniform_sphere_direction(5, &mut rng);
            assert!((norm(u.as_slice()) - 1.0).abs() < 1e-12);
            mean.iter_mut().zip(u.as_slice()).for_each(|(m, c)| *m += c / draws as f64);
        }
        assert!(mean.iter().all(|m| m.abs() < 0.02), "{mean:?}");
        let (mut plus, mut minus) = (0, 0);
        for _ in 0..1000 {
            match uniform_sphere_direction(1, &mut rng).as_slice()[0] {
                v if v == 1.0 => plus += 1,
                v if v == -1.0 => minus += 1,
                v => panic!("not a unit scalar: {v}"),
            }
        }
        assert!(plus > 400 && minus > 400);
    }

    #[test]
    fn rs_certifies_zero_outside() {
        let r = approx_depth_rs(&[10.0, 10.0], &square(), DepthNotion::Halfspace, &SearchBudget::new(Strategy::RandomSearch, 100, 1))
            .unwrap();
        assert_eq!(r.value.value, 0.0);
        assert_eq!(r.evaluations_used, 100);
    }

    #[test]
    fn one_dimension_is_exact() {
        let data = DataMatrix::from_rows(&[vec![0.0], vec![1.0], vec![2.0], vec![7.0]]).unwrap();
        for notion in [DepthNotion::Projection, DepthNotion::ProjectionAsymmetric] {
            let exact = crate::depths::projection_depth_1d(&[-5.0], &data, notion == DepthNotion::ProjectionAsymmetric)
                .unwrap()
                .value;
            let nm = approx_depth_neldermead(&[-5.0], &data, notion, &SearchBudget::new(Strategy::NelderMead, 10, 0)).unwrap();
            assert_eq!(nm.value.value, exact);
            let rs = approx_depth_rs(&[-5.0], &data, notion, &SearchBudget::new(Strategy::RandomSearch, 64, 0)).unwrap();
            assert_eq!(rs.value.value, exact);
        }
    }

    #[test]
    fn rs_nested_budgets_improve() {
        let data = gaussian(60, 3, 8);
        for seed in 0..20 {
            let x = [0.3, -0.2, 0.5];
            let small = approx_depth_rs(&x, &data, DepthNotion::Projection, &SearchBudget::new(Strategy::RandomSearch, 50, seed)).unwrap();
            let large = approx_depth_rs(&x, &data, DepthNotion::Projection, &SearchBudget::new(Strategy::RandomSearch, 100, seed)).unwrap();
            assert!(large.value.value <= small.value.value);
        }
    }

    #[test]
    fn cap_draws_stay_in_cap_with_uniform_angle() {
        let mut rng = rng_from(1);
        for d in [2, 3, 10] {
            let theta = 0.3;
            let center = uniform_sphere_direction(d, &mut rng).into_vec();
            let mut mean_angle = 0.0;
            for _ in 0..2000 {
                let u = cap_direction(&center, theta, &mut rng);
                assert!((norm(&u) - 1.0).abs() < 1e-12);
                let a = dot(&u, &center).clamp(-1.0, 1.0).acos();
                assert!(a <= theta + 1e-9);
                mean_angle += a / 2000.0;
            }
            assert!((mean_angle - theta / 2.0).abs() < 0.01, "d = {d}: {mean_angle}");
        }
    }

    #[test]
    fn rrs_spends_exact_budget() {
        let data = gaussian(40, 4, 2);
        let x = [0.5, 0.5, -0.1, 0.0];
        for n in [7, 10, 77, 200] {
            let r = approx_depth_rrs(&x, &data, DepthNotion::Projection, &SearchBudget::new(Strategy::RefinedRandomSearch, n, 5)).unwrap();
            assert_eq!(r.evaluations_used, n);
        }
    }

    #[test]
    fn approximations_bound_exact_from_above() {
        for seed in 0..20u64 {
            let data = gaussian(30, 2, 50 + seed);
            let x = [0.4 * seed as f64 / 10.0, -0.3];
            let exact = halfspace_depth_2d(&x, &data).unwrap().value;
            for strategy in [Strategy::RandomSearch, Strategy::RefinedRandomSearch, Strategy::NelderMead] {
                let r = approx_depth(&x, &data, DepthNotion::Halfspace, &SearchBudget::new(strategy, 60, seed)).unwrap();
                assert!(r.value.value >= exact);
                assert!(r.evaluations_used <= 60);
            }
        }
    }

    #[test]
    fn reevaluation_reproduces_value() {
        let data = gaussian(80, 3, 4);
        let x = [2.0, -1.0, 0.5];
        for strategy in [Strategy::RandomSearch, Strategy::RefinedRandomSearch, Strategy::NelderMead] {
            for notion in [DepthNotion::Halfspace, DepthNotion::Projection, DepthNotion::ProjectionAsymmetric] {
                let r = approx_depth(&x, &data, notion, &SearchBudget::new(strategy, 120, 9)).unwrap();
                let again = univariate_objective(&x, &data, notion, r.best_direction.as_slice()).unwrap();
                assert!((again - r.value.value).abs() <= 1e-12);
                let opt = optimal_direction(&r, &x, &data).unwrap();
                let again = univariate_objective(&x, &data, notion, opt.direction.as_slice()).unwrap();
                if notion != DepthNotion::ProjectionAsymmetric {
                    assert!((again - r.value.value).abs() <= 1e-12);
                }
                let mut proj = vec![];
                data.project_into(opt.direction.as_slice(), &mut proj);
                assert!(dot(&x, opt.direction.as_slice()) >= crate::robust::median(&proj));
            }
        }
    }

    #[test]
    fn nelder_mead_matches_dense_grid() {
        let mut worst_gap = 0.0f64;
        for seed in 0..50u64 {
            let data = gaussian(1000, 2, 1000 + seed);
            // query drawn from the same law as the data
            let mut xr = rng_from(77 + seed);
            let x: [f64; 2] = [xr.sample(StandardNormal), xr.sample(StandardNormal)];
            let grid = grid_depth_2d(&x, &data, DepthNotion::Projection, 1800).unwrap().value.value;
            let nm = approx_depth_neldermead(&x, &data, DepthNotion::Projection, &SearchBudget::new(Strategy::NelderMead, 200, seed))
                .unwrap()
                .value
                .value;
            worst_gap = worst_gap.max((nm - grid) / grid);
        }
        assert!(worst_gap <= 0.01, "relative gap {worst_gap}");
    }

    #[test]
    fn event_oracle_bounds_every_search() {
        for seed in 0..20 {
            let n = 5 + (seed as usize % 8);
            let data = gaussian(n, 2, 300 + seed);
            let x = gaussian(1, 2, 900 + seed).row(0).to_vec();
            for notion in [DepthNotion::Projection, DepthNotion::ProjectionAsymmetric] {
                let exact = projection_depth_2d_oracle(&x, &data, notion).unwrap().value;
                let grid = grid_depth_2d(&x, &data, notion, 20_000).unwrap().value.value;
                assert!(grid >= exact - 1e-9, "{notion} grid {grid} < oracle {exact}");
                assert!(grid - exact < 1e-3 * exact.max(1e-3), "{notion} grid {grid} far from oracle {exact}");
            }
        }
        let too_big = gaussian(ORACLE_MAX_N + 1, 2, 1);
        assert!(projection_depth_2d_oracle(&[0.0, 0.0], &too_big, DepthNotion::Projection).is_err());
        assert!(projection_depth_2d_oracle(&[0.0, 0.0], &square(), DepthNotion::Halfspace).is_err());
    }

    #[test]
    fn deterministic_and_ambiguity_flag() {
        let data = gaussian(50, 3, 6);
        let b = SearchBudget::new(Strategy::NelderMead, 90, 4);
        let a1 = approx_depth_neldermead(&[0.1, 0.2, 0.3], &data, DepthNotion::Projection, &b).unwrap();
        let a2 = approx_depth_neldermead(&[0.1, 0.2, 0.3], &data, DepthNotion::Projection, &b).unwrap();
        assert_eq!(a1, a2);
        let line = DataMatrix::from_rows(&[vec![-1.0, 0.0], vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0], vec![0.0, -1.0]]).unwrap();
        let r = approx_depth_rs(&[0.0, 0.0], &line, DepthNotion::Projection, &SearchBudget::new(Strategy::RandomSearch, 20, 1)).unwrap();
        assert_eq!(r.value.value, 1.0);
        assert!(optimal_direction(&r, &[0.0, 0.0], &line).unwrap().ambiguous);
    }

    #[test]
    fn budget_validation() {
        let data = gaussian(20, 5, 1);
        let mut b = SearchBudget::new(Strategy::NelderMead, 5, 0);
        assert!(approx_depth_neldermead(&[0.0; 5], &data, DepthNotion::Projection, &b).is_err());
        b.n_directions = 6;
        assert!(approx_depth_neldermead(&[0.0; 5], &data, DepthNotion::Projection, &b).is_ok());
        assert!(approx_depth_rs(&[0.0; 5], &data, DepthNotion::Projection, &b).is_err());
        assert!(approx_depth_rs(&[0.0; 5], &data, DepthNotion::Simplicial, &SearchBudget::new(Strategy::RandomSearch, 5, 0)).is_err());
        assert_eq!("RRS".parse::<Strategy>().unwrap(), Strategy::RefinedRandomSearch);
        assert_eq!("nelder-mead".parse::<Strategy>().unwrap(), Strategy::NelderMead);
    }
}
