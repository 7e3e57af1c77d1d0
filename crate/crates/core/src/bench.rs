//! Synthetic scenarios, the p-metric and the repetition harness.
//!
//! Every generator is a pure function of its [`Scenario`]; normal points come
//! first, anomalies are appended, and the sample is shuffled with the same
//! seeded stream. Postconditions (counts, norm conditions, anomaly placement)
//! are checked on every draw.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::depths::DepthNotion;
use crate::detect::{fit_scored, subsample_size, threshold_detect_all, FitConfig, ThresholdPolicy, DEFAULT_SIMPLEX_SAMPLES};
use crate::error::{DepthError, Result};
use crate::linalg::{cholesky_lower, norm, symmetric_eigen, DataMatrix, LocationScatter};
use crate::optimize::SearchBudget;
use crate::seeding::{derive, rng_from, DepthRng};

const CAUCHY_MAX_TRIES: usize = 1_000_000;
const MASK_MAX_TRIES: usize = 1_000_000;
const INTRO_COV: [f64; 4] = [1.0, 0.75, 0.75, 1.0];
/// Normal points fixed near the center of the introductory examples.
const INTRO_CENTRAL: [[f64; 2]; 4] = [[0.0, 0.0], [0.5, 0.4], [-0.4, -0.6], [0.8, 0.9]];
/// Planted anomalies of the introductory examples; the last one lies within
/// the marginal ranges of the normal data but off its correlation axis.
pub const INTRO_ANOMALIES: [[f64; 2]; 4] = [[4.0, 0.0], [0.0, -4.0], [4.0, 4.2], [1.8, -1.8]];
const CLUSTER_MEAN: [f64; 2] = [1.0, 1.0];
const CLUSTER_COV: [f64; 4] = [1.0, 1.0, 1.0, 2.0];
const CLUSTER_ANOMALY_MEAN: [f64; 2] = [3.181, -0.222];
const MASK_POINTS: usize = 25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioTag {
    Intro500,
    Intro25,
    ClusteredS4,
    MaskedS4,
    RobustS51,
    ExtrapS52,
    ToeplitzS6,
}

impl ScenarioTag {
    pub const ALL: [ScenarioTag; 7] = [
        ScenarioTag::Intro500,
        ScenarioTag::Intro25,
        ScenarioTag::ClusteredS4,
        ScenarioTag::MaskedS4,
        ScenarioTag::RobustS51,
        ScenarioTag::ExtrapS52,
        ScenarioTag::ToeplitzS6,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ScenarioTag::Intro500 => "intro_500",
            ScenarioTag::Intro25 => "intro_25",
            ScenarioTag::ClusteredS4 => "clustered_s4",
            ScenarioTag::MaskedS4 => "masked_s4",
            ScenarioTag::RobustS51 => "robust_s51",
            ScenarioTag::ExtrapS52 => "extrap_s52",
            ScenarioTag::ToeplitzS6 => "toeplitz_s6",
        }
    }

    fn stream(self) -> u64 {
        self as u64 + 0xB0
    }
}

impl fmt::Display for ScenarioTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ScenarioTag {
    type Err = DepthError;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_lowercase().replace('-', "_");
        ScenarioTag::ALL
            .into_iter()
            .find(|t| t.as_str() == norm)
            .ok_or_else(|| DepthError::BadScenario(format!("unknown scenario '{s}'")))
    }
}

/// Which half of a train/test scenario to draw.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Split {
    Train,
    Test,
}

impl FromStr for Split {
    type Err = DepthError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "train" => Ok(Split::Train),
            "test" => Ok(Split::Test),
            _ => Err(DepthError::BadScenario(format!("unknown split '{s}'"))),
        }
    }
}

/// How the anomaly mean of `toeplitz_s6` is scaled along the smallest
/// principal axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Placement {
    /// Mahalanobis distance `shift` times the largest one among the drawn
    /// normal points.
    Relative,
    /// Mahalanobis distance exactly `shift`.
    Absolute,
}

impl FromStr for Placement {
    type Err = DepthError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "relative" => Ok(Placement::Relative),
            "absolute" => Ok(Placement::Absolute),
            _ => Err(DepthError::BadScenario(format!("unknown placement '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioParams {
    /// Toeplitz correlation `Sigma_ij = rho^|i - j|`.
    pub rho: f64,
    /// Toeplitz anomaly distance along the smallest principal axis.
    pub shift: f64,
    pub placement: Placement,
    /// Every coordinate of the normal mean in `robust_s51`.
    pub normal_mean: f64,
    /// Anomalies must exceed this multiple of the largest normal norm.
    pub norm_factor: f64,
    pub split: Split,
}

impl Default for ScenarioParams {
    fn default() -> Self {
        Self {
            rho: 0.5,
            shift: 1.25,
            placement: Placement::Relative,
            normal_mean: 1.0,
            norm_factor: 1.5,
            split: Split::Train,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub tag: ScenarioTag,
    pub d: usize,
    pub n: usize,
    pub epsilon: f64,
    pub params: ScenarioParams,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledSample {
    pub data: DataMatrix,
    /// `true` marks an anomaly.
    pub labels: Vec<bool>,
}

impl LabeledSample {
    pub fn anomaly_count(&self) -> usize {
        self.labels.iter().filter(|&&a| a).count()
    }

    pub fn anomaly_rows(&self) -> Vec<usize> {
        (0..self.labels.len()).filter(|&i| self.labels[i]).collect()
    }
}

/// `ceil(n epsilon)`, robust to `n epsilon` landing just above an integer.
pub fn anomaly_count(n: usize, epsilon: f64) -> usize {
    ((n as f64 * epsilon - 1e-9).ceil().max(0.0) as usize).min(n)
}

impl Scenario {
    /// The tag's default dimension, size and contamination.
    pub fn new(tag: ScenarioTag, seed: u64) -> Self {
        let (d, n, epsilon) = match tag {
            ScenarioTag::Intro500 => (2, 500, 0.0),
            ScenarioTag::Intro25 => (2, 25, 0.16),
            ScenarioTag::ClusteredS4 => (2, 100, 0.1),
            ScenarioTag::MaskedS4 => (2, 125, 0.08),
            ScenarioTag::RobustS51 => (10, 1000, 0.05),
            ScenarioTag::ExtrapS52 => (2, 100, 0.1),
            ScenarioTag::ToeplitzS6 => (10, 1000, 0.05),
        };
        Self { tag, d, n, epsilon, params: ScenarioParams::default(), seed }
    }

    /// Defaults adjusted for `split` (only the size and contamination of the
    /// two-phase scenarios change).
    pub fn with_split(mut self, split: Split) -> Self {
        self.params.split = split;
        match (self.tag, split) {
            (ScenarioTag::Intro500, Split::Test) => {
                self.n = 8;
                self.epsilon = 0.5;
            }
            (ScenarioTag::ExtrapS52, Split::Test) => {
                self.n = 300;
                self.epsilon = 50.0 / 300.0;
            }
            _ => {}
        }
        self
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        Self { seed, ..self.clone() }
    }

    pub fn anomalies(&self) -> usize {
        anomaly_count(self.n, self.epsilon)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(DepthError::BadScenario(m));
        if !(0.0..=0.5).contains(&self.epsilon) {
            return bad(format!("epsilon {} outside [0, 0.5]", self.epsilon));
        }
        if self.n == 0 || self.d == 0 {
            return bad("n and d must be positive".into());
        }
        let k = self.anomalies();
        let fixed_2d = matches!(
            self.tag,
            ScenarioTag::Intro500 | ScenarioTag::Intro25 | ScenarioTag::ClusteredS4 | ScenarioTag::MaskedS4 | ScenarioTag::ExtrapS52
        );
        if fixed_2d && self.d != 2 {
            return bad(format!("{} is two-dimensional, got d = {}", self.tag, self.d));
        }
        match self.tag {
            ScenarioTag::Intro500 => match self.params.split {
                Split::Train if self.epsilon != 0.0 => return bad("intro_500 training data has no anomalies".into()),
                Split::Test if (self.n, k) != (8, 4) => return bad("intro_500 test split is 4 normals + 4 anomalies".into()),
                _ => {}
            },
            ScenarioTag::Intro25 => {
                if (self.n, k) != (25, 4) {
                    return bad("intro_25 is 21 normals + 4 anomalies (n = 25, epsilon = 0.16)".into());
                }
            }
            ScenarioTag::MaskedS4 => {
                if self.n < k + MASK_POINTS + 1 {
                    return bad(format!("masked_s4 needs n > anomalies + {MASK_POINTS}"));
                }
                if k == 0 {
                    return bad("masked_s4 needs anomalies to mask".into());
                }
            }
            ScenarioTag::RobustS51 => {
                if k == self.n {
                    return bad("robust_s51 needs normal points".into());
                }
                if !(self.params.norm_factor > 0.0) {
                    return bad("norm_factor must be positive".into());
                }
            }
            ScenarioTag::ToeplitzS6 => {
                if !(self.params.rho.abs() < 1.0) {
                    return bad(format!("rho {} outside (-1, 1)", self.params.rho));
                }
                if !(self.params.shift >= 0.0) {
                    return bad("shift must be non-negative".into());
                }
                if k == self.n {
                    return bad("toeplitz_s6 needs normal points".into());
                }
            }
            ScenarioTag::ClusteredS4 | ScenarioTag::ExtrapS52 => {}
        }
        Ok(())
    }
}

fn gaussian_vec(rng: &mut DepthRng, d: usize) -> Vec<f64> {
    (0..d).map(|_| rng.sample(StandardNormal)).collect()
}

/// `mu + L z` for lower-triangular row-major `L`.
fn correlated(rng: &mut DepthRng, mu: &[f64], l: &[f64]) -> Vec<f64> {
    let d = mu.len();
    let z = gaussian_vec(rng, d);
    (0..d).map(|i| mu[i] + (0..=i).map(|j| l[i * d + j] * z[j]).sum::<f64>()).collect()
}

fn isotropic(rng: &mut DepthRng, mu: &[f64], sd: f64) -> Vec<f64> {
    mu.iter().map(|m| m + sd * rng.sample::<f64, _>(StandardNormal)).collect()
}

fn scaled(a: &[f64], s: f64) -> Vec<f64> {
    a.iter().map(|v| v * s).collect()
}

pub fn toeplitz(d: usize, rho: f64) -> Vec<f64> {
    (0..d * d).map(|k| rho.powi((k / d).abs_diff(k % d) as i32)).collect()
}

/// Draws the scenario; see the module docs for the layout.
pub fn generate(s: &Scenario) -> Result<LabeledSample> {
    s.validate()?;
    let mut rng = rng_from(derive(s.seed, s.tag.stream()));
    let k = s.anomalies();
    let n_normal = s.n - k;
    let mut rows: Vec<(Vec<f64>, bool)> = Vec::with_capacity(s.n);

    match s.tag {
        ScenarioTag::Intro500 | ScenarioTag::Intro25 => {
            let l = cholesky_lower(&INTRO_COV, 2)?;
            let random = match (s.tag, s.params.split) {
                (ScenarioTag::Intro500, Split::Train) => s.n,
                (ScenarioTag::Intro500, Split::Test) => 0,
                _ => n_normal - INTRO_CENTRAL.len(),
            };
            rows.extend((0..random).map(|_| (correlated(&mut rng, &[0.0, 0.0], &l), false)));
            if !(s.tag == ScenarioTag::Intro500 && s.params.split == Split::Train) {
                rows.extend(INTRO_CENTRAL.iter().map(|p| (p.to_vec(), false)));
                rows.extend(INTRO_ANOMALIES.iter().map(|p| (p.to_vec(), true)));
            }
        }
        ScenarioTag::ClusteredS4 | ScenarioTag::MaskedS4 => {
            let l = cholesky_lower(&CLUSTER_COV, 2)?;
            let l_anom = scaled(&l, 1.0 / 6.0);
            let gaussians = if s.tag == ScenarioTag::MaskedS4 { n_normal - MASK_POINTS } else { n_normal };
            rows.extend((0..gaussians).map(|_| (correlated(&mut rng, &CLUSTER_MEAN, &l), false)));
            let anomalies: Vec<Vec<f64>> = (0..k).map(|_| correlated(&mut rng, &CLUSTER_ANOMALY_MEAN, &l_anom)).collect();
            if s.tag == ScenarioTag::MaskedS4 {
                let law = LocationScatter::new(CLUSTER_MEAN.to_vec(), CLUSTER_COV.to_vec())?;
                let dist: Vec<f64> = anomalies.iter().map(|a| law.mahalanobis_sq(a)).collect::<Result<_>>()?;
                let lo = dist.iter().copied().fold(f64::INFINITY, f64::min);
                let hi = dist.iter().copied().fold(0.0, f64::max);
                for _ in 0..MASK_POINTS {
                    let p = (0..MASK_MAX_TRIES)
                        .map(|_| correlated(&mut rng, &CLUSTER_MEAN, &l))
                        .find(|p| law.mahalanobis_sq(p).is_ok_and(|q| (lo..=hi).contains(&q)))
                        .ok_or_else(|| DepthError::BadScenario("could not draw masking points".into()))?;
                    rows.push((p, false));
                }
            }
            rows.extend(anomalies.into_iter().map(|a| (a, true)));
        }
        ScenarioTag::RobustS51 => {
            let mean = vec![s.params.normal_mean; s.d];
            let normals: Vec<Vec<f64>> = (0..n_normal).map(|_| isotropic(&mut rng, &mean, 1.0)).collect();
            let bound = s.params.norm_factor * normals.iter().map(|y| norm(y)).fold(0.0, f64::max);
            rows.extend(normals.into_iter().map(|y| (y, false)));
            for _ in 0..k {
                let mut z = None;
                let mut last = Vec::new();
                for _ in 0..CAUCHY_MAX_TRIES {
                    let g = gaussian_vec(&mut rng, s.d);
                    let w: f64 = rng.sample::<f64, _>(StandardNormal).abs();
                    let c = scaled(&g, 1.0 / w);
                    if norm(&c) > bound {
                        z = Some(c);
                        break;
                    }
                    last = c;
                }
                let z = z.unwrap_or_else(|| {
                    let r = norm(&last).max(f64::MIN_POSITIVE);
                    scaled(&last, bound * (1.0 + 1e-9) / r)
                });
                rows.push((z, true));
            }
            if rows.iter().filter(|r| r.1).any(|r| !(norm(&r.0) > bound)) {
                return Err(DepthError::BadScenario("anomaly norm condition violated".into()));
            }
        }
        ScenarioTag::ExtrapS52 => {
            rows.extend((0..n_normal).map(|_| (isotropic(&mut rng, &[0.5, 0.5], 0.25), false)));
            let (old, new) = match s.params.split {
                Split::Train => (k, 0),
                Split::Test => (k - k / 2, k / 2),
            };
            rows.extend((0..old).map(|_| (isotropic(&mut rng, &[-0.75, 0.5], 0.1), true)));
            rows.extend((0..new).map(|_| (isotropic(&mut rng, &[1.75, 0.5], 0.1), true)));
        }
        ScenarioTag::ToeplitzS6 => {
            let sigma = toeplitz(s.d, s.params.rho);
            let law = LocationScatter::new(vec![0.0; s.d], sigma.clone())?;
            let l = cholesky_lower(&sigma, s.d)?;
            let zero = vec![0.0; s.d];
            let normals: Vec<Vec<f64>> = (0..n_normal).map(|_| correlated(&mut rng, &zero, &l)).collect();
            let target = match s.params.placement {
                Placement::Absolute => s.params.shift,
                Placement::Relative => {
                    let far = normals
                        .iter()
                        .map(|y| law.mahalanobis_sq(y))
                        .collect::<Result<Vec<_>>>()?
                        .into_iter()
                        .fold(0.0, f64::max);
                    s.params.shift * far.sqrt()
                }
            };
            let center = toeplitz_anomaly_center(s.d, s.params.rho, target)?;
            let got = law.mahalanobis_sq(&center)?.sqrt();
            if (got - target).abs() > 1e-9 * target.max(1.0) {
                return Err(DepthError::BadScenario(format!("anomaly center at distance {got}, wanted {target}")));
            }
            rows.extend(normals.into_iter().map(|y| (y, false)));
            rows.extend((0..k).map(|_| (isotropic(&mut rng, &center, 0.1f64.sqrt()), true)));
        }
    }

    if rows.len() != s.n || rows.iter().filter(|r| r.1).count() != k {
        return Err(DepthError::BadScenario(format!(
            "generator produced {} rows with {} anomalies, expected {} and {k}",
            rows.len(),
            rows.iter().filter(|r| r.1).count(),
            s.n
        )));
    }
    rows.shuffle(&mut rng);
    let labels = rows.iter().map(|r| r.1).collect();
    let values = rows.into_iter().flat_map(|r| r.0).collect();
    Ok(LabeledSample { data: DataMatrix::new(s.n, s.d, values)?, labels })
}

/// Point at Mahalanobis distance `distance` from the origin along the
/// eigenvector of the smallest eigenvalue of the Toeplitz matrix.
pub fn toeplitz_anomaly_center(d: usize, rho: f64, distance: f64) -> Result<Vec<f64>> {
    let (values, vectors) = symmetric_eigen(&toeplitz(d, rho), d);
    if !(values[0] > 0.0) {
        return Err(DepthError::BadScenario(format!("Toeplitz matrix with rho = {rho} is not positive definite")));
    }
    Ok(scaled(&vectors[0], distance * values[0].sqrt()))
}

/// Share of anomalies among the points flagged by the smallest threshold that
/// catches all of them: `|Z| / #{x : depth(x) <= max anomaly depth}`.
pub fn p_metric(depths: &[f64], labels: &[bool]) -> Result<f64> {
    let t = threshold_detect_all(depths, labels)?;
    let anomalies = labels.iter().filter(|&&a| a).count();
    let flagged = depths.iter().filter(|&&v| v < t).count();
    Ok(anomalies as f64 / flagged as f64)
}

/// Depth method under test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodConfig {
    pub notion: DepthNotion,
    pub budget: SearchBudget,
    pub subsample_fraction: f64,
    pub simplex_samples: usize,
}

impl MethodConfig {
    pub fn new(notion: DepthNotion, budget: SearchBudget) -> Self {
        Self { notion, budget, subsample_fraction: 1.0, simplex_samples: DEFAULT_SIMPLEX_SAMPLES }
    }

    /// Short label such as `projection/rrs-200`.
    pub fn label(&self) -> String {
        let mut s = format!("{}/{}-{}", self.notion, self.budget.strategy, self.budget.n_directions);
        if self.subsample_fraction != 1.0 {
            s.push_str(&format!("@{}", self.subsample_fraction));
        }
        s
    }

    fn fit_config(&self) -> FitConfig {
        FitConfig {
            notion: self.notion,
            budget: self.budget.clone(),
            policy: ThresholdPolicy::DetectAll,
            subsample_fraction: self.subsample_fraction,
            simplex_samples: self.simplex_samples,
        }
    }
}

/// Depths of every row of `sample` against (a subsample of) itself.
pub fn sample_depths(sample: &LabeledSample, method: &MethodConfig) -> Result<Vec<f64>> {
    let mut cfg = method.fit_config();
    cfg.policy = ThresholdPolicy::Fixed { value: 0.0 };
    let (_, reports) = fit_scored(&sample.data, &cfg, None)?;
    Ok(reports.iter().map(|r| r.depth.value).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FiveNumber {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

impl FiveNumber {
    /// Quartiles by linear interpolation between order statistics.
    pub fn of(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(DepthError::EmptyData);
        }
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        let q = |p: f64| {
            let h = p * (v.len() - 1) as f64;
            let (lo, frac) = (h.floor() as usize, h - h.floor());
            if frac == 0.0 {
                v[lo]
            } else {
                v[lo] + frac * (v[lo + 1] - v[lo])
            }
        };
        Ok(Self { min: v[0], q1: q(0.25), median: q(0.5), q3: q(0.75), max: v[v.len() - 1] })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepResult {
    pub rep: usize,
    pub scenario_seed: u64,
    pub method_seed: u64,
    pub p: f64,
    /// Wall-clock time of the depth computation; not deterministic.
    pub millis: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepetitionSummary {
    pub scenario: Scenario,
    pub method: MethodConfig,
    pub reps: Vec<RepResult>,
    pub summary: FiveNumber,
}

impl RepetitionSummary {
    pub fn p_values(&self) -> Vec<f64> {
        self.reps.iter().map(|r| r.p).collect()
    }
}

/// One draw, one depth computation, one p value.
pub fn run_once(s: &Scenario, method: &MethodConfig) -> Result<(f64, f64)> {
    let sample = generate(s)?;
    let start = Instant::now();
    let depths = sample_depths(&sample, method)?;
    let millis = start.elapsed().as_secs_f64() * 1e3;
    Ok((p_metric(&depths, &sample.labels)?, millis))
}

/// Repetition `r` draws with scenario seed `s.seed ^ r` and searches with
/// method seed `budget.seed ^ r`. Results are listed in repetition order.
pub fn run_repetitions(s: &Scenario, method: &MethodConfig, reps: usize) -> Result<RepetitionSummary> {
    if reps == 0 {
        return Err(DepthError::BadScenario("reps must be at least 1".into()));
    }
    s.validate()?;
    subsample_size(s.n, s.d, method.subsample_fraction)?;
    let rows = (0..reps)
        .into_par_iter()
        .map(|r| {
            let scenario_seed = s.seed ^ r as u64;
            let method_seed = method.budget.seed ^ r as u64;
            let m = MethodConfig { budget: method.budget.with_seed(method_seed), ..method.clone() };
            let (p, millis) = run_once(&s.with_seed(scenario_seed), &m)?;
            Ok(RepResult { rep: r, scenario_seed, method_seed, p, millis })
        })
        .collect::<Result<Vec<_>>>()?;
    let summary = FiveNumber::of(&rows.iter().map(|r| r.p).collect::<Vec<_>>())?;
    Ok(RepetitionSummary { scenario: s.clone(), method: method.clone(), reps: rows, summary })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyCell {
    pub fraction: f64,
    pub n_directions: usize,
    pub result: RepetitionSummary,
}

/// [`run_repetitions`] over every `(fraction, budget)` pair, fractions outer.
pub fn subsample_study(
    s: &Scenario,
    method: &MethodConfig,
    fractions: &[f64],
    budgets: &[usize],
    reps: usize,
) -> Result<Vec<StudyCell>> {
    for &f in fractions {
        subsample_size(s.n, s.d, f)?;
    }
    let mut cells = Vec::with_capacity(fractions.len() * budgets.len());
    for &fraction in fractions {
        for &n_directions in budgets {
            let mut budget = method.budget.clone();
            budget.n_directions = n_directions;
            let m = MethodConfig { budget, subsample_fraction: fraction, ..method.clone() };
            cells.push(StudyCell { fraction, n_directions, result: run_repetitions(s, &m, reps)? });
        }
    }
    Ok(cells)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrderedDepth {
    /// 1-based rank by increasing depth; ties by row index.
    pub rank: usize,
    pub index: usize,
    pub depth: f64,
    pub anomaly: bool,
}

pub fn ordered_depths(depths: &[f64], labels: &[bool]) -> Result<Vec<OrderedDepth>> {
    if depths.len() != labels.len() {
        return Err(DepthError::DimensionMismatch { expected: depths.len(), got: labels.len() });
    }
    let mut idx: Vec<usize> = (0..depths.len()).collect();
    idx.sort_by(|&a, &b| depths[a].total_cmp(&depths[b]).then(a.cmp(&b)));
    Ok(idx
        .into_iter()
        .enumerate()
        .map(|(r, i)| OrderedDepth { rank: r + 1, index: i, depth: depths[i], anomaly: labels[i] })
        .collect())
}
