//! Depth-based anomaly detectors.
//!
//! A [`DepthModel`] stores what scoring needs (the reference sample, or only
//! `(mu, Sigma)` for the Mahalanobis rule) plus a threshold; a point is
//! anomalous when its depth falls strictly below the threshold. Models
//! round-trip through a versioned JSON document.

use std::fmt;
use std::str::FromStr;

use rand::seq::index::sample;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::depths::{
    binomial, halfspace_depth_exact, mahalanobis_depth, monte_carlo_simplex_depth, simplicial_depth,
    simplicial_volume_depth, DepthNotion, DepthValue, Exactness, SimplexNotion, COMBINATORIAL_BUDGET,
};
use crate::error::{DepthError, Result};
use crate::linalg::{moment_estimates, DataMatrix, LocationScatter, UnitDirection};
use crate::optimize::{approx_depth, optimal_direction, SearchBudget, Strategy};
use crate::seeding::{derive, point_seed, rng_from};

pub const FORMAT_VERSION: u32 = 1;
pub const DEFAULT_ALPHA: f64 = 0.05;
/// Gap added to the largest anomaly depth by [`threshold_detect_all`].
pub const DETECT_ALL_EPSILON: f64 = 1e-12;
pub const DEFAULT_SIMPLEX_SAMPLES: usize = 200_000;

const SUBSAMPLE_STREAM: u64 = 0x5B5A;

/// How a fitted model picks its threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ThresholdPolicy {
    /// Lower empirical `alpha`-quantile of the training depths.
    Quantile { alpha: f64 },
    /// Smallest threshold that flags every labeled anomaly.
    DetectAll,
    Fixed { value: f64 },
}

impl Default for ThresholdPolicy {
    fn default() -> Self {
        ThresholdPolicy::Quantile { alpha: DEFAULT_ALPHA }
    }
}

impl fmt::Display for ThresholdPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ThresholdPolicy::Quantile { alpha } => write!(f, "quantile({alpha})"),
            ThresholdPolicy::DetectAll => f.write_str("detect_all"),
            ThresholdPolicy::Fixed { value } => write!(f, "fixed({value})"),
        }
    }
}

impl FromStr for ThresholdPolicy {
    type Err = DepthError;

    /// `quantile`, `quantile:0.1`, `detect-all`, `fixed:0.1575`.
    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_lowercase().replace('-', "_");
        let (kind, arg) = match norm.split_once(':') {
            Some((k, a)) => (k.to_string(), Some(a.to_string())),
            None => (norm.clone(), None),
        };
        let parse_arg = |a: Option<String>| -> Result<Option<f64>> {
            a.map(|v| v.parse::<f64>().map_err(|_| DepthError::InvalidInput(format!("bad threshold argument '{v}'"))))
                .transpose()
        };
        match kind.as_str() {
            "quantile" => Ok(ThresholdPolicy::Quantile { alpha: parse_arg(arg)?.unwrap_or(DEFAULT_ALPHA) }),
            "detect_all" => Ok(ThresholdPolicy::DetectAll),
            "fixed" => parse_arg(arg)?
                .map(|value| ThresholdPolicy::Fixed { value })
                .ok_or_else(|| DepthError::InvalidInput("fixed threshold needs a value, e.g. fixed:0.1".into())),
            _ => Err(DepthError::InvalidInput(format!("unknown threshold policy '{s}'"))),
        }
    }
}

/// Everything [`fit`] needs besides the data.
#[derive(Debug, Clone, PartialEq)]
pub struct FitConfig {
    pub notion: DepthNotion,
    pub budget: SearchBudget,
    pub policy: ThresholdPolicy,
    pub subsample_fraction: f64,
    pub simplex_samples: usize,
}

impl FitConfig {
    pub fn new(notion: DepthNotion, budget: SearchBudget) -> Self {
        Self {
            notion,
            budget,
            policy: ThresholdPolicy::default(),
            subsample_fraction: 1.0,
            simplex_samples: DEFAULT_SIMPLEX_SAMPLES,
        }
    }
}

/// A trained detector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DepthModel {
    pub format_version: u32,
    pub notion: DepthNotion,
    pub dim: usize,
    pub threshold: f64,
    pub policy: ThresholdPolicy,
    pub budget: SearchBudget,
    pub subsample_fraction: f64,
    pub simplex_samples: usize,
    /// Location and scatter; present for Mahalanobis and the affine-invariant
    /// volume depth.
    pub ls: Option<LocationScatter>,
    /// Reference sample depths are computed against; absent for Mahalanobis.
    pub sample: Option<DataMatrix>,
}

/// Result of scoring one point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DepthReport {
    pub depth: DepthValue,
    pub is_anomaly: bool,
    /// Canonical-sign optimal direction, for notions scored by direction search.
    pub direction: Option<UnitDirection>,
    pub ambiguous: bool,
}

/// Rows kept when subsampling `n` rows in dimension `d`: `round(fraction n)`,
/// which must reach `d + 1`.
pub fn subsample_size(n: usize, d: usize, fraction: f64) -> Result<usize> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(DepthError::BadScenario(format!("subsample fraction {fraction} outside (0, 1]")));
    }
    if fraction == 1.0 {
        return Ok(n);
    }
    let m = ((fraction * n as f64).round() as usize).clamp(1, n);
    if m < d + 1 {
        return Err(DepthError::BadScenario(format!(
            "subsample of {m} rows is smaller than d + 1 = {}",
            d + 1
        )));
    }
    Ok(m)
}

fn subsample(data: &DataMatrix, fraction: f64, seed: u64) -> Result<DataMatrix> {
    let n = data.nrows();
    let m = subsample_size(n, data.ncols(), fraction)?;
    if m == n {
        return Ok(data.clone());
    }
    let mut rng = rng_from(derive(seed, SUBSAMPLE_STREAM));
    let mut idx = sample(&mut rng, n, m).into_vec();
    idx.sort_unstable();
    data.select_rows(&idx)
}

/// Model for `data` with threshold 0, without scoring the training rows.
pub fn build_model(data: &DataMatrix, config: &FitConfig) -> Result<DepthModel> {
    let d = data.ncols();
    config.budget.validate(d)?;
    if config.simplex_samples < 1000 {
        return Err(DepthError::InvalidInput("simplex_samples must be >= 1000".into()));
    }
    let reference = subsample(data, config.subsample_fraction, config.budget.seed)?;
    let (ls, sample) = match config.notion {
        DepthNotion::Mahalanobis => (Some(moment_estimates(&reference)?), None),
        DepthNotion::SimplicialVolumeAffineInvariant => (Some(moment_estimates(&reference)?), Some(reference)),
        _ => (None, Some(reference)),
    };
    Ok(DepthModel {
        format_version: FORMAT_VERSION,
        notion: config.notion,
        dim: d,
        threshold: 0.0,
        policy: config.policy,
        budget: config.budget.clone(),
        subsample_fraction: config.subsample_fraction,
        simplex_samples: config.simplex_samples,
        ls,
        sample,
    })
}

/// Trains a detector and returns it with the reports for the training rows.
/// `labels` is required by [`ThresholdPolicy::DetectAll`] only.
pub fn fit_scored(
    data: &DataMatrix,
    config: &FitConfig,
    labels: Option<&[bool]>,
) -> Result<(DepthModel, Vec<DepthReport>)> {
    let mut model = build_model(data, config)?;
    let mut reports = score_batch(&model, data)?;
    let depths: Vec<f64> = reports.iter().map(|r| r.depth.value).collect();
    model.threshold = match config.policy {
        ThresholdPolicy::Quantile { alpha } => threshold_quantile(&depths, alpha)?,
        ThresholdPolicy::DetectAll => {
            let labels = labels.ok_or_else(|| DepthError::InvalidInput("detect_all policy needs labels".into()))?;
            threshold_detect_all(&depths, labels)?
        }
        ThresholdPolicy::Fixed { value } => {
            if !(0.0..=1.0).contains(&value) {
                return Err(DepthError::InvalidInput(format!("threshold {value} outside [0, 1]")));
            }
            value
        }
    }
    .min(1.0);
    for r in &mut reports {
        r.is_anomaly = r.depth.value < model.threshold;
    }
    Ok((model, reports))
}

pub fn fit(data: &DataMatrix, config: &FitConfig, labels: Option<&[bool]>) -> Result<DepthModel> {
    fit_scored(data, config, labels).map(|(m, _)| m)
}

impl DepthModel {
    /// Depth of `x` and, for direction searches, the optimal direction.
    pub fn depth(&self, x: &[f64]) -> Result<(DepthValue, Option<(UnitDirection, bool)>)> {
        if x.len() != self.dim {
            return Err(DepthError::DimensionMismatch { expected: self.dim, got: x.len() });
        }
        let d = self.dim;
        match self.notion {
            DepthNotion::Mahalanobis => Ok((mahalanobis_depth(x, self.ls()?)?, None)),
            DepthNotion::Halfspace if d <= 2 => Ok((halfspace_depth_exact(x, self.sample()?)?, None)),
            DepthNotion::Halfspace | DepthNotion::Projection | DepthNotion::ProjectionAsymmetric => {
                let data = self.sample()?;
                let seed = point_seed(self.budget.seed, x);
                let budget = if d == 1 {
                    // the sphere is {-1, +1}: evaluate both
                    SearchBudget::new(Strategy::NelderMead, 2, seed)
                } else {
                    self.budget.with_seed(seed)
                };
                let res = approx_depth(x, data, self.notion, &budget)?;
                let opt = optimal_direction(&res, x, data)?;
                let mut value = res.value;
                if d == 1 {
                    value.exactness = Exactness::Exact;
                }
                Ok((value, Some((opt.direction, opt.ambiguous))))
            }
            DepthNotion::Simplicial => {
                let data = self.sample()?;
                if binomial(data.nrows(), d + 1) <= COMBINATORIAL_BUDGET {
                    Ok((simplicial_depth(x, data)?, None))
                } else {
                    let seed = point_seed(self.budget.seed, x);
                    Ok((monte_carlo_simplex_depth(x, data, SimplexNotion::Simplicial, None, self.simplex_samples, seed)?, None))
                }
            }
            DepthNotion::SimplicialVolume | DepthNotion::SimplicialVolumeAffineInvariant => {
                let data = self.sample()?;
                let affine = self.notion == DepthNotion::SimplicialVolumeAffineInvariant;
                let ls = if affine { Some(self.ls()?) } else { None };
                if binomial(data.nrows(), d) <= COMBINATORIAL_BUDGET {
                    Ok((simplicial_volume_depth(x, data, affine, ls)?, None))
                } else {
                    let seed = point_seed(self.budget.seed, x);
                    let notion = SimplexNotion::try_from(self.notion)?;
                    Ok((monte_carlo_simplex_depth(x, data, notion, ls, self.simplex_samples, seed)?, None))
                }
            }
        }
    }

    fn ls(&self) -> Result<&LocationScatter> {
        self.ls.as_ref().ok_or_else(|| DepthError::Format(format!("{} model without location/scatter", self.notion)))
    }

    fn sample(&self) -> Result<&DataMatrix> {
        self.sample.as_ref().ok_or_else(|| DepthError::Format(format!("{} model without reference sample", self.notion)))
    }

    /// Same model with a different threshold.
    pub fn with_threshold(&self, threshold: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&threshold) {
            return Err(DepthError::InvalidInput(format!("threshold {threshold} outside [0, 1]")));
        }
        Ok(Self { threshold, ..self.clone() })
    }

    fn validate(&self) -> Result<()> {
        if self.format_version != FORMAT_VERSION {
            return Err(DepthError::Format(format!(
                "model format version {} is not supported (expected {FORMAT_VERSION})",
                self.format_version
            )));
        }
        if !(0.0..=1.0).contains(&self.threshold) {
            return Err(DepthError::Format(format!("threshold {} outside [0, 1]", self.threshold)));
        }
        match self.notion {
            DepthNotion::Mahalanobis => {
                self.ls()?;
            }
            DepthNotion::SimplicialVolumeAffineInvariant => {
                self.ls()?;
                self.sample()?;
            }
            _ => {
                self.sample()?;
            }
        }
        if let Some(ls) = &self.ls {
            if ls.dim() != self.dim {
                return Err(DepthError::Format("location/scatter dimension disagrees with model".into()));
            }
            // re-derive inverse and determinant so a hand-edited file cannot
            // smuggle in inconsistent values
            let fresh = LocationScatter::new(ls.mu.clone(), ls.sigma.clone())
                .map_err(|e| DepthError::Format(format!("invalid scatter: {e}")))?;
            if fresh != *ls {
                return Err(DepthError::Format("stored inverse/determinant disagree with scatter".into()));
            }
        }
        if let Some(s) = &self.sample {
            if s.ncols() != self.dim {
                return Err(DepthError::Format("sample dimension disagrees with model".into()));
            }
        }
        self.budget.validate(self.dim).map_err(|e| DepthError::Format(e.to_string()))
    }
}

pub fn score(model: &DepthModel, x: &[f64]) -> Result<DepthReport> {
    let (depth, dir) = model.depth(x)?;
    let (direction, ambiguous) = match dir {
        Some((u, a)) => (Some(u), a),
        None => (None, false),
    };
    Ok(DepthReport { depth, is_anomaly: depth.value < model.threshold, direction, ambiguous })
}

/// Scores every row in parallel; the output order follows the input.
pub fn score_batch(model: &DepthModel, points: &DataMatrix) -> Result<Vec<DepthReport>> {
    if points.ncols() != model.dim {
        return Err(DepthError::DimensionMismatch { expected: model.dim, got: points.ncols() });
    }
    (0..points.nrows()).into_par_iter().map(|i| score(model, points.row(i))).collect()
}

/// Lower empirical `alpha`-quantile: the `floor(alpha (n - 1))`-th smallest.
pub fn threshold_quantile(depths: &[f64], alpha: f64) -> Result<f64> {
    if depths.is_empty() {
        return Err(DepthError::EmptyData);
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(DepthError::InvalidInput(format!("alpha {alpha} outside (0, 1)")));
    }
    let mut sorted = depths.to_vec();
    sorted.sort_by(f64::total_cmp);
    let k = (alpha * (sorted.len() - 1) as f64).floor() as usize;
    Ok(sorted[k])
}

/// `max anomaly depth + 1e-12`.
pub fn threshold_detect_all(depths: &[f64], anomaly_mask: &[bool]) -> Result<f64> {
    if depths.len() != anomaly_mask.len() {
        return Err(DepthError::InvalidInput(format!(
            "{} depths but {} labels",
            depths.len(),
            anomaly_mask.len()
        )));
    }
    depths
        .iter()
        .zip(anomaly_mask)
        .filter(|(_, &a)| a)
        .map(|(&v, _)| v)
        .max_by(f64::total_cmp)
        .map(|m| m + DETECT_ALL_EPSILON)
        .ok_or(DepthError::NoAnomalies)
}

/// Axis-aligned validation bounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxRule {
    pub bounds: Vec<(f64, f64)>,
}

impl BoxRule {
    /// Per-coordinate bounds at the `(1 - coverage) / 2` and
    /// `(1 + coverage) / 2` empirical quantiles, taken outward (lower order
    /// statistic for the lower bound, upper for the upper).
    pub fn fit(data: &DataMatrix, coverage: f64) -> Result<Self> {
        if !(coverage > 0.0 && coverage <= 1.0) {
            return Err(DepthError::InvalidInput(format!("coverage {coverage} outside (0, 1]")));
        }
        let n = data.nrows();
        let mut col = Vec::with_capacity(n);
        let bounds = (0..data.ncols())
            .map(|j| {
                col.clear();
                col.extend(data.rows().map(|r| r[j]));
                col.sort_by(f64::total_cmp);
                let pos = |q: f64| q * (n - 1) as f64;
                let lo = col[pos((1.0 - coverage) / 2.0).floor() as usize];
                let hi = col[(pos((1.0 + coverage) / 2.0).ceil() as usize).min(n - 1)];
                (lo, hi)
            })
            .collect();
        Ok(Self { bounds })
    }

    /// `true` when any coordinate leaves its band.
    pub fn is_anomaly(&self, x: &[f64]) -> Result<bool> {
        if x.len() != self.bounds.len() {
            return Err(DepthError::DimensionMismatch { expected: self.bounds.len(), got: x.len() });
        }
        Ok(x.iter().zip(&self.bounds).any(|(v, (lo, hi))| v < lo || v > hi))
    }
}

pub fn save_model(model: &DepthModel) -> Result<String> {
    serde_json::to_string_pretty(model).map_err(|e| DepthError::Format(e.to_string()))
}

pub fn load_model(text: &str) -> Result<DepthModel> {
    // check the version before the full schema so old files get a clear error
    let raw: serde_json::Value =
        serde_json::from_str(text).map_err(|e| DepthError::Format(format!("malformed model document: {e}")))?;
    match raw.get("format_version").and_then(|v| v.as_u64()) {
        Some(v) if v == FORMAT_VERSION as u64 => {}
        Some(v) => {
            return Err(DepthError::Format(format!(
                "model format version {v} is not supported (expected {FORMAT_VERSION})"
            )))
        }
        None => return Err(DepthError::Format("model document lacks format_version".into())),
    }
    let model: DepthModel =
        serde_json::from_value(raw).map_err(|e| DepthError::Format(format!("invalid model document: {e}")))?;
    model.validate()?;
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optimize::Strategy;
    use rand::Rng;
    use rand_distr::StandardNormal;

    fn gaussian(n: usize, d: usize, seed: u64) -> DataMatrix {
        let mut rng = rng_from(seed);
        DataMatrix::new(n, d, (0..n * d).map(|_| rng.sample(StandardNormal)).collect()).unwrap()
    }

    fn cfg(notion: DepthNotion) -> FitConfig {
        FitConfig::new(notion, SearchBudget::new(Strategy::NelderMead, 60, 17))
    }

    #[test]
    fn quantile_examples() {
        let ten: Vec<f64> = (1..=10).map(|i| i as f64 / 10.0).collect();
        assert_eq!(threshold_quantile(&ten, 0.2).unwrap(), 0.2);
        assert_eq!(threshold_quantile(&ten, 1e-9).unwrap(), 0.1);
        assert_eq!(threshold_quantile(&[0.3; 7], 0.5).unwrap(), 0.3);
        assert!(threshold_quantile(&[], 0.5).is_err());
        assert!(threshold_quantile(&ten, 1.0).is_err());
    }

    #[test]
    fn detect_all_examples() {
        let depths = [0.1, 0.2, 0.5, 0.6, 0.7];
        let mask = [true, true, false, false, false];
        assert_eq!(threshold_detect_all(&depths, &mask).unwrap(), 0.2 + 1e-12);
        assert_eq!(threshold_detect_all(&depths, &[false; 5]), Err(DepthError::NoAnomalies));
        // interleaved: everything at or below the largest anomaly depth is flagged
        let depths = [0.05, 0.3, 0.1, 0.4, 0.2, 0.9, 0.35, 0.8, 0.6, 0.7];
        let mask = [false, true, false, false, true, false, false, false, false, false];
        let t = threshold_detect_all(&depths, &mask).unwrap();
        let flagged: Vec<usize> = (0..10).filter(|&i| depths[i] < t).collect();
        assert_eq!(flagged, vec![0, 1, 2, 4]);
    }

    #[test]
    fn mahalanobis_model_is_parametric() {
        let data = gaussian(200, 3, 1);
        let model = fit(&data, &cfg(DepthNotion::Mahalanobis), None).unwrap();
        assert!(model.sample.is_none());
        let mu = model.ls.as_ref().unwrap().mu.clone();
        let r = score(&model, &mu).unwrap();
        assert_eq!(r.depth.value, 1.0);
        assert!(!r.is_anomaly);
        // size does not grow with n
        let big = fit(&gaussian(5000, 3, 1), &cfg(DepthNotion::Mahalanobis), None).unwrap();
        assert!(save_model(&big).unwrap().len() < 2000);
    }

    #[test]
    fn projection_model_stores_sample_and_flags_quantile() {
        let data = gaussian(100, 2, 3);
        let mut c = cfg(DepthNotion::Projection);
        c.policy = ThresholdPolicy::Quantile { alpha: 0.1 };
        let (model, reports) = fit_scored(&data, &c, None).unwrap();
        assert_eq!(model.sample.as_ref().unwrap().nrows(), 100);
        let flagged = reports.iter().filter(|r| r.is_anomaly).count();
        assert_eq!(flagged, 9);
        for (i, r) in reports.iter().enumerate() {
            assert_eq!(r, &score(&model, data.row(i)).unwrap());
            assert!(r.direction.is_some());
        }
    }

    #[test]
    fn raising_threshold_never_unflags() {
        let data = gaussian(60, 2, 4);
        let model = fit(&data, &cfg(DepthNotion::Halfspace), None).unwrap();
        let probes = gaussian(40, 2, 5);
        let mut prev = vec![false; 40];
        for t in [0.0, 0.05, 0.1, 0.2, 0.3, 0.5, 1.0] {
            let m = model.with_threshold(t).unwrap();
            let now: Vec<bool> = score_batch(&m, &probes).unwrap().iter().map(|r| r.is_anomaly).collect();
            assert!(prev.iter().zip(&now).all(|(p, n)| !p || *n));
            prev = now;
        }
    }

    #[test]
    fn round_trips() {
        let data = gaussian(80, 3, 6);
        let probes = gaussian(100, 3, 7);
        for notion in [DepthNotion::Mahalanobis, DepthNotion::Projection, DepthNotion::SimplicialVolumeAffineInvariant] {
            let model = fit(&data, &cfg(notion), None).unwrap();
            let text = save_model(&model).unwrap();
            let back = load_model(&text).unwrap();
            assert_eq!(back, model);
            assert_eq!(score_batch(&back, &probes).unwrap(), score_batch(&model, &probes).unwrap());
            assert!(matches!(load_model(&text[..text.len() / 2]), Err(DepthError::Format(_))));
        }
        let model = fit(&data, &cfg(DepthNotion::Mahalanobis), None).unwrap();
        let text = save_model(&model).unwrap().replace("\"format_version\": 1", "\"format_version\": 99");
        assert!(matches!(load_model(&text), Err(DepthError::Format(m)) if m.contains("version")));
    }

    #[test]
    fn subsampling() {
        let data = gaussian(200, 3, 8);
        let mut c = cfg(DepthNotion::Projection);
        c.subsample_fraction = 0.1;
        let model = fit(&data, &c, None).unwrap();
        assert_eq!(model.sample.as_ref().unwrap().nrows(), 20);
        c.subsample_fraction = 0.01;
        assert!(matches!(fit(&data, &c, None), Err(DepthError::BadScenario(_))));
        c.subsample_fraction = 0.02;
        assert!(fit(&data, &c, None).is_ok());
    }

    #[test]
    fn box_rule() {
        let data = gaussian(300, 2, 9);
        let full = BoxRule::fit(&data, 1.0).unwrap();
        assert!(data.rows().all(|r| !full.is_anomaly(r).unwrap()));
        let (lo, hi) = full.bounds[0];
        assert_eq!(lo, data.rows().map(|r| r[0]).fold(f64::INFINITY, f64::min));
        assert_eq!(hi, data.rows().map(|r| r[0]).fold(f64::NEG_INFINITY, f64::max));
        let narrow = BoxRule::fit(&data, 0.5).unwrap();
        assert!(!narrow.is_anomaly(&[0.0, 0.0]).unwrap());
        assert!(narrow.is_anomaly(&[0.0, 5.0]).unwrap());
        assert!(narrow.is_anomaly(&[0.0]).is_err());
    }

    #[test]
    fn policies_parse() {
        assert_eq!("quantile".parse::<ThresholdPolicy>().unwrap(), ThresholdPolicy::Quantile { alpha: 0.05 });
        assert_eq!("quantile:0.1".parse::<ThresholdPolicy>().unwrap(), ThresholdPolicy::Quantile { alpha: 0.1 });
        assert_eq!("detect-all".parse::<ThresholdPolicy>().unwrap(), ThresholdPolicy::DetectAll);
        assert_eq!("fixed:0.1575".parse::<ThresholdPolicy>().unwrap(), ThresholdPolicy::Fixed { value: 0.1575 });
        assert!("fixed".parse::<ThresholdPolicy>().is_err());
    }

    #[test]
    fn one_dimensional_projection_is_exact() {
        let data = DataMatrix::from_rows(&[vec![-1.0], vec![0.0], vec![1.0]]).unwrap();
        let model = fit(&data, &cfg(DepthNotion::Projection), None).unwrap();
        let r = score(&model, &[2.0]).unwrap();
        assert!((r.depth.value - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(r.depth.exactness, Exactness::Exact);
        assert_eq!(r.direction.unwrap().as_slice(), &[1.0]);
    }
}
