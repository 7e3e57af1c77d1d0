//! Exact depth notions.
//!
//! Every function here returns a [`DepthValue`] in `[0, 1]`. Notions with the
//! projection property (halfspace, projection) are exact only in low
//! dimension; [`crate::optimize`] approximates them in general `d`.

mod combinatorics;
mod halfspace;
mod simplicial;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{DepthError, Result};
use crate::linalg::{DataMatrix, LocationScatter};
use crate::robust::{location_scale, standardized};

pub use combinatorics::{binomial, Combinations};
pub use halfspace::{halfspace_depth_2d, halfspace_depth_exact, halfspace_depth_oracle};
pub use simplicial::{
    monte_carlo_simplex_depth, simplicial_depth, simplicial_volume_depth, simplex_contains,
    SimplexNotion,
};

/// Cap on evaluated subsets for the combinatorial notions.
pub const COMBINATORIAL_BUDGET: u128 = 20_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DepthNotion {
    Mahalanobis,
    Halfspace,
    Projection,
    ProjectionAsymmetric,
    Simplicial,
    SimplicialVolume,
    SimplicialVolumeAffineInvariant,
}

impl DepthNotion {
    pub const ALL: [DepthNotion; 7] = [
        DepthNotion::Mahalanobis,
        DepthNotion::Halfspace,
        DepthNotion::Projection,
        DepthNotion::ProjectionAsymmetric,
        DepthNotion::Simplicial,
        DepthNotion::SimplicialVolume,
        DepthNotion::SimplicialVolumeAffineInvariant,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            DepthNotion::Mahalanobis => "mahalanobis",
            DepthNotion::Halfspace => "halfspace",
            DepthNotion::Projection => "projection",
            DepthNotion::ProjectionAsymmetric => "projection_asymmetric",
            DepthNotion::Simplicial => "simplicial",
            DepthNotion::SimplicialVolume => "simplicial_volume",
            DepthNotion::SimplicialVolumeAffineInvariant => "simplicial_volume_affine_invariant",
        }
    }

    /// Notions computed as an extremum over univariate projections.
    pub fn has_projection_property(self) -> bool {
        matches!(
            self,
            DepthNotion::Halfspace | DepthNotion::Projection | DepthNotion::ProjectionAsymmetric
        )
    }

    /// Notions whose optimal direction explains an anomaly.
    pub fn is_projection(self) -> bool {
        matches!(self, DepthNotion::Projection | DepthNotion::ProjectionAsymmetric)
    }

    pub fn is_parametric(self) -> bool {
        self == DepthNotion::Mahalanobis
    }
}

impl fmt::Display for DepthNotion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DepthNotion {
    type Err = DepthError;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_lowercase().replace('-', "_");
        DepthNotion::ALL
            .into_iter()
            .find(|n| n.as_str() == norm)
            .or(match norm.as_str() {
                "tukey" => Some(DepthNotion::Halfspace),
                "oja" => Some(DepthNotion::SimplicialVolume),
                _ => None,
            })
            .ok_or_else(|| DepthError::InvalidInput(format!("unknown depth notion '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Exactness {
    Exact,
    Approximate,
    Oracle,
}

impl fmt::Display for Exactness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Exactness::Exact => "exact",
            Exactness::Approximate => "approximate",
            Exactness::Oracle => "oracle",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DepthValue {
    pub value: f64,
    pub notion: DepthNotion,
    pub exactness: Exactness,
}

impl DepthValue {
    pub(crate) fn new(value: f64, notion: DepthNotion, exactness: Exactness) -> Self {
        debug_assert!((0.0..=1.0).contains(&value), "depth {value} outside [0, 1]");
        Self { value: value.clamp(0.0, 1.0), notion, exactness }
    }
}

/// `1 / (1 + (x - mu)^T Sigma^{-1} (x - mu))`.
pub fn mahalanobis_depth(x: &[f64], ls: &LocationScatter) -> Result<DepthValue> {
    let q = ls.mahalanobis_sq(x)?;
    Ok(DepthValue::new(1.0 / (1.0 + q), DepthNotion::Mahalanobis, Exactness::Exact))
}

/// Projection depth for `d = 1`, where the sphere is just `{-1, +1}`.
pub fn projection_depth_1d(x: &[f64], data: &DataMatrix, asymmetric: bool) -> Result<DepthValue> {
    if data.ncols() != 1 {
        return Err(DepthError::DimensionMismatch { expected: 1, got: data.ncols() });
    }
    data.check_point(x)?;
    let mut scratch = Vec::with_capacity(data.nrows());
    let mut worst = 0.0f64;
    for sign in [1.0, -1.0] {
        let mut proj: Vec<f64> = data.as_slice().iter().map(|v| sign * v).collect();
        let (med, scale) = location_scale(&mut proj, &mut scratch, asymmetric);
        worst = worst.max(standardized(sign * x[0], med, scale, asymmetric));
    }
    let notion = if asymmetric { DepthNotion::ProjectionAsymmetric } else { DepthNotion::Projection };
    Ok(DepthValue::new(1.0 / (1.0 + worst), notion, Exactness::Exact))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::moment_estimates;

    #[test]
    fn mahalanobis_examples() {
        let id = LocationScatter::new(vec![0.0; 3], vec![1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0]).unwrap();
        assert_eq!(mahalanobis_depth(&[0.0; 3], &id).unwrap().value, 1.0);
        assert_eq!(mahalanobis_depth(&[1.0, 1.0, 1.0], &id).unwrap().value, 0.25);
        let sq = DataMatrix::from_rows(&[vec![0.0, 0.0], vec![2.0, 0.0], vec![0.0, 2.0], vec![2.0, 2.0]]).unwrap();
        let ls = moment_estimates(&sq).unwrap();
        assert!((mahalanobis_depth(&[0.0, 0.0], &ls).unwrap().value - 0.4).abs() < 1e-12);
        assert!(matches!(
            mahalanobis_depth(&[0.0], &ls),
            Err(DepthError::DimensionMismatch { expected: 2, got: 1 })
        ));
    }

    #[test]
    fn projection_1d_examples() {
        let data = DataMatrix::from_rows(&[vec![-1.0], vec![0.0], vec![1.0]]).unwrap();
        assert_eq!(projection_depth_1d(&[0.0], &data, false).unwrap().value, 1.0);
        assert!((projection_depth_1d(&[2.0], &data, false).unwrap().value - 1.0 / 3.0).abs() < 1e-15);
        let data = DataMatrix::from_rows(&[vec![0.0], vec![1.0], vec![2.0]]).unwrap();
        // u = -1: (1 - (-5)) / MAD_+({0, -1, -2}) = 6 / 1
        assert!((projection_depth_1d(&[-5.0], &data, true).unwrap().value - 1.0 / 7.0).abs() < 1e-15);
        let plane = DataMatrix::from_rows(&[vec![0.0, 1.0]]).unwrap();
        assert!(projection_depth_1d(&[0.0, 0.0], &plane, false).is_err());
    }

    #[test]
    fn notion_parsing() {
        for n in DepthNotion::ALL {
            assert_eq!(n.as_str().parse::<DepthNotion>().unwrap(), n);
        }
        assert_eq!("Projection-Asymmetric".parse::<DepthNotion>().unwrap(), DepthNotion::ProjectionAsymmetric);
        assert!("zonoid".parse::<DepthNotion>().is_err());
    }
}
