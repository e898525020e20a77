//! Weighted point configurations.
//!
//! JSON form: `{"n": 2, "points": [[x, y], ...], "weights": [w, ...]}`.
//! `weights` may be omitted, in which case every point gets mass `1/k`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance on `sum(weights) == 1`.
pub const WEIGHT_SUM_TOL: f64 = 1e-12;

/// A probability measure supported on finitely many points of `R^n`.
///
/// Coordinates are stored row-major in one buffer; point `i` occupies
/// `coords[i * dim..(i + 1) * dim]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMeasure", into = "RawMeasure")]
pub struct DiscreteMeasure {
    dim: usize,
    coords: Vec<f64>,
    weights: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawMeasure {
    n: usize,
    points: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    weights: Option<Vec<f64>>,
}

impl TryFrom<RawMeasure> for DiscreteMeasure {
    type Error = Error;

    fn try_from(raw: RawMeasure) -> Result<Self> {
        if let Some(bad) = raw.points.iter().position(|p| p.len() != raw.n) {
            return Err(Error::InvalidMeasure(format!(
                "point {bad} has dimension {} but n = {}",
                raw.points[bad].len(),
                raw.n
            )));
        }
        let coords = raw.points.into_iter().flatten().collect();
        DiscreteMeasure::from_flat(raw.n, coords, raw.weights)
    }
}

impl From<DiscreteMeasure> for RawMeasure {
    fn from(m: DiscreteMeasure) -> Self {
        RawMeasure {
            n: m.dim,
            points: m.points().map(<[f64]>::to_vec).collect(),
            weights: Some(m.weights),
        }
    }
}

impl DiscreteMeasure {
    /// Builds a measure from explicit points. `None` weights mean uniform.
    pub fn new(points: Vec<Vec<f64>>, weights: Option<Vec<f64>>) -> Result<Self> {
        let dim = points
            .first()
            .map(Vec::len)
            .ok_or_else(|| Error::InvalidMeasure("at least one point required".into()))?;
        DiscreteMeasure::try_from(RawMeasure { n: dim, points, weights })
    }

    pub fn uniform(points: Vec<Vec<f64>>) -> Result<Self> {
        Self::new(points, None)
    }

    /// Builds a measure from a flat coordinate buffer of `k * dim` values.
    pub fn from_flat(dim: usize, coords: Vec<f64>, weights: Option<Vec<f64>>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidMeasure("dimension must be at least 1".into()));
        }
        if coords.is_empty() {
            return Err(Error::InvalidMeasure("at least one point required".into()));
        }
        if !coords.len().is_multiple_of(dim) {
            return Err(Error::InvalidMeasure(format!(
                "coordinate buffer of length {} is not a multiple of n = {dim}",
                coords.len()
            )));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidMeasure("coordinates must be finite".into()));
        }
        let k = coords.len() / dim;
        let weights = weights.unwrap_or_else(|| vec![1.0 / k as f64; k]);
        if weights.len() != k {
            return Err(Error::InvalidMeasure(format!(
                "{} weights given for {k} points",
                weights.len()
            )));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidMeasure("weights must be finite and non-negative".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(Error::InvalidMeasure(format!(
                "weights sum to {total}, expected 1 within {WEIGHT_SUM_TOL:e}"
            )));
        }
        Ok(DiscreteMeasure { dim, coords, weights })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of atoms `k`.
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.dim)
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Maps every point through `f`, keeping weights.
    pub fn map_points(&self, mut f: impl FnMut(&[f64]) -> Vec<f64>) -> Result<Self> {
        let points = self.points().map(&mut f).collect();
        DiscreteMeasure::new(points, Some(self.weights.clone()))
    }

    /// Largest pairwise distance between atoms of positive mass.
    pub fn support_diameter(&self) -> f64 {
        let mut diam: f64 = 0.0;
        for i in 0..self.len() {
            if self.weights[i] == 0.0 {
                continue;
            }
            for j in (i + 1)..self.len() {
                if self.weights[j] > 0.0 {
                    diam = diam.max(distance(self.point(i), self.point(j)));
                }
            }
        }
        diam
    }

    /// Mass-weighted mean position.
    pub fn centroid(&self) -> Vec<f64> {
        let mut c = vec![0.0; self.dim];
        for (p, w) in self.points().zip(&self.weights) {
            for (ci, pi) in c.iter_mut().zip(p) {
                *ci += w * pi;
            }
        }
        c
    }
}

pub(crate) fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_without_weights_is_uniform() {
        let m: DiscreteMeasure =
            serde_json::from_str(r#"{"n": 2, "points": [[0,0],[1,0],[0,1],[1,1]]}"#).unwrap();
        assert_eq!(m.len(), 4);
        assert_eq!(m.weights(), &[0.25; 4]);
        assert_eq!(m.point(3), &[1.0, 1.0]);
    }

    #[test]
    fn bad_weight_sum_is_reported() {
        let err = serde_json::from_str::<DiscreteMeasure>(
            r#"{"n": 1, "points": [[0],[1]], "weights": [0.5, 0.6]}"#,
        )
        .unwrap_err();
        assert!(err.to_string().contains("weights sum"), "{err}");
    }

    #[test]
    fn rejects_structural_problems() {
        assert!(DiscreteMeasure::new(vec![], None).is_err());
        assert!(DiscreteMeasure::new(vec![vec![0.0], vec![0.0, 1.0]], None).is_err());
        assert!(DiscreteMeasure::new(vec![vec![0.0], vec![1.0]], Some(vec![1.5, -0.5])).is_err());
        assert!(DiscreteMeasure::new(vec![vec![0.0], vec![1.0]], Some(vec![1.0])).is_err());
        assert!(DiscreteMeasure::new(vec![vec![f64::NAN]], None).is_err());
        let m = DiscreteMeasure::from_flat(2, vec![0.0; 3], None);
        assert!(m.is_err());
    }

    #[test]
    fn json_round_trip() {
        let m = DiscreteMeasure::new(
            vec![vec![0.1, -0.3], vec![0.7, 0.25]],
            Some(vec![0.3, 0.7]),
        )
        .unwrap();
        let s = serde_json::to_string(&m).unwrap();
        let back: DiscreteMeasure = serde_json::from_str(&s).unwrap();
        assert_eq!(m, back);
    }

    #[test]
    fn diameter_and_centroid() {
        let m = DiscreteMeasure::uniform(vec![vec![-1.0, 0.0], vec![1.0, 0.0], vec![0.0, 0.5]])
            .unwrap();
        assert!((m.support_diameter() - 2.0).abs() < 1e-15);
        let c = m.centroid();
        assert!(c[0].abs() < 1e-15 && (c[1] - 0.5 / 3.0).abs() < 1e-15);
    }
}
