use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exponents and ambient dimension of the kernel `r^alpha/alpha - r^beta/beta` on `R^n`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams")]
pub struct Params {
    alpha: f64,
    beta: f64,
    n: usize,
}

#[derive(Deserialize)]
struct RawParams {
    alpha: f64,
    beta: f64,
    n: usize,
}

impl TryFrom<RawParams> for Params {
    type Error = Error;

    fn try_from(raw: RawParams) -> Result<Self> {
        Params::new(raw.alpha, raw.beta, raw.n)
    }
}

impl Params {
    /// Requires `alpha > beta > -n` and `n >= 1`.
    pub fn new(alpha: f64, beta: f64, n: usize) -> Result<Self> {
        if !alpha.is_finite() || !beta.is_finite() {
            return Err(Error::InvalidParams(format!(
                "exponents must be finite (alpha = {alpha}, beta = {beta})"
            )));
        }
        if n < 1 {
            return Err(Error::InvalidParams("dimension n must be at least 1".into()));
        }
        if alpha <= beta {
            return Err(Error::InvalidParams(format!(
                "alpha > beta required (alpha = {alpha}, beta = {beta})"
            )));
        }
        if beta <= -(n as f64) {
            return Err(Error::InvalidParams(format!(
                "beta > -n required (beta = {beta}, n = {n})"
            )));
        }
        Ok(Params { alpha, beta, n })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Same `alpha` and `n`, different `beta`.
    pub fn with_beta(&self, beta: f64) -> Result<Self> {
        Params::new(self.alpha, beta, self.n)
    }

    pub(crate) fn require_positive_beta(&self) -> Result<()> {
        if self.beta > 0.0 {
            Ok(())
        } else {
            Err(Error::Domain(format!("beta > 0 required (beta = {})", self.beta)))
        }
    }
}
