//! The layered core-periphery edge model.
//!
//! Node ranks follow a truncated exponential law on `[0, 1]` with rate `λ`.
//! A candidate hyperedge `e` appears independently with probability
//! `c_l^(-2 + max_{u∈e} r_u)` where `l` is the layer of its lowest-rank node.
//! Given [`PartitionStats`], the log-likelihood costs `O(nL)`.

mod fit;
mod gradient;
mod rankmap;

pub use fit::{fit, FitOptions, FitResult, FittedModel, RankSource, StopReason, ThetaReport};
pub use gradient::{gradient, gradient_at, rank_gradient, theta_gradient, ParamGradient};
pub use rankmap::{RankMap, RANK_CLAMP};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::chunked_sum;
use crate::partition::{LayerConfig, PartitionStats, RankVector};

/// Fixed exponent offset in the edge law.
pub const ZETA: f64 = 2.0;

/// Smoothing constant inside `log(1 - p + γ)`.
pub const DEFAULT_GAMMA: f64 = 1e-10;

/// Model parameters `(λ, c_1..c_L)` together with the layer breakpoints.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub lambda: f64,
    pub c: Vec<f64>,
    pub layers: LayerConfig,
}

impl ModelParams {
    pub fn new(lambda: f64, c: Vec<f64>, layers: LayerConfig) -> Result<Self> {
        let p = Self { lambda, c, layers };
        p.check_domain()?;
        Ok(p)
    }

    /// Single-layer parameters.
    pub fn single(lambda: f64, c: f64) -> Result<Self> {
        Self::new(lambda, vec![c], LayerConfig::single())
    }

    pub fn num_layers(&self) -> usize {
        self.c.len()
    }

    /// `b = e^λ`.
    pub fn b(&self) -> f64 {
        self.lambda.exp()
    }

    /// `c - 1`, the offsets from the domain boundary.
    pub fn c_offsets(&self) -> Vec<f64> {
        self.c.iter().map(|c| c - 1.0).collect()
    }

    pub fn is_feasible(&self) -> bool {
        self.check_domain().is_ok()
    }

    /// Checks `λ > 0` and `1 < c_1 < ... < c_L`.
    pub fn check_domain(&self) -> Result<()> {
        if !(self.lambda.is_finite() && self.lambda > 0.0) {
            return Err(Error::Domain(format!("lambda = {} must be positive", self.lambda)));
        }
        if self.c.len() != self.layers.num_layers() {
            return Err(Error::Domain(format!(
                "{} density parameters for {} layers",
                self.c.len(),
                self.layers.num_layers()
            )));
        }
        if self.c.iter().any(|c| !c.is_finite()) {
            return Err(Error::Domain(format!("non-finite c = {:?}", self.c)));
        }
        let increasing = self.c.windows(2).all(|w| w[0] < w[1]);
        if !(self.c[0] > 1.0 && increasing) {
            return Err(Error::Domain(format!(
                "c = {:?} must satisfy 1 < c_1 < ... < c_L",
                self.c
            )));
        }
        Ok(())
    }
}

/// Prior on the density parameters.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CPrior {
    #[default]
    None,
    /// Density `∝ exp(-α (c - 1))` on each `c_l`.
    Exponential { alpha: f64 },
    /// Density `∝ c^(-α)` on each `c_l`.
    Pareto { alpha: f64 },
}

/// `Gamma(shape, rate)` prior on `λ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaPrior {
    pub shape: f64,
    pub rate: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PriorConfig {
    #[serde(default)]
    pub c_prior: CPrior,
    #[serde(default)]
    pub lambda_prior: Option<GammaPrior>,
}

impl PriorConfig {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn validate(&self) -> Result<()> {
        match self.c_prior {
            CPrior::Exponential { alpha } | CPrior::Pareto { alpha } if !(alpha > 0.0) => {
                return Err(Error::invalid(format!("prior alpha = {alpha} must be positive")));
            }
            _ => {}
        }
        if let Some(g) = self.lambda_prior {
            if !(g.shape > 0.0 && g.rate > 0.0) {
                return Err(Error::invalid(format!(
                    "gamma prior ({}, {}) needs positive shape and rate",
                    g.shape, g.rate
                )));
            }
        }
        Ok(())
    }
}

/// `f(e) = c_l^(-2 + max rank)` where `l` is the layer of the lowest-rank node.
pub fn edge_probability(edge: &[usize], r: &RankVector, params: &ModelParams) -> Result<f64> {
    params.check_domain()?;
    if edge.is_empty() {
        return Err(Error::invalid("empty edge"));
    }
    let values = r.values();
    let mut hi = f64::NEG_INFINITY;
    let mut lo = f64::INFINITY;
    for &v in edge {
        let x = *values
            .get(v)
            .ok_or_else(|| Error::invalid(format!("node {v} has no rank")))?;
        hi = hi.max(x);
        lo = lo.min(x);
    }
    let l = params.layers.layer_of(lo);
    Ok(params.c[l].powf(-ZETA + hi))
}

/// `log(1 - c^a + γ)`.
#[inline]
pub(crate) fn log_complement(ca: f64, gamma: f64) -> f64 {
    (gamma - ca).ln_1p()
}

/// Rank-density part that does not depend on individual ranks:
/// `n log λ - n log(1 - e^{-λ})`.
pub(crate) fn rank_normalizer(n: usize, lambda: f64) -> f64 {
    n as f64 * (lambda.ln() - (-(-lambda).exp_m1()).ln())
}

/// Exact log-likelihood at the ranks the statistics were built from.
pub fn log_likelihood(stats: &PartitionStats, params: &ModelParams) -> Result<f64> {
    log_likelihood_at(stats, stats.sorted_ranks(), params, DEFAULT_GAMMA)
}

/// Log-likelihood with the counts of `stats` and the given rank at each sorted
/// position. The ranks need not be the ones `stats` was built from; this is how
/// the endogenous gradient holds the counts fixed.
pub fn log_likelihood_at(
    stats: &PartitionStats,
    ranks: &[f64],
    params: &ModelParams,
    gamma: f64,
) -> Result<f64> {
    params.check_domain()?;
    let n = stats.n();
    if ranks.len() != n || params.num_layers() != stats.num_layers() {
        return Err(Error::invalid("statistics, ranks and parameters disagree in shape"));
    }
    let lambda = params.lambda;
    let log_c: Vec<f64> = params.c.iter().map(|c| c.ln()).collect();
    let num_layers = stats.num_layers();
    let sum = chunked_sum(n, |i| {
        let r = ranks[i];
        let a = -ZETA + r;
        let mut acc = -lambda * r;
        for l in 0..num_layers {
            let s = stats.s(i, l);
            let sb = stats.s_bar_f64(i, l);
            let mut term = 0.0;
            if s > 0 {
                term += s as f64 * a * log_c[l];
            }
            if sb > 0.0 {
                term += sb * log_complement((a * log_c[l]).exp(), gamma);
            }
            if !term.is_finite() {
                return Err(Error::NonFinite { position: i, layer: l });
            }
            acc += term;
        }
        Ok(acc)
    })?;
    let total = sum + rank_normalizer(n, lambda);
    if !total.is_finite() {
        return Err(Error::NonFinite { position: n, layer: 0 });
    }
    Ok(total)
}

/// `log(c_1 - 1) + Σ log(c_{l+1} - c_l)`; `-∞` outside the domain.
pub fn log_barrier(params: &ModelParams) -> f64 {
    let mut prev = 1.0;
    let mut acc = 0.0;
    for &c in &params.c {
        let gap = c - prev;
        if !(gap > 0.0) {
            return f64::NEG_INFINITY;
        }
        acc += gap.ln();
        prev = c;
    }
    acc
}

/// Log prior density up to additive constants.
pub fn log_prior(params: &ModelParams, priors: &PriorConfig) -> f64 {
    let mut acc = match priors.c_prior {
        CPrior::None => 0.0,
        CPrior::Exponential { alpha } => -alpha * params.c.iter().map(|c| c - 1.0).sum::<f64>(),
        CPrior::Pareto { alpha } => -alpha * params.c.iter().map(|c| c.ln()).sum::<f64>(),
    };
    if let Some(g) = priors.lambda_prior {
        acc += (g.shape - 1.0) * params.lambda.ln() - g.rate * params.lambda;
    }
    acc
}

/// Log-likelihood plus barrier plus prior: the quantity `fit` maximizes.
pub fn log_objective(
    stats: &PartitionStats,
    ranks: &[f64],
    params: &ModelParams,
    priors: &PriorConfig,
    gamma: f64,
) -> Result<(f64, f64)> {
    let ll = log_likelihood_at(stats, ranks, params, gamma)?;
    Ok((ll, ll + log_barrier(params) + log_prior(params, priors)))
}
