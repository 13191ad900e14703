use serde::{Deserialize, Serialize};

use super::{CPrior, ModelParams, PriorConfig, RankMap, DEFAULT_GAMMA, ZETA};
use crate::error::{Error, Result};
use crate::hypergraph::FeatureMatrix;
use crate::numeric::chunked_vec_sum;
use crate::partition::PartitionStats;

/// Gradient of the barrier-augmented objective in `(λ, c)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamGradient {
    pub lambda: f64,
    pub c: Vec<f64>,
}

impl ParamGradient {
    pub fn max_abs(&self) -> f64 {
        self.c.iter().fold(self.lambda.abs(), |m, g| m.max(g.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.lambda.is_finite() && self.c.iter().all(|g| g.is_finite())
    }
}

/// Objective gradient at the ranks the statistics were built from.
pub fn gradient(
    stats: &PartitionStats,
    params: &ModelParams,
    priors: &PriorConfig,
) -> Result<ParamGradient> {
    gradient_at(stats, stats.sorted_ranks(), params, priors, DEFAULT_GAMMA)
}

/// Gradient of log-likelihood + barrier + prior with respect to `(λ, c)`.
pub fn gradient_at(
    stats: &PartitionStats,
    ranks: &[f64],
    params: &ModelParams,
    priors: &PriorConfig,
    gamma: f64,
) -> Result<ParamGradient> {
    params.check_domain()?;
    let n = stats.n();
    let num_layers = stats.num_layers();
    if ranks.len() != n || params.num_layers() != num_layers {
        return Err(Error::invalid("statistics, ranks and parameters disagree in shape"));
    }
    let lambda = params.lambda;
    let c = &params.c;
    let log_c: Vec<f64> = c.iter().map(|v| v.ln()).collect();

    // slot 0: Σ r; slot 1 + l: ∂LL/∂c_l
    let sums = chunked_vec_sum(n, num_layers + 1, |i, acc| {
        let r = ranks[i];
        let a = -ZETA + r;
        acc[0] += r;
        for l in 0..num_layers {
            let s = stats.s(i, l) as f64;
            let sb = stats.s_bar_f64(i, l);
            let mut g = 0.0;
            if s > 0.0 {
                g += s * a / c[l];
            }
            if sb > 0.0 {
                let ca = (a * log_c[l]).exp();
                g -= sb * a * ca / c[l] / (1.0 - ca + gamma);
            }
            acc[1 + l] += g;
        }
    });

    let nf = n as f64;
    // e^{-λ}/(1-e^{-λ}) = 1/(e^λ - 1)
    let mut g_lambda = -sums[0] + nf / lambda - nf / lambda.exp_m1();
    if let Some(p) = priors.lambda_prior {
        g_lambda += (p.shape - 1.0) / lambda - p.rate;
    }
    let mut g_c = sums[1..].to_vec();
    for l in 0..num_layers {
        let below = if l == 0 { 1.0 } else { c[l - 1] };
        g_c[l] += 1.0 / (c[l] - below);
        if l + 1 < num_layers {
            g_c[l] -= 1.0 / (c[l + 1] - c[l]);
        }
        g_c[l] += match priors.c_prior {
            CPrior::None => 0.0,
            CPrior::Exponential { alpha } => -alpha,
            CPrior::Pareto { alpha } => -alpha / c[l],
        };
    }
    Ok(ParamGradient {
        lambda: g_lambda,
        c: g_c,
    })
}

/// `∂LL/∂r` at each sorted position with the counts held fixed.
pub fn rank_gradient(
    stats: &PartitionStats,
    ranks: &[f64],
    params: &ModelParams,
    gamma: f64,
) -> Result<Vec<f64>> {
    params.check_domain()?;
    let n = stats.n();
    let num_layers = stats.num_layers();
    if ranks.len() != n || params.num_layers() != num_layers {
        return Err(Error::invalid("statistics, ranks and parameters disagree in shape"));
    }
    let log_c: Vec<f64> = params.c.iter().map(|v| v.ln()).collect();
    Ok((0..n)
        .map(|i| {
            let a = -ZETA + ranks[i];
            let mut g = -params.lambda;
            for l in 0..num_layers {
                let s = stats.s(i, l) as f64;
                let sb = stats.s_bar_f64(i, l);
                if s > 0.0 {
                    g += s * log_c[l];
                }
                if sb > 0.0 {
                    let ca = (a * log_c[l]).exp();
                    g -= sb * ca * log_c[l] / (1.0 - ca + gamma);
                }
            }
            g
        })
        .collect())
}

/// Gradient of the log-likelihood in the rank-map parameters `(w, b)`,
/// with the counts of `stats` held fixed.
pub fn theta_gradient(
    stats: &PartitionStats,
    x: &FeatureMatrix,
    map: &RankMap,
    params: &ModelParams,
    gamma: f64,
) -> Result<(Vec<f64>, f64)> {
    let ranks = map.ranks_in_order(x, stats.order())?;
    let by_position = rank_gradient(stats, &ranks, params, gamma)?;
    let mut by_node = vec![0.0; stats.n()];
    for (pos, &v) in stats.order().iter().enumerate() {
        by_node[v] = by_position[pos];
    }
    map.chain(x, &by_node)
}

