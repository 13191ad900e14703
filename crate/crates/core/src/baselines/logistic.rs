//! Logistic-CP: `ρ(e) = σ(Σ_{i∈e} z_i)`, with core scores learned directly or
//! through a small feature map.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::{ll_estimate, EdgeModel, LlEstimate, NegativeBatch, PROB_CLAMP};
use crate::cigam::StopReason;
use crate::error::{Error, Result};
use crate::hypergraph::{FeatureMatrix, Hypergraph, OrderRange};
use crate::numeric::sigmoid;
use crate::rng::RngStream;

const TRAIN_STREAM: u64 = u64::MAX;
const EVAL_STREAM: u64 = u64::MAX - 1;
const INIT_STREAM: u64 = u64::MAX - 2;
const MAX_HALVINGS: usize = 50;

/// `σ(Σ_{i∈e} z_i)` clamped away from 0 and 1.
pub fn logistic_cp_prob(edge: &[usize], z: &[f64]) -> f64 {
    let s: f64 = edge.iter().map(|&v| z[v]).sum();
    sigmoid(s).clamp(PROB_CLAMP, 1.0 - PROB_CLAMP)
}

/// Feature map `z = w2 · relu(W1 x + b1) + b2` with `W1` of shape `d × d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreMap {
    pub d: usize,
    /// Row-major, `w1[j * d + q]` weights input `q` into hidden unit `j`.
    pub w1: Vec<f64>,
    pub b1: Vec<f64>,
    pub w2: Vec<f64>,
    pub b2: f64,
}

impl ScoreMap {
    fn param_len(d: usize) -> usize {
        d * d + 2 * d + 1
    }

    /// Weights drawn from `N(0, 1/d)`, biases zero.
    pub fn random<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Self {
        let normal = Normal::new(0.0, (1.0 / d.max(1) as f64).sqrt()).expect("positive sd");
        Self {
            d,
            w1: (0..d * d).map(|_| normal.sample(rng)).collect(),
            b1: vec![0.0; d],
            w2: (0..d).map(|_| normal.sample(rng)).collect(),
            b2: 0.0,
        }
    }

    fn flat(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(Self::param_len(self.d));
        v.extend_from_slice(&self.w1);
        v.extend_from_slice(&self.b1);
        v.extend_from_slice(&self.w2);
        v.push(self.b2);
        v
    }

    fn from_flat(d: usize, v: &[f64]) -> Self {
        let (w1, rest) = v.split_at(d * d);
        let (b1, rest) = rest.split_at(d);
        let (w2, rest) = rest.split_at(d);
        Self {
            d,
            w1: w1.to_vec(),
            b1: b1.to_vec(),
            w2: w2.to_vec(),
            b2: rest[0],
        }
    }

    fn hidden(&self, x: &[f64]) -> Vec<f64> {
        (0..self.d)
            .map(|j| self.b1[j] + (0..self.d).map(|q| self.w1[j * self.d + q] * x[q]).sum::<f64>())
            .collect()
    }

    pub fn score(&self, x: &[f64]) -> f64 {
        let h = self.hidden(x);
        self.b2 + h.iter().zip(&self.w2).map(|(h, w)| h.max(0.0) * w).sum::<f64>()
    }

    pub fn scores(&self, x: &FeatureMatrix) -> Vec<f64> {
        (0..x.rows()).map(|i| self.score(x.row(i))).collect()
    }

    /// Pulls `∂/∂z` back to the flat parameter vector.
    fn backprop(&self, x: &FeatureMatrix, gz: &[f64]) -> Vec<f64> {
        let d = self.d;
        let mut g = vec![0.0; Self::param_len(d)];
        for (i, &gi) in gz.iter().enumerate() {
            if gi == 0.0 {
                continue;
            }
            let xi = x.row(i);
            let h = self.hidden(xi);
            for j in 0..d {
                g[d * d + d + j] += gi * h[j].max(0.0);
                if h[j] > 0.0 {
                    let dh = gi * self.w2[j];
                    g[d * d + j] += dh;
                    for q in 0..d {
                        g[j * d + q] += dh * xi[q];
                    }
                }
            }
            g[d * d + 2 * d] += gi;
        }
        g
    }
}

/// Per-node core scores, optionally produced by a feature map.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoreScores {
    pub z: Vec<f64>,
    pub map: Option<ScoreMap>,
}

impl CoreScores {
    pub fn new(z: Vec<f64>) -> Result<Self> {
        if z.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("core scores must be finite"));
        }
        Ok(Self { z, map: None })
    }

    /// Nodes with `z_i >= 0`.
    pub fn core(&self) -> Vec<usize> {
        (0..self.z.len()).filter(|&i| self.z[i] >= 0.0).collect()
    }

    pub fn periphery(&self) -> Vec<usize> {
        (0..self.z.len()).filter(|&i| self.z[i] < 0.0).collect()
    }
}

impl EdgeModel for CoreScores {
    fn prob(&self, edge: &[usize]) -> f64 {
        sigmoid(edge.iter().map(|&v| self.z[v]).sum())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LogisticFitOptions {
    pub step: f64,
    pub epochs: usize,
    pub steps_per_epoch: usize,
    /// Training batch as a fraction of the non-edges, unless `batch_size` is set.
    pub batch_fraction: f64,
    pub batch_size: Option<usize>,
    /// Batch fraction of the frozen evaluation batch.
    pub eval_fraction: f64,
    /// Gaussian prior precision on `z`.
    pub l2: f64,
    pub seed: u64,
    /// Exact likelihood with backtracking instead of stochastic steps.
    pub full_batch: bool,
}

impl Default for LogisticFitOptions {
    fn default() -> Self {
        Self {
            step: 1e-6,
            epochs: 10,
            steps_per_epoch: 100,
            batch_fraction: 0.2,
            batch_size: None,
            eval_fraction: 0.2,
            l2: 0.0,
            seed: 0,
            full_batch: false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct LogisticFit {
    pub scores: CoreScores,
    /// Objective per iteration: exact in full-batch mode, estimated otherwise.
    pub trace: Vec<f64>,
    /// Estimate on a frozen, seeded batch (exact in full-batch mode).
    pub final_ll: LlEstimate,
    pub iterations: usize,
    pub stop: StopReason,
}

/// Parameters are either `z` itself or a flat [`ScoreMap`].
pub(super) struct Problem<'a> {
    h: &'a Hypergraph,
    x: Option<&'a FeatureMatrix>,
    l2: f64,
}

impl Problem<'_> {
    fn scores(&self, theta: &[f64]) -> CoreScores {
        match self.x {
            None => CoreScores { z: theta.to_vec(), map: None },
            Some(x) => {
                let map = ScoreMap::from_flat(x.cols(), theta);
                CoreScores { z: map.scores(x), map: Some(map) }
            }
        }
    }

    fn penalty(&self, s: &CoreScores) -> f64 {
        0.5 * self.l2 * s.z.iter().map(|z| z * z).sum::<f64>()
    }

    fn objective(&self, s: &CoreScores, batch: &NegativeBatch) -> Result<f64> {
        Ok(ll_estimate(self.h, s, batch)?.value - self.penalty(s))
    }

    fn gradient(&self, s: &CoreScores, batch: &NegativeBatch) -> Vec<f64> {
        let mut gz: Vec<f64> = s.z.iter().map(|z| -self.l2 * z).collect();
        for e in self.h.edges() {
            let g = 1.0 - s.prob(e);
            for &v in e {
                gz[v] += g;
            }
        }
        for e in &batch.edges {
            let g = batch.weight * s.prob(e);
            for &v in e {
                gz[v] -= g;
            }
        }
        match (self.x, &s.map) {
            (Some(x), Some(map)) => map.backprop(x, &gz),
            _ => gz,
        }
    }
}

fn train_batch(
    h: &Hypergraph,
    orders: OrderRange,
    opt: &LogisticFitOptions,
    rng: &mut impl Rng,
) -> Result<NegativeBatch> {
    match opt.batch_size {
        Some(size) => NegativeBatch::sample(h, orders, size, rng),
        None => NegativeBatch::sample_fraction(h, orders, opt.batch_fraction, rng),
    }
}

/// Fits Logistic-CP by gradient ascent on the negative-sampling estimator.
///
/// Stochastic mode draws a fresh batch every step and uses a fixed step size.
/// Full-batch mode enumerates every non-edge and backtracks, so the exact
/// objective never decreases; it is meant for small graphs.
pub fn logistic_cp_fit(
    h: &Hypergraph,
    features: Option<&FeatureMatrix>,
    orders: OrderRange,
    opt: &LogisticFitOptions,
) -> Result<LogisticFit> {
    if h.n() < orders.min() {
        return Err(Error::invalid(format!(
            "{} node(s) cannot hold edges of order {}",
            h.n(),
            orders.min()
        )));
    }
    if let Some(x) = features {
        if x.rows() != h.n() {
            return Err(Error::invalid(format!("{} feature rows for {} nodes", x.rows(), h.n())));
        }
    }
    if !(opt.step > 0.0) {
        return Err(Error::invalid("step must be positive"));
    }
    let problem = Problem { h, x: features, l2: opt.l2 };
    let mut theta = match features {
        None => vec![0.0; h.n()],
        Some(x) => ScoreMap::random(x.cols(), &mut RngStream::new(opt.seed, INIT_STREAM).rng()).flat(),
    };
    let budget = opt.epochs * opt.steps_per_epoch;
    let mut trace = Vec::with_capacity(budget + 1);
    let mut iterations = 0;
    let mut stop = StopReason::Budget;

    if opt.full_batch {
        let batch = NegativeBatch::full(h, orders)?;
        let mut scores = problem.scores(&theta);
        let mut obj = problem.objective(&scores, &batch)?;
        trace.push(obj);
        let mut step = opt.step;
        while iterations < budget {
            let g = problem.gradient(&scores, &batch);
            let mut accepted = false;
            for _ in 0..MAX_HALVINGS {
                let trial: Vec<f64> = theta.iter().zip(&g).map(|(t, g)| t + step * g).collect();
                let s = problem.scores(&trial);
                if let Ok(o) = problem.objective(&s, &batch) {
                    if o >= obj {
                        theta = trial;
                        scores = s;
                        obj = o;
                        accepted = true;
                        break;
                    }
                }
                step *= 0.5;
            }
            iterations += 1;
            if !accepted {
                stop = StopReason::Stalled;
                break;
            }
            trace.push(obj);
            step *= 2.0;
        }
        let final_ll = ll_estimate(h, &scores, &batch)?;
        return Ok(LogisticFit { scores, trace, final_ll, iterations, stop });
    }

    let mut rng = RngStream::new(opt.seed, TRAIN_STREAM).rng();
    let mut scores = problem.scores(&theta);
    while iterations < budget {
        let batch = train_batch(h, orders, opt, &mut rng)?;
        match problem.objective(&scores, &batch) {
            Ok(o) => trace.push(o),
            Err(e) => {
                stop = StopReason::Aborted(e.to_string());
                break;
            }
        }
        let g = problem.gradient(&scores, &batch);
        let trial: Vec<f64> = theta.iter().zip(&g).map(|(t, g)| t + opt.step * g).collect();
        iterations += 1;
        if trial.iter().any(|v| !v.is_finite()) {
            stop = StopReason::Aborted(format!("non-finite parameters at iteration {iterations}"));
            break;
        }
        theta = trial;
        scores = problem.scores(&theta);
    }
    let eval = NegativeBatch::sample_fraction(
        h,
        orders,
        opt.eval_fraction,
        &mut RngStream::new(opt.seed, EVAL_STREAM).rng(),
    )?;
    let final_ll = ll_estimate(h, &scores, &eval)?;
    Ok(LogisticFit { scores, trace, final_ll, iterations, stop })
}

#[cfg(test)]
pub(super) mod tests_support {
    use super::*;

    pub fn problem<'a>(h: &'a Hypergraph, x: &'a FeatureMatrix) -> Problem<'a> {
        Problem { h, x: Some(x), l2: 0.3 }
    }

    pub fn objective_and_gradient(p: &Problem, theta: &[f64], batch: &NegativeBatch) -> (f64, Vec<f64>) {
        let s = p.scores(theta);
        (p.objective(&s, batch).unwrap(), p.gradient(&s, batch))
    }
}
