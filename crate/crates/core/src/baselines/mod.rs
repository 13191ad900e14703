//! Comparison models scored by negative sampling: Logistic-CP (sigmoid of
//! summed core scores) and the permutation models HyperNSM and Logistic-TH
//! (sigmoid of a Hölder mean of position scores).
//!
//! Both have intractable exact likelihoods on large graphs. The absent-edge
//! term is estimated from a uniform batch `B` of non-edges,
//!
//! ```text
//! ℓ̂ = Σ_{e∈E} log ρ(e) + (m̄/|B|) Σ_{ē∈B} log(1 − ρ(ē)),
//! ```
//!
//! which is unbiased because every non-edge lands in `B` with probability
//! `|B|/m̄`.

mod logistic;
mod permutation;

pub use logistic::{
    logistic_cp_fit, logistic_cp_prob, CoreScores, LogisticFit, LogisticFitOptions, ScoreMap,
};
pub use permutation::{
    holder_mean, permutation_from_scores, rank_correlation, spearman, PermutationMode,
    PermutationModel, RankScatterRow,
};

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypergraph::{Edge, Hypergraph, OrderRange};
use crate::numeric::chunked_sum;
use crate::partition::binomial;
use crate::sampler::{non_edge_counts, sample_negative_edges};

/// Probabilities are clamped to `[PROB_CLAMP, 1 - PROB_CLAMP]` before logs.
pub const PROB_CLAMP: f64 = 1e-12;

/// Largest candidate-edge count accepted by exhaustive enumeration.
pub const ENUMERATION_LIMIT: u64 = 5_000_000;

/// An independent-edge model.
pub trait EdgeModel: Sync {
    /// Probability that `edge` (sorted node ids) is present.
    fn prob(&self, edge: &[usize]) -> f64;

    fn clamped(&self, edge: &[usize]) -> f64 {
        self.prob(edge).clamp(PROB_CLAMP, 1.0 - PROB_CLAMP)
    }
}

/// A batch of distinct non-edges with its importance weight `m̄/|B|`.
#[derive(Debug, Clone, PartialEq)]
pub struct NegativeBatch {
    pub edges: Vec<Edge>,
    /// Number of non-edges with orders in range.
    pub non_edges: BigUint,
    pub weight: f64,
}

impl NegativeBatch {
    /// Uniform batch of `size` non-edges.
    pub fn sample<R: Rng + ?Sized>(
        h: &Hypergraph,
        orders: OrderRange,
        size: usize,
        rng: &mut R,
    ) -> Result<Self> {
        let non_edges: BigUint = non_edge_counts(h, orders).iter().sum();
        if size == 0 {
            if non_edges.is_zero() {
                return Ok(Self { edges: Vec::new(), non_edges, weight: 0.0 });
            }
            return Err(Error::invalid("empty negative batch with non-edges present"));
        }
        let edges = sample_negative_edges(h, orders, size, rng)?;
        let weight = ratio(&non_edges, size);
        Ok(Self { edges, non_edges, weight })
    }

    /// Batch of size `⌈fraction · m̄⌉`, at least one when non-edges exist.
    pub fn sample_fraction<R: Rng + ?Sized>(
        h: &Hypergraph,
        orders: OrderRange,
        fraction: f64,
        rng: &mut R,
    ) -> Result<Self> {
        if !(fraction > 0.0 && fraction <= 1.0) {
            return Err(Error::invalid(format!("batch fraction {fraction} outside (0, 1]")));
        }
        let total: BigUint = non_edge_counts(h, orders).iter().sum();
        let size = (total.to_f64().unwrap_or(f64::INFINITY) * fraction).ceil();
        if !(size <= usize::MAX as f64) {
            return Err(Error::invalid(format!("batch of {size:e} non-edges is too large")));
        }
        Self::sample(h, orders, size as usize, rng)
    }

    /// Every non-edge, weight 1.
    pub fn full(h: &Hypergraph, orders: OrderRange) -> Result<Self> {
        let mut edges = Vec::new();
        for_each_candidate(h.n(), orders, |e| {
            if !h.contains(e) {
                edges.push(e.to_vec());
            }
        })?;
        let non_edges = BigUint::from(edges.len());
        Ok(Self { edges, non_edges, weight: 1.0 })
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// `|B| / m̄`.
    pub fn fraction(&self) -> f64 {
        if self.weight > 0.0 {
            1.0 / self.weight
        } else {
            1.0
        }
    }
}

fn ratio(num: &BigUint, den: usize) -> f64 {
    // one conversion of the exact quotient plus remainder keeps precision
    let den_big = BigUint::from(den);
    let q = num / &den_big;
    let r = num % &den_big;
    q.to_f64().unwrap_or(f64::INFINITY) + r.to_f64().unwrap_or(0.0) / den as f64
}

/// Calls `f` on every sorted `k`-subset of `[n]` for `k` in `orders`.
pub fn for_each_candidate<F: FnMut(&[usize])>(n: usize, orders: OrderRange, mut f: F) -> Result<()> {
    let total: BigUint = orders.iter().map(|k| binomial(n, k)).sum();
    if total > BigUint::from(ENUMERATION_LIMIT) {
        return Err(Error::invalid(format!(
            "{total} candidate edges exceed the enumeration limit {ENUMERATION_LIMIT}"
        )));
    }
    for k in orders.iter() {
        if k > n {
            continue;
        }
        let mut idx: Vec<usize> = (0..k).collect();
        loop {
            f(&idx);
            // next combination in lexicographic order
            let mut p = k;
            while p > 0 && idx[p - 1] == n - k + p - 1 {
                p -= 1;
            }
            if p == 0 {
                break;
            }
            idx[p - 1] += 1;
            for q in p..k {
                idx[q] = idx[q - 1] + 1;
            }
        }
    }
    Ok(())
}

/// Estimated log-likelihood and its parts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LlEstimate {
    pub value: f64,
    /// `Σ_{e∈E} log ρ(e)`.
    pub positive: f64,
    /// `(m̄/|B|) Σ_{ē∈B} log(1 − ρ(ē))`.
    pub negative: f64,
    pub batch_size: usize,
    pub weight: f64,
}

/// Negative-sampling estimate of the log-likelihood of `h`.
pub fn ll_estimate<M: EdgeModel + ?Sized>(
    h: &Hypergraph,
    model: &M,
    batch: &NegativeBatch,
) -> Result<LlEstimate> {
    let edges = h.edges();
    let positive = chunked_sum(edges.len(), |i| Ok::<_, Error>(model.clamped(&edges[i]).ln()))?;
    let neg = &batch.edges;
    let raw = chunked_sum(neg.len(), |i| Ok::<_, Error>((-model.clamped(&neg[i])).ln_1p()))?;
    let negative = batch.weight * raw;
    let value = positive + negative;
    if !value.is_finite() {
        return Err(Error::invalid("non-finite log-likelihood estimate"));
    }
    Ok(LlEstimate {
        value,
        positive,
        negative,
        batch_size: neg.len(),
        weight: batch.weight,
    })
}

/// Exact log-likelihood by enumerating every candidate edge.
pub fn exact_log_likelihood<M: EdgeModel + ?Sized>(
    h: &Hypergraph,
    model: &M,
    orders: OrderRange,
) -> Result<f64> {
    let mut terms = Vec::new();
    for_each_candidate(h.n(), orders, |e| {
        let p = model.clamped(e);
        terms.push(if h.contains(e) { p.ln() } else { (-p).ln_1p() });
    })?;
    Ok(crate::numeric::pairwise_sum(&terms))
}

/// `((m̄ − |B|)/|B|) Σ_{ē∉E} log²(1 − ρ(ē))`, enumerating all non-edges.
///
/// Bounds the variance of [`ll_estimate`] under uniform sampling without
/// replacement, because all summands share a sign.
pub fn variance_bound<M: EdgeModel + ?Sized>(
    h: &Hypergraph,
    model: &M,
    orders: OrderRange,
    batch_size: usize,
) -> Result<f64> {
    let all = NegativeBatch::full(h, orders)?;
    if batch_size == 0 || batch_size > all.len() {
        return Err(Error::invalid(format!(
            "batch size {batch_size} outside [1, {}]",
            all.len()
        )));
    }
    let sq: f64 = all
        .edges
        .iter()
        .map(|e| (-model.clamped(e)).ln_1p().powi(2))
        .sum();
    let m_bar = all.len() as f64;
    Ok((m_bar - batch_size as f64) / batch_size as f64 * sq)
}

/// Small-probability form `((1 − α)/α) m̄` of the variance bound for
/// `|B| = α m̄`.
pub fn simple_variance_bound(m_bar: f64, alpha: f64) -> f64 {
    (1.0 - alpha) / alpha * m_bar
}

#[cfg(test)]
mod tests;
