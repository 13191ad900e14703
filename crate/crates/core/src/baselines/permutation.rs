//! Permutation models: an edge appears with probability
//! `σ(ξ(e) M_a({a_u}_{u∈e}))` where `a_u = 1 − π_u/n` and `π_u` is the
//! 1-based position of `u`.

use serde::{Deserialize, Serialize};

use super::{ll_estimate, EdgeModel, LlEstimate, NegativeBatch};
use crate::error::{Error, Result};
use crate::hypergraph::Hypergraph;
use crate::numeric::{average_ranks, pearson, sigmoid};

/// Hölder (power) mean `((1/|v|) Σ v_i^a)^{1/a}` of values in `[0, 1]`.
///
/// `|a| > 700` is treated as the max/min limit and `|a| < 1e-9` as the
/// geometric mean.
pub fn holder_mean(values: &[f64], a: f64) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::invalid("Hölder mean of an empty set"));
    }
    if values.iter().any(|v| !(0.0..=1.0).contains(v)) {
        return Err(Error::invalid("Hölder mean inputs must lie in [0, 1]"));
    }
    if a.is_nan() {
        return Err(Error::invalid("Hölder exponent is NaN"));
    }
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let len = values.len() as f64;
    if a > 700.0 {
        return Ok(max);
    }
    if a < -700.0 {
        return Ok(min);
    }
    if a.abs() < 1e-9 {
        if min == 0.0 {
            return Ok(0.0);
        }
        return Ok((values.iter().map(|v| v.ln()).sum::<f64>() / len).exp());
    }
    if a < 0.0 && min == 0.0 {
        return Ok(0.0);
    }
    if max == 0.0 {
        return Ok(0.0);
    }
    // scale by the max so that large |a| neither overflows nor underflows
    let s: f64 = values.iter().map(|v| (v / max).powf(a)).sum::<f64>() / len;
    Ok((max * s.powf(1.0 / a)).clamp(min, max))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PermutationMode {
    /// `ξ(e) = 1/|e|`, any edge order.
    HyperNsm,
    /// `ξ ≡ 1`, graphs only.
    LogisticTh,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PermutationModel {
    /// 1-based position of each node.
    pub pi: Vec<usize>,
    pub a: f64,
    pub mode: PermutationMode,
    /// Carried through to reports; not used in scoring.
    pub p: Option<f64>,
}

impl PermutationModel {
    /// From positions `pi[u] ∈ {1..n}`.
    pub fn new(pi: Vec<usize>, a: f64, mode: PermutationMode) -> Result<Self> {
        let n = pi.len();
        let mut seen = vec![false; n];
        for &p in &pi {
            if p == 0 || p > n || std::mem::replace(&mut seen[p - 1], true) {
                return Err(Error::invalid("positions are not a permutation of 1..n"));
            }
        }
        if !a.is_finite() || a == 0.0 {
            return Err(Error::invalid(format!("Hölder exponent must be finite and nonzero, got {a}")));
        }
        Ok(Self { pi, a, mode, p: None })
    }

    /// From a node sequence, most central first.
    pub fn from_order(order: &[usize], a: f64, mode: PermutationMode) -> Result<Self> {
        let mut pi = vec![0; order.len()];
        for (pos, &u) in order.iter().enumerate() {
            if u >= order.len() {
                return Err(Error::invalid(format!("node {u} out of range")));
            }
            pi[u] = pos + 1;
        }
        Self::new(pi, a, mode)
    }

    pub fn n(&self) -> usize {
        self.pi.len()
    }

    pub fn score(&self, u: usize) -> f64 {
        1.0 - self.pi[u] as f64 / self.n() as f64
    }

    fn xi(&self, edge: &[usize]) -> f64 {
        match self.mode {
            PermutationMode::HyperNsm => 1.0 / edge.len() as f64,
            PermutationMode::LogisticTh => 1.0,
        }
    }

    /// Negative-sampling estimate; Logistic-TH requires a 2-uniform graph.
    pub fn ll_estimate(&self, h: &Hypergraph, batch: &NegativeBatch) -> Result<LlEstimate> {
        if h.n() != self.n() {
            return Err(Error::invalid(format!("permutation of {} for {} nodes", self.n(), h.n())));
        }
        if self.mode == PermutationMode::LogisticTh
            && (h.edges().iter().chain(&batch.edges).any(|e| e.len() != 2))
        {
            return Err(Error::invalid("Logistic-TH needs a 2-uniform graph"));
        }
        ll_estimate(h, self, batch)
    }
}

impl EdgeModel for PermutationModel {
    fn prob(&self, edge: &[usize]) -> f64 {
        let values: Vec<f64> = edge.iter().map(|&u| self.score(u)).collect();
        let m = holder_mean(&values, self.a).expect("scores lie in [0, 1)");
        sigmoid(self.xi(edge) * m)
    }
}

/// Node order by decreasing score; ties keep index order.
pub fn permutation_from_scores(scores: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
    order
}

/// Spearman correlation of two score vectors, with average ranks for ties.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::invalid(format!("lengths {} and {} differ", x.len(), y.len())));
    }
    pearson(&average_ranks(x), &average_ranks(y))
        .ok_or_else(|| Error::invalid("Spearman correlation of a constant vector"))
}

/// One node of a rank-scatter plot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankScatterRow {
    pub node: usize,
    pub position_a: usize,
    pub position_b: usize,
}

/// Spearman correlation of two node orderings (node sequences over the same
/// node set) and the per-node positions.
pub fn rank_correlation(a: &[usize], b: &[usize]) -> Result<(f64, Vec<RankScatterRow>)> {
    if a.len() != b.len() {
        return Err(Error::invalid(format!("orderings of length {} and {}", a.len(), b.len())));
    }
    let n = a.len();
    let positions = |order: &[usize]| -> Result<Vec<usize>> {
        let mut pos = vec![usize::MAX; n];
        for (p, &u) in order.iter().enumerate() {
            if u >= n || pos[u] != usize::MAX {
                return Err(Error::invalid("ordering is not a permutation"));
            }
            pos[u] = p + 1;
        }
        Ok(pos)
    };
    let (pa, pb) = (positions(a)?, positions(b)?);
    let fa: Vec<f64> = pa.iter().map(|&p| p as f64).collect();
    let fb: Vec<f64> = pb.iter().map(|&p| p as f64).collect();
    let rho = pearson(&fa, &fb).ok_or_else(|| Error::invalid("need at least two nodes"))?;
    let rows = (0..n)
        .map(|node| RankScatterRow { node, position_a: pa[node], position_b: pb[node] })
        .collect();
    Ok((rho, rows))
}
