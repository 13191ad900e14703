use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypergraph::FeatureMatrix;
use crate::numeric::sigmoid;
use crate::partition::RankVector;

/// Learned ranks are kept in `[RANK_CLAMP, 1 - RANK_CLAMP]`.
pub const RANK_CLAMP: f64 = 1e-7;

/// Feature-to-rank map `r = σ(wᵀx + b)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankMap {
    pub w: Vec<f64>,
    pub b: f64,
}

impl RankMap {
    pub fn new(w: Vec<f64>, b: f64) -> Result<Self> {
        if !(b.is_finite() && w.iter().all(|v| v.is_finite())) {
            return Err(Error::invalid("rank map parameters must be finite"));
        }
        Ok(Self { w, b })
    }

    pub fn zeros(d: usize) -> Self {
        Self { w: vec![0.0; d], b: 0.0 }
    }

    pub fn dim(&self) -> usize {
        self.w.len()
    }

    fn check(&self, x: &FeatureMatrix) -> Result<()> {
        if x.cols() != self.w.len() {
            return Err(Error::invalid(format!(
                "rank map has {} weights but features have {} columns",
                self.w.len(),
                x.cols()
            )));
        }
        Ok(())
    }

    /// Unclamped `σ(wᵀx_v + b)`.
    pub fn raw(&self, x: &FeatureMatrix, v: usize) -> f64 {
        let z: f64 = self.b + x.row(v).iter().zip(&self.w).map(|(a, w)| a * w).sum::<f64>();
        sigmoid(z)
    }

    /// Clamped rank of node `v` and whether the clamp was active.
    pub fn rank(&self, x: &FeatureMatrix, v: usize) -> (f64, bool) {
        let r = self.raw(x, v);
        if r < RANK_CLAMP {
            (RANK_CLAMP, true)
        } else if r > 1.0 - RANK_CLAMP {
            (1.0 - RANK_CLAMP, true)
        } else {
            (r, false)
        }
    }

    /// Clamped ranks of all nodes.
    pub fn ranks(&self, x: &FeatureMatrix) -> Result<Vec<f64>> {
        self.check(x)?;
        Ok((0..x.rows()).map(|v| self.rank(x, v).0).collect())
    }

    pub fn rank_vector(&self, x: &FeatureMatrix) -> Result<RankVector> {
        RankVector::new(self.ranks(x)?)
    }

    /// Clamped ranks listed in the given node order.
    pub fn ranks_in_order(&self, x: &FeatureMatrix, order: &[usize]) -> Result<Vec<f64>> {
        self.check(x)?;
        Ok(order.iter().map(|&v| self.rank(x, v).0).collect())
    }

    /// Chains per-node rank derivatives `g_v = ∂F/∂r_v` into `(∂F/∂w, ∂F/∂b)`.
    /// Clamped ranks contribute nothing.
    pub fn chain(&self, x: &FeatureMatrix, node_grad: &[f64]) -> Result<(Vec<f64>, f64)> {
        self.check(x)?;
        let mut gw = vec![0.0; self.w.len()];
        let mut gb = 0.0;
        for (v, &g) in node_grad.iter().enumerate() {
            let (r, clamped) = self.rank(x, v);
            if clamped {
                continue;
            }
            let d = g * r * (1.0 - r);
            gb += d;
            for (acc, &xv) in gw.iter_mut().zip(x.row(v)) {
                *acc += d * xv;
            }
        }
        Ok((gw, gb))
    }
}
