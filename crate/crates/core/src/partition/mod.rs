//! Sufficient statistics of the model.
//!
//! With nodes sorted by decreasing rank, every hyperedge is classified by its
//! order `k`, the sorted position `i` of its highest-rank (dominant) node and
//! the layer `l` of its lowest-rank node. The candidate edges sharing a class
//! form a block whose size has a closed form, because the nodes of a layer
//! occupy a contiguous run of sorted positions:
//!
//! ```text
//! capacity(k, i, l) = C(j_max - i, k - 1) - C(j_min - i - 1, k - 1)
//! ```
//!
//! where `[j_min, j_max]` are the positions after `i` that belong to layer `l`.
//! Positive counts `S(i, l)` and complement counts `S̄(i, l)` (summed over `k`)
//! are all the likelihood needs.

mod binom;

pub use binom::{binomial, BinomialTable};

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypergraph::{Hypergraph, OrderRange};

/// Node ranks in `[0, 1]` with their strict decreasing order.
///
/// Ties are broken by ascending node index, so `order` is a total order.
#[derive(Debug, Clone, PartialEq)]
pub struct RankVector {
    values: Vec<f64>,
    order: Vec<usize>,
    position: Vec<usize>,
}

impl RankVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some((node, &value)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !(0.0..=1.0).contains(*v))
        {
            return Err(Error::RankOutOfRange { node, value });
        }
        let mut order: Vec<usize> = (0..values.len()).collect();
        order.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
        let mut position = vec![0; values.len()];
        for (p, &v) in order.iter().enumerate() {
            position[v] = p;
        }
        Ok(Self {
            values,
            order,
            position,
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Rank of each node, indexed by node.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Node at each sorted position (position 0 has the highest rank).
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// Sorted position of `node`.
    pub fn position(&self, node: usize) -> usize {
        self.position[node]
    }

    /// Rank at a sorted position.
    pub fn at(&self, pos: usize) -> f64 {
        self.values[self.order[pos]]
    }

    pub fn sorted_values(&self) -> Vec<f64> {
        self.order.iter().map(|&v| self.values[v]).collect()
    }
}

/// Layer breakpoints `0 < H_1 <= ... <= H_L = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct LayerConfig {
    breakpoints: Vec<f64>,
}

impl LayerConfig {
    pub fn new(breakpoints: Vec<f64>) -> Result<Self> {
        let valid = !breakpoints.is_empty()
            && breakpoints[0] > 0.0
            && breakpoints.windows(2).all(|w| w[0] <= w[1])
            && breakpoints.last() == Some(&1.0);
        if !valid {
            return Err(Error::invalid(format!(
                "breakpoints {breakpoints:?} must be nondecreasing, positive and end at 1"
            )));
        }
        Ok(Self { breakpoints })
    }

    /// The one-layer model.
    pub fn single() -> Self {
        Self {
            breakpoints: vec![1.0],
        }
    }

    pub fn num_layers(&self) -> usize {
        self.breakpoints.len()
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    /// Zero-based layer of a node whose rank is `r` when it is the lowest-rank
    /// member of an edge: the first `l` with `1 - r <= H_l`.
    pub fn layer_of(&self, r: f64) -> usize {
        let depth = 1.0 - r;
        self.breakpoints
            .iter()
            .position(|&h| depth <= h)
            .unwrap_or(self.breakpoints.len() - 1)
    }
}

impl TryFrom<Vec<f64>> for LayerConfig {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<LayerConfig> for Vec<f64> {
    fn from(c: LayerConfig) -> Self {
        c.breakpoints
    }
}

/// Layer of every sorted position and the contiguous span of each layer.
#[derive(Debug, Clone, PartialEq)]
pub struct Layering {
    layers: Vec<usize>,
    /// Layer `l` occupies positions `starts[l]..starts[l + 1]`.
    starts: Vec<usize>,
}

impl Layering {
    pub fn layers(&self) -> &[usize] {
        &self.layers
    }

    pub fn num_layers(&self) -> usize {
        self.starts.len() - 1
    }

    pub fn n(&self) -> usize {
        self.layers.len()
    }

    /// Positions of layer `l`, as a half-open range.
    pub fn span(&self, l: usize) -> std::ops::Range<usize> {
        self.starts[l]..self.starts[l + 1]
    }

    /// Inclusive bounds `(j_min, j_max)` of `N(i, l) = {j > i : layer(j) = l}`.
    pub fn block(&self, i: usize, l: usize) -> Option<(usize, usize)> {
        let lo = self.starts[l].max(i + 1);
        let hi = self.starts[l + 1];
        (lo < hi).then(|| (lo, hi - 1))
    }
}

/// Assigns a layer to every sorted position. The result is nondecreasing.
pub fn assign_layers(r: &RankVector, cfg: &LayerConfig) -> Result<Layering> {
    let n = r.len();
    let mut layers = Vec::with_capacity(n);
    for pos in 0..n {
        let value = r.at(pos);
        if !(0.0..=1.0).contains(&value) {
            return Err(Error::RankOutOfRange {
                node: r.order()[pos],
                value,
            });
        }
        layers.push(cfg.layer_of(value));
    }
    let num_layers = cfg.num_layers();
    let mut starts = vec![0; num_layers + 1];
    for l in 0..num_layers {
        starts[l + 1] = starts[l] + layers.iter().filter(|&&x| x == l).count();
    }
    debug_assert!(layers.windows(2).all(|w| w[0] <= w[1]));
    Ok(Layering { layers, starts })
}

/// Number of candidate `k`-edges whose dominant node sits at position `i` and
/// whose lowest-rank node lies in layer `l`.
pub fn block_capacity(
    i: usize,
    l: usize,
    k: usize,
    layering: &Layering,
    binom: &BinomialTable,
) -> BigUint {
    match layering.block(i, l) {
        Some((jmin, jmax)) => binom.get(jmax - i, k - 1) - binom.get(jmin - i - 1, k - 1),
        None => BigUint::zero(),
    }
}

/// Dense `(k, i, l)` tensor of positive counts `|E(k, i, l)|`.
#[derive(Debug, Clone, PartialEq)]
pub struct PositiveCounts {
    orders: OrderRange,
    n: usize,
    num_layers: usize,
    counts: Vec<u64>,
}

impl PositiveCounts {
    fn idx(&self, k: usize, i: usize, l: usize) -> usize {
        (self.orders.index(k) * self.n + i) * self.num_layers + l
    }

    pub fn get(&self, k: usize, i: usize, l: usize) -> u64 {
        self.counts[self.idx(k, i, l)]
    }

    pub fn orders(&self) -> OrderRange {
        self.orders
    }

    /// `S(i, l) = Σ_k |E(k, i, l)|`, laid out as `i * L + l`.
    pub fn summed(&self) -> Vec<u64> {
        let mut s = vec![0u64; self.n * self.num_layers];
        for (x, &c) in self.counts.iter().enumerate() {
            s[x % (self.n * self.num_layers)] += c;
        }
        s
    }
}

/// Sorted position of the dominant node and of the lowest-rank node of `edge`.
pub fn edge_extremes(edge: &[usize], r: &RankVector) -> (usize, usize) {
    let mut top = usize::MAX;
    let mut bottom = 0;
    for &v in edge {
        let p = r.position(v);
        top = top.min(p);
        bottom = bottom.max(p);
    }
    (top, bottom)
}

/// Classifies every edge into its `(k, i, l)` block in `O(k_max m)`.
pub fn count_positive(
    h: &Hypergraph,
    r: &RankVector,
    layering: &Layering,
    orders: OrderRange,
) -> Result<PositiveCounts> {
    let n = h.n();
    if r.len() != n {
        return Err(Error::invalid(format!("{} ranks for {n} nodes", r.len())));
    }
    let num_layers = layering.num_layers();
    let mut out = PositiveCounts {
        orders,
        n,
        num_layers,
        counts: vec![0; orders.len() * n * num_layers],
    };
    for e in h.edges() {
        if !orders.contains(e.len()) {
            return Err(Error::OrderOutOfRange(e.len()));
        }
        let (top, bottom) = edge_extremes(e, r);
        let idx = out.idx(e.len(), top, layering.layers()[bottom]);
        out.counts[idx] += 1;
    }
    Ok(out)
}

/// `S̄(i, l) = Σ_k [capacity(k, i, l) - |E(k, i, l)|]`, laid out as `i * L + l`.
pub fn count_complement(
    positive: &PositiveCounts,
    layering: &Layering,
    binom: &BinomialTable,
) -> Result<Vec<BigUint>> {
    let (n, num_layers) = (positive.n, positive.num_layers);
    let mut out = vec![BigUint::zero(); n * num_layers];
    for k in positive.orders.iter() {
        for i in 0..n {
            for l in 0..num_layers {
                let cap = block_capacity(i, l, k, layering, binom);
                let observed = positive.get(k, i, l);
                let observed_big = BigUint::from(observed);
                if observed_big > cap {
                    return Err(Error::CapacityExceeded {
                        k,
                        position: i,
                        layer: l,
                        observed,
                        capacity: cap.to_string(),
                    });
                }
                out[i * num_layers + l] += cap - observed_big;
            }
        }
    }
    Ok(out)
}

/// Builds partition statistics for one order range and layer configuration,
/// reusing a binomial table across rank vectors.
#[derive(Debug, Clone)]
pub struct Partitioner {
    orders: OrderRange,
    layers: LayerConfig,
    binom: BinomialTable,
}

impl Partitioner {
    pub fn new(n: usize, orders: OrderRange, layers: LayerConfig) -> Self {
        Self {
            orders,
            layers,
            binom: BinomialTable::new(n, orders.max() - 1),
        }
    }

    pub fn orders(&self) -> OrderRange {
        self.orders
    }

    pub fn layer_config(&self) -> &LayerConfig {
        &self.layers
    }

    pub fn binom(&self) -> &BinomialTable {
        &self.binom
    }

    pub fn build(&self, h: &Hypergraph, r: &RankVector) -> Result<PartitionStats> {
        if h.n() != self.binom.n() {
            return Err(Error::invalid(format!(
                "partitioner built for n={} but graph has n={}",
                self.binom.n(),
                h.n()
            )));
        }
        let layering = assign_layers(r, &self.layers)?;
        let positive = count_positive(h, r, &layering, self.orders)?;
        let s_bar = count_complement(&positive, &layering, &self.binom)?;
        let s_bar_f64 = s_bar.iter().map(|v| v.to_f64().unwrap_or(f64::INFINITY)).collect();
        Ok(PartitionStats {
            n: h.n(),
            m: h.m() as u64,
            num_layers: self.layers.num_layers(),
            orders: self.orders,
            sorted_ranks: r.sorted_values(),
            order: r.order().to_vec(),
            s: positive.summed(),
            positive,
            layering,
            s_bar,
            s_bar_f64,
        })
    }
}

/// Sufficient statistics for one (graph, ranks, layers) triple.
#[derive(Debug, Clone)]
pub struct PartitionStats {
    n: usize,
    m: u64,
    num_layers: usize,
    orders: OrderRange,
    sorted_ranks: Vec<f64>,
    order: Vec<usize>,
    layering: Layering,
    positive: PositiveCounts,
    s: Vec<u64>,
    s_bar: Vec<BigUint>,
    s_bar_f64: Vec<f64>,
}

impl PartitionStats {
    /// One-shot construction; see [`Partitioner`] to amortize the binomial table.
    pub fn build(
        h: &Hypergraph,
        r: &RankVector,
        layers: &LayerConfig,
        orders: OrderRange,
    ) -> Result<Self> {
        Partitioner::new(h.n(), orders, layers.clone()).build(h, r)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn num_layers(&self) -> usize {
        self.num_layers
    }

    pub fn orders(&self) -> OrderRange {
        self.orders
    }

    /// Rank at each sorted position.
    pub fn sorted_ranks(&self) -> &[f64] {
        &self.sorted_ranks
    }

    /// Node at each sorted position.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn layering(&self) -> &Layering {
        &self.layering
    }

    pub fn positive(&self) -> &PositiveCounts {
        &self.positive
    }

    pub fn s(&self, i: usize, l: usize) -> u64 {
        self.s[i * self.num_layers + l]
    }

    pub fn s_bar(&self, i: usize, l: usize) -> &BigUint {
        &self.s_bar[i * self.num_layers + l]
    }

    pub fn s_bar_f64(&self, i: usize, l: usize) -> f64 {
        self.s_bar_f64[i * self.num_layers + l]
    }

    /// Debug dump with exact complement counts as decimal strings.
    pub fn to_debug_dump(&self) -> StatsDump {
        StatsDump {
            n: self.n,
            m: self.m,
            num_layers: self.num_layers,
            k_min: self.orders.min(),
            k_max: self.orders.max(),
            positions: (0..self.n)
                .map(|i| PositionDump {
                    position: i,
                    node: self.order[i],
                    rank: self.sorted_ranks[i],
                    layer: self.layering.layers()[i],
                    s: (0..self.num_layers).map(|l| self.s(i, l)).collect(),
                    s_bar: (0..self.num_layers).map(|l| self.s_bar(i, l).to_string()).collect(),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct StatsDump {
    pub n: usize,
    pub m: u64,
    pub num_layers: usize,
    pub k_min: usize,
    pub k_max: usize,
    pub positions: Vec<PositionDump>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct PositionDump {
    pub position: usize,
    pub node: usize,
    pub rank: f64,
    pub layer: usize,
    pub s: Vec<u64>,
    pub s_bar: Vec<String>,
}
