//! Exact sampling from the model by ball dropping.
//!
//! Given ranks, the candidate `k`-edges split into blocks `(k, i, l)` of known
//! size (see [`crate::partition`]). Every edge in a block has the same
//! probability, so a block is sampled by drawing a binomial count `M` and then
//! `M` distinct members uniformly. Members are addressed by an index in
//! `[0, capacity)`: blocks are ordered by the position `j` of the lowest-rank
//! node and, inside, by the colex rank of the `k - 2` interior positions.

use std::collections::HashSet;

use rustc_hash::FxHashSet;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use rand::seq::index;
use rand::Rng;
use rand_distr::{Binomial, Distribution, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cigam::{ModelParams, ZETA};
use crate::coresize::trunc_exp_quantile;
use crate::error::{Error, Result};
use crate::hypergraph::{Edge, Hypergraph, OrderRange};
use crate::partition::{assign_layers, binomial, BinomialTable, Layering, RankVector};
use crate::rng::RngStream;

/// Largest trial count drawn with an exact binomial sampler.
const EXACT_TRIALS: u64 = 1 << 53;
/// Largest mean accepted for the Poisson fallback.
const POISSON_MEAN_LIMIT: f64 = 1e9;

/// I.i.d. truncated-exponential ranks by inverse transform.
pub fn sample_ranks<R: Rng + ?Sized>(n: usize, lambda: f64, rng: &mut R) -> Result<RankVector> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::Domain(format!("lambda = {lambda} must be positive")));
    }
    let values = (0..n)
        .map(|_| trunc_exp_quantile(rng.random::<f64>(), lambda))
        .collect::<Result<Vec<_>>>()?;
    RankVector::new(values)
}

/// `k` distinct values from `lo..hi`, uniform over all `k`-subsets, by
/// rejecting repeats. Returned in increasing order.
pub fn sample_uniform_subset<R: Rng + ?Sized>(
    lo: usize,
    hi: usize,
    k: usize,
    rng: &mut R,
) -> Result<Vec<usize>> {
    let size = hi.saturating_sub(lo);
    if k > size {
        return Err(Error::invalid(format!("cannot draw {k} distinct values from {size}")));
    }
    let mut out: Vec<usize> = if 2 * k <= size && k <= 16 {
        let mut seen = Vec::with_capacity(k);
        while seen.len() < k {
            let v = rng.random_range(lo..hi);
            if !seen.contains(&v) {
                seen.push(v);
            }
        }
        seen
    } else if 2 * k <= size {
        let mut seen = HashSet::with_capacity(k);
        while seen.len() < k {
            seen.insert(rng.random_range(lo..hi));
        }
        seen.into_iter().collect()
    } else {
        // dense case: rejection would mostly hit repeats
        index::sample(rng, size, k).into_iter().map(|x| lo + x).collect()
    };
    out.sort_unstable();
    Ok(out)
}

/// Uniform integer in `[0, bound)`.
pub fn uniform_below<R: Rng + ?Sized>(bound: &BigUint, rng: &mut R) -> BigUint {
    assert!(!bound.is_zero(), "empty range");
    if let Some(b) = bound.to_u64() {
        return BigUint::from(rng.random_range(0..b));
    }
    let bits = bound.bits();
    let words = bits.div_ceil(32) as usize;
    let top = bits - 32 * (words as u64 - 1);
    loop {
        let mut digits: Vec<u32> = (0..words).map(|_| rng.random()).collect();
        if top < 32 {
            digits[words - 1] &= (1u32 << top) - 1;
        }
        let x = BigUint::from_slice(&digits);
        if &x < bound {
            return x;
        }
    }
}

/// One block of the sampling plan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallDropPlan {
    pub k: usize,
    /// Sorted position of the dominant node.
    pub position: usize,
    pub layer: usize,
    /// Block size, as a decimal string.
    pub trials: String,
    pub bias: f64,
    pub drawn: u64,
    /// Count drawn from the Poisson approximation.
    pub approximate: bool,
}

/// Ranks with their layers and a binomial table, ready for block sampling.
#[derive(Debug, Clone)]
pub struct SamplingLayout {
    ranks: RankVector,
    layering: Layering,
    binom: BinomialTable,
    orders: OrderRange,
}

impl SamplingLayout {
    pub fn new(ranks: RankVector, params: &ModelParams, orders: OrderRange) -> Result<Self> {
        params.check_domain()?;
        let n = ranks.len();
        if orders.max() > n {
            return Err(Error::invalid(format!(
                "edge order {} exceeds the number of nodes {n}",
                orders.max()
            )));
        }
        let layering = assign_layers(&ranks, &params.layers)?;
        Ok(Self {
            binom: BinomialTable::new(n, orders.max() - 1),
            ranks,
            layering,
            orders,
        })
    }

    pub fn ranks(&self) -> &RankVector {
        &self.ranks
    }

    pub fn layering(&self) -> &Layering {
        &self.layering
    }

    pub fn orders(&self) -> OrderRange {
        self.orders
    }

    /// Number of candidate edges in block `(k, i, l)`.
    pub fn capacity(&self, i: usize, l: usize, k: usize) -> BigUint {
        crate::partition::block_capacity(i, l, k, &self.layering, &self.binom)
    }

    /// Positions of the `idx`-th member of block `(k, i, l)`, increasing.
    pub fn unrank(&self, i: usize, l: usize, k: usize, idx: &BigUint) -> Vec<usize> {
        let (jmin, jmax) = self.layering.block(i, l).expect("nonempty block");
        let c = |a: usize, b: usize| self.binom.get(a, b);
        let base = c(jmin - i - 1, k - 1);
        // smallest j with C(j - i, k - 1) - base > idx
        let target = idx + base;
        let (mut lo, mut hi) = (jmin, jmax);
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            if c(mid - i, k - 1) > &target {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        let j = lo;
        let mut rest = target - c(j - i - 1, k - 1);
        let mut out = Vec::with_capacity(k);
        out.push(i);
        // colex unranking of a (k-2)-subset of {0, .., j-i-2}
        let mut upper = j - i - 1;
        for m in (1..k - 1).rev() {
            let (mut lo, mut hi) = (m - 1, upper - 1);
            while lo < hi {
                let mid = lo + (hi - lo).div_ceil(2);
                if c(mid, m) <= &rest {
                    lo = mid;
                } else {
                    hi = mid - 1;
                }
            }
            rest -= c(lo, m);
            out.push(i + 1 + lo);
            upper = lo;
        }
        out.push(j);
        out.sort_unstable();
        out
    }
}

/// Edges sampled from one block, as node ids.
#[derive(Debug, Clone)]
pub struct BlockSample {
    pub plan: BallDropPlan,
    pub edges: Vec<Edge>,
}

fn draw_count<R: Rng + ?Sized>(trials: &BigUint, bias: f64, rng: &mut R) -> Result<(u64, bool)> {
    if trials.is_zero() {
        return Ok((0, false));
    }
    match trials.to_u64() {
        Some(t) if t <= EXACT_TRIALS => {
            let dist = Binomial::new(t, bias).map_err(|e| Error::invalid(e.to_string()))?;
            Ok((dist.sample(rng), false))
        }
        _ => {
            let mean = trials.to_f64().unwrap_or(f64::INFINITY) * bias;
            if !(mean < POISSON_MEAN_LIMIT) {
                return Err(Error::SamplingOverflow { expected: mean });
            }
            if mean == 0.0 {
                return Ok((0, true));
            }
            let dist = Poisson::new(mean).map_err(|e| Error::invalid(e.to_string()))?;
            Ok((dist.sample(rng) as u64, true))
        }
    }
}

/// Samples block `(k, i, l)`: a binomial count, then that many distinct
/// uniformly chosen members.
pub fn ball_drop_block<R: Rng + ?Sized>(
    layout: &SamplingLayout,
    params: &ModelParams,
    i: usize,
    l: usize,
    k: usize,
    rng: &mut R,
) -> Result<BlockSample> {
    let trials = layout.capacity(i, l, k);
    let bias = params.c[l].powf(-ZETA + layout.ranks.at(i));
    let (drawn, approximate) = draw_count(&trials, bias, rng)?;
    let order = layout.ranks.order();
    let to_nodes = |positions: Vec<usize>| -> Edge {
        let mut e: Vec<usize> = positions.into_iter().map(|p| order[p]).collect();
        e.sort_unstable();
        e
    };
    // M <= trials always, so a u64 fit of trials covers every drawn index
    let drawn = match trials.to_u64() {
        Some(t) => drawn.min(t),
        None => drawn,
    };
    let mut edges = Vec::with_capacity(drawn as usize);
    match trials.to_usize() {
        Some(t) => {
            for idx in index::sample(rng, t, drawn as usize) {
                edges.push(to_nodes(layout.unrank(i, l, k, &BigUint::from(idx))));
            }
        }
        None => {
            let mut seen = HashSet::with_capacity(drawn as usize);
            while (seen.len() as u64) < drawn {
                let idx = uniform_below(&trials, rng);
                if seen.insert(idx.clone()) {
                    edges.push(to_nodes(layout.unrank(i, l, k, &idx)));
                }
            }
        }
    }
    Ok(BlockSample {
        plan: BallDropPlan {
            k,
            position: i,
            layer: l,
            trials: trials.to_string(),
            bias,
            drawn,
            approximate,
        },
        edges,
    })
}

/// A sampled hypergraph with the ranks that generated it.
#[derive(Debug, Clone)]
pub struct SampledHypergraph {
    pub hypergraph: Hypergraph,
    pub ranks: RankVector,
    /// Blocks whose count came from the Poisson approximation.
    pub approximations: Vec<BallDropPlan>,
}

/// Samples ranks and then edges of every order in `orders`.
pub fn sample_hypergraph(
    n: usize,
    params: &ModelParams,
    orders: OrderRange,
    seed: u64,
) -> Result<SampledHypergraph> {
    let ranks = sample_ranks(n, params.lambda, &mut RngStream::new(seed, 0).rng())?;
    sample_given_ranks(ranks, params, orders, seed)
}

/// Samples edges for fixed ranks. Blocks draw from independent streams, so
/// the result does not depend on the thread count.
pub fn sample_given_ranks(
    ranks: RankVector,
    params: &ModelParams,
    orders: OrderRange,
    seed: u64,
) -> Result<SampledHypergraph> {
    let n = ranks.len();
    let layout = SamplingLayout::new(ranks, params, orders)?;
    let num_layers = params.num_layers();
    let blocks: Vec<Vec<BlockSample>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut out = Vec::new();
            for k in orders.iter() {
                for l in 0..num_layers {
                    if layout.layering.block(i, l).is_none() {
                        continue;
                    }
                    let mut rng = RngStream::for_block(seed, k, i, l).rng();
                    out.push(ball_drop_block(&layout, params, i, l, k, &mut rng)?);
                }
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    let mut edges = Vec::new();
    let mut approximations = Vec::new();
    for b in blocks.into_iter().flatten() {
        if b.plan.approximate {
            approximations.push(b.plan);
        }
        edges.extend(b.edges);
    }
    Ok(SampledHypergraph {
        hypergraph: Hypergraph::from_edges(n, edges)?,
        ranks: layout.ranks,
        approximations,
    })
}

/// `m̄_k = C(n, k) - m_k` for each order in the range.
pub fn non_edge_counts(h: &Hypergraph, orders: OrderRange) -> Vec<BigUint> {
    let counts = h.edge_counts_by_order(orders);
    orders
        .iter()
        .map(|k| {
            let total = binomial(h.n(), k);
            let m = BigUint::from(counts[orders.index(k)]);
            if total > m {
                total - m
            } else {
                BigUint::zero()
            }
        })
        .collect()
}

/// Uniform sample without replacement of `batch` non-edges with orders in
/// `orders`.
pub fn sample_negative_edges<R: Rng + ?Sized>(
    h: &Hypergraph,
    orders: OrderRange,
    batch: usize,
    rng: &mut R,
) -> Result<Vec<Edge>> {
    let per_order = non_edge_counts(h, orders);
    let total: BigUint = per_order.iter().sum();
    if BigUint::from(batch) > total {
        return Err(Error::invalid(format!(
            "batch of {batch} exceeds the {total} available non-edges"
        )));
    }
    // u64 fast path; the BigUint draw below is only needed for huge counts
    let small: Option<(u64, Vec<u64>)> = total
        .to_u64()
        .map(|t| (t, per_order.iter().map(|m| m.to_u64().unwrap_or(0)).collect()));
    // hashing beats binary search over the sorted edge list here
    let existing: FxHashSet<&[usize]> = h.edges().iter().map(Vec::as_slice).collect();
    let mut chosen: FxHashSet<Edge> = FxHashSet::default();
    chosen.reserve(batch);
    let mut out = Vec::with_capacity(batch);
    while out.len() < batch {
        // order K with probability m̄_K / m̄
        let mut k = orders.min();
        match &small {
            Some((t, counts)) => {
                let mut u = rng.random_range(0..*t);
                for (idx, &m) in counts.iter().enumerate() {
                    if u < m {
                        k = orders.min() + idx;
                        break;
                    }
                    u -= m;
                }
            }
            None => {
                let mut u = uniform_below(&total, rng);
                for (idx, m) in per_order.iter().enumerate() {
                    if &u < m {
                        k = orders.min() + idx;
                        break;
                    }
                    u -= m;
                }
            }
        }
        // uniform non-edge of order K
        let e = loop {
            let e = sample_uniform_subset(0, h.n(), k, rng)?;
            if !existing.contains(e.as_slice()) {
                break e;
            }
        };
        if chosen.insert(e.clone()) {
            out.push(e);
        }
    }
    Ok(out)
}

/// Expected number of edges given ranks: `Σ capacity · bias`.
pub fn expected_edges(layout: &SamplingLayout, params: &ModelParams) -> f64 {
    let mut total = 0.0;
    for i in 0..layout.ranks.len() {
        for k in layout.orders.iter() {
            for (l, c) in params.c.iter().enumerate() {
                let cap = layout.capacity(i, l, k);
                if !cap.is_zero() {
                    total += cap.to_f64().unwrap_or(f64::INFINITY)
                        * c.powf(-ZETA + layout.ranks.at(i));
                }
            }
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cigam::edge_probability;
    use crate::partition::{count_positive, LayerConfig};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::collections::HashMap;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn ranks_in_unit_interval_with_expected_mean() {
        let lambda = 2.5f64;
        let r = sample_ranks(10_000, lambda, &mut rng(1)).unwrap();
        assert!(r.values().iter().all(|v| (0.0..=1.0).contains(v)));
        let mean = r.values().iter().sum::<f64>() / 1e4;
        let mu = 1.0 / lambda - (-lambda).exp() / (1.0 - (-lambda).exp());
        let second = 2.0 / lambda.powi(2)
            - (-lambda).exp() * (1.0 + 2.0 / lambda + 2.0 / lambda.powi(2)) / (1.0 - (-lambda).exp());
        let se = ((second - mu * mu) / 1e4).sqrt();
        assert!((mean - mu).abs() < 3.0 * se, "{mean} vs {mu}");
        assert!(sample_ranks(3, 0.0, &mut rng(1)).is_err());
    }

    #[test]
    fn ranks_pass_ks_test() {
        let lambda = 2.5;
        let r = sample_ranks(10_000, lambda, &mut rng(2)).unwrap();
        let mut v = r.values().to_vec();
        v.sort_by(f64::total_cmp);
        let n = v.len() as f64;
        let d = v
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let f = crate::coresize::trunc_exp_cdf(x, lambda).unwrap();
                (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
            })
            .fold(0.0, f64::max);
        // 1% critical value ≈ 1.628 / √n
        assert!(d < 1.628 / n.sqrt(), "D = {d}");
    }

    #[test]
    fn subset_edge_cases() {
        assert_eq!(sample_uniform_subset(3, 7, 4, &mut rng(0)).unwrap(), vec![3, 4, 5, 6]);
        assert!(sample_uniform_subset(0, 2, 3, &mut rng(0)).is_err());
    }

    fn chi_square_uniform(counts: &[u64]) -> f64 {
        let total: u64 = counts.iter().sum();
        let exp = total as f64 / counts.len() as f64;
        counts.iter().map(|&c| (c as f64 - exp).powi(2) / exp).sum()
    }

    #[test]
    fn single_element_subsets_are_uniform() {
        let mut r = rng(3);
        let mut counts = vec![0u64; 10];
        for _ in 0..100_000 {
            counts[sample_uniform_subset(0, 10, 1, &mut r).unwrap()[0]] += 1;
        }
        // chi-square 9 dof, 1% critical value 21.67
        assert!(chi_square_uniform(&counts) < 21.67);
    }

    #[test]
    fn pairs_are_uniform() {
        let mut r = rng(4);
        let mut counts: HashMap<Vec<usize>, u64> = HashMap::new();
        for _ in 0..100_000 {
            *counts.entry(sample_uniform_subset(0, 5, 2, &mut r).unwrap()).or_default() += 1;
        }
        assert_eq!(counts.len(), 10);
        let c: Vec<u64> = counts.values().copied().collect();
        // 9 dof
        assert!(chi_square_uniform(&c) < 21.67);
    }

    #[test]
    fn uniform_below_big_bound() {
        let bound = BigUint::from(3u32) << 100;
        let mut r = rng(5);
        let mut high = 0;
        for _ in 0..2000 {
            let x = uniform_below(&bound, &mut r);
            assert!(x < bound);
            if x >= (BigUint::from(3u32) << 99) {
                high += 1;
            }
        }
        assert!((800..1200).contains(&high));
    }

    fn layout(vals: &[f64], params: &ModelParams, orders: OrderRange) -> SamplingLayout {
        SamplingLayout::new(RankVector::new(vals.to_vec()).unwrap(), params, orders).unwrap()
    }

    #[test]
    fn unranking_enumerates_each_block_exactly() {
        let params = ModelParams::new(1.0, vec![1.5, 2.5], LayerConfig::new(vec![0.4, 1.0]).unwrap()).unwrap();
        let vals: Vec<f64> = (0..9).map(|i| 1.0 - i as f64 / 9.0).collect();
        let lay = layout(&vals, &params, OrderRange::new(2, 4).unwrap());
        for k in 2..=4 {
            for i in 0..9 {
                for l in 0..2 {
                    let cap = lay.capacity(i, l, k).to_usize().unwrap();
                    let mut seen = HashSet::new();
                    for idx in 0..cap {
                        let e = lay.unrank(i, l, k, &BigUint::from(idx));
                        assert_eq!(e.len(), k);
                        assert_eq!(e[0], i);
                        assert!(e.windows(2).all(|w| w[0] < w[1]));
                        let (jmin, jmax) = lay.layering().block(i, l).unwrap();
                        assert!((jmin..=jmax).contains(e.last().unwrap()));
                        seen.insert(e);
                    }
                    assert_eq!(seen.len(), cap);
                }
            }
        }
    }

    #[test]
    fn block_edges_respect_classification() {
        let params = ModelParams::new(1.0, vec![1.2, 1.6], LayerConfig::new(vec![0.5, 1.0]).unwrap()).unwrap();
        let orders = OrderRange::new(2, 3).unwrap();
        let s = sample_hypergraph(40, &params, orders, 9).unwrap();
        let lay = assign_layers(&s.ranks, &params.layers).unwrap();
        assert!(s.hypergraph.m() > 0);
        let pos = count_positive(&s.hypergraph, &s.ranks, &lay, orders).unwrap();
        let sum: u64 = pos.summed().iter().sum();
        assert_eq!(sum, s.hypergraph.m() as u64);
        // every block count is within its capacity
        let sl = SamplingLayout::new(s.ranks.clone(), &params, orders).unwrap();
        for k in orders.iter() {
            for i in 0..40 {
                for l in 0..2 {
                    assert!(BigUint::from(pos.get(k, i, l)) <= sl.capacity(i, l, k));
                }
            }
        }
    }

    #[test]
    fn deterministic_across_thread_counts() {
        let params = ModelParams::single(1.2, 1.5).unwrap();
        let orders = OrderRange::new(2, 3).unwrap();
        let a = sample_hypergraph(60, &params, orders, 17).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| sample_hypergraph(60, &params, orders, 17).unwrap());
        assert_eq!(a.hypergraph, b.hypergraph);
        assert_eq!(a.ranks, b.ranks);
        let c = sample_hypergraph(60, &params, orders, 18).unwrap();
        assert_ne!(a.hypergraph, c.hypergraph);
    }

    #[test]
    fn very_sparse_model_has_few_edges() {
        let params = ModelParams::single(1.0, 1e6).unwrap();
        let orders = OrderRange::uniform(2).unwrap();
        let r = sample_ranks(100, 1.0, &mut rng(6)).unwrap();
        let lay = SamplingLayout::new(r, &params, orders).unwrap();
        assert!(expected_edges(&lay, &params) < 1.0);
    }

    #[test]
    fn block_frequencies_match_capacity_share() {
        // L = 1, n = 6, k = 3, position 1: every member equally likely
        let params = ModelParams::single(1.0, 2.0).unwrap();
        let vals = [0.95, 0.8, 0.6, 0.5, 0.3, 0.1];
        let lay = layout(&vals, &params, OrderRange::uniform(3).unwrap());
        let cap = lay.capacity(1, 0, 3).to_u64().unwrap();
        assert_eq!(cap, 6);
        let bias = 2f64.powf(-2.0 + 0.8);
        let runs = 100_000;
        let mut r = rng(7);
        let mut counts: HashMap<Edge, u64> = HashMap::new();
        for _ in 0..runs {
            for e in ball_drop_block(&lay, &params, 1, 0, 3, &mut r).unwrap().edges {
                assert_eq!(e.iter().map(|&v| lay.ranks().position(v)).min(), Some(1));
                *counts.entry(e).or_default() += 1;
            }
        }
        assert_eq!(counts.len(), 6);
        let sd = (runs as f64 * bias * (1.0 - bias)).sqrt();
        for &c in counts.values() {
            assert!((c as f64 - runs as f64 * bias).abs() < 3.0 * sd);
        }
    }

    #[test]
    fn pair_frequencies_match_edge_probability() {
        let params = ModelParams::new(1.0, vec![1.5, 3.0], LayerConfig::new(vec![0.5, 1.0]).unwrap()).unwrap();
        let r = RankVector::new(vec![0.9, 0.2, 0.7, 0.4, 0.55, 0.05]).unwrap();
        let orders = OrderRange::uniform(2).unwrap();
        let runs = 20_000u64;
        let mut counts: HashMap<Edge, u64> = HashMap::new();
        for seed in 0..runs {
            let s = sample_given_ranks(r.clone(), &params, orders, seed).unwrap();
            for e in s.hypergraph.edges() {
                *counts.entry(e.clone()).or_default() += 1;
            }
        }
        for a in 0..6 {
            for b in a + 1..6 {
                let p = edge_probability(&[a, b], &r, &params).unwrap();
                let c = *counts.get(&vec![a, b]).unwrap_or(&0) as f64;
                let sd = (runs as f64 * p * (1.0 - p)).sqrt();
                assert!((c - runs as f64 * p).abs() < 3.5 * sd, "{a},{b}: {c} vs {}", runs as f64 * p);
            }
        }
    }

    #[test]
    fn negative_sampling_exhausts_small_universe() {
        let h = Hypergraph::from_edges(5, vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![3, 4]]).unwrap();
        let mut b = sample_negative_edges(&h, OrderRange::uniform(2).unwrap(), 6, &mut rng(8)).unwrap();
        b.sort();
        assert_eq!(b, vec![vec![0, 2], vec![0, 3], vec![0, 4], vec![1, 3], vec![1, 4], vec![2, 4]]);
        assert!(sample_negative_edges(&h, OrderRange::uniform(2).unwrap(), 7, &mut rng(8)).is_err());
    }

    #[test]
    fn complete_graph_has_no_negatives() {
        let h = Hypergraph::from_edges(3, vec![vec![0, 1], vec![0, 2], vec![1, 2]]).unwrap();
        assert!(sample_negative_edges(&h, OrderRange::uniform(2).unwrap(), 1, &mut rng(0)).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn unrank_matches_big_path(seed in 0u64..1000, n in 6usize..30) {
            let params = ModelParams::new(1.0, vec![1.5, 2.5], LayerConfig::new(vec![0.5, 1.0]).unwrap()).unwrap();
            let r = sample_ranks(n, 1.5, &mut rng(seed)).unwrap();
            let lay = SamplingLayout::new(r, &params, OrderRange::new(2, 5).unwrap()).unwrap();
            let mut g = rng(seed + 1);
            for _ in 0..20 {
                let i = g.random_range(0..n);
                let l = g.random_range(0..2);
                let k = g.random_range(2..=5);
                let cap = lay.capacity(i, l, k);
                if cap.is_zero() { continue; }
                let idx = uniform_below(&cap, &mut g);
                let e = lay.unrank(i, l, k, &idx);
                prop_assert_eq!(e.len(), k);
                prop_assert_eq!(e[0], i);
                prop_assert_eq!(lay.layering().layers()[*e.last().unwrap()], l);
            }
        }
    }
}
