//! Core-size threshold of the single-layer `k`-uniform model and empirical
//! domination checks.
//!
//! For a threshold `t`, the nodes with rank at least `t` form a core when they
//! dominate every other node. The threshold function
//!
//! ```text
//! Φ(t) = 2 log n / c_L^(-2+t) - C(n, k-1) + C(n F(t) + sqrt(n log n / 2), k-1)
//! ```
//!
//! is increasing on `[0, t']` under mild conditions and its root is the
//! smallest threshold at which domination holds with high probability.

use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::cigam::ModelParams;
use crate::error::{Error, Result};
use crate::hypergraph::{Hypergraph, OrderRange};
use crate::partition::{binomial, RankVector};
use crate::sampler::sample_hypergraph;

/// Below this rate the truncated exponential is treated by its series.
const SMALL_LAMBDA: f64 = 1e-8;

/// CDF `F(t) = (1 - e^{-λt}) / (1 - e^{-λ})` on `[0, 1]`.
pub fn trunc_exp_cdf(t: f64, lambda: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::invalid(format!("t = {t} outside [0, 1]")));
    }
    if !(lambda > 0.0) {
        return Err(Error::Domain(format!("lambda = {lambda} must be positive")));
    }
    if lambda < SMALL_LAMBDA {
        return Ok(t + 0.5 * lambda * t * (1.0 - t));
    }
    Ok(((-lambda * t).exp_m1() / (-lambda).exp_m1()).clamp(0.0, 1.0))
}

/// Inverse of [`trunc_exp_cdf`].
pub fn trunc_exp_quantile(q: f64, lambda: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::invalid(format!("q = {q} outside [0, 1]")));
    }
    if !(lambda > 0.0) {
        return Err(Error::Domain(format!("lambda = {lambda} must be positive")));
    }
    if lambda < SMALL_LAMBDA {
        return Ok((q - 0.5 * lambda * q * (1.0 - q)).clamp(0.0, 1.0));
    }
    Ok((-(q * (-lambda).exp_m1()).ln_1p() / lambda).clamp(0.0, 1.0))
}

/// Generalized binomial coefficient `C(x, y)` for real `x >= 0`.
///
/// Integer `y` uses the falling-factorial product, which keeps full relative
/// precision; other `y` go through log-Gamma.
pub fn gen_binomial(x: f64, y: f64) -> f64 {
    if y < 0.0 {
        return 0.0;
    }
    if y.fract() == 0.0 && y < 1e6 {
        let mut acc = 1.0;
        for j in 0..y as u64 {
            acc *= (x - j as f64) / (j as f64 + 1.0);
        }
        return acc;
    }
    if x - y + 1.0 <= 0.0 {
        return 0.0;
    }
    (ln_gamma(x + 1.0) - ln_gamma(y + 1.0) - ln_gamma(x - y + 1.0)).exp()
}

/// `(n, k, λ, c_L)` defining `Φ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoreThresholdProblem {
    pub n: usize,
    pub k: usize,
    pub lambda: f64,
    pub c_l: f64,
}

impl CoreThresholdProblem {
    pub fn new(n: usize, k: usize, lambda: f64, c_l: f64) -> Result<Self> {
        if n < 2 || k < 2 || k >= n {
            return Err(Error::invalid(format!("need n >= 2 and 2 <= k < n, got n={n}, k={k}")));
        }
        if !(lambda > 0.0 && lambda.is_finite()) || !(c_l > 1.0 && c_l.is_finite()) {
            return Err(Error::Domain(format!("need lambda > 0 and c_L > 1, got {lambda}, {c_l}")));
        }
        Ok(Self { n, k, lambda, c_l })
    }

    /// Largest `c_l` of a fitted model.
    pub fn from_params(n: usize, k: usize, params: &ModelParams) -> Result<Self> {
        Self::new(n, k, params.lambda, *params.c.last().expect("at least one layer"))
    }

    fn ln_n(&self) -> f64 {
        (self.n as f64).ln()
    }

    /// `1 < c_L < e^λ` and `λ < ln(n/72)/4`, the conditions for a unique,
    /// meaningful root.
    pub fn guarantee(&self) -> bool {
        let monotone = self.lambda < (self.n as f64 / 72.0).ln() / 4.0;
        monotone && self.c_l < self.lambda.exp()
    }

    /// `t' = F^{-1}(1 - sqrt(log n / (2n)))`.
    pub fn t_prime(&self) -> f64 {
        let q = 1.0 - (self.ln_n() / (2.0 * self.n as f64)).sqrt();
        trunc_exp_quantile(q.clamp(0.0, 1.0), self.lambda).expect("q in [0, 1]")
    }

    fn spread(&self) -> f64 {
        (self.n as f64 * self.ln_n() / 2.0).sqrt()
    }

    /// `C(n, k-1)`.
    fn total(&self) -> f64 {
        binomial(self.n, self.k - 1).to_f64().unwrap_or(f64::INFINITY)
    }

    /// `C(n, k-1) - C(n F(t) + sqrt(n log n / 2), k-1)`.
    pub fn capacity_term(&self, t: f64) -> Result<f64> {
        let x = self.n as f64 * trunc_exp_cdf(t, self.lambda)? + self.spread();
        Ok(self.total() - gen_binomial(x, (self.k - 1) as f64))
    }

    /// `2 log n / c_L^(-2+t)`.
    pub fn domination_term(&self, t: f64) -> f64 {
        2.0 * self.ln_n() * self.c_l.powf(2.0 - t)
    }

    pub fn phi(&self, t: f64) -> Result<f64> {
        let tp = self.t_prime();
        if !(t >= 0.0 && t <= tp * (1.0 + 1e-12)) {
            return Err(Error::invalid(format!("t = {t} outside [0, {tp}]")));
        }
        Ok(self.domination_term(t) - self.capacity_term(t)?)
    }
}

/// One row of a `Φ` curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhiPoint {
    pub t: f64,
    #[serde(rename = "Phi")]
    pub phi: f64,
    #[serde(rename = "F")]
    pub f: f64,
    #[serde(rename = "capacityTerm")]
    pub capacity_term: f64,
}

/// `Φ` on `points` evenly spaced values of `[0, t']`.
pub fn phi_curve(problem: &CoreThresholdProblem, points: usize) -> Result<Vec<PhiPoint>> {
    let tp = problem.t_prime();
    let points = points.max(2);
    (0..points)
        .into_par_iter()
        .map(|j| {
            let t = if j + 1 == points { tp } else { tp * j as f64 / (points - 1) as f64 };
            Ok(PhiPoint {
                t,
                phi: problem.phi(t)?,
                f: trunc_exp_cdf(t, problem.lambda)?,
                capacity_term: problem.capacity_term(t)?,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RootStatus {
    Found,
    /// `Φ` does not change sign on `[0, t']`.
    NoRoot,
}

/// Result of [`solve_core_threshold`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoreThresholdReport {
    pub status: RootStatus,
    pub t_star: Option<f64>,
    pub t_prime: f64,
    pub phi_at_zero: f64,
    pub phi_at_t_prime: f64,
    /// `Φ(t*)`.
    pub residual: Option<f64>,
    /// `n (1 - F(t*))`.
    pub core_population: Option<f64>,
    /// `sqrt(n log n / 2) + 2 log n / c_L^(-2+t*)`.
    pub bound_sqrt_n: Option<f64>,
    pub guarantee: bool,
}

/// Bisection for the root of `Φ` on `[0, t']`.
///
/// Stops when the bracket is narrower than `tol` and `|Φ| <= 1e-8` at the
/// better endpoint, or when the bracket cannot be split further in floating
/// point.
pub fn solve_core_threshold(problem: &CoreThresholdProblem, tol: f64) -> Result<CoreThresholdReport> {
    let tp = problem.t_prime();
    let f0 = problem.phi(0.0)?;
    let f1 = problem.phi(tp)?;
    let mut report = CoreThresholdReport {
        status: RootStatus::NoRoot,
        t_star: None,
        t_prime: tp,
        phi_at_zero: f0,
        phi_at_t_prime: f1,
        residual: None,
        core_population: None,
        bound_sqrt_n: None,
        guarantee: problem.guarantee(),
    };
    if !(f0 < 0.0 && f1 > 0.0) {
        return Ok(report);
    }
    let (mut lo, mut hi) = (0.0, tp);
    let (mut flo, mut fhi) = (f0, f1);
    loop {
        let best = if flo.abs() <= fhi.abs() { (lo, flo) } else { (hi, fhi) };
        let mid = 0.5 * (lo + hi);
        if (hi - lo <= tol && best.1.abs() <= 1e-8) || mid <= lo || mid >= hi {
            let t = best.0;
            report.status = RootStatus::Found;
            report.t_star = Some(t);
            report.residual = Some(best.1);
            let f = trunc_exp_cdf(t, problem.lambda)?;
            report.core_population = Some(problem.n as f64 * (1.0 - f));
            report.bound_sqrt_n = Some(problem.spread() + problem.domination_term(t));
            return Ok(report);
        }
        let fm = problem.phi(mid)?;
        if fm == 0.0 {
            lo = mid;
            hi = mid;
            flo = 0.0;
            fhi = 0.0;
        } else if fm < 0.0 {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
            fhi = fm;
        }
    }
}

/// Outcome of a domination check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Domination {
    pub dominating: bool,
    /// Nodes outside the core with no hyperedge reaching the core.
    pub undominated: Vec<usize>,
}

/// Whether every node outside `core` shares a hyperedge with a core node.
pub fn is_dominating(h: &Hypergraph, core: &[usize]) -> Result<Domination> {
    let n = h.n();
    let mut in_core = vec![false; n];
    for &v in core {
        if v >= n {
            return Err(Error::invalid(format!("core node {v} out of range for n={n}")));
        }
        in_core[v] = true;
    }
    let mut dominated = in_core.clone();
    for e in h.edges() {
        if e.iter().any(|&v| in_core[v]) {
            for &v in e {
                dominated[v] = true;
            }
        }
    }
    let undominated: Vec<usize> = (0..n).filter(|&v| !dominated[v]).collect();
    Ok(Domination {
        dominating: undominated.is_empty(),
        undominated,
    })
}

/// Smallest rank `t` such that `{v : r_v >= t}` dominates, found by growing the
/// core in decreasing rank order.
pub fn empirical_core_threshold(h: &Hypergraph, r: &RankVector) -> Result<f64> {
    let n = h.n();
    if r.len() != n {
        return Err(Error::invalid(format!("{} ranks for {n} nodes", r.len())));
    }
    let degree = h.degree_vector();
    let isolated: Vec<usize> = (0..n).filter(|&v| degree[v] == 0).collect();
    if n == 0 || !isolated.is_empty() {
        return Err(Error::NotDominable { isolated });
    }
    let incidence = h.incidence();
    let mut in_core = vec![false; n];
    let mut dominated = vec![false; n];
    let mut edge_done = vec![false; h.m()];
    let mut remaining = n;
    for &v in r.order() {
        in_core[v] = true;
        if !dominated[v] {
            dominated[v] = true;
            remaining -= 1;
        }
        for &id in &incidence[v] {
            if edge_done[id] {
                continue;
            }
            edge_done[id] = true;
            for &u in &h.edges()[id] {
                if !dominated[u] {
                    dominated[u] = true;
                    remaining -= 1;
                }
            }
        }
        if remaining == 0 {
            return Ok(r.values()[v]);
        }
    }
    unreachable!("a graph without isolated nodes is dominated by all its nodes")
}

/// One sampled instance compared with the theoretical threshold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalThreshold {
    pub seed: u64,
    pub k: usize,
    pub m: usize,
    /// `None` when the sample has isolated nodes.
    pub empirical: Option<f64>,
    pub t_star: Option<f64>,
    /// Whether `{v : r_v >= t*}` dominates the sample.
    pub core_dominates: Option<bool>,
}

/// Samples single-layer `k`-uniform graphs and measures their empirical core
/// threshold against the root of `Φ`.
pub fn empirical_thresholds(
    n: usize,
    k: usize,
    lambda: f64,
    c: f64,
    seeds: std::ops::Range<u64>,
) -> Result<Vec<EmpiricalThreshold>> {
    let params = ModelParams::single(lambda, c)?;
    let problem = CoreThresholdProblem::new(n, k, lambda, c)?;
    let t_star = solve_core_threshold(&problem, 1e-10)?.t_star;
    let orders = OrderRange::uniform(k)?;
    seeds
        .into_par_iter()
        .map(|seed| {
            let s = sample_hypergraph(n, &params, orders, seed)?;
            let empirical = empirical_core_threshold(&s.hypergraph, &s.ranks).ok();
            let core_dominates = match t_star {
                Some(t) => {
                    let core: Vec<usize> = (0..n).filter(|&v| s.ranks.values()[v] >= t).collect();
                    Some(is_dominating(&s.hypergraph, &core)?.dominating)
                }
                None => None,
            };
            Ok(EmpiricalThreshold {
                seed,
                k,
                m: s.hypergraph.m(),
                empirical,
                t_star,
                core_dominates,
            })
        })
        .collect()
}
