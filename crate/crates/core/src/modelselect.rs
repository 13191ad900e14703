//! Choosing the number of layers and their breakpoints.
//!
//! Degrees sorted in decreasing order look piecewise linear on a log-log
//! plot. The layer count comes from the elbow of the best piecewise-linear
//! fit error as the number of pieces grows; breakpoints then come from a
//! grid search scored by information criteria.

use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cigam::{fit, FitOptions, PriorConfig, RankSource};
use crate::error::{Error, Result};
use crate::hypergraph::{Hypergraph, OrderRange};
use crate::partition::{binomial, LayerConfig};

/// Default largest number of pieces tried.
pub const DEFAULT_L_MAX: usize = 6;
/// Fit errors are floored here before taking logs.
pub const ERROR_FLOOR: f64 = 1e-12;

/// `(log j, log deg_(j))` for degrees sorted decreasingly, positions from 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogLogPoints {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    /// Zero-degree nodes left out.
    pub dropped: usize,
}

impl LogLogPoints {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::invalid("x and y differ in length"));
        }
        Ok(Self { x, y, dropped: 0 })
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }
}

pub fn degree_loglog_points(h: &Hypergraph) -> Result<LogLogPoints> {
    let mut deg = h.degree_vector();
    deg.sort_unstable_by(|a, b| b.cmp(a));
    let positive: Vec<usize> = deg.iter().copied().take_while(|&d| d > 0).collect();
    if positive.is_empty() {
        return Err(Error::invalid("every node has degree zero"));
    }
    Ok(LogLogPoints {
        x: (1..=positive.len()).map(|j| (j as f64).ln()).collect(),
        y: positive.iter().map(|&d| (d as f64).ln()).collect(),
        dropped: deg.len() - positive.len(),
    })
}

/// One least-squares line over points `start..end`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub start: usize,
    pub end: usize,
    pub slope: f64,
    pub intercept: f64,
    pub sse: f64,
}

/// Best fit by `l` independent (possibly discontinuous) lines.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseFit {
    pub l: usize,
    /// First index of every segment after the first.
    pub breakpoints: Vec<usize>,
    pub segments: Vec<Segment>,
    pub error: f64,
}

/// Prefix sums giving the OLS error of any contiguous range in O(1).
struct SegmentCosts {
    sx: Vec<f64>,
    sy: Vec<f64>,
    sxx: Vec<f64>,
    sxy: Vec<f64>,
    syy: Vec<f64>,
}

impl SegmentCosts {
    fn new(p: &LogLogPoints) -> Self {
        let n = p.len();
        let mut c = Self {
            sx: vec![0.0; n + 1],
            sy: vec![0.0; n + 1],
            sxx: vec![0.0; n + 1],
            sxy: vec![0.0; n + 1],
            syy: vec![0.0; n + 1],
        };
        for i in 0..n {
            let (x, y) = (p.x[i], p.y[i]);
            c.sx[i + 1] = c.sx[i] + x;
            c.sy[i + 1] = c.sy[i] + y;
            c.sxx[i + 1] = c.sxx[i] + x * x;
            c.sxy[i + 1] = c.sxy[i] + x * y;
            c.syy[i + 1] = c.syy[i] + y * y;
        }
        c
    }

    fn line(&self, a: usize, b: usize) -> Segment {
        let m = (b - a) as f64;
        let sx = self.sx[b] - self.sx[a];
        let sy = self.sy[b] - self.sy[a];
        let vxx = (self.sxx[b] - self.sxx[a]) - sx * sx / m;
        let vxy = (self.sxy[b] - self.sxy[a]) - sx * sy / m;
        let vyy = (self.syy[b] - self.syy[a]) - sy * sy / m;
        let (slope, sse) = if vxx > 1e-12 * (self.sxx[b] - self.sxx[a]).abs().max(1e-300) {
            (vxy / vxx, vyy - vxy * vxy / vxx)
        } else {
            (0.0, vyy)
        };
        Segment {
            start: a,
            end: b,
            slope,
            intercept: (sy - slope * sx) / m,
            sse: sse.max(0.0),
        }
    }
}

/// Exact optimal fits for every `l` in `1..=l_max`, each segment holding at
/// least two points.
pub fn piecewise_fits(points: &LogLogPoints, l_max: usize) -> Result<Vec<PiecewiseFit>> {
    let n = points.len();
    if l_max == 0 || n < 2 * l_max {
        return Err(Error::invalid(format!(
            "{n} points cannot hold {l_max} segments of two points"
        )));
    }
    let costs = SegmentCosts::new(points);
    // best[l][j]: error of the first j points in l+1 segments
    let mut best = vec![vec![f64::INFINITY; n + 1]; l_max];
    let mut arg = vec![vec![0usize; n + 1]; l_max];
    for j in 2..=n {
        best[0][j] = costs.line(0, j).sse;
    }
    for l in 1..l_max {
        let (done, rest) = best.split_at_mut(l);
        let prev = &done[l - 1];
        let row: Vec<(f64, usize)> = (0..=n)
            .into_par_iter()
            .map(|j| {
                let mut b = (f64::INFINITY, 0);
                if j >= 2 * (l + 1) {
                    for s in 2 * l..=j - 2 {
                        let v = prev[s] + costs.line(s, j).sse;
                        if v < b.0 {
                            b = (v, s);
                        }
                    }
                }
                b
            })
            .collect();
        for (j, (v, s)) in row.into_iter().enumerate() {
            rest[0][j] = v;
            arg[l][j] = s;
        }
    }
    Ok((0..l_max)
        .map(|l| {
            let mut cuts = Vec::with_capacity(l);
            let mut j = n;
            for level in (1..=l).rev() {
                j = arg[level][j];
                cuts.push(j);
            }
            cuts.reverse();
            let mut bounds = vec![0];
            bounds.extend(&cuts);
            bounds.push(n);
            let segments: Vec<Segment> = bounds.windows(2).map(|w| costs.line(w[0], w[1])).collect();
            PiecewiseFit {
                l: l + 1,
                breakpoints: cuts,
                error: segments.iter().map(|s| s.sse).sum(),
                segments,
            }
        })
        .collect())
}

pub fn piecewise_fit(points: &LogLogPoints, l: usize) -> Result<PiecewiseFit> {
    Ok(piecewise_fits(points, l)?.pop().expect("l >= 1"))
}

/// `argmax_{l ∈ [2, L_max − 1]} (log e(l) − log e(l−1)) / (log e(l+1) − log e(l))`
/// where `errors[i]` is the error with `i + 1` pieces. Ties go to the
/// smallest `l`.
pub fn elbow_select(errors: &[f64]) -> Result<usize> {
    if errors.len() < 3 {
        return Err(Error::invalid("elbow selection needs at least three errors"));
    }
    let log: Vec<f64> = errors.iter().map(|e| e.max(ERROR_FLOOR).ln()).collect();
    let mut best: Option<(usize, f64)> = None;
    for l in 2..errors.len() {
        let num = log[l - 1] - log[l - 2];
        let den = log[l] - log[l - 1];
        let ratio = if den != 0.0 {
            num / den
        } else if num == 0.0 {
            1.0
        } else if num < 0.0 {
            f64::INFINITY
        } else {
            f64::NEG_INFINITY
        };
        let better = match best {
            None => true,
            Some((_, b)) if b.is_infinite() => ratio > b,
            Some((_, b)) => ratio > b + 1e-9 * b.abs().max(1.0),
        };
        if better {
            best = Some((l, ratio));
        }
    }
    Ok(best.expect("at least one candidate").0)
}

/// Piecewise errors for `1..=l_max` pieces and the elbow choice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerSelection {
    pub errors: Vec<f64>,
    pub l_pw: usize,
    pub fits: Vec<PiecewiseFit>,
}

pub fn select_layer_count(h: &Hypergraph, l_max: usize) -> Result<LayerSelection> {
    let points = degree_loglog_points(h)?;
    let fits = piecewise_fits(&points, l_max)?;
    let errors: Vec<f64> = fits.iter().map(|f| f.error).collect();
    Ok(LayerSelection { l_pw: elbow_select(&errors)?, errors, fits })
}

/// Increasing breakpoint vectors on the grid `{step, 2 step, …, 1}` ending at 1.
pub fn breakpoint_grid(l: usize, step: f64) -> Result<Vec<Vec<f64>>> {
    let cells_f = 1.0 / step;
    let cells = cells_f.round();
    if !(step > 0.0) || (cells_f - cells).abs() > 1e-9 * cells.max(1.0) || cells < l as f64 || l == 0 {
        return Err(Error::invalid(format!(
            "step {step} does not split [0, 1] into at least {l} cells"
        )));
    }
    let cells = cells as usize;
    let mut out = Vec::new();
    let mut pick: Vec<usize> = (1..l).collect();
    loop {
        let mut h: Vec<f64> = pick.iter().map(|&j| j as f64 / cells as f64).collect();
        h.push(1.0);
        out.push(h);
        // next (l-1)-subset of 1..cells-1
        let k = pick.len();
        let mut p = k;
        while p > 0 && pick[p - 1] == cells - 1 - (k - p) {
            p -= 1;
        }
        if p == 0 {
            break;
        }
        pick[p - 1] += 1;
        for q in p..k {
            pick[q] = pick[q - 1] + 1;
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Criterion {
    Aic,
    Bic,
    Lr,
}

/// One fitted breakpoint candidate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateScore {
    #[serde(rename = "H")]
    pub breakpoints: Vec<f64>,
    pub log_likelihood: f64,
    pub num_params: usize,
    pub aic: f64,
    pub bic: f64,
    /// `2 (LL_best − LL)` against the best candidate of the table.
    pub lr: f64,
    pub lambda: f64,
    pub c: Vec<f64>,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSearch {
    pub candidates: Vec<CandidateScore>,
    pub best: usize,
    pub criterion: Criterion,
    /// Observations used by BIC: the number of candidate edges.
    pub observations: f64,
}

impl GridSearch {
    pub fn best(&self) -> &CandidateScore {
        &self.candidates[self.best]
    }
}

/// Fits every grid candidate and ranks them by `criterion`.
#[allow(clippy::too_many_arguments)]
pub fn breakpoint_grid_search(
    h: &Hypergraph,
    source: RankSource<'_>,
    orders: OrderRange,
    l: usize,
    step: f64,
    priors: &PriorConfig,
    opt: &FitOptions,
    criterion: Criterion,
) -> Result<GridSearch> {
    let grid = breakpoint_grid(l, step)?;
    let theta_params = match source {
        RankSource::Exogenous(_) => 0,
        RankSource::Endogenous(x) => x.cols() + 1,
    };
    let num_params = 1 + l + theta_params;
    let observations: f64 = orders
        .iter()
        .map(|k| binomial(h.n(), k).to_f64().unwrap_or(f64::INFINITY))
        .sum();
    let fits: Vec<Result<CandidateScore>> = grid
        .par_iter()
        .map(|hv| {
            let layers = LayerConfig::new(hv.clone())?;
            let res = fit(h, source, &layers, orders, priors, opt)?;
            let ll = res.log_likelihood();
            let k = num_params as f64;
            Ok(CandidateScore {
                breakpoints: hv.clone(),
                log_likelihood: ll,
                num_params,
                aic: 2.0 * k - 2.0 * ll,
                bic: k * observations.ln() - 2.0 * ll,
                lr: 0.0,
                lambda: res.params.lambda,
                c: res.params.c.clone(),
                converged: res.converged(),
            })
        })
        .collect();
    let mut candidates = fits.into_iter().collect::<Result<Vec<_>>>()?;
    let ll_best = candidates
        .iter()
        .map(|c| c.log_likelihood)
        .fold(f64::NEG_INFINITY, f64::max);
    for c in &mut candidates {
        c.lr = 2.0 * (ll_best - c.log_likelihood);
    }
    let key = |c: &CandidateScore| match criterion {
        Criterion::Aic => c.aic,
        Criterion::Bic => c.bic,
        Criterion::Lr => c.lr,
    };
    let mut best = 0;
    for (i, c) in candidates.iter().enumerate() {
        if key(c) < key(&candidates[best]) {
            best = i;
        }
    }
    Ok(GridSearch { candidates, best, criterion, observations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::RankVector;
    use proptest::prelude::*;

    fn pts(y: Vec<f64>) -> LogLogPoints {
        LogLogPoints::new((1..=y.len()).map(|j| (j as f64).ln()).collect(), y).unwrap()
    }

    /// Minimum over every placement of `l - 1` cuts with segments of length >= 2.
    fn brute_force(p: &LogLogPoints, l: usize) -> f64 {
        let costs = SegmentCosts::new(p);
        fn rec(c: &SegmentCosts, start: usize, n: usize, left: usize) -> f64 {
            if left == 1 {
                return if n - start >= 2 { c.line(start, n).sse } else { f64::INFINITY };
            }
            let mut best = f64::INFINITY;
            for cut in start + 2..=n {
                if n - cut < 2 * (left - 1) {
                    break;
                }
                best = best.min(c.line(start, cut).sse + rec(c, cut, n, left - 1));
            }
            best
        }
        rec(&costs, 0, p.len(), l)
    }

    #[test]
    fn regular_graph_is_flat() {
        let h = Hypergraph::from_edges(4, vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![0, 3]]).unwrap();
        let p = degree_loglog_points(&h).unwrap();
        assert!(p.y.iter().all(|&y| y == 2f64.ln()));
        let f = piecewise_fit(&p, 1).unwrap();
        assert!(f.error < 1e-20);
        assert!(f.segments[0].slope.abs() < 1e-12);
    }

    #[test]
    fn zero_degree_nodes_dropped() {
        let h = Hypergraph::from_edges(5, vec![vec![0, 1], vec![1, 2]]).unwrap();
        let p = degree_loglog_points(&h).unwrap();
        assert_eq!(p.len(), 3);
        assert_eq!(p.dropped, 2);
        assert_eq!(p.y[0], 2f64.ln());
        assert!(degree_loglog_points(&Hypergraph::from_edges(3, vec![]).unwrap()).is_err());
    }

    #[test]
    fn power_law_is_one_line() {
        let p = pts((1..=50).map(|j| 10.0 - 2.0 * (j as f64).ln()).collect());
        let f = piecewise_fit(&p, 1).unwrap();
        assert!(f.error < 1e-18);
        assert!((f.segments[0].slope + 2.0).abs() < 1e-10);
        assert!((f.segments[0].intercept - 10.0).abs() < 1e-10);
    }

    #[test]
    fn single_segment_is_ols() {
        let y = vec![1.0, 3.0, 2.0, 5.0, 4.0];
        let p = pts(y.clone());
        let f = piecewise_fit(&p, 1).unwrap();
        let n = y.len() as f64;
        let mx = p.x.iter().sum::<f64>() / n;
        let my = y.iter().sum::<f64>() / n;
        let sxy: f64 = p.x.iter().zip(&y).map(|(x, y)| (x - mx) * (y - my)).sum();
        let sxx: f64 = p.x.iter().map(|x| (x - mx).powi(2)).sum();
        let slope = sxy / sxx;
        let sse: f64 = p.x.iter().zip(&y).map(|(x, y)| (y - my - slope * (x - mx)).powi(2)).sum();
        assert!((f.error - sse).abs() < 1e-12);
    }

    #[test]
    fn two_lines_recovered() {
        let x: Vec<f64> = (0..20).map(|i| i as f64).collect();
        let y: Vec<f64> = x.iter().map(|&x| if x < 12.0 { 2.0 * x + 1.0 } else { 40.0 - x }).collect();
        let p = LogLogPoints::new(x, y).unwrap();
        let f = piecewise_fit(&p, 2).unwrap();
        assert!(f.error < 1e-18);
        assert_eq!(f.breakpoints, vec![12]);
        assert!(piecewise_fit(&p, 11).is_err());
    }

    #[test]
    fn elbow_examples() {
        assert_eq!(elbow_select(&[100.0, 1.0, 0.99, 0.98]).unwrap(), 2);
        let geometric: Vec<f64> = (0..6).map(|l| 0.1f64.powi(l)).collect();
        assert_eq!(elbow_select(&geometric).unwrap(), 2);
        assert_eq!(elbow_select(&[10.0, 9.0, 1.0, 0.9, 0.85]).unwrap(), 3);
        assert!(elbow_select(&[1.0, 0.5]).is_err());
        // exact fits are floored rather than producing infinities
        assert_eq!(elbow_select(&[5.0, 0.0, 0.0, 0.0]).unwrap(), 2);
    }

    #[test]
    fn grid_examples() {
        assert_eq!(breakpoint_grid(1, 0.5).unwrap(), vec![vec![1.0]]);
        assert_eq!(breakpoint_grid(2, 0.5).unwrap(), vec![vec![0.5, 1.0]]);
        assert_eq!(
            breakpoint_grid(2, 0.25).unwrap(),
            vec![vec![0.25, 1.0], vec![0.5, 1.0], vec![0.75, 1.0]]
        );
        assert_eq!(breakpoint_grid(3, 0.1).unwrap().len(), 36);
        assert!(breakpoint_grid(3, 0.5).is_err());
        assert!(breakpoint_grid(2, 0.3).is_err());
    }

    #[test]
    fn grid_search_ranks_candidates() {
        use crate::sampler::sample_hypergraph;
        use crate::cigam::ModelParams;
        let truth = ModelParams::new(2.0, vec![1.5, 3.0], LayerConfig::new(vec![0.5, 1.0]).unwrap()).unwrap();
        let orders = OrderRange::uniform(2).unwrap();
        let s = sample_hypergraph(60, &truth, orders, 4).unwrap();
        let opt = FitOptions { epochs: 3, ..Default::default() };
        let r: RankVector = s.ranks.clone();
        let res = breakpoint_grid_search(
            &s.hypergraph,
            RankSource::Exogenous(&r),
            orders,
            2,
            0.25,
            &PriorConfig::none(),
            &opt,
            Criterion::Aic,
        )
        .unwrap();
        assert_eq!(res.candidates.len(), 3);
        let best = res.best();
        assert_eq!(best.lr, 0.0);
        assert!(res.candidates.iter().all(|c| c.aic >= best.aic && c.num_params == 3));
        assert_eq!(res.observations, 1770.0);
        let bic = breakpoint_grid_search(
            &s.hypergraph,
            RankSource::Exogenous(&r),
            orders,
            2,
            0.25,
            &PriorConfig::none(),
            &opt,
            Criterion::Bic,
        )
        .unwrap();
        assert_eq!(bic.candidates, res.candidates);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn dp_matches_brute_force(y in proptest::collection::vec(-5.0f64..5.0, 6..=20)) {
            let p = pts(y);
            let fits = piecewise_fits(&p, 3).unwrap();
            for f in &fits {
                let b = brute_force(&p, f.l);
                prop_assert!((f.error - b).abs() <= 1e-9 * b.max(1.0));
                let seg_total: usize = f.segments.iter().map(|s| s.end - s.start).sum();
                prop_assert_eq!(seg_total, p.len());
            }
            for w in fits.windows(2) {
                prop_assert!(w[1].error <= w[0].error + 1e-9);
            }
        }

        #[test]
        fn elbow_scale_invariant(e in proptest::collection::vec(1e-3f64..1e3, 3..8), s in 1e-3f64..1e3) {
            let scaled: Vec<f64> = e.iter().map(|v| v * s).collect();
            prop_assert_eq!(elbow_select(&e).unwrap(), elbow_select(&scaled).unwrap());
        }

        #[test]
        fn grid_count_is_binomial(l in 1usize..5, cells in 1usize..12) {
            prop_assume!(cells >= l);
            let g = breakpoint_grid(l, 1.0 / cells as f64).unwrap();
            prop_assert_eq!(BigUintEq(g.len()), BigUintEq(binomial(cells - 1, l - 1).to_usize().unwrap()));
            prop_assert!(g.iter().all(|h| h.windows(2).all(|w| w[0] < w[1]) && *h.last().unwrap() == 1.0));
        }
    }

    #[derive(Debug, PartialEq)]
    struct BigUintEq(usize);
}
