use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::{
    gradient_at, log_objective, theta_gradient, ModelParams, ParamGradient, PriorConfig, RankMap,
    DEFAULT_GAMMA, ZETA,
};
use crate::error::{Error, Result};
use crate::hypergraph::{FeatureMatrix, Hypergraph, OrderRange};
use crate::partition::{LayerConfig, PartitionStats, Partitioner, RankVector};

const MAX_HALVINGS: usize = 50;
const LAMBDA_FLOOR: f64 = 1e-6;
const ARMIJO: f64 = 1e-4;
const MAX_STEP: f64 = 1e3;

/// Where the ranks come from.
#[derive(Debug, Clone, Copy)]
pub enum RankSource<'a> {
    /// Fixed, observed ranks.
    Exogenous(&'a RankVector),
    /// Ranks learned as `σ(wᵀx + b)` from node features.
    Endogenous(&'a FeatureMatrix),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FitOptions {
    /// Initial step size of every parameter block.
    pub step: f64,
    pub epochs: usize,
    /// Full gradient steps per epoch.
    pub steps_per_epoch: usize,
    /// Stop once every gradient coordinate is below this in absolute value.
    pub tol: f64,
    pub gamma: f64,
    /// Seeds the initial rank map in endogenous mode.
    pub seed: u64,
    pub init_lambda: Option<f64>,
    pub init_c: Option<Vec<f64>>,
    pub init_theta: Option<RankMap>,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            step: 1e-3,
            epochs: 10,
            steps_per_epoch: 100,
            tol: 1e-6,
            gamma: DEFAULT_GAMMA,
            seed: 0,
            init_lambda: None,
            init_c: None,
            init_theta: None,
        }
    }
}

impl FitOptions {
    fn validate(&self) -> Result<()> {
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(Error::invalid(format!("step = {} must be positive", self.step)));
        }
        if !(self.tol >= 0.0 && self.gamma >= 0.0) {
            return Err(Error::invalid("tol and gamma must be nonnegative"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "reason", content = "detail", rename_all = "kebab-case")]
pub enum StopReason {
    Converged,
    /// No block could make progress; the iterate is stationary to working precision.
    Stalled,
    Budget,
    Aborted(String),
}

#[derive(Debug, Clone)]
pub struct FitResult {
    pub params: ModelParams,
    pub theta: Option<RankMap>,
    pub ranks: RankVector,
    /// Log-likelihood after initialization and after every iteration.
    pub ll_trace: Vec<f64>,
    /// Log-likelihood + barrier + prior, same indexing as `ll_trace`.
    pub objective_trace: Vec<f64>,
    pub iterations: usize,
    pub stop: StopReason,
    pub final_gradient: ParamGradient,
}

impl FitResult {
    pub fn log_likelihood(&self) -> f64 {
        *self.ll_trace.last().expect("trace holds the initial value")
    }

    pub fn converged(&self) -> bool {
        matches!(self.stop, StopReason::Converged | StopReason::Stalled)
    }

    /// Whether the maximized objective never decreased.
    pub fn is_monotone(&self) -> bool {
        self.objective_trace.windows(2).all(|w| w[1] >= w[0])
    }
}

/// Backtracking search from the block's current step size. `eval(s)` returns
/// the objective at step `s`, or `None` when the trial point is infeasible.
fn line_search<T>(
    step: &mut f64,
    current: f64,
    slope: f64,
    armijo: f64,
    mut eval: impl FnMut(f64) -> Option<(f64, T)>,
) -> Option<(f64, T)> {
    let mut s = *step;
    for _ in 0..=MAX_HALVINGS {
        if let Some((value, payload)) = eval(s) {
            if value.is_finite() && value >= current + armijo * s * slope {
                *step = (2.0 * s).min(MAX_STEP);
                return Some((value, payload));
            }
        }
        s *= 0.5;
    }
    *step *= 0.5;
    None
}

fn density_init(stats: &PartitionStats) -> Vec<f64> {
    let num_layers = stats.num_layers();
    let mut c = Vec::with_capacity(num_layers);
    for l in 0..num_layers {
        let (mut pos, mut tot) = (0.0, 0.0);
        for i in 0..stats.n() {
            let s = stats.s(i, l) as f64;
            pos += s;
            tot += s + stats.s_bar_f64(i, l);
        }
        let p = if tot > 0.0 { (pos / tot).clamp(1e-12, 0.9) } else { 0.5 };
        // p = c^(-1.5) at a mid-range rank
        let mut v = p.powf(-1.0 / 1.5);
        let floor = c.last().map_or(1.01, |prev: &f64| prev + 0.01);
        if v < floor {
            v = floor;
        }
        c.push(v);
    }
    c
}

fn initial_theta(d: usize, seed: u64) -> RankMap {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, 0.01).expect("valid normal");
    RankMap {
        w: (0..d).map(|_| normal.sample(&mut rng)).collect(),
        b: 0.0,
    }
}

struct State {
    params: ModelParams,
    theta: Option<RankMap>,
    ranks: RankVector,
    stats: PartitionStats,
    ll: f64,
    objective: f64,
}

/// Maximum-likelihood (or MAP) fit by block-coordinate gradient ascent with
/// backtracking.
///
/// Blocks are `λ`, each `c_l`, and in endogenous mode the rank map `θ`. Every
/// block keeps its own step size, halved until the trial point is feasible and
/// ascends, and doubled after an accepted step. Partition statistics are
/// rebuilt for every trial `θ` since the rank order changes.
pub fn fit(
    h: &Hypergraph,
    source: RankSource<'_>,
    layers: &LayerConfig,
    orders: OrderRange,
    priors: &PriorConfig,
    opts: &FitOptions,
) -> Result<FitResult> {
    priors.validate()?;
    opts.validate()?;
    let gamma = opts.gamma;
    let partitioner = Partitioner::new(h.n(), orders, layers.clone());

    let theta = match source {
        RankSource::Exogenous(r) => {
            if r.len() != h.n() {
                return Err(Error::invalid(format!("{} ranks for {} nodes", r.len(), h.n())));
            }
            None
        }
        RankSource::Endogenous(x) => {
            if x.rows() != h.n() {
                return Err(Error::invalid(format!("{} feature rows for {} nodes", x.rows(), h.n())));
            }
            Some(
                opts.init_theta
                    .clone()
                    .unwrap_or_else(|| initial_theta(x.cols(), opts.seed)),
            )
        }
    };
    let ranks = match (source, &theta) {
        (RankSource::Endogenous(x), Some(map)) => map.rank_vector(x)?,
        (RankSource::Exogenous(r), _) => r.clone(),
        _ => unreachable!(),
    };
    let stats = partitioner.build(h, &ranks)?;
    let params = ModelParams::new(
        opts.init_lambda.unwrap_or(1.0),
        opts.init_c.clone().unwrap_or_else(|| density_init(&stats)),
        layers.clone(),
    )?;
    let (ll, objective) = log_objective(&stats, stats.sorted_ranks(), &params, priors, gamma)?;
    let mut st = State {
        params,
        theta,
        ranks,
        stats,
        ll,
        objective,
    };

    let num_layers = layers.num_layers();
    let mut step_lambda = opts.step;
    let mut step_c = vec![opts.step; num_layers];
    let mut step_theta = opts.step;
    let mut ll_trace = vec![st.ll];
    let mut objective_trace = vec![st.objective];
    let budget = opts.epochs * opts.steps_per_epoch;
    let mut stop = StopReason::Budget;
    let mut iterations = 0;

    let objective_at = |stats: &PartitionStats, p: &ModelParams| -> Option<(f64, f64)> {
        if !p.is_feasible() || p.lambda < LAMBDA_FLOOR {
            return None;
        }
        log_objective(stats, stats.sorted_ranks(), p, priors, gamma).ok()
    };

    'outer: for _ in 0..budget {
        let mut moved = false;

        let g = match checked_gradient(&st, priors, gamma) {
            Ok(g) => g,
            Err(msg) => {
                stop = StopReason::Aborted(msg);
                break 'outer;
            }
        };
        let accepted = line_search(&mut step_lambda, st.objective, g.lambda * g.lambda, ARMIJO, |s| {
            let mut p = st.params.clone();
            p.lambda += s * g.lambda;
            objective_at(&st.stats, &p).map(|(ll, obj)| (obj, (p, ll)))
        });
        if let Some((obj, (p, ll))) = accepted {
            st.params = p;
            st.ll = ll;
            st.objective = obj;
            moved = true;
        }

        for l in 0..num_layers {
            let g = match checked_gradient(&st, priors, gamma) {
                Ok(g) => g.c[l],
                Err(msg) => {
                    stop = StopReason::Aborted(msg);
                    break 'outer;
                }
            };
            let accepted = line_search(&mut step_c[l], st.objective, g * g, ARMIJO, |s| {
                let mut p = st.params.clone();
                p.c[l] += s * g;
                objective_at(&st.stats, &p).map(|(ll, obj)| (obj, (p, ll)))
            });
            if let Some((obj, (p, ll))) = accepted {
                st.params = p;
                st.ll = ll;
                st.objective = obj;
                moved = true;
            }
        }

        if let (RankSource::Endogenous(x), Some(map)) = (source, st.theta.clone()) {
            let (gw, gb) = theta_gradient(&st.stats, x, &map, &st.params, gamma)?;
            if !(gb.is_finite() && gw.iter().all(|v| v.is_finite())) {
                stop = StopReason::Aborted("non-finite rank-map gradient".into());
                break 'outer;
            }
            let slope = gb * gb + gw.iter().map(|v| v * v).sum::<f64>();
            // counts jump when the order changes, so only ask for non-decrease
            let accepted = line_search(&mut step_theta, st.objective, slope, 0.0, |s| {
                let trial = RankMap {
                    w: map.w.iter().zip(&gw).map(|(w, g)| w + s * g).collect(),
                    b: map.b + s * gb,
                };
                let ranks = trial.rank_vector(x).ok()?;
                let stats = partitioner.build(h, &ranks).ok()?;
                let (ll, obj) = objective_at(&stats, &st.params)?;
                Some((obj, (trial, ranks, stats, ll)))
            });
            if let Some((obj, (trial, ranks, stats, ll))) = accepted {
                moved = moved || obj > st.objective;
                st.theta = Some(trial);
                st.ranks = ranks;
                st.stats = stats;
                st.ll = ll;
                st.objective = obj;
            }
        }

        iterations += 1;
        ll_trace.push(st.ll);
        objective_trace.push(st.objective);

        let g = match checked_gradient(&st, priors, gamma) {
            Ok(g) => g,
            Err(msg) => {
                stop = StopReason::Aborted(msg);
                break;
            }
        };
        let theta_small = match (source, &st.theta) {
            (RankSource::Endogenous(x), Some(map)) => {
                let (gw, gb) = theta_gradient(&st.stats, x, map, &st.params, gamma)?;
                gw.iter().fold(gb.abs(), |m, v| m.max(v.abs())) <= opts.tol
            }
            _ => true,
        };
        if projected_max_abs(&g, &st.params) <= opts.tol && theta_small {
            stop = StopReason::Converged;
            break;
        }
        if !moved {
            stop = StopReason::Stalled;
            break;
        }
    }

    let final_gradient = gradient_at(&st.stats, st.stats.sorted_ranks(), &st.params, priors, gamma)
        .unwrap_or(ParamGradient {
            lambda: f64::NAN,
            c: vec![f64::NAN; num_layers],
        });
    Ok(FitResult {
        params: st.params,
        theta: st.theta,
        ranks: st.ranks,
        ll_trace,
        objective_trace,
        iterations,
        stop,
        final_gradient,
    })
}

/// Largest gradient coordinate, ignoring a `λ` pinned at its floor by a
/// gradient pointing out of the domain.
fn projected_max_abs(g: &ParamGradient, p: &ModelParams) -> f64 {
    let at_floor = p.lambda <= LAMBDA_FLOOR * (1.0 + 1e-6) && g.lambda < 0.0;
    let lam = if at_floor { 0.0 } else { g.lambda.abs() };
    g.c.iter().fold(lam, |m, v| m.max(v.abs()))
}

fn checked_gradient(
    st: &State,
    priors: &PriorConfig,
    gamma: f64,
) -> std::result::Result<ParamGradient, String> {
    match gradient_at(&st.stats, st.stats.sorted_ranks(), &st.params, priors, gamma) {
        Ok(g) if g.is_finite() => Ok(g),
        Ok(_) => Err("non-finite gradient".into()),
        Err(e) => Err(e.to_string()),
    }
}

/// Rank-map parameters as written to a model file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThetaReport {
    pub w: Vec<f64>,
    pub b: f64,
    pub feature_names: Vec<String>,
}

/// Serialized form of a fitted model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FittedModel {
    pub lambda: f64,
    pub c: Vec<f64>,
    #[serde(rename = "H")]
    pub breakpoints: Vec<f64>,
    pub zeta: f64,
    pub rank_source: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<ThetaReport>,
    #[serde(default)]
    pub label_map_ref: Option<String>,
    pub ll_trace: Vec<f64>,
    #[serde(default)]
    pub log_likelihood: f64,
    #[serde(default)]
    pub iterations: usize,
    #[serde(default)]
    pub converged: bool,
}

impl FittedModel {
    pub fn from_fit(
        res: &FitResult,
        feature_names: Option<&[String]>,
        label_map_ref: Option<String>,
    ) -> Self {
        let theta = res.theta.as_ref().map(|t| ThetaReport {
            w: t.w.clone(),
            b: t.b,
            feature_names: feature_names.map(<[String]>::to_vec).unwrap_or_default(),
        });
        Self {
            lambda: res.params.lambda,
            c: res.params.c.clone(),
            breakpoints: res.params.layers.breakpoints().to_vec(),
            zeta: ZETA,
            rank_source: if theta.is_some() { "endogenous" } else { "exogenous" }.into(),
            theta,
            label_map_ref,
            ll_trace: res.ll_trace.clone(),
            log_likelihood: res.log_likelihood(),
            iterations: res.iterations,
            converged: res.converged(),
        }
    }

    pub fn params(&self) -> Result<ModelParams> {
        ModelParams::new(self.lambda, self.c.clone(), LayerConfig::new(self.breakpoints.clone())?)
    }

    pub fn rank_map(&self) -> Option<RankMap> {
        self.theta.as_ref().map(|t| RankMap {
            w: t.w.clone(),
            b: t.b,
        })
    }
}
