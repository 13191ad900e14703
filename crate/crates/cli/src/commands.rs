//! Subcommand implementations.

use std::collections::HashMap;
use std::io::Write;

use anyhow::{anyhow, bail, Context, Result};
use serde::Serialize;
use serde_json::json;

use cigam::baselines::{
    logistic_cp_fit, permutation_from_scores, rank_correlation, spearman, LogisticFitOptions,
    NegativeBatch, PermutationMode, PermutationModel,
};
use cigam::cigam::{fit as fit_model, log_likelihood, StopReason};
use cigam::coresize::{empirical_thresholds, phi_curve, solve_core_threshold, CoreThresholdProblem};
use cigam::hypergraph::{
    degree_threshold_filter, k_core_filter, largest_connected_component, normalize_features,
    project_to_graph, read_edge_list, read_feature_csv, read_simplicial, write_edge_list,
    write_label_map, LoadOptions,
};
use cigam::modelselect::{
    breakpoint_grid_search, degree_loglog_points, elbow_select, piecewise_fits, Criterion,
    GridSearch,
};
use cigam::sampler::{non_edge_counts, sample_hypergraph};
use num_traits::ToPrimitive;
use cigam::{
    CPrior, FeatureMatrix, FitOptions, FittedModel, GammaPrior, Hypergraph, LayerConfig,
    ModelParams, Normalization, OrderRange, PartitionStats, PriorConfig, RankSource, RankVector,
    RngStream,
};

use crate::args::*;
use crate::output::{num, open, read_json, OutDir, RunInfo};

const LABELS: &str = "labels.csv";

fn load_graph(input: &GraphInput) -> Result<Hypergraph> {
    let opts = LoadOptions { strict: input.strict };
    let h = match (&input.edges, &input.nverts, &input.simplices) {
        (Some(path), _, _) => read_edge_list(open(path)?, opts)
            .with_context(|| format!("loading {}", path.display()))?,
        (None, Some(nv), Some(sx)) => read_simplicial(open(nv)?, open(sx)?, opts)
            .with_context(|| format!("loading {} and {}", nv.display(), sx.display()))?,
        _ => bail!("no hypergraph input given"),
    };
    Ok(h)
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<T>()
                .map_err(|_| anyhow!("invalid {what} '{t}'"))
        })
        .collect()
}

/// `2`, `2,3` or `2,3,4`; the orders must be contiguous.
fn parse_orders(spec: Option<&str>, h: Option<&Hypergraph>) -> Result<OrderRange> {
    let Some(spec) = spec else {
        return h
            .and_then(Hypergraph::order_range)
            .ok_or_else(|| anyhow!("cannot infer edge orders from an empty graph"));
    };
    let mut ks: Vec<usize> = parse_list(spec, "edge order")?;
    ks.sort_unstable();
    ks.dedup();
    let (lo, hi) = (ks[0], *ks.last().unwrap());
    if hi - lo + 1 != ks.len() {
        bail!("edge orders {spec} are not contiguous");
    }
    Ok(OrderRange::new(lo, hi)?)
}

fn parse_priors(opt: &OptimizerArgs) -> Result<PriorConfig> {
    let c_prior = match opt.c_prior.split_once(':') {
        None if opt.c_prior == "none" => CPrior::None,
        Some(("exponential", a)) => CPrior::Exponential { alpha: a.parse()? },
        Some(("pareto", a)) => CPrior::Pareto { alpha: a.parse()? },
        _ => bail!("unknown c prior '{}'", opt.c_prior),
    };
    let lambda_prior = match &opt.lambda_prior {
        None => None,
        Some(s) => {
            let v: Vec<f64> = parse_list(s, "gamma prior parameter")?;
            if v.len() != 2 {
                bail!("lambda prior needs SHAPE,RATE");
            }
            Some(GammaPrior { shape: v[0], rate: v[1] })
        }
    };
    let p = PriorConfig { c_prior, lambda_prior };
    p.validate()?;
    Ok(p)
}

fn fit_options(opt: &OptimizerArgs) -> FitOptions {
    FitOptions {
        step: opt.step,
        epochs: opt.epochs,
        steps_per_epoch: opt.steps_per_epoch,
        tol: opt.tol,
        seed: opt.seed,
        ..FitOptions::default()
    }
}

fn criterion(c: CriterionArg) -> Criterion {
    match c {
        CriterionArg::Aic => Criterion::Aic,
        CriterionArg::Bic => Criterion::Bic,
        CriterionArg::Lr => Criterion::Lr,
    }
}

fn normalization(mode: Option<NormalizeMode>, default: Normalization) -> Normalization {
    match mode {
        None => default,
        Some(NormalizeMode::Raw) => Normalization::Raw,
        Some(NormalizeMode::Log1pMinmax) => Normalization::Log1pMinMax,
        Some(NormalizeMode::Zscore) => Normalization::ZScore,
    }
}

/// Reads a `node,rank` CSV keyed by node label.
fn read_ranks(path: &std::path::Path, h: &Hypergraph) -> Result<RankVector> {
    let mut rdr = csv::Reader::from_reader(open(path)?);
    let mut by_label = HashMap::new();
    for rec in rdr.records() {
        let rec = rec?;
        if rec.len() < 2 {
            bail!("{}: expected node,rank rows", path.display());
        }
        let r: f64 = rec[1]
            .trim()
            .parse()
            .map_err(|_| anyhow!("{}: '{}' is not a number", path.display(), &rec[1]))?;
        by_label.insert(rec[0].trim().to_owned(), r);
    }
    let values = h
        .labels()
        .iter()
        .map(|l| {
            by_label
                .get(l)
                .copied()
                .ok_or_else(|| anyhow!("{}: no rank for node '{l}'", path.display()))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(RankVector::new(values)?)
}

fn read_features(ri: &RankInput, h: &Hypergraph, default: Normalization) -> Result<Option<FeatureMatrix>> {
    let Some(path) = &ri.features else {
        return Ok(None);
    };
    let raw = read_feature_csv(open(path)?, h).with_context(|| format!("reading {}", path.display()))?;
    Ok(Some(normalize_features(&raw, normalization(ri.normalize, default))?))
}

/// Exogenous ranks from a ranks file, a feature column, or node degrees.
fn exogenous_ranks(ri: &RankInput, h: &Hypergraph) -> Result<(RankVector, String)> {
    if let Some(path) = &ri.ranks_file {
        return Ok((read_ranks(path, h)?, format!("ranks file {}", path.display())));
    }
    match read_features(ri, h, Normalization::Log1pMinMax)? {
        Some(x) => {
            let col = match &ri.rank_column {
                Some(name) => x
                    .column_index(name)
                    .ok_or_else(|| anyhow!("no feature column '{name}'"))?,
                None if x.cols() == 1 => 0,
                None => bail!("{} feature columns; choose one with --rank-column", x.cols()),
            };
            Ok((RankVector::new(x.column(col))?, format!("feature {}", x.names()[col])))
        }
        None => {
            let deg: Vec<f64> = h.degree_vector().iter().map(|&d| d as f64).collect();
            let x = FeatureMatrix::new(h.n(), 1, deg)?;
            let x = normalize_features(&x, normalization(ri.normalize, Normalization::Log1pMinMax))?;
            Ok((RankVector::new(x.column(0))?, "degree".into()))
        }
    }
}

fn endogenous_features(ri: &RankInput, h: &Hypergraph) -> Result<FeatureMatrix> {
    read_features(ri, h, Normalization::ZScore)?
        .ok_or_else(|| anyhow!("endogenous ranks need --features"))
}

fn write_graph(out: &mut OutDir, h: &Hypergraph) -> Result<()> {
    let mut w = out.file("edges.txt")?;
    write_edge_list(h, &mut w)?;
    w.flush()?;
    let mut w = out.file(LABELS)?;
    write_label_map(h, &mut w)?;
    w.flush()?;
    Ok(())
}

fn write_ranks(out: &mut OutDir, name: &str, h: &Hypergraph, ranks: &[f64]) -> Result<()> {
    let mut w = out.csv(name)?;
    w.write_record(["node", "rank"])?;
    for (v, r) in ranks.iter().enumerate() {
        w.write_record([h.label(v), &num(*r)])?;
    }
    w.flush()?;
    Ok(())
}

fn print_json<T: Serialize>(value: &T) -> Result<()> {
    println!("{}", serde_json::to_string(value)?);
    Ok(())
}

pub fn preprocess(a: &PreprocessArgs) -> Result<RunInfo> {
    let mut h = load_graph(&a.input)?;
    let mut steps = vec![json!({ "step": "load", "n": h.n(), "m": h.m() })];
    for step in a.filters.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        h = match step.split_once('=') {
            // loading already keeps each hyperedge once
            None if step == "dedup" => h,
            None if step == "lcc" => largest_connected_component(&h),
            None if step == "project" => project_to_graph(&h),
            Some(("degmin", d)) => degree_threshold_filter(&h, d.parse()?)?,
            Some(("kcore", d)) => k_core_filter(&h, d.parse()?)?,
            _ => bail!("unknown filter '{step}'"),
        };
        steps.push(json!({ "step": step, "n": h.n(), "m": h.m() }));
    }
    let mut out = OutDir::create(&a.out)?;
    write_graph(&mut out, &h)?;
    let orders = h.order_range();
    let summary = json!({
        "n": h.n(),
        "m": h.m(),
        "k_min": orders.map(|o| o.min()),
        "k_max": orders.map(|o| o.max()),
        "steps": steps,
    });
    out.json("summary.json", &summary)?;
    print_json(&summary)?;
    Ok(out.info)
}

fn write_grid(out: &mut OutDir, grid: &GridSearch) -> Result<()> {
    let mut w = out.csv("grid.csv")?;
    w.write_record(["H", "log_likelihood", "num_params", "aic", "bic", "lr", "lambda", "c", "converged"])?;
    for c in &grid.candidates {
        let join = |v: &[f64]| v.iter().map(|x| num(*x)).collect::<Vec<_>>().join(";");
        w.write_record([
            join(&c.breakpoints),
            num(c.log_likelihood),
            c.num_params.to_string(),
            num(c.aic),
            num(c.bic),
            num(c.lr),
            num(c.lambda),
            join(&c.c),
            c.converged.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn fit(a: &FitArgs) -> Result<RunInfo> {
    let h = load_graph(&a.input)?;
    let orders = parse_orders(a.k.as_deref(), Some(&h))?;
    let priors = parse_priors(&a.opt)?;
    let opts = fit_options(&a.opt);
    let exo;
    let x;
    let (source, rank_origin, names) = match a.ranks {
        RankMode::Exogenous => {
            let (r, origin) = exogenous_ranks(&a.rank_input, &h)?;
            exo = r;
            (RankSource::Exogenous(&exo), origin, None)
        }
        RankMode::Endogenous => {
            x = endogenous_features(&a.rank_input, &h)?;
            (RankSource::Endogenous(&x), "features".to_string(), Some(x.names().to_vec()))
        }
    };
    let mut out = OutDir::create(&a.out)?;
    let layers = if a.breakpoints.trim() == "auto" {
        let points = degree_loglog_points(&h)?;
        let l_max = a.l_max.min(points.len() / 2);
        let fits = piecewise_fits(&points, l_max)?;
        let errors: Vec<f64> = fits.iter().map(|f| f.error).collect();
        let l_pw = elbow_select(&errors)?;
        let grid = breakpoint_grid_search(&h, source, orders, l_pw, a.grid_step, &priors, &opts, criterion(a.criterion))?;
        write_grid(&mut out, &grid)?;
        out.json("selection.json", &json!({ "pwerr": errors, "l_pw": l_pw, "H": grid.best().breakpoints }))?;
        LayerConfig::new(grid.best().breakpoints.clone())?
    } else {
        LayerConfig::new(parse_list(&a.breakpoints, "breakpoint")?)?
    };
    let res = fit_model(&h, source, &layers, orders, &priors, &opts)?;
    if let StopReason::Aborted(msg) = &res.stop {
        bail!("optimizer aborted: {msg}");
    }
    let model = FittedModel::from_fit(&res, names.as_deref(), Some(LABELS.into()));
    write_graph_labels(&mut out, &h)?;
    out.json("model.json", &model)?;
    write_ranks(&mut out, "ranks.csv", &h, res.ranks.values())?;
    let mut w = out.csv("trace.csv")?;
    w.write_record(["iteration", "log_likelihood", "objective"])?;
    for (i, (ll, obj)) in res.ll_trace.iter().zip(&res.objective_trace).enumerate() {
        w.write_record([i.to_string(), num(*ll), num(*obj)])?;
    }
    w.flush()?;
    print_json(&json!({
        "lambda": model.lambda,
        "c": model.c,
        "H": model.breakpoints,
        "log_likelihood": model.log_likelihood,
        "iterations": model.iterations,
        "converged": model.converged,
        "stop": res.stop,
        "rank_source": model.rank_source,
        "rank_origin": rank_origin,
    }))?;
    Ok(out.info)
}

fn write_graph_labels(out: &mut OutDir, h: &Hypergraph) -> Result<()> {
    let mut w = out.file(LABELS)?;
    write_label_map(h, &mut w)?;
    w.flush()?;
    Ok(())
}

pub fn sample(a: &SampleArgs) -> Result<RunInfo> {
    let orders = parse_orders(Some(&a.k), None)?;
    let layers = LayerConfig::new(parse_list(&a.breakpoints, "breakpoint")?)?;
    let params = ModelParams::new(a.lambda, parse_list(&a.c, "density parameter")?, layers)?;
    let s = sample_hypergraph(a.n, &params, orders, a.seed)?;
    let mut out = OutDir::create(&a.out)?;
    let mut w = out.file("edges.txt")?;
    write_edge_list(&s.hypergraph, &mut w)?;
    w.flush()?;
    write_ranks(&mut out, "ranks.csv", &s.hypergraph, s.ranks.values())?;
    let summary = json!({
        "n": a.n,
        "m": s.hypergraph.m(),
        "m_by_order": orders.iter().zip(s.hypergraph.edge_counts_by_order(orders)).collect::<Vec<_>>(),
        "isolated_nodes": s.hypergraph.degree_vector().iter().filter(|&&d| d == 0).count(),
        "approximate_blocks": s.approximations,
    });
    out.json("sample.json", &summary)?;
    print_json(&summary)?;
    Ok(out.info)
}

/// Ranks a fitted model is evaluated at.
fn model_ranks(model: &FittedModel, ri: &RankInput, h: &Hypergraph) -> Result<(RankVector, Option<FeatureMatrix>)> {
    match model.rank_map() {
        Some(map) => {
            let x = endogenous_features(ri, h)?;
            if x.cols() != map.dim() {
                bail!("model expects {} features, found {}", map.dim(), x.cols());
            }
            Ok((map.rank_vector(&x)?, Some(x)))
        }
        None => Ok((exogenous_ranks(ri, h)?.0, None)),
    }
}

pub fn loglik(a: &LoglikArgs) -> Result<RunInfo> {
    let h = load_graph(&a.input)?;
    let model: FittedModel = read_json(&a.model)?;
    let params = model.params()?;
    let orders = parse_orders(a.k.as_deref(), Some(&h))?;
    let (r, _) = model_ranks(&model, &a.rank_input, &h)?;
    let stats = PartitionStats::build(&h, &r, &params.layers, orders)?;
    let ll = log_likelihood(&stats, &params)?;
    let mut out = OutDir::create(&a.out)?;
    let report = json!({ "log_likelihood": ll, "n": h.n(), "m": h.m(), "k_min": orders.min(), "k_max": orders.max() });
    out.json("loglik.json", &report)?;
    print_json(&report)?;
    Ok(out.info)
}

pub fn core_threshold(a: &CoreThresholdArgs) -> Result<RunInfo> {
    let problem = CoreThresholdProblem::new(a.n, a.k, a.lambda, a.c_l)?;
    if !problem.guarantee() {
        eprintln!("warning: parameters outside 1 < cL < e^lambda, lambda < ln(n/72)/4; the threshold carries no guarantee");
    }
    let mut out = OutDir::create(&a.out)?;
    let curve = phi_curve(&problem, a.points)?;
    let mut w = out.csv("phi.csv")?;
    w.write_record(["t", "Phi", "F", "capacityTerm"])?;
    for p in &curve {
        w.write_record([num(p.t), num(p.phi), num(p.f), num(p.capacity_term)])?;
    }
    w.flush()?;
    let report = solve_core_threshold(&problem, a.tol)?;
    out.json("summary.json", &report)?;
    let mut w = out.csv("threshold.csv")?;
    w.write_record(["n", "k", "lambda", "cL", "t_star", "t_prime", "core_population", "bound_sqrt_n", "guarantee"])?;
    w.write_record([
        a.n.to_string(),
        a.k.to_string(),
        num(a.lambda),
        num(a.c_l),
        report.t_star.map(num).unwrap_or_default(),
        num(report.t_prime),
        report.core_population.map(num).unwrap_or_default(),
        report.bound_sqrt_n.map(num).unwrap_or_default(),
        report.guarantee.to_string(),
    ])?;
    w.flush()?;
    if a.samples > 0 {
        let rows = empirical_thresholds(a.n, a.k, a.lambda, a.c_l, a.seed..a.seed + a.samples)?;
        let mut w = out.csv("empirical.csv")?;
        w.write_record(["seed", "k", "m", "empirical", "t_star", "core_dominates"])?;
        let opt = |v: Option<f64>| v.map(num).unwrap_or_default();
        for r in rows {
            w.write_record([
                r.seed.to_string(),
                r.k.to_string(),
                r.m.to_string(),
                opt(r.empirical),
                opt(r.t_star),
                r.core_dominates.map(|b| b.to_string()).unwrap_or_default(),
            ])?;
        }
        w.flush()?;
    }
    print_json(&report)?;
    Ok(out.info)
}

pub fn select_layers(a: &SelectLayersArgs) -> Result<RunInfo> {
    let h = load_graph(&a.input)?;
    let points = degree_loglog_points(&h)?;
    let l_max = a.l_max.min(points.len() / 2);
    let fits = piecewise_fits(&points, l_max)?;
    let errors: Vec<f64> = fits.iter().map(|f| f.error).collect();
    let l_pw = elbow_select(&errors)?;
    let mut out = OutDir::create(&a.out)?;
    let mut w = out.csv("degree_points.csv")?;
    w.write_record(["position", "log_position", "log_degree"])?;
    for (j, (x, y)) in points.x.iter().zip(&points.y).enumerate() {
        w.write_record([(j + 1).to_string(), num(*x), num(*y)])?;
    }
    w.flush()?;
    let mut w = out.csv("pwerr.csv")?;
    w.write_record(["l", "pwerr", "breakpoints"])?;
    for f in &fits {
        let cuts: Vec<String> = f.breakpoints.iter().map(|c| c.to_string()).collect();
        w.write_record([f.l.to_string(), num(f.error), cuts.join(";")])?;
    }
    w.flush()?;
    let mut selection = json!({
        "l_pw": l_pw,
        "pwerr": errors,
        "dropped_zero_degree": points.dropped,
        "segments": "independent least-squares lines, possibly discontinuous",
        "fits": fits,
    });
    if !a.no_grid {
        let orders = parse_orders(a.k.as_deref(), Some(&h))?;
        let priors = parse_priors(&a.opt)?;
        let opts = fit_options(&a.opt);
        let exo;
        let x;
        let source = match a.ranks {
            RankMode::Exogenous => {
                exo = exogenous_ranks(&a.rank_input, &h)?.0;
                RankSource::Exogenous(&exo)
            }
            RankMode::Endogenous => {
                x = endogenous_features(&a.rank_input, &h)?;
                RankSource::Endogenous(&x)
            }
        };
        match breakpoint_grid_search(&h, source, orders, l_pw, a.grid_step, &priors, &opts, criterion(a.criterion)) {
            Ok(grid) => {
                write_grid(&mut out, &grid)?;
                selection["criterion"] = json!(grid.criterion);
                selection["best_H"] = json!(grid.best().breakpoints);
                selection["best_log_likelihood"] = json!(grid.best().log_likelihood);
            }
            // the elbow result is still useful without a grid
            Err(e @ cigam::Error::InvalidArgument(_)) => {
                eprintln!("warning: grid search skipped: {e}");
                selection["grid_error"] = json!(e.to_string());
            }
            Err(e) => return Err(e.into()),
        }
    }
    out.json("selection.json", &selection)?;
    print_json(&json!({ "l_pw": l_pw, "pwerr": selection["pwerr"], "best_H": selection.get("best_H") }))?;
    Ok(out.info)
}

#[derive(Serialize)]
struct ComparisonRow {
    model: String,
    dataset: String,
    mode: String,
    #[serde(rename = "LL")]
    ll: f64,
    params: serde_json::Value,
}

fn write_scatter(out: &mut OutDir, name: &str, h: &Hypergraph, a: &[usize], b: &[usize]) -> Result<f64> {
    let (rho, rows) = rank_correlation(a, b)?;
    let mut w = out.csv(name)?;
    w.write_record(["node", "position_a", "position_b"])?;
    for r in rows {
        w.write_record([h.label(r.node), &r.position_a.to_string(), &r.position_b.to_string()])?;
    }
    w.flush()?;
    Ok(rho)
}

pub fn compare(a: &CompareArgs) -> Result<RunInfo> {
    let h = load_graph(&a.input)?;
    let model: FittedModel = read_json(&a.model)?;
    let params = model.params()?;
    let orders = parse_orders(a.k.as_deref(), Some(&h))?;
    let (r, x) = model_ranks(&model, &a.rank_input, &h)?;
    let stats = PartitionStats::build(&h, &r, &params.layers, orders)?;
    let cigam_ll = log_likelihood(&stats, &params)?;
    let mode = model.rank_source.clone();
    let mut rows = vec![ComparisonRow {
        model: "CIGAM".into(),
        dataset: a.dataset.clone(),
        mode: mode.clone(),
        ll: cigam_ll,
        params: json!({ "lambda": model.lambda, "c": model.c, "H": model.breakpoints }),
    }];

    let non_edges: u64 = non_edge_counts(&h, orders)
        .iter()
        .map(|c| c.to_u64().unwrap_or(u64::MAX))
        .fold(0, u64::saturating_add);
    let train_batch = a
        .lcp_batch
        .unwrap_or_else(|| h.m().min(usize::try_from(non_edges).unwrap_or(usize::MAX)));
    let lcp_opts = LogisticFitOptions {
        step: a.lcp_step,
        epochs: a.lcp_epochs,
        steps_per_epoch: a.lcp_steps_per_epoch,
        batch_fraction: a.batch_fraction,
        batch_size: Some(train_batch),
        eval_fraction: a.batch_fraction,
        seed: a.seed,
        ..LogisticFitOptions::default()
    };
    let lcp = logistic_cp_fit(&h, x.as_ref(), orders, &lcp_opts)?;
    rows.push(ComparisonRow {
        model: "Logistic-CP".into(),
        dataset: a.dataset.clone(),
        mode: mode.clone(),
        ll: lcp.final_ll.value,
        params: json!({
            "step": a.lcp_step,
            "epochs": a.lcp_epochs,
            "train_batch": train_batch,
            "batch_size": lcp.final_ll.batch_size,
            "core_size": lcp.scores.core().len(),
            "stop": lcp.stop,
        }),
    });

    let graph_only = orders.min() == 2 && orders.max() == 2;
    let (perm_mode, perm_name) = if graph_only {
        (PermutationMode::LogisticTh, "Logistic-TH")
    } else {
        (PermutationMode::HyperNsm, "HyperNSM")
    };
    let cigam_order = permutation_from_scores(r.values());
    let degree: Vec<f64> = h.degree_vector().iter().map(|&d| d as f64).collect();
    let degree_order = permutation_from_scores(&degree);
    let batch = NegativeBatch::sample_fraction(&h, orders, a.batch_fraction, &mut RngStream::new(a.seed, 1).rng())?;
    for (source, order) in [("cigam-ranks", &cigam_order), ("degree", &degree_order)] {
        let mut pm = PermutationModel::from_order(order, a.a, perm_mode)?;
        pm.p = Some(a.p);
        let est = pm.ll_estimate(&h, &batch)?;
        rows.push(ComparisonRow {
            model: perm_name.into(),
            dataset: a.dataset.clone(),
            mode: mode.clone(),
            ll: est.value,
            params: json!({ "a": a.a, "p": a.p, "xi": if graph_only { "1" } else { "1/|e|" }, "permutation": source, "batch_size": est.batch_size }),
        });
    }

    let mut out = OutDir::create(&a.out)?;
    let mut w = out.csv("comparison.csv")?;
    w.write_record(["model", "dataset", "mode", "LL", "params"])?;
    for row in &rows {
        w.write_record([&row.model, &row.dataset, &row.mode, &num(row.ll), &row.params.to_string()])?;
    }
    w.flush()?;
    let lcp_order = permutation_from_scores(&lcp.scores.z);
    let rho_lcp = write_scatter(&mut out, "scatter_cigam_logistic_cp.csv", &h, &cigam_order, &lcp_order)?;
    let rho_deg = write_scatter(&mut out, "scatter_cigam_degree.csv", &h, &cigam_order, &degree_order)?;
    let rho_lcp_deg = write_scatter(&mut out, "scatter_logistic_cp_degree.csv", &h, &lcp_order, &degree_order)?;
    let report = json!({
        "rows": rows,
        "spearman": {
            "cigam_vs_logistic_cp": rho_lcp,
            "cigam_vs_degree": rho_deg,
            "logistic_cp_vs_degree": rho_lcp_deg,
            "cigam_rank_vs_degree_value": spearman(r.values(), &degree).ok(),
        },
    });
    out.json("comparison.json", &report)?;
    print_json(&report)?;
    Ok(out.info)
}

pub fn project(a: &ProjectArgs) -> Result<RunInfo> {
    let h = project_to_graph(&load_graph(&a.input)?);
    let mut out = OutDir::create(&a.out)?;
    write_graph(&mut out, &h)?;
    let summary = json!({ "n": h.n(), "m": h.m() });
    out.json("summary.json", &summary)?;
    print_json(&summary)?;
    Ok(out.info)
}
