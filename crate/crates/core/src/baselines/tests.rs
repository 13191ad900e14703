use super::*;
use crate::cigam::StopReason;
use crate::hypergraph::FeatureMatrix;
use crate::numeric::sigmoid;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_graph(n: usize, orders: OrderRange, p: f64, seed: u64) -> Hypergraph {
    let mut g = rng(seed);
    let mut edges = Vec::new();
    for_each_candidate(n, orders, |e| {
        if g.random::<f64>() < p {
            edges.push(e.to_vec());
        }
    })
    .unwrap();
    Hypergraph::from_edges(n, edges).unwrap()
}

fn mean_and_se(xs: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt(), var)
}

/// Variance of the estimator under sampling without replacement.
fn estimator_variance(h: &Hypergraph, model: &dyn EdgeModel, orders: OrderRange, b: usize) -> f64 {
    let all = NegativeBatch::full(h, orders).unwrap();
    let x: Vec<f64> = all.edges.iter().map(|e| (-model.clamped(e)).ln_1p()).collect();
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let ss: f64 = x.iter().map(|v| (v - mean).powi(2)).sum();
    let b = b as f64;
    if n <= 1.0 {
        return 0.0;
    }
    n * (n - b) / (b * (n - 1.0)) * ss
}

#[test]
fn candidate_enumeration_counts() {
    let mut count = 0;
    let mut last: Option<Vec<usize>> = None;
    for_each_candidate(7, OrderRange::new(2, 4).unwrap(), |e| {
        count += 1;
        assert!(e.windows(2).all(|w| w[0] < w[1]));
        if let Some(prev) = &last {
            if prev.len() == e.len() {
                assert!(prev.as_slice() < e);
            }
        }
        last = Some(e.to_vec());
    })
    .unwrap();
    assert_eq!(count, 21 + 35 + 35);
    assert!(for_each_candidate(200, OrderRange::uniform(5).unwrap(), |_| {}).is_err());
}

#[test]
fn logistic_prob_examples() {
    assert_eq!(logistic_cp_prob(&[0, 1], &[0.0, 0.0]), 0.5);
    assert_eq!(logistic_cp_prob(&[0, 1], &[1e3, 1e3]), 1.0 - PROB_CLAMP);
    assert_eq!(logistic_cp_prob(&[0, 1], &[-1e3, -1e3]), PROB_CLAMP);
    let p = logistic_cp_prob(&[0, 1, 2], &[0.5, -0.2, 0.1]);
    assert!((p - 1.0 / (1.0 + (-0.4f64).exp())).abs() < 1e-15);
    assert!((p - 0.5987).abs() < 1e-4);
}

#[test]
fn core_set_uses_raw_scores() {
    let s = CoreScores::new(vec![0.0, -0.1, 2.0, -3.0]).unwrap();
    assert_eq!(s.core(), vec![0, 2]);
    assert_eq!(s.periphery(), vec![1, 3]);
    let shifted = CoreScores::new(s.z.iter().map(|z| z + 0.5).collect()).unwrap();
    assert_eq!(shifted.core(), vec![0, 1, 2]);
    assert!(shifted.prob(&[1, 3]) > s.prob(&[1, 3]));
}

#[test]
fn full_batch_estimate_is_exact() {
    let orders = OrderRange::new(2, 3).unwrap();
    let h = random_graph(7, orders, 0.3, 1);
    let s = CoreScores::new((0..7).map(|i| 0.3 * i as f64 - 1.0).collect()).unwrap();
    let full = NegativeBatch::full(&h, orders).unwrap();
    assert_eq!(full.weight, 1.0);
    let est = ll_estimate(&h, &s, &full).unwrap();
    let exact = exact_log_likelihood(&h, &s, orders).unwrap();
    assert!((est.value - exact).abs() < 1e-10 * exact.abs());
    // a sampled batch of size m̄ is the full set in some order
    let sampled = NegativeBatch::sample(&h, orders, full.len(), &mut rng(3)).unwrap();
    assert!((sampled.weight - 1.0).abs() < 1e-15);
    let est2 = ll_estimate(&h, &s, &sampled).unwrap();
    assert!((est2.value - exact).abs() < 1e-10 * exact.abs());
}

#[test]
fn empty_batch_rules() {
    let orders = OrderRange::uniform(2).unwrap();
    let h = random_graph(5, orders, 0.5, 2);
    assert!(NegativeBatch::sample(&h, orders, 0, &mut rng(0)).is_err());
    let complete = random_graph(4, orders, 1.1, 0);
    let b = NegativeBatch::sample(&complete, orders, 0, &mut rng(0)).unwrap();
    assert!(b.is_empty());
    assert!(NegativeBatch::sample_fraction(&h, orders, 0.0, &mut rng(0)).is_err());
}

#[test]
fn estimator_unbiased_on_six_nodes() {
    let orders = OrderRange::uniform(2).unwrap();
    let h = random_graph(6, orders, 0.4, 5);
    let s = CoreScores::new(vec![1.0, 0.5, 0.0, -0.5, -1.0, -1.5]).unwrap();
    let exact = exact_log_likelihood(&h, &s, orders).unwrap();
    let mut g = rng(11);
    let xs: Vec<f64> = (0..10_000)
        .map(|_| {
            let b = NegativeBatch::sample(&h, orders, 2, &mut g).unwrap();
            ll_estimate(&h, &s, &b).unwrap().value
        })
        .collect();
    let (mean, se, var) = mean_and_se(&xs);
    assert!((mean - exact).abs() <= 3.0 * se, "mean {mean} exact {exact} se {se}");
    assert!(var <= variance_bound(&h, &s, orders, 2).unwrap());
}

#[test]
fn holder_mean_examples() {
    for a in [-800.0, -3.0, -1e-12, 1.0, 2.5, 10.0, 900.0] {
        assert!((holder_mean(&[0.3, 0.3, 0.3], a).unwrap() - 0.3).abs() < 1e-12);
    }
    assert!((holder_mean(&[0.2, 0.8], 1.0).unwrap() - 0.5).abs() < 1e-15);
    let expected = 0.8 * (0.5 * (0.25f64.powi(10) + 1.0)).powf(0.1);
    let m = holder_mean(&[0.2, 0.8], 10.0).unwrap();
    assert!((m - expected).abs() < 1e-14);
    assert!((m - 0.746).abs() < 1e-3);
    assert!((holder_mean(&[0.2, 0.8], 0.0).unwrap() - 0.4).abs() < 1e-12);
    assert_eq!(holder_mean(&[0.2, 0.8], 1e4).unwrap(), 0.8);
    assert_eq!(holder_mean(&[0.2, 0.8], -1e4).unwrap(), 0.2);
    assert_eq!(holder_mean(&[0.0, 0.8], -2.0).unwrap(), 0.0);
    assert!(holder_mean(&[], 1.0).is_err());
    assert!(holder_mean(&[1.5], 1.0).is_err());
}

#[test]
fn permutation_examples() {
    let h = Hypergraph::from_edges(2, vec![vec![0, 1]]).unwrap();
    let th = PermutationModel::from_order(&[0, 1], 10.0, PermutationMode::LogisticTh).unwrap();
    assert_eq!(th.score(0), 0.5);
    assert_eq!(th.score(1), 0.0);
    let expected = sigmoid(holder_mean(&[0.5, 0.0], 10.0).unwrap());
    assert!((th.prob(&[0, 1]) - expected).abs() < 1e-15);
    let batch = NegativeBatch::full(&h, OrderRange::uniform(2).unwrap()).unwrap();
    let est = th.ll_estimate(&h, &batch).unwrap();
    assert!((est.value - expected.ln()).abs() < 1e-15);

    let nsm = PermutationModel::from_order(&[0, 1], 10.0, PermutationMode::HyperNsm).unwrap();
    assert!((nsm.prob(&[0, 1]) - sigmoid(0.5 * holder_mean(&[0.5, 0.0], 10.0).unwrap())).abs() < 1e-15);

    let tri = Hypergraph::from_edges(3, vec![vec![0, 1, 2]]).unwrap();
    let th3 = PermutationModel::from_order(&[2, 0, 1], 10.0, PermutationMode::LogisticTh).unwrap();
    let b = NegativeBatch::full(&tri, OrderRange::uniform(3).unwrap()).unwrap();
    assert!(th3.ll_estimate(&tri, &b).is_err());

    assert!(PermutationModel::new(vec![1, 1], 10.0, PermutationMode::HyperNsm).is_err());
    assert!(PermutationModel::new(vec![1, 2], 0.0, PermutationMode::HyperNsm).is_err());
}

#[test]
fn permutation_full_batch_equals_enumeration() {
    let orders = OrderRange::new(2, 3).unwrap();
    let h = random_graph(6, orders, 0.3, 8);
    let model = PermutationModel::from_order(&[3, 1, 4, 0, 5, 2], 10.0, PermutationMode::HyperNsm).unwrap();
    let full = NegativeBatch::full(&h, orders).unwrap();
    let est = model.ll_estimate(&h, &full).unwrap();
    let mut direct = 0.0;
    for_each_candidate(6, orders, |e| {
        let p = model.prob(e);
        direct += if h.contains(e) { p.ln() } else { (1.0 - p).ln() };
    })
    .unwrap();
    assert!((est.value - direct).abs() < 1e-10 * direct.abs());
}

#[test]
fn rank_correlation_examples() {
    let a: Vec<usize> = (0..10).collect();
    let rev: Vec<usize> = (0..10).rev().collect();
    assert!((rank_correlation(&a, &a).unwrap().0 - 1.0).abs() < 1e-15);
    assert!((rank_correlation(&a, &rev).unwrap().0 + 1.0).abs() < 1e-15);
    assert!(rank_correlation(&a, &rev[..9]).is_err());
    assert!(rank_correlation(&[0, 0], &[0, 1]).is_err());
    let (_, rows) = rank_correlation(&[2, 0, 1], &[0, 1, 2]).unwrap();
    assert_eq!(rows[2], RankScatterRow { node: 2, position_a: 1, position_b: 3 });

    use rand::seq::SliceRandom;
    let mut g = rng(4);
    let mut x: Vec<usize> = (0..1000).collect();
    let mut y = x.clone();
    x.shuffle(&mut g);
    y.shuffle(&mut g);
    assert!(rank_correlation(&x, &y).unwrap().0.abs() < 0.1);

    assert!((spearman(&[1.0, 2.0, 3.0], &[10.0, 20.0, 30.0]).unwrap() - 1.0).abs() < 1e-15);
    assert_eq!(permutation_from_scores(&[0.1, 0.9, 0.5]), vec![1, 2, 0]);
}

#[test]
fn fit_rejects_too_few_nodes() {
    let h = Hypergraph::from_edges(1, vec![]).unwrap();
    let err = logistic_cp_fit(&h, None, OrderRange::uniform(2).unwrap(), &LogisticFitOptions::default());
    assert!(err.is_err());
}

#[test]
fn full_batch_fit_is_monotone() {
    let orders = OrderRange::new(2, 3).unwrap();
    let h = random_graph(8, orders, 0.25, 21);
    let opt = LogisticFitOptions {
        step: 0.1,
        epochs: 2,
        steps_per_epoch: 50,
        full_batch: true,
        ..Default::default()
    };
    let fit = logistic_cp_fit(&h, None, orders, &opt).unwrap();
    assert!(fit.trace.windows(2).all(|w| w[1] >= w[0]));
    assert!(fit.trace.last().unwrap() > &fit.trace[0]);
    let exact = exact_log_likelihood(&h, &fit.scores, orders).unwrap();
    assert!((fit.final_ll.value - exact).abs() < 1e-9 * exact.abs());
}

#[test]
fn planted_scores_are_recovered() {
    let n = 30;
    let orders = OrderRange::uniform(2).unwrap();
    let mut g = rng(99);
    let planted = CoreScores::new((0..n).map(|i| 1.5 - 3.5 * i as f64 / n as f64).collect()).unwrap();
    let mut edges = Vec::new();
    for_each_candidate(n, orders, |e| {
        if g.random::<f64>() < planted.prob(e) {
            edges.push(e.to_vec());
        }
    })
    .unwrap();
    let h = Hypergraph::from_edges(n, edges).unwrap();
    let opt = LogisticFitOptions {
        step: 0.01,
        epochs: 5,
        steps_per_epoch: 100,
        seed: 3,
        ..Default::default()
    };
    let fit = logistic_cp_fit(&h, None, orders, &opt).unwrap();
    assert_eq!(fit.stop, StopReason::Budget);
    let mut a = Vec::new();
    let mut b = Vec::new();
    for_each_candidate(n, orders, |e| {
        a.push(planted.prob(e));
        b.push(fit.scores.prob(e));
    })
    .unwrap();
    assert!(spearman(&a, &b).unwrap() > 0.5);
}

#[test]
fn feature_fit_runs_and_backprop_matches_differences() {
    let orders = OrderRange::uniform(2).unwrap();
    let h = random_graph(8, orders, 0.4, 6);
    let mut g = rng(7);
    let x = FeatureMatrix::new(8, 2, (0..16).map(|_| g.random::<f64>()).collect()).unwrap();
    let problem = logistic::tests_support::problem(&h, &x);
    let batch = NegativeBatch::full(&h, orders).unwrap();
    let theta: Vec<f64> = (0..9).map(|_| g.random::<f64>() - 0.5).collect();
    let (obj, grad) = logistic::tests_support::objective_and_gradient(&problem, &theta, &batch);
    let eps = 1e-6;
    for j in 0..theta.len() {
        let mut up = theta.clone();
        up[j] += eps;
        let mut down = theta.clone();
        down[j] -= eps;
        let fd = (logistic::tests_support::objective_and_gradient(&problem, &up, &batch).0
            - logistic::tests_support::objective_and_gradient(&problem, &down, &batch).0)
            / (2.0 * eps);
        assert!((fd - grad[j]).abs() <= 1e-5 * fd.abs().max(1.0), "coord {j}: {fd} vs {}", grad[j]);
    }
    assert!(obj.is_finite());
    let opt = LogisticFitOptions { step: 0.05, epochs: 1, steps_per_epoch: 20, ..Default::default() };
    let fit = logistic_cp_fit(&h, Some(&x), orders, &opt).unwrap();
    assert!(fit.scores.map.is_some());
    assert_eq!(fit.scores.z.len(), 8);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn holder_mean_bounded_and_monotone(
        v in proptest::collection::vec(0.0f64..=1.0, 1..6),
        a in -50.0f64..50.0,
        da in 0.0f64..10.0,
    ) {
        let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let m = holder_mean(&v, a).unwrap();
        prop_assert!(m >= lo - 1e-12 && m <= hi + 1e-12);
        prop_assert!(holder_mean(&v, a + da).unwrap() >= m - 1e-9);
    }

    #[test]
    fn estimators_unbiased_small(seed in 0u64..1000, n in 4usize..=8) {
        let orders = OrderRange::new(2, 3.min(n - 1)).unwrap();
        let h = random_graph(n, orders, 0.3, seed);
        let mut g = rng(seed + 1);
        let z: Vec<f64> = (0..n).map(|_| g.random::<f64>() * 2.0 - 1.5).collect();
        let order = permutation_from_scores(&z);
        let models: Vec<Box<dyn EdgeModel>> = vec![
            Box::new(CoreScores::new(z).unwrap()),
            Box::new(PermutationModel::from_order(&order, 10.0, PermutationMode::HyperNsm).unwrap()),
        ];
        let m_bar = NegativeBatch::full(&h, orders).unwrap().len();
        prop_assume!(m_bar >= 2);
        let size = (m_bar / 5).max(1);
        for model in &models {
            let exact = exact_log_likelihood(&h, model.as_ref(), orders).unwrap();
            let xs: Vec<f64> = (0..2_000)
                .map(|_| {
                    let b = NegativeBatch::sample(&h, orders, size, &mut g).unwrap();
                    ll_estimate(&h, model.as_ref(), &b).unwrap().value
                })
                .collect();
            let (mean, se, var) = mean_and_se(&xs);
            prop_assert!((mean - exact).abs() <= 4.0 * se + 1e-9, "mean {} exact {} se {}", mean, exact, se);
            let bound = variance_bound(&h, model.as_ref(), orders, size).unwrap();
            let exact_var = estimator_variance(&h, model.as_ref(), orders, size);
            prop_assert!(exact_var <= bound * (1.0 + 1e-12) + 1e-15);
            prop_assert!((var - exact_var).abs() <= 0.25 * exact_var + 1e-12, "var {} exact {}", var, exact_var);
        }
    }
}
