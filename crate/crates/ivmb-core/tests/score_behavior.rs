//! Scoring behavior on simulated systems: the family-sum route must
//! agree with the joint-density route, the marginal-likelihood score
//! must not distinguish equivalent graphs, the ln(n) penalty must turn
//! consistent as samples grow, and the backdoor-edge comparison must
//! point the right way on data of known structure.

use ivmb_core::data::Dataset;
use ivmb_core::graph::Dag;
use ivmb_core::score::{compare_backdoor, fit_mle, score_graph, Criterion, Winner};
use ivmb_core::sem::{scenario, LinearSem};
use nalgebra::{Cholesky, DVector};

/// Independent route to the Gaussian log-likelihood: evaluate the
/// joint multivariate normal implied by the fitted system (its
/// population covariance and recursively propagated means) at every
/// row. The family-sum route must agree with this to float precision.
fn joint_gaussian_loglik(sem: &LinearSem, ds: &Dataset) -> f64 {
    let dag = sem.dag();
    let p = dag.len();
    let sigma = sem.population_covariance().unwrap();
    let mut mu = vec![0.0_f64; p];
    for idx in dag.topological_order().unwrap() {
        let v = &dag.vertices()[idx];
        let mut m = sem.intercept(v).unwrap();
        for parent in dag.parents(v).unwrap() {
            let pi = dag.index_of(&parent).unwrap();
            m += sem.weight(&parent, v).unwrap() * mu[pi];
        }
        mu[idx] = m;
    }
    let chol = Cholesky::new(sigma).unwrap();
    let ln_det: f64 = chol.l().diagonal().iter().map(|d| 2.0 * d.ln()).sum();
    let cols: Vec<&[f64]> = dag
        .vertices()
        .iter()
        .map(|v| ds.column(v).unwrap())
        .collect();
    let mut loglik = 0.0;
    for i in 0..ds.n() {
        let x = DVector::from_fn(p, |j, _| cols[j][i] - mu[j]);
        let solved = chol.solve(&x);
        loglik -=
            0.5 * ((p as f64) * (2.0 * std::f64::consts::PI).ln() + ln_det + x.dot(&solved));
    }
    loglik
}

#[test]
fn family_sums_agree_with_the_joint_density_route() {
    let truth = scenario("mb_reduced").unwrap();
    let ds = truth.sample(500, 31).unwrap();

    // Score the generating structure and a deliberately different one;
    // the identity must hold for whatever graph is being fit.
    let alt = Dag::new(
        truth.dag().vertices().to_vec(),
        vec![
            ("x4".into(), "y".into()),
            ("x1".into(), "x2".into()),
            ("x3".into(), "y".into()),
        ],
        vec![],
    )
    .unwrap();
    for g in [truth.dag(), &alt] {
        let score = score_graph(g, &ds, Criterion::Aic).unwrap();
        let fitted = fit_mle(g, &ds).unwrap();
        let joint = joint_gaussian_loglik(&fitted, &ds);
        let k = score.parameter_count as f64;
        let aic_joint = -2.0 * joint + 2.0 * k;
        let bic_joint = -2.0 * joint + k * (ds.n() as f64).ln();
        assert!(
            (score.aic - aic_joint).abs() < 1e-6,
            "aic routes disagree: {} vs {aic_joint}",
            score.aic
        );
        assert!(
            (score.bic - bic_joint).abs() < 1e-6,
            "bic routes disagree: {} vs {bic_joint}",
            score.bic
        );
    }
}

#[test]
fn equivalent_graphs_share_the_marginal_likelihood_score() {
    // Generic correlated data from a four-vertex chain.
    let dag = Dag::new(
        vec!["a".into(), "b".into(), "c".into(), "d".into()],
        vec![
            ("a".into(), "b".into()),
            ("b".into(), "c".into()),
            ("c".into(), "d".into()),
        ],
        vec![],
    )
    .unwrap();
    let truth = LinearSem::new(dag.clone(), &[("a", "b", 0.8), ("b", "c", 0.6), ("c", "d", 0.7)])
        .unwrap();
    let ds = truth.sample(400, 5).unwrap();

    let class = dag.equivalence_class().unwrap();
    assert!(class.len() > 1, "chain should have several equivalents");
    let reference = score_graph(&dag, &ds, Criterion::Bge).unwrap().bge;
    for member in &class {
        let bge = score_graph(member, &ds, Criterion::Bge).unwrap().bge;
        assert!(
            (bge - reference).abs() < 1e-6,
            "equivalent graph scored {bge} vs {reference}"
        );
    }

    // Teeth check: a non-equivalent structure (collider at b) must be
    // distinguishable on the same data.
    let collider = Dag::new(
        vec!["a".into(), "b".into(), "c".into(), "d".into()],
        vec![
            ("a".into(), "b".into()),
            ("c".into(), "b".into()),
            ("c".into(), "d".into()),
        ],
        vec![],
    )
    .unwrap();
    let other = score_graph(&collider, &ds, Criterion::Bge).unwrap().bge;
    assert!(
        (other - reference).abs() > 1e-3,
        "collider score {other} indistinguishable from chain {reference}"
    );
}

#[test]
fn true_edges_lower_bic_and_spurious_edges_raise_it() {
    let two = |edge: bool| -> Dag {
        let edges = if edge {
            vec![("a".to_string(), "b".to_string())]
        } else {
            vec![]
        };
        Dag::new(vec!["a".into(), "b".into()], edges, vec![]).unwrap()
    };
    let linked = LinearSem::new(two(true).clone(), &[("a", "b", 1.0)]).unwrap();
    let free = LinearSem::new(two(false).clone(), &[]).unwrap();

    let mut true_edge_wins = 0usize;
    let mut spurious_raises = 0usize;
    for seed in 0..100u64 {
        let ds = linked.sample(5000, 100 + seed).unwrap();
        let with = score_graph(&two(true), &ds, Criterion::Bic).unwrap().bic;
        let without = score_graph(&two(false), &ds, Criterion::Bic).unwrap().bic;
        if with < without {
            true_edge_wins += 1;
        }

        let ds0 = free.sample(5000, 300 + seed).unwrap();
        let with0 = score_graph(&two(true), &ds0, Criterion::Bic).unwrap().bic;
        let without0 = score_graph(&two(false), &ds0, Criterion::Bic).unwrap().bic;
        if with0 > without0 {
            spurious_raises += 1;
        }
    }
    assert!(true_edge_wins >= 99, "true edge won only {true_edge_wins}/100");
    assert!(spurious_raises >= 95, "spurious edge raised only {spurious_raises}/100");
}

#[test]
fn penalty_turns_consistent_as_samples_grow() {
    // A deliberately faint edge: at n=500 the ln(n) penalty usually
    // wins over the signal, by n=50000 the signal must dominate.
    let dag = Dag::new(
        vec!["a".into(), "b".into()],
        vec![("a".into(), "b".into())],
        vec![],
    )
    .unwrap();
    let truth = LinearSem::new(dag.clone(), &[("a", "b", 0.08)]).unwrap();
    let empty = Dag::new(vec!["a".into(), "b".into()], vec![], vec![]).unwrap();

    let mut fractions = Vec::new();
    for (tier, n) in [(0u64, 500usize), (1, 5000), (2, 50_000)] {
        let mut wins = 0usize;
        let seeds = 40u64;
        for seed in 0..seeds {
            let ds = truth.sample(n, 7_000 + 100 * tier + seed).unwrap();
            let with = score_graph(&dag, &ds, Criterion::Bic).unwrap().bic;
            let without = score_graph(&empty, &ds, Criterion::Bic).unwrap().bic;
            if with < without {
                wins += 1;
            }
        }
        fractions.push(wins as f64 / seeds as f64);
    }
    assert!(
        fractions.windows(2).all(|w| w[1] >= w[0]),
        "recovery fractions not nondecreasing: {fractions:?}"
    );
    assert!(fractions[0] < 0.9, "faint edge already saturated: {fractions:?}");
    assert!(
        *fractions.last().unwrap() >= 0.95,
        "large-sample recovery too rare: {fractions:?}"
    );
}

fn mediation_sem(direct: f64) -> LinearSem {
    let mut edges = vec![
        ("p".to_string(), "m".to_string()),
        ("m".to_string(), "c".to_string()),
        ("ctrl".to_string(), "c".to_string()),
    ];
    let mut weights: Vec<(&str, &str, f64)> =
        vec![("p", "m", 0.8), ("m", "c", 0.7), ("ctrl", "c", 0.4)];
    if direct != 0.0 {
        edges.push(("p".to_string(), "c".to_string()));
        weights.push(("p", "c", direct));
    }
    let dag = Dag::new(
        vec!["p".into(), "m".into(), "c".into(), "ctrl".into()],
        edges,
        vec![],
    )
    .unwrap();
    LinearSem::new(dag, &weights).unwrap()
}

#[test]
fn mediation_data_prefers_the_lean_model_and_direct_data_the_full_one() {
    let lean = mediation_sem(0.0);
    let full = mediation_sem(0.5);
    let mut lean_wins = 0usize;
    let mut full_wins = 0usize;
    for seed in 0..100u64 {
        let ds = lean.sample(10_000, 40_000 + seed).unwrap();
        let decision = compare_backdoor(&ds, "p", "m", "c", &["ctrl"]).unwrap();
        if decision.winners.bic == Winner::WithoutEdge {
            lean_wins += 1;
        }

        let ds2 = full.sample(10_000, 60_000 + seed).unwrap();
        let decision2 = compare_backdoor(&ds2, "p", "m", "c", &["ctrl"]).unwrap();
        if decision2.winners.bic == Winner::WithEdge {
            full_wins += 1;
        }
    }
    assert!(lean_wins >= 95, "lean model won only {lean_wins}/100 on lean data");
    assert!(full_wins >= 95, "full model won only {full_wins}/100 on direct-edge data");
}

#[test]
fn nested_models_with_a_zero_edge_fall_to_the_penalty() {
    // Generating weight exactly zero: the richer model can only fit
    // noise, so the ln(n) penalty should reject it almost always.
    let lean = mediation_sem(0.0);
    let mut lean_wins = 0usize;
    for seed in 0..100u64 {
        let ds = lean.sample(10_000, 80_000 + seed).unwrap();
        let decision = compare_backdoor(&ds, "p", "m", "c", &["ctrl"]).unwrap();
        if decision.winners.bic == Winner::WithoutEdge {
            lean_wins += 1;
        }
    }
    assert!(lean_wins >= 90, "lean model won only {lean_wins}/100");
}
