//! System-level properties of the linear simulator: the implied
//! covariance is positive definite for arbitrary valid structures,
//! sample moments concentrate on it at the expected rate, and fitting
//! a reversed equation attenuates by the analytic factor rather than
//! recovering the inverse structural weight.

use ivmb_core::graph::Dag;
use ivmb_core::regress::ols;
use ivmb_core::rng::derived_rng;
use ivmb_core::sem::{scenario, LinearSem};
use nalgebra::{Cholesky, DMatrix};
use rand::Rng;

#[test]
fn implied_covariance_is_positive_definite_for_random_systems() {
    for trial in 0..30u64 {
        let mut rng = derived_rng(500 + trial, 0xC0DE);
        let p = rng.gen_range(2..=8);
        let names: Vec<String> = (0..p).map(|i| format!("v{i}")).collect();
        let mut edges = Vec::new();
        let mut weights: Vec<(String, String, f64)> = Vec::new();
        for i in 0..p {
            for j in (i + 1)..p {
                if rng.gen_bool(0.4) {
                    let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
                    let w = sign * rng.gen_range(0.5..1.5);
                    edges.push((names[i].clone(), names[j].clone()));
                    weights.push((names[i].clone(), names[j].clone(), w));
                }
            }
        }
        let dag = Dag::new(names.clone(), edges, vec![]).unwrap();
        let weight_refs: Vec<(&str, &str, f64)> = weights
            .iter()
            .map(|(a, b, w)| (a.as_str(), b.as_str(), *w))
            .collect();
        let mut sem = LinearSem::new(dag, &weight_refs).unwrap();
        for name in &names {
            let scale = rng.gen_range(0.5..1.5);
            sem = sem.with_scale(name, scale).unwrap();
        }
        let sigma = sem.population_covariance().unwrap();
        assert!(
            Cholesky::new(sigma).is_some(),
            "trial {trial}: implied covariance not positive definite"
        );
    }
}

#[test]
fn sample_covariance_concentrates_on_the_population_matrix() {
    let n = 4000usize;
    for name in ["irc", "mb_reduced", "rent_price"] {
        let sem = scenario(name).unwrap();
        let sigma = sem.population_covariance().unwrap();
        let p = sigma.nrows();
        let bound = 3.0 * p as f64 / (n as f64).sqrt();
        for seed in 0..20u64 {
            let ds = sem.sample(n, 42_000 + seed).unwrap();
            assert_eq!(ds.p(), p, "{name}: latent columns in the sample");
            let mut centered = DMatrix::<f64>::zeros(n, p);
            for j in 0..p {
                let col = ds.column_at(j);
                let mean = col.iter().sum::<f64>() / n as f64;
                for i in 0..n {
                    centered[(i, j)] = col[i] - mean;
                }
            }
            let emp = centered.tr_mul(&centered) / (n as f64 - 1.0);
            let diff = &emp - &sigma;
            let op_norm = diff
                .svd(false, false)
                .singular_values
                .iter()
                .fold(0.0_f64, |m, v| m.max(*v));
            assert!(
                op_norm < bound,
                "{name} seed {seed}: operator-norm error {op_norm} \u{2265} {bound}"
            );
        }
    }
}

#[test]
fn reversed_fit_attenuates_by_the_analytic_factor() {
    // Truth: z→y (0.6), y→x1 (0.8). Regressing y on x1 estimates
    // cov/var = (1/0.8)·R², not the inverse structural weight 1.25.
    let sem = scenario("reversal").unwrap();
    let var_y = 0.6 * 0.6 + 1.0;
    let var_x1 = 0.8 * 0.8 * var_y + 1.0;
    let expected = 0.8 * var_y / var_x1;

    let analytic = sem.population_regression("y", &["x1"]).unwrap();
    assert!((analytic[0] - expected).abs() < 1e-12, "analytic {}", analytic[0]);

    let ds = sem.sample(100_000, 77).unwrap();
    let fit = ols(
        ds.column("y").unwrap(),
        &[("x1", ds.column("x1").unwrap())],
        true,
    )
    .unwrap();
    let pos = fit.names.iter().position(|s| s == "x1").unwrap();
    let slope = fit.coefficients[pos];
    assert!((slope - expected).abs() < 0.02, "sample slope {slope} vs {expected}");
    assert!(
        (slope - 1.0 / 0.8).abs() > 0.5,
        "slope {slope} should stay far from the naive inverse 1.25"
    );
}
