//! Resampling-based selectors: subsample-frequency selection built on
//! the lasso-modified least-angle path, and bootstrap iterative
//! sure-independence screening for high-dimensional data.
//!
//! Both draw every replicate's randomness from a deterministic
//! per-replicate substream of the root seed, so results are identical
//! at any parallelism degree.

use std::collections::{BTreeMap, BTreeSet};

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rayon::prelude::*;

use crate::error::{CoreError, Result};
use crate::rng::{derived_rng, seeded_permutation};

use super::lars::lars_engine;
use super::{
    apply_standardization, column_stats, gaussian_bic, subset_ols, subset_rss, to_matrix,
    Hyperparameters, SelectionResult,
};

/// Subsample-frequency selection.
///
/// Each of `k_subsamples` subsamples (drawn without replacement, size
/// ⌊fraction·rows⌋) is standardized and run through the lasso-modified
/// least-angle path; the BIC-best active set along the path, tightened
/// by backward elimination, is that subsample's vote. A variable's
/// score is the fraction of votes containing it, and the selection
/// keeps scores at or above the threshold `c`. When `c` is not given it
/// is tuned on a held-out fifth of the rows: candidate thresholds
/// {1.0, 0.9, …, 0.1} are tried in descending order and a smaller
/// threshold is kept only when it strictly improves validation error.
pub fn solar(
    y: &[f64],
    x: &[(&str, &[f64])],
    k_subsamples: usize,
    subsample_fraction: f64,
    c: Option<f64>,
    seed: u64,
) -> Result<SelectionResult> {
    let n = y.len();
    if k_subsamples < 2 {
        return Err(CoreError::Invalid(format!(
            "need at least 2 subsamples, got {k_subsamples}"
        )));
    }
    if !(subsample_fraction > 0.0 && subsample_fraction < 1.0) {
        return Err(CoreError::Invalid(format!(
            "subsample fraction must lie in (0, 1), got {subsample_fraction}"
        )));
    }
    if let Some(cv) = c {
        if !(cv > 0.0 && cv <= 1.0) {
            return Err(CoreError::Invalid(format!(
                "threshold must lie in (0, 1], got {cv}"
            )));
        }
    }
    let (xm, names) = to_matrix(x, n)?;
    let p = xm.ncols();
    let yv = DVector::from_column_slice(y);

    // Hold out a validation fifth only when the threshold is tuned.
    let (train_rows, val_rows): (Vec<usize>, Vec<usize>) = if c.is_none() {
        let perm = seeded_permutation(seed, 0x50AA, n);
        let nv = n / 5;
        let ntr = n - nv;
        (perm[..ntr].to_vec(), perm[ntr..].to_vec())
    } else {
        ((0..n).collect(), Vec::new())
    };
    let m = (subsample_fraction * train_rows.len() as f64).floor() as usize;
    if m < 10 {
        return Err(CoreError::Data(format!(
            "subsamples of {m} rows are too small; need at least 10"
        )));
    }

    let votes: Vec<BTreeSet<usize>> = (0..k_subsamples)
        .into_par_iter()
        .map(|b| subsample_vote(&xm, &yv, &train_rows, m, seed, b as u64))
        .collect::<Result<Vec<_>>>()?;

    let scores: BTreeMap<String, f64> = names
        .iter()
        .enumerate()
        .map(|(j, name)| {
            let count = votes.iter().filter(|s| s.contains(&j)).count();
            (name.clone(), count as f64 / k_subsamples as f64)
        })
        .collect();
    let score_of = |j: usize| scores[&names[j]];

    let chosen_c = match c {
        Some(v) => v,
        None => {
            // Refits use the full training rows' statistics.
            let xtr = xm.select_rows(train_rows.iter());
            let ytr =
                DVector::from_iterator(train_rows.len(), train_rows.iter().map(|&i| yv[i]));
            let (means, sds) = column_stats(&xtr)?;
            let xtr_s = apply_standardization(&xtr, &means, &sds);
            let ytr_mean = ytr.sum() / train_rows.len() as f64;
            let ytr_c = ytr.map(|v| v - ytr_mean);
            let xva = xm.select_rows(val_rows.iter());
            let xva_s = apply_standardization(&xva, &means, &sds);
            let yva_c = DVector::from_iterator(
                val_rows.len(),
                val_rows.iter().map(|&i| yv[i] - ytr_mean),
            );
            let mut best_mse = f64::INFINITY;
            let mut best_c = 1.0;
            for tenths in (1..=10u32).rev() {
                let cand = tenths as f64 / 10.0;
                let support: Vec<usize> =
                    (0..p).filter(|&j| score_of(j) >= cand - 1e-12).collect();
                let mse = if support.is_empty() {
                    yva_c.norm_squared() / val_rows.len() as f64
                } else {
                    match subset_ols(&xtr_s, &ytr_c, &support) {
                        Some((beta, _)) => {
                            let pred = xva_s.select_columns(support.iter()) * beta;
                            (&yva_c - pred).norm_squared() / val_rows.len() as f64
                        }
                        None => continue,
                    }
                };
                if mse < best_mse - 1e-12 {
                    best_mse = mse;
                    best_c = cand;
                }
            }
            best_c
        }
    };

    // Guard the comparison against floating dust in the frequencies.
    let threshold = chosen_c - 1e-12;
    let selected = SelectionResult::select_by_threshold(&names, &scores, threshold);
    Ok(SelectionResult {
        algorithm: "solar".into(),
        selected,
        scores,
        hyperparameters: Hyperparameters {
            subsamples: Some(k_subsamples),
            subsample_fraction: Some(subsample_fraction),
            c: Some(chosen_c),
            threshold,
            seed: Some(seed),
            ..Hyperparameters::default()
        },
    })
}

/// One subsample's vote: the backward-tightened BIC-best active set of
/// the lasso-modified least-angle path on the standardized subsample.
fn subsample_vote(
    xm: &DMatrix<f64>,
    yv: &DVector<f64>,
    train_rows: &[usize],
    m: usize,
    seed: u64,
    b: u64,
) -> Result<BTreeSet<usize>> {
    let perm = seeded_permutation(seed, 0x50B0_0000 + b, train_rows.len());
    let rows: Vec<usize> = perm[..m].iter().map(|&i| train_rows[i]).collect();
    let xs = xm.select_rows(rows.iter());
    let ys = DVector::from_iterator(m, rows.iter().map(|&i| yv[i]));
    let (means, sds) = column_stats(&xs)?;
    let x_std = apply_standardization(&xs, &means, &sds);
    let y_mean = ys.sum() / m as f64;
    let y_c = ys.map(|v| v - y_mean);

    let (steps, _) = lars_engine(&x_std, &y_c, true, usize::MAX)?;
    let mut candidates: BTreeSet<Vec<usize>> = BTreeSet::new();
    candidates.insert(Vec::new());
    for step in &steps {
        candidates.insert(step.active.clone());
    }

    let mut best: Vec<usize> = Vec::new();
    let mut best_bic = f64::INFINITY;
    for cand in &candidates {
        let Some(rss) = subset_rss(&x_std, &y_c, cand) else {
            continue;
        };
        let bic = gaussian_bic(m, rss, cand.len());
        if bic < best_bic {
            best_bic = bic;
            best = cand.clone();
        }
    }

    // Backward elimination: drop members while some single removal
    // still improves the criterion.
    loop {
        let mut removal: Option<usize> = None;
        let mut removal_bic = best_bic;
        for pos in 0..best.len() {
            let mut trial = best.clone();
            trial.remove(pos);
            let Some(rss) = subset_rss(&x_std, &y_c, &trial) else {
                continue;
            };
            let bic = gaussian_bic(m, rss, trial.len());
            if bic < removal_bic - 1e-12 {
                removal_bic = bic;
                removal = Some(pos);
            }
        }
        match removal {
            Some(pos) => {
                best.remove(pos);
                best_bic = removal_bic;
            }
            None => break,
        }
    }
    Ok(best.into_iter().collect())
}

/// Bootstrap iterative sure-independence screening.
///
/// Per bootstrap sample (rows drawn with replacement): rank inactive
/// variables by absolute correlation with the current residual, pool
/// the top ⌈keep_fraction·n⌉, grow the active set forward while BIC
/// improves, and repeat until the active set stabilizes (at most five
/// rounds). A variable's score is the fraction of samples whose final
/// set contains it. `keep_fraction` defaults to 1/ln(n). An optional
/// post-pass pulls in variables whose absolute correlation with some
/// selected variable reaches `correlation_include`, bumping their score
/// to the threshold.
pub fn isis_bootstrap(
    y: &[f64],
    x: &[(&str, &[f64])],
    bootstrap_samples: usize,
    keep_fraction: Option<f64>,
    inclusion_threshold: f64,
    correlation_include: Option<f64>,
    seed: u64,
) -> Result<SelectionResult> {
    let n = y.len();
    if bootstrap_samples == 0 {
        return Err(CoreError::Invalid("need at least 1 bootstrap sample".into()));
    }
    if !(inclusion_threshold > 0.0 && inclusion_threshold <= 1.0) {
        return Err(CoreError::Invalid(format!(
            "inclusion threshold must lie in (0, 1], got {inclusion_threshold}"
        )));
    }
    if n < 10 {
        return Err(CoreError::Data(format!(
            "{n} rows are too few for a screening round"
        )));
    }
    let kf = keep_fraction.unwrap_or_else(|| 1.0 / (n as f64).ln());
    if !(kf > 0.0 && kf <= 1.0) {
        return Err(CoreError::Invalid(format!(
            "keep fraction must lie in (0, 1], got {kf}"
        )));
    }
    if let Some(cut) = correlation_include {
        if !(cut > 0.0 && cut < 1.0) {
            return Err(CoreError::Invalid(format!(
                "correlation cutoff must lie in (0, 1), got {cut}"
            )));
        }
    }
    let (xm, names) = to_matrix(x, n)?;
    let pool_size = (kf * n as f64).ceil() as usize;
    let yv = DVector::from_column_slice(y);

    let supports: Vec<BTreeSet<usize>> = (0..bootstrap_samples)
        .into_par_iter()
        .map(|b| bootstrap_support(&xm, &yv, pool_size, seed, b as u64))
        .collect::<Result<Vec<_>>>()?;

    let mut scores: BTreeMap<String, f64> = names
        .iter()
        .enumerate()
        .map(|(j, name)| {
            let count = supports.iter().filter(|s| s.contains(&j)).count();
            (name.clone(), count as f64 / bootstrap_samples as f64)
        })
        .collect();

    if let Some(cut) = correlation_include {
        pull_in_correlated(&xm, &names, &mut scores, inclusion_threshold, cut);
    }

    let selected =
        SelectionResult::select_by_threshold(&names, &scores, inclusion_threshold);
    Ok(SelectionResult {
        algorithm: "isis_bootstrap".into(),
        selected,
        scores,
        hyperparameters: Hyperparameters {
            bootstrap_samples: Some(bootstrap_samples),
            keep_fraction: Some(kf),
            threshold: inclusion_threshold,
            seed: Some(seed),
            ..Hyperparameters::default()
        },
    })
}

/// Screening rounds for one bootstrap sample.
fn bootstrap_support(
    xm: &DMatrix<f64>,
    yv: &DVector<f64>,
    pool_size: usize,
    seed: u64,
    b: u64,
) -> Result<BTreeSet<usize>> {
    let n = xm.nrows();
    let p = xm.ncols();
    let mut rng = derived_rng(seed, 0x1B00_0000 + b);
    let rows: Vec<usize> = (0..n).map(|_| rng.gen_range(0..n)).collect();

    // Center the bootstrap sample so fits need no intercept column.
    let xb = xm.select_rows(rows.iter());
    let yb = DVector::from_iterator(n, rows.iter().map(|&i| yv[i]));
    let col_means: Vec<f64> = (0..p).map(|j| xb.column(j).sum() / n as f64).collect();
    let mut xc = xb;
    for j in 0..p {
        for i in 0..n {
            xc[(i, j)] -= col_means[j];
        }
    }
    let y_mean = yb.sum() / n as f64;
    let yc = yb.map(|v| v - y_mean);
    let col_norms: Vec<f64> = (0..p).map(|j| xc.column(j).norm()).collect();

    let mut active: Vec<usize> = Vec::new();
    for _round in 0..5 {
        let residual = match subset_ols(&xc, &yc, &active) {
            Some((beta, _)) if !active.is_empty() => {
                &yc - xc.select_columns(active.iter()) * beta
            }
            _ => yc.clone(),
        };
        // Pool the inactive variables most correlated with the residual.
        let mut ranked: Vec<(f64, usize)> = (0..p)
            .filter(|j| !active.contains(j))
            .map(|j| {
                let score = if col_norms[j] > 0.0 {
                    (xc.column(j).dot(&residual) / col_norms[j]).abs()
                } else {
                    f64::NEG_INFINITY
                };
                (score, j)
            })
            .collect();
        ranked.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(a.1.cmp(&b.1)));
        let pool: Vec<usize> = ranked.iter().take(pool_size).map(|&(_, j)| j).collect();

        // Grow forward from the active set while the criterion improves.
        let mut current = active.clone();
        let mut current_bic = match subset_rss(&xc, &yc, &current) {
            Some(rss) => gaussian_bic(n, rss, current.len()),
            None => f64::INFINITY,
        };
        loop {
            let mut addition: Option<usize> = None;
            let mut addition_bic = current_bic;
            for &j in &pool {
                if current.contains(&j) {
                    continue;
                }
                let mut trial = current.clone();
                let at = trial.partition_point(|&v| v < j);
                trial.insert(at, j);
                let Some(rss) = subset_rss(&xc, &yc, &trial) else {
                    continue;
                };
                let bic = gaussian_bic(n, rss, trial.len());
                if bic < addition_bic - 1e-12 {
                    addition_bic = bic;
                    addition = Some(j);
                }
            }
            match addition {
                Some(j) => {
                    let at = current.partition_point(|&v| v < j);
                    current.insert(at, j);
                    current_bic = addition_bic;
                }
                None => break,
            }
        }
        if current == active {
            break;
        }
        active = current;
    }
    Ok(active.into_iter().collect())
}

/// Bump the scores of variables strongly correlated with the selection
/// up to the threshold, so they join it.
fn pull_in_correlated(
    xm: &DMatrix<f64>,
    names: &[String],
    scores: &mut BTreeMap<String, f64>,
    threshold: f64,
    cutoff: f64,
) {
    let n = xm.nrows() as f64;
    let p = xm.ncols();
    let means: Vec<f64> = (0..p).map(|j| xm.column(j).sum() / n).collect();
    let sds: Vec<f64> = (0..p)
        .map(|j| {
            (xm.column(j)
                .iter()
                .map(|v| (v - means[j]) * (v - means[j]))
                .sum::<f64>()
                / (n - 1.0))
                .sqrt()
        })
        .collect();
    let selected: Vec<usize> = (0..p)
        .filter(|&j| scores[&names[j]] >= threshold)
        .collect();
    for j in 0..p {
        if scores[&names[j]] >= threshold || sds[j] <= 0.0 {
            continue;
        }
        let related = selected.iter().any(|&s| {
            if sds[s] <= 0.0 {
                return false;
            }
            let cov = (0..xm.nrows())
                .map(|i| (xm[(i, j)] - means[j]) * (xm[(i, s)] - means[s]))
                .sum::<f64>()
                / (n - 1.0);
            (cov / (sds[j] * sds[s])).abs() >= cutoff
        });
        if related {
            scores.insert(names[j].clone(), threshold);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::CounterRng;
    use crate::sem::{scenario, scenario_with};
    use std::collections::BTreeMap as Map;

    fn irc_columns(w: f64, n: usize, seed: u64) -> (Vec<f64>, Vec<(String, Vec<f64>)>) {
        let sem = scenario_with(
            "irc",
            &Map::from([("w1".to_string(), w), ("w2".to_string(), w)]),
        )
        .unwrap();
        let ds = sem.sample(n, seed).unwrap();
        let y = ds.column("y").unwrap().to_vec();
        let xs = ["x1", "x2", "x3"]
            .iter()
            .map(|nm| (nm.to_string(), ds.column(nm).unwrap().to_vec()))
            .collect();
        (y, xs)
    }

    fn refs<'a>(cols: &'a [(String, Vec<f64>)]) -> Vec<(&'a str, &'a [f64])> {
        cols.iter().map(|(n, c)| (n.as_str(), c.as_slice())).collect()
    }

    #[test]
    fn subsample_votes_reject_the_representable_sibling() {
        let (y, cols) = irc_columns(0.75, 1000, 7);
        let x = refs(&cols);
        let out = solar(&y, &x, 10, 0.9, None, 7).unwrap();
        assert_eq!(out.selected, vec!["x1".to_string(), "x2".to_string()]);
        assert!(out.scores["x1"] > 0.9 && out.scores["x2"] > 0.9);
        // invariant: selected = {v : score ≥ threshold}
        for (name, score) in &out.scores {
            assert_eq!(
                out.selected.contains(name),
                *score >= out.hyperparameters.threshold
            );
        }
    }

    #[test]
    fn identical_seeds_reproduce_identical_votes() {
        let (y, cols) = irc_columns(0.75, 400, 11);
        let x = refs(&cols);
        let a = solar(&y, &x, 10, 0.9, None, 11).unwrap();
        let b = solar(&y, &x, 10, 0.9, None, 11).unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
    }

    #[test]
    fn explicit_threshold_skips_the_validation_split() {
        let (y, cols) = irc_columns(0.3, 500, 13);
        let x = refs(&cols);
        let out = solar(&y, &x, 10, 0.9, Some(0.8), 13).unwrap();
        assert_eq!(out.hyperparameters.c, Some(0.8));
        assert!(out.selected.contains(&"x1".to_string()));
        assert!(out.selected.contains(&"x2".to_string()));
    }

    #[test]
    fn markov_blanket_members_are_all_recovered() {
        let sem = scenario("mb_reduced").unwrap();
        let ds = sem.sample(2000, 3).unwrap();
        let y = ds.column("y").unwrap().to_vec();
        let cols: Vec<(String, Vec<f64>)> = ["x1", "x2", "x3", "x4"]
            .iter()
            .map(|nm| (nm.to_string(), ds.column(nm).unwrap().to_vec()))
            .collect();
        let x = refs(&cols);
        let out = solar(&y, &x, 10, 0.9, None, 3).unwrap();
        assert_eq!(
            out.selected,
            vec![
                "x1".to_string(),
                "x2".to_string(),
                "x3".to_string(),
                "x4".to_string()
            ]
        );
    }

    #[test]
    fn solar_parameter_validation() {
        let (y, cols) = irc_columns(0.3, 100, 1);
        let x = refs(&cols);
        assert!(solar(&y, &x, 1, 0.9, None, 1).is_err());
        assert!(solar(&y, &x, 10, 1.0, None, 1).is_err());
        assert!(solar(&y, &x, 10, 0.9, Some(1.5), 1).is_err());
        // 12 rows → subsamples of ⌊0.9·(12 − 2)⌋ = 9 rows: too small.
        let (ys, colss) = irc_columns(0.3, 12, 1);
        let xs = refs(&colss);
        assert!(solar(&ys, &xs, 10, 0.9, None, 1).is_err());
    }

    /// Synthetic screening problem: p = 50, n = 100, three strong
    /// signals among correlated noise.
    fn screening_data(seed: u64, n: usize, p: usize) -> (Vec<f64>, Vec<(String, Vec<f64>)>) {
        let rng = CounterRng::new(seed);
        let cols: Vec<(String, Vec<f64>)> = (0..p)
            .map(|j| {
                (
                    format!("v{}", j + 1),
                    (0..n).map(|i| rng.standard_normal(j as u64, i as u64)).collect(),
                )
            })
            .collect();
        let y: Vec<f64> = (0..n)
            .map(|i| {
                2.0 * cols[0].1[i] - 1.5 * cols[1].1[i] + 1.2 * cols[2].1[i]
                    + rng.standard_normal(p as u64 + 7, i as u64)
            })
            .collect();
        (y, cols)
    }

    #[test]
    fn screening_retains_strong_signals_and_drops_noise() {
        let (y, cols) = screening_data(21, 100, 50);
        let x = refs(&cols);
        let out = isis_bootstrap(&y, &x, 40, None, 0.7, None, 21).unwrap();
        for signal in ["v1", "v2", "v3"] {
            assert!(
                out.selected.contains(&signal.to_string()),
                "{signal} missing: {:?}",
                out.selected
            );
        }
        assert!(out.selected.len() <= 6, "too much noise: {:?}", out.selected);
        for (name, score) in &out.scores {
            assert_eq!(
                out.selected.contains(name),
                *score >= out.hyperparameters.threshold
            );
        }
    }

    #[test]
    fn single_bootstrap_sample_finds_a_dominant_signal() {
        let rng = CounterRng::new(2);
        let n = 200;
        let x1: Vec<f64> = (0..n).map(|i| rng.standard_normal(0, i as u64)).collect();
        let x2: Vec<f64> = (0..n).map(|i| rng.standard_normal(1, i as u64)).collect();
        let y: Vec<f64> = (0..n)
            .map(|i| 3.0 * x1[i] + 0.3 * rng.standard_normal(2, i as u64))
            .collect();
        let cols: Vec<(String, Vec<f64>)> =
            vec![("x1".into(), x1), ("x2".into(), x2)];
        let x = refs(&cols);
        let out = isis_bootstrap(&y, &x, 1, None, 0.7, None, 2).unwrap();
        assert!(out.selected.contains(&"x1".to_string()));
    }

    #[test]
    fn pure_noise_screening_selects_nothing() {
        let rng = CounterRng::new(5);
        let n = 500;
        let mut empties = 0;
        for seed in 0..10u64 {
            let cols: Vec<(String, Vec<f64>)> = (0..10)
                .map(|j| {
                    (
                        format!("v{}", j + 1),
                        (0..n)
                            .map(|i| rng.standard_normal(seed * 40 + j as u64, i as u64))
                            .collect(),
                    )
                })
                .collect();
            let y: Vec<f64> = (0..n)
                .map(|i| rng.standard_normal(seed * 40 + 35, i as u64))
                .collect();
            let x = refs(&cols);
            let out = isis_bootstrap(&y, &x, 40, None, 0.7, None, seed).unwrap();
            if out.selected.is_empty() {
                empties += 1;
            }
        }
        assert!(empties >= 8, "only {empties}/10 noise runs were empty");
    }

    #[test]
    fn screening_is_deterministic_for_a_seed() {
        let (y, cols) = screening_data(30, 100, 40);
        let x = refs(&cols);
        let a = isis_bootstrap(&y, &x, 25, None, 0.7, None, 30).unwrap();
        let b = isis_bootstrap(&y, &x, 25, None, 0.7, None, 30).unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
    }

    #[test]
    fn correlated_companions_can_be_pulled_in() {
        let rng = CounterRng::new(6);
        let n = 200;
        let x1: Vec<f64> = (0..n).map(|i| rng.standard_normal(0, i as u64)).collect();
        // x2 is nearly a copy of x1; x3 is independent noise.
        let x2: Vec<f64> = x1
            .iter()
            .enumerate()
            .map(|(i, v)| 0.98 * v + 0.05 * rng.standard_normal(1, i as u64))
            .collect();
        let x3: Vec<f64> = (0..n).map(|i| rng.standard_normal(2, i as u64)).collect();
        let y: Vec<f64> = (0..n)
            .map(|i| 2.5 * x1[i] + 0.4 * rng.standard_normal(3, i as u64))
            .collect();
        let cols: Vec<(String, Vec<f64>)> = vec![
            ("x1".into(), x1),
            ("x2".into(), x2),
            ("x3".into(), x3),
        ];
        let x = refs(&cols);
        let plain = isis_bootstrap(&y, &x, 30, None, 0.7, None, 6).unwrap();
        assert!(plain.selected.contains(&"x1".to_string()));
        let widened = isis_bootstrap(&y, &x, 30, None, 0.7, Some(0.9), 6).unwrap();
        assert!(widened.selected.contains(&"x1".to_string()));
        assert!(widened.selected.contains(&"x2".to_string()));
        assert!(!widened.selected.contains(&"x3".to_string()));
        for (name, score) in &widened.scores {
            assert_eq!(
                widened.selected.contains(name),
                *score >= widened.hyperparameters.threshold
            );
        }
    }

    #[test]
    fn screening_parameter_validation() {
        let (y, cols) = screening_data(1, 100, 20);
        let x = refs(&cols);
        assert!(isis_bootstrap(&y, &x, 0, None, 0.7, None, 1).is_err());
        assert!(isis_bootstrap(&y, &x, 10, None, 0.0, None, 1).is_err());
        assert!(isis_bootstrap(&y, &x, 10, Some(1.4), 0.7, None, 1).is_err());
        assert!(isis_bootstrap(&y, &x, 10, None, 0.7, Some(1.0), 1).is_err());
        let short_y = vec![1.0; 5];
        let short_cols: Vec<(String, Vec<f64>)> =
            vec![("a".into(), vec![1.0, 2.0, 1.5, 0.5, 2.5])];
        let xs = refs(&short_cols);
        assert!(isis_bootstrap(&short_y, &xs, 10, None, 0.7, None, 1).is_err());
    }
}
