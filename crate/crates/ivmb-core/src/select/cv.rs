//! Cross-validated tuning for the penalized selectors.

use std::collections::BTreeMap;

use nalgebra::DVector;
use serde::Serialize;

use crate::error::{CoreError, Result};
use crate::rng::seeded_permutation;

use super::coordinate::cd_solve;
use super::{
    apply_standardization, column_stats, to_matrix, Hyperparameters, SelectionResult,
};

/// Which penalized regression `cv_select` tunes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectAlgorithm {
    /// Pure ℓ1 penalty.
    Lasso,
    /// Mixed ℓ1/ℓ2 penalty with a tuned mixing weight.
    ElasticNet,
}

/// Rule for reading the tuned penalty off the cross-validation curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CvRule {
    /// Largest penalty whose mean error is within one standard error of
    /// the minimum — the parsimonious default.
    OneStdErr,
    /// Penalty with the smallest mean error.
    MinMse,
}

/// Cross-validated penalized selection with the one-standard-error rule.
///
/// Folds are assigned by a seeded shuffle; per-fold fits standardize by
/// the training rows' statistics only. The penalty grid defaults to 60
/// log-spaced values from the smallest all-zero penalty down three
/// decades; the elastic-net mixing grid defaults to {0.1, …, 0.9}.
/// The final model is refit on the full data at the tuned penalty, and
/// variables with nonzero refit coefficients are selected.
#[allow(clippy::too_many_arguments)]
pub fn cv_select(
    y: &[f64],
    x: &[(&str, &[f64])],
    algorithm: SelectAlgorithm,
    folds: usize,
    lambda_grid: Option<&[f64]>,
    alpha_grid: Option<&[f64]>,
    seed: u64,
) -> Result<SelectionResult> {
    cv_select_with_rule(
        y,
        x,
        algorithm,
        folds,
        lambda_grid,
        alpha_grid,
        seed,
        CvRule::OneStdErr,
    )
}

/// [`cv_select`] with an explicit curve-reading rule.
#[allow(clippy::too_many_arguments)]
pub fn cv_select_with_rule(
    y: &[f64],
    x: &[(&str, &[f64])],
    algorithm: SelectAlgorithm,
    folds: usize,
    lambda_grid: Option<&[f64]>,
    alpha_grid: Option<&[f64]>,
    seed: u64,
    rule: CvRule,
) -> Result<SelectionResult> {
    let n = y.len();
    if folds < 2 || folds > n {
        return Err(CoreError::Invalid(format!(
            "folds must lie in 2..={n}, got {folds}"
        )));
    }
    if let Some(grid) = lambda_grid {
        if grid.is_empty() {
            return Err(CoreError::Invalid("penalty grid is empty".into()));
        }
        if grid.iter().any(|l| !(*l >= 0.0)) {
            return Err(CoreError::Invalid("penalties must be nonnegative".into()));
        }
    }
    let alphas: Vec<f64> = match (algorithm, alpha_grid) {
        (SelectAlgorithm::Lasso, None) => vec![1.0],
        (SelectAlgorithm::Lasso, Some(_)) => {
            return Err(CoreError::Invalid(
                "a mixing grid applies to elastic_net only".into(),
            ))
        }
        (SelectAlgorithm::ElasticNet, None) => (1..=9).map(|i| i as f64 / 10.0).collect(),
        (SelectAlgorithm::ElasticNet, Some(grid)) => {
            if grid.is_empty() || grid.iter().any(|a| !(*a > 0.0 && *a <= 1.0)) {
                return Err(CoreError::Invalid(
                    "mixing weights must lie in (0, 1]".into(),
                ));
            }
            grid.to_vec()
        }
    };

    let (xm, names) = to_matrix(x, n)?;
    let p = xm.ncols();
    let yv = DVector::from_column_slice(y);

    // Full-data standardization defines the default grid and the final
    // refit scale.
    let (full_means, full_sds) = column_stats(&xm)?;
    let xs_full = apply_standardization(&xm, &full_means, &full_sds);
    let y_mean = yv.sum() / n as f64;
    let yc_full = yv.map(|v| v - y_mean);

    // Per-mixing penalty grids, descending so fits warm-start.
    let grids: Vec<Vec<f64>> = alphas
        .iter()
        .map(|&alpha| match lambda_grid {
            Some(grid) => {
                let mut g = grid.to_vec();
                g.sort_by(|a, b| b.partial_cmp(a).unwrap());
                g
            }
            None => {
                let corr_max = (0..p)
                    .map(|j| (xs_full.column(j).dot(&yc_full) / n as f64).abs())
                    .fold(0.0_f64, f64::max);
                let lambda_max = (corr_max / alpha).max(1e-12);
                (0..60)
                    .map(|k| lambda_max * 10f64.powf(-3.0 * k as f64 / 59.0))
                    .collect()
            }
        })
        .collect();

    // Fold assignment by seeded shuffle; the first n mod folds folds
    // take one extra row.
    let perm = seeded_permutation(seed, 0xCF01, n);
    let mut fold_rows: Vec<Vec<usize>> = Vec::with_capacity(folds);
    let base = n / folds;
    let extra = n % folds;
    let mut pos = 0;
    for i in 0..folds {
        let len = base + usize::from(i < extra);
        fold_rows.push(perm[pos..pos + len].to_vec());
        pos += len;
    }

    let mut undersized = false;
    // mse[alpha_idx][lambda_idx][fold]
    let mut mse = vec![vec![vec![0.0_f64; folds]; grids[0].len()]; alphas.len()];
    for (f, val_rows) in fold_rows.iter().enumerate() {
        let train_rows: Vec<usize> = fold_rows
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != f)
            .flat_map(|(_, rows)| rows.iter().copied())
            .collect();
        if train_rows.len() < p + 1 {
            undersized = true;
        }
        let xtr = xm.select_rows(train_rows.iter());
        let ytr = DVector::from_iterator(train_rows.len(), train_rows.iter().map(|&i| yv[i]));
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
        for (ai, &alpha) in alphas.iter().enumerate() {
            let mut beta = vec![0.0_f64; p];
            for (li, &lambda) in grids[ai].iter().enumerate() {
                cd_solve(&xtr_s, &ytr_c, lambda, alpha, &mut beta)?;
                let bv = DVector::from_column_slice(&beta);
                let resid = &yva_c - &xva_s * bv;
                mse[ai][li][f] = resid.norm_squared() / val_rows.len() as f64;
            }
        }
    }

    // Mean and standard error of the fold errors per grid point.
    let kf = folds as f64;
    let summary: Vec<Vec<(f64, f64)>> = mse
        .iter()
        .map(|per_lambda| {
            per_lambda
                .iter()
                .map(|per_fold| {
                    let mean = per_fold.iter().sum::<f64>() / kf;
                    let var = per_fold
                        .iter()
                        .map(|v| (v - mean) * (v - mean))
                        .sum::<f64>()
                        / (kf - 1.0);
                    (mean, var.sqrt() / kf.sqrt())
                })
                .collect()
        })
        .collect();

    let (mut best_ai, mut best_li, mut best_mean) = (0usize, 0usize, f64::INFINITY);
    for (ai, curve) in summary.iter().enumerate() {
        for (li, &(mean, _)) in curve.iter().enumerate() {
            if mean < best_mean {
                best_mean = mean;
                best_ai = ai;
                best_li = li;
            }
        }
    }
    let chosen_li = match rule {
        CvRule::MinMse => best_li,
        CvRule::OneStdErr => {
            let (min_mean, min_se) = summary[best_ai][best_li];
            let cutoff = min_mean + min_se;
            (0..=best_li)
                .find(|&li| summary[best_ai][li].0 <= cutoff)
                .unwrap_or(best_li)
        }
    };
    let alpha = alphas[best_ai];
    let lambda = grids[best_ai][chosen_li];

    // Final refit on the fully standardized data, warmed along the grid.
    let mut beta = vec![0.0_f64; p];
    for &l in grids[best_ai].iter().take(chosen_li + 1) {
        cd_solve(&xs_full, &yc_full, l, alpha, &mut beta)?;
    }

    let threshold = 1e-10;
    let scores: BTreeMap<String, f64> = names
        .iter()
        .zip(&beta)
        .map(|(name, b)| (name.clone(), b.abs()))
        .collect();
    let selected = SelectionResult::select_by_threshold(&names, &scores, threshold);
    Ok(SelectionResult {
        algorithm: match algorithm {
            SelectAlgorithm::Lasso => "cv_lasso".into(),
            SelectAlgorithm::ElasticNet => "cv_elastic_net".into(),
        },
        selected,
        scores,
        hyperparameters: Hyperparameters {
            lambda: Some(lambda),
            alpha: Some(alpha),
            folds: Some(folds),
            threshold,
            seed: Some(seed),
            undersized_folds: undersized,
            ..Hyperparameters::default()
        },
    })
}
