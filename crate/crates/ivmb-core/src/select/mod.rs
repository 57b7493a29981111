//! Variable selection: regularized paths, cross-validated shrinkage,
//! screening-based and subsample-stability selectors, plus diagnostics
//! for when selection can be trusted.
//!
//! Every selector returns a [`SelectionResult`] holding a per-variable
//! score and a threshold, with the invariant that the selected set is
//! exactly the set of variables whose score reaches the threshold.

mod coordinate;
mod cv;
mod lars;
mod stability;

pub use coordinate::{elastic_net_cd, elastic_net_kkt_gap, lasso_cd, lasso_kkt_gap};
pub use cv::{cv_select, cv_select_with_rule, CvRule, SelectAlgorithm};
pub use lars::{lars_path, LarsPath, LarsStep};
pub use stability::{isis_bootstrap, solar};

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::data::Dataset;
use crate::error::{CoreError, Result};
use crate::regress::RegressionFit;

/// Tuning constants of a selection run; serialized without absent fields.
#[derive(Debug, Clone, Default, Serialize)]
pub struct Hyperparameters {
    /// Regularization strength of the final fit.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    /// Elastic-net mixing weight (1 = pure ℓ1).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    /// Number of cross-validation folds.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub folds: Option<usize>,
    /// Number of bootstrap replicates.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bootstrap_samples: Option<usize>,
    /// Fraction of ranked predictors kept per screening round.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub keep_fraction: Option<f64>,
    /// Number of subsamples.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub subsamples: Option<usize>,
    /// Subsample size as a fraction of the training rows.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub subsample_fraction: Option<f64>,
    /// Tuned (or given) inclusion frequency for subsample selection.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    /// Score threshold that defines the selected set.
    pub threshold: f64,
    /// Random seed used to derive shuffles and subsamples.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// True when some training fold had fewer rows than parameters + 1.
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub undersized_folds: bool,
}

/// Outcome of a selection procedure.
#[derive(Debug, Clone, Serialize)]
pub struct SelectionResult {
    /// Which procedure produced this result.
    pub algorithm: String,
    /// Selected variable names, in input column order.
    pub selected: Vec<String>,
    /// Per-variable score: absolute final coefficient for the shrinkage
    /// selectors, inclusion frequency for the resampling selectors.
    pub scores: BTreeMap<String, f64>,
    /// Tuning constants, including the threshold defining `selected`.
    pub hyperparameters: Hyperparameters,
}

impl SelectionResult {
    /// Rebuild `selected` from scores and threshold, preserving the
    /// order of `names`. Selectors call this so the set/score/threshold
    /// invariant holds by construction.
    fn select_by_threshold(names: &[String], scores: &BTreeMap<String, f64>, threshold: f64) -> Vec<String> {
        names
            .iter()
            .filter(|n| scores.get(*n).copied().unwrap_or(0.0) >= threshold)
            .cloned()
            .collect()
    }
}

impl fmt::Display for SelectionResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "algorithm: {}", self.algorithm)?;
        writeln!(
            f,
            "selected ({}): {}",
            self.selected.len(),
            if self.selected.is_empty() {
                "(none)".to_string()
            } else {
                self.selected.join(", ")
            }
        )?;
        writeln!(f, "threshold: {}", self.hyperparameters.threshold)?;
        let mut ranked: Vec<(&String, &f64)> = self.scores.iter().collect();
        ranked.sort_by(|a, b| b.1.partial_cmp(a.1).unwrap().then_with(|| a.0.cmp(b.0)));
        for (name, score) in ranked.iter().take(20) {
            writeln!(f, "  {name:<16} {score:.4}")?;
        }
        if ranked.len() > 20 {
            writeln!(f, "  … {} more", ranked.len() - 20)?;
        }
        Ok(())
    }
}

/// Correlated-group diagnostic around one anchor variable.
#[derive(Debug, Clone, Serialize)]
pub struct GroupReport {
    /// The anchor variable.
    pub anchor: String,
    /// Variables whose absolute correlation with the anchor exceeds the
    /// cutoff.
    pub members: Vec<String>,
    /// Correlation cutoff that defined the group.
    pub cutoff: f64,
    /// Regression of the standardized anchor on its standardized
    /// members; absent when the group has no members.
    pub fit: Option<RegressionFit>,
    /// ℓ1 norm of the standardized member coefficients.
    pub sum_abs_coefficients: f64,
    /// True when that ℓ1 norm reaches 1 — the anchor is representable by
    /// its group, so sparse selection among them is unreliable.
    pub flagged: bool,
}

impl fmt::Display for GroupReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "group around {} (|corr| ≥ {}): {}",
            self.anchor,
            self.cutoff,
            if self.members.is_empty() {
                "(no members)".to_string()
            } else {
                self.members.join(", ")
            }
        )?;
        write!(
            f,
            "ℓ1 of standardized coefficients = {:.4}{}",
            self.sum_abs_coefficients,
            if self.flagged { "  [flagged]" } else { "" }
        )
    }
}

// ---------------------------------------------------------------------
// Shared internal linear-algebra helpers.
// ---------------------------------------------------------------------

/// Convert named columns into a matrix, validating lengths and names.
pub(crate) fn to_matrix(x: &[(&str, &[f64])], n: usize) -> Result<(DMatrix<f64>, Vec<String>)> {
    if x.is_empty() {
        return Err(CoreError::Invalid("no candidate columns given".into()));
    }
    let mut names = Vec::with_capacity(x.len());
    let mut m = DMatrix::zeros(n, x.len());
    for (j, (name, col)) in x.iter().enumerate() {
        if names.iter().any(|existing: &String| existing == name) {
            return Err(CoreError::Invalid(format!("duplicate column name {name}")));
        }
        if col.len() != n {
            return Err(CoreError::Invalid(format!(
                "column {name} has {} rows, expected {n}",
                col.len()
            )));
        }
        names.push(name.to_string());
        for (i, &v) in col.iter().enumerate() {
            m[(i, j)] = v;
        }
    }
    Ok((m, names))
}

/// Column means and sample standard deviations (n−1 denominator).
pub(crate) fn column_stats(x: &DMatrix<f64>) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = x.nrows() as f64;
    let mut means = Vec::with_capacity(x.ncols());
    let mut sds = Vec::with_capacity(x.ncols());
    for j in 0..x.ncols() {
        let col = x.column(j);
        let mean = col.sum() / n;
        let var = col.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
        if var <= 0.0 {
            return Err(CoreError::Numeric(format!(
                "column {j} is constant; cannot standardize"
            )));
        }
        means.push(mean);
        sds.push(var.sqrt());
    }
    Ok((means, sds))
}

/// Standardize columns by the given statistics.
pub(crate) fn apply_standardization(x: &DMatrix<f64>, means: &[f64], sds: &[f64]) -> DMatrix<f64> {
    let mut z = x.clone();
    for j in 0..z.ncols() {
        for i in 0..z.nrows() {
            z[(i, j)] = (z[(i, j)] - means[j]) / sds[j];
        }
    }
    z
}

/// Least squares of `y` on the chosen columns of `x` (no intercept;
/// callers pass centered data), returning coefficients and RSS. An
/// empty subset yields no coefficients and RSS = y·y. Returns `None`
/// when the subset is numerically rank-deficient.
pub(crate) fn subset_ols(
    x: &DMatrix<f64>,
    y: &DVector<f64>,
    subset: &[usize],
) -> Option<(DVector<f64>, f64)> {
    if subset.is_empty() {
        return Some((DVector::zeros(0), y.dot(y)));
    }
    let sub = x.select_columns(subset.iter());
    let svd = sub.clone().svd(true, true);
    let max_sv = svd.singular_values.max();
    if !(max_sv > 0.0) || svd.singular_values.iter().any(|&s| s <= max_sv * 1e-10) {
        return None;
    }
    let beta = svd.solve(y, max_sv * 1e-12).ok()?;
    let resid = y - &sub * &beta;
    Some((beta, resid.dot(&resid)))
}

/// RSS of least squares of `y` on the chosen columns of `x`; see
/// [`subset_ols`].
pub(crate) fn subset_rss(x: &DMatrix<f64>, y: &DVector<f64>, subset: &[usize]) -> Option<f64> {
    subset_ols(x, y, subset).map(|(_, rss)| rss)
}

/// Gaussian BIC up to constants: n·ln(RSS/n) + k·ln(n).
pub(crate) fn gaussian_bic(n: usize, rss: f64, k: usize) -> f64 {
    let nf = n as f64;
    nf * (rss / nf).max(1e-300).ln() + k as f64 * nf.ln()
}

// ---------------------------------------------------------------------
// Irrepresentability and correlated-group diagnostics.
// ---------------------------------------------------------------------

/// Irrepresentability value of a support within a predictor covariance:
/// the largest ℓ1 norm, over off-support columns j, of the population
/// regression coefficients of j on the support. Values at or above 1
/// mean some off-support variable is representable by the support, and
/// ℓ1 selection can prefer it to a true member.
pub fn irc_value(sigma: &DMatrix<f64>, support: &[usize]) -> Result<f64> {
    let p = sigma.nrows();
    if sigma.ncols() != p {
        return Err(CoreError::Invalid("covariance must be square".into()));
    }
    if support.is_empty() {
        return Err(CoreError::Invalid("support must not be empty".into()));
    }
    for &j in support {
        if j >= p {
            return Err(CoreError::Invalid(format!(
                "support index {j} out of range for {p} columns"
            )));
        }
    }
    let k = support.len();
    let mut sigma_ss = DMatrix::zeros(k, k);
    for (r, &i) in support.iter().enumerate() {
        for (c, &j) in support.iter().enumerate() {
            sigma_ss[(r, c)] = sigma[(i, j)];
        }
    }
    let inv = sigma_ss
        .try_inverse()
        .ok_or_else(|| CoreError::Numeric("support covariance is singular".into()))?;
    let mut worst: f64 = 0.0;
    let mut any = false;
    for j in 0..p {
        if support.contains(&j) {
            continue;
        }
        any = true;
        let mut sigma_js = DVector::zeros(k);
        for (r, &i) in support.iter().enumerate() {
            sigma_js[r] = sigma[(j, i)];
        }
        let coefs = &inv * sigma_js;
        worst = worst.max(coefs.iter().map(|v| v.abs()).sum());
    }
    if !any {
        return Err(CoreError::Invalid(
            "support covers every column; nothing to check".into(),
        ));
    }
    Ok(worst)
}

/// [`irc_value`] from data: sample covariance of the dataset's columns,
/// support given by name. The caller decides which columns count as
/// predictors (the response should not be among them).
pub fn irc_value_from_data(ds: &Dataset, support: &[&str]) -> Result<f64> {
    let n = ds.n() as f64;
    let p = ds.p();
    let mut sigma = DMatrix::zeros(p, p);
    let cols: Vec<&[f64]> = (0..p).map(|j| ds.column_at(j)).collect();
    let means: Vec<f64> = cols.iter().map(|c| c.iter().sum::<f64>() / n).collect();
    for i in 0..p {
        for j in i..p {
            let cov = cols[i]
                .iter()
                .zip(cols[j])
                .map(|(a, b)| (a - means[i]) * (b - means[j]))
                .sum::<f64>()
                / (n - 1.0);
            sigma[(i, j)] = cov;
            sigma[(j, i)] = cov;
        }
    }
    let support_idx: Vec<usize> = support
        .iter()
        .map(|s| ds.index_of(s))
        .collect::<Result<_>>()?;
    irc_value(&sigma, &support_idx)
}

/// Collect the correlated group around `anchor` (columns whose absolute
/// correlation with it exceeds `cutoff`) and measure whether the anchor
/// is ℓ1-representable by the group.
pub fn grouping_diagnostic(ds: &Dataset, anchor: &str, cutoff: f64) -> Result<GroupReport> {
    if !(cutoff > 0.0 && cutoff < 1.0) {
        return Err(CoreError::Invalid(format!(
            "cutoff must lie in (0, 1), got {cutoff}"
        )));
    }
    let a = ds.column(anchor)?;
    let n = ds.n() as f64;
    let mean_a = a.iter().sum::<f64>() / n;
    let sd_a = (a.iter().map(|v| (v - mean_a) * (v - mean_a)).sum::<f64>() / (n - 1.0)).sqrt();
    if sd_a <= 0.0 {
        return Err(CoreError::Numeric(format!("column {anchor} is constant")));
    }
    let mut members = Vec::new();
    let mut member_cols: Vec<Vec<f64>> = Vec::new();
    for name in ds.names() {
        if name == anchor {
            continue;
        }
        let col = ds.column(name)?;
        let mean = col.iter().sum::<f64>() / n;
        let sd = (col.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0)).sqrt();
        if sd <= 0.0 {
            continue;
        }
        let corr = a
            .iter()
            .zip(col)
            .map(|(u, v)| (u - mean_a) * (v - mean))
            .sum::<f64>()
            / ((n - 1.0) * sd_a * sd);
        if corr.abs() > cutoff {
            members.push(name.clone());
            member_cols.push(col.iter().map(|v| (v - mean) / sd).collect());
        }
    }
    if members.is_empty() {
        return Ok(GroupReport {
            anchor: anchor.to_string(),
            members,
            cutoff,
            fit: None,
            sum_abs_coefficients: 0.0,
            flagged: false,
        });
    }
    let anchor_std: Vec<f64> = a.iter().map(|v| (v - mean_a) / sd_a).collect();
    let regressors: Vec<(&str, &[f64])> = members
        .iter()
        .zip(&member_cols)
        .map(|(name, col)| (name.as_str(), col.as_slice()))
        .collect();
    let fit = crate::regress::ols(&anchor_std, &regressors, false)?;
    let sum_abs: f64 = fit.coefficients.iter().map(|c| c.abs()).sum();
    Ok(GroupReport {
        anchor: anchor.to_string(),
        members,
        cutoff,
        flagged: sum_abs >= 1.0,
        sum_abs_coefficients: sum_abs,
        fit: Some(fit),
    })
}

/// Widen a selection by flagged correlated groups: whenever a flagged
/// group touches the selected set, its anchor and members are pulled in.
/// Added variables receive a score equal to the threshold, keeping the
/// score/threshold invariant intact.
pub fn rectify(selection: &SelectionResult, groups: &[GroupReport]) -> SelectionResult {
    let threshold = selection.hyperparameters.threshold;
    let mut scores = selection.scores.clone();
    let mut names: Vec<String> = scores.keys().cloned().collect();
    let selected_now: Vec<String> = selection.selected.clone();
    for group in groups {
        if !group.flagged {
            continue;
        }
        let touches = selected_now.iter().any(|s| {
            s == &group.anchor || group.members.contains(s)
        });
        if !touches {
            continue;
        }
        for name in std::iter::once(&group.anchor).chain(group.members.iter()) {
            let entry = scores.entry(name.clone()).or_insert(0.0);
            if *entry < threshold {
                *entry = threshold;
            }
            if !names.contains(name) {
                names.push(name.clone());
            }
        }
    }
    let selected = SelectionResult::select_by_threshold(&names, &scores, threshold);
    SelectionResult {
        algorithm: format!("{}_rectified", selection.algorithm),
        selected,
        scores,
        hyperparameters: selection.hyperparameters.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sem::scenario_with;
    use std::collections::BTreeMap as Map;

    #[test]
    fn irc_value_recovers_structural_weights() {
        for (w, want) in [(0.75, 1.5), (0.3, 0.6)] {
            let sem = scenario_with(
                "irc",
                &Map::from([("w1".to_string(), w), ("w2".to_string(), w)]),
            )
            .unwrap();
            let sigma = sem.population_covariance().unwrap();
            // Predictors are x1, x2, x3 = columns 0..3; support {x1, x2}.
            let predictors = sigma.view((0, 0), (3, 3)).into_owned();
            let got = irc_value(&predictors, &[0, 1]).unwrap();
            assert!((got - want).abs() < 1e-12, "w={w}: {got}");
        }
    }

    #[test]
    fn irc_value_from_samples_approaches_population() {
        let sem = scenario_with("irc", &Map::new()).unwrap();
        let ds = sem.sample(200_000, 5).unwrap();
        let predictors = ds.select(&["x1", "x2", "x3"]).unwrap();
        let got = irc_value_from_data(&predictors, &["x1", "x2"]).unwrap();
        assert!((got - 1.5).abs() < 0.02, "{got}");
    }

    #[test]
    fn grouping_flags_a_representable_anchor() {
        // x2 and x3 jointly reconstruct x1 almost exactly.
        let n = 500;
        let base: Vec<f64> = (0..n).map(|i| ((i * 37 % 101) as f64 - 50.0) / 29.0).collect();
        let noise: Vec<f64> = (0..n).map(|i| ((i * 61 % 89) as f64 - 44.0) / 300.0).collect();
        let x1: Vec<f64> = base.iter().zip(&noise).map(|(b, e)| b + e).collect();
        let x2: Vec<f64> = base.iter().map(|b| 0.7 * b).collect();
        let x3: Vec<f64> = base.iter().zip(&noise).map(|(b, e)| 0.4 * b - e).collect();
        let indep: Vec<f64> = (0..n).map(|i| ((i * 17 % 97) as f64 - 48.0) / 31.0).collect();
        let ds = Dataset::new(
            vec!["x1".into(), "x2".into(), "x3".into(), "w".into()],
            vec![x1, x2, x3, indep],
        )
        .unwrap();
        let report = grouping_diagnostic(&ds, "x1", 0.8).unwrap();
        assert_eq!(report.members, vec!["x2".to_string(), "x3".to_string()]);
        assert!(report.flagged, "sum = {}", report.sum_abs_coefficients);
        assert!(report.sum_abs_coefficients >= 1.0);

        let lonely = grouping_diagnostic(&ds, "w", 0.8).unwrap();
        assert!(lonely.members.is_empty() && !lonely.flagged);
        assert!(lonely.fit.is_none());
    }

    #[test]
    fn duplicated_anchor_is_flagged_with_perfect_fit() {
        let n = 300;
        let base: Vec<f64> = (0..n).map(|i| ((i * 13 % 103) as f64 - 51.0) / 23.0).collect();
        let twin = base.clone();
        let other: Vec<f64> = (0..n).map(|i| ((i * 29 % 97) as f64 - 48.0) / 31.0).collect();
        let ds = Dataset::new(
            vec!["a".into(), "twin".into(), "w".into()],
            vec![base, twin, other],
        )
        .unwrap();
        let report = grouping_diagnostic(&ds, "a", 0.9).unwrap();
        assert_eq!(report.members, vec!["twin".to_string()]);
        assert!(report.flagged);
        let fit = report.fit.unwrap();
        assert!((fit.r_squared - 1.0).abs() < 1e-10);
        assert!((report.sum_abs_coefficients - 1.0).abs() < 1e-8);
    }

    #[test]
    fn equicorrelated_block_matches_the_analytic_projection() {
        // Five variables with pairwise correlation 0.7: regressing one
        // on the other four gives coefficients ρ/(1 + 3ρ) each, so the
        // ℓ1 norm is 4ρ/(1 + 3ρ) ≈ 0.9032.
        // A hidden common factor with loading √0.7 and own noise √0.3
        // yields exactly that correlation structure.
        let mut names: Vec<String> = vec!["f".into()];
        names.extend((1..=5).map(|i| format!("g{i}")));
        let mut dag = crate::graph::Dag::new(
            names,
            (1..=5).map(|i| ("f".to_string(), format!("g{i}"))).collect(),
            Vec::new(),
        )
        .unwrap();
        dag.set_latent("f", true).unwrap();
        let load = 0.7_f64.sqrt();
        let edges: Vec<(String, f64)> = (1..=5).map(|i| (format!("g{i}"), load)).collect();
        let edge_refs: Vec<(&str, &str, f64)> =
            edges.iter().map(|(g, w)| ("f", g.as_str(), *w)).collect();
        let mut sem = crate::sem::LinearSem::new(dag, &edge_refs).unwrap();
        for i in 1..=5 {
            sem = sem.with_scale(&format!("g{i}"), 0.3_f64.sqrt()).unwrap();
        }
        let ds = sem.sample(10_000, 17).unwrap();
        let report = grouping_diagnostic(&ds, "g1", 0.5).unwrap();
        assert_eq!(report.members.len(), 4, "{:?}", report.members);
        let want = 4.0 * 0.7 / (1.0 + 3.0 * 0.7);
        assert!(
            (report.sum_abs_coefficients - want).abs() < 0.05,
            "{} vs {want}",
            report.sum_abs_coefficients
        );
        assert!(!report.flagged);
    }

    #[test]
    fn cutoff_outside_the_open_interval_is_rejected() {
        let ds = Dataset::new(
            vec!["a".into(), "b".into()],
            vec![vec![1.0, 2.0, 3.0, 4.0], vec![2.0, 1.0, 4.0, 3.0]],
        )
        .unwrap();
        assert!(grouping_diagnostic(&ds, "a", 0.0).is_err());
        assert!(grouping_diagnostic(&ds, "a", 1.0).is_err());
    }

    #[test]
    fn rectify_unions_flagged_groups_and_keeps_the_invariant() {
        let selection = SelectionResult {
            algorithm: "solar".into(),
            selected: vec!["x1".into()],
            scores: Map::from([
                ("x1".to_string(), 0.9),
                ("x2".to_string(), 0.3),
                ("x3".to_string(), 0.1),
            ]),
            hyperparameters: Hyperparameters {
                threshold: 0.8,
                ..Hyperparameters::default()
            },
        };
        let flagged = GroupReport {
            anchor: "x1".into(),
            members: vec!["x2".into()],
            cutoff: 0.8,
            fit: None,
            sum_abs_coefficients: 1.2,
            flagged: true,
        };
        let ignored = GroupReport {
            anchor: "x3".into(),
            members: vec!["x9".into()],
            cutoff: 0.8,
            fit: None,
            sum_abs_coefficients: 1.5,
            flagged: true,
        };
        let out = rectify(&selection, &[flagged, ignored]);
        assert_eq!(out.algorithm, "solar_rectified");
        assert_eq!(out.selected, vec!["x1".to_string(), "x2".to_string()]);
        // invariant: selected = {v : score ≥ threshold}
        for (name, score) in &out.scores {
            assert_eq!(
                out.selected.contains(name),
                *score >= out.hyperparameters.threshold,
                "{name}"
            );
        }
        // x3's group did not touch the selection, so x9 stays out.
        assert!(!out.scores.contains_key("x9"));
    }
}
