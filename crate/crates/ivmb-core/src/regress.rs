//! Least squares, two-stage least squares, and endogeneity diagnostics.
//!
//! Everything funnels through one QR-based solver with explicit rank
//! detection, so a collinear design fails with the name of the offending
//! column instead of producing garbage coefficients.
//!
//! The endogeneity diagnostics are computed along two deliberately
//! different routes — quadratic forms in projection differences (Durbin,
//! Wu–Hausman) and control-function regressions (the two Wooldridge
//! variants) — which agree asymptotically but exercise disjoint code
//! paths.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{CoreError, Result};
use crate::num::{chi2_sf, f_sf, t_sf_two_sided};

/// A fitted linear regression.
#[derive(Debug, Clone, Serialize)]
pub struct RegressionFit {
    /// Coefficient names; `(intercept)` first when one was requested.
    pub names: Vec<String>,
    /// Point estimates, aligned with `names`.
    pub coefficients: Vec<f64>,
    /// Standard errors.
    pub std_errors: Vec<f64>,
    /// t-statistics (coefficient over standard error).
    pub t_values: Vec<f64>,
    /// Two-sided p-values on n − k degrees of freedom.
    pub p_values: Vec<f64>,
    /// Coefficient of determination.
    pub r_squared: f64,
    /// R² penalized for the parameter count.
    pub adj_r_squared: f64,
    /// Number of observations.
    pub n: usize,
    /// Number of estimated coefficients (intercept included).
    pub n_params: usize,
    /// Per-observation residuals. Excluded from serialized reports: they
    /// scale with the data, not with the fit summary.
    #[serde(skip_serializing)]
    pub residuals: Vec<f64>,
}

/// Which reference distribution a test statistic is compared against.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Distribution {
    /// Chi-square with `df` degrees of freedom.
    ChiSquare { df: f64 },
    /// F with numerator `df1` and denominator `df2` degrees of freedom.
    F { df1: f64, df2: f64 },
}

/// One hypothesis test outcome.
#[derive(Debug, Clone, Serialize)]
pub struct TestResult {
    /// Test identifier: `durbin`, `wu_hausman`, `wooldridge_regression`,
    /// or `wooldridge_score`.
    pub name: String,
    /// Test statistic.
    pub statistic: f64,
    /// Reference distribution.
    pub distribution: Distribution,
    /// Upper-tail p-value.
    pub p_value: f64,
}

/// Two-stage least squares output.
#[derive(Debug, Clone, Serialize)]
pub struct TwoSlsFit {
    /// Second-stage fit. Standard errors, R², and residuals use the
    /// observed endogenous regressor, not its first-stage fit.
    pub fit: RegressionFit,
    /// First stage: the endogenous regressor on exogenous regressors and
    /// instruments.
    pub first_stage: RegressionFit,
    /// F-statistic of the excluded instruments in the first stage.
    pub first_stage_f: f64,
    /// Upper-tail p-value of `first_stage_f`.
    pub first_stage_f_p: f64,
    /// True when the first-stage F falls below the conventional
    /// rule-of-thumb threshold of 10.
    pub weak_instruments: bool,
}

/// Full instrumented-regression report: naive and instrumented fits plus
/// the four endogeneity tests.
#[derive(Debug, Clone, Serialize)]
pub struct IvReport {
    /// Plain least squares of the outcome on all regressors.
    pub ols_fit: RegressionFit,
    /// Two-stage least squares fit.
    pub tsls_fit: RegressionFit,
    /// First-stage fit.
    pub first_stage_fit: RegressionFit,
    /// First-stage F on the excluded instruments.
    pub first_stage_f: f64,
    /// p-value of the first-stage F.
    pub first_stage_f_p: f64,
    /// First-stage F below 10.
    pub weak_instruments: bool,
    /// Exactly four tests: durbin, wu_hausman, wooldridge_regression,
    /// wooldridge_score.
    pub tests: Vec<TestResult>,
    /// Names of the excluded instruments.
    pub instrument_names: Vec<String>,
    /// Name of the endogenous regressor.
    pub endogenous_name: String,
}

/// Format with six significant digits, switching to scientific notation
/// outside a comfortable range.
fn sig6(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let magnitude = x.abs().log10().floor() as i32;
    if (-4..6).contains(&magnitude) {
        let decimals = (5 - magnitude).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        format!("{x:.5e}")
    }
}

impl fmt::Display for RegressionFit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let width = self
            .names
            .iter()
            .map(|n| n.len())
            .max()
            .unwrap_or(4)
            .max("coefficient".len());
        writeln!(
            f,
            "{:<width$}  {:>13} {:>13} {:>10} {:>12}",
            "coefficient", "estimate", "std.error", "t-value", "p-value"
        )?;
        for i in 0..self.names.len() {
            writeln!(
                f,
                "{:<width$}  {:>13} {:>13} {:>10} {:>12}",
                self.names[i],
                sig6(self.coefficients[i]),
                sig6(self.std_errors[i]),
                sig6(self.t_values[i]),
                sig6(self.p_values[i]),
            )?;
        }
        write!(
            f,
            "n = {}, params = {}, R² = {}, adj. R² = {}",
            self.n,
            self.n_params,
            sig6(self.r_squared),
            sig6(self.adj_r_squared)
        )
    }
}

impl fmt::Display for TestResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let dist = match self.distribution {
            Distribution::ChiSquare { df } => format!("chi-square({df})"),
            Distribution::F { df1, df2 } => format!("F({df1}, {df2})"),
        };
        write!(
            f,
            "{:<22} {:>12} ~ {:<16} p = {}",
            self.name,
            sig6(self.statistic),
            dist,
            sig6(self.p_value)
        )
    }
}

impl fmt::Display for IvReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "== least squares ==\n{}\n", self.ols_fit)?;
        writeln!(
            f,
            "== first stage ({} on exogenous + instruments {:?}) ==\n{}",
            self.endogenous_name, self.instrument_names, self.first_stage_fit
        )?;
        writeln!(
            f,
            "excluded-instrument F = {} (p = {}){}\n",
            sig6(self.first_stage_f),
            sig6(self.first_stage_f_p),
            if self.weak_instruments {
                "  [weak instruments]"
            } else {
                ""
            }
        )?;
        writeln!(f, "== two-stage least squares ==\n{}\n", self.tsls_fit)?;
        writeln!(f, "== endogeneity tests ==")?;
        for t in &self.tests {
            writeln!(f, "{t}")?;
        }
        Ok(())
    }
}

/// Thin QR by twice-iterated modified Gram–Schmidt. Errors with the name
/// of the first column that is (numerically) a linear combination of the
/// columns before it.
fn qr_with_names(x: &DMatrix<f64>, names: &[String]) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let (n, k) = (x.nrows(), x.ncols());
    let mut q = x.clone();
    let mut r = DMatrix::zeros(k, k);
    for j in 0..k {
        let original_norm = x.column(j).norm();
        for _pass in 0..2 {
            for i in 0..j {
                let proj = q.column(i).dot(&q.column(j));
                r[(i, j)] += proj;
                let qi = q.column(i).clone_owned();
                let mut col = q.column_mut(j);
                col.axpy(-proj, &qi, 1.0);
            }
        }
        let norm = q.column(j).norm();
        if norm <= original_norm * 1e-10 + 1e-300 {
            return Err(CoreError::Numeric(format!(
                "design is rank-deficient: column {} is linearly dependent \
                 on the columns before it",
                names[j]
            )));
        }
        r[(j, j)] = norm;
        q.column_mut(j).scale_mut(1.0 / norm);
    }
    debug_assert_eq!(q.nrows(), n);
    Ok((q, r))
}

/// Assemble a design matrix from named columns, prepending an intercept
/// column when requested. Returns (matrix, coefficient names).
fn design(
    x: &[(&str, &[f64])],
    intercept: bool,
    n: usize,
) -> Result<(DMatrix<f64>, Vec<String>)> {
    let mut names = Vec::new();
    let mut cols: Vec<&[f64]> = Vec::new();
    if intercept {
        names.push("(intercept)".to_string());
    }
    for (name, col) in x {
        if names.iter().any(|existing| existing == name) {
            return Err(CoreError::Invalid(format!("duplicate regressor name {name}")));
        }
        if col.len() != n {
            return Err(CoreError::Invalid(format!(
                "regressor {name} has {} rows, expected {n}",
                col.len()
            )));
        }
        names.push(name.to_string());
        cols.push(col);
    }
    let k = names.len();
    let mut m = DMatrix::zeros(n, k);
    let offset = usize::from(intercept);
    if intercept {
        m.column_mut(0).fill(1.0);
    }
    for (j, col) in cols.iter().enumerate() {
        for (i, &v) in col.iter().enumerate() {
            m[(i, j + offset)] = v;
        }
    }
    Ok((m, names))
}

/// Coefficients and residuals of `y` on a prebuilt design, with rank
/// checking. Returns (beta, residuals, rss, (XᵀX)⁻¹).
fn solve_ls(
    design: &DMatrix<f64>,
    names: &[String],
    y: &DVector<f64>,
) -> Result<(DVector<f64>, DVector<f64>, f64, DMatrix<f64>)> {
    let (n, k) = (design.nrows(), design.ncols());
    if n <= k {
        return Err(CoreError::Numeric(format!(
            "need more observations than parameters ({n} rows for {k} coefficients)"
        )));
    }
    let (q, r) = qr_with_names(design, names)?;
    let qty = q.transpose() * y;
    let beta = r
        .solve_upper_triangular(&qty)
        .ok_or_else(|| CoreError::Numeric("triangular solve failed".into()))?;
    let residuals = y - design * &beta;
    let rss = residuals.dot(&residuals);
    let r_inv = r
        .solve_upper_triangular(&DMatrix::identity(k, k))
        .ok_or_else(|| CoreError::Numeric("triangular solve failed".into()))?;
    let xtx_inv = &r_inv * r_inv.transpose();
    Ok((beta, residuals, rss, xtx_inv))
}

/// Build a [`RegressionFit`] from solved pieces. `sums` controls whether
/// R² centers the response (intercept present) or not.
fn finish_fit(
    names: Vec<String>,
    beta: DVector<f64>,
    residuals: DVector<f64>,
    rss: f64,
    xtx_inv: &DMatrix<f64>,
    y: &DVector<f64>,
    intercept: bool,
) -> Result<RegressionFit> {
    let n = y.len();
    let k = names.len();
    let df = (n - k) as f64;
    let sigma2 = rss / df;
    let tss = if intercept {
        let mean = y.mean();
        y.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>()
    } else {
        y.dot(y)
    };
    if tss <= 0.0 {
        return Err(CoreError::Numeric("response is constant".into()));
    }
    let r_squared = 1.0 - rss / tss;
    let scale = if intercept { (n - 1) as f64 } else { n as f64 };
    let adj_r_squared = 1.0 - (1.0 - r_squared) * scale / df;
    let mut std_errors = Vec::with_capacity(k);
    let mut t_values = Vec::with_capacity(k);
    let mut p_values = Vec::with_capacity(k);
    for i in 0..k {
        let se = (sigma2 * xtx_inv[(i, i)]).max(0.0).sqrt();
        let t = if se > 0.0 {
            beta[i] / se
        } else if beta[i] == 0.0 {
            0.0
        } else {
            f64::INFINITY * beta[i].signum()
        };
        std_errors.push(se);
        t_values.push(t);
        p_values.push(t_sf_two_sided(t, df));
    }
    Ok(RegressionFit {
        names,
        coefficients: beta.iter().copied().collect(),
        std_errors,
        t_values,
        p_values,
        r_squared,
        adj_r_squared,
        n,
        n_params: k,
        residuals: residuals.iter().copied().collect(),
    })
}

/// Ordinary least squares of `y` on named columns.
pub fn ols(y: &[f64], x: &[(&str, &[f64])], intercept: bool) -> Result<RegressionFit> {
    let n = y.len();
    let (m, names) = design(x, intercept, n)?;
    let yv = DVector::from_row_slice(y);
    let (beta, residuals, rss, xtx_inv) = solve_ls(&m, &names, &yv)?;
    finish_fit(names, beta, residuals, rss, &xtx_inv, &yv, intercept)
}

/// RSS from regressing `v` on a prebuilt design (used for projection
/// differences).
fn rss_on(design: &DMatrix<f64>, names: &[String], v: &DVector<f64>) -> Result<f64> {
    let (_, _, rss, _) = solve_ls(design, names, v)?;
    Ok(rss)
}

/// Two-stage least squares of `y` on exogenous regressors plus one
/// endogenous regressor, instrumented by `instruments`.
///
/// Standard errors of the second stage use residuals computed with the
/// observed endogenous column, which is what makes them consistent; the
/// fitted first stage enters only the coefficient computation.
pub fn two_sls(
    y: &[f64],
    x_exog: &[(&str, &[f64])],
    x_endog: (&str, &[f64]),
    instruments: &[(&str, &[f64])],
    intercept: bool,
) -> Result<TwoSlsFit> {
    if instruments.is_empty() {
        return Err(CoreError::Invalid(
            "two-stage least squares needs at least one excluded instrument".into(),
        ));
    }
    let n = y.len();
    let (endog_name, endog_col) = x_endog;
    if endog_col.len() != n {
        return Err(CoreError::Invalid(format!(
            "endogenous column {endog_name} has {} rows, expected {n}",
            endog_col.len()
        )));
    }

    // First stage: endogenous on exogenous + instruments.
    let mut first_cols: Vec<(&str, &[f64])> = x_exog.to_vec();
    first_cols.extend_from_slice(instruments);
    let first_stage = ols(endog_col, &first_cols, intercept)?;

    // F on the excluded instruments: restricted excludes them.
    let endog_v = DVector::from_row_slice(endog_col);
    let (restricted, restricted_names) = design(x_exog, intercept, n)?;
    let rss_restricted = rss_on(&restricted, &restricted_names, &endog_v)?;
    let rss_unrestricted: f64 = first_stage.residuals.iter().map(|e| e * e).sum();
    let n_instruments = instruments.len() as f64;
    let df2 = (n - first_stage.n_params) as f64;
    let first_stage_f =
        ((rss_restricted - rss_unrestricted) / n_instruments) / (rss_unrestricted / df2);
    let first_stage_f_p = f_sf(first_stage_f, n_instruments, df2);

    // Second stage on the fitted endogenous column.
    let fitted: Vec<f64> = endog_col
        .iter()
        .zip(&first_stage.residuals)
        .map(|(v, e)| v - e)
        .collect();
    let mut second_cols: Vec<(&str, &[f64])> = x_exog.to_vec();
    second_cols.push((endog_name, &fitted));
    let (second_design, second_names) = design(&second_cols, intercept, n)?;
    let yv = DVector::from_row_slice(y);
    let (beta, _, _, xtx_inv) = solve_ls(&second_design, &second_names, &yv)?;

    // Residuals against the observed endogenous column.
    let mut original_cols: Vec<(&str, &[f64])> = x_exog.to_vec();
    original_cols.push((endog_name, endog_col));
    let (original_design, _) = design(&original_cols, intercept, n)?;
    let residuals = &yv - &original_design * &beta;
    let rss = residuals.dot(&residuals);
    let fit = finish_fit(
        second_names,
        beta,
        residuals,
        rss,
        &xtx_inv,
        &yv,
        intercept,
    )?;

    Ok(TwoSlsFit {
        fit,
        first_stage,
        first_stage_f,
        first_stage_f_p,
        weak_instruments: first_stage_f < 10.0,
    })
}

/// Run the four endogeneity tests for one endogenous regressor and
/// assemble the full instrumented-regression report.
///
/// Route one computes Durbin and Wu–Hausman from the quadratic form
/// `q = e'(P_A − P_M)e`, where `e` are the least-squares structural
/// residuals, `M` spans the included exogenous regressors, and `A`
/// additionally spans the instruments. Route two re-derives the same
/// hypothesis from control-function regressions on the first-stage
/// residual. Both routes share nothing but the solver.
pub fn endogeneity_tests(
    y: &[f64],
    x_exog: &[(&str, &[f64])],
    x_endog: (&str, &[f64]),
    instruments: &[(&str, &[f64])],
    intercept: bool,
) -> Result<IvReport> {
    let n = y.len();
    let nf = n as f64;
    let (endog_name, endog_col) = x_endog;

    let mut structural_cols: Vec<(&str, &[f64])> = x_exog.to_vec();
    structural_cols.push((endog_name, endog_col));
    let ols_fit = ols(y, &structural_cols, intercept)?;
    let ts = two_sls(y, x_exog, x_endog, instruments, intercept)?;

    // Route one: projection quadratic form.
    let e_c = DVector::from_row_slice(&ols_fit.residuals);
    let ete = e_c.dot(&e_c);
    let (m_design, m_names) = design(x_exog, intercept, n)?;
    let mut a_cols: Vec<(&str, &[f64])> = x_exog.to_vec();
    a_cols.extend_from_slice(instruments);
    let (a_design, a_names) = design(&a_cols, intercept, n)?;
    let q = rss_on(&m_design, &m_names, &e_c)? - rss_on(&a_design, &a_names, &e_c)?;
    let k_s = ols_fit.n_params;
    let durbin = q / (ete / nf);
    let wh_df2 = (n - k_s - 1) as f64;
    let wu_hausman = q * wh_df2 / (ete - q);

    // Route two: control-function regressions.
    let vhat = ts.first_stage.residuals.clone();
    let mut augmented_cols: Vec<(&str, &[f64])> = structural_cols.clone();
    augmented_cols.push(("first_stage_residual", &vhat));
    let augmented = ols(y, &augmented_cols, intercept)?;
    let t_v = *augmented
        .t_values
        .last()
        .expect("augmented fit has the residual column");
    let wooldridge_regression = t_v * t_v;
    let score_fit = ols(
        e_c.as_slice(),
        &augmented_cols,
        intercept,
    )?;
    let wooldridge_score = nf * score_fit.r_squared;

    let tests = vec![
        TestResult {
            name: "durbin".into(),
            statistic: durbin,
            distribution: Distribution::ChiSquare { df: 1.0 },
            p_value: chi2_sf(durbin, 1.0),
        },
        TestResult {
            name: "wu_hausman".into(),
            statistic: wu_hausman,
            distribution: Distribution::F {
                df1: 1.0,
                df2: wh_df2,
            },
            p_value: f_sf(wu_hausman, 1.0, wh_df2),
        },
        TestResult {
            name: "wooldridge_regression".into(),
            statistic: wooldridge_regression,
            distribution: Distribution::ChiSquare { df: 1.0 },
            p_value: chi2_sf(wooldridge_regression, 1.0),
        },
        TestResult {
            name: "wooldridge_score".into(),
            statistic: wooldridge_score,
            distribution: Distribution::ChiSquare { df: 1.0 },
            p_value: chi2_sf(wooldridge_score, 1.0),
        },
    ];

    Ok(IvReport {
        ols_fit,
        tsls_fit: ts.fit,
        first_stage_fit: ts.first_stage,
        first_stage_f: ts.first_stage_f,
        first_stage_f_p: ts.first_stage_f_p,
        weak_instruments: ts.weak_instruments,
        tests,
        instrument_names: instruments.iter().map(|(n, _)| n.to_string()).collect(),
        endogenous_name: endog_name.to_string(),
    })
}
