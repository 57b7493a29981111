//! Least-angle regression: the classical equiangular path, plus the
//! lasso-modified variant used internally by the subsample selector.

use nalgebra::{Cholesky, DMatrix, DVector};
use serde::Serialize;

use crate::error::{CoreError, Result};

use super::{gaussian_bic, subset_rss, to_matrix};

/// One step of a least-angle path, recorded after the step's move.
#[derive(Debug, Clone, Serialize)]
pub struct LarsStep {
    /// Active column indices, ascending.
    pub active: Vec<usize>,
    /// Path coefficients for every column (inactive entries are zero).
    pub coefficients: Vec<f64>,
    /// BIC of the least-squares refit on this step's active set.
    pub bic: f64,
}

/// A recorded least-angle regression path.
#[derive(Debug, Clone, Serialize)]
pub struct LarsPath {
    /// Column names in input order.
    pub names: Vec<String>,
    /// Column indices in activation order; each appears at most once.
    pub entry_order: Vec<usize>,
    /// Per-step path states.
    pub steps: Vec<LarsStep>,
}

/// Classical least-angle regression (no lasso modification).
///
/// Expects standardized columns and a centered response; errors on a
/// zero-variance column. Records at most `max_steps` steps, which must
/// lie in `1..=min(n − 1, p)`. Ties in the entry correlation are broken
/// toward the lowest column index (tolerance 1e-12).
pub fn lars_path(y: &[f64], x: &[(&str, &[f64])], max_steps: usize) -> Result<LarsPath> {
    let n = y.len();
    if n < 2 {
        return Err(CoreError::Invalid("need at least 2 rows".into()));
    }
    let (xm, names) = to_matrix(x, n)?;
    let p = xm.ncols();
    let cap = p.min(n - 1);
    if max_steps == 0 || max_steps > cap {
        return Err(CoreError::Invalid(format!(
            "max_steps must lie in 1..={cap} for {p} columns and {n} rows, got {max_steps}"
        )));
    }
    for j in 0..p {
        let col = xm.column(j);
        let mean = col.sum() / n as f64;
        if col.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() <= 0.0 {
            return Err(CoreError::Data(format!(
                "column {} has zero variance",
                names[j]
            )));
        }
    }
    let yv = DVector::from_column_slice(y);
    let (raw, entry_order) = lars_engine(&xm, &yv, false, max_steps)?;
    let steps = raw
        .into_iter()
        .map(|s| {
            let bic = subset_rss(&xm, &yv, &s.active)
                .map(|rss| gaussian_bic(n, rss, s.active.len()))
                .unwrap_or(f64::INFINITY);
            LarsStep {
                active: s.active,
                coefficients: s.beta,
                bic,
            }
        })
        .collect();
    Ok(LarsPath {
        names,
        entry_order,
        steps,
    })
}

/// Raw state after one engine step.
pub(crate) struct EngineStep {
    pub active: Vec<usize>,
    pub beta: Vec<f64>,
}

/// Core least-angle recursion on columns as given. With `lasso` set,
/// a coefficient hitting zero leaves the active set (and entry is
/// suppressed for the following step while the direction is rebuilt),
/// which makes the recorded states the knots of the lasso path.
pub(crate) fn lars_engine(
    x: &DMatrix<f64>,
    y: &DVector<f64>,
    lasso: bool,
    max_steps: usize,
) -> Result<(Vec<EngineStep>, Vec<usize>)> {
    let n = x.nrows();
    let p = x.ncols();
    let mut beta = vec![0.0; p];
    let mut mu: DVector<f64> = DVector::zeros(n);
    let mut active: Vec<usize> = Vec::new();
    let mut entry_order: Vec<usize> = Vec::new();
    let mut steps: Vec<EngineStep> = Vec::new();
    let mut suppress_entry = false;
    // The variable whose entry event set the previous step length; it
    // is the next entrant. The first entrant has no prior event and is
    // chosen by largest |correlation| (ties to the lowest index).
    let mut pending_entry: Option<usize> = None;
    let iter_cap = 50 * (p + 2);

    for _ in 0..iter_cap {
        let resid = y - &mu;
        let c: DVector<f64> = x.tr_mul(&resid);
        let c_max = c.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        if c_max < 1e-10 {
            return Ok((steps, entry_order));
        }

        if (!suppress_entry || active.is_empty()) && active.len() < p {
            let j = pending_entry.take().unwrap_or_else(|| {
                let mut best: Option<usize> = None;
                let mut best_val = f64::NEG_INFINITY;
                for j in 0..p {
                    if active.contains(&j) {
                        continue;
                    }
                    if c[j].abs() > best_val + 1e-12 {
                        best = Some(j);
                        best_val = c[j].abs();
                    }
                }
                best.expect("inactive set is nonempty")
            });
            active.push(j);
            active.sort_unstable();
            entry_order.push(j);
        }
        suppress_entry = false;
        pending_entry = None;

        // Equiangular direction over the signed active columns.
        let k = active.len();
        let mut signs = vec![0.0_f64; k];
        let mut xa = DMatrix::zeros(n, k);
        for (idx, &j) in active.iter().enumerate() {
            let s = if c[j] >= 0.0 { 1.0 } else { -1.0 };
            signs[idx] = s;
            for i in 0..n {
                xa[(i, idx)] = s * x[(i, j)];
            }
        }
        let g: DMatrix<f64> = xa.tr_mul(&xa);
        let chol = Cholesky::new(g).ok_or_else(|| {
            CoreError::Numeric(
                "degenerate correlation tie: equiangular system is singular".into(),
            )
        })?;
        let ginv_ones = chol.solve(&DVector::from_element(k, 1.0));
        let ones_sum: f64 = ginv_ones.sum();
        if !(ones_sum > 0.0) {
            return Err(CoreError::Numeric(
                "equiangular normalization is not positive".into(),
            ));
        }
        let a_norm = 1.0 / ones_sum.sqrt();
        let w = ginv_ones * a_norm;
        let u: DVector<f64> = &xa * &w;
        let a: DVector<f64> = x.tr_mul(&u);

        // Step length: distance to the next entry event, capped by the
        // distance to the joint least-squares solution of the active set.
        let c_over_a = c_max / a_norm;
        let mut gamma = c_over_a;
        let mut entry_event: Option<usize> = None;
        if k < p {
            let mut best_entry = f64::INFINITY;
            for j in 0..p {
                if active.contains(&j) {
                    continue;
                }
                for (num, den) in [
                    (c_max - c[j], a_norm - a[j]),
                    (c_max + c[j], a_norm + a[j]),
                ] {
                    // A vanishing denominator marks a column already
                    // aligned with the equiangular direction (an exact
                    // duplicate of the active set); it has no entry
                    // point of its own.
                    if den.abs() <= 1e-10 * a_norm {
                        continue;
                    }
                    let cand = num / den;
                    if cand.is_finite() && cand > 1e-12 && cand < best_entry {
                        best_entry = cand;
                        entry_event = Some(j);
                    }
                }
            }
            if best_entry < gamma {
                gamma = best_entry;
            } else {
                entry_event = None;
            }
        }

        // Lasso modification: a coefficient crossing zero exits first.
        let mut gamma_use = gamma;
        let mut drop_pos: Option<usize> = None;
        if lasso {
            let mut best_drop = f64::INFINITY;
            for (idx, &j) in active.iter().enumerate() {
                let d = signs[idx] * w[idx];
                if d.abs() < 1e-300 {
                    continue;
                }
                let ratio = -beta[j] / d;
                if ratio > 1e-12 && ratio < best_drop {
                    best_drop = ratio;
                    drop_pos = Some(idx);
                }
            }
            if let Some(_) = drop_pos {
                if best_drop < gamma {
                    gamma_use = best_drop;
                } else {
                    drop_pos = None;
                }
            }
        }

        for (idx, &j) in active.iter().enumerate() {
            beta[j] += gamma_use * signs[idx] * w[idx];
        }
        mu.axpy(gamma_use, &u, 1.0);
        let full_stop = drop_pos.is_none() && k == p && gamma_use >= c_over_a - 1e-12;
        if let Some(idx) = drop_pos {
            let j = active.remove(idx);
            beta[j] = 0.0;
            suppress_entry = true;
        } else {
            // The step stopped exactly at this variable's entry event,
            // so it is the next entrant; correlation ties (for example
            // an exact duplicate of an active column) cannot usurp it.
            pending_entry = entry_event;
        }
        steps.push(EngineStep {
            active: active.clone(),
            beta: beta.clone(),
        });
        if steps.len() >= max_steps || full_stop {
            return Ok((steps, entry_order));
        }
    }
    Err(CoreError::NoConvergence(format!(
        "least-angle path did not terminate within {iter_cap} steps"
    )))
}
