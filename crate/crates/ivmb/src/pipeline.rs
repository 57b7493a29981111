//! End-to-end pipeline: ingest → screen → select on linear and logged
//! forms → final blanket → correlated-group rectification → timestamp
//! orientation → backdoor scoring → instrument validation → report.
//!
//! Every stage is seeded from the config's root seed and touches no
//! wall-clock or environment randomness, so a config runs to a
//! byte-identical JSON report every time. Stage timings go to stderr
//! only, keeping the report reproducible.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use ivmb_core::data::{self, load_csv, log_transform, partial_corr, standardize, Dataset};
use ivmb_core::graph::{Dag, IvCandidateReport, IvVerdict};
use ivmb_core::regress::{endogeneity_tests, IvReport};
use ivmb_core::score::{compare_backdoor, BackdoorDecision};
use ivmb_core::select::{
    cv_select, grouping_diagnostic, isis_bootstrap, rectify, solar, GroupReport,
    Hyperparameters, SelectAlgorithm, SelectionResult,
};
use ivmb_core::sem::{scenario_with, LinearSem};
use ivmb_core::{CoreError, Result};
use nalgebra::DMatrix;
use serde::Serialize;

use crate::config::PipelineConfig;

/// Report schema version; bump on any change to the JSON layout.
pub const SCHEMA_VERSION: u32 = 1;

/// Where the data came from.
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SourceInfo {
    /// Simulated from a built-in scenario.
    Scenario {
        /// Scenario name.
        name: String,
        /// Parameter overrides used.
        params: BTreeMap<String, f64>,
        /// Rows drawn.
        rows: usize,
    },
    /// Loaded from a CSV file.
    File {
        /// Path as given.
        path: String,
    },
}

/// One selection run: which data form and algorithm produced it.
#[derive(Debug, Clone, Serialize)]
pub struct SelectionEntry {
    /// `linear` or `logged`.
    pub form: String,
    /// `solar`, `cv_lasso`, or `cv_en`.
    pub algorithm: String,
    /// The selection itself.
    pub result: SelectionResult,
}

/// A graph in both text renderings.
#[derive(Debug, Clone, Serialize)]
pub struct GraphText {
    /// Edge-list text format.
    pub text: String,
    /// DOT rendering.
    pub dot: String,
}

impl GraphText {
    fn from_dag(g: &Dag) -> Self {
        Self {
            text: g.to_text(),
            dot: g.to_dot(),
        }
    }
}

/// Instrument search and validation for one treatment → response pair.
#[derive(Debug, Clone, Serialize)]
pub struct IvAnalysis {
    /// The treatment (a parent of the response in the posited graph).
    pub treatment: String,
    /// The response.
    pub outcome: String,
    /// Verdict per candidate vertex.
    pub candidates: Vec<IvCandidateReport>,
    /// Instrumented fits and endogeneity tests, one per candidate with a
    /// valid or conditional verdict.
    pub reports: Vec<IvReport>,
}

/// Everything the pipeline produced. Serializes to `report.json`; the
/// text report is a projection of these fields.
#[derive(Debug, Clone, Serialize)]
pub struct PipelineReport {
    /// JSON layout version.
    pub schema_version: u32,
    /// Version of this binary.
    pub tool_version: String,
    /// Root seed all stages derive from.
    pub seed: u64,
    /// Data source.
    pub source: SourceInfo,
    /// Response column.
    pub response: String,
    /// Row count after ingestion.
    pub rows: usize,
    /// Candidate columns after ingestion (response excluded).
    pub candidates: Vec<String>,
    /// Columns log-transformed at ingestion (config's list).
    pub logged_at_ingest: Vec<String>,
    /// Columns logged for the logged-form selection runs; empty when no
    /// column qualified and the logged runs were skipped.
    pub logged_form_columns: Vec<String>,
    /// Screening result; absent when the screen was skipped (p < n/2).
    pub screening: Option<SelectionResult>,
    /// Candidates that survived screening (all candidates when skipped).
    pub screened_candidates: Vec<String>,
    /// All selection runs (three per data form).
    pub selections: Vec<SelectionEntry>,
    /// `intersection` or `union`.
    pub blanket_rule: String,
    /// Final blanket: the rule applied to the two stability selections.
    pub final_blanket: Vec<String>,
    /// Correlated-group diagnostics around each blanket member.
    pub group_reports: Vec<GroupReport>,
    /// Blanket after widening by flagged groups.
    pub rectified_blanket: Vec<String>,
    /// Equations whose selection includes the response at a non-earlier
    /// epoch — the simultaneity / reverse-causation trigger.
    pub simultaneity_warnings: Vec<String>,
    /// Stage notes: skipped stages and the reason.
    pub notes: Vec<String>,
    /// Oriented blanket graph; absent without timestamps.
    pub oriented_graph: Option<GraphText>,
    /// Graph used for instrument validation when it differs from the
    /// oriented blanket graph (scenario runs posit their own structure).
    pub posited_graph: Option<GraphText>,
    /// Mediation decisions for every parent → mediator → child triple.
    pub backdoor_decisions: Vec<BackdoorDecision>,
    /// Instrument validation and endogeneity testing per treatment.
    pub iv_analyses: Vec<IvAnalysis>,
    /// `ok`, or `no selection` when the blanket came out empty.
    pub verdict: String,
}

/// Prefix a stage label onto an error's message, keeping its variant
/// (and therefore its exit code).
fn relabel(stage: &str, e: CoreError) -> CoreError {
    match e {
        CoreError::Data(m) => CoreError::Data(format!("{stage}: {m}")),
        CoreError::UnknownName(m) => CoreError::UnknownName(format!("{stage}: {m}")),
        CoreError::Invalid(m) => CoreError::Invalid(format!("{stage}: {m}")),
        CoreError::Numeric(m) => CoreError::Numeric(format!("{stage}: {m}")),
        CoreError::NoConvergence(m) => CoreError::NoConvergence(format!("{stage}: {m}")),
        CoreError::Graph(m) => CoreError::Graph(format!("{stage}: {m}")),
        CoreError::BoundExceeded(m) => CoreError::BoundExceeded(format!("{stage}: {m}")),
        CoreError::Scenario(m) => CoreError::Scenario(format!("{stage}: {m}")),
        other => other,
    }
}

/// Log a stage duration to stderr. Timings never enter the report.
fn log_timing(stage: &str, started: Instant) {
    eprintln!("[timing] {stage}: {:.3}s", started.elapsed().as_secs_f64());
}

/// Named column slices for the given names, in the given order.
fn column_refs<'a>(ds: &'a Dataset, names: &'a [String]) -> Result<Vec<(&'a str, &'a [f64])>> {
    names
        .iter()
        .map(|n| Ok((n.as_str(), ds.column(n)?)))
        .collect()
}

/// Restrict `names` to `keep`, preserving the dataset's column order.
fn in_column_order(ds: &Dataset, keep: &BTreeSet<String>) -> Vec<String> {
    ds.names()
        .iter()
        .filter(|n| keep.contains(*n))
        .cloned()
        .collect()
}

/// Sample covariance matrix (n − 1 denominator) of the named columns.
fn sample_cov(ds: &Dataset, names: &[String]) -> Result<DMatrix<f64>> {
    let n = ds.n();
    let p = names.len();
    let mut centered = DMatrix::zeros(n, p);
    for (j, name) in names.iter().enumerate() {
        let col = ds.column(name)?;
        let mean = col.iter().sum::<f64>() / n as f64;
        for (i, v) in col.iter().enumerate() {
            centered[(i, j)] = v - mean;
        }
    }
    Ok(centered.tr_mul(&centered) / (n as f64 - 1.0))
}

/// Columns among `names` whose values are all strictly positive and that
/// have not already been log-transformed.
fn log_eligible(ds: &Dataset, names: &[String]) -> Result<Vec<String>> {
    let mut out = Vec::new();
    for name in names {
        let already_logged = ds
            .transforms_of(name)?
            .iter()
            .any(|t| matches!(t, data::Transform::Logged));
        if !already_logged && ds.column(name)?.iter().all(|&v| v > 0.0) {
            out.push(name.clone());
        }
    }
    Ok(out)
}

/// Timestamps for the pipeline's graph stages: the config's explicit
/// assignments win; a scenario's own stamps fill the gaps.
fn stamp_map(cfg: &PipelineConfig, sem: Option<&LinearSem>) -> Result<BTreeMap<String, i64>> {
    let mut stamps = BTreeMap::new();
    if let Some(sem) = sem {
        let dag = sem.dag();
        for name in dag.vertices() {
            if let Some(s) = dag.stamp(name)? {
                stamps.insert(name.clone(), s);
            }
        }
    }
    for (name, &s) in &cfg.timestamps {
        stamps.insert(name.clone(), s);
    }
    Ok(stamps)
}

/// Outcome of the orientation stage.
struct Orientation {
    graph: Dag,
    warnings: Vec<String>,
}

/// Orient the blanket skeleton with timestamps.
///
/// Members at a later epoch than the response are treated as response
/// children: each one's stability selection (over all other columns)
/// provides its parents, oriented by epoch (equal epochs stay
/// undirected). Members at an earlier epoch point at the response,
/// except co-parents — members that enter a child's selection while
/// their partial correlation with the response given the other
/// non-later members is insignificant (Fisher z at 1.96) — which keep
/// only their child edge. Equations whose selection includes the
/// response at a non-earlier epoch are flagged as simultaneity /
/// reverse-causation warnings.
#[allow(clippy::too_many_arguments)]
fn orient_blanket(
    ds: &Dataset,
    response: &str,
    blanket: &[String],
    stamps: &BTreeMap<String, i64>,
    subsamples: usize,
    fraction: f64,
    c: Option<f64>,
    seed: u64,
) -> Result<Orientation> {
    let r_stamp = stamps[response];
    let vertex_set: BTreeSet<String> = blanket
        .iter()
        .cloned()
        .chain(std::iter::once(response.to_string()))
        .collect();
    let vertices = in_column_order(ds, &vertex_set);

    let later: Vec<&String> = blanket.iter().filter(|m| stamps[*m] > r_stamp).collect();
    let same: Vec<&String> = blanket.iter().filter(|m| stamps[*m] == r_stamp).collect();
    let earlier: Vec<&String> = blanket.iter().filter(|m| stamps[*m] < r_stamp).collect();

    let mut directed: BTreeSet<(String, String)> = BTreeSet::new();
    let mut undirected: BTreeSet<(String, String)> = BTreeSet::new();
    let mut warnings = Vec::new();
    let mut in_child_equation: BTreeSet<String> = BTreeSet::new();

    // Downstream and contemporaneous members get their own equation.
    for d in later.iter().chain(same.iter()) {
        let d = d.as_str();
        let regressors: Vec<String> = ds
            .names()
            .iter()
            .filter(|n| n.as_str() != d)
            .cloned()
            .collect();
        let x = column_refs(ds, &regressors)?;
        let sel = solar(ds.column(d)?, &x, subsamples, fraction, c, seed)
            .map_err(|e| relabel(&format!("orientation equation for {d}"), e))?;
        if sel.selected.iter().any(|s| s == response) && stamps[d] >= r_stamp {
            warnings.push(format!(
                "the equation for {d} (epoch {}) selects the response {response} \
                 (epoch {r_stamp}); possible simultaneity or reverse causation",
                stamps[d]
            ));
        }
        for q in &sel.selected {
            if !vertex_set.contains(q) || q == d {
                continue;
            }
            in_child_equation.insert(q.clone());
            if stamps[q] < stamps[d] {
                directed.insert((q.clone(), d.to_string()));
            } else if stamps[q] == stamps[d] {
                let key = if q < &d.to_string() {
                    (q.clone(), d.to_string())
                } else {
                    (d.to_string(), q.clone())
                };
                undirected.insert(key);
            }
        }
    }

    // Earlier members point at the response unless they are co-parents:
    // present in a child equation and conditionally uncorrelated with
    // the response given the other non-later members.
    let non_later: Vec<String> = earlier
        .iter()
        .chain(same.iter())
        .map(|s| s.to_string())
        .collect();
    for e in &earlier {
        let e = e.as_str();
        let mut is_coparent = false;
        if in_child_equation.contains(e) {
            let mut cols = vec![e.to_string(), response.to_string()];
            let conditioning: Vec<String> =
                non_later.iter().filter(|m| m.as_str() != e).cloned().collect();
            cols.extend(conditioning.iter().cloned());
            let cov = sample_cov(ds, &cols)?;
            let z_idx: Vec<usize> = (2..cols.len()).collect();
            let rho = partial_corr(&cov, 0, 1, &z_idx)
                .map_err(|er| relabel("orientation co-parent test", er))?;
            let n_eff = ds.n() as f64 - z_idx.len() as f64 - 3.0;
            if n_eff > 0.0 {
                let fisher_z = 0.5 * ((1.0 + rho) / (1.0 - rho)).ln() * n_eff.sqrt();
                is_coparent = fisher_z.abs() < 1.96;
            }
        }
        if !is_coparent {
            directed.insert((e.to_string(), response.to_string()));
        }
    }

    // Drop undirected pairs that a directed edge already covers.
    let undirected: Vec<(String, String)> = undirected
        .into_iter()
        .filter(|(a, b)| {
            !directed.contains(&(a.clone(), b.clone())) && !directed.contains(&(b.clone(), a.clone()))
        })
        .collect();

    let mut graph = Dag::new(
        vertices.clone(),
        directed.into_iter().collect(),
        undirected,
    )
    .map_err(|e| relabel("orientation", e))?;
    for v in &vertices {
        graph.set_stamp(v, stamps[v])?;
    }
    Ok(Orientation { graph, warnings })
}

/// Score every parent → mediator → child triple of the oriented graph.
fn backdoor_stage(ds: &Dataset, g: &Dag) -> Result<Vec<BackdoorDecision>> {
    let mut out = Vec::new();
    for mediator in g.vertices() {
        let parents = g.parents(mediator)?;
        let children = g.children(mediator)?;
        for parent in &parents {
            for child in &children {
                if parent == child {
                    continue;
                }
                let controls: Vec<String> = g
                    .parents(child)?
                    .into_iter()
                    .filter(|c| c != parent && c != mediator)
                    .collect();
                let control_refs: Vec<&str> = controls.iter().map(|s| s.as_str()).collect();
                let decision = compare_backdoor(ds, parent, mediator, child, &control_refs)
                    .map_err(|e| relabel("backdoor scoring", e))?;
                out.push(decision);
            }
        }
    }
    Ok(out)
}

/// Search instruments for every observed parent of the response in the
/// posited graph, then fit and test each valid or conditional candidate.
fn iv_stage(
    ds: &Dataset,
    posited: &Dag,
    response: &str,
    subset_cap: usize,
    notes: &mut Vec<String>,
) -> Result<Vec<IvAnalysis>> {
    let mut analyses = Vec::new();
    if !posited.vertices().contains(&response.to_string()) {
        notes.push(format!(
            "instrument stage skipped: the posited graph has no vertex {response}"
        ));
        return Ok(analyses);
    }
    for treatment in posited.parents(response)? {
        if posited.is_latent(&treatment)? || ds.index_of(&treatment).is_err() {
            notes.push(format!(
                "instrument stage: treatment {treatment} is unobserved; skipped"
            ));
            continue;
        }
        let candidates = posited
            .iv_candidates(&treatment, response, &BTreeSet::new(), Some(subset_cap))
            .map_err(|e| relabel("instrument search", e))?;
        let mut reports = Vec::new();
        for cand in &candidates {
            if !matches!(cand.verdict, IvVerdict::Valid | IvVerdict::Conditional) {
                continue;
            }
            if ds.index_of(&cand.candidate).is_err() {
                notes.push(format!(
                    "instrument stage: candidate {} has no data column; skipped",
                    cand.candidate
                ));
                continue;
            }
            let exog_names: Vec<String> = cand.required_controls.iter().cloned().collect();
            let exog = column_refs(ds, &exog_names)?;
            let report = endogeneity_tests(
                ds.column(response)?,
                &exog,
                (&treatment, ds.column(&treatment)?),
                &[(&cand.candidate, ds.column(&cand.candidate)?)],
                true,
            )
            .map_err(|e| relabel("instrumented regression", e))?;
            reports.push(report);
        }
        analyses.push(IvAnalysis {
            treatment,
            outcome: response.to_string(),
            candidates,
            reports,
        });
    }
    Ok(analyses)
}

/// Run the whole pipeline for a validated config.
pub fn run_pipeline(cfg: &PipelineConfig) -> Result<PipelineReport> {
    cfg.validate()?;
    let seed = cfg.seed.expect("validated");

    // Ingestion and transforms.
    let t = Instant::now();
    let (mut ds, sem, source) = match (&cfg.scenario, &cfg.input) {
        (Some(name), None) => {
            let sem = scenario_with(name, &cfg.scenario_params)
                .map_err(|e| relabel("ingestion", e))?;
            let ds = sem.sample(cfg.rows, seed).map_err(|e| relabel("ingestion", e))?;
            let source = SourceInfo::Scenario {
                name: name.clone(),
                params: cfg.scenario_params.clone(),
                rows: cfg.rows,
            };
            (ds, Some(sem), source)
        }
        (None, Some(path)) => {
            let ds = load_csv(path, true).map_err(|e| relabel("ingestion", e))?;
            let source = SourceInfo::File {
                path: path.display().to_string(),
            };
            (ds, None, source)
        }
        _ => unreachable!("validated"),
    };
    if !cfg.log_columns.is_empty() {
        let refs: Vec<&str> = cfg.log_columns.iter().map(|s| s.as_str()).collect();
        ds = log_transform(&ds, &refs).map_err(|e| relabel("ingestion transforms", e))?;
    }
    if cfg.standardize {
        let all: Vec<&str> = ds.names().iter().map(|s| s.as_str()).collect();
        ds = standardize(&ds, &all).map_err(|e| relabel("ingestion transforms", e))?;
    }
    ds.index_of(&cfg.response)
        .map_err(|_| CoreError::UnknownName(format!("response column {}", cfg.response)))?;
    for name in cfg.timestamps.keys() {
        ds.index_of(name).map_err(|_| {
            CoreError::UnknownName(format!("timestamp assignment for absent column {name}"))
        })?;
    }
    let candidates: Vec<String> = ds
        .names()
        .iter()
        .filter(|n| *n != &cfg.response)
        .cloned()
        .collect();
    log_timing("ingestion", t);

    let mut report = PipelineReport {
        schema_version: SCHEMA_VERSION,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        seed,
        source,
        response: cfg.response.clone(),
        rows: ds.n(),
        candidates: candidates.clone(),
        logged_at_ingest: cfg.log_columns.clone(),
        logged_form_columns: Vec::new(),
        screening: None,
        screened_candidates: Vec::new(),
        selections: Vec::new(),
        blanket_rule: if cfg.blanket_union { "union" } else { "intersection" }.to_string(),
        final_blanket: Vec::new(),
        group_reports: Vec::new(),
        rectified_blanket: Vec::new(),
        simultaneity_warnings: Vec::new(),
        notes: Vec::new(),
        oriented_graph: None,
        posited_graph: None,
        backdoor_decisions: Vec::new(),
        iv_analyses: Vec::new(),
        verdict: "ok".to_string(),
    };

    // Screening, only in the wide regime.
    let t = Instant::now();
    let y = ds.column(&cfg.response)?.to_vec();
    let pool: Vec<String> = if candidates.len() * 2 >= ds.n() {
        let x = column_refs(&ds, &candidates)?;
        let screened = isis_bootstrap(
            &y,
            &x,
            cfg.isis_b,
            None,
            cfg.isis_threshold,
            None,
            seed,
        )
        .map_err(|e| relabel("screening", e))?;
        let kept = screened.selected.clone();
        report.screening = Some(screened);
        kept
    } else {
        report.notes.push(format!(
            "screening skipped: {} candidates against {} rows is below the p \u{2265} n/2 regime",
            candidates.len(),
            ds.n()
        ));
        candidates.clone()
    };
    report.screened_candidates = pool.clone();
    log_timing("screening", t);

    if pool.is_empty() {
        report.verdict = "no selection".to_string();
        report
            .notes
            .push("screening kept no candidates; later stages skipped".to_string());
        return Ok(report);
    }

    // Selection on the linear form and, where possible, the logged form.
    let t = Instant::now();
    let mut with_response = pool.clone();
    with_response.push(cfg.response.clone());
    let logged_cols = log_eligible(&ds, &with_response)?;
    let ds_log = if logged_cols.is_empty() {
        report.notes.push(
            "logged-form runs skipped: no strictly positive column to log".to_string(),
        );
        None
    } else {
        let refs: Vec<&str> = logged_cols.iter().map(|s| s.as_str()).collect();
        Some(log_transform(&ds, &refs).map_err(|e| relabel("logged form", e))?)
    };
    report.logged_form_columns = logged_cols;

    let mut solar_by_form: BTreeMap<String, Vec<String>> = BTreeMap::new();
    let forms: Vec<(&str, &Dataset)> = std::iter::once(("linear", &ds))
        .chain(ds_log.iter().map(|d| ("logged", d)))
        .collect();
    for (form, data) in &forms {
        let yf = data.column(&cfg.response)?;
        let x = column_refs(data, &pool)?;
        let stability = solar(
            yf,
            &x,
            cfg.solar_subsamples,
            cfg.solar_fraction,
            cfg.solar_c,
            seed,
        )
        .map_err(|e| relabel(&format!("{form} stability selection"), e))?;
        solar_by_form.insert(form.to_string(), stability.selected.clone());
        report.selections.push(SelectionEntry {
            form: form.to_string(),
            algorithm: "solar".to_string(),
            result: stability,
        });
        for (label, alg) in [
            ("cv_lasso", SelectAlgorithm::Lasso),
            ("cv_en", SelectAlgorithm::ElasticNet),
        ] {
            let result = cv_select(yf, &x, alg, cfg.cv_folds, None, None, seed)
                .map_err(|e| relabel(&format!("{form} {label}"), e))?;
            report.selections.push(SelectionEntry {
                form: form.to_string(),
                algorithm: label.to_string(),
                result,
            });
        }
    }
    log_timing("selection", t);

    // Final blanket from the stability selections.
    let linear_set: BTreeSet<String> = solar_by_form["linear"].iter().cloned().collect();
    let final_set: BTreeSet<String> = match solar_by_form.get("logged") {
        Some(logged) => {
            let logged_set: BTreeSet<String> = logged.iter().cloned().collect();
            if cfg.blanket_union {
                linear_set.union(&logged_set).cloned().collect()
            } else {
                linear_set.intersection(&logged_set).cloned().collect()
            }
        }
        None => linear_set,
    };
    report.final_blanket = in_column_order(&ds, &final_set);

    if report.final_blanket.is_empty() {
        report.verdict = "no selection".to_string();
        report
            .notes
            .push("final blanket is empty; later stages skipped".to_string());
        return Ok(report);
    }

    // Correlated groups around each blanket member, then rectify.
    let t = Instant::now();
    for member in &report.final_blanket {
        let group = grouping_diagnostic(&ds, member, cfg.group_cutoff)
            .map_err(|e| relabel("grouping diagnostics", e))?;
        report.group_reports.push(group);
    }
    let mut scores: BTreeMap<String, f64> = BTreeMap::new();
    for name in &candidates {
        scores.insert(
            name.clone(),
            if final_set.contains(name) { 1.0 } else { 0.0 },
        );
    }
    let blanket_selection = SelectionResult {
        algorithm: format!("blanket_{}", report.blanket_rule),
        selected: report.final_blanket.clone(),
        scores,
        hyperparameters: Hyperparameters {
            threshold: 1.0,
            seed: Some(seed),
            ..Hyperparameters::default()
        },
    };
    let rectified = rectify(&blanket_selection, &report.group_reports);
    // A correlated group may legitimately contain the response (that is
    // worth showing in the group report), but the response can never be
    // a member of its own blanket.
    let rectified_set: BTreeSet<String> = rectified
        .selected
        .iter()
        .filter(|s| s.as_str() != cfg.response)
        .cloned()
        .collect();
    report.rectified_blanket = in_column_order(&ds, &rectified_set);
    log_timing("grouping", t);

    // Timestamp orientation of the blanket skeleton.
    let t = Instant::now();
    let stamps = stamp_map(cfg, sem.as_ref())?;
    let graph_vertices: Vec<String> = report
        .rectified_blanket
        .iter()
        .chain(std::iter::once(&cfg.response))
        .cloned()
        .collect();
    let missing: Vec<String> = graph_vertices
        .iter()
        .filter(|v| !stamps.contains_key(*v))
        .cloned()
        .collect();
    let oriented = if missing.is_empty() {
        let orientation = orient_blanket(
            &ds,
            &cfg.response,
            &report.rectified_blanket,
            &stamps,
            cfg.solar_subsamples,
            cfg.solar_fraction,
            cfg.solar_c,
            seed,
        )?;
        report.simultaneity_warnings = orientation.warnings;
        report.oriented_graph = Some(GraphText::from_dag(&orientation.graph));
        Some(orientation.graph)
    } else {
        report.notes.push(format!(
            "orientation skipped: no timestamp for {}",
            missing.join(", ")
        ));
        None
    };
    log_timing("orientation", t);

    // Backdoor scoring on the oriented graph.
    let t = Instant::now();
    if let Some(g) = &oriented {
        report.backdoor_decisions = backdoor_stage(&ds, g)?;
    }
    log_timing("backdoor scoring", t);

    // Instrument validation on the posited structure: a scenario supplies
    // its own graph (latent vertices included — observational data alone
    // cannot reveal them); a file source falls back to the oriented
    // blanket graph.
    let t = Instant::now();
    let posited: Option<Dag> = match &sem {
        Some(s) => Some(s.dag().clone()),
        None => oriented.clone(),
    };
    match &posited {
        Some(g) => {
            if sem.is_some() {
                report.posited_graph = Some(GraphText::from_dag(g));
            }
            report.iv_analyses =
                iv_stage(&ds, g, &cfg.response, cfg.subset_cap, &mut report.notes)?;
        }
        None => {
            report.notes.push(
                "instrument stage skipped: no posited graph (orientation unavailable)"
                    .to_string(),
            );
        }
    }
    log_timing("instrument validation", t);

    Ok(report)
}

/// Render the human-readable projection of the report. Every number
/// printed here is present in the JSON serialization.
pub fn render_text(r: &PipelineReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "pipeline report (schema {})", r.schema_version);
    let _ = writeln!(out, "tool version: {}", r.tool_version);
    let _ = writeln!(out, "seed: {}", r.seed);
    match &r.source {
        SourceInfo::Scenario { name, params, rows } => {
            let _ = write!(out, "source: scenario {name}, {rows} rows");
            if params.is_empty() {
                let _ = writeln!(out);
            } else {
                let rendered: Vec<String> =
                    params.iter().map(|(k, v)| format!("{k}={v}")).collect();
                let _ = writeln!(out, " ({})", rendered.join(", "));
            }
        }
        SourceInfo::File { path } => {
            let _ = writeln!(out, "source: file {path}");
        }
    }
    let _ = writeln!(out, "response: {}", r.response);
    let _ = writeln!(out, "candidates: {}", r.candidates.join(", "));
    if !r.logged_at_ingest.is_empty() {
        let _ = writeln!(out, "logged at ingest: {}", r.logged_at_ingest.join(", "));
    }

    let _ = writeln!(out, "\n== screening ==");
    match &r.screening {
        Some(sel) => {
            let _ = write!(out, "{sel}");
            let _ = writeln!(out, "kept: {}", r.screened_candidates.join(", "));
        }
        None => {
            let _ = writeln!(out, "skipped (narrow regime); all candidates kept");
        }
    }

    let _ = writeln!(out, "\n== selection ==");
    if r.logged_form_columns.is_empty() {
        let _ = writeln!(out, "logged form: skipped (no strictly positive columns)");
    } else {
        let _ = writeln!(out, "logged form columns: {}", r.logged_form_columns.join(", "));
    }
    for entry in &r.selections {
        let _ = writeln!(out, "\n[{} {}]", entry.form, entry.algorithm);
        let _ = write!(out, "{}", entry.result);
    }

    let _ = writeln!(out, "\n== final blanket ==");
    let _ = writeln!(out, "rule: {}", r.blanket_rule);
    let _ = writeln!(
        out,
        "members: {}",
        if r.final_blanket.is_empty() {
            "(none)".to_string()
        } else {
            r.final_blanket.join(", ")
        }
    );

    if !r.group_reports.is_empty() {
        let _ = writeln!(out, "\n== correlated groups ==");
        for group in &r.group_reports {
            let _ = writeln!(out, "{group}");
        }
        let _ = writeln!(out, "rectified members: {}", r.rectified_blanket.join(", "));
    }

    let _ = writeln!(out, "\n== orientation ==");
    match &r.oriented_graph {
        Some(g) => {
            let _ = write!(out, "{}", g.text);
        }
        None => {
            let _ = writeln!(out, "(not oriented)");
        }
    }
    for w in &r.simultaneity_warnings {
        let _ = writeln!(out, "warning: {w}");
    }

    if !r.backdoor_decisions.is_empty() {
        let _ = writeln!(out, "\n== backdoor scoring ==");
        for d in &r.backdoor_decisions {
            let _ = writeln!(out, "{d}");
        }
    }

    let _ = writeln!(out, "\n== instruments ==");
    if r.iv_analyses.is_empty() {
        let _ = writeln!(out, "(no instrument analysis)");
    }
    for analysis in &r.iv_analyses {
        let _ = writeln!(
            out,
            "treatment {} \u{2192} {}:",
            analysis.treatment, analysis.outcome
        );
        for cand in &analysis.candidates {
            let verdict = match cand.verdict {
                IvVerdict::Valid => "valid",
                IvVerdict::Conditional => "conditional",
                IvVerdict::Invalid => "invalid",
            };
            let _ = writeln!(out, "  candidate {}: {verdict}", cand.candidate);
            if let Some((trail, given)) = &cand.g1_witness {
                let _ = writeln!(
                    out,
                    "    open trail to the outcome: {}{}",
                    trail.display(),
                    if given.is_empty() {
                        String::new()
                    } else {
                        format!(
                            " (given {})",
                            given.iter().cloned().collect::<Vec<_>>().join(", ")
                        )
                    }
                );
            }
            if let Some(sep) = &cand.g2_witness {
                let _ = writeln!(
                    out,
                    "    separated from the treatment by {{{}}}",
                    sep.iter().cloned().collect::<Vec<_>>().join(", ")
                );
            }
            if !cand.required_controls.is_empty() {
                let _ = writeln!(
                    out,
                    "    required controls: {}",
                    cand.required_controls
                        .iter()
                        .cloned()
                        .collect::<Vec<_>>()
                        .join(", ")
                );
            }
        }
        for report in &analysis.reports {
            let _ = writeln!(out);
            let _ = write!(out, "{report}");
        }
    }

    for note in &r.notes {
        let _ = writeln!(out, "\nnote: {note}");
    }
    let _ = writeln!(out, "\nverdict: {}", r.verdict);
    out
}

/// Write report.json, report.txt, and the graph files into `out_dir`.
/// Returns the paths written.
pub fn write_reports(report: &PipelineReport, out_dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(out_dir)
        .map_err(|e| CoreError::Data(format!("cannot create {}: {e}", out_dir.display())))?;
    let mut written = Vec::new();
    let mut put = |name: &str, body: &str| -> Result<()> {
        let path = out_dir.join(name);
        std::fs::write(&path, body)
            .map_err(|e| CoreError::Data(format!("cannot write {}: {e}", path.display())))?;
        written.push(path);
        Ok(())
    };
    put("report.json", &crate::output::to_json(report)?)?;
    put("report.txt", &render_text(report))?;
    if let Some(g) = &report.oriented_graph {
        put("graph_oriented.txt", &g.text)?;
        put("graph_oriented.dot", &g.dot)?;
    }
    if let Some(g) = &report.posited_graph {
        put("graph_posited.txt", &g.text)?;
        put("graph_posited.dot", &g.dot)?;
    }
    Ok(written)
}
