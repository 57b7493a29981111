//! Command-line front end: simulate benchmark scenarios, screen and
//! select variables, diagnose correlated groups, orient and query causal
//! graphs, score backdoor edges, validate instruments, test endogeneity,
//! and run the whole pipeline end to end.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 numeric
//! failure, 4 enumeration bound exceeded.

mod config;
mod output;
mod pipeline;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use ivmb_core::data::{load_csv, Dataset};
use ivmb_core::graph::{Dag, IvCandidateReport, IvVerdict};
use ivmb_core::regress::endogeneity_tests;
use ivmb_core::score::compare_backdoor;
use ivmb_core::select::{
    cv_select, grouping_diagnostic, isis_bootstrap, solar, GroupReport, SelectAlgorithm,
    SelectionResult,
};
use ivmb_core::sem::scenario_with;
use ivmb_core::{CoreError, Result};
use serde::Serialize;

use crate::config::{parse_timestamps, PipelineConfig};
use crate::output::{emit, to_json, with_newline, Format};

#[derive(Parser)]
#[command(
    name = "ivmb",
    version,
    about = "Variable selection, causal orientation, and instrument validation"
)]
struct Cli {
    /// Root random seed; required by every subcommand that draws
    /// randomness (no wall-clock fallback).
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Write the output to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Output format (default: csv for simulate, text elsewhere).
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Cap the worker-thread count. Results are identical at any cap.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw rows from a built-in scenario.
    Simulate(SimulateArgs),
    /// Screen candidates by bootstrapped correlation ranking.
    Screen(ScreenArgs),
    /// Run one variable selector on a CSV dataset.
    Select(SelectArgs),
    /// Correlated-group diagnostics around anchor variables.
    DiagnoseGroups(DiagnoseGroupsArgs),
    /// Graph utilities: orient, query, dsep, iv-candidates.
    #[command(subcommand)]
    Graph(GraphCmd),
    /// Score a mediation triple with and without the direct edge.
    ScoreBackdoor(ScoreBackdoorArgs),
    /// Two-stage least squares with the endogeneity test battery.
    Ivtest(IvtestArgs),
    /// Run the full pipeline and write the report files.
    Pipeline(PipelineArgs),
}

/// Per-scenario generative parameters; each flag overrides one constant
/// of the named scenario (unknown combinations are rejected).
#[derive(Args)]
struct ScenarioParams {
    /// iv_basic, iv_invalid: error correlation between x and y.
    #[arg(long)]
    corr: Option<f64>,
    /// iv_basic, iv_invalid: z → x weight.
    #[arg(long)]
    alpha: Option<f64>,
    /// iv_basic, iv_invalid: x → y weight.
    #[arg(long)]
    beta: Option<f64>,
    /// iv_invalid: z → u weight.
    #[arg(long)]
    zu: Option<f64>,
    /// iv_invalid: u → y weight.
    #[arg(long)]
    uy: Option<f64>,
    /// reversal: z → y weight.
    #[arg(long)]
    zy: Option<f64>,
    /// reversal: y → x1 weight.
    #[arg(long)]
    yx: Option<f64>,
    /// collider_control: x → c weight.
    #[arg(long)]
    wx: Option<f64>,
    /// collider_control: y → c weight.
    #[arg(long)]
    wy: Option<f64>,
    /// irc: x1 → x3 weight.
    #[arg(long)]
    w1: Option<f64>,
    /// irc: x2 → x3 weight.
    #[arg(long)]
    w2: Option<f64>,
    /// irc: x1 → y weight.
    #[arg(long)]
    beta1: Option<f64>,
    /// irc: x2 → y weight.
    #[arg(long)]
    beta2: Option<f64>,
    /// irc: fixed x1–x2 correlation.
    #[arg(long)]
    rho: Option<f64>,
    /// mb_reduced: x1 → y weight.
    #[arg(long)]
    a1: Option<f64>,
    /// mb_reduced: x2 → y weight.
    #[arg(long)]
    a2: Option<f64>,
    /// mb_reduced: y → x4 weight.
    #[arg(long)]
    b1: Option<f64>,
    /// mb_reduced: x3 → x4 weight.
    #[arg(long)]
    b2: Option<f64>,
    /// rent_price: direct f1 → rent weight (0 removes the edge).
    #[arg(long)]
    be: Option<f64>,
}

impl ScenarioParams {
    fn overrides(&self) -> BTreeMap<String, f64> {
        let pairs = [
            ("corr", self.corr),
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("zu", self.zu),
            ("uy", self.uy),
            ("zy", self.zy),
            ("yx", self.yx),
            ("wx", self.wx),
            ("wy", self.wy),
            ("w1", self.w1),
            ("w2", self.w2),
            ("beta1", self.beta1),
            ("beta2", self.beta2),
            ("rho", self.rho),
            ("a1", self.a1),
            ("a2", self.a2),
            ("b1", self.b1),
            ("b2", self.b2),
            ("be", self.be),
        ];
        pairs
            .into_iter()
            .filter_map(|(k, v)| v.map(|v| (k.to_string(), v)))
            .collect()
    }
}

#[derive(Args)]
struct SimulateArgs {
    /// Scenario name: iv_basic, iv_invalid, reversal, collider_control,
    /// irc, mb_reduced, rent_price.
    scenario: String,
    /// Rows to draw.
    #[arg(short = 'n', long = "rows")]
    rows: usize,
    #[command(flatten)]
    params: ScenarioParams,
}

#[derive(Args)]
struct ScreenArgs {
    /// CSV file with a header row.
    #[arg(long)]
    input: PathBuf,
    /// Response column.
    #[arg(long)]
    response: String,
    /// Bootstrap replicates.
    #[arg(long, default_value_t = 100)]
    bootstrap: usize,
    /// Inclusion-frequency threshold defining the kept set.
    #[arg(long, default_value_t = 0.5)]
    threshold: f64,
    /// Fraction of ranked candidates kept per round (default 1/ln n).
    #[arg(long)]
    keep_fraction: Option<f64>,
    /// Pull in companions whose correlation with a kept variable
    /// reaches this cutoff.
    #[arg(long)]
    corr_include: Option<f64>,
}

/// Which selector `select` runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Selector {
    /// Subsample-frequency stability selection.
    Solar,
    /// Cross-validated lasso.
    CvLasso,
    /// Cross-validated elastic net.
    CvEn,
}

#[derive(Args)]
struct SelectArgs {
    /// Which selector to run.
    #[arg(long, value_enum)]
    algorithm: Selector,
    /// CSV file with a header row.
    #[arg(long)]
    input: PathBuf,
    /// Response column.
    #[arg(long)]
    response: String,
    /// Stability selection: subsample count.
    #[arg(long, default_value_t = 10)]
    subsamples: usize,
    /// Stability selection: subsample size as a fraction of the rows.
    #[arg(long, default_value_t = 0.9)]
    fraction: f64,
    /// Stability selection: inclusion threshold (default: tuned).
    #[arg(long)]
    c: Option<f64>,
    /// Cross-validation: fold count.
    #[arg(long, default_value_t = 10)]
    folds: usize,
}

#[derive(Args)]
struct DiagnoseGroupsArgs {
    /// CSV file with a header row.
    #[arg(long)]
    input: PathBuf,
    /// Anchor variables, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    anchors: Vec<String>,
    /// Absolute-correlation cutoff defining group membership.
    #[arg(long, default_value_t = 0.7)]
    cutoff: f64,
}

#[derive(Subcommand)]
enum GraphCmd {
    /// Orient undirected edges using the vertex timestamps in the file.
    Orient {
        /// Graph file in edge-list text format.
        #[arg(long)]
        graph: PathBuf,
    },
    /// Parents, children, and Markov blanket of one vertex.
    Query {
        /// Graph file in edge-list text format.
        #[arg(long)]
        graph: PathBuf,
        /// Vertex to describe.
        #[arg(long)]
        vertex: String,
    },
    /// Decide d-separation between two vertices.
    Dsep {
        /// Graph file in edge-list text format.
        #[arg(long)]
        graph: PathBuf,
        /// First vertex.
        #[arg(long)]
        a: String,
        /// Second vertex.
        #[arg(long)]
        b: String,
        /// Conditioning vertices, comma separated.
        #[arg(long, value_delimiter = ',')]
        given: Vec<String>,
    },
    /// Evaluate instrument candidates for a treatment → outcome edge.
    IvCandidates {
        /// Graph file in edge-list text format.
        #[arg(long)]
        graph: PathBuf,
        /// Treatment vertex.
        #[arg(long)]
        x: String,
        /// Outcome vertex.
        #[arg(long)]
        y: String,
        /// Controls assumed conditioned on, comma separated.
        #[arg(long, value_delimiter = ',')]
        controls: Vec<String>,
        /// Vertex cap of the subset enumeration (default 14).
        #[arg(long)]
        cap: Option<usize>,
    },
}

#[derive(Args)]
struct ScoreBackdoorArgs {
    /// CSV file with a header row.
    #[arg(long)]
    input: PathBuf,
    /// Parent of the mediation triple.
    #[arg(long)]
    parent: String,
    /// Mediator of the triple.
    #[arg(long)]
    mediator: String,
    /// Child of the triple.
    #[arg(long)]
    child: String,
    /// Additional parents of the child, comma separated.
    #[arg(long, value_delimiter = ',')]
    controls: Vec<String>,
}

#[derive(Args)]
struct IvtestArgs {
    /// CSV file with a header row.
    #[arg(long)]
    input: PathBuf,
    /// Outcome column.
    #[arg(long)]
    response: String,
    /// Endogenous regressor.
    #[arg(long)]
    endogenous: String,
    /// Excluded instruments, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    instruments: Vec<String>,
    /// Included exogenous regressors, comma separated.
    #[arg(long, value_delimiter = ',')]
    exogenous: Vec<String>,
}

#[derive(Args)]
struct PipelineArgs {
    /// Flat key = value config file; command-line flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Built-in scenario to simulate.
    #[arg(long)]
    scenario: Option<String>,
    /// Scenario parameter overrides as name=value, comma separated.
    #[arg(long, value_delimiter = ',')]
    param: Vec<String>,
    /// CSV input file.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Rows to simulate (scenario source only).
    #[arg(short = 'n', long = "rows")]
    rows: Option<usize>,
    /// Response column.
    #[arg(long)]
    response: Option<String>,
    /// Per-column timestamps as name=epoch, comma separated.
    #[arg(long)]
    timestamps: Option<String>,
    /// Columns to log-transform at ingestion, comma separated.
    #[arg(long, value_delimiter = ',')]
    log_columns: Vec<String>,
    /// Standardize all columns at ingestion.
    #[arg(long)]
    standardize: bool,
    /// Screening bootstrap replicates.
    #[arg(long)]
    isis_b: Option<usize>,
    /// Screening inclusion threshold.
    #[arg(long)]
    isis_threshold: Option<f64>,
    /// Stability selection: subsample count.
    #[arg(long)]
    solar_subsamples: Option<usize>,
    /// Stability selection: subsample fraction.
    #[arg(long)]
    solar_fraction: Option<f64>,
    /// Stability selection: inclusion threshold (default: tuned).
    #[arg(long)]
    solar_c: Option<f64>,
    /// Cross-validation fold count.
    #[arg(long)]
    folds: Option<usize>,
    /// Grouping-diagnostic correlation cutoff.
    #[arg(long)]
    group_cutoff: Option<f64>,
    /// Vertex cap of the instrument-candidate enumeration.
    #[arg(long)]
    subset_cap: Option<usize>,
    /// Directory for report.json, report.txt, and the graph files.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Final blanket = union of the per-form selections instead of the
    /// intersection.
    #[arg(long)]
    union: bool,
}

/// Map an error to its contract exit code: 1 usage, 2 data, 3 numeric,
/// 4 bound exceeded.
fn exit_code(e: &CoreError) -> i32 {
    match e {
        CoreError::Invalid(_) => 1,
        CoreError::Io { .. }
        | CoreError::Data(_)
        | CoreError::UnknownName(_)
        | CoreError::Graph(_)
        | CoreError::Scenario(_) => 2,
        CoreError::Numeric(_) | CoreError::NoConvergence(_) => 3,
        CoreError::BoundExceeded(_) => 4,
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    if let Some(threads) = cli.threads {
        // Never affects results: parallel stages collect in input order.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    if let Err(e) = run(cli) {
        eprintln!("error: {e}");
        std::process::exit(exit_code(&e));
    }
}

/// The global seed, demanded by subcommands that draw randomness.
fn require_seed(seed: Option<u64>) -> Result<u64> {
    seed.ok_or_else(|| {
        CoreError::Invalid("this subcommand draws randomness; pass --seed".into())
    })
}

fn read_graph(path: &Path) -> Result<Dag> {
    let text = std::fs::read_to_string(path).map_err(|source| CoreError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Dag::parse_text(&text)
}

/// Column slices for every name in `names`.
fn column_refs<'a>(ds: &'a Dataset, names: &'a [String]) -> Result<Vec<(&'a str, &'a [f64])>> {
    names
        .iter()
        .map(|n| Ok((n.as_str(), ds.column(n)?)))
        .collect()
}

/// Candidate columns: everything except the response.
fn candidate_names(ds: &Dataset, response: &str) -> Result<Vec<String>> {
    ds.index_of(response)
        .map_err(|_| CoreError::UnknownName(format!("response column {response}")))?;
    Ok(ds
        .names()
        .iter()
        .filter(|n| n.as_str() != response)
        .cloned()
        .collect())
}

/// CSV projection of a selection: one row per scored variable.
fn selection_csv(sel: &SelectionResult) -> String {
    let mut out = String::from("variable,score,selected\n");
    for (name, score) in &sel.scores {
        let selected = sel.selected.iter().any(|s| s == name);
        let _ = writeln!(out, "{name},{score},{selected}");
    }
    out
}

/// Render a selection in the chosen format.
fn selection_payload(sel: &SelectionResult, format: Format) -> Result<String> {
    Ok(match format {
        Format::Json => to_json(sel)?,
        Format::Csv => selection_csv(sel),
        Format::Text => with_newline(format!("{sel}")),
    })
}

/// Render instrument-candidate reports as readable text.
fn candidates_text(reports: &[IvCandidateReport]) -> String {
    let mut out = String::new();
    for cand in reports {
        let verdict = match cand.verdict {
            IvVerdict::Valid => "valid",
            IvVerdict::Conditional => "conditional",
            IvVerdict::Invalid => "invalid",
        };
        let _ = writeln!(out, "candidate {}: {verdict}", cand.candidate);
        if let Some((trail, given)) = &cand.g1_witness {
            let _ = writeln!(
                out,
                "  open trail to the outcome: {}{}",
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
                "  separated from the treatment by {{{}}}",
                sep.iter().cloned().collect::<Vec<_>>().join(", ")
            );
        }
        if !cand.required_controls.is_empty() {
            let _ = writeln!(
                out,
                "  required controls: {}",
                cand.required_controls
                    .iter()
                    .cloned()
                    .collect::<Vec<_>>()
                    .join(", ")
            );
        }
    }
    out
}

fn run(cli: Cli) -> Result<()> {
    let out = cli.out.as_deref();
    match cli.command {
        Command::Simulate(args) => {
            let seed = require_seed(cli.seed)?;
            let sem = scenario_with(&args.scenario, &args.params.overrides())?;
            let ds = sem.sample(args.rows, seed)?;
            let format = cli.format.unwrap_or(Format::Csv);
            let payload = match format {
                Format::Json => {
                    #[derive(Serialize)]
                    struct DatasetJson<'a> {
                        columns: &'a [String],
                        rows: Vec<Vec<f64>>,
                    }
                    let rows = (0..ds.n())
                        .map(|i| (0..ds.p()).map(|j| ds.column_at(j)[i]).collect())
                        .collect();
                    to_json(&DatasetJson {
                        columns: ds.names(),
                        rows,
                    })?
                }
                // A data table's text form is its CSV form.
                Format::Csv | Format::Text => ds.to_csv(),
            };
            emit(&payload, out)
        }
        Command::Screen(args) => {
            let seed = require_seed(cli.seed)?;
            let ds = load_csv(&args.input, true)?;
            let candidates = candidate_names(&ds, &args.response)?;
            let x = column_refs(&ds, &candidates)?;
            let sel = isis_bootstrap(
                ds.column(&args.response)?,
                &x,
                args.bootstrap,
                args.keep_fraction,
                args.threshold,
                args.corr_include,
                seed,
            )?;
            let payload = selection_payload(&sel, cli.format.unwrap_or(Format::Text))?;
            emit(&payload, out)
        }
        Command::Select(args) => {
            let seed = require_seed(cli.seed)?;
            let ds = load_csv(&args.input, true)?;
            let candidates = candidate_names(&ds, &args.response)?;
            let x = column_refs(&ds, &candidates)?;
            let y = ds.column(&args.response)?;
            let sel = match args.algorithm {
                Selector::Solar => solar(y, &x, args.subsamples, args.fraction, args.c, seed)?,
                Selector::CvLasso => {
                    cv_select(y, &x, SelectAlgorithm::Lasso, args.folds, None, None, seed)?
                }
                Selector::CvEn => {
                    cv_select(y, &x, SelectAlgorithm::ElasticNet, args.folds, None, None, seed)?
                }
            };
            let payload = selection_payload(&sel, cli.format.unwrap_or(Format::Text))?;
            emit(&payload, out)
        }
        Command::DiagnoseGroups(args) => {
            let ds = load_csv(&args.input, true)?;
            let reports: Vec<GroupReport> = args
                .anchors
                .iter()
                .map(|anchor| grouping_diagnostic(&ds, anchor, args.cutoff))
                .collect::<Result<_>>()?;
            let payload = match cli.format.unwrap_or(Format::Text) {
                Format::Json => to_json(&reports)?,
                Format::Csv => {
                    let mut s =
                        String::from("anchor,members,sum_abs_coefficients,flagged\n");
                    for g in &reports {
                        let _ = writeln!(
                            s,
                            "{},{},{},{}",
                            g.anchor,
                            g.members.join("|"),
                            g.sum_abs_coefficients,
                            g.flagged
                        );
                    }
                    s
                }
                Format::Text => with_newline(
                    reports
                        .iter()
                        .map(|g| g.to_string())
                        .collect::<Vec<_>>()
                        .join("\n\n"),
                ),
            };
            emit(&payload, out)
        }
        Command::Graph(cmd) => run_graph(cmd, cli.format, out),
        Command::ScoreBackdoor(args) => {
            let ds = load_csv(&args.input, true)?;
            let controls: Vec<&str> = args.controls.iter().map(|s| s.as_str()).collect();
            let decision =
                compare_backdoor(&ds, &args.parent, &args.mediator, &args.child, &controls)?;
            let payload = match cli.format.unwrap_or(Format::Text) {
                Format::Json => to_json(&decision)?,
                Format::Csv => {
                    let mut s = String::from("criterion,with_edge,without_edge,winner\n");
                    for (name, with, without, winner) in [
                        (
                            "aic",
                            decision.score_with_edge.aic,
                            decision.score_without_edge.aic,
                            format!("{:?}", decision.winners.aic),
                        ),
                        (
                            "bic",
                            decision.score_with_edge.bic,
                            decision.score_without_edge.bic,
                            format!("{:?}", decision.winners.bic),
                        ),
                        (
                            "bge",
                            decision.score_with_edge.bge,
                            decision.score_without_edge.bge,
                            format!("{:?}", decision.winners.bge),
                        ),
                    ] {
                        let _ = writeln!(s, "{name},{with},{without},{winner}");
                    }
                    s
                }
                Format::Text => with_newline(decision.to_string()),
            };
            emit(&payload, out)
        }
        Command::Ivtest(args) => {
            let ds = load_csv(&args.input, true)?;
            let exog = column_refs(&ds, &args.exogenous)?;
            let instruments = column_refs(&ds, &args.instruments)?;
            let report = endogeneity_tests(
                ds.column(&args.response)?,
                &exog,
                (&args.endogenous, ds.column(&args.endogenous)?),
                &instruments,
                true,
            )?;
            let payload = match cli.format.unwrap_or(Format::Text) {
                Format::Json => to_json(&report)?,
                Format::Csv => {
                    let mut s = String::from("test,statistic,p_value\n");
                    for t in &report.tests {
                        let _ = writeln!(s, "{},{},{}", t.name, t.statistic, t.p_value);
                    }
                    let _ = writeln!(
                        s,
                        "first_stage_f,{},{}",
                        report.first_stage_f, report.first_stage_f_p
                    );
                    s
                }
                Format::Text => with_newline(report.to_string()),
            };
            emit(&payload, out)
        }
        Command::Pipeline(args) => run_pipeline_cmd(args, cli.seed),
    }
}

fn run_graph(cmd: GraphCmd, format: Option<Format>, out: Option<&Path>) -> Result<()> {
    match cmd {
        GraphCmd::Orient { graph } => {
            let g = read_graph(&graph)?;
            let mut stamps = BTreeMap::new();
            for v in g.vertices() {
                if let Some(s) = g.stamp(v)? {
                    stamps.insert(v.clone(), s);
                }
            }
            let oriented = g.orient_with_timestamps(&stamps)?;
            let payload = match format.unwrap_or(Format::Text) {
                Format::Json => {
                    #[derive(Serialize)]
                    struct GraphJson {
                        text: String,
                        dot: String,
                    }
                    to_json(&GraphJson {
                        text: oriented.to_text(),
                        dot: oriented.to_dot(),
                    })?
                }
                Format::Csv => {
                    let mut s = String::from("from,to,kind\n");
                    for (a, b) in oriented.directed_edges() {
                        let _ = writeln!(s, "{a},{b},directed");
                    }
                    for (a, b) in oriented.undirected_edges() {
                        let _ = writeln!(s, "{a},{b},undirected");
                    }
                    s
                }
                Format::Text => oriented.to_text(),
            };
            emit(&payload, out)
        }
        GraphCmd::Query { graph, vertex } => {
            let g = read_graph(&graph)?;
            #[derive(Serialize)]
            struct QueryOut {
                vertex: String,
                parents: Vec<String>,
                children: Vec<String>,
                markov_blanket: Vec<String>,
                #[serde(skip_serializing_if = "Option::is_none")]
                stamp: Option<i64>,
                latent: bool,
            }
            let info = QueryOut {
                parents: g.parents(&vertex)?,
                children: g.children(&vertex)?,
                markov_blanket: g.markov_blanket(&vertex)?.into_iter().collect(),
                stamp: g.stamp(&vertex)?,
                latent: g.is_latent(&vertex)?,
                vertex,
            };
            let payload = match format.unwrap_or(Format::Text) {
                Format::Json => to_json(&info)?,
                Format::Csv => {
                    let mut s = String::from("field,values\n");
                    let _ = writeln!(s, "parents,{}", info.parents.join("|"));
                    let _ = writeln!(s, "children,{}", info.children.join("|"));
                    let _ = writeln!(s, "markov_blanket,{}", info.markov_blanket.join("|"));
                    s
                }
                Format::Text => {
                    let mut s = String::new();
                    let _ = writeln!(s, "vertex: {}", info.vertex);
                    let _ = writeln!(s, "parents: {}", info.parents.join(", "));
                    let _ = writeln!(s, "children: {}", info.children.join(", "));
                    let _ = writeln!(s, "markov blanket: {}", info.markov_blanket.join(", "));
                    if let Some(stamp) = info.stamp {
                        let _ = writeln!(s, "timestamp: {stamp}");
                    }
                    if info.latent {
                        let _ = writeln!(s, "latent: true");
                    }
                    s
                }
            };
            emit(&payload, out)
        }
        GraphCmd::Dsep { graph, a, b, given } => {
            let g = read_graph(&graph)?;
            let conditioning: BTreeSet<String> = given.into_iter().collect();
            let separated = g.d_separated(&a, &b, &conditioning)?;
            let payload = match format.unwrap_or(Format::Text) {
                Format::Json => {
                    #[derive(Serialize)]
                    struct DsepOut {
                        separated: bool,
                    }
                    to_json(&DsepOut { separated })?
                }
                Format::Csv => format!("separated\n{separated}\n"),
                Format::Text => format!("{separated}\n"),
            };
            emit(&payload, out)
        }
        GraphCmd::IvCandidates {
            graph,
            x,
            y,
            controls,
            cap,
        } => {
            let g = read_graph(&graph)?;
            let control_set: BTreeSet<String> = controls.into_iter().collect();
            let reports = g.iv_candidates(&x, &y, &control_set, cap)?;
            let payload = match format.unwrap_or(Format::Text) {
                Format::Json => to_json(&reports)?,
                Format::Csv => {
                    let mut s =
                        String::from("candidate,g1_holds,g2_holds,verdict,required_controls\n");
                    for c in &reports {
                        let verdict = match c.verdict {
                            IvVerdict::Valid => "valid",
                            IvVerdict::Conditional => "conditional",
                            IvVerdict::Invalid => "invalid",
                        };
                        let _ = writeln!(
                            s,
                            "{},{},{},{verdict},{}",
                            c.candidate,
                            c.g1_holds,
                            c.g2_holds,
                            c.required_controls
                                .iter()
                                .cloned()
                                .collect::<Vec<_>>()
                                .join("|")
                        );
                    }
                    s
                }
                Format::Text => candidates_text(&reports),
            };
            emit(&payload, out)
        }
    }
}

fn run_pipeline_cmd(args: PipelineArgs, seed: Option<u64>) -> Result<()> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|source| CoreError::Io {
                path: path.display().to_string(),
                source,
            })?;
            PipelineConfig::parse(&text)?
        }
        None => PipelineConfig::default(),
    };
    if let Some(scenario) = args.scenario {
        cfg.scenario = Some(scenario);
        cfg.input = None;
    }
    for pair in &args.param {
        let (name, value) = pair.split_once('=').ok_or_else(|| {
            CoreError::Invalid(format!("--param entry {pair:?} is not name=value"))
        })?;
        let value: f64 = value
            .parse()
            .map_err(|_| CoreError::Invalid(format!("--param {name}: cannot parse {value:?}")))?;
        cfg.scenario_params.insert(name.to_string(), value);
    }
    if let Some(input) = args.input {
        cfg.input = Some(input);
        cfg.scenario = None;
    }
    if let Some(rows) = args.rows {
        cfg.rows = rows;
    }
    if let Some(response) = args.response {
        cfg.response = response;
    }
    if let Some(ts) = &args.timestamps {
        cfg.timestamps = parse_timestamps(ts)?;
    }
    if !args.log_columns.is_empty() {
        cfg.log_columns = args.log_columns;
    }
    if args.standardize {
        cfg.standardize = true;
    }
    if let Some(v) = args.isis_b {
        cfg.isis_b = v;
    }
    if let Some(v) = args.isis_threshold {
        cfg.isis_threshold = v;
    }
    if let Some(v) = args.solar_subsamples {
        cfg.solar_subsamples = v;
    }
    if let Some(v) = args.solar_fraction {
        cfg.solar_fraction = v;
    }
    if let Some(v) = args.solar_c {
        cfg.solar_c = Some(v);
    }
    if let Some(v) = args.folds {
        cfg.cv_folds = v;
    }
    if let Some(v) = args.group_cutoff {
        cfg.group_cutoff = v;
    }
    if let Some(v) = args.subset_cap {
        cfg.subset_cap = v;
    }
    if let Some(dir) = args.out_dir {
        cfg.out_dir = dir;
    }
    if args.union {
        cfg.blanket_union = true;
    }
    if let Some(seed) = seed {
        cfg.seed = Some(seed);
    }

    let report = pipeline::run_pipeline(&cfg)?;
    let written = pipeline::write_reports(&report, &cfg.out_dir)?;
    println!("verdict: {}", report.verdict);
    println!(
        "final blanket: {}",
        if report.final_blanket.is_empty() {
            "(none)".to_string()
        } else {
            report.final_blanket.join(", ")
        }
    );
    for path in &written {
        println!("wrote {}", path.display());
    }
    Ok(())
}
