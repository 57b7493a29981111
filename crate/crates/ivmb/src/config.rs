//! Pipeline configuration: a flat `key = value` text file merged with
//! command-line overrides.
//!
//! Recognized keys (one per line, `#` starts a comment):
//!
//! ```text
//! scenario   = mb_reduced        # built-in generator (or: input = data.csv)
//! param.a1   = 1.0               # scenario parameter override
//! rows       = 5000              # simulated rows (scenario source only)
//! response   = y                 # required: the outcome column
//! seed       = 7                 # required: no wall-clock randomness
//! timestamps = x1=1,x2=1,y=2     # per-column epochs (CSV sources)
//! log_columns = price,rent       # logged at ingestion
//! standardize = false
//! isis_b     = 100               # screening bootstrap replicates
//! isis_threshold = 0.5
//! solar_subsamples = 10
//! solar_fraction   = 0.9
//! solar_c    = 0.7               # omit to tune on a validation split
//! cv_folds   = 10
//! group_cutoff = 0.7
//! subset_cap = 14
//! blanket_rule = intersection    # or union
//! out_dir    = ./out
//! ```

use std::collections::BTreeMap;
use std::path::PathBuf;

use ivmb_core::{CoreError, Result};

/// Everything the pipeline needs to run, resolved from the config file
/// and command-line overrides.
#[derive(Debug, Clone)]
pub struct PipelineConfig {
    /// Built-in scenario name (exclusive with `input`).
    pub scenario: Option<String>,
    /// Scenario parameter overrides (`param.*` keys).
    pub scenario_params: BTreeMap<String, f64>,
    /// CSV input path (exclusive with `scenario`).
    pub input: Option<PathBuf>,
    /// Rows to simulate when the source is a scenario.
    pub rows: usize,
    /// Outcome column.
    pub response: String,
    /// Explicit per-column timestamps; when empty and the source is a
    /// scenario, the scenario's own stamps are used.
    pub timestamps: BTreeMap<String, i64>,
    /// Columns log-transformed at ingestion.
    pub log_columns: Vec<String>,
    /// Standardize all columns at ingestion.
    pub standardize: bool,
    /// Screening bootstrap replicates.
    pub isis_b: usize,
    /// Screening inclusion threshold.
    pub isis_threshold: f64,
    /// Subsample count of the stability selector.
    pub solar_subsamples: usize,
    /// Subsample size as a fraction of the rows.
    pub solar_fraction: f64,
    /// Stability threshold; `None` tunes it on a validation split.
    pub solar_c: Option<f64>,
    /// Cross-validation folds.
    pub cv_folds: usize,
    /// Correlation cutoff of the grouping diagnostic.
    pub group_cutoff: f64,
    /// Vertex cap of the instrument-candidate enumeration.
    pub subset_cap: usize,
    /// Root seed; mandatory so runs are reproducible.
    pub seed: Option<u64>,
    /// Directory receiving report.json, report.txt, and the graph files.
    pub out_dir: PathBuf,
    /// Final blanket rule: union of the per-form selections instead of
    /// the default intersection.
    pub blanket_union: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            scenario: None,
            scenario_params: BTreeMap::new(),
            input: None,
            rows: 1000,
            response: String::new(),
            timestamps: BTreeMap::new(),
            log_columns: Vec::new(),
            standardize: false,
            isis_b: 100,
            isis_threshold: 0.5,
            solar_subsamples: 10,
            solar_fraction: 0.9,
            solar_c: None,
            cv_folds: 10,
            group_cutoff: 0.7,
            subset_cap: 14,
            seed: None,
            out_dir: PathBuf::from("."),
            blanket_union: false,
        }
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| CoreError::Invalid(format!("config key {key}: cannot parse {value:?}")))
}

/// Parse `x1=1,x2=1,y=2` into a name → epoch map.
pub fn parse_timestamps(value: &str) -> Result<BTreeMap<String, i64>> {
    let mut out = BTreeMap::new();
    for part in value.split(',').filter(|p| !p.trim().is_empty()) {
        let (name, stamp) = part.split_once('=').ok_or_else(|| {
            CoreError::Invalid(format!("timestamp entry {part:?} is not name=epoch"))
        })?;
        let name = name.trim().to_string();
        let stamp: i64 = parse_num("timestamps", stamp.trim())?;
        if out.insert(name.clone(), stamp).is_some() {
            return Err(CoreError::Invalid(format!("duplicate timestamp for {name}")));
        }
    }
    Ok(out)
}

impl PipelineConfig {
    /// Apply one `key = value` assignment.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "scenario" => self.scenario = Some(value.to_string()),
            "input" => self.input = Some(PathBuf::from(value)),
            "rows" | "n" => self.rows = parse_num(key, value)?,
            "response" => self.response = value.to_string(),
            "timestamps" => self.timestamps = parse_timestamps(value)?,
            "log_columns" => {
                self.log_columns = value
                    .split(',')
                    .map(|s| s.trim().to_string())
                    .filter(|s| !s.is_empty())
                    .collect();
            }
            "standardize" => {
                self.standardize = match value {
                    "true" | "yes" | "1" => true,
                    "false" | "no" | "0" => false,
                    other => {
                        return Err(CoreError::Invalid(format!(
                            "config key standardize: expected true or false, got {other:?}"
                        )))
                    }
                };
            }
            "isis_b" => self.isis_b = parse_num(key, value)?,
            "isis_threshold" => self.isis_threshold = parse_num(key, value)?,
            "solar_subsamples" | "solar_k" => self.solar_subsamples = parse_num(key, value)?,
            "solar_fraction" => self.solar_fraction = parse_num(key, value)?,
            "solar_c" => self.solar_c = Some(parse_num(key, value)?),
            "cv_folds" | "folds" => self.cv_folds = parse_num(key, value)?,
            "group_cutoff" => self.group_cutoff = parse_num(key, value)?,
            "subset_cap" => self.subset_cap = parse_num(key, value)?,
            "seed" => self.seed = Some(parse_num(key, value)?),
            "out_dir" => self.out_dir = PathBuf::from(value),
            "blanket_rule" => {
                self.blanket_union = match value {
                    "union" => true,
                    "intersection" => false,
                    other => {
                        return Err(CoreError::Invalid(format!(
                            "config key blanket_rule: expected intersection or union, got {other:?}"
                        )))
                    }
                };
            }
            _ => {
                if let Some(param) = key.strip_prefix("param.") {
                    self.scenario_params
                        .insert(param.to_string(), parse_num(key, value)?);
                } else {
                    return Err(CoreError::Invalid(format!("unknown config key {key:?}")));
                }
            }
        }
        Ok(())
    }

    /// Parse a flat key-value config file body into a fresh config.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CoreError::Invalid(format!(
                    "config line {}: expected key = value, got {line:?}",
                    lineno + 1
                ))
            })?;
            cfg.set(key.trim(), value.trim())?;
        }
        Ok(cfg)
    }

    /// Structural checks that need no data: exactly one source, a seed,
    /// a response name, and in-range hyperparameters.
    pub fn validate(&self) -> Result<()> {
        match (&self.scenario, &self.input) {
            (None, None) => {
                return Err(CoreError::Invalid(
                    "config needs a data source: set scenario or input".into(),
                ))
            }
            (Some(_), Some(_)) => {
                return Err(CoreError::Invalid(
                    "config sets both scenario and input; pick one source".into(),
                ))
            }
            _ => {}
        }
        if self.response.is_empty() {
            return Err(CoreError::Invalid("config must name a response column".into()));
        }
        if self.seed.is_none() {
            return Err(CoreError::Invalid(
                "config must pin a seed; runs may not draw wall-clock randomness".into(),
            ));
        }
        if self.rows == 0 {
            return Err(CoreError::Invalid("rows must be positive".into()));
        }
        Ok(())
    }
}
