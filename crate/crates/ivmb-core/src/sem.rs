//! Linear-Gaussian structural equation models: reproducible simulation,
//! exact population moments, named benchmark scenarios, and a plain-text
//! model format.
//!
//! Each vertex v satisfies `v = intercept_v + Σ_p w(p→v)·p + scale_v·ε_v`
//! with jointly Gaussian standard noises ε. Noises are independent unless
//! an explicit noise correlation links a pair; correlated noises model
//! unobserved common causes without adding graph edges.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use nalgebra::DMatrix;
use serde::ser::{Serialize, SerializeStruct, Serializer};

use crate::data::Dataset;
use crate::error::{CoreError, Result};
use crate::graph::Dag;
use crate::rng::CounterRng;

/// A linear structural equation model over a fully directed acyclic graph.
#[derive(Debug, Clone)]
pub struct LinearSem {
    dag: Dag,
    weights: BTreeMap<(usize, usize), f64>,
    intercepts: Vec<f64>,
    scales: Vec<f64>,
    noise_corr: Vec<(usize, usize, f64)>, // smaller index first
}

impl LinearSem {
    /// Build a model over `dag` with one weight per directed edge.
    /// Intercepts default to 0 and noise scales to 1.
    pub fn new(dag: Dag, weights: &[(&str, &str, f64)]) -> Result<Self> {
        if !dag.is_fully_directed() {
            return Err(CoreError::Invalid(
                "a structural model needs a fully directed graph".into(),
            ));
        }
        let mut map = BTreeMap::new();
        for &(a, b, w) in weights {
            if !w.is_finite() {
                return Err(CoreError::Invalid(format!(
                    "weight on {a} -> {b} is not finite"
                )));
            }
            let key = (dag.index_of(a)?, dag.index_of(b)?);
            if !dag.has_directed(a, b)? {
                return Err(CoreError::Graph(format!(
                    "weight given for missing edge {a} -> {b}"
                )));
            }
            if map.insert(key, w).is_some() {
                return Err(CoreError::Invalid(format!(
                    "duplicate weight for edge {a} -> {b}"
                )));
            }
        }
        if map.len() != dag.directed_edges().len() {
            return Err(CoreError::Invalid(format!(
                "expected a weight for each of {} edges, got {}",
                dag.directed_edges().len(),
                map.len()
            )));
        }
        let p = dag.len();
        Ok(LinearSem {
            dag,
            weights: map,
            intercepts: vec![0.0; p],
            scales: vec![1.0; p],
            noise_corr: Vec::new(),
        })
    }

    /// Set the intercept of one vertex.
    pub fn with_intercept(mut self, v: &str, c: f64) -> Result<Self> {
        if !c.is_finite() {
            return Err(CoreError::Invalid(format!("intercept of {v} is not finite")));
        }
        let i = self.dag.index_of(v)?;
        self.intercepts[i] = c;
        Ok(self)
    }

    /// Set the noise scale (standard deviation) of one vertex.
    pub fn with_scale(mut self, v: &str, s: f64) -> Result<Self> {
        if !(s.is_finite() && s > 0.0) {
            return Err(CoreError::Invalid(format!(
                "noise scale of {v} must be positive, got {s}"
            )));
        }
        let i = self.dag.index_of(v)?;
        self.scales[i] = s;
        Ok(self)
    }

    /// Correlate the standard noises of two vertices. The full noise
    /// correlation matrix must stay positive definite.
    pub fn with_noise_corr(mut self, a: &str, b: &str, r: f64) -> Result<Self> {
        let (ia, ib) = (self.dag.index_of(a)?, self.dag.index_of(b)?);
        if ia == ib {
            return Err(CoreError::Invalid(format!(
                "noise correlation needs two distinct vertices, got {a} twice"
            )));
        }
        if !r.is_finite() {
            return Err(CoreError::Invalid(format!(
                "noise correlation {a} ~ {b} is not finite"
            )));
        }
        let key = (ia.min(ib), ia.max(ib));
        if self.noise_corr.iter().any(|&(x, y, _)| (x, y) == key) {
            return Err(CoreError::Invalid(format!(
                "duplicate noise correlation {a} ~ {b}"
            )));
        }
        self.noise_corr.push((key.0, key.1, r));
        if nalgebra::Cholesky::new(self.noise_corr_matrix()).is_none() {
            return Err(CoreError::Invalid(
                "noise correlation matrix is not positive definite".into(),
            ));
        }
        Ok(self)
    }

    /// The underlying graph.
    pub fn dag(&self) -> &Dag {
        &self.dag
    }

    /// Weight of the edge a→b, or 0 when the edge is absent.
    pub fn weight(&self, a: &str, b: &str) -> Result<f64> {
        let key = (self.dag.index_of(a)?, self.dag.index_of(b)?);
        Ok(self.weights.get(&key).copied().unwrap_or(0.0))
    }

    /// Intercept of a vertex.
    pub fn intercept(&self, v: &str) -> Result<f64> {
        Ok(self.intercepts[self.dag.index_of(v)?])
    }

    /// Noise scale of a vertex.
    pub fn scale(&self, v: &str) -> Result<f64> {
        Ok(self.scales[self.dag.index_of(v)?])
    }

    /// Noise correlations as (vertex, vertex, r) triples.
    pub fn noise_correlations(&self) -> Vec<(String, String, f64)> {
        let names = self.dag.vertices();
        self.noise_corr
            .iter()
            .map(|&(a, b, r)| (names[a].clone(), names[b].clone(), r))
            .collect()
    }

    fn noise_corr_matrix(&self) -> DMatrix<f64> {
        let p = self.dag.len();
        let mut r = DMatrix::identity(p, p);
        for &(a, b, rho) in &self.noise_corr {
            r[(a, b)] = rho;
            r[(b, a)] = rho;
        }
        r
    }

    /// Draw `n` observations. Values are addressed by (seed, vertex, row),
    /// so the result is bit-identical for a given seed regardless of how
    /// the work is scheduled, and row i of a longer run equals row i of a
    /// shorter one. Latent vertices are simulated but not returned.
    pub fn sample(&self, n: usize, seed: u64) -> Result<Dataset> {
        let p = self.dag.len();
        let order = self.dag.topological_order()?;
        let rng = CounterRng::new(seed);
        let chol = if self.noise_corr.is_empty() {
            None
        } else {
            Some(
                nalgebra::Cholesky::new(self.noise_corr_matrix())
                    .ok_or_else(|| {
                        CoreError::Numeric("noise correlation matrix lost definiteness".into())
                    })?
                    .l(),
            )
        };
        // Parent lists with weights, indexed by child.
        let mut parents: Vec<Vec<(usize, f64)>> = vec![Vec::new(); p];
        for (&(a, b), &w) in &self.weights {
            parents[b].push((a, w));
        }
        let mut values = vec![vec![0.0f64; n]; p];
        let mut eps = vec![0.0f64; p];
        for row in 0..n {
            for (j, e) in eps.iter_mut().enumerate() {
                *e = rng.standard_normal(j as u64, row as u64);
            }
            if let Some(l) = &chol {
                let mut mixed = vec![0.0f64; p];
                for i in 0..p {
                    let mut acc = 0.0;
                    for j in 0..=i {
                        acc += l[(i, j)] * eps[j];
                    }
                    mixed[i] = acc;
                }
                eps.copy_from_slice(&mixed);
            }
            for &v in &order {
                let mut val = self.intercepts[v] + self.scales[v] * eps[v];
                for &(pa, w) in &parents[v] {
                    val += w * values[pa][row];
                }
                values[v][row] = val;
            }
        }
        let names = self.dag.vertices();
        let mut out_names = Vec::new();
        let mut out_cols = Vec::new();
        for (i, name) in names.iter().enumerate() {
            if !self.dag.is_latent(name)? {
                out_names.push(name.clone());
                out_cols.push(std::mem::take(&mut values[i]));
            }
        }
        Dataset::new(out_names, out_cols)
    }

    /// Exact covariance matrix of all vertices (latent included), ordered
    /// like [`Dag::vertices`]: Σ = (I−W)⁻ᵀ D (I−W)⁻¹ with W[parent,child]
    /// the edge weights and D the noise covariance.
    pub fn population_covariance(&self) -> Result<DMatrix<f64>> {
        let p = self.dag.len();
        let mut a: DMatrix<f64> = DMatrix::identity(p, p);
        for (&(pa, ch), &w) in &self.weights {
            a[(pa, ch)] -= w;
        }
        let a_inv = a
            .try_inverse()
            .ok_or_else(|| CoreError::Numeric("I - W is singular".into()))?;
        let s = DMatrix::from_diagonal(&nalgebra::DVector::from_row_slice(&self.scales));
        let d = &s * self.noise_corr_matrix() * &s;
        let sigma: DMatrix<f64> = a_inv.transpose() * d * a_inv;
        // Exact symmetry for downstream consumers.
        Ok((&sigma + sigma.transpose()) * 0.5)
    }

    /// Population least-squares slopes of `y` on `xs` (intercept implied;
    /// slopes depend on covariances only).
    pub fn population_regression(&self, y: &str, xs: &[&str]) -> Result<Vec<f64>> {
        let sigma = self.population_covariance()?;
        let iy = self.dag.index_of(y)?;
        let idx: Vec<usize> = xs
            .iter()
            .map(|x| self.dag.index_of(x))
            .collect::<Result<_>>()?;
        if idx.contains(&iy) {
            return Err(CoreError::Invalid(format!(
                "{y} cannot appear among its own regressors"
            )));
        }
        let k = idx.len();
        let mut sxx = DMatrix::zeros(k, k);
        let mut sxy = nalgebra::DVector::zeros(k);
        for (r, &i) in idx.iter().enumerate() {
            sxy[r] = sigma[(i, iy)];
            for (c, &j) in idx.iter().enumerate() {
                sxx[(r, c)] = sigma[(i, j)];
            }
        }
        let beta = sxx
            .lu()
            .solve(&sxy)
            .ok_or_else(|| CoreError::Numeric("regressor covariance is singular".into()))?;
        Ok(beta.iter().copied().collect())
    }

    /// Asymptotic bias of least squares: the population slope of `y` on
    /// `xs` alone, minus the structural weight of each x→y edge. Covers
    /// bias from omitted ancestors and from correlated noises alike;
    /// `omitted` names the suspected culprits and is validated but does
    /// not change the arithmetic. One entry per regressor in `xs`.
    pub fn ovb_oracle(&self, y: &str, xs: &[&str], omitted: &[&str]) -> Result<Vec<f64>> {
        for o in omitted {
            let _ = self.dag.index_of(o)?;
            if xs.contains(o) || *o == y {
                return Err(CoreError::Invalid(format!(
                    "omitted vertex {o} overlaps the regression"
                )));
            }
        }
        let slopes = self.population_regression(y, xs)?;
        xs.iter()
            .zip(slopes)
            .map(|(x, b)| Ok(b - self.weight(x, y)?))
            .collect()
    }

    /// Parse the plain-text model format written by [`LinearSem::to_text`]:
    /// `vertex NAME [intercept=C] [scale=S] [ts=T] [latent]`,
    /// `a -> b w=0.8`, and `a ~ b r=0.6` lines, with `#` comments.
    pub fn parse_text(text: &str) -> Result<LinearSem> {
        let mut names: Vec<String> = Vec::new();
        let mut intercepts: Vec<(String, f64)> = Vec::new();
        let mut scales: Vec<(String, f64)> = Vec::new();
        let mut stamps: Vec<(String, i64)> = Vec::new();
        let mut latents: Vec<String> = Vec::new();
        let mut edges: Vec<(String, String, f64)> = Vec::new();
        let mut corrs: Vec<(String, String, f64)> = Vec::new();
        let parse_num = |lineno: usize, key: &str, s: &str| -> Result<f64> {
            s.parse().map_err(|_| {
                CoreError::Data(format!("model line {}: bad {key} value {s:?}", lineno + 1))
            })
        };
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts[0] == "vertex" {
                if parts.len() < 2 {
                    return Err(CoreError::Data(format!(
                        "model line {}: vertex declaration needs a name",
                        lineno + 1
                    )));
                }
                let name = parts[1].to_string();
                if names.contains(&name) {
                    return Err(CoreError::Data(format!(
                        "model line {}: duplicate vertex {name}",
                        lineno + 1
                    )));
                }
                for attr in &parts[2..] {
                    if let Some(v) = attr.strip_prefix("intercept=") {
                        intercepts.push((name.clone(), parse_num(lineno, "intercept", v)?));
                    } else if let Some(v) = attr.strip_prefix("scale=") {
                        scales.push((name.clone(), parse_num(lineno, "scale", v)?));
                    } else if let Some(v) = attr.strip_prefix("ts=") {
                        let ts: i64 = v.parse().map_err(|_| {
                            CoreError::Data(format!(
                                "model line {}: bad ts value {v:?}",
                                lineno + 1
                            ))
                        })?;
                        stamps.push((name.clone(), ts));
                    } else if *attr == "latent" {
                        latents.push(name.clone());
                    } else {
                        return Err(CoreError::Data(format!(
                            "model line {}: unknown attribute {attr:?}",
                            lineno + 1
                        )));
                    }
                }
                names.push(name);
            } else if parts.len() == 4 && parts[1] == "->" {
                let w = parts[3].strip_prefix("w=").ok_or_else(|| {
                    CoreError::Data(format!(
                        "model line {}: edge needs w=<weight>, got {:?}",
                        lineno + 1,
                        parts[3]
                    ))
                })?;
                edges.push((
                    parts[0].to_string(),
                    parts[2].to_string(),
                    parse_num(lineno, "weight", w)?,
                ));
            } else if parts.len() == 4 && parts[1] == "~" {
                let r = parts[3].strip_prefix("r=").ok_or_else(|| {
                    CoreError::Data(format!(
                        "model line {}: noise correlation needs r=<corr>, got {:?}",
                        lineno + 1,
                        parts[3]
                    ))
                })?;
                corrs.push((
                    parts[0].to_string(),
                    parts[2].to_string(),
                    parse_num(lineno, "correlation", r)?,
                ));
            } else {
                return Err(CoreError::Data(format!(
                    "model line {}: cannot parse {line:?}",
                    lineno + 1
                )));
            }
        }
        let mut dag = Dag::new(
            names,
            edges.iter().map(|(a, b, _)| (a.clone(), b.clone())).collect(),
            vec![],
        )?;
        for name in &latents {
            dag.set_latent(name, true)?;
        }
        for (name, ts) in &stamps {
            dag.set_stamp(name, *ts)?;
        }
        let weight_refs: Vec<(&str, &str, f64)> = edges
            .iter()
            .map(|(a, b, w)| (a.as_str(), b.as_str(), *w))
            .collect();
        let mut sem = LinearSem::new(dag, &weight_refs)?;
        for (v, c) in intercepts {
            sem = sem.with_intercept(&v, c)?;
        }
        for (v, s) in scales {
            sem = sem.with_scale(&v, s)?;
        }
        for (a, b, r) in corrs {
            sem = sem.with_noise_corr(&a, &b, r)?;
        }
        Ok(sem)
    }

    /// Read a model from a text file.
    pub fn load(path: &Path) -> Result<LinearSem> {
        let text = std::fs::read_to_string(path).map_err(|e| CoreError::Io {
            path: path.display().to_string(),
            source: e,
        })?;
        LinearSem::parse_text(&text)
    }

    /// Emit the plain-text model format parsed by [`LinearSem::parse_text`].
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (i, name) in self.dag.vertices().iter().enumerate() {
            let _ = write!(out, "vertex {name}");
            if self.intercepts[i] != 0.0 {
                let _ = write!(out, " intercept={}", self.intercepts[i]);
            }
            if self.scales[i] != 1.0 {
                let _ = write!(out, " scale={}", self.scales[i]);
            }
            if let Some(ts) = self.dag.stamp(name).expect("known vertex") {
                let _ = write!(out, " ts={ts}");
            }
            if self.dag.is_latent(name).expect("known vertex") {
                out.push_str(" latent");
            }
            out.push('\n');
        }
        for (&(a, b), &w) in &self.weights {
            let names = self.dag.vertices();
            let _ = writeln!(out, "{} -> {} w={}", names[a], names[b], w);
        }
        for (a, b, r) in self.noise_correlations() {
            let _ = writeln!(out, "{a} ~ {b} r={r}");
        }
        out
    }
}

impl Serialize for LinearSem {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(serde::Serialize)]
        struct VertexRow<'a> {
            name: &'a str,
            intercept: f64,
            scale: f64,
            #[serde(skip_serializing_if = "Option::is_none")]
            ts: Option<i64>,
            #[serde(skip_serializing_if = "std::ops::Not::not")]
            latent: bool,
        }
        #[derive(serde::Serialize)]
        struct EdgeRow<'a> {
            from: &'a str,
            to: &'a str,
            weight: f64,
        }
        #[derive(serde::Serialize)]
        struct CorrRow {
            a: String,
            b: String,
            r: f64,
        }
        let names = self.dag.vertices();
        let vertices: Vec<VertexRow> = names
            .iter()
            .enumerate()
            .map(|(i, n)| VertexRow {
                name: n,
                intercept: self.intercepts[i],
                scale: self.scales[i],
                ts: self.dag.stamp(n).expect("known vertex"),
                latent: self.dag.is_latent(n).expect("known vertex"),
            })
            .collect();
        let edges: Vec<EdgeRow> = self
            .weights
            .iter()
            .map(|(&(a, b), &w)| EdgeRow {
                from: &names[a],
                to: &names[b],
                weight: w,
            })
            .collect();
        let noise: Vec<CorrRow> = self
            .noise_correlations()
            .into_iter()
            .map(|(a, b, r)| CorrRow { a, b, r })
            .collect();
        let mut st = serializer.serialize_struct("LinearSem", 3)?;
        st.serialize_field("vertices", &vertices)?;
        st.serialize_field("edges", &edges)?;
        st.serialize_field("noise_correlations", &noise)?;
        st.end()
    }
}

/// Names of the built-in benchmark scenarios.
pub fn scenario_names() -> &'static [&'static str] {
    &[
        "iv_basic",
        "iv_invalid",
        "reversal",
        "collider_control",
        "irc",
        "mb_reduced",
        "rent_price",
    ]
}

/// Build a named benchmark scenario with default parameters.
pub fn scenario(name: &str) -> Result<LinearSem> {
    scenario_with(name, &BTreeMap::new())
}

/// Build a named benchmark scenario, overriding selected parameters.
///
/// Recognized keys: `iv_basic`/`iv_invalid`: `corr`, `alpha`, `beta` (and
/// for `iv_invalid`: `zu`, `uy`); `reversal`: `zy`, `yx`;
/// `collider_control`: `wx`, `wy`; `irc`: `w1`, `w2`, `beta1`, `beta2`,
/// `rho`; `mb_reduced`: `a1`, `a2`, `b1`, `b2`; `rent_price`: `be`.
pub fn scenario_with(name: &str, overrides: &BTreeMap<String, f64>) -> Result<LinearSem> {
    let check_keys = |allowed: &[&str]| -> Result<()> {
        for key in overrides.keys() {
            if !allowed.contains(&key.as_str()) {
                return Err(CoreError::Scenario(format!(
                    "scenario {name} has no parameter {key:?}; available: {}",
                    allowed.join(", ")
                )));
            }
        }
        Ok(())
    };
    let get = |key: &str, default: f64| overrides.get(key).copied().unwrap_or(default);
    match name {
        "iv_basic" => {
            check_keys(&["corr", "alpha", "beta"])?;
            let (corr, alpha, beta) = (get("corr", 0.6), get("alpha", 1.0), get("beta", 0.5));
            let mut dag = Dag::new(
                vec!["z".into(), "x".into(), "y".into()],
                vec![("z".into(), "x".into()), ("x".into(), "y".into())],
                vec![],
            )?;
            dag.set_stamp("z", 1)?;
            dag.set_stamp("x", 2)?;
            dag.set_stamp("y", 3)?;
            let mut sem = LinearSem::new(dag, &[("z", "x", alpha), ("x", "y", beta)])?;
            if corr != 0.0 {
                sem = sem.with_noise_corr("x", "y", corr)?;
            }
            Ok(sem)
        }
        "iv_invalid" => {
            check_keys(&["corr", "alpha", "beta", "zu", "uy"])?;
            let (corr, alpha, beta) = (get("corr", 0.6), get("alpha", 1.0), get("beta", 0.5));
            let (zu, uy) = (get("zu", 0.5), get("uy", 1.0));
            let mut dag = Dag::new(
                vec!["z".into(), "x".into(), "y".into(), "u".into()],
                vec![
                    ("z".into(), "x".into()),
                    ("x".into(), "y".into()),
                    ("z".into(), "u".into()),
                    ("u".into(), "y".into()),
                ],
                vec![],
            )?;
            dag.set_latent("u", true)?;
            dag.set_stamp("z", 1)?;
            dag.set_stamp("x", 2)?;
            dag.set_stamp("u", 2)?;
            dag.set_stamp("y", 3)?;
            let mut sem = LinearSem::new(
                dag,
                &[
                    ("z", "x", alpha),
                    ("x", "y", beta),
                    ("z", "u", zu),
                    ("u", "y", uy),
                ],
            )?;
            if corr != 0.0 {
                sem = sem.with_noise_corr("x", "y", corr)?;
            }
            Ok(sem)
        }
        "reversal" => {
            check_keys(&["zy", "yx"])?;
            let (zy, yx) = (get("zy", 0.6), get("yx", 0.8));
            let mut dag = Dag::new(
                vec!["z".into(), "y".into(), "x1".into()],
                vec![("z".into(), "y".into()), ("y".into(), "x1".into())],
                vec![],
            )?;
            dag.set_stamp("z", 1)?;
            dag.set_stamp("y", 2)?;
            dag.set_stamp("x1", 3)?;
            LinearSem::new(dag, &[("z", "y", zy), ("y", "x1", yx)])
        }
        "collider_control" => {
            check_keys(&["wx", "wy"])?;
            let (wx, wy) = (get("wx", 0.8), get("wy", 0.8));
            let mut dag = Dag::new(
                vec!["x".into(), "y".into(), "c".into()],
                vec![("x".into(), "c".into()), ("y".into(), "c".into())],
                vec![],
            )?;
            dag.set_stamp("x", 1)?;
            dag.set_stamp("y", 1)?;
            dag.set_stamp("c", 2)?;
            let sem = LinearSem::new(dag, &[("x", "c", wx), ("y", "c", wy)])?;
            sem.with_scale("c", 0.6)
        }
        "irc" => {
            check_keys(&["w1", "w2", "beta1", "beta2", "rho"])?;
            let (w1, w2) = (get("w1", 0.75), get("w2", 0.75));
            let (b1, b2) = (get("beta1", 0.7), get("beta2", 0.35));
            let rho = get("rho", -0.2);
            let s2 = 1.0 - (w1 * w1 + w2 * w2 + 2.0 * rho * w1 * w2);
            if s2 <= 0.0 {
                return Err(CoreError::Scenario(format!(
                    "irc weights w1={w1}, w2={w2} leave residual variance {s2:.4} ≤ 0 \
                     for x3; shrink the weights"
                )));
            }
            let t2 = 1.0 - (b1 * b1 + b2 * b2 + 2.0 * rho * b1 * b2);
            if t2 <= 0.0 {
                return Err(CoreError::Scenario(format!(
                    "irc outcome weights beta1={b1}, beta2={b2} leave residual variance \
                     {t2:.4} ≤ 0 for y; shrink the weights"
                )));
            }
            let mut dag = Dag::new(
                vec!["x1".into(), "x2".into(), "x3".into(), "y".into()],
                vec![
                    ("x1".into(), "x3".into()),
                    ("x2".into(), "x3".into()),
                    ("x1".into(), "y".into()),
                    ("x2".into(), "y".into()),
                ],
                vec![],
            )?;
            dag.set_stamp("x1", 1)?;
            dag.set_stamp("x2", 1)?;
            dag.set_stamp("x3", 2)?;
            dag.set_stamp("y", 3)?;
            LinearSem::new(
                dag,
                &[
                    ("x1", "x3", w1),
                    ("x2", "x3", w2),
                    ("x1", "y", b1),
                    ("x2", "y", b2),
                ],
            )?
            .with_scale("x3", s2.sqrt())?
            .with_scale("y", t2.sqrt())?
            .with_noise_corr("x1", "x2", rho)
        }
        "mb_reduced" => {
            check_keys(&["a1", "a2", "b1", "b2"])?;
            let (a1, a2) = (get("a1", 1.0), get("a2", 1.0));
            let (b1, b2) = (get("b1", 0.8), get("b2", 0.8));
            let mut dag = Dag::new(
                vec![
                    "x1".into(),
                    "x2".into(),
                    "x3".into(),
                    "x4".into(),
                    "y".into(),
                ],
                vec![
                    ("x1".into(), "y".into()),
                    ("x2".into(), "y".into()),
                    ("y".into(), "x4".into()),
                    ("x3".into(), "x4".into()),
                ],
                vec![],
            )?;
            dag.set_stamp("x1", 1)?;
            dag.set_stamp("x2", 1)?;
            dag.set_stamp("x3", 1)?;
            dag.set_stamp("y", 2)?;
            dag.set_stamp("x4", 3)?;
            LinearSem::new(
                dag,
                &[
                    ("x1", "y", a1),
                    ("x2", "y", a2),
                    ("y", "x4", b1),
                    ("x3", "x4", b2),
                ],
            )
        }
        "rent_price" | "rent_price_sem" => {
            check_keys(&["be"])?;
            let be = get("be", 0.5);
            // Triangularized two-equation system: price is generated
            // first from the hedonic features, rent second from price
            // plus the features, with correlated equation errors
            // standing in for the simultaneity of the cyclic original.
            // `be` is the direct f1→rent weight; at 0 the edge is
            // absent and f1 reaches rent only through price.
            let features = ["f1", "f2", "f3", "f4"];
            let alpha = [0.6, 0.5, -0.3, 0.4];
            let delta = [be, 0.35, 0.45, -0.25];
            let price_to_rent = 0.6;
            let mut names: Vec<String> = features.iter().map(|s| s.to_string()).collect();
            names.push("price".into());
            names.push("rent".into());
            let mut edges = Vec::new();
            let mut weights: Vec<(&str, &str, f64)> = Vec::new();
            for (i, f) in features.iter().enumerate() {
                edges.push((f.to_string(), "price".to_string()));
                weights.push((f, "price", alpha[i]));
                if delta[i] != 0.0 {
                    edges.push((f.to_string(), "rent".to_string()));
                    weights.push((f, "rent", delta[i]));
                }
            }
            edges.push(("price".to_string(), "rent".to_string()));
            weights.push(("price", "rent", price_to_rent));
            let mut dag = Dag::new(names, edges, vec![])?;
            for f in features {
                dag.set_stamp(f, 1)?;
            }
            dag.set_stamp("price", 2)?;
            dag.set_stamp("rent", 2)?;
            let mut sem = LinearSem::new(dag, &weights)?
                .with_scale("price", 0.5)?
                .with_scale("rent", 0.5)?;
            for i in 0..features.len() {
                for j in i + 1..features.len() {
                    sem = sem.with_noise_corr(features[i], features[j], 0.5)?;
                }
            }
            sem = sem.with_noise_corr("price", "rent", 0.4)?;
            Ok(sem)
        }
        other => Err(CoreError::Scenario(format!(
            "unknown scenario {other:?}; available: {}",
            scenario_names().join(", ")
        ))),
    }
}
