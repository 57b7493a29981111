//! DAG/PDAG representation, trails, d-separation, Markov blankets,
//! Markov-equivalence enumeration, timestamp orientation, and graphical
//! instrument validation.
//!
//! A [`Dag`] may carry undirected edges (the PDAG extension used for
//! skeletons and partially oriented graphs). Operations whose answer could
//! depend on the orientation of an undirected edge are conservative: they
//! error out rather than guess.
//!
//! Vertices may be flagged latent. Latent vertices participate in trails
//! and blocking like any other vertex, but conditioning sets are always
//! drawn from observable vertices only — conditioning on an unobserved
//! quantity is not actionable.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{CoreError, Result};

/// Alias documenting intent at call sites that accept partially directed
/// graphs (skeletons, timestamp-oriented graphs).
pub type Pdag = Dag;

/// Vertex-labelled graph with directed edges and optional undirected edges.
///
/// Invariants: the directed part is acyclic, there are no self-loops, no
/// duplicate edges, and no vertex pair carries both a directed and an
/// undirected edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dag {
    names: Vec<String>,
    latent: Vec<bool>,
    stamps: Vec<Option<i64>>,
    directed: BTreeSet<(usize, usize)>,
    undirected: BTreeSet<(usize, usize)>, // stored with smaller index first
}

/// Direction of one traversed link inside a [`Trail`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Link {
    /// Traversed along the arrow: `v[i] → v[i+1]`.
    Forward,
    /// Traversed against the arrow: `v[i] ← v[i+1]`.
    Backward,
    /// An undirected edge.
    Undirected,
}

/// A simple trail: a vertex sequence connected by edges traversed in
/// either direction, with no repeated vertex.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Trail {
    /// Vertex names in walk order.
    pub vertices: Vec<String>,
    /// Per adjacent pair, the direction the edge was traversed.
    pub links: Vec<Link>,
}

impl Trail {
    /// Render like `z -> x <- y` / `a -- b`.
    pub fn display(&self) -> String {
        let mut out = String::new();
        for (i, v) in self.vertices.iter().enumerate() {
            if i > 0 {
                out.push_str(match self.links[i - 1] {
                    Link::Forward => " -> ",
                    Link::Backward => " <- ",
                    Link::Undirected => " -- ",
                });
            }
            out.push_str(v);
        }
        out
    }
}

/// Instrument verdict for one candidate vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum IvVerdict {
    /// Both criteria hold with the caller's controls alone.
    Valid,
    /// Both criteria hold once the listed extra controls are conditioned on.
    Conditional,
    /// No observable control set makes both criteria hold.
    Invalid,
}

/// Why a candidate failed (or how it can be rescued), with witnesses.
#[derive(Debug, Clone, Serialize)]
pub struct IvCandidateReport {
    /// Candidate vertex name.
    pub candidate: String,
    /// First criterion with the caller's controls: the candidate is
    /// separated from the outcome under every conditioning superset of the
    /// controls once the treatment edge is cut.
    pub g1_holds: bool,
    /// Second criterion with the caller's controls: no conditioning
    /// superset of the controls separates the candidate from the treatment.
    pub g2_holds: bool,
    /// On G1 failure: an open trail to the outcome in the cut graph plus
    /// the conditioning set that leaves it open.
    pub g1_witness: Option<(Trail, BTreeSet<String>)>,
    /// On G2 failure: a set separating the candidate from the treatment.
    pub g2_witness: Option<BTreeSet<String>>,
    /// Minimal extra controls under which both criteria hold (empty for a
    /// valid candidate; present exactly for conditional verdicts).
    pub required_controls: BTreeSet<String>,
    /// Overall verdict.
    pub verdict: IvVerdict,
}

/// Which arrows `cut_effect` removes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CutMode {
    /// Remove the single edge x→y.
    Edge,
    /// Remove every arrow into x.
    Incoming,
}

/// A trail annotated with its minimal blocking sets.
#[derive(Debug, Clone, Serialize)]
pub struct AnnotatedTrail {
    /// The trail itself.
    pub trail: Trail,
    /// Minimal vertex sets that block this trail: the empty set when the
    /// trail carries an un-conditioned collider, otherwise each interior
    /// non-collider as a singleton. Empty list = unblockable (direct edge).
    pub minimal_blocking_sets: Vec<BTreeSet<String>>,
}

impl Dag {
    /// Build a graph from vertex names and edge lists (undirected pairs in
    /// any order). Validates all structural invariants.
    pub fn new(
        names: Vec<String>,
        directed: Vec<(String, String)>,
        undirected: Vec<(String, String)>,
    ) -> Result<Self> {
        let mut index = BTreeMap::new();
        for (i, n) in names.iter().enumerate() {
            if n.is_empty() {
                return Err(CoreError::Graph("empty vertex name".into()));
            }
            if index.insert(n.clone(), i).is_some() {
                return Err(CoreError::Graph(format!("duplicate vertex: {n}")));
            }
        }
        let resolve = |n: &String| -> Result<usize> {
            index
                .get(n)
                .copied()
                .ok_or_else(|| CoreError::UnknownName(n.clone()))
        };
        let mut dag = Dag {
            latent: vec![false; names.len()],
            stamps: vec![None; names.len()],
            names,
            directed: BTreeSet::new(),
            undirected: BTreeSet::new(),
        };
        for (a, b) in &directed {
            let (ia, ib) = (resolve(a)?, resolve(b)?);
            if ia == ib {
                return Err(CoreError::Graph(format!("self-loop at {a}")));
            }
            if !dag.directed.insert((ia, ib)) {
                return Err(CoreError::Graph(format!("duplicate edge {a} -> {b}")));
            }
        }
        for (a, b) in &undirected {
            let (ia, ib) = (resolve(a)?, resolve(b)?);
            if ia == ib {
                return Err(CoreError::Graph(format!("self-loop at {a}")));
            }
            let key = (ia.min(ib), ia.max(ib));
            if dag.directed.contains(&(ia, ib))
                || dag.directed.contains(&(ib, ia))
                || !dag.undirected.insert(key)
            {
                return Err(CoreError::Graph(format!(
                    "edge {a} -- {b} duplicates an existing edge"
                )));
            }
        }
        dag.topological_order()?; // validates acyclicity of the directed part
        Ok(dag)
    }

    /// Mark a vertex latent (unobservable).
    pub fn set_latent(&mut self, v: &str, latent: bool) -> Result<()> {
        let i = self.index_of(v)?;
        self.latent[i] = latent;
        Ok(())
    }

    /// Assign a timestamp epoch to a vertex.
    pub fn set_stamp(&mut self, v: &str, stamp: i64) -> Result<()> {
        let i = self.index_of(v)?;
        self.stamps[i] = Some(stamp);
        Ok(())
    }

    /// Vertex names in declaration order.
    pub fn vertices(&self) -> &[String] {
        &self.names
    }

    /// Number of vertices.
    pub fn len(&self) -> usize {
        self.names.len()
    }

    /// True when the graph has no vertices.
    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    /// Index of a named vertex.
    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| CoreError::UnknownName(name.into()))
    }

    /// Whether a vertex is flagged latent.
    pub fn is_latent(&self, v: &str) -> Result<bool> {
        Ok(self.latent[self.index_of(v)?])
    }

    /// Timestamp of a vertex, if assigned.
    pub fn stamp(&self, v: &str) -> Result<Option<i64>> {
        Ok(self.stamps[self.index_of(v)?])
    }

    /// Directed edges as name pairs (parent, child), deterministic order.
    pub fn directed_edges(&self) -> Vec<(String, String)> {
        self.directed
            .iter()
            .map(|&(a, b)| (self.names[a].clone(), self.names[b].clone()))
            .collect()
    }

    /// Undirected edges as name pairs, deterministic order.
    pub fn undirected_edges(&self) -> Vec<(String, String)> {
        self.undirected
            .iter()
            .map(|&(a, b)| (self.names[a].clone(), self.names[b].clone()))
            .collect()
    }

    /// True when the graph has no undirected edges.
    pub fn is_fully_directed(&self) -> bool {
        self.undirected.is_empty()
    }

    /// Whether the directed edge a→b exists.
    pub fn has_directed(&self, a: &str, b: &str) -> Result<bool> {
        Ok(self
            .directed
            .contains(&(self.index_of(a)?, self.index_of(b)?)))
    }

    /// Parents of a vertex (tails of arrows into it).
    pub fn parents(&self, v: &str) -> Result<Vec<String>> {
        let i = self.index_of(v)?;
        Ok(self
            .directed
            .iter()
            .filter(|&&(_, c)| c == i)
            .map(|&(p, _)| self.names[p].clone())
            .collect())
    }

    /// Children of a vertex (heads of arrows out of it).
    pub fn children(&self, v: &str) -> Result<Vec<String>> {
        let i = self.index_of(v)?;
        Ok(self
            .directed
            .iter()
            .filter(|&&(p, _)| p == i)
            .map(|&(_, c)| self.names[c].clone())
            .collect())
    }

    /// A topological order of the directed part; errors when cyclic.
    pub fn topological_order(&self) -> Result<Vec<usize>> {
        let n = self.names.len();
        let mut indeg = vec![0usize; n];
        for &(_, c) in &self.directed {
            indeg[c] += 1;
        }
        let mut queue: VecDeque<usize> =
            (0..n).filter(|&v| indeg[v] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for &(p, c) in &self.directed {
                if p == v {
                    indeg[c] -= 1;
                    if indeg[c] == 0 {
                        queue.push_back(c);
                    }
                }
            }
        }
        if order.len() != n {
            return Err(CoreError::Graph("directed part contains a cycle".into()));
        }
        Ok(order)
    }

    /// Indices of `v` and all its directed descendants.
    fn descendants_incl(&self, v: usize) -> BTreeSet<usize> {
        let mut out = BTreeSet::from([v]);
        let mut stack = vec![v];
        while let Some(u) = stack.pop() {
            for &(p, c) in &self.directed {
                if p == u && out.insert(c) {
                    stack.push(c);
                }
            }
        }
        out
    }

    /// Neighbors along any edge, as (index, link direction from `v`).
    fn adjacency(&self, v: usize) -> Vec<(usize, Link)> {
        let mut out = Vec::new();
        for &(p, c) in &self.directed {
            if p == v {
                out.push((c, Link::Forward));
            } else if c == v {
                out.push((p, Link::Backward));
            }
        }
        for &(a, b) in &self.undirected {
            if a == v {
                out.push((b, Link::Undirected));
            } else if b == v {
                out.push((a, Link::Undirected));
            }
        }
        out.sort_by_key(|&(w, link)| (w, link_rank(link)));
        out
    }

    /// All simple trails between `a` and `b` with at most `max_len` edges,
    /// in deterministic lexicographic order.
    pub fn enumerate_trails(&self, a: &str, b: &str, max_len: usize) -> Result<Vec<Trail>> {
        let (ia, ib) = (self.index_of(a)?, self.index_of(b)?);
        let mut out = Vec::new();
        let mut visited = vec![false; self.names.len()];
        visited[ia] = true;
        let mut vertices = vec![ia];
        let mut links = Vec::new();
        self.trail_dfs(ia, ib, max_len, &mut visited, &mut vertices, &mut links, &mut out);
        Ok(out)
    }

    fn trail_dfs(
        &self,
        at: usize,
        target: usize,
        max_len: usize,
        visited: &mut Vec<bool>,
        vertices: &mut Vec<usize>,
        links: &mut Vec<Link>,
        out: &mut Vec<Trail>,
    ) {
        if links.len() >= max_len {
            return;
        }
        for (next, link) in self.adjacency(at) {
            if visited[next] {
                continue;
            }
            vertices.push(next);
            links.push(link);
            if next == target {
                out.push(Trail {
                    vertices: vertices.iter().map(|&v| self.names[v].clone()).collect(),
                    links: links.clone(),
                });
            } else {
                visited[next] = true;
                self.trail_dfs(next, target, max_len, visited, vertices, links, out);
                visited[next] = false;
            }
            vertices.pop();
            links.pop();
        }
    }

    /// Whether a trail is blocked by the conditioning set `z` (indices).
    ///
    /// A trail is blocked when some interior vertex is a chain or fork
    /// middle that lies in `z`, or a collider middle with neither itself
    /// nor any descendant in `z`. Errors when the trail carries an
    /// undirected edge — roles are then undefined and orientation is
    /// required first.
    fn trail_blocked(&self, trail: &Trail, z: &BTreeSet<usize>) -> Result<bool> {
        for link in &trail.links {
            if *link == Link::Undirected {
                return Err(CoreError::Graph(format!(
                    "orientation required: undirected edge on trail {}",
                    trail.display()
                )));
            }
        }
        for i in 1..trail.vertices.len() - 1 {
            let m = self.index_of(&trail.vertices[i])?;
            let collider =
                trail.links[i - 1] == Link::Forward && trail.links[i] == Link::Backward;
            if collider {
                if self.descendants_incl(m).is_disjoint(z) {
                    return Ok(true);
                }
            } else if z.contains(&m) {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// d-separation: true iff every trail between `a` and `b` is blocked
    /// by `z`. Preconditions: `a, b ∉ z`; every relevant trail must be
    /// fully directed (undirected edges raise an orientation error).
    pub fn d_separated(&self, a: &str, b: &str, z: &BTreeSet<String>) -> Result<bool> {
        if z.contains(a) || z.contains(b) {
            return Err(CoreError::Invalid(format!(
                "conditioning set must exclude {a} and {b}"
            )));
        }
        let z_idx: BTreeSet<usize> = z
            .iter()
            .map(|v| self.index_of(v))
            .collect::<Result<_>>()?;
        let trails = self.enumerate_trails(a, b, self.names.len())?;
        for trail in &trails {
            if !self.trail_blocked(trail, &z_idx)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Markov blanket: parents ∪ children ∪ other parents of children.
    pub fn markov_blanket(&self, v: &str) -> Result<BTreeSet<String>> {
        let i = self.index_of(v)?;
        let mut blanket = BTreeSet::new();
        for &(p, c) in &self.directed {
            if c == i {
                blanket.insert(self.names[p].clone());
            }
            if p == i {
                blanket.insert(self.names[c].clone());
                for &(q, c2) in &self.directed {
                    if c2 == c && q != i {
                        blanket.insert(self.names[q].clone());
                    }
                }
            }
        }
        Ok(blanket)
    }

    /// The skeleton: every edge made undirected, vertex set preserved
    /// (latent flags and stamps carried over).
    pub fn skeleton(&self) -> Pdag {
        let mut undirected = self.undirected.clone();
        for &(a, b) in &self.directed {
            undirected.insert((a.min(b), a.max(b)));
        }
        Dag {
            names: self.names.clone(),
            latent: self.latent.clone(),
            stamps: self.stamps.clone(),
            directed: BTreeSet::new(),
            undirected,
        }
    }

    /// V-structures a→c←b with a, b non-adjacent, as (a, c, b) index
    /// triples with a < b.
    fn v_structures(&self) -> BTreeSet<(usize, usize, usize)> {
        let mut out = BTreeSet::new();
        for &(a, c) in &self.directed {
            for &(b, c2) in &self.directed {
                if c2 == c && b > a && !self.adjacent(a, b) {
                    out.insert((a, c, b));
                }
            }
        }
        out
    }

    fn adjacent(&self, a: usize, b: usize) -> bool {
        self.directed.contains(&(a, b))
            || self.directed.contains(&(b, a))
            || self.undirected.contains(&(a.min(b), a.max(b)))
    }

    /// All DAGs with the same skeleton and the same v-structures as this
    /// graph (its Markov-equivalence class), enumerated deterministically.
    ///
    /// Bounded: errors beyond 12 vertices or 24 edges.
    pub fn equivalence_class(&self) -> Result<Vec<Dag>> {
        if !self.is_fully_directed() {
            return Err(CoreError::Graph(
                "equivalence_class requires a fully directed graph".into(),
            ));
        }
        if self.names.len() > 12 {
            return Err(CoreError::BoundExceeded(format!(
                "equivalence_class enumerates orientations for at most 12 vertices, got {}",
                self.names.len()
            )));
        }
        let edges: Vec<(usize, usize)> = self.directed.iter().copied().collect();
        if edges.len() > 24 {
            return Err(CoreError::BoundExceeded(format!(
                "equivalence_class enumerates at most 24 edges, got {}",
                edges.len()
            )));
        }
        let want_v = self.v_structures();
        let mut class = Vec::new();
        for mask in 0u64..(1u64 << edges.len()) {
            let directed: BTreeSet<(usize, usize)> = edges
                .iter()
                .enumerate()
                .map(|(k, &(a, b))| if mask >> k & 1 == 0 { (a, b) } else { (b, a) })
                .collect();
            let candidate = Dag {
                names: self.names.clone(),
                latent: self.latent.clone(),
                stamps: self.stamps.clone(),
                directed,
                undirected: BTreeSet::new(),
            };
            if candidate.topological_order().is_ok() && candidate.v_structures() == want_v {
                class.push(candidate);
            }
        }
        Ok(class)
    }

    /// Orient undirected edges by per-vertex timestamps: earlier → later;
    /// equal stamps stay undirected. Every vertex must be stamped, and a
    /// pre-existing directed edge from a later to an earlier stamp is an
    /// error.
    pub fn orient_with_timestamps(&self, stamps: &BTreeMap<String, i64>) -> Result<Pdag> {
        let mut stamp_of = vec![0i64; self.names.len()];
        for (i, name) in self.names.iter().enumerate() {
            stamp_of[i] = *stamps
                .get(name)
                .ok_or_else(|| CoreError::Invalid(format!("vertex {name} has no timestamp")))?;
        }
        for &(p, c) in &self.directed {
            if stamp_of[p] > stamp_of[c] {
                return Err(CoreError::Graph(format!(
                    "edge {} -> {} runs from stamp {} back to {}",
                    self.names[p], self.names[c], stamp_of[p], stamp_of[c]
                )));
            }
        }
        let mut directed = self.directed.clone();
        let mut undirected = BTreeSet::new();
        for &(a, b) in &self.undirected {
            if stamp_of[a] < stamp_of[b] {
                directed.insert((a, b));
            } else if stamp_of[b] < stamp_of[a] {
                directed.insert((b, a));
            } else {
                undirected.insert((a, b));
            }
        }
        let out = Dag {
            names: self.names.clone(),
            latent: self.latent.clone(),
            stamps: self.stamps.clone(),
            directed,
            undirected,
        };
        out.topological_order()?;
        Ok(out)
    }

    /// Copy of the graph with the effect of `x` on `y` cut: either the
    /// single edge x→y removed, or (incoming mode) every arrow into `x`.
    pub fn cut_effect(&self, x: &str, y: &str, mode: CutMode) -> Result<Dag> {
        let (ix, iy) = (self.index_of(x)?, self.index_of(y)?);
        let mut out = self.clone();
        match mode {
            CutMode::Edge => {
                if !out.directed.remove(&(ix, iy)) {
                    return Err(CoreError::Graph(format!(
                        "cut_effect: edge {x} -> {y} not present"
                    )));
                }
            }
            CutMode::Incoming => {
                out.directed.retain(|&(_, c)| c != ix);
            }
        }
        Ok(out)
    }

    /// Indices of observable (non-latent) vertices, excluding `skip`.
    fn observable_except(&self, skip: &BTreeSet<usize>) -> Vec<usize> {
        (0..self.names.len())
            .filter(|&v| !self.latent[v] && !skip.contains(&v))
            .collect()
    }

    /// Evaluate instrument candidacy of every vertex outside
    /// `{x, y} ∪ controls` for the effect x→y.
    ///
    /// For each candidate z, with the treatment edge cut: the first
    /// criterion demands that z and y stay d-separated under **every**
    /// observable conditioning superset of the controls; the second, on
    /// the intact graph, that **no** observable conditioning superset of
    /// the controls d-separates z from x. Candidates failing the first
    /// criterion are re-examined under minimal control augmentations; a
    /// success yields a conditional verdict listing the required controls.
    ///
    /// Both quantifiers are evaluated by exhaustive subset enumeration,
    /// which is why the graph size is capped (`subset_cap`, default 14).
    pub fn iv_candidates(
        &self,
        x: &str,
        y: &str,
        controls: &BTreeSet<String>,
        subset_cap: Option<usize>,
    ) -> Result<Vec<IvCandidateReport>> {
        let cap = subset_cap.unwrap_or(14);
        if self.names.len() > cap {
            return Err(CoreError::BoundExceeded(format!(
                "iv_candidates enumerates subsets for at most {cap} vertices, got {}",
                self.names.len()
            )));
        }
        let (ix, iy) = (self.index_of(x)?, self.index_of(y)?);
        if !self.directed.contains(&(ix, iy)) {
            return Err(CoreError::Graph(format!(
                "iv_candidates: edge {x} -> {y} not present"
            )));
        }
        let control_idx: BTreeSet<usize> = controls
            .iter()
            .map(|v| self.index_of(v))
            .collect::<Result<_>>()?;
        let cut = self.cut_effect(x, y, CutMode::Edge)?;
        let mut reports = Vec::new();
        for z in 0..self.names.len() {
            if z == ix || z == iy || control_idx.contains(&z) || self.latent[z] {
                continue;
            }
            let g1 = self.g1_check(&cut, z, iy, &control_idx)?;
            let g2 = self.g2_check(z, ix, &control_idx)?;
            let (g1_holds, g1_witness) = match g1 {
                Ok(()) => (true, None),
                Err(w) => (false, Some(w)),
            };
            let (g2_holds, g2_witness) = match g2 {
                Ok(()) => (true, None),
                Err(w) => (false, Some(w)),
            };
            let mut required = BTreeSet::new();
            let verdict = if g1_holds && g2_holds {
                IvVerdict::Valid
            } else if let Some(extra) =
                self.search_required_controls(&cut, z, ix, iy, &control_idx)?
            {
                required = extra.iter().map(|&v| self.names[v].clone()).collect();
                IvVerdict::Conditional
            } else {
                IvVerdict::Invalid
            };
            reports.push(IvCandidateReport {
                candidate: self.names[z].clone(),
                g1_holds,
                g2_holds,
                g1_witness,
                g2_witness,
                required_controls: required,
                verdict,
            });
        }
        Ok(reports)
    }

    /// G1 with controls `c`: in the cut graph, z ⊥ y under every
    /// observable conditioning superset of `c`. On failure returns the
    /// open trail and the conditioning set that leaves it open.
    fn g1_check(
        &self,
        cut: &Dag,
        z: usize,
        y: usize,
        c: &BTreeSet<usize>,
    ) -> Result<std::result::Result<(), (Trail, BTreeSet<String>)>> {
        let trails = cut.enumerate_trails(&self.names[z], &self.names[y], self.names.len())?;
        let mut skip: BTreeSet<usize> = c.clone();
        skip.insert(z);
        skip.insert(y);
        let free = cut.observable_except(&skip);
        for mask in 0u64..(1u64 << free.len()) {
            let mut zprime: BTreeSet<usize> = c.clone();
            for (k, &v) in free.iter().enumerate() {
                if mask >> k & 1 == 1 {
                    zprime.insert(v);
                }
            }
            for trail in &trails {
                if !cut.trail_blocked(trail, &zprime)? {
                    let named = zprime.iter().map(|&v| self.names[v].clone()).collect();
                    return Ok(Err((trail.clone(), named)));
                }
            }
        }
        Ok(Ok(()))
    }

    /// G2 with controls `c`: in the intact graph, no observable
    /// conditioning superset of `c` d-separates z from x. On failure
    /// returns a separating set.
    fn g2_check(
        &self,
        z: usize,
        x: usize,
        c: &BTreeSet<usize>,
    ) -> Result<std::result::Result<(), BTreeSet<String>>> {
        let trails = self.enumerate_trails(&self.names[z], &self.names[x], self.names.len())?;
        let mut skip: BTreeSet<usize> = c.clone();
        skip.insert(z);
        skip.insert(x);
        let free = self.observable_except(&skip);
        for mask in 0u64..(1u64 << free.len()) {
            let mut zprime: BTreeSet<usize> = c.clone();
            for (k, &v) in free.iter().enumerate() {
                if mask >> k & 1 == 1 {
                    zprime.insert(v);
                }
            }
            let mut all_blocked = true;
            for trail in &trails {
                if !self.trail_blocked(trail, &zprime)? {
                    all_blocked = false;
                    break;
                }
            }
            if all_blocked {
                let named = zprime.iter().map(|&v| self.names[v].clone()).collect();
                return Ok(Err(named));
            }
        }
        Ok(Ok(()))
    }

    /// Smallest observable control augmentation (size, then lexicographic)
    /// under which both criteria hold; `None` when no augmentation works.
    fn search_required_controls(
        &self,
        cut: &Dag,
        z: usize,
        x: usize,
        y: usize,
        c: &BTreeSet<usize>,
    ) -> Result<Option<BTreeSet<usize>>> {
        let mut skip: BTreeSet<usize> = c.clone();
        skip.extend([z, x, y]);
        let free = self.observable_except(&skip);
        // Enumerate by subset size for minimality.
        let masks = {
            let mut m: Vec<u64> = (1u64..(1u64 << free.len())).collect();
            m.sort_by_key(|mask| (mask.count_ones(), *mask));
            m
        };
        for mask in masks {
            let mut aug: BTreeSet<usize> = c.clone();
            let mut added = BTreeSet::new();
            for (k, &v) in free.iter().enumerate() {
                if mask >> k & 1 == 1 {
                    aug.insert(v);
                    added.insert(v);
                }
            }
            if self.g1_check(cut, z, y, &aug)?.is_ok() && self.g2_check(z, x, &aug)?.is_ok() {
                return Ok(Some(added));
            }
        }
        Ok(None)
    }

    /// All trails from `z` to `y` that do not pass through `via`, each
    /// annotated with its minimal blocking sets.
    pub fn backdoor_paths(&self, z: &str, y: &str, via: &str) -> Result<Vec<AnnotatedTrail>> {
        let via_idx = self.index_of(via)?;
        let trails = self.enumerate_trails(z, y, self.names.len())?;
        let mut out = Vec::new();
        for trail in trails {
            let interior: Vec<usize> = trail.vertices[1..trail.vertices.len() - 1]
                .iter()
                .map(|v| self.index_of(v))
                .collect::<Result<_>>()?;
            if interior.contains(&via_idx) {
                continue;
            }
            for link in &trail.links {
                if *link == Link::Undirected {
                    return Err(CoreError::Graph(format!(
                        "orientation required: undirected edge on trail {}",
                        trail.display()
                    )));
                }
            }
            let mut has_collider = false;
            let mut non_colliders = Vec::new();
            for i in 1..trail.vertices.len() - 1 {
                let collider =
                    trail.links[i - 1] == Link::Forward && trail.links[i] == Link::Backward;
                if collider {
                    has_collider = true;
                } else {
                    non_colliders.push(trail.vertices[i].clone());
                }
            }
            let minimal_blocking_sets = if has_collider {
                vec![BTreeSet::new()]
            } else {
                non_colliders
                    .into_iter()
                    .map(|v| BTreeSet::from([v]))
                    .collect()
            };
            out.push(AnnotatedTrail {
                trail,
                minimal_blocking_sets,
            });
        }
        Ok(out)
    }

    /// Parse the plain-text graph format: `node a`, `node a ts=1990`,
    /// `node u latent`, `a -> b`, `a -- b`. Blank lines and `#` comments
    /// are skipped; vertices referenced by edges are declared implicitly.
    pub fn parse_text(text: &str) -> Result<Dag> {
        let mut names: Vec<String> = Vec::new();
        let mut latent: Vec<(String, bool)> = Vec::new();
        let mut stamps: Vec<(String, i64)> = Vec::new();
        let mut directed = Vec::new();
        let mut undirected = Vec::new();
        let declare = |names: &mut Vec<String>, n: &str| {
            if !names.iter().any(|x| x == n) {
                names.push(n.to_string());
            }
        };
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts[0] == "node" {
                if parts.len() < 2 {
                    return Err(CoreError::Data(format!(
                        "graph line {}: node declaration needs a name",
                        lineno + 1
                    )));
                }
                let name = parts[1];
                declare(&mut names, name);
                for attr in &parts[2..] {
                    if *attr == "latent" {
                        latent.push((name.to_string(), true));
                    } else if let Some(ts) = attr.strip_prefix("ts=") {
                        let v: i64 = ts.parse().map_err(|_| {
                            CoreError::Data(format!(
                                "graph line {}: bad timestamp {ts:?}",
                                lineno + 1
                            ))
                        })?;
                        stamps.push((name.to_string(), v));
                    } else {
                        return Err(CoreError::Data(format!(
                            "graph line {}: unknown attribute {attr:?}",
                            lineno + 1
                        )));
                    }
                }
            } else if parts.len() == 3 && (parts[1] == "->" || parts[1] == "--") {
                declare(&mut names, parts[0]);
                declare(&mut names, parts[2]);
                if parts[1] == "->" {
                    directed.push((parts[0].to_string(), parts[2].to_string()));
                } else {
                    undirected.push((parts[0].to_string(), parts[2].to_string()));
                }
            } else {
                return Err(CoreError::Data(format!(
                    "graph line {}: cannot parse {line:?}",
                    lineno + 1
                )));
            }
        }
        let mut dag = Dag::new(names, directed, undirected)?;
        for (name, flag) in latent {
            dag.set_latent(&name, flag)?;
        }
        for (name, ts) in stamps {
            dag.set_stamp(&name, ts)?;
        }
        Ok(dag)
    }

    /// Emit the plain-text edge-list format parsed by [`Dag::parse_text`].
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (i, name) in self.names.iter().enumerate() {
            let _ = write!(out, "node {name}");
            if let Some(ts) = self.stamps[i] {
                let _ = write!(out, " ts={ts}");
            }
            if self.latent[i] {
                out.push_str(" latent");
            }
            out.push('\n');
        }
        for (a, b) in self.directed_edges() {
            let _ = writeln!(out, "{a} -> {b}");
        }
        for (a, b) in self.undirected_edges() {
            let _ = writeln!(out, "{a} -- {b}");
        }
        out
    }

    /// DOT-compatible rendering for external graph viewers.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph g {\n");
        for (i, name) in self.names.iter().enumerate() {
            let style = if self.latent[i] { " [style=dashed]" } else { "" };
            let _ = writeln!(out, "  \"{name}\"{style};");
        }
        for (a, b) in self.directed_edges() {
            let _ = writeln!(out, "  \"{a}\" -> \"{b}\";");
        }
        for (a, b) in self.undirected_edges() {
            let _ = writeln!(out, "  \"{a}\" -> \"{b}\" [dir=none];");
        }
        out.push_str("}\n");
        out
    }
}

fn link_rank(link: Link) -> u8 {
    match link {
        Link::Forward => 0,
        Link::Backward => 1,
        Link::Undirected => 2,
    }
}
