//! Labeled graphs, edge paths and graph maps.
//!
//! A [`Graph`] stands for the dual graph of a handle decomposition: vertices
//! are 0-handles and edges are 1-handles. Each edge has a canonical positive
//! orientation; its reverse is written with a `~` prefix, so `~a` is the
//! inverse of `a`. A [`GraphMap`] sends every edge to an edge path in the
//! target graph, and its [`incidence_matrix`] counts, for each edge `e_i`,
//! how many times the image of `e_i` runs over `e_j` in either direction.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matrix::NonNegMatrix;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("invalid graph: {0}")]
    Invalid(GraphReport),
    #[error("unknown edge `{0}`")]
    UnknownEdge(String),
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("path is not endpoint-compatible at token {position}")]
    IncompatiblePath { position: usize },
    #[error("edge `{edge}` maps to the empty path")]
    EmptyImage { edge: String },
    #[error("image of edge `{edge}` does not run from the image of its initial vertex to the image of its terminal vertex")]
    EndpointMismatch { edge: String },
    #[error("no image given for edge `{0}`")]
    MissingImage(String),
    #[error("vertex map has {got} entries, source has {expected} vertices")]
    VertexMapLength { expected: usize, got: usize },
    #[error("graphs do not match: {0}")]
    GraphMismatch(String),
    #[error("map is not an endomorphism (source and target graphs differ)")]
    NotEndomorphism,
    #[error("graph has no edges")]
    NoEdges,
    #[error("invalid spanning tree: {0}")]
    InvalidTree(String),
    #[error("malformed edge token `{0}`")]
    BadToken(String),
}

/// An edge with its canonical orientation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub name: String,
    pub init: usize,
    pub term: usize,
}

/// One oriented traversal of an edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Token {
    pub edge: usize,
    pub reversed: bool,
}

impl Token {
    pub fn forward(edge: usize) -> Self {
        Self { edge, reversed: false }
    }

    pub fn backward(edge: usize) -> Self {
        Self { edge, reversed: true }
    }

    pub fn inverse(self) -> Self {
        Self { edge: self.edge, reversed: !self.reversed }
    }
}

/// Finite sequence of oriented edges.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct EdgePath {
    pub tokens: Vec<Token>,
}

impl EdgePath {
    pub fn new(tokens: Vec<Token>) -> Self {
        Self { tokens }
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn reversed(&self) -> Self {
        Self { tokens: self.tokens.iter().rev().map(|t| t.inverse()).collect() }
    }

    /// No token is immediately followed by its inverse.
    pub fn is_reduced(&self) -> bool {
        self.tokens.windows(2).all(|w| w[1] != w[0].inverse())
    }

    /// Occurrences of `edge` in either direction.
    pub fn count(&self, edge: usize) -> u64 {
        self.tokens.iter().filter(|t| t.edge == edge).count() as u64
    }
}

/// Wire form of one edge. An entry carrying `inverse` declares itself the
/// reverse of another listed edge; otherwise its reverse is implicit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeData {
    pub id: String,
    pub from: String,
    pub to: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inverse: Option<String>,
}

/// Wire form of a graph, possibly invalid.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphData {
    pub vertices: Vec<String>,
    pub edges: Vec<EdgeData>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GraphViolation {
    NoVertices,
    DuplicateVertex { vertex: String },
    DuplicateEdge { edge: String },
    BadIdentifier { id: String },
    DanglingEndpoint { edge: String, vertex: String },
    InvolutionFixedPoint { edge: String },
    BrokenInvolution { edge: String, detail: String },
    Disconnected { components: usize },
}

impl fmt::Display for GraphViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::NoVertices => write!(f, "graph has no vertices"),
            Self::DuplicateVertex { vertex } => write!(f, "duplicate vertex `{vertex}`"),
            Self::DuplicateEdge { edge } => write!(f, "duplicate edge `{edge}`"),
            Self::BadIdentifier { id } => write!(f, "identifier `{id}` is empty or contains whitespace or `~`"),
            Self::DanglingEndpoint { edge, vertex } => {
                write!(f, "edge `{edge}` references unknown vertex `{vertex}`")
            }
            Self::InvolutionFixedPoint { edge } => write!(f, "involution has fixed point at edge `{edge}`"),
            Self::BrokenInvolution { edge, detail } => write!(f, "broken involution at edge `{edge}`: {detail}"),
            Self::Disconnected { components } => write!(f, "disconnected ({components} components)"),
        }
    }
}

/// Result of [`validate_graph`]; empty means valid.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct GraphReport {
    pub violations: Vec<GraphViolation>,
}

impl GraphReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for GraphReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_ok() {
            return write!(f, "ok");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

fn valid_identifier(s: &str) -> bool {
    !s.is_empty() && !s.contains('~') && !s.chars().any(char::is_whitespace)
}

struct Resolved {
    vertices: Vec<String>,
    edges: Vec<Edge>,
}

/// Checks the graph invariants and, when they hold, resolves explicit
/// inverse pairs into canonical edges.
fn resolve(data: &GraphData) -> (GraphReport, Option<Resolved>) {
    let mut violations = Vec::new();
    if data.vertices.is_empty() {
        violations.push(GraphViolation::NoVertices);
    }
    let mut vindex: HashMap<&str, usize> = HashMap::new();
    for v in &data.vertices {
        if !valid_identifier(v) {
            violations.push(GraphViolation::BadIdentifier { id: v.clone() });
        }
        if vindex.insert(v, vindex.len()).is_some() {
            violations.push(GraphViolation::DuplicateVertex { vertex: v.clone() });
        }
    }
    let mut eindex: HashMap<&str, usize> = HashMap::new();
    for (k, e) in data.edges.iter().enumerate() {
        if !valid_identifier(&e.id) {
            violations.push(GraphViolation::BadIdentifier { id: e.id.clone() });
        }
        if eindex.insert(&e.id, k).is_some() {
            violations.push(GraphViolation::DuplicateEdge { edge: e.id.clone() });
        }
        for end in [&e.from, &e.to] {
            if !vindex.contains_key(end.as_str()) {
                violations.push(GraphViolation::DanglingEndpoint { edge: e.id.clone(), vertex: end.clone() });
            }
        }
    }

    // Explicit pairings: partner[k] = index of the entry that is the reverse of k.
    let mut partner: Vec<Option<usize>> = vec![None; data.edges.len()];
    for (k, e) in data.edges.iter().enumerate() {
        let Some(inv) = &e.inverse else { continue };
        if inv == &e.id {
            violations.push(GraphViolation::InvolutionFixedPoint { edge: e.id.clone() });
            continue;
        }
        let Some(&other) = eindex.get(inv.as_str()) else {
            violations.push(GraphViolation::BrokenInvolution {
                edge: e.id.clone(),
                detail: format!("inverse `{inv}` is not a listed edge"),
            });
            continue;
        };
        let o = &data.edges[other];
        if let Some(back) = &o.inverse {
            if back != &e.id {
                violations.push(GraphViolation::BrokenInvolution {
                    edge: e.id.clone(),
                    detail: format!("inverse of `{inv}` is `{back}`, not `{}`", e.id),
                });
                continue;
            }
        }
        if o.from != e.to || o.to != e.from {
            violations.push(GraphViolation::BrokenInvolution {
                edge: e.id.clone(),
                detail: format!("initial vertex of `{inv}` must be the terminal vertex of `{}`", e.id),
            });
            continue;
        }
        partner[k] = Some(other);
        if partner[other].is_some_and(|p| p != k) {
            violations.push(GraphViolation::BrokenInvolution {
                edge: o.id.clone(),
                detail: "paired with more than one edge".into(),
            });
        }
        partner[other] = Some(k);
    }

    if !violations.is_empty() {
        return (GraphReport { violations }, None);
    }

    let mut edges = Vec::new();
    for (k, e) in data.edges.iter().enumerate() {
        if partner[k].is_some_and(|p| p < k) {
            continue;
        }
        edges.push(Edge { name: e.id.clone(), init: vindex[e.from.as_str()], term: vindex[e.to.as_str()] });
    }
    let resolved = Resolved { vertices: data.vertices.clone(), edges };
    let components = count_components(resolved.vertices.len(), &resolved.edges);
    if components > 1 {
        violations.push(GraphViolation::Disconnected { components });
    }
    (GraphReport { violations }, Some(resolved))
}

fn count_components(n: usize, edges: &[Edge]) -> usize {
    let mut adj = vec![Vec::new(); n];
    for e in edges {
        adj[e.init].push(e.term);
        adj[e.term].push(e.init);
    }
    let mut seen = vec![false; n];
    let mut count = 0;
    for s in 0..n {
        if seen[s] {
            continue;
        }
        count += 1;
        seen[s] = true;
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
    }
    count
}

/// Report-style validation of untrusted graph data.
pub fn validate_graph(data: &GraphData) -> GraphReport {
    resolve(data).0
}

/// A connected graph with an edge involution given by orientation flags.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    vertices: Vec<String>,
    edges: Vec<Edge>,
}

impl Graph {
    pub fn from_data(data: &GraphData) -> Result<Self, GraphError> {
        match resolve(data) {
            (report, Some(r)) if report.is_ok() => Ok(Self { vertices: r.vertices, edges: r.edges }),
            (report, _) => Err(GraphError::Invalid(report)),
        }
    }

    /// Builds a graph from vertex names and `(edge, from, to)` triples.
    pub fn new(vertices: &[&str], edges: &[(&str, &str, &str)]) -> Result<Self, GraphError> {
        Self::from_data(&GraphData {
            vertices: vertices.iter().map(|s| s.to_string()).collect(),
            edges: edges
                .iter()
                .map(|(id, from, to)| EdgeData {
                    id: id.to_string(),
                    from: from.to_string(),
                    to: to.to_string(),
                    inverse: None,
                })
                .collect(),
        })
    }

    /// One vertex `v` with loops named by `names`.
    pub fn rose(names: &[&str]) -> Result<Self, GraphError> {
        let edges: Vec<_> = names.iter().map(|n| (*n, "v", "v")).collect();
        Self::new(&["v"], &edges)
    }

    pub fn to_data(&self) -> GraphData {
        GraphData {
            vertices: self.vertices.clone(),
            edges: self
                .edges
                .iter()
                .map(|e| EdgeData {
                    id: e.name.clone(),
                    from: self.vertices[e.init].clone(),
                    to: self.vertices[e.term].clone(),
                    inverse: None,
                })
                .collect(),
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_names(&self) -> Vec<String> {
        self.edges.iter().map(|e| e.name.clone()).collect()
    }

    pub fn vertex_index(&self, name: &str) -> Result<usize, GraphError> {
        self.vertices
            .iter()
            .position(|v| v == name)
            .ok_or_else(|| GraphError::UnknownVertex(name.to_string()))
    }

    pub fn edge_index(&self, name: &str) -> Result<usize, GraphError> {
        self.edges
            .iter()
            .position(|e| e.name == name)
            .ok_or_else(|| GraphError::UnknownEdge(name.to_string()))
    }

    pub fn initial(&self, t: Token) -> usize {
        let e = &self.edges[t.edge];
        if t.reversed { e.term } else { e.init }
    }

    pub fn terminal(&self, t: Token) -> usize {
        let e = &self.edges[t.edge];
        if t.reversed { e.init } else { e.term }
    }

    /// Parses a whitespace-separated token list such as `"a ~b c"`.
    pub fn parse_path(&self, s: &str) -> Result<EdgePath, GraphError> {
        let tokens = s
            .split_whitespace()
            .map(|word| {
                let (reversed, name) = match word.strip_prefix('~') {
                    Some(rest) => (true, rest),
                    None => (false, word),
                };
                if name.is_empty() || name.contains('~') {
                    return Err(GraphError::BadToken(word.to_string()));
                }
                Ok(Token { edge: self.edge_index(name)?, reversed })
            })
            .collect::<Result<_, _>>()?;
        Ok(EdgePath { tokens })
    }

    pub fn format_token(&self, t: Token) -> String {
        let name = &self.edges[t.edge].name;
        if t.reversed { format!("~{name}") } else { name.clone() }
    }

    pub fn format_path(&self, p: &EdgePath) -> String {
        p.tokens.iter().map(|&t| self.format_token(t)).collect::<Vec<_>>().join(" ")
    }

    /// Checks that every token names an edge and that consecutive tokens
    /// meet. Returns the endpoints of a nonempty path.
    pub fn check_path(&self, p: &EdgePath) -> Result<Option<(usize, usize)>, GraphError> {
        for (position, t) in p.tokens.iter().enumerate() {
            if t.edge >= self.edges.len() {
                return Err(GraphError::IncompatiblePath { position });
            }
            if position > 0 && self.terminal(p.tokens[position - 1]) != self.initial(*t) {
                return Err(GraphError::IncompatiblePath { position });
            }
        }
        Ok(match (p.tokens.first(), p.tokens.last()) {
            (Some(&a), Some(&b)) => Some((self.initial(a), self.terminal(b))),
            _ => None,
        })
    }

    /// Breadth-first spanning tree rooted at vertex 0, as a list of edge
    /// indices in the order they were discovered.
    pub fn bfs_spanning_tree(&self) -> Vec<usize> {
        let n = self.vertices.len();
        let mut seen = vec![false; n];
        let mut tree = Vec::new();
        seen[0] = true;
        let mut queue = VecDeque::from([0]);
        while let Some(v) = queue.pop_front() {
            for (k, e) in self.edges.iter().enumerate() {
                for (a, b) in [(e.init, e.term), (e.term, e.init)] {
                    if a == v && !seen[b] {
                        seen[b] = true;
                        tree.push(k);
                        queue.push_back(b);
                    }
                }
            }
        }
        tree
    }

    /// For a spanning tree, the tree path from `root` to every vertex.
    pub fn tree_paths(&self, tree: &[usize], root: usize) -> Result<Vec<EdgePath>, GraphError> {
        let n = self.vertices.len();
        if root >= n {
            return Err(GraphError::InvalidTree(format!("root {root} out of range")));
        }
        let mut in_tree = vec![false; self.edges.len()];
        for &k in tree {
            if k >= self.edges.len() {
                return Err(GraphError::InvalidTree(format!("edge index {k} out of range")));
            }
            if std::mem::replace(&mut in_tree[k], true) {
                return Err(GraphError::InvalidTree(format!("edge `{}` listed twice", self.edges[k].name)));
            }
            if self.edges[k].init == self.edges[k].term {
                return Err(GraphError::InvalidTree(format!("edge `{}` is a loop", self.edges[k].name)));
            }
        }
        if tree.len() + 1 != n {
            return Err(GraphError::InvalidTree(format!("{} edges for {n} vertices", tree.len())));
        }
        let mut paths: Vec<Option<EdgePath>> = vec![None; n];
        paths[root] = Some(EdgePath::default());
        let mut queue = VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            let base = paths[v].clone().expect("visited");
            for &k in tree {
                let e = &self.edges[k];
                let step = if e.init == v {
                    Some((e.term, Token::forward(k)))
                } else if e.term == v {
                    Some((e.init, Token::backward(k)))
                } else {
                    None
                };
                if let Some((w, tok)) = step {
                    if paths[w].is_none() {
                        let mut p = base.clone();
                        p.tokens.push(tok);
                        paths[w] = Some(p);
                        queue.push_back(w);
                    }
                }
            }
        }
        paths
            .into_iter()
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| GraphError::InvalidTree("tree does not span the graph".into()))
    }
}

/// The unique reduced path homotopic rel endpoints to `p`.
pub fn free_reduce_path(g: &Graph, p: &EdgePath) -> Result<EdgePath, GraphError> {
    g.check_path(p)?;
    Ok(reduce_tokens(&p.tokens))
}

pub(crate) fn reduce_tokens(tokens: &[Token]) -> EdgePath {
    let mut out: Vec<Token> = Vec::with_capacity(tokens.len());
    for &t in tokens {
        if out.last() == Some(&t.inverse()) {
            out.pop();
        } else {
            out.push(t);
        }
    }
    EdgePath { tokens: out }
}

/// Number of edge ends at `v`; a loop counts twice.
pub fn valence(g: &Graph, v: &str) -> Result<usize, GraphError> {
    let v = g.vertex_index(v)?;
    Ok(g.edges.iter().map(|e| usize::from(e.init == v) + usize::from(e.term == v)).sum())
}

/// A map of graphs sending vertices to vertices and edges to edge paths.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphMap {
    source: Graph,
    target: Graph,
    vertex_map: Vec<usize>,
    edge_map: Vec<EdgePath>,
}

impl GraphMap {
    pub fn new(
        source: Graph,
        target: Graph,
        vertex_map: Vec<usize>,
        edge_map: Vec<EdgePath>,
    ) -> Result<Self, GraphError> {
        if vertex_map.len() != source.vertex_count() {
            return Err(GraphError::VertexMapLength { expected: source.vertex_count(), got: vertex_map.len() });
        }
        if let Some(&bad) = vertex_map.iter().find(|&&w| w >= target.vertex_count()) {
            return Err(GraphError::UnknownVertex(format!("#{bad}")));
        }
        if edge_map.len() != source.edge_count() {
            let missing = source.edges.get(edge_map.len()).map_or_else(String::new, |e| e.name.clone());
            return Err(GraphError::MissingImage(missing));
        }
        for (e, path) in source.edges.iter().zip(&edge_map) {
            let ends = target.check_path(path)?;
            match ends {
                None => return Err(GraphError::EmptyImage { edge: e.name.clone() }),
                Some((a, b)) if a != vertex_map[e.init] || b != vertex_map[e.term] => {
                    return Err(GraphError::EndpointMismatch { edge: e.name.clone() });
                }
                Some(_) => {}
            }
        }
        Ok(Self { source, target, vertex_map, edge_map })
    }

    /// Endomorphism of `g` from image strings keyed by edge name; the vertex
    /// map is read off the image endpoints.
    pub fn from_images(g: &Graph, images: &[(&str, &str)]) -> Result<Self, GraphError> {
        let images: BTreeMap<String, String> =
            images.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect();
        Self::from_named(g.clone(), g.clone(), None, &images)
    }

    /// Builds a map from name-keyed images. When `vertex_map` is `None` it is
    /// inferred from the endpoints of the image paths (every vertex of a
    /// connected graph with edges is an edge endpoint) or, for a one-vertex
    /// target, is constant.
    pub fn from_named(
        source: Graph,
        target: Graph,
        vertex_map: Option<&BTreeMap<String, String>>,
        images: &BTreeMap<String, String>,
    ) -> Result<Self, GraphError> {
        for key in images.keys() {
            source.edge_index(key)?;
        }
        let mut edge_map = Vec::with_capacity(source.edge_count());
        for e in &source.edges {
            let s = images.get(&e.name).ok_or_else(|| GraphError::MissingImage(e.name.clone()))?;
            edge_map.push(target.parse_path(s)?);
        }
        let vm = match vertex_map {
            Some(vm) => {
                for key in vm.keys() {
                    source.vertex_index(key)?;
                }
                source
                    .vertices
                    .iter()
                    .map(|v| {
                        let w = vm.get(v).ok_or_else(|| GraphError::UnknownVertex(v.clone()))?;
                        target.vertex_index(w)
                    })
                    .collect::<Result<Vec<_>, _>>()?
            }
            None => {
                let mut vm: Vec<Option<usize>> = vec![None; source.vertex_count()];
                if target.vertex_count() == 1 {
                    vm.iter_mut().for_each(|x| *x = Some(0));
                }
                for (e, p) in source.edges.iter().zip(&edge_map) {
                    let Some((a, b)) = target.check_path(p)? else {
                        return Err(GraphError::EmptyImage { edge: e.name.clone() });
                    };
                    for (v, w) in [(e.init, a), (e.term, b)] {
                        match vm[v] {
                            None => vm[v] = Some(w),
                            Some(x) if x != w => return Err(GraphError::EndpointMismatch { edge: e.name.clone() }),
                            Some(_) => {}
                        }
                    }
                }
                vm.into_iter()
                    .enumerate()
                    .map(|(v, w)| w.ok_or_else(|| GraphError::UnknownVertex(source.vertices[v].clone())))
                    .collect::<Result<Vec<_>, _>>()?
            }
        };
        Self::new(source, target, vm, edge_map)
    }

    pub fn identity(g: &Graph) -> Self {
        let edge_map = (0..g.edge_count()).map(|k| EdgePath::new(vec![Token::forward(k)])).collect();
        Self { source: g.clone(), target: g.clone(), vertex_map: (0..g.vertex_count()).collect(), edge_map }
    }

    pub fn source(&self) -> &Graph {
        &self.source
    }

    pub fn target(&self) -> &Graph {
        &self.target
    }

    pub fn vertex_map(&self) -> &[usize] {
        &self.vertex_map
    }

    pub fn edge_map(&self) -> &[EdgePath] {
        &self.edge_map
    }

    pub fn is_endomorphism(&self) -> bool {
        self.source == self.target
    }

    /// Image of one oriented edge; the image of `~e` is the reverse of the
    /// image of `e`.
    pub fn image(&self, t: Token) -> EdgePath {
        let p = &self.edge_map[t.edge];
        if t.reversed { p.reversed() } else { p.clone() }
    }

    /// Tokenwise image of a source path, unreduced.
    pub fn apply_path(&self, p: &EdgePath) -> EdgePath {
        EdgePath { tokens: p.tokens.iter().flat_map(|&t| self.image(t).tokens).collect() }
    }

    /// Image strings keyed by edge name.
    pub fn named_images(&self) -> BTreeMap<String, String> {
        self.source
            .edges
            .iter()
            .zip(&self.edge_map)
            .map(|(e, p)| (e.name.clone(), self.target.format_path(p)))
            .collect()
    }

    pub fn named_vertex_map(&self) -> BTreeMap<String, String> {
        self.source
            .vertices
            .iter()
            .zip(&self.vertex_map)
            .map(|(v, &w)| (v.clone(), self.target.vertices[w].clone()))
            .collect()
    }
}

/// `f ∘ g`: apply `g`, then `f` tokenwise. With `reduce` each image path is
/// freely reduced; a reduction to the empty path is rejected as degenerate.
pub fn compose_maps(f: &GraphMap, g: &GraphMap, reduce: bool) -> Result<GraphMap, GraphError> {
    if g.target != f.source {
        return Err(GraphError::GraphMismatch("target of the inner map is not the source of the outer map".into()));
    }
    let vertex_map = g.vertex_map.iter().map(|&v| f.vertex_map[v]).collect();
    let edge_map = g
        .edge_map
        .iter()
        .zip(&g.source.edges)
        .map(|(p, e)| {
            let q = f.apply_path(p);
            let q = if reduce { reduce_tokens(&q.tokens) } else { q };
            if q.is_empty() {
                Err(GraphError::EmptyImage { edge: e.name.clone() })
            } else {
                Ok(q)
            }
        })
        .collect::<Result<_, _>>()?;
    Ok(GraphMap { source: g.source.clone(), target: f.target.clone(), vertex_map, edge_map })
}

/// `m[i][j]` = occurrences of `e_j` or `~e_j` in the image of `e_i`, in the
/// graph's canonical edge order.
pub fn incidence_matrix(f: &GraphMap) -> Result<NonNegMatrix, GraphError> {
    if !f.is_endomorphism() {
        return Err(GraphError::NotEndomorphism);
    }
    let n = f.source.edge_count();
    if n == 0 {
        return Err(GraphError::NoEdges);
    }
    Ok(NonNegMatrix::from_fn(n, |i, j| f.edge_map[i].count(j)).expect("n > 0"))
}

/// Incidence of `g` relative to a carrier graph `G`: `decl` gives the image
/// of each edge of `G` under `g` as a path in `G` itself, and `n[i][j]`
/// counts occurrences of `e_j` in the declared image of `e_i`. That the
/// declared paths are geometrically realized is the caller's assertion.
pub fn carrier_incidence(g: &GraphMap, decl: &GraphMap) -> Result<NonNegMatrix, GraphError> {
    if decl.source != g.source {
        return Err(GraphError::GraphMismatch("carrier declaration must have the same source as the map".into()));
    }
    if decl.target != g.source {
        return Err(GraphError::GraphMismatch("declared paths must lie in the carrier graph".into()));
    }
    let n = decl.source.edge_count();
    if n == 0 {
        return Err(GraphError::NoEdges);
    }
    Ok(NonNegMatrix::from_fn(n, |i, j| decl.edge_map[i].count(j)).expect("n > 0"))
}
