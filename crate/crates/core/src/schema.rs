//! Versioned JSON input documents.
//!
//! Every document is an object with a `"schema"` field naming one of
//! [`SCHEMAS`]. Parsing happens in two stages so that callers can tell a
//! malformed file ([`DocumentError::Syntax`], with line and column) from a
//! well-formed file with the wrong shape ([`DocumentError::Schema`], with the
//! path of the offending field). Converting a document into domain values
//! can still fail with the domain module's own error.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::freegroup::{FreeEndomorphism, FreeGroupError, Word};
use crate::graph::{Graph, GraphData, GraphError, GraphMap};
use crate::matrix::NonNegMatrix;
use crate::penner::{Certificates, DualArc, PennerError, PennerPair, SurfaceDecl, TwistWord};
use crate::tightening::TighteningMove;

pub const SCHEMAS: [&str; 7] = ["graph/1", "graphmap/1", "matrix/1", "move/1", "penner/1", "arc/1", "endo/1"];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DocumentError {
    #[error("malformed JSON at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("schema violation at `{path}`: {message}")]
    Schema { path: String, message: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphDoc {
    pub schema: String,
    pub vertices: Vec<String>,
    pub edges: Vec<crate::graph::EdgeData>,
}

impl GraphDoc {
    pub fn data(&self) -> GraphData {
        GraphData { vertices: self.vertices.clone(), edges: self.edges.clone() }
    }

    pub fn graph(&self) -> Result<Graph, GraphError> {
        Graph::from_data(&self.data())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphMapDoc {
    pub schema: String,
    pub source: GraphData,
    /// Defaults to the source graph.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<GraphData>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertex_map: Option<BTreeMap<String, String>>,
    pub edge_map: BTreeMap<String, String>,
    /// Spanning tree (edge ids) for the induced map on `π₁`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tree: Option<Vec<String>>,
}

impl GraphMapDoc {
    pub fn map(&self) -> Result<GraphMap, GraphError> {
        let source = Graph::from_data(&self.source)?;
        let target = match &self.target {
            Some(t) => Graph::from_data(t)?,
            None => source.clone(),
        };
        GraphMap::from_named(source, target, self.vertex_map.as_ref(), &self.edge_map)
    }

    /// Declared tree as edge indices, or a breadth-first tree.
    pub fn tree(&self, g: &Graph) -> Result<Vec<usize>, GraphError> {
        match &self.tree {
            Some(ids) => ids.iter().map(|id| g.edge_index(id)).collect(),
            None => Ok(g.bfs_spanning_tree()),
        }
    }

    pub fn from_map(f: &GraphMap) -> Self {
        Self {
            schema: "graphmap/1".into(),
            source: f.source().to_data(),
            target: (!f.is_endomorphism()).then(|| f.target().to_data()),
            vertex_map: Some(f.named_vertex_map()),
            edge_map: f.named_images(),
            tree: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixDoc {
    pub schema: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    pub matrix: NonNegMatrix,
}

impl MatrixDoc {
    pub fn new(matrix: NonNegMatrix, labels: Option<Vec<String>>) -> Self {
        Self { schema: "matrix/1".into(), labels, matrix }
    }

    /// Label of index `i`, falling back to the index itself.
    pub fn label(&self, i: usize) -> String {
        self.labels.as_ref().and_then(|l| l.get(i).cloned()).unwrap_or_else(|| i.to_string())
    }
}

/// A row given by 0-based index or by label.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RowRef {
    Index(usize),
    Label(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MoveEntry {
    pub row: RowRef,
    pub delta: Vec<i64>,
}

/// One move (`row`, `delta`) or a batch under `moves`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MoveDoc {
    pub schema: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub row: Option<RowRef>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub moves: Option<Vec<MoveEntry>>,
    /// Free-form statement of who vouches for the geometric disc behind the
    /// move.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub realizability: Option<String>,
}

impl MoveDoc {
    fn entries(&self) -> Vec<MoveEntry> {
        let mut out = Vec::new();
        if let (Some(row), Some(delta)) = (&self.row, &self.delta) {
            out.push(MoveEntry { row: row.clone(), delta: delta.clone() });
        }
        out.extend(self.moves.iter().flatten().cloned());
        out
    }

    /// Resolves row labels against `labels`.
    pub fn moves(&self, labels: Option<&[String]>) -> Result<Vec<TighteningMove>, DocumentError> {
        self.entries()
            .into_iter()
            .enumerate()
            .map(|(k, e)| {
                let row = match e.row {
                    RowRef::Index(i) => i,
                    RowRef::Label(l) => labels
                        .and_then(|ls| ls.iter().position(|x| *x == l))
                        .ok_or_else(|| DocumentError::Schema {
                            path: if self.moves.is_some() { format!("moves[{k}].row") } else { "row".into() },
                            message: format!("unknown row label `{l}`"),
                        })?,
                };
                Ok(TighteningMove::new(row, e.delta))
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PennerDoc {
    pub schema: String,
    pub genus: u32,
    pub boundary: u32,
    #[serde(rename = "C")]
    pub curves_c: Vec<String>,
    #[serde(rename = "D")]
    pub curves_d: Vec<String>,
    /// `[a, b, i(a, b)]` triples; unlisted pairs are disjoint.
    pub intersections: Vec<(String, String, u64)>,
    #[serde(default)]
    pub certificates: Certificates,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub word: Option<TwistWord>,
}

impl PennerDoc {
    pub fn pair(&self) -> Result<PennerPair, PennerError> {
        PennerPair::new(
            SurfaceDecl { genus: self.genus, boundary: self.boundary },
            self.curves_c.clone(),
            self.curves_d.clone(),
            &self.intersections,
            self.certificates,
        )
    }

    pub fn from_pair(p: &PennerPair, word: Option<TwistWord>) -> Self {
        Self {
            schema: "penner/1".into(),
            genus: p.surface.genus,
            boundary: p.surface.boundary,
            curves_c: p.curves_c().to_vec(),
            curves_d: p.curves_d().to_vec(),
            intersections: p.intersection_entries(),
            certificates: p.certificates,
            word,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArcDoc {
    pub schema: String,
    #[serde(flatten)]
    pub arc: DualArc,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EndoDoc {
    pub schema: String,
    /// Image of each generator, e.g. `["x1 x2", "x2"]`.
    pub images: Vec<String>,
}

impl EndoDoc {
    pub fn endo(&self) -> Result<FreeEndomorphism, FreeGroupError> {
        let rank = self.images.len();
        let words = self.images.iter().map(|s| Word::parse(s, rank)).collect::<Result<Vec<_>, _>>()?;
        FreeEndomorphism::new(rank, words)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Document {
    Graph(GraphDoc),
    GraphMap(GraphMapDoc),
    Matrix(MatrixDoc),
    Move(MoveDoc),
    Penner(PennerDoc),
    Arc(ArcDoc),
    Endo(EndoDoc),
}

impl Document {
    pub fn schema(&self) -> &str {
        match self {
            Document::Graph(d) => &d.schema,
            Document::GraphMap(d) => &d.schema,
            Document::Matrix(d) => &d.schema,
            Document::Move(d) => &d.schema,
            Document::Penner(d) => &d.schema,
            Document::Arc(d) => &d.schema,
            Document::Endo(d) => &d.schema,
        }
    }

    pub fn to_value(&self) -> Value {
        let v = match self {
            Document::Graph(d) => serde_json::to_value(d),
            Document::GraphMap(d) => serde_json::to_value(d),
            Document::Matrix(d) => serde_json::to_value(d),
            Document::Move(d) => serde_json::to_value(d),
            Document::Penner(d) => serde_json::to_value(d),
            Document::Arc(d) => serde_json::to_value(d),
            Document::Endo(d) => serde_json::to_value(d),
        };
        v.expect("documents serialize to JSON")
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(&self.to_value()).expect("values serialize")
    }
}

fn typed<T: for<'de> Deserialize<'de>>(value: Value) -> Result<T, DocumentError> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let path = e.path().to_string();
        DocumentError::Schema { path, message: e.into_inner().to_string() }
    })
}

/// Parses any supported document.
pub fn parse_document(text: &str) -> Result<Document, DocumentError> {
    let value: Value = serde_json::from_str(text).map_err(|e| DocumentError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let Some(obj) = value.as_object() else {
        return Err(DocumentError::Schema { path: ".".into(), message: "document must be a JSON object".into() });
    };
    let schema = match obj.get("schema") {
        Some(Value::String(s)) => s.clone(),
        Some(_) => {
            return Err(DocumentError::Schema { path: "schema".into(), message: "must be a string".into() });
        }
        None => {
            return Err(DocumentError::Schema { path: "schema".into(), message: "missing schema version field".into() });
        }
    };
    let doc = match schema.as_str() {
        "graph/1" => Document::Graph(typed(value)?),
        "graphmap/1" => Document::GraphMap(typed(value)?),
        "matrix/1" => {
            let d: MatrixDoc = typed(value)?;
            if let Some(labels) = &d.labels {
                if labels.len() != d.matrix.dim() {
                    return Err(DocumentError::Schema {
                        path: "labels".into(),
                        message: format!("{} labels for dimension {}", labels.len(), d.matrix.dim()),
                    });
                }
            }
            Document::Matrix(d)
        }
        "move/1" => {
            let d: MoveDoc = typed(value)?;
            match (&d.row, &d.delta, &d.moves) {
                (Some(_), Some(_), None) | (None, None, Some(_)) => {}
                _ => {
                    return Err(DocumentError::Schema {
                        path: ".".into(),
                        message: "expected either `row` and `delta`, or `moves`".into(),
                    });
                }
            }
            Document::Move(d)
        }
        "penner/1" => Document::Penner(typed(value)?),
        "arc/1" => Document::Arc(typed(value)?),
        "endo/1" => Document::Endo(typed(value)?),
        other => {
            return Err(DocumentError::Schema {
                path: "schema".into(),
                message: format!("unknown schema `{other}`; expected one of {}", SCHEMAS.join(", ")),
            });
        }
    };
    Ok(doc)
}

/// Parses a document of one expected schema family.
macro_rules! expect_doc {
    ($name:ident, $variant:ident, $ty:ty, $schema:literal) => {
        pub fn $name(text: &str) -> Result<$ty, DocumentError> {
            match parse_document(text)? {
                Document::$variant(d) => Ok(d),
                other => Err(DocumentError::Schema {
                    path: "schema".into(),
                    message: format!("expected `{}`, found `{}`", $schema, other.schema()),
                }),
            }
        }
    };
}

expect_doc!(parse_graph, Graph, GraphDoc, "graph/1");
expect_doc!(parse_graphmap, GraphMap, GraphMapDoc, "graphmap/1");
expect_doc!(parse_matrix, Matrix, MatrixDoc, "matrix/1");
expect_doc!(parse_move, Move, MoveDoc, "move/1");
expect_doc!(parse_penner, Penner, PennerDoc, "penner/1");
expect_doc!(parse_arc, Arc, ArcDoc, "arc/1");
expect_doc!(parse_endo, Endo, EndoDoc, "endo/1");
