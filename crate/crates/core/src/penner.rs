//! Penner pairs, twist products and boundary dilatations.
//!
//! A Penner pair is two systems of disjoint curves `C` and `D` on a surface
//! that intersect efficiently and fill. Composing right twists along `C` and
//! left twists along `D` (or the mirror convention), with every curve
//! appearing at least once, gives a pseudo-Anosov map. Its dilatation is
//! the Perron–Frobenius eigenvalue of the product of twist matrices
//!
//! ```text
//! T_c = I + e_c · i(c, ·)        (row c gains the intersection row of c)
//! ```
//!
//! on weights indexed by `C ∪ D`. The convention is fixed by the torus
//! case: one curve in each family meeting once, `T⁺T⁻` has dilatation
//! `(3 + √5) / 2`.
//!
//! Filling and the absence of parallel components cannot be checked from an
//! intersection matrix alone; they travel as caller certificates and only
//! their necessary conditions are verified here.

use std::collections::{BTreeMap, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matrix::NonNegMatrix;
use crate::spectral::{self, PfOptions, SpectralError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PennerError {
    #[error("unknown curve `{0}`")]
    UnknownCurve(String),
    #[error("duplicate curve `{0}`")]
    DuplicateCurve(String),
    #[error("intersection of `{0}` with itself must not be given")]
    SelfIntersection(String),
    #[error("conflicting intersection numbers for `{0}` and `{1}`")]
    ConflictingIntersection(String, String),
    #[error("Penner hypothesis violated: curves {0:?} do not appear in the twist word")]
    MissingCurves(Vec<String>),
    #[error("twist signs must be constant on each family and opposite between families (curve `{0}`)")]
    SignInconsistency(String),
    #[error("intersection graph of the pair is disconnected")]
    Disconnected,
    #[error("invalid Penner pair: {0}")]
    InvalidPair(String),
    #[error("boundary pair needs exactly one boundary component, surface has {0}")]
    BoundaryCount(u32),
    #[error("dual arc must meet the curve system exactly once (meets `{gamma}` {meets} times)")]
    ArcMeeting { gamma: String, meets: u64 },
    #[error("dual arc meets `{0}` besides its distinguished curve")]
    ArcExtraIntersection(String),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurfaceDecl {
    pub genus: u32,
    pub boundary: u32,
}

/// Properties the caller asserts about the embedded curves.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificates {
    #[serde(default)]
    pub no_parallel: bool,
    #[serde(default)]
    pub fills: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    C,
    D,
}

/// Two curve systems with their geometric intersection numbers. Curves are
/// indexed `C` first, then `D`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PennerPair {
    pub surface: SurfaceDecl,
    curves_c: Vec<String>,
    curves_d: Vec<String>,
    intersections: Vec<Vec<u64>>,
    pub certificates: Certificates,
}

impl PennerPair {
    /// Builds a pair from sparse intersection data; unlisted pairs are
    /// disjoint. Entries may be given in either order but must agree.
    pub fn new(
        surface: SurfaceDecl,
        curves_c: Vec<String>,
        curves_d: Vec<String>,
        entries: &[(String, String, u64)],
        certificates: Certificates,
    ) -> Result<Self, PennerError> {
        let ids: Vec<&String> = curves_c.iter().chain(&curves_d).collect();
        let mut index = BTreeMap::new();
        for (k, id) in ids.iter().enumerate() {
            if index.insert(id.as_str(), k).is_some() {
                return Err(PennerError::DuplicateCurve(id.to_string()));
            }
        }
        let n = ids.len();
        let mut given: Vec<Vec<Option<u64>>> = vec![vec![None; n]; n];
        for (a, b, count) in entries {
            let i = *index.get(a.as_str()).ok_or_else(|| PennerError::UnknownCurve(a.clone()))?;
            let j = *index.get(b.as_str()).ok_or_else(|| PennerError::UnknownCurve(b.clone()))?;
            if i == j {
                return Err(PennerError::SelfIntersection(a.clone()));
            }
            for (x, y) in [(i, j), (j, i)] {
                match given[x][y] {
                    Some(prev) if prev != *count => {
                        return Err(PennerError::ConflictingIntersection(a.clone(), b.clone()));
                    }
                    _ => given[x][y] = Some(*count),
                }
            }
        }
        let intersections = given.into_iter().map(|r| r.into_iter().map(|x| x.unwrap_or(0)).collect()).collect();
        Ok(Self { surface, curves_c, curves_d, intersections, certificates })
    }

    pub fn curves_c(&self) -> &[String] {
        &self.curves_c
    }

    pub fn curves_d(&self) -> &[String] {
        &self.curves_d
    }

    /// All curve ids, `C` first.
    pub fn curves(&self) -> impl Iterator<Item = &String> {
        self.curves_c.iter().chain(&self.curves_d)
    }

    pub fn curve_count(&self) -> usize {
        self.curves_c.len() + self.curves_d.len()
    }

    pub fn index_of(&self, id: &str) -> Result<usize, PennerError> {
        self.curves().position(|c| c == id).ok_or_else(|| PennerError::UnknownCurve(id.to_string()))
    }

    pub fn family(&self, index: usize) -> Family {
        if index < self.curves_c.len() { Family::C } else { Family::D }
    }

    pub fn intersection(&self, a: &str, b: &str) -> Result<u64, PennerError> {
        Ok(self.intersections[self.index_of(a)?][self.index_of(b)?])
    }

    pub fn intersection_matrix(&self) -> &[Vec<u64>] {
        &self.intersections
    }

    /// Sparse list of positive intersections with `a` before `b` in curve
    /// order.
    pub fn intersection_entries(&self) -> Vec<(String, String, u64)> {
        let ids: Vec<&String> = self.curves().collect();
        let mut out = Vec::new();
        for i in 0..ids.len() {
            for j in i + 1..ids.len() {
                if self.intersections[i][j] > 0 {
                    out.push((ids[i].clone(), ids[j].clone(), self.intersections[i][j]));
                }
            }
        }
        out
    }

    fn bipartite_components(&self) -> usize {
        let n = self.curve_count();
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
                for w in 0..n {
                    if !seen[w] && self.intersections[v][w] > 0 {
                        seen[w] = true;
                        queue.push_back(w);
                    }
                }
            }
        }
        count
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PairViolation {
    EmptyFamily { family: Family },
    WithinFamilyIntersection { a: String, b: String, count: u64 },
    NoOppositeIntersection { curve: String },
    Disconnected { components: usize },
}

/// Result of [`validate_pair`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PairReport {
    pub violations: Vec<PairViolation>,
    pub fills_asserted: bool,
    pub no_parallel_asserted: bool,
}

impl PairReport {
    pub fn necessary_checks_pass(&self) -> bool {
        self.violations.is_empty()
    }

    /// Necessary conditions hold and the caller asserts the rest.
    pub fn is_penner_pair(&self) -> bool {
        self.necessary_checks_pass() && self.fills_asserted && self.no_parallel_asserted
    }

    pub fn status(&self) -> &'static str {
        match (self.necessary_checks_pass(), self.fills_asserted && self.no_parallel_asserted) {
            (false, _) => "violations",
            (true, true) => "necessary checks passed; filling and no-parallel asserted",
            (true, false) => "necessary checks passed; filling or no-parallel not asserted",
        }
    }
}

/// Machine-checkable necessary conditions for a Penner pair: disjoint
/// families, every curve meets the other family, connected intersection
/// graph.
pub fn validate_pair(p: &PennerPair) -> PairReport {
    let mut violations = Vec::new();
    if p.curves_c.is_empty() {
        violations.push(PairViolation::EmptyFamily { family: Family::C });
    }
    if p.curves_d.is_empty() {
        violations.push(PairViolation::EmptyFamily { family: Family::D });
    }
    let ids: Vec<&String> = p.curves().collect();
    let n = ids.len();
    for i in 0..n {
        for j in i + 1..n {
            let count = p.intersections[i][j];
            if count > 0 && p.family(i) == p.family(j) {
                violations.push(PairViolation::WithinFamilyIntersection {
                    a: ids[i].clone(),
                    b: ids[j].clone(),
                    count,
                });
            }
        }
    }
    for i in 0..n {
        let meets_other = (0..n).any(|j| p.family(j) != p.family(i) && p.intersections[i][j] > 0);
        if !meets_other {
            violations.push(PairViolation::NoOppositeIntersection { curve: ids[i].clone() });
        }
    }
    if n > 0 {
        let components = p.bipartite_components();
        if components > 1 {
            violations.push(PairViolation::Disconnected { components });
        }
    }
    PairReport {
        violations,
        fills_asserted: p.certificates.fills,
        no_parallel_asserted: p.certificates.no_parallel,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Positive,
    #[serde(rename = "-")]
    Negative,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwistLetter {
    pub curve: String,
    pub sign: Sign,
}

/// A composition of twists written left to right as composed, so
/// `[T₁⁺, T₀⁻]` is `T₁⁺ ∘ T₀⁻` and `T₀⁻` acts first.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TwistWord {
    pub letters: Vec<TwistLetter>,
}

impl TwistWord {
    pub fn new(letters: &[(&str, Sign)]) -> Self {
        Self { letters: letters.iter().map(|(c, s)| TwistLetter { curve: c.to_string(), sign: *s }).collect() }
    }

    pub fn reversed(&self) -> Self {
        Self { letters: self.letters.iter().rev().cloned().collect() }
    }
}

/// Identity except row `curve`, which becomes `e_curve + i(curve, ·)`.
pub fn twist_matrix(p: &PennerPair, curve: &str) -> Result<NonNegMatrix, PennerError> {
    let c = p.index_of(curve)?;
    let n = p.curve_count();
    NonNegMatrix::from_fn(n, |i, j| {
        let id = u64::from(i == j);
        if i == c { id + p.intersections[c][j] } else { id }
    })
    .map_err(|e| PennerError::InvalidPair(e.to_string()))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PennerProduct {
    pub matrix: NonNegMatrix,
    pub lambda_boundary: f64,
}

fn check_word(p: &PennerPair, word: &TwistWord) -> Result<(), PennerError> {
    let mut c_sign: Option<Sign> = None;
    let mut seen = vec![false; p.curve_count()];
    for l in &word.letters {
        let k = p.index_of(&l.curve)?;
        seen[k] = true;
        // the sign a curve of C would carry under this letter's convention
        let normalized = match (p.family(k), l.sign) {
            (Family::C, s) => s,
            (Family::D, Sign::Positive) => Sign::Negative,
            (Family::D, Sign::Negative) => Sign::Positive,
        };
        match c_sign {
            Some(s) if s != normalized => return Err(PennerError::SignInconsistency(l.curve.clone())),
            _ => c_sign = Some(normalized),
        }
    }
    let missing: Vec<String> =
        p.curves().zip(&seen).filter(|(_, &s)| !s).map(|(c, _)| c.clone()).collect();
    if !missing.is_empty() {
        return Err(PennerError::MissingCurves(missing));
    }
    Ok(())
}

/// Product of twist matrices in composition order and its Perron–Frobenius
/// eigenvalue, the boundary dilatation.
pub fn penner_product(p: &PennerPair, word: &TwistWord, opts: PfOptions) -> Result<PennerProduct, PennerError> {
    check_word(p, word)?;
    if p.bipartite_components() > 1 {
        return Err(PennerError::Disconnected);
    }
    let mut matrix = NonNegMatrix::identity(p.curve_count()).map_err(|e| PennerError::InvalidPair(e.to_string()))?;
    for l in &word.letters {
        let t = twist_matrix(p, &l.curve)?;
        matrix = matrix.checked_mul(&t).map_err(|e| PennerError::InvalidPair(e.to_string()))?;
    }
    let lambda_boundary = spectral::pf_eigen(&matrix, opts)?.lambda;
    Ok(PennerProduct { matrix, lambda_boundary })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthComparison {
    pub lambda: f64,
    pub lambda_boundary: f64,
    /// `λ ≤ λ_∂`.
    pub consistent: bool,
    pub verdict: &'static str,
}

/// Reports whether a handlebody growth rate is at most the boundary
/// dilatation, as it must be for a tight lamination. A failure is reported,
/// not raised.
pub fn compare_growth(lambda: f64, p: &PennerPair, word: &TwistWord, opts: PfOptions) -> Result<GrowthComparison, PennerError> {
    let lambda_boundary = penner_product(p, word, opts)?.lambda_boundary;
    let consistent = lambda <= lambda_boundary;
    let verdict = if consistent {
        "consistent with tightness"
    } else {
        "inconsistent: lamination not tight or data mismatch"
    };
    Ok(GrowthComparison { lambda, lambda_boundary, consistent, verdict })
}

/// Properly embedded arc meeting the curve system once, on `gamma`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DualArc {
    pub gamma: String,
    /// Number of points where the arc meets `gamma`.
    pub meets: u64,
    /// Intersections with the other curves; all must be zero.
    #[serde(default)]
    pub other_intersections: BTreeMap<String, u64>,
}

impl DualArc {
    pub fn new(gamma: &str) -> Self {
        Self { gamma: gamma.to_string(), meets: 1, other_intersections: BTreeMap::new() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Level0,
    Level1,
    DiscBoundary,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TaggedCurve {
    pub id: String,
    pub source: Option<String>,
    pub provenance: Provenance,
}

/// Which family held the arc's curve. With `GammaInD` the construction ran
/// with the families swapped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Convention {
    GammaInC,
    GammaInD,
}

pub const DISC_BOUNDARY_ID: &str = "dDelta";

/// The pair `(Q, R)` on the boundary of `S × I`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundaryPairData {
    pub q: Vec<TaggedCurve>,
    pub r: Vec<TaggedCurve>,
    pub convention: Convention,
    /// The same data as a pair on a closed surface of genus `2g`, `Q` as the
    /// first family.
    #[serde(skip)]
    pub pair: PennerPair,
}

impl BoundaryPairData {
    pub fn intersection(&self, a: &str, b: &str) -> Result<u64, PennerError> {
        self.pair.intersection(a, b)
    }
}

fn level_id(id: &str, level: u8) -> String {
    format!("{id}@{level}")
}

/// Builds `Q = D₀ ∪ C₁ ∪ {∂Δθ}` and `R = C₀ ∪ D₁` from a pair on a surface
/// with one boundary component and an arc dual to it through `γ ∈ C`
/// (families are swapped when `γ ∈ D`).
///
/// Intersections: copies on the same level keep `i(x, y)`, copies on
/// different levels are disjoint. `∂Δθ` meets `γ₀` twice (the two arcs
/// parallel to `θ × {0}` cross `γ₀` once each), meets each `d₁` in
/// `2·i(γ, d)` points (the band follows `γ₁` on both sides), and misses
/// `D₀`, `C₁` and the other curves of `C₀`.
pub fn build_boundary_pair(p: &PennerPair, arc: &DualArc) -> Result<BoundaryPairData, PennerError> {
    if p.surface.boundary != 1 {
        return Err(PennerError::BoundaryCount(p.surface.boundary));
    }
    let g = p.index_of(&arc.gamma)?;
    if arc.meets != 1 {
        return Err(PennerError::ArcMeeting { gamma: arc.gamma.clone(), meets: arc.meets });
    }
    for (curve, &count) in &arc.other_intersections {
        p.index_of(curve)?;
        if count > 0 && curve != &arc.gamma {
            return Err(PennerError::ArcExtraIntersection(curve.clone()));
        }
    }

    let (convention, cs, ds) = match p.family(g) {
        Family::C => (Convention::GammaInC, &p.curves_c, &p.curves_d),
        Family::D => (Convention::GammaInD, &p.curves_d, &p.curves_c),
    };
    let tag = |id: &str, level: u8| TaggedCurve {
        id: level_id(id, level),
        source: Some(id.to_string()),
        provenance: if level == 0 { Provenance::Level0 } else { Provenance::Level1 },
    };
    let mut q: Vec<TaggedCurve> = ds.iter().map(|d| tag(d, 0)).chain(cs.iter().map(|c| tag(c, 1))).collect();
    q.push(TaggedCurve { id: DISC_BOUNDARY_ID.to_string(), source: None, provenance: Provenance::DiscBoundary });
    let r: Vec<TaggedCurve> = cs.iter().map(|c| tag(c, 0)).chain(ds.iter().map(|d| tag(d, 1))).collect();

    let mut entries = Vec::new();
    for c in cs {
        for d in ds {
            let k = p.intersection(c, d)?;
            if k > 0 {
                entries.push((level_id(c, 0), level_id(d, 0), k));
                entries.push((level_id(c, 1), level_id(d, 1), k));
            }
        }
    }
    entries.push((DISC_BOUNDARY_ID.to_string(), level_id(&arc.gamma, 0), 2));
    for d in ds {
        let k = p.intersection(&arc.gamma, d)?;
        if k > 0 {
            entries.push((DISC_BOUNDARY_ID.to_string(), level_id(d, 1), 2 * k));
        }
    }

    let surface = SurfaceDecl { genus: 2 * p.surface.genus, boundary: 0 };
    let pair = PennerPair::new(
        surface,
        q.iter().map(|c| c.id.clone()).collect(),
        r.iter().map(|c| c.id.clone()).collect(),
        &entries,
        p.certificates,
    )?;
    Ok(BoundaryPairData { q, r, convention, pair })
}
