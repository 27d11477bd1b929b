//! Free-group words and endomorphisms.
//!
//! Generators are written `x1, x2, …` and inverses `x1-, x2-, …`. An
//! endomorphism of `F_n` is given by the images of its generators;
//! composition follows `(e1 ∘ e2)(w) = e1(e2(w))`, and with abelianization
//! rows indexed by generators this gives `ab(e1 ∘ e2) = ab(e2) · ab(e1)`.
//!
//! Whether an endomorphism is an automorphism is decided by surjectivity
//! (free groups of finite rank are Hopfian), and surjectivity by Stallings
//! folding of the wedge of image loops.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::graph::{reduce_tokens, GraphError, GraphMap, Token};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FreeGroupError {
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("rank mismatch: {left} vs {right}")]
    RankMismatch { left: usize, right: usize },
    #[error("expected {expected} images, got {got}")]
    ImageCount { expected: usize, got: usize },
    #[error("induced map requires an endomorphism of a connected graph")]
    NotEndomorphism,
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// A generator `x_{index+1}` or its inverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub generator: usize,
    pub inverse: bool,
}

impl Letter {
    pub fn new(generator: usize, inverse: bool) -> Self {
        Self { generator, inverse }
    }

    pub fn inv(self) -> Self {
        Self { generator: self.generator, inverse: !self.inverse }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}{}", self.generator + 1, if self.inverse { "-" } else { "" })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Word {
    pub letters: Vec<Letter>,
}

impl Word {
    pub fn new(letters: Vec<Letter>) -> Self {
        Self { letters }
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_reduced(&self) -> bool {
        self.letters.windows(2).all(|w| w[1] != w[0].inv())
    }

    pub fn inverse(&self) -> Self {
        Self { letters: self.letters.iter().rev().map(|l| l.inv()).collect() }
    }

    /// Parses tokens `x<k>` / `x<k>-` over generators `1..=rank`. Tokens may
    /// be separated by whitespace or written back to back (`x1x2-`).
    pub fn parse(s: &str, rank: usize) -> Result<Self, FreeGroupError> {
        let bytes = s.as_bytes();
        let mut letters = Vec::new();
        let mut i = 0;
        while i < bytes.len() {
            if bytes[i].is_ascii_whitespace() {
                i += 1;
                continue;
            }
            let start = i;
            if bytes[i] != b'x' {
                let end = s[start..].find(char::is_whitespace).map_or(s.len(), |k| start + k);
                return Err(FreeGroupError::UnknownGenerator(s[start..end].to_string()));
            }
            i += 1;
            let digits = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let inverse = i < bytes.len() && bytes[i] == b'-';
            let number = &s[digits..i];
            if inverse {
                i += 1;
            }
            let token = &s[start..i];
            let k: usize = number.parse().map_err(|_| FreeGroupError::UnknownGenerator(token.to_string()))?;
            if k == 0 || k > rank || number.starts_with('0') {
                return Err(FreeGroupError::UnknownGenerator(token.to_string()));
            }
            letters.push(Letter { generator: k - 1, inverse });
        }
        Ok(Self { letters })
    }

    /// Exponent sum of each generator.
    pub fn exponent_sums(&self, rank: usize) -> Vec<i64> {
        let mut out = vec![0; rank];
        for l in &self.letters {
            out[l.generator] += if l.inverse { -1 } else { 1 };
        }
        out
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, l) in self.letters.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

/// Free reduction; generator indices are checked against `rank`.
pub fn reduce_word(w: &Word, rank: usize) -> Result<Word, FreeGroupError> {
    if let Some(l) = w.letters.iter().find(|l| l.generator >= rank) {
        return Err(FreeGroupError::UnknownGenerator(l.to_string()));
    }
    Ok(reduce_letters(&w.letters))
}

fn reduce_letters(letters: &[Letter]) -> Word {
    let mut out: Vec<Letter> = Vec::with_capacity(letters.len());
    for &l in letters {
        if out.last() == Some(&l.inv()) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    Word { letters: out }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FreeEndomorphism {
    rank: usize,
    images: Vec<Word>,
}

impl FreeEndomorphism {
    /// Images are freely reduced on construction.
    pub fn new(rank: usize, images: Vec<Word>) -> Result<Self, FreeGroupError> {
        if images.len() != rank {
            return Err(FreeGroupError::ImageCount { expected: rank, got: images.len() });
        }
        let images = images.iter().map(|w| reduce_word(w, rank)).collect::<Result<_, _>>()?;
        Ok(Self { rank, images })
    }

    /// Images as strings; the rank is the number of images.
    pub fn parse(images: &[&str]) -> Result<Self, FreeGroupError> {
        let rank = images.len();
        let words = images.iter().map(|s| Word::parse(s, rank)).collect::<Result<_, _>>()?;
        Self::new(rank, words)
    }

    pub fn identity(rank: usize) -> Self {
        let images = (0..rank).map(|k| Word::new(vec![Letter::new(k, false)])).collect();
        Self { rank, images }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn images(&self) -> &[Word] {
        &self.images
    }

    pub fn image_strings(&self) -> Vec<String> {
        self.images.iter().map(Word::to_string).collect()
    }
}

/// Substitutes images and reduces.
pub fn apply_endo(e: &FreeEndomorphism, w: &Word) -> Result<Word, FreeGroupError> {
    if let Some(l) = w.letters.iter().find(|l| l.generator >= e.rank) {
        return Err(FreeGroupError::RankMismatch { left: e.rank, right: l.generator + 1 });
    }
    let letters: Vec<Letter> = w
        .letters
        .iter()
        .flat_map(|l| {
            let img = &e.images[l.generator];
            if l.inverse { img.inverse().letters } else { img.letters.clone() }
        })
        .collect();
    Ok(reduce_letters(&letters))
}

/// `e1 ∘ e2`.
pub fn compose_endos(e1: &FreeEndomorphism, e2: &FreeEndomorphism) -> Result<FreeEndomorphism, FreeGroupError> {
    if e1.rank != e2.rank {
        return Err(FreeGroupError::RankMismatch { left: e1.rank, right: e2.rank });
    }
    let images = e2.images.iter().map(|w| apply_endo(e1, w)).collect::<Result<_, _>>()?;
    Ok(FreeEndomorphism { rank: e1.rank, images })
}

/// Entry `(i, j)` is the exponent sum of `x_j` in the image of `x_i`.
pub fn abelianization(e: &FreeEndomorphism) -> Vec<Vec<i64>> {
    e.images.iter().map(|w| w.exponent_sums(e.rank)).collect()
}

/// Determinant by fraction-free Gaussian elimination.
pub fn determinant(m: &[Vec<i64>]) -> i128 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    let mut a: Vec<Vec<i128>> = m.iter().map(|r| r.iter().map(|&x| i128::from(x)).collect()).collect();
    let mut sign = 1;
    let mut prev = 1i128;
    for k in 0..n {
        if a[k][k] == 0 {
            let Some(p) = (k + 1..n).find(|&i| a[i][k] != 0) else { return 0 };
            a.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
        }
        prev = a[k][k];
    }
    sign * a[n - 1][n - 1]
}

/// Folded core of the subgroup generated by a set of words.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FoldedGraph {
    pub basepoint: usize,
    pub vertex_count: usize,
    /// Arcs `(from, generator, to)` in the folded graph.
    pub arcs: Vec<(usize, usize, usize)>,
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new() -> Self {
        Self { parent: Vec::new() }
    }

    fn add(&mut self) -> usize {
        self.parent.push(self.parent.len());
        self.parent.len() - 1
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (a, b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        self.parent[hi] = lo;
        true
    }
}

/// Stallings folding of the wedge of loops spelling `words` at a common
/// basepoint, followed by pruning of hanging trees away from the basepoint.
pub fn fold(words: &[Word]) -> FoldedGraph {
    let mut uf = UnionFind::new();
    let base = uf.add();
    let mut arcs: Vec<(usize, usize, usize)> = Vec::new();
    for w in words {
        let w = reduce_letters(&w.letters);
        if w.is_empty() {
            continue;
        }
        let mut cur = base;
        for (k, l) in w.letters.iter().enumerate() {
            let next = if k + 1 == w.letters.len() { base } else { uf.add() };
            if l.inverse {
                arcs.push((next, l.generator, cur));
            } else {
                arcs.push((cur, l.generator, next));
            }
            cur = next;
        }
    }

    // Fold until no vertex has two outgoing (or two incoming) arcs with the
    // same label.
    loop {
        let mut merged = false;
        let mut seen_out: std::collections::HashMap<(usize, usize), usize> = Default::default();
        let mut seen_in: std::collections::HashMap<(usize, usize), usize> = Default::default();
        for &(a, g, b) in &arcs {
            let (a, b) = (uf.find(a), uf.find(b));
            if let Some(&t) = seen_out.get(&(a, g)) {
                merged |= uf.union(t, b);
            } else {
                seen_out.insert((a, g), b);
            }
            let (a, b) = (uf.find(a), uf.find(b));
            if let Some(&s) = seen_in.get(&(b, g)) {
                merged |= uf.union(s, a);
            } else {
                seen_in.insert((b, g), a);
            }
        }
        for arc in arcs.iter_mut() {
            *arc = (uf.find(arc.0), arc.1, uf.find(arc.2));
        }
        arcs.sort_unstable();
        arcs.dedup();
        if !merged {
            break;
        }
    }

    let base = uf.find(base);
    // prune degree-one vertices other than the basepoint
    loop {
        let mut degree: std::collections::HashMap<usize, usize> = Default::default();
        for &(a, _, b) in &arcs {
            *degree.entry(a).or_default() += 1;
            *degree.entry(b).or_default() += 1;
        }
        let before = arcs.len();
        arcs.retain(|&(a, _, b)| {
            let leaf = |v: usize| v != base && degree[&v] == 1;
            !(leaf(a) || leaf(b))
        });
        if arcs.len() == before {
            break;
        }
    }

    // relabel vertices densely with the basepoint first
    let mut ids: Vec<usize> = arcs.iter().flat_map(|&(a, _, b)| [a, b]).collect();
    ids.push(base);
    ids.sort_unstable();
    ids.dedup();
    ids.retain(|&v| v != base);
    ids.insert(0, base);
    let index = |v: usize| ids.iter().position(|&x| x == v).expect("known vertex");
    let arcs = arcs.iter().map(|&(a, g, b)| (index(a), g, index(b))).collect();
    FoldedGraph { basepoint: 0, vertex_count: ids.len(), arcs }
}

/// `true` iff the images generate `F_n`: the folded graph of the images is
/// the rose with one loop per generator.
pub fn is_surjective(e: &FreeEndomorphism) -> bool {
    let folded = fold(&e.images);
    if folded.vertex_count != 1 || folded.arcs.len() != e.rank {
        return false;
    }
    let mut labels: Vec<usize> = folded.arcs.iter().map(|&(_, g, _)| g).collect();
    labels.sort_unstable();
    labels == (0..e.rank).collect::<Vec<_>>()
}

/// The endomorphism of `π₁` induced by a graph endomorphism.
///
/// Generators are the edges outside `tree`, numbered in canonical edge
/// order. The basepoint is vertex 0. The loop of a generator `e` is
/// `[v0 → init e] · e · [term e → v0]` through the tree; its image is mapped
/// tokenwise, the tree is collapsed and the result reduced. Collapsing the
/// tree also absorbs the tree path from `v0` to `f(v0)`, so the result is
/// determined by `tree` and is well defined up to the outer class.
pub fn induced_pi1_map(f: &GraphMap, tree: &[usize]) -> Result<FreeEndomorphism, FreeGroupError> {
    if !f.is_endomorphism() {
        return Err(FreeGroupError::NotEndomorphism);
    }
    let g = f.source();
    let paths = g.tree_paths(tree, 0)?;
    let mut generator_of: Vec<Option<usize>> = vec![None; g.edge_count()];
    let mut rank = 0;
    for (k, slot) in generator_of.iter_mut().enumerate() {
        if !tree.contains(&k) {
            *slot = Some(rank);
            rank += 1;
        }
    }
    let mut images = Vec::with_capacity(rank);
    for (k, e) in g.edges().iter().enumerate() {
        if generator_of[k].is_none() {
            continue;
        }
        let mut tokens: Vec<Token> = paths[e.init].tokens.clone();
        tokens.push(Token::forward(k));
        tokens.extend(paths[e.term].reversed().tokens);
        let image = f.apply_path(&reduce_tokens(&tokens));
        let letters: Vec<Letter> = image
            .tokens
            .iter()
            .filter_map(|t| generator_of[t.edge].map(|gen| Letter::new(gen, t.reversed)))
            .collect();
        images.push(reduce_letters(&letters));
    }
    Ok(FreeEndomorphism { rank, images })
}
