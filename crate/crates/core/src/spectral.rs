//! Irreducibility, strongly connected components and Perron–Frobenius
//! eigenpairs of nonnegative matrices.
//!
//! Eigenpairs are computed by power iteration on `M + I`, which is primitive
//! whenever `M` is irreducible, so periodic matrices such as `[[0,1],[1,0]]`
//! converge as well. The eigenvalue estimate is the midpoint of the
//! Collatz–Wielandt bounds `min (Mv)_i / v_i ≤ λ ≤ max (Mv)_i / v_i`, and the
//! iteration stops once half the gap between them is within tolerance.

use serde::Serialize;
use thiserror::Error;

use crate::matrix::NonNegMatrix;

pub const DEFAULT_TOL: f64 = 1e-12;
pub const DEFAULT_MAX_ITER: usize = 100_000;
pub const DEFAULT_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectralError {
    #[error(
        "matrix is reducible ({components} strongly connected components); \
         use spectral_radius_reducible for the spectral radius of a reducible matrix"
    )]
    Reducible { components: usize },
    #[error("power iteration did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("tolerance must be a positive finite number, got {0}")]
    InvalidTolerance(f64),
    #[error("vector length {got} does not match matrix dimension {dim}")]
    DimensionMismatch { dim: usize, got: usize },
    #[error("test vector must be nonnegative and nonzero")]
    InvalidVector,
    #[error("matrix entries must be finite and nonnegative")]
    InvalidEntries,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PfOptions {
    /// Target accuracy, relative to `max(1, λ)`.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for PfOptions {
    fn default() -> Self {
        Self { tol: DEFAULT_TOL, max_iter: DEFAULT_MAX_ITER }
    }
}

impl PfOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self { tol, ..Self::default() }
    }

    fn check(&self) -> Result<(), SpectralError> {
        if self.tol.is_finite() && self.tol > 0.0 {
            Ok(())
        } else {
            Err(SpectralError::InvalidTolerance(self.tol))
        }
    }
}

/// Perron–Frobenius eigenpair of an irreducible matrix.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PfResult {
    pub lambda: f64,
    /// Positive eigenvector normalized to max-norm 1.
    pub vector: Vec<f64>,
    /// `‖Mv − λv‖∞` for the returned pair.
    pub residual: f64,
    pub iterations: usize,
}

/// Strongly connected components of the positivity digraph (arc `i → j`
/// whenever `m[i][j] > 0`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SccReport {
    /// Components in topological order of the condensation: every arc between
    /// distinct components goes from an earlier component to a later one.
    /// Indices inside a component are ascending.
    pub components: Vec<Vec<usize>>,
    /// `component_of[i]` is the position of index `i` in `components`.
    pub component_of: Vec<usize>,
    /// Arcs of the condensation, deduplicated and sorted.
    pub condensation_arcs: Vec<(usize, usize)>,
}

impl SccReport {
    pub fn is_irreducible(&self) -> bool {
        self.components.len() == 1
    }
}

/// Outcome of the subinvariance test `(Mv)_i ≤ λ v_i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    /// `λ(M) ≤ λ`.
    Le,
    /// `λ(M) < λ`.
    Lt,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubinvarianceReport {
    pub verdict: Verdict,
    /// Rows with `(Mv)_i < λ v_i − slack`.
    pub strict_rows: Vec<usize>,
    /// Rows with `(Mv)_i > λ v_i + slack`.
    pub violating_rows: Vec<usize>,
}

/// Irreducible diagonal block of the condensation with the largest eigenvalue.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DominantBlock {
    pub indices: Vec<usize>,
    pub matrix: NonNegMatrix,
    pub lambda: f64,
}

fn positivity_digraph(rows: &[Vec<f64>]) -> Vec<Vec<usize>> {
    rows.iter()
        .map(|r| r.iter().enumerate().filter(|(_, &x)| x > 0.0).map(|(j, _)| j).collect())
        .collect()
}

/// Tarjan's algorithm with an explicit stack. Components come out with sinks
/// first.
fn tarjan(adj: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let n = adj.len();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut comps = Vec::new();
    let mut counter = 0;
    // (vertex, next neighbour position)
    let mut call: Vec<(usize, usize)> = Vec::new();

    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        call.push((root, 0));
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;

        while let Some(&mut (v, ref mut pos)) = call.last_mut() {
            if let Some(&w) = adj[v].get(*pos) {
                *pos += 1;
                if index[w] == usize::MAX {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == index[v] {
                let mut comp = Vec::new();
                loop {
                    let w = stack.pop().expect("tarjan stack underflow");
                    on_stack[w] = false;
                    comp.push(w);
                    if w == v {
                        break;
                    }
                }
                comp.sort_unstable();
                comps.push(comp);
            }
        }
    }
    comps
}

fn scc_of_adjacency(adj: &[Vec<usize>]) -> SccReport {
    let mut components = tarjan(adj);
    components.reverse();
    let mut component_of = vec![0; adj.len()];
    for (c, comp) in components.iter().enumerate() {
        for &i in comp {
            component_of[i] = c;
        }
    }
    let mut condensation_arcs: Vec<(usize, usize)> = adj
        .iter()
        .enumerate()
        .flat_map(|(i, out)| out.iter().map(move |&j| (i, j)))
        .map(|(i, j)| (component_of[i], component_of[j]))
        .filter(|(a, b)| a != b)
        .collect();
    condensation_arcs.sort_unstable();
    condensation_arcs.dedup();
    SccReport { components, component_of, condensation_arcs }
}

pub fn scc_decomposition(m: &NonNegMatrix) -> SccReport {
    scc_of_adjacency(&positivity_digraph(&m.to_f64_rows()))
}

/// `true` iff the positivity digraph of `m` is strongly connected.
pub fn is_irreducible(m: &NonNegMatrix) -> bool {
    scc_decomposition(m).is_irreducible()
}

fn check_dense(rows: &[Vec<f64>]) -> Result<(), SpectralError> {
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(SpectralError::DimensionMismatch { dim: n, got: rows.first().map_or(0, Vec::len) });
    }
    if rows.iter().flatten().any(|x| !x.is_finite() || *x < 0.0) {
        return Err(SpectralError::InvalidEntries);
    }
    Ok(())
}

fn mul_dense(rows: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    rows.iter().map(|r| r.iter().zip(v).map(|(a, x)| a * x).sum()).collect()
}

/// Collatz–Wielandt bounds `(min_i (Mv)_i / v_i, max_i (Mv)_i / v_i)` for a
/// strictly positive `v`.
pub fn collatz_wielandt_bounds(m: &NonNegMatrix, v: &[f64]) -> Result<(f64, f64), SpectralError> {
    if v.len() != m.dim() {
        return Err(SpectralError::DimensionMismatch { dim: m.dim(), got: v.len() });
    }
    if v.iter().any(|&x| !(x > 0.0) || !x.is_finite()) {
        return Err(SpectralError::InvalidVector);
    }
    Ok(ratio_bounds(&m.mul_vec(v), v))
}

fn ratio_bounds(w: &[f64], v: &[f64]) -> (f64, f64) {
    w.iter().zip(v).map(|(a, b)| a / b).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| {
        (lo.min(r), hi.max(r))
    })
}

/// Power iteration on a dense nonnegative matrix that is already known to be
/// irreducible.
fn power_iteration(rows: &[Vec<f64>], opts: PfOptions) -> Result<PfResult, SpectralError> {
    let n = rows.len();
    let mut v = vec![1.0; n];
    let mut residual = f64::INFINITY;
    for it in 1..=opts.max_iter {
        let w = mul_dense(rows, &v);
        let (lo, hi) = ratio_bounds(&w, &v);
        let lambda = 0.5 * (lo + hi);
        residual = w.iter().zip(&v).map(|(a, b)| (a - lambda * b).abs()).fold(0.0, f64::max);
        if 0.5 * (hi - lo) <= opts.tol * hi.max(1.0) {
            return Ok(PfResult { lambda, vector: v, residual, iterations: it });
        }
        // step with M + I
        let mut u: Vec<f64> = w.iter().zip(&v).map(|(a, b)| a + b).collect();
        let norm = u.iter().copied().fold(0.0, f64::max);
        u.iter_mut().for_each(|x| *x /= norm);
        v = u;
    }
    Err(SpectralError::NoConvergence { iterations: opts.max_iter, residual })
}

/// Perron–Frobenius eigenpair of a dense nonnegative matrix given as rows of
/// floats. Used for exact integer powers converted to `f64`.
pub fn pf_eigen_dense(rows: &[Vec<f64>], opts: PfOptions) -> Result<PfResult, SpectralError> {
    opts.check()?;
    check_dense(rows)?;
    let scc = scc_of_adjacency(&positivity_digraph(rows));
    if !scc.is_irreducible() {
        return Err(SpectralError::Reducible { components: scc.components.len() });
    }
    power_iteration(rows, opts)
}

/// Perron–Frobenius eigenvalue and max-norm-normalized positive eigenvector
/// of an irreducible matrix. The start vector is all ones, so the result is
/// deterministic.
pub fn pf_eigen(m: &NonNegMatrix, opts: PfOptions) -> Result<PfResult, SpectralError> {
    pf_eigen_dense(&m.to_f64_rows(), opts)
}

/// Irreducible diagonal block of the SCC condensation with maximal
/// eigenvalue. A singleton component without a loop is a zero block with
/// eigenvalue 0. Ties go to the block earliest in topological order.
pub fn dominant_block(m: &NonNegMatrix, opts: PfOptions) -> Result<DominantBlock, SpectralError> {
    opts.check()?;
    let scc = scc_decomposition(m);
    let mut best: Option<DominantBlock> = None;
    for comp in scc.components {
        let block = m.principal_submatrix(&comp).expect("nonempty component");
        let lambda = if comp.len() == 1 {
            block.get(0, 0) as f64
        } else {
            power_iteration(&block.to_f64_rows(), opts)?.lambda
        };
        if best.as_ref().is_none_or(|b| lambda > b.lambda) {
            best = Some(DominantBlock { indices: comp, matrix: block, lambda });
        }
    }
    Ok(best.expect("at least one component"))
}

/// Spectral radius of an arbitrary nonnegative matrix: the largest
/// eigenvalue among the irreducible diagonal blocks of its condensation.
pub fn spectral_radius_reducible(m: &NonNegMatrix, opts: PfOptions) -> Result<f64, SpectralError> {
    dominant_block(m, opts).map(|b| b.lambda)
}

/// Subinvariance test for an irreducible `m`: if `(Mv)_i ≤ λ v_i` for every
/// `i` then `λ(M) ≤ λ`, and if in addition some row is strict then
/// `λ(M) < λ`. Comparisons use an absolute `slack`.
pub fn subinvariance_test(
    m: &NonNegMatrix,
    v: &[f64],
    lambda: f64,
    slack: f64,
) -> Result<SubinvarianceReport, SpectralError> {
    if v.len() != m.dim() {
        return Err(SpectralError::DimensionMismatch { dim: m.dim(), got: v.len() });
    }
    if v.iter().any(|&x| !x.is_finite() || x < 0.0) || v.iter().all(|&x| x == 0.0) {
        return Err(SpectralError::InvalidVector);
    }
    let scc = scc_decomposition(m);
    if !scc.is_irreducible() {
        return Err(SpectralError::Reducible { components: scc.components.len() });
    }
    let mv = m.mul_vec(v);
    let mut strict_rows = Vec::new();
    let mut violating_rows = Vec::new();
    for (i, (&lhs, &vi)) in mv.iter().zip(v).enumerate() {
        let rhs = lambda * vi;
        if lhs > rhs + slack {
            violating_rows.push(i);
        } else if lhs < rhs - slack {
            strict_rows.push(i);
        }
    }
    let verdict = if !violating_rows.is_empty() {
        Verdict::Inconclusive
    } else if strict_rows.is_empty() {
        Verdict::Le
    } else {
        Verdict::Lt
    };
    Ok(SubinvarianceReport { verdict, strict_rows, violating_rows })
}
