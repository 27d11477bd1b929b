//! Command-line front end for `hbgrowth`.
//!
//! [`run`] parses arguments, loads JSON documents and renders a report. It
//! never touches the process environment beyond reading input files, so tests
//! drive it directly.
//!
//! Exit codes: 0 success (including inconclusive verdicts), 1 usage or I/O
//! error, 2 malformed JSON, 3 schema violation, 4 domain error.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use hbgrowth::freegroup::{self, FreeEndomorphism};
use hbgrowth::graph::{incidence_matrix, GraphMap};
use hbgrowth::penner::{self, PennerPair, TwistWord};
use hbgrowth::schema::{self, Document, DocumentError, MatrixDoc};
use hbgrowth::spectral::{self, PfOptions};
use hbgrowth::tightening::{self, Branch, Catalog, MoveOutcome, TighteningMove};
use hbgrowth::NonNegMatrix;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_SYNTAX: i32 = 2;
pub const EXIT_SCHEMA: i32 = 3;
pub const EXIT_DOMAIN: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "hbgrowth", version, about = "Growth rates of handlebody automorphisms")]
struct Cli {
    /// Emit a JSON report on stdout.
    #[arg(long, global = true)]
    json: bool,

    /// Convergence tolerance for eigenvalue computations.
    #[arg(long, global = true, default_value_t = spectral::DEFAULT_TOL)]
    tol: f64,

    /// Iteration cap for eigenvalue computations.
    #[arg(long, global = true, default_value_t = spectral::DEFAULT_MAX_ITER)]
    max_iter: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Perron–Frobenius growth rate of a matrix or graph map.
    Growth { input: PathBuf },
    /// Strongly connected components and irreducibility.
    Irreducible { input: PathBuf },
    /// Evaluate tightening moves, or search a catalog of them.
    Tighten {
        input: PathBuf,
        /// move/1 document with one move or a batch.
        #[arg(long = "move")]
        moves: Option<PathBuf>,
        /// Search the catalog; moves from --move join the candidates.
        #[arg(long)]
        search: bool,
        #[arg(long, value_enum, default_value_t = CatalogArg::Swap)]
        catalog: CatalogArg,
        /// Number of ranked moves to list.
        #[arg(long, default_value_t = 5)]
        top: usize,
    },
    /// Compare λ(Mⁿ) with λ(M)ⁿ using the exact integer power.
    Power {
        input: PathBuf,
        #[arg(long, default_value_t = 2)]
        n: u32,
    },
    /// Validate a Penner pair and compute the boundary dilatation of its word.
    Penner { input: PathBuf },
    /// Build the boundary pair from a Penner pair and a dual arc.
    BoundaryPair { input: PathBuf, arc: PathBuf },
    /// Check λ ≤ λ_∂ for a handlebody growth rate and a Penner word.
    Compare {
        input: PathBuf,
        #[arg(long, conflicts_with = "matrix", required_unless_present = "matrix")]
        lambda: Option<f64>,
        /// Matrix or graph map whose growth rate is compared.
        #[arg(long)]
        matrix: Option<PathBuf>,
    },
    /// Induced map on the fundamental group of a graph map.
    Pi1 {
        input: PathBuf,
        /// Comma-separated spanning-tree edges; overrides the document.
        #[arg(long, value_delimiter = ',')]
        tree: Option<Vec<String>>,
    },
    /// Decide whether an endomorphism of a free group is an automorphism.
    VerifyAuto { input: PathBuf },
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
enum CatalogArg {
    Swap,
    Free,
}

impl From<CatalogArg> for Catalog {
    fn from(c: CatalogArg) -> Self {
        match c {
            CatalogArg::Swap => Catalog::Swap,
            CatalogArg::Free => Catalog::Free,
        }
    }
}

/// Exit status and captured streams of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self { code: EXIT_USAGE, message: message.into() }
    }

    fn domain(e: impl std::fmt::Display) -> Self {
        Self { code: EXIT_DOMAIN, message: e.to_string() }
    }

    fn document(path: &Path, e: DocumentError) -> Self {
        let code = match e {
            DocumentError::Syntax { .. } => EXIT_SYNTAX,
            DocumentError::Schema { .. } => EXIT_SCHEMA,
        };
        Self { code, message: format!("{}: {e}", path.display()) }
    }
}

struct Report {
    human: String,
    body: Value,
}

struct Ctx {
    opts: PfOptions,
}

pub fn run<I, S>(args: I) -> Outcome
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            return if code == EXIT_OK {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    if !(cli.tol.is_finite() && cli.tol > 0.0) {
        return Outcome {
            code: EXIT_USAGE,
            stdout: String::new(),
            stderr: format!("error: --tol must be positive, got {}\n", cli.tol),
        };
    }
    let ctx = Ctx { opts: PfOptions { tol: cli.tol, max_iter: cli.max_iter } };
    match dispatch(&cli.command, &ctx) {
        Ok(report) => {
            let stdout = if cli.json {
                let doc = json!({ "meta": meta(&cli), "report": report.body });
                serde_json::to_string_pretty(&doc).expect("report serializes") + "\n"
            } else {
                report.human
            };
            Outcome { code: EXIT_OK, stdout, stderr: String::new() }
        }
        Err(f) => Outcome { code: f.code, stdout: String::new(), stderr: format!("error: {}\n", f.message) },
    }
}

fn meta(cli: &Cli) -> Value {
    json!({
        "tool": "hbgrowth",
        "version": env!("CARGO_PKG_VERSION"),
        "command": command_name(&cli.command),
        "tol": cli.tol,
        "max_iter": cli.max_iter,
    })
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Growth { .. } => "growth",
        Command::Irreducible { .. } => "irreducible",
        Command::Tighten { .. } => "tighten",
        Command::Power { .. } => "power",
        Command::Penner { .. } => "penner",
        Command::BoundaryPair { .. } => "boundary-pair",
        Command::Compare { .. } => "compare",
        Command::Pi1 { .. } => "pi1",
        Command::VerifyAuto { .. } => "verify-auto",
    }
}

fn dispatch(c: &Command, ctx: &Ctx) -> Result<Report, Failure> {
    match c {
        Command::Growth { input } => growth(input, ctx),
        Command::Irreducible { input } => irreducible(input),
        Command::Tighten { input, moves, search, catalog, top } => {
            tighten(input, moves.as_deref(), *search, (*catalog).into(), *top, ctx)
        }
        Command::Power { input, n } => power(input, *n, ctx),
        Command::Penner { input } => penner_cmd(input, ctx),
        Command::BoundaryPair { input, arc } => boundary_pair(input, arc),
        Command::Compare { input, lambda, matrix } => compare(input, *lambda, matrix.as_deref(), ctx),
        Command::Pi1 { input, tree } => pi1(input, tree.as_deref()),
        Command::VerifyAuto { input } => verify_auto(input),
    }
}

fn load(path: &Path) -> Result<Document, Failure> {
    let bytes = std::fs::read(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
    let text = String::from_utf8(bytes).map_err(|e| Failure {
        code: EXIT_SYNTAX,
        message: format!("{}: not UTF-8 (byte {})", path.display(), e.utf8_error().valid_up_to()),
    })?;
    schema::parse_document(&text).map_err(|e| Failure::document(path, e))
}

fn wrong_schema(path: &Path, expected: &str, found: &Document) -> Failure {
    Failure::document(
        path,
        DocumentError::Schema {
            path: "schema".into(),
            message: format!("expected {expected}, found `{}`", found.schema()),
        },
    )
}

/// A matrix with labels, from `matrix/1` or the incidence of `graphmap/1`.
fn load_matrix(path: &Path) -> Result<MatrixDoc, Failure> {
    match load(path)? {
        Document::Matrix(d) => Ok(d),
        Document::GraphMap(d) => {
            let f = d.map().map_err(Failure::domain)?;
            let m = incidence_matrix(&f).map_err(Failure::domain)?;
            Ok(MatrixDoc::new(m, Some(f.source().edge_names())))
        }
        other => Err(wrong_schema(path, "`matrix/1` or `graphmap/1`", &other)),
    }
}

fn load_pair(path: &Path) -> Result<(PennerPair, Option<TwistWord>), Failure> {
    match load(path)? {
        Document::Penner(d) => Ok((d.pair().map_err(Failure::domain)?, d.word)),
        other => Err(wrong_schema(path, "`penner/1`", &other)),
    }
}

fn fmt3(x: f64) -> String {
    format!("{x:.3}")
}

fn fmt_ints(v: &[i64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("({})", parts.join(","))
}

fn fmt_matrix(m: &NonNegMatrix, indent: &str) -> String {
    let width = m.rows().flatten().map(|x| x.to_string().len()).max().unwrap_or(1);
    let mut s = String::new();
    for row in m.rows() {
        let cells: Vec<String> = row.iter().map(|x| format!("{x:>width$}")).collect();
        let _ = writeln!(s, "{indent}[{}]", cells.join(" "));
    }
    s
}

fn labels_of(d: &MatrixDoc) -> Vec<String> {
    (0..d.matrix.dim()).map(|i| d.label(i)).collect()
}

fn growth(input: &Path, ctx: &Ctx) -> Result<Report, Failure> {
    let d = load_matrix(input)?;
    let pf = spectral::pf_eigen(&d.matrix, ctx.opts).map_err(Failure::domain)?;
    let labels = labels_of(&d);
    let mut human = format!("λ = {}\n", fmt3(pf.lambda));
    let _ = writeln!(human, "eigenvector (max-norm 1):");
    for (l, x) in labels.iter().zip(&pf.vector) {
        let _ = writeln!(human, "  {l}: {}", fmt3(*x));
    }
    let _ = writeln!(human, "iterations: {}", pf.iterations);
    let body = json!({
        "dim": d.matrix.dim(),
        "labels": labels,
        "lambda": pf.lambda,
        "vector": pf.vector,
        "residual": pf.residual,
        "iterations": pf.iterations,
    });
    Ok(Report { human, body })
}

/// Smallest `k ≤ (n−1)²+1` with `Mᵏ` entrywise positive.
fn primitivity_exponent(m: &NonNegMatrix) -> Option<u32> {
    let n = m.dim();
    let base: Vec<Vec<bool>> = m.rows().map(|r| r.iter().map(|&x| x > 0).collect()).collect();
    let mut p = base.clone();
    let bound = ((n - 1) * (n - 1) + 1) as u32;
    for k in 1..=bound {
        if p.iter().flatten().all(|&b| b) {
            return Some(k);
        }
        p = (0..n)
            .map(|i| (0..n).map(|j| (0..n).any(|l| p[i][l] && base[l][j])).collect())
            .collect();
    }
    None
}

fn irreducible(input: &Path) -> Result<Report, Failure> {
    let d = load_matrix(input)?;
    let scc = spectral::scc_decomposition(&d.matrix);
    let labels = labels_of(&d);
    let irreducible = scc.is_irreducible();
    let exponent = if irreducible { primitivity_exponent(&d.matrix) } else { None };
    let named: Vec<Vec<&str>> =
        scc.components.iter().map(|c| c.iter().map(|&i| labels[i].as_str()).collect()).collect();
    let mut human = format!("irreducible: {}\n", if irreducible { "yes" } else { "no" });
    let _ = writeln!(human, "components ({}):", scc.components.len());
    for c in &named {
        let _ = writeln!(human, "  {{{}}}", c.join(", "));
    }
    match exponent {
        Some(k) => {
            let _ = writeln!(human, "primitive: M^{k} is entrywise positive");
        }
        None if irreducible => {
            let _ = writeln!(human, "primitive: no (periodic)");
        }
        None => {}
    }
    let body = json!({
        "irreducible": irreducible,
        "components": named,
        "condensation_arcs": scc.condensation_arcs,
        "primitivity_exponent": exponent,
    });
    Ok(Report { human, body })
}

fn load_moves(path: &Path, labels: &[String]) -> Result<Vec<TighteningMove>, Failure> {
    match load(path)? {
        Document::Move(d) => d.moves(Some(labels)).map_err(|e| Failure::document(path, e)),
        other => Err(wrong_schema(path, "`move/1`", &other)),
    }
}

fn describe_outcome(o: &MoveOutcome, labels: &[String]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "move row={} delta={}", labels[o.mv.row], fmt_ints(&o.mv.delta));
    let _ = writeln!(s, "  gain: {}", fmt3(o.gain));
    let _ = write!(s, "{}", fmt_matrix(&o.matrix_after, "  "));
    match &o.branch {
        Branch::Irreducible { lambda, subinvariance } => {
            let verdict = serde_json::to_value(subinvariance.verdict).expect("verdict serializes");
            let _ = writeln!(s, "  branch: irreducible, λ' = {}", fmt3(*lambda));
            let _ = writeln!(s, "  subinvariance: {}", verdict.as_str().unwrap_or_default());
        }
        Branch::Restricted { indices, lambda, .. } => {
            let names: Vec<&str> = indices.iter().map(|&i| labels[i].as_str()).collect();
            let _ = writeln!(s, "  branch: restricted to {{{}}}, λ'' = {}", names.join(", "), fmt3(*lambda));
        }
    }
    let _ = writeln!(s, "  growth: {} -> {}", fmt3(o.growth_before), fmt3(o.growth_after));
    s
}

fn outcome_json(o: &MoveOutcome, labels: &[String]) -> Value {
    let mut v = serde_json::to_value(o).expect("outcome serializes");
    v["move"]["row_label"] = json!(labels[o.mv.row]);
    v["decreases_growth"] = json!(o.decreases_growth());
    v
}

fn tighten(
    input: &Path,
    moves: Option<&Path>,
    search: bool,
    catalog: Catalog,
    top: usize,
    ctx: &Ctx,
) -> Result<Report, Failure> {
    let d = load_matrix(input)?;
    let labels = labels_of(&d);
    let given = match moves {
        Some(p) => load_moves(p, &labels)?,
        None => Vec::new(),
    };
    if search {
        let ranked = tightening::search_moves(&d.matrix, catalog, &given, ctx.opts).map_err(Failure::domain)?;
        let mut human = format!("candidates with negative gain: {}\n", ranked.len());
        match ranked.first() {
            Some(best) => {
                let _ = write!(human, "best {}", describe_outcome(best, &labels));
                for (k, o) in ranked.iter().enumerate().take(top).skip(1) {
                    let _ = write!(human, "#{} {}", k + 1, describe_outcome(o, &labels));
                }
            }
            None => human.push_str("no tightening move found\n"),
        }
        let listed: Vec<Value> = ranked.iter().take(top).map(|o| outcome_json(o, &labels)).collect();
        let body = json!({
            "catalog": catalog,
            "candidates": ranked.len(),
            "best": ranked.first().map(|o| outcome_json(o, &labels)),
            "ranked": listed,
        });
        return Ok(Report { human, body });
    }
    if given.is_empty() {
        return Err(Failure::usage("tighten needs --move <file> or --search"));
    }
    let mut human = String::new();
    let mut outcomes = Vec::new();
    for mv in &given {
        let o = tightening::evaluate_move(&d.matrix, mv, ctx.opts).map_err(Failure::domain)?;
        human.push_str(&describe_outcome(&o, &labels));
        outcomes.push(outcome_json(&o, &labels));
    }
    Ok(Report { human, body: json!({ "outcomes": outcomes }) })
}

fn power(input: &Path, n: u32, ctx: &Ctx) -> Result<Report, Failure> {
    let d = load_matrix(input)?;
    let r = tightening::growth_of_power(&d.matrix, n, ctx.opts).map_err(Failure::domain)?;
    let human = format!(
        "λ(M^{n}) = {}\nλ(M)^{n} = {}\nrelative difference: {:.3e}\n",
        fmt3(r.lambda_of_power),
        fmt3(r.lambda_to_power),
        r.relative_difference
    );
    Ok(Report { human, body: serde_json::to_value(&r).expect("report serializes") })
}

fn penner_cmd(input: &Path, ctx: &Ctx) -> Result<Report, Failure> {
    let (pair, word) = load_pair(input)?;
    let report = penner::validate_pair(&pair);
    let mut human = format!("pair: {}\n", report.status());
    for v in &report.violations {
        let _ = writeln!(human, "  violation: {}", serde_json::to_string(v).expect("violation serializes"));
    }
    let product = match &word {
        Some(w) if report.necessary_checks_pass() => {
            let p = penner::penner_product(&pair, w, ctx.opts).map_err(Failure::domain)?;
            let _ = writeln!(human, "product:");
            human.push_str(&fmt_matrix(&p.matrix, "  "));
            let _ = writeln!(human, "λ_∂ = {}", fmt3(p.lambda_boundary));
            Some(p)
        }
        Some(_) => {
            let _ = writeln!(human, "word not evaluated: pair fails necessary checks");
            None
        }
        None => None,
    };
    let body = json!({
        "curves": pair.curves().collect::<Vec<_>>(),
        "validation": report,
        "status": report.status(),
        "product": product,
    });
    Ok(Report { human, body })
}

fn boundary_pair(input: &Path, arc_path: &Path) -> Result<Report, Failure> {
    let (pair, _) = load_pair(input)?;
    let arc = match load(arc_path)? {
        Document::Arc(d) => d.arc,
        other => return Err(wrong_schema(arc_path, "`arc/1`", &other)),
    };
    let b = penner::build_boundary_pair(&pair, &arc).map_err(Failure::domain)?;
    let check = penner::validate_pair(&b.pair);
    let ids = |cs: &[penner::TaggedCurve]| cs.iter().map(|c| c.id.clone()).collect::<Vec<_>>();
    let mut human = format!(
        "surface: genus {}, {} boundary components\n",
        b.pair.surface.genus, b.pair.surface.boundary
    );
    let _ = writeln!(human, "Q ({}): {}", b.q.len(), ids(&b.q).join(", "));
    let _ = writeln!(human, "R ({}): {}", b.r.len(), ids(&b.r).join(", "));
    let _ = writeln!(human, "intersections:");
    for (a, c, n) in b.pair.intersection_entries() {
        let _ = writeln!(human, "  i({a}, {c}) = {n}");
    }
    let _ = writeln!(human, "necessary checks: {}", if check.necessary_checks_pass() { "pass" } else { "fail" });
    let doc = schema::PennerDoc::from_pair(&b.pair, None);
    let body = json!({
        "q": b.q,
        "r": b.r,
        "convention": b.convention,
        "pair": serde_json::to_value(&doc).expect("pair serializes"),
        "necessary_checks_pass": check.necessary_checks_pass(),
    });
    Ok(Report { human, body })
}

fn compare(input: &Path, lambda: Option<f64>, matrix: Option<&Path>, ctx: &Ctx) -> Result<Report, Failure> {
    let (pair, word) = load_pair(input)?;
    let word = word.ok_or_else(|| Failure::usage(format!("{}: no twist word to compare against", input.display())))?;
    let lambda = match (lambda, matrix) {
        (Some(l), _) => l,
        (None, Some(p)) => {
            let d = load_matrix(p)?;
            spectral::pf_eigen(&d.matrix, ctx.opts).map_err(Failure::domain)?.lambda
        }
        (None, None) => return Err(Failure::usage("compare needs --lambda or --matrix")),
    };
    let c = penner::compare_growth(lambda, &pair, &word, ctx.opts).map_err(Failure::domain)?;
    let human = format!("λ = {}, λ_∂ = {}: {}\n", fmt3(c.lambda), fmt3(c.lambda_boundary), c.verdict);
    Ok(Report { human, body: serde_json::to_value(&c).expect("comparison serializes") })
}

fn endo_summary(e: &FreeEndomorphism) -> (bool, i128, Vec<Vec<i64>>) {
    let ab = freegroup::abelianization(e);
    (freegroup::is_surjective(e), freegroup::determinant(&ab), ab)
}

fn pi1(input: &Path, tree: Option<&[String]>) -> Result<Report, Failure> {
    let doc = match load(input)? {
        Document::GraphMap(d) => d,
        other => return Err(wrong_schema(input, "`graphmap/1`", &other)),
    };
    let f: GraphMap = doc.map().map_err(Failure::domain)?;
    let g = f.source();
    let tree_idx = match tree {
        Some(ids) => ids.iter().map(|id| g.edge_index(id)).collect::<Result<Vec<_>, _>>(),
        None => doc.tree(g),
    }
    .map_err(Failure::domain)?;
    let e = freegroup::induced_pi1_map(&f, &tree_idx).map_err(Failure::domain)?;
    let tree_names: Vec<String> = tree_idx.iter().map(|&i| g.edge_names()[i].clone()).collect();
    let generators: Vec<String> = g.edge_names().into_iter().enumerate().filter(|(i, _)| !tree_idx.contains(i)).map(|(_, n)| n).collect();
    let (surjective, det, ab) = endo_summary(&e);
    let mut human = format!("tree: {{{}}}\n", tree_names.join(", "));
    for (k, (gen, img)) in generators.iter().zip(e.image_strings()).enumerate() {
        let _ = writeln!(human, "  x{} ({gen}) -> {img}", k + 1);
    }
    let _ = writeln!(human, "surjective: {}", if surjective { "yes" } else { "no" });
    let _ = writeln!(human, "abelianization determinant: {det}");
    let body = json!({
        "tree": tree_names,
        "generators": generators,
        "images": e.image_strings(),
        "surjective": surjective,
        "abelianization": ab,
        "determinant": det.to_string(),
    });
    Ok(Report { human, body })
}

fn verify_auto(input: &Path) -> Result<Report, Failure> {
    let e = match load(input)? {
        Document::Endo(d) => d.endo().map_err(Failure::domain)?,
        Document::GraphMap(d) => {
            let f = d.map().map_err(Failure::domain)?;
            let tree = d.tree(f.source()).map_err(Failure::domain)?;
            freegroup::induced_pi1_map(&f, &tree).map_err(Failure::domain)?
        }
        other => return Err(wrong_schema(input, "`endo/1` or `graphmap/1`", &other)),
    };
    let (surjective, det, ab) = endo_summary(&e);
    let verdict = if surjective { "automorphism" } else { "not surjective" };
    let mut human = format!("rank: {}\n", e.rank());
    for (k, img) in e.image_strings().iter().enumerate() {
        let _ = writeln!(human, "  x{} -> {img}", k + 1);
    }
    let _ = writeln!(human, "abelianization determinant: {det}");
    let _ = writeln!(human, "verdict: {verdict}");
    let body = json!({
        "rank": e.rank(),
        "images": e.image_strings(),
        "surjective": surjective,
        "automorphism": surjective,
        "abelianization": ab,
        "determinant": det.to_string(),
        "verdict": verdict,
    });
    Ok(Report { human, body })
}
