//! Command-line front end: `verify`, `solve`, `recognize`, `export`, `report`.

use std::io::Write;
use std::path::{Path as FsPath, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;

use crate::arith::{int, qint, tolerance, QExpr, DEFAULT_PRECISION};
use crate::cells::{self, block, block_index, build_u, compare_block, BlockComparison, CellSystem, PrintedBlock};
use crate::gpa::MorphismJson;
use crate::graph::{self, OrientedGraph, SignString};
use crate::relations::{CheckReport, Checker, RelationSet, Status};
use crate::solver::{self, GaugeReport, Init, RecognitionDictionary, SolveConfig, SolverError, DEFAULT_TOL};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INDETERMINATE: i32 = 2;
pub const EXIT_NO_CONVERGENCE: i32 = 3;

pub const DATA_ENV: &str = "CELLFORGE_DATA";

#[derive(Debug, Parser)]
#[command(name = "cellforge", version, about = "Cell systems on E4^12: verify, solve, recognize, export")]
pub struct Cli {
    #[command(flatten)]
    pub opts: Options,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Options {
    /// Working precision in bits.
    #[arg(long, global = true, default_value_t = DEFAULT_PRECISION)]
    pub precision: u32,
    /// Pass tolerance 2^-k, given as `k` or `2^-k`.
    #[arg(long, global = true, default_value = "100", value_parser = parse_tol)]
    pub tol: u32,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Graph JSON replacing the bundled E4^12.
    #[arg(long, global = true)]
    pub graph: Option<PathBuf>,
    /// Output file (stdout when absent).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[arg(long, short, global = true)]
    pub verbose: bool,
    /// Data directory; defaults to $CELLFORGE_DATA, then the bundled data.
    #[arg(long, global = true)]
    pub data: Option<PathBuf>,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Certify the bundled data against every relation.
    Verify {
        /// Write the JSON check report here.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Numerically solve for U and print its magnitudes.
    Solve {
        /// Annotate magnitudes with recognized closed forms.
        #[arg(long)]
        recognize: bool,
        #[arg(long, value_enum, default_value_t = InitArg::Projection)]
        init: InitArg,
        #[arg(long, default_value_t = 100)]
        restarts: usize,
        /// Levenberg-Marquardt iterations per restart.
        #[arg(long, default_value_t = 400)]
        max_iter: usize,
    },
    /// Match decimal values against closed forms.
    Recognize {
        /// File with one value per line.
        input: Option<PathBuf>,
        /// Print the dictionary instead.
        #[arg(long)]
        dump: bool,
        #[arg(long, default_value_t = solver::DEFAULT_COMPLEXITY)]
        complexity: usize,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        match_tol: f64,
    },
    /// Emit graph, W, U or Boltzmann blocks as JSON.
    Export {
        #[arg(value_enum, default_value_t = ExportKind::All)]
        what: ExportKind,
    },
    /// Structure constants, equation counts and the gauge group.
    Report,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InitArg {
    Projection,
    Disk,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ExportKind {
    Graph,
    W,
    U,
    Blocks,
    All,
}

fn parse_tol(s: &str) -> Result<u32, String> {
    let k = s.trim().strip_prefix("2^-").unwrap_or(s.trim());
    k.parse().map_err(|_| format!("expected k or 2^-k, got {s:?}"))
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error(transparent)]
    Graph(#[from] graph::GraphError),
    #[error(transparent)]
    Cells(#[from] cells::CellError),
    #[error(transparent)]
    Relations(#[from] crate::relations::RelationError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Arith(#[from] crate::arith::ArithError),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Input(String),
}

fn read(path: &FsPath) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

/// Graph, cell system, relation files and printed blocks.
pub struct Data {
    pub graph: OrientedGraph,
    pub cells: CellSystem,
    pub relations: RelationSet,
    pub blocks: Vec<PrintedBlock>,
}

impl Data {
    /// Load from `dir` (`e412.json`, `e412_cells.json`, `relations/`,
    /// `printed_blocks.txt`), or the bundled copies; `graph` overrides the graph file.
    pub fn load(dir: Option<&FsPath>, graph: Option<&FsPath>) -> Result<Data, CliError> {
        let text = |name: &str, bundled: &'static str| -> Result<String, CliError> {
            match dir {
                Some(d) => read(&d.join(name)),
                None => Ok(bundled.to_string()),
            }
        };
        let g = Data::load_graph(dir, graph)?;
        let cells = CellSystem::from_json(g.clone(), &text("e412_cells.json", cells::E412_CELLS_JSON)?)?;
        let relations = Data::load_relations(dir)?;
        let blocks = cells::parse_printed_blocks(&text("printed_blocks.txt", cells::PRINTED_BLOCKS)?)?;
        Ok(Data { graph: g, cells, relations, blocks })
    }

    fn load_graph(dir: Option<&FsPath>, graph: Option<&FsPath>) -> Result<OrientedGraph, CliError> {
        let text = match (graph, dir) {
            (Some(p), _) => read(p)?,
            (None, Some(d)) => read(&d.join("e412.json"))?,
            (None, None) => graph::E412_JSON.to_string(),
        };
        Ok(OrientedGraph::from_json(&text)?)
    }

    fn load_relations(dir: Option<&FsPath>) -> Result<RelationSet, CliError> {
        Ok(match dir {
            Some(d) => RelationSet::from_dir(&d.join("relations"))?,
            None => RelationSet::bundled(),
        })
    }
}

/// Run a parsed command line, writing human-readable output to `out`.
pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<i32, CliError> {
    if let Some(n) = cli.opts.threads {
        // a second call in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let o = &cli.opts;
    match &cli.command {
        Command::Verify { report } => cmd_verify(o, report.as_deref(), out),
        Command::Solve { recognize, init, restarts, max_iter } => cmd_solve(o, *recognize, *init, *restarts, *max_iter, out),
        Command::Recognize { input, dump, complexity, match_tol } => cmd_recognize(input.as_deref(), *dump, *complexity, *match_tol, out),
        Command::Export { what } => cmd_export(o, *what, out),
        Command::Report => cmd_report(o, out),
    }
}

fn io(e: std::io::Error) -> CliError {
    CliError::Io { path: "<output>".into(), source: e }
}

fn write_file(path: &FsPath, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

/// One line of the verification table.
#[derive(Clone, Debug, Serialize)]
pub struct VerifyRow {
    pub name: String,
    pub equations: usize,
    pub residual: f64,
    pub status: Status,
    pub detail: Option<String>,
}

impl VerifyRow {
    fn from_check(r: &CheckReport) -> VerifyRow {
        VerifyRow { name: r.name.clone(), equations: r.equations, residual: r.residual_upper, status: r.status, detail: r.worst.clone() }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub schema: u32,
    pub precision: u32,
    pub tol_exp: u32,
    pub rows: Vec<VerifyRow>,
    pub checks: Vec<CheckReport>,
    pub blocks: Vec<BlockComparison>,
}

impl VerifyReport {
    pub fn exit_code(&self) -> i32 {
        if self.rows.iter().any(|r| r.status == Status::Fail) {
            EXIT_FAIL
        } else if self.rows.iter().any(|r| r.status == Status::Indeterminate) {
            EXIT_INDETERMINATE
        } else {
            EXIT_PASS
        }
    }

    pub fn first_failure(&self) -> Option<&VerifyRow> {
        self.rows.iter().find(|r| r.status != Status::Pass)
    }
}

/// Every check of `verify`, in table order.
pub fn verify(data: &Data, checker: &Checker) -> Result<VerifyReport, CliError> {
    let (prec, tol) = (checker.precision, checker.tolerance());
    let g = &data.graph;
    let mut rows = Vec::new();

    let status_of = |upper: f64, lower: f64| {
        if upper < tol {
            Status::Pass
        } else if lower > tol {
            Status::Fail
        } else {
            Status::Indeterminate
        }
    };
    let fp = g.fp_residual(prec)?;
    rows.push(VerifyRow {
        name: "FP eigenvector".into(),
        equations: 2 * g.vertex_count(),
        residual: fp.abs_upper(),
        status: status_of(fp.abs_upper(), fp.abs_lower()),
        detail: None,
    });
    let closure = data.cells.check_closure(prec, tol);
    rows.push(VerifyRow {
        name: "closure".into(),
        equations: data.cells.weights.len(),
        residual: if closure.is_ok() { 0.0 } else { f64::NAN },
        status: if closure.is_ok() { Status::Pass } else { Status::Fail },
        detail: closure.err().map(|e| e.to_string()),
    });

    let w = data.cells.as_morphism();
    let u = build_u(&data.cells);
    let mut checks = checker.check_kuperberg(g, &data.relations, &w)?;
    checks.extend(checker.check_hecke_suite(g, &data.relations, &u)?);
    checks.extend(checker.check_kw_aux(g, &data.relations, &w, &u)?);
    rows.extend(checks.iter().map(VerifyRow::from_check));

    let mut blocks = Vec::new();
    for pb in &data.blocks {
        let c = compare_block(g, &u, pb, prec)?;
        let detail = match (c.via_fix.len(), c.mismatched.first()) {
            (_, Some((i, j))) => Some(format!("entry ({}, {}) differs", i + 1, j + 1)),
            (0, None) => None,
            (n, None) => Some(format!("{n} entries match their alternative reading")),
        };
        rows.push(VerifyRow {
            name: format!("block U{}{}", pb.v1, pb.v2),
            equations: c.size * c.size,
            residual: c.worst,
            status: if c.passed() { Status::Pass } else { Status::Fail },
            detail,
        });
        blocks.push(c);
    }
    Ok(VerifyReport { schema: 1, precision: prec, tol_exp: checker.tol_exp, rows, checks, blocks })
}

fn data_dir(o: &Options) -> Option<PathBuf> {
    o.data.clone().or_else(|| std::env::var_os(DATA_ENV).map(PathBuf::from))
}

fn cmd_verify(o: &Options, report: Option<&FsPath>, out: &mut dyn Write) -> Result<i32, CliError> {
    let data = match Data::load(data_dir(o).as_deref(), o.graph.as_deref()) {
        Ok(d) => d,
        Err(e) => {
            writeln!(out, "cannot load data: {e}").map_err(io)?;
            return Ok(EXIT_FAIL);
        }
    };
    let checker = Checker { precision: o.precision, tol_exp: o.tol, max_precision: 4 * o.precision, verbose: o.verbose };
    let rep = verify(&data, &checker)?;
    writeln!(out, "{:<20} {:>6}  {:>12}  status", "relation", "count", "max |res|").map_err(io)?;
    for r in &rep.rows {
        write!(out, "{:<20} {:>6}  {:>12.3e}  {}", r.name, r.equations, r.residual, r.status).map_err(io)?;
        match &r.detail {
            Some(d) if o.verbose || r.status != Status::Pass => writeln!(out, "  {d}"),
            _ => writeln!(out),
        }
        .map_err(io)?;
    }
    let code = rep.exit_code();
    match rep.first_failure() {
        Some(r) => writeln!(out, "{}: {}", r.status, r.name),
        None => writeln!(out, "all pass at {} bits, tolerance 2^-{}", rep.precision, rep.tol_exp),
    }
    .map_err(io)?;
    if let Some(path) = report {
        write_file(path, &serde_json::to_string_pretty(&rep)?)?;
    }
    Ok(code)
}

#[derive(Clone, Debug, Serialize)]
pub struct AssignmentEntry {
    pub p: String,
    pub q: String,
    pub re: f64,
    pub im: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct MagnitudeRow {
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub guess: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SolveReport {
    pub schema: u32,
    pub graph: String,
    pub seed: u64,
    pub init: Init,
    pub restart: usize,
    pub residual: f64,
    pub gauge_report: Option<GaugeReport>,
    pub assignment: Vec<AssignmentEntry>,
    pub magnitudes: Vec<MagnitudeRow>,
}

/// Distinct magnitudes closer than this are merged.
pub const MAGNITUDE_MERGE: f64 = 1e-6;

fn cmd_solve(o: &Options, recognize: bool, init: InitArg, restarts: usize, max_iter: usize, out: &mut dyn Write) -> Result<i32, CliError> {
    let dir = data_dir(o);
    let g = Data::load_graph(dir.as_deref(), o.graph.as_deref())?;
    let rels = Data::load_relations(dir.as_deref())?;
    let sys = solver::assemble_system(&g, &rels)?;
    let (sys, gauge) = match solver::gauge_fix(&sys) {
        Ok(s) => (s, Some(solver::gauge_report(&g)?)),
        Err(SolverError::NoGaugeBlock) => (sys, None),
        Err(e) => return Err(e.into()),
    };
    let init = match init {
        InitArg::Projection => Init::Projection,
        InitArg::Disk => Init::Disk,
    };
    let cfg = SolveConfig { restarts, max_iter, seed: o.seed, init, ..SolveConfig::default() };
    let sol = match solver::solve_numeric(&sys, &cfg) {
        Ok(s) => s,
        Err(e @ SolverError::NoConvergence { .. }) => {
            writeln!(out, "{e}").map_err(io)?;
            return Ok(EXIT_NO_CONVERGENCE);
        }
        Err(e) => return Err(e.into()),
    };
    let dict = recognize.then(RecognitionDictionary::default);
    let magnitudes: Vec<MagnitudeRow> = solver::distinct_magnitudes(&sol.u, MAGNITUDE_MERGE)
        .into_iter()
        .map(|value| MagnitudeRow { value, guess: dict.as_ref().map(|d| d.lookup(value, DEFAULT_TOL).map_or_else(|| "no match".into(), |e| e.text)) })
        .collect();
    let assignment = sol
        .u
        .entries
        .iter()
        .map(|((p, q), z): (_, &Complex64)| AssignmentEntry { p: g.show_path(p), q: g.show_path(q), re: z.re, im: z.im })
        .collect();
    let rep = SolveReport {
        schema: 1,
        graph: g.name().to_string(),
        seed: o.seed,
        init,
        restart: sol.restart,
        residual: sol.residual,
        gauge_report: gauge.clone(),
        assignment,
        magnitudes,
    };
    writeln!(out, "converged on restart {} with max residual {:.3e}", rep.restart, rep.residual).map_err(io)?;
    if let Some(gr) = &gauge {
        writeln!(out, "gauge: {gr}").map_err(io)?;
    }
    writeln!(out, "{} distinct magnitudes:", rep.magnitudes.len()).map_err(io)?;
    for m in &rep.magnitudes {
        match &m.guess {
            Some(gs) => writeln!(out, "  {:<10.6} {gs}", m.value),
            None => writeln!(out, "  {:.6}", m.value),
        }
        .map_err(io)?;
    }
    if let Some(path) = &o.out {
        write_file(path, &serde_json::to_string_pretty(&rep)?)?;
    }
    Ok(EXIT_PASS)
}

fn cmd_recognize(input: Option<&FsPath>, dump: bool, complexity: usize, tol: f64, out: &mut dyn Write) -> Result<i32, CliError> {
    let dict = RecognitionDictionary::new(complexity);
    if dump {
        write!(out, "{}", dict.dump()).map_err(io)?;
        return Ok(EXIT_PASS);
    }
    let text = match input {
        Some(p) => read(p)?,
        None => std::io::read_to_string(std::io::stdin()).map_err(io)?,
    };
    for line in text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
        let x: f64 = line.parse().map_err(|_| CliError::Input(format!("not a number: {line:?}")))?;
        match dict.lookup(x, tol) {
            Some(e) => writeln!(out, "{x:<10} {}", e.text),
            None => writeln!(out, "{x:<10} no match"),
        }
        .map_err(io)?;
    }
    Ok(EXIT_PASS)
}

#[derive(Clone, Debug, Serialize)]
pub struct BlockJson {
    pub v1: u32,
    pub v2: u32,
    pub size: usize,
    pub labels: Vec<String>,
    pub matrix: Vec<Vec<QExpr>>,
    pub numeric: Vec<Vec<[f64; 2]>>,
}

/// Every nonempty Boltzmann block of `u`, by vertex id.
pub fn export_blocks(g: &OrientedGraph, u: &crate::gpa::Morphism<QExpr>) -> Result<Vec<BlockJson>, CliError> {
    let mut out = Vec::new();
    for (v1, v2, _) in block_index(g) {
        let b = block(g, u, int(0), v1, v2)?;
        let numeric = b
            .matrix
            .iter()
            .map(|r| r.iter().map(|e| e.to_c64().map(|(re, im)| [re, im])).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        out.push(BlockJson { v1, v2, size: b.size(), labels: b.labels, matrix: b.matrix, numeric });
    }
    Ok(out)
}

fn cmd_export(o: &Options, what: ExportKind, out: &mut dyn Write) -> Result<i32, CliError> {
    let data = Data::load(data_dir(o).as_deref(), o.graph.as_deref())?;
    let g = &data.graph;
    let graph = || -> Result<serde_json::Value, CliError> { Ok(serde_json::from_str(&g.to_json())?) };
    let w = || serde_json::to_value(data.cells.to_closed_json(g.name()));
    let u = build_u(&data.cells);
    let uj = || serde_json::to_value(MorphismJson::from_morphism(g, &u));
    let value = match what {
        ExportKind::Graph => graph()?,
        ExportKind::W => w()?,
        ExportKind::U => uj()?,
        ExportKind::Blocks => serde_json::to_value(export_blocks(g, &u)?)?,
        ExportKind::All => serde_json::json!({
            "schema": 1,
            "graph": graph()?,
            "w": w()?,
            "u": uj()?,
            "blocks": export_blocks(g, &u)?,
        }),
    };
    let text = serde_json::to_string_pretty(&value)?;
    match &o.out {
        Some(p) => write_file(p, &text)?,
        None => writeln!(out, "{text}").map_err(io)?,
    }
    Ok(EXIT_PASS)
}

fn cmd_report(o: &Options, out: &mut dyn Write) -> Result<i32, CliError> {
    let dir = data_dir(o);
    let data = Data::load(dir.as_deref(), o.graph.as_deref())?;
    let g = &data.graph;
    let s = |t: &str| -> SignString { t.parse().expect("sign string") };
    let mut lines = vec![
        format!("graph {}: {} vertices, {} edges", g.name(), g.vertex_count(), g.edge_count()),
        format!("parallel families: {:?}", g.parallel_families().iter().map(|f| f.iter().map(|&e| g.edge_label(e).to_string()).collect::<Vec<_>>()).collect::<Vec<_>>()),
        format!("top eigenvalue {:.10}, [3] = {:.10}", g.top_eigenvalue(), qint(3).to_c64()?.0),
        format!("hom_dim(- -> ++) = {}", g.hom_dim(&s("-"), &s("++"))),
        format!("hom_dim(++ -> ++) = {}", g.hom_dim(&s("++"), &s("++"))),
        format!("hom_dim(+++ -> +++) = {}", g.hom_dim(&s("+++"), &s("+++"))),
        format!("cell generators: {}, weights: {}", data.cells.generators.len(), data.cells.weights.len()),
    ];
    let blocks = block_index(g);
    let mut sizes: Vec<usize> = blocks.iter().map(|b| b.2).collect();
    sizes.sort_unstable();
    lines.push(format!("Boltzmann blocks: {} nonempty, sizes {:?}", blocks.len(), sizes));
    let sys = solver::assemble_system(g, &data.relations)?;
    lines.push(format!("polynomial system: {} real variables, {} real equations, degree <= {}", sys.var_count(), sys.equations.len(), sys.max_degree()));
    for (name, n) in &sys.counts {
        lines.push(format!("  {name:<16} {n}"));
    }
    match solver::gauge_report(g) {
        Ok(r) => lines.push(format!("gauge: {r}")),
        Err(e) => lines.push(format!("gauge: {e}")),
    }
    let tol = tolerance(o.tol);
    let tr = block(g, &build_u(&data.cells), int(0), 1, 9).ok().map(|b| b.eval(o.precision)).transpose()?;
    if let Some(b) = tr {
        let d = b.trace().sub(&qint(2).eval(o.precision)?);
        lines.push(format!("trace U19 - [2]: |.| <= {:.3e} ({})", d.abs_upper(), if d.certifies_zero(tol) { "pass" } else { "FAIL" }));
    }
    for l in lines {
        writeln!(out, "{l}").map_err(io)?;
    }
    Ok(EXIT_PASS)
}

/// Parse `args` and run; errors are printed and map to exit 1.
pub fn main_with(args: impl IntoIterator<Item = String>, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(err, "{e}");
            return if e.use_stderr() { EXIT_FAIL } else { EXIT_PASS };
        }
    };
    match run(&cli, out) {
        Ok(code) => code,
        Err(CliError::Io { source, .. }) if source.kind() == std::io::ErrorKind::BrokenPipe => EXIT_PASS,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_FAIL
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::DEFAULT_TOL_EXP;

    fn parse(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("cellforge").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn defaults() {
        let c = parse(&["verify"]);
        assert_eq!(c.opts.precision, 256);
        assert_eq!(c.opts.tol, DEFAULT_TOL_EXP);
        assert_eq!(c.opts.seed, 0);
    }

    #[test]
    fn tol_accepts_both_forms() {
        assert_eq!(parse(&["verify", "--tol", "2^-80"]).opts.tol, 80);
        assert_eq!(parse(&["--tol", "90", "report"]).opts.tol, 90);
        assert!(Cli::try_parse_from(["cellforge", "verify", "--tol", "x"]).is_err());
    }

    #[test]
    fn export_graph_counts() {
        let mut buf = Vec::new();
        assert_eq!(run(&parse(&["export", "graph"]), &mut buf).unwrap(), EXIT_PASS);
        let v: serde_json::Value = serde_json::from_slice(&buf).unwrap();
        assert_eq!(v["vertices"].as_array().unwrap().len(), 11);
        assert_eq!(v["edges"].as_array().unwrap().len(), 25);
    }

    #[test]
    fn export_w_and_blocks() {
        let mut buf = Vec::new();
        run(&parse(&["export", "w"]), &mut buf).unwrap();
        let v: serde_json::Value = serde_json::from_slice(&buf).unwrap();
        assert_eq!(v["generators"].as_array().unwrap().len(), 63);
        buf.clear();
        run(&parse(&["export", "blocks"]), &mut buf).unwrap();
        let v: Vec<serde_json::Value> = serde_json::from_slice(&buf).unwrap();
        let size = |a: u64, b: u64| v.iter().find(|x| x["v1"] == a && x["v2"] == b).map(|x| x["size"].as_u64().unwrap());
        assert_eq!(size(9, 6), Some(5));
        for v1 in [3, 4, 5] {
            assert_eq!(size(v1, 9), Some(3));
        }
    }

    #[test]
    fn missing_data_dir_fails_verify() {
        let mut buf = Vec::new();
        let code = run(&parse(&["--data", "/nonexistent/cellforge", "verify"]), &mut buf).unwrap();
        assert_eq!(code, EXIT_FAIL);
    }

    #[test]
    fn recognize_dump_is_nonempty() {
        let mut buf = Vec::new();
        run(&parse(&["recognize", "--dump", "--complexity", "3"]), &mut buf).unwrap();
        assert!(String::from_utf8(buf).unwrap().lines().count() > 10);
    }
}
