//! Published Boltzmann blocks and their comparison with computed ones.

use serde::Serialize;

use crate::arith::{int, tolerance, QExpr, Scalar};
use crate::gpa::Morphism;
use crate::graph::OrientedGraph;

use super::{block, CellError};

pub const PRINTED_BLOCKS: &str = include_str!("../../data/printed_blocks.txt");

/// One printed block `U^{v1}_{v2}`, row-major in the block's path order.
#[derive(Clone, Debug)]
pub struct PrintedBlock {
    pub v1: u32,
    pub v2: u32,
    pub rows: Vec<Vec<QExpr>>,
    /// Alternative readings `(row, col, expr)`, zero-based.
    pub fixes: Vec<(usize, usize, QExpr)>,
}

impl PrintedBlock {
    /// Rows with the alternative readings substituted.
    pub fn corrected(&self) -> Vec<Vec<QExpr>> {
        let mut rows = self.rows.clone();
        for (i, j, e) in &self.fixes {
            rows[*i][*j] = e.clone();
        }
        rows
    }
}

fn bad(line: usize, msg: &str) -> CellError {
    CellError::Fixture(format!("line {line}: {msg}"))
}

/// Parse the block fixture format: `block v1 v2`, then one line per row with
/// entries separated by `;`, then optional `fix row col expr` lines (1-based).
pub fn parse_printed_blocks(text: &str) -> Result<Vec<PrintedBlock>, CellError> {
    let mut out: Vec<PrintedBlock> = Vec::new();
    for (n, line) in text.lines().enumerate().map(|(n, l)| (n + 1, l.trim())) {
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(rest) = line.strip_prefix("block ") {
            let v: Vec<u32> = rest.split_whitespace().map(str::parse).collect::<Result<_, _>>().map_err(|_| bad(n, "vertex ids"))?;
            let [v1, v2] = v[..] else { return Err(bad(n, "expected two vertex ids")) };
            out.push(PrintedBlock { v1, v2, rows: Vec::new(), fixes: Vec::new() });
            continue;
        }
        let cur = out.last_mut().ok_or_else(|| bad(n, "entry before any block"))?;
        if let Some(rest) = line.strip_prefix("fix ") {
            let mut it = rest.splitn(3, ' ');
            let mut idx = || it.next().and_then(|s| s.parse::<usize>().ok()).filter(|&k| k > 0).ok_or_else(|| bad(n, "fix position"));
            let (r, c) = (idx()?, idx()?);
            let e = it.next().ok_or_else(|| bad(n, "fix expression"))?.parse()?;
            cur.fixes.push((r - 1, c - 1, e));
        } else {
            let row = line.split(';').map(|s| s.trim().parse()).collect::<Result<Vec<QExpr>, _>>()?;
            cur.rows.push(row);
        }
    }
    Ok(out)
}

pub fn printed_blocks() -> Vec<PrintedBlock> {
    parse_printed_blocks(PRINTED_BLOCKS).expect("bundled fixture parses")
}

/// How a computed block agrees with a printed one.
#[derive(Clone, Debug, Serialize)]
pub struct BlockComparison {
    pub v1: u32,
    pub v2: u32,
    pub size: usize,
    pub verbatim: usize,
    /// Entries that match only under their alternative reading.
    pub via_fix: Vec<(usize, usize)>,
    pub mismatched: Vec<(usize, usize)>,
    pub worst: f64,
}

impl BlockComparison {
    pub fn passed(&self) -> bool {
        self.mismatched.is_empty()
    }
}

/// Compare the `(v1, v2)` block of `u` entrywise with `pb` at `prec` bits.
pub fn compare_block(g: &OrientedGraph, u: &Morphism<QExpr>, pb: &PrintedBlock, prec: u32) -> Result<BlockComparison, CellError> {
    let b = block(g, u, int(0), pb.v1, pb.v2)?.eval(prec)?;
    let tau = tolerance(100);
    let n = b.size();
    if pb.rows.len() != n || pb.rows.iter().any(|r| r.len() != n) {
        return Err(CellError::Fixture(format!("U{}{} is {n}x{n} but printed differently", pb.v1, pb.v2)));
    }
    let corrected = pb.corrected();
    let mut cmp = BlockComparison { v1: pb.v1, v2: pb.v2, size: n, verbatim: 0, via_fix: Vec::new(), mismatched: Vec::new(), worst: 0.0 };
    let dist = |x: &Scalar, e: &QExpr| -> Result<f64, CellError> { Ok(x.sub(&e.eval(prec)?).abs_upper()) };
    for i in 0..n {
        for j in 0..n {
            let d = dist(&b.matrix[i][j], &pb.rows[i][j])?;
            if d < tau {
                cmp.verbatim += 1;
                cmp.worst = cmp.worst.max(d);
                continue;
            }
            let d = dist(&b.matrix[i][j], &corrected[i][j])?;
            cmp.worst = cmp.worst.max(d);
            if d < tau {
                cmp.via_fix.push((i, j));
            } else {
                cmp.mismatched.push((i, j));
            }
        }
    }
    Ok(cmp)
}
