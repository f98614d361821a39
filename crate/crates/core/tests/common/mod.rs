#![allow(dead_code)]

use cellforge::arith::QExpr;

pub const RECOGNITION_TABLE: &str = include_str!("../fixtures/recognition_table.txt");
pub const UNRECOGNIZED: &str = include_str!("../fixtures/unrecognized.txt");

pub struct TableRow {
    pub value: f64,
    pub printed: QExpr,
    pub fix: Option<QExpr>,
}

impl TableRow {
    /// The reading to compare against: the alternative if one is given.
    pub fn reading(&self) -> &QExpr {
        self.fix.as_ref().unwrap_or(&self.printed)
    }
}

pub fn recognition_table() -> Vec<TableRow> {
    RECOGNITION_TABLE
        .lines()
        .filter(|l| !l.trim().is_empty() && !l.starts_with('#'))
        .map(|l| {
            let cols: Vec<&str> = l.split('|').map(str::trim).collect();
            TableRow { value: cols[0].parse().unwrap(), printed: cols[1].parse().unwrap(), fix: cols.get(2).map(|s| s.parse().unwrap()) }
        })
        .collect()
}

pub fn unrecognized() -> Vec<f64> {
    UNRECOGNIZED.lines().filter(|l| !l.trim().is_empty()).map(|l| l.trim().parse().unwrap()).collect()
}

/// Certified `|a - b| < 2^-100` at 128 bits.
pub fn certified_equal(a: &QExpr, b: &QExpr) -> bool {
    cellforge::arith::eval(&(a.clone() - b.clone()), 128).unwrap().abs_upper() < cellforge::arith::tolerance(100)
}
