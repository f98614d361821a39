//! Certified checks of the Kuperberg and Kazhdan–Wenzl relations.
//!
//! Relations live in `.diagram` files; a check evaluates both sides in ball
//! arithmetic and bounds the difference on every basis element of the ambient
//! Hom space.

use std::fmt;
use std::path::Path as FsPath;

use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{ArithError, QExpr, Scalar, DEFAULT_PRECISION, DEFAULT_TOL_EXP};
use crate::gpa::{basis, sub, Balls, Binding, DiagramFile, GpaError, Morphism, Relation};
use crate::graph::OrientedGraph;

pub const KUPERBERG: &str = include_str!("../../data/relations/kuperberg.diagram");
pub const HECKE: &str = include_str!("../../data/relations/hecke.diagram");
pub const KW_AUX: &str = include_str!("../../data/relations/kw_aux.diagram");

#[derive(Debug, thiserror::Error)]
pub enum RelationError {
    #[error(transparent)]
    Gpa(#[from] GpaError),
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error("reading {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("relation {0} not found")]
    Missing(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Status {
    Pass,
    Fail,
    Indeterminate,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Fail => "FAIL",
            Status::Indeterminate => "indeterminate",
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Residual {
    pub element: String,
    pub upper: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub hom: String,
    /// Dimension of the ambient Hom space.
    pub equations: usize,
    #[serde(skip)]
    pub max_residual: Scalar,
    pub residual_upper: f64,
    pub residual_lower: f64,
    pub worst: Option<String>,
    pub precision: u32,
    pub status: Status,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub residuals: Vec<Residual>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:<16} {:>10} {:>6}  |res| <= {:.3e}  {}",
            self.name, self.hom, self.equations, self.residual_upper, self.status
        )
    }
}

/// Precision and tolerance policy.
#[derive(Clone, Copy, Debug)]
pub struct Checker {
    pub precision: u32,
    pub tol_exp: u32,
    /// Precision is doubled up to this cap while results are indeterminate.
    pub max_precision: u32,
    /// Keep per-element residuals in reports.
    pub verbose: bool,
}

impl Default for Checker {
    fn default() -> Self {
        Checker { precision: DEFAULT_PRECISION, tol_exp: DEFAULT_TOL_EXP, max_precision: 4 * DEFAULT_PRECISION, verbose: false }
    }
}

/// The three relation files.
#[derive(Clone, Debug)]
pub struct RelationSet {
    pub kuperberg: DiagramFile,
    pub hecke: DiagramFile,
    pub kw_aux: DiagramFile,
}

impl RelationSet {
    pub fn bundled() -> RelationSet {
        RelationSet {
            kuperberg: DiagramFile::parse(KUPERBERG).expect("bundled kuperberg.diagram"),
            hecke: DiagramFile::parse(HECKE).expect("bundled hecke.diagram"),
            kw_aux: DiagramFile::parse(KW_AUX).expect("bundled kw_aux.diagram"),
        }
    }

    /// Read `kuperberg.diagram`, `hecke.diagram` and `kw_aux.diagram` from `dir`.
    pub fn from_dir(dir: &FsPath) -> Result<RelationSet, RelationError> {
        let read = |name: &str| -> Result<DiagramFile, RelationError> {
            let path = dir.join(name);
            let text = std::fs::read_to_string(&path).map_err(|source| RelationError::Io { path: path.display().to_string(), source })?;
            Ok(DiagramFile::parse(&text)?)
        };
        Ok(RelationSet { kuperberg: read("kuperberg.diagram")?, hecke: read("hecke.diagram")?, kw_aux: read("kw_aux.diagram")? })
    }
}

fn eval_inputs(inputs: &[(&str, &Morphism<QExpr>)], prec: u32) -> Result<Binding<Scalar>, ArithError> {
    inputs.iter().map(|(n, m)| Ok((n.to_string(), m.eval(prec)?))).collect()
}

impl Checker {
    pub fn tolerance(&self) -> f64 {
        crate::arith::tolerance(self.tol_exp)
    }

    fn classify(&self, worst_upper: f64, worst_lower: f64) -> Status {
        let tol = self.tolerance();
        if worst_upper < tol {
            Status::Pass
        } else if worst_lower > tol {
            Status::Fail
        } else {
            Status::Indeterminate
        }
    }

    /// Check one relation of `file` with the generators in `inputs`.
    pub fn check(
        &self,
        g: &OrientedGraph,
        file: &DiagramFile,
        rel: &Relation,
        inputs: &[(&str, &Morphism<QExpr>)],
    ) -> Result<CheckReport, RelationError> {
        let mut prec = self.precision;
        loop {
            let env = file.bind(&Balls::new(prec), g, &eval_inputs(inputs, prec)?)?;
            let report = self.check_at(g, rel, &env, prec)?;
            if report.status != Status::Indeterminate || prec * 2 > self.max_precision {
                return Ok(report);
            }
            prec *= 2;
        }
    }

    fn check_at(&self, g: &OrientedGraph, rel: &Relation, env: &Binding<Scalar>, prec: u32) -> Result<CheckReport, RelationError> {
        let fld = Balls::new(prec);
        let lhs = rel.lhs.eval(&fld, g, env)?;
        let rhs = rel.rhs.eval(&fld, g, env)?;
        let diff = sub(&fld, &lhs, &rhs)?;
        if diff.source != rel.source || diff.target != rel.target {
            return Err(GpaError::Type {
                context: rel.name.clone(),
                detail: format!("declared {} -> {}, sides have type {}", rel.source, rel.target, diff.type_string()),
            }
            .into());
        }
        let elements = basis(g, &rel.source, &rel.target);
        let zero = Scalar::zero(prec);
        let mut max = zero.clone();
        let mut worst = None;
        let mut lower = 0f64;
        let mut residuals = Vec::new();
        for (p, q) in &elements {
            let r = diff.get(p, q).unwrap_or(&zero);
            let up = r.abs_upper();
            if self.verbose {
                residuals.push(Residual { element: show_pair(g, p, q), upper: up });
            }
            lower = lower.max(r.abs_lower());
            if worst.is_none() || up > max.abs_upper() {
                max = r.clone();
                worst = Some(show_pair(g, p, q));
            }
        }
        let upper = max.abs_upper();
        Ok(CheckReport {
            name: rel.name.clone(),
            hom: format!("{}->{}", show_signs(&rel.source), show_signs(&rel.target)),
            equations: elements.len(),
            max_residual: max,
            residual_upper: upper,
            residual_lower: lower,
            worst,
            precision: prec,
            status: self.classify(upper, lower),
            residuals,
        })
    }

    /// Check every relation of `file`, in file order.
    pub fn check_file(
        &self,
        g: &OrientedGraph,
        file: &DiagramFile,
        inputs: &[(&str, &Morphism<QExpr>)],
    ) -> Result<Vec<CheckReport>, RelationError> {
        file.relations.par_iter().map(|r| self.check(g, file, r, inputs)).collect()
    }

    fn named(
        &self,
        g: &OrientedGraph,
        file: &DiagramFile,
        name: &str,
        inputs: &[(&str, &Morphism<QExpr>)],
    ) -> Result<CheckReport, RelationError> {
        let rel = file.relation(name).ok_or_else(|| RelationError::Missing(name.to_string()))?;
        self.check(g, file, rel, inputs)
    }

    pub fn check_rotation(&self, g: &OrientedGraph, rels: &RelationSet, w: &Morphism<QExpr>) -> Result<CheckReport, RelationError> {
        self.named(g, &rels.kuperberg, "()", &[("W", w)])
    }

    pub fn check_bigon(&self, g: &OrientedGraph, rels: &RelationSet, w: &Morphism<QExpr>) -> Result<CheckReport, RelationError> {
        self.named(g, &rels.kuperberg, "(i)", &[("W", w)])
    }

    pub fn check_square(&self, g: &OrientedGraph, rels: &RelationSet, w: &Morphism<QExpr>) -> Result<CheckReport, RelationError> {
        self.named(g, &rels.kuperberg, "(ii)", &[("W", w)])
    }

    /// `()`, `(i)` and `(ii)`.
    pub fn check_kuperberg(&self, g: &OrientedGraph, rels: &RelationSet, w: &Morphism<QExpr>) -> Result<Vec<CheckReport>, RelationError> {
        self.check_file(g, &rels.kuperberg, &[("W", w)])
    }

    /// `(R1)` both caps, `(R2)`, `(Hecke)` and `(R3)`.
    pub fn check_hecke_suite(&self, g: &OrientedGraph, rels: &RelationSet, u: &Morphism<QExpr>) -> Result<Vec<CheckReport>, RelationError> {
        self.check_file(g, &rels.hecke, &[("U", u)])
    }

    /// `(BA)` on both sides, `(RI)` and `(U)`.
    pub fn check_kw_aux(
        &self,
        g: &OrientedGraph,
        rels: &RelationSet,
        w: &Morphism<QExpr>,
        u: &Morphism<QExpr>,
    ) -> Result<Vec<CheckReport>, RelationError> {
        self.check_file(g, &rels.kw_aux, &[("W", w), ("U", u)])
    }
}

fn show_signs(s: &crate::graph::SignString) -> String {
    if s.is_empty() {
        "∅".into()
    } else {
        s.to_string()
    }
}

fn show_pair(g: &OrientedGraph, p: &crate::graph::Path, q: &crate::graph::Path) -> String {
    format!("({}, {})", g.show_path(p), g.show_path(q))
}

#[cfg(test)]
mod tests;
