//! Numerical discovery of `U`: polynomial system assembly, gauge fixing,
//! Levenberg–Marquardt with restarts, value recognition, exact completion
//! and recovery of `W` from `U`.

mod complete;
mod derive;
mod lm;
pub mod poly;
mod recognize;

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::Serialize;

use crate::arith::{int, qint, ArithError, QExpr};
use crate::gpa::{basis, sub, Field, Floats, GpaError, Key, Morphism};
use crate::graph::{OrientedGraph, SignString};
use crate::relations::RelationSet;

pub use complete::{complete_linear, Completion, Tracked, TrackedField};
pub use derive::{derive_w, gauge_equivalent, GaugeComparison};
pub use lm::{levenberg_marquardt, restart_seeds, solve_numeric, Init, RestartLog, SolveConfig, SolveOutcome};
pub use poly::{Mono, Poly, PolyField, Var};
pub use recognize::{recognize, Entry, Recognition, RecognitionDictionary, DEFAULT_COMPLEXITY, DEFAULT_TOL};

#[derive(Debug, thiserror::Error)]
pub enum SolverError {
    #[error(transparent)]
    Gpa(#[from] GpaError),
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error("graph has no vertex pair with a 2x2 block to gauge-fix")]
    NoGaugeBlock,
    #[error("no convergence after {restarts} restarts; best residual {best:.3e}")]
    NoConvergence { restarts: usize, best: f64, log: Vec<RestartLog> },
    #[error("underdetermined: {unknowns} unknowns left, nullity {nullity}")]
    Underdetermined { unknowns: usize, nullity: usize },
    #[error("inconsistent: {relation} residual {residual:.3e} at {element}")]
    Inconsistent { relation: String, element: String, residual: f64 },
    #[error("not of cell-system type: {0}")]
    NotCellType(String),
}

/// Which half of a complex coefficient a real variable carries.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Part {
    Re,
    Im,
}

#[derive(Clone, Debug)]
pub struct VarRef {
    pub key: Key,
    pub part: Part,
}

/// One real polynomial equation.
#[derive(Clone, Debug)]
pub struct Equation {
    pub relation: String,
    pub element: Key,
    pub part: Part,
    pub terms: Vec<(Mono, f64)>,
}

impl Equation {
    pub fn degree(&self) -> usize {
        self.terms.iter().map(|(m, _)| m.degree()).max().unwrap_or(0)
    }
}

/// The relations `(R1)`, `(Hecke)`, `(R3)` as real polynomials in the
/// entries of a Hermitian `U`.
///
/// `(R2)` is built in: each off-diagonal pair `{(p,q), (q,p)}` shares one
/// complex variable and diagonal entries are real.
#[derive(Clone, Debug)]
pub struct PolySystem {
    pub graph: OrientedGraph,
    pub vars: Vec<VarRef>,
    /// Entries fixed to constants (gauge constraints).
    pub pinned: BTreeMap<Key, QExpr>,
    pub equations: Vec<Equation>,
    /// Ambient Hom dimension per relation, in file order.
    pub counts: Vec<(String, usize)>,
    relations: RelationSet,
}

const KEEP: f64 = 1e-13;
const SOLVED_RELATIONS: [&str; 4] = ["(R1) right cap", "(R1) left cap", "(Hecke)", "(R3)"];

fn pp() -> SignString {
    "++".parse().expect("sign string")
}

/// Assemble the full (ungauged) system over `g`.
pub fn assemble_system(g: &OrientedGraph, rels: &RelationSet) -> Result<PolySystem, SolverError> {
    build(g, rels, BTreeMap::new())
}

/// The pinned entries fixing the `U(2)` on the unique 2×2 block with a
/// parallel middle edge: `diag([2], 0)`.
pub fn gauge_constraints(g: &OrientedGraph) -> Result<BTreeMap<Key, QExpr>, SolverError> {
    let families = g.parallel_families();
    for (&(a, b), ps) in g.paths_by_ends(&pp()).iter() {
        if ps.len() != 2 {
            continue;
        }
        let e0 = ps[0].steps()[1].edge as usize;
        let e1 = ps[1].steps()[1].edge as usize;
        if families.iter().any(|f| f.contains(&e0) && f.contains(&e1)) && a != b {
            let mut pins = BTreeMap::new();
            pins.insert((ps[0].clone(), ps[0].clone()), qint(2));
            pins.insert((ps[1].clone(), ps[1].clone()), int(0));
            pins.insert((ps[0].clone(), ps[1].clone()), int(0));
            pins.insert((ps[1].clone(), ps[0].clone()), int(0));
            return Ok(pins);
        }
    }
    Err(SolverError::NoGaugeBlock)
}

/// Edge-phase gauge group before and after fixing.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GaugeReport {
    /// Sizes `k` of the `U(k)` factors from parallel edge families.
    pub unitary_blocks: Vec<usize>,
    /// `U(1)` factors from edges without a parallel partner.
    pub simple_edges: usize,
    /// Entries pinned by the fixing.
    pub pinned: usize,
    /// Dimension of the torus left after fixing: one phase per edge.
    pub residual_torus: usize,
}

impl std::fmt::Display for GaugeReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let blocks: Vec<String> = self.unitary_blocks.iter().map(|k| format!("U({k})")).collect();
        write!(f, "{}⊕U(1)^{} before fixing, {} entries pinned, U(1)^{} after", blocks.join("⊕"), self.simple_edges, self.pinned, self.residual_torus)
    }
}

pub fn gauge_report(g: &OrientedGraph) -> Result<GaugeReport, SolverError> {
    let families = g.parallel_families();
    let in_family: usize = families.iter().map(Vec::len).sum();
    Ok(GaugeReport {
        unitary_blocks: families.iter().map(Vec::len).collect(),
        simple_edges: g.edge_count() - in_family,
        pinned: gauge_constraints(g)?.len(),
        residual_torus: g.edge_count(),
    })
}

/// Re-assemble with the `U¹₉ = diag([2], 0)` gauge constraints substituted.
pub fn gauge_fix(sys: &PolySystem) -> Result<PolySystem, SolverError> {
    let mut pins = sys.pinned.clone();
    pins.extend(gauge_constraints(&sys.graph)?);
    build(&sys.graph, &sys.relations, pins)
}

fn build(g: &OrientedGraph, rels: &RelationSet, pinned: BTreeMap<Key, QExpr>) -> Result<PolySystem, SolverError> {
    let fld = PolyField::new(Floats);
    let i = Complex64::new(0.0, 1.0);
    let mut vars = Vec::new();
    let mut entries = BTreeMap::new();
    for (p, q) in basis(g, &pp(), &pp()) {
        let key = (p.clone(), q.clone());
        if let Some(c) = pinned.get(&key) {
            entries.insert(key, fld.from_qexpr(c)?);
            continue;
        }
        if p == q {
            let v = vars.len() as Var;
            vars.push(VarRef { key: key.clone(), part: Part::Re });
            entries.insert(key, fld.var(v));
        } else if p < q {
            let re = vars.len() as Var;
            vars.push(VarRef { key: key.clone(), part: Part::Re });
            vars.push(VarRef { key: key.clone(), part: Part::Im });
            let im = fld.mul(&fld.constant(i), &fld.var(re + 1));
            let u = fld.add(&fld.var(re), &im);
            entries.insert((q.clone(), p.clone()), fld.conj(&u));
            entries.insert(key, u);
        }
    }
    let u = Morphism { source: pp(), target: pp(), entries };
    let mut equations = Vec::new();
    let mut counts = Vec::new();
    for (name, count, diffs) in relation_differences(&fld, g, rels, u)? {
        counts.push((name.clone(), count));
        for (element, poly) in diffs {
            for part in [Part::Re, Part::Im] {
                let terms: Vec<(Mono, f64)> = poly
                    .terms
                    .iter()
                    .map(|(m, c)| (*m, if part == Part::Re { c.re } else { c.im }))
                    .filter(|(_, c)| c.abs() > KEEP)
                    .collect();
                if !terms.is_empty() {
                    equations.push(Equation { relation: name.clone(), element: element.clone(), part, terms });
                }
            }
        }
    }
    Ok(PolySystem { graph: g.clone(), vars, pinned, equations, counts, relations: rels.clone() })
}

/// `lhs - rhs` of each solved relation with `U` bound to `u`: name, ambient
/// basis size and the nonzero entries.
#[allow(clippy::type_complexity)]
pub(crate) fn relation_differences<F: Field>(
    fld: &PolyField<F>,
    g: &OrientedGraph,
    rels: &RelationSet,
    u: Morphism<Poly<F::Elem>>,
) -> Result<Vec<(String, usize, Vec<(Key, Poly<F::Elem>)>)>, SolverError> {
    let mut env = BTreeMap::new();
    env.insert("U".to_string(), u);
    let env = rels.hecke.bind(fld, g, &env)?;
    let mut out = Vec::new();
    for rel in rels.hecke.relations.iter().filter(|r| SOLVED_RELATIONS.contains(&r.name.as_str())) {
        let diff = sub(fld, &rel.lhs.eval(fld, g, &env)?, &rel.rhs.eval(fld, g, &env)?)?;
        let elements = basis(g, &rel.source, &rel.target);
        let count = elements.len();
        let nonzero = elements.into_iter().filter_map(|(p, q)| diff.get(&p, &q).filter(|x| !x.is_zero()).cloned().map(|x| ((p, q), x))).collect();
        out.push((rel.name.clone(), count, nonzero));
    }
    Ok(out)
}

impl PolySystem {
    pub fn var_count(&self) -> usize {
        self.vars.len()
    }

    pub fn max_degree(&self) -> usize {
        self.equations.iter().map(Equation::degree).max().unwrap_or(0)
    }

    pub fn count(&self, relation: &str) -> Option<usize> {
        self.counts.iter().find(|(n, _)| n == relation).map(|(_, c)| *c)
    }

    /// Residual vector at a real assignment.
    pub fn residuals(&self, x: &[f64]) -> Vec<f64> {
        self.equations.iter().map(|e| eval_terms(&e.terms, x)).collect()
    }

    /// Real variables read off a Hermitian `U`.
    pub fn encode(&self, u: &Morphism<Complex64>) -> Vec<f64> {
        self.vars
            .iter()
            .map(|v| {
                let c = u.get(&v.key.0, &v.key.1).copied().unwrap_or_default();
                if v.part == Part::Re {
                    c.re
                } else {
                    c.im
                }
            })
            .collect()
    }

    /// The full `U` for a real assignment, pinned entries included.
    pub fn decode(&self, x: &[f64]) -> Result<Morphism<Complex64>, ArithError> {
        let mut entries: BTreeMap<Key, Complex64> = BTreeMap::new();
        for (v, val) in self.vars.iter().zip(x) {
            let e = entries.entry(v.key.clone()).or_default();
            match v.part {
                Part::Re => e.re = *val,
                Part::Im => e.im = *val,
            }
        }
        let offdiag: Vec<(Key, Complex64)> = entries.iter().filter(|(k, _)| k.0 != k.1).map(|(k, c)| (k.clone(), *c)).collect();
        for ((p, q), c) in offdiag {
            entries.insert((q, p), c.conj());
        }
        for (k, e) in &self.pinned {
            let (re, im) = e.to_c64()?;
            entries.insert(k.clone(), Complex64::new(re, im));
        }
        Ok(Morphism { source: pp(), target: pp(), entries })
    }
}

pub(crate) fn eval_terms(terms: &[(Mono, f64)], x: &[f64]) -> f64 {
    terms.iter().map(|(m, c)| m.vars().fold(*c, |acc, v| acc * x[v as usize])).sum()
}

/// Gauge-invariant magnitudes `|U_{p,q}|`, sorted ascending, with values
/// closer than `merge` collapsed to one.
pub fn distinct_magnitudes(u: &Morphism<Complex64>, merge: f64) -> Vec<f64> {
    let mut v: Vec<f64> = u.entries.values().map(|c| c.norm()).collect();
    v.sort_by(|a, b| a.total_cmp(b));
    let mut out: Vec<f64> = Vec::new();
    for x in v {
        match out.last() {
            Some(&l) if x - l < merge => {}
            _ => out.push(if x < merge { 0.0 } else { x }),
        }
    }
    out
}

/// Eigenvalues of the Hermitian block of `u` between vertex ids `v1` and `v2`.
pub fn block_spectrum(g: &OrientedGraph, u: &Morphism<Complex64>, v1: u32, v2: u32) -> Result<Vec<f64>, SolverError> {
    let b = crate::cells::block(g, u, Complex64::default(), v1, v2).map_err(|e| SolverError::NotCellType(e.to_string()))?;
    let n = b.size();
    let m = nalgebra::DMatrix::from_fn(n, n, |i, j| b.matrix[i][j]);
    let mut ev: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| a.total_cmp(b));
    Ok(ev)
}
