//! Exact completion of a partial `U` from the equations that become linear.

use std::collections::BTreeMap;

use crate::arith::{int, tolerance, ArithError, QExpr, Scalar};
use crate::gpa::{basis, Exact, Field, Key, Morphism};
use crate::graph::SignString;

use super::poly::{Mono, Poly, PolyField, Var};
use super::{relation_differences, PolySystem, SolverError};

const PREC: u32 = 256;

/// A closed-form value together with its enclosure at a fixed precision.
#[derive(Clone, Debug)]
pub struct Tracked {
    pub expr: QExpr,
    pub ball: Scalar,
}

/// Exact arithmetic whose zero test reads the enclosure: a value certified
/// below `2^-100` counts as zero.
#[derive(Clone, Copy, Debug)]
pub struct TrackedField {
    pub precision: u32,
}

impl Field for TrackedField {
    type Elem = Tracked;

    fn zero(&self) -> Tracked {
        Tracked { expr: int(0), ball: Scalar::zero(self.precision) }
    }

    fn one(&self) -> Tracked {
        Tracked { expr: int(1), ball: Scalar::one(self.precision) }
    }

    fn add(&self, a: &Tracked, b: &Tracked) -> Tracked {
        Tracked { expr: Exact.add(&a.expr, &b.expr), ball: a.ball.add(&b.ball) }
    }

    fn mul(&self, a: &Tracked, b: &Tracked) -> Tracked {
        Tracked { expr: Exact.mul(&a.expr, &b.expr), ball: a.ball.mul(&b.ball) }
    }

    fn neg(&self, a: &Tracked) -> Tracked {
        Tracked { expr: Exact.neg(&a.expr), ball: a.ball.neg() }
    }

    fn conj(&self, a: &Tracked) -> Tracked {
        Tracked { expr: Exact.conj(&a.expr), ball: a.ball.conj() }
    }

    fn is_zero(&self, a: &Tracked) -> bool {
        a.expr.is_zero_literal() || a.ball.certifies_zero(tolerance(100))
    }

    fn from_qexpr(&self, e: &QExpr) -> Result<Tracked, ArithError> {
        Ok(Tracked { expr: e.clone(), ball: e.eval(self.precision)? })
    }
}

impl TrackedField {
    fn div(&self, a: &Tracked, b: &Tracked) -> Result<Tracked, ArithError> {
        if a.expr.is_zero_literal() {
            return Ok(self.zero());
        }
        Ok(Tracked { expr: a.expr.clone() / b.expr.clone(), ball: a.ball.div(&b.ball)? })
    }

    fn sqrt(&self, a: &Tracked) -> Result<Tracked, ArithError> {
        Ok(Tracked { expr: a.expr.clone().sqrt(), ball: a.ball.sqrt()? })
    }
}

/// A completed `U` and how each unknown was obtained.
#[derive(Clone, Debug)]
pub struct Completion {
    pub u: Morphism<QExpr>,
    /// Entries solved from a linear equation, in solving order.
    pub solved: Vec<Key>,
    /// Entries whose phase was free and set to 1.
    pub pinned_phases: Vec<Key>,
    pub rounds: usize,
}

#[derive(Clone, Debug)]
struct Unknown {
    key: Key,
    var: Var,
    /// The conjugate's variable; equal to `var` on the diagonal.
    conj: Var,
}

fn canonical(k: &Key) -> (Key, bool) {
    if k.0 <= k.1 {
        (k.clone(), false)
    } else {
        ((k.1.clone(), k.0.clone()), true)
    }
}

/// Fill in every entry of `U` not given in `partial` (or pinned in `sys`).
///
/// Equations of `(R1)`, `(Hecke)` and `(R3)` that are linear in a single
/// remaining unknown are solved exactly, with the pivot certified nonzero;
/// when none is left, an unknown whose equation only fixes its modulus gets
/// phase 1. Every relation is verified at the end.
pub fn complete_linear(partial: &BTreeMap<Key, QExpr>, sys: &PolySystem) -> Result<Completion, SolverError> {
    let g = &sys.graph;
    let tf = TrackedField { precision: PREC };
    let pp: SignString = "++".parse().expect("sign string");
    let mut known: BTreeMap<Key, QExpr> = BTreeMap::new();
    for (k, v) in partial.iter().chain(&sys.pinned) {
        let (ck, swapped) = canonical(k);
        known.insert(ck, if swapped { v.clone().conj() } else { v.clone() });
    }

    let mut unknowns: Vec<Unknown> = Vec::new();
    let mut map: Vec<Var> = Vec::new();
    for (p, q) in basis(g, &pp, &pp) {
        if p > q || known.contains_key(&(p.clone(), q.clone())) {
            continue;
        }
        let v = map.len() as Var;
        if p == q {
            map.push(v);
            unknowns.push(Unknown { key: (p, q), var: v, conj: v });
        } else {
            map.extend([v + 1, v]);
            unknowns.push(Unknown { key: (p, q), var: v, conj: v + 1 });
        }
    }
    let fld = PolyField::with_conjugation(tf, map.clone());
    let by_key: BTreeMap<Key, &Unknown> = unknowns.iter().map(|u| (u.key.clone(), u)).collect();
    let mut entries = BTreeMap::new();
    for (p, q) in basis(g, &pp, &pp) {
        let (ck, swapped) = canonical(&(p.clone(), q.clone()));
        let val = match (known.get(&ck), by_key.get(&ck)) {
            (Some(e), _) => fld.constant(tf.from_qexpr(&if swapped { e.clone().conj() } else { e.clone() })?),
            (None, Some(u)) => fld.var(if swapped { u.conj } else { u.var }),
            (None, None) => unreachable!("every pair is known or unknown"),
        };
        entries.insert((p, q), val);
    }
    let u = Morphism { source: pp.clone(), target: pp.clone(), entries };
    let mut eqs: Vec<(String, Key, Poly<Tracked>)> = Vec::new();
    for (name, _, diffs) in relation_differences(&fld, g, &sys.relations, u)? {
        for (k, p) in diffs {
            eqs.push((name.clone(), k, p));
        }
    }

    let mut value: Vec<Option<Tracked>> = vec![None; map.len()];
    let mut solved = Vec::new();
    let mut pinned_phases = Vec::new();
    let mut rounds = 0;
    let inconsistent = |name: &str, k: &Key, b: &Scalar| SolverError::Inconsistent {
        relation: name.to_string(),
        element: format!("{} -> {}", g.show_path(&k.0), g.show_path(&k.1)),
        residual: b.abs_upper(),
    };
    loop {
        rounds += 1;
        let mut progress = false;
        for (name, k, p) in eqs.iter_mut() {
            *p = fld.substitute(p, |v| value[v as usize].clone());
            if p.is_zero() {
                continue;
            }
            let vars = p.vars();
            if vars.is_empty() {
                let c = p.constant_term().expect("nonzero constant");
                if c.ball.excludes_zero() {
                    return Err(inconsistent(name, k, &c.ball));
                }
                continue;
            }
            if vars.len() != 1 || p.degree() != 1 || value[vars[0] as usize].is_some() {
                continue;
            }
            let v = vars[0];
            let c = p.coeff(&Mono::var(v)).expect("linear term");
            if !c.ball.excludes_zero() {
                continue;
            }
            let d = p.constant_term().cloned().unwrap_or_else(|| tf.zero());
            let x = tf.neg(&tf.div(&d, c)?);
            let unk = unknowns.iter().find(|u| u.var == v || u.conj == v).expect("variable of an unknown");
            let (xv, xc) = if unk.var == v { (x.clone(), tf.conj(&x)) } else { (tf.conj(&x), x) };
            value[unk.var as usize] = Some(xv);
            value[unk.conj as usize] = Some(xc);
            solved.push(unk.key.clone());
            progress = true;
            *p = fld.substitute(p, |w| value[w as usize].clone());
        }
        if progress {
            continue;
        }
        // a modulus-only equation a·u·ū + d = 0 leaves a free phase
        let mut pinned = false;
        for (_, _, p) in &eqs {
            let vars = p.vars();
            let Some(unk) = unknowns.iter().find(|u| u.var != u.conj && vars == [u.var, u.conj]) else { continue };
            let m = Mono::var(unk.var).mul(&Mono::var(unk.conj));
            if p.terms.iter().any(|(mono, _)| *mono != m && *mono != Mono::ONE) {
                continue;
            }
            let a = p.coeff(&m).expect("quadratic term");
            let d = p.constant_term().cloned().unwrap_or_else(|| tf.zero());
            let r2 = tf.neg(&tf.div(&d, a)?);
            if !(r2.ball.excludes_zero() && r2.ball.to_c64().0 > 0.0) {
                continue;
            }
            let x = tf.sqrt(&r2)?;
            value[unk.var as usize] = Some(x.clone());
            value[unk.conj as usize] = Some(x);
            pinned_phases.push(unk.key.clone());
            pinned = true;
            break;
        }
        if !pinned {
            break;
        }
    }

    let left: Vec<&Unknown> = unknowns.iter().filter(|u| value[u.var as usize].is_none()).collect();
    if !left.is_empty() {
        return Err(SolverError::Underdetermined { unknowns: left.len(), nullity: nullity(&eqs, &left) });
    }
    for (name, k, p) in &eqs {
        if let Some(c) = p.constant_term() {
            if !c.ball.certifies_zero(tolerance(100)) {
                return Err(inconsistent(name, k, &c.ball));
            }
        }
    }

    let mut out = BTreeMap::new();
    for (p, q) in basis(g, &pp, &pp) {
        let (ck, swapped) = canonical(&(p.clone(), q.clone()));
        let e = match known.get(&ck) {
            Some(e) => e.clone(),
            None => value[by_key[&ck].var as usize].as_ref().expect("all solved").expr.clone(),
        };
        out.insert((p, q), if swapped { Exact.conj(&e) } else { e });
    }
    Ok(Completion { u: Morphism { source: pp.clone(), target: pp, entries: out }, solved, pinned_phases, rounds })
}

/// Dimension of the kernel of the linear parts of the remaining equations,
/// with `u` and `ū` counted as separate coordinates.
fn nullity(eqs: &[(String, Key, Poly<Tracked>)], left: &[&Unknown]) -> usize {
    let cols: Vec<Var> = left.iter().flat_map(|u| if u.var == u.conj { vec![u.var] } else { vec![u.var, u.conj] }).collect();
    let rows: Vec<Vec<num_complex::Complex64>> = eqs
        .iter()
        .map(|(_, _, p)| {
            cols.iter()
                .map(|&v| {
                    p.coeff(&Mono::var(v)).map_or_else(num_complex::Complex64::default, |c| {
                        let (re, im) = c.ball.to_c64();
                        num_complex::Complex64::new(re, im)
                    })
                })
                .collect()
        })
        .filter(|r: &Vec<num_complex::Complex64>| r.iter().any(|c| c.norm() > 1e-12))
        .collect();
    if rows.is_empty() {
        return cols.len();
    }
    let m = nalgebra::DMatrix::from_fn(rows.len(), cols.len(), |i, j| rows[i][j]);
    cols.len() - m.rank(1e-9).min(cols.len())
}
