//! Recovering `W` from `U = W W†`, and comparing cell systems up to gauge.

use std::collections::{BTreeMap, VecDeque};

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::arith::{int, tolerance, QExpr, Real, Scalar};
use crate::cells::{build_u, triangles, CellSystem, Triangle};
use crate::gpa::{sub, Exact, Morphism};
use crate::graph::OrientedGraph;

use super::SolverError;

const PREC: u32 = 256;

fn not_cell(msg: impl Into<String>) -> SolverError {
    SolverError::NotCellType(msg.into())
}

fn ball(e: &QExpr) -> Result<Scalar, SolverError> {
    Ok(e.eval(PREC)?)
}

fn times(a: &QExpr, b: &QExpr) -> QExpr {
    if *a == int(1) {
        b.clone()
    } else if *b == int(1) {
        a.clone()
    } else {
        a.clone() * b.clone()
    }
}

/// Phased rank-one weights, then the triangles closing on parallel edges by rotation.
fn assemble(g: &OrientedGraph, tris: &[Triangle], w0: &BTreeMap<Triangle, Option<QExpr>>, psi: &[QExpr]) -> Result<CellSystem, SolverError> {
    let mut weights = BTreeMap::new();
    for t in tris {
        if let Some(v) = w0.get(t) {
            let w = match v {
                None => int(0),
                Some(v) => times(&psi[t.ca], v),
            };
            weights.insert(*t, w);
        }
    }
    for t in tris {
        if weights.contains_key(t) {
            continue;
        }
        let s = t.rotated().rotated();
        let (_, b, c) = s.vertices(g);
        let ws = weights.get(&s).ok_or_else(|| not_cell(format!("two parallel edges in {}", t.show(g))))?;
        let w = if ws.is_zero_literal() { int(0) } else { g.fp_ratio_sqrt(c, b) * ws.clone() };
        weights.insert(*t, w);
    }
    Ok(CellSystem { graph: g.clone(), generators: weights.keys().copied().collect(), weights })
}

/// A cell system `W` with `build_u(W) = u`.
///
/// On each block `(a, c)` with a single edge `c -> a` the matrix of `u` has
/// rank one, which gives `W` on that block up to one phase per edge. The
/// rotation rule ties those phases together within clusters of edges,
/// triangles closing on a parallel edge are filled by rotation, and the
/// relative cluster phases are read off the blocks of higher rank. The
/// result is certified by rebuilding `U` and checking rotation.
pub fn derive_w(g: &OrientedGraph, u: &Morphism<QExpr>) -> Result<CellSystem, SolverError> {
    if u.source.to_string() != "++" || u.target.to_string() != "++" {
        return Err(not_cell(format!("expected ++ -> ++, got {}", u.type_string())));
    }
    let tau = tolerance(100);
    let parallel: Vec<usize> = g.parallel_families().concat();
    let tris = triangles(g);

    // unphased weights on rank-one blocks
    let mut w0: BTreeMap<Triangle, Option<QExpr>> = BTreeMap::new();
    let mut by_block: BTreeMap<(usize, usize, usize), Vec<Triangle>> = BTreeMap::new();
    for t in &tris {
        if !parallel.contains(&t.ca) {
            let (a, _, c) = t.vertices(g);
            by_block.entry((a, c, t.ca)).or_default().push(*t);
        }
    }
    for ts in by_block.values() {
        let q: Vec<_> = ts.iter().map(|t| t.key(g).1).collect();
        let entry = |i: usize, j: usize| u.get(&q[i], &q[j]).cloned().unwrap_or_else(|| int(0));
        let mut best = None;
        for i in 0..q.len() {
            let d = ball(&entry(i, i))?;
            if d.excludes_zero() && best.as_ref().is_none_or(|(_, b): &(usize, f64)| d.abs_lower() > *b) {
                best = Some((i, d.abs_lower()));
            }
        }
        match best {
            None => {
                for t in ts {
                    w0.insert(*t, None);
                }
            }
            Some((i0, _)) => {
                let norm = entry(i0, i0).sqrt();
                for (j, t) in ts.iter().enumerate() {
                    let e = entry(i0, j);
                    let v = if ball(&e)?.certifies_zero(tau) { None } else { Some(e / norm.clone()) };
                    w0.insert(*t, v);
                }
            }
        }
    }

    // one phase per closing edge, propagated through W(rot t) = k(t) W(t)
    let mut links: Vec<Vec<(usize, QExpr)>> = vec![Vec::new(); g.edge_count()];
    for t in &tris {
        let r = t.rotated();
        let (Some(Some(x)), Some(Some(y))) = (w0.get(t), w0.get(&r)) else {
            if let (Some(a), Some(b)) = (w0.get(t), w0.get(&r)) {
                if a.is_some() != b.is_some() {
                    return Err(not_cell(format!("rotation pairs zero with nonzero at {}", t.show(g))));
                }
            }
            continue;
        };
        let (_, b, c) = t.vertices(g);
        // psi[t.ab] = psi[t.ca] · f
        let f = g.fp_ratio_sqrt(c, b) * x.clone() / y.clone();
        let fb = ball(&f)?;
        if fb.norm_sqr().sub(&Real::from_int(1, PREC)).abs_upper() >= tau {
            return Err(not_cell(format!("rotation ratio off the unit circle at {}", t.show(g))));
        }
        links[t.ca].push((t.ab, f.clone()));
        links[t.ab].push((t.ca, f.conj()));
    }
    let mut psi: Vec<QExpr> = vec![int(1); g.edge_count()];
    let mut comp: Vec<Option<usize>> = vec![None; g.edge_count()];
    for root in 0..g.edge_count() {
        if comp[root].is_some() {
            continue;
        }
        comp[root] = Some(root);
        let mut queue = VecDeque::from([root]);
        while let Some(e) = queue.pop_front() {
            for (n, f) in &links[e] {
                if comp[*n].is_none() {
                    comp[*n] = Some(root);
                    psi[*n] = times(&psi[e], f);
                    queue.push_back(*n);
                }
            }
        }
    }
    let comp: Vec<usize> = comp.into_iter().map(|c| c.expect("every edge visited")).collect();

    let first = assemble(g, &tris, &w0, &psi)?;
    // rotation leaves one phase per cluster of linked edges; blocks of
    // rank two or more see their relative phases
    let rebuilt = build_u(&first);
    let mut chi: BTreeMap<usize, QExpr> = BTreeMap::new();
    let mut rel: Vec<(usize, usize, QExpr)> = Vec::new();
    for ((q1, q2), v) in &rebuilt.entries {
        let (a, c) = (q1.start(), q1.end());
        if q1 == q2 || g.edges_between(c, a).len() < 2 {
            continue;
        }
        let want = u.get(q1, q2).cloned().unwrap_or_else(|| int(0));
        let (bw, bv) = (ball(&want)?, ball(v)?);
        if !(bw.excludes_zero() && bv.excludes_zero()) {
            continue;
        }
        let rho = want / v.clone();
        let rho = if ball(&rho)?.sub(&Scalar::one(PREC)).certifies_zero(tau) { int(1) } else { rho };
        rel.push((comp[q1.steps()[1].edge as usize], comp[q2.steps()[1].edge as usize], rho));
    }
    loop {
        let before = chi.len();
        for (c1, c2, rho) in &rel {
            match (chi.get(c1).cloned(), chi.get(c2).cloned()) {
                (Some(x), None) => {
                    chi.insert(*c2, times(&x, rho));
                }
                (None, Some(y)) => {
                    chi.insert(*c1, times(&y, &rho.clone().conj()));
                }
                _ => {}
            }
        }
        if chi.len() == before {
            match rel.iter().find(|(c1, _, _)| !chi.contains_key(c1)) {
                Some((c1, _, _)) => {
                    chi.insert(*c1, int(1));
                }
                None => break,
            }
        }
    }
    let cs = if chi.values().all(|x| *x == int(1)) {
        first
    } else {
        for (e, p) in psi.iter_mut().enumerate() {
            if let Some(x) = chi.get(&comp[e]) {
                *p = times(p, x);
            }
        }
        assemble(g, &tris, &w0, &psi)?
    };

    cs.check_closure(PREC, tau).map_err(|e| not_cell(e.to_string()))?;
    let rebuilt = build_u(&cs);
    let diff = sub(&Exact, &rebuilt, u)?;
    let worst = diff.eval(PREC)?.max_abs_upper();
    if worst >= tau {
        return Err(not_cell(format!("W W† differs from U by {worst:.3e}")));
    }
    Ok(cs)
}

/// Result of comparing two cell systems on the same graph up to edge phases.
#[derive(Clone, Debug, Serialize)]
pub struct GaugeComparison {
    pub triangles: usize,
    /// Largest certified `| |w2|² - |w1|² |` over triangles.
    pub magnitude_defect: f64,
    /// Independent gauge-invariant cycles checked.
    pub cycles: usize,
    /// Largest certified `|Π (w2/w1)^m - 1|` over those cycles.
    pub cycle_defect: f64,
    pub equivalent: bool,
}

/// Integer basis of `{m : Σ m_t A_t = 0}`, `A` the triangle-edge incidence.
fn cycle_basis(rows: &[Vec<i64>], cols: usize) -> Vec<Vec<i64>> {
    // nullspace of Aᵀ by reduced row echelon form
    let n = rows.len();
    let mut m: Vec<Vec<BigRational>> = (0..cols).map(|e| rows.iter().map(|r| BigRational::from_integer(r[e].into())).collect()).collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..n {
        let Some(p) = (row..cols).find(|&i| !m[i][col].is_zero()) else { continue };
        m.swap(row, p);
        let inv = m[row][col].recip();
        for x in m[row].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..cols {
            if i != row && !m[i][col].is_zero() {
                let f = m[i][col].clone();
                for j in 0..n {
                    let d = &f * &m[row][j];
                    m[i][j] -= d;
                }
            }
        }
        pivots.push(col);
        row += 1;
        if row == cols {
            break;
        }
    }
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![BigRational::zero(); n];
            v[f] = BigRational::one();
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = -m[r][f].clone();
            }
            let lcm = v.iter().fold(num_bigint::BigInt::one(), |acc, x| num_integer::Integer::lcm(&acc, x.denom()));
            v.iter()
                .map(|x| {
                    let y = x * BigRational::from_integer(lcm.clone());
                    i64::try_from(y.to_integer()).expect("small cycle coefficients")
                })
                .collect()
        })
        .collect()
}

/// Whether `w2` is a gauge transform of `w1`, i.e. `w2_t = φ_ab φ_bc φ_ca w1_t`
/// for some unit phases `φ`.
///
/// Magnitudes must agree and every integer relation among triangle
/// characters must hold for the ratios `w2_t / w1_t`.
pub fn gauge_equivalent(w1: &CellSystem, w2: &CellSystem) -> Result<GaugeComparison, SolverError> {
    let g = &w1.graph;
    let tau = tolerance(100);
    let mut magnitude_defect = 0f64;
    let mut ratios = Vec::new();
    let mut rows = Vec::new();
    for t in triangles(g) {
        let a = ball(w1.weights.get(&t).unwrap_or(&int(0)))?;
        let b = ball(w2.weights.get(&t).unwrap_or(&int(0)))?;
        magnitude_defect = magnitude_defect.max(b.norm_sqr().sub(&a.norm_sqr()).abs_upper());
        if a.excludes_zero() {
            ratios.push(b.div(&a)?);
            let mut r = vec![0i64; g.edge_count()];
            for e in [t.ab, t.bc, t.ca] {
                r[e] += 1;
            }
            rows.push(r);
        }
    }
    let basis = cycle_basis(&rows, g.edge_count());
    let mut cycle_defect = 0f64;
    for m in &basis {
        let mut acc = Scalar::one(PREC);
        for (r, &k) in ratios.iter().zip(m) {
            if k != 0 {
                acc = acc.mul(&r.powi(k)?);
            }
        }
        cycle_defect = cycle_defect.max(acc.sub(&Scalar::one(PREC)).abs_upper());
    }
    Ok(GaugeComparison {
        triangles: ratios.len(),
        magnitude_defect,
        cycles: basis.len(),
        cycle_defect,
        equivalent: magnitude_defect < tau && cycle_defect < tau,
    })
}
