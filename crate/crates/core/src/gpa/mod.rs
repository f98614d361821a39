//! The oriented graph planar algebra: morphisms are sparse combinations of
//! endpoint-matched path pairs `(source path, target path)`.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use crate::arith::{ArithError, QExpr, Scalar};
use crate::graph::{OrientedGraph, Path, Sign, SignString, Step};

mod diagram;
mod field;
mod json;

pub use diagram::{parse_diagram, Binding, DiagramExpr, DiagramFile, Relation};
pub use field::{Balls, Exact, Field, Floats};
pub use json::{MorphismJson, PairJson};

#[derive(Debug, thiserror::Error)]
pub enum GpaError {
    #[error("type mismatch in {context}: {detail}")]
    Type { context: String, detail: String },
    #[error("unbound generator {0}")]
    Unbound(String),
    #[error("diagram parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("invalid path pair ({0})")]
    BadPair(String),
    #[error(transparent)]
    Arith(#[from] ArithError),
}

pub type Key = (Path, Path);

/// An element of `Hom(source -> target)`, keyed by `(source path, target path)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Morphism<E> {
    pub source: SignString,
    pub target: SignString,
    pub entries: BTreeMap<Key, E>,
}

impl<E> Morphism<E> {
    pub fn zero(source: SignString, target: SignString) -> Self {
        Morphism { source, target, entries: BTreeMap::new() }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, p: &Path, q: &Path) -> Option<&E> {
        self.entries.get(&(p.clone(), q.clone()))
    }

    pub fn type_string(&self) -> String {
        format!("{} -> {}", show(&self.source), show(&self.target))
    }

    /// Apply `f` to every coefficient.
    pub fn map<F: Field>(&self, f: impl Fn(&E) -> Result<F::Elem, ArithError>) -> Result<Morphism<F::Elem>, ArithError> {
        let entries = self
            .entries
            .iter()
            .map(|(k, v)| Ok((k.clone(), f(v)?)))
            .collect::<Result<_, ArithError>>()?;
        Ok(Morphism { source: self.source.clone(), target: self.target.clone(), entries })
    }

    /// Check that every key is a well-typed path pair for this Hom space.
    pub fn check_keys(&self) -> Result<(), GpaError> {
        for (p, q) in self.entries.keys() {
            if p.signs() != self.source || q.signs() != self.target || p.start() != q.start() || p.end() != q.end() {
                return Err(GpaError::BadPair(format!("{p:?}, {q:?}")));
            }
        }
        Ok(())
    }
}

impl Morphism<QExpr> {
    pub fn eval(&self, prec: u32) -> Result<Morphism<Scalar>, ArithError> {
        self.map::<Balls>(|e| e.eval(prec))
    }

    pub fn to_c64(&self) -> Result<Morphism<Complex64>, ArithError> {
        self.map::<Floats>(|e| e.to_c64().map(|(re, im)| Complex64::new(re, im)))
    }
}

impl Morphism<Scalar> {
    /// Entry of largest modulus bound; `None` for the zero morphism.
    pub fn worst_entry(&self) -> Option<(&Key, &Scalar)> {
        self.entries.iter().max_by(|a, b| a.1.abs_upper().total_cmp(&b.1.abs_upper()))
    }

    pub fn max_abs_upper(&self) -> f64 {
        self.worst_entry().map_or(0.0, |(_, v)| v.abs_upper())
    }

    pub fn to_c64(&self) -> Morphism<Complex64> {
        let entries = self.entries.iter().map(|(k, v)| {
            let (re, im) = v.to_c64();
            (k.clone(), Complex64::new(re, im))
        });
        Morphism { source: self.source.clone(), target: self.target.clone(), entries: entries.collect() }
    }
}

impl Morphism<Complex64> {
    pub fn max_abs(&self) -> f64 {
        self.entries.values().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn to_balls(&self, prec: u32) -> Morphism<Scalar> {
        let entries = self.entries.iter().map(|(k, v)| (k.clone(), Scalar::from_c64(v.re, v.im, prec)));
        Morphism { source: self.source.clone(), target: self.target.clone(), entries: entries.collect() }
    }
}

fn show(s: &SignString) -> String {
    if s.is_empty() {
        "1".to_string()
    } else {
        s.to_string()
    }
}

fn mismatch(context: &str, detail: String) -> GpaError {
    GpaError::Type { context: context.to_string(), detail }
}

/// All basis pairs of `Hom(s -> t)` in lexicographic order.
pub fn basis(g: &OrientedGraph, s: &SignString, t: &SignString) -> Vec<Key> {
    let src = g.paths_by_ends(s);
    let tgt = g.paths_by_ends(t);
    let mut out = Vec::new();
    for (ends, ps) in &src {
        if let Some(qs) = tgt.get(ends) {
            for p in ps {
                for q in qs {
                    out.push((p.clone(), q.clone()));
                }
            }
        }
    }
    out.sort();
    out
}

pub fn hom_dim(g: &OrientedGraph, s: &SignString, t: &SignString) -> usize {
    g.hom_dim(s, t)
}

fn accumulate<F: Field>(f: &F, map: &mut BTreeMap<Key, F::Elem>, key: Key, v: F::Elem) {
    match map.get_mut(&key) {
        Some(slot) => *slot = f.add(slot, &v),
        None => {
            map.insert(key, v);
        }
    }
}

/// `g ∘ f`: first `f`, then `g`.
pub fn compose<F: Field>(fld: &F, g: &Morphism<F::Elem>, f: &Morphism<F::Elem>) -> Result<Morphism<F::Elem>, GpaError> {
    if f.target != g.source {
        return Err(mismatch(
            "compose",
            format!("inner morphism has type {} but outer has type {}", f.type_string(), g.type_string()),
        ));
    }
    let mut by_source: BTreeMap<&Path, Vec<(&Path, &F::Elem)>> = BTreeMap::new();
    for ((p, q), c) in &g.entries {
        if !fld.is_zero(c) {
            by_source.entry(p).or_default().push((q, c));
        }
    }
    let mut out = BTreeMap::new();
    for ((p, q), c) in &f.entries {
        if fld.is_zero(c) {
            continue;
        }
        if let Some(list) = by_source.get(q) {
            for (r, c2) in list {
                accumulate(fld, &mut out, (p.clone(), (*r).clone()), fld.mul(c2, c));
            }
        }
    }
    Ok(Morphism { source: f.source.clone(), target: g.target.clone(), entries: out })
}

/// `f ⊗ g`: paths concatenate when endpoints chain.
pub fn tensor<F: Field>(fld: &F, f: &Morphism<F::Elem>, g: &Morphism<F::Elem>) -> Morphism<F::Elem> {
    let mut by_start: BTreeMap<(usize, usize), Vec<(&Key, &F::Elem)>> = BTreeMap::new();
    for (k, c) in &g.entries {
        if !fld.is_zero(c) {
            by_start.entry((k.0.start(), k.1.start())).or_default().push((k, c));
        }
    }
    let mut out = BTreeMap::new();
    for ((p, q), c) in &f.entries {
        if fld.is_zero(c) {
            continue;
        }
        if let Some(list) = by_start.get(&(p.end(), q.end())) {
            for ((p2, q2), c2) in list {
                let key = (p.concat(p2).expect("chained"), q.concat(q2).expect("chained"));
                accumulate(fld, &mut out, key, fld.mul(c, c2));
            }
        }
    }
    Morphism { source: f.source.concat(&g.source), target: f.target.concat(&g.target), entries: out }
}

/// Anti-linear adjoint: `(p, q)† = (q, p)`.
pub fn dagger<F: Field>(fld: &F, f: &Morphism<F::Elem>) -> Morphism<F::Elem> {
    let entries = f.entries.iter().map(|((p, q), c)| ((q.clone(), p.clone()), fld.conj(c))).collect();
    Morphism { source: f.target.clone(), target: f.source.clone(), entries }
}

pub fn scale<F: Field>(fld: &F, s: &F::Elem, f: &Morphism<F::Elem>) -> Morphism<F::Elem> {
    let entries = f.entries.iter().map(|(k, c)| (k.clone(), fld.mul(s, c))).collect();
    Morphism { source: f.source.clone(), target: f.target.clone(), entries }
}

/// Phase of a path under a per-edge gauge: `φ_e` on `+` steps, `conj(φ_e)` on `-` steps.
pub fn path_phase<F: Field>(fld: &F, path: &Path, phases: &[F::Elem]) -> F::Elem {
    path.steps().iter().fold(fld.one(), |acc, st| {
        let ph = &phases[st.edge as usize];
        match st.sign {
            Sign::Plus => fld.mul(&acc, ph),
            Sign::Minus => fld.mul(&acc, &fld.conj(ph)),
        }
    })
}

/// Gauge action of one unit phase per edge: `(p, q) ↦ conj(φ(p))·φ(q)·(p, q)`.
///
/// Commutes with composition, tensor, dagger and the duality maps.
pub fn gauge<F: Field>(fld: &F, f: &Morphism<F::Elem>, phases: &[F::Elem]) -> Morphism<F::Elem> {
    let entries = f
        .entries
        .iter()
        .map(|((p, q), c)| {
            let ph = fld.mul(&fld.conj(&path_phase(fld, p, phases)), &path_phase(fld, q, phases));
            ((p.clone(), q.clone()), fld.mul(&ph, c))
        })
        .collect();
    Morphism { source: f.source.clone(), target: f.target.clone(), entries }
}

/// `a·f + b·g` with scalar weights given as `±1`.
fn combine<F: Field>(fld: &F, f: &Morphism<F::Elem>, g: &Morphism<F::Elem>, negate_g: bool, ctx: &str) -> Result<Morphism<F::Elem>, GpaError> {
    if f.source != g.source || f.target != g.target {
        return Err(mismatch(ctx, format!("{} vs {}", f.type_string(), g.type_string())));
    }
    let mut out = f.entries.clone();
    for (k, c) in &g.entries {
        let c = if negate_g { fld.neg(c) } else { c.clone() };
        accumulate(fld, &mut out, k.clone(), c);
    }
    Ok(Morphism { source: f.source.clone(), target: f.target.clone(), entries: out })
}

pub fn add<F: Field>(fld: &F, f: &Morphism<F::Elem>, g: &Morphism<F::Elem>) -> Result<Morphism<F::Elem>, GpaError> {
    combine(fld, f, g, false, "add")
}

pub fn sub<F: Field>(fld: &F, f: &Morphism<F::Elem>, g: &Morphism<F::Elem>) -> Result<Morphism<F::Elem>, GpaError> {
    combine(fld, f, g, true, "sub")
}

pub fn identity<F: Field>(fld: &F, g: &OrientedGraph, s: &SignString) -> Morphism<F::Elem> {
    let entries = g.paths(s, None, None).into_iter().map(|p| ((p.clone(), p), fld.one())).collect();
    Morphism { source: s.clone(), target: s.clone(), entries }
}

fn pair_paths(g: &OrientedGraph, e: usize, pair: &SignString) -> Result<(usize, Path, usize), GpaError> {
    let (a, b) = g.ends(e);
    let e = e as u32;
    match pair.signs() {
        [Sign::Plus, Sign::Minus] => {
            let p = Path::new(a, vec![Step { to: b as u32, edge: e, sign: Sign::Plus }, Step { to: a as u32, edge: e, sign: Sign::Minus }]);
            Ok((a, p, b))
        }
        [Sign::Minus, Sign::Plus] => {
            let p = Path::new(b, vec![Step { to: a as u32, edge: e, sign: Sign::Minus }, Step { to: b as u32, edge: e, sign: Sign::Plus }]);
            Ok((b, p, a))
        }
        _ => Err(mismatch("ev/coev", format!("pair must be \"+-\" or \"-+\", got \"{pair}\""))),
    }
}

/// Evaluation `pair -> 1`, weighted by `sqrt(lambda_far / lambda_near)`.
pub fn ev<F: Field>(fld: &F, g: &OrientedGraph, pair: &SignString) -> Result<Morphism<F::Elem>, GpaError> {
    let mut entries = BTreeMap::new();
    for e in 0..g.edge_count() {
        let (near, p, far) = pair_paths(g, e, pair)?;
        let w = fld.from_qexpr(&g.fp_ratio_sqrt(far, near))?;
        entries.insert((p, Path::trivial(near)), w);
    }
    Ok(Morphism { source: pair.clone(), target: SignString::unit(), entries })
}

/// Coevaluation `1 -> pair`, weighted as [`ev`].
pub fn coev<F: Field>(fld: &F, g: &OrientedGraph, pair: &SignString) -> Result<Morphism<F::Elem>, GpaError> {
    let mut entries = BTreeMap::new();
    for e in 0..g.edge_count() {
        let (near, p, far) = pair_paths(g, e, pair)?;
        let w = fld.from_qexpr(&g.fp_ratio_sqrt(far, near))?;
        entries.insert((Path::trivial(near), p), w);
    }
    Ok(Morphism { source: SignString::unit(), target: pair.clone(), entries })
}

/// One-click rotation on `Hom(- -> ++)`:
/// `(id_+ ⊗ ((id_+ ⊗ ev_{+-}) ∘ (f ⊗ id_-))) ∘ (coev_{+-} ⊗ id_-)`.
pub fn rotate<F: Field>(fld: &F, g: &OrientedGraph, f: &Morphism<F::Elem>) -> Result<Morphism<F::Elem>, GpaError> {
    let minus: SignString = "-".parse().expect("sign");
    let plus: SignString = "+".parse().expect("sign");
    let pp: SignString = "++".parse().expect("sign");
    if f.source != minus || f.target != pp {
        return Err(mismatch("rotate", format!("expected - -> ++, got {}", f.type_string())));
    }
    let pm: SignString = "+-".parse().expect("sign");
    let id_p = identity(fld, g, &plus);
    let id_m = identity(fld, g, &minus);
    let inner = compose(fld, &tensor(fld, &id_p, &ev(fld, g, &pm)?), &tensor(fld, f, &id_m))?;
    compose(fld, &tensor(fld, &id_p, &inner), &tensor(fld, &coev(fld, g, &pm)?, &id_m))
}

impl<E: fmt::Display> Morphism<E> {
    /// Multi-line listing with human-readable paths.
    pub fn render(&self, g: &OrientedGraph) -> String {
        let mut s = format!("Hom({})  {} entries\n", self.type_string(), self.len());
        for ((p, q), c) in &self.entries {
            s.push_str(&format!("  ({} ; {}) : {}\n", g.show_path(p), g.show_path(q), c));
        }
        s
    }
}

#[cfg(test)]
mod tests;
