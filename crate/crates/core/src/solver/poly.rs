//! Sparse polynomials of degree at most 3 with coefficients from a [`Field`].

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::arith::{ArithError, QExpr};
use crate::gpa::Field;

pub type Var = u32;

const NONE: Var = Var::MAX;

/// A monomial of degree at most 3; variable slots sorted, unused slots last.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Mono([Var; 3]);

impl Mono {
    pub const ONE: Mono = Mono([NONE; 3]);

    pub fn var(v: Var) -> Mono {
        Mono([v, NONE, NONE])
    }

    pub fn degree(&self) -> usize {
        self.0.iter().filter(|&&v| v != NONE).count()
    }

    pub fn vars(&self) -> impl Iterator<Item = Var> + '_ {
        self.0.iter().copied().filter(|&v| v != NONE)
    }

    pub fn mul(&self, o: &Mono) -> Mono {
        let mut all: Vec<Var> = self.vars().chain(o.vars()).collect();
        assert!(all.len() <= 3, "monomial degree exceeds 3");
        all.sort_unstable();
        all.resize(3, NONE);
        Mono([all[0], all[1], all[2]])
    }

    fn from_vars(mut vs: Vec<Var>) -> Mono {
        vs.sort_unstable();
        vs.resize(3, NONE);
        Mono([vs[0], vs[1], vs[2]])
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Poly<C> {
    /// Sorted by monomial, no structurally zero coefficients.
    pub terms: Vec<(Mono, C)>,
}

impl<C> Poly<C> {
    pub fn zero() -> Self {
        Poly { terms: Vec::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.terms.iter().map(|(m, _)| m.degree()).max().unwrap_or(0)
    }

    pub fn vars(&self) -> Vec<Var> {
        let mut v: Vec<Var> = self.terms.iter().flat_map(|(m, _)| m.vars().collect::<Vec<_>>()).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    pub fn constant_term(&self) -> Option<&C> {
        self.terms.iter().find(|(m, _)| *m == Mono::ONE).map(|(_, c)| c)
    }

    pub fn coeff(&self, m: &Mono) -> Option<&C> {
        self.terms.binary_search_by(|(k, _)| k.cmp(m)).ok().map(|i| &self.terms[i].1)
    }
}

/// Polynomial ring over `base`, optionally with an involution on variables
/// used by `conj` (for complex variables paired with their conjugates).
#[derive(Clone, Debug)]
pub struct PolyField<F> {
    pub base: F,
    pub conj_vars: Option<Arc<Vec<Var>>>,
}

impl<F: Field> PolyField<F> {
    pub fn new(base: F) -> Self {
        PolyField { base, conj_vars: None }
    }

    pub fn with_conjugation(base: F, map: Vec<Var>) -> Self {
        PolyField { base, conj_vars: Some(Arc::new(map)) }
    }

    pub fn var(&self, v: Var) -> Poly<F::Elem> {
        Poly { terms: vec![(Mono::var(v), self.base.one())] }
    }

    pub fn constant(&self, c: F::Elem) -> Poly<F::Elem> {
        if self.base.is_zero(&c) {
            Poly::zero()
        } else {
            Poly { terms: vec![(Mono::ONE, c)] }
        }
    }

    fn collect(&self, acc: BTreeMap<Mono, F::Elem>) -> Poly<F::Elem> {
        Poly { terms: acc.into_iter().filter(|(_, c)| !self.base.is_zero(c)).collect() }
    }

    /// Substitute values for some variables; the rest stay symbolic.
    pub fn substitute(&self, p: &Poly<F::Elem>, value: impl Fn(Var) -> Option<F::Elem>) -> Poly<F::Elem> {
        let mut acc: BTreeMap<Mono, F::Elem> = BTreeMap::new();
        for (m, c) in &p.terms {
            let mut coeff = c.clone();
            let mut rest = Vec::new();
            for v in m.vars() {
                match value(v) {
                    Some(x) => coeff = self.base.mul(&coeff, &x),
                    None => rest.push(v),
                }
            }
            let key = Mono::from_vars(rest);
            let next = match acc.remove(&key) {
                Some(old) => self.base.add(&old, &coeff),
                None => coeff,
            };
            acc.insert(key, next);
        }
        self.collect(acc)
    }
}

impl<F: Field> Field for PolyField<F> {
    type Elem = Poly<F::Elem>;

    fn zero(&self) -> Self::Elem {
        Poly::zero()
    }

    fn one(&self) -> Self::Elem {
        self.constant(self.base.one())
    }

    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        let mut out = Vec::with_capacity(a.terms.len() + b.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < a.terms.len() && j < b.terms.len() {
            let (ma, ca) = &a.terms[i];
            let (mb, cb) = &b.terms[j];
            match ma.cmp(mb) {
                std::cmp::Ordering::Less => {
                    out.push((*ma, ca.clone()));
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push((*mb, cb.clone()));
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let s = self.base.add(ca, cb);
                    if !self.base.is_zero(&s) {
                        out.push((*ma, s));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a.terms[i..]);
        out.extend_from_slice(&b.terms[j..]);
        Poly { terms: out }
    }

    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        if a.is_zero() || b.is_zero() {
            return Poly::zero();
        }
        let mut acc: BTreeMap<Mono, F::Elem> = BTreeMap::new();
        for (ma, ca) in &a.terms {
            for (mb, cb) in &b.terms {
                let m = ma.mul(mb);
                let c = self.base.mul(ca, cb);
                let next = match acc.remove(&m) {
                    Some(old) => self.base.add(&old, &c),
                    None => c,
                };
                acc.insert(m, next);
            }
        }
        self.collect(acc)
    }

    fn neg(&self, a: &Self::Elem) -> Self::Elem {
        Poly { terms: a.terms.iter().map(|(m, c)| (*m, self.base.neg(c))).collect() }
    }

    fn conj(&self, a: &Self::Elem) -> Self::Elem {
        match &self.conj_vars {
            None => Poly { terms: a.terms.iter().map(|(m, c)| (*m, self.base.conj(c))).collect() },
            Some(map) => {
                let mut acc: BTreeMap<Mono, F::Elem> = BTreeMap::new();
                for (m, c) in &a.terms {
                    let key = Mono::from_vars(m.vars().map(|v| map[v as usize]).collect());
                    let c = self.base.conj(c);
                    let next = match acc.remove(&key) {
                        Some(old) => self.base.add(&old, &c),
                        None => c,
                    };
                    acc.insert(key, next);
                }
                self.collect(acc)
            }
        }
    }

    fn is_zero(&self, a: &Self::Elem) -> bool {
        a.is_zero()
    }

    fn from_qexpr(&self, e: &QExpr) -> Result<Self::Elem, ArithError> {
        Ok(self.constant(self.base.from_qexpr(e)?))
    }
}
