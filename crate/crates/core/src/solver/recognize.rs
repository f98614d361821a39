//! Guessing closed forms for positive reals.
//!
//! Entries are built from terms `c · Π [k]^e` with `k ∈ {2,3,4,5}`, `|e| ≤ 2`,
//! at most three quantum-integer factors and `c ∈ {1, 2, 1/2}`, combined in
//! the shapes `T`, `T1(1 + T2)`, `T1 + T2`, the last two optionally minus 1,
//! and square roots of all of these except the `- 1` forms.
//!
//! Complexity counts quantum-integer factors with multiplicity plus one per
//! numeric constant.

use std::collections::BTreeMap;
use std::fmt;

use crate::arith::{int, qint, rat, QExpr};

pub const DEFAULT_COMPLEXITY: usize = 7;
pub const DEFAULT_TOL: f64 = 5e-6;

const ATOMS: [u32; 4] = [2, 3, 4, 5];
const MAX_EXP: i32 = 2;
const MAX_FACTORS: usize = 3;
const MAX_VALUE: f64 = 4.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Coef {
    One,
    Two,
    Half,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct Term {
    coef: Coef,
    exps: [i32; 4],
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Shape {
    T(Term),
    Factored(Term, Term),
    Sum(Term, Term),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct Spec {
    shape: Shape,
    minus_one: bool,
    sqrt: bool,
}

fn qvals() -> [f64; 4] {
    let s = (std::f64::consts::PI / 12.0).sin();
    ATOMS.map(|k| (k as f64 * std::f64::consts::PI / 12.0).sin() / s)
}

impl Term {
    fn factors(&self) -> usize {
        self.exps.iter().map(|e| e.unsigned_abs() as usize).sum()
    }

    fn complexity(&self) -> usize {
        match (self.coef, self.factors()) {
            (Coef::One, 0) => 1,
            (Coef::One, f) => f,
            (_, f) => f + 1,
        }
    }

    fn value(&self, q: &[f64; 4]) -> f64 {
        let c = match self.coef {
            Coef::One => 1.0,
            Coef::Two => 2.0,
            Coef::Half => 0.5,
        };
        self.exps.iter().zip(q).fold(c, |acc, (&e, &v)| acc * v.powi(e))
    }

    fn expr(&self) -> QExpr {
        let power = |k: u32, e: i32| if e == 1 { qint(k) } else { qint(k).pow(e as i64) };
        let mut num: Option<QExpr> = match self.coef {
            Coef::Two => Some(int(2)),
            _ => None,
        };
        let mut den: Option<QExpr> = match self.coef {
            Coef::Half => Some(int(2)),
            _ => None,
        };
        for (&k, &e) in ATOMS.iter().zip(&self.exps) {
            let slot = if e > 0 { &mut num } else { &mut den };
            if e != 0 {
                let f = power(k, e.abs());
                *slot = Some(match slot.take() {
                    Some(x) => x * f,
                    None => f,
                });
            }
        }
        match (num, den) {
            (None, None) => int(1),
            (Some(n), None) => n,
            (None, Some(d)) => match self.coef {
                Coef::Half if self.factors() == 0 => rat(1, 2),
                _ => int(1) / d,
            },
            (Some(n), Some(d)) => n / d,
        }
    }

    fn is_one(&self) -> bool {
        self.coef == Coef::One && self.factors() == 0
    }
}

impl Spec {
    fn complexity(&self) -> usize {
        let base = match self.shape {
            Shape::T(t) => t.complexity(),
            Shape::Factored(a, b) => {
                if a.is_one() {
                    1 + b.complexity()
                } else {
                    a.complexity() + 1 + b.complexity()
                }
            }
            Shape::Sum(a, b) => a.complexity() + b.complexity(),
        };
        base + usize::from(self.minus_one)
    }

    fn expr(&self) -> QExpr {
        let mut e = match self.shape {
            Shape::T(t) => t.expr(),
            Shape::Factored(a, b) => {
                let inner = int(1) + b.expr();
                if a.is_one() {
                    inner
                } else {
                    a.expr() * inner
                }
            }
            Shape::Sum(a, b) => a.expr() + b.expr(),
        };
        if self.minus_one {
            e = e - int(1);
        }
        if self.sqrt {
            e = e.sqrt();
        }
        e
    }
}

/// One dictionary entry.
#[derive(Clone, Debug)]
pub struct Entry {
    pub value: f64,
    pub complexity: usize,
    pub expr: QExpr,
    pub text: String,
}

/// All dictionary values up to a complexity bound, sorted by value.
#[derive(Clone, Debug)]
pub struct RecognitionDictionary {
    pub bound: usize,
    pub entries: Vec<Entry>,
}

/// Result of a recognition attempt.
#[derive(Clone, Debug)]
pub struct Recognition {
    pub value: f64,
    pub matched: Option<Entry>,
}

impl fmt::Display for Recognition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.matched {
            Some(e) => write!(f, "{:<10} {}  (complexity {}, |err| {:.1e})", self.value, e.text, e.complexity, (e.value - self.value).abs()),
            None => write!(f, "{:<10} no match", self.value),
        }
    }
}

fn terms() -> Vec<Term> {
    let mut out = Vec::new();
    let r = -MAX_EXP..=MAX_EXP;
    for a in r.clone() {
        for b in r.clone() {
            for c in r.clone() {
                for d in r.clone() {
                    let exps = [a, b, c, d];
                    if exps.iter().map(|e| e.unsigned_abs() as usize).sum::<usize>() > MAX_FACTORS {
                        continue;
                    }
                    for coef in [Coef::One, Coef::Two, Coef::Half] {
                        out.push(Term { coef, exps });
                    }
                }
            }
        }
    }
    out
}

impl Default for RecognitionDictionary {
    fn default() -> Self {
        RecognitionDictionary::new(DEFAULT_COMPLEXITY)
    }
}

impl RecognitionDictionary {
    /// Deterministic for a fixed bound.
    pub fn new(bound: usize) -> RecognitionDictionary {
        let q = qvals();
        let ts: Vec<(Term, usize, f64)> = terms().into_iter().map(|t| (t, t.complexity(), t.value(&q))).filter(|t| t.1 <= bound).collect();
        // value key -> best (complexity, text, spec)
        let mut best: BTreeMap<i64, (usize, String, Spec)> = BTreeMap::new();
        let mut offer = |v: f64, spec: Spec| {
            if !(v > 0.0 && v < MAX_VALUE) {
                return;
            }
            let c = spec.complexity();
            if c > bound {
                return;
            }
            let key = (v * 1e11).round() as i64;
            match best.get(&key) {
                Some((bc, _, _)) if *bc < c => {}
                Some((bc, bt, _)) if *bc == c => {
                    let text = spec.expr().to_string();
                    if text < *bt {
                        best.insert(key, (c, text, spec));
                    }
                }
                _ => {
                    best.insert(key, (c, spec.expr().to_string(), spec));
                }
            }
        };
        for &(t, _, v) in &ts {
            offer(v, Spec { shape: Shape::T(t), minus_one: false, sqrt: false });
            offer(v.sqrt(), Spec { shape: Shape::T(t), minus_one: false, sqrt: true });
        }
        for &(a, ca, va) in &ts {
            for &(b, cb, vb) in &ts {
                if b.is_one() {
                    continue;
                }
                if (if a.is_one() { 1 } else { ca + 1 }) + cb <= bound {
                    let v = va * (1.0 + vb);
                    for (minus_one, sqrt) in [(false, false), (false, true), (true, false)] {
                        let x = if minus_one { v - 1.0 } else { v };
                        offer(if sqrt { x.sqrt() } else { x }, Spec { shape: Shape::Factored(a, b), minus_one, sqrt });
                    }
                }
                if a < b && ca + cb <= bound {
                    let v = va + vb;
                    for (minus_one, sqrt) in [(false, false), (false, true), (true, false)] {
                        let x = if minus_one { v - 1.0 } else { v };
                        offer(if sqrt { x.sqrt() } else { x }, Spec { shape: Shape::Sum(a, b), minus_one, sqrt });
                    }
                }
            }
        }
        let mut entries: Vec<Entry> = best
            .into_values()
            .map(|(complexity, text, spec)| {
                let expr = spec.expr();
                let (value, _) = expr.to_c64().expect("dictionary entries evaluate");
                Entry { value, complexity, expr, text }
            })
            .collect();
        entries.sort_by(|a, b| a.value.total_cmp(&b.value));
        RecognitionDictionary { bound, entries }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Lowest-complexity entry within `tol` of `x`; ties go to the
    /// lexicographically smallest text. Values below `tol` recognize as `0`.
    pub fn lookup(&self, x: f64, tol: f64) -> Option<Entry> {
        if x.abs() < tol {
            return Some(Entry { value: 0.0, complexity: 0, expr: int(0), text: "0".into() });
        }
        let start = self.entries.partition_point(|e| e.value < x - tol);
        self.entries[start..]
            .iter()
            .take_while(|e| e.value <= x + tol)
            .min_by(|a, b| a.complexity.cmp(&b.complexity).then_with(|| a.text.cmp(&b.text)))
            .cloned()
    }

    pub fn recognize(&self, x: f64) -> Recognition {
        Recognition { value: x, matched: self.lookup(x, DEFAULT_TOL) }
    }

    /// One line per entry, for auditing.
    pub fn dump(&self) -> String {
        self.entries.iter().map(|e| format!("{:.12}\t{}\t{}\n", e.value, e.complexity, e.text)).collect()
    }
}

/// Recognize `x` against `dict` at the default tolerance.
pub fn recognize(x: f64, dict: &RecognitionDictionary) -> Option<QExpr> {
    dict.lookup(x, DEFAULT_TOL).map(|e| e.expr)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::eval;
    use proptest::prelude::*;
    use std::sync::OnceLock;

    fn dict() -> &'static RecognitionDictionary {
        static D: OnceLock<RecognitionDictionary> = OnceLock::new();
        D.get_or_init(RecognitionDictionary::default)
    }

    fn certified_equal(a: &QExpr, b: &QExpr) -> bool {
        eval(&(a.clone() - b.clone()), 128).unwrap().abs_upper() < 1e-30
    }

    #[test]
    fn q2_is_recognized() {
        let e = recognize(1.93185, dict()).unwrap();
        assert!(certified_equal(&e, &qint(2)), "{e}");
    }

    #[test]
    fn factored_minus_one_shape() {
        let e = recognize(0.341081, dict()).unwrap();
        let want = QExpr::parse("(1/q[3])*(q[2]+q[4]/q[2])-1").unwrap();
        assert!(certified_equal(&e, &want), "{e}");
    }

    #[test]
    fn small_values_are_zero() {
        assert_eq!(recognize(1e-9, dict()), Some(int(0)));
    }

    #[test]
    fn listed_value_has_no_match() {
        assert!(recognize(0.239691, dict()).is_none());
    }

    #[test]
    fn construction_is_deterministic() {
        let a = RecognitionDictionary::new(4);
        let b = RecognitionDictionary::new(4);
        assert_eq!(a.dump(), b.dump());
        assert!(a.len() < dict().len());
    }

    #[test]
    fn entries_respect_the_bound() {
        assert!(dict().entries.iter().all(|e| e.complexity <= DEFAULT_COMPLEXITY));
        assert!(dict().entries.windows(2).all(|w| w[0].value <= w[1].value));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]
        #[test]
        fn recognition_is_idempotent(i in 0usize..1_000_000) {
            let d = dict();
            let e = &d.entries[i % d.len()];
            let (v, _) = e.expr.to_c64().unwrap();
            let got = d.lookup(v, 1e-12).unwrap();
            prop_assert!(certified_equal(&got.expr, &e.expr));
            prop_assert!(got.complexity <= e.complexity);
        }
    }
}
