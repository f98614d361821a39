//! Closed-form scalar expressions over quantum integers, roots of unity and `z`.
//!
//! Text grammar:
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary (('*' | '/') unary)*
//! unary := '-' unary | power
//! power := atom ('^' '-'? digits)?
//! atom  := digits ('/' digits)? | 'q[' digits ']' | 'zeta(' digits ',' '-'? digits ')'
//!        | 'z' | 'sqrt(' expr ')' | 'conj(' expr ')' | '(' expr ')'
//! ```
//!
//! `p/q` written with two bare integer literals is a single rational literal,
//! and `-` directly in front of a bare literal makes a negative literal.
//! Printing inserts whatever parentheses are needed for `parse(print(e)) == e`.

use std::fmt;
use std::ops;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::ball::{Real, Scalar};
use super::consts::{quantum_integer, root_of_unity, z_value};
use super::ArithError;

/// Order of the bundled quantum parameter: `q = e^{2 pi i / 24}`.
pub const DEFAULT_Q_ORDER: u32 = 24;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum QExpr {
    Rat(BigRational),
    /// Quantum integer `[n]_q`.
    QInt(u32),
    /// `e^{2 pi i k / l}`.
    Zeta(u32, i64),
    /// The distinguished root of `9x^16 - 14x^8 + 9`.
    Z,
    Sqrt(Arc<QExpr>),
    Neg(Arc<QExpr>),
    Conj(Arc<QExpr>),
    Add(Arc<QExpr>, Arc<QExpr>),
    Sub(Arc<QExpr>, Arc<QExpr>),
    Mul(Arc<QExpr>, Arc<QExpr>),
    Div(Arc<QExpr>, Arc<QExpr>),
    Pow(Arc<QExpr>, i64),
}

/// Quantum integer `[n]_q`.
pub fn qint(n: u32) -> QExpr {
    QExpr::QInt(n)
}

/// Root of unity `e^{2 pi i k / l}`.
pub fn zeta(l: u32, k: i64) -> QExpr {
    QExpr::Zeta(l.max(1), k)
}

pub fn z() -> QExpr {
    QExpr::Z
}

pub fn int(n: i64) -> QExpr {
    QExpr::Rat(BigRational::from_integer(n.into()))
}

pub fn rat(p: i64, q: i64) -> QExpr {
    QExpr::Rat(BigRational::new(p.into(), q.into()))
}

/// Evaluation settings.
#[derive(Clone, Copy, Debug)]
pub struct EvalContext {
    pub precision: u32,
    pub q_order: u32,
}

impl EvalContext {
    pub fn new(precision: u32) -> Self {
        EvalContext { precision, q_order: DEFAULT_Q_ORDER }
    }
}

impl QExpr {
    pub fn sqrt(self) -> QExpr {
        QExpr::Sqrt(Arc::new(self))
    }

    pub fn conj(self) -> QExpr {
        QExpr::Conj(Arc::new(self))
    }

    pub fn inv(self) -> QExpr {
        int(1) / self
    }

    pub fn pow(self, k: i64) -> QExpr {
        QExpr::Pow(Arc::new(self), k)
    }

    pub fn is_zero_literal(&self) -> bool {
        matches!(self, QExpr::Rat(r) if r.is_zero())
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        use QExpr::*;
        match self {
            Rat(_) | QInt(_) | Zeta(..) | Z => 1,
            Sqrt(a) | Neg(a) | Conj(a) | Pow(a, _) => 1 + a.size(),
            Add(a, b) | Sub(a, b) | Mul(a, b) | Div(a, b) => 1 + a.size() + b.size(),
        }
    }

    /// Certified enclosure at `prec` bits with the bundled `q`.
    pub fn eval(&self, prec: u32) -> Result<Scalar, ArithError> {
        self.eval_with(&EvalContext::new(prec))
    }

    pub fn eval_with(&self, ctx: &EvalContext) -> Result<Scalar, ArithError> {
        let wp = ctx.precision + 16;
        self.eval_inner(ctx, wp)
    }

    fn eval_inner(&self, ctx: &EvalContext, wp: u32) -> Result<Scalar, ArithError> {
        use QExpr::*;
        Ok(match self {
            Rat(r) => Scalar::from_real(Real::from_ratio(r.numer(), r.denom(), wp)?),
            QInt(n) => Scalar::from_real(quantum_integer(*n as i64, ctx.q_order, wp)?),
            Zeta(l, k) => root_of_unity(*l, *k, wp)?,
            Z => z_value(wp)?,
            Sqrt(a) => a.eval_inner(ctx, wp)?.sqrt()?,
            Neg(a) => a.eval_inner(ctx, wp)?.neg(),
            Conj(a) => a.eval_inner(ctx, wp)?.conj(),
            Add(a, b) => a.eval_inner(ctx, wp)?.add(&b.eval_inner(ctx, wp)?),
            Sub(a, b) => a.eval_inner(ctx, wp)?.sub(&b.eval_inner(ctx, wp)?),
            Mul(a, b) => a.eval_inner(ctx, wp)?.mul(&b.eval_inner(ctx, wp)?),
            Div(a, b) => a.eval_inner(ctx, wp)?.div(&b.eval_inner(ctx, wp)?)?,
            Pow(a, k) => a.eval_inner(ctx, wp)?.powi(*k)?,
        })
    }

    /// Double-precision value, for numerics and display.
    pub fn to_c64(&self) -> Result<(f64, f64), ArithError> {
        Ok(self.eval(64)?.to_c64())
    }

    fn level(&self) -> u8 {
        use QExpr::*;
        match self {
            Add(..) | Sub(..) => 1,
            Mul(..) | Div(..) => 2,
            Rat(r) if !r.denom().is_one() => 2,
            Neg(_) => 3,
            Rat(r) if r.is_negative() => 3,
            Pow(..) => 4,
            _ => 5,
        }
    }

    fn write_at(&self, out: &mut String, min_level: u8) {
        if self.level() < min_level {
            out.push('(');
            self.write_bare(out);
            out.push(')');
        } else {
            self.write_bare(out);
        }
    }

    fn write_bare(&self, out: &mut String) {
        use QExpr::*;
        match self {
            Rat(r) => {
                out.push_str(&r.numer().to_string());
                if !r.denom().is_one() {
                    out.push('/');
                    out.push_str(&r.denom().to_string());
                }
            }
            QInt(n) => out.push_str(&format!("q[{n}]")),
            Zeta(l, k) => out.push_str(&format!("zeta({l},{k})")),
            Z => out.push('z'),
            Sqrt(a) => {
                out.push_str("sqrt(");
                a.write_bare(out);
                out.push(')');
            }
            Conj(a) => {
                out.push_str("conj(");
                a.write_bare(out);
                out.push(')');
            }
            Neg(a) => {
                out.push('-');
                // a bare nonnegative literal would fuse into a negative literal
                if matches!(a.as_ref(), Rat(r) if !r.is_negative()) {
                    out.push('(');
                    a.write_bare(out);
                    out.push(')');
                } else {
                    a.write_at(out, 3);
                }
            }
            Add(a, b) | Sub(a, b) => {
                a.write_at(out, 1);
                out.push(if matches!(self, Add(..)) { '+' } else { '-' });
                b.write_at(out, 2);
            }
            Mul(a, b) => {
                a.write_at(out, 2);
                out.push('*');
                b.write_at(out, 3);
            }
            Div(a, b) => {
                a.write_at(out, 2);
                out.push('/');
                let mut rhs = String::new();
                b.write_at(&mut rhs, 3);
                if rhs.starts_with(|c: char| c.is_ascii_digit()) {
                    out.push('(');
                    out.push_str(&rhs);
                    out.push(')');
                } else {
                    out.push_str(&rhs);
                }
            }
            Pow(a, k) => {
                a.write_at(out, 5);
                out.push('^');
                out.push_str(&k.to_string());
            }
        }
    }

    pub fn parse(text: &str) -> Result<QExpr, ArithError> {
        let mut p = Parser { s: text.as_bytes(), i: 0 };
        let e = p.expr()?;
        p.skip_ws();
        if p.i != p.s.len() {
            return Err(p.err("trailing input"));
        }
        Ok(e)
    }
}

impl fmt::Display for QExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        self.write_bare(&mut s);
        f.write_str(&s)
    }
}

impl std::str::FromStr for QExpr {
    type Err = ArithError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        QExpr::parse(s)
    }
}

impl serde::Serialize for QExpr {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> serde::Deserialize<'de> for QExpr {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        QExpr::parse(&s).map_err(serde::de::Error::custom)
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $node:ident, $fold:expr) => {
        impl ops::$tr for QExpr {
            type Output = QExpr;
            fn $m(self, rhs: QExpr) -> QExpr {
                if let (QExpr::Rat(a), QExpr::Rat(b)) = (&self, &rhs) {
                    let fold: fn(&BigRational, &BigRational) -> Option<BigRational> = $fold;
                    if let Some(r) = fold(a, b) {
                        return QExpr::Rat(r);
                    }
                }
                QExpr::$node(Arc::new(self), Arc::new(rhs))
            }
        }
    };
}

binop!(Add, add, Add, |a, b| Some(a + b));
binop!(Sub, sub, Sub, |a, b| Some(a - b));
binop!(Mul, mul, Mul, |a, b| Some(a * b));
binop!(Div, div, Div, |a, b| if b.is_zero() { None } else { Some(a / b) });

impl ops::Neg for QExpr {
    type Output = QExpr;
    fn neg(self) -> QExpr {
        match self {
            QExpr::Rat(r) => QExpr::Rat(-r),
            e => QExpr::Neg(Arc::new(e)),
        }
    }
}

struct Parser<'a> {
    s: &'a [u8],
    i: usize,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> ArithError {
        ArithError::Parse { pos: self.i, msg: msg.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.i < self.s.len() && self.s[self.i].is_ascii_whitespace() {
            self.i += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.i).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.i += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), ArithError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(&format!("expected '{}'", c as char)))
        }
    }

    fn keyword(&mut self, kw: &str) -> bool {
        self.skip_ws();
        if self.s[self.i..].starts_with(kw.as_bytes()) {
            self.i += kw.len();
            true
        } else {
            false
        }
    }

    fn digits(&mut self) -> Result<BigInt, ArithError> {
        self.skip_ws();
        let start = self.i;
        while self.i < self.s.len() && self.s[self.i].is_ascii_digit() {
            self.i += 1;
        }
        if start == self.i {
            return Err(self.err("expected digits"));
        }
        let txt = std::str::from_utf8(&self.s[start..self.i]).expect("ascii digits");
        Ok(txt.parse().expect("digit string"))
    }

    fn small_int(&mut self) -> Result<i64, ArithError> {
        let neg = self.eat(b'-');
        let v: i64 = self.digits()?.try_into().map_err(|_| self.err("integer out of range"))?;
        Ok(if neg { -v } else { v })
    }

    fn expr(&mut self) -> Result<QExpr, ArithError> {
        let mut lhs = self.term()?;
        loop {
            if self.eat(b'+') {
                let rhs = self.term()?;
                lhs = QExpr::Add(Arc::new(lhs), Arc::new(rhs));
            } else if self.eat(b'-') {
                let rhs = self.term()?;
                lhs = QExpr::Sub(Arc::new(lhs), Arc::new(rhs));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<QExpr, ArithError> {
        let mut lhs = self.unary()?.0;
        loop {
            if self.eat(b'*') {
                let rhs = self.unary()?.0;
                lhs = QExpr::Mul(Arc::new(lhs), Arc::new(rhs));
            } else if self.eat(b'/') {
                let rhs = self.unary()?.0;
                lhs = QExpr::Div(Arc::new(lhs), Arc::new(rhs));
            } else {
                return Ok(lhs);
            }
        }
    }

    /// Returns the parsed node and whether it was a bare literal.
    fn unary(&mut self) -> Result<(QExpr, bool), ArithError> {
        if self.eat(b'-') {
            let (inner, bare) = self.unary()?;
            return Ok(match inner {
                QExpr::Rat(r) if bare && !r.is_negative() => (QExpr::Rat(-r), false),
                e => (QExpr::Neg(Arc::new(e)), false),
            });
        }
        self.power()
    }

    fn power(&mut self) -> Result<(QExpr, bool), ArithError> {
        let (base, bare) = self.atom()?;
        if self.eat(b'^') {
            let k = self.small_int()?;
            return Ok((QExpr::Pow(Arc::new(base), k), false));
        }
        Ok((base, bare))
    }

    fn atom(&mut self) -> Result<(QExpr, bool), ArithError> {
        match self.peek() {
            Some(c) if c.is_ascii_digit() => {
                let num = self.digits()?;
                // a literal p/q needs digits right after the slash and no exponent
                let save = self.i;
                if self.eat(b'/') && matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                    let den = self.digits()?;
                    if self.peek() != Some(b'^') {
                        if den.is_zero() {
                            return Err(self.err("zero denominator"));
                        }
                        return Ok((QExpr::Rat(BigRational::new(num, den)), true));
                    }
                }
                self.i = save;
                Ok((QExpr::Rat(BigRational::from_integer(num)), true))
            }
            Some(b'(') => {
                self.i += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok((e, false))
            }
            _ => {
                if self.keyword("q[") {
                    let n: u32 = self.digits()?.try_into().map_err(|_| self.err("index out of range"))?;
                    self.expect(b']')?;
                    Ok((QExpr::QInt(n), false))
                } else if self.keyword("zeta(") {
                    let l: u32 = self.digits()?.try_into().map_err(|_| self.err("order out of range"))?;
                    if l == 0 {
                        return Err(self.err("zeta order must be positive"));
                    }
                    self.expect(b',')?;
                    let k = self.small_int()?;
                    self.expect(b')')?;
                    Ok((QExpr::Zeta(l, k), false))
                } else if self.keyword("sqrt(") {
                    let e = self.expr()?;
                    self.expect(b')')?;
                    Ok((QExpr::Sqrt(Arc::new(e)), false))
                } else if self.keyword("conj(") {
                    let e = self.expr()?;
                    self.expect(b')')?;
                    Ok((QExpr::Conj(Arc::new(e)), false))
                } else if self.keyword("z") {
                    Ok((QExpr::Z, false))
                } else {
                    Err(self.err("unexpected token"))
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(e: &QExpr, v: f64, tol: f64) {
        let (re, im) = e.to_c64().unwrap();
        assert!((re - v).abs() < tol && im.abs() < 1e-12, "{e} = {re}+{im}i, want {v}");
    }

    fn sine_ratio(n: f64) -> f64 {
        (n * std::f64::consts::PI / 12.0).sin() / (std::f64::consts::PI / 12.0).sin()
    }

    #[test]
    fn printed_recognitions() {
        close(&qint(2), 1.93185, 5e-6);
        close(&qint(3).inv(), 0.366025, 5e-6);
        close(&qint(2).sqrt(), sine_ratio(2.0).sqrt(), 1e-14);
        close(&qint(2).sqrt(), 1.93185f64.sqrt(), 5e-6);
    }

    #[test]
    fn qint_twelve_vanishes_exactly() {
        let v = qint(12).eval(256).unwrap();
        assert!(v.certifies_zero(2f64.powi(-100)));
    }

    #[test]
    fn quantum_integer_product_rule() {
        let e = qint(2) * qint(4) - qint(5) - qint(3);
        assert!(e.eval(256).unwrap().certifies_zero(2f64.powi(-100)));
        let e = qint(7) - qint(5);
        assert!(e.eval(256).unwrap().certifies_zero(2f64.powi(-100)));
    }

    #[test]
    fn division_by_zero_is_reported() {
        let e = int(1) / qint(12);
        assert!(matches!(e.eval(128), Err(ArithError::DivisionByZero)));
        let e = (qint(2) - qint(10)).sqrt();
        assert!(matches!(e.eval(128), Err(ArithError::NegativeSqrt | ArithError::BranchAmbiguity)));
    }

    #[test]
    fn parse_print_examples() {
        for s in [
            "q[2]",
            "zeta(24,19)*sqrt(q[3]/q[2])",
            "z^-1*sqrt(1/q[2])",
            "1/2",
            "-3/4+z",
            "-(3)",
            "1/(2)",
            "(1/2)^3",
            "sqrt(q[3]/(q[4]*(q[2]+q[3])))*zeta(3,1)*z",
            "conj(z)--1",
        ] {
            let e = QExpr::parse(s).unwrap();
            assert_eq!(e.to_string(), s);
        }
        assert_eq!(QExpr::parse("1/2^3").unwrap(), int(1) / int(2).pow(3));
        assert!(QExpr::parse("q[2]+").is_err());
        assert!(QExpr::parse("zeta(0,1)").is_err());
        assert!(QExpr::parse("1/0").is_err());
    }

    fn arb_expr() -> impl Strategy<Value = QExpr> {
        let leaf = prop_oneof![
            (-20i64..20, 1i64..9).prop_map(|(p, q)| rat(p, q)),
            (0u32..13).prop_map(qint),
            (1u32..49, -50i64..50).prop_map(|(l, k)| zeta(l, k)),
            Just(z()),
        ];
        leaf.prop_recursive(4, 24, 2, |inner| {
            prop_oneof![
                inner.clone().prop_map(|a| QExpr::Neg(Arc::new(a))),
                inner.clone().prop_map(QExpr::conj),
                (inner.clone(), -3i64..4).prop_map(|(a, k)| a.pow(k)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| QExpr::Add(Arc::new(a), Arc::new(b))),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| QExpr::Sub(Arc::new(a), Arc::new(b))),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| QExpr::Mul(Arc::new(a), Arc::new(b))),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| QExpr::Div(Arc::new(a), Arc::new(b))),
                (inner.clone(), inner).prop_map(|(a, b)| QExpr::Add(Arc::new(a), Arc::new(b)).sqrt()),
            ]
        })
    }

    proptest! {
        #[test]
        fn text_round_trip(e in arb_expr()) {
            let text = e.to_string();
            let back = QExpr::parse(&text).unwrap();
            prop_assert_eq!(&back, &e, "text {}", text);
            prop_assert_eq!(back.to_string(), text);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]
        #[test]
        fn doubling_precision_stays_inside(e in arb_expr()) {
            if let (Ok(lo), Ok(hi)) = (e.eval(96), e.eval(192)) {
                prop_assert!(lo.contains(&hi.midpoint()), "{} at 96 bits: {} vs {}", e, lo, hi);
                prop_assert!(hi.radius() <= lo.radius() || hi.radius() < 1e-40);
            }
        }

        #[test]
        fn conjugation_commutes_with_eval(e in arb_expr()) {
            if let Ok(v) = e.eval(128) {
                let c = e.clone().conj().eval(128).unwrap();
                prop_assert!(c.overlaps(&v.conj()));
            }
        }
    }

    #[test]
    fn constant_folding() {
        assert_eq!(int(1) / int(3) + rat(2, 3), int(1));
        assert_eq!(-int(2), QExpr::parse("-2").unwrap());
    }
}
