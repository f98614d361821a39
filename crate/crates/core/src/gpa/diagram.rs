//! Diagram expressions: composites of generators, identities and duality maps.
//!
//! Text form: `comp(g, f)` means `g ∘ f`, `tens(a, b, ...)`, `dag(x)`, `rot(x)`,
//! `id("+-")`, `ev("+-")`, `coev("-+")`, `scale("<qexpr>", x)`, `add(a, b)`,
//! `sub(a, b)` and bare generator names.

use std::collections::BTreeMap;
use std::fmt;

use crate::arith::QExpr;
use crate::graph::{OrientedGraph, SignString};

use super::{add, coev, compose, dagger, ev, identity, rotate, scale, sub, tensor, Field, GpaError, Morphism};

#[derive(Clone, Debug, PartialEq)]
pub enum DiagramExpr {
    Gen(String),
    Id(SignString),
    Ev(SignString),
    Coev(SignString),
    Comp(Vec<DiagramExpr>),
    Tens(Vec<DiagramExpr>),
    Dag(Box<DiagramExpr>),
    Rot(Box<DiagramExpr>),
    Scale(QExpr, Box<DiagramExpr>),
    Add(Box<DiagramExpr>, Box<DiagramExpr>),
    Sub(Box<DiagramExpr>, Box<DiagramExpr>),
}

pub type Binding<E> = BTreeMap<String, Morphism<E>>;

impl fmt::Display for DiagramExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use DiagramExpr::*;
        let list = |f: &mut fmt::Formatter<'_>, name: &str, xs: &[DiagramExpr]| {
            write!(f, "{name}(")?;
            for (i, x) in xs.iter().enumerate() {
                if i > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{x}")?;
            }
            write!(f, ")")
        };
        match self {
            Gen(n) => write!(f, "{n}"),
            Id(s) => write!(f, "id(\"{s}\")"),
            Ev(s) => write!(f, "ev(\"{s}\")"),
            Coev(s) => write!(f, "coev(\"{s}\")"),
            Comp(xs) => list(f, "comp", xs),
            Tens(xs) => list(f, "tens", xs),
            Dag(x) => write!(f, "dag({x})"),
            Rot(x) => write!(f, "rot({x})"),
            Scale(c, x) => write!(f, "scale(\"{c}\", {x})"),
            Add(a, b) => write!(f, "add({a}, {b})"),
            Sub(a, b) => write!(f, "sub({a}, {b})"),
        }
    }
}

impl DiagramExpr {
    /// Evaluate against named morphisms.
    pub fn eval<F: Field>(&self, fld: &F, g: &OrientedGraph, env: &Binding<F::Elem>) -> Result<Morphism<F::Elem>, GpaError> {
        use DiagramExpr::*;
        let located = |e: GpaError| match e {
            GpaError::Type { context, detail } if !context.contains(" in `") => {
                GpaError::Type { context: format!("{context} in `{self}`"), detail }
            }
            other => other,
        };
        Ok(match self {
            Gen(n) => env.get(n).cloned().ok_or_else(|| GpaError::Unbound(n.clone()))?,
            Id(s) => identity(fld, g, s),
            Ev(s) => ev(fld, g, s).map_err(located)?,
            Coev(s) => coev(fld, g, s).map_err(located)?,
            Comp(xs) => {
                let mut it = xs.iter().rev();
                let mut acc = it.next().expect("nonempty comp").eval(fld, g, env)?;
                for x in it {
                    acc = compose(fld, &x.eval(fld, g, env)?, &acc).map_err(located)?;
                }
                acc
            }
            Tens(xs) => {
                let mut it = xs.iter();
                let mut acc = it.next().expect("nonempty tens").eval(fld, g, env)?;
                for x in it {
                    acc = tensor(fld, &acc, &x.eval(fld, g, env)?);
                }
                acc
            }
            Dag(x) => dagger(fld, &x.eval(fld, g, env)?),
            Rot(x) => rotate(fld, g, &x.eval(fld, g, env)?).map_err(located)?,
            Scale(c, x) => scale(fld, &fld.from_qexpr(c)?, &x.eval(fld, g, env)?),
            Add(a, b) => add(fld, &a.eval(fld, g, env)?, &b.eval(fld, g, env)?).map_err(located)?,
            Sub(a, b) => sub(fld, &a.eval(fld, g, env)?, &b.eval(fld, g, env)?).map_err(located)?,
        })
    }

    /// Generator names used, in first-occurrence order.
    pub fn generators(&self) -> Vec<String> {
        fn walk(e: &DiagramExpr, out: &mut Vec<String>) {
            use DiagramExpr::*;
            match e {
                Gen(n) => {
                    if !out.contains(n) {
                        out.push(n.clone())
                    }
                }
                Id(_) | Ev(_) | Coev(_) => {}
                Comp(xs) | Tens(xs) => xs.iter().for_each(|x| walk(x, out)),
                Dag(x) | Rot(x) | Scale(_, x) => walk(x, out),
                Add(a, b) | Sub(a, b) => {
                    walk(a, out);
                    walk(b, out)
                }
            }
        }
        let mut out = Vec::new();
        walk(self, &mut out);
        out
    }
}

pub fn parse_diagram(text: &str) -> Result<DiagramExpr, GpaError> {
    let mut p = Parser { s: text.as_bytes(), i: 0 };
    let e = p.expr()?;
    p.ws();
    if p.i != p.s.len() {
        return Err(p.err("trailing input"));
    }
    Ok(e)
}

impl std::str::FromStr for DiagramExpr {
    type Err = GpaError;
    fn from_str(s: &str) -> Result<Self, GpaError> {
        parse_diagram(s)
    }
}

struct Parser<'a> {
    s: &'a [u8],
    i: usize,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> GpaError {
        GpaError::Parse { pos: self.i, msg: msg.to_string() }
    }

    fn ws(&mut self) {
        while self.i < self.s.len() && self.s[self.i].is_ascii_whitespace() {
            self.i += 1;
        }
    }

    fn eat(&mut self, c: u8) -> bool {
        self.ws();
        if self.s.get(self.i) == Some(&c) {
            self.i += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), GpaError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(&format!("expected '{}'", c as char)))
        }
    }

    fn ident(&mut self) -> Result<String, GpaError> {
        self.ws();
        let start = self.i;
        while self.i < self.s.len() && (self.s[self.i].is_ascii_alphanumeric() || matches!(self.s[self.i], b'_' | b'\'')) {
            self.i += 1;
        }
        if start == self.i {
            return Err(self.err("expected a name"));
        }
        Ok(String::from_utf8_lossy(&self.s[start..self.i]).into_owned())
    }

    fn string(&mut self) -> Result<String, GpaError> {
        self.expect(b'"')?;
        let start = self.i;
        while self.i < self.s.len() && self.s[self.i] != b'"' {
            self.i += 1;
        }
        if self.i == self.s.len() {
            return Err(self.err("unterminated string"));
        }
        let out = String::from_utf8_lossy(&self.s[start..self.i]).into_owned();
        self.i += 1;
        Ok(out)
    }

    fn signs(&mut self) -> Result<SignString, GpaError> {
        let s = self.string()?;
        s.parse().map_err(|e| self.err(&format!("{e}")))
    }

    fn args(&mut self) -> Result<Vec<DiagramExpr>, GpaError> {
        let mut xs = vec![self.expr()?];
        while self.eat(b',') {
            xs.push(self.expr()?);
        }
        self.expect(b')')?;
        Ok(xs)
    }

    fn pair(&mut self) -> Result<(Box<DiagramExpr>, Box<DiagramExpr>), GpaError> {
        let a = self.expr()?;
        self.expect(b',')?;
        let b = self.expr()?;
        self.expect(b')')?;
        Ok((Box::new(a), Box::new(b)))
    }

    fn expr(&mut self) -> Result<DiagramExpr, GpaError> {
        use DiagramExpr::*;
        let name = self.ident()?;
        if !self.eat(b'(') {
            return Ok(Gen(name));
        }
        let e = match name.as_str() {
            "id" | "ev" | "coev" => {
                let s = self.signs()?;
                self.expect(b')')?;
                match name.as_str() {
                    "id" => Id(s),
                    "ev" => Ev(s),
                    _ => Coev(s),
                }
            }
            "comp" => Comp(self.args()?),
            "tens" => Tens(self.args()?),
            "dag" | "rot" => {
                let x = Box::new(self.expr()?);
                self.expect(b')')?;
                if name == "dag" {
                    Dag(x)
                } else {
                    Rot(x)
                }
            }
            "scale" => {
                let at = self.i;
                let c = QExpr::parse(&self.string()?).map_err(|e| GpaError::Parse { pos: at, msg: e.to_string() })?;
                self.expect(b',')?;
                let x = Box::new(self.expr()?);
                self.expect(b')')?;
                Scale(c, x)
            }
            "add" => {
                let (a, b) = self.pair()?;
                Add(a, b)
            }
            "sub" => {
                let (a, b) = self.pair()?;
                Sub(a, b)
            }
            _ => return Err(self.err(&format!("unknown operation {name}"))),
        };
        Ok(e)
    }
}

/// A named identity `lhs = rhs` in a declared Hom space.
#[derive(Clone, Debug)]
pub struct Relation {
    pub name: String,
    pub source: SignString,
    pub target: SignString,
    pub lhs: DiagramExpr,
    pub rhs: DiagramExpr,
}

/// A parsed `.diagram` file: `let` definitions followed by relations.
#[derive(Clone, Debug, Default)]
pub struct DiagramFile {
    pub lets: Vec<(String, DiagramExpr)>,
    pub relations: Vec<Relation>,
}

impl DiagramFile {
    pub fn parse(text: &str) -> Result<DiagramFile, GpaError> {
        let mut file = DiagramFile::default();
        let mut pending: Option<Pending> = None;
        let perr = |line: usize, msg: String| GpaError::Parse { pos: line, msg: format!("line {line}: {msg}") };
        let mut lines = text.lines().enumerate().peekable();
        let finish = |pending: &mut Option<Pending>, file: &mut DiagramFile, line: usize| -> Result<(), GpaError> {
            if let Some((name, hom, lhs, rhs)) = pending.take() {
                let (source, target) = hom.ok_or_else(|| perr(line, format!("relation {name} lacks hom")))?;
                let lhs = lhs.ok_or_else(|| perr(line, format!("relation {name} lacks lhs")))?;
                let rhs = rhs.ok_or_else(|| perr(line, format!("relation {name} lacks rhs")))?;
                file.relations.push(Relation { name, source, target, lhs, rhs });
            }
            Ok(())
        };
        while let Some((n, raw)) = lines.next() {
            let mut line = strip_comment(raw).trim().to_string();
            if line.is_empty() {
                continue;
            }
            // continuation while parentheses are open
            while depth(&line) > 0 {
                match lines.next() {
                    Some((_, more)) => {
                        line.push(' ');
                        line.push_str(strip_comment(more).trim());
                    }
                    None => return Err(perr(n + 1, "unbalanced parentheses".into())),
                }
            }
            let lineno = n + 1;
            if let Some(rest) = line.strip_prefix("relation ") {
                finish(&mut pending, &mut file, lineno)?;
                let name = rest.trim().trim_matches('"').to_string();
                pending = Some((name, None, None, None));
            } else if let Some(rest) = line.strip_prefix("let ") {
                let (name, body) = rest.split_once('=').ok_or_else(|| perr(lineno, "expected let NAME = EXPR".into()))?;
                file.lets.push((name.trim().to_string(), parse_diagram(body.trim()).map_err(|e| perr(lineno, e.to_string()))?));
            } else if let Some((key, val)) = line.split_once('=') {
                let Some(rel) = pending.as_mut() else {
                    return Err(perr(lineno, "field outside a relation".into()));
                };
                match key.trim() {
                    "hom" => {
                        let (s, t) = val.split_once("->").ok_or_else(|| perr(lineno, "expected hom = \"s\" -> \"t\"".into()))?;
                        let parse = |x: &str| x.trim().trim_matches('"').parse::<SignString>().map_err(|e| perr(lineno, e.to_string()));
                        rel.1 = Some((parse(s)?, parse(t)?));
                    }
                    "lhs" => rel.2 = Some(parse_diagram(val.trim()).map_err(|e| perr(lineno, e.to_string()))?),
                    "rhs" => rel.3 = Some(parse_diagram(val.trim()).map_err(|e| perr(lineno, e.to_string()))?),
                    other => return Err(perr(lineno, format!("unknown field {other}"))),
                }
            } else {
                return Err(perr(lineno, format!("cannot read {line:?}")));
            }
        }
        finish(&mut pending, &mut file, text.lines().count())?;
        Ok(file)
    }

    /// Extend `env` with the file's `let` definitions.
    pub fn bind<F: Field>(&self, fld: &F, g: &OrientedGraph, env: &Binding<F::Elem>) -> Result<Binding<F::Elem>, GpaError> {
        let mut env = env.clone();
        for (name, e) in &self.lets {
            let m = e.eval(fld, g, &env)?;
            env.insert(name.clone(), m);
        }
        Ok(env)
    }

    pub fn relation(&self, name: &str) -> Option<&Relation> {
        self.relations.iter().find(|r| r.name == name)
    }
}

type Pending = (String, Option<(SignString, SignString)>, Option<DiagramExpr>, Option<DiagramExpr>);

fn strip_comment(s: &str) -> &str {
    match s.find('#') {
        Some(i) => &s[..i],
        None => s,
    }
}

fn depth(s: &str) -> i32 {
    let mut d = 0;
    let mut in_str = false;
    for c in s.chars() {
        match c {
            '"' => in_str = !in_str,
            '(' if !in_str => d += 1,
            ')' if !in_str => d -= 1,
            _ => {}
        }
    }
    d
}
