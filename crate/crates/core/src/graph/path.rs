use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }
}

/// A word over `{+, -}`; the empty word is the tensor unit.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SignString(Vec<Sign>);

impl SignString {
    pub fn unit() -> Self {
        SignString(Vec::new())
    }

    pub fn signs(&self) -> &[Sign] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat(&self, other: &SignString) -> SignString {
        SignString(self.0.iter().chain(&other.0).copied().collect())
    }

    /// Reversed word with every sign flipped.
    pub fn dual(&self) -> SignString {
        SignString(self.0.iter().rev().map(|s| s.flip()).collect())
    }
}

impl From<Vec<Sign>> for SignString {
    fn from(v: Vec<Sign>) -> Self {
        SignString(v)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid sign character {0:?}")]
pub struct SignParseError(pub char);

impl FromStr for SignString {
    type Err = SignParseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| match c {
                '+' => Ok(Sign::Plus),
                '-' | '\u{2212}' => Ok(Sign::Minus),
                other => Err(SignParseError(other)),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(SignString)
    }
}

impl fmt::Display for SignString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.0 {
            write!(f, "{}", s.symbol())?;
        }
        Ok(())
    }
}

impl Serialize for SignString {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for SignString {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// One step of a path: the vertex reached, the edge used and its direction.
///
/// Field order gives the lexicographic (vertex, edge label) ordering.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Step {
    pub to: u32,
    pub edge: u32,
    pub sign: Sign,
}

/// A walk in the graph: `+` steps follow an edge forward, `-` steps backward.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Path {
    start: u32,
    steps: Vec<Step>,
}

impl Path {
    pub fn trivial(v: usize) -> Path {
        Path { start: v as u32, steps: Vec::new() }
    }

    pub fn new(start: usize, steps: Vec<Step>) -> Path {
        Path { start: start as u32, steps }
    }

    pub fn start(&self) -> usize {
        self.start as usize
    }

    pub fn end(&self) -> usize {
        self.steps.last().map_or(self.start, |s| s.to) as usize
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn signs(&self) -> SignString {
        SignString::from(self.steps.iter().map(|s| s.sign).collect::<Vec<_>>())
    }

    pub fn edges(&self) -> Vec<usize> {
        self.steps.iter().map(|s| s.edge as usize).collect()
    }

    pub fn extended(&self, st: Step) -> Path {
        let mut steps = self.steps.clone();
        steps.push(st);
        Path { start: self.start, steps }
    }

    /// Concatenation; `None` unless `self` ends where `other` starts.
    pub fn concat(&self, other: &Path) -> Option<Path> {
        if self.end() != other.start() {
            return None;
        }
        let mut steps = self.steps.clone();
        steps.extend_from_slice(&other.steps);
        Some(Path { start: self.start, steps })
    }

    /// Split after `k` steps.
    pub fn split_at(&self, k: usize) -> (Path, Path) {
        let head = Path { start: self.start, steps: self.steps[..k].to_vec() };
        let tail = Path { start: head.end() as u32, steps: self.steps[k..].to_vec() };
        (head, tail)
    }

    /// The same walk traversed backwards.
    pub fn reversed(&self) -> Path {
        let mut verts = vec![self.start];
        verts.extend(self.steps.iter().map(|s| s.to));
        let steps = self
            .steps
            .iter()
            .enumerate()
            .rev()
            .map(|(i, s)| Step { to: verts[i], edge: s.edge, sign: s.sign.flip() })
            .collect();
        Path { start: self.end() as u32, steps }
    }
}
