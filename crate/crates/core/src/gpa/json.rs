use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::arith::QExpr;
use crate::graph::{OrientedGraph, Path, Sign, SignString, Step};

use super::{GpaError, Morphism};

/// One path pair; paths are edge-index lists read against the sign strings.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PairJson {
    /// Id of the common start vertex, needed for empty paths.
    pub start: u32,
    pub p: Vec<usize>,
    pub q: Vec<usize>,
    pub coeff: QExpr,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MorphismJson {
    #[serde(default = "one")]
    pub schema: u32,
    pub source: SignString,
    pub target: SignString,
    pub entries: Vec<PairJson>,
}

fn one() -> u32 {
    1
}

fn rebuild(g: &OrientedGraph, start: usize, signs: &SignString, edges: &[usize]) -> Result<Path, GpaError> {
    if edges.len() != signs.len() {
        return Err(GpaError::BadPair(format!("{} edges for sign string \"{signs}\"", edges.len())));
    }
    let mut at = start;
    let mut steps = Vec::with_capacity(edges.len());
    for (&e, &sign) in edges.iter().zip(signs.signs()) {
        if e >= g.edge_count() {
            return Err(GpaError::BadPair(format!("edge index {e} out of range")));
        }
        let (s, t) = g.ends(e);
        let (from, to) = if sign == Sign::Plus { (s, t) } else { (t, s) };
        if from != at {
            return Err(GpaError::BadPair(format!("edge {e} does not continue the path at vertex {}", g.vertex_id(at))));
        }
        steps.push(Step { to: to as u32, edge: e as u32, sign });
        at = to;
    }
    Ok(Path::new(start, steps))
}

impl MorphismJson {
    pub fn from_morphism(g: &OrientedGraph, m: &Morphism<QExpr>) -> MorphismJson {
        let entries = m
            .entries
            .iter()
            .map(|((p, q), c)| PairJson { start: g.vertex_id(p.start()), p: p.edges(), q: q.edges(), coeff: c.clone() })
            .collect();
        MorphismJson { schema: 1, source: m.source.clone(), target: m.target.clone(), entries }
    }

    pub fn to_morphism(&self, g: &OrientedGraph) -> Result<Morphism<QExpr>, GpaError> {
        let mut entries = BTreeMap::new();
        for e in &self.entries {
            let v = g.index_of(e.start).map_err(|err| GpaError::BadPair(err.to_string()))?;
            let p = rebuild(g, v, &self.source, &e.p)?;
            let q = rebuild(g, v, &self.target, &e.q)?;
            if p.end() != q.end() {
                return Err(GpaError::BadPair("paths end at different vertices".into()));
            }
            entries.insert((p, q), e.coeff.clone());
        }
        Ok(Morphism { source: self.source.clone(), target: self.target.clone(), entries })
    }
}
