//! The SU(3) cell system: triangle weights `W`, the Hecke element `U = W∘W†`
//! and its Boltzmann blocks.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

mod printed;

pub use printed::{compare_block, parse_printed_blocks, printed_blocks, BlockComparison, PrintedBlock, PRINTED_BLOCKS};

use crate::arith::{int, ArithError, QExpr, Scalar};
use crate::gpa::{compose, dagger, Exact, Field, Key, Morphism};
use crate::graph::{e412, GraphError, OrientedGraph, Path, Sign, SignString, Step};

#[derive(Debug, thiserror::Error)]
pub enum CellError {
    #[error("no triangle {0}")]
    NoTriangle(String),
    #[error("generators disagree on triangle {0}")]
    Inconsistent(String),
    #[error("triangle {0} has no weight")]
    MissingWeight(String),
    #[error("weight on {0} breaks the rotational formula")]
    Closure(String),
    #[error("morphism is not in Hom({0})")]
    WrongType(String),
    #[error("no length-2 paths from {0} to {1}")]
    EmptyBlock(u32, u32),
    #[error("unsupported closure {0:?}")]
    UnknownClosure(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error("cell json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("block fixture: {0}")]
    Fixture(String),
}

/// An oriented triangle `a -> b -> c -> a`, given by its three edges.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Triangle {
    pub ab: usize,
    pub bc: usize,
    pub ca: usize,
}

impl Triangle {
    /// The same triangle read from `b`: `(b, c, a)`.
    pub fn rotated(self) -> Triangle {
        Triangle { ab: self.bc, bc: self.ca, ca: self.ab }
    }

    /// `(a, b, c)` as vertex indices.
    pub fn vertices(&self, g: &OrientedGraph) -> (usize, usize, usize) {
        let (a, b) = g.ends(self.ab);
        (a, b, g.ends(self.bc).1)
    }

    /// Basis pair `(a <- c, a -> b -> c)` of `Hom(- -> ++)`.
    pub fn key(&self, g: &OrientedGraph) -> Key {
        let (a, b, c) = self.vertices(g);
        let p = Path::new(a, vec![Step { to: c as u32, edge: self.ca as u32, sign: Sign::Minus }]);
        let q = Path::new(
            a,
            vec![
                Step { to: b as u32, edge: self.ab as u32, sign: Sign::Plus },
                Step { to: c as u32, edge: self.bc as u32, sign: Sign::Plus },
            ],
        );
        (p, q)
    }

    pub fn from_key(key: &Key) -> Option<Triangle> {
        let (p, q) = key;
        match (p.steps(), q.steps()) {
            ([ca], [ab, bc]) if ca.sign == Sign::Minus && ab.sign == Sign::Plus && bc.sign == Sign::Plus => {
                Some(Triangle { ab: ab.edge as usize, bc: bc.edge as usize, ca: ca.edge as usize })
            }
            _ => None,
        }
    }

    /// Display such as `W[1,6,9^α]`.
    pub fn show(&self, g: &OrientedGraph) -> String {
        let (a, b, c) = self.vertices(g);
        let label = [self.ab, self.bc, self.ca]
            .iter()
            .map(|&e| g.edge_label(e))
            .find(|l| !l.is_empty())
            .map(|l| format!(" ({l})"))
            .unwrap_or_default();
        format!("{},{},{}{label}", g.vertex_id(a), g.vertex_id(b), g.vertex_id(c))
    }
}

/// All oriented triangles of `g`, sorted.
pub fn triangles(g: &OrientedGraph) -> Vec<Triangle> {
    let mut out = Vec::new();
    for ab in 0..g.edge_count() {
        let (a, b) = g.ends(ab);
        for bc in 0..g.edge_count() {
            if g.ends(bc).0 != b {
                continue;
            }
            let c = g.ends(bc).1;
            for ca in g.edges_between(c, a) {
                out.push(Triangle { ab, bc, ca });
            }
        }
    }
    out.sort();
    out
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GeneratorJson {
    pub a: u32,
    pub b: u32,
    pub c: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edge_label: Option<String>,
    pub coeff: QExpr,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CellJson {
    #[serde(default = "one")]
    pub schema: u32,
    pub graph_ref: String,
    pub generators: Vec<GeneratorJson>,
    pub closure: String,
}

fn one() -> u32 {
    1
}

pub const E412_CELLS_JSON: &str = include_str!("../../data/e412_cells.json");

/// Triangle weights of a cell system.
#[derive(Clone, Debug)]
pub struct CellSystem {
    pub graph: OrientedGraph,
    pub weights: BTreeMap<Triangle, QExpr>,
    /// Triangles whose weight was given directly rather than by rotation.
    pub generators: Vec<Triangle>,
}

/// The bundled cell system `W` on E_4^12.
pub fn load_w() -> Result<CellSystem, CellError> {
    CellSystem::from_json(e412(), E412_CELLS_JSON)
}

fn resolve_triangle(g: &OrientedGraph, gen: &GeneratorJson) -> Result<Triangle, CellError> {
    let (a, b, c) = (g.index_of(gen.a)?, g.index_of(gen.b)?, g.index_of(gen.c)?);
    let label = gen.edge_label.clone().unwrap_or_default();
    let name = || format!("{},{},{} {}", gen.a, gen.b, gen.c, label);
    let pick = |u: usize, v: usize| -> Result<Option<usize>, CellError> {
        let es = g.edges_between(u, v);
        match es.len() {
            0 => Err(CellError::NoTriangle(name())),
            1 => Ok(Some(es[0])),
            _ => Ok(es.into_iter().find(|&e| g.edge_label(e) == label)),
        }
    };
    let (ab, bc, ca) = (pick(a, b)?, pick(b, c)?, pick(c, a)?);
    match (ab, bc, ca) {
        (Some(ab), Some(bc), Some(ca)) => Ok(Triangle { ab, bc, ca }),
        _ => Err(CellError::NoTriangle(name())),
    }
}

impl CellSystem {
    pub fn from_json(graph: OrientedGraph, text: &str) -> Result<CellSystem, CellError> {
        let raw: CellJson = serde_json::from_str(text)?;
        let mut weights: BTreeMap<Triangle, QExpr> = BTreeMap::new();
        let mut generators = Vec::new();
        let rotational = match raw.closure.as_str() {
            "rotational" => true,
            "none" => false,
            other => return Err(CellError::UnknownClosure(other.to_string())),
        };
        for gen in &raw.generators {
            let t = resolve_triangle(&graph, gen)?;
            generators.push(t);
            let mut orbit = vec![(t, gen.coeff.clone())];
            if rotational {
                // W_{b,c,a} = sqrt(lambda_c / lambda_b) W_{a,b,c}
                let (a, b, c) = t.vertices(&graph);
                let w1 = Exact.mul(&gen.coeff, &graph.fp_ratio_sqrt(c, b));
                let w2 = Exact.mul(&w1, &graph.fp_ratio_sqrt(a, c));
                orbit.push((t.rotated(), w1));
                orbit.push((t.rotated().rotated(), w2));
            }
            for (tri, w) in orbit {
                if let Some(old) = weights.get(&tri) {
                    let d = old.eval(128)?.sub(&w.eval(128)?);
                    if !d.certifies_zero(1e-30) {
                        return Err(CellError::Inconsistent(tri.show(&graph)));
                    }
                    continue;
                }
                weights.insert(tri, w);
            }
        }
        let cs = CellSystem { graph, weights, generators };
        cs.check_support()?;
        Ok(cs)
    }

    /// Every triangle carries a weight.
    pub fn check_support(&self) -> Result<(), CellError> {
        for t in triangles(&self.graph) {
            if !self.weights.contains_key(&t) {
                return Err(CellError::MissingWeight(t.show(&self.graph)));
            }
        }
        Ok(())
    }

    /// Certify `W_{a,b,c} = sqrt(lambda_b / lambda_c) W_{b,c,a}` on every triangle.
    pub fn check_closure(&self, prec: u32, tol: f64) -> Result<(), CellError> {
        for (t, w) in &self.weights {
            let (_, b, c) = t.vertices(&self.graph);
            let r = self.weights.get(&t.rotated()).ok_or_else(|| CellError::MissingWeight(t.rotated().show(&self.graph)))?;
            let rhs = self.graph.fp_ratio_sqrt(b, c).eval(prec)?.mul(&r.eval(prec)?);
            if !w.eval(prec)?.sub(&rhs).certifies_zero(tol) {
                return Err(CellError::Closure(t.show(&self.graph)));
            }
        }
        Ok(())
    }

    pub fn weight(&self, a: u32, b: u32, c: u32, label: &str) -> Result<&QExpr, CellError> {
        let gen = GeneratorJson { a, b, c, edge_label: Some(label.to_string()), coeff: int(0) };
        let t = resolve_triangle(&self.graph, &gen)?;
        self.weights.get(&t).ok_or_else(|| CellError::MissingWeight(t.show(&self.graph)))
    }

    /// `W` as an element of `Hom(- -> ++)`, zero weights included.
    pub fn as_morphism(&self) -> Morphism<QExpr> {
        let entries = self.weights.iter().map(|(t, w)| (t.key(&self.graph), w.clone())).collect();
        Morphism { source: "-".parse().expect("sign"), target: "++".parse().expect("sign"), entries }
    }

    /// Read a cell system back from a morphism in `Hom(- -> ++)`.
    pub fn from_morphism(graph: OrientedGraph, m: &Morphism<QExpr>) -> Result<CellSystem, CellError> {
        if m.source.to_string() != "-" || m.target.to_string() != "++" {
            return Err(CellError::WrongType(m.type_string()));
        }
        let mut weights = BTreeMap::new();
        for (k, v) in &m.entries {
            let t = Triangle::from_key(k).ok_or_else(|| CellError::WrongType(m.type_string()))?;
            weights.insert(t, v.clone());
        }
        for t in triangles(&graph) {
            weights.entry(t).or_insert_with(|| int(0));
        }
        let generators = weights.keys().copied().collect();
        Ok(CellSystem { graph, weights, generators })
    }

    /// Fully closed export, one entry per triangle.
    pub fn to_closed_json(&self, graph_ref: &str) -> CellJson {
        let g = &self.graph;
        let generators = self
            .weights
            .iter()
            .map(|(t, w)| {
                let (a, b, c) = t.vertices(g);
                let label = [t.ab, t.bc, t.ca].iter().map(|&e| g.edge_label(e)).find(|l| !l.is_empty());
                GeneratorJson {
                    a: g.vertex_id(a),
                    b: g.vertex_id(b),
                    c: g.vertex_id(c),
                    edge_label: label.map(str::to_string),
                    coeff: w.clone(),
                }
            })
            .collect();
        CellJson { schema: 1, graph_ref: graph_ref.to_string(), generators, closure: "none".into() }
    }
}

/// `U = W ∘ W†` in `Hom(++ -> ++)`, as closed-form coefficients.
pub fn build_u(c: &CellSystem) -> Morphism<QExpr> {
    let w = c.as_morphism();
    compose(&Exact, &w, &dagger(&Exact, &w)).expect("W∘W† is well typed")
}

/// The matrix of a `Hom(++ -> ++)` element over length-2 paths `v1 -> · -> v2`.
///
/// Entry `(i, j)` is the coefficient of `(paths[j], paths[i])`, so that the
/// block acts on column vectors indexed by source paths.
#[derive(Clone, Debug)]
pub struct BoltzmannBlock<E> {
    pub v1: u32,
    pub v2: u32,
    pub paths: Vec<Path>,
    pub labels: Vec<String>,
    pub matrix: Vec<Vec<E>>,
}

pub fn block<E: Clone>(g: &OrientedGraph, u: &Morphism<E>, zero: E, v1: u32, v2: u32) -> Result<BoltzmannBlock<E>, CellError> {
    let pp: SignString = "++".parse().expect("sign");
    if u.source != pp || u.target != pp {
        return Err(CellError::WrongType(u.type_string()));
    }
    let paths = g.paths(&pp, Some(g.index_of(v1)?), Some(g.index_of(v2)?));
    if paths.is_empty() {
        return Err(CellError::EmptyBlock(v1, v2));
    }
    let labels = paths
        .iter()
        .map(|p| {
            let st = p.steps();
            let mut s = g.vertices()[st[0].to as usize].label.clone();
            for e in [st[0].edge, st[1].edge] {
                s.push_str(g.edge_label(e as usize));
            }
            s
        })
        .collect();
    let matrix = paths
        .iter()
        .map(|pi| paths.iter().map(|pj| u.get(pj, pi).cloned().unwrap_or_else(|| zero.clone())).collect())
        .collect();
    Ok(BoltzmannBlock { v1, v2, paths, labels, matrix })
}

impl<E> BoltzmannBlock<E> {
    pub fn size(&self) -> usize {
        self.paths.len()
    }
}

impl BoltzmannBlock<QExpr> {
    pub fn eval(&self, prec: u32) -> Result<BoltzmannBlock<Scalar>, ArithError> {
        let matrix = self.matrix.iter().map(|r| r.iter().map(|e| e.eval(prec)).collect()).collect::<Result<_, _>>()?;
        Ok(BoltzmannBlock { v1: self.v1, v2: self.v2, paths: self.paths.clone(), labels: self.labels.clone(), matrix })
    }
}

impl BoltzmannBlock<Scalar> {
    pub fn trace(&self) -> Scalar {
        let prec = self.matrix[0][0].precision();
        (0..self.size()).fold(Scalar::zero(prec), |acc, i| acc.add(&self.matrix[i][i]))
    }
}

impl fmt::Display for BoltzmannBlock<Scalar> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "U^{}_{}  [{}]", self.v1, self.v2, self.labels.join(", "))?;
        for row in &self.matrix {
            let cells: Vec<String> = row
                .iter()
                .map(|x| {
                    let (re, im) = x.to_c64();
                    format!("{re:>10.6}{im:+.6}i")
                })
                .collect();
            writeln!(f, "  {}", cells.join("  "))?;
        }
        Ok(())
    }
}

/// All nonempty blocks `(v1, v2)` of a `Hom(++ -> ++)` element, by vertex id.
pub fn block_index(g: &OrientedGraph) -> Vec<(u32, u32, usize)> {
    let pp: SignString = "++".parse().expect("sign");
    g.paths_by_ends(&pp)
        .into_iter()
        .map(|((a, b), ps)| (g.vertex_id(a), g.vertex_id(b), ps.len()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::qint;
    use crate::gpa::{identity, scale, sub, Balls};

    const TAU: f64 = 7.888609052210118e-31;

    fn approx(e: &QExpr, want: &QExpr) {
        let d = e.eval(256).unwrap().sub(&want.eval(256).unwrap());
        assert!(d.certifies_zero(TAU), "{e} vs {want}");
    }

    #[test]
    fn twenty_one_generators_close_to_sixty_three() {
        let w = load_w().unwrap();
        assert_eq!(w.generators.len(), 21);
        assert_eq!(w.weights.len(), 63);
        assert_eq!(triangles(&w.graph).len(), 63);
        w.check_closure(256, TAU).unwrap();
    }

    #[test]
    fn printed_and_rotated_weights() {
        let w = load_w().unwrap();
        approx(w.weight(1, 6, 9, "α").unwrap(), &qint(2).sqrt());
        assert!(w.weight(1, 6, 9, "β").unwrap().is_zero_literal());
        // rotational formula with lambda_1 = [5]/[3], lambda_6 = [5]
        approx(w.weight(9, 1, 6, "α").unwrap(), &(qint(2) / qint(3)).sqrt());
    }

    #[test]
    fn morphism_has_sixty_two_nonzero_entries() {
        let w = load_w().unwrap().as_morphism();
        assert_eq!(w.len(), 63);
        // zero generators carry whole rotation orbits of zeros
        let c = load_w().unwrap();
        let zero_gens = c.generators.iter().filter(|t| c.weights[t].is_zero_literal()).count();
        assert_eq!(zero_gens, 1);
        let nz = w.entries.values().filter(|e| !e.is_zero_literal()).count();
        assert_eq!(nz, 63 - 3 * zero_gens);
        w.check_keys().unwrap();
    }

    #[test]
    fn bigon() {
        let c = load_w().unwrap();
        let b = Balls::new(256);
        let w = c.as_morphism().eval(256).unwrap();
        let lhs = compose(&b, &dagger(&b, &w), &w).unwrap();
        let rhs = scale(&b, &qint(2).eval(256).unwrap(), &identity(&b, &c.graph, &"-".parse().unwrap()));
        assert!(sub(&b, &lhs, &rhs).unwrap().max_abs_upper() < TAU);
    }

    #[test]
    fn published_block_samples() {
        let c = load_w().unwrap();
        let u = build_u(&c);
        let b19 = block(&c.graph, &u, int(0), 1, 9).unwrap().eval(256).unwrap();
        assert_eq!(b19.labels, ["6α", "6β"]);
        let want = [[qint(2), int(0)], [int(0), int(0)]];
        for i in 0..2 {
            for j in 0..2 {
                assert!(b19.matrix[i][j].sub(&want[i][j].eval(256).unwrap()).certifies_zero(TAU));
            }
        }
        assert!(b19.trace().sub(&qint(2).eval(256).unwrap()).certifies_zero(TAU));
        let b96 = block(&c.graph, &u, int(0), 9, 6).unwrap();
        assert_eq!(b96.size(), 5);
        approx(&b96.matrix[0][0], &(qint(2) / qint(3)));
        let b59 = block(&c.graph, &u, int(0), 5, 9).unwrap();
        approx(&b59.matrix[2][2], &qint(2).inv());
        let b39 = block(&c.graph, &u, int(0), 3, 9).unwrap();
        assert_eq!(b39.labels, ["6α", "6β", "10"]);
    }

    #[test]
    fn block_sizes() {
        let g = e412();
        let idx = block_index(&g);
        let five: Vec<_> = idx.iter().filter(|b| b.2 == 5).collect();
        let three: Vec<_> = idx.iter().filter(|b| b.2 == 3).collect();
        assert_eq!(five.len(), 1);
        assert_eq!((five[0].0, five[0].1), (9, 6));
        for pair in [(3, 9), (4, 9), (5, 9)] {
            assert!(three.iter().any(|b| (b.0, b.1) == pair));
        }
        // oracle: entries of the squared adjacency matrix
        let a = g.adjacency();
        let n = a.len();
        let mut sizes = Vec::new();
        for i in 0..n {
            for j in 0..n {
                let k: u32 = (0..n).map(|m| a[i][m] * a[m][j]).sum();
                if k > 0 {
                    sizes.push((g.vertex_id(i), g.vertex_id(j), k as usize));
                }
            }
        }
        sizes.sort();
        let mut got = idx.clone();
        got.sort();
        assert_eq!(got, sizes);
        assert_eq!(idx.iter().map(|b| b.2 * b.2).sum::<usize>(), 171);
    }

    #[test]
    fn closed_json_round_trip() {
        let c = load_w().unwrap();
        let text = serde_json::to_string(&c.to_closed_json("e412.json")).unwrap();
        let back = CellSystem::from_json(e412(), &text).unwrap();
        assert_eq!(back.weights.len(), 63);
        for (t, w) in &c.weights {
            approx(&back.weights[t], w);
        }
    }
}
