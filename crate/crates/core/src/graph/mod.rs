//! Oriented graphs with Frobenius-Perron data, sign strings and paths.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::arith::{qint, ArithError, QExpr, Scalar};

mod path;

pub use path::{Path, Sign, SignString, Step};

#[derive(Debug, thiserror::Error)]
pub enum GraphError {
    #[error("unknown vertex id {0}")]
    UnknownVertex(u32),
    #[error("duplicate vertex id {0}")]
    DuplicateVertex(u32),
    #[error("parallel edges {0}->{1} need distinct labels")]
    AmbiguousParallel(u32, u32),
    #[error("missing Frobenius-Perron entry for vertex {0}")]
    MissingFp(u32),
    #[error("Frobenius-Perron entry of vertex {0} is not positive")]
    NonPositiveFp(u32),
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error("graph json: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vertex {
    pub id: u32,
    pub label: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub src: u32,
    pub dst: u32,
    #[serde(default)]
    pub label: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct FpEntry {
    vertex: u32,
    expr: QExpr,
}

#[derive(Serialize, Deserialize)]
struct GraphJson {
    #[serde(default = "schema_v1")]
    schema: u32,
    #[serde(default)]
    name: String,
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
    #[serde(default)]
    fp: Vec<FpEntry>,
}

fn schema_v1() -> u32 {
    1
}

/// A finite directed multigraph with a positive weight per vertex.
///
/// Vertices are addressed by their position in [`OrientedGraph::vertices`]
/// (the "index"); the `id` field is only used for display and JSON.
#[derive(Clone, Debug)]
pub struct OrientedGraph {
    name: String,
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
    // edge endpoints as vertex indices
    ends: Vec<(usize, usize)>,
    out_edges: Vec<Vec<usize>>,
    in_edges: Vec<Vec<usize>>,
    fp: Vec<QExpr>,
}

pub const E412_JSON: &str = include_str!("../../data/e412.json");

/// The bundled graph E_4^12.
pub fn e412() -> OrientedGraph {
    OrientedGraph::from_json(E412_JSON).expect("bundled e412.json is valid")
}

impl OrientedGraph {
    pub fn new(name: &str, vertices: Vec<Vertex>, edges: Vec<Edge>, fp: Vec<QExpr>) -> Result<Self, GraphError> {
        let mut index = BTreeMap::new();
        for (i, v) in vertices.iter().enumerate() {
            if index.insert(v.id, i).is_some() {
                return Err(GraphError::DuplicateVertex(v.id));
            }
        }
        let mut ends = Vec::with_capacity(edges.len());
        let mut seen = BTreeMap::new();
        for e in &edges {
            let s = *index.get(&e.src).ok_or(GraphError::UnknownVertex(e.src))?;
            let t = *index.get(&e.dst).ok_or(GraphError::UnknownVertex(e.dst))?;
            if seen.insert((s, t, e.label.clone()), ()).is_some() {
                return Err(GraphError::AmbiguousParallel(e.src, e.dst));
            }
            ends.push((s, t));
        }
        if !fp.is_empty() && fp.len() != vertices.len() {
            return Err(GraphError::MissingFp(vertices[fp.len().min(vertices.len() - 1)].id));
        }
        let n = vertices.len();
        let mut out_edges = vec![Vec::new(); n];
        let mut in_edges = vec![Vec::new(); n];
        for (i, &(s, t)) in ends.iter().enumerate() {
            out_edges[s].push(i);
            in_edges[t].push(i);
        }
        // steps are explored in (neighbour, label) order
        for list in &mut out_edges {
            list.sort_by_key(|&i| (ends[i].1, edges[i].label.clone(), i));
        }
        for list in &mut in_edges {
            list.sort_by_key(|&i| (ends[i].0, edges[i].label.clone(), i));
        }
        let g = OrientedGraph { name: name.to_string(), vertices, edges, ends, out_edges, in_edges, fp };
        for v in 0..g.fp.len() {
            if !g.fp[v].eval(64)?.re.is_positive() {
                return Err(GraphError::NonPositiveFp(g.vertices[v].id));
            }
        }
        Ok(g)
    }

    pub fn from_json(text: &str) -> Result<Self, GraphError> {
        let raw: GraphJson = serde_json::from_str(text)?;
        let mut fp_map: BTreeMap<u32, QExpr> = raw.fp.into_iter().map(|e| (e.vertex, e.expr)).collect();
        let fp = if fp_map.is_empty() {
            Vec::new()
        } else {
            raw.vertices
                .iter()
                .map(|v| fp_map.remove(&v.id).ok_or(GraphError::MissingFp(v.id)))
                .collect::<Result<_, _>>()?
        };
        if let Some((&extra, _)) = fp_map.iter().next() {
            return Err(GraphError::UnknownVertex(extra));
        }
        OrientedGraph::new(&raw.name, raw.vertices, raw.edges, fp)
    }

    pub fn to_json(&self) -> String {
        let raw = GraphJson {
            schema: 1,
            name: self.name.clone(),
            vertices: self.vertices.clone(),
            edges: self.edges.clone(),
            fp: self
                .fp
                .iter()
                .zip(&self.vertices)
                .map(|(e, v)| FpEntry { vertex: v.id, expr: e.clone() })
                .collect(),
        };
        serde_json::to_string_pretty(&raw).expect("graph serializes")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn vertex_id(&self, v: usize) -> u32 {
        self.vertices[v].id
    }

    pub fn index_of(&self, id: u32) -> Result<usize, GraphError> {
        self.vertices.iter().position(|v| v.id == id).ok_or(GraphError::UnknownVertex(id))
    }

    /// `(source index, target index)` of edge `e`.
    pub fn ends(&self, e: usize) -> (usize, usize) {
        self.ends[e]
    }

    pub fn edge_label(&self, e: usize) -> &str {
        &self.edges[e].label
    }

    /// Edges `u -> v`, in label order.
    pub fn edges_between(&self, u: usize, v: usize) -> Vec<usize> {
        self.out_edges[u].iter().copied().filter(|&e| self.ends[e].1 == v).collect()
    }

    /// The unique edge `src -> dst` (by ids), or the one with `label` if parallel.
    pub fn edge(&self, src: u32, dst: u32, label: &str) -> Result<usize, GraphError> {
        let (s, t) = (self.index_of(src)?, self.index_of(dst)?);
        let cands = self.edges_between(s, t);
        match cands.as_slice() {
            [] => Err(GraphError::UnknownVertex(dst)),
            [one] if label.is_empty() || self.edges[*one].label == label => Ok(*one),
            _ => cands
                .into_iter()
                .find(|&e| self.edges[e].label == label)
                .ok_or(GraphError::AmbiguousParallel(src, dst)),
        }
    }

    /// Adjacency matrix with multiplicity, indexed by vertex index.
    pub fn adjacency(&self) -> Vec<Vec<u32>> {
        let n = self.vertex_count();
        let mut a = vec![vec![0; n]; n];
        for &(s, t) in &self.ends {
            a[s][t] += 1;
        }
        a
    }

    /// Groups of parallel edges with more than one member.
    pub fn parallel_families(&self) -> Vec<Vec<usize>> {
        let mut fam: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
        for (i, &st) in self.ends.iter().enumerate() {
            fam.entry(st).or_default().push(i);
        }
        fam.into_values().filter(|f| f.len() > 1).collect()
    }

    pub fn has_fp(&self) -> bool {
        !self.fp.is_empty()
    }

    /// The Frobenius-Perron weight of vertex index `v`.
    pub fn fp(&self, v: usize) -> &QExpr {
        &self.fp[v]
    }

    /// `sqrt(lambda_a / lambda_b)` as an expression.
    pub fn fp_ratio_sqrt(&self, a: usize, b: usize) -> QExpr {
        (self.fp[a].clone() / self.fp[b].clone()).sqrt()
    }

    /// Worst entry of `A.lambda - [3] lambda` and `A^T.lambda - [3] lambda`.
    pub fn fp_residual(&self, prec: u32) -> Result<Scalar, GraphError> {
        if !self.has_fp() {
            return Err(GraphError::MissingFp(self.vertices.first().map_or(0, |v| v.id)));
        }
        let lam: Vec<Scalar> = self.fp.iter().map(|e| e.eval(prec)).collect::<Result<_, _>>()?;
        let d = qint(3).eval(prec)?;
        let mut worst = Scalar::zero(prec);
        for v in 0..self.vertex_count() {
            for list in [&self.out_edges[v], &self.in_edges[v]] {
                let mut s = lam[v].mul(&d).neg();
                for &e in list {
                    let (a, b) = self.ends[e];
                    let other = if a == v { b } else { a };
                    s = s.add(&lam[other]);
                }
                if s.abs_upper() > worst.abs_upper() {
                    worst = s;
                }
            }
        }
        Ok(worst)
    }

    /// Largest real eigenvalue of the adjacency matrix, in double precision.
    pub fn top_eigenvalue(&self) -> f64 {
        let n = self.vertex_count();
        let a = self.adjacency();
        let m = nalgebra::DMatrix::from_fn(n, n, |i, j| a[i][j] as f64);
        m.complex_eigenvalues()
            .iter()
            .filter(|c| c.im.abs() < 1e-9)
            .map(|c| c.re)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    fn steps_from(&self, v: usize, sign: Sign) -> impl Iterator<Item = Step> + '_ {
        let list = match sign {
            Sign::Plus => &self.out_edges[v],
            Sign::Minus => &self.in_edges[v],
        };
        list.iter().map(move |&e| {
            let (s, t) = self.ends[e];
            let to = if sign == Sign::Plus { t } else { s };
            Step { to: to as u32, edge: e as u32, sign }
        })
    }

    /// All `s`-paths, optionally restricted to given endpoints, in lexicographic order.
    pub fn paths(&self, s: &SignString, from: Option<usize>, to: Option<usize>) -> Vec<Path> {
        let starts: Vec<usize> = match from {
            Some(v) => vec![v],
            None => (0..self.vertex_count()).collect(),
        };
        let mut out = Vec::new();
        for v in starts {
            let mut frontier = vec![Path::trivial(v)];
            for &sign in s.signs() {
                let mut next = Vec::new();
                for p in &frontier {
                    for st in self.steps_from(p.end(), sign) {
                        next.push(p.extended(st));
                    }
                }
                frontier = next;
            }
            out.extend(frontier.into_iter().filter(|p| to.is_none_or(|t| p.end() == t)));
        }
        out.sort();
        out
    }

    /// All `s`-paths grouped by `(start, end)`.
    pub fn paths_by_ends(&self, s: &SignString) -> BTreeMap<(usize, usize), Vec<Path>> {
        let mut m: BTreeMap<(usize, usize), Vec<Path>> = BTreeMap::new();
        for p in self.paths(s, None, None) {
            m.entry((p.start(), p.end())).or_default().push(p);
        }
        m
    }

    /// Number of endpoint-matched pairs of an `s`-path and a `t`-path.
    pub fn hom_dim(&self, s: &SignString, t: &SignString) -> usize {
        let a = self.paths_by_ends(s);
        let b = self.paths_by_ends(t);
        a.iter().map(|(k, ps)| ps.len() * b.get(k).map_or(0, Vec::len)).sum()
    }

    /// Human-readable rendering such as `3 -> 6 -> 9b`.
    pub fn show_path(&self, p: &Path) -> String {
        let mut s = self.vertices[p.start()].label.clone();
        for st in p.steps() {
            let arrow = if st.sign == Sign::Plus { " -> " } else { " <- " };
            s.push_str(arrow);
            s.push_str(&self.vertices[st.to as usize].label);
            let l = &self.edges[st.edge as usize].label;
            if !l.is_empty() {
                s.push('^');
                s.push_str(l);
            }
        }
        s
    }

    /// A copy with edge `e` removed.
    pub fn without_edge(&self, e: usize) -> Result<OrientedGraph, GraphError> {
        let mut edges = self.edges.clone();
        edges.remove(e);
        OrientedGraph::new(&self.name, self.vertices.clone(), edges, self.fp.clone())
    }
}

impl fmt::Display for OrientedGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({} vertices, {} edges)", self.name, self.vertex_count(), self.edge_count())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ss(s: &str) -> SignString {
        s.parse().unwrap()
    }

    fn count_walks(a: &[Vec<u32>], n: usize, u: usize, v: usize) -> u64 {
        // independent oracle: dynamic programming over walk lengths
        let mut row = vec![0u64; a.len()];
        row[u] = 1;
        for _ in 0..n {
            let mut next = vec![0u64; a.len()];
            for (i, &c) in row.iter().enumerate() {
                for (j, &m) in a[i].iter().enumerate() {
                    next[j] += c * m as u64;
                }
            }
            row = next;
        }
        row[v]
    }

    #[test]
    fn e412_shape() {
        let g = e412();
        assert_eq!(g.vertex_count(), 11);
        assert_eq!(g.edge_count(), 25);
        let fam = g.parallel_families();
        assert_eq!(fam.len(), 1);
        assert_eq!(fam[0].len(), 2);
        assert_eq!(g.fp(g.index_of(8).unwrap()).to_string(), "1");
    }

    #[test]
    fn fp_equations_certify() {
        let g = e412();
        let r = g.fp_residual(256).unwrap();
        assert!(r.certifies_zero(2f64.powi(-100)), "{r}");
        assert!((g.top_eigenvalue() - (1.0 + 3f64.sqrt())).abs() < 1e-9);
    }

    #[test]
    fn vertex_five_balance() {
        let e = qint(5) + crate::arith::int(1) + qint(3) - qint(3) * qint(3);
        assert!(e.eval(256).unwrap().certifies_zero(2f64.powi(-100)));
    }

    #[test]
    fn deleting_an_edge_breaks_fp() {
        let g = e412();
        for e in 0..g.edge_count() {
            let h = g.without_edge(e).unwrap();
            assert!(h.fp_residual(128).unwrap().abs_lower() > 0.3, "edge {e}");
        }
    }

    #[test]
    fn documented_path_examples() {
        let g = e412();
        let i = |id| g.index_of(id).unwrap();
        let p = g.paths(&ss("++"), Some(i(3)), Some(i(9)));
        let shown: Vec<_> = p.iter().map(|p| g.show_path(p)).collect();
        assert_eq!(shown, ["3 -> 6 -> 9^α", "3 -> 6 -> 9^β", "3 -> 10 -> 9"]);
        assert_eq!(g.paths(&ss("+"), Some(i(8)), Some(i(7))).len(), 1);
        assert_eq!(g.paths(&ss("-"), Some(i(1)), Some(i(9))).len(), 1);
    }

    #[test]
    fn hom_dims() {
        let g = e412();
        assert_eq!(g.hom_dim(&ss(""), &ss("")), 11);
        assert_eq!(g.hom_dim(&ss("-"), &ss("++")), 63);
        // one pair per edge plus the two cross pairs of the double edge
        assert_eq!(g.hom_dim(&ss("+"), &ss("+")), 27);
        assert_eq!(g.hom_dim(&ss("-+"), &ss("-+")), 171);
        assert_eq!(g.hom_dim(&ss("+++"), &ss("+++")), 1251);
    }

    #[test]
    fn json_round_trip() {
        let g = e412();
        let h = OrientedGraph::from_json(&g.to_json()).unwrap();
        assert_eq!(h.edges(), g.edges());
        assert_eq!(h.vertices(), g.vertices());
    }

    #[test]
    fn rejects_unlabelled_parallel_edges() {
        let v = vec![Vertex { id: 1, label: "1".into() }, Vertex { id: 2, label: "2".into() }];
        let e = vec![Edge { src: 1, dst: 2, label: String::new() }, Edge { src: 1, dst: 2, label: String::new() }];
        assert!(matches!(OrientedGraph::new("x", v, e, vec![]), Err(GraphError::AmbiguousParallel(1, 2))));
    }

    proptest! {
        #[test]
        fn path_counts_match_adjacency_powers(n in 0usize..5, u in 0usize..11, v in 0usize..11) {
            let g = e412();
            let s = SignString::from(vec![Sign::Plus; n]);
            let count = g.paths(&s, Some(u), Some(v)).len() as u64;
            prop_assert_eq!(count, count_walks(&g.adjacency(), n, u, v));
        }

        #[test]
        fn reversal_bijection(u in 0usize..11, v in 0usize..11) {
            let g = e412();
            prop_assert_eq!(
                g.paths(&ss("-"), Some(u), Some(v)).len(),
                g.paths(&ss("+"), Some(v), Some(u)).len()
            );
        }
    }
}
