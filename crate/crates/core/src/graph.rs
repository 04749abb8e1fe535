//! Filter functions on graphs and the lower-star filtrations they induce.
//!
//! Descriptors: heat kernel signature on the symmetric normalized Laplacian,
//! combinatorial Forman curvature `4 − deg(u) − deg(v)`, unnormalized edge
//! betweenness (Brandes) and closeness centrality.

use std::collections::{HashSet, VecDeque};

use rayon::prelude::*;

use crate::builders::VertexFunction;
use crate::complex::{MultiFiltration, Simplex};
use crate::error::{Error, Result};
use crate::linalg::{symmetric_eigen, Eigen, SymMatrix};

/// Simple undirected graph on vertices `0..n`.
#[derive(Clone, Debug, PartialEq)]
pub struct Graph {
    n: usize,
    edges: Vec<(u32, u32)>,
    adjacency: Vec<Vec<(u32, usize)>>,
    attributes: Option<Vec<Vec<f64>>>,
}

impl Graph {
    /// Edges are stored as `(min, max)` pairs in lexicographic order.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (u32, u32)>) -> Result<Self> {
        let mut list = Vec::new();
        let mut seen = HashSet::new();
        for (a, b) in edges {
            if a == b {
                return Err(Error::InvalidArgument(format!("self-loop at vertex {a}")));
            }
            let e = (a.min(b), a.max(b));
            if e.1 as usize >= n {
                return Err(Error::InvalidArgument(format!(
                    "edge ({a}, {b}) references a vertex >= n = {n}"
                )));
            }
            if !seen.insert(e) {
                return Err(Error::InvalidArgument(format!("duplicate edge ({}, {})", e.0, e.1)));
            }
            list.push(e);
        }
        list.sort_unstable();
        let mut adjacency = vec![Vec::new(); n];
        for (id, &(a, b)) in list.iter().enumerate() {
            adjacency[a as usize].push((b, id));
            adjacency[b as usize].push((a, id));
        }
        for row in &mut adjacency {
            row.sort_unstable();
        }
        Ok(Graph {
            n,
            edges: list,
            adjacency,
            attributes: None,
        })
    }

    /// Attaches per-vertex attribute vectors (one row per vertex).
    pub fn with_attributes(mut self, rows: Vec<Vec<f64>>) -> Result<Self> {
        if rows.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: rows.len(),
            });
        }
        self.attributes = Some(rows);
        Ok(self)
    }

    pub fn attributes(&self) -> Option<&[Vec<f64>]> {
        self.attributes.as_deref()
    }

    /// Column `k` of the vertex attributes as a filter.
    pub fn attribute_function(&self, k: usize) -> Result<VertexFunction> {
        let rows = self
            .attributes
            .as_ref()
            .ok_or_else(|| Error::InvalidArgument("graph has no vertex attributes".into()))?;
        let col = rows
            .iter()
            .map(|r| {
                r.get(k)
                    .copied()
                    .ok_or_else(|| Error::InvalidArgument(format!("attribute column {k} missing")))
            })
            .collect::<Result<Vec<_>>>()?;
        VertexFunction::scalar(col)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    /// Neighbors of `v` with the ids of the connecting edges.
    pub fn neighbors(&self, v: usize) -> &[(u32, usize)] {
        &self.adjacency[v]
    }
}

/// One value per edge, aligned with [`Graph::edges`].
#[derive(Clone, Debug, PartialEq)]
pub struct EdgeFunction(pub Vec<f64>);

/// `L = I − D^{−1/2} A D^{−1/2}`; isolated vertices keep `L_vv = 1`.
pub fn normalized_laplacian(g: &Graph) -> SymMatrix {
    let mut l = SymMatrix::identity(g.n);
    for &(a, b) in &g.edges {
        let (a, b) = (a as usize, b as usize);
        let w = -1.0 / ((g.degree(a) * g.degree(b)) as f64).sqrt();
        l.set(a, b, w);
        l.set(b, a, w);
    }
    l
}

pub fn laplacian_spectrum(g: &Graph) -> Result<Eigen> {
    symmetric_eigen(&normalized_laplacian(g))
}

/// Heat kernel signature `hks_t(v) = Σ_k exp(−t λ_k) ψ_k(v)²`.
pub fn hks(g: &Graph, t: f64) -> Result<VertexFunction> {
    if !(t > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "diffusion time must be positive, got {t}"
        )));
    }
    if g.n == 0 {
        return Err(Error::Empty("graph has no vertices".into()));
    }
    let eig = laplacian_spectrum(g)?;
    Ok(hks_from_spectrum(&eig, t))
}

pub fn hks_from_spectrum(eig: &Eigen, t: f64) -> VertexFunction {
    let n = eig.values.len();
    let mut out = vec![0.0; n];
    for (lambda, psi) in eig.values.iter().zip(&eig.vectors) {
        let w = (-t * lambda).exp();
        for (o, p) in out.iter_mut().zip(psi) {
            *o += w * p * p;
        }
    }
    VertexFunction::scalar(out).expect("finite heat values")
}

pub fn forman_curvature(g: &Graph) -> EdgeFunction {
    EdgeFunction(
        g.edges
            .iter()
            .map(|&(a, b)| 4.0 - g.degree(a as usize) as f64 - g.degree(b as usize) as f64)
            .collect(),
    )
}

/// Single-source Brandes pass: adds every ordered pair (s, t) contribution
/// to `acc`.
fn brandes_from(g: &Graph, s: usize, acc: &mut [f64]) {
    let n = g.n;
    let mut sigma = vec![0.0f64; n];
    let mut dist = vec![usize::MAX; n];
    let mut order = Vec::with_capacity(n);
    let mut preds: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    sigma[s] = 1.0;
    dist[s] = 0;
    let mut queue = VecDeque::from([s]);
    while let Some(v) = queue.pop_front() {
        order.push(v);
        for &(w, eid) in &g.adjacency[v] {
            let w = w as usize;
            if dist[w] == usize::MAX {
                dist[w] = dist[v] + 1;
                queue.push_back(w);
            }
            if dist[w] == dist[v] + 1 {
                sigma[w] += sigma[v];
                preds[w].push((v, eid));
            }
        }
    }
    let mut delta = vec![0.0f64; n];
    for &w in order.iter().rev() {
        for &(v, eid) in &preds[w] {
            let c = sigma[v] / sigma[w] * (1.0 + delta[w]);
            acc[eid] += c;
            delta[v] += c;
        }
    }
}

const SOURCE_BLOCK: usize = 32;

/// Unnormalized edge betweenness over unordered vertex pairs; pairs in
/// different components contribute nothing. Sources are processed in fixed
/// blocks whose partial sums are added in block order, so the result does
/// not depend on the thread count.
pub fn edge_betweenness(g: &Graph) -> EdgeFunction {
    let m = g.edges.len();
    let sources: Vec<usize> = (0..g.n).collect();
    let partials: Vec<Vec<f64>> = sources
        .par_chunks(SOURCE_BLOCK)
        .map(|block| {
            let mut acc = vec![0.0; m];
            for &s in block {
                brandes_from(g, s, &mut acc);
            }
            acc
        })
        .collect();
    let mut total = vec![0.0; m];
    for p in partials {
        for (t, x) in total.iter_mut().zip(p) {
            *t += x;
        }
    }
    // each unordered pair was counted from both endpoints
    EdgeFunction(total.into_iter().map(|x| 0.5 * x).collect())
}

fn bfs_distances(g: &Graph, s: usize) -> Vec<usize> {
    let mut dist = vec![usize::MAX; g.n];
    dist[s] = 0;
    let mut queue = VecDeque::from([s]);
    while let Some(v) = queue.pop_front() {
        for &(w, _) in &g.adjacency[v] {
            let w = w as usize;
            if dist[w] == usize::MAX {
                dist[w] = dist[v] + 1;
                queue.push_back(w);
            }
        }
    }
    dist
}

/// Closeness within the vertex's component: `(n_v − 1) / Σ dist(v, u)`;
/// isolated vertices get 0.
pub fn closeness_centrality(g: &Graph) -> VertexFunction {
    let values = (0..g.n)
        .into_par_iter()
        .map(|v| {
            let dist = bfs_distances(g, v);
            let (reached, total) = dist
                .iter()
                .filter(|&&d| d != usize::MAX)
                .fold((0usize, 0usize), |(c, s), &d| (c + 1, s + d));
            if total == 0 {
                0.0
            } else {
                (reached - 1) as f64 / total as f64
            }
        })
        .collect();
    VertexFunction::scalar(values).expect("finite closeness values")
}

/// Sublevel filtration of the 1-skeleton of `g` by the given filters.
///
/// Vertex-function axes: vertices keep their values and edges take the max of
/// their endpoints. Edge-function axes: edges keep their values and vertices
/// take the min over incident edges (an isolated vertex takes the global min
/// of that edge function, or 0 when the graph has no edges).
pub fn graph_lower_star(
    g: &Graph,
    vfs: &[VertexFunction],
    efs: &[EdgeFunction],
) -> Result<MultiFiltration> {
    if vfs.is_empty() && efs.is_empty() {
        return Err(Error::Empty("graph filtration needs at least one function".into()));
    }
    for vf in vfs {
        if vf.len() != g.n {
            return Err(Error::DimensionMismatch {
                expected: g.n,
                got: vf.len(),
            });
        }
    }
    for ef in efs {
        if ef.0.len() != g.edges.len() {
            return Err(Error::DimensionMismatch {
                expected: g.edges.len(),
                got: ef.0.len(),
            });
        }
    }
    let m: usize = vfs.iter().map(VertexFunction::m).sum::<usize>() + efs.len();

    let mut cells = Vec::with_capacity(g.n + g.edges.len());
    for v in 0..g.n {
        let mut t = Vec::with_capacity(m);
        for vf in vfs {
            t.extend_from_slice(vf.get(v).expect("length checked"));
        }
        for ef in efs {
            let incident = g.adjacency[v].iter().map(|&(_, eid)| ef.0[eid]);
            let low = incident.fold(f64::INFINITY, f64::min);
            let low = if low.is_finite() {
                low
            } else {
                let global = ef.0.iter().copied().fold(f64::INFINITY, f64::min);
                if global.is_finite() {
                    global
                } else {
                    0.0
                }
            };
            t.push(low);
        }
        cells.push((Simplex::vertex(v as u32), t));
    }
    for (eid, &(a, b)) in g.edges.iter().enumerate() {
        let mut t = Vec::with_capacity(m);
        for vf in vfs {
            let fa = vf.get(a as usize).expect("length checked");
            let fb = vf.get(b as usize).expect("length checked");
            t.extend(fa.iter().zip(fb).map(|(x, y)| x.max(*y)));
        }
        for ef in efs {
            t.push(ef.0[eid]);
        }
        cells.push((Simplex::edge(a, b), t));
    }
    MultiFiltration::new(m, cells)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::validate;

    fn path3() -> Graph {
        Graph::new(3, [(0, 1), (1, 2)]).unwrap()
    }

    #[test]
    fn graph_validation() {
        assert!(Graph::new(2, [(0, 0)]).is_err());
        assert!(Graph::new(2, [(0, 1), (1, 0)]).is_err());
        assert!(Graph::new(2, [(0, 2)]).is_err());
        let g = Graph::new(3, [(2, 1), (0, 1)]).unwrap();
        assert_eq!(g.edges(), &[(0, 1), (1, 2)]);
    }

    #[test]
    fn hks_on_single_edge() {
        let g = Graph::new(2, [(0, 1)]).unwrap();
        let h = hks(&g, 1.0).unwrap().column(0);
        let expect = (1.0 + (-2.0f64).exp()) / 2.0;
        assert!((h[0] - expect).abs() < 1e-10);
        assert!((h[1] - expect).abs() < 1e-10);
        assert!((expect - 0.56767).abs() < 1e-5);
    }

    #[test]
    fn hks_without_edges_is_exp_minus_t() {
        let g = Graph::new(4, []).unwrap();
        for v in hks(&g, 2.5).unwrap().column(0) {
            assert!((v - (-2.5f64).exp()).abs() < 1e-14);
        }
        assert!(hks(&g, 0.0).is_err());
        assert!(hks(&Graph::new(0, []).unwrap(), 1.0).is_err());
    }

    #[test]
    fn hks_sums_to_heat_trace_and_eigenpairs_are_accurate() {
        let g = Graph::new(
            7,
            [(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 5), (5, 3), (1, 4)],
        )
        .unwrap();
        let eig = laplacian_spectrum(&g).unwrap();
        let l = normalized_laplacian(&g);
        for (lambda, psi) in eig.values.iter().zip(&eig.vectors) {
            assert!(*lambda >= -1e-8 && *lambda <= 2.0 + 1e-8);
            let lp = l.mul_vec(psi);
            for (a, b) in lp.iter().zip(psi) {
                assert!((a - lambda * b).abs() < 1e-8);
            }
        }
        let t = 0.7;
        let total: f64 = hks(&g, t).unwrap().column(0).iter().sum();
        let trace: f64 = eig.values.iter().map(|l| (-t * l).exp()).sum();
        assert!((total - trace).abs() < 1e-10);
    }

    #[test]
    fn forman_examples() {
        assert_eq!(forman_curvature(&Graph::new(2, [(0, 1)]).unwrap()).0, vec![2.0]);
        assert_eq!(forman_curvature(&path3()).0, vec![1.0, 1.0]);
        let cycle = Graph::new(5, (0..5).map(|i| (i, (i + 1) % 5))).unwrap();
        assert!(forman_curvature(&cycle).0.iter().all(|&x| x == 0.0));
    }

    /// All-pairs oracle: enumerate shortest paths explicitly by DFS along
    /// BFS layers and count edge usage.
    fn betweenness_oracle(g: &Graph) -> Vec<f64> {
        let mut out = vec![0.0; g.edges().len()];
        for s in 0..g.n() {
            let dist = bfs_distances(g, s);
            for t in s + 1..g.n() {
                if dist[t] == usize::MAX {
                    continue;
                }
                let mut paths: Vec<Vec<usize>> = Vec::new();
                let mut stack = vec![(s, vec![])];
                while let Some((v, used)) = stack.pop() {
                    if v == t {
                        paths.push(used);
                        continue;
                    }
                    for &(w, eid) in g.neighbors(v) {
                        let w = w as usize;
                        let dw = bfs_distances(g, w)[t];
                        if dist[w] == dist[v] + 1 && dw != usize::MAX && dist[w] + dw == dist[t] {
                            let mut u = used.clone();
                            u.push(eid);
                            stack.push((w, u));
                        }
                    }
                }
                let total = paths.len() as f64;
                for p in paths {
                    for e in p {
                        out[e] += 1.0 / total;
                    }
                }
            }
        }
        out
    }

    #[test]
    fn betweenness_examples() {
        assert_eq!(edge_betweenness(&path3()).0, vec![2.0, 2.0]);
        assert_eq!(edge_betweenness(&Graph::new(2, [(0, 1)]).unwrap()).0, vec![1.0]);
        let tri = Graph::new(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
        assert_eq!(edge_betweenness(&tri).0, vec![1.0; 3]);
    }

    #[test]
    fn betweenness_matches_path_enumeration() {
        let g = Graph::new(
            9,
            [
                (0, 1),
                (0, 2),
                (1, 3),
                (2, 3),
                (3, 4),
                (4, 5),
                (4, 6),
                (5, 7),
                (6, 7),
                (1, 2),
            ],
        )
        .unwrap();
        let got = edge_betweenness(&g).0;
        let oracle = betweenness_oracle(&g);
        for (a, b) in got.iter().zip(&oracle) {
            assert!((a - b).abs() < 1e-12);
        }
        // Σ_e b(e) = Σ over connected pairs of dist(s, t)
        let mut dsum = 0.0;
        for s in 0..g.n() {
            let d = bfs_distances(&g, s);
            for t in s + 1..g.n() {
                if d[t] != usize::MAX {
                    dsum += d[t] as f64;
                }
            }
        }
        assert!((got.iter().sum::<f64>() - dsum).abs() < 1e-9);
    }

    #[test]
    fn closeness_examples() {
        assert_eq!(closeness_centrality(&Graph::new(2, [(0, 1)]).unwrap()).column(0), vec![1.0, 1.0]);
        let c = closeness_centrality(&path3()).column(0);
        assert_eq!(c, vec![2.0 / 3.0, 1.0, 2.0 / 3.0]);
        assert_eq!(closeness_centrality(&Graph::new(1, []).unwrap()).column(0), vec![0.0]);
    }

    #[test]
    fn lower_star_examples() {
        let k2 = Graph::new(2, [(0, 1)]).unwrap();
        let vf = VertexFunction::scalar(vec![1.0, 3.0]).unwrap();
        let f = graph_lower_star(&k2, &[vf], &[]).unwrap();
        let vals: Vec<_> = f.iter().map(|(s, t)| (s.to_string(), t[0])).collect();
        assert_eq!(
            vals,
            vec![("{0}".into(), 1.0), ("{1}".into(), 3.0), ("{0,1}".into(), 3.0)]
        );

        let f = graph_lower_star(&k2, &[], &[EdgeFunction(vec![5.0])]).unwrap();
        assert!(f.axis_values(0).all(|x| x == 5.0));
        assert!(graph_lower_star(&k2, &[], &[]).is_err());

        let g = Graph::new(5, [(0, 1), (1, 2), (2, 3)]).unwrap();
        let f = graph_lower_star(&g, &[hks(&g, 1.0).unwrap()], &[forman_curvature(&g)]).unwrap();
        assert_eq!(f.m(), 2);
        assert!(validate(&f).is_valid());
        // isolated vertex 4 takes the global min of the edge function
        assert_eq!(f.value(4)[1], 0.0);
    }
}
