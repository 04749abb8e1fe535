//! Filtrations built from point clouds.
//!
//! Scale convention: both [`rips`] and [`cech`] report ball radii, so an edge
//! enters at half the distance between its endpoints and the two builders
//! agree on the 1-skeleton.

mod meb;

use std::collections::HashMap;

use rayon::prelude::*;

use crate::complex::{MultiFiltration, Simplex};
use crate::error::{Error, Result};

pub use meb::{minimal_enclosing_ball, Ball};

/// A finite point set in R^d, stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct PointCloud {
    dim: usize,
    coords: Vec<f64>,
}

impl PointCloud {
    pub fn new(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("point dimension must be >= 1".into()));
        }
        if coords.len() % dim != 0 {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: coords.len() % dim,
            });
        }
        if coords.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument("non-finite coordinate".into()));
        }
        Ok(PointCloud { dim, coords })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows
            .first()
            .map(Vec::len)
            .ok_or_else(|| Error::Empty("point cloud has no rows".into()))?;
        if let Some(r) = rows.iter().find(|r| r.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: r.len(),
            });
        }
        Self::new(dim, rows.concat())
    }

    /// An empty cloud of the given dimension.
    pub fn empty(dim: usize) -> Self {
        PointCloud {
            dim: dim.max(1),
            coords: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.dim)
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// Multiplies every coordinate by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        PointCloud {
            dim: self.dim,
            coords: self.coords.iter().map(|x| x * factor).collect(),
        }
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        euclidean(self.point(i), self.point(j))
    }
}

pub(crate) fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Per-vertex values of an `m`-dimensional filter, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct VertexFunction {
    m: usize,
    values: Vec<f64>,
}

impl VertexFunction {
    pub fn new(m: usize, values: Vec<f64>) -> Result<Self> {
        if m == 0 || values.len() % m != 0 {
            return Err(Error::InvalidArgument(format!(
                "{} values do not split into rows of {m}",
                values.len()
            )));
        }
        if values.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument("non-finite vertex value".into()));
        }
        Ok(VertexFunction { m, values })
    }

    pub fn scalar(values: Vec<f64>) -> Result<Self> {
        Self::new(1, values)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn len(&self) -> usize {
        self.values.len() / self.m
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, v: usize) -> Option<&[f64]> {
        (v < self.len()).then(|| &self.values[v * self.m..(v + 1) * self.m])
    }

    /// Values of one coordinate across all vertices.
    pub fn column(&self, axis: usize) -> Vec<f64> {
        self.values.iter().skip(axis).step_by(self.m).copied().collect()
    }

    /// Stacks the columns of several functions defined on the same vertices.
    pub fn concat(parts: &[VertexFunction]) -> Result<Self> {
        let n = parts
            .first()
            .map(VertexFunction::len)
            .ok_or_else(|| Error::Empty("no vertex functions".into()))?;
        if parts.iter().any(|p| p.len() != n) {
            return Err(Error::InvalidArgument(
                "vertex functions cover different vertex counts".into(),
            ));
        }
        let m: usize = parts.iter().map(|p| p.m).sum();
        let mut values = Vec::with_capacity(n * m);
        for v in 0..n {
            for p in parts {
                values.extend_from_slice(p.get(v).expect("length checked"));
            }
        }
        Self::new(m, values)
    }
}

/// Upper neighbors (index > v) within the threshold, sorted, with edge values.
struct Neighborhoods {
    upper: Vec<Vec<(u32, f64)>>,
}

impl Neighborhoods {
    fn build(cloud: &PointCloud, max_scale: f64) -> Self {
        let n = cloud.len();
        let upper = (0..n)
            .into_par_iter()
            .map(|i| {
                ((i + 1)..n)
                    .filter_map(|j| {
                        let t = 0.5 * cloud.distance(i, j);
                        (t <= max_scale).then_some((j as u32, t))
                    })
                    .collect()
            })
            .collect();
        Neighborhoods { upper }
    }

    fn weight(&self, a: u32, b: u32) -> Option<f64> {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let row = &self.upper[lo as usize];
        row.binary_search_by_key(&hi, |&(v, _)| v)
            .ok()
            .map(|k| row[k].1)
    }

    fn upper_ids(&self, v: u32) -> impl Iterator<Item = u32> + '_ {
        self.upper[v as usize].iter().map(|&(u, _)| u)
    }
}

fn intersect_sorted(a: &[u32], b: impl Iterator<Item = u32>) -> Vec<u32> {
    let mut out = Vec::new();
    let mut it = a.iter().peekable();
    for y in b {
        while let Some(&&x) = it.peek() {
            if x < y {
                it.next();
            } else {
                break;
            }
        }
        if it.peek() == Some(&&y) {
            out.push(y);
        }
    }
    out
}

fn check_scale(max_scale: f64) -> Result<()> {
    if !(max_scale > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "max_scale must be positive, got {max_scale}"
        )));
    }
    Ok(())
}

/// Vietoris–Rips filtration with `t(σ) = diameter(σ) / 2`, truncated at
/// `max_dim` and at `t ≤ max_scale`. Cliques of the threshold graph are
/// enumerated by ordered expansion over upper neighborhoods.
pub fn rips(cloud: &PointCloud, max_dim: usize, max_scale: f64) -> Result<MultiFiltration> {
    if cloud.is_empty() {
        return Err(Error::Empty("point cloud".into()));
    }
    check_scale(max_scale)?;
    let nb = Neighborhoods::build(cloud, max_scale);
    let n = cloud.len();

    let per_vertex: Vec<Vec<(Simplex, Vec<f64>)>> = (0..n as u32)
        .into_par_iter()
        .map(|v| {
            let mut out = vec![(Simplex::vertex(v), vec![0.0])];
            if max_dim > 0 {
                let cand: Vec<u32> = nb.upper_ids(v).collect();
                let mut stack = vec![v];
                expand_rips(&nb, &mut stack, 0.0, &cand, max_dim, &mut out);
            }
            out
        })
        .collect();
    MultiFiltration::new(1, per_vertex.into_iter().flatten().collect())
}

fn expand_rips(
    nb: &Neighborhoods,
    stack: &mut Vec<u32>,
    value: f64,
    candidates: &[u32],
    max_dim: usize,
    out: &mut Vec<(Simplex, Vec<f64>)>,
) {
    for (k, &c) in candidates.iter().enumerate() {
        let t = stack
            .iter()
            .map(|&u| nb.weight(u, c).expect("candidate adjacent to every vertex"))
            .fold(value, f64::max);
        stack.push(c);
        out.push((Simplex::from_sorted(stack), vec![t]));
        if stack.len() <= max_dim {
            let next = intersect_sorted(&candidates[k + 1..], nb.upper_ids(c));
            if !next.is_empty() {
                expand_rips(nb, stack, t, &next, max_dim, out);
            }
        }
        stack.pop();
    }
}

/// Exact Čech filtration in R^2 or R^3: `t(σ)` is the radius of the minimal
/// enclosing ball of the vertices of σ. Simplices with `t(σ) > max_scale` are
/// dropped.
pub fn cech(cloud: &PointCloud, max_dim: usize, max_scale: f64) -> Result<MultiFiltration> {
    let d = cloud.dim();
    if d != 2 && d != 3 {
        return Err(Error::UnsupportedDimension(d));
    }
    if max_dim > d {
        return Err(Error::InvalidArgument(format!(
            "max_dim {max_dim} exceeds ambient dimension {d}"
        )));
    }
    if cloud.is_empty() {
        return Err(Error::Empty("point cloud".into()));
    }
    check_scale(max_scale)?;
    let nb = Neighborhoods::build(cloud, max_scale);
    let n = cloud.len();
    let pt = |v: u32| -> meb::P3 {
        let p = cloud.point(v as usize);
        [p[0], p[1], if d == 3 { p[2] } else { 0.0 }]
    };

    let mut values: HashMap<Simplex, f64> = HashMap::new();
    // (simplex, candidates for extension)
    let mut level: Vec<(Simplex, Vec<u32>)> = Vec::with_capacity(n);
    for v in 0..n as u32 {
        values.insert(Simplex::vertex(v), 0.0);
        level.push((Simplex::vertex(v), nb.upper_ids(v).collect()));
    }
    for _dim in 1..=max_dim {
        let computed: Vec<Vec<(Simplex, f64, Vec<u32>)>> = level
            .par_iter()
            .map(|(s, cand)| {
                let mut out = Vec::new();
                for (k, &c) in cand.iter().enumerate() {
                    let mut verts = s.vertices().to_vec();
                    verts.push(c);
                    let pts: Vec<meb::P3> = verts.iter().map(|&v| pt(v)).collect();
                    let r = minimal_enclosing_ball(&pts).radius;
                    if r > max_scale {
                        continue;
                    }
                    let next = intersect_sorted(&cand[k + 1..], nb.upper_ids(c));
                    out.push((Simplex::from_sorted(&verts), r, next));
                }
                out
            })
            .collect();
        let mut next_level = Vec::new();
        for (s, r, cand) in computed.into_iter().flatten() {
            // Monotone and closed even when rounding disagrees between a
            // simplex and one of its facets.
            let mut t = r;
            let mut closed = true;
            for f in s.facets() {
                match values.get(&f) {
                    Some(&tf) => t = t.max(tf),
                    None => closed = false,
                }
            }
            if closed && t <= max_scale {
                values.insert(s.clone(), t);
                next_level.push((s, cand));
            }
        }
        level = next_level;
        if level.is_empty() {
            break;
        }
    }
    MultiFiltration::new(1, values.into_iter().map(|(s, t)| (s, vec![t])).collect())
}

/// Extends `base` by vertex functions: the new value of σ is
/// `(t_base(σ), max_{v∈σ} f_1(v), …, max_{v∈σ} f_k(v))`.
pub fn function_extension(base: &MultiFiltration, f: &VertexFunction) -> Result<MultiFiltration> {
    let m_base = base.m();
    let m = m_base + f.m();
    let mut values = Vec::with_capacity(base.len() * m);
    for (s, t) in base.iter() {
        values.extend_from_slice(t);
        let start = values.len();
        for (k, &v) in s.vertices().iter().enumerate() {
            let fv = f.get(v as usize).ok_or(Error::MissingVertexValue(v))?;
            if k == 0 {
                values.extend_from_slice(fv);
            } else {
                for (dst, &x) in values[start..].iter_mut().zip(fv) {
                    *dst = dst.max(x);
                }
            }
        }
    }
    base.with_values(m, values)
}

/// Post-composition applied to the density estimate in [`codensity`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Decreasing {
    /// `x ↦ −x`
    Neg,
    /// `x ↦ exp(−x²)`
    Gauss,
}

impl std::str::FromStr for Decreasing {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "neg" => Ok(Decreasing::Neg),
            "gauss" => Ok(Decreasing::Gauss),
            other => Err(Error::InvalidArgument(format!(
                "unknown post-composition `{other}` (expected neg or gauss)"
            ))),
        }
    }
}

impl std::fmt::Display for Decreasing {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Decreasing::Neg => "neg",
            Decreasing::Gauss => "gauss",
        })
    }
}

/// Gaussian KDE at every data point, post-composed with a decreasing map.
///
/// The estimate is the unnormalized average
/// `(1/n) Σ_i exp(−‖x − x_i‖² / (2h²))`, so it lies in `(0, 1]`.
pub fn codensity(cloud: &PointCloud, bandwidth: f64, post: Decreasing) -> Result<VertexFunction> {
    if !(bandwidth > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "bandwidth must be positive, got {bandwidth}"
        )));
    }
    let n = cloud.len();
    let denom = 2.0 * bandwidth * bandwidth;
    let values = (0..n)
        .into_par_iter()
        .map(|i| {
            let x = cloud.point(i);
            let sum: f64 = cloud
                .points()
                .map(|y| {
                    let d2: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
                    (-d2 / denom).exp()
                })
                .sum();
            let kde = sum / n as f64;
            match post {
                Decreasing::Neg => -kde,
                Decreasing::Gauss => (-kde * kde).exp(),
            }
        })
        .collect();
    VertexFunction::scalar(values)
}

/// Median pairwise distance over at most 200 evenly strided points.
pub fn default_bandwidth(cloud: &PointCloud) -> Result<f64> {
    let n = cloud.len();
    if n < 2 {
        return Err(Error::Empty(
            "need at least two points to pick a bandwidth".into(),
        ));
    }
    let k = n.min(200);
    let idx: Vec<usize> = (0..k).map(|i| i * n / k).collect();
    let mut d = Vec::with_capacity(k * (k - 1) / 2);
    for a in 0..k {
        for b in a + 1..k {
            d.push(cloud.distance(idx[a], idx[b]));
        }
    }
    d.sort_by(f64::total_cmp);
    let mid = d.len() / 2;
    let h = if d.len() % 2 == 1 {
        d[mid]
    } else {
        0.5 * (d[mid - 1] + d[mid])
    };
    if h > 0.0 {
        Ok(h)
    } else {
        Err(Error::Numeric("all sampled points coincide".into()))
    }
}
