//! Seeded synthetic data, a Monte-Carlo harness, and a small
//! PCA / k-means / 1-NN toolkit.
//!
//! All randomness comes from ChaCha8 seeded with a `u64`; independent
//! sub-streams (restarts, replications) are split off with `set_stream`, so a
//! result depends only on its parameters and seed, never on scheduling.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Poisson, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::builders::PointCloud;
use crate::error::{Error, Result};
use crate::linalg::{symmetric_eigen, SymMatrix};

/// Generator for `(seed, stream)`.
pub fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

/// Iterates the orbit map from `(x0, y0)`:
/// `x ← x + ρ y (1 − y) mod 1`, then `y ← y + ρ x (1 − x) mod 1` using the
/// updated `x`. Returns `n` points starting with `(x0, y0)`.
pub fn orbit_from(x0: f64, y0: f64, rho: f64, n: usize) -> PointCloud {
    let mut coords = Vec::with_capacity(2 * n);
    let (mut x, mut y) = (x0, y0);
    for _ in 0..n {
        coords.push(x);
        coords.push(y);
        x = (x + rho * y * (1.0 - y)).rem_euclid(1.0);
        y = (y + rho * x * (1.0 - x)).rem_euclid(1.0);
    }
    PointCloud::new(2, coords).expect("orbit coordinates are finite")
}

/// An orbit of `n` points from a uniform random start in `[0, 1)²`.
pub fn sample_orbit(rho: f64, n: usize, seed: u64) -> Result<PointCloud> {
    if !(rho > 0.0 && rho.is_finite()) {
        return Err(Error::InvalidArgument(format!("rho must be positive, got {rho}")));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("orbit needs n >= 1".into()));
    }
    let mut r = rng(seed, 0);
    let (x0, y0) = (r.random::<f64>(), r.random::<f64>());
    Ok(orbit_from(x0, y0, rho, n))
}

/// Poisson process of the given intensity on `[0, side]^d`.
pub fn sample_poisson(intensity: f64, side: f64, d: usize, seed: u64) -> Result<PointCloud> {
    if !(intensity > 0.0 && intensity.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "intensity must be positive, got {intensity}"
        )));
    }
    if !(side >= 0.0 && side.is_finite()) || d == 0 {
        return Err(Error::InvalidArgument(format!(
            "need a cube side >= 0 and d >= 1, got side {side}, d {d}"
        )));
    }
    let mean = intensity * side.powi(d as i32);
    if mean == 0.0 {
        return Ok(PointCloud::empty(d));
    }
    let mut r = rng(seed, 0);
    let count = Poisson::new(mean)
        .map_err(|e| Error::InvalidArgument(format!("poisson mean {mean}: {e}")))?
        .sample(&mut r) as usize;
    let coords = (0..count * d).map(|_| r.random::<f64>() * side).collect();
    PointCloud::new(d, coords)
}

fn torus_point(theta: f64, phi: f64) -> [f64; 3] {
    let ring = 2.0 + theta.cos();
    [ring * phi.cos(), ring * phi.sin(), theta.sin()]
}

/// Torus sample together with the number of proposals drawn.
#[derive(Clone, Debug)]
pub struct TorusSample {
    pub cloud: PointCloud,
    pub proposals: usize,
}

/// Points on the torus `((2 + cos θ) cos φ, (2 + cos θ) sin φ, sin θ)`.
///
/// Non-uniform draws `(θ, φ)` uniformly; uniform (with respect to surface
/// area) accepts a proposal `θ` with probability `(2 + cos θ) / 3`.
pub fn sample_torus_with_stats(n: usize, uniform: bool, seed: u64) -> TorusSample {
    let mut r = rng(seed, 0);
    let mut coords = Vec::with_capacity(3 * n);
    let mut proposals = 0;
    while coords.len() < 3 * n {
        proposals += 1;
        let theta = r.random::<f64>() * 2.0 * PI;
        let phi = r.random::<f64>() * 2.0 * PI;
        if uniform && r.random::<f64>() * 3.0 > 2.0 + theta.cos() {
            continue;
        }
        coords.extend(torus_point(theta, phi));
    }
    TorusSample {
        cloud: PointCloud::new(3, coords).expect("finite coordinates"),
        proposals,
    }
}

pub fn sample_torus(n: usize, uniform: bool, seed: u64) -> PointCloud {
    sample_torus_with_stats(n, uniform, seed).cloud
}

/// Spread of the azimuth in the non-uniform sphere sampler.
pub const SPHERE_PHI_SIGMA: f64 = 1.0;

/// Points on the unit sphere. Uniform samples normalize Gaussian vectors;
/// non-uniform samples take `θ ~ U[0, π]` and `φ ~ N(π, SPHERE_PHI_SIGMA)`
/// in spherical coordinates.
pub fn sample_sphere(n: usize, uniform: bool, seed: u64) -> PointCloud {
    let mut r = rng(seed, 0);
    let mut coords = Vec::with_capacity(3 * n);
    let azimuth = Normal::new(PI, SPHERE_PHI_SIGMA).expect("positive sigma");
    while coords.len() < 3 * n {
        if uniform {
            let v: [f64; 3] = std::array::from_fn(|_| StandardNormal.sample(&mut r));
            let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
            if norm < 1e-12 {
                continue;
            }
            coords.extend(v.map(|x| x / norm));
        } else {
            let theta = r.random::<f64>() * PI;
            let phi: f64 = azimuth.sample(&mut r);
            coords.extend([theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()]);
        }
    }
    PointCloud::new(3, coords).expect("finite coordinates")
}

/// Clutter generator parameters. The defaults make the lines dense enough
/// to leave a clear excess of very short edges in the one-line class, while
/// mid-scale edge counts stay dominated by the noise.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClutterParams {
    pub n_noise: usize,
    /// Points placed on lines in total, split as evenly as possible among
    /// the lines so that every class has the same number of points.
    pub n_line: usize,
    pub lines: usize,
    pub jitter: f64,
}

impl ClutterParams {
    pub fn with_lines(lines: usize) -> Self {
        ClutterParams {
            lines,
            ..Self::default()
        }
    }
}

impl Default for ClutterParams {
    fn default() -> Self {
        ClutterParams {
            n_noise: 400,
            n_line: 150,
            lines: 1,
            jitter: 0.005,
        }
    }
}

const SEGMENTS: [([f64; 2], [f64; 2]); 2] = [([0.1, 0.1], [0.9, 0.9]), ([0.1, 0.9], [0.9, 0.1])];

/// Uniform noise in `[0, 1]²` plus points along one or two diagonal
/// segments with Gaussian perpendicular jitter. With `lines = 0` only the
/// noise is drawn.
pub fn sample_clutter(params: &ClutterParams, seed: u64) -> Result<PointCloud> {
    if params.lines > 2 {
        return Err(Error::InvalidArgument(format!(
            "clutter supports 0, 1 or 2 lines, got {}",
            params.lines
        )));
    }
    if !(params.jitter >= 0.0 && params.jitter.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "jitter must be >= 0, got {}",
            params.jitter
        )));
    }
    let mut r = rng(seed, 0);
    let mut coords = Vec::new();
    for _ in 0..params.n_noise {
        coords.push(r.random::<f64>());
        coords.push(r.random::<f64>());
    }
    for l in 0..params.lines {
        let count = params.n_line / params.lines + usize::from(l < params.n_line % params.lines);
        let (a, b) = SEGMENTS[l];
        let dir = [b[0] - a[0], b[1] - a[1]];
        let len = (dir[0] * dir[0] + dir[1] * dir[1]).sqrt();
        let normal = [-dir[1] / len, dir[0] / len];
        for _ in 0..count {
            let u: f64 = r.random();
            let off = if params.jitter > 0.0 {
                let z: f64 = StandardNormal.sample(&mut r);
                params.jitter * z
            } else {
                0.0
            };
            coords.push(a[0] + u * dir[0] + off * normal[0]);
            coords.push(a[1] + u * dir[1] + off * normal[1]);
        }
    }
    PointCloud::new(2, coords)
}

/// Point-process scaling regimes for limit-theorem experiments.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Regime {
    /// Rescale an `n`-point sample in `[0, 1]^d` by `n^{1/d}` so the
    /// connectivity radius stays of order one.
    Critical { d: usize },
    /// Keep coordinates and shrink the scale as `r_n = n^{−α}`.
    Sparse { alpha: f64 },
}

impl Regime {
    pub fn rescale(&self, cloud: &PointCloud, n: usize) -> PointCloud {
        match *self {
            Regime::Critical { d } => cloud.scaled((n as f64).powf(1.0 / d as f64)),
            Regime::Sparse { .. } => cloud.clone(),
        }
    }

    /// Multiplier applied to filtration scales at sample size `n`.
    pub fn radius(&self, n: usize) -> f64 {
        match *self {
            Regime::Critical { .. } => 1.0,
            Regime::Sparse { alpha } => (n as f64).powf(-alpha),
        }
    }
}

/// Per-size pointwise statistics of a descriptor across replications.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct McSummary {
    pub n: usize,
    pub replications: usize,
    pub mean: Vec<f64>,
    pub variance: Vec<f64>,
}

/// Mean and unbiased variance per coordinate. Values are sorted before
/// summation so the result does not depend on replication order.
pub fn summarize(n: usize, samples: &[Vec<f64>]) -> Result<McSummary> {
    let r = samples.len();
    if r < 2 {
        return Err(Error::InvalidArgument("need at least 2 replications".into()));
    }
    let width = samples[0].len();
    if let Some(bad) = samples.iter().find(|s| s.len() != width) {
        return Err(Error::DimensionMismatch {
            expected: width,
            got: bad.len(),
        });
    }
    let mut mean = Vec::with_capacity(width);
    let mut variance = Vec::with_capacity(width);
    let mut column = vec![0.0; r];
    for j in 0..width {
        for (c, s) in column.iter_mut().zip(samples) {
            *c = s[j];
        }
        column.sort_by(f64::total_cmp);
        let mu = column.iter().sum::<f64>() / r as f64;
        let mut dev: Vec<f64> = column.iter().map(|x| (x - mu) * (x - mu)).collect();
        dev.sort_by(f64::total_cmp);
        mean.push(mu);
        variance.push(dev.iter().sum::<f64>() / (r - 1) as f64);
    }
    Ok(McSummary {
        n,
        replications: r,
        mean,
        variance,
    })
}

/// Runs `pipeline(n, rng)` for `replications` independent streams at each
/// size in `sizes`. Replication `i` at size index `k` uses stream
/// `k · 2^32 + i`, so results are independent of thread scheduling.
pub fn mc_harness<F>(sizes: &[usize], replications: usize, seed: u64, pipeline: F) -> Result<Vec<McSummary>>
where
    F: Fn(usize, &mut ChaCha8Rng) -> Result<Vec<f64>> + Sync,
{
    if replications < 2 {
        return Err(Error::InvalidArgument("need at least 2 replications".into()));
    }
    sizes
        .iter()
        .enumerate()
        .map(|(k, &n)| {
            let samples = (0..replications)
                .into_par_iter()
                .map(|i| pipeline(n, &mut rng(seed, ((k as u64) << 32) + i as u64)))
                .collect::<Result<Vec<_>>>()?;
            summarize(n, &samples)
        })
        .collect()
}

fn check_matrix(features: &[Vec<f64>]) -> Result<usize> {
    let first = features
        .first()
        .ok_or_else(|| Error::Empty("feature matrix has no rows".into()))?;
    let d = first.len();
    for row in features {
        if row.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: row.len(),
            });
        }
        if row.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFiniteValue("feature matrix".into()));
        }
    }
    Ok(d)
}

/// Projects rows onto the top `k` principal axes of the centered data.
///
/// Axes are oriented so their largest-magnitude entry is positive. When the
/// data span fewer than `k` directions, the available components are
/// returned and a warning is logged.
pub fn pca(features: &[Vec<f64>], k: usize) -> Result<Vec<Vec<f64>>> {
    let d = check_matrix(features)?;
    if k == 0 || k > d {
        return Err(Error::InvalidArgument(format!(
            "pca needs 1 <= k <= {d}, got {k}"
        )));
    }
    let n = features.len();
    let mean: Vec<f64> = (0..d)
        .map(|j| features.iter().map(|r| r[j]).sum::<f64>() / n as f64)
        .collect();
    let centered: Vec<Vec<f64>> = features
        .iter()
        .map(|r| r.iter().zip(&mean).map(|(x, m)| x - m).collect())
        .collect();
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();

    // Eigen-decompose the smaller of the covariance (d × d) and Gram (n × n)
    // matrices; both share the non-zero spectrum.
    let axes: Vec<(f64, Vec<f64>)> = if d <= n {
        let mut cov = SymMatrix::zeros(d);
        for i in 0..d {
            for j in i..d {
                let c = centered.iter().map(|r| r[i] * r[j]).sum::<f64>() / n as f64;
                cov.set(i, j, c);
                cov.set(j, i, c);
            }
        }
        let e = symmetric_eigen(&cov)?;
        e.values.into_iter().zip(e.vectors).rev().collect()
    } else {
        let mut gram = SymMatrix::zeros(n);
        for i in 0..n {
            for j in i..n {
                let g = dot(&centered[i], &centered[j]) / n as f64;
                gram.set(i, j, g);
                gram.set(j, i, g);
            }
        }
        let e = symmetric_eigen(&gram)?;
        e.values
            .into_iter()
            .zip(e.vectors)
            .rev()
            .map(|(lambda, u)| {
                let mut axis = vec![0.0; d];
                for (row, w) in centered.iter().zip(&u) {
                    for (a, x) in axis.iter_mut().zip(row) {
                        *a += w * x;
                    }
                }
                let norm = dot(&axis, &axis).sqrt();
                if norm > 0.0 {
                    axis.iter_mut().for_each(|a| *a /= norm);
                }
                (lambda, axis)
            })
            .collect()
    };

    let top = axes.first().map_or(0.0, |a| a.0.max(0.0));
    let components: Vec<Vec<f64>> = axes
        .into_iter()
        .take(k)
        .filter(|(lambda, _)| *lambda > 1e-12 * top.max(f64::MIN_POSITIVE))
        .map(|(_, mut v)| {
            let pivot = v
                .iter()
                .copied()
                .fold(0.0f64, |acc, x| if x.abs() > acc.abs() { x } else { acc });
            if pivot < 0.0 {
                v.iter_mut().for_each(|x| *x = -*x);
            }
            v
        })
        .collect();
    if components.len() < k {
        log::warn!(
            "pca: data span only {} direction(s); returning {} of {k} components",
            components.len(),
            components.len()
        );
    }
    Ok(centered
        .iter()
        .map(|r| components.iter().map(|c| dot(r, c)).collect())
        .collect())
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn nearest(point: &[f64], centers: &[Vec<f64>]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (c, center) in centers.iter().enumerate() {
        let d = sq_dist(point, center);
        if d < best.1 {
            best = (c, d);
        }
    }
    best
}

pub const KMEANS_RESTARTS: usize = 50;
const KMEANS_MAX_ITER: usize = 300;

fn kmeans_once(features: &[Vec<f64>], k: usize, r: &mut ChaCha8Rng) -> (f64, Vec<usize>) {
    let n = features.len();
    // k-means++ seeding
    let mut centers = vec![features[r.random_range(0..n)].clone()];
    let mut d2: Vec<f64> = features.iter().map(|p| sq_dist(p, &centers[0])).collect();
    while centers.len() < k {
        let total: f64 = d2.iter().sum();
        let pick = if total > 0.0 {
            let mut target = r.random::<f64>() * total;
            let mut idx = n - 1;
            for (i, &w) in d2.iter().enumerate() {
                if target < w {
                    idx = i;
                    break;
                }
                target -= w;
            }
            idx
        } else {
            r.random_range(0..n)
        };
        centers.push(features[pick].clone());
        for (d, p) in d2.iter_mut().zip(features) {
            *d = d.min(sq_dist(p, centers.last().unwrap()));
        }
    }

    let dim = features[0].len();
    let mut labels = vec![usize::MAX; n];
    for _ in 0..KMEANS_MAX_ITER {
        let mut changed = false;
        for (l, p) in labels.iter_mut().zip(features) {
            let (c, _) = nearest(p, &centers);
            if *l != c {
                *l = c;
                changed = true;
            }
        }
        if !changed {
            break;
        }
        let mut sums = vec![vec![0.0; dim]; k];
        let mut counts = vec![0usize; k];
        for (&l, p) in labels.iter().zip(features) {
            counts[l] += 1;
            for (s, x) in sums[l].iter_mut().zip(p) {
                *s += x;
            }
        }
        for c in 0..k {
            if counts[c] > 0 {
                centers[c] = sums[c].iter().map(|s| s / counts[c] as f64).collect();
            }
        }
    }
    let inertia = features
        .iter()
        .zip(&labels)
        .map(|(p, &l)| sq_dist(p, &centers[l]))
        .sum();
    (inertia, labels)
}

/// Lloyd's algorithm with k-means++ seeding; the lowest-inertia result over
/// [`KMEANS_RESTARTS`] seeded restarts is returned.
pub fn kmeans(features: &[Vec<f64>], k: usize, seed: u64) -> Result<Vec<usize>> {
    check_matrix(features)?;
    if k == 0 || k > features.len() {
        return Err(Error::InvalidArgument(format!(
            "kmeans needs 1 <= k <= {}, got {k}",
            features.len()
        )));
    }
    let runs: Vec<(f64, Vec<usize>)> = (0..KMEANS_RESTARTS as u64)
        .into_par_iter()
        .map(|s| kmeans_once(features, k, &mut rng(seed, s)))
        .collect();
    let best = runs
        .into_iter()
        .reduce(|a, b| if b.0 < a.0 { b } else { a })
        .expect("at least one restart");
    Ok(best.1)
}

/// Label of the nearest training row (first one on ties) for each test row.
pub fn knn1(train: &[Vec<f64>], labels: &[usize], test: &[Vec<f64>]) -> Result<Vec<usize>> {
    let d = check_matrix(train)?;
    if labels.len() != train.len() {
        return Err(Error::DimensionMismatch {
            expected: train.len(),
            got: labels.len(),
        });
    }
    if let Some(bad) = test.iter().find(|r| r.len() != d) {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: bad.len(),
        });
    }
    Ok(test.iter().map(|p| labels[nearest(p, train).0]).collect())
}

/// Fraction of agreeing labels, maximized over relabellings of `predicted`.
/// Exhaustive over permutations, so intended for a handful of classes.
pub fn clustering_accuracy(predicted: &[usize], truth: &[usize]) -> f64 {
    assert_eq!(predicted.len(), truth.len());
    if truth.is_empty() {
        return 1.0;
    }
    let k = predicted.iter().chain(truth).max().unwrap() + 1;
    assert!(k <= 8, "clustering_accuracy is exhaustive over {k}! relabellings");
    let mut perm: Vec<usize> = (0..k).collect();
    let mut best = 0usize;
    loop {
        let hits = predicted
            .iter()
            .zip(truth)
            .filter(|(&p, &t)| perm[p] == t)
            .count();
        best = best.max(hits);
        // next lexicographic permutation
        let Some(i) = (0..k.saturating_sub(1)).rev().find(|&i| perm[i] < perm[i + 1]) else {
            break;
        };
        let j = (i + 1..k).rev().find(|&j| perm[j] > perm[i]).unwrap();
        perm.swap(i, j);
        perm[i + 1..].reverse();
    }
    best as f64 / truth.len() as f64
}
