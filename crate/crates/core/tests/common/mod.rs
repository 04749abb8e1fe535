//! Seeded random one-critical filtrations shared by the integration tests.

#![allow(dead_code)]

use std::collections::{HashMap, HashSet};

use eulerist::synth::rng;
use eulerist::{MultiFiltration, Simplex};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn seeded(seed: u64) -> ChaCha8Rng {
    rng(seed, 0)
}

/// A random clique-closed complex on `1..=max_vertices` vertices, up to
/// dimension 3, listed by dimension.
pub fn random_complex(r: &mut impl Rng, max_vertices: u32) -> Vec<Vec<u32>> {
    let nv = r.random_range(1..=max_vertices);
    let mut by_dim: Vec<Vec<Vec<u32>>> = vec![(0..nv).map(|v| vec![v]).collect()];
    for (k, p) in [0.6, 0.5, 0.4].into_iter().enumerate() {
        let present: HashSet<&Vec<u32>> = by_dim[k].iter().collect();
        let mut next = Vec::new();
        for s in &by_dim[k] {
            for v in (s[k] + 1)..nv {
                let mut t = s.clone();
                t.push(v);
                let closed = (0..t.len()).all(|i| {
                    let mut f = t.clone();
                    f.remove(i);
                    present.contains(&f)
                });
                if closed && r.random_bool(p) {
                    next.push(t);
                }
            }
        }
        by_dim.push(next);
    }
    by_dim.into_iter().flatten().collect()
}

fn value(r: &mut impl Rng, scale: f64) -> f64 {
    let x = r.random::<f64>() * scale;
    if r.random_bool(0.5) {
        (x * 8.0).floor() / 8.0
    } else {
        x
    }
}

/// Monotone random values on `complex`, with frequent ties.
pub fn random_values(r: &mut impl Rng, complex: &[Vec<u32>], m: usize) -> MultiFiltration {
    let mut seen: HashMap<&[u32], Vec<f64>> = HashMap::new();
    let mut cells = Vec::with_capacity(complex.len());
    for s in complex {
        let mut t = vec![f64::NEG_INFINITY; m];
        if s.len() == 1 {
            t.iter_mut().for_each(|x| *x = value(r, 3.0));
        } else {
            for i in 0..s.len() {
                let mut f = s.clone();
                f.remove(i);
                for (x, y) in t.iter_mut().zip(&seen[f.as_slice()]) {
                    *x = x.max(*y);
                }
            }
            for x in t.iter_mut() {
                if r.random_bool(0.7) {
                    *x += value(r, 1.0);
                }
            }
        }
        seen.insert(s.as_slice(), t.clone());
        cells.push((Simplex::new(s.iter().copied()).unwrap(), t));
    }
    MultiFiltration::checked(m, cells).unwrap()
}

pub fn random_filtration(seed: u64, m: usize) -> MultiFiltration {
    let mut r = seeded(seed);
    let c = random_complex(&mut r, 6);
    random_values(&mut r, &c, m)
}

/// Several filtrations of one shared random complex.
pub fn same_complex(seed: u64, m: usize, count: usize) -> Vec<MultiFiltration> {
    let mut r = seeded(seed);
    let c = random_complex(&mut r, 6);
    (0..count).map(|_| random_values(&mut r, &c, m)).collect()
}

/// A bar `[a, b)` of the Euler curve: a vertex at `a` and a triangle
/// boundary whose other two vertices enter at `b`.
pub fn single_bar(a: f64, b: f64) -> MultiFiltration {
    MultiFiltration::one_parameter(vec![
        (Simplex::vertex(0), a),
        (Simplex::vertex(1), b),
        (Simplex::vertex(2), b),
        (Simplex::edge(0, 1), b),
        (Simplex::edge(0, 2), b),
        (Simplex::edge(1, 2), b),
    ])
    .unwrap()
}
