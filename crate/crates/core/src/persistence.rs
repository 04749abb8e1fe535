//! Persistent homology of small one-parameter filtrations over Z/2.
//!
//! The standard left-to-right column reduction, with no clearing or twist
//! optimizations: this module exists to cross-check the Euler descriptors
//! against diagram statistics and is not meant for large inputs.

use std::collections::HashMap;

use crate::complex::{MultiFiltration, Simplex};
use crate::error::{Error, Result};
use crate::euler::{Axis, GridSpec, ProfileGrid};
use crate::matching::min_cost_assignment;
use crate::transforms::PrimitiveKernel;

/// A bar `(birth, death)` with `death` possibly `+∞`.
pub type Bar = (f64, f64);

/// Bars grouped by homology degree.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PersistenceDiagram {
    degrees: Vec<Vec<Bar>>,
}

impl PersistenceDiagram {
    /// Validates and canonicalizes (sorts) each degree's bars.
    pub fn new(mut degrees: Vec<Vec<Bar>>) -> Result<Self> {
        for (k, bars) in degrees.iter_mut().enumerate() {
            for &(b, d) in bars.iter() {
                if !b.is_finite() || d.is_nan() || !(d > b) {
                    return Err(Error::InvalidArgument(format!(
                        "degree {k}: bar ({b}, {d}) needs a finite birth below its death"
                    )));
                }
            }
            bars.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.total_cmp(&y.1)));
        }
        while degrees.last().is_some_and(Vec::is_empty) {
            degrees.pop();
        }
        Ok(PersistenceDiagram { degrees })
    }

    /// Number of degrees stored (one past the highest non-empty degree).
    pub fn num_degrees(&self) -> usize {
        self.degrees.len()
    }

    pub fn degree(&self, k: usize) -> &[Bar] {
        self.degrees.get(k).map_or(&[], Vec::as_slice)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &Bar)> + '_ {
        self.degrees
            .iter()
            .enumerate()
            .flat_map(|(k, bars)| bars.iter().map(move |b| (k, b)))
    }

    /// `Σ_k (−1)^k #{bars of degree k alive at u}`.
    pub fn euler_at(&self, u: f64) -> i64 {
        self.iter()
            .filter(|(_, &(b, d))| b <= u && u < d)
            .map(|(k, _)| if k % 2 == 0 { 1 } else { -1 })
            .sum()
    }
}

fn sum_mod2(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// Persistence diagram of a one-parameter filtration.
///
/// Simplices are ordered by `(t, dim, vertices)`; zero-length bars are
/// discarded.
pub fn reduce(filtration: &MultiFiltration) -> Result<PersistenceDiagram> {
    if filtration.m() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            got: filtration.m(),
        });
    }
    let mut order: Vec<usize> = (0..filtration.len()).collect();
    order.sort_by(|&i, &j| {
        filtration.value(i)[0]
            .total_cmp(&filtration.value(j)[0])
            .then_with(|| filtration.simplex(i).canonical_cmp(filtration.simplex(j)))
    });
    let position: HashMap<&Simplex, usize> = order
        .iter()
        .enumerate()
        .map(|(pos, &i)| (filtration.simplex(i), pos))
        .collect();
    let n = order.len();
    let value = |pos: usize| filtration.value(order[pos])[0];
    let dim = |pos: usize| filtration.simplex(order[pos]).dim();

    let mut columns: Vec<Vec<usize>> = Vec::with_capacity(n);
    for &i in &order {
        let mut col = filtration
            .simplex(i)
            .facets()
            .map(|f| {
                position.get(&f).copied().ok_or_else(|| {
                    Error::NotClosed(format!("face {f} of {} is missing", filtration.simplex(i)))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        col.sort_unstable();
        columns.push(col);
    }

    let mut pivot_owner: Vec<Option<usize>> = vec![None; n];
    let mut paired = vec![false; n];
    let max_dim = filtration.max_dim().unwrap_or(0);
    let mut degrees: Vec<Vec<Bar>> = vec![Vec::new(); max_dim + 1];
    for j in 0..n {
        while let Some(&low) = columns[j].last() {
            match pivot_owner[low] {
                Some(other) => {
                    let reduced = sum_mod2(&columns[j], &columns[other]);
                    columns[j] = reduced;
                }
                None => break,
            }
        }
        if let Some(&low) = columns[j].last() {
            pivot_owner[low] = Some(j);
            paired[low] = true;
            paired[j] = true;
            let (b, d) = (value(low), value(j));
            if d > b {
                degrees[dim(low)].push((b, d));
            }
        }
    }
    for j in 0..n {
        if !paired[j] && columns[j].is_empty() {
            degrees[dim(j)].push((value(j), f64::INFINITY));
        }
    }
    PersistenceDiagram::new(degrees)
}

/// Samples `Σ_k Σ_i (−1)^k 1[a_i ≤ u < b_i]` on a one-axis grid.
pub fn ecc_from_diagram(diagram: &PersistenceDiagram, spec: &GridSpec) -> Result<ProfileGrid<i64>> {
    if spec.m() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            got: spec.m(),
        });
    }
    let data = spec.axes[0]
        .coordinates()
        .into_iter()
        .map(|u| diagram.euler_at(u))
        .collect();
    ProfileGrid::new(spec.clone(), data)
}

/// `Σ_k Σ_i (−1)^k (K(ξ b_i) − K(ξ a_i))` with `K(ξ · ∞) = 0`.
pub fn ht_from_diagram(
    diagram: &PersistenceDiagram,
    kernel: &PrimitiveKernel,
    xi: f64,
) -> Result<f64> {
    if !(xi > 0.0 && xi.is_finite()) {
        return Err(Error::InvalidArgument(format!("xi must be positive, got {xi}")));
    }
    let mut total = 0.0;
    for (k, &(b, d)) in diagram.iter() {
        if b < 0.0 && !kernel.accepts_negative() {
            return Err(Error::NegativeArgument {
                kernel: kernel.spec_string(),
                value: b,
            });
        }
        let at_death = if d.is_infinite() {
            if !kernel.vanishes_at_infinity() {
                return Err(Error::InvalidArgument(format!(
                    "kernel {} does not vanish at infinity; essential bars have no value",
                    kernel.spec_string()
                )));
            }
            0.0
        } else {
            kernel.eval(xi * d)
        };
        let term = at_death - kernel.eval(xi * b);
        total += if k % 2 == 0 { term } else { -term };
    }
    Ok(total)
}

/// Convenience grid covering every finite bar endpoint of `diagram`.
pub fn diagram_span(diagram: &PersistenceDiagram, resolution: usize) -> Result<GridSpec> {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for (_, &(b, d)) in diagram.iter() {
        lo = lo.min(b);
        hi = hi.max(b);
        if d.is_finite() {
            hi = hi.max(d);
        }
    }
    if !lo.is_finite() {
        return Err(Error::Empty("diagram has no bars".into()));
    }
    let axis = if lo < hi {
        Axis::new(lo, hi, resolution)?
    } else {
        Axis::single(lo)?
    };
    GridSpec::new(vec![axis])
}

/// 1-Wasserstein distance between two single-degree diagrams with ground
/// cost `‖·‖₁`; a bar may instead be matched to the diagonal at cost
/// `|d − b|`. Essential bars match only essential bars, at cost `|b − b′|`;
/// differing numbers of essential bars give `+∞`.
pub fn w1_diagram_distance(d1: &[Bar], d2: &[Bar]) -> f64 {
    let split = |d: &[Bar]| -> (Vec<Bar>, Vec<f64>) {
        let finite = d.iter().copied().filter(|b| b.1.is_finite()).collect();
        let mut essential: Vec<f64> = d.iter().filter(|b| b.1.is_infinite()).map(|b| b.0).collect();
        essential.sort_by(f64::total_cmp);
        (finite, essential)
    };
    let (f1, e1) = split(d1);
    let (f2, e2) = split(d2);
    if e1.len() != e2.len() {
        return f64::INFINITY;
    }
    let essential: f64 = e1.iter().zip(&e2).map(|(a, b)| (a - b).abs()).sum();

    let (n1, n2) = (f1.len(), f2.len());
    let n = n1 + n2;
    let mut cost = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            cost[i * n + j] = match (i < n1, j < n2) {
                (true, true) => (f1[i].0 - f2[j].0).abs() + (f1[i].1 - f2[j].1).abs(),
                (true, false) => f1[i].1 - f1[i].0,
                (false, true) => f2[j].1 - f2[j].0,
                (false, false) => 0.0,
            };
        }
    }
    essential + min_cost_assignment(n, &cost).0
}
