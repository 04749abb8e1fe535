//! Signed barcodes of Euler profiles and the signed 1-Wasserstein distance.
//!
//! A one-critical filtration's profile decomposes as
//! `ECP = Σ_{u ∈ B⁺} 1_{Q_u} − Σ_{v ∈ B⁻} 1_{Q_v}` with `Q_u` the upper set of
//! `u`: even-dimensional critical values go to `B⁺`, odd ones to `B⁻`.
//! Points present in both multisets are cancelled to reach the minimal form.

use std::cmp::Ordering;

use crate::complex::MultiFiltration;
use crate::error::{Error, Result};
use crate::euler::{GridSpec, ProfileGrid};
use crate::matching::min_cost_assignment;

/// Positive and negative multisets of points in `R^m`, disjoint as multisets
/// and each sorted lexicographically.
#[derive(Clone, Debug, PartialEq)]
pub struct SignedBarcode {
    m: usize,
    positive: Vec<Vec<f64>>,
    negative: Vec<Vec<f64>>,
}

fn lex(a: &[f64], b: &[f64]) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}

fn check_points(m: usize, points: &[Vec<f64>]) -> Result<()> {
    for p in points {
        if p.len() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                got: p.len(),
            });
        }
        if p.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "barcode point {p:?} is not finite"
            )));
        }
    }
    Ok(())
}

impl SignedBarcode {
    /// Builds the minimal form of `Σ 1_{Q_u} − Σ 1_{Q_v}` (cancelling common
    /// points with multiplicity, by exact equality).
    pub fn new(m: usize, mut positive: Vec<Vec<f64>>, mut negative: Vec<Vec<f64>>) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidArgument("barcode needs m >= 1".into()));
        }
        check_points(m, &positive)?;
        check_points(m, &negative)?;
        positive.sort_by(|a, b| lex(a, b));
        negative.sort_by(|a, b| lex(a, b));
        let (mut pos, mut neg) = (Vec::new(), Vec::new());
        let mut pos_iter = positive.into_iter().peekable();
        let mut neg_iter = negative.into_iter().peekable();
        loop {
            match (pos_iter.peek(), neg_iter.peek()) {
                (Some(p), Some(n)) => match lex(p, n) {
                    Ordering::Less => pos.push(pos_iter.next().unwrap()),
                    Ordering::Greater => neg.push(neg_iter.next().unwrap()),
                    Ordering::Equal => {
                        pos_iter.next();
                        neg_iter.next();
                    }
                },
                (Some(_), None) => pos.push(pos_iter.next().unwrap()),
                (None, Some(_)) => neg.push(neg_iter.next().unwrap()),
                (None, None) => break,
            }
        }
        Ok(SignedBarcode {
            m,
            positive: pos,
            negative: neg,
        })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn positive(&self) -> &[Vec<f64>] {
        &self.positive
    }

    pub fn negative(&self) -> &[Vec<f64>] {
        &self.negative
    }

    /// `#{u ∈ B⁺ : u ≤ x} − #{v ∈ B⁻ : v ≤ x}`.
    pub fn evaluate(&self, x: &[f64]) -> i64 {
        let below = |p: &&Vec<f64>| p.iter().zip(x).all(|(a, b)| a <= b);
        self.positive.iter().filter(below).count() as i64
            - self.negative.iter().filter(below).count() as i64
    }

    /// [`Self::evaluate`] at every point of `spec`.
    pub fn evaluate_grid(&self, spec: &GridSpec) -> Result<ProfileGrid<i64>> {
        if spec.m() != self.m {
            return Err(Error::DimensionMismatch {
                expected: self.m,
                got: spec.m(),
            });
        }
        let data = (0..spec.len()).map(|k| self.evaluate(&spec.point(k))).collect();
        ProfileGrid::new(spec.clone(), data)
    }
}

/// Signed barcode of the Euler profile of `filtration`.
pub fn signed_barcode(filtration: &MultiFiltration) -> SignedBarcode {
    let mut positive = Vec::new();
    let mut negative = Vec::new();
    for (s, t) in filtration.iter() {
        if s.dim() % 2 == 0 {
            positive.push(t.to_vec());
        } else {
            negative.push(t.to_vec());
        }
    }
    SignedBarcode::new(filtration.m(), positive, negative)
        .expect("filtration values are finite and of arity m")
}

fn l1(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

/// Minimal `‖·‖₁` cost of a bijection `A⁺ ∪ B⁻ → A⁻ ∪ B⁺`, or `+∞` when the
/// two sides have different sizes.
pub fn signed_w1(a: &SignedBarcode, b: &SignedBarcode) -> Result<f64> {
    if a.m != b.m {
        return Err(Error::DimensionMismatch {
            expected: a.m,
            got: b.m,
        });
    }
    let left: Vec<&Vec<f64>> = a.positive.iter().chain(&b.negative).collect();
    let right: Vec<&Vec<f64>> = a.negative.iter().chain(&b.positive).collect();
    if left.len() != right.len() {
        return Ok(f64::INFINITY);
    }
    let n = left.len();
    let mut cost = Vec::with_capacity(n * n);
    for l in &left {
        for r in &right {
            cost.push(l1(l, r));
        }
    }
    Ok(min_cost_assignment(n, &cost).0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::Simplex;
    use crate::euler::compute_ecp;
    use crate::matching::tests::brute_force;
    use rand::{Rng, SeedableRng};

    fn bc(m: usize, pos: &[&[f64]], neg: &[&[f64]]) -> SignedBarcode {
        SignedBarcode::new(
            m,
            pos.iter().map(|p| p.to_vec()).collect(),
            neg.iter().map(|p| p.to_vec()).collect(),
        )
        .unwrap()
    }

    #[test]
    fn raw_decomposition() {
        let f = MultiFiltration::one_parameter(vec![
            (Simplex::vertex(0), 0.0),
            (Simplex::vertex(1), 0.0),
            (Simplex::edge(0, 1), 1.0),
        ])
        .unwrap();
        assert_eq!(signed_barcode(&f), bc(1, &[&[0.0], &[0.0]], &[&[1.0]]));
    }

    #[test]
    fn cancellation() {
        let f = MultiFiltration::one_parameter(vec![
            (Simplex::vertex(0), 0.0),
            (Simplex::vertex(1), 2.0),
            (Simplex::edge(0, 1), 2.0),
        ])
        .unwrap();
        let b = signed_barcode(&f);
        assert_eq!(b.positive(), &[vec![0.0]]);
        assert!(b.negative().is_empty());
        let b = bc(1, &[&[1.0], &[1.0], &[2.0]], &[&[1.0]]);
        assert_eq!(b.positive(), &[vec![1.0], vec![2.0]]);
    }

    #[test]
    fn distance_examples() {
        let q0 = bc(1, &[&[0.0]], &[]);
        let q1 = bc(1, &[&[1.0]], &[]);
        assert_eq!(signed_w1(&q0, &q1).unwrap(), 1.0);
        let minus_q0 = bc(1, &[], &[&[0.0]]);
        assert!(signed_w1(&q0, &minus_q0).unwrap().is_infinite());
        assert!(signed_w1(&q0, &bc(2, &[], &[])).is_err());
    }

    #[test]
    fn reconstruction_matches_profile() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        for _ in 0..20 {
            let nv = rng.random_range(1..6u32);
            let mut cells = Vec::new();
            let mut vals = Vec::new();
            for v in 0..nv {
                let t = vec![rng.random_range(0..3) as f64, rng.random_range(0..3) as f64];
                vals.push(t.clone());
                cells.push((Simplex::vertex(v), t));
            }
            for a in 0..nv {
                for b in a + 1..nv {
                    if rng.random_bool(0.5) {
                        let t = (0..2)
                            .map(|i| vals[a as usize][i].max(vals[b as usize][i]) + rng.random_range(0..2) as f64)
                            .collect();
                        cells.push((Simplex::edge(a, b), t));
                    }
                }
            }
            let f = MultiFiltration::checked(2, cells).unwrap();
            let spec = GridSpec::from_bounds(&[(-0.5, 4.0), (-0.5, 4.0)], &[10, 10]).unwrap();
            assert_eq!(
                signed_barcode(&f).evaluate_grid(&spec).unwrap(),
                compute_ecp(&f, &spec).unwrap()
            );
        }
    }

    #[test]
    fn matches_exhaustive_matching() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(8);
        for _ in 0..200 {
            let m = rng.random_range(1..=2);
            let ap: usize = rng.random_range(0..=3);
            let an = rng.random_range(0..=2);
            let bn = rng.random_range(0..=2);
            // usually balanced so the matching is finite
            let bp = if rng.random_bool(0.8) { (ap + bn).saturating_sub(an) } else { rng.random_range(0..=3) };
            let mut pts = |k: usize| -> Vec<Vec<f64>> {
                (0..k).map(|_| (0..m).map(|_| rng.random::<f64>() * 4.0).collect()).collect()
            };
            let (pa, na, pb, nb) = (pts(ap), pts(an), pts(bp), pts(bn));
            let a = SignedBarcode::new(m, pa, na).unwrap();
            let b = SignedBarcode::new(m, pb, nb).unwrap();
            let left: Vec<&Vec<f64>> = a.positive().iter().chain(b.negative()).collect();
            let right: Vec<&Vec<f64>> = a.negative().iter().chain(b.positive()).collect();
            let d = signed_w1(&a, &b).unwrap();
            if left.len() != right.len() {
                assert!(d.is_infinite());
                continue;
            }
            let n = left.len();
            let cost: Vec<f64> = left
                .iter()
                .flat_map(|l| right.iter().map(move |r| l1(l, r)))
                .collect();
            assert!((d - brute_force(n, &cost)).abs() < 1e-9);
        }
    }
}
