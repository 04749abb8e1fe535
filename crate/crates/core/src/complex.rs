//! Simplicial complexes and one-critical multi-parameter filtrations.
//!
//! A [`MultiFiltration`] stores every simplex exactly once together with its
//! critical value `t(σ) ∈ R^m`: the simplex is present in the sublevel complex
//! at `u` iff `t(σ) ≤ u` coordinatewise. Cells are kept flat, sorted by
//! dimension and then lexicographically.

use std::cmp::Ordering;
use std::collections::hash_map::Entry;
use std::collections::HashMap;
use std::fmt;

use smallvec::SmallVec;

use crate::error::{Error, Result};

/// A simplex given by its vertex identifiers, stored strictly ascending.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Simplex(SmallVec<[u32; 4]>);

impl Simplex {
    /// Builds a simplex from arbitrary-order vertices. Duplicate vertices and
    /// the empty vertex set are rejected.
    pub fn new<I: IntoIterator<Item = u32>>(vertices: I) -> Result<Self> {
        let mut v: SmallVec<[u32; 4]> = vertices.into_iter().collect();
        if v.is_empty() {
            return Err(Error::InvalidSimplex("empty vertex set".into()));
        }
        v.sort_unstable();
        if v.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidSimplex(format!(
                "duplicate vertex in {:?}",
                v.as_slice()
            )));
        }
        Ok(Simplex(v))
    }

    /// Caller guarantees `vertices` is non-empty and strictly ascending.
    pub(crate) fn from_sorted(vertices: &[u32]) -> Self {
        debug_assert!(!vertices.is_empty());
        debug_assert!(vertices.windows(2).all(|w| w[0] < w[1]));
        Simplex(SmallVec::from_slice(vertices))
    }

    pub fn vertex(v: u32) -> Self {
        Simplex(SmallVec::from_slice(&[v]))
    }

    pub fn edge(a: u32, b: u32) -> Self {
        if a < b {
            Simplex(SmallVec::from_slice(&[a, b]))
        } else {
            Simplex(SmallVec::from_slice(&[b, a]))
        }
    }

    pub fn vertices(&self) -> &[u32] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len() - 1
    }

    /// `(-1)^dim`.
    pub fn sign(&self) -> i64 {
        if self.dim() % 2 == 0 {
            1
        } else {
            -1
        }
    }

    /// Codimension-one faces. Empty for vertices.
    pub fn facets(&self) -> impl Iterator<Item = Simplex> + '_ {
        let n = if self.0.len() > 1 { self.0.len() } else { 0 };
        (0..n).map(move |skip| {
            Simplex(
                self.0
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i != skip)
                    .map(|(_, &v)| v)
                    .collect(),
            )
        })
    }

    /// Canonical storage order: dimension first, then lexicographic.
    pub fn canonical_cmp(&self, other: &Self) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl fmt::Debug for Simplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Simplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "}}")
    }
}

/// A one-critical `m`-parameter filtration of a finite simplicial complex.
///
/// Construction only checks structural well-formedness (arity, finiteness).
/// The combinatorial invariants (closure, monotonicity, uniqueness) are
/// checked by [`validate`]; use [`MultiFiltration::checked`] to get both.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiFiltration {
    m: usize,
    simplices: Vec<Simplex>,
    values: Vec<f64>,
}

impl MultiFiltration {
    pub fn new(m: usize, cells: Vec<(Simplex, Vec<f64>)>) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidArgument(
                "number of parameters must be at least 1".into(),
            ));
        }
        for (s, t) in &cells {
            if t.len() != m {
                return Err(Error::ValueArity {
                    simplex: s.to_string(),
                    expected: m,
                    got: t.len(),
                });
            }
            if t.iter().any(|x| !x.is_finite()) {
                return Err(Error::NonFiniteValue(s.to_string()));
            }
        }
        let mut cells = cells;
        cells.sort_by(|a, b| a.0.canonical_cmp(&b.0));
        let mut simplices = Vec::with_capacity(cells.len());
        let mut values = Vec::with_capacity(cells.len() * m);
        for (s, t) in cells {
            simplices.push(s);
            values.extend_from_slice(&t);
        }
        Ok(MultiFiltration {
            m,
            simplices,
            values,
        })
    }

    /// [`MultiFiltration::new`] followed by [`validate`]; any violation is an error.
    pub fn checked(m: usize, cells: Vec<(Simplex, Vec<f64>)>) -> Result<Self> {
        let f = Self::new(m, cells)?;
        let report = validate(&f);
        if report.is_valid() {
            Ok(f)
        } else {
            Err(Error::InvalidFiltration(report.to_string()))
        }
    }

    /// Convenience constructor for one-parameter filtrations.
    pub fn one_parameter(cells: Vec<(Simplex, f64)>) -> Result<Self> {
        Self::new(1, cells.into_iter().map(|(s, t)| (s, vec![t])).collect())
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn len(&self) -> usize {
        self.simplices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }

    pub fn simplex(&self, i: usize) -> &Simplex {
        &self.simplices[i]
    }

    pub fn simplices(&self) -> &[Simplex] {
        &self.simplices
    }

    pub fn value(&self, i: usize) -> &[f64] {
        &self.values[i * self.m..(i + 1) * self.m]
    }

    /// Flat row-major critical values, `len() * m()` entries.
    pub fn raw_values(&self) -> &[f64] {
        &self.values
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = (&Simplex, &[f64])> + '_ {
        self.simplices
            .iter()
            .zip(self.values.chunks_exact(self.m))
    }

    /// All critical values on one axis, in storage order.
    pub fn axis_values(&self, axis: usize) -> impl Iterator<Item = f64> + '_ {
        assert!(axis < self.m, "axis {axis} out of range for m = {}", self.m);
        self.values.iter().skip(axis).step_by(self.m).copied()
    }

    pub fn max_dim(&self) -> Option<usize> {
        self.simplices.last().map(Simplex::dim)
    }

    /// The same complex with a different filter. `values` is row-major
    /// with `new_m` entries per simplex, in this filtration's storage order.
    pub fn with_values(&self, new_m: usize, values: Vec<f64>) -> Result<Self> {
        if new_m == 0 || values.len() != self.len() * new_m {
            return Err(Error::DimensionMismatch {
                expected: self.len() * new_m.max(1),
                got: values.len(),
            });
        }
        if let Some(i) = values.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFiniteValue(self.simplices[i / new_m].to_string()));
        }
        Ok(MultiFiltration {
            m: new_m,
            simplices: self.simplices.clone(),
            values,
        })
    }

    /// χ of the sublevel complex `{σ : t(σ) ≤ u}` by direct recount.
    pub fn sublevel_euler(&self, u: &[f64]) -> i64 {
        assert_eq!(u.len(), self.m);
        self.iter()
            .filter(|(_, t)| t.iter().zip(u).all(|(a, b)| a <= b))
            .map(|(s, _)| s.sign())
            .sum()
    }

    /// χ of the whole complex.
    pub fn euler_characteristic(&self) -> i64 {
        self.simplices.iter().map(Simplex::sign).sum()
    }
}

/// One violated filtration invariant.
#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    MissingFace {
        simplex: Simplex,
        face: Simplex,
    },
    NotMonotone {
        face: Simplex,
        coface: Simplex,
        face_value: Vec<f64>,
        coface_value: Vec<f64>,
    },
    Duplicate {
        simplex: Simplex,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::MissingFace { simplex, face } => {
                write!(f, "missing face {face} of {simplex}")
            }
            Violation::NotMonotone {
                face,
                coface,
                face_value,
                coface_value,
            } => write!(
                f,
                "monotonicity breach: t({face}) = {face_value:?} is not <= t({coface}) = {coface_value:?}"
            ),
            Violation::Duplicate { simplex } => write!(f, "duplicate simplex {simplex}"),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "valid");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Checks closure, coordinatewise monotonicity along every face relation,
/// and uniqueness. Checking facets suffices for monotonicity once closure
/// holds; missing faces are reported separately.
pub fn validate(filtration: &MultiFiltration) -> ValidationReport {
    let mut index: HashMap<&Simplex, usize> = HashMap::with_capacity(filtration.len());
    let mut violations = Vec::new();
    for (i, s) in filtration.simplices().iter().enumerate() {
        match index.entry(s) {
            Entry::Occupied(_) => violations.push(Violation::Duplicate { simplex: s.clone() }),
            Entry::Vacant(e) => {
                e.insert(i);
            }
        }
    }
    for (i, s) in filtration.simplices().iter().enumerate() {
        let t = filtration.value(i);
        for face in s.facets() {
            match index.get(&face) {
                None => violations.push(Violation::MissingFace {
                    simplex: s.clone(),
                    face,
                }),
                Some(&j) => {
                    let tf = filtration.value(j);
                    if tf.iter().zip(t).any(|(a, b)| a > b) {
                        violations.push(Violation::NotMonotone {
                            face,
                            coface: s.clone(),
                            face_value: tf.to_vec(),
                            coface_value: t.to_vec(),
                        });
                    }
                }
            }
        }
    }
    ValidationReport { violations }
}

/// χ(K) = Σ (−1)^dim σ of a face-closed set of simplices.
pub fn euler_characteristic(complex: &[Simplex]) -> Result<i64> {
    let set: std::collections::HashSet<&Simplex> = complex.iter().collect();
    for s in complex {
        for face in s.facets() {
            if !set.contains(&face) {
                return Err(Error::NotClosed(format!("face {face} of {s} is absent")));
            }
        }
    }
    Ok(set.iter().map(|s| s.sign()).sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(v: &[u32]) -> Simplex {
        Simplex::new(v.iter().copied()).unwrap()
    }

    #[test]
    fn simplex_is_canonical() {
        let a = s(&[3, 1, 2]);
        assert_eq!(a.vertices(), &[1, 2, 3]);
        assert_eq!(a.dim(), 2);
        assert!(Simplex::new([1, 1]).is_err());
        assert!(Simplex::new(std::iter::empty()).is_err());
        let facets: Vec<_> = a.facets().collect();
        assert_eq!(facets, vec![s(&[2, 3]), s(&[1, 3]), s(&[1, 2])]);
        assert_eq!(Simplex::vertex(4).facets().count(), 0);
    }

    #[test]
    fn validate_accepts_canonical_filtration() {
        let f = MultiFiltration::one_parameter(vec![
            (s(&[0]), 0.0),
            (s(&[1]), 0.0),
            (s(&[0, 1]), 1.0),
        ])
        .unwrap();
        assert!(validate(&f).is_valid());
    }

    #[test]
    fn validate_reports_missing_faces() {
        let f = MultiFiltration::one_parameter(vec![(s(&[0, 1]), 1.0)]).unwrap();
        let r = validate(&f);
        assert_eq!(
            r.violations,
            vec![
                Violation::MissingFace {
                    simplex: s(&[0, 1]),
                    face: s(&[1])
                },
                Violation::MissingFace {
                    simplex: s(&[0, 1]),
                    face: s(&[0])
                },
            ]
        );
    }

    #[test]
    fn validate_reports_monotonicity_breach() {
        let f = MultiFiltration::one_parameter(vec![
            (s(&[0]), 2.0),
            (s(&[0, 1]), 1.0),
            (s(&[1]), 0.0),
        ])
        .unwrap();
        let r = validate(&f);
        assert_eq!(
            r.violations,
            vec![Violation::NotMonotone {
                face: s(&[0]),
                coface: s(&[0, 1]),
                face_value: vec![2.0],
                coface_value: vec![1.0],
            }]
        );
        assert!(r.to_string().contains("monotonicity"));
    }

    #[test]
    fn validate_reports_duplicates_and_is_idempotent() {
        let f = MultiFiltration::one_parameter(vec![(s(&[0]), 0.0), (s(&[0]), 1.0)]).unwrap();
        let r1 = validate(&f);
        let r2 = validate(&f);
        assert_eq!(r1, r2);
        assert_eq!(r1.violations, vec![Violation::Duplicate { simplex: s(&[0]) }]);
    }

    #[test]
    fn construction_rejects_bad_arity_and_nan() {
        assert!(MultiFiltration::new(2, vec![(s(&[0]), vec![0.0])]).is_err());
        assert!(MultiFiltration::new(1, vec![(s(&[0]), vec![f64::NAN])]).is_err());
        assert!(MultiFiltration::new(0, vec![]).is_err());
        assert!(MultiFiltration::checked(1, vec![(s(&[0, 1]), vec![0.0])]).is_err());
    }

    #[test]
    fn euler_characteristic_examples() {
        assert_eq!(euler_characteristic(&[]).unwrap(), 0);
        assert_eq!(euler_characteristic(&[s(&[0])]).unwrap(), 1);
        let mut sphere = Vec::new();
        for v in 0..4u32 {
            sphere.push(s(&[v]));
        }
        for a in 0..4u32 {
            for b in a + 1..4 {
                sphere.push(s(&[a, b]));
            }
        }
        for skip in 0..4u32 {
            sphere.push(Simplex::new((0..4).filter(|&v| v != skip)).unwrap());
        }
        assert_eq!(sphere.len(), 14);
        assert_eq!(euler_characteristic(&sphere).unwrap(), 2);
        assert!(matches!(
            euler_characteristic(&[s(&[0, 1])]),
            Err(Error::NotClosed(_))
        ));
    }

    #[test]
    fn euler_characteristic_is_additive_over_disjoint_union() {
        let a = vec![s(&[0]), s(&[1]), s(&[0, 1])];
        let b = vec![s(&[5]), s(&[6]), s(&[7]), s(&[5, 6]), s(&[6, 7]), s(&[5, 7])];
        let union: Vec<_> = a.iter().chain(b.iter()).cloned().collect();
        assert_eq!(
            euler_characteristic(&union).unwrap(),
            euler_characteristic(&a).unwrap() + euler_characteristic(&b).unwrap()
        );
    }

    #[test]
    fn sublevel_euler_counts_present_cells() {
        let f = MultiFiltration::new(
            2,
            vec![
                (s(&[0]), vec![0.0, 0.0]),
                (s(&[1]), vec![0.0, 0.0]),
                (s(&[0, 1]), vec![1.0, 1.0]),
            ],
        )
        .unwrap();
        assert_eq!(f.sublevel_euler(&[0.0, 0.0]), 2);
        assert_eq!(f.sublevel_euler(&[1.0, 0.5]), 2);
        assert_eq!(f.sublevel_euler(&[1.0, 1.0]), 1);
        assert_eq!(f.sublevel_euler(&[-1.0, 1.0]), 0);
    }
}
