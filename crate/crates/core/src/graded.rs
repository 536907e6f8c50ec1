//! Graded bases, sparse vectors, degree-shifting linear maps and Koszul signs.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::Add;

use num_traits::{One, Zero};

use crate::linalg::Matrix;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GradedError {
    #[error("parity list has length {parities} but permutation has length {perm}")]
    LengthMismatch { parities: usize, perm: usize },
    #[error("not a permutation: {0:?}")]
    NotAPermutation(Vec<usize>),
    #[error("duplicate basis name `{0}`")]
    DuplicateName(String),
    #[error("basis element `{name}`: bidegree ({p},{q}) inconsistent with degree {degree}")]
    InconsistentBidegree { name: String, degree: i32, p: i32, q: i32 },
    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("entry ({row},{col}) violates declared shift {shift}")]
    ShiftViolation { row: usize, col: usize, shift: Shift },
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
}

/// Z/2 grading.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of_degree(d: i32) -> Self {
        if d.rem_euclid(2) == 1 {
            Parity::Odd
        } else {
            Parity::Even
        }
    }

    pub fn is_odd(self) -> bool {
        self == Parity::Odd
    }

    pub fn bit(self) -> u32 {
        self as u32
    }

    /// `(-1)^{self·other}` as a boolean "negative" flag.
    pub fn sign_with(self, other: Parity) -> bool {
        self.is_odd() && other.is_odd()
    }
}

impl Add for Parity {
    type Output = Parity;
    fn add(self, rhs: Parity) -> Parity {
        if self == rhs {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Parity::Even => write!(f, "even"),
            Parity::Odd => write!(f, "odd"),
        }
    }
}

/// `(-1)^{#odd-odd inversions}` for reordering items `parities` into
/// the order `[perm[0], perm[1], ...]`.
pub fn koszul_sign(parities: &[Parity], perm: &[usize]) -> Result<Scalar, GradedError> {
    if parities.len() != perm.len() {
        return Err(GradedError::LengthMismatch { parities: parities.len(), perm: perm.len() });
    }
    let mut seen = vec![false; perm.len()];
    for &p in perm {
        if p >= perm.len() || seen[p] {
            return Err(GradedError::NotAPermutation(perm.to_vec()));
        }
        seen[p] = true;
    }
    let mut odd_inversions = 0usize;
    for a in 0..perm.len() {
        for b in a + 1..perm.len() {
            if perm[a] > perm[b] && parities[perm[a]].is_odd() && parities[perm[b]].is_odd() {
                odd_inversions += 1;
            }
        }
    }
    Ok(Scalar::sign(odd_inversions % 2 == 1))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasisElement {
    pub name: String,
    pub degree: i32,
    pub bidegree: Option<(i32, i32)>,
}

impl BasisElement {
    pub fn new(name: impl Into<String>, degree: i32) -> Self {
        BasisElement { name: name.into(), degree, bidegree: None }
    }

    pub fn bigraded(name: impl Into<String>, p: i32, q: i32) -> Self {
        BasisElement { name: name.into(), degree: p + q, bidegree: Some((p, q)) }
    }

    pub fn parity(&self) -> Parity {
        Parity::of_degree(self.degree)
    }
}

/// An ordered homogeneous basis. Index 0 is the unit when the basis carries an algebra.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedBasis {
    elements: Vec<BasisElement>,
}

impl GradedBasis {
    pub fn new(elements: Vec<BasisElement>) -> Result<Self, GradedError> {
        let mut names = std::collections::HashSet::new();
        for e in &elements {
            if !names.insert(e.name.as_str()) {
                return Err(GradedError::DuplicateName(e.name.clone()));
            }
            if let Some((p, q)) = e.bidegree {
                if p + q != e.degree {
                    return Err(GradedError::InconsistentBidegree {
                        name: e.name.clone(),
                        degree: e.degree,
                        p,
                        q,
                    });
                }
            }
        }
        Ok(GradedBasis { elements })
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[BasisElement] {
        &self.elements
    }

    pub fn get(&self, i: usize) -> &BasisElement {
        &self.elements[i]
    }

    pub fn degree(&self, i: usize) -> i32 {
        self.elements[i].degree
    }

    pub fn bidegree(&self, i: usize) -> Option<(i32, i32)> {
        self.elements[i].bidegree
    }

    pub fn parity(&self, i: usize) -> Parity {
        self.elements[i].parity()
    }

    pub fn is_bigraded(&self) -> bool {
        !self.elements.is_empty() && self.elements.iter().all(|e| e.bidegree.is_some())
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.elements.iter().position(|e| e.name == name)
    }

    pub fn max_degree(&self) -> i32 {
        self.elements.iter().map(|e| e.degree).max().unwrap_or(0)
    }

    pub fn indices_of_degree(&self, d: i32) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.degree(i) == d).collect()
    }

    pub fn parities(&self) -> Vec<Parity> {
        self.elements.iter().map(|e| e.parity()).collect()
    }
}

/// Sparse vector over a basis; never stores zero entries.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Vector {
    entries: BTreeMap<usize, Scalar>,
}

impl Vector {
    pub fn zero() -> Self {
        Vector::default()
    }

    pub fn basis(i: usize) -> Self {
        Vector::from_entries([(i, Scalar::one())])
    }

    pub fn from_entries(entries: impl IntoIterator<Item = (usize, Scalar)>) -> Self {
        let mut v = Vector::zero();
        for (i, s) in entries {
            v.add_term(i, &s);
        }
        v
    }

    pub fn from_dense(values: &[Scalar]) -> Self {
        Vector::from_entries(values.iter().cloned().enumerate())
    }

    pub fn to_dense(&self, dim: usize) -> Vec<Scalar> {
        let mut out = vec![Scalar::zero(); dim];
        for (&i, s) in &self.entries {
            out[i] = s.clone();
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, i: usize) -> Scalar {
        self.entries.get(&i).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &Scalar)> {
        self.entries.iter().map(|(&i, s)| (i, s))
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.entries.keys().copied()
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn max_index(&self) -> Option<usize> {
        self.entries.keys().next_back().copied()
    }

    pub fn add_term(&mut self, i: usize, s: &Scalar) {
        if s.is_zero() {
            return;
        }
        match self.entries.get_mut(&i) {
            Some(cur) => {
                *cur += s;
                if cur.is_zero() {
                    self.entries.remove(&i);
                }
            }
            None => {
                self.entries.insert(i, s.clone());
            }
        }
    }

    pub fn add_scaled(&mut self, other: &Vector, s: &Scalar) {
        if s.is_zero() {
            return;
        }
        for (i, c) in other.iter() {
            self.add_term(i, &(c * s));
        }
    }

    pub fn add_assign(&mut self, other: &Vector) {
        for (i, c) in other.iter() {
            self.add_term(i, c);
        }
    }

    pub fn sub_assign(&mut self, other: &Vector) {
        for (i, c) in other.iter() {
            self.add_term(i, &-c);
        }
    }

    pub fn plus(&self, other: &Vector) -> Vector {
        let mut v = self.clone();
        v.add_assign(other);
        v
    }

    pub fn minus(&self, other: &Vector) -> Vector {
        let mut v = self.clone();
        v.sub_assign(other);
        v
    }

    pub fn scaled(&self, s: &Scalar) -> Vector {
        if s.is_zero() {
            return Vector::zero();
        }
        Vector { entries: self.entries.iter().map(|(&i, c)| (i, c * s)).collect() }
    }

    pub fn neg(&self) -> Vector {
        Vector { entries: self.entries.iter().map(|(&i, c)| (i, -c)).collect() }
    }

    /// Coefficient-wise complex conjugation (basis fixed).
    pub fn conj_coefficients(&self) -> Vector {
        Vector { entries: self.entries.iter().map(|(&i, c)| (i, c.conj())).collect() }
    }

    /// Keep only components whose index satisfies `keep`.
    pub fn filter(&self, mut keep: impl FnMut(usize) -> bool) -> Vector {
        Vector {
            entries: self.entries.iter().filter(|(&i, _)| keep(i)).map(|(&i, c)| (i, c.clone())).collect(),
        }
    }

    /// The parity involution: negate the components of odd basis elements.
    pub fn parity_twist(&self, basis: &GradedBasis) -> Vector {
        Vector {
            entries: self
                .entries
                .iter()
                .map(|(&i, c)| (i, if basis.parity(i).is_odd() { -c } else { c.clone() }))
                .collect(),
        }
    }

    /// The single parity of the support, `None` for zero or mixed vectors.
    pub fn parity(&self, basis: &GradedBasis) -> Option<Parity> {
        let mut it = self.support().map(|i| basis.parity(i));
        let first = it.next()?;
        it.all(|p| p == first).then_some(first)
    }

    /// Component of a single degree.
    pub fn degree_part(&self, basis: &GradedBasis, d: i32) -> Vector {
        self.filter(|i| basis.degree(i) == d)
    }

    pub fn dot(&self, covector: &Vector) -> Scalar {
        let mut acc = Scalar::zero();
        for (i, c) in self.iter() {
            if let Some(w) = covector.entries.get(&i) {
                acc += c * w;
            }
        }
        acc
    }

    pub fn display_with<'a>(&'a self, basis: &'a GradedBasis) -> VectorDisplay<'a> {
        VectorDisplay { v: self, basis }
    }
}

impl fmt::Debug for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.entries.iter()).finish()
    }
}

pub struct VectorDisplay<'a> {
    v: &'a Vector,
    basis: &'a GradedBasis,
}

impl fmt::Display for VectorDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.v.is_zero() {
            return write!(f, "0");
        }
        for (k, (i, c)) in self.v.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({})*{}", c, self.basis.get(i).name)?;
        }
        Ok(())
    }
}

/// Declared degree behaviour of a linear map.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shift {
    Total(i32),
    Bi(i32, i32),
    /// Only the Z/2 behaviour is declared.
    Parity(Parity),
}

impl Shift {
    pub fn parity(self) -> Parity {
        match self {
            Shift::Total(d) => Parity::of_degree(d),
            Shift::Bi(p, q) => Parity::of_degree(p + q),
            Shift::Parity(p) => p,
        }
    }

    pub fn negated(self) -> Shift {
        match self {
            Shift::Total(d) => Shift::Total(-d),
            Shift::Bi(p, q) => Shift::Bi(-p, -q),
            Shift::Parity(p) => Shift::Parity(p),
        }
    }

    pub fn compose(self, after: Shift) -> Shift {
        match (self, after) {
            (Shift::Bi(a, b), Shift::Bi(c, d)) => Shift::Bi(a + c, b + d),
            (Shift::Parity(_), _) | (_, Shift::Parity(_)) => Shift::Parity(self.parity() + after.parity()),
            (a, b) => Shift::Total(a.total().unwrap() + b.total().unwrap()),
        }
    }

    pub fn total(self) -> Option<i32> {
        match self {
            Shift::Total(d) => Some(d),
            Shift::Bi(p, q) => Some(p + q),
            Shift::Parity(_) => None,
        }
    }

    /// Whether an entry mapping basis element `col` to `row` respects this shift.
    pub fn admits(self, basis: &GradedBasis, row: usize, col: usize) -> bool {
        match self {
            Shift::Total(d) => basis.degree(row) - basis.degree(col) == d,
            Shift::Bi(p, q) => match (basis.bidegree(row), basis.bidegree(col)) {
                (Some((r1, r2)), Some((c1, c2))) => r1 - c1 == p && r2 - c2 == q,
                _ => false,
            },
            Shift::Parity(p) => basis.parity(row) + basis.parity(col) == p,
        }
    }
}

impl fmt::Display for Shift {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Shift::Total(d) => write!(f, "{}", d),
            Shift::Bi(p, q) => write!(f, "({},{})", p, q),
            Shift::Parity(p) => write!(f, "{}", p),
        }
    }
}

/// A linear endomorphism stored as sparse columns: `columns[j]` is the image of `e_j`.
#[derive(Clone, PartialEq, Eq)]
pub struct LinearMap {
    columns: Vec<Vector>,
    shift: Shift,
}

impl LinearMap {
    pub fn zero(dim: usize, shift: Shift) -> Self {
        LinearMap { columns: vec![Vector::zero(); dim], shift }
    }

    pub fn identity(dim: usize) -> Self {
        LinearMap { columns: (0..dim).map(Vector::basis).collect(), shift: Shift::Total(0) }
    }

    /// Builds from columns and validates every entry against the shift.
    pub fn from_columns(basis: &GradedBasis, columns: Vec<Vector>, shift: Shift) -> Result<Self, GradedError> {
        if columns.len() != basis.len() {
            return Err(GradedError::DimensionMismatch { left: columns.len(), right: basis.len() });
        }
        let map = LinearMap { columns, shift };
        map.validate(basis)?;
        Ok(map)
    }

    /// Builds from `(row, col, value)` triples.
    pub fn from_entries(
        basis: &GradedBasis,
        entries: impl IntoIterator<Item = (usize, usize, Scalar)>,
        shift: Shift,
    ) -> Result<Self, GradedError> {
        let dim = basis.len();
        let mut columns = vec![Vector::zero(); dim];
        for (r, c, s) in entries {
            if r >= dim {
                return Err(GradedError::IndexOutOfRange { index: r, dim });
            }
            if c >= dim {
                return Err(GradedError::IndexOutOfRange { index: c, dim });
            }
            columns[c].add_term(r, &s);
        }
        LinearMap::from_columns(basis, columns, shift)
    }

    /// Unvalidated constructor for maps whose shift is known by construction.
    pub(crate) fn from_columns_unchecked(columns: Vec<Vector>, shift: Shift) -> Self {
        LinearMap { columns, shift }
    }

    pub fn from_matrix(basis: &GradedBasis, m: &Matrix, shift: Shift) -> Result<Self, GradedError> {
        let columns = (0..m.cols()).map(|j| Vector::from_dense(&m.column(j))).collect();
        LinearMap::from_columns(basis, columns, shift)
    }

    pub fn validate(&self, basis: &GradedBasis) -> Result<(), GradedError> {
        for (c, col) in self.columns.iter().enumerate() {
            if let Some(r) = col.max_index() {
                if r >= basis.len() {
                    return Err(GradedError::IndexOutOfRange { index: r, dim: basis.len() });
                }
            }
            for r in col.support() {
                if !self.shift.admits(basis, r, c) {
                    return Err(GradedError::ShiftViolation { row: r, col: c, shift: self.shift });
                }
            }
        }
        Ok(())
    }

    /// Re-declares the shift as the most specific one the entries admit,
    /// trying `preferred`, then its total-degree form, then parity only.
    pub(crate) fn with_inferred_shift(mut self, basis: &GradedBasis, preferred: Shift) -> Self {
        let mut candidates = vec![preferred];
        if let Some(t) = preferred.total() {
            candidates.push(Shift::Total(t));
        }
        candidates.push(Shift::Parity(preferred.parity()));
        for s in candidates {
            self.shift = s;
            if self.validate(basis).is_ok() {
                return self;
            }
        }
        self
    }

    pub fn dim(&self) -> usize {
        self.columns.len()
    }

    pub fn shift(&self) -> Shift {
        self.shift
    }

    pub fn parity(&self) -> Parity {
        self.shift.parity()
    }

    pub fn column(&self, j: usize) -> &Vector {
        &self.columns[j]
    }

    pub fn columns(&self) -> &[Vector] {
        &self.columns
    }

    pub fn entry(&self, row: usize, col: usize) -> Scalar {
        self.columns[col].get(row)
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &Scalar)> {
        self.columns.iter().enumerate().flat_map(|(c, col)| col.iter().map(move |(r, s)| (r, c, s)))
    }

    pub fn is_zero(&self) -> bool {
        self.columns.iter().all(Vector::is_zero)
    }

    pub fn apply(&self, v: &Vector) -> Vector {
        let mut out = Vector::zero();
        for (j, c) in v.iter() {
            out.add_scaled(&self.columns[j], c);
        }
        out
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &LinearMap) -> LinearMap {
        LinearMap {
            columns: other.columns.iter().map(|c| self.apply(c)).collect(),
            shift: other.shift.compose(self.shift),
        }
    }

    pub fn plus(&self, other: &LinearMap) -> LinearMap {
        LinearMap {
            columns: self.columns.iter().zip(&other.columns).map(|(a, b)| a.plus(b)).collect(),
            shift: self.shift,
        }
    }

    pub fn minus(&self, other: &LinearMap) -> LinearMap {
        LinearMap {
            columns: self.columns.iter().zip(&other.columns).map(|(a, b)| a.minus(b)).collect(),
            shift: self.shift,
        }
    }

    pub fn scaled(&self, s: &Scalar) -> LinearMap {
        LinearMap { columns: self.columns.iter().map(|c| c.scaled(s)).collect(), shift: self.shift }
    }

    /// `[self, other]` as a graded commutator `self∘other - (-1)^{|self||other|} other∘self`.
    pub fn graded_commutator(&self, other: &LinearMap) -> LinearMap {
        let ab = self.compose(other);
        let ba = other.compose(self);
        if self.parity().sign_with(other.parity()) {
            ab.plus(&ba)
        } else {
            ab.minus(&ba)
        }
    }

    pub fn to_matrix(&self) -> Matrix {
        let n = self.dim();
        let mut m = Matrix::zeros(n, n);
        for (r, c, s) in self.entries() {
            m.set(r, c, s.clone());
        }
        m
    }

    pub fn with_shift(mut self, shift: Shift) -> LinearMap {
        self.shift = shift;
        self
    }
}

impl fmt::Debug for LinearMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LinearMap(shift {}, ", self.shift)?;
        f.debug_list().entries(self.entries().map(|(r, c, s)| (r, c, s.clone()))).finish()?;
        write!(f, ")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn koszul_sign_examples() {
        use Parity::*;
        assert_eq!(koszul_sign(&[Odd, Odd], &[1, 0]).unwrap(), -Scalar::one());
        assert_eq!(koszul_sign(&[Odd, Even], &[1, 0]).unwrap(), Scalar::one());
        assert_eq!(koszul_sign(&[Odd, Odd, Odd], &[2, 0, 1]).unwrap(), Scalar::one());
        assert_eq!(koszul_sign(&[Odd, Odd, Odd], &[0, 2, 1]).unwrap(), -Scalar::one());
    }

    #[test]
    fn koszul_sign_errors() {
        use Parity::*;
        assert!(matches!(koszul_sign(&[Odd], &[0, 1]), Err(GradedError::LengthMismatch { .. })));
        assert!(matches!(koszul_sign(&[Odd, Odd], &[0, 0]), Err(GradedError::NotAPermutation(_))));
    }

    #[test]
    fn basis_validation() {
        assert!(GradedBasis::new(vec![BasisElement::new("a", 0), BasisElement::new("a", 1)]).is_err());
        let bad = BasisElement { name: "x".into(), degree: 3, bidegree: Some((1, 1)) };
        assert!(matches!(GradedBasis::new(vec![bad]), Err(GradedError::InconsistentBidegree { .. })));
    }

    #[test]
    fn linear_map_respects_shift() {
        let basis = GradedBasis::new(vec![BasisElement::new("1", 0), BasisElement::new("t", 1)]).unwrap();
        assert!(LinearMap::from_entries(&basis, [(1, 0, Scalar::one())], Shift::Total(1)).is_ok());
        assert!(matches!(
            LinearMap::from_entries(&basis, [(0, 1, Scalar::one())], Shift::Total(1)),
            Err(GradedError::ShiftViolation { .. })
        ));
        let m = LinearMap::from_entries(&basis, [(1, 0, Scalar::from_int(3))], Shift::Total(1)).unwrap();
        assert_eq!(m.apply(&Vector::basis(0)), Vector::from_entries([(1, Scalar::from_int(3))]));
        assert!(m.compose(&m).is_zero());
    }

    #[test]
    fn vector_never_stores_zeros() {
        let mut v = Vector::basis(2);
        v.add_term(2, &-Scalar::one());
        assert!(v.is_zero());
        assert_eq!(v.nnz(), 0);
    }
}
