//! Super-commutative polynomials in the deformation variables `x^j`,
//! with coefficients either scalars (the ring `K`) or algebra vectors (`K ⊗ A`).
//!
//! Conventions: monomials are written in increasing variable order, coefficients
//! sit to the right of the monomial (`m·a`), and `∂/∂x^j` is a left derivation.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;

use crate::graded::{GradedBasis, Parity, Vector};
use crate::scalar::Scalar;

/// Parities of the deformation variables, indexed by variable number.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarSet {
    parities: Vec<Parity>,
}

impl VarSet {
    pub fn new(parities: Vec<Parity>) -> Self {
        VarSet { parities }
    }

    pub fn len(&self) -> usize {
        self.parities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parities.is_empty()
    }

    pub fn parity(&self, j: usize) -> Parity {
        self.parities[j]
    }

    pub fn parities(&self) -> &[Parity] {
        &self.parities
    }
}

/// Exponent vector; odd variables only ever carry exponent 0 or 1.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Monomial {
    exps: Vec<u32>,
}

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial { exps: vec![0; nvars] }
    }

    pub fn var(nvars: usize, j: usize) -> Self {
        let mut m = Monomial::one(nvars);
        m.exps[j] = 1;
        m
    }

    /// Exponent vector as given; fails if an odd variable has exponent above 1.
    pub fn from_exponents(exps: Vec<u32>, vars: &VarSet) -> Option<Self> {
        if exps.len() != vars.len() {
            return None;
        }
        if exps.iter().enumerate().any(|(j, &e)| e > 1 && vars.parity(j).is_odd()) {
            return None;
        }
        Some(Monomial { exps })
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exps
    }

    pub fn exponent(&self, j: usize) -> u32 {
        self.exps[j]
    }

    pub fn nvars(&self) -> usize {
        self.exps.len()
    }

    pub fn degree(&self) -> u32 {
        self.exps.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.exps.iter().all(|&e| e == 0)
    }

    pub fn parity(&self, vars: &VarSet) -> Parity {
        let odd: u32 = self.exps.iter().enumerate().filter(|(j, _)| vars.parity(*j).is_odd()).map(|(_, &e)| e).sum();
        if odd % 2 == 1 {
            Parity::Odd
        } else {
            Parity::Even
        }
    }

    /// Canonical product: `None` when an odd variable repeats, else the sign
    /// (`true` = negative) of reordering `self·other` into increasing order.
    pub fn multiply(&self, other: &Monomial, vars: &VarSet) -> Option<(bool, Monomial)> {
        let mut inversions = 0u32;
        let mut odd_right_so_far = 0u32;
        // count pairs (i in self, j in other) with i > j, both odd
        for j in 0..self.exps.len() {
            if vars.parity(j).is_odd() {
                if self.exps[j] == 1 && other.exps[j] == 1 {
                    return None;
                }
                if self.exps[j] == 1 {
                    inversions += odd_right_so_far;
                }
                odd_right_so_far += other.exps[j];
            }
        }
        let exps = self.exps.iter().zip(&other.exps).map(|(a, b)| a + b).collect();
        Some((inversions % 2 == 1, Monomial { exps }))
    }

    /// Left super-derivative `∂/∂x^j`: scalar factor (exponent and sign) and the lowered monomial.
    pub fn contract(&self, j: usize, vars: &VarSet) -> Option<(Scalar, Monomial)> {
        let e = self.exps[j];
        if e == 0 {
            return None;
        }
        let mut negative = false;
        if vars.parity(j).is_odd() {
            let passed: u32 = (0..j).filter(|&i| vars.parity(i).is_odd()).map(|i| self.exps[i]).sum();
            negative = passed % 2 == 1;
        }
        let mut exps = self.exps.clone();
        exps[j] -= 1;
        let factor = Scalar::from_int(e as i64);
        Some((if negative { -factor } else { factor }, Monomial { exps }))
    }

    /// Canonicalizes a word `x^{w0} x^{w1} ...`.
    pub fn from_word(word: &[usize], vars: &VarSet) -> Option<(bool, Monomial)> {
        let n = vars.len();
        let mut acc = (false, Monomial::one(n));
        for &j in word {
            let (s, m) = acc.1.multiply(&Monomial::var(n, j), vars)?;
            acc = (acc.0 ^ s, m);
        }
        Some(acc)
    }

    /// The canonical word: each variable repeated by its exponent, increasing order.
    pub fn to_word(&self) -> Vec<usize> {
        self.exps.iter().enumerate().flat_map(|(j, &e)| std::iter::repeat_n(j, e as usize)).collect()
    }

    pub fn contains_any(&self, vars: &[usize]) -> bool {
        vars.iter().any(|&j| self.exps[j] > 0)
    }
}

impl Ord for Monomial {
    /// Graded order; within a degree `x0` sorts before `x1`.
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| other.exps.cmp(&self.exps))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return write!(f, "1");
        }
        let mut first = true;
        for (j, &e) in self.exps.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if !first {
                write!(f, "*")?;
            }
            first = false;
            if e == 1 {
                write!(f, "x{}", j)?;
            } else {
                write!(f, "x{}^{}", j, e)?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

/// Coefficients a super-polynomial can carry.
pub trait Coefficient: Clone + PartialEq + Eq + fmt::Debug {
    fn zero() -> Self;
    fn is_zero(&self) -> bool;
    fn add_assign(&mut self, other: &Self);
    fn scaled(&self, s: &Scalar) -> Self;
}

impl Coefficient for Scalar {
    fn zero() -> Self {
        <Scalar as Zero>::zero()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add_assign(&mut self, other: &Self) {
        *self += other;
    }
    fn scaled(&self, s: &Scalar) -> Self {
        self * s
    }
}

impl Coefficient for Vector {
    fn zero() -> Self {
        Vector::zero()
    }
    fn is_zero(&self) -> bool {
        Vector::is_zero(self)
    }
    fn add_assign(&mut self, other: &Self) {
        Vector::add_assign(self, other);
    }
    fn scaled(&self, s: &Scalar) -> Self {
        Vector::scaled(self, s)
    }
}

/// Sparse map monomial → coefficient with no zero coefficients stored.
#[derive(Clone, PartialEq, Eq)]
pub struct SuperPolynomial<C: Coefficient> {
    terms: BTreeMap<Monomial, C>,
}

/// An element of `K`.
pub type ScalarSeries = SuperPolynomial<Scalar>;
/// An element of `A_K = K ⊗ A`.
pub type AlgebraSeries = SuperPolynomial<Vector>;

impl<C: Coefficient> Default for SuperPolynomial<C> {
    fn default() -> Self {
        SuperPolynomial { terms: BTreeMap::new() }
    }
}

impl<C: Coefficient> SuperPolynomial<C> {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(nvars: usize, c: C) -> Self {
        Self::term(Monomial::one(nvars), c)
    }

    pub fn term(m: Monomial, c: C) -> Self {
        let mut p = Self::zero();
        p.add_term(m, &c);
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &C)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, m: &Monomial) -> C {
        self.terms.get(m).cloned().unwrap_or_else(C::zero)
    }

    pub fn add_term(&mut self, m: Monomial, c: &C) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(cur) => {
                cur.add_assign(c);
                if cur.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c.clone());
            }
        }
    }

    pub fn add_assign(&mut self, other: &Self) {
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c);
        }
    }

    pub fn plus(&self, other: &Self) -> Self {
        let mut p = self.clone();
        p.add_assign(other);
        p
    }

    pub fn minus(&self, other: &Self) -> Self {
        let mut p = self.clone();
        p.add_assign(&other.scaled(&-Scalar::from_int(1)));
        p
    }

    pub fn scaled(&self, s: &Scalar) -> Self {
        let mut p = Self::zero();
        for (m, c) in &self.terms {
            p.add_term(m.clone(), &c.scaled(s));
        }
        p
    }

    pub fn max_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    pub fn homogeneous_part(&self, deg: u32) -> Self {
        SuperPolynomial {
            terms: self.terms.iter().filter(|(m, _)| m.degree() == deg).map(|(m, c)| (m.clone(), c.clone())).collect(),
        }
    }

    pub fn truncated(&self, max_deg: u32) -> Self {
        SuperPolynomial {
            terms: self.terms.iter().filter(|(m, _)| m.degree() <= max_deg).map(|(m, c)| (m.clone(), c.clone())).collect(),
        }
    }

    /// Left super-derivation `∂/∂x^j`, acting on `K` only.
    pub fn contract(&self, j: usize, vars: &VarSet) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            if let Some((factor, lowered)) = m.contract(j, vars) {
                out.add_term(lowered, &c.scaled(&factor));
            }
        }
        out
    }

    /// Extends a linear operator on coefficients of parity `op_parity`:
    /// `m·c ↦ (-1)^{|m||op|} m·op(c)`.
    pub fn map_coefficients<D: Coefficient>(
        &self,
        vars: &VarSet,
        op_parity: Parity,
        mut op: impl FnMut(&C) -> D,
    ) -> SuperPolynomial<D> {
        let mut out = SuperPolynomial::zero();
        for (m, c) in &self.terms {
            let image = op(c);
            let image = if op_parity.sign_with(m.parity(vars)) { image.scaled(&-Scalar::from_int(1)) } else { image };
            out.add_term(m.clone(), &image);
        }
        out
    }

    /// Sets `x^j = 0` for every `j` in `vars`.
    pub fn kill_variables(&self, vars: &[usize]) -> Self {
        SuperPolynomial {
            terms: self.terms.iter().filter(|(m, _)| !m.contains_any(vars)).map(|(m, c)| (m.clone(), c.clone())).collect(),
        }
    }

    pub fn monomials(&self) -> impl Iterator<Item = &Monomial> {
        self.terms.keys()
    }
}

impl ScalarSeries {
    pub fn mul(&self, other: &ScalarSeries, vars: &VarSet) -> ScalarSeries {
        let mut out = ScalarSeries::zero();
        for (m1, a) in &self.terms {
            for (m2, b) in &other.terms {
                if let Some((neg, m)) = m1.multiply(m2, vars) {
                    let c = a * b;
                    out.add_term(m, &if neg { -c } else { c });
                }
            }
        }
        out
    }

    /// Left action of `K` on `A_K`.
    pub fn act(&self, p: &AlgebraSeries, vars: &VarSet) -> AlgebraSeries {
        let mut out = AlgebraSeries::zero();
        for (m1, a) in &self.terms {
            for (m2, v) in &p.terms {
                if let Some((neg, m)) = m1.multiply(m2, vars) {
                    let s = if neg { -a.clone() } else { a.clone() };
                    out.add_term(m, &v.scaled(&s));
                }
            }
        }
        out
    }

    /// Value at `x = 0`.
    pub fn constant_term(&self) -> Scalar {
        self.terms.iter().find(|(m, _)| m.is_one()).map(|(_, c)| c.clone()).unwrap_or_else(<Scalar as num_traits::Zero>::zero)
    }
}

impl AlgebraSeries {
    /// `(m1·a)(m2·b) = ±(-1)^{|a||m2|} (m1 m2)·(a∧b)`.
    pub fn mul_with(
        &self,
        other: &AlgebraSeries,
        vars: &VarSet,
        basis: &GradedBasis,
        wedge: impl Fn(&Vector, &Vector) -> Vector,
    ) -> AlgebraSeries {
        let mut out = AlgebraSeries::zero();
        for (m1, a) in &self.terms {
            let twisted = a.parity_twist(basis);
            for (m2, b) in &other.terms {
                if let Some((neg, m)) = m1.multiply(m2, vars) {
                    let left = if m2.parity(vars).is_odd() { &twisted } else { a };
                    let mut c = wedge(left, b);
                    if neg {
                        c = c.neg();
                    }
                    out.add_term(m, &c);
                }
            }
        }
        out
    }

    /// Applies a covector to every coefficient.
    pub fn integrate(&self, covector: &Vector) -> ScalarSeries {
        let mut out = ScalarSeries::zero();
        for (m, a) in &self.terms {
            out.add_term(m.clone(), &a.dot(covector));
        }
        out
    }

    /// Total parity of each term; `None` if the series is zero or mixed.
    pub fn total_parity(&self, vars: &VarSet, basis: &GradedBasis) -> Option<Parity> {
        let mut seen: Option<Parity> = None;
        for (m, a) in &self.terms {
            let pa = a.parity(basis)?;
            let p = m.parity(vars) + pa;
            match seen {
                None => seen = Some(p),
                Some(q) if q != p => return None,
                _ => {}
            }
        }
        seen
    }
}

impl<C: Coefficient> fmt::Debug for SuperPolynomial<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.terms.iter()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    fn odd2() -> VarSet {
        VarSet::new(vec![Parity::Odd, Parity::Odd])
    }

    #[test]
    fn monomial_multiply_examples() {
        let v = odd2();
        let x1 = Monomial::var(2, 0);
        let x2 = Monomial::var(2, 1);
        let (neg, m) = x1.multiply(&x2, &v).unwrap();
        assert!(!neg);
        assert_eq!(m.exponents(), &[1, 1]);
        let (neg, m2) = x2.multiply(&x1, &v).unwrap();
        assert!(neg);
        assert_eq!(m2, m);
        assert!(x1.multiply(&x1, &v).is_none());
        let ev = VarSet::new(vec![Parity::Even]);
        let x0 = Monomial::var(1, 0);
        let (neg, sq) = x0.multiply(&x0, &ev).unwrap();
        assert!(!neg);
        assert_eq!(sq.exponents(), &[2]);
    }

    #[test]
    fn contraction_examples() {
        let v = odd2();
        let a = Vector::basis(3);
        let p = AlgebraSeries::term(Monomial::from_exponents(vec![1, 1], &v).unwrap(), a.clone());
        assert_eq!(p.contract(0, &v), AlgebraSeries::term(Monomial::var(2, 1), a.clone()));
        assert_eq!(p.contract(1, &v), AlgebraSeries::term(Monomial::var(2, 0), a.neg()));
        let ev = VarSet::new(vec![Parity::Even]);
        let q = AlgebraSeries::term(Monomial::from_exponents(vec![2], &ev).unwrap(), a.clone());
        assert_eq!(q.contract(0, &ev), AlgebraSeries::term(Monomial::var(1, 0), a.scaled(&Scalar::from_int(2))));
    }

    #[test]
    fn word_canonicalization_is_idempotent() {
        let v = VarSet::new(vec![Parity::Odd, Parity::Even, Parity::Odd]);
        let (neg, m) = Monomial::from_word(&[2, 1, 0, 1], &v).unwrap();
        assert!(neg);
        assert_eq!(m.exponents(), &[1, 2, 1]);
        let (neg2, m2) = Monomial::from_word(&m.to_word(), &v).unwrap();
        assert!(!neg2);
        assert_eq!(m2, m);
    }

    #[test]
    fn scalar_series_constant_term() {
        let v = odd2();
        let p = ScalarSeries::constant(2, Scalar::one()).plus(&ScalarSeries::term(Monomial::var(2, 0), Scalar::one()));
        assert_eq!(p.constant_term(), Scalar::one());
        assert_eq!(p.mul(&p, &v).len(), 2);
    }
}
