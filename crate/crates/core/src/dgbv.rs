//! dGBV algebras: product, differential `δ`, BV operator `Δ`, the bracket `Δ`
//! generates, an integral, and exhaustive axiom checking.

use num_traits::Zero;
use rayon::prelude::*;

use crate::algebra::{AlgebraError, GradedAlgebra};
use crate::graded::{GradedBasis, GradedError, LinearMap, Parity, Vector};
use crate::linalg::Subspace;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DgbvError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Graded(#[from] GradedError),
    #[error("operator `{name}` has dimension {got}, algebra has {expected}")]
    OperatorDimension { name: &'static str, got: usize, expected: usize },
    #[error("operator `{0}` must be odd")]
    EvenOperator(&'static str),
    #[error("integral covector entry {index} outside dimension {dim}")]
    IntegralIndex { index: usize, dim: usize },
    #[error("input to the bracket formula is not homogeneous")]
    NonHomogeneous,
    #[error("shift element must be even")]
    OddShiftElement,
    #[error("shift preconditions fail: δa + ½[a•a] = {mc_residual:?}, Δa = {bv_residual:?}")]
    ShiftPrecondition { mc_residual: Vector, bv_residual: Vector },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axiom {
    UnitLaw,
    GradedCommutativity,
    Associativity,
    DeltaDerivation,
    DeltaSquare,
    BvSquare,
    DeltaBvAnticommute,
    BracketSymmetry,
    BracketJacobi,
    BracketLeibniz,
}

impl Axiom {
    pub const ALL: [Axiom; 10] = [
        Axiom::UnitLaw,
        Axiom::GradedCommutativity,
        Axiom::Associativity,
        Axiom::DeltaDerivation,
        Axiom::DeltaSquare,
        Axiom::BvSquare,
        Axiom::DeltaBvAnticommute,
        Axiom::BracketSymmetry,
        Axiom::BracketJacobi,
        Axiom::BracketLeibniz,
    ];

    pub fn arity(self) -> usize {
        match self {
            Axiom::UnitLaw | Axiom::DeltaSquare | Axiom::BvSquare | Axiom::DeltaBvAnticommute => 1,
            Axiom::GradedCommutativity | Axiom::DeltaDerivation | Axiom::BracketSymmetry => 2,
            Axiom::Associativity | Axiom::BracketJacobi | Axiom::BracketLeibniz => 3,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Axiom::UnitLaw => "unit",
            Axiom::GradedCommutativity => "graded-commutativity",
            Axiom::Associativity => "associativity",
            Axiom::DeltaDerivation => "delta-derivation",
            Axiom::DeltaSquare => "delta-squared",
            Axiom::BvSquare => "bv-squared",
            Axiom::DeltaBvAnticommute => "delta-bv-anticommute",
            Axiom::BracketSymmetry => "bracket-symmetry",
            Axiom::BracketJacobi => "bracket-jacobi",
            Axiom::BracketLeibniz => "bracket-leibniz",
        }
    }
}

/// A basis tuple on which an axiom fails, with the nonzero discrepancy.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub indices: Vec<usize>,
    pub discrepancy: Vector,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomCheck {
    pub axiom: Axiom,
    pub tuples_checked: usize,
    pub witness: Option<Witness>,
}

impl AxiomCheck {
    pub fn passed(&self) -> bool {
        self.witness.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomReport {
    pub checks: Vec<AxiomCheck>,
}

impl AxiomReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(AxiomCheck::passed)
    }

    pub fn get(&self, axiom: Axiom) -> &AxiomCheck {
        self.checks.iter().find(|c| c.axiom == axiom).expect("every axiom is checked")
    }

    pub fn failures(&self) -> impl Iterator<Item = &AxiomCheck> {
        self.checks.iter().filter(|c| !c.passed())
    }
}

/// A basis pair on which one of the integral identities fails.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairWitness {
    pub a: usize,
    pub b: usize,
    pub discrepancy: Scalar,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntegralReport {
    /// `∫(δa)∧b = (-1)^{|a|+1} ∫a∧δb`
    pub delta_witness: Option<PairWitness>,
    /// `∫(Δa)∧b = (-1)^{|a|} ∫a∧Δb`
    pub bv_witness: Option<PairWitness>,
    pub is_integral: bool,
    pub cohomology_dim: usize,
    pub pairing_rank: usize,
    pub is_nice: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DgbvAlgebra {
    algebra: GradedAlgebra,
    delta: LinearMap,
    bv: LinearMap,
    integral: Vector,
    /// `[e_i • e_j]`
    bracket_table: Vec<Vec<Vector>>,
}

fn sign(negative: bool) -> Scalar {
    Scalar::sign(negative)
}

impl DgbvAlgebra {
    pub fn new(algebra: GradedAlgebra, delta: LinearMap, bv: LinearMap, integral: Vector) -> Result<Self, DgbvError> {
        let n = algebra.dim();
        for (name, op) in [("delta", &delta), ("bv", &bv)] {
            if op.dim() != n {
                return Err(DgbvError::OperatorDimension { name, got: op.dim(), expected: n });
            }
            if op.parity() != Parity::Odd {
                return Err(DgbvError::EvenOperator(name));
            }
            op.validate(algebra.basis())?;
        }
        if let Some(i) = integral.max_index() {
            if i >= n {
                return Err(DgbvError::IntegralIndex { index: i, dim: n });
            }
        }
        let bracket_table = Self::compute_bracket_table(&algebra, &bv);
        Ok(DgbvAlgebra { algebra, delta, bv, integral, bracket_table })
    }

    fn compute_bracket_table(algebra: &GradedAlgebra, bv: &LinearMap) -> Vec<Vec<Vector>> {
        let n = algebra.dim();
        let basis = algebra.basis();
        let images: Vec<&Vector> = (0..n).map(|i| bv.column(i)).collect();
        (0..n)
            .into_par_iter()
            .map(|i| {
                let pi = basis.parity(i).is_odd();
                (0..n)
                    .map(|j| {
                        let ab = algebra.product_of_basis(i, j);
                        let mut inner = bv.apply(ab);
                        inner.sub_assign(&algebra.mul(images[i], &Vector::basis(j)));
                        let a_db = algebra.mul(&Vector::basis(i), images[j]);
                        inner.sub_assign(&a_db.scaled(&sign(pi)));
                        inner.scaled(&sign(pi))
                    })
                    .collect()
            })
            .collect()
    }

    pub fn algebra(&self) -> &GradedAlgebra {
        &self.algebra
    }

    pub fn basis(&self) -> &GradedBasis {
        self.algebra.basis()
    }

    pub fn dim(&self) -> usize {
        self.algebra.dim()
    }

    pub fn delta(&self) -> &LinearMap {
        &self.delta
    }

    pub fn bv(&self) -> &LinearMap {
        &self.bv
    }

    pub fn integral(&self) -> &Vector {
        &self.integral
    }

    pub fn with_integral(&self, integral: Vector) -> Result<Self, DgbvError> {
        DgbvAlgebra::new(self.algebra.clone(), self.delta.clone(), self.bv.clone(), integral)
    }

    pub fn with_delta(&self, delta: LinearMap) -> Result<Self, DgbvError> {
        DgbvAlgebra::new(self.algebra.clone(), delta, self.bv.clone(), self.integral.clone())
    }

    pub fn wedge(&self, a: &Vector, b: &Vector) -> Result<Vector, DgbvError> {
        Ok(self.algebra.wedge(a, b)?)
    }

    pub fn bracket_of_basis(&self, i: usize, j: usize) -> &Vector {
        &self.bracket_table[i][j]
    }

    /// `[a • b]`, extended bilinearly from basis pairs.
    pub fn bracket(&self, a: &Vector, b: &Vector) -> Vector {
        let mut out = Vector::zero();
        for (i, x) in a.iter() {
            for (j, y) in b.iter() {
                let e = &self.bracket_table[i][j];
                if !e.is_zero() {
                    out.add_scaled(e, &(x * y));
                }
            }
        }
        out
    }

    /// The generator formula `(-1)^{|a|}(Δ(a∧b) - Δa∧b - (-1)^{|a|} a∧Δb)` evaluated
    /// directly on homogeneous inputs.
    pub fn gerstenhaber_bracket(&self, a: &Vector, b: &Vector) -> Result<Vector, DgbvError> {
        self.algebra.check_dim(a)?;
        self.algebra.check_dim(b)?;
        if a.is_zero() || b.is_zero() {
            return Ok(Vector::zero());
        }
        let pa = a.parity(self.basis()).ok_or(DgbvError::NonHomogeneous)?;
        b.parity(self.basis()).ok_or(DgbvError::NonHomogeneous)?;
        let s = sign(pa.is_odd());
        let mut inner = self.bv.apply(&self.algebra.mul(a, b));
        inner.sub_assign(&self.algebra.mul(&self.bv.apply(a), b));
        inner.sub_assign(&self.algebra.mul(a, &self.bv.apply(b)).scaled(&s));
        Ok(inner.scaled(&s))
    }

    /// `{a, b} = (-1)^{|a|-1} [a • b]`, the covariant form of the bracket.
    pub fn koszul_bracket(&self, a: &Vector, b: &Vector) -> Vector {
        let mut out = Vector::zero();
        for (i, x) in a.iter() {
            let s = sign(!self.basis().parity(i).is_odd());
            for (j, y) in b.iter() {
                let e = &self.bracket_table[i][j];
                if !e.is_zero() {
                    out.add_scaled(e, &(&(x * y) * &s));
                }
            }
        }
        out
    }

    pub fn integrate(&self, v: &Vector) -> Scalar {
        v.dot(&self.integral)
    }

    /// `(a, b) = ∫ a∧b`.
    pub fn pairing(&self, a: &Vector, b: &Vector) -> Scalar {
        self.integrate(&self.algebra.mul(a, b))
    }

    /// Re-evaluates one axiom on one basis tuple; zero means it holds there.
    pub fn discrepancy(&self, axiom: Axiom, idx: &[usize]) -> Vector {
        let alg = &self.algebra;
        let basis = self.basis();
        let e = Vector::basis;
        let p = |i: usize| basis.parity(i).is_odd();
        let par = |i: usize| basis.parity(i);
        match axiom {
            Axiom::UnitLaw => {
                let i = idx[0];
                let mut d = alg.mul(&alg.unit(), &e(i)).minus(&e(i));
                d.add_assign(&alg.mul(&e(i), &alg.unit()).minus(&e(i)));
                d
            }
            Axiom::GradedCommutativity => alg.commutator_defect(idx[0], idx[1]),
            Axiom::Associativity => {
                let (i, j, k) = (idx[0], idx[1], idx[2]);
                let left = alg.mul(alg.product_of_basis(i, j), &e(k));
                let right = alg.mul(&e(i), alg.product_of_basis(j, k));
                left.minus(&right)
            }
            Axiom::DeltaDerivation => {
                let (i, j) = (idx[0], idx[1]);
                let lhs = self.delta.apply(alg.product_of_basis(i, j));
                let mut rhs = alg.mul(self.delta.column(i), &e(j));
                rhs.add_assign(&alg.mul(&e(i), self.delta.column(j)).scaled(&sign(p(i))));
                lhs.minus(&rhs)
            }
            Axiom::DeltaSquare => self.delta.apply(self.delta.column(idx[0])),
            Axiom::BvSquare => self.bv.apply(self.bv.column(idx[0])),
            Axiom::DeltaBvAnticommute => {
                let i = idx[0];
                self.delta.apply(self.bv.column(i)).plus(&self.bv.apply(self.delta.column(i)))
            }
            Axiom::BracketSymmetry => {
                // {λ, μ} = (-1)^{|λ||μ|} {μ, λ}
                let (i, j) = (idx[0], idx[1]);
                let lm = self.koszul_bracket(&e(i), &e(j));
                let ml = self.koszul_bracket(&e(j), &e(i));
                lm.minus(&ml.scaled(&sign(par(i).sign_with(par(j)))))
            }
            Axiom::BracketJacobi => {
                // Σ_cyc (-1)^{|λ|(|ν|-1)} {λ, {μ, ν}} = 0
                let (l, m, n) = (idx[0], idx[1], idx[2]);
                let term = |a: usize, b: usize, c: usize| {
                    let inner = self.koszul_bracket(&e(b), &e(c));
                    let s = sign(p(a) && !p(c));
                    self.koszul_bracket(&e(a), &inner).scaled(&s)
                };
                let mut d = term(l, m, n);
                d.add_assign(&term(m, n, l));
                d.add_assign(&term(n, l, m));
                d
            }
            Axiom::BracketLeibniz => {
                // {λ, μ∧ν} = {λ, μ}∧ν + (-1)^{(|λ|+1)|μ|} μ∧{λ, ν}
                let (l, m, n) = (idx[0], idx[1], idx[2]);
                let lhs = self.koszul_bracket(&e(l), alg.product_of_basis(m, n));
                let mut rhs = alg.mul(&self.koszul_bracket(&e(l), &e(m)), &e(n));
                let s = sign(!p(l) && p(m));
                rhs.add_assign(&alg.mul(&e(m), &self.koszul_bracket(&e(l), &e(n))).scaled(&s));
                lhs.minus(&rhs)
            }
        }
    }

    fn check_one(&self, axiom: Axiom) -> AxiomCheck {
        let n = self.dim();
        let arity = axiom.arity();
        let tuples_checked = n.pow(arity as u32);
        let witness = (0..n).into_par_iter().find_map_first(|i| match arity {
            1 => self.witness(axiom, vec![i]),
            2 => (0..n).find_map(|j| self.witness(axiom, vec![i, j])),
            _ => (0..n).find_map(|j| (0..n).find_map(|k| self.witness(axiom, vec![i, j, k]))),
        });
        AxiomCheck { axiom, tuples_checked, witness }
    }

    fn witness(&self, axiom: Axiom, indices: Vec<usize>) -> Option<Witness> {
        let discrepancy = self.discrepancy(axiom, &indices);
        (!discrepancy.is_zero()).then_some(Witness { indices, discrepancy })
    }

    /// Exhaustive check of every axiom over all basis tuples.
    pub fn check_axioms(&self) -> AxiomReport {
        AxiomReport { checks: Axiom::ALL.iter().map(|&a| self.check_one(a)).collect() }
    }

    /// Representatives of a basis of `H(A, δ)`, chosen greedily from the canonical
    /// kernel basis against `Im δ`.
    pub fn cohomology_representatives(&self) -> Vec<Vector> {
        let n = self.dim();
        let kernel = Subspace::kernel(&self.delta);
        let mut span = Subspace::image(&self.delta);
        let mut reps = Vec::new();
        for v in kernel.basis() {
            if !span.contains(&v) {
                span = span.sum(&Subspace::span(n, std::slice::from_ref(&v)));
                reps.push(v);
            }
        }
        reps
    }

    pub fn check_integral(&self) -> IntegralReport {
        let n = self.dim();
        let basis = self.basis();
        let pair_witness = |op: &LinearMap, odd_extra: bool| -> Option<PairWitness> {
            (0..n).find_map(|a| {
                (0..n).find_map(|b| {
                    let lhs = self.pairing(op.column(a), &Vector::basis(b));
                    let s = sign(basis.parity(a).is_odd() ^ odd_extra);
                    let rhs = &self.pairing(&Vector::basis(a), op.column(b)) * &s;
                    let discrepancy = &lhs - &rhs;
                    (!discrepancy.is_zero()).then_some(PairWitness { a, b, discrepancy })
                })
            })
        };
        let delta_witness = pair_witness(&self.delta, true);
        let bv_witness = pair_witness(&self.bv, false);
        let is_integral = delta_witness.is_none() && bv_witness.is_none();
        let reps = self.cohomology_representatives();
        let gram: Vec<Vec<Scalar>> =
            reps.iter().map(|a| reps.iter().map(|b| self.pairing(a, b)).collect()).collect();
        let pairing_rank = if reps.is_empty() { 0 } else { crate::linalg::Matrix::from_rows(gram).rank() };
        IntegralReport {
            delta_witness,
            bv_witness,
            is_integral,
            cohomology_dim: reps.len(),
            pairing_rank,
            is_nice: pairing_rank == reps.len() && !reps.is_empty(),
        }
    }

    /// `δ a + ½[a • a]` and `Δ a` for a candidate shift.
    pub fn shift_residuals(&self, a: &Vector) -> (Vector, Vector) {
        let mut mc = self.delta.apply(a);
        mc.add_assign(&self.bracket(a, a).scaled(&Scalar::half()));
        (mc, self.bv.apply(a))
    }

    /// The shifted algebra with `δ_a = δ + [a • ·]`.
    pub fn shift_by(&self, a: &Vector) -> Result<DgbvAlgebra, DgbvError> {
        self.algebra.check_dim(a)?;
        if a.support().any(|i| self.basis().parity(i).is_odd()) {
            return Err(DgbvError::OddShiftElement);
        }
        let (mc_residual, bv_residual) = self.shift_residuals(a);
        if !mc_residual.is_zero() || !bv_residual.is_zero() {
            return Err(DgbvError::ShiftPrecondition { mc_residual, bv_residual });
        }
        if a.is_zero() {
            return Ok(self.clone());
        }
        let cols: Vec<Vector> =
            (0..self.dim()).map(|j| self.delta.column(j).plus(&self.bracket(a, &Vector::basis(j)))).collect();
        let shifted = LinearMap::from_columns_unchecked(cols, self.delta.shift())
            .with_inferred_shift(self.basis(), self.delta.shift());
        DgbvAlgebra::new(self.algebra.clone(), shifted, self.bv.clone(), self.integral.clone())
    }

    /// Whether the integral covector is supported in top degree only.
    pub fn integral_is_top_degree(&self) -> bool {
        let top = self.algebra.top_degree();
        self.integral.support().all(|i| self.basis().degree(i) == top)
    }
}

impl Witness {
    pub fn is_nonzero(&self) -> bool {
        !self.discrepancy.is_zero()
    }
}
