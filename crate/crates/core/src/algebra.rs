//! Finite-dimensional graded-commutative algebras given by structure constants.


use crate::graded::{GradedBasis, GradedError, Shift, Vector};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AlgebraError {
    #[error(transparent)]
    Graded(#[from] GradedError),
    #[error("duplicate structure constant for ({0},{1}) -> {2}")]
    DuplicateConstant(usize, usize, usize),
    #[error("structure constant ({i},{j}) -> {k} does not respect degrees")]
    DegreeViolation { i: usize, j: usize, k: usize },
    #[error("basis element 0 does not act as a degree-0 unit on e_{0}")]
    NotUnital(usize),
    #[error("vector index {index} outside algebra of dimension {dim}")]
    DimensionMismatch { index: usize, dim: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedAlgebra {
    basis: GradedBasis,
    /// `table[i][j] = e_i ∧ e_j`
    table: Vec<Vec<Vector>>,
}

impl GradedAlgebra {
    /// Builds from `(i, j, k, c)` meaning `e_i ∧ e_j` has coefficient `c` on `e_k`.
    /// Products involving the unit (index 0) are filled in automatically unless given.
    pub fn from_structure_constants(
        basis: GradedBasis,
        constants: impl IntoIterator<Item = (usize, usize, usize, Scalar)>,
    ) -> Result<Self, AlgebraError> {
        let n = basis.len();
        let mut table = vec![vec![Vector::zero(); n]; n];
        let mut seen = std::collections::HashSet::new();
        let mut unit_given = vec![vec![false; n]; 2];
        for (i, j, k, c) in constants {
            for idx in [i, j, k] {
                if idx >= n {
                    return Err(GradedError::IndexOutOfRange { index: idx, dim: n }.into());
                }
            }
            if !seen.insert((i, j, k)) {
                return Err(AlgebraError::DuplicateConstant(i, j, k));
            }
            if basis.degree(i) + basis.degree(j) != basis.degree(k) {
                return Err(AlgebraError::DegreeViolation { i, j, k });
            }
            if let (Some((a, b)), Some((c1, d1)), Some((e, f))) = (basis.bidegree(i), basis.bidegree(j), basis.bidegree(k)) {
                if a + c1 != e || b + d1 != f {
                    return Err(AlgebraError::DegreeViolation { i, j, k });
                }
            }
            if i == 0 {
                unit_given[0][j] = true;
            }
            if j == 0 {
                unit_given[1][i] = true;
            }
            table[i][j].add_term(k, &c);
        }
        if n > 0 {
            if basis.degree(0) != 0 {
                return Err(AlgebraError::NotUnital(0));
            }
            for a in 0..n {
                if !unit_given[0][a] {
                    table[0][a] = Vector::basis(a);
                }
                if !unit_given[1][a] {
                    table[a][0] = Vector::basis(a);
                }
                if table[0][a] != Vector::basis(a) || table[a][0] != Vector::basis(a) {
                    return Err(AlgebraError::NotUnital(a));
                }
            }
        }
        Ok(GradedAlgebra { basis, table })
    }

    pub fn basis(&self) -> &GradedBasis {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn unit(&self) -> Vector {
        Vector::basis(0)
    }

    pub fn product_of_basis(&self, i: usize, j: usize) -> &Vector {
        &self.table[i][j]
    }

    /// Nonzero structure constants in table order.
    pub fn structure_constants(&self) -> impl Iterator<Item = (usize, usize, usize, &Scalar)> {
        self.table.iter().enumerate().flat_map(|(i, row)| {
            row.iter().enumerate().flat_map(move |(j, v)| v.iter().map(move |(k, c)| (i, j, k, c)))
        })
    }

    pub fn check_dim(&self, v: &Vector) -> Result<(), AlgebraError> {
        match v.max_index() {
            Some(i) if i >= self.dim() => Err(AlgebraError::DimensionMismatch { index: i, dim: self.dim() }),
            _ => Ok(()),
        }
    }

    pub fn wedge(&self, a: &Vector, b: &Vector) -> Result<Vector, AlgebraError> {
        self.check_dim(a)?;
        self.check_dim(b)?;
        Ok(self.mul(a, b))
    }

    /// Bilinear product without dimension checks.
    pub fn mul(&self, a: &Vector, b: &Vector) -> Vector {
        let mut out = Vector::zero();
        for (i, x) in a.iter() {
            for (j, y) in b.iter() {
                let e = &self.table[i][j];
                if !e.is_zero() {
                    out.add_scaled(e, &(x * y));
                }
            }
        }
        out
    }

    /// Left multiplication by `a` as a linear map.
    pub fn left_multiplication(&self, a: &Vector, shift: Shift) -> crate::graded::LinearMap {
        let cols = (0..self.dim()).map(|j| self.mul(a, &Vector::basis(j))).collect();
        crate::graded::LinearMap::from_columns_unchecked(cols, shift)
    }

    /// Highest degree carried by the basis.
    pub fn top_degree(&self) -> i32 {
        self.basis.max_degree()
    }

    pub fn power(&self, a: &Vector, k: u32) -> Vector {
        let mut acc = self.unit();
        for _ in 0..k {
            acc = self.mul(&acc, a);
        }
        acc
    }

    /// Direct check of `e_i ∧ e_j` against the graded sign rule.
    pub fn commutator_defect(&self, i: usize, j: usize) -> Vector {
        let ij = &self.table[i][j];
        let ji = &self.table[j][i];
        let sign = Scalar::sign(self.basis.parity(i).sign_with(self.basis.parity(j)));
        ij.minus(&ji.scaled(&sign))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graded::BasisElement;

    fn one() -> Scalar {
        num_traits::One::one()
    }

    fn dual_numbers() -> GradedAlgebra {
        // k[t]/(t^2) with t odd of degree 1
        let basis = GradedBasis::new(vec![BasisElement::new("1", 0), BasisElement::new("t", 1)]).unwrap();
        GradedAlgebra::from_structure_constants(basis, []).unwrap()
    }

    #[test]
    fn unit_filled_in() {
        let a = dual_numbers();
        assert_eq!(a.mul(&Vector::basis(0), &Vector::basis(1)), Vector::basis(1));
        assert!(a.mul(&Vector::basis(1), &Vector::basis(1)).is_zero());
    }

    #[test]
    fn rejects_degree_violation_and_duplicates() {
        let basis = GradedBasis::new(vec![BasisElement::new("1", 0), BasisElement::new("t", 1)]).unwrap();
        assert!(matches!(
            GradedAlgebra::from_structure_constants(basis.clone(), [(1, 1, 1, one())]),
            Err(AlgebraError::DegreeViolation { .. })
        ));
        assert!(matches!(
            GradedAlgebra::from_structure_constants(basis, [(0, 1, 1, one()), (0, 1, 1, one())]),
            Err(AlgebraError::DuplicateConstant(..))
        ));
    }

    #[test]
    fn wedge_dimension_check() {
        let a = dual_numbers();
        assert!(matches!(a.wedge(&Vector::basis(5), &Vector::basis(0)), Err(AlgebraError::DimensionMismatch { .. })));
    }
}
