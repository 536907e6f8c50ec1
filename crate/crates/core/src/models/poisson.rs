//! Koszul-Brylinski operators `Δ = ι_w d − d ι_w` for invariant Poisson bivectors.

use num_traits::Zero;

use crate::algebra::GradedAlgebra;
use crate::dgbv::DgbvAlgebra;
use crate::graded::{LinearMap, Shift, Vector};
use crate::scalar::Scalar;

use super::exterior::Exterior;
use super::lie::{chevalley_eilenberg, schouten, CeModel, LieAlgebraData};
use super::ModelError;

/// `w = Σ c X_i∧X_j` with 0-based `i < j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bivector {
    terms: Vec<(usize, usize, Scalar)>,
}

impl Bivector {
    pub fn new(terms: impl IntoIterator<Item = (usize, usize, Scalar)>) -> Result<Self, ModelError> {
        let mut out: Vec<(usize, usize, Scalar)> = Vec::new();
        for (i, j, c) in terms {
            let (i, j, c) = match i.cmp(&j) {
                std::cmp::Ordering::Less => (i, j, c),
                std::cmp::Ordering::Greater => (j, i, -c),
                std::cmp::Ordering::Equal => {
                    return Err(ModelError::StructureConstant(format!("bivector term X{0}∧X{0}", i + 1)))
                }
            };
            match out.iter_mut().find(|(a, b, _)| *a == i && *b == j) {
                Some(t) => t.2 += &c,
                None => out.push((i, j, c)),
            }
        }
        out.retain(|t| !t.2.is_zero());
        out.sort_by_key(|t| (t.0, t.1));
        Ok(Bivector { terms: out })
    }

    pub fn zero() -> Self {
        Bivector { terms: Vec::new() }
    }

    pub fn terms(&self) -> &[(usize, usize, Scalar)] {
        &self.terms
    }

    pub fn max_index(&self) -> Option<usize> {
        self.terms.iter().map(|t| t.1).max()
    }

    /// As an element of the polyvector algebra `Λg`.
    pub fn to_polyvector(&self, poly: &Exterior) -> Vector {
        let mut v = Vector::zero();
        for (i, j, c) in &self.terms {
            v.add_term(poly.monomial(&[*i, *j]), c);
        }
        v
    }
}

/// `[w, w]` in `Λ³g`.
pub fn schouten_square(g: &LieAlgebraData, w: &Bivector) -> Vector {
    let poly = Exterior::standard("X", g.dim());
    let v = w.to_polyvector(&poly);
    schouten(g, &poly, &v, &v)
}

/// `ι_w = Σ c ι_{X_i} ι_{X_j}`.
pub fn contraction_operator(ext: &Exterior, w: &Bivector) -> LinearMap {
    let mut out = LinearMap::zero(ext.dim(), Shift::Total(-2));
    for (i, j, c) in w.terms() {
        out = out.plus(&ext.interior(*i).compose(&ext.interior(*j)).scaled(c));
    }
    out.with_shift(Shift::Total(-2))
}

/// `Δ = ι_w d − d ι_w`, after checking `[w, w] = 0`.
pub fn koszul_delta(g: &LieAlgebraData, ce: &CeModel, w: &Bivector) -> Result<LinearMap, ModelError> {
    if w.max_index().is_some_and(|m| m >= g.dim()) {
        return Err(ModelError::StructureConstant("bivector index exceeds algebra dimension".into()));
    }
    let sq = schouten_square(g, w);
    if !sq.is_zero() {
        return Err(ModelError::NotPoisson(sq));
    }
    let iota = contraction_operator(&ce.exterior, w);
    let bv = iota.compose(&ce.d).minus(&ce.d.compose(&iota)).with_shift(Shift::Total(-1));
    if !bv.compose(&bv).is_zero() {
        return Err(ModelError::Identity("Δ² = 0"));
    }
    if !bv.compose(&ce.d).plus(&ce.d.compose(&bv)).is_zero() {
        return Err(ModelError::Identity("dΔ + Δd = 0"));
    }
    Ok(bv)
}

/// The dGBV algebra `(Λg*, d, Δ)` with `∫` the top-degree coefficient.
pub fn poisson_dgbv(g: &LieAlgebraData, w: &Bivector) -> Result<DgbvAlgebra, ModelError> {
    let ce = chevalley_eilenberg(g)?;
    let bv = koszul_delta(g, &ce, w)?;
    let integral = ce.exterior.top_integral();
    Ok(DgbvAlgebra::new(ce.exterior.algebra().clone(), ce.d.clone(), bv, integral)?)
}

/// Outcome of an exhaustive check over basis pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairCheck {
    pub pairs_checked: usize,
    pub witness: Option<(usize, usize, Scalar)>,
}

impl PairCheck {
    pub fn holds(&self) -> bool {
        self.witness.is_none()
    }
}

/// `∫ ι(α)∧β = ∫ α∧ι(β)` for basis pairs with `|α| + |β| = top + 2`.
pub fn check_contraction_identity(algebra: &GradedAlgebra, integral: &Vector, iota: &LinearMap) -> PairCheck {
    let basis = algebra.basis();
    let top = algebra.top_degree();
    let n = basis.len();
    let mut checked = 0;
    for a in 0..n {
        for b in 0..n {
            if basis.degree(a) + basis.degree(b) != top + 2 {
                continue;
            }
            checked += 1;
            let (ea, eb) = (Vector::basis(a), Vector::basis(b));
            let lhs = algebra.mul(&iota.apply(&ea), &eb).dot(integral);
            let rhs = algebra.mul(&ea, &iota.apply(&eb)).dot(integral);
            if lhs != rhs {
                return PairCheck { pairs_checked: checked, witness: Some((a, b, lhs - rhs)) };
            }
        }
    }
    PairCheck { pairs_checked: checked, witness: None }
}

/// `∫ Δ(α)∧β = (−1)^{|α|} ∫ α∧Δ(β)` for all homogeneous basis pairs.
pub fn check_delta_integral(algebra: &GradedAlgebra, integral: &Vector, bv: &LinearMap) -> PairCheck {
    let basis = algebra.basis();
    let n = basis.len();
    for a in 0..n {
        for b in 0..n {
            let (ea, eb) = (Vector::basis(a), Vector::basis(b));
            let lhs = algebra.mul(&bv.apply(&ea), &eb).dot(integral);
            let rhs = algebra.mul(&ea, &bv.apply(&eb)).dot(integral);
            let rhs = rhs * Scalar::sign(basis.parity(a).is_odd());
            if lhs != rhs {
                return PairCheck { pairs_checked: a * n + b + 1, witness: Some((a, b, lhs - rhs)) };
            }
        }
    }
    PairCheck { pairs_checked: n * n, witness: None }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    fn kt_w() -> Bivector {
        Bivector::new([(0, 2, Scalar::one()), (1, 3, Scalar::one())]).unwrap()
    }

    #[test]
    fn heisenberg_x1x2_is_not_poisson() {
        let g = LieAlgebraData::heisenberg();
        let ce = chevalley_eilenberg(&g).unwrap();
        let w = Bivector::new([(0, 1, Scalar::one())]).unwrap();
        assert!(matches!(koszul_delta(&g, &ce, &w), Err(ModelError::NotPoisson(_))));
    }

    #[test]
    fn kodaira_thurston_operator_identities() {
        let g = LieAlgebraData::kodaira_thurston();
        let a = poisson_dgbv(&g, &kt_w()).unwrap();
        assert!(a.check_axioms().all_pass());
        let ce = chevalley_eilenberg(&g).unwrap();
        let iota = contraction_operator(&ce.exterior, &kt_w());
        let top = ce.exterior.top_integral();
        assert!(check_contraction_identity(ce.exterior.algebra(), &top, &iota).holds());
        assert!(check_delta_integral(ce.exterior.algebra(), &top, a.bv()).holds());
    }

    #[test]
    fn abelian_delta_vanishes() {
        let g = LieAlgebraData::abelian(4);
        let a = poisson_dgbv(&g, &kt_w()).unwrap();
        assert!(a.bv().is_zero());
    }

    #[test]
    fn perturbed_contraction_is_detected() {
        let ce = chevalley_eilenberg(&LieAlgebraData::abelian(4)).unwrap();
        let ext = &ce.exterior;
        let e1 = ext.algebra().left_multiplication(&Vector::basis(ext.generator(0)), Shift::Total(1));
        let extra = e1.compose(&ext.interior(0)).compose(&ext.interior(1)).compose(&ext.interior(2));
        let bad = contraction_operator(ext, &kt_w()).plus(&extra);
        let r = check_contraction_identity(ext.algebra(), &ext.top_integral(), &bad);
        assert!(r.witness.is_some());
    }

    #[test]
    fn perturbed_delta_is_detected() {
        let g = LieAlgebraData::kodaira_thurston();
        let a = poisson_dgbv(&g, &kt_w()).unwrap();
        let ext = Exterior::standard("e", 4);
        let bad = a.bv().plus(&ext.interior(0));
        let r = check_delta_integral(ext.algebra(), &ext.top_integral(), &bad);
        assert!(r.witness.is_some());
    }
}
