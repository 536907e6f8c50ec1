//! Bigraded models `(A, ∂, ∂̄)` with a Hermitian metric and a real structure.

use num_traits::One;

use crate::algebra::GradedAlgebra;
use crate::dgbv::DgbvAlgebra;
use crate::graded::{BasisElement, GradedBasis, LinearMap, Parity, Shift, Vector};
use crate::hodge::{check_kahler_identities, real_basis, HodgeData, InnerProduct, KahlerReport};
use crate::scalar::Scalar;

use super::exterior::{Exterior, Generator};
use super::ModelError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BigradedModel {
    name: String,
    algebra: GradedAlgebra,
    partial: LinearMap,
    partial_bar: LinearMap,
    ip: InnerProduct,
    omega: Option<Vector>,
    /// `conj(v) = C v̄` with `C` the matrix of this map
    conj: LinearMap,
    integral: Vector,
}

fn conj_entries(f: &LinearMap) -> LinearMap {
    LinearMap::from_columns_unchecked(f.columns().iter().map(Vector::conj_coefficients).collect(), f.shift())
}

impl BigradedModel {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        name: impl Into<String>,
        algebra: GradedAlgebra,
        partial: LinearMap,
        partial_bar: LinearMap,
        ip: InnerProduct,
        omega: Option<Vector>,
        conj: LinearMap,
        integral: Vector,
    ) -> Result<Self, ModelError> {
        let basis = algebra.basis();
        if !basis.is_bigraded() {
            return Err(ModelError::NotBigraded);
        }
        let n = basis.len();
        for (f, s) in [(&partial, Shift::Bi(1, 0)), (&partial_bar, Shift::Bi(0, 1))] {
            if f.dim() != n {
                return Err(ModelError::Identity("operator dimension"));
            }
            f.clone().with_shift(s).validate(basis)?;
        }
        if conj.dim() != n || ip.dim() != n {
            return Err(ModelError::Identity("dimension of metric or real structure"));
        }
        // conj ∘ conj = id and conj(∂ conj v) = ∂̄ v
        let cc = conj_entries(&conj);
        let id = LinearMap::identity(n);
        if !conj.compose(&cc).minus(&id).is_zero() {
            return Err(ModelError::Identity("conjugation is an involution"));
        }
        if !conj.compose(&conj_entries(&partial)).compose(&cc).minus(&partial_bar).is_zero() {
            return Err(ModelError::Identity("conjugation exchanges ∂ and ∂̄"));
        }
        for i in 0..n {
            for j in 0..n {
                let (a, b) = (Vector::basis(i), Vector::basis(j));
                let lhs = conj.apply(&algebra.mul(&a, &b).conj_coefficients());
                if lhs != algebra.mul(&conj.apply(&a), &conj.apply(&b)) {
                    return Err(ModelError::Identity("conjugation is multiplicative"));
                }
            }
        }
        let m = BigradedModel { name: name.into(), algebra, partial, partial_bar, ip, omega, conj, integral };
        if let Some(w) = &m.omega {
            if m.conjugate(w) != *w {
                return Err(ModelError::Identity("Kähler class is real"));
            }
        }
        Ok(m)
    }

    /// Constant-coefficient forms on a complex torus of dimension `n`, generated
    /// by `dz_k` and `dz̄_k`, with `|dz_I∧dz̄_J|² = 2^{|I|+|J|}`,
    /// `ω = (√−1/2) Σ dz_k∧dz̄_k` and `∫ ω^n/n! = 1`.
    pub fn complex_torus(n: usize) -> Self {
        let mut gens: Vec<Generator> = (1..=n).map(|k| Generator::bigraded(format!("dz{k}"), 1, 0)).collect();
        gens.extend((1..=n).map(|k| Generator::bigraded(format!("dzb{k}"), 0, 1)));
        let ext = Exterior::new(gens).expect("torus algebra");
        let dim = ext.dim();
        let algebra = ext.algebra().clone();
        let weights: Vec<Scalar> =
            (0..dim).map(|i| Scalar::from_int(1i64 << ext.mask(i).count_ones())).collect();
        let ip = InnerProduct::diagonal(ext.basis(), &weights).expect("torus metric");
        let mut omega = Vector::zero();
        for k in 0..n {
            omega.add_term(ext.monomial(&[k, k + n]), &(&Scalar::i() * &Scalar::half()));
        }
        let mut top = algebra.power(&omega, n as u32);
        let mut fact = Scalar::one();
        for k in 1..=n {
            fact = &fact * &Scalar::from_int(k as i64);
        }
        top = top.scaled(&fact.inv().expect("nonzero"));
        let c = top.get(ext.top());
        let integral = Vector::basis(ext.top()).scaled(&c.inv().expect("ω^n ≠ 0"));
        let perm: Vec<usize> = (0..2 * n).map(|k| if k < n { k + n } else { k - n }).collect();
        let conj = ext.permute_generators(&perm, &vec![Scalar::one(); 2 * n], Shift::Parity(Parity::Even));
        let zero_p = LinearMap::zero(dim, Shift::Bi(1, 0));
        let zero_pb = LinearMap::zero(dim, Shift::Bi(0, 1));
        BigradedModel::new(format!("complex-torus-{n}"), algebra, zero_p, zero_pb, ip, Some(omega), conj, integral)
            .expect("torus model")
    }

    /// A five-dimensional complex `1, u, ∂u, ∂̄u, ∂∂̄u` with all products of
    /// non-unit elements zero and an orthonormal basis.
    pub fn dd_bar_square() -> Self {
        let basis = GradedBasis::new(vec![
            BasisElement::bigraded("1", 0, 0),
            BasisElement::bigraded("u", 0, 0),
            BasisElement::bigraded("a", 1, 0),
            BasisElement::bigraded("b", 0, 1),
            BasisElement::bigraded("c", 1, 1),
        ])
        .expect("square basis");
        let mut constants = vec![(0, 0, 0, Scalar::one())];
        for j in 1..5 {
            constants.push((0, j, j, Scalar::one()));
            constants.push((j, 0, j, Scalar::one()));
        }
        let algebra = GradedAlgebra::from_structure_constants(basis.clone(), constants).expect("square algebra");
        let one = Scalar::one;
        let partial = LinearMap::from_entries(&basis, [(2, 1, one()), (4, 3, one())], Shift::Bi(1, 0)).expect("∂");
        let partial_bar =
            LinearMap::from_entries(&basis, [(3, 1, one()), (4, 2, -one())], Shift::Bi(0, 1)).expect("∂̄");
        let conj = LinearMap::from_entries(
            &basis,

            [(0, 0, one()), (1, 1, one()), (3, 2, one()), (2, 3, one()), (4, 4, -one())],
            Shift::Parity(Parity::Even),
        )
        .expect("conjugation");
        BigradedModel::new("dd-bar-square", algebra, partial, partial_bar, InnerProduct::standard(5), None, conj, Vector::basis(0))
            .expect("square model")
    }

    pub fn with_inner_product(&self, ip: InnerProduct) -> Result<Self, ModelError> {
        if ip.dim() != self.algebra.dim() {
            return Err(ModelError::Identity("dimension of metric or real structure"));
        }
        Ok(BigradedModel { ip, ..self.clone() })
    }

    pub fn with_omega(&self, omega: Option<Vector>) -> Self {
        BigradedModel { omega, ..self.clone() }
    }

    pub fn name(&self) -> &str {
        &self.name
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

    pub fn partial(&self) -> &LinearMap {
        &self.partial
    }

    pub fn partial_bar(&self) -> &LinearMap {
        &self.partial_bar
    }

    /// `d = ∂ + ∂̄`.
    pub fn d(&self) -> LinearMap {
        self.partial.plus(&self.partial_bar).with_shift(Shift::Total(1))
    }

    pub fn inner_product(&self) -> &InnerProduct {
        &self.ip
    }

    pub fn omega(&self) -> Option<&Vector> {
        self.omega.as_ref()
    }

    pub fn integral(&self) -> &Vector {
        &self.integral
    }

    pub fn conjugation(&self) -> &LinearMap {
        &self.conj
    }

    pub fn conjugate(&self, v: &Vector) -> Vector {
        self.conj.apply(&v.conj_coefficients())
    }

    pub fn kahler_report(&self) -> KahlerReport {
        check_kahler_identities(&self.algebra, &self.partial, &self.partial_bar, &self.ip, self.omega.as_ref())
    }

    fn require_kahler(&self) -> Result<(), ModelError> {
        let report = self.kahler_report();
        if report.all_hold() {
            Ok(())
        } else {
            Err(ModelError::NotKahler(Box::new(report)))
        }
    }

    fn adjoint(&self, f: &LinearMap) -> LinearMap {
        self.ip.adjoint(self.basis(), f)
    }

    /// `(A, ∂̄, −√−1 ∂*)`.
    pub fn dolbeault_dgbv(&self) -> Result<DgbvAlgebra, ModelError> {
        self.require_kahler()?;
        let bv = self.adjoint(&self.partial).scaled(&-Scalar::i());
        Ok(DgbvAlgebra::new(self.algebra.clone(), self.partial_bar.clone(), bv, self.integral.clone())?)
    }

    /// `(A, ∂, √−1 ∂̄*)`.
    pub fn mirror_dgbv(&self) -> Result<DgbvAlgebra, ModelError> {
        self.require_kahler()?;
        let bv = self.adjoint(&self.partial_bar).scaled(&Scalar::i());
        Ok(DgbvAlgebra::new(self.algebra.clone(), self.partial.clone(), bv, self.integral.clone())?)
    }

    /// `(A, d, √−1(∂̄* − ∂*))`.
    pub fn derham_dgbv(&self) -> Result<DgbvAlgebra, ModelError> {
        self.require_kahler()?;
        let bv = self
            .adjoint(&self.partial_bar)
            .minus(&self.adjoint(&self.partial))
            .scaled(&Scalar::i())
            .with_shift(Shift::Total(-1));
        Ok(DgbvAlgebra::new(self.algebra.clone(), self.d(), bv, self.integral.clone())?)
    }

    /// Unit followed by `∂̄`-harmonic representatives.
    pub fn harmonic_basis(&self) -> Result<Vec<Vector>, ModelError> {
        let hodge = HodgeData::new(self.basis(), &self.partial_bar, &self.ip)?;
        Ok(hodge.cohomology_basis(self.basis())?)
    }

    /// A real basis of the harmonic space, unit first.
    pub fn real_harmonic_basis(&self) -> Result<Vec<Vector>, ModelError> {
        let h = self.harmonic_basis()?;
        Ok(real_basis(&h, self.dim(), |v| self.conjugate(v)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn torus_volume_normalization() {
        for n in 1..=2 {
            let t = BigradedModel::complex_torus(n);
            let w = t.omega().unwrap();
            let mut top = t.algebra().power(w, n as u32);
            if n == 2 {
                top = top.scaled(&Scalar::half());
            }
            assert_eq!(top.dot(t.integral()), Scalar::one());
        }
    }

    #[test]
    fn torus_real_forms_have_real_integrals() {
        let t = BigradedModel::complex_torus(1);
        let real = t.real_harmonic_basis().unwrap();
        assert_eq!(real.len(), 4);
        for v in &real {
            assert_eq!(t.conjugate(v), *v);
            assert!(v.dot(t.integral()).is_real());
        }
    }

    #[test]
    fn torus_conjugation_sign() {
        let t = BigradedModel::complex_torus(1);
        // conj(dz∧dz̄) = dz̄∧dz = −dz∧dz̄
        let v = Vector::basis(3);
        assert_eq!(t.conjugate(&v), v.neg());
    }

    #[test]
    fn square_fixture_satisfies_identities() {
        let s = BigradedModel::dd_bar_square();
        let r = s.kahler_report();
        assert!(r.all_hold(), "{:?}", r.failures().collect::<Vec<_>>());
        assert_eq!(s.harmonic_basis().unwrap().len(), 1);
    }

    #[test]
    fn square_with_skewed_metric_breaks_identities() {
        let s = BigradedModel::dd_bar_square();
        let w: Vec<Scalar> = [1, 1, 2, 1, 1].iter().map(|&x| Scalar::from_int(x)).collect();
        let ip = InnerProduct::diagonal(s.basis(), &w).unwrap();
        let r = s.with_inner_product(ip).unwrap().kahler_report();
        assert!(!r.all_hold());
    }

    #[test]
    fn rejects_bad_conjugation() {
        let t = BigradedModel::complex_torus(1);
        let bad = LinearMap::identity(t.dim());
        let r = BigradedModel::new("bad", t.algebra().clone(), t.partial().clone(), t.partial_bar().clone(), t.inner_product().clone(), t.omega().cloned(), bad, t.integral().clone());
        assert!(r.is_err());
    }
}
