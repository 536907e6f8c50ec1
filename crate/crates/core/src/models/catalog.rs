use num_traits::One;

use crate::dgbv::DgbvAlgebra;
use crate::graded::{GradedBasis, LinearMap, Shift, Vector};
use crate::hodge::{hard_lefschetz_check, HodgeData, HodgeError, InnerProduct, LefschetzReport};
use crate::scalar::Scalar;

use super::exterior::{Exterior, Generator};
use super::kahler::BigradedModel;
use super::lie::{ce_homology, LieAlgebraData};
use super::poisson::{poisson_dgbv, Bivector};
use super::ModelError;

/// Models covered by the conformance suite.
pub const BUNDLED: [&str; 5] = ["torus4", "heisenberg", "kodaira-thurston", "complex-torus-1", "complex-torus-2"];

/// Small hand-built fixtures, also reachable through [`bundled`].
pub const FIXTURES: [&str; 3] = ["theta-bv", "dd-bar-square", "heisenberg-polyvector"];

/// A dGBV algebra together with the metric used for Hodge theory and the
/// optional structures it came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Model {
    pub name: String,
    pub dgbv: DgbvAlgebra,
    pub inner_product: InnerProduct,
    pub omega: Option<Vector>,
    pub bigraded: Option<BigradedModel>,
    pub poisson: Option<(LieAlgebraData, Bivector)>,
}

impl Model {
    pub fn new(name: impl Into<String>, dgbv: DgbvAlgebra, inner_product: InnerProduct, omega: Option<Vector>) -> Self {
        Model { name: name.into(), dgbv, inner_product, omega, bigraded: None, poisson: None }
    }

    pub fn from_poisson(name: impl Into<String>, g: LieAlgebraData, w: Bivector, omega: Option<Vector>) -> Result<Self, ModelError> {
        let dgbv = poisson_dgbv(&g, &w)?;
        let ip = InnerProduct::standard(dgbv.dim());
        Ok(Model { name: name.into(), dgbv, inner_product: ip, omega, bigraded: None, poisson: Some((g, w)) })
    }

    /// The Dolbeault dGBV algebra of a Kähler-type model.
    pub fn from_bigraded(m: BigradedModel) -> Result<Self, ModelError> {
        let dgbv = m.dolbeault_dgbv()?;
        Ok(Model {
            name: m.name().to_string(),
            dgbv,
            inner_product: m.inner_product().clone(),
            omega: m.omega().cloned(),
            bigraded: Some(m),
            poisson: None,
        })
    }

    pub fn basis(&self) -> &GradedBasis {
        self.dgbv.basis()
    }

    /// Hodge data of `δ` for the model metric.
    pub fn hodge(&self) -> Result<HodgeData, ModelError> {
        Ok(HodgeData::new(self.dgbv.basis(), self.dgbv.delta(), &self.inner_product)?)
    }

    /// Harmonic classes, unit first; real ones for bigraded models.
    pub fn classes(&self) -> Result<Vec<Vector>, ModelError> {
        match &self.bigraded {
            Some(b) => b.real_harmonic_basis(),
            None => Ok(self.hodge()?.cohomology_basis(self.basis())?),
        }
    }

    /// The de Rham differential: `∂ + ∂̄` for bigraded models, else `δ`.
    pub fn de_rham_differential(&self) -> LinearMap {
        match &self.bigraded {
            Some(b) => b.d(),
            None => self.dgbv.delta().clone(),
        }
    }

    /// Hard Lefschetz ranks for `omega`, defaulting to the model's class.
    pub fn lefschetz(&self, omega: Option<&Vector>) -> Result<LefschetzReport, ModelError> {
        let top = self.dgbv.algebra().top_degree();
        if top % 2 != 0 {
            return Err(HodgeError::OddTopDegree(top).into());
        }
        let omega = omega.or(self.omega.as_ref()).ok_or(ModelError::NoKahlerClass)?;
        let algebra = self.dgbv.algebra();
        Ok(hard_lefschetz_check(algebra, &self.de_rham_differential(), omega)?)
    }
}

fn one() -> Scalar {
    Scalar::one()
}

fn symplectic_pair() -> (Bivector, Vector) {
    let w = Bivector::new([(0, 2, one()), (1, 3, one())]).expect("bivector");
    let ext = Exterior::standard("e", 4);
    let omega = Vector::from_entries([(ext.monomial(&[0, 2]), one()), (ext.monomial(&[1, 3]), one())]);
    (w, omega)
}

/// `Λ(θ₁, θ₂)` with `|θ₁| = 1`, `|θ₂| = 0`, `δ = 0`, `Δ(θ₁θ₂) = 1`.
///
/// The bracket `[θ₁•θ₂] = −1` is not a derivation here, since it would have to
/// satisfy `0 = [θ₁•θ₂²] = −2θ₂`; the axiom check reports this.
pub fn theta_bv() -> Model {
    let ext = Exterior::new(vec![Generator::new("t1", 1), Generator::new("t2", 0)]).expect("theta algebra");
    let bv = LinearMap::from_entries(ext.basis(), [(0, ext.monomial(&[0, 1]), one())], Shift::Total(-1)).expect("Δ");
    let delta = LinearMap::zero(ext.dim(), Shift::Total(1));
    let dgbv = DgbvAlgebra::new(ext.algebra().clone(), delta, bv, Vector::zero()).expect("theta model");
    Model::new("theta-bv", dgbv, InnerProduct::standard(ext.dim()), None)
}

/// Polyvectors `Λg` with `δ = 0` and `Δ` the Lie algebra homology operator.
pub fn polyvector_model(name: impl Into<String>, g: &LieAlgebraData) -> Result<Model, ModelError> {
    let poly = Exterior::standard("X", g.dim());
    let bv = ce_homology(g, &poly);
    let delta = LinearMap::zero(poly.dim(), Shift::Total(1));
    let dgbv = DgbvAlgebra::new(poly.algebra().clone(), delta, bv, poly.top_integral())?;
    Ok(Model::new(name, dgbv, InnerProduct::standard(poly.dim()), None))
}

pub fn bundled(name: &str) -> Result<Model, ModelError> {
    match name {
        "torus4" => {
            let (w, omega) = symplectic_pair();
            Model::from_poisson(name, LieAlgebraData::abelian(4), w, Some(omega))
        }
        "heisenberg" => {
            let w = Bivector::new([(0, 2, one())])?;
            Model::from_poisson(name, LieAlgebraData::heisenberg(), w, None)
        }
        "kodaira-thurston" => {
            let (w, omega) = symplectic_pair();
            Model::from_poisson(name, LieAlgebraData::kodaira_thurston(), w, Some(omega))
        }
        "complex-torus-1" => Model::from_bigraded(BigradedModel::complex_torus(1)),
        "complex-torus-2" => Model::from_bigraded(BigradedModel::complex_torus(2)),
        "theta-bv" => Ok(theta_bv()),
        "heisenberg-polyvector" => polyvector_model(name, &LieAlgebraData::heisenberg()),
        "dd-bar-square" => Model::from_bigraded(BigradedModel::dd_bar_square()),
        _ => Err(ModelError::UnknownModel(name.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_model_builds_and_satisfies_axioms() {
        for name in BUNDLED.iter().chain(["dd-bar-square", "heisenberg-polyvector"].iter()) {
            let m = bundled(name).unwrap();
            let r = m.dgbv.check_axioms();
            assert!(r.all_pass(), "{name}: {:?}", r.failures().next());
        }
    }

    #[test]
    fn theta_bracket_value() {
        let m = theta_bv();
        let ext = Exterior::new(vec![Generator::new("t1", 1), Generator::new("t2", 0)]).unwrap();
        let b = m.dgbv.bracket(&Vector::basis(ext.generator(0)), &Vector::basis(ext.generator(1)));
        assert_eq!(b, Vector::basis(0).neg());
    }

    #[test]
    fn theta_fixture_is_not_bv() {
        let r = theta_bv().dgbv.check_axioms();
        assert!(!r.all_pass());
        assert!(r.get(crate::dgbv::Axiom::BracketLeibniz).witness.is_some());
    }

    #[test]
    fn heisenberg_lefschetz_is_undefined() {
        let m = bundled("heisenberg").unwrap();
        assert_eq!(m.lefschetz(None), Err(ModelError::Hodge(HodgeError::OddTopDegree(3))));
    }

    #[test]
    fn kodaira_thurston_fails_lefschetz_in_degree_one() {
        let m = bundled("kodaira-thurston").unwrap();
        let r = m.lefschetz(None).unwrap();
        assert_eq!(r.first_failure(), Some(1));
        let t = bundled("torus4").unwrap().lefschetz(None).unwrap();
        assert!(t.passes());
    }

    #[test]
    fn unknown_name() {
        assert!(matches!(bundled("nope"), Err(ModelError::UnknownModel(_))));
    }
}
