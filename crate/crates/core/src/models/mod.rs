//! Concrete dGBV models: Chevalley-Eilenberg algebras with Koszul operators
//! from invariant Poisson bivectors, constant-coefficient forms on complex tori,
//! and small hand-built fixtures.

pub mod catalog;
pub mod compare;
pub mod exterior;
pub mod kahler;
pub mod lie;
pub mod poisson;
pub mod search;

use crate::algebra::AlgebraError;
use crate::dgbv::DgbvError;
use crate::frobenius::FrobeniusError;
use crate::graded::{GradedError, Vector};
use crate::hodge::{HodgeError, KahlerReport};
use crate::mc::SolveError;

pub use catalog::{bundled, Model, BUNDLED};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error(transparent)]
    Graded(#[from] GradedError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Dgbv(#[from] DgbvError),
    #[error(transparent)]
    Hodge(#[from] HodgeError),
    #[error(transparent)]
    Frobenius(#[from] FrobeniusError),
    #[error(transparent)]
    Solve(Box<SolveError>),
    #[error("invalid structure constant: {0}")]
    StructureConstant(String),
    #[error("Jacobi identity fails on (X{}, X{}, X{})", .0 + 1, .1 + 1, .2 + 1)]
    Jacobi(usize, usize, usize),
    #[error("bivector is not Poisson: [w,w] = {0:?}")]
    NotPoisson(Vector),
    #[error("operator identity fails: {0}")]
    Identity(&'static str),
    #[error("model fails Kähler identities")]
    NotKahler(Box<KahlerReport>),
    #[error("model has no bigraded structure")]
    NotBigraded,
    #[error("model has no Kähler class")]
    NoKahlerClass,
    #[error("unknown model `{0}`")]
    UnknownModel(String),
}

impl From<SolveError> for ModelError {
    fn from(e: SolveError) -> Self {
        ModelError::Solve(Box::new(e))
    }
}
