pub mod algebra;
pub mod dgbv;
pub mod graded;
pub mod linalg;
pub mod scalar;
pub mod superpoly;
pub mod hodge;
pub mod mc;
pub mod frobenius;
pub mod models;
