//! Free graded-commutative algebras on square-zero generators, with basis the
//! subsets of generators. With all generators of degree 1 this is the exterior
//! algebra used for Chevalley-Eilenberg and constant-coefficient form models.

use std::collections::HashMap;

use crate::algebra::GradedAlgebra;
use crate::graded::{BasisElement, GradedBasis, LinearMap, Shift, Vector};
use crate::scalar::Scalar;

use super::ModelError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Generator {
    pub name: String,
    pub degree: i32,
    pub bidegree: Option<(i32, i32)>,
}

impl Generator {
    pub fn new(name: impl Into<String>, degree: i32) -> Self {
        Generator { name: name.into(), degree, bidegree: None }
    }

    pub fn bigraded(name: impl Into<String>, p: i32, q: i32) -> Self {
        Generator { name: name.into(), degree: p + q, bidegree: Some((p, q)) }
    }

    fn odd(&self) -> bool {
        self.degree.rem_euclid(2) == 1
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Exterior {
    gens: Vec<Generator>,
    masks: Vec<u32>,
    index: HashMap<u32, usize>,
    basis: GradedBasis,
    algebra: GradedAlgebra,
}

impl Exterior {
    pub fn new(gens: Vec<Generator>) -> Result<Self, ModelError> {
        let k = gens.len();
        assert!(k < 31, "too many generators");
        let bigraded = gens.iter().all(|g| g.bidegree.is_some());
        let mut masks: Vec<u32> = (0..1u32 << k).collect();
        masks.sort_by_key(|&m| (m.count_ones(), bits(m)));
        let index = masks.iter().enumerate().map(|(i, &m)| (m, i)).collect();
        let elements = masks
            .iter()
            .map(|&m| {
                let name = if m == 0 {
                    "1".to_string()
                } else {
                    bits(m).iter().map(|&b| gens[b].name.as_str()).collect::<Vec<_>>().join("^")
                };
                let deg: i32 = bits(m).iter().map(|&b| gens[b].degree).sum();
                if bigraded {
                    let (p, q) = bits(m).iter().fold((0, 0), |(p, q), &b| {
                        let (a, c) = gens[b].bidegree.unwrap();
                        (p + a, q + c)
                    });
                    BasisElement::bigraded(name, p, q)
                } else {
                    BasisElement::new(name, deg)
                }
            })
            .collect();
        let basis = GradedBasis::new(elements)?;
        let mut ext = Exterior { gens, masks, index, basis: basis.clone(), algebra: GradedAlgebra::from_structure_constants(basis.clone(), [])? };
        let mut constants = Vec::new();
        for (i, &a) in ext.masks.iter().enumerate() {
            for (j, &b) in ext.masks.iter().enumerate() {
                if let Some(neg) = ext.product_sign(a, b) {
                    constants.push((i, j, ext.index[&(a | b)], Scalar::sign(neg)));
                }
            }
        }
        ext.algebra = GradedAlgebra::from_structure_constants(basis, constants)?;
        Ok(ext)
    }

    /// `k` generators `prefix1 … prefixk` of degree 1.
    pub fn standard(prefix: &str, k: usize) -> Self {
        Exterior::new((1..=k).map(|i| Generator::new(format!("{prefix}{i}"), 1)).collect()).expect("valid exterior algebra")
    }

    pub fn generators(&self) -> &[Generator] {
        &self.gens
    }

    pub fn ngens(&self) -> usize {
        self.gens.len()
    }

    pub fn basis(&self) -> &GradedBasis {
        &self.basis
    }

    pub fn algebra(&self) -> &GradedAlgebra {
        &self.algebra
    }

    pub fn dim(&self) -> usize {
        self.masks.len()
    }

    pub fn mask(&self, i: usize) -> u32 {
        self.masks[i]
    }

    pub fn index_of_mask(&self, m: u32) -> usize {
        self.index[&m]
    }

    /// Basis index of the generator `k`.
    pub fn generator(&self, k: usize) -> usize {
        self.index[&(1 << k)]
    }

    /// Basis index of the product of the listed generators in increasing order.
    pub fn monomial(&self, gens: &[usize]) -> usize {
        self.index[&gens.iter().fold(0, |m, &g| m | (1 << g))]
    }

    pub fn top(&self) -> usize {
        self.dim() - 1
    }

    /// `∫ top = 1`.
    pub fn top_integral(&self) -> Vector {
        Vector::basis(self.top())
    }

    /// `None` when the subsets overlap; else whether reordering is odd.
    pub fn product_sign(&self, a: u32, b: u32) -> Option<bool> {
        if a & b != 0 {
            return None;
        }
        let mut neg = false;
        for i in bits(a) {
            if !self.gens[i].odd() {
                continue;
            }
            for j in bits(b) {
                if j < i && self.gens[j].odd() {
                    neg = !neg;
                }
            }
        }
        Some(neg)
    }

    /// The derivation of the given parity with prescribed values on generators.
    pub fn extend_derivation(&self, images: &[Vector], odd: bool, shift: Shift) -> LinearMap {
        let cols = self
            .masks
            .iter()
            .map(|&m| {
                let gens = bits(m);
                let mut out = Vector::zero();
                let mut passed_odd = 0usize;
                for (r, &g) in gens.iter().enumerate() {
                    let prefix = Vector::basis(self.monomial(&gens[..r]));
                    let suffix = Vector::basis(self.monomial(&gens[r + 1..]));
                    let term = self.algebra.mul(&self.algebra.mul(&prefix, &images[g]), &suffix);
                    out.add_scaled(&term, &Scalar::sign(odd && passed_odd % 2 == 1));
                    if self.gens[g].odd() {
                        passed_odd += 1;
                    }
                }
                out
            })
            .collect();
        LinearMap::from_columns_unchecked(cols, shift)
    }

    /// Interior product `ι_{X_k}` with `ι_{X_k} e^l = δ_kl`.
    pub fn interior(&self, k: usize) -> LinearMap {
        let images: Vec<Vector> =
            (0..self.ngens()).map(|l| if l == k { Vector::basis(0) } else { Vector::zero() }).collect();
        let shift = match self.gens[k].bidegree {
            Some((p, q)) if self.basis.is_bigraded() => Shift::Bi(-p, -q),
            _ => Shift::Total(-self.gens[k].degree),
        };
        self.extend_derivation(&images, self.gens[k].odd(), shift)
    }

    /// The linear map induced by a signed permutation of generators,
    /// `e^k ↦ sign_k e^{perm[k]}`, extended multiplicatively.
    pub fn permute_generators(&self, perm: &[usize], signs: &[Scalar], shift: Shift) -> LinearMap {
        let cols = self
            .masks
            .iter()
            .map(|&m| {
                let mut acc = Vector::basis(0);
                for g in bits(m) {
                    acc = self.algebra.mul(&acc, &Vector::basis(self.generator(perm[g])).scaled(&signs[g]));
                }
                acc
            })
            .collect();
        LinearMap::from_columns_unchecked(cols, shift)
    }
}

pub(crate) fn bits(m: u32) -> Vec<usize> {
    (0..32).filter(|b| m & (1 << b) != 0).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basis_order_and_signs() {
        let e = Exterior::standard("e", 3);
        assert_eq!(e.dim(), 8);
        assert_eq!(e.basis().get(0).name, "1");
        assert_eq!(e.basis().get(4).name, "e1^e2");
        let a = e.algebra();
        let (e1, e2) = (Vector::basis(e.generator(0)), Vector::basis(e.generator(1)));
        assert_eq!(a.mul(&e2, &e1), Vector::basis(e.monomial(&[0, 1])).neg());
        assert!(a.mul(&e1, &e1).is_zero());
    }

    #[test]
    fn interior_sign_convention() {
        let e = Exterior::standard("e", 2);
        let i1 = e.interior(0);
        let i2 = e.interior(1);
        // ι_{X1} ι_{X2} (e1^e2) = ι_{X1}(−e1) = −1
        let v = i1.apply(&i2.apply(&Vector::basis(e.monomial(&[0, 1]))));
        assert_eq!(v, Vector::basis(0).neg());
    }

    #[test]
    fn even_generator_squares_to_zero() {
        let e = Exterior::new(vec![Generator::new("t", 1), Generator::new("s", 0)]).unwrap();
        let s = Vector::basis(e.generator(1));
        assert!(e.algebra().mul(&s, &s).is_zero());
        let t = Vector::basis(e.generator(0));
        assert_eq!(e.algebra().mul(&s, &t), e.algebra().mul(&t, &s));
    }
}
