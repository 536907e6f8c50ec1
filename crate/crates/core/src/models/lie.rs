use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::graded::{LinearMap, Shift, Vector};
use crate::scalar::Scalar;

use super::exterior::{bits, Exterior};
use super::ModelError;

/// A finite-dimensional Lie algebra `[X_i, X_j] = Σ_k f^k_ij X_k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LieAlgebraData {
    dim: usize,
    /// `table[i][j]`: sparse `[X_i, X_j]` on generators
    table: Vec<Vec<BTreeMap<usize, Scalar>>>,
}

impl LieAlgebraData {
    /// `constants` lists `(i, j, k, f^k_ij)` for `i < j`; antisymmetry fills the rest.
    pub fn new(dim: usize, constants: impl IntoIterator<Item = (usize, usize, usize, Scalar)>) -> Result<Self, ModelError> {
        let mut table = vec![vec![BTreeMap::new(); dim]; dim];
        for (i, j, k, c) in constants {
            if i >= dim || j >= dim || k >= dim {
                return Err(ModelError::StructureConstant(format!("index out of range in [X{}, X{}] -> X{}", i + 1, j + 1, k + 1)));
            }
            if i >= j {
                return Err(ModelError::StructureConstant(format!("[X{}, X{}] must have i < j", i + 1, j + 1)));
            }
            if table[i][j].contains_key(&k) {
                return Err(ModelError::StructureConstant(format!("duplicate constant for [X{}, X{}] -> X{}", i + 1, j + 1, k + 1)));
            }
            if c.is_zero() {
                continue;
            }
            table[j][i].insert(k, -c.clone());
            table[i][j].insert(k, c);
        }
        let g = LieAlgebraData { dim, table };
        if let Some((i, j, k)) = g.jacobi_failure() {
            return Err(ModelError::Jacobi(i, j, k));
        }
        Ok(g)
    }

    pub fn abelian(dim: usize) -> Self {
        LieAlgebraData::new(dim, []).expect("abelian")
    }

    /// `[X1, X2] = X3`.
    pub fn heisenberg() -> Self {
        LieAlgebraData::new(3, [(0, 1, 2, Scalar::one())]).expect("heisenberg")
    }

    /// Heisenberg ⊕ ℝ: `[X1, X2] = X3`, `X4` central.
    pub fn kodaira_thurston() -> Self {
        LieAlgebraData::new(4, [(0, 1, 2, Scalar::one())]).expect("kodaira-thurston")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn structure_constant(&self, i: usize, j: usize, k: usize) -> Scalar {
        self.table[i][j].get(&k).cloned().unwrap_or_else(Scalar::zero)
    }

    /// Nonzero `(i, j, k, f^k_ij)` with `i < j`.
    pub fn constants(&self) -> Vec<(usize, usize, usize, Scalar)> {
        let mut out = Vec::new();
        for i in 0..self.dim {
            for j in i + 1..self.dim {
                for (&k, c) in &self.table[i][j] {
                    out.push((i, j, k, c.clone()));
                }
            }
        }
        out
    }

    /// `[X_i, X_j]` as a sparse vector on generators.
    pub fn bracket(&self, i: usize, j: usize) -> &BTreeMap<usize, Scalar> {
        &self.table[i][j]
    }

    fn bracket_with(&self, v: &BTreeMap<usize, Scalar>, j: usize) -> BTreeMap<usize, Scalar> {
        let mut out: BTreeMap<usize, Scalar> = BTreeMap::new();
        for (&i, c) in v {
            for (&k, f) in &self.table[i][j] {
                *out.entry(k).or_insert_with(Scalar::zero) += &(c * f);
            }
        }
        out.retain(|_, c| !c.is_zero());
        out
    }

    fn jacobi_failure(&self) -> Option<(usize, usize, usize)> {
        let n = self.dim;
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    let mut total: BTreeMap<usize, Scalar> = BTreeMap::new();
                    for (a, b, c) in [(i, j, k), (j, k, i), (k, i, j)] {
                        for (m, v) in self.bracket_with(&self.table[a][b], c) {
                            *total.entry(m).or_insert_with(Scalar::zero) += &v;
                        }
                    }
                    if total.values().any(|v| !v.is_zero()) {
                        return Some((i, j, k));
                    }
                }
            }
        }
        None
    }
}

/// The Chevalley-Eilenberg complex `(Λg*, d)`, `de^k = −Σ_{i<j} f^k_ij e^i∧e^j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CeModel {
    pub exterior: Exterior,
    pub d: LinearMap,
}

pub fn chevalley_eilenberg(g: &LieAlgebraData) -> Result<CeModel, ModelError> {
    let exterior = Exterior::standard("e", g.dim());
    let images: Vec<Vector> = (0..g.dim())
        .map(|k| {
            let mut v = Vector::zero();
            for (i, j, kk, c) in g.constants() {
                if kk == k {
                    v.add_term(exterior.monomial(&[i, j]), &-c);
                }
            }
            v
        })
        .collect();
    let d = exterior.extend_derivation(&images, true, Shift::Total(1));
    if !d.compose(&d).is_zero() {
        return Err(ModelError::Identity("d² = 0"));
    }
    Ok(CeModel { exterior, d })
}

/// The algebraic Schouten bracket on `Λg`, using a polyvector algebra with the
/// same subset basis: `[X_S, X_T] = Σ_{a,b} (−1)^{a+b} [X_{s_a}, X_{t_b}] ∧ X_{S∖s_a} ∧ X_{T∖t_b}`.
pub fn schouten(g: &LieAlgebraData, poly: &Exterior, p: &Vector, q: &Vector) -> Vector {
    let alg = poly.algebra();
    let mut out = Vector::zero();
    for (si, cp) in p.iter() {
        let s = bits(poly.mask(si));
        for (ti, cq) in q.iter() {
            let t = bits(poly.mask(ti));
            let coeff = cp * cq;
            for (a, &sa) in s.iter().enumerate() {
                let rest_s: Vec<usize> = s.iter().copied().filter(|&x| x != sa).collect();
                let rest_s = Vector::basis(poly.monomial(&rest_s));
                for (b, &tb) in t.iter().enumerate() {
                    let br = g.bracket(sa, tb);
                    if br.is_empty() {
                        continue;
                    }
                    let rest_t: Vec<usize> = t.iter().copied().filter(|&x| x != tb).collect();
                    let rest_t = Vector::basis(poly.monomial(&rest_t));
                    let mut bv = Vector::zero();
                    for (&k, f) in br {
                        bv.add_term(poly.generator(k), f);
                    }
                    let term = alg.mul(&alg.mul(&bv, &rest_s), &rest_t);
                    out.add_scaled(&term, &(&coeff * &Scalar::sign((a + b) % 2 == 1)));
                }
            }
        }
    }
    out
}

/// Lie algebra homology `∂(X_1∧…∧X_k) = Σ_{i<j} (−1)^{i+j} [X_i, X_j]∧X_1∧…X̂_i…X̂_j…∧X_k`
/// on the polyvector algebra; a BV operator whose bracket is the Schouten bracket.
pub fn ce_homology(g: &LieAlgebraData, poly: &Exterior) -> LinearMap {
    let alg = poly.algebra();
    let cols = (0..poly.dim())
        .map(|c| {
            let s = bits(poly.mask(c));
            let mut out = Vector::zero();
            for (a, &i) in s.iter().enumerate() {
                for (b, &j) in s.iter().enumerate().skip(a + 1) {
                    let br = g.bracket(i, j);
                    if br.is_empty() {
                        continue;
                    }
                    let rest: Vec<usize> = s.iter().copied().filter(|&x| x != i && x != j).collect();
                    let mut bv = Vector::zero();
                    for (&k, f) in br {
                        bv.add_term(poly.generator(k), f);
                    }
                    let term = alg.mul(&bv, &Vector::basis(poly.monomial(&rest)));
                    out.add_scaled(&term, &Scalar::sign((a + b) % 2 == 1));
                }
            }
            out
        })
        .collect();
    LinearMap::from_columns_unchecked(cols, Shift::Total(-1))
}
