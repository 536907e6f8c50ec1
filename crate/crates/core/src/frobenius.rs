//! Formal Frobenius manifold data read off a Maurer-Cartan solution: the flat
//! metric `g_ij = ∫ e_i∧e_j` and the tensor `c_ijk(x) = ∫(ē_iΓ)(ē_jΓ)(ē_kΓ)`.

use num_traits::Zero;
use rayon::prelude::*;

use crate::dgbv::DgbvAlgebra;
use crate::graded::Parity;
use crate::linalg::Matrix;
use crate::mc::{shifted_differential, wedge_series, MCSolution};
use crate::scalar::Scalar;
use crate::superpoly::{AlgebraSeries, ScalarSeries, VarSet};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FrobeniusError {
    #[error("the metric on cohomology is degenerate (integral not nice)")]
    DegenerateMetric,
}

/// `ē_jΓ`, the supercontraction of `Γ` with the class `e_j`.
pub fn extend_class(sol: &MCSolution, j: usize) -> AlgebraSeries {
    sol.gamma().contract(j, sol.vars())
}

/// First class `j` for which `δ_Γ(ē_jΓ)` is nonzero through order `N − 1`.
pub fn closedness_witness(a: &DgbvAlgebra, sol: &MCSolution) -> Option<usize> {
    let gamma = sol.gamma();
    let trusted = sol.order().saturating_sub(1);
    (0..sol.classes().len()).into_par_iter().find_map_first(|j| {
        let ext = extend_class(sol, j);
        let r = shifted_differential(a, &gamma, &ext, sol.vars()).truncated(trusted);
        (!r.is_zero()).then_some(j)
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MetricReport {
    pub trusted_order: u32,
    pub witness: Option<(usize, usize, ScalarSeries)>,
}

impl MetricReport {
    pub fn holds(&self) -> bool {
        self.witness.is_none()
    }
}

fn metric_of(a: &DgbvAlgebra, sol: &MCSolution) -> Matrix {
    let classes = sol.classes();
    Matrix::from_rows(classes.iter().map(|x| classes.iter().map(|y| a.pairing(x, y)).collect()).collect())
}

/// `∫(ē_iΓ)∧(ē_jΓ) = ∫ e_i∧e_j` identically in `x` for the truncated `Γ`.
pub fn metric_constancy_check(a: &DgbvAlgebra, sol: &MCSolution) -> MetricReport {
    let n = sol.classes().len();
    let g = metric_of(a, sol);
    let exts: Vec<AlgebraSeries> = (0..n).map(|j| extend_class(sol, j)).collect();
    let nvars = sol.vars().len();
    let witness = (0..n * n).into_par_iter().find_map_first(|ij| {
        let (i, j) = (ij / n, ij % n);
        let lhs = wedge_series(a, &exts[i], &exts[j], sol.vars()).integrate(a.integral());
        let rhs = ScalarSeries::constant(nvars, g.get(i, j).clone());
        let diff = lhs.minus(&rhs);
        (!diff.is_zero()).then_some((i, j, diff))
    });
    MetricReport { trusted_order: (2 * sol.order()).saturating_sub(2), witness }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrobeniusData {
    vars: VarSet,
    parities: Vec<Parity>,
    order: u32,
    metric: Matrix,
    metric_inv: Matrix,
    /// `tensor[(i·n + j)·n + k] = c_ijk`
    tensor: Vec<ScalarSeries>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TensorCheck {
    /// Highest `x`-degree compared; `None` when nothing is trusted.
    pub trusted_order: Option<u32>,
    pub tuples_checked: usize,
    pub witness: Option<Vec<usize>>,
}

impl TensorCheck {
    pub fn holds(&self) -> bool {
        self.witness.is_none()
    }
}

fn sign(neg: bool) -> Scalar {
    Scalar::sign(neg)
}

impl FrobeniusData {
    pub fn new(a: &DgbvAlgebra, sol: &MCSolution) -> Result<Self, FrobeniusError> {
        let n = sol.classes().len();
        let metric = metric_of(a, sol);
        let metric_inv = metric.inverse().ok_or(FrobeniusError::DegenerateMetric)?;
        let trusted = sol.order().saturating_sub(1);
        let vars = sol.vars().clone();
        let exts: Vec<AlgebraSeries> = (0..n).map(|j| extend_class(sol, j).truncated(trusted)).collect();
        let pairs: Vec<AlgebraSeries> = (0..n * n)
            .into_par_iter()
            .map(|ij| wedge_series(a, &exts[ij / n], &exts[ij % n], &vars).truncated(trusted))
            .collect();
        let tensor = (0..n * n * n)
            .into_par_iter()
            .map(|t| {
                let (ij, k) = (t / n, t % n);
                wedge_series(a, &pairs[ij], &exts[k], &vars).truncated(trusted).integrate(a.integral())
            })
            .collect();
        let parities = vars.parities().to_vec();
        Ok(FrobeniusData { vars, parities, order: sol.order(), metric, metric_inv, tensor })
    }

    /// Builds from an explicit tensor, for re-ingesting dumps and for tests.
    pub fn from_parts(vars: VarSet, order: u32, metric: Matrix, tensor: Vec<ScalarSeries>) -> Result<Self, FrobeniusError> {
        let metric_inv = metric.inverse().ok_or(FrobeniusError::DegenerateMetric)?;
        let parities = vars.parities().to_vec();
        Ok(FrobeniusData { vars, parities, order, metric, metric_inv, tensor })
    }

    pub fn dim(&self) -> usize {
        self.parities.len()
    }

    pub fn vars(&self) -> &VarSet {
        &self.vars
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    /// Highest trusted `x`-degree of `c`.
    pub fn trusted_order(&self) -> u32 {
        self.order.saturating_sub(1)
    }

    pub fn metric(&self) -> &Matrix {
        &self.metric
    }

    pub fn metric_inverse(&self) -> &Matrix {
        &self.metric_inv
    }

    pub fn c(&self, i: usize, j: usize, k: usize) -> &ScalarSeries {
        let n = self.dim();
        &self.tensor[(i * n + j) * n + k]
    }

    pub fn tensor(&self) -> &[ScalarSeries] {
        &self.tensor
    }

    pub fn set_c(&mut self, i: usize, j: usize, k: usize, value: ScalarSeries) {
        let n = self.dim();
        self.tensor[(i * n + j) * n + k] = value;
    }

    fn odd(&self, i: usize) -> bool {
        self.parities[i].is_odd()
    }

    /// `C_ij^l = Σ_k c_ijk (g⁻¹)_{kl}`, so that `e_i∘e_j = Σ_l C_ij^l e_l`.
    pub fn structure(&self, i: usize, j: usize, l: usize) -> ScalarSeries {
        let mut out = ScalarSeries::zero();
        for k in 0..self.dim() {
            let g = self.metric_inv.get(k, l);
            if !g.is_zero() {
                out.add_assign(&self.c(i, j, k).scaled(g));
            }
        }
        out
    }

    /// Coefficients of `e_i∘e_j` on the class basis.
    pub fn product_classes(&self, i: usize, j: usize) -> Vec<ScalarSeries> {
        (0..self.dim()).map(|l| self.structure(i, j, l)).collect()
    }

    /// `c_jik = (−1)^{|i||j|} c_ijk` and `c_ikj = (−1)^{|j||k|} c_ijk`.
    pub fn check_supersymmetry(&self) -> TensorCheck {
        let n = self.dim();
        let witness = (0..n * n * n).into_par_iter().find_map_first(|t| {
            let (i, j, k) = (t / (n * n), (t / n) % n, t % n);
            let c = self.c(i, j, k);
            let swap_ij = self.c(j, i, k).scaled(&sign(self.odd(i) && self.odd(j)));
            let swap_jk = self.c(i, k, j).scaled(&sign(self.odd(j) && self.odd(k)));
            (*c != swap_ij || *c != swap_jk).then(|| vec![i, j, k])
        });
        TensorCheck { trusted_order: Some(self.trusted_order()), tuples_checked: n * n * n, witness }
    }

    /// `c_0jk(x) = g_jk`.
    pub fn check_identity_axis(&self) -> TensorCheck {
        let n = self.dim();
        let nv = self.vars.len();
        let witness = (0..n * n).find_map(|jk| {
            let (j, k) = (jk / n, jk % n);
            (*self.c(0, j, k) != ScalarSeries::constant(nv, self.metric.get(j, k).clone())).then(|| vec![0, j, k])
        });
        TensorCheck { trusted_order: Some(self.trusted_order()), tuples_checked: n * n, witness }
    }

    /// `Σ_m C_ij^m c_mkl = (−1)^{|j||k|} Σ_m C_ik^m c_mjl` through the trusted order.
    pub fn check_associativity(&self) -> TensorCheck {
        let n = self.dim();
        let t = self.trusted_order();
        let structure: Vec<ScalarSeries> =
            (0..n * n * n).into_par_iter().map(|x| self.structure(x / (n * n), (x / n) % n, x % n)).collect();
        let cs = |i: usize, j: usize, m: usize| &structure[(i * n + j) * n + m];
        let side = |i: usize, j: usize, k: usize, l: usize| {
            let mut acc = ScalarSeries::zero();
            for m in 0..n {
                let s = cs(i, j, m);
                if !s.is_zero() {
                    acc.add_assign(&s.mul(self.c(m, k, l), &self.vars).truncated(t));
                }
            }
            acc
        };
        let witness = (0..n.pow(4)).into_par_iter().find_map_first(|q| {
            let (i, j, k, l) = (q / n.pow(3), (q / (n * n)) % n, (q / n) % n, q % n);
            let lhs = side(i, j, k, l);
            let rhs = side(i, k, j, l).scaled(&sign(self.odd(j) && self.odd(k)));
            (lhs != rhs).then(|| vec![i, j, k, l])
        });
        TensorCheck { trusted_order: Some(t), tuples_checked: n.pow(4), witness }
    }

    /// `∂_l c_ijk = (−1)^{|l||i|} ∂_i c_ljk` through order `N − 2`, which together
    /// with the supersymmetry of `c` makes `∂_l c_ijk` totally supersymmetric.
    pub fn check_integrability(&self) -> TensorCheck {
        let n = self.dim();
        if self.order < 2 {
            return TensorCheck { trusted_order: None, tuples_checked: 0, witness: None };
        }
        let t = self.order - 2;
        let witness = (0..n.pow(4)).into_par_iter().find_map_first(|q| {
            let (l, i, j, k) = (q / n.pow(3), (q / (n * n)) % n, (q / n) % n, q % n);
            let lhs = self.c(i, j, k).contract(l, &self.vars).truncated(t);
            let rhs = self.c(l, j, k).contract(i, &self.vars).truncated(t).scaled(&sign(self.odd(l) && self.odd(i)));
            (lhs != rhs).then(|| vec![l, i, j, k])
        });
        TensorCheck { trusted_order: Some(t), tuples_checked: n.pow(4), witness }
    }

    /// `c_ijk(0)`.
    pub fn at_origin(&self, i: usize, j: usize, k: usize) -> Scalar {
        self.c(i, j, k).constant_term()
    }
}

/// `∫ δ_Γ(η)∧(ē_kΓ)` through order `N − 1`; vanishes when pairing kills `Im δ_Γ`.
pub fn pairing_with_exact(a: &DgbvAlgebra, sol: &MCSolution, eta: &AlgebraSeries, k: usize) -> ScalarSeries {
    let trusted = sol.order().saturating_sub(1);
    let exact = shifted_differential(a, &sol.gamma(), eta, sol.vars());
    wedge_series(a, &exact, &extend_class(sol, k), sol.vars()).truncated(trusted).integrate(a.integral())
}

/// `∫ e_i∧e_j∧e_k` over the classes of a solution.
pub fn triple_intersection(a: &DgbvAlgebra, sol: &MCSolution, i: usize, j: usize, k: usize) -> Scalar {
    let c = sol.classes();
    a.integrate(&a.algebra().mul(&a.algebra().mul(&c[i], &c[j]), &c[k]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mc::{solve, SolveOptions};
    use crate::models::bundled;
    use crate::superpoly::Monomial;
    use num_traits::One;

    fn data(name: &str, order: u32) -> (DgbvAlgebra, MCSolution, FrobeniusData) {
        let m = bundled(name).unwrap();
        let h = m.hodge().unwrap();
        let classes = m.classes().unwrap();
        let sol = solve(&m.dgbv, &h, &classes, &SolveOptions::with_order(order)).unwrap();
        let f = FrobeniusData::new(&m.dgbv, &sol).unwrap();
        (m.dgbv, sol, f)
    }

    #[test]
    fn all_checks_pass_on_flat_models() {
        for name in ["torus4", "heisenberg", "complex-torus-1", "complex-torus-2"] {
            let (a, sol, f) = data(name, 3);
            assert!(f.check_supersymmetry().holds(), "{name}");
            assert!(f.check_identity_axis().holds(), "{name}");
            assert!(f.check_associativity().holds(), "{name}");
            assert!(f.check_integrability().holds(), "{name}");
            assert!(metric_constancy_check(&a, &sol).holds(), "{name}");
            assert_eq!(closedness_witness(&a, &sol), None, "{name}");
        }
    }

    #[test]
    fn tensor_is_triple_intersection_when_gamma_is_linear() {
        let (a, sol, f) = data("torus4", 3);
        let n = f.dim();
        assert_eq!(n, 16);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let c = f.c(i, j, k);
                    assert_eq!(c.max_degree().unwrap_or(0), 0);
                    assert_eq!(f.at_origin(i, j, k), triple_intersection(&a, &sol, i, j, k));
                }
            }
        }
    }

    #[test]
    fn mutations_are_detected() {
        let (_, _, f) = data("torus4", 3);
        let nv = f.vars().len();
        let x = ScalarSeries::term(Monomial::var(nv, 0), Scalar::one());
        let mut g = f.clone();
        let c = g.c(1, 2, 3).plus(&x);
        g.set_c(1, 2, 3, c);
        assert_eq!(g.check_supersymmetry().witness, Some(vec![1, 2, 3]));
        let mut h = f.clone();
        let c = h.c(0, 1, 1).plus(&ScalarSeries::constant(nv, Scalar::one()));
        h.set_c(0, 1, 1, c);
        assert_eq!(h.check_identity_axis().witness, Some(vec![0, 1, 1]));
    }

    #[test]
    fn integrability_needs_two_orders() {
        let (_, _, f) = data("torus4", 1);
        assert_eq!(f.check_integrability().trusted_order, None);
    }

    #[test]
    fn degenerate_metric_is_rejected() {
        let vars = VarSet::new(vec![Parity::Even; 2]);
        let r = FrobeniusData::from_parts(vars, 2, Matrix::zeros(2, 2), vec![ScalarSeries::zero(); 8]);
        assert_eq!(r, Err(FrobeniusError::DegenerateMetric));
    }

    #[test]
    fn exact_forms_pair_to_zero() {
        let (a, sol, f) = data("torus4", 3);
        let nv = f.vars().len();
        let eta = AlgebraSeries::constant(nv, crate::graded::Vector::basis(3));
        for k in 0..f.dim() {
            assert!(pairing_with_exact(&a, &sol, &eta, k).is_zero());
        }
    }
}
