//! Order-by-order solutions of `δΓ + ½[Γ•Γ] = 0` in `K ⊗ A`.

use rayon::prelude::*;

use crate::dgbv::DgbvAlgebra;
use crate::graded::{GradedBasis, LinearMap, Parity, Vector};
use crate::hodge::{HodgeData, HodgeError, KahlerReport};
use crate::linalg::{Matrix, Subspace};
use crate::models::kahler::BigradedModel;
use crate::models::ModelError;
use crate::scalar::Scalar;
use crate::superpoly::{AlgebraSeries, Monomial, VarSet};

pub const DEFAULT_ORDER: u32 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveMode {
    /// `Γ_n = −½ δ* G R_n`
    Analytic,
    /// `Γ_n = −½ Δ y` with `y` the canonical solution of `δΔ y = R_n`.
    Normalized,
}

impl SolveMode {
    pub fn name(self) -> &'static str {
        match self {
            SolveMode::Analytic => "analytic",
            SolveMode::Normalized => "normalized",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveOptions {
    pub order: u32,
    pub mode: SolveMode,
    /// Classes whose variables enter `Γ₁`; `None` means all.
    pub active: Option<Vec<usize>>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { order: DEFAULT_ORDER, mode: SolveMode::Analytic, active: None }
    }
}

impl SolveOptions {
    pub fn with_order(order: u32) -> Self {
        SolveOptions { order, ..Default::default() }
    }
}

/// Membership facts recorded for one `Γ_n`, `n ≥ 2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub order: u32,
    pub in_image_bv: bool,
    /// `Γ_n ∈ Im δ*Δ`; only decided in analytic mode.
    pub in_image_adjoint_bv: Option<bool>,
    pub bv_closed: bool,
}

impl Certificate {
    pub fn holds(&self) -> bool {
        self.in_image_bv && self.bv_closed && self.in_image_adjoint_bv != Some(false)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObstructionReport {
    pub order: u32,
    /// `R_n = Σ_{p+q=n} [Γ_p • Γ_q]`
    pub residual: AlgebraSeries,
    /// Harmonic part of `R_n`, nonzero.
    pub harmonic: AlgebraSeries,
}

impl ObstructionReport {
    /// First monomial with a nonzero harmonic coefficient.
    pub fn witness(&self) -> (Monomial, Vector) {
        let (m, v) = self.harmonic.terms().next().expect("obstruction has a nonzero harmonic part");
        (m.clone(), v.clone())
    }

    /// Re-projects the stored residual.
    pub fn reproduces(&self, hodge: &HodgeData, vars: &VarSet) -> bool {
        apply_series(hodge.projector(), &self.residual, vars) == self.harmonic && !self.harmonic.is_zero()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SolveError {
    #[error("class {index} is not in Ker δ ∩ Ker Δ")]
    ClassNotClosed { index: usize },
    #[error("class {index} is zero or not homogeneous")]
    ClassNotHomogeneous { index: usize },
    #[error("active class index {0} out of range")]
    ActiveIndex(usize),
    #[error("order must be at least 1")]
    ZeroOrder,
    #[error("obstructed at order {}", .0.order)]
    Obstruction(Box<ObstructionReport>),
    #[error("order {order}: the recursion does not close although the harmonic part vanishes")]
    Inconsistent { order: u32, residual: AlgebraSeries },
    #[error(transparent)]
    Hodge(#[from] HodgeError),
    #[error("Kähler identities fail")]
    NotKahler(Box<KahlerReport>),
    #[error("class {0} of the harmonic basis is not real")]
    NonRealClass(usize),
    #[error(transparent)]
    Model(Box<ModelError>),
}

impl From<ModelError> for SolveError {
    fn from(e: ModelError) -> Self {
        SolveError::Model(Box::new(e))
    }
}

/// `op(m·a) = (−1)^{|m||op|} m·op(a)`.
pub fn apply_series(op: &LinearMap, p: &AlgebraSeries, vars: &VarSet) -> AlgebraSeries {
    p.map_coefficients(vars, op.parity(), |c| op.apply(c))
}

/// Coefficient-wise map with no sign, for even or antilinear maps.
pub fn map_series(p: &AlgebraSeries, vars: &VarSet, f: impl FnMut(&Vector) -> Vector) -> AlgebraSeries {
    p.map_coefficients(vars, Parity::Even, f)
}

pub fn wedge_series(a: &DgbvAlgebra, p: &AlgebraSeries, q: &AlgebraSeries, vars: &VarSet) -> AlgebraSeries {
    p.mul_with(q, vars, a.basis(), |x, y| a.algebra().mul(x, y))
}

/// `[m1·a • m2·b] = (−1)^{(|a|+1)|m2|} m1 m2·[a • b]`.
pub fn bracket_series(a: &DgbvAlgebra, p: &AlgebraSeries, q: &AlgebraSeries, vars: &VarSet) -> AlgebraSeries {
    let mut out = AlgebraSeries::zero();
    for (m1, x) in p.terms() {
        let twisted = x.parity_twist(a.basis()).neg();
        for (m2, y) in q.terms() {
            if let Some((neg, m)) = m1.multiply(m2, vars) {
                let left = if m2.parity(vars).is_odd() { &twisted } else { x };
                let mut c = a.bracket(left, y);
                if neg {
                    c = c.neg();
                }
                out.add_term(m, &c);
            }
        }
    }
    out
}

/// `δ_Γ η = δη + [Γ • η]`.
pub fn shifted_differential(a: &DgbvAlgebra, gamma: &AlgebraSeries, eta: &AlgebraSeries, vars: &VarSet) -> AlgebraSeries {
    apply_series(a.delta(), eta, vars).plus(&bracket_series(a, gamma, eta, vars))
}

/// Variables dual to the classes, with matching parities.
pub fn variables_for(basis: &GradedBasis, classes: &[Vector]) -> Result<VarSet, SolveError> {
    let mut parities = Vec::with_capacity(classes.len());
    for (index, e) in classes.iter().enumerate() {
        parities.push(e.parity(basis).ok_or(SolveError::ClassNotHomogeneous { index })?);
    }
    Ok(VarSet::new(parities))
}

/// `Γ₁ = Σ x^j e_j` over the active classes.
pub fn initial_term(a: &DgbvAlgebra, classes: &[Vector], active: &[usize]) -> Result<AlgebraSeries, SolveError> {
    let vars = variables_for(a.basis(), classes)?;
    let mut g = AlgebraSeries::zero();
    for &j in active {
        let e = classes.get(j).ok_or(SolveError::ActiveIndex(j))?;
        if !a.delta().apply(e).is_zero() || !a.bv().apply(e).is_zero() {
            return Err(SolveError::ClassNotClosed { index: j });
        }
        g.add_term(Monomial::var(vars.len(), j), e);
    }
    Ok(g)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MCSolution {
    vars: VarSet,
    classes: Vec<Vector>,
    active: Vec<usize>,
    mode: SolveMode,
    /// `terms[n − 1] = Γ_n`
    terms: Vec<AlgebraSeries>,
    certificates: Vec<Certificate>,
}

impl MCSolution {
    /// Assembles a solution from given terms; nothing is verified.
    pub fn from_terms(
        vars: VarSet,
        classes: Vec<Vector>,
        active: Vec<usize>,
        mode: SolveMode,
        terms: Vec<AlgebraSeries>,
    ) -> Self {
        MCSolution { vars, classes, active, mode, terms, certificates: Vec::new() }
    }

    pub fn vars(&self) -> &VarSet {
        &self.vars
    }

    pub fn classes(&self) -> &[Vector] {
        &self.classes
    }

    pub fn active(&self) -> &[usize] {
        &self.active
    }

    pub fn mode(&self) -> SolveMode {
        self.mode
    }

    pub fn order(&self) -> u32 {
        self.terms.len() as u32
    }

    pub fn terms(&self) -> &[AlgebraSeries] {
        &self.terms
    }

    /// `Γ_n` for `1 ≤ n ≤ order`.
    pub fn term(&self, n: u32) -> &AlgebraSeries {
        &self.terms[n as usize - 1]
    }

    pub fn certificates(&self) -> &[Certificate] {
        &self.certificates
    }

    pub fn gamma(&self) -> AlgebraSeries {
        let mut g = AlgebraSeries::zero();
        for t in &self.terms {
            g.add_assign(t);
        }
        g
    }

    pub fn with_term(mut self, n: u32, t: AlgebraSeries) -> Self {
        self.terms[n as usize - 1] = t;
        self.certificates.clear();
        self
    }

    /// Sets `x^j = 0` for the given variables.
    pub fn restricted(&self, kill: &[usize]) -> Self {
        MCSolution {
            vars: self.vars.clone(),
            classes: self.classes.clone(),
            active: self.active.iter().copied().filter(|j| !kill.contains(j)).collect(),
            mode: self.mode,
            terms: self.terms.iter().map(|t| t.kill_variables(kill)).collect(),
            certificates: Vec::new(),
        }
    }
}

/// `R_n = Σ_{p+q=n} [Γ_p • Γ_q]`, accumulated in a fixed order.
fn recursion_rhs(a: &DgbvAlgebra, terms: &[AlgebraSeries], n: usize, vars: &VarSet) -> AlgebraSeries {
    let parts: Vec<AlgebraSeries> =
        (1..n).into_par_iter().map(|p| bracket_series(a, &terms[p - 1], &terms[n - p - 1], vars)).collect();
    let mut r = AlgebraSeries::zero();
    for part in &parts {
        r.add_assign(part);
    }
    r
}

fn all_in(space: &Subspace, p: &AlgebraSeries) -> bool {
    p.terms().all(|(_, v)| space.contains(v))
}

/// Solves through `options.order`; `hodge` must be built from `a.delta()`.
pub fn solve(a: &DgbvAlgebra, hodge: &HodgeData, classes: &[Vector], options: &SolveOptions) -> Result<MCSolution, SolveError> {
    if options.order == 0 {
        return Err(SolveError::ZeroOrder);
    }
    let vars = variables_for(a.basis(), classes)?;
    let active: Vec<usize> = options.active.clone().unwrap_or_else(|| (0..classes.len()).collect());
    let half = Scalar::half();
    let mut terms = vec![initial_term(a, classes, &active)?];
    let mut certificates = Vec::new();
    let im_bv = Subspace::image(a.bv());
    let adjoint_bv = hodge.adjoint().compose(a.bv());
    let im_adjoint_bv = Subspace::image(&adjoint_bv);
    let delta_bv = a.delta().compose(a.bv()).to_matrix();
    for n in 2..=options.order as usize {
        let r = recursion_rhs(a, &terms, n, &vars);
        let harmonic = apply_series(hodge.projector(), &r, &vars);
        if !harmonic.is_zero() {
            return Err(SolveError::Obstruction(Box::new(ObstructionReport { order: n as u32, residual: r, harmonic })));
        }
        let minus_half = -half.clone();
        let gn = match options.mode {
            SolveMode::Analytic => {
                let gr = apply_series(hodge.green_operator(), &r, &vars);
                apply_series(hodge.adjoint(), &gr, &vars).scaled(&minus_half)
            }
            SolveMode::Normalized => {
                let mut y = AlgebraSeries::zero();
                for (m, v) in r.terms() {
                    // δΔ(m·y) = m·δΔ(y), δΔ being even
                    match solve_dense(&delta_bv, v) {
                        Some(sol) => y.add_term(m.clone(), &sol),
                        None => {
                            return Err(SolveError::Inconsistent { order: n as u32, residual: r.clone() });
                        }
                    }
                }
                apply_series(a.bv(), &y, &vars).scaled(&minus_half)
            }
        };
        let check = apply_series(a.delta(), &gn, &vars).plus(&r.scaled(&half));
        if !check.is_zero() {
            return Err(SolveError::Inconsistent { order: n as u32, residual: check });
        }
        certificates.push(Certificate {
            order: n as u32,
            in_image_bv: all_in(&im_bv, &gn),
            in_image_adjoint_bv: (options.mode == SolveMode::Analytic).then(|| all_in(&im_adjoint_bv, &gn)),
            bv_closed: apply_series(a.bv(), &gn, &vars).is_zero(),
        });
        terms.push(gn);
    }
    Ok(MCSolution { vars, classes: classes.to_vec(), active, mode: options.mode, terms, certificates })
}

fn solve_dense(m: &Matrix, v: &Vector) -> Option<Vector> {
    m.solve(&v.to_dense(m.rows())).map(|x| Vector::from_dense(&x))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct McVerification {
    /// `δΓ_n + ½ Σ_{p+q=n} [Γ_p • Γ_q]` for `n = 1..=N`.
    pub mc_residuals: Vec<AlgebraSeries>,
    /// `ΔΓ_n`.
    pub bv_residuals: Vec<AlgebraSeries>,
    pub linear_term_ok: bool,
    pub x0_confined: bool,
    pub even: bool,
}

impl McVerification {
    pub fn mc_holds(&self) -> bool {
        self.mc_residuals.iter().all(AlgebraSeries::is_zero)
    }

    pub fn bv_closed(&self) -> bool {
        self.bv_residuals.iter().all(AlgebraSeries::is_zero)
    }

    pub fn valid(&self) -> bool {
        self.mc_holds() && self.bv_closed() && self.linear_term_ok && self.x0_confined && self.even
    }

    /// First order with a nonzero Maurer-Cartan residual.
    pub fn first_failing_order(&self) -> Option<u32> {
        self.mc_residuals.iter().position(|r| !r.is_zero()).map(|i| i as u32 + 1)
    }
}

pub fn verify_mc(a: &DgbvAlgebra, sol: &MCSolution) -> McVerification {
    let vars = sol.vars();
    let terms = sol.terms();
    let half = Scalar::half();
    let mc_residuals = (1..=terms.len())
        .map(|n| apply_series(a.delta(), &terms[n - 1], vars).plus(&recursion_rhs(a, terms, n, vars).scaled(&half)))
        .collect();
    let bv_residuals = terms.iter().map(|t| apply_series(a.bv(), t, vars)).collect();
    let mut expected = AlgebraSeries::zero();
    for &j in sol.active() {
        expected.add_term(Monomial::var(vars.len(), j), &sol.classes()[j]);
    }
    let linear_term_ok = terms.first().is_some_and(|t| *t == expected);
    let x0_confined = terms.iter().skip(1).all(|t| t.monomials().all(|m| m.exponent(0) == 0));
    let even = terms.iter().enumerate().all(|(i, t)| {
        t.is_zero() || (t.total_parity(vars, a.basis()) == Some(Parity::Even) && t.monomials().all(|m| m.degree() == i as u32 + 1))
    });
    McVerification { mc_residuals, bv_residuals, linear_term_ok, x0_confined, even }
}

/// Result of the bigraded solve on a Kähler-type model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimultaneousSolution {
    pub solution: MCSolution,
    /// `∂̄Γ + ½[Γ•Γ]_{∂*} = 0`
    pub dolbeault: McVerification,
    /// `∂Γ + ½[Γ•Γ]_{∂̄*} = 0`
    pub mirror: McVerification,
    /// `dΓ + ½[Γ•Γ] = 0` with `Δ = √−1(∂̄* − ∂*)`
    pub de_rham: McVerification,
    pub real: bool,
    /// `Γ₂ = ½√−1 G_∂̄ ∂̄*∂*(Γ₁∧Γ₁)`
    pub second_order_formula: bool,
}

impl SimultaneousSolution {
    pub fn all_hold(&self) -> bool {
        self.dolbeault.valid() && self.mirror.mc_holds() && self.de_rham.mc_holds() && self.real && self.second_order_formula
    }
}

/// Solves the Dolbeault equation with real harmonic classes and checks the
/// conjugate and de Rham equations on the same `Γ`.
pub fn simultaneous_solve(model: &BigradedModel, order: u32) -> Result<SimultaneousSolution, SolveError> {
    let report = model.kahler_report();
    if !report.all_hold() {
        return Err(SolveError::NotKahler(Box::new(report)));
    }
    let classes = model.real_harmonic_basis()?;
    for (j, e) in classes.iter().enumerate() {
        if model.conjugate(e) != *e {
            return Err(SolveError::NonRealClass(j));
        }
    }
    let dolbeault = model.dolbeault_dgbv()?;
    let hodge = HodgeData::new(model.basis(), model.partial_bar(), model.inner_product())?;
    let solution = solve(&dolbeault, &hodge, &classes, &SolveOptions::with_order(order))?;
    let vars = solution.vars().clone();
    let gamma = solution.gamma();
    let real = map_series(&gamma, &vars, |v| model.conjugate(v)) == gamma;
    let second_order_formula = if order >= 2 {
        let g1 = solution.term(1);
        let sq = wedge_series(&dolbeault, g1, g1, &vars);
        let ps = model.inner_product().adjoint(model.basis(), model.partial());
        let step = apply_series(&ps, &sq, &vars);
        let step = apply_series(hodge.adjoint(), &step, &vars);
        let step = apply_series(hodge.green_operator(), &step, &vars);
        let expected = step.scaled(&(&Scalar::half() * &Scalar::i()));
        expected == *solution.term(2)
    } else {
        true
    };
    Ok(SimultaneousSolution {
        dolbeault: verify_mc(&dolbeault, &solution),
        mirror: verify_mc(&model.mirror_dgbv()?, &solution),
        de_rham: verify_mc(&model.derham_dgbv()?, &solution),
        real,
        second_order_formula,
        solution,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{bundled, Model};

    fn kt_closed() -> (Model, HodgeData, Vec<Vector>, Vec<usize>) {
        let m = bundled("kodaira-thurston").unwrap();
        let h = m.hodge().unwrap();
        let classes = m.classes().unwrap();
        let active = (0..classes.len()).filter(|&j| m.dgbv.bv().apply(&classes[j]).is_zero()).collect();
        (m, h, classes, active)
    }

    #[test]
    fn rejects_zero_order_and_unclosed_classes() {
        let (m, h, classes, _) = kt_closed();
        assert_eq!(solve(&m.dgbv, &h, &classes, &SolveOptions::with_order(0)), Err(SolveError::ZeroOrder));
        assert_eq!(
            solve(&m.dgbv, &h, &classes, &SolveOptions::with_order(2)),
            Err(SolveError::ClassNotClosed { index: 10 })
        );
        let opts = SolveOptions { active: Some(vec![99]), ..SolveOptions::with_order(2) };
        assert_eq!(solve(&m.dgbv, &h, &classes, &opts), Err(SolveError::ActiveIndex(99)));
    }

    #[test]
    fn exact_bracket_gives_nonzero_second_order_term() {
        let (m, h, classes, active) = kt_closed();
        let opts = SolveOptions { order: 4, mode: SolveMode::Analytic, active: Some(active.clone()) };
        let sol = solve(&m.dgbv, &h, &classes, &opts).unwrap();
        assert!(!sol.term(2).is_zero());
        assert!(verify_mc(&m.dgbv, &sol).valid());
        // δ*G R_n is Δ-closed but not Δ-exact once the ddbar-type lemma fails
        for c in sol.certificates() {
            assert!(c.bv_closed && c.in_image_adjoint_bv == Some(true) && !c.in_image_bv);
        }
        let opts = SolveOptions { mode: SolveMode::Normalized, ..opts };
        assert!(matches!(
            solve(&m.dgbv, &h, &classes, &opts),
            Err(SolveError::Inconsistent { order: 2, .. })
        ));
    }

    #[test]
    fn modes_agree_where_conditions_hold() {
        for name in ["torus4", "heisenberg", "complex-torus-2"] {
            let m = bundled(name).unwrap();
            let h = m.hodge().unwrap();
            let classes = m.classes().unwrap();
            for mode in [SolveMode::Analytic, SolveMode::Normalized] {
                let opts = SolveOptions { order: 3, mode, active: None };
                let sol = solve(&m.dgbv, &h, &classes, &opts).unwrap();
                assert!(verify_mc(&m.dgbv, &sol).valid(), "{name} {}", mode.name());
                assert!(sol.certificates().iter().all(Certificate::holds), "{name}");
            }
        }
    }

    #[test]
    fn solution_is_deterministic() {
        let (m, h, classes, active) = kt_closed();
        let opts = SolveOptions { order: 4, mode: SolveMode::Analytic, active: Some(active) };
        let first = solve(&m.dgbv, &h, &classes, &opts).unwrap();
        for _ in 0..3 {
            assert_eq!(solve(&m.dgbv, &h, &classes, &opts).unwrap(), first);
        }
    }

    #[test]
    fn obstruction_report_reproduces() {
        let m = bundled("heisenberg-polyvector").unwrap();
        let h = m.hodge().unwrap();
        let classes = m.classes().unwrap();
        let active: Vec<usize> = (0..classes.len()).filter(|&j| m.dgbv.bv().apply(&classes[j]).is_zero()).collect();
        let opts = SolveOptions { order: 3, mode: SolveMode::Analytic, active: Some(active) };
        match solve(&m.dgbv, &h, &classes, &opts) {
            Err(SolveError::Obstruction(r)) => {
                assert_eq!(r.order, 2);
                let vars = variables_for(m.basis(), &classes).unwrap();
                assert!(r.reproduces(&h, &vars));
                assert!(!r.witness().1.is_zero());
            }
            other => panic!("expected obstruction, got {other:?}"),
        }
    }

    #[test]
    fn tampered_solution_fails_verification() {
        let (m, h, classes, active) = kt_closed();
        let opts = SolveOptions { order: 3, mode: SolveMode::Analytic, active: Some(active) };
        let sol = solve(&m.dgbv, &h, &classes, &opts).unwrap();
        let bad = sol.clone().with_term(2, AlgebraSeries::zero());
        let v = verify_mc(&m.dgbv, &bad);
        assert!(!v.mc_holds());
        assert_eq!(v.first_failing_order(), Some(2));
    }

    #[test]
    fn simultaneous_solve_on_tori() {
        for n in 1..=2 {
            let t = BigradedModel::complex_torus(n);
            let s = simultaneous_solve(&t, 3).unwrap();
            assert!(s.all_hold());
            assert_eq!(s.solution.classes().len(), 1 << (2 * n));
        }
    }

    #[test]
    fn simultaneous_solve_requires_kahler_metric() {
        let t = BigradedModel::complex_torus(1);
        let t = t.with_inner_product(crate::hodge::InnerProduct::standard(t.dim())).unwrap();
        assert!(matches!(simultaneous_solve(&t, 2), Err(SolveError::NotKahler(_))));
    }
}
