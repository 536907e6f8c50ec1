//! Inner products, adjoints, Laplacians and Green operators on finite graded
//! complexes, together with the subspace conditions that make a dGBV algebra
//! produce a Frobenius manifold.

use num_traits::Zero;

use crate::algebra::GradedAlgebra;
use crate::dgbv::DgbvAlgebra;
use crate::graded::{GradedBasis, LinearMap, Shift, Vector};
use crate::linalg::{Matrix, Subspace};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum HodgeError {
    #[error("inner product has dimension {got}, basis has {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("inner product is not Hermitian")]
    NotHermitian,
    #[error("inner product is not positive definite")]
    NotPositiveDefinite,
    #[error("inner product couples e_{row} and e_{col} of different degrees")]
    BlockViolation { row: usize, col: usize },
    #[error("operator does not square to zero")]
    NotSquareZero,
    #[error("the unit is not harmonic")]
    UnitNotHarmonic,
    #[error("class is not homogeneous of degree 2")]
    WrongDegree,
    #[error("class is not closed")]
    NotClosed,
    #[error("top degree {0} is odd, Lefschetz pairing H^(n-k) -> H^(n+k) is undefined")]
    OddTopDegree(i32),
}

/// A Hermitian positive-definite form `⟨a, b⟩ = a^† M b`, block diagonal by degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InnerProduct {
    gram: Matrix,
    gram_inv: Matrix,
}

impl InnerProduct {
    pub fn new(basis: &GradedBasis, gram: Matrix) -> Result<Self, HodgeError> {
        let n = basis.len();
        if gram.rows() != n || gram.cols() != n {
            return Err(HodgeError::DimensionMismatch { expected: n, got: gram.rows() });
        }
        for r in 0..n {
            for c in 0..n {
                if gram.get(r, c).is_zero() {
                    continue;
                }
                let same = if basis.is_bigraded() {
                    basis.bidegree(r) == basis.bidegree(c)
                } else {
                    basis.degree(r) == basis.degree(c)
                };
                if !same {
                    return Err(HodgeError::BlockViolation { row: r, col: c });
                }
            }
        }
        if !gram.is_hermitian() {
            return Err(HodgeError::NotHermitian);
        }
        if !gram.is_positive_definite() {
            return Err(HodgeError::NotPositiveDefinite);
        }
        let gram_inv = gram.inverse().ok_or(HodgeError::NotPositiveDefinite)?;
        Ok(InnerProduct { gram, gram_inv })
    }

    /// The basis is orthonormal.
    pub fn standard(dim: usize) -> Self {
        InnerProduct { gram: Matrix::identity(dim), gram_inv: Matrix::identity(dim) }
    }

    pub fn diagonal(basis: &GradedBasis, weights: &[Scalar]) -> Result<Self, HodgeError> {
        let mut m = Matrix::zeros(weights.len(), weights.len());
        for (i, w) in weights.iter().enumerate() {
            m.set(i, i, w.clone());
        }
        InnerProduct::new(basis, m)
    }

    pub fn dim(&self) -> usize {
        self.gram.rows()
    }

    pub fn gram(&self) -> &Matrix {
        &self.gram
    }

    /// Conjugate-linear in the first argument.
    pub fn inner(&self, a: &Vector, b: &Vector) -> Scalar {
        let mut acc = Scalar::zero();
        for (i, x) in a.iter() {
            let xc = x.conj();
            for (j, y) in b.iter() {
                let g = self.gram.get(i, j);
                if !g.is_zero() {
                    acc += &(&xc * g) * y;
                }
            }
        }
        acc
    }

    /// `f* = M⁻¹ f^† M`, so that `⟨f a, b⟩ = ⟨a, f* b⟩`.
    pub fn adjoint(&self, basis: &GradedBasis, f: &LinearMap) -> LinearMap {
        let m = self.gram_inv.mul(&f.to_matrix().conj_transpose()).mul(&self.gram);
        let cols = (0..m.cols()).map(|j| Vector::from_dense(&m.column(j))).collect();
        LinearMap::from_columns_unchecked(cols, f.shift().negated()).with_inferred_shift(basis, f.shift().negated())
    }
}

fn neutral_shift(basis: &GradedBasis) -> Shift {
    if basis.is_bigraded() {
        Shift::Bi(0, 0)
    } else {
        Shift::Total(0)
    }
}

/// `f f* + f* f`.
pub fn laplacian(basis: &GradedBasis, f: &LinearMap, ip: &InnerProduct) -> LinearMap {
    let fs = ip.adjoint(basis, f);
    f.compose(&fs).plus(&fs.compose(f)).with_shift(neutral_shift(basis)).with_inferred_shift(basis, neutral_shift(basis))
}

/// `v = harmonic + f(exact_preimage) + f*(coexact_preimage)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HodgeDecomposition {
    pub harmonic: Vector,
    pub exact: Vector,
    pub coexact: Vector,
    pub exact_preimage: Vector,
    pub coexact_preimage: Vector,
}

/// Hodge theory for one odd square-zero operator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HodgeData {
    op: LinearMap,
    adjoint: LinearMap,
    laplacian: LinearMap,
    harmonic: Subspace,
    projector: LinearMap,
    green: LinearMap,
}

fn map_from_matrix(m: &Matrix, shift: Shift) -> LinearMap {
    let cols = (0..m.cols()).map(|j| Vector::from_dense(&m.column(j))).collect();
    LinearMap::from_columns_unchecked(cols, shift)
}

impl HodgeData {
    pub fn new(basis: &GradedBasis, op: &LinearMap, ip: &InnerProduct) -> Result<Self, HodgeError> {
        let n = basis.len();
        if op.dim() != n || ip.dim() != n {
            return Err(HodgeError::DimensionMismatch { expected: n, got: op.dim().max(ip.dim()) });
        }
        if !op.compose(op).is_zero() {
            return Err(HodgeError::NotSquareZero);
        }
        let adjoint = ip.adjoint(basis, op);
        let laplacian = laplacian(basis, op, ip);
        let harmonic = Subspace::kernel(&laplacian);
        let shift = neutral_shift(basis);
        let projector = if harmonic.dim() == 0 {
            LinearMap::zero(n, shift)
        } else {
            // P = K (K^† M K)^{-1} K^† M
            let k = Matrix::from_columns(n, &harmonic.basis());
            let kh = k.conj_transpose();
            let small = kh.mul(ip.gram()).mul(&k).inverse().expect("Gram matrix of a basis is invertible");
            map_from_matrix(&k.mul(&small).mul(&kh).mul(ip.gram()), shift)
        };
        let shifted = laplacian.to_matrix().plus(&projector.to_matrix());
        let inv = shifted.inverse().expect("□ + P is invertible");
        let green = map_from_matrix(&inv.minus(&projector.to_matrix()), shift);
        Ok(HodgeData { op: op.clone(), adjoint, laplacian, harmonic, projector, green })
    }

    pub fn op(&self) -> &LinearMap {
        &self.op
    }

    pub fn adjoint(&self) -> &LinearMap {
        &self.adjoint
    }

    pub fn laplacian(&self) -> &LinearMap {
        &self.laplacian
    }

    pub fn projector(&self) -> &LinearMap {
        &self.projector
    }

    pub fn green_operator(&self) -> &LinearMap {
        &self.green
    }

    pub fn harmonic_space(&self) -> &Subspace {
        &self.harmonic
    }

    pub fn is_harmonic(&self, v: &Vector) -> bool {
        self.laplacian.apply(v).is_zero()
    }

    pub fn harmonic_part(&self, v: &Vector) -> Vector {
        self.projector.apply(v)
    }

    pub fn green(&self, v: &Vector) -> Vector {
        self.green.apply(v)
    }

    pub fn decompose(&self, v: &Vector) -> HodgeDecomposition {
        let harmonic = self.harmonic_part(v);
        let gv = self.green(v);
        let exact_preimage = self.adjoint.apply(&gv);
        let coexact_preimage = self.op.apply(&gv);
        HodgeDecomposition {
            harmonic,
            exact: self.op.apply(&exact_preimage),
            coexact: self.adjoint.apply(&coexact_preimage),
            exact_preimage,
            coexact_preimage,
        }
    }

    /// `e_0 = 1` followed by a basis of harmonic elements, ordered by degree and
    /// then by the canonical echelon order.
    pub fn cohomology_basis(&self, basis: &GradedBasis) -> Result<Vec<Vector>, HodgeError> {
        let unit = Vector::basis(0);
        if !self.is_harmonic(&unit) {
            return Err(HodgeError::UnitNotHarmonic);
        }
        let n = basis.len();
        let mut span = Subspace::span(n, std::slice::from_ref(&unit));
        let mut rest: Vec<Vector> = Vec::new();
        let mut degrees: Vec<i32> = (0..n).map(|i| basis.degree(i)).collect();
        degrees.sort_unstable();
        degrees.dedup();
        // □ preserves degree, so homogeneous parts of harmonic vectors are harmonic
        for v in self.harmonic.basis() {
            for &d in &degrees {
                let part = v.degree_part(basis, d);
                if !part.is_zero() && !span.contains(&part) {
                    span = span.sum(&Subspace::span(n, std::slice::from_ref(&part)));
                    rest.push(part);
                }
            }
        }
        let key = |v: &Vector| v.support().map(|i| basis.degree(i)).min().unwrap_or(0);
        rest.sort_by_key(|v| (key(v), v.support().next()));
        let mut out = vec![unit];
        out.extend(rest);
        Ok(out)
    }
}

/// Real harmonic basis: a real `v` is kept as is, otherwise it is replaced by
/// `v + v̄` and `√−1(v − v̄)`, kept greedily while independent.
pub fn real_basis(vectors: &[Vector], dim: usize, conj: impl Fn(&Vector) -> Vector) -> Vec<Vector> {
    let mut span = Subspace::zero(dim);
    let mut out = Vec::new();
    for v in vectors {
        let c = conj(v);
        let cands = if c == *v { vec![v.clone()] } else { vec![v.plus(&c), v.minus(&c).scaled(&Scalar::i())] };
        for cand in cands {
            if !cand.is_zero() && !span.contains(&cand) {
                span = span.sum(&Subspace::span(dim, std::slice::from_ref(&cand)));
                out.push(cand);
            }
        }
        if out.len() == vectors.len() {
            break;
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConditionReport {
    pub condition_a: bool,
    pub condition_b: bool,
    pub condition_c: bool,
    pub dim_im_delta_bv: usize,
    pub dim_im_bv_delta: usize,
    pub dim_im_delta_cap_ker_bv: usize,
    pub dim_im_bv_cap_ker_delta: usize,
    pub dim_closed_cap_exact_sum: usize,
    pub dim_h_delta: usize,
    pub dim_h_bv: usize,
    pub dim_kernels_mod_im: usize,
    /// `H(i)`: `(Ker Δ, δ) → (A, δ)` induces an isomorphism.
    pub inclusion_i_iso: bool,
    /// `H(j)`: `(Ker δ, Δ) → (A, Δ)` induces an isomorphism.
    pub inclusion_j_iso: bool,
}

impl ConditionReport {
    pub fn passes(&self) -> bool {
        self.condition_a && self.condition_b
    }

    /// `(A)∧(B) ⟺ (C) ⟺ H(i), H(j) isomorphisms`.
    pub fn consistent(&self) -> bool {
        let ab = self.condition_a && self.condition_b;
        ab == self.condition_c && ab == (self.inclusion_i_iso && self.inclusion_j_iso)
    }

    /// The three cohomology dimensions agree.
    pub fn dimensions_agree(&self) -> bool {
        self.dim_h_delta == self.dim_h_bv && self.dim_h_bv == self.dim_kernels_mod_im
    }
}

/// Whether `(Ker q, p) ↪ (A, p)` is a quasi-isomorphism.
fn inclusion_is_iso(p: &LinearMap, ker_q: &Subspace, ker_p: &Subspace, im_p: &Subspace) -> bool {
    let p_of_ker_q = ker_q.mapped(p);
    let injective = p_of_ker_q == im_p.intersection(ker_q);
    let surjective = ker_p.intersection(ker_q).sum(im_p) == *ker_p;
    injective && surjective
}

pub fn check_lemma_conditions(a: &DgbvAlgebra) -> ConditionReport {
    let (d, bv) = (a.delta(), a.bv());
    let im_d_bv = Subspace::image(&d.compose(bv));
    let im_bv_d = Subspace::image(&bv.compose(d));
    let im_d = Subspace::image(d);
    let im_bv = Subspace::image(bv);
    let ker_d = Subspace::kernel(d);
    let ker_bv = Subspace::kernel(bv);
    let im_d_cap_ker_bv = im_d.intersection(&ker_bv);
    let im_bv_cap_ker_d = im_bv.intersection(&ker_d);
    let kernels = ker_d.intersection(&ker_bv);
    let closed_cap_sum = kernels.intersection(&im_d.sum(&im_bv));
    let same = im_d_bv == im_bv_d;
    ConditionReport {
        condition_a: same && im_d_bv == im_d_cap_ker_bv,
        condition_b: same && im_d_bv == im_bv_cap_ker_d,
        condition_c: same && im_d_bv == closed_cap_sum,
        dim_im_delta_bv: im_d_bv.dim(),
        dim_im_bv_delta: im_bv_d.dim(),
        dim_im_delta_cap_ker_bv: im_d_cap_ker_bv.dim(),
        dim_im_bv_cap_ker_delta: im_bv_cap_ker_d.dim(),
        dim_closed_cap_exact_sum: closed_cap_sum.dim(),
        dim_h_delta: ker_d.dim() - im_d.dim(),
        dim_h_bv: ker_bv.dim() - im_bv.dim(),
        dim_kernels_mod_im: kernels.dim() - im_d_bv.dim(),
        inclusion_i_iso: inclusion_is_iso(d, &ker_bv, &ker_d, &im_d),
        inclusion_j_iso: inclusion_is_iso(bv, &ker_d, &ker_bv, &im_bv),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LefschetzRow {
    pub k: i32,
    pub dim_source: usize,
    pub dim_target: usize,
    pub rank: usize,
}

impl LefschetzRow {
    pub fn is_iso(&self) -> bool {
        self.rank == self.dim_source && self.rank == self.dim_target
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LefschetzReport {
    pub half_dim: i32,
    pub rows: Vec<LefschetzRow>,
}

impl LefschetzReport {
    pub fn passes(&self) -> bool {
        self.rows.iter().all(LefschetzRow::is_iso)
    }

    pub fn first_failure(&self) -> Option<i32> {
        self.rows.iter().find(|r| !r.is_iso()).map(|r| r.k)
    }
}

/// Representatives of `H^deg(A, d)`.
pub fn cohomology_in_degree(basis: &GradedBasis, d: &LinearMap, deg: i32) -> Vec<Vector> {
    let n = basis.len();
    let ker = Subspace::kernel(d);
    let mut span = Subspace::image(d);
    let mut reps = Vec::new();
    for v in ker.basis() {
        let v = v.degree_part(basis, deg);
        if !v.is_zero() && !span.contains(&v) {
            span = span.sum(&Subspace::span(n, std::slice::from_ref(&v)));
            reps.push(v);
        }
    }
    reps
}

/// Ranks of `L^k: H^{n−k} → H^{n+k}` for `0 ≤ k ≤ n`, where the top degree is `2n`.
pub fn hard_lefschetz_check(algebra: &GradedAlgebra, d: &LinearMap, omega: &Vector) -> Result<LefschetzReport, HodgeError> {
    let basis = algebra.basis();
    if omega.is_zero() || omega.support().any(|i| basis.degree(i) != 2) {
        return Err(HodgeError::WrongDegree);
    }
    if !d.apply(omega).is_zero() {
        return Err(HodgeError::NotClosed);
    }
    let top = algebra.top_degree();
    if top % 2 != 0 {
        return Err(HodgeError::OddTopDegree(top));
    }
    let n = top / 2;
    let im_d = Subspace::image(d);
    let rows = (0..=n)
        .map(|k| {
            let source = cohomology_in_degree(basis, d, n - k);
            let target = cohomology_in_degree(basis, d, n + k);
            let power = algebra.power(omega, k as u32);
            let images: Vec<Vector> = source.iter().map(|r| algebra.mul(&power, r)).collect();
            let rank = Subspace::span(basis.len(), &images).sum(&im_d).dim() - im_d.dim();
            LefschetzRow { k, dim_source: source.len(), dim_target: target.len(), rank }
        })
        .collect();
    Ok(LefschetzReport { half_dim: n, rows })
}

/// One operator identity `lhs = rhs`, with the first mismatching entry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdentityCheck {
    pub name: &'static str,
    pub holds: bool,
    pub witness: Option<(usize, usize, Scalar)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KahlerReport {
    pub checks: Vec<IdentityCheck>,
}

impl KahlerReport {
    pub fn all_hold(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }

    pub fn get(&self, name: &str) -> Option<&IdentityCheck> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &IdentityCheck> {
        self.checks.iter().filter(|c| !c.holds)
    }
}

fn identity(name: &'static str, lhs: &Matrix, rhs: &Matrix) -> IdentityCheck {
    let diff = lhs.minus(rhs);
    let mut witness = None;
    'outer: for r in 0..diff.rows() {
        for c in 0..diff.cols() {
            if !diff.get(r, c).is_zero() {
                witness = Some((r, c, diff.get(r, c).clone()));
                break 'outer;
            }
        }
    }
    IdentityCheck { name, holds: witness.is_none(), witness }
}

/// Operators derived from `(∂, ∂̄)` and a Hermitian metric.
#[derive(Debug, Clone)]
pub struct KahlerOperators {
    pub d: Matrix,
    pub partial: Matrix,
    pub partial_bar: Matrix,
    pub partial_star: Matrix,
    pub partial_bar_star: Matrix,
    pub d_star: Matrix,
    /// `√−1(∂̄* − ∂*)`
    pub bv: Matrix,
    pub bv_star: Matrix,
}

impl KahlerOperators {
    pub fn new(basis: &GradedBasis, partial: &LinearMap, partial_bar: &LinearMap, ip: &InnerProduct) -> Self {
        let i = Scalar::i();
        let ps = ip.adjoint(basis, partial).to_matrix();
        let pbs = ip.adjoint(basis, partial_bar).to_matrix();
        let p = partial.to_matrix();
        let pb = partial_bar.to_matrix();
        let d = p.plus(&pb);
        let bv = pbs.minus(&ps).scaled(&i);
        let bv_star = pb.minus(&p).scaled(&-i.clone());
        KahlerOperators { d_star: ps.plus(&pbs), d, partial: p, partial_bar: pb, partial_star: ps, partial_bar_star: pbs, bv, bv_star }
    }
}

fn anticommutator(a: &Matrix, b: &Matrix) -> Matrix {
    a.mul(b).plus(&b.mul(a))
}

fn commutator(a: &Matrix, b: &Matrix) -> Matrix {
    a.mul(b).minus(&b.mul(a))
}

/// Exact matrix checks of the Kähler identities. `omega` adds the checks
/// involving `L` and its adjoint `Λ`.
pub fn check_kahler_identities(
    algebra: &GradedAlgebra,
    partial: &LinearMap,
    partial_bar: &LinearMap,
    ip: &InnerProduct,
    omega: Option<&Vector>,
) -> KahlerReport {
    let basis = algebra.basis();
    let n = basis.len();
    let ops = KahlerOperators::new(basis, partial, partial_bar, ip);
    let zero = Matrix::zeros(n, n);
    let two = Scalar::from_int(2);
    let box_d = anticommutator(&ops.d, &ops.d_star);
    let box_p = anticommutator(&ops.partial, &ops.partial_star);
    let box_pb = anticommutator(&ops.partial_bar, &ops.partial_bar_star);
    let box_bv = anticommutator(&ops.bv, &ops.bv_star);
    let mut checks = vec![
        identity("partial-squared", &ops.partial.mul(&ops.partial), &zero),
        identity("partial-bar-squared", &ops.partial_bar.mul(&ops.partial_bar), &zero),
        identity("partial-partial-bar-anticommute", &anticommutator(&ops.partial, &ops.partial_bar), &zero),
        identity("box-bv-equals-box", &box_bv, &box_d),
        identity("box-equals-2-box-partial", &box_d, &box_p.scaled(&two)),
        identity("box-equals-2-box-partial-bar", &box_d, &box_pb.scaled(&two)),
        identity("partial-bar-partial-star-anticommute", &anticommutator(&ops.partial_bar, &ops.partial_star), &zero),
        identity("partial-partial-bar-star-anticommute", &anticommutator(&ops.partial, &ops.partial_bar_star), &zero),
        identity("d-bv-star-anticommute", &anticommutator(&ops.d, &ops.bv_star), &zero),
        identity("bv-d-star-anticommute", &anticommutator(&ops.bv, &ops.d_star), &zero),
    ];
    if let Some(omega) = omega {
        let l = algebra.left_multiplication(omega, Shift::Total(2));
        let lambda = ip.adjoint(basis, &l).to_matrix();
        let l = l.to_matrix();
        checks.push(identity("lambda-d-commutator", &commutator(&lambda, &ops.d), &ops.bv));
        let top = algebra.top_degree();
        let mut counting = Matrix::zeros(n, n);
        for i in 0..n {
            counting.set(i, i, Scalar::from_int((2 * basis.degree(i) - top) as i64 / 2));
        }
        if top % 2 == 0 {
            checks.push(identity("lefschetz-sl2", &commutator(&l, &lambda), &counting));
        }
    }
    KahlerReport { checks }
}

/// Gram matrix `⟨v_a, v_b⟩` of a list.
pub fn gram_of(ip: &InnerProduct, vectors: &[Vector]) -> Matrix {
    let rows = vectors.iter().map(|a| vectors.iter().map(|b| ip.inner(a, b)).collect()).collect();
    Matrix::from_rows(rows)
}
