use std::sync::OnceLock;

use dgbv::dgbv::{DgbvAlgebra, DgbvError};
use dgbv::graded::Vector;
use dgbv::models::{bundled, Model};
use dgbv::scalar::Scalar;
use proptest::prelude::*;

fn models() -> &'static [Model] {
    static M: OnceLock<Vec<Model>> = OnceLock::new();
    M.get_or_init(|| {
        ["torus4", "heisenberg", "kodaira-thurston", "complex-torus-1", "heisenberg-polyvector", "dd-bar-square"]
            .iter()
            .map(|n| bundled(n).unwrap())
            .collect()
    })
}

fn kt() -> &'static DgbvAlgebra {
    &models()[2].dgbv
}

/// Homogeneous element of degree `deg` (taken modulo the degrees present).
fn homogeneous(a: &DgbvAlgebra, deg: usize, coeffs: &[(i64, i64)]) -> (Vector, bool) {
    let basis = a.basis();
    let top = basis.max_degree() as usize + 1;
    let idx = basis.indices_of_degree((deg % top) as i32);
    let v = Vector::from_entries(idx.iter().zip(coeffs).map(|(&i, &(re, im))| {
        (i, Scalar::from_int(re) + Scalar::i() * Scalar::from_int(im))
    }));
    (v, deg % top % 2 == 1)
}

fn coeffs() -> impl Strategy<Value = Vec<(i64, i64)>> {
    prop::collection::vec((-3i64..=3, -1i64..=1), 6)
}

fn sign(odd: bool) -> Scalar {
    Scalar::sign(odd)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn product_is_super_commutative(m in 0usize..6, da in 0usize..5, db in 0usize..5, ca in coeffs(), cb in coeffs()) {
        let a = &models()[m].dgbv;
        let (x, ox) = homogeneous(a, da, &ca);
        let (y, oy) = homogeneous(a, db, &cb);
        let alg = a.algebra();
        prop_assert_eq!(alg.mul(&x, &y), alg.mul(&y, &x).scaled(&sign(ox && oy)));
    }

    #[test]
    fn product_is_associative(m in 0usize..6, d in (0usize..5, 0usize..5, 0usize..5), c in (coeffs(), coeffs(), coeffs())) {
        let a = &models()[m].dgbv;
        let (x, _) = homogeneous(a, d.0, &c.0);
        let (y, _) = homogeneous(a, d.1, &c.1);
        let (z, _) = homogeneous(a, d.2, &c.2);
        let alg = a.algebra();
        prop_assert_eq!(alg.mul(&alg.mul(&x, &y), &z), alg.mul(&x, &alg.mul(&y, &z)));
    }

    #[test]
    fn delta_is_a_derivation(m in 0usize..6, da in 0usize..5, db in 0usize..5, ca in coeffs(), cb in coeffs()) {
        let a = &models()[m].dgbv;
        let (x, ox) = homogeneous(a, da, &ca);
        let (y, _) = homogeneous(a, db, &cb);
        let alg = a.algebra();
        let d = a.delta();
        let lhs = d.apply(&alg.mul(&x, &y));
        let rhs = alg.mul(&d.apply(&x), &y).plus(&alg.mul(&x, &d.apply(&y)).scaled(&sign(ox)));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn bracket_is_a_derivation(m in 0usize..6, d in (0usize..5, 0usize..5, 0usize..5), c in (coeffs(), coeffs(), coeffs())) {
        let a = &models()[m].dgbv;
        let (l, ol) = homogeneous(a, d.0, &c.0);
        let (u, ou) = homogeneous(a, d.1, &c.1);
        let (v, _) = homogeneous(a, d.2, &c.2);
        let alg = a.algebra();
        let lhs = a.bracket(&l, &alg.mul(&u, &v));
        let rhs = alg.mul(&a.bracket(&l, &u), &v).plus(&alg.mul(&u, &a.bracket(&l, &v)).scaled(&sign(!ol && ou)));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn bracket_is_graded_antisymmetric(m in 0usize..6, da in 0usize..5, db in 0usize..5, ca in coeffs(), cb in coeffs()) {
        let a = &models()[m].dgbv;
        let (x, ox) = homogeneous(a, da, &ca);
        let (y, oy) = homogeneous(a, db, &cb);
        let s = -sign(!ox && !oy);
        prop_assert_eq!(a.bracket(&x, &y), a.bracket(&y, &x).scaled(&s));
    }

    #[test]
    fn pairing_is_associative_and_delta_invariant(m in 0usize..6, d in (0usize..5, 0usize..5, 0usize..5), c in (coeffs(), coeffs(), coeffs())) {
        let a = &models()[m].dgbv;
        let (x, ox) = homogeneous(a, d.0, &c.0);
        let (y, _) = homogeneous(a, d.1, &c.1);
        let (z, _) = homogeneous(a, d.2, &c.2);
        let alg = a.algebra();
        prop_assert_eq!(a.pairing(&alg.mul(&x, &y), &z), a.pairing(&x, &alg.mul(&y, &z)));
        let lhs = a.pairing(&a.delta().apply(&x), &y);
        let rhs = a.pairing(&x, &a.delta().apply(&y)).scaled_neg(ox);
        prop_assert_eq!(lhs, rhs);
    }
}

trait ScaledNeg {
    fn scaled_neg(self, odd: bool) -> Self;
}

impl ScaledNeg for Scalar {
    /// `−(−1)^{|x|}` times the value.
    fn scaled_neg(self, odd: bool) -> Self {
        self * -sign(odd)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn admissible_shifts_keep_the_axioms(t in -4i64..=4, s in -4i64..=4, u in -3i64..=3) {
        let a = kt();
        let basis = a.basis();
        let e = |name: &str| basis.index_of(name).unwrap();
        let x = Vector::from_entries([
            (e("e2^e3"), Scalar::from_int(t)),
            (e("e1^e2"), Scalar::from_int(s)),
            (0, Scalar::from_int(u)),
        ]);
        match a.shift_by(&x) {
            Ok(shifted) => {
                let (mc, bv) = a.shift_residuals(&x);
                prop_assert!(mc.is_zero() && bv.is_zero());
                prop_assert!(shifted.check_axioms().all_pass());
            }
            Err(DgbvError::ShiftPrecondition { mc_residual, bv_residual }) => {
                prop_assert!(!mc_residual.is_zero() || !bv_residual.is_zero());
            }
            Err(e) => prop_assert!(false, "unexpected {e:?}"),
        }
    }

    #[test]
    fn multiples_of_an_exact_two_form_are_admissible(t in -6i64..=6) {
        let a = kt();
        let x = Vector::basis(a.basis().index_of("e2^e3").unwrap()).scaled(&Scalar::from_int(t));
        let shifted = a.shift_by(&x).unwrap();
        prop_assert!(shifted.check_axioms().all_pass());
    }
}
