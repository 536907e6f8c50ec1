//! Conformance run: one line per criterion, exact arithmetic throughout.
//! Linear-algebra oracles below are written from scratch so that they share no
//! code with the engine's `linalg` module.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;

use dgbv::dgbv::DgbvAlgebra;
use dgbv::frobenius::{closedness_witness, metric_constancy_check, FrobeniusData};
use dgbv::graded::{LinearMap, Vector};
use dgbv::hodge::{check_lemma_conditions, HodgeError};
use dgbv::mc::{solve, verify_mc, SolveError, SolveMode, SolveOptions};
use dgbv::models::compare::compare_structures;
use dgbv::models::kahler::BigradedModel;
use dgbv::models::lie::{chevalley_eilenberg, LieAlgebraData};
use dgbv::models::poisson::{
    check_contraction_identity, check_delta_integral, contraction_operator, koszul_delta, schouten_square, Bivector,
};
use dgbv::models::{bundled, Model, ModelError, BUNDLED};
use dgbv::scalar::Scalar;
use dgbv::superpoly::{AlgebraSeries, Monomial};
use num_traits::Zero;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn load(name: &str) -> Result<Model, String> {
    bundled(name).map_err(|e| format!("{name}: {e}"))
}

// ---------------------------------------------------------------- oracles

/// Row echelon form in place; returns the rank.
fn eliminate(rows: &mut [Vec<Scalar>]) -> usize {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..ncols {
        let Some(p) = (rank..rows.len()).find(|&r| !rows[r][c].is_zero()) else { continue };
        rows.swap(rank, p);
        let inv = &Scalar::from_int(1) / &rows[rank][c];
        for x in rows[rank].iter_mut() {
            *x = &*x * &inv;
        }
        let pivot = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && !row[c].is_zero() {
                let f = row[c].clone();
                for (x, y) in row.iter_mut().zip(&pivot) {
                    *x = &*x - &(&f * y);
                }
            }
        }
        rank += 1;
    }
    rank
}

fn rank(mut rows: Vec<Vec<Scalar>>) -> usize {
    eliminate(&mut rows)
}

/// Kernel of the matrix given by rows, as coordinate vectors.
fn kernel(mut rows: Vec<Vec<Scalar>>, ncols: usize) -> Vec<Vec<Scalar>> {
    let r = eliminate(&mut rows);
    let pivots: Vec<usize> = rows[..r].iter().map(|row| row.iter().position(|x| !x.is_zero()).unwrap()).collect();
    (0..ncols)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut v = vec![Scalar::zero(); ncols];
            v[free] = Scalar::from_int(1);
            for (row, &p) in rows[..r].iter().zip(&pivots) {
                v[p] = -&row[free];
            }
            v
        })
        .collect()
}

/// Dense rows of `f` restricted to `cols → rows`.
fn block(f: &LinearMap, rows: &[usize], cols: &[usize]) -> Vec<Vec<Scalar>> {
    rows.iter().map(|&r| cols.iter().map(|&c| f.entry(r, c)).collect()).collect()
}

fn dense(v: &Vector, idx: &[usize]) -> Vec<Scalar> {
    idx.iter().map(|&i| v.get(i)).collect()
}

fn sparse(x: &[Scalar], idx: &[usize]) -> Vector {
    Vector::from_entries(idx.iter().zip(x).map(|(&i, s)| (i, s.clone())))
}

fn mat_mul(a: &[Vec<Scalar>], b: &[Vec<Scalar>]) -> Vec<Vec<Scalar>> {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|c| {
                    let mut s = Scalar::zero();
                    for k in 0..inner {
                        if !row[k].is_zero() && !b[k][c].is_zero() {
                            s += &(&row[k] * &b[k][c]);
                        }
                    }
                    s
                })
                .collect()
        })
        .collect()
}

fn full(f: &LinearMap) -> Vec<Vec<Scalar>> {
    let all: Vec<usize> = (0..f.dim()).collect();
    block(f, &all, &all)
}

fn is_zero_matrix(m: &[Vec<Scalar>]) -> bool {
    m.iter().all(|r| r.iter().all(Zero::is_zero))
}

fn add(a: &[Vec<Scalar>], b: &[Vec<Scalar>]) -> Vec<Vec<Scalar>> {
    a.iter().zip(b).map(|(x, y)| x.iter().zip(y).map(|(p, q)| p + q).collect()).collect()
}

/// Brute-force Lefschetz ranks `(k, dim H^{n−k}, dim H^{n+k}, rank L^k)`.
fn lefschetz_oracle(m: &Model, omega: &Vector) -> Vec<(i32, usize, usize, usize)> {
    let alg = m.dgbv.algebra();
    let basis = alg.basis();
    let d = m.de_rham_differential();
    let n = alg.top_degree() / 2;
    let deg = |k: i32| basis.indices_of_degree(k);
    let cocycles = |k: i32| kernel(block(&d, &deg(k + 1), &deg(k)), deg(k).len());
    let boundaries = |k: i32| -> Vec<Vec<Scalar>> {
        let src = deg(k - 1);
        let tgt = deg(k);
        (0..src.len()).map(|c| tgt.iter().map(|&r| d.entry(r, src[c])).collect()).collect()
    };
    let h_dim = |k: i32| cocycles(k).len() - rank(boundaries(k));
    (0..=n)
        .map(|k| {
            let (s, t) = (n - k, n + k);
            let mut power = alg.unit();
            for _ in 0..k {
                power = alg.mul(&power, omega);
            }
            let b = boundaries(t);
            let mut rows = b.clone();
            for z in cocycles(s) {
                let img = alg.mul(&power, &sparse(&z, &deg(s)));
                rows.push(dense(&img, &deg(t)));
            }
            let r = if deg(t).is_empty() { 0 } else { rank(rows) - rank(b) };
            (k, h_dim(s), h_dim(t), r)
        })
        .collect()
}

/// `[Γ₁•Γ₁]` from the sign rule for `[x^i e_i • x^j e_j]`, collected on sorted monomials.
fn order_two_residual(a: &DgbvAlgebra, classes: &[Vector], active: &[usize]) -> AlgebraSeries {
    let basis = a.basis();
    let vars = dgbv::mc::variables_for(basis, classes).unwrap();
    let odd = |v: &Vector| v.parity(basis).unwrap().is_odd();
    let mut r = AlgebraSeries::zero();
    for &i in active {
        for &j in active {
            let Some((neg, mono)) = Monomial::from_word(&[i, j], &vars) else { continue };
            let flip = (!odd(&classes[i])) && odd(&classes[j]);
            let mut c = a.bracket(&classes[i], &classes[j]);
            if neg != flip {
                c = c.neg();
            }
            r.add_term(mono, &c);
        }
    }
    r
}

// ---------------------------------------------------------------- criteria

fn axioms() -> Outcome {
    let mut tuples = 0;
    for name in BUNDLED {
        let m = load(name)?;
        let r = m.dgbv.check_axioms();
        tuples += r.checks.iter().map(|c| c.tuples_checked).sum::<usize>();
        ensure(r.all_pass(), || format!("{name}: {:?} fails", r.failures().next().map(|c| c.axiom)))?;
        let i = m.dgbv.check_integral();
        ensure(i.is_integral, || format!("{name}: integral fails at {:?} / {:?}", i.delta_witness, i.bv_witness))?;
    }
    Ok(format!("{} models, {tuples} basis tuples, zero discrepancy", BUNDLED.len()))
}

fn bivectors(n: usize) -> Vec<Bivector> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let mut out = Vec::new();
    for code in 0..3usize.pow(pairs.len() as u32) {
        let mut c = code;
        let mut terms = Vec::new();
        for &(i, j) in &pairs {
            let v = (c % 3) as i64 - 1;
            c /= 3;
            if v != 0 {
                terms.push((i, j, Scalar::from_int(v)));
            }
        }
        out.push(Bivector::new(terms).unwrap());
    }
    out
}

fn koszul() -> Outcome {
    let mut admitted = 0;
    let algebras =
        [("torus4", LieAlgebraData::abelian(4)), ("heisenberg", LieAlgebraData::heisenberg()), ("kodaira-thurston", LieAlgebraData::kodaira_thurston())];
    for (name, g) in algebras {
        let ce = chevalley_eilenberg(&g).map_err(|e| e.to_string())?;
        let alg = ce.exterior.algebra();
        let integral = ce.exterior.top_integral();
        let d = full(&ce.d);
        for w in bivectors(g.dim()) {
            if !schouten_square(&g, &w).is_zero() {
                continue;
            }
            admitted += 1;
            let bv = koszul_delta(&g, &ce, &w).map_err(|e| format!("{name} {w:?}: {e}"))?;
            let b = full(&bv);
            ensure(is_zero_matrix(&mat_mul(&b, &b)), || format!("{name} {w:?}: Δ² ≠ 0"))?;
            ensure(is_zero_matrix(&add(&mat_mul(&d, &b), &mat_mul(&b, &d))), || format!("{name} {w:?}: dΔ + Δd ≠ 0"))?;
            let iota = contraction_operator(&ce.exterior, &w);
            let c = check_contraction_identity(alg, &integral, &iota);
            ensure(c.holds() && c.pairs_checked > 0, || format!("{name} {w:?}: contraction identity {:?}", c.witness))?;
            let p = check_delta_integral(alg, &integral, &bv);
            ensure(p.holds(), || format!("{name} {w:?}: Δ-integral {:?}", p.witness))?;
        }
    }
    Ok(format!("{admitted} admitted bivectors with coefficients in {{-1,0,1}}"))
}

fn lemma_conditions() -> Outcome {
    let mut runs = 0;
    for name in BUNDLED.iter().chain(&["heisenberg-polyvector", "dd-bar-square"]) {
        let m = load(name)?;
        let r = check_lemma_conditions(&m.dgbv);
        runs += 1;
        ensure(r.consistent(), || format!("{name}: inconsistent report {r:?}"))?;
        let expect = match *name {
            "complex-torus-1" | "complex-torus-2" => Some(true),
            "kodaira-thurston" => Some(false),
            _ => None,
        };
        if let Some(e) = expect {
            ensure(r.passes() == e && r.condition_c == e, || format!("{name}: expected pass = {e}"))?;
        }
        if r.passes() {
            let free = m.dgbv.dim();
            let hd = free - rank(full(m.dgbv.delta())) - rank(full(m.dgbv.delta()));
            let hb = free - rank(full(m.dgbv.bv())) - rank(full(m.dgbv.bv()));
            ensure(hd == hb && r.dim_h_delta == hd && r.dim_h_bv == hb, || format!("{name}: dim H(δ) = {hd}, dim H(Δ) = {hb}"))?;
        }
    }
    Ok(format!("{runs} runs consistent; tori pass, Kodaira-Thurston fails"))
}

fn lefschetz() -> Outcome {
    let mut rows = 0;
    for name in BUNDLED {
        let m = load(name)?;
        match m.lefschetz(None) {
            Err(ModelError::Hodge(HodgeError::OddTopDegree(t))) => {
                ensure(m.dgbv.algebra().top_degree() == t && t % 2 == 1, || format!("{name}: bogus odd-degree error"))?;
            }
            Err(e) => return Err(format!("{name}: {e}")),
            Ok(report) => {
                let omega = m.omega.clone().unwrap();
                let oracle = lefschetz_oracle(&m, &omega);
                let got: Vec<_> = report.rows.iter().map(|r| (r.k, r.dim_source, r.dim_target, r.rank)).collect();
                ensure(got == oracle, || format!("{name}: checker {got:?} vs oracle {oracle:?}"))?;
                rows += got.len();
                let expect = if name == "kodaira-thurston" { Some(1) } else { None };
                ensure(report.first_failure() == expect, || format!("{name}: first failure {:?}", report.first_failure()))?;
            }
        }
    }
    Ok(format!("{rows} ranks match the oracle; tori pass, Kodaira-Thurston fails at k=1, Heisenberg has odd top degree"))
}

fn solver_round_trip() -> Outcome {
    let mut runs = 0;
    for name in BUNDLED {
        let m = load(name)?;
        if !check_lemma_conditions(&m.dgbv).passes() {
            continue;
        }
        let h = m.hodge().map_err(|e| e.to_string())?;
        let classes = m.classes().map_err(|e| e.to_string())?;
        for order in 1..=4 {
            let opts = SolveOptions { order, mode: SolveMode::Analytic, active: None };
            let sol = solve(&m.dgbv, &h, &classes, &opts).map_err(|e| format!("{name} N={order}: {e}"))?;
            let v = verify_mc(&m.dgbv, &sol);
            ensure(v.valid(), || format!("{name} N={order}: verification {v:?}"))?;
            ensure(sol.certificates().len() == order as usize - 1, || format!("{name}: missing certificates"))?;
            for c in sol.certificates() {
                ensure(c.in_image_adjoint_bv == Some(true) && c.holds(), || format!("{name} N={order}: {c:?}"))?;
            }
            let serial = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
            let wide = rayon::ThreadPoolBuilder::new().num_threads(8).build().unwrap();
            let again = serial.install(|| solve(&m.dgbv, &h, &classes, &opts)).unwrap();
            let par = wide.install(|| solve(&m.dgbv, &h, &classes, &opts)).unwrap();
            ensure(again == sol && par == sol, || format!("{name} N={order}: runs differ"))?;
            ensure(format!("{sol:?}") == format!("{par:?}"), || format!("{name} N={order}: debug dumps differ"))?;
            runs += 1;
        }
    }
    Ok(format!("{runs} solves valid, certified and identical across 1- and 8-thread runs"))
}

fn kahler() -> Outcome {
    let names = ["box-bv-equals-box", "box-equals-2-box-partial", "box-equals-2-box-partial-bar", "d-bv-star-anticommute"];
    for n in 1..=2 {
        let t = BigradedModel::complex_torus(n);
        let r = t.kahler_report();
        for id in names {
            let c = r.get(id).ok_or_else(|| format!("missing identity {id}"))?;
            ensure(c.holds, || format!("torus {n}: {id} fails at {:?}", c.witness))?;
        }
        ensure(r.all_hold(), || format!("torus {n}: {:?}", r.failures().next()))?;
    }
    let sq = BigradedModel::dd_bar_square().kahler_report();
    ensure(sq.all_hold(), || format!("dd-bar square: {:?}", sq.failures().next()))?;
    Ok("□_Δ = □ = 2□_∂ = 2□_∂̄ and dΔ* + Δ*d = 0 on both tori and the ∂∂̄ square".into())
}

fn frobenius() -> Outcome {
    let mut solvable = Vec::new();
    for name in BUNDLED {
        let m = load(name)?;
        let h = m.hodge().map_err(|e| e.to_string())?;
        let classes = m.classes().map_err(|e| e.to_string())?;
        let sol = match solve(&m.dgbv, &h, &classes, &SolveOptions::with_order(4)) {
            Ok(s) => s,
            Err(SolveError::ClassNotClosed { .. } | SolveError::Obstruction(_)) => continue,
            Err(e) => return Err(format!("{name}: {e}")),
        };
        let f = FrobeniusData::new(&m.dgbv, &sol).map_err(|e| format!("{name}: {e}"))?;
        let metric = metric_constancy_check(&m.dgbv, &sol);
        ensure(metric.holds(), || format!("{name}: metric varies at {:?}", metric.witness))?;
        ensure(closedness_witness(&m.dgbv, &sol).is_none(), || format!("{name}: extended class not closed"))?;
        for (what, c) in [
            ("supersymmetry", f.check_supersymmetry()),
            ("identity axis", f.check_identity_axis()),
            ("associativity", f.check_associativity()),
            ("integrability", f.check_integrability()),
        ] {
            ensure(c.holds(), || format!("{name}: {what} fails at {:?}", c.witness))?;
        }
        solvable.push(name);
    }
    ensure(solvable.len() >= 4, || format!("only {solvable:?} solvable"))?;
    Ok(format!("N=4 on {}", solvable.join(", ")))
}

fn identification() -> Outcome {
    for n in 1..=2 {
        let r = compare_structures(&BigradedModel::complex_torus(n), 3).map_err(|e| e.to_string())?;
        ensure(r.identical(), || format!("n={n}: tensors differ at {:?}", r.tensor_discrepancy))?;
        ensure(r.origin_is_cup_product && r.real_at_origin, || format!("n={n}: origin is not the real cup product"))?;
        ensure(r.simultaneous.all_hold(), || format!("n={n}: simultaneous solve"))?;
    }
    Ok("de Rham and Dolbeault tensors equal on n=1, 2; real cup product at x=0".into())
}

fn obstruction() -> Outcome {
    let m = load("heisenberg-polyvector")?;
    let a = &m.dgbv;
    ensure(!check_lemma_conditions(a).passes(), || "conditions pass".into())?;
    let h = m.hodge().map_err(|e| e.to_string())?;
    let classes = m.classes().map_err(|e| e.to_string())?;
    let active: Vec<usize> = (0..classes.len()).filter(|&j| a.bv().apply(&classes[j]).is_zero()).collect();
    let nonzero = active.iter().any(|&i| active.iter().any(|&j| !a.bracket(&classes[i], &classes[j]).is_zero()));
    ensure(nonzero, || "brackets of classes vanish".into())?;
    let opts = SolveOptions { order: 4, mode: SolveMode::Analytic, active: Some(active.clone()) };
    let report = match solve(a, &h, &classes, &opts) {
        Err(SolveError::Obstruction(r)) => r,
        other => return Err(format!("expected an obstruction, got {other:?}")),
    };
    ensure(report.order == 2, || format!("obstructed at order {}", report.order))?;
    let vars = dgbv::mc::variables_for(a.basis(), &classes).unwrap();
    ensure(report.reproduces(&h, &vars), || "witness does not re-evaluate".into())?;
    ensure(report.residual == order_two_residual(a, &classes, &active), || "stored residual differs from [Γ₁•Γ₁]".into())?;
    let (mono, class) = report.witness();
    ensure(!class.is_zero() && h.is_harmonic(&class), || "witness is not a nonzero harmonic class".into())?;
    // δΓ₂ = −½R₂ must fail for at least one monomial coefficient
    let all: Vec<usize> = (0..a.dim()).collect();
    let delta = block(a.delta(), &all, &all);
    let base = rank(delta.clone());
    let unsolvable = report.residual.terms().any(|(_, r)| {
        let mut aug = delta.clone();
        for (row, x) in aug.iter_mut().zip(dense(r, &all)) {
            row.push(x);
        }
        rank(aug) > base
    });
    ensure(unsolvable, || "order-2 system is solvable".into())?;
    Ok(format!("order 2, witness at {mono}: {}", class.display_with(a.basis())))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("axiom suite", axioms),
        ("Koszul identities", koszul),
        ("conditions checker", lemma_conditions),
        ("hard Lefschetz", lefschetz),
        ("solver round trip", solver_round_trip),
        ("Kähler identities", kahler),
        ("Frobenius properties", frobenius),
        ("de Rham / Dolbeault identification", identification),
        ("obstruction path", obstruction),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("criterion {}: PASS {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL {name}: {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
