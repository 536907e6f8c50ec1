use serde_json::{json, Value};

use dgbv::frobenius::{closedness_witness, metric_constancy_check, FrobeniusData, FrobeniusError, TensorCheck};
use dgbv::graded::Vector;
use dgbv::hodge::check_lemma_conditions;
use dgbv::mc::{solve, verify_mc, MCSolution, SolveError, SolveMode, SolveOptions};
use dgbv::models::compare::compare_structures;
use dgbv::models::{Model, ModelError};

use crate::dump::{parse_solution, parse_tensor, solution_to_text, tensor_to_text};
use crate::modelfile::{parse, parse_class, to_text};
use crate::report::{scalar_json, series_text, Report};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_OBSTRUCTED: i32 = 2;
pub const EXIT_IO: i32 = 3;

/// A finished command: the report, its exit status, and an optional dump.
#[derive(Debug)]
pub struct Outcome {
    pub report: Report,
    pub code: i32,
    pub artifact: Option<String>,
}

impl Outcome {
    fn new(report: Report, code: i32) -> Self {
        Outcome { report, code, artifact: None }
    }

    fn graded(report: Report) -> Self {
        let code = if report.all_pass() { EXIT_OK } else { EXIT_INVALID };
        Outcome::new(report, code)
    }
}

fn vector_text(m: &Model, v: &Vector) -> String {
    v.display_with(m.basis()).to_string()
}

fn check_into(r: &mut Report, m: &Model) {
    let axioms = m.dgbv.check_axioms();
    r.section("axioms");
    for c in &axioms.checks {
        let detail = match &c.witness {
            None => format!("{} tuples", c.tuples_checked),
            Some(w) => {
                let names: Vec<&str> = w.indices.iter().map(|&i| m.basis().get(i).name.as_str()).collect();
                format!("fails on ({}), discrepancy {}", names.join(", "), vector_text(m, &w.discrepancy))
            }
        };
        r.verdict(c.axiom.name(), c.passed(), detail);
    }
    let integral = m.dgbv.check_integral();
    r.section("integral");
    let pair = |w: &Option<dgbv::dgbv::PairWitness>| match w {
        None => String::new(),
        Some(w) => format!("fails on ({}, {}) by {}", m.basis().get(w.a).name, m.basis().get(w.b).name, w.discrepancy),
    };
    r.verdict("delta-invariance", integral.delta_witness.is_none(), pair(&integral.delta_witness));
    r.verdict("bv-invariance", integral.bv_witness.is_none(), pair(&integral.bv_witness));
    r.verdict(
        "nice",
        integral.is_nice,
        format!("pairing rank {} on {} cohomology classes", integral.pairing_rank, integral.cohomology_dim),
    );

    let c = check_lemma_conditions(&m.dgbv);
    r.section("conditions");
    r.verdict("A", c.condition_a, format!("dim Im δΔ = {}, dim Im δ ∩ Ker Δ = {}", c.dim_im_delta_bv, c.dim_im_delta_cap_ker_bv));
    r.verdict("B", c.condition_b, format!("dim Im Δδ = {}, dim Im Δ ∩ Ker δ = {}", c.dim_im_bv_delta, c.dim_im_bv_cap_ker_delta));
    r.verdict("C", c.condition_c, format!("dim Ker δ ∩ Ker Δ ∩ (Im δ + Im Δ) = {}", c.dim_closed_cap_exact_sum));
    r.verdict("H(i)", c.inclusion_i_iso, "(Ker Δ, δ) → (A, δ)");
    r.verdict("H(j)", c.inclusion_j_iso, "(Ker δ, Δ) → (A, Δ)");
    r.note(format!(
        "dim H(A,δ) = {}, dim H(A,Δ) = {}, dim (Ker δ ∩ Ker Δ)/Im δΔ = {}",
        c.dim_h_delta, c.dim_h_bv, c.dim_kernels_mod_im
    ));
    r.verdict("consistency", c.consistent(), "(A)∧(B) ⟺ (C) ⟺ H(i)∧H(j)");
    r.data(
        "dimensions",
        json!({
            "im_delta_bv": c.dim_im_delta_bv,
            "im_bv_delta": c.dim_im_bv_delta,
            "im_delta_cap_ker_bv": c.dim_im_delta_cap_ker_bv,
            "im_bv_cap_ker_delta": c.dim_im_bv_cap_ker_delta,
            "closed_cap_exact_sum": c.dim_closed_cap_exact_sum,
            "h_delta": c.dim_h_delta,
            "h_bv": c.dim_h_bv,
            "kernels_mod_image": c.dim_kernels_mod_im,
        }),
    );
}

pub fn check(m: &Model) -> Outcome {
    let mut r = Report::new("check", &m.name);
    check_into(&mut r, m);
    Outcome::graded(r)
}

pub struct SolveArgs {
    pub order: u32,
    pub mode: SolveMode,
    pub force: bool,
}

/// Runs the solver with every Δ-closed harmonic class active. On failure the
/// returned outcome is final.
fn solve_stage(r: &mut Report, m: &Model, args: &SolveArgs) -> Result<MCSolution, i32> {
    if !args.force {
        let mut pre = Report::new("check", &m.name);
        check_into(&mut pre, m);
        if !pre.all_pass() {
            r.absorb(pre);
            r.section("solve");
            r.verdict("precondition", false, "model checks fail; rerun with --force to solve anyway");
            return Err(EXIT_INVALID);
        }
    }
    r.section("solve");
    let hodge = m.hodge().map_err(|e| {
        r.verdict("hodge", false, e.to_string());
        EXIT_INVALID
    })?;
    let classes = m.classes().map_err(|e| {
        r.verdict("classes", false, e.to_string());
        EXIT_INVALID
    })?;
    let active: Vec<usize> = (0..classes.len()).filter(|&j| m.dgbv.bv().apply(&classes[j]).is_zero()).collect();
    let skipped: Vec<usize> = (0..classes.len()).filter(|j| !active.contains(j)).collect();
    r.note(format!("{} harmonic classes, order {}, mode {}", classes.len(), args.order, args.mode.name()));
    if !skipped.is_empty() {
        r.note(format!("classes not Δ-closed, left out of Γ₁: {skipped:?}"));
    }
    r.data("classes", Value::Array(classes.iter().map(|c| Value::String(vector_text(m, c))).collect()));
    r.data("inactive", json!(skipped));
    let opts = SolveOptions { order: args.order, mode: args.mode, active: Some(active) };
    match solve(&m.dgbv, &hodge, &classes, &opts) {
        Ok(sol) => Ok(sol),
        Err(SolveError::Obstruction(o)) => {
            let (mono, class) = o.witness();
            let vars = dgbv::mc::variables_for(m.basis(), &classes).expect("classes are homogeneous");
            let reproduced = o.reproduces(&hodge, &vars);
            r.verdict("unobstructed", false, format!("obstructed at order {}", o.order));
            r.note(format!("harmonic witness at {mono}: {}", vector_text(m, &class)));
            r.verdict("witness-reproduces", reproduced, "re-projected residual equals the stored harmonic part");
            r.data(
                "obstruction",
                json!({"order": o.order, "monomial": mono.to_string(), "class": vector_text(m, &class), "reproduces": reproduced}),
            );
            Err(EXIT_OBSTRUCTED)
        }
        Err(e) => {
            r.verdict("solve", false, e.to_string());
            Err(EXIT_INVALID)
        }
    }
}

fn summarize_solution(r: &mut Report, sol: &MCSolution) {
    let mut counts = Vec::new();
    for n in 1..=sol.order() {
        let t = sol.term(n);
        let count: usize = t.terms().map(|(_, v)| v.nnz()).sum();
        counts.push(count);
        r.note(format!("Γ_{n}: {count} entries over {} monomials", t.len()));
    }
    r.data("term_counts", json!(counts));
    for c in sol.certificates() {
        let detail = format!(
            "Γ_{} ∈ Im Δ: {}, ΔΓ_{} = 0: {}, Γ_{} ∈ Im δ*Δ: {}",
            c.order,
            c.in_image_bv,
            c.order,
            c.bv_closed,
            c.order,
            c.in_image_adjoint_bv.map_or("not decided".to_string(), |b| b.to_string())
        );
        r.verdict(&format!("certificate-{}", c.order), c.holds(), detail);
    }
}

pub fn solve_cmd(m: &Model, args: &SolveArgs) -> Outcome {
    let mut r = Report::new("solve", &m.name);
    let sol = match solve_stage(&mut r, m, args) {
        Ok(s) => s,
        Err(code) => return Outcome::new(r, code),
    };
    summarize_solution(&mut r, &sol);
    let dump = solution_to_text(&m.name, m.basis(), &sol);
    r.section("verification");
    match parse_solution(&dump, m.basis()) {
        Ok((_, back)) => {
            let same = back.terms() == sol.terms() && back.classes() == sol.classes() && back.active() == sol.active();
            r.verdict("dump-round-trip", same, "re-read dump matches the solution");
            let v = verify_mc(&m.dgbv, &back);
            let detail = match v.first_failing_order() {
                Some(n) => format!("residual at order {n}"),
                None => format!("zero residual through order {}", back.order()),
            };
            r.verdict("maurer-cartan", v.mc_holds(), detail);
            r.verdict("bv-closed", v.bv_closed(), "ΔΓ = 0");
            r.verdict("linear-term", v.linear_term_ok, "Γ₁ = Σ x^j e_j");
            r.verdict("unit-variable", v.x0_confined, "x0 only in Γ₁");
            r.verdict("even", v.even, "Γ_n is even and of x-degree n");
        }
        Err(e) => r.verdict("dump-round-trip", false, e.to_string()),
    }
    let mut out = Outcome::graded(r);
    out.artifact = Some(dump);
    out
}

fn tensor_verdict(r: &mut Report, name: &str, c: &TensorCheck) {
    let trusted = c.trusted_order.map_or("nothing trusted".to_string(), |t| format!("through x-degree {t}"));
    let detail = match &c.witness {
        None => format!("{} tuples, {trusted}", c.tuples_checked),
        Some(w) => format!("fails at {w:?}, {trusted}"),
    };
    r.verdict(name, c.holds(), detail);
}

pub fn frobenius_cmd(m: &Model, args: &SolveArgs) -> Outcome {
    let mut r = Report::new("frobenius", &m.name);
    let sol = match solve_stage(&mut r, m, args) {
        Ok(s) => s,
        Err(code) => return Outcome::new(r, code),
    };
    r.section("frobenius");
    let f = match FrobeniusData::new(&m.dgbv, &sol) {
        Ok(f) => f,
        Err(FrobeniusError::DegenerateMetric) => {
            r.verdict("metric", false, "the pairing on cohomology is degenerate: the integral is not nice");
            return Outcome::new(r, EXIT_INVALID);
        }
    };
    r.note(format!("{} classes, order {}, trusted through x-degree {}", f.dim(), f.order(), f.trusted_order()));
    let metric = metric_constancy_check(&m.dgbv, &sol);
    let detail = match &metric.witness {
        None => "∫(ē_iΓ)∧(ē_jΓ) = g_ij identically".to_string(),
        Some((i, j, d)) => format!("({i}, {j}) differs by {}", series_text(d)),
    };
    r.verdict("metric-constancy", metric.holds(), detail);
    let closed = closedness_witness(&m.dgbv, &sol);
    r.verdict("extended-classes-closed", closed.is_none(), closed.map_or(String::new(), |j| format!("class {j}")));
    tensor_verdict(&mut r, "supersymmetry", &f.check_supersymmetry());
    tensor_verdict(&mut r, "identity-axis", &f.check_identity_axis());
    tensor_verdict(&mut r, "associativity", &f.check_associativity());
    tensor_verdict(&mut r, "integrability", &f.check_integrability());
    let g = f.metric();
    let metric_json: Vec<Value> = (0..f.dim()).map(|i| Value::Array((0..f.dim()).map(|j| scalar_json(g.get(i, j))).collect())).collect();
    r.data("metric", Value::Array(metric_json));
    let dump = tensor_to_text(&m.name, &f);
    r.section("verification");
    match parse_tensor(&dump) {
        Ok((_, back)) => r.verdict("dump-round-trip", back == f, "re-read tensor dump matches"),
        Err(e) => r.verdict("dump-round-trip", false, e.to_string()),
    }
    let mut out = Outcome::graded(r);
    out.artifact = Some(dump);
    out
}

pub fn compare_cmd(m: &Model, order: u32) -> Outcome {
    let mut r = Report::new("compare", &m.name);
    r.section("compare");
    let Some(b) = &m.bigraded else {
        r.verdict("bigraded", false, "compare needs a bigraded model with ∂, ∂̄ and a real structure");
        return Outcome::new(r, EXIT_INVALID);
    };
    let report = match compare_structures(b, order) {
        Ok(c) => c,
        Err(ModelError::Solve(e)) if matches!(*e, SolveError::NotKahler(_)) => {
            let SolveError::NotKahler(k) = *e else { unreachable!() };
            for c in &k.checks {
                let detail = c.witness.as_ref().map_or(String::new(), |(i, j, s)| format!("entry ({i}, {j}) off by {s}"));
                r.verdict(c.name, c.holds, detail);
            }
            r.verdict("kahler", false, "Kähler identities fail; refusing to compare");
            return Outcome::new(r, EXIT_INVALID);
        }
        Err(e) => {
            r.verdict("compare", false, e.to_string());
            return Outcome::new(r, EXIT_INVALID);
        }
    };
    let fd = &report.dolbeault_frobenius;
    let fr = &report.de_rham_frobenius;
    r.note("i j k | Dolbeault c_ijk | de Rham c_ijk");
    let n = fd.dim();
    let mut rows = Vec::new();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let (a, b) = (fd.c(i, j, k), fr.c(i, j, k));
                if a.is_zero() && b.is_zero() {
                    continue;
                }
                let (ta, tb) = (series_text(a), series_text(b));
                r.note(format!("{i} {j} {k} | {ta} | {tb}"));
                rows.push(json!([i, j, k, ta, tb]));
            }
        }
    }
    r.data("tensors", Value::Array(rows));
    r.verdict("simultaneous-solution", report.simultaneous.all_hold(), "Dolbeault, conjugate and de Rham equations on one real Γ");
    r.verdict("gamma-equal", report.gamma_equal, "independent de Rham solve");
    r.verdict("metric-equal", report.metric_equal, "");
    let detail = report.tensor_discrepancy.map_or(String::new(), |t| format!("first difference at {t:?}"));
    r.verdict("tensor-equal", report.tensor_discrepancy.is_none(), detail);
    r.verdict("cup-product-at-origin", report.origin_is_cup_product, "c_ijk(0) = ∫ e_i∧e_j∧e_k");
    r.verdict("real-at-origin", report.real_at_origin, "");
    r.note(if report.identical() { "verdict: IDENTICAL" } else { "verdict: DIFFERENT" });
    Outcome::graded(r)
}

pub fn lefschetz_cmd(m: &Model, omega: Option<&str>) -> Result<Outcome, crate::modelfile::ParseError> {
    let mut r = Report::new("lefschetz", &m.name);
    r.section("lefschetz");
    let omega = omega.map(|s| parse_class(s, m.basis())).transpose()?;
    let report = match m.lefschetz(omega.as_ref()) {
        Ok(rep) => rep,
        Err(e) => {
            let msg = match e {
                ModelError::NoKahlerClass => "the model has no Kähler class; pass --omega".to_string(),
                e => e.to_string(),
            };
            r.verdict("omega", false, msg);
            return Ok(Outcome::new(r, EXIT_INVALID));
        }
    };
    let mut rows = Vec::new();
    for row in &report.rows {
        let (s, t) = (report.half_dim - row.k, report.half_dim + row.k);
        let detail = format!("L^{}: H^{s} ({}) → H^{t} ({}), rank {}", row.k, row.dim_source, row.dim_target, row.rank);
        r.verdict(&format!("k={}", row.k), row.is_iso(), detail);
        rows.push(json!({"k": row.k, "source": row.dim_source, "target": row.dim_target, "rank": row.rank}));
    }
    r.data("rows", Value::Array(rows));
    Ok(Outcome::graded(r))
}

/// Explicit form of the model, checked to re-read to the same data.
pub fn export(m: &Model) -> Outcome {
    let mut r = Report::new("export", &m.name);
    r.section("export");
    let text = to_text(m);
    let same = match parse(&text) {
        Ok(back) => {
            back.dgbv == m.dgbv && back.inner_product == m.inner_product && back.omega == m.omega && back.bigraded == m.bigraded && to_text(&back) == text
        }
        Err(_) => false,
    };
    r.verdict("round-trip", same, format!("{} basis elements", m.dgbv.dim()));
    let mut out = Outcome::graded(r);
    out.artifact = Some(text);
    out
}
