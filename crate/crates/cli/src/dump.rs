//! Sparse text dumps of Maurer-Cartan solutions and Frobenius tensors.

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;

use dgbv::frobenius::FrobeniusData;
use dgbv::graded::{GradedBasis, Parity, Vector};
use dgbv::linalg::Matrix;
use dgbv::mc::{variables_for, MCSolution, SolveMode};
use dgbv::superpoly::{AlgebraSeries, Monomial, ScalarSeries, VarSet};
use num_traits::Zero;

use crate::lex::{arity, int, scalar, sections, ParseError, Section, Token};

fn name(basis: &GradedBasis, i: usize) -> &str {
    &basis.get(i).name
}

fn basis_index(t: &Token, basis: &GradedBasis) -> Result<usize, ParseError> {
    basis.index_of(t.text).ok_or_else(|| t.err(format!("unknown basis element {:?}", t.text)))
}

fn monomial(t: &Token, vars: &VarSet) -> Result<Monomial, ParseError> {
    let n = vars.len();
    if t.text == "1" {
        return Ok(Monomial::one(n));
    }
    let mut exps = vec![0u32; n];
    for factor in t.text.split('*') {
        let (v, e) = match factor.split_once('^') {
            Some((v, e)) => (v, e.parse().map_err(|_| t.err("bad exponent"))?),
            None => (factor, 1),
        };
        let j: usize = v.strip_prefix('x').and_then(|s| s.parse().ok()).ok_or_else(|| t.err(format!("bad variable {v:?}")))?;
        if j >= n {
            return Err(t.err(format!("variable x{j} out of range ({n} variables)")));
        }
        if exps[j] != 0 || e == 0 {
            return Err(t.err("monomials list each variable once with a positive exponent"));
        }
        exps[j] = e;
    }
    Monomial::from_exponents(exps, vars).ok_or_else(|| t.err("odd variable with exponent above 1"))
}

fn parity_text(p: Parity) -> &'static str {
    if p.is_odd() {
        "odd"
    } else {
        "even"
    }
}

fn one_line<'a>(secs: &'a [Section<'a>], key: &str, n: usize) -> Result<&'a Section<'a>, ParseError> {
    let mut found = secs.iter().filter(|s| s.name() == key);
    let s = found.next().ok_or_else(|| ParseError { line: 1, col: 1, message: format!("missing `{key}` line") })?;
    if let Some(again) = found.next() {
        return Err(again.header[0].err(format!("duplicate `{key}` line")));
    }
    arity(&s.header, n, key)?;
    Ok(s)
}

pub fn solution_to_text(model: &str, basis: &GradedBasis, sol: &MCSolution) -> String {
    let mut out = format!("solution {model}\nmode {}\norder {}\n", sol.mode().name(), sol.order());
    out.push_str("active");
    for j in sol.active() {
        write!(out, " {j}").unwrap();
    }
    out.push('\n');
    for (j, c) in sol.classes().iter().enumerate() {
        writeln!(out, "class {j}").unwrap();
        for (i, s) in c.iter() {
            writeln!(out, "  {} {}", name(basis, i), s).unwrap();
        }
        out.push_str("end\n");
    }
    for n in 1..=sol.order() {
        writeln!(out, "term {n}").unwrap();
        for (m, v) in sol.term(n).terms() {
            for (i, s) in v.iter() {
                writeln!(out, "  {m} {} {}", name(basis, i), s).unwrap();
            }
        }
        out.push_str("end\n");
    }
    out
}

/// Reads a solution dump for a model with the given basis.
pub fn parse_solution(text: &str, basis: &GradedBasis) -> Result<(String, MCSolution), ParseError> {
    let secs = sections(text, &["solution", "mode", "order", "active"], &["class", "term"])?;
    let model = one_line(&secs, "solution", 2)?.header[1].text.to_string();
    let mode_tok = one_line(&secs, "mode", 2)?.header[1];
    let mode = match mode_tok.text {
        "analytic" => SolveMode::Analytic,
        "normalized" => SolveMode::Normalized,
        other => return Err(mode_tok.err(format!("unknown mode {other:?}"))),
    };
    let order_tok = one_line(&secs, "order", 2)?.header[1];
    let order: u32 = int(&order_tok)?;
    if order == 0 {
        return Err(order_tok.err("order must be at least 1"));
    }
    let mut classes = BTreeMap::new();
    let mut terms_raw = BTreeMap::new();
    for s in secs.iter().filter(|s| s.name() == "class" || s.name() == "term") {
        arity(&s.header, 2, s.name())?;
        let k: usize = int(&s.header[1])?;
        let map = if s.name() == "class" { &mut classes } else { &mut terms_raw };
        if map.insert(k, s).is_some() {
            return Err(s.header[0].err(format!("duplicate {} {k}", s.name())));
        }
    }
    let mut class_vecs = Vec::new();
    for (expect, (k, s)) in classes.iter().enumerate() {
        if *k != expect {
            return Err(s.header[1].err(format!("class {expect} is missing")));
        }
        let mut v = Vector::zero();
        let mut seen = HashSet::new();
        for line in &s.body {
            arity(line, 2, "a class entry")?;
            let i = basis_index(&line[0], basis)?;
            if !seen.insert(i) {
                return Err(line[0].err("duplicate entry"));
            }
            v.add_term(i, &scalar(&line[1])?);
        }
        class_vecs.push(v);
    }
    let class_line = secs.iter().find(|s| s.name() == "class").map_or(order_tok, |s| s.header[0]);
    let vars = variables_for(basis, &class_vecs).map_err(|e| class_line.err(e.to_string()))?;
    let mut active_lines = secs.iter().filter(|s| s.name() == "active");
    let active_sec = active_lines.next().ok_or_else(|| order_tok.err("missing `active` line"))?;
    if let Some(again) = active_lines.next() {
        return Err(again.header[0].err("duplicate `active` line"));
    }
    let mut active = Vec::new();
    for t in &active_sec.header[1..] {
        let j: usize = int(t)?;
        if j >= class_vecs.len() || active.contains(&j) {
            return Err(t.err(format!("bad active class {j}")));
        }
        active.push(j);
    }
    let mut terms = Vec::new();
    for n in 1..=order {
        let s = terms_raw.get(&(n as usize)).ok_or_else(|| order_tok.err(format!("term {n} is missing")))?;
        let mut t = AlgebraSeries::zero();
        let mut seen = HashSet::new();
        for line in &s.body {
            arity(line, 3, "a term entry")?;
            let m = monomial(&line[0], &vars)?;
            let i = basis_index(&line[1], basis)?;
            if !seen.insert((m.clone(), i)) {
                return Err(line[0].err("duplicate entry"));
            }
            t.add_term(m, &Vector::from_entries([(i, scalar(&line[2])?)]));
        }
        terms.push(t);
    }
    if let Some((&k, s)) = terms_raw.iter().find(|(&k, _)| k == 0 || k > order as usize) {
        return Err(s.header[1].err(format!("term {k} is beyond the declared order")));
    }
    Ok((model, MCSolution::from_terms(vars, class_vecs, active, mode, terms)))
}

pub fn tensor_to_text(model: &str, f: &FrobeniusData) -> String {
    let n = f.dim();
    let mut out = format!("frobenius {model}\norder {}\ntrusted {}\nparities", f.order(), f.trusted_order());
    for p in f.vars().parities() {
        write!(out, " {}", parity_text(*p)).unwrap();
    }
    out.push_str("\nmetric\n");
    let g = f.metric();
    for i in 0..n {
        for j in 0..n {
            if !g.get(i, j).is_zero() {
                writeln!(out, "  {i} {j} {}", g.get(i, j)).unwrap();
            }
        }
    }
    out.push_str("end\ntensor\n");
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for (m, c) in f.c(i, j, k).terms() {
                    writeln!(out, "  {i} {j} {k} {m} {c}").unwrap();
                }
            }
        }
    }
    out.push_str("end\n");
    out
}

pub fn parse_tensor(text: &str) -> Result<(String, FrobeniusData), ParseError> {
    let secs = sections(text, &["frobenius", "order", "trusted", "parities"], &["metric", "tensor"])?;
    let model = one_line(&secs, "frobenius", 2)?.header[1].text.to_string();
    let order_tok = one_line(&secs, "order", 2)?.header[1];
    let order: u32 = int(&order_tok)?;
    let trusted_tok = one_line(&secs, "trusted", 2)?.header[1];
    let par_sec = secs.iter().find(|s| s.name() == "parities").ok_or_else(|| order_tok.err("missing `parities` line"))?;
    let parities = par_sec.header[1..]
        .iter()
        .map(|t| match t.text {
            "even" => Ok(Parity::Even),
            "odd" => Ok(Parity::Odd),
            other => Err(t.err(format!("bad parity {other:?}"))),
        })
        .collect::<Result<Vec<_>, _>>()?;
    let n = parities.len();
    let vars = VarSet::new(parities);
    let block = |key: &str| secs.iter().find(|s| s.name() == key).ok_or_else(|| order_tok.err(format!("missing `{key}` block")));
    let index = |t: &Token| -> Result<usize, ParseError> {
        let i: usize = int(t)?;
        if i < n {
            Ok(i)
        } else {
            Err(t.err(format!("index {i} out of range ({n} classes)")))
        }
    };
    let mut metric = Matrix::zeros(n, n);
    let mut seen = HashSet::new();
    for line in &block("metric")?.body {
        arity(line, 3, "a metric entry")?;
        let (i, j) = (index(&line[0])?, index(&line[1])?);
        if !seen.insert((i, j)) {
            return Err(line[0].err("duplicate entry"));
        }
        metric.set(i, j, scalar(&line[2])?);
    }
    let mut tensor = vec![ScalarSeries::zero(); n * n * n];
    let mut seen = HashSet::new();
    for line in &block("tensor")?.body {
        arity(line, 5, "a tensor entry")?;
        let (i, j, k) = (index(&line[0])?, index(&line[1])?, index(&line[2])?);
        let m = monomial(&line[3], &vars)?;
        if !seen.insert((i, j, k, m.clone())) {
            return Err(line[0].err("duplicate entry"));
        }
        tensor[(i * n + j) * n + k].add_term(m, &scalar(&line[4])?);
    }
    let f = FrobeniusData::from_parts(vars, order, metric, tensor).map_err(|e| order_tok.err(e.to_string()))?;
    if f.trusted_order() != int::<u32>(&trusted_tok)? {
        return Err(trusted_tok.err(format!("trusted order must be {}", f.trusted_order())));
    }
    Ok((model, f))
}

