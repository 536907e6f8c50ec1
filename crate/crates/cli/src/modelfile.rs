//! Plain-text model files; the grammar is in `docs/model-format.md`.

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;

use dgbv::algebra::GradedAlgebra;
use dgbv::dgbv::DgbvAlgebra;
use dgbv::graded::{BasisElement, GradedBasis, LinearMap, Parity, Shift, Vector};
use dgbv::hodge::InnerProduct;
use dgbv::linalg::Matrix;
use dgbv::models::catalog::polyvector_model;
use dgbv::models::kahler::BigradedModel;
use dgbv::models::lie::LieAlgebraData;
use dgbv::models::poisson::Bivector;
use dgbv::models::{Model, ModelError};
use dgbv::scalar::Scalar;
use num_traits::Zero;

use crate::lex::{arity, int, scalar, sections, Line, Section, Token};
pub use crate::lex::ParseError;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LoadError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("model is invalid: {0}")]
    Model(#[from] ModelError),
}

fn parse_shift(t: &Token) -> Result<Shift, ParseError> {
    match t.text {
        "even" => Ok(Shift::Parity(Parity::Even)),
        "odd" => Ok(Shift::Parity(Parity::Odd)),
        s => match s.split_once(',') {
            Some((p, q)) => {
                let p = p.parse().map_err(|_| t.err("bad bidegree shift"))?;
                let q = q.parse().map_err(|_| t.err("bad bidegree shift"))?;
                Ok(Shift::Bi(p, q))
            }
            None => Ok(Shift::Total(int(t)?)),
        },
    }
}

fn shift_text(s: Shift) -> String {
    match s {
        Shift::Total(d) => d.to_string(),
        Shift::Bi(p, q) => format!("{p},{q}"),
        Shift::Parity(p) => if p.is_odd() { "odd" } else { "even" }.to_string(),
    }
}

struct Refs<'b> {
    basis: &'b GradedBasis,
}

impl Refs<'_> {
    fn index(&self, t: &Token) -> Result<usize, ParseError> {
        let n = self.basis.len();
        if let Some(k) = t.text.strip_prefix('@') {
            let k: usize = k.parse().map_err(|_| t.err("bad index"))?;
            return if k < n { Ok(k) } else { Err(t.err(format!("index {k} out of range (dimension {n})"))) };
        }
        self.basis.index_of(t.text).ok_or_else(|| t.err(format!("unknown basis element {:?}", t.text)))
    }
}

fn generator(t: &Token, dim: usize) -> Result<usize, ParseError> {
    let k: usize = t
        .text
        .strip_prefix('X')
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| t.err(format!("expected a generator X1..X{dim}, found {:?}", t.text)))?;
    if k == 0 || k > dim {
        return Err(t.err(format!("generator X{k} out of range (dimension {dim})")));
    }
    Ok(k - 1)
}

fn dup<K: std::hash::Hash + Eq>(seen: &mut HashSet<K>, key: K, t: &Token) -> Result<(), ParseError> {
    if seen.insert(key) {
        Ok(())
    } else {
        Err(t.err("duplicate entry"))
    }
}

fn parse_basis(s: &Section) -> Result<GradedBasis, ParseError> {
    let mut elements = Vec::new();
    let mut seen = HashSet::new();
    for line in &s.body {
        arity(line, 2, "a basis line")?;
        let name = line[0].text;
        if name.starts_with('@') {
            return Err(line[0].err("basis names may not start with '@'"));
        }
        dup(&mut seen, name.to_string(), &line[0])?;
        let d = &line[1];
        let el = match d.text.split_once(',') {
            Some((p, q)) => {
                let p = p.parse().map_err(|_| d.err("bad bidegree"))?;
                let q = q.parse().map_err(|_| d.err("bad bidegree"))?;
                BasisElement::bigraded(name, p, q)
            }
            None => BasisElement::new(name, int(d)?),
        };
        elements.push(el);
    }
    GradedBasis::new(elements).map_err(|e| s.header[0].err(e.to_string()))
}

fn parse_covector(s: &Section, refs: &Refs) -> Result<Vector, ParseError> {
    arity(&s.header, 1, s.name())?;
    let mut seen = HashSet::new();
    let mut v = Vector::zero();
    for line in &s.body {
        arity(line, 2, "an entry")?;
        let i = refs.index(&line[0])?;
        dup(&mut seen, i, &line[0])?;
        v.add_term(i, &scalar(&line[1])?);
    }
    Ok(v)
}

fn parse_metric(s: &Section, refs: &Refs) -> Result<Matrix, ParseError> {
    arity(&s.header, 1, "metric")?;
    let n = refs.basis.len();
    let mut m = Matrix::zeros(n, n);
    let mut seen = HashSet::new();
    for line in &s.body {
        arity(line, 3, "a metric entry")?;
        let (i, j) = (refs.index(&line[0])?, refs.index(&line[1])?);
        dup(&mut seen, (i, j), &line[0])?;
        m.set(i, j, scalar(&line[2])?);
    }
    Ok(m)
}

fn parse_operator(s: &Section, refs: &Refs) -> Result<(String, LinearMap), ParseError> {
    arity(&s.header, 3, "operator")?;
    let name = s.header[1].text.to_string();
    let shift = parse_shift(&s.header[2])?;
    let mut seen = HashSet::new();
    let mut entries = Vec::new();
    for line in &s.body {
        arity(line, 3, "an operator entry")?;
        let (r, c) = (refs.index(&line[0])?, refs.index(&line[1])?);
        dup(&mut seen, (r, c), &line[0])?;
        if !shift.admits(refs.basis, r, c) {
            return Err(line[0].err(format!("entry violates the declared shift {}", shift_text(shift))));
        }
        entries.push((r, c, scalar(&line[2])?));
    }
    let map = LinearMap::from_entries(refs.basis, entries, shift).map_err(|e| s.header[0].err(e.to_string()))?;
    Ok((name, map))
}

fn parse_product(s: &Section, refs: &Refs) -> Result<Vec<(usize, usize, usize, Scalar)>, ParseError> {
    arity(&s.header, 1, "product")?;
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for line in &s.body {
        arity(line, 4, "a product entry")?;
        let (i, j, k) = (refs.index(&line[0])?, refs.index(&line[1])?, refs.index(&line[2])?);
        dup(&mut seen, (i, j, k), &line[0])?;
        out.push((i, j, k, scalar(&line[3])?));
    }
    Ok(out)
}

fn parse_bracket(s: &Section, dim: usize) -> Result<Vec<(usize, usize, usize, Scalar)>, ParseError> {
    arity(&s.header, 1, "bracket")?;
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for line in &s.body {
        arity(line, 4, "a bracket entry")?;
        let (i, j, k) = (generator(&line[0], dim)?, generator(&line[1], dim)?, generator(&line[2], dim)?);
        if i == j {
            return Err(line[0].err("[X, X] is zero by antisymmetry"));
        }
        let c = scalar(&line[3])?;
        let (i, j, c) = if i < j { (i, j, c) } else { (j, i, -c) };
        dup(&mut seen, (i, j, k), &line[0])?;
        out.push((i, j, k, c));
    }
    Ok(out)
}

fn parse_bivector(s: &Section, dim: usize) -> Result<Bivector, ParseError> {
    arity(&s.header, 1, "bivector")?;
    let mut seen = HashSet::new();
    let mut terms = Vec::new();
    for line in &s.body {
        arity(line, 3, "a bivector entry")?;
        let (i, j) = (generator(&line[0], dim)?, generator(&line[1], dim)?);
        if i == j {
            return Err(line[0].err("X∧X is zero"));
        }
        dup(&mut seen, (i.min(j), i.max(j)), &line[0])?;
        terms.push((i, j, scalar(&line[2])?));
    }
    Bivector::new(terms).map_err(|e| s.header[0].err(e.to_string()))
}

#[derive(Default)]
struct Collected<'a> {
    by_name: BTreeMap<String, &'a Section<'a>>,
    operators: BTreeMap<String, &'a Section<'a>>,
}

fn collect<'a>(secs: impl IntoIterator<Item = &'a Section<'a>>) -> Result<Collected<'a>, ParseError> {
    let mut c = Collected::default();
    for s in secs {
        let (map, key) = if s.name() == "operator" {
            let key = s.header.get(1).ok_or_else(|| s.header[0].err("operator needs a name and a shift"))?.text;
            (&mut c.operators, key)
        } else {
            (&mut c.by_name, s.name())
        };
        if map.insert(key.to_string(), s).is_some() {
            return Err(s.header[0].err(format!("duplicate section {key:?}")));
        }
    }
    Ok(c)
}

fn reject_except(c: &Collected, allowed: &[&str], context: &str) -> Result<(), ParseError> {
    for (name, s) in &c.by_name {
        if !allowed.contains(&name.as_str()) {
            return Err(s.header[0].err(format!("section {name:?} is not allowed in {context}")));
        }
    }
    if let Some(s) = c.operators.values().next() {
        if !allowed.contains(&"operator") {
            return Err(s.header[0].err(format!("operators are not allowed in {context}")));
        }
    }
    Ok(())
}

fn required<'a>(c: &Collected<'a>, name: &str, at: &Token) -> Result<&'a Section<'a>, ParseError> {
    c.by_name.get(name).copied().ok_or_else(|| at.err(format!("missing section {name:?}")))
}

fn lie_builder(c: &Collected, header: &Line) -> Result<(usize, LieAlgebraData), LoadError> {
    arity(header, 3, "builder")?;
    let dim: usize = int(&header[2])?;
    if dim == 0 || dim > 10 {
        return Err(header[2].err("dimension must be between 1 and 10").into());
    }
    let constants = match c.by_name.get("bracket") {
        Some(s) => parse_bracket(s, dim)?,
        None => Vec::new(),
    };
    Ok((dim, LieAlgebraData::new(dim, constants)?))
}

fn metric_for(c: &Collected, basis: &GradedBasis) -> Result<Option<InnerProduct>, LoadError> {
    let Some(s) = c.by_name.get("metric") else { return Ok(None) };
    let m = parse_metric(s, &Refs { basis })?;
    InnerProduct::new(basis, m).map(Some).map_err(|e| s.header[0].err(e.to_string()).into())
}

fn omega_for(c: &Collected, basis: &GradedBasis) -> Result<Option<Vector>, ParseError> {
    c.by_name.get("omega").map(|s| parse_covector(s, &Refs { basis })).transpose()
}

fn build(name: String, builder: Option<&Line>, c: &Collected, at: &Token) -> Result<Model, LoadError> {
    let Some(header) = builder else { return explicit(name, c, at) };
    let kind = header.get(1).ok_or_else(|| header[0].err("builder needs a kind"))?;
    match kind.text {
        "lie" => {
            reject_except(c, &["bracket", "bivector", "omega", "metric"], "a lie builder")?;
            let (dim, g) = lie_builder(c, header)?;
            let w = match c.by_name.get("bivector") {
                Some(s) => parse_bivector(s, dim)?,
                None => Bivector::zero(),
            };
            let mut m = Model::from_poisson(name, g, w, None)?;
            m.omega = omega_for(c, m.basis())?;
            if let Some(ip) = metric_for(c, m.basis())? {
                m.inner_product = ip;
            }
            Ok(m)
        }
        "polyvector" => {
            reject_except(c, &["bracket", "metric"], "a polyvector builder")?;
            let (_, g) = lie_builder(c, header)?;
            let mut m = polyvector_model(name, &g)?;
            if let Some(ip) = metric_for(c, m.basis())? {
                m.inner_product = ip;
            }
            Ok(m)
        }
        "complex-torus" => {
            reject_except(c, &["metric", "omega"], "a complex-torus builder")?;
            arity(header, 3, "builder")?;
            let n: usize = int(&header[2])?;
            if n == 0 || n > 3 {
                return Err(header[2].err("complex dimension must be 1, 2 or 3").into());
            }
            let mut t = BigradedModel::complex_torus(n);
            if let Some(ip) = metric_for(c, t.basis())? {
                t = t.with_inner_product(ip)?;
            }
            if c.by_name.contains_key("omega") {
                t = t.with_omega(omega_for(c, t.basis())?);
            }
            let mut m = Model::from_bigraded(t)?;
            m.name = name;
            Ok(m)
        }
        other => Err(kind.err(format!("unknown builder {other:?}")).into()),
    }
}

fn explicit(name: String, c: &Collected, at: &Token) -> Result<Model, LoadError> {
    reject_except(c, &["basis", "product", "operator", "integral", "metric", "omega"], "an explicit model")?;
    let bs = required(c, "basis", at)?;
    arity(&bs.header, 1, "basis")?;
    let basis = parse_basis(bs)?;
    let refs = Refs { basis: &basis };
    let constants = match c.by_name.get("product") {
        Some(s) => parse_product(s, &refs)?,
        None => Vec::new(),
    };
    let algebra = GradedAlgebra::from_structure_constants(basis.clone(), constants)
        .map_err(ModelError::from)?;
    let mut ops = BTreeMap::new();
    for (key, s) in &c.operators {
        const KNOWN: [&str; 5] = ["delta", "bv", "partial", "partial-bar", "conj"];
        if !KNOWN.contains(&key.as_str()) {
            return Err(s.header[1].err(format!("unknown operator {key:?}")).into());
        }
        let (_, map) = parse_operator(s, &refs)?;
        ops.insert(key.clone(), map);
    }
    let delta = ops.remove("delta").ok_or_else(|| at.err("missing operator \"delta\""))?;
    let bv = ops.remove("bv").ok_or_else(|| at.err("missing operator \"bv\""))?;
    let integral = match c.by_name.get("integral") {
        Some(s) => parse_covector(s, &refs)?,
        None => return Err(at.err("missing section \"integral\"").into()),
    };
    let ip = metric_for(c, &basis)?.unwrap_or_else(|| InnerProduct::standard(basis.len()));
    let omega = omega_for(c, &basis)?;
    let dgbv = DgbvAlgebra::new(algebra.clone(), delta, bv, integral.clone()).map_err(ModelError::from)?;
    let mut model = Model::new(name.clone(), dgbv, ip.clone(), omega.clone());
    let bigraded: Vec<_> = ["partial", "partial-bar", "conj"].iter().map(|k| ops.remove(*k)).collect();
    match <[Option<LinearMap>; 3]>::try_from(bigraded).unwrap() {
        [Some(p), Some(pb), Some(conj)] => {
            if pb != *model.dgbv.delta() {
                return Err(at.err("operator \"delta\" must equal \"partial-bar\" in a bigraded model").into());
            }
            model.bigraded = Some(BigradedModel::new(name, algebra, p, pb, ip, omega, conj, integral)?);
        }
        [None, None, None] => {}
        _ => return Err(at.err("bigraded models need all of \"partial\", \"partial-bar\" and \"conj\"").into()),
    }
    Ok(model)
}

/// Parses and builds a model.
pub fn parse(text: &str) -> Result<Model, LoadError> {
    const BLOCKS: [&str; 8] = ["basis", "product", "operator", "integral", "metric", "omega", "bracket", "bivector"];
    let secs = sections(text, &["model", "builder"], &BLOCKS)?;
    let start = Token { text: "", line: 1, col: 1 };
    let mut name = None;
    let mut builder = None;
    for s in &secs {
        match s.name() {
            "model" => {
                arity(&s.header, 2, "model")?;
                if name.replace(s.header[1].text.to_string()).is_some() {
                    return Err(s.header[0].err("duplicate model line").into());
                }
            }
            "builder" if builder.replace(&s.header).is_some() => {
                return Err(s.header[0].err("duplicate builder line").into());
            }
            _ => {}
        }
    }
    let c = collect(secs.iter().filter(|s| !matches!(s.name(), "model" | "builder")))?;
    let name = name.ok_or_else(|| start.err("missing `model <name>` line"))?;
    build(name, builder, &c, &start)
}

fn name_of(basis: &GradedBasis, i: usize) -> &str {
    &basis.get(i).name
}

fn write_operator(out: &mut String, key: &str, f: &LinearMap, basis: &GradedBasis) {
    writeln!(out, "operator {key} {}", shift_text(f.shift())).unwrap();
    let mut entries: Vec<(usize, usize, &Scalar)> = f.entries().collect();
    entries.sort_by_key(|&(r, c, _)| (c, r));
    for (r, c, s) in entries {
        writeln!(out, "  {} {} {}", name_of(basis, r), name_of(basis, c), s).unwrap();
    }
    out.push_str("end\n");
}

fn write_covector(out: &mut String, key: &str, v: &Vector, basis: &GradedBasis) {
    writeln!(out, "{key}").unwrap();
    for (i, s) in v.iter() {
        writeln!(out, "  {} {}", name_of(basis, i), s).unwrap();
    }
    out.push_str("end\n");
}

/// Explicit form of a model; `parse(&to_text(m))` rebuilds the same data.
pub fn to_text(m: &Model) -> String {
    let basis = m.basis();
    let algebra = m.dgbv.algebra();
    let mut out = format!("model {}\n", m.name);
    out.push_str("basis\n");
    for el in basis.elements() {
        match el.bidegree {
            Some((p, q)) => writeln!(out, "  {} {p},{q}", el.name).unwrap(),
            None => writeln!(out, "  {} {}", el.name, el.degree).unwrap(),
        }
    }
    out.push_str("end\n");
    out.push_str("product\n");
    for (i, j, k, c) in algebra.structure_constants() {
        if i != 0 && j != 0 {
            writeln!(out, "  {} {} {} {}", name_of(basis, i), name_of(basis, j), name_of(basis, k), c).unwrap();
        }
    }
    out.push_str("end\n");
    write_operator(&mut out, "delta", m.dgbv.delta(), basis);
    write_operator(&mut out, "bv", m.dgbv.bv(), basis);
    if let Some(b) = &m.bigraded {
        write_operator(&mut out, "partial", b.partial(), basis);
        write_operator(&mut out, "partial-bar", b.partial_bar(), basis);
        write_operator(&mut out, "conj", b.conjugation(), basis);
    }
    write_covector(&mut out, "integral", m.dgbv.integral(), basis);
    let gram = m.inner_product.gram();
    if *gram != Matrix::identity(basis.len()) {
        out.push_str("metric\n");
        for i in 0..gram.rows() {
            for j in 0..gram.cols() {
                if !gram.get(i, j).is_zero() {
                    writeln!(out, "  {} {} {}", name_of(basis, i), name_of(basis, j), gram.get(i, j)).unwrap();
                }
            }
        }
        out.push_str("end\n");
    }
    if let Some(w) = &m.omega {
        write_covector(&mut out, "omega", w, basis);
    }
    out
}

/// Parses a class such as `e1^e3,e2^e4:-1` (entries `name[:scalar]`).
pub fn parse_class(spec: &str, basis: &GradedBasis) -> Result<Vector, ParseError> {
    let mut v = Vector::zero();
    let mut col = 1;
    let refs = Refs { basis };
    for part in spec.split(',') {
        let (name, coeff) = match part.split_once(':') {
            Some((n, c)) => (n, Some(c)),
            None => (part, None),
        };
        let t = Token { text: name.trim(), line: 1, col };
        let i = refs.index(&t)?;
        let s = match coeff {
            Some(c) => scalar(&Token { text: c.trim(), line: 1, col: col + name.len() + 1 })?,
            None => Scalar::from_int(1),
        };
        v.add_term(i, &s);
        col += part.len() + 1;
    }
    Ok(v)
}
