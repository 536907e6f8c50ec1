//! Run reports. Every verdict appears as a text line and, in machine form,
//! both in the `verdicts` array and in the echoed `text` lines.

use serde_json::{json, Map, Value};

use dgbv::scalar::Scalar;
use dgbv::superpoly::ScalarSeries;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Machine,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub section: String,
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Default)]
pub struct Report {
    command: String,
    model: String,
    current: String,
    lines: Vec<String>,
    verdicts: Vec<Verdict>,
    data: Map<String, Value>,
}

impl Report {
    pub fn new(command: &str, model: &str) -> Self {
        Report {
            command: command.into(),
            model: model.into(),
            lines: vec![format!("{command}: {model}")],
            ..Default::default()
        }
    }

    pub fn section(&mut self, title: &str) {
        self.current = title.to_string();
        self.lines.push(format!("[{title}]"));
    }

    pub fn verdict(&mut self, name: &str, pass: bool, detail: impl Into<String>) {
        let detail = detail.into();
        let tag = if pass { "PASS" } else { "FAIL" };
        if detail.is_empty() {
            self.lines.push(format!("  {tag} {name}"));
        } else {
            self.lines.push(format!("  {tag} {name}: {detail}"));
        }
        self.verdicts.push(Verdict { section: self.current.clone(), name: name.into(), pass, detail });
    }

    pub fn note(&mut self, line: impl Into<String>) {
        self.lines.push(format!("  {}", line.into()));
    }

    /// Appends another report's lines (minus its header), verdicts and data.
    pub fn absorb(&mut self, other: Report) {
        self.lines.extend(other.lines.into_iter().skip(1));
        self.verdicts.extend(other.verdicts);
        self.data.extend(other.data);
        self.current = other.current;
    }

    /// Machine-only payload under `data.<section>.<key>`.
    pub fn data(&mut self, key: &str, value: Value) {
        let section = self.data.entry(self.current.clone()).or_insert_with(|| Value::Object(Map::new()));
        section.as_object_mut().unwrap().insert(key.into(), value);
    }

    pub fn verdicts(&self) -> &[Verdict] {
        &self.verdicts
    }

    pub fn all_pass(&self) -> bool {
        self.verdicts.iter().all(|v| v.pass)
    }

    pub fn failed(&self, name: &str) -> bool {
        self.verdicts.iter().any(|v| v.name == name && !v.pass)
    }

    pub fn lines(&self) -> &[String] {
        &self.lines
    }

    pub fn render(&self, format: Format, exit_code: i32) -> String {
        match format {
            Format::Text => {
                let mut s = self.lines.join("\n");
                s.push_str(&format!("\nexit status {exit_code}\n"));
                s
            }
            Format::Machine => {
                let verdicts: Vec<Value> = self
                    .verdicts
                    .iter()
                    .map(|v| json!({"section": v.section, "name": v.name, "pass": v.pass, "detail": v.detail}))
                    .collect();
                let doc = json!({
                    "command": self.command,
                    "model": self.model,
                    "exit_code": exit_code,
                    "pass": self.all_pass(),
                    "verdicts": verdicts,
                    "data": Value::Object(self.data.clone()),
                    "text": self.lines,
                });
                let mut s = serde_json::to_string_pretty(&doc).expect("report serializes");
                s.push('\n');
                s
            }
        }
    }
}

/// `c₀ + c₁·x0 + …` in monomial order; `0` for the zero series.
pub fn series_text(p: &ScalarSeries) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let parts: Vec<String> = p
        .terms()
        .map(|(m, c)| if m.is_one() { c.to_string() } else { format!("({c})*{m}") })
        .collect();
    parts.join(" + ")
}

pub fn scalar_json(s: &Scalar) -> Value {
    Value::String(s.to_string())
}
