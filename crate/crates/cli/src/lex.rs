//! Line-oriented tokens and `name … end` sections shared by all text formats.

use dgbv::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}, column {col}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

#[derive(Debug, Clone, Copy)]
pub struct Token<'a> {
    pub text: &'a str,
    pub line: usize,
    pub col: usize,
}

impl Token<'_> {
    pub fn err(&self, message: impl Into<String>) -> ParseError {
        ParseError { line: self.line, col: self.col, message: message.into() }
    }
}

/// Whitespace-separated tokens with 1-based columns; `#` starts a comment.
pub fn tokenize(line: &str, number: usize) -> Vec<Token<'_>> {
    let body = line.split('#').next().unwrap_or("");
    let mut out = Vec::new();
    let mut start = None;
    for (k, c) in body.char_indices().chain(std::iter::once((body.len(), ' '))) {
        match (c.is_whitespace(), start) {
            (true, Some(s)) => {
                let col = body[..s].chars().count() + 1;
                out.push(Token { text: &body[s..k], line: number, col });
                start = None;
            }
            (false, None) => start = Some(k),
            _ => {}
        }
    }
    out
}

pub type Line<'a> = Vec<Token<'a>>;

pub fn scalar(t: &Token) -> Result<Scalar, ParseError> {
    t.text.parse().map_err(|e| t.err(format!("bad scalar {:?}: {e}", t.text)))
}

pub fn int<T: std::str::FromStr>(t: &Token) -> Result<T, ParseError> {
    t.text.parse().map_err(|_| t.err(format!("expected an integer, found {:?}", t.text)))
}

pub fn arity(line: &Line, n: usize, what: &str) -> Result<(), ParseError> {
    if line.len() != n {
        return Err(line[0].err(format!("{what} takes {} fields, found {}", n, line.len())));
    }
    Ok(())
}

/// A one-line directive (empty body) or a block closed by `end`.
pub struct Section<'a> {
    pub header: Line<'a>,
    pub body: Vec<Line<'a>>,
}

impl Section<'_> {
    pub fn name(&self) -> &str {
        self.header[0].text
    }
}

pub fn sections<'a>(text: &'a str, directives: &[&str], blocks: &[&str]) -> Result<Vec<Section<'a>>, ParseError> {
    let mut out: Vec<Section> = Vec::new();
    let mut open = false;
    let mut lines = 0;
    for (k, raw) in text.lines().enumerate() {
        lines = k + 1;
        let line = tokenize(raw, k + 1);
        let Some(first) = line.first() else { continue };
        if open {
            if first.text == "end" {
                arity(&line, 1, "end")?;
                open = false;
            } else {
                out.last_mut().unwrap().body.push(line);
            }
            continue;
        }
        match first.text {
            s if directives.contains(&s) => out.push(Section { header: line, body: Vec::new() }),
            s if blocks.contains(&s) => {
                out.push(Section { header: line, body: Vec::new() });
                open = true;
            }
            "end" => return Err(first.err("`end` without an open section")),
            s => return Err(first.err(format!("unknown directive {s:?}"))),
        }
    }
    if open {
        let h = &out.last().unwrap().header[0];
        let message = format!("section {:?} opened at line {} is not closed", h.text, h.line);
        return Err(ParseError { line: lines.max(1), col: 1, message });
    }
    Ok(out)
}
