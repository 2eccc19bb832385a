//! Line-oriented reader for `.surf` documents.
//!
//! A document is a sequence of `[section]` headers followed by statements.
//! Statements end at a newline or `;`, and `#` starts a comment. Sections may
//! come in any order but each appears at most once.

use std::fmt;

use qreider::expr::{Expr, ExprError};
use qreider::rational::Q;

use crate::document::*;
use crate::model::Model;
use crate::queries::{is_name, parse_arg, spec, split_top, Form};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Syntax,
    /// A name that is not declared, or declared twice.
    Resolution,
    /// Well-formed input that violates a mathematical requirement.
    Invariant,
}

impl ErrorKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ErrorKind::Syntax => "syntax error",
            ErrorKind::Resolution => "resolution error",
            ErrorKind::Invariant => "invalid input",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub pos: Pos,
    pub kind: ErrorKind,
    pub msg: String,
    pub expected: Vec<String>,
}

impl ParseError {
    pub fn new(pos: Pos, kind: ErrorKind, msg: impl Into<String>) -> Self {
        Self {
            pos,
            kind,
            msg: msg.into(),
            expected: Vec::new(),
        }
    }

    fn syntax(pos: Pos, msg: impl Into<String>) -> Self {
        Self::new(pos, ErrorKind::Syntax, msg)
    }

    fn expecting(mut self, expected: &[&str]) -> Self {
        self.expected = expected.iter().map(|s| s.to_string()).collect();
        self
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "line {}, column {}: {}: {}",
            self.pos.line,
            self.pos.col,
            self.kind.as_str(),
            self.msg
        )?;
        if !self.expected.is_empty() {
            write!(f, " (expected {})", self.expected.join(" or "))?;
        }
        Ok(())
    }
}

impl std::error::Error for ParseError {}

pub const SECTIONS: &[&str] = &[
    "surface", "curves", "points", "tangents", "cone", "params", "divisors", "queries",
];

/// One statement and where it starts.
#[derive(Clone, Copy)]
struct Stmt<'a> {
    text: &'a str,
    pos: Pos,
}

impl<'a> Stmt<'a> {
    /// Position of `part`, which must be a subslice of this statement.
    fn at(&self, part: &str) -> Pos {
        let off = part.as_ptr() as usize - self.text.as_ptr() as usize;
        Pos {
            line: self.pos.line,
            col: self.pos.col + self.text[..off].chars().count(),
        }
    }

    fn err(&self, part: &str, msg: impl Into<String>) -> ParseError {
        ParseError::syntax(self.at(part), msg)
    }

    fn expr(&self, part: &str) -> Result<Expr, ParseError> {
        let part = part.trim();
        if part.is_empty() {
            return Err(self.err(part, "missing expression"));
        }
        Expr::parse(part).map_err(|e| match e {
            ExprError::Syntax { col, msg } => {
                let mut pos = self.at(part);
                pos.col += col - 1;
                ParseError::syntax(pos, msg)
            }
            other => self.err(part, other.to_string()),
        })
    }

    fn number(&self, part: &str) -> Result<Q, ParseError> {
        let part = part.trim();
        let e = self.expr(part)?;
        if !e.symbols().is_empty() {
            return Err(self.err(part, format!("expected a rational number, found `{part}`")));
        }
        e.eval(&|_| None).map_err(|err| self.err(part, err.to_string()))
    }

    fn name(&self, part: &str) -> Result<String, ParseError> {
        let part = part.trim();
        if is_name(part) {
            Ok(part.to_string())
        } else {
            Err(self.err(part, format!("expected a name, found `{part}`")).expecting(&["a name"]))
        }
    }

    /// Splits `NAME = REST`.
    fn binding(&self) -> Result<(String, &'a str), ParseError> {
        let text = self.text;
        let Some(eq) = text.find('=') else {
            return Err(self.err(text, "missing `=`").expecting(&["NAME = EXPRESSION"]));
        };
        Ok((self.name(&text[..eq])?, &text[eq + 1..]))
    }

    /// Comma-separated names, each with an optional `:k` multiplicity.
    fn mult_list(&self, part: &'a str) -> Result<Vec<(String, u32)>, ParseError> {
        let mut out = Vec::new();
        for item in part.split(',') {
            let (name, mult) = match item.split_once(':') {
                Some((n, k)) => {
                    let k = k.trim();
                    let mult = k
                        .parse::<u32>()
                        .ok()
                        .filter(|&m| m >= 1)
                        .ok_or_else(|| self.err(k, format!("expected a multiplicity >= 1, found `{k}`")))?;
                    (n, mult)
                }
                None => (item, 1),
            };
            out.push((self.name(name)?, mult));
        }
        Ok(out)
    }

    fn name_list(&self, part: &'a str) -> Result<Vec<String>, ParseError> {
        part.split(',').map(|s| self.name(s)).collect()
    }
}

/// Splits `text` at whole-word occurrences of the keywords, returning the
/// leading part and each keyword with the text that follows it.
fn keyword_split<'a>(
    text: &'a str,
    keywords: &[&'static str],
) -> (&'a str, Vec<(&'static str, &'a str)>) {
    let bytes = text.as_bytes();
    let is_word = |b: u8| b.is_ascii_alphanumeric() || b == b'_' || b == b'\'';
    let mut cuts: Vec<(usize, usize, &'static str)> = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        if is_word(bytes[i]) && (i == 0 || !is_word(bytes[i - 1])) {
            let mut j = i;
            while j < bytes.len() && is_word(bytes[j]) {
                j += 1;
            }
            if let Some(k) = keywords.iter().find(|k| **k == &text[i..j]) {
                cuts.push((i, j, k));
            }
            i = j;
        } else {
            i += 1;
        }
    }
    let head_end = cuts.first().map_or(text.len(), |c| c.0);
    let mut parts = Vec::new();
    for (idx, &(_, end, k)) in cuts.iter().enumerate() {
        let stop = cuts.get(idx + 1).map_or(text.len(), |c| c.0);
        parts.push((k, &text[end..stop]));
    }
    (&text[..head_end], parts)
}

/// Splits at whitespace outside brackets, keeping subslices.
fn split_args(text: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start: Option<usize> = None;
    for (i, c) in text.char_indices() {
        match c {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            _ => {}
        }
        if c.is_whitespace() && depth <= 0 {
            if let Some(s) = start.take() {
                out.push(&text[s..i]);
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push(&text[s..]);
    }
    out
}

fn statements(src: &str) -> Vec<Stmt<'_>> {
    let mut out = Vec::new();
    for (idx, line) in src.lines().enumerate() {
        let code = match line.find('#') {
            Some(i) => &line[..i],
            None => line,
        };
        let mut rest = code;
        loop {
            let (piece, tail) = match rest.find(';') {
                Some(i) => (&rest[..i], Some(&rest[i + 1..])),
                None => (rest, None),
            };
            let trimmed = piece.trim();
            if !trimmed.is_empty() {
                let off = trimmed.as_ptr() as usize - line.as_ptr() as usize;
                out.push(Stmt {
                    text: trimmed,
                    pos: Pos {
                        line: idx + 1,
                        col: line[..off].chars().count() + 1,
                    },
                });
            }
            match tail {
                Some(t) => rest = t,
                None => break,
            }
        }
    }
    out
}

#[derive(Default)]
struct SurfaceParts {
    pos: Pos,
    basis: Option<Vec<String>>,
    gram: Option<Vec<Vec<Q>>>,
    canonical: Option<Expr>,
    chi_o: Option<Q>,
}

/// Splits `[a, b, c]` into its top-level items.
fn bracket_items(s: &str) -> Option<Vec<&str>> {
    let inner = s.trim().strip_prefix('[')?.strip_suffix(']')?;
    split_top(inner)
}

fn surface_stmt(st: Stmt<'_>, parts: &mut SurfaceParts) -> Result<(), ParseError> {
    const KEYS: &[&str] = &["basis", "gram", "K", "chi_O"];
    let (key, rest) = st.binding().map_err(|e| e.expecting(&["basis =", "gram =", "K =", "chi_O ="]))?;
    let dup = |present: bool| {
        if present {
            Err(st.err(st.text, format!("`{key}` given twice")))
        } else {
            Ok(())
        }
    };
    match key.as_str() {
        "basis" => {
            dup(parts.basis.is_some())?;
            parts.basis = Some(st.name_list(rest)?);
        }
        "gram" => {
            dup(parts.gram.is_some())?;
            let bad = || st.err(rest.trim(), "expected a matrix `[[a, b], [c, d]]`");
            let rows = bracket_items(rest).ok_or_else(bad)?;
            let mut gram = Vec::new();
            for r in rows {
                let items = bracket_items(r).ok_or_else(|| st.err(r.trim(), "expected a row `[a, b, ...]`"))?;
                gram.push(items.iter().map(|x| st.number(x)).collect::<Result<Vec<_>, _>>()?);
            }
            parts.gram = Some(gram);
        }
        "K" => {
            dup(parts.canonical.is_some())?;
            parts.canonical = Some(st.expr(rest)?);
        }
        "chi_O" => {
            dup(parts.chi_o.is_some())?;
            parts.chi_o = Some(st.number(rest)?);
        }
        _ => return Err(st.err(st.text, format!("unknown surface key `{key}`")).expecting(KEYS)),
    }
    Ok(())
}

fn finish_surface(parts: SurfaceParts) -> Result<Spanned<SurfaceDecl>, ParseError> {
    let missing: Vec<&str> = [
        ("basis", parts.basis.is_none()),
        ("gram", parts.gram.is_none()),
        ("K", parts.canonical.is_none()),
        ("chi_O", parts.chi_o.is_none()),
    ]
    .iter()
    .filter(|(_, m)| *m)
    .map(|(k, _)| *k)
    .collect();
    if !missing.is_empty() {
        return Err(ParseError::syntax(
            parts.pos,
            format!("surface section is missing {}", missing.join(", ")),
        ));
    }
    Ok(Spanned::new(
        parts.pos,
        SurfaceDecl {
            basis: parts.basis.unwrap(),
            gram: parts.gram.unwrap(),
            canonical: parts.canonical.unwrap(),
            chi_o: parts.chi_o.unwrap(),
        },
    ))
}

fn point_stmt(st: Stmt<'_>) -> Result<PointDecl, ParseError> {
    let (head, parts) = keyword_split(st.text, &["on"]);
    let name = st.name(head)?;
    let on = match parts.as_slice() {
        [] => Vec::new(),
        [("on", list)] => st.mult_list(list)?,
        _ => return Err(st.err(st.text, "`on` given twice").expecting(&["NAME on CURVE[:k], ..."])),
    };
    Ok(PointDecl { name, on })
}

fn tangent_stmt(st: Stmt<'_>) -> Result<TangentDecl, ParseError> {
    let (head, parts) = keyword_split(st.text, &["at", "near", "containing"]);
    let name = st.name(head)?;
    let mut at = None;
    let mut near = None;
    let mut containing = None;
    for (k, rest) in parts {
        let twice = || st.err(rest, format!("`{k}` given twice"));
        match k {
            "at" if at.is_none() => at = Some(st.name(rest)?),
            "near" if near.is_none() => near = Some(st.mult_list(rest)?),
            "containing" if containing.is_none() => containing = Some(st.name_list(rest)?),
            _ => return Err(twice()),
        }
    }
    let at = at.ok_or_else(|| {
        st.err(st.text, "missing `at POINT`")
            .expecting(&["NAME at POINT [near CURVE[:k], ...] [containing CURVE, ...]"])
    })?;
    Ok(TangentDecl {
        name,
        at,
        near: near.unwrap_or_default(),
        containing: containing.unwrap_or_default(),
    })
}

fn generator_stmt(st: Stmt<'_>) -> Result<GeneratorDecl, ParseError> {
    let (label, rest) = st.binding()?;
    let (class, parts) = keyword_split(rest, &["through", "contains"]);
    let mut through = None;
    let mut contains = None;
    for (k, list) in parts {
        match k {
            "through" if through.is_none() => through = Some(st.name_list(list)?),
            "contains" if contains.is_none() => contains = Some(st.name_list(list)?),
            _ => return Err(st.err(list, format!("`{k}` given twice"))),
        }
    }
    Ok(GeneratorDecl {
        label,
        class: st.expr(class)?,
        through: through.unwrap_or_default(),
        contains: contains.unwrap_or_default(),
    })
}

fn param_stmt(st: Stmt<'_>) -> Result<ParamDecl, ParseError> {
    let (head, parts) = keyword_split(st.text, &["in"]);
    let name = st.name(head)?;
    let [("in", range)] = parts.as_slice() else {
        return Err(st.err(st.text, "missing range").expecting(&["NAME in [LO, HI]"]));
    };
    let items = bracket_items(range)
        .filter(|v| v.len() == 2)
        .ok_or_else(|| st.err(range.trim(), "expected `[LO, HI]`"))?;
    Ok(ParamDecl {
        name,
        lo: st.number(items[0])?,
        hi: st.number(items[1])?,
    })
}

fn query_stmt(st: Stmt<'_>) -> Result<Query, ParseError> {
    let tokens = split_args(st.text);
    let name = tokens[0];
    let Some(qs) = spec(name) else {
        let names: Vec<&str> = crate::queries::QUERIES.iter().map(|q| q.name).collect();
        return Err(st.err(name, format!("unknown query `{name}`")).expecting(&names));
    };
    let mut keyed: Vec<(&str, &str)> = Vec::new();
    let mut positional: Vec<&str> = Vec::new();
    for t in &tokens[1..] {
        let key = t.split_once('=').filter(|(k, _)| {
            let mut cs = k.chars();
            matches!(cs.next(), Some(c) if c.is_ascii_alphabetic())
                && cs.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
        });
        match key {
            Some((k, v)) => {
                if keyed.iter().any(|(k2, _)| *k2 == k) {
                    return Err(st.err(t, format!("argument `{k}` given twice")));
                }
                keyed.push((k, v));
            }
            None if keyed.is_empty() => positional.push(t),
            None => return Err(st.err(t, "positional argument after a keyed one")),
        }
    }
    let usages: Vec<String> = qs.forms.iter().map(|f| format!("{name} {}", f.usage())).collect();
    let usage_refs: Vec<&str> = usages.iter().map(String::as_str).collect();
    let fits = |f: &Form| {
        positional.len() <= f.positional
            && keyed.iter().all(|(k, _)| {
                f.arg(k).is_some() && !f.args[..positional.len()].iter().any(|a| a.key == *k)
            })
            && f.args.iter().enumerate().all(|(i, a)| {
                !a.required || i < positional.len() || keyed.iter().any(|(k, _)| *k == a.key)
            })
    };
    let Some((form_idx, form)) = qs.forms.iter().enumerate().find(|(_, f)| fits(f)) else {
        return Err(st.err(st.text, format!("arguments do not match `{name}`")).expecting(&usage_refs));
    };
    let mut args = Vec::new();
    for (i, a) in form.args.iter().enumerate() {
        let value = if i < positional.len() {
            Some(positional[i])
        } else {
            keyed.iter().find(|(k, _)| *k == a.key).map(|(_, v)| *v)
        };
        if let Some(v) = value {
            let arg = parse_arg(a.ty, v).map_err(|msg| st.err(v, format!("argument `{}`: {msg}", a.key)))?;
            args.push((a.key.to_string(), arg));
        }
    }
    Ok(Query {
        name: name.to_string(),
        form: form_idx,
        args,
    })
}

/// Reads the statements of a document without resolving names.
pub fn parse_syntax(src: &str) -> Result<Document, ParseError> {
    let mut doc = Document::default();
    let mut section: Option<&str> = None;
    let mut seen: Vec<&str> = Vec::new();
    let mut surface: Option<SurfaceParts> = None;
    let mut gens: Vec<Spanned<GeneratorDecl>> = Vec::new();
    let mut cone_pos: Option<Pos> = None;
    for st in statements(src) {
        if let Some(inner) = st.text.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
            let name = inner.trim();
            if is_name(name) {
                let Some(known) = SECTIONS.iter().find(|s| **s == name) else {
                    return Err(st.err(st.text, format!("unknown section `{name}`")).expecting(SECTIONS));
                };
                if seen.contains(known) {
                    return Err(st.err(st.text, format!("section `{name}` appears twice")));
                }
                seen.push(known);
                section = Some(known);
                match *known {
                    "surface" => {
                        surface = Some(SurfaceParts {
                            pos: st.pos,
                            ..Default::default()
                        })
                    }
                    "cone" => cone_pos = Some(st.pos),
                    _ => {}
                }
                continue;
            }
        }
        let Some(sec) = section else {
            return Err(st.err(st.text, "statement outside any section").expecting(&["a section header like [surface]"]));
        };
        match sec {
            "surface" => surface_stmt(st, surface.as_mut().expect("header seen"))?,
            "curves" => {
                let (name, rest) = st.binding()?;
                doc.curves.push(Spanned::new(st.pos, CurveDecl {
                    name,
                    class: st.expr(rest)?,
                }));
            }
            "points" => doc.points.push(Spanned::new(st.pos, point_stmt(st)?)),
            "tangents" => doc.tangents.push(Spanned::new(st.pos, tangent_stmt(st)?)),
            "cone" => {
                let words: Vec<&str> = st.text.split_whitespace().collect();
                if words.first() == Some(&"hirzebruch") {
                    if doc.cone.is_some() || !gens.is_empty() {
                        return Err(st.err(st.text, "the cone is already declared"));
                    }
                    let n = match words.as_slice() {
                        [_, n] => n.parse::<u32>().ok(),
                        _ => None,
                    }
                    .ok_or_else(|| st.err(st.text, "expected `hirzebruch N` with N >= 0"))?;
                    doc.cone = Some(Spanned::new(st.pos, ConeDecl::Hirzebruch(n)));
                } else {
                    if doc.cone.is_some() {
                        return Err(st.err(st.text, "generators cannot follow `hirzebruch N`"));
                    }
                    gens.push(Spanned::new(st.pos, generator_stmt(st)?));
                }
            }
            "params" => doc.params.push(Spanned::new(st.pos, param_stmt(st)?)),
            "divisors" => {
                let (name, rest) = st.binding()?;
                doc.divisors.push(Spanned::new(st.pos, DivisorDecl {
                    name,
                    expr: st.expr(rest)?,
                }));
            }
            "queries" => doc.queries.push(Spanned::new(st.pos, query_stmt(st)?)),
            _ => unreachable!("section names come from SECTIONS"),
        }
    }
    if let Some(parts) = surface {
        doc.surface = Some(finish_surface(parts)?);
    }
    if !gens.is_empty() {
        doc.cone = Some(Spanned::new(cone_pos.unwrap_or_default(), ConeDecl::Generators(gens)));
    } else if doc.cone.is_none() {
        if let Some(pos) = cone_pos {
            return Err(ParseError::syntax(pos, "empty cone section").expecting(&["hirzebruch N", "LABEL = CLASS"]));
        }
    }
    Ok(doc)
}

/// Reads a document and checks that every name resolves and every
/// declaration is mathematically valid.
pub fn parse(src: &str) -> Result<Document, ParseError> {
    let doc = parse_syntax(src)?;
    Model::resolve(&doc)?;
    Ok(doc)
}
