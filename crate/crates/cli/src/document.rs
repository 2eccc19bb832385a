//! The parsed form of a `.surf` document and its canonical printer.

use std::fmt;

use qreider::expr::Expr;
use qreider::rational::Q;

use crate::queries::{spec, Arg};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

/// A declaration with its source position. Equality ignores the position so
/// that a printed and reparsed document compares equal to the original.
#[derive(Debug, Clone)]
pub struct Spanned<T> {
    pub pos: Pos,
    pub item: T,
}

impl<T: PartialEq> PartialEq for Spanned<T> {
    fn eq(&self, other: &Self) -> bool {
        self.item == other.item
    }
}

impl<T: Eq> Eq for Spanned<T> {}

impl<T> Spanned<T> {
    pub fn new(pos: Pos, item: T) -> Self {
        Self { pos, item }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SurfaceDecl {
    pub basis: Vec<String>,
    pub gram: Vec<Vec<Q>>,
    /// Canonical class as an expression in the basis labels.
    pub canonical: Expr,
    pub chi_o: Q,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CurveDecl {
    pub name: String,
    pub class: Expr,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointDecl {
    pub name: String,
    /// Declared curves through the point with their multiplicities.
    pub on: Vec<(String, u32)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TangentDecl {
    pub name: String,
    pub at: String,
    /// Multiplicities of strict transforms at the infinitely near point.
    pub near: Vec<(String, u32)>,
    /// Curves containing the length-two scheme.
    pub containing: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorDecl {
    pub label: String,
    pub class: Expr,
    pub through: Vec<String>,
    pub contains: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConeDecl {
    Hirzebruch(u32),
    Generators(Vec<Spanned<GeneratorDecl>>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParamDecl {
    pub name: String,
    pub lo: Q,
    pub hi: Q,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DivisorDecl {
    pub name: String,
    pub expr: Expr,
}

/// A query with its arguments in the order of the selected form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Query {
    pub name: String,
    pub form: usize,
    pub args: Vec<(String, Arg)>,
}

impl Query {
    pub fn get(&self, key: &str) -> Option<&Arg> {
        self.args.iter().find(|(k, _)| k == key).map(|(_, a)| a)
    }
}

impl fmt::Display for Query {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name)?;
        for (k, a) in &self.args {
            write!(f, " {k}={a}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Document {
    pub surface: Option<Spanned<SurfaceDecl>>,
    pub curves: Vec<Spanned<CurveDecl>>,
    pub points: Vec<Spanned<PointDecl>>,
    pub tangents: Vec<Spanned<TangentDecl>>,
    pub cone: Option<Spanned<ConeDecl>>,
    pub params: Vec<Spanned<ParamDecl>>,
    pub divisors: Vec<Spanned<DivisorDecl>>,
    pub queries: Vec<Spanned<Query>>,
}

impl Document {
    pub fn is_empty(&self) -> bool {
        *self == Document::default()
    }
}

fn mults(list: &[(String, u32)]) -> String {
    list.iter()
        .map(|(c, k)| if *k == 1 { c.clone() } else { format!("{c}:{k}") })
        .collect::<Vec<_>>()
        .join(", ")
}

/// Prints the canonical text of a document: sections in resolution order,
/// one statement per line.
impl fmt::Display for Document {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        let mut header = |f: &mut fmt::Formatter<'_>, name: &str| -> fmt::Result {
            if !first {
                writeln!(f)?;
            }
            first = false;
            writeln!(f, "[{name}]")
        };
        if let Some(s) = &self.surface {
            let s = &s.item;
            header(f, "surface")?;
            writeln!(f, "basis = {}", s.basis.join(", "))?;
            let rows: Vec<String> = s
                .gram
                .iter()
                .map(|r| format!("[{}]", r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")))
                .collect();
            writeln!(f, "gram = [{}]", rows.join(", "))?;
            writeln!(f, "K = {}", s.canonical)?;
            writeln!(f, "chi_O = {}", s.chi_o)?;
        }
        if !self.curves.is_empty() {
            header(f, "curves")?;
            for c in &self.curves {
                writeln!(f, "{} = {}", c.item.name, c.item.class)?;
            }
        }
        if !self.points.is_empty() {
            header(f, "points")?;
            for p in &self.points {
                if p.item.on.is_empty() {
                    writeln!(f, "{}", p.item.name)?;
                } else {
                    writeln!(f, "{} on {}", p.item.name, mults(&p.item.on))?;
                }
            }
        }
        if !self.tangents.is_empty() {
            header(f, "tangents")?;
            for t in &self.tangents {
                let t = &t.item;
                write!(f, "{} at {}", t.name, t.at)?;
                if !t.near.is_empty() {
                    write!(f, " near {}", mults(&t.near))?;
                }
                if !t.containing.is_empty() {
                    write!(f, " containing {}", t.containing.join(", "))?;
                }
                writeln!(f)?;
            }
        }
        if let Some(c) = &self.cone {
            header(f, "cone")?;
            match &c.item {
                ConeDecl::Hirzebruch(n) => writeln!(f, "hirzebruch {n}")?,
                ConeDecl::Generators(gens) => {
                    for g in gens {
                        let g = &g.item;
                        write!(f, "{} = {}", g.label, g.class)?;
                        if !g.through.is_empty() {
                            write!(f, " through {}", g.through.join(", "))?;
                        }
                        if !g.contains.is_empty() {
                            write!(f, " contains {}", g.contains.join(", "))?;
                        }
                        writeln!(f)?;
                    }
                }
            }
        }
        if !self.params.is_empty() {
            header(f, "params")?;
            for p in &self.params {
                writeln!(f, "{} in [{}, {}]", p.item.name, p.item.lo, p.item.hi)?;
            }
        }
        if !self.divisors.is_empty() {
            header(f, "divisors")?;
            for d in &self.divisors {
                writeln!(f, "{} = {}", d.item.name, d.item.expr)?;
            }
        }
        if !self.queries.is_empty() {
            header(f, "queries")?;
            for q in &self.queries {
                debug_assert!(spec(&q.item.name).is_some());
                writeln!(f, "{}", q.item)?;
            }
        }
        Ok(())
    }
}
