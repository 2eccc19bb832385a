//! Resolution of a document into the library's objects.
//!
//! Declarations are resolved in the order surface, curves, points, tangents,
//! cone, params, divisors, queries; a name may be used by anything resolved
//! after it.

use std::collections::BTreeMap;

use num_traits::Zero;

use qreider::cone::{ConeDescription, Generator};
use qreider::expr::{Expr, Poly};
use qreider::lattice::{DivisorClass, IntersectionLattice};
use qreider::rational::Q;
use qreider::search::{AffineDivisor, Param, ParamFamily};
use qreider::surface::{PointSpec, QDivisor, SurfaceModel, TangentSpec};

use crate::document::*;
use crate::parse::{ErrorKind, ParseError};
use crate::queries::{spec, Arg, ArgType, GoalArg, ModeArg};

#[derive(Debug)]
pub struct Model {
    pub surface: Option<SurfaceModel>,
    pub cone: Option<ConeDescription>,
    pub params: Vec<Param>,
    divisors: BTreeMap<String, Poly>,
}

fn resolution(pos: Pos, msg: impl Into<String>) -> ParseError {
    ParseError::new(pos, ErrorKind::Resolution, msg)
}

fn invariant(pos: Pos, msg: impl Into<String>) -> ParseError {
    ParseError::new(pos, ErrorKind::Invariant, msg)
}

/// Reads an expression that must be linear in the basis labels.
pub fn class_from_expr(
    lattice: &std::sync::Arc<IntersectionLattice>,
    e: &Expr,
) -> Result<DivisorClass, String> {
    let labels = lattice.labels();
    let poly = e
        .to_poly(&|s| labels.iter().any(|l| l == s).then(|| Poly::symbol(s)))
        .map_err(|err| format!("{err} (classes are written in the basis {})", labels.join(", ")))?;
    let mut coeffs = vec![Q::zero(); labels.len()];
    for (mono, c) in poly.terms() {
        match mono.as_slice() {
            [s] => {
                let i = lattice.index_of(s).expect("symbol came from the basis");
                coeffs[i] += c;
            }
            [] => return Err(format!("constant term {c} in a divisor class")),
            _ => return Err(format!("nonlinear term {} in a divisor class", mono.join("*"))),
        }
    }
    DivisorClass::new(lattice, coeffs).map_err(|e| e.to_string())
}

impl Model {
    pub fn resolve(doc: &Document) -> Result<Model, ParseError> {
        let mut model = Model {
            surface: None,
            cone: None,
            params: Vec::new(),
            divisors: BTreeMap::new(),
        };
        if let Some(s) = &doc.surface {
            let d = &s.item;
            let lattice = IntersectionLattice::new(d.basis.clone(), d.gram.clone())
                .map_err(|e| invariant(s.pos, format!("surface lattice: {e}")))?;
            let k = class_from_expr(&lattice, &d.canonical).map_err(|e| invariant(s.pos, format!("K: {e}")))?;
            let surface = SurfaceModel::new(lattice, k, d.chi_o.clone()).map_err(|e| invariant(s.pos, e.to_string()))?;
            model.surface = Some(surface);
        }
        let need_surface = |pos: Pos, model: &Model| -> Result<(), ParseError> {
            if model.surface.is_none() {
                Err(resolution(pos, "no [surface] section declared"))
            } else {
                Ok(())
            }
        };
        for c in &doc.curves {
            need_surface(c.pos, &model)?;
            let surface = model.surface.as_mut().unwrap();
            let class = class_from_expr(surface.lattice(), &c.item.class).map_err(|e| invariant(c.pos, e))?;
            surface
                .add_curve(c.item.name.clone(), class)
                .map_err(|e| resolution(c.pos, e.to_string()))?;
        }
        for p in &doc.points {
            need_surface(p.pos, &model)?;
            let mut spec = PointSpec::new(p.item.name.clone());
            for (c, k) in &p.item.on {
                spec = spec.with(c.clone(), *k);
            }
            model
                .surface
                .as_mut()
                .unwrap()
                .add_point(spec)
                .map_err(|e| resolution(p.pos, e.to_string()))?;
        }
        for t in &doc.tangents {
            need_surface(t.pos, &model)?;
            let mut spec = TangentSpec::new(t.item.name.clone(), t.item.at.clone());
            for (c, k) in &t.item.near {
                spec = spec.with_near(c.clone(), *k);
            }
            for c in &t.item.containing {
                spec = spec.containing(c.clone());
            }
            model
                .surface
                .as_mut()
                .unwrap()
                .add_tangent(spec)
                .map_err(|e| resolution(t.pos, e.to_string()))?;
        }
        if let Some(c) = &doc.cone {
            need_surface(c.pos, &model)?;
            let surface = model.surface.as_ref().unwrap();
            let cone = match &c.item {
                ConeDecl::Hirzebruch(n) => {
                    ConeDescription::hirzebruch(surface, *n).map_err(|e| invariant(c.pos, e.to_string()))?
                }
                ConeDecl::Generators(gens) => {
                    let mut out = Vec::new();
                    for g in gens {
                        let class = class_from_expr(surface.lattice(), &g.item.class).map_err(|e| invariant(g.pos, e))?;
                        let mut generator = Generator::new(g.item.label.clone(), class);
                        for p in &g.item.through {
                            surface.require_point(p).map_err(|e| resolution(g.pos, e.to_string()))?;
                            generator = generator.through(p.clone());
                        }
                        for t in &g.item.contains {
                            surface.require_tangent(t).map_err(|e| resolution(g.pos, e.to_string()))?;
                            generator = generator.containing(t.clone());
                        }
                        if out.iter().any(|o: &Generator| o.label == generator.label) {
                            return Err(resolution(g.pos, format!("generator {} declared twice", g.item.label)));
                        }
                        out.push(generator);
                    }
                    ConeDescription::finite(out).map_err(|e| invariant(c.pos, e.to_string()))?
                }
            };
            model.cone = Some(cone);
        }
        for p in &doc.params {
            let name = &p.item.name;
            if model.is_curve(name) || model.params.iter().any(|q| &q.name == name) {
                return Err(resolution(p.pos, format!("name {name} is already declared")));
            }
            if p.item.lo > p.item.hi {
                return Err(invariant(p.pos, format!("empty range for {name}")));
            }
            model.params.push(Param::new(name.clone(), p.item.lo.clone(), p.item.hi.clone()));
        }
        for d in &doc.divisors {
            let name = &d.item.name;
            if model.is_curve(name) || model.params.iter().any(|q| &q.name == name) || model.divisors.contains_key(name) {
                return Err(resolution(d.pos, format!("name {name} is already declared")));
            }
            let poly = model.affine_poly(&d.item.expr).map_err(|e| resolution(d.pos, e))?;
            model.divisors.insert(name.clone(), poly);
        }
        for q in &doc.queries {
            model.check_query(&q.item).map_err(|e| resolution(q.pos, e))?;
        }
        Ok(model)
    }

    fn is_curve(&self, name: &str) -> bool {
        self.surface.as_ref().is_some_and(|s| s.curve(name).is_some())
    }

    fn param_names(&self) -> Vec<String> {
        self.params.iter().map(|p| p.name.clone()).collect()
    }

    /// Expands divisor names and checks that the result is a sum of curves
    /// with coefficients affine in the parameters.
    fn affine_poly(&self, e: &Expr) -> Result<Poly, String> {
        let poly = e
            .to_poly(&|s| {
                if self.is_curve(s) || self.params.iter().any(|p| p.name == s) {
                    Some(Poly::symbol(s))
                } else {
                    self.divisors.get(s).cloned()
                }
            })
            .map_err(|e| e.to_string())?;
        AffineDivisor::from_poly(&poly, &self.param_names(), &|s| self.is_curve(s)).map_err(|e| e.to_string())?;
        Ok(poly)
    }

    fn affine(&self, e: &Expr) -> Result<AffineDivisor, String> {
        let poly = self.affine_poly(e)?;
        AffineDivisor::from_poly(&poly, &self.param_names(), &|s| self.is_curve(s)).map_err(|e| e.to_string())
    }

    /// A divisor expression that must not involve parameters.
    pub fn divisor(&self, e: &Expr) -> Result<QDivisor, String> {
        let poly = self.affine_poly(e)?;
        AffineDivisor::from_poly(&poly, &[], &|s| self.is_curve(s))
            .map(|a| a.at(&[]))
            .map_err(|_| format!("`{e}` depends on a parameter; only `search` accepts parameter families"))
    }

    /// The family `B + M` over the parameters that occur in either part.
    pub fn family(&self, boundary: &Expr, nef: &Expr) -> Result<ParamFamily, String> {
        let b = self.affine(boundary)?;
        let m = self.affine(nef)?;
        let used: Vec<usize> = (0..self.params.len())
            .filter(|&i| {
                b.terms().chain(m.terms()).any(|(_, a)| !a.coeffs[i].is_zero())
            })
            .collect();
        let restrict = |d: &AffineDivisor| {
            AffineDivisor::new(
                d.terms()
                    .map(|(k, a)| {
                        let mut r = a.clone();
                        r.coeffs = used.iter().map(|&i| a.coeffs[i].clone()).collect();
                        (k.clone(), r)
                    })
                    .collect(),
            )
        };
        let params = used.iter().map(|&i| self.params[i].clone()).collect();
        ParamFamily::new(params, restrict(&b), restrict(&m)).map_err(|e| e.to_string())
    }

    fn check_query(&self, q: &Query) -> Result<(), String> {
        let qs = spec(&q.name).ok_or_else(|| format!("unknown query {}", q.name))?;
        let form = &qs.forms[q.form];
        let surface = || {
            self.surface
                .as_ref()
                .ok_or_else(|| format!("`{}` needs a [surface] section", q.name))
        };
        for (key, arg) in &q.args {
            let ty = form.arg(key).expect("parser keeps form keys").ty;
            match (ty, arg) {
                (ArgType::Point, Arg::Name(p)) => {
                    surface()?.require_point(p).map_err(|e| e.to_string())?;
                }
                (ArgType::Tangent, Arg::Name(t)) => {
                    surface()?.require_tangent(t).map_err(|e| e.to_string())?;
                }
                (ArgType::Curve, Arg::Name(c)) => {
                    surface()?.require_curve(c).map_err(|e| e.to_string())?;
                }
                (ArgType::Divisor, Arg::Expr(e)) => {
                    surface()?;
                    self.divisor(e).map_err(|err| format!("argument {key}: {err}"))?;
                }
                (ArgType::Family, Arg::Expr(e)) => {
                    surface()?;
                    self.affine(e).map_err(|err| format!("argument {key}: {err}"))?;
                }
                (ArgType::Template, Arg::Template(t)) => {
                    for s in t.iter().flat_map(|e| e.symbols()) {
                        if !self.params.iter().any(|p| p.name == s) {
                            return Err(format!("witness mentions {s}, which is not a declared parameter"));
                        }
                    }
                }
                (ArgType::Goal, Arg::Goal(g)) => {
                    let s = surface()?;
                    match g {
                        GoalArg::Free(p) => {
                            s.require_point(p).map_err(|e| e.to_string())?;
                        }
                        GoalArg::Separate(p, r) => {
                            s.require_point(p).map_err(|e| e.to_string())?;
                            s.require_point(r).map_err(|e| e.to_string())?;
                        }
                        GoalArg::Tangent(t) => {
                            s.require_tangent(t).map_err(|e| e.to_string())?;
                        }
                        GoalArg::VeryAmple => {}
                    }
                }
                (ArgType::Mode, Arg::Mode(ModeArg::Critical { curve, .. })) => {
                    surface()?.require_curve(curve).map_err(|e| e.to_string())?;
                }
                _ => {}
            }
        }
        if q.name == "search" {
            let (Some(Arg::Expr(b)), Some(Arg::Expr(m))) = (q.get("boundary"), q.get("nef")) else {
                unreachable!("required by the form");
            };
            self.family(b, m)?;
        }
        Ok(())
    }
}
