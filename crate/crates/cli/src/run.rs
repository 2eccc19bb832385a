//! Executes the queries of a resolved document.

use std::time::Instant;

use num_traits::Zero;

use qreider::claim::{hirzebruch_claim, Part};
use qreider::cone::{ConeDescription, CurveFilter};
use qreider::criteria::{
    very_ample_sqrt2_bound, curve_adjoint_check, freeness_at, jet_separation, plc_threshold, riemann_roch_chi, separation,
    tangent_separation, very_ample_global, BetaWitness, CurveAdjoint, LocalConfig, LocalCurve, PlcMode, PlcOutcome, Rel,
    SearchConfig, ThresholdTerm, Trace,
};
use qreider::expr::Expr;
use qreider::rational::{int, Q};
use qreider::search::{decomposition_defect, evaluate_goal, search_params, Goal, GoalKind, Schedule};
use qreider::surface::{QDivisor, SurfaceModel};

use crate::document::{Document, Query};
use crate::model::Model;
use crate::parse::ParseError;
use crate::queries::{Arg, GoalArg, ModeArg};
use crate::report::{Report, Status};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Options {
    pub depth: u32,
}

impl Default for Options {
    fn default() -> Self {
        Self {
            depth: SearchConfig::default().depth,
        }
    }
}

/// Runs every query in document order. Failures of single queries are
/// embedded in their reports.
pub fn run(doc: &Document, opts: &Options) -> Result<Vec<Report>, ParseError> {
    let model = Model::resolve(doc)?;
    let mut out = Vec::new();
    for q in &doc.queries {
        let start = Instant::now();
        let text = q.item.to_string();
        let mut report = Runner { model: &model, q: &q.item, opts }
            .run()
            .unwrap_or_else(|e| Report::error(text.clone(), e));
        report.query = text;
        report.line = Some(q.pos.line);
        report.elapsed_ms = start.elapsed().as_secs_f64() * 1000.0;
        out.push(report);
    }
    Ok(out)
}

type Res<T> = Result<T, String>;

fn err<E: ToString>(e: E) -> String {
    e.to_string()
}

struct Runner<'a> {
    model: &'a Model,
    q: &'a Query,
    opts: &'a Options,
}

impl<'a> Runner<'a> {
    fn cfg(&self) -> SearchConfig {
        SearchConfig { depth: self.opts.depth }
    }

    fn surface(&self) -> Res<&'a SurfaceModel> {
        self.model.surface.as_ref().ok_or_else(|| "no surface declared".to_string())
    }

    fn cone(&self) -> Res<&'a ConeDescription> {
        self.model
            .cone
            .as_ref()
            .ok_or_else(|| format!("`{}` needs a [cone] section", self.q.name))
    }

    fn arg(&self, key: &str) -> &'a Arg {
        self.q.get(key).unwrap_or_else(|| panic!("argument {key} is required by the form"))
    }

    fn expr(&self, key: &str) -> &'a Expr {
        match self.arg(key) {
            Arg::Expr(e) => e,
            other => panic!("argument {key} is not an expression: {other:?}"),
        }
    }

    fn name(&self, key: &str) -> &'a str {
        match self.arg(key) {
            Arg::Name(s) => s,
            other => panic!("argument {key} is not a name: {other:?}"),
        }
    }

    fn number(&self, key: &str) -> &'a Q {
        match self.arg(key) {
            Arg::Number(x) => x,
            other => panic!("argument {key} is not a number: {other:?}"),
        }
    }

    fn count(&self, key: &str) -> Option<u32> {
        match self.q.get(key) {
            Some(Arg::Count(k)) => Some(*k),
            _ => None,
        }
    }

    fn divisor(&self, key: &str) -> Res<QDivisor> {
        self.model.divisor(self.expr(key))
    }

    fn witness(&self, kind: &GoalKind) -> Res<Option<BetaWitness>> {
        match self.q.get("witness") {
            Some(Arg::Values(v)) => kind.witness_from(v).map(Some).map_err(err),
            _ => Ok(None),
        }
    }

    /// Boundary and nef part, after checking they form a usable pair.
    fn decomposition(&self, boundary: Option<&str>) -> Res<(QDivisor, QDivisor)> {
        let b = match boundary {
            Some(k) => self.divisor(k)?,
            None => QDivisor::new(),
        };
        let m = self.divisor("nef")?;
        if let Some(why) = decomposition_defect(self.surface()?, self.cone()?, &b, &m, None).map_err(err)? {
            return Err(format!("criteria do not apply: {why}"));
        }
        Ok((b, m))
    }

    fn goal(&self, kind: GoalKind, boundary: Option<&str>) -> Res<Report> {
        let (b, m) = self.decomposition(boundary)?;
        let w = self.witness(&kind)?;
        let ev = evaluate_goal(self.surface()?, self.cone()?, &b, &m, &kind, w.as_ref(), &self.cfg()).map_err(err)?;
        let mut r = Report::from_verdict("", &ev.verdict);
        r.values = ev.data;
        Ok(r)
    }

    fn run(&self) -> Res<Report> {
        let q = self.q;
        let numeric = q.form == 1;
        let cfg = self.cfg();
        match q.name.as_str() {
            "chi" => {
                let s = self.surface()?;
                let h = s.class_of(&self.divisor("divisor")?).map_err(err)?;
                let chi = riemann_roch_chi(&h, s.canonical(), s.chi_structure_sheaf()).map_err(err)?;
                let mut r = Report::new("", Status::Value);
                let d = self.arg("divisor");
                r.value(format!("chi({d})"), chi)
                    .value(format!("({d})^2"), h.self_intersection())
                    .value(format!("({d}).K"), h.intersect(s.canonical()).map_err(err)?);
                Ok(r)
            }
            "intersect" => {
                let s = self.surface()?;
                let a = s.class_of(&self.divisor("a")?).map_err(err)?;
                let b = s.class_of(&self.divisor("b")?).map_err(err)?;
                let mut r = Report::new("", Status::Value);
                r.value(format!("({}).({})", self.arg("a"), self.arg("b")), a.intersect(&b).map_err(err)?);
                Ok(r)
            }
            "check-nef" => {
                let s = self.surface()?;
                let d = s.class_of(&self.divisor("divisor")?).map_err(err)?;
                let nef = self.cone()?.nef_report(&d).map_err(err)?;
                let label = self.arg("divisor").to_string();
                let mut t = Trace::new();
                for (c, v) in &nef.tests {
                    t.check(format!("{label}.{c} >= 0"), v.clone(), Rel::Ge, Q::zero());
                }
                let mut r = Report::new("", Status::from_bool(nef.nef));
                r.rule = Some("cone.nef".into());
                r.trace = t.into_entries();
                for (c, v) in &nef.tests {
                    r.value(format!("{label}.{c}"), v.clone());
                }
                r.value(format!("{label}^2"), d.self_intersection());
                Ok(r)
            }
            "check-free" if numeric => {
                let w = self.witness(&GoalKind::Freeness { point: String::new() })?;
                let v = freeness_at(self.number("mu"), self.number("m2"), self.number("deg"), w.as_ref(), &cfg)
                    .map_err(err)?;
                Ok(Report::from_verdict("", &v))
            }
            "check-free" => self.goal(GoalKind::Freeness { point: self.name("point").into() }, Some("boundary")),
            "check-separate" if numeric => {
                let kind = GoalKind::Separation {
                    p: String::new(),
                    q: String::new(),
                };
                let w = self.witness(&kind)?;
                let v = separation(
                    self.number("mu_p"),
                    self.number("mu_q"),
                    self.number("m2"),
                    self.number("deg_p"),
                    self.number("deg_q"),
                    self.number("deg_pq"),
                    w.as_ref(),
                    &cfg,
                )
                .map_err(err)?;
                Ok(Report::from_verdict("", &v))
            }
            "check-separate" => self.goal(
                GoalKind::Separation {
                    p: self.name("p").into(),
                    q: self.name("q").into(),
                },
                Some("boundary"),
            ),
            "check-tangent" if numeric => {
                let w = self.witness(&GoalKind::Tangent { tangent: String::new() })?;
                let v = tangent_separation(
                    self.number("mu_p"),
                    self.number("mu_near"),
                    self.number("m2"),
                    self.number("deg_p"),
                    self.number("deg_z"),
                    w.as_ref(),
                    &cfg,
                )
                .map_err(err)?;
                Ok(Report::from_verdict("", &v))
            }
            "check-tangent" => self.goal(GoalKind::Tangent { tangent: self.name("tangent").into() }, Some("boundary")),
            "check-very-ample" if numeric => {
                let w = self.witness(&GoalKind::VeryAmple)?;
                let v = very_ample_global(self.number("m2"), self.number("deg"), w.as_ref(), &cfg).map_err(err)?;
                Ok(Report::from_verdict("", &v))
            }
            "check-very-ample" => self.goal(GoalKind::VeryAmple, None),
            "check-very-ample-bound" => {
                let (m2, deg, mut values) = if numeric {
                    (self.number("m2").clone(), self.number("deg").clone(), Vec::new())
                } else {
                    let (_, m) = self.decomposition(None)?;
                    let class = self.surface()?.class_of(&m).map_err(err)?;
                    let deg = self.cone()?.min_degree(&class, CurveFilter::All).map_err(err)?;
                    let m2 = class.self_intersection();
                    let values = vec![("M^2".to_string(), m2.clone()), ("min M.C".to_string(), deg.clone())];
                    (m2, deg, values)
                };
                let mut r = Report::from_verdict("", &very_ample_sqrt2_bound(&m2, &deg));
                r.values.append(&mut values);
                Ok(r)
            }
            "check-jets" => {
                let s = self.count("s").expect("required");
                let mu = if numeric {
                    self.number("mu").clone()
                } else {
                    let b = self.divisor("boundary")?;
                    b.check_boundary().map_err(err)?;
                    self.surface()?.ord_at(&b, self.name("point")).map_err(err)?
                };
                let mut r = Report::from_verdict("", &jet_separation(&mu, s).map_err(err)?);
                r.value("mu", mu);
                Ok(r)
            }
            "curve-adjoint" => {
                let degree = if numeric {
                    self.number("degree").clone()
                } else {
                    let s = self.surface()?;
                    let d = s.class_of(&self.divisor("divisor")?).map_err(err)?;
                    let c = &s.require_curve(self.name("curve")).map_err(err)?.class;
                    d.intersect(c).map_err(err)?
                };
                let mut t = Trace::new();
                t.check("deg D >= 2", degree.clone(), Rel::Ge, int(2));
                t.check("deg D >= 3", degree.clone(), Rel::Ge, int(3));
                let mut r = Report::new("", Status::Value);
                r.rule = Some("curve.adjoint".into());
                r.trace = t.into_entries();
                r.value("deg D", degree.clone());
                r.notes.push(
                    match curve_adjoint_check(&degree) {
                        CurveAdjoint::VeryAmple => "|K_C + D| is very ample",
                        CurveAdjoint::BasePointFree => "|K_C + D| is base-point-free",
                        CurveAdjoint::None => "no conclusion from the degree",
                    }
                    .into(),
                );
                Ok(r)
            }
            "plc-threshold" => self.plc(),
            "search" => self.search(),
            "hirzebruch-claim" => {
                let part = match self.count("part") {
                    Some(1) => Part::Free,
                    Some(2) => Part::VeryAmple,
                    other => return Err(format!("part must be 1 or 2, got {other:?}")),
                };
                claim_report(self.count("n").expect("required"), part, self.count("m"), &cfg)
            }
            other => Err(format!("query {other} is not implemented")),
        }
    }

    fn plc(&self) -> Res<Report> {
        let s = self.surface()?;
        let point = s.require_point(self.name("point")).map_err(err)?;
        let b = self.divisor("boundary")?;
        let d = self.divisor("aux")?;
        let tangent = match self.q.get("tangent") {
            Some(Arg::Name(t)) => {
                let t = s.require_tangent(t).map_err(err)?;
                if t.at != point.name {
                    return Err(format!("tangent {} is not at {}", t.name, point.name));
                }
                Some(t)
            }
            _ => None,
        };
        let mut curves = Vec::new();
        for c in s.curves() {
            let mult = point.mult(&c.name);
            if mult == 0 {
                continue;
            }
            let mut lc = LocalCurve::new(c.name.clone(), b.coeff(&c.name), d.coeff(&c.name), mult);
            if let Some(t) = tangent {
                lc = lc.with_near(t.near_mult(&c.name), t.contains_z(&c.name));
            }
            curves.push(lc);
        }
        let names: Vec<String> = curves.iter().map(|c| c.name.clone()).collect();
        let mode = match self.q.get("mode") {
            None | Some(Arg::Mode(ModeArg::Basic)) => PlcMode::Basic,
            Some(Arg::Mode(ModeArg::CapThree)) => PlcMode::CapThree,
            Some(Arg::Mode(ModeArg::Critical { curve, inclusive })) => PlcMode::Critical {
                index: names
                    .iter()
                    .position(|n| n == curve)
                    .ok_or_else(|| format!("curve {curve} does not pass through {}", point.name))?,
                inclusive: *inclusive,
            },
            Some(other) => panic!("mode argument has the wrong type: {other:?}"),
        };
        let config = LocalConfig::new(curves).map_err(err)?;
        let res = plc_threshold(&config, mode).map_err(err)?;
        let mut r = Report::new("", Status::Value);
        r.rule = Some("plc.threshold".into());
        r.value("mu_p", config.mu()).value("m_p", config.m_p());
        if tangent.is_some() {
            r.value("mu_V", config.mu_near());
        }
        match &res.outcome {
            PlcOutcome::Plc => r.status = Status::Plc,
            PlcOutcome::Threshold { c, achievers, critical } => {
                r.value("c", c.clone());
                let term = |t: &ThresholdTerm| match t {
                    ThresholdTerm::One => "1".to_string(),
                    ThresholdTerm::MultiplicityCap => "(3 - mu_p)/m_p".to_string(),
                    ThresholdTerm::Curve(i) => names[*i].clone(),
                    ThresholdTerm::CriticalDoubled(i) => format!("(2 - b)/d along {}", names[*i]),
                };
                r.notes.push(format!(
                    "attained by: {}",
                    achievers.iter().map(term).collect::<Vec<_>>().join(", ")
                ));
                if let Some(i) = critical {
                    r.notes.push(format!("critical curve: {}", names[*i]));
                }
            }
        }
        r.notes.extend(res.warnings.iter().cloned());
        Ok(r)
    }

    fn search(&self) -> Res<Report> {
        let family = self.model.family(self.expr("boundary"), self.expr("nef"))?;
        let kind = match self.arg("goal") {
            Arg::Goal(GoalArg::Free(p)) => GoalKind::Freeness { point: p.clone() },
            Arg::Goal(GoalArg::Separate(p, q)) => GoalKind::Separation {
                p: p.clone(),
                q: q.clone(),
            },
            Arg::Goal(GoalArg::Tangent(t)) => GoalKind::Tangent { tangent: t.clone() },
            Arg::Goal(GoalArg::VeryAmple) => GoalKind::VeryAmple,
            other => panic!("goal argument has the wrong type: {other:?}"),
        };
        let mut goal = Goal::new(kind);
        if let Some(Arg::Template(t)) = self.q.get("witness") {
            goal = goal.with_witness(t.clone());
        }
        let schedule = Schedule {
            first_level: self.count("first-level").unwrap_or(Schedule::default().first_level),
            depth: self.opts.depth,
        };
        let rep = search_params(self.surface()?, self.cone()?, &family, &goal, &schedule, &self.cfg()).map_err(err)?;
        let mut r = match &rep.verdict {
            Some(v) => Report::from_verdict("", v),
            None => Report::new("", Status::NotEstablished),
        };
        r.status = Status::from_bool(rep.found);
        r.values = rep.params.clone();
        r.values.extend(rep.data.iter().cloned());
        r.value("attempts", Q::from_integer((rep.attempts as u64).into()));
        r.notes.extend(rep.notes.iter().cloned());
        Ok(r)
    }
}

/// The full report of the Hirzebruch claim, one step per criterion used.
pub fn claim_report(n: u32, part: Part, m: Option<u32>, cfg: &SearchConfig) -> Res<Report> {
    let start = Instant::now();
    let c = hirzebruch_claim(n, part, m, cfg).map_err(err)?;
    let part_no = match part {
        Part::Free => 1,
        Part::VeryAmple => 2,
    };
    let mut r = Report::new(
        format!("hirzebruch-claim n={} part={} m={}", c.n, part_no, c.m),
        Status::from_bool(c.success()),
    );
    r.rule = Some("hirzebruch.claim".into());
    r.trace = c.facts.clone();
    r.value("n", Q::from_integer(c.n.into())).value("m", Q::from_integer(c.m.into()));
    for (label, v) in &c.target_nef.tests {
        r.value(format!("L.{label}"), v.clone());
    }
    let coeffs = c.target.coeffs();
    let l = format!("{}G + {}F", coeffs[0], coeffs[1]);
    r.notes.push(if c.target_nef.nef {
        format!("L = H_m - K = {l} is nef")
    } else {
        format!("L = H_m - K = {l} is not nef")
    });
    for step in &c.steps {
        let rep = &step.report;
        let mut s = match &rep.verdict {
            Some(v) => Report::from_verdict(step.label.clone(), v),
            None => Report::new(step.label.clone(), Status::NotEstablished),
        };
        s.status = Status::from_bool(step.success());
        s.trace.extend(step.facts.iter().cloned());
        s.values = rep.params.clone();
        s.values.extend(rep.data.iter().cloned());
        s.notes.insert(0, format!("B = {}, M = {}", step.boundary, step.nef_part));
        s.notes.extend(rep.notes.iter().cloned());
        r.steps.push(s);
    }
    r.elapsed_ms = start.elapsed().as_secs_f64() * 1000.0;
    Ok(r)
}
