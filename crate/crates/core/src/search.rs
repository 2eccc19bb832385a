//! Searching rational parameters of a decomposition `L = B + M` so that a
//! chosen criterion fires.
//!
//! A [`ParamFamily`] gives `B` and `M` with coefficients affine in a list of
//! parameters, each ranging over an open interval. [`search_params`] walks a
//! nested dyadic schedule: the first parameter takes the values
//! `lo + (hi - lo) 2^-k`, and each later one is refined relative to the
//! previous, so that later parameters are always much smaller than earlier
//! ones. Each candidate is instantiated exactly and checked.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};

use crate::cone::{ConeDescription, ConeError, CurveFilter};
use crate::criteria::{
    freeness_at, separation, tangent_separation, very_ample_global, BetaWitness, CriteriaError, SearchConfig, Verdict,
};
use crate::expr::{Expr, ExprError, Poly};
use crate::lattice::LatticeError;
use crate::rational::{dyadic, Q};
use crate::surface::{QDivisor, SurfaceError, SurfaceModel};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SearchError {
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Surface(#[from] SurfaceError),
    #[error(transparent)]
    Cone(#[from] ConeError),
    #[error(transparent)]
    Criteria(#[from] CriteriaError),
    #[error("coefficient of {0} is not affine in the parameters")]
    NonAffine(String),
    #[error("B + M depends on the parameters (coefficient of {0})")]
    NotIdentity(String),
    #[error("B + M is not integral (coefficient of {0})")]
    NonIntegralTarget(String),
    #[error("duplicate parameter {0}")]
    DuplicateParam(String),
    #[error("witness template: {0}")]
    Template(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Param {
    pub name: String,
    pub lo: Q,
    pub hi: Q,
}

impl Param {
    pub fn new(name: impl Into<String>, lo: Q, hi: Q) -> Self {
        Self {
            name: name.into(),
            lo,
            hi,
        }
    }

    /// A parameter ranging over `(0, 1)`.
    pub fn unit(name: impl Into<String>) -> Self {
        Self::new(name, Q::zero(), Q::one())
    }

    pub fn contains(&self, x: &Q) -> bool {
        self.lo < *x && *x < self.hi
    }
}

/// `constant + sum coeffs[i] * param_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Affine {
    pub constant: Q,
    pub coeffs: Vec<Q>,
}

impl Affine {
    pub fn constant(c: Q, nparams: usize) -> Self {
        Self {
            constant: c,
            coeffs: vec![Q::zero(); nparams],
        }
    }

    pub fn at(&self, values: &[Q]) -> Q {
        self.coeffs
            .iter()
            .zip(values)
            .fold(self.constant.clone(), |acc, (c, v)| acc + c * v)
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    fn add(&self, other: &Self) -> Self {
        Self {
            constant: &self.constant + &other.constant,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
        }
    }
}

/// A divisor over named curves with affine coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct AffineDivisor {
    terms: BTreeMap<String, Affine>,
}

impl AffineDivisor {
    pub fn new(terms: BTreeMap<String, Affine>) -> Self {
        Self { terms }
    }

    /// Reads a polynomial in curve and parameter symbols. Every monomial must
    /// hold exactly one curve and at most one parameter.
    pub fn from_poly(poly: &Poly, params: &[String], is_curve: &dyn Fn(&str) -> bool) -> Result<Self, SearchError> {
        let mut terms: BTreeMap<String, Affine> = BTreeMap::new();
        for (mono, c) in poly.terms() {
            let curves: Vec<&String> = mono.iter().filter(|s| is_curve(s)).collect();
            let ps: Vec<&String> = mono.iter().filter(|s| !is_curve(s)).collect();
            if curves.len() != 1 {
                let what = if mono.is_empty() { "1".to_string() } else { mono.join("*") };
                return Err(SearchError::NonAffine(what));
            }
            let curve = curves[0].clone();
            let entry = terms
                .entry(curve.clone())
                .or_insert_with(|| Affine::constant(Q::zero(), params.len()));
            match ps.as_slice() {
                [] => entry.constant += c,
                [p] => {
                    let i = params
                        .iter()
                        .position(|x| x == *p)
                        .ok_or_else(|| SearchError::Expr(ExprError::UnknownSymbol((*p).clone())))?;
                    entry.coeffs[i] += c;
                }
                _ => return Err(SearchError::NonAffine(curve)),
            }
        }
        Ok(Self { terms })
    }

    pub fn terms(&self) -> impl Iterator<Item = (&String, &Affine)> {
        self.terms.iter()
    }

    pub fn at(&self, values: &[Q]) -> QDivisor {
        QDivisor::from_pairs(self.terms.iter().map(|(k, a)| (k.clone(), a.at(values))))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParamFamily {
    params: Vec<Param>,
    boundary: AffineDivisor,
    nef_part: AffineDivisor,
    target: QDivisor,
}

impl ParamFamily {
    /// Checks that `B + M` is independent of the parameters and integral;
    /// that sum is the target `L`.
    pub fn new(params: Vec<Param>, boundary: AffineDivisor, nef_part: AffineDivisor) -> Result<Self, SearchError> {
        for (i, p) in params.iter().enumerate() {
            if params[..i].iter().any(|q| q.name == p.name) {
                return Err(SearchError::DuplicateParam(p.name.clone()));
            }
        }
        let mut sum: BTreeMap<String, Affine> = boundary.terms.clone();
        for (k, a) in &nef_part.terms {
            let v = match sum.get(k) {
                Some(b) => b.add(a),
                None => a.clone(),
            };
            sum.insert(k.clone(), v);
        }
        let mut target = QDivisor::new();
        for (k, a) in &sum {
            if !a.is_constant() {
                return Err(SearchError::NotIdentity(k.clone()));
            }
            if !a.constant.is_integer() {
                return Err(SearchError::NonIntegralTarget(k.clone()));
            }
            target.add_term(k.clone(), a.constant.clone());
        }
        Ok(Self {
            params,
            boundary,
            nef_part,
            target,
        })
    }

    /// Builds a family from expressions in the surface's curves and the
    /// parameters.
    pub fn from_exprs(surface: &SurfaceModel, params: Vec<Param>, boundary: &Expr, nef_part: &Expr) -> Result<Self, SearchError> {
        let names: Vec<String> = params.iter().map(|p| p.name.clone()).collect();
        let is_curve = |s: &str| surface.curve(s).is_some();
        let lookup = |s: &str| {
            if is_curve(s) || names.iter().any(|n| n == s) {
                Some(Poly::symbol(s))
            } else {
                None
            }
        };
        let b = AffineDivisor::from_poly(&boundary.to_poly(&lookup)?, &names, &is_curve)?;
        let m = AffineDivisor::from_poly(&nef_part.to_poly(&lookup)?, &names, &is_curve)?;
        Self::new(params, b, m)
    }

    pub fn params(&self) -> &[Param] {
        &self.params
    }

    pub fn target(&self) -> &QDivisor {
        &self.target
    }

    pub fn boundary_at(&self, values: &[Q]) -> QDivisor {
        self.boundary.at(values)
    }

    pub fn nef_part_at(&self, values: &[Q]) -> QDivisor {
        self.nef_part.at(values)
    }

    pub fn is_empty_domain(&self) -> bool {
        self.params.iter().any(|p| p.lo >= p.hi)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GoalKind {
    Freeness { point: String },
    Separation { p: String, q: String },
    Tangent { tangent: String },
    VeryAmple,
}

impl GoalKind {
    fn witness_len(&self) -> &'static [usize] {
        match self {
            GoalKind::Freeness { .. } | GoalKind::VeryAmple => &[2],
            GoalKind::Separation { .. } => &[2, 4],
            GoalKind::Tangent { .. } => &[3],
        }
    }

    /// Shapes plain values into the witness this goal expects. A separation
    /// goal given two values uses them for both points.
    pub fn witness_from(&self, v: &[Q]) -> Result<BetaWitness, SearchError> {
        if !self.witness_len().contains(&v.len()) {
            return Err(SearchError::Template(format!(
                "expected {:?} values, got {}",
                self.witness_len(),
                v.len()
            )));
        }
        Ok(match (self, v.len()) {
            (GoalKind::Separation { .. }, 2) => BetaWitness::pair(v[0].clone(), v[1].clone(), v[0].clone(), v[1].clone()),
            (GoalKind::Separation { .. }, _) => BetaWitness::pair(v[0].clone(), v[1].clone(), v[2].clone(), v[3].clone()),
            (GoalKind::Tangent { .. }, _) => BetaWitness::tangent(v[0].clone(), v[1].clone(), v[2].clone()),
            _ => BetaWitness::single(v[0].clone(), v[1].clone()),
        })
    }
}

/// A criterion to establish, optionally with a witness given as expressions
/// in the family parameters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Goal {
    pub kind: GoalKind,
    pub witness: Option<Vec<Expr>>,
}

impl Goal {
    pub fn new(kind: GoalKind) -> Self {
        Self { kind, witness: None }
    }

    pub fn with_witness(mut self, template: Vec<Expr>) -> Self {
        self.witness = Some(template);
        self
    }
}

/// The numbers a goal checker consumed, next to its verdict.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Evaluation {
    pub verdict: Verdict,
    pub data: Vec<(String, Q)>,
}

/// Why a decomposition `B + M` cannot be fed to the criteria, if it cannot.
pub fn decomposition_defect(
    surface: &SurfaceModel,
    cone: &ConeDescription,
    boundary: &QDivisor,
    nef_part: &QDivisor,
    target: Option<&QDivisor>,
) -> Result<Option<String>, SearchError> {
    if boundary.check_boundary().is_err() {
        return Ok(Some("boundary coefficient outside [0, 1)".into()));
    }
    if let Some(t) = target {
        if nef_part.round_up() != *t {
            return Ok(Some("round-up of M differs from L".into()));
        }
    }
    let m = surface.class_of(nef_part)?;
    if !cone.is_nef(&m)? {
        return Ok(Some("M is not nef".into()));
    }
    if !m.self_intersection().is_positive() {
        return Ok(Some("M is not big".into()));
    }
    Ok(None)
}

/// Runs the goal's criterion on a fixed decomposition, reading the
/// multiplicities from `boundary` and the degrees from the cone.
pub fn evaluate_goal(
    surface: &SurfaceModel,
    cone: &ConeDescription,
    boundary: &QDivisor,
    nef_part: &QDivisor,
    kind: &GoalKind,
    witness: Option<&BetaWitness>,
    cfg: &SearchConfig,
) -> Result<Evaluation, SearchError> {
    let m = surface.class_of(nef_part)?;
    let m2 = m.self_intersection();
    let mut data = vec![("M^2".to_string(), m2.clone())];
    let verdict = match kind {
        GoalKind::Freeness { point } => {
            let p = surface.require_point(point)?;
            let mu = surface.ord_at(boundary, point)?;
            let d = cone.min_degree(&m, CurveFilter::Through(&[p]))?;
            data.push((format!("mu_{point}"), mu.clone()));
            data.push((format!("min M.C through {point}"), d.clone()));
            freeness_at(&mu, &m2, &d, witness, cfg)?
        }
        GoalKind::Separation { p, q } => {
            let pp = surface.require_point(p)?;
            let qq = surface.require_point(q)?;
            let mu_p = surface.ord_at(boundary, p)?;
            let mu_q = surface.ord_at(boundary, q)?;
            let dp = cone.min_degree(&m, CurveFilter::Through(&[pp]))?;
            let dq = cone.min_degree(&m, CurveFilter::Through(&[qq]))?;
            let dpq = cone.min_degree(&m, CurveFilter::Through(&[pp, qq]))?;
            data.push((format!("mu_{p}"), mu_p.clone()));
            data.push((format!("mu_{q}"), mu_q.clone()));
            data.push((format!("min M.C through {p}"), dp.clone()));
            data.push((format!("min M.C through {q}"), dq.clone()));
            data.push((format!("min M.C through {p} and {q}"), dpq.clone()));
            separation(&mu_p, &mu_q, &m2, &dp, &dq, &dpq, witness, cfg)?
        }
        GoalKind::Tangent { tangent } => {
            let t = surface.require_tangent(tangent)?;
            let p = surface.require_point(&t.at)?;
            let orders = surface.ord_tangential(boundary, tangent)?;
            let dp = cone.min_degree(&m, CurveFilter::Through(&[p]))?;
            let dz = cone.min_degree(&m, CurveFilter::Containing { point: p, tangent: t })?;
            data.push(("mu_p".to_string(), orders.at_point.clone()));
            data.push(("mu_V".to_string(), orders.at_near_point.clone()));
            data.push(("mu_v".to_string(), orders.along_tangent.clone()));
            data.push((format!("min M.C through {}", t.at), dp.clone()));
            data.push((format!("min M.C containing {tangent}"), dz.clone()));
            tangent_separation(&orders.at_point, &orders.at_near_point, &m2, &dp, &dz, witness, cfg)?
        }
        GoalKind::VeryAmple => {
            let d = cone.min_degree(&m, CurveFilter::All)?;
            data.push(("min M.C".to_string(), d.clone()));
            very_ample_global(&m2, &d, witness, cfg)?
        }
    };
    Ok(Evaluation { verdict, data })
}

/// Nested dyadic schedule: the first parameter starts at level
/// `first_level`, every level runs up to `depth`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Schedule {
    pub first_level: u32,
    pub depth: u32,
}

impl Default for Schedule {
    fn default() -> Self {
        Self {
            first_level: 1,
            depth: 24,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchReport {
    pub found: bool,
    pub params: Vec<(String, Q)>,
    /// Verdict at the reported parameters, or at the last candidate checked.
    pub verdict: Option<Verdict>,
    pub data: Vec<(String, Q)>,
    pub attempts: usize,
    pub notes: Vec<String>,
}

/// Visits candidate parameter vectors in schedule order until `visit`
/// returns true.
fn walk(params: &[Param], schedule: &Schedule, visit: &mut dyn FnMut(&[Q]) -> bool) {
    fn rec(params: &[Param], schedule: &Schedule, shift: u32, values: &mut Vec<Q>, visit: &mut dyn FnMut(&[Q]) -> bool) -> bool {
        let i = values.len();
        if i == params.len() {
            return visit(values);
        }
        let p = &params[i];
        let start = if i == 0 { schedule.first_level.max(1) } else { 1 };
        for k in start..=schedule.depth {
            values.push(&p.lo + (&p.hi - &p.lo) * dyadic(shift + k));
            let stop = rec(params, schedule, shift + k, values, visit);
            values.pop();
            if stop {
                return true;
            }
        }
        false
    }
    rec(params, schedule, 0, &mut Vec::new(), visit);
}

fn eval_template(template: &[Expr], names: &[String], values: &[Q]) -> Result<Vec<Q>, ExprError> {
    let lookup = |s: &str| names.iter().position(|n| n == s).map(|i| values[i].clone());
    template.iter().map(|e| e.eval(&lookup)).collect()
}

/// Walks the schedule and returns the first candidate at which the goal is
/// established.
pub fn search_params(
    surface: &SurfaceModel,
    cone: &ConeDescription,
    family: &ParamFamily,
    goal: &Goal,
    schedule: &Schedule,
    cfg: &SearchConfig,
) -> Result<SearchReport, SearchError> {
    let names: Vec<String> = family.params.iter().map(|p| p.name.clone()).collect();
    if let Some(t) = &goal.witness {
        goal.kind.witness_from(&vec![Q::zero(); t.len()])?;
        for s in t.iter().flat_map(|e| e.symbols()) {
            if !names.contains(&s) {
                return Err(SearchError::Template(format!("unknown parameter {s}")));
            }
        }
    }
    let mut report = SearchReport {
        found: false,
        params: Vec::new(),
        verdict: None,
        data: Vec::new(),
        attempts: 0,
        notes: Vec::new(),
    };
    if family.is_empty_domain() {
        report.notes.push("empty parameter domain".into());
        return Ok(report);
    }
    let mut skipped: BTreeMap<String, usize> = BTreeMap::new();
    let mut failure: Option<SearchError> = None;
    walk(&family.params, schedule, &mut |values| {
        report.attempts += 1;
        let mut step = || -> Result<Option<Evaluation>, SearchError> {
            let b = family.boundary_at(values);
            let m = family.nef_part_at(values);
            if let Some(why) = decomposition_defect(surface, cone, &b, &m, Some(&family.target))? {
                *skipped.entry(why).or_default() += 1;
                return Ok(None);
            }
            let witness = match &goal.witness {
                Some(t) => match eval_template(t, &names, values) {
                    Ok(v) => Some(goal.kind.witness_from(&v)?),
                    Err(e) => {
                        *skipped.entry(format!("witness template: {e}")).or_default() += 1;
                        return Ok(None);
                    }
                },
                None => None,
            };
            Ok(Some(evaluate_goal(surface, cone, &b, &m, &goal.kind, witness.as_ref(), cfg)?))
        };
        match step() {
            Ok(Some(ev)) => {
                let done = ev.verdict.established();
                report.verdict = Some(ev.verdict);
                report.data = ev.data;
                if done {
                    report.found = true;
                    report.params = names.iter().cloned().zip(values.iter().cloned()).collect();
                }
                done
            }
            Ok(None) => false,
            Err(e) => {
                failure = Some(e);
                true
            }
        }
    });
    if let Some(e) = failure {
        return Err(e);
    }
    for (why, count) in skipped {
        report.notes.push(format!("{count} candidate(s) skipped: {why}"));
    }
    Ok(report)
}

/// Re-runs the goal at explicit parameter values.
pub fn replay(
    surface: &SurfaceModel,
    cone: &ConeDescription,
    family: &ParamFamily,
    goal: &Goal,
    values: &[Q],
    cfg: &SearchConfig,
) -> Result<Evaluation, SearchError> {
    let names: Vec<String> = family.params.iter().map(|p| p.name.clone()).collect();
    let witness = match &goal.witness {
        Some(t) => Some(goal.kind.witness_from(&eval_template(t, &names, values)?)?),
        None => None,
    };
    let b = family.boundary_at(values);
    let m = family.nef_part_at(values);
    evaluate_goal(surface, cone, &b, &m, &goal.kind, witness.as_ref(), cfg)
}
