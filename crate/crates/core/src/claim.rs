//! End-to-end check that `|G + mF|` on the Hirzebruch surface `F_n` is
//! base-point-free for `m = n` and very ample for `m >= n + 1`, although
//! `L = H_m - K` is not nef once `n` is large. Every statement is reduced to
//! a decomposition `L = B + M` with a small boundary along `G` (and along a
//! fibre where needed) and then to the numerical criteria.
//!
//! Marked points: `p0 = F ∩ G`, `x` and `y` on `F` off `G`, `g1` on `G` off
//! `F`, and `z`, `z2` off `G` on two further fibres `F1`, `F2`.

use crate::cone::{ConeDescription, NefReport};
use crate::criteria::{riemann_roch_chi, Rel, SearchConfig, Trace, TraceEntry};
use crate::expr::Expr;
use crate::lattice::DivisorClass;
use crate::rational::{int, Q};
use crate::search::{search_params, Goal, GoalKind, Param, ParamFamily, Schedule, SearchError, SearchReport};
use crate::surface::{PointSpec, SurfaceModel, TangentSpec};

/// The boundary starts at `e = 1/4`.
pub const CLAIM_FIRST_LEVEL: u32 = 2;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ClaimError {
    #[error("invalid input: {0}")]
    Input(String),
    #[error(transparent)]
    Search(#[from] SearchError),
}

impl From<crate::lattice::LatticeError> for ClaimError {
    fn from(e: crate::lattice::LatticeError) -> Self {
        Self::Search(e.into())
    }
}

impl From<crate::cone::ConeError> for ClaimError {
    fn from(e: crate::cone::ConeError) -> Self {
        Self::Search(e.into())
    }
}

impl From<crate::surface::SurfaceError> for ClaimError {
    fn from(e: crate::surface::SurfaceError) -> Self {
        Self::Search(e.into())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Part {
    /// `|H_n|` is base-point-free and separates points and tangents off `G`.
    Free,
    /// `|H_m|` is very ample for `m >= n + 1`.
    VeryAmple,
}

/// Which decomposition of `L` a step uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decomposition {
    /// `B = (1 - e)G`.
    Section,
    /// `B = (1 - e)G + (1 - a)F`.
    SectionAndFibre,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClaimStep {
    pub label: String,
    pub decomposition: Decomposition,
    pub boundary: Expr,
    pub nef_part: Expr,
    pub goal: Goal,
    pub report: SearchReport,
    /// Closed forms for `M.F`, `M.G` and `M^2` at the parameters found.
    pub facts: Vec<TraceEntry>,
}

impl ClaimStep {
    pub fn success(&self) -> bool {
        self.report.found && self.facts.iter().all(|f| f.holds)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClaimReport {
    pub n: u32,
    pub m: u32,
    pub part: Part,
    /// `L = H_m - K` as a class.
    pub target: DivisorClass,
    pub target_nef: NefReport,
    pub facts: Vec<TraceEntry>,
    pub steps: Vec<ClaimStep>,
}

impl ClaimReport {
    pub fn success(&self) -> bool {
        self.facts.iter().all(|f| f.holds) && self.steps.iter().all(ClaimStep::success)
    }

    pub fn step(&self, label: &str) -> Option<&ClaimStep> {
        self.steps.iter().find(|s| s.label == label)
    }
}

/// `F_n` with the marked points and tangent directions used by the claim.
pub fn claim_surface(n: u32) -> Result<(SurfaceModel, ConeDescription), ClaimError> {
    if n == 0 {
        return Err(ClaimError::Input("n must be >= 1".into()));
    }
    let build = || -> Result<(SurfaceModel, ConeDescription), SearchError> {
        let mut s = SurfaceModel::hirzebruch(n);
        let f = s.require_curve("F")?.class.clone();
        s.add_curve("F1", f.clone())?;
        s.add_curve("F2", f)?;
        s.add_point(PointSpec::new("p0").with("G", 1).with("F", 1))?;
        s.add_point(PointSpec::new("x").with("F", 1))?;
        s.add_point(PointSpec::new("y").with("F", 1))?;
        s.add_point(PointSpec::new("g1").with("G", 1))?;
        s.add_point(PointSpec::new("z").with("F1", 1))?;
        s.add_point(PointSpec::new("z2").with("F2", 1))?;
        s.add_tangent(TangentSpec::new("p0_along_G", "p0").with_near("G", 1).containing("G"))?;
        s.add_tangent(TangentSpec::new("p0_along_F", "p0").with_near("F", 1).containing("F"))?;
        s.add_tangent(TangentSpec::new("x_along_F", "x").with_near("F", 1).containing("F"))?;
        s.add_tangent(TangentSpec::new("x_transversal", "x"))?;
        let cone = ConeDescription::hirzebruch(&s, n)?;
        Ok((s, cone))
    };
    Ok(build()?)
}

fn parse(s: &str) -> Expr {
    Expr::parse(s).expect("well-formed claim expression")
}

fn point(p: &str) -> GoalKind {
    GoalKind::Freeness { point: p.into() }
}

fn pair(p: &str, q: &str) -> GoalKind {
    GoalKind::Separation {
        p: p.into(),
        q: q.into(),
    }
}

fn tangent(t: &str) -> GoalKind {
    GoalKind::Tangent { tangent: t.into() }
}

/// Runs the claim for `F_n`. `m` defaults to `n` for [`Part::Free`] and to
/// `n + 1` for [`Part::VeryAmple`].
pub fn hirzebruch_claim(n: u32, part: Part, m: Option<u32>, cfg: &SearchConfig) -> Result<ClaimReport, ClaimError> {
    let m = match (part, m) {
        (Part::Free, None) => n,
        (Part::Free, Some(m)) if m == n => n,
        (Part::Free, Some(m)) => return Err(ClaimError::Input(format!("part 1 concerns m = n, got m = {m}"))),
        (Part::VeryAmple, None) => n + 1,
        (Part::VeryAmple, Some(m)) if m > n => m,
        (Part::VeryAmple, Some(m)) => {
            return Err(ClaimError::Input(format!("part 2 needs m >= n + 1, got m = {m}")))
        }
    };
    let (surface, cone) = claim_surface(n)?;
    let lat = surface.lattice().clone();
    let class = |a: i64, b: i64| DivisorClass::new(&lat, vec![int(a), int(b)]).expect("rank 2");
    let (ni, mi) = (n as i64, m as i64);
    let g = class(1, 0);
    let f = class(0, 1);
    let h = class(1, mi);
    let target = h.sub(surface.canonical())?;
    let target_nef = cone.nef_report(&target)?;

    let mut facts = Trace::new();
    let chi = riemann_roch_chi(&h, surface.canonical(), surface.chi_structure_sheaf())?;
    let inter = |a: &DivisorClass, b: &DivisorClass| a.intersect(b).expect("same lattice");
    if part == Part::Free {
        facts.check("chi(H_n) = n + 2", chi, Rel::Eq, int(ni + 2));
        facts.check("H_n.G = 0", inter(&h, &g), Rel::Eq, int(0));
        facts.check("H_n.F = 1", inter(&h, &f), Rel::Eq, int(1));
        facts.check("L.G = 2 - n", inter(&target, &g), Rel::Eq, int(2 - ni));
    } else {
        facts.check("chi(H_m) = 2m - n + 2", chi, Rel::Eq, int(2 * mi - ni + 2));
        facts.check("H_m.G = m - n", inter(&h, &g), Rel::Eq, int(mi - ni));
        facts.check("H_m.F = 1", inter(&h, &f), Rel::Eq, int(1));
        facts.check("L.G = m + 2 - 2n", inter(&target, &g), Rel::Eq, int(mi + 2 - 2 * ni));
    }

    let free_witness = || vec![parse("3"), parse("3/2")];
    let fibre_pair_witness = || vec![parse("3/2"), parse("1 + e/2")];
    let mut plan: Vec<(&str, Decomposition, GoalKind, Option<Vec<Expr>>)> = vec![
        ("free at x", Decomposition::Section, point("x"), Some(free_witness())),
        ("free at p0", Decomposition::Section, point("p0"), Some(free_witness())),
        ("separate x, y", Decomposition::SectionAndFibre, pair("x", "y"), Some(fibre_pair_witness())),
        ("separate x, z", Decomposition::Section, pair("x", "z"), None),
        ("tangent at x along F", Decomposition::SectionAndFibre, tangent("x_along_F"), None),
        ("tangent at x transversal", Decomposition::Section, tangent("x_transversal"), None),
    ];
    if part == Part::VeryAmple {
        plan.extend([
            ("separate p0, x", Decomposition::SectionAndFibre, pair("p0", "x"), None),
            ("separate p0, g1", Decomposition::Section, pair("p0", "g1"), None),
            ("separate p0, z", Decomposition::Section, pair("p0", "z"), None),
            ("separate z, z2", Decomposition::Section, pair("z", "z2"), None),
            (
                "tangent at p0 along G",
                Decomposition::Section,
                tangent("p0_along_G"),
                Some(vec![parse("2"), parse("2"), parse("2/(2 - e)")]),
            ),
            ("tangent at p0 along F", Decomposition::SectionAndFibre, tangent("p0_along_F"), None),
        ]);
    }

    let schedule = Schedule {
        first_level: CLAIM_FIRST_LEVEL,
        depth: cfg.depth,
    };
    let mut steps = Vec::new();
    for (label, decomposition, kind, witness) in plan {
        let (boundary, nef_part, params) = match decomposition {
            Decomposition::Section => (
                parse("(1 - e)G"),
                parse(&format!("(2 + e)G + {}F", mi + ni + 2)),
                vec![Param::unit("e")],
            ),
            Decomposition::SectionAndFibre => (
                parse("(1 - e)G + (1 - a)F"),
                parse(&format!("(2 + e)G + ({} + a)F", mi + ni + 1)),
                vec![Param::unit("e"), Param::unit("a")],
            ),
        };
        let family = ParamFamily::from_exprs(&surface, params, &boundary, &nef_part)?;
        let mut goal = Goal::new(kind);
        goal.witness = witness;
        let report = search_params(&surface, &cone, &family, &goal, &schedule, cfg)?;
        let facts = if report.found {
            let values: Vec<Q> = report.params.iter().map(|(_, v)| v.clone()).collect();
            let mclass = surface
                .class_of(&family.nef_part_at(&values))
                ?;
            closed_forms(decomposition, ni, mi, &values, &mclass, &g, &f)
        } else {
            Vec::new()
        };
        steps.push(ClaimStep {
            label: label.to_string(),
            decomposition,
            boundary,
            nef_part,
            goal,
            report,
            facts,
        });
    }
    Ok(ClaimReport {
        n,
        m,
        part,
        target,
        target_nef,
        facts: facts.into_entries(),
        steps,
    })
}

fn closed_forms(
    decomposition: Decomposition,
    n: i64,
    m: i64,
    values: &[Q],
    mclass: &DivisorClass,
    g: &DivisorClass,
    f: &DivisorClass,
) -> Vec<TraceEntry> {
    let e = &values[0];
    let en = e * int(n);
    let mut t = Trace::new();
    let mf = mclass.intersect(f).expect("same lattice");
    let mg = mclass.intersect(g).expect("same lattice");
    let m2 = mclass.self_intersection();
    t.check("M.F = 2 + e", mf, Rel::Eq, int(2) + e);
    match decomposition {
        Decomposition::Section => {
            t.check("M.G = m + 2 - n - e n", mg, Rel::Eq, int(m + 2 - n) - &en);
            t.check("M^2 = (2 + e)(2m + 4 - e n)", m2, Rel::Eq, (int(2) + e) * (int(2 * m + 4) - &en));
        }
        Decomposition::SectionAndFibre => {
            let a = &values[1];
            t.check("M.G = m + 1 + a - n - e n", mg, Rel::Eq, int(m + 1 - n) + a - &en);
            t.check(
                "M^2 = (2 + e)(2m + 2 + 2a - e n)",
                m2,
                Rel::Eq,
                (int(2) + e) * (int(2 * m + 2) + int(2) * a - &en),
            );
        }
    }
    t.into_entries()
}
