//! Nefness, bigness and minimal curve degrees `min M.C` over declared curve
//! families.
//!
//! Two descriptions are supported. A finite generator list is trusted as a
//! complete description of the irreducible curves that matter: the caller is
//! responsible for its correctness, nothing here can check it. The Hirzebruch
//! family uses the classification of irreducible curves on `F_n` (the section
//! `G`, fibers `~ F`, and `aG + bF` with `a >= 1`, `b >= na`), which for a nef
//! class reduces every minimum to the three test classes `G`, `F`, `G + nF`.

use std::collections::BTreeSet;
use std::sync::Arc;

use num_traits::Signed;

use crate::lattice::{DivisorClass, IntersectionLattice, LatticeError};
use crate::rational::{int, Q};
use crate::surface::{PointSpec, SurfaceModel, TangentSpec};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ConeError {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("class is not nef: {0}")]
    NotNef(String),
    #[error("generator list is empty")]
    NoGenerators,
    #[error("no declared curve matches the filter")]
    EmptyFamily,
    #[error("lattice is not the Hirzebruch lattice of F_{0} in a (G, F) basis")]
    NotHirzebruch(u32),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Generator {
    pub label: String,
    pub class: DivisorClass,
    /// Marked points the curve passes through.
    pub through: BTreeSet<String>,
    /// Tangent schemes the curve contains.
    pub contains: BTreeSet<String>,
}

impl Generator {
    pub fn new(label: impl Into<String>, class: DivisorClass) -> Self {
        Self {
            label: label.into(),
            class,
            through: BTreeSet::new(),
            contains: BTreeSet::new(),
        }
    }

    pub fn through(mut self, point: impl Into<String>) -> Self {
        self.through.insert(point.into());
        self
    }

    pub fn containing(mut self, tangent: impl Into<String>) -> Self {
        self.contains.insert(tangent.into());
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HirzebruchFamily {
    n: u32,
    lattice: Arc<IntersectionLattice>,
    /// Declared curve whose class is `G`, used to read point positions.
    section: Option<String>,
    /// Declared curves in the fiber class.
    fibers: Vec<String>,
}

impl HirzebruchFamily {
    pub fn n(&self) -> u32 {
        self.n
    }

    fn g(&self) -> DivisorClass {
        DivisorClass::basis(&self.lattice, 0)
    }

    fn f(&self) -> DivisorClass {
        DivisorClass::basis(&self.lattice, 1)
    }

    fn g_plus_nf(&self) -> DivisorClass {
        DivisorClass::new(&self.lattice, vec![int(1), int(self.n as i64)]).unwrap()
    }

    fn on_section(&self, p: &PointSpec) -> Option<bool> {
        self.section.as_ref().map(|g| p.lies_on(g))
    }

    /// Which of the test classes can carry a curve selected by `filter`.
    fn candidates(&self, filter: &CurveFilter<'_>) -> (bool, bool) {
        match filter {
            CurveFilter::All => (true, true),
            CurveFilter::Through(points) => {
                let g = points.iter().all(|p| self.on_section(p) != Some(false));
                // fibers are disjoint: a point on a declared fiber A and another
                // point off A cannot share a fiber
                let distinct_fibers = self.fibers.iter().any(|a| {
                    points.iter().any(|p| p.lies_on(a)) && points.iter().any(|q| !q.lies_on(a))
                });
                (g, !distinct_fibers)
            }
            CurveFilter::Containing { point, tangent } => {
                let along_section = match &self.section {
                    Some(g) => point.lies_on(g) && tangent.contains_z(g),
                    None => true,
                };
                let g = self.section.is_none() || along_section;
                // a fiber meets G transversally, and the fiber through the point
                // is the declared one when the point lies on it
                let transversal_fiber = self
                    .fibers
                    .iter()
                    .any(|a| point.lies_on(a) && !tangent.contains_z(a));
                let f = !(self.section.is_some() && along_section) && !transversal_fiber;
                (g, f)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConeDescription {
    FiniteGenerators(Vec<Generator>),
    Hirzebruch(HirzebruchFamily),
}

/// Which irreducible curves a minimum ranges over.
#[derive(Debug, Clone, Copy)]
pub enum CurveFilter<'a> {
    All,
    /// Curves passing through every listed point.
    Through(&'a [&'a PointSpec]),
    /// Curves containing the length-2 scheme of a tangent direction.
    Containing {
        point: &'a PointSpec,
        tangent: &'a TangentSpec,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinDegree {
    pub value: Q,
    pub achieved_by: String,
    /// Labels of the test classes the minimum ranged over.
    pub considered: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NefReport {
    pub nef: bool,
    pub tests: Vec<(String, Q)>,
}

impl ConeDescription {
    pub fn finite(generators: Vec<Generator>) -> Result<Self, ConeError> {
        let first = generators.first().ok_or(ConeError::NoGenerators)?;
        if generators.iter().any(|g| !g.class.same_lattice(&first.class)) {
            return Err(LatticeError::Mismatch.into());
        }
        Ok(Self::FiniteGenerators(generators))
    }

    /// The curve family of `F_n` on `surface`, whose lattice must have Gram
    /// matrix `[[-n, 1], [1, 0]]`.
    pub fn hirzebruch(surface: &SurfaceModel, n: u32) -> Result<Self, ConeError> {
        let lattice = surface.lattice();
        let expected = IntersectionLattice::hirzebruch(n);
        if lattice.gram() != expected.gram() {
            return Err(ConeError::NotHirzebruch(n));
        }
        let g = DivisorClass::basis(lattice, 0);
        let f = DivisorClass::basis(lattice, 1);
        let section = surface
            .curves()
            .iter()
            .find(|c| c.class == g)
            .map(|c| c.name.clone());
        let fibers = surface
            .curves()
            .iter()
            .filter(|c| c.class == f)
            .map(|c| c.name.clone())
            .collect();
        Ok(Self::Hirzebruch(HirzebruchFamily {
            n,
            lattice: Arc::clone(lattice),
            section,
            fibers,
        }))
    }

    fn lattice(&self) -> &Arc<IntersectionLattice> {
        match self {
            Self::FiniteGenerators(gens) => gens[0].class.lattice(),
            Self::Hirzebruch(h) => &h.lattice,
        }
    }

    fn check(&self, m: &DivisorClass) -> Result<(), ConeError> {
        if Arc::ptr_eq(m.lattice(), self.lattice()) {
            Ok(())
        } else {
            Err(LatticeError::Mismatch.into())
        }
    }

    /// The intersection numbers that decide nefness.
    pub fn nef_report(&self, m: &DivisorClass) -> Result<NefReport, ConeError> {
        self.check(m)?;
        let tests: Vec<(String, Q)> = match self {
            Self::FiniteGenerators(gens) => gens
                .iter()
                .map(|g| Ok((g.label.clone(), m.intersect(&g.class)?)))
                .collect::<Result<_, LatticeError>>()?,
            Self::Hirzebruch(h) => vec![
                ("G".to_string(), m.intersect(&h.g())?),
                ("F".to_string(), m.intersect(&h.f())?),
            ],
        };
        let nef = tests.iter().all(|(_, v)| !v.is_negative());
        Ok(NefReport { nef, tests })
    }

    pub fn is_nef(&self, m: &DivisorClass) -> Result<bool, ConeError> {
        Ok(self.nef_report(m)?.nef)
    }

    /// Bigness is only certified for nef classes: nef and `M^2 > 0`.
    pub fn is_big(&self, m: &DivisorClass) -> Result<bool, ConeError> {
        Ok(self.is_nef(m)? && m.self_intersection().is_positive())
    }

    pub fn min_degree(&self, m: &DivisorClass, filter: CurveFilter<'_>) -> Result<Q, ConeError> {
        Ok(self.min_degree_detail(m, filter)?.value)
    }

    pub fn min_degree_detail(
        &self,
        m: &DivisorClass,
        filter: CurveFilter<'_>,
    ) -> Result<MinDegree, ConeError> {
        let report = self.nef_report(m)?;
        if !report.nef {
            return Err(ConeError::NotNef(m.to_string()));
        }
        let candidates: Vec<(String, DivisorClass)> = match self {
            Self::FiniteGenerators(gens) => gens
                .iter()
                .filter(|g| match filter {
                    CurveFilter::All => true,
                    CurveFilter::Through(points) => points.iter().all(|p| g.through.contains(&p.name)),
                    CurveFilter::Containing { tangent, .. } => g.contains.contains(&tangent.name),
                })
                .map(|g| (g.label.clone(), g.class.clone()))
                .collect(),
            Self::Hirzebruch(h) => {
                let (use_g, use_f) = h.candidates(&filter);
                let mut v = Vec::new();
                if use_g {
                    v.push(("G".to_string(), h.g()));
                }
                if use_f {
                    v.push(("F".to_string(), h.f()));
                }
                v.push((format!("G+{}F", h.n), h.g_plus_nf()));
                v
            }
        };
        let mut best: Option<(Q, String)> = None;
        for (label, class) in &candidates {
            let d = m.intersect(class)?;
            if best.as_ref().is_none_or(|(b, _)| d < *b) {
                best = Some((d, label.clone()));
            }
        }
        let (value, achieved_by) = best.ok_or(ConeError::EmptyFamily)?;
        Ok(MinDegree {
            value,
            achieved_by,
            considered: candidates.into_iter().map(|(l, _)| l).collect(),
        })
    }
}
