//! Surface models: named curves with classes, marked points with declared
//! local multiplicities, and Q-divisor coefficient calculus.
//!
//! Local data is declared, never computed: a [`PointSpec`] records
//! `mult_p(C)` for each curve through `p`, and a [`TangentSpec`] records the
//! order of each strict transform at the infinitely-near point `V` together
//! with whether the curve contains the length-2 scheme `Z = (p, v)`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use num_traits::{Signed, Zero};

use crate::lattice::{DivisorClass, IntersectionLattice, LatticeError};
use crate::rational::{frac, int, one, Q};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SurfaceError {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("unknown curve `{0}`")]
    UnknownCurve(String),
    #[error("unknown point `{0}`")]
    UnknownPoint(String),
    #[error("unknown tangent direction `{0}`")]
    UnknownTangent(String),
    #[error("name `{0}` is already declared")]
    Duplicate(String),
    #[error("tangent `{tangent}`: order of `{curve}` at the infinitely near point ({near}) exceeds its multiplicity at the point ({at})")]
    NearOrderTooLarge {
        tangent: String,
        curve: String,
        near: u32,
        at: u32,
    },
    #[error("tangent `{tangent}`: `{curve}` cannot contain the tangent scheme without passing through the point")]
    ContainsWithoutPassing { tangent: String, curve: String },
    #[error("B + M is not integral")]
    NonIntegral,
    #[error("boundary coefficient of `{curve}` is {coeff}, outside [0, 1)")]
    NotBoundary { curve: String, coeff: Q },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Curve {
    pub name: String,
    pub class: DivisorClass,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PointSpec {
    pub name: String,
    /// `mult_p(C)`; absent means `p` is not on `C`.
    pub mults: BTreeMap<String, u32>,
}

impl PointSpec {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            mults: BTreeMap::new(),
        }
    }

    pub fn with(mut self, curve: impl Into<String>, mult: u32) -> Self {
        self.mults.insert(curve.into(), mult);
        self
    }

    pub fn mult(&self, curve: &str) -> u32 {
        self.mults.get(curve).copied().unwrap_or(0)
    }

    pub fn lies_on(&self, curve: &str) -> bool {
        self.mult(curve) > 0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TangentSpec {
    pub name: String,
    pub at: String,
    /// Order of the strict transform of each curve at the infinitely near point.
    pub near_mults: BTreeMap<String, u32>,
    /// Curves that contain `Z`, i.e. pass through the point with the
    /// direction in their tangent cone.
    pub contains: BTreeSet<String>,
}

impl TangentSpec {
    pub fn new(name: impl Into<String>, at: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            at: at.into(),
            ..Self::default()
        }
    }

    pub fn with_near(mut self, curve: impl Into<String>, mult: u32) -> Self {
        self.near_mults.insert(curve.into(), mult);
        self
    }

    pub fn containing(mut self, curve: impl Into<String>) -> Self {
        self.contains.insert(curve.into());
        self
    }

    pub fn near_mult(&self, curve: &str) -> u32 {
        self.near_mults.get(curve).copied().unwrap_or(0)
    }

    pub fn contains_z(&self, curve: &str) -> bool {
        self.contains.contains(curve)
    }
}

/// A formal rational combination of named curves. Zero coefficients are
/// never stored.
#[derive(Debug, Clone, PartialEq, Eq, Default, Hash)]
pub struct QDivisor {
    coeffs: BTreeMap<String, Q>,
}

impl QDivisor {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs<I, S>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (S, Q)>,
        S: Into<String>,
    {
        let mut d = Self::new();
        for (name, c) in pairs {
            d.add_term(name.into(), c);
        }
        d
    }

    pub fn term(name: impl Into<String>, c: Q) -> Self {
        Self::from_pairs([(name.into(), c)])
    }

    pub fn add_term(&mut self, name: String, c: Q) {
        let entry = self.coeffs.entry(name).or_insert_with(Q::zero);
        *entry += c;
        self.coeffs.retain(|_, v| !v.is_zero());
    }

    pub fn coeff(&self, name: &str) -> Q {
        self.coeffs.get(name).cloned().unwrap_or_else(Q::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &Q)> {
        self.coeffs.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (n, c) in &other.coeffs {
            out.add_term(n.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-one()))
    }

    pub fn scale(&self, k: &Q) -> Self {
        Self::from_pairs(self.coeffs.iter().map(|(n, c)| (n.clone(), c * k)))
    }

    fn map(&self, f: impl Fn(&Q) -> Q) -> Self {
        Self::from_pairs(self.coeffs.iter().map(|(n, c)| (n.clone(), f(c))))
    }

    pub fn round_up(&self) -> Self {
        self.map(|c| c.ceil())
    }

    pub fn round_down(&self) -> Self {
        self.map(|c| c.floor())
    }

    /// Coefficient-wise `c - floor(c)`, every coefficient in `[0, 1)`.
    pub fn frac_part(&self) -> Self {
        self.map(frac)
    }

    pub fn is_integral(&self) -> bool {
        self.coeffs.values().all(|c| c.is_integer())
    }

    pub fn is_effective(&self) -> bool {
        self.coeffs.values().all(|c| !c.is_negative())
    }

    /// Checks `0 <= c < 1` for every coefficient.
    pub fn check_boundary(&self) -> Result<(), SurfaceError> {
        for (n, c) in &self.coeffs {
            if c.is_negative() || *c >= one() {
                return Err(SurfaceError::NotBoundary {
                    curve: n.clone(),
                    coeff: c.clone(),
                });
            }
        }
        Ok(())
    }
}

impl fmt::Display for QDivisor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        for (i, (n, c)) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c}){n}")?;
        }
        Ok(())
    }
}

/// Orders of a divisor at a point and along a tangent direction there.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TangentialOrders {
    /// `ord_p`.
    pub at_point: Q,
    /// Order of the strict transform at the infinitely near point `V`.
    pub at_near_point: Q,
    /// Order of the total transform along the second exceptional curve:
    /// `at_point + at_near_point`.
    pub along_tangent: Q,
}

#[derive(Debug, Clone)]
pub struct SurfaceModel {
    lattice: Arc<IntersectionLattice>,
    canonical: DivisorClass,
    chi_structure_sheaf: Q,
    curves: Vec<Curve>,
    points: Vec<PointSpec>,
    tangents: Vec<TangentSpec>,
}

impl SurfaceModel {
    pub fn new(
        lattice: Arc<IntersectionLattice>,
        canonical: DivisorClass,
        chi_structure_sheaf: Q,
    ) -> Result<Self, SurfaceError> {
        if !Arc::ptr_eq(canonical.lattice(), &lattice) {
            return Err(LatticeError::Mismatch.into());
        }
        Ok(Self {
            lattice,
            canonical,
            chi_structure_sheaf,
            curves: Vec::new(),
            points: Vec::new(),
            tangents: Vec::new(),
        })
    }

    /// The n-th Hirzebruch surface with curves `G` (the negative section)
    /// and `F` (a fiber), `K = -2G - (n+2)F` and `chi(O) = 1`.
    pub fn hirzebruch(n: u32) -> Self {
        let lattice = IntersectionLattice::hirzebruch(n);
        let k = DivisorClass::new(&lattice, vec![int(-2), int(-(n as i64) - 2)]).unwrap();
        let mut s = Self::new(Arc::clone(&lattice), k, int(1)).unwrap();
        s.add_curve("G", DivisorClass::basis(&lattice, 0)).unwrap();
        s.add_curve("F", DivisorClass::basis(&lattice, 1)).unwrap();
        s
    }

    pub fn add_curve(&mut self, name: impl Into<String>, class: DivisorClass) -> Result<(), SurfaceError> {
        let name = name.into();
        if !class.same_lattice(&self.canonical) {
            return Err(LatticeError::Mismatch.into());
        }
        if self.curve(&name).is_some() {
            return Err(SurfaceError::Duplicate(name));
        }
        self.curves.push(Curve { name, class });
        Ok(())
    }

    pub fn add_point(&mut self, point: PointSpec) -> Result<(), SurfaceError> {
        if self.point(&point.name).is_some() {
            return Err(SurfaceError::Duplicate(point.name));
        }
        for c in point.mults.keys() {
            self.require_curve(c)?;
        }
        self.points.push(point);
        Ok(())
    }

    pub fn add_tangent(&mut self, tangent: TangentSpec) -> Result<(), SurfaceError> {
        if self.tangent(&tangent.name).is_some() {
            return Err(SurfaceError::Duplicate(tangent.name));
        }
        let p = self.require_point(&tangent.at)?;
        for (c, &near) in &tangent.near_mults {
            self.require_curve(c)?;
            let at = p.mult(c);
            if near > at {
                return Err(SurfaceError::NearOrderTooLarge {
                    tangent: tangent.name.clone(),
                    curve: c.clone(),
                    near,
                    at,
                });
            }
        }
        for c in &tangent.contains {
            self.require_curve(c)?;
            if !p.lies_on(c) {
                return Err(SurfaceError::ContainsWithoutPassing {
                    tangent: tangent.name.clone(),
                    curve: c.clone(),
                });
            }
        }
        self.tangents.push(tangent);
        Ok(())
    }

    pub fn lattice(&self) -> &Arc<IntersectionLattice> {
        &self.lattice
    }

    pub fn canonical(&self) -> &DivisorClass {
        &self.canonical
    }

    pub fn chi_structure_sheaf(&self) -> &Q {
        &self.chi_structure_sheaf
    }

    pub fn curves(&self) -> &[Curve] {
        &self.curves
    }

    pub fn points(&self) -> &[PointSpec] {
        &self.points
    }

    pub fn tangents(&self) -> &[TangentSpec] {
        &self.tangents
    }

    pub fn curve(&self, name: &str) -> Option<&Curve> {
        self.curves.iter().find(|c| c.name == name)
    }

    pub fn point(&self, name: &str) -> Option<&PointSpec> {
        self.points.iter().find(|p| p.name == name)
    }

    pub fn tangent(&self, name: &str) -> Option<&TangentSpec> {
        self.tangents.iter().find(|t| t.name == name)
    }

    pub fn require_curve(&self, name: &str) -> Result<&Curve, SurfaceError> {
        self.curve(name)
            .ok_or_else(|| SurfaceError::UnknownCurve(name.to_string()))
    }

    pub fn require_point(&self, name: &str) -> Result<&PointSpec, SurfaceError> {
        self.point(name)
            .ok_or_else(|| SurfaceError::UnknownPoint(name.to_string()))
    }

    pub fn require_tangent(&self, name: &str) -> Result<&TangentSpec, SurfaceError> {
        self.tangent(name)
            .ok_or_else(|| SurfaceError::UnknownTangent(name.to_string()))
    }

    /// Checks that every curve referenced by `d` is declared.
    pub fn check_divisor(&self, d: &QDivisor) -> Result<(), SurfaceError> {
        for (n, _) in d.iter() {
            self.require_curve(n)?;
        }
        Ok(())
    }

    pub fn class_of(&self, d: &QDivisor) -> Result<DivisorClass, SurfaceError> {
        let mut acc = DivisorClass::zero(&self.lattice);
        for (n, c) in d.iter() {
            let curve = self.require_curve(n)?;
            acc = acc.add_scaled(c, &curve.class)?;
        }
        Ok(acc)
    }

    /// `ord_p(d) = sum c_i * mult_p(C_i)`.
    pub fn ord_at(&self, d: &QDivisor, point: &str) -> Result<Q, SurfaceError> {
        let p = self.require_point(point)?;
        self.check_divisor(d)?;
        Ok(weighted(d, |c| p.mult(c)))
    }

    pub fn ord_tangential(&self, d: &QDivisor, tangent: &str) -> Result<TangentialOrders, SurfaceError> {
        let t = self.require_tangent(tangent)?;
        let at_point = self.ord_at(d, &t.at)?;
        let at_near_point = weighted(d, |c| t.near_mult(c));
        let along_tangent = &at_point + &at_near_point;
        Ok(TangentialOrders {
            at_point,
            at_near_point,
            along_tangent,
        })
    }

    /// Blow up a marked point. The returned surface has one extra basis
    /// element `E` (with `E^2 = -1`, orthogonal to pulled-back classes), the
    /// strict transforms of all curves under their old names, and `E` as a
    /// new curve. Marked points and tangents are not carried over.
    pub fn blow_up(&self, point: &str) -> Result<(SurfaceModel, Pullback), SurfaceError> {
        let p = self.require_point(point)?.clone();
        let mut label = format!("E_{point}");
        while self.lattice.index_of(&label).is_some() || self.curve(&label).is_some() {
            label.push('\'');
        }
        let lattice = self.lattice.extended(label.clone(), int(-1))?;
        let pullback = Pullback {
            old: Arc::clone(&self.lattice),
            new: Arc::clone(&lattice),
            point: p,
            exceptional: label.clone(),
        };
        let e = pullback.exceptional_class();
        let canonical = pullback.class(&self.canonical)?.add(&e)?;
        let mut blown = SurfaceModel::new(Arc::clone(&lattice), canonical, self.chi_structure_sheaf.clone())?;
        for c in &self.curves {
            let m = int(pullback.point.mult(&c.name) as i64);
            let strict = pullback.class(&c.class)?.add_scaled(&-m, &e)?;
            blown.add_curve(c.name.clone(), strict)?;
        }
        blown.add_curve(label, e)?;
        Ok((blown, pullback))
    }
}

fn weighted(d: &QDivisor, mult: impl Fn(&str) -> u32) -> Q {
    d.iter()
        .map(|(n, c)| c * int(mult(n) as i64))
        .fold(Q::zero(), |a, b| a + b)
}

/// Pullback along the blow-up of a single point.
#[derive(Debug, Clone)]
pub struct Pullback {
    old: Arc<IntersectionLattice>,
    new: Arc<IntersectionLattice>,
    point: PointSpec,
    exceptional: String,
}

impl Pullback {
    pub fn exceptional(&self) -> &str {
        &self.exceptional
    }

    pub fn exceptional_class(&self) -> DivisorClass {
        DivisorClass::basis(&self.new, self.new.rank() - 1)
    }

    /// `f^*` on classes: the old coordinates, zero on `E`.
    pub fn class(&self, c: &DivisorClass) -> Result<DivisorClass, SurfaceError> {
        if !Arc::ptr_eq(c.lattice(), &self.old) {
            return Err(LatticeError::Mismatch.into());
        }
        let mut coeffs = c.coeffs().to_vec();
        coeffs.push(Q::zero());
        Ok(DivisorClass::new(&self.new, coeffs)?)
    }

    /// `f^*(sum b_i C_i) = sum b_i f^{-1}C_i + ord_p(d) E`.
    pub fn divisor(&self, d: &QDivisor) -> QDivisor {
        let mu = weighted(d, |c| self.point.mult(c));
        let mut out = d.clone();
        out.add_term(self.exceptional.clone(), mu);
        out
    }
}

/// Checks the adjoint identity on the blow-up at `point`:
///
/// `K_1 + round_up(f^*M) = f^*(K + B + M) - (floor(mu) - 1) E`
///
/// where `f^*M` is taken as `f^*(B+M) - f^*B` coefficient-wise. Both the
/// class-level identity and the underlying divisor identity
/// `round_up(f^*M) = f^*(B+M) - floor(mu) E` must hold.
pub fn verify_adjoint_blowup_identity(
    surface: &SurfaceModel,
    boundary: &QDivisor,
    model: &QDivisor,
    point: &str,
) -> Result<bool, SurfaceError> {
    boundary.check_boundary()?;
    surface.check_divisor(model)?;
    let total = boundary.add(model);
    if !total.is_integral() {
        return Err(SurfaceError::NonIntegral);
    }
    let mu = surface.ord_at(boundary, point)?;
    let (blown, f) = surface.blow_up(point)?;

    let pulled_m = f.divisor(&total).sub(&f.divisor(boundary));
    let rounded = pulled_m.round_up();
    let lhs = blown.canonical().add(&blown.class_of(&rounded)?)?;

    let adjoint = surface.canonical().add(&surface.class_of(&total)?)?;
    let shift = mu.floor() - one();
    let rhs = f.class(&adjoint)?.add_scaled(&-shift, &f.exceptional_class())?;

    let expected = f
        .divisor(&total)
        .sub(&QDivisor::term(f.exceptional(), mu.floor()));
    Ok(lhs == rhs && rounded == expected)
}
