//! Numerical criteria for freeness, point separation and tangent separation
//! of adjoint systems `|K + B + M|`, decided exactly over the rationals.
//!
//! Every checker returns a [`Verdict`]. Verdicts are one-sided: an
//! established verdict certifies the property through a sufficient
//! criterion, while `NotEstablished` only means none of the implemented
//! criteria fired. It never asserts that the property fails.
//!
//! Criteria with free parameters (`beta2`, `beta1`) either take an explicit
//! [`BetaWitness`] or search for one along dyadic rational sweeps. Every
//! candidate is verified exactly; no floating point is involved.

mod bounds;
mod global;
mod plc;
mod points;
mod tangent;

use std::fmt;

use num_traits::Signed;

use crate::lattice::{DivisorClass, LatticeError};
use crate::rational::{int, Q};

pub use bounds::{min_formula, tangent_bound};
pub use global::{very_ample_sqrt2_bound, very_ample_global, very_ample_witness};
pub use plc::{plc_threshold, LocalConfig, LocalCurve, PlcMode, PlcOutcome, PlcResult, ThresholdTerm};
pub use points::{freeness_at, freeness_witness, separation, separation_witness};
pub use tangent::{tangent_separation, tangent_witness};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CriteriaError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("witness has the wrong shape: expected {expected}")]
    WitnessShape { expected: &'static str },
    #[error("invalid local configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Established,
    NotEstablished,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Established => "established",
            Status::NotEstablished => "not-established",
        }
    }
}

/// Which criterion a verdict comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rule {
    JetsByMultiplicity,
    FreeByMultiplicity,
    FreeNumerical,
    SeparateByMultiplicity,
    SeparateOneSided,
    SeparateNumerical,
    TangentByMultiplicity,
    TangentModerateMultiplicity,
    TangentNumerical,
    VeryAmpleNumerical,
    VeryAmpleIrrationalBound,
}

impl Rule {
    pub fn id(self) -> &'static str {
        match self {
            Rule::JetsByMultiplicity => "jets.multiplicity",
            Rule::FreeByMultiplicity => "free.multiplicity",
            Rule::FreeNumerical => "free.numerical",
            Rule::SeparateByMultiplicity => "separate.multiplicity",
            Rule::SeparateOneSided => "separate.one-sided",
            Rule::SeparateNumerical => "separate.numerical",
            Rule::TangentByMultiplicity => "tangent.multiplicity",
            Rule::TangentModerateMultiplicity => "tangent.moderate-multiplicity",
            Rule::TangentNumerical => "tangent.numerical",
            Rule::VeryAmpleNumerical => "very-ample.numerical",
            Rule::VeryAmpleIrrationalBound => "very-ample.irrational-bound",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rel {
    Gt,
    Ge,
    Eq,
}

impl Rel {
    pub fn symbol(self) -> &'static str {
        match self {
            Rel::Gt => ">",
            Rel::Ge => ">=",
            Rel::Eq => "=",
        }
    }

    pub fn holds(self, lhs: &Q, rhs: &Q) -> bool {
        match self {
            Rel::Gt => lhs > rhs,
            Rel::Ge => lhs >= rhs,
            Rel::Eq => lhs == rhs,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceEntry {
    pub label: String,
    pub lhs: Q,
    pub rel: Rel,
    pub rhs: Q,
    pub holds: bool,
}

impl fmt::Display for TraceEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {} {} {} [{}]",
            self.label,
            self.lhs,
            self.rel.symbol(),
            self.rhs,
            if self.holds { "ok" } else { "fails" }
        )
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Trace {
    entries: Vec<TraceEntry>,
}

impl Trace {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn check(&mut self, label: impl Into<String>, lhs: Q, rel: Rel, rhs: Q) -> bool {
        let holds = rel.holds(&lhs, &rhs);
        self.entries.push(TraceEntry {
            label: label.into(),
            lhs,
            rel,
            rhs,
            holds,
        });
        holds
    }

    pub fn all_hold(&self) -> bool {
        self.entries.iter().all(|e| e.holds)
    }

    pub fn entries(&self) -> &[TraceEntry] {
        &self.entries
    }

    pub fn extend(&mut self, other: Trace) {
        self.entries.extend(other.entries);
    }

    pub fn into_entries(self) -> Vec<TraceEntry> {
        self.entries
    }
}

/// The `beta` parameters of a criterion, by role.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BetaWitness {
    /// Freeness at one point, or the global very-ampleness criterion.
    Single { beta2: Q, beta1: Q },
    /// Separation of two points.
    Pair {
        beta2_p: Q,
        beta1_p: Q,
        beta2_q: Q,
        beta1_q: Q,
    },
    /// Separation of a tangent direction at a point.
    Tangent { beta2_p: Q, beta2_near: Q, beta1: Q },
}

impl BetaWitness {
    pub fn single(beta2: Q, beta1: Q) -> Self {
        Self::Single { beta2, beta1 }
    }

    pub fn pair(beta2_p: Q, beta1_p: Q, beta2_q: Q, beta1_q: Q) -> Self {
        Self::Pair {
            beta2_p,
            beta1_p,
            beta2_q,
            beta1_q,
        }
    }

    pub fn tangent(beta2_p: Q, beta2_near: Q, beta1: Q) -> Self {
        Self::Tangent {
            beta2_p,
            beta2_near,
            beta1,
        }
    }

    /// `(role, value)` pairs in a fixed order.
    pub fn roles(&self) -> Vec<(&'static str, &Q)> {
        match self {
            Self::Single { beta2, beta1 } => vec![("beta2", beta2), ("beta1", beta1)],
            Self::Pair {
                beta2_p,
                beta1_p,
                beta2_q,
                beta1_q,
            } => vec![
                ("beta2_p", beta2_p),
                ("beta1_p", beta1_p),
                ("beta2_q", beta2_q),
                ("beta1_q", beta1_q),
            ],
            Self::Tangent {
                beta2_p,
                beta2_near,
                beta1,
            } => vec![("beta2_p", beta2_p), ("beta2_V", beta2_near), ("beta1", beta1)],
        }
    }

    pub fn all_positive(&self) -> bool {
        self.roles().iter().all(|(_, v)| v.is_positive())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub status: Status,
    pub rule: Rule,
    pub trace: Vec<TraceEntry>,
    pub witness: Option<BetaWitness>,
    pub notes: Vec<String>,
}

impl Verdict {
    fn from_trace(rule: Rule, trace: Trace, witness: Option<BetaWitness>) -> Self {
        let status = if trace.all_hold() {
            Status::Established
        } else {
            Status::NotEstablished
        };
        Self {
            status,
            rule,
            trace: trace.into_entries(),
            witness,
            notes: Vec::new(),
        }
    }

    fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    pub fn established(&self) -> bool {
        self.status == Status::Established
    }
}

/// Witness search settings: dyadic sweeps use denominators up to `2^depth`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchConfig {
    pub depth: u32,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self { depth: 24 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveAdjoint {
    None,
    BasePointFree,
    VeryAmple,
}

/// On an integral Gorenstein curve, `|K_C + D|` is free when `deg D >= 2`
/// and very ample when `deg D >= 3`.
pub fn curve_adjoint_check(degree: &Q) -> CurveAdjoint {
    if *degree >= int(3) {
        CurveAdjoint::VeryAmple
    } else if *degree >= int(2) {
        CurveAdjoint::BasePointFree
    } else {
        CurveAdjoint::None
    }
}

/// `|K + B + M|` separates `s`-jets at `p` once `ord_p(B) >= s + 2`.
pub fn jet_separation(mu: &Q, s: u32) -> Result<Verdict, CriteriaError> {
    non_negative("mu", mu)?;
    let mut t = Trace::new();
    t.check("mu >= s + 2", mu.clone(), Rel::Ge, int(s as i64 + 2));
    Ok(Verdict::from_trace(Rule::JetsByMultiplicity, t, None))
}

/// Riemann-Roch on a surface: `chi(H) = H.(H - K)/2 + chi(O)`.
pub fn riemann_roch_chi(h: &DivisorClass, k: &DivisorClass, chi_o: &Q) -> Result<Q, LatticeError> {
    let diff = h.sub(k)?;
    Ok(h.intersect(&diff)? / int(2) + chi_o)
}

fn non_negative(name: &str, x: &Q) -> Result<(), CriteriaError> {
    if x.is_negative() {
        Err(CriteriaError::Domain(format!("{name} = {x} must be >= 0")))
    } else {
        Ok(())
    }
}
