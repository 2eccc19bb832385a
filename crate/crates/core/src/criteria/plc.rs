//! Thresholds for partial log-canonicity of `(S, B + lambda D)` at a point.

use num_traits::{Signed, Zero};

use super::CriteriaError;
use crate::rational::{int, Q};

/// One curve through the point: boundary coefficient `b`, coefficient `d`
/// in the auxiliary divisor `D`, and multiplicities at the point and at the
/// infinitely near point of a chosen tangent direction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalCurve {
    pub name: String,
    pub b: Q,
    pub d: Q,
    pub mult_p: u32,
    pub mult_near: u32,
    pub contains_z: bool,
}

impl LocalCurve {
    pub fn new(name: impl Into<String>, b: Q, d: Q, mult_p: u32) -> Self {
        Self {
            name: name.into(),
            b,
            d,
            mult_p,
            mult_near: 0,
            contains_z: false,
        }
    }

    pub fn with_near(mut self, mult_near: u32, contains_z: bool) -> Self {
        self.mult_near = mult_near;
        self.contains_z = contains_z;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalConfig {
    curves: Vec<LocalCurve>,
}

impl LocalConfig {
    pub fn new(curves: Vec<LocalCurve>) -> Result<Self, CriteriaError> {
        for c in &curves {
            let bad = |why: &str| Err(CriteriaError::InvalidConfig(format!("curve {}: {why}", c.name)));
            if c.b.is_negative() || c.b >= int(1) {
                return bad("boundary coefficient must lie in [0, 1)");
            }
            if c.d.is_negative() {
                return bad("coefficient in D must be >= 0");
            }
            if c.mult_p == 0 {
                return bad("multiplicity at p must be >= 1");
            }
            if c.mult_near > c.mult_p {
                return bad("multiplicity at the near point exceeds the one at p");
            }
        }
        Ok(Self { curves })
    }

    pub fn curves(&self) -> &[LocalCurve] {
        &self.curves
    }

    /// `ord_p(B)`.
    pub fn mu(&self) -> Q {
        self.curves.iter().map(|c| &c.b * int(c.mult_p as i64)).sum()
    }

    /// `ord_p(D)`.
    pub fn m_p(&self) -> Q {
        self.curves.iter().map(|c| &c.d * int(c.mult_p as i64)).sum()
    }

    /// Multiplicity of the strict transform of `B` at the near point.
    pub fn mu_near(&self) -> Q {
        self.curves.iter().map(|c| &c.b * int(c.mult_near as i64)).sum()
    }

    /// Tangential order of `B` along the chosen direction.
    pub fn mu_v(&self) -> Q {
        self.mu() + self.mu_near()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlcMode {
    /// Least `lambda` at which some `b_i + lambda d_i` reaches 1.
    Basic,
    /// As `Basic`, additionally capped by `(3 - mu_p)/m_p`.
    CapThree,
    /// The primed threshold around a critical curve: also capped by 1 and by
    /// `(2 - b_0)/d_0`; other curves enter when `b_i + d_i > 1`, or `>= 1`
    /// with `inclusive`.
    Critical { index: usize, inclusive: bool },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThresholdTerm {
    One,
    MultiplicityCap,
    Curve(usize),
    CriticalDoubled(usize),
}

impl ThresholdTerm {
    pub fn curve(self) -> Option<usize> {
        match self {
            ThresholdTerm::Curve(i) | ThresholdTerm::CriticalDoubled(i) => Some(i),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PlcOutcome {
    Plc,
    Threshold {
        c: Q,
        /// Every term attaining the minimum, caps first, then curves in
        /// declaration order.
        achievers: Vec<ThresholdTerm>,
        /// First curve among the achievers.
        critical: Option<usize>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlcResult {
    pub outcome: PlcOutcome,
    pub warnings: Vec<String>,
}

impl PlcResult {
    pub fn threshold(&self) -> Option<&Q> {
        match &self.outcome {
            PlcOutcome::Threshold { c, .. } => Some(c),
            PlcOutcome::Plc => None,
        }
    }
}

fn exceeds(c: &LocalCurve, inclusive: bool) -> bool {
    let total = &c.b + &c.d;
    if inclusive {
        total >= int(1)
    } else {
        total > int(1)
    }
}

pub fn plc_threshold(config: &LocalConfig, mode: PlcMode) -> Result<PlcResult, CriteriaError> {
    let mut warnings = Vec::new();
    let mu = config.mu();
    let m_p = config.m_p();
    let mut terms: Vec<(ThresholdTerm, Q)> = Vec::new();
    if mode != PlcMode::Basic && mu >= int(3) && m_p.is_positive() {
        warnings.push(format!("mu_p = {mu} >= 3: the multiplicity cap is not positive"));
    }
    let cap = |terms: &mut Vec<(ThresholdTerm, Q)>| {
        if m_p.is_positive() {
            terms.push((ThresholdTerm::MultiplicityCap, (int(3) - &mu) / &m_p));
        }
    };
    match mode {
        PlcMode::Basic | PlcMode::CapThree => {
            if mode == PlcMode::Basic && m_p != int(2) - &mu {
                warnings.push(format!("ord_p(D) = {m_p} differs from 2 - mu = {}", int(2) - &mu));
            }
            if !config.curves.iter().any(|c| exceeds(c, false)) {
                return Ok(PlcResult {
                    outcome: PlcOutcome::Plc,
                    warnings,
                });
            }
            if mode == PlcMode::CapThree {
                cap(&mut terms);
            }
            for (i, c) in config.curves.iter().enumerate() {
                if exceeds(c, false) {
                    terms.push((ThresholdTerm::Curve(i), (int(1) - &c.b) / &c.d));
                }
            }
        }
        PlcMode::Critical { index, inclusive } => {
            if index >= config.curves.len() {
                return Err(CriteriaError::InvalidConfig(format!(
                    "critical curve index {index} out of range"
                )));
            }
            terms.push((ThresholdTerm::One, int(1)));
            cap(&mut terms);
            for (i, c) in config.curves.iter().enumerate() {
                if c.d.is_zero() {
                    continue;
                }
                if i == index {
                    terms.push((ThresholdTerm::CriticalDoubled(i), (int(2) - &c.b) / &c.d));
                } else if exceeds(c, inclusive) {
                    terms.push((ThresholdTerm::Curve(i), (int(1) - &c.b) / &c.d));
                }
            }
        }
    }
    let c = terms
        .iter()
        .map(|(_, v)| v)
        .min()
        .cloned()
        .expect("at least one threshold term");
    let achievers: Vec<ThresholdTerm> = terms
        .iter()
        .filter(|(_, v)| *v == c)
        .map(|(t, _)| *t)
        .collect();
    let critical = achievers.iter().find_map(|t| t.curve());
    Ok(PlcResult {
        outcome: PlcOutcome::Threshold {
            c,
            achievers,
            critical,
        },
        warnings,
    })
}
