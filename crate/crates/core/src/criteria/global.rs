use num_bigint::BigInt;
use num_traits::One;

use super::{BetaWitness, CriteriaError, Rel, Rule, SearchConfig, Trace, Verdict};
use crate::rational::{dyadic_sqrt_below, int, max_q, Q};

/// Hard cap on convergents tried when turning an irrational-bound verdict
/// into a rational witness. Termination is guaranteed long before this.
const MAX_CONVERGENTS: usize = 10_000;

fn global_trace(m2: &Q, mindeg: &Q, beta2: &Q, beta1: &Q) -> Trace {
    let mut t = Trace::new();
    let ok = t.check("beta2 >= 2", beta2.clone(), Rel::Ge, int(2));
    if ok {
        t.check(
            "beta1 >= beta2/(beta2 - 1)",
            beta1.clone(),
            Rel::Ge,
            beta2 / (beta2 - int(1)),
        );
    }
    t.check("M^2 > 2 beta2^2", m2.clone(), Rel::Gt, int(2) * beta2 * beta2);
    t.check("M.C >= 2 beta1 for every curve C", mindeg.clone(), Rel::Ge, int(2) * beta1);
    t
}

/// Very ampleness of `|K + B + M|` from global data: `M^2` and the least
/// `M.C` over all curves.
pub fn very_ample_global(
    m2: &Q,
    mindeg: &Q,
    witness: Option<&BetaWitness>,
    cfg: &SearchConfig,
) -> Result<Verdict, CriteriaError> {
    let found = match witness {
        Some(BetaWitness::Single { beta2, beta1 }) => Some((beta2.clone(), beta1.clone())),
        Some(_) => {
            return Err(CriteriaError::WitnessShape {
                expected: "single (beta2, beta1)",
            })
        }
        None => very_ample_witness(m2, mindeg, cfg).map(|w| match w {
            BetaWitness::Single { beta2, beta1 } => (beta2, beta1),
            _ => unreachable!(),
        }),
    };
    Ok(match found {
        Some((b2, b1)) => {
            let t = global_trace(m2, mindeg, &b2, &b1);
            Verdict::from_trace(Rule::VeryAmpleNumerical, t, Some(BetaWitness::single(b2, b1)))
        }
        None => {
            let t = global_trace(m2, mindeg, &int(2), &int(2));
            Verdict::from_trace(Rule::VeryAmpleNumerical, t, None).with_note(format!(
                "no witness found up to depth {}; trace shown at beta2 = 2",
                cfg.depth
            ))
        }
    })
}

/// Searches `(beta2, beta1)` for [`very_ample_global`]: `beta2` is the largest dyadic
/// below `sqrt(M^2/2)` (at least 2), `beta1 = beta2/(beta2 - 1)`.
pub fn very_ample_witness(m2: &Q, mindeg: &Q, cfg: &SearchConfig) -> Option<BetaWitness> {
    let two = int(2);
    if *m2 <= int(8) {
        return None;
    }
    let half = m2 / &two;
    let mut last: Option<Q> = None;
    for k in 0..=cfg.depth {
        let b2 = max_q(&two, &dyadic_sqrt_below(&half, k)?);
        if last.as_ref() == Some(&b2) {
            continue;
        }
        let b1 = &b2 / (&b2 - int(1));
        if global_trace(m2, mindeg, &b2, &b1).all_hold() {
            return Some(BetaWitness::single(b2, b1));
        }
        last = Some(b2);
    }
    None
}

/// Convergents `h/k` of `1 + sqrt(2) = [2; 2, 2, ...]` lying below it.
fn lower_convergents() -> impl Iterator<Item = Q> {
    let mut h = (BigInt::one(), BigInt::from(2));
    let mut k = (BigInt::from(0), BigInt::one());
    let step = |(prev, cur): (BigInt, BigInt)| {
        let next = BigInt::from(2) * &cur + prev;
        (cur, next)
    };
    std::iter::from_fn(move || {
        let out = Q::new(h.1.clone(), k.1.clone());
        // convergents alternate around the limit; skip the one above it
        for _ in 0..2 {
            h = step(std::mem::take(&mut h));
            k = step(std::mem::take(&mut k));
        }
        Some(out)
    })
}

/// Very ampleness from `M^2 > (2 + sqrt 2)^2` and `M.C > 2 + sqrt 2` for all
/// curves, decided exactly by squaring. An established verdict also carries
/// a rational witness for [`very_ample_global`], taken from convergents of
/// `1 + sqrt 2`.
pub fn very_ample_sqrt2_bound(m2: &Q, mindeg: &Q) -> Verdict {
    let mut t = Trace::new();
    let d2 = m2 - int(6);
    let dd = mindeg - int(2);
    t.check("M^2 > 6", m2.clone(), Rel::Gt, int(6));
    t.check("(M^2 - 6)^2 > 32", &d2 * &d2, Rel::Gt, int(32));
    t.check("M.C > 2 for every curve C", mindeg.clone(), Rel::Gt, int(2));
    t.check("(M.C - 2)^2 > 2", &dd * &dd, Rel::Gt, int(2));
    if !t.all_hold() {
        return Verdict::from_trace(Rule::VeryAmpleIrrationalBound, t, None);
    }
    for b2 in lower_convergents().take(MAX_CONVERGENTS) {
        let b1 = &b2 / (&b2 - int(1));
        let wt = global_trace(m2, mindeg, &b2, &b1);
        if wt.all_hold() {
            t.extend(wt);
            let w = BetaWitness::single(b2, b1);
            return Verdict::from_trace(Rule::VeryAmpleIrrationalBound, t, Some(w));
        }
    }
    let mut v = Verdict::from_trace(Rule::VeryAmpleIrrationalBound, t, None);
    v.notes.push("no rational witness among the convergents tried".into());
    v
}
