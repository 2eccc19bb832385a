use num_traits::Signed;

use super::bounds::{min_beta2_for_degree, point_bound};
use super::{non_negative, BetaWitness, CriteriaError, Rel, Rule, SearchConfig, Trace, Verdict};
use crate::rational::{dyadic, dyadic_sqrt_below, int, max_q, Q};

/// Interior grid for two-point witness search: step `2^-k` for `k` up to
/// this level.
const PAIR_GRID_LEVELS: u32 = 4;

fn point_conditions(t: &mut Trace, tag: &str, mu: &Q, beta2: &Q, beta1: &Q, mindeg: &Q) {
    t.check(
        format!("beta2{tag} >= 2 - mu{tag}"),
        beta2.clone(),
        Rel::Ge,
        int(2) - mu,
    );
    t.check(
        format!("beta1{tag} >= min(2 - mu{tag}, beta2{tag}/(beta2{tag} - 1 + mu{tag}))"),
        beta1.clone(),
        Rel::Ge,
        point_bound(mu, beta2),
    );
    t.check(
        format!("M.C >= beta1{tag} for C through {}", if tag.is_empty() { "p" } else { &tag[1..] }),
        mindeg.clone(),
        Rel::Ge,
        beta1.clone(),
    );
}

fn free_trace(mu: &Q, m2: &Q, mindeg: &Q, beta2: &Q, beta1: &Q) -> Trace {
    let mut t = Trace::new();
    t.check("M^2 > beta2^2", m2.clone(), Rel::Gt, beta2 * beta2);
    point_conditions(&mut t, "", mu, beta2, beta1, mindeg);
    t
}

fn require_positive(w: &BetaWitness) -> Result<(), CriteriaError> {
    if w.all_positive() {
        Ok(())
    } else {
        Err(CriteriaError::Domain("witness values must be > 0".into()))
    }
}

fn single_of(w: &BetaWitness) -> Result<(Q, Q), CriteriaError> {
    match w {
        BetaWitness::Single { beta2, beta1 } => Ok((beta2.clone(), beta1.clone())),
        _ => Err(CriteriaError::WitnessShape {
            expected: "single (beta2, beta1)",
        }),
    }
}

/// Freeness of `|K + B + M|` at a point with `mu = ord_p(B)`, `m2 = M^2` and
/// `mindeg_p` the least `M.C` over curves through `p`.
pub fn freeness_at(
    mu: &Q,
    m2: &Q,
    mindeg_p: &Q,
    witness: Option<&BetaWitness>,
    cfg: &SearchConfig,
) -> Result<Verdict, CriteriaError> {
    non_negative("mu", mu)?;
    if *mu >= int(2) {
        let mut t = Trace::new();
        t.check("mu >= 2", mu.clone(), Rel::Ge, int(2));
        return Ok(Verdict::from_trace(Rule::FreeByMultiplicity, t, None));
    }
    let w = match witness {
        Some(w) => Some(single_of(w).and_then(|v| require_positive(w).map(|_| v))?),
        None => freeness_witness(mu, m2, mindeg_p, cfg)?.map(|w| single_of(&w).unwrap()),
    };
    Ok(free_verdict(Rule::FreeNumerical, mu, m2, mindeg_p, w, witness.is_some(), cfg))
}

fn free_verdict(
    rule: Rule,
    mu: &Q,
    m2: &Q,
    mindeg: &Q,
    w: Option<(Q, Q)>,
    supplied: bool,
    cfg: &SearchConfig,
) -> Verdict {
    match w {
        Some((b2, b1)) => {
            let t = free_trace(mu, m2, mindeg, &b2, &b1);
            Verdict::from_trace(rule, t, Some(BetaWitness::single(b2, b1)))
        }
        None => {
            debug_assert!(!supplied);
            let lower = int(2) - mu;
            let t = free_trace(mu, m2, mindeg, &lower, &lower);
            Verdict::from_trace(rule, t, None).with_note(format!(
                "no witness found up to depth {}; trace shown at the smallest admissible beta2",
                cfg.depth
            ))
        }
    }
}

/// Searches `(beta2, beta1)` for [`freeness_at`]. `beta2` is the largest
/// dyadic below `sqrt(M^2)` at increasing precision, `beta1` the tight bound.
pub fn freeness_witness(
    mu: &Q,
    m2: &Q,
    mindeg_p: &Q,
    cfg: &SearchConfig,
) -> Result<Option<BetaWitness>, CriteriaError> {
    if mu.is_negative() || *mu >= int(2) {
        return Err(CriteriaError::Domain(format!("mu = {mu} must lie in [0, 2)")));
    }
    let lower = int(2) - mu;
    let lower_ok = &lower * &lower < *m2;
    let mut last: Option<Q> = None;
    for k in 0..=cfg.depth {
        let b2 = match dyadic_sqrt_below(m2, k) {
            Some(b) if b >= lower => b,
            _ if lower_ok => lower.clone(),
            _ => continue,
        };
        if last.as_ref() == Some(&b2) {
            continue;
        }
        let b1 = point_bound(mu, &b2);
        if free_trace(mu, m2, mindeg_p, &b2, &b1).all_hold() {
            return Ok(Some(BetaWitness::single(b2, b1)));
        }
        last = Some(b2);
    }
    Ok(None)
}

fn pair_trace(
    mus: (&Q, &Q),
    m2: &Q,
    degs: (&Q, &Q, &Q),
    b2: (&Q, &Q),
    b1: (&Q, &Q),
) -> Trace {
    let mut t = Trace::new();
    t.check(
        "M^2 > beta2_p^2 + beta2_q^2",
        m2.clone(),
        Rel::Gt,
        b2.0 * b2.0 + b2.1 * b2.1,
    );
    point_conditions(&mut t, "_p", mus.0, b2.0, b1.0, degs.0);
    point_conditions(&mut t, "_q", mus.1, b2.1, b1.1, degs.1);
    t.check(
        "M.C >= beta1_p + beta1_q for C through p and q",
        degs.2.clone(),
        Rel::Ge,
        b1.0 + b1.1,
    );
    t
}

/// Separation of two points `p`, `q`. `mindeg_pq` is the least `M.C` over
/// curves through both points; the three degree inputs are independent.
#[allow(clippy::too_many_arguments)]
pub fn separation(
    mu_p: &Q,
    mu_q: &Q,
    m2: &Q,
    mindeg_p: &Q,
    mindeg_q: &Q,
    mindeg_pq: &Q,
    witness: Option<&BetaWitness>,
    cfg: &SearchConfig,
) -> Result<Verdict, CriteriaError> {
    non_negative("mu_p", mu_p)?;
    non_negative("mu_q", mu_q)?;
    if let Some(w) = witness {
        require_positive(w)?;
    }
    let two = int(2);
    match (*mu_p >= two, *mu_q >= two) {
        (true, true) => {
            let mut t = Trace::new();
            t.check("mu_p >= 2", mu_p.clone(), Rel::Ge, two.clone());
            t.check("mu_q >= 2", mu_q.clone(), Rel::Ge, two);
            Ok(Verdict::from_trace(Rule::SeparateByMultiplicity, t, None))
        }
        (false, true) | (true, false) => {
            let swapped = *mu_p >= two;
            let (mu, deg) = if swapped { (mu_q, mindeg_q) } else { (mu_p, mindeg_p) };
            let w = match witness {
                None => freeness_witness(mu, m2, deg, cfg)?.map(|w| single_of(&w).unwrap()),
                Some(BetaWitness::Single { beta2, beta1 }) => Some((beta2.clone(), beta1.clone())),
                Some(BetaWitness::Pair {
                    beta2_p,
                    beta1_p,
                    beta2_q,
                    beta1_q,
                }) => Some(if swapped {
                    (beta2_q.clone(), beta1_q.clone())
                } else {
                    (beta2_p.clone(), beta1_p.clone())
                }),
                Some(_) => {
                    return Err(CriteriaError::WitnessShape {
                        expected: "single or pair",
                    })
                }
            };
            let v = free_verdict(Rule::SeparateOneSided, mu, m2, deg, w, witness.is_some(), cfg);
            Ok(if swapped {
                v.with_note("checked at q; p has multiplicity >= 2")
            } else {
                v.with_note("checked at p; q has multiplicity >= 2")
            })
        }
        (false, false) => {
            let found = match witness {
                Some(w) => Some(w.clone()),
                None => separation_witness(mu_p, mu_q, m2, mindeg_p, mindeg_q, mindeg_pq, cfg)?,
            };
            let degs = (mindeg_p, mindeg_q, mindeg_pq);
            match found {
                Some(BetaWitness::Pair {
                    beta2_p,
                    beta1_p,
                    beta2_q,
                    beta1_q,
                }) => {
                    let t = pair_trace(
                        (mu_p, mu_q),
                        m2,
                        degs,
                        (&beta2_p, &beta2_q),
                        (&beta1_p, &beta1_q),
                    );
                    let w = BetaWitness::pair(beta2_p, beta1_p, beta2_q, beta1_q);
                    Ok(Verdict::from_trace(Rule::SeparateNumerical, t, Some(w)))
                }
                Some(_) => Err(CriteriaError::WitnessShape {
                    expected: "pair (beta2_p, beta1_p, beta2_q, beta1_q)",
                }),
                None => {
                    let lp = int(2) - mu_p;
                    let lq = int(2) - mu_q;
                    let t = pair_trace((mu_p, mu_q), m2, degs, (&lp, &lq), (&lp, &lq));
                    Ok(Verdict::from_trace(Rule::SeparateNumerical, t, None).with_note(format!(
                        "no witness found up to depth {}; trace shown at the smallest admissible beta2 values",
                        cfg.depth
                    )))
                }
            }
        }
    }
}

/// Searches a pair witness for [`separation`] when both multiplicities are
/// below 2.
///
/// Candidates at each precision level `k`: `beta2_p` at the least value
/// compatible with `mindeg_p` (and symmetrically for `q`), then a grid of
/// step `2^-k` upwards from `2 - mu_p` for small `k`. The partner `beta2` is
/// always the largest dyadic keeping `M^2 > beta2_p^2 + beta2_q^2`.
pub fn separation_witness(
    mu_p: &Q,
    mu_q: &Q,
    m2: &Q,
    mindeg_p: &Q,
    mindeg_q: &Q,
    mindeg_pq: &Q,
    cfg: &SearchConfig,
) -> Result<Option<BetaWitness>, CriteriaError> {
    for (name, mu) in [("mu_p", mu_p), ("mu_q", mu_q)] {
        if mu.is_negative() || *mu >= int(2) {
            return Err(CriteriaError::Domain(format!("{name} = {mu} must lie in [0, 2)")));
        }
    }
    let lp = int(2) - mu_p;
    let lq = int(2) - mu_q;
    if &lp * &lp + &lq * &lq >= *m2 {
        return Ok(None);
    }
    let degs = (mindeg_p, mindeg_q, mindeg_pq);
    let try_pair = |x: &Q, y: &Q| -> Option<BetaWitness> {
        let bp = point_bound(mu_p, x);
        let bq = point_bound(mu_q, y);
        if pair_trace((mu_p, mu_q), m2, degs, (x, y), (&bp, &bq)).all_hold() {
            Some(BetaWitness::pair(x.clone(), bp, y.clone(), bq))
        } else {
            None
        }
    };
    // largest admissible partner for `x`, at precision k
    let partner = |x: &Q, lower: &Q, k: u32| -> Option<Q> {
        let rest = m2 - x * x;
        let y = max_q(lower, &dyadic_sqrt_below(&rest, k)?);
        (&y * &y < rest).then_some(y)
    };
    let xmin = min_beta2_for_degree(mu_p, mindeg_p);
    let ymin = min_beta2_for_degree(mu_q, mindeg_q);
    for k in 0..=cfg.depth {
        if let Some(x) = &xmin {
            if let Some(y) = partner(x, &lq, k) {
                if let Some(w) = try_pair(x, &y) {
                    return Ok(Some(w));
                }
            }
        }
        if let Some(y) = &ymin {
            if let Some(x) = partner(y, &lp, k) {
                if let Some(w) = try_pair(&x, y) {
                    return Ok(Some(w));
                }
            }
        }
        if k <= PAIR_GRID_LEVELS {
            let step = dyadic(k);
            let mut x = lp.clone();
            while &x * &x + &lq * &lq < *m2 {
                if let Some(y) = partner(&x, &lq, k) {
                    if let Some(w) = try_pair(&x, &y) {
                        return Ok(Some(w));
                    }
                }
                x += &step;
            }
        }
    }
    Ok(None)
}
