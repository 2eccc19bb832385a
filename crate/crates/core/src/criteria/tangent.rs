use super::bounds::tangent_bound;
use super::{non_negative, BetaWitness, CriteriaError, Rel, Rule, SearchConfig, Trace, Verdict};
use crate::rational::{dyadic_sqrt_below, int, max_q, Q};

fn tangent_trace(
    mu_p: &Q,
    mu_near: &Q,
    m2: &Q,
    mindeg_p: &Q,
    mindeg_z: &Q,
    b2p: &Q,
    b2v: &Q,
    b1: &Q,
) -> Trace {
    let mu_v = mu_p + mu_near;
    let s = b2p + b2v;
    let mut t = Trace::new();
    t.check("M^2 > beta2_p^2 + beta2_V^2", m2.clone(), Rel::Gt, b2p * b2p + b2v * b2v);
    t.check("beta2_p >= 2 - mu_p", b2p.clone(), Rel::Ge, int(2) - mu_p);
    t.check("beta2_V >= 2 - mu_V", b2v.clone(), Rel::Ge, int(2) - mu_near);
    t.check("beta2_p + beta2_V > 2 - mu_v", s.clone(), Rel::Gt, int(2) - &mu_v);
    t.check(
        "beta1 >= min((4 - mu_v)/2, S/(S - 2 + mu_v)), S = beta2_p + beta2_V",
        b1.clone(),
        Rel::Ge,
        tangent_bound(&mu_v, &s),
    );
    t.check("M.C >= beta1 for C through p", mindeg_p.clone(), Rel::Ge, b1.clone());
    t.check("M.C >= 2 beta1 for C containing Z", mindeg_z.clone(), Rel::Ge, int(2) * b1);
    t
}

fn check_domain(mu_p: &Q, mu_near: &Q) -> Result<(), CriteriaError> {
    non_negative("mu_p", mu_p)?;
    non_negative("mu_V", mu_near)?;
    if mu_near > mu_p {
        return Err(CriteriaError::Domain(format!(
            "mu_V = {mu_near} exceeds mu_p = {mu_p}"
        )));
    }
    Ok(())
}

/// Separation of the tangent direction `v` at `p`, i.e. of the length-two
/// scheme `Z = (p, v)`. `mu_near` is the multiplicity of the strict
/// transform of `B` at the infinitely near point, `mindeg_z` the least `M.C`
/// over curves containing `Z`.
pub fn tangent_separation(
    mu_p: &Q,
    mu_near: &Q,
    m2: &Q,
    mindeg_p: &Q,
    mindeg_z: &Q,
    witness: Option<&BetaWitness>,
    cfg: &SearchConfig,
) -> Result<Verdict, CriteriaError> {
    check_domain(mu_p, mu_near)?;
    let mu_v = mu_p + mu_near;
    if *mu_p >= int(3) || mu_v >= int(4) {
        let mut t = Trace::new();
        if *mu_p >= int(3) {
            t.check("mu_p >= 3", mu_p.clone(), Rel::Ge, int(3));
        } else {
            t.check("mu_v >= 4", mu_v, Rel::Ge, int(4));
        }
        return Ok(Verdict::from_trace(Rule::TangentByMultiplicity, t, None));
    }
    if *mu_p >= int(2) {
        let r = int(4) - &mu_v;
        let mut t = Trace::new();
        t.check("M^2 > (4 - mu_v)^2", m2.clone(), Rel::Gt, &r * &r);
        t.check(
            "M.C >= (4 - mu_v)/2 for C through p",
            mindeg_p.clone(),
            Rel::Ge,
            &r / int(2),
        );
        t.check("M.C >= 4 - mu_v for C containing Z", mindeg_z.clone(), Rel::Ge, r);
        return Ok(Verdict::from_trace(Rule::TangentModerateMultiplicity, t, None));
    }
    let found = match witness {
        Some(w) if !w.all_positive() => {
            return Err(CriteriaError::Domain("witness values must be > 0".into()))
        }
        Some(w) => Some(w.clone()),
        None => tangent_witness(mu_p, mu_near, m2, mindeg_p, mindeg_z, cfg)?,
    };
    match found {
        Some(BetaWitness::Tangent {
            beta2_p,
            beta2_near,
            beta1,
        }) => {
            let t = tangent_trace(mu_p, mu_near, m2, mindeg_p, mindeg_z, &beta2_p, &beta2_near, &beta1);
            let w = BetaWitness::tangent(beta2_p, beta2_near, beta1);
            Ok(Verdict::from_trace(Rule::TangentNumerical, t, Some(w)))
        }
        Some(_) => Err(CriteriaError::WitnessShape {
            expected: "tangent (beta2_p, beta2_V, beta1)",
        }),
        None => {
            let a = int(2) - mu_p;
            let b = int(2) - mu_near;
            let b1 = tangent_bound(&mu_v, &(&a + &b));
            let t = tangent_trace(mu_p, mu_near, m2, mindeg_p, mindeg_z, &a, &b, &b1);
            Ok(Verdict::from_trace(Rule::TangentNumerical, t, None).with_note(format!(
                "no witness found up to depth {}; trace shown at the smallest admissible beta2 values",
                cfg.depth
            )))
        }
    }
}

/// Searches `(beta2_p, beta2_V, beta1)` for [`tangent_separation`] with
/// `mu_p < 2`. The bound on `beta1` only improves as `beta2_p + beta2_V`
/// grows, so each precision level tries the largest sum it can reach: an
/// equal split below `sqrt(M^2/2)`, or one value pinned at its lower bound.
pub fn tangent_witness(
    mu_p: &Q,
    mu_near: &Q,
    m2: &Q,
    mindeg_p: &Q,
    mindeg_z: &Q,
    cfg: &SearchConfig,
) -> Result<Option<BetaWitness>, CriteriaError> {
    check_domain(mu_p, mu_near)?;
    if *mu_p >= int(2) {
        return Err(CriteriaError::Domain(format!("mu_p = {mu_p} must be < 2")));
    }
    let a = int(2) - mu_p;
    let b = int(2) - mu_near;
    if &a * &a + &b * &b >= *m2 {
        return Ok(None);
    }
    let mu_v = mu_p + mu_near;
    let half = m2 / int(2);
    let mut last: Option<Q> = None;
    for k in 0..=cfg.depth {
        let mut best: Option<(Q, Q)> = None;
        let mut offer = |x: Q, y: Q| {
            if &x * &x + &y * &y >= *m2 || x < a || y < b {
                return;
            }
            let better = match &best {
                Some((bx, by)) => &x + &y > bx + by,
                None => true,
            };
            if better {
                best = Some((x, y));
            }
        };
        if let Some(e) = dyadic_sqrt_below(&half, k) {
            offer(e.clone(), e);
        }
        if let Some(y) = dyadic_sqrt_below(&(m2 - &a * &a), k) {
            offer(a.clone(), max_q(&b, &y));
        }
        if let Some(x) = dyadic_sqrt_below(&(m2 - &b * &b), k) {
            offer(max_q(&a, &x), b.clone());
        }
        let Some((x, y)) = best else { continue };
        let s = &x + &y;
        if last.as_ref() == Some(&s) {
            continue;
        }
        let b1 = tangent_bound(&mu_v, &s);
        if tangent_trace(mu_p, mu_near, m2, mindeg_p, mindeg_z, &x, &y, &b1).all_hold() {
            return Ok(Some(BetaWitness::tangent(x, y, b1)));
        }
        last = Some(s);
    }
    Ok(None)
}
