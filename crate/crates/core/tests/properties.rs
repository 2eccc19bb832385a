use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use proptest::prelude::*;

use qreider::cone::{ConeDescription, CurveFilter};
use qreider::criteria::{
    very_ample_sqrt2_bound, freeness_at, freeness_witness, min_formula, plc_threshold, separation, separation_witness,
    tangent_bound, tangent_separation, tangent_witness, very_ample_global, very_ample_witness, BetaWitness, LocalConfig,
    LocalCurve, PlcMode, PlcOutcome, SearchConfig,
};
use qreider::expr::Expr;
use qreider::lattice::{DivisorClass, IntersectionLattice};
use qreider::rational::{dyadic, dyadic_sqrt_below, frac, int, q, Q};
use qreider::surface::{PointSpec, QDivisor, SurfaceModel, TangentSpec};

fn rat(lo: i64, hi: i64, den: i64) -> impl Strategy<Value = Q> {
    (1..=den).prop_flat_map(move |d| (lo * d..=hi * d).prop_map(move |n| q(n, d)))
}

fn mu() -> impl Strategy<Value = Q> {
    (0i64..32).prop_map(|n| q(n, 16))
}

fn cfg() -> SearchConfig {
    SearchConfig::default()
}

fn expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![(0i64..50).prop_map(Expr::num), prop::sample::select(vec!["e", "a", "G", "F2"]).prop_map(Expr::sym)];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|a| Expr::Neg(Box::new(a))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Add(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Sub(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Mul(Box::new(a), Box::new(b))),
            (inner.clone(), inner).prop_map(|(a, b)| Expr::Div(Box::new(a), Box::new(b))),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 400, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn expressions_print_and_parse_back(e in expr()) {
        let text = e.to_string();
        let back = Expr::parse(&text).unwrap();
        prop_assert_eq!(back.to_string(), text);
        let lookup = |s: &str| Some(match s { "e" => q(1, 3), "a" => q(-5, 7), "G" => int(2), _ => q(9, 4) });
        prop_assert_eq!(e.eval(&lookup), back.eval(&lookup));
    }

    #[test]
    fn dyadic_square_root_is_tight(x in rat(0, 200, 50), k in 0u32..20) {
        match dyadic_sqrt_below(&x, k) {
            None => prop_assert!(x.is_zero()),
            Some(y) => {
                prop_assert!(!y.is_negative());
                prop_assert!(&y * &y < x);
                let next = &y + dyadic(k);
                prop_assert!(&next * &next >= x);
                prop_assert!((&y * Q::from_integer(BigInt::from(2).pow(k))).is_integer());
            }
        }
    }

    #[test]
    fn rounding_is_coherent(cs in prop::collection::vec(rat(-30, 30, 13), 1..5)) {
        let d = QDivisor::from_pairs(cs.iter().enumerate().map(|(i, c)| (format!("C{i}"), c.clone())));
        prop_assert_eq!(d.round_up(), d.scale(&int(-1)).round_down().scale(&int(-1)));
        for (name, c) in d.iter() {
            let f = d.frac_part().coeff(name);
            prop_assert!(!f.is_negative() && f < int(1));
            prop_assert_eq!(&f, &frac(c));
            prop_assert_eq!(d.round_down().coeff(name) + f, c.clone());
        }
        prop_assert_eq!(d.round_up().is_integral(), true);
    }

    #[test]
    fn pairing_is_symmetric_and_bilinear(
        g in prop::collection::vec(rat(-4, 4, 3), 6),
        a in prop::collection::vec(rat(-5, 5, 4), 3),
        b in prop::collection::vec(rat(-5, 5, 4), 3),
        c in prop::collection::vec(rat(-5, 5, 4), 3),
        s in rat(-3, 3, 5),
    ) {
        let gram = vec![
            vec![g[0].clone(), g[1].clone(), g[2].clone()],
            vec![g[1].clone(), g[3].clone(), g[4].clone()],
            vec![g[2].clone(), g[4].clone(), g[5].clone()],
        ];
        let lat = IntersectionLattice::new(vec!["A".into(), "B".into(), "C".into()], gram).unwrap();
        let (a, b, c) = (
            DivisorClass::new(&lat, a).unwrap(),
            DivisorClass::new(&lat, b).unwrap(),
            DivisorClass::new(&lat, c).unwrap(),
        );
        prop_assert_eq!(a.intersect(&b).unwrap(), b.intersect(&a).unwrap());
        let lhs = a.add_scaled(&s, &b).unwrap().intersect(&c).unwrap();
        prop_assert_eq!(lhs, a.intersect(&c).unwrap() + &s * b.intersect(&c).unwrap());
    }

    #[test]
    fn min_formula_follows_its_branches(mu in mu(), extra in rat(0, 5, 8)) {
        let lower = int(2) - &mu;
        let beta2 = &lower + &extra;
        let v = min_formula(&mu, &beta2).unwrap();
        if mu >= int(1) {
            prop_assert_eq!(v, lower);
        } else {
            prop_assert_eq!(&v, &(&beta2 / (&beta2 - (int(1) - &mu))));
            prop_assert!(v <= lower);
            prop_assert_eq!(v == lower, extra.is_zero());
        }
    }

    #[test]
    fn tangent_bound_improves_with_the_sum(mu_v in rat(0, 3, 8), extra in rat(0, 10, 8), ds in rat(0, 3, 8)) {
        // admissible sums: beta2_p + beta2_V >= (2 - mu_p) + (2 - mu_V)
        let s = int(4) - &mu_v + extra;
        prop_assert!(tangent_bound(&mu_v, &(&s + &ds)) <= tangent_bound(&mu_v, &s));
        prop_assert!(tangent_bound(&mu_v, &s) <= (int(4) - &mu_v) / int(2));
    }

    #[test]
    fn freeness_witness_verifies_and_survives_growth(
        mu in mu(), m2 in rat(0, 40, 8), d in rat(0, 6, 8), dm in rat(0, 5, 4), dd in rat(0, 3, 4)
    ) {
        if let Some(w) = freeness_witness(&mu, &m2, &d, &cfg()).unwrap() {
            prop_assert!(w.all_positive());
            prop_assert!(freeness_at(&mu, &m2, &d, Some(&w), &cfg()).unwrap().established());
            prop_assert!(freeness_at(&mu, &(&m2 + &dm), &(&d + &dd), Some(&w), &cfg()).unwrap().established());
        }
    }

    #[test]
    fn separation_witness_verifies(
        mp in mu(), mq in mu(), m2 in rat(0, 40, 8),
        dp in rat(0, 6, 8), dq in rat(0, 6, 8), dpq in rat(0, 8, 8)
    ) {
        let searched = separation(&mp, &mq, &m2, &dp, &dq, &dpq, None, &cfg()).unwrap();
        if let Some(w) = separation_witness(&mp, &mq, &m2, &dp, &dq, &dpq, &cfg()).unwrap() {
            prop_assert!(separation(&mp, &mq, &m2, &dp, &dq, &dpq, Some(&w), &cfg()).unwrap().established());
            prop_assert!(searched.established());
        }
    }

    #[test]
    fn tangent_witness_verifies(
        mp in mu(), frac_near in rat(0, 1, 4), m2 in rat(0, 40, 8), dp in rat(0, 6, 8), dz in rat(0, 8, 8)
    ) {
        let mn = &mp * &frac_near;
        if let Some(w) = tangent_witness(&mp, &mn, &m2, &dp, &dz, &cfg()).unwrap() {
            prop_assert!(tangent_separation(&mp, &mn, &m2, &dp, &dz, Some(&w), &cfg()).unwrap().established());
        }
    }

    #[test]
    fn very_ample_scales_up(m2 in rat(8, 60, 8), d in rat(2, 8, 8), t in rat(1, 4, 9)) {
        if very_ample_global(&m2, &d, None, &cfg()).unwrap().established() {
            let v = very_ample_global(&(&t * &t * &m2), &(&t * &d), None, &cfg()).unwrap();
            prop_assert!(v.established());
        }
    }

    #[test]
    fn very_ample_witness_serves_points_and_tangents(m2 in rat(8, 60, 8), d in rat(2, 8, 8)) {
        if let Some(BetaWitness::Single { beta2, beta1 }) = very_ample_witness(&m2, &d, &cfg()) {
            let z = Q::zero();
            let pair = BetaWitness::pair(beta2.clone(), beta1.clone(), beta2.clone(), beta1.clone());
            prop_assert!(separation(&z, &z, &m2, &d, &d, &d, Some(&pair), &cfg()).unwrap().established());
            let beta2_copy = beta2.clone();
            let tw = BetaWitness::tangent(beta2.clone(), beta2, beta1.clone());
            prop_assert!(tangent_separation(&z, &z, &m2, &d, &d, Some(&tw), &cfg()).unwrap().established());
            let single = BetaWitness::single(beta2_copy, beta1);
            prop_assert!(freeness_at(&z, &m2, &d, Some(&single), &cfg()).unwrap().established());
        }
    }

    #[test]
    fn sqrt2_bound_witness_verifies(m2 in rat(6, 40, 20), d in rat(2, 8, 40)) {
        let v = very_ample_sqrt2_bound(&m2, &d);
        // 2 + sqrt 2 < 3.4143 and 6 + 4 sqrt 2 < 11.6569
        if d >= q(34143, 10000) && m2 >= q(116569, 10000) {
            prop_assert!(v.established());
        }
        if d <= int(3) || m2 <= q(1165, 100) {
            prop_assert!(!v.established());
        }
        if let Some(w) = &v.witness {
            prop_assert!(very_ample_global(&m2, &d, Some(w), &cfg()).unwrap().established());
        }
    }

    #[test]
    fn threshold_is_where_a_coefficient_reaches_one(
        curves in prop::collection::vec((0i64..8, 0i64..24, 1u32..3), 1..5),
        cap in any::<bool>(),
    ) {
        let curves: Vec<LocalCurve> = curves
            .iter()
            .enumerate()
            .map(|(i, (b, d, m))| LocalCurve::new(format!("C{i}"), q(*b, 8), q(*d, 8), *m))
            .collect();
        let config = LocalConfig::new(curves.clone()).unwrap();
        let mode = if cap { PlcMode::CapThree } else { PlcMode::Basic };
        let res = plc_threshold(&config, mode).unwrap();
        if cap && config.mu() >= int(3) {
            prop_assert!(!res.warnings.is_empty() || res.outcome == PlcOutcome::Plc);
            return Ok(());
        }
        match res.outcome {
            PlcOutcome::Plc => prop_assert!(curves.iter().all(|c| &c.b + &c.d <= int(1))),
            PlcOutcome::Threshold { c, .. } => {
                prop_assert!(!c.is_negative());
                prop_assert!(curves.iter().all(|x| &x.b + &c * &x.d <= int(1)));
                if !cap {
                    prop_assert!(curves.iter().any(|x| &x.b + &c * &x.d == int(1)));
                } else {
                    let mu = config.mu();
                    prop_assert!(c <= (int(3) - &mu) / config.m_p());
                }
            }
        }
    }

    #[test]
    fn hirzebruch_nef_test_matches_intersections(n in 0u32..6, x in rat(-3, 8, 6), y in rat(-5, 30, 6)) {
        let s = SurfaceModel::hirzebruch(n);
        let cone = ConeDescription::hirzebruch(&s, n).unwrap();
        let m = DivisorClass::new(s.lattice(), vec![x.clone(), y.clone()]).unwrap();
        let mg = &y - int(n as i64) * &x;
        let nef = !mg.is_negative() && !x.is_negative();
        prop_assert_eq!(cone.is_nef(&m).unwrap(), nef);
        if nef {
            let d = cone.min_degree(&m, CurveFilter::All).unwrap();
            prop_assert_eq!(d, if mg < x { mg } else { x });
        }
    }

    #[test]
    fn tangential_order_lies_between_mu_and_twice_mu(
        mults in prop::collection::vec(0u32..4, 3),
        near in prop::collection::vec(0u32..4, 3),
        coeffs in prop::collection::vec(rat(0, 2, 6), 3),
    ) {
        let mut s = SurfaceModel::hirzebruch(2);
        let f = s.curve("F").unwrap().class.clone();
        s.add_curve("F1", f).unwrap();
        let names = ["G", "F", "F1"];
        let mut p = PointSpec::new("p");
        for (c, k) in names.iter().zip(&mults) {
            if *k > 0 {
                p = p.with(*c, *k);
            }
        }
        s.add_point(p).unwrap();
        let mut t = TangentSpec::new("v", "p");
        for ((c, k), j) in names.iter().zip(&mults).zip(&near) {
            if *k > 0 {
                t = t.with_near(*c, (*j).min(*k));
            }
        }
        s.add_tangent(t).unwrap();
        let b = QDivisor::from_pairs(names.iter().zip(&coeffs).map(|(c, x)| (c.to_string(), x.clone())));
        let o = s.ord_tangential(&b, "v").unwrap();
        prop_assert_eq!(&o.at_point, &s.ord_at(&b, "p").unwrap());
        prop_assert!(o.at_point <= o.along_tangent && o.along_tangent <= int(2) * &o.at_point);
    }
}
