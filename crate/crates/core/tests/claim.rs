use qreider::claim::{hirzebruch_claim, Part};
use qreider::criteria::SearchConfig;

#[test]
fn claim_holds_for_small_n() {
    let cfg = SearchConfig::default();
    for n in 1..=10 {
        for part in [Part::Free, Part::VeryAmple] {
            let r = hirzebruch_claim(n, part, None, &cfg).unwrap();
            for s in &r.steps {
                let p: Vec<String> = s.report.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
                println!("n={n} {part:?} {:<28} found={} attempts={} {}", s.label, s.report.found, s.report.attempts, p.join(" "));
            }
            assert!(r.success(), "n = {n}, {part:?}");
        }
    }
}
