use antloop::ant::analyze;
use antloop::check::{check_entry, CheckConfig};
use antloop::corpus::curated;
use antloop::loopfront::parse_locus;
use antloop::semilinear::format::to_text;
use antloop::semilinear::set_equivalent;

#[test]
fn expected_loci_hold() {
    for e in curated() {
        let rep = analyze(&e.program).unwrap();
        if let Some(text) = &e.expected_locus {
            let want = parse_locus(text, &rep.params).unwrap();
            assert!(set_equivalent(&rep.ant_set, &want).unwrap(), "{}: got {}", e.id, to_text(&rep.ant_set));
        }
    }
}

#[test]
fn curated_entries_pass_the_property_suite() {
    let cfg = CheckConfig::default();
    for e in curated() {
        let t = std::time::Instant::now();
        let r = check_entry(&e, &cfg);
        eprintln!("{} {:?}", e.id, t.elapsed());
        assert!(r.passed(), "{}", r.to_text());
    }
}
