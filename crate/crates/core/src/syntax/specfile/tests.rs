use super::*;
use crate::semantics::secenl::sat_secenl;
use crate::semantics::Word;

const MINEPUMP: &str = include_str!("../../../fixtures/minepump.spec");

#[test]
fn interface_only() {
    let s = parse_spec_file("interface { input a; output b; } main() { }").unwrap();
    assert_eq!(s.sigma(), vec!["a", "b"]);
    assert!(s.assumes.is_empty() && s.reqs.is_empty());
    assert_eq!(s.requirement(), None);
}

#[test]
fn rejects_bad_files() {
    for text in [
        "interface { input a; input a; } main() { }",
        "interface { input a; } main() { req missing(a); }",
        "interface { input a; constant a = 1; } main() { }",
        "interface { input a; } dc f() { <a>; } dc f() { [a]; } main() { }",
        "interface { input a; } main() { maybe <a>; }",
        "interface { input a; } td t() { a: 1<a>0; } main() { req t(); }",
        "interface { input a; constant k = -1; } main() { }",
    ] {
        assert!(parse_spec_file(text).is_err(), "{text}");
    }
}

#[test]
fn dc_blocks_and_bare_items() {
    let text = "interface { input p; output q; } dc resp(x) { [[x => q]]; } \
                main() { assume (<p>^true); req resp(p); req (pt || [q]); }";
    let s = parse_spec_file(text).unwrap();
    assert_eq!((s.assumes.len(), s.reqs.len()), (1, 2));
    let z = s.requirement().unwrap();
    let sigma = s.sigma();
    let ok = Word::from_sets(&sigma, &[&["p", "q"], &["q"], &["q"]]);
    let bad = Word::from_sets(&sigma, &[&["p"], &["q"]]);
    assert!(sat_secenl(&ok, &z));
    assert!(!sat_secenl(&bad, &z));
}

#[test]
fn lone_diagram_is_kept() {
    let text = "interface { input p; } td rise(x) { x: 0 1; } main() { req rise(p); }";
    let s = parse_spec_file(text).unwrap();
    assert!(matches!(s.reqs[0], MainItem::Diagram(_)));
    assert!(s.reqs[0].to_string().starts_with("pref("));
}

#[test]
fn minepump_fixture() {
    let s = parse_spec_file(MINEPUMP).unwrap();
    assert_eq!(s.name.as_deref(), Some("minepump"));
    assert_eq!(s.inputs, vec!["HH2O", "HCH4"]);
    assert_eq!(s.outputs, vec!["ALARM", "PUMPON"]);
    assert_eq!(s.auxvars, vec!["DH2O"]);
    assert_eq!(s.environment(), vec!["HH2O", "HCH4", "DH2O"]);
    assert_eq!(s.constants["zeta"], 14);
    assert_eq!(s.softreqs.len(), 1);
    assert_eq!(s.macros.len(), 5);
    assert_eq!((s.assumes.len(), s.reqs.len()), (7, 5));
    assert!(s.assumes[2].to_string().contains("~>"));
}
