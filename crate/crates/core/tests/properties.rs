use proptest::prelude::*;

use tdspec::analysis::monitor_run;
use tdspec::automata::{minimize, Dfa};
use tdspec::compile::dfa_of;
use tdspec::gen::Gen;
use tdspec::semantics::{sat_prefixes, Word};
use tdspec::syntax::parse_qddc;

fn vars() -> Vec<String> {
    vec!["p".into(), "q".into()]
}

fn letters(n: usize) -> impl Strategy<Value = Vec<u64>> {
    prop::collection::vec(0u64..4, 1..=n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn monitor_agrees_with_oracle(seed in any::<u64>(), ls in letters(8)) {
        let s = vars();
        let f = Gen::new(seed).formula(&s, 3, 3);
        let d = dfa_of(&f, &s).unwrap();
        let w = Word::new(&s, ls);
        prop_assert_eq!(monitor_run(&d, &w).unwrap(), sat_prefixes(&w, &f), "{}", f);
    }

    #[test]
    fn printed_formulas_reparse(seed in any::<u64>()) {
        let s = vars();
        let f = Gen::new(seed).formula(&s, 4, 3);
        let g = parse_qddc(&f.to_string(), &s).unwrap();
        prop_assert_eq!(g.to_string(), f.to_string());
    }

    #[test]
    fn dfa_json_round_trips(seed in any::<u64>()) {
        let s = vars();
        let d = dfa_of(&Gen::new(seed).formula(&s, 3, 2), &s).unwrap();
        let back = Dfa::from_json_str(&d.to_json_string()).unwrap();
        prop_assert_eq!(&back, &d);
    }

    #[test]
    fn compilation_is_deterministic_and_minimal(seed in any::<u64>()) {
        let s = vars();
        let f = Gen::new(seed).formula(&s, 3, 2);
        let d = dfa_of(&f, &s).unwrap();
        prop_assert_eq!(&dfa_of(&f, &s).unwrap(), &d);
        prop_assert_eq!(minimize(&d).num_states, d.num_states);
    }

    #[test]
    fn negation_complements(seed in any::<u64>(), ls in letters(6)) {
        let s = vars();
        let f = Gen::new(seed).formula(&s, 3, 2);
        let w = Word::new(&s, ls);
        let not = parse_qddc(&format!("!({f})"), &s).unwrap();
        let pos = sat_prefixes(&w, &f);
        let neg = sat_prefixes(&w, &not);
        prop_assert!(pos.iter().zip(&neg).all(|(a, b)| a != b));
    }
}
