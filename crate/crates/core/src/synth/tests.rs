use super::*;
use crate::analysis::{model_check, VerdictKind};
use crate::compile::dfa_of;
use crate::syntax::{parse_prop, parse_secenl, parse_spec_file};
use crate::translate::aleph;

fn names(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

fn monitor(secenl: &str, sigma: &[&str]) -> Dfa {
    dfa_of(&aleph(&parse_secenl(secenl, sigma, &[] as &[&str]).unwrap()), sigma).unwrap()
}

fn game(req: &Dfa, conv: Convention) -> SafetyGame {
    build_game(req, &names(&["i"]), &names(&["o"]), conv).unwrap()
}

fn closed_loop_holds(c: &Controller, req: &Dfa) -> bool {
    model_check(&c.to_model(), req).unwrap().kind == VerdictKind::Holds
}

#[test]
fn copy_spec_game() {
    let req = monitor("pref([[i => o]])", &["i", "o"]);
    let g = game(&req, Convention::Mealy);
    assert_eq!(g.num_nodes, 3);
    assert_eq!((0..g.num_nodes).filter(|&s| g.is_bad(s)).count(), 1);
    let st = solve_safety(&g);
    assert!(st.realizable(&g));
    assert_eq!(st.allowed(&g, g.start, 1), &[1]);
    assert_eq!(st.allowed(&g, g.start, 0), &[0, 1]);
    let c = extract_controller(&g, &st, &[]).unwrap();
    assert_eq!(c.num_states, 1);
    assert_eq!(c.run(&[0, 1, 1, 0]), vec![0, 1, 1, 0]);
    assert!(closed_loop_holds(&c, &req));
    assert_eq!(Controller::from_json_str(&c.to_json_string()).unwrap(), c);
}

#[test]
fn partitions_and_trivial_games() {
    let req = monitor("pref([[i => o]])", &["i", "o"]);
    assert!(build_game(&req, &names(&["i", "o"]), &names(&["o"]), Convention::Mealy).is_err());
    assert!(build_game(&req, &names(&["i"]), &names(&[]), Convention::Mealy).is_err());
    let u = Dfa::universal(names(&["i", "o"]));
    let g = game(&u, Convention::Mealy);
    let st = solve_safety(&g);
    assert!(st.winning.iter().enumerate().all(|(s, &w)| w || g.is_bad(s as u32)));
    assert!(st.realizable(&g));
}

#[test]
fn prediction_is_unrealizable() {
    let req = monitor("anti(<o>^<!i>) && anti(<!o>^<i>)", &["i", "o"]);
    let g = game(&req, Convention::Mealy);
    let st = solve_safety(&g);
    assert!(!st.realizable(&g));
    let Err(SynthError::Unrealizable(ex)) = extract_controller(&g, &st, &[]) else { panic!("expected unrealizable") };
    assert!(ex.open_loop);
    let xs = ex.inputs.letters.clone();
    // Every output response to the explanation reaches a losing node.
    for ys in 0..1u64 << xs.len() {
        let mut s = g.start;
        let mut lost = false;
        for (k, &x) in xs.iter().enumerate() {
            s = g.succ(s, x, ys >> k & 1);
            lost |= g.is_bad(s);
        }
        assert!(lost, "outputs {ys:b}");
    }
}

#[test]
fn moore_cannot_see_the_input() {
    let req = monitor("pref([[i => o]])", &["i", "o"]);
    let g = game(&req, Convention::Moore);
    let st = solve_safety(&g);
    let c = extract_controller(&g, &st, &[]).unwrap();
    assert_eq!(c.run(&[0, 1, 0]), vec![1, 1, 1]);
    assert!(closed_loop_holds(&c, &req));
    let req = monitor("pref([[i <=> o]])", &["i", "o"]);
    assert!(!solve_safety(&game(&req, Convention::Moore)).realizable(&g));
    assert!(solve_safety(&game(&req, Convention::Mealy)).realizable(&g));
}

#[test]
fn preferences_break_ties() {
    let req = monitor("pref([[i => o]])", &["i", "o"]);
    let g = game(&req, Convention::Mealy);
    let st = solve_safety(&g);
    let sig = names(&["i", "o", "Yi", "Yo"]);
    let c = extract_controller(&g, &st, &[parse_prop("o", &sig).unwrap()]).unwrap();
    assert_eq!(c.run(&[0, 0]), vec![1, 1]);
    // Hold the output one extra cycle after the input falls.
    let c = extract_controller(&g, &st, &[parse_prop("Yi => o", &sig).unwrap()]).unwrap();
    assert_eq!(c.run(&[1, 0, 0, 0]), vec![1, 1, 0, 0]);
    assert_eq!(c.num_states, 2);
    assert!(closed_loop_holds(&c, &req));
    let bad = parse_prop("i", &sig).unwrap();
    assert!(matches!(extract_controller(&g, &st, &[bad]), Err(SynthError::Preference(_))));
}

#[test]
fn strategy_is_maximally_permissive() {
    let s = ["i", "o"];
    for text in ["pref([[i => o]]) && anti({o}^{o})", "pref([[o => !i]] || pt)", "anti(<!i>^{i && !o})"] {
        let req = monitor(text, &s);
        let g = game(&req, Convention::Mealy);
        let st = solve_safety(&g);
        for (k, ys) in st.safe.iter().enumerate() {
            for drop in ys {
                let mut cut = st.clone();
                cut.safe[k].retain(|y| y != drop);
                if cut.safe[k].is_empty() {
                    continue;
                }
                let c = extract_controller(&g, &cut, &[]).unwrap();
                assert!(closed_loop_holds(&c, &req), "{text}: dropping {drop} at {k}");
            }
        }
    }
}

#[test]
fn strengthening_never_helps() {
    let s = ["i", "o"];
    let base = "pref([[i => o]])";
    for extra in ["anti({o}^{o})", "pref([[!o]])", "anti(<o>^<!i>)"] {
        let weak = solve_safety(&game(&monitor(base, &s), Convention::Mealy));
        let g = game(&monitor(&format!("{base} && {extra}"), &s), Convention::Mealy);
        let strong = solve_safety(&g);
        assert!(!strong.realizable(&g) || weak.winning.iter().any(|&w| w), "{extra}");
        let gw = game(&monitor(base, &s), Convention::Mealy);
        assert!(weak.realizable(&gw) || !strong.realizable(&g));
    }
}

const MINEPUMP: &str = include_str!("../../fixtures/minepump.spec");

#[test]
fn minepump_controller() {
    let spec = parse_spec_file(MINEPUMP).unwrap();
    let (c, report) = synthesize_spec(&spec, &[], Convention::Mealy, CompileOptions::default()).unwrap();
    assert_eq!(report.controller_states, c.num_states);
    let (req, _) = crate::compile::compile_spec(&spec, CompileOptions::default()).unwrap();
    assert!(closed_loop_holds(&c, &req));
    // Arms completing an assumption violation the environment started may
    // do anything; every other arm keeps the pump off under methane.
    let assumptions = spec.assumes.iter().map(|a| a.to_secenl()).reduce(crate::syntax::SeceNl::and).unwrap();
    let a = dfa_of(&aleph(&assumptions), &spec.sigma()).unwrap().lift(&[c.inputs.clone(), c.outputs.clone()].concat()).unwrap();
    let mut alive = a.accepting.clone();
    loop {
        let before = alive.clone();
        for q in 0..a.num_states {
            alive[q as usize] |= (0..a.letters()).any(|l| before[a.next(q, l) as usize]);
        }
        if alive == before {
            break;
        }
    }
    let doomed = |q: u32| (0..a.letters()).all(|l| !alive[a.next(q, l) as usize]);
    let hch4 = c.inputs.iter().position(|v| v == "HCH4").unwrap();
    let pump = c.outputs.iter().position(|v| v == "PUMPON").unwrap();
    let m = c.inputs.len();
    let mut seen = std::collections::HashSet::from([(c.initial, a.initial)]);
    let mut stack = vec![(c.initial, a.initial)];
    let mut exploited = 0;
    while let Some((s, q)) = stack.pop() {
        for x in 0..1u64 << m {
            let (y, t) = c.step(s, x);
            let r = a.next(q, x | y << m);
            if doomed(r) {
                exploited += 1;
                continue;
            }
            if x >> hch4 & 1 == 1 {
                assert_eq!(y >> pump & 1, 0, "state {s}, input {x}");
            }
            if seen.insert((t, r)) {
                stack.push((t, r));
            }
        }
    }
    eprintln!("minepump: {} controller states, {exploited} arms answer a broken assumption", c.num_states);
}

#[test]
fn arbiter_controller() {
    let spec = parse_spec_file(include_str!("../../fixtures/arbiter_synth.spec")).unwrap();
    let (c, _) = synthesize_spec(&spec, &[], Convention::Mealy, CompileOptions::default()).unwrap();
    let (req, _) = crate::compile::compile_spec(&spec, CompileOptions::default()).unwrap();
    assert!(closed_loop_holds(&c, &req));
    let m = c.inputs.len();
    let ack = |y: u64, k: usize| y >> c.outputs.iter().position(|v| *v == format!("ack{k}")).unwrap() & 1;
    let req_ = |x: u64, k: usize| x >> c.inputs.iter().position(|v| *v == format!("req{k}")).unwrap() & 1;
    for s in 0..c.num_states {
        for x in 0..1u64 << m {
            let (y, _) = c.step(s, x);
            assert!(y.count_ones() <= 1, "state {s}, input {x}");
            for k in 1..=3 {
                assert!(ack(y, k) <= req_(x, k), "state {s}, input {x}");
            }
            // Deadtime zero: some pending request is always served.
            assert_eq!(x == 0, y == 0, "state {s}, input {x}");
        }
    }
    eprintln!("arbiter: {} controller states", c.num_states);
}
