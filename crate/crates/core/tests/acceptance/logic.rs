use std::collections::BTreeSet;

use tdspec::analysis::{is_prefix_closed, monitor_run};
use tdspec::compile::dfa_of;
use tdspec::gen::{diagram_family, secenl_family, Gen};
use tdspec::par;
use tdspec::semantics::td::valuations;
use tdspec::semantics::{sat_interval, sat_prefixes, sat_secenl_prefixes, sat_timing_diagram, Word};
use tdspec::syntax::{parse_qddc, Formula, Liveness, SeceNl};
use tdspec::timing_diagram::xi;
use tdspec::translate::{aleph, aleph_atom};

pub fn names(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

fn accepts(f: &Formula, sigma: &[String], w: &Word) -> Result<bool, String> {
    let d = dfa_of(f, sigma).map_err(|e| e.to_string())?;
    Ok(*monitor_run(&d, w).map_err(|e| e.to_string())?.last().unwrap())
}

fn expect(cond: bool, msg: &str) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.to_string())
    }
}

pub fn example_one() -> Result<String, String> {
    let s = names(&["p"]);
    let mut letters = vec![1; 7];
    letters.push(0);
    let w = Word::new(&s, letters);
    let (open, closed) = (parse_qddc("[p]", &s).unwrap(), parse_qddc("[[p]]", &s).unwrap());
    expect(accepts(&open, &s, &w)?, "A([p]) rejects")?;
    expect(!accepts(&closed, &s, &w)?, "A([[p]]) accepts")?;
    expect(sat_interval(&w, 0, 7, &open) && !sat_interval(&w, 0, 7, &closed), "oracle disagrees")?;
    Ok(format!("{w}: [p] accepted, [[p]] rejected, oracle agrees"))
}

pub fn example_two() -> Result<String, String> {
    let s = names(&["p", "q", "r"]);
    let mut sets: Vec<&[&str]> = vec![&["p"]; 4];
    sets.extend([&["p", "q", "r"] as &[&str]; 4]);
    sets.extend([&["q", "r"] as &[&str]; 3]);
    let w = Word::from_sets(&s, &sets);
    let d = parse_qddc("[p]^[[!p && r]]", &s).unwrap();
    expect(accepts(&d, &s, &w)?, "automaton rejects the 11-letter word")?;
    expect(sat_interval(&w, 0, 10, &d), "oracle rejects the 11-letter word")?;
    expect(!sat_interval(&w, 0, 7, &d), "oracle accepts [0,7]")?;
    expect(!accepts(&d, &s, &w.prefix(8))?, "automaton accepts the 8-letter prefix")?;
    Ok("11 letters accepted; [0,7] false".into())
}

/// Every word of length at most `n` is a prefix of one of these.
fn words(s: &[String], n: usize) -> Vec<Word> {
    Word::all_of_len(s, n).collect()
}

pub fn oracle_equivalence() -> Result<String, String> {
    let s = names(&["p", "q"]);
    let mut g = Gen::new(0x0dd);
    let formulas: Vec<Formula> = (0..10_000).map(|_| g.formula(&s, 4, 3)).collect();
    let ws = words(&s, 6);
    let res = par::map(&formulas, |f| -> Result<(usize, bool), String> {
        let d = dfa_of(f, &s).map_err(|e| format!("{f}: {e}"))?;
        let mut bad = 0;
        let mut mixed = (false, false);
        for w in &ws {
            let want = sat_prefixes(w, f);
            bad += (monitor_run(&d, w).unwrap() != want) as usize;
            mixed.0 |= want.iter().any(|&x| x);
            mixed.1 |= want.iter().any(|&x| !x);
        }
        Ok((bad, mixed.0 && mixed.1))
    });
    let mut mismatches = 0;
    let mut contingent = 0;
    for (f, r) in formulas.iter().zip(res) {
        let (bad, mixed) = r?;
        if bad > 0 && mismatches == 0 {
            eprintln!("first mismatch: {f}");
        }
        mismatches += bad;
        contingent += mixed as usize;
    }
    let quantified = formulas.iter().filter(|f| f.to_string().contains("ex ") || f.to_string().contains("all ")).count();
    let detail = format!(
        "{} formulas ({quantified} quantified, {contingent} contingent) x {} words: {mismatches} mismatches",
        formulas.len(),
        (1..=6).map(|n| 4usize.pow(n)).sum::<usize>()
    );
    if mismatches == 0 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

/// Whether some nominal occurs in two operands of one atom.
/// A nominal shared between operands; for one-operand forms, any nominal.
fn shares_nominal(l: &Liveness) -> bool {
    let ops = l.operands();
    if ops.len() == 1 {
        return l.uses_nominals();
    }
    ops.iter().enumerate().any(|(i, a)| ops[i + 1..].iter().any(|b| !a.nominals.is_disjoint(&b.nominals)))
}

fn secenl_corpus() -> Vec<SeceNl> {
    let sys = names(&["p", "q"]);
    let theta = names(&["u", "v", "w"]);
    let mut g = Gen::new(0xa1e);
    let mut out = vec![];
    for k in 0..180 {
        let th: &[String] = if k / 6 % 3 == 0 { &[] } else { &theta };
        out.push(SeceNl::Atom(g.liveness(k % 6, &sys, th, 2, 3)));
    }
    for k in 0..60 {
        let th: &[String] = if k % 2 == 0 { &[] } else { &theta[..2] };
        out.push(g.secenl(&sys, th, 3, 1, 2));
    }
    out
}

pub fn aleph_preservation() -> Result<String, String> {
    let s = names(&["p", "q"]);
    let corpus = secenl_corpus();
    let mut plain = BTreeSet::new();
    let mut shared = BTreeSet::new();
    for z in &corpus {
        for l in z.atoms() {
            if !l.uses_nominals() {
                plain.insert(l.keyword());
            }
            if shares_nominal(l) {
                shared.insert(l.keyword());
            }
        }
    }
    if plain.len() < 6 || shared.len() < 6 {
        return Err(format!("coverage: plain {plain:?}, shared nominals {shared:?}"));
    }
    let ws = words(&s, 6);
    let bad = par::map(&corpus, |z| {
        let f = aleph(z);
        ws.iter().filter(|w| sat_secenl_prefixes(w, z) != sat_prefixes(w, &f)).count()
    });
    let mismatches: usize = bad.iter().sum();
    if let Some(i) = bad.iter().position(|&b| b > 0) {
        eprintln!("first mismatch: {}", corpus[i]);
    }
    let detail = format!(
        "{} formulas, all six operators plain and with shared nominals, words up to length 6: {mismatches} mismatches",
        corpus.len()
    );
    if mismatches == 0 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

pub fn xi_preservation() -> Result<String, String> {
    let s = names(&["p", "q"]);
    let markers = names(&["a", "b"]);
    let mut g = Gen::new(0x7d);
    let diagrams: Vec<_> = (0..100).map(|_| g.timing_diagram(&s, &markers, 2, 6, 2, 3)).collect();
    let checks = par::map(&diagrams, |t| {
        let f = xi(t).formula;
        let (mut n_checks, mut bad) = (0usize, 0usize);
        for n in 1..=7 {
            for w in Word::all_of_len(&s, n) {
                for nu in valuations(t, 0, n - 1) {
                    let wn = nu.iter().fold(w.clone(), |acc, (u, &p)| acc.with_column(u, 1 << p));
                    n_checks += 1;
                    bad += (sat_timing_diagram(&w, 0, n - 1, &nu, t) != sat_interval(&wn, 0, n - 1, &f)) as usize;
                }
            }
        }
        (n_checks, bad)
    });
    let total: usize = checks.iter().map(|c| c.0).sum();
    let mismatches: usize = checks.iter().map(|c| c.1).sum();
    if let Some(i) = checks.iter().position(|c| c.1 > 0) {
        eprintln!("first mismatch:\n{}", diagrams[i]);
    }
    let constrained = diagrams.iter().filter(|t| !t.constraints.is_empty()).count();
    let detail = format!("100 diagrams ({constrained} constrained), {total} (word, valuation) pairs: {mismatches} mismatches");
    if mismatches == 0 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

pub fn linearity() -> Result<String, String> {
    const XI: f64 = 12.0;
    const ALEPH: f64 = 20.0;
    let (mut xi_max, mut aleph_max) = (0f64, 0f64);
    let mut g = Gen::new(0x11);
    let s = names(&["p", "q"]);
    let m = names(&["a", "b", "c"]);
    for n in [10, 30, 100, 300, 1000] {
        let t = diagram_family(n);
        xi_max = xi_max.max(xi(&t).formula.size() as f64 / t.size() as f64);
        let r = g.timing_diagram(&s, &m, 2, n / 2, 2, 3);
        xi_max = xi_max.max(xi(&r).formula.size() as f64 / r.size() as f64);
        let z = secenl_family(n);
        aleph_max = aleph_max.max(aleph(&z).size() as f64 / z.size() as f64);
        for kind in 0..6 {
            let th = names(&["u", "v"]);
            let l = g.liveness(kind, &s, &th, (n as f64).log2() as u32, 3);
            let z = SeceNl::Atom(l);
            aleph_max = aleph_max.max(aleph_atom(match &z {
                SeceNl::Atom(l) => l,
                _ => unreachable!(),
            })
            .size() as f64
                / z.size() as f64);
        }
    }
    let detail = format!("max nodecount ratio: xi {xi_max:.2} (bound {XI}), aleph {aleph_max:.2} (bound {ALEPH})");
    if xi_max <= XI && aleph_max <= ALEPH {
        Ok(detail)
    } else {
        Err(detail)
    }
}

pub fn prefix_closed() -> Result<String, String> {
    let s = names(&["p", "q"]);
    let mut g = Gen::new(0xc105ed);
    let mut atoms = vec![];
    for body in 0..60 {
        let th = if body % 2 == 0 { vec![] } else { names(&["u"]) };
        for kind in 0..6 {
            atoms.push(g.liveness(kind, &s, &th, 3, 3));
        }
    }
    let res = par::map(&atoms, |l| dfa_of(&aleph_atom(l), &s).map(|d| is_prefix_closed(&d)).map_err(|e| format!("{l}: {e}")));
    let mut open = 0;
    for (l, r) in atoms.iter().zip(res) {
        if !r? {
            open += 1;
            eprintln!("not prefix closed: {l}");
        }
    }
    let detail = format!("{} automata (60 bodies x 6 operators): {open} not prefix closed", atoms.len());
    if open == 0 {
        Ok(detail)
    } else {
        Err(detail)
    }
}
