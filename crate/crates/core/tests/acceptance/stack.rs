use std::collections::BTreeSet;

use tdspec::analysis::check_sat;
use tdspec::compile::CompileOptions;
use tdspec::semantics::{sat_word, Word};
use tdspec::syntax::{parse_qddc, Formula};

const SIGNALS: [&str; 5] = ["a", "b", "c", "d", "e"];

fn waveforms() -> Vec<String> {
    SIGNALS.iter().map(|x| format!("[!{x}]^<u{x}>^[{x}]^<v{x}>^[!{x}]")).collect()
}

fn before(x: &str, y: &str) -> String {
    format!("ext^<{x}>^ext^<{y}>^ext")
}

/// First on, last off, in the order a, b, c, d, e.
fn ordered() -> Vec<String> {
    let mut out = waveforms();
    for w in SIGNALS.windows(2) {
        out.push(before(&format!("u{}", w[0]), &format!("u{}", w[1])));
        out.push(before(&format!("v{}", w[1]), &format!("v{}", w[0])));
    }
    out
}

/// First on, last off, in any order: slots `u1..u5` and `v5..v1` are matched
/// one to one with the signals' rises and falls.
fn unordered() -> Vec<String> {
    let mut out = waveforms();
    for i in 1..5 {
        out.push(before(&format!("u{i}"), &format!("u{}", i + 1)));
        out.push(before(&format!("v{}", i + 1), &format!("v{i}")));
    }
    for k in ["u", "v"] {
        let slots: Vec<String> = (1..=5).map(|i| format!("{k}{i}")).collect();
        let named: Vec<String> = SIGNALS.iter().map(|x| format!("{k}{x}")).collect();
        out.push(format!("[[({}) <=> ({})]]", slots.join(" || "), named.join(" || ")));
        let mut apart = vec![];
        for i in 0..5 {
            for j in i + 1..5 {
                apart.push(format!("!({} && {})", slots[i], slots[j]));
            }
        }
        out.push(format!("[[{}]]", apart.join(" && ")));
    }
    // Each nominal marks a single point, so "some point has both" is
    // equivalent to its negation-free form below.
    for i in 1..=5 {
        for x in SIGNALS {
            out.push(format!(
                "(true^<u{i} && u{x}>^true && true^<v{i} && v{x}>^true) || ([[!(u{i} && u{x})]] && [[!(v{i} && v{x})]])"
            ));
        }
    }
    out
}

fn alphabet(parts: &[String]) -> Vec<String> {
    let mut noms = BTreeSet::new();
    for p in parts {
        for tok in p.split(|c: char| !c.is_alphanumeric()) {
            if tok.len() == 2 && (tok.starts_with('u') || tok.starts_with('v')) {
                noms.insert(tok.to_string());
            }
        }
    }
    SIGNALS.iter().map(|s| s.to_string()).chain(noms).collect()
}

struct Conjunct {
    f: Formula,
    noms: BTreeSet<String>,
}

fn conjuncts(parts: &[String]) -> Vec<Conjunct> {
    let sigma = alphabet(parts);
    parts
        .iter()
        .map(|p| {
            let f = parse_qddc(p, &sigma).unwrap_or_else(|e| panic!("{p}: {e}"));
            let noms = f.free_vars().into_iter().filter(|v| !SIGNALS.contains(&v.as_str())).collect();
            Conjunct { f, noms }
        })
        .collect()
}

/// The whole formula, each nominal pinned to one point.
fn closed_formula(parts: &[String]) -> Formula {
    let sigma = alphabet(parts);
    let guards = sigma[5..].iter().map(|u| format!("scount {u} = 1"));
    let text: Vec<String> = guards.chain(parts.iter().map(|p| format!("({p})"))).collect();
    parse_qddc(&text.join(" && "), &sigma).unwrap()
}

/// Exhaustive search for one point per nominal making every conjunct true,
/// checking each conjunct as soon as its nominals are placed.
fn valuation(w: &Word, parts: &[String]) -> Option<Word> {
    let cs = conjuncts(parts);
    let order: Vec<String> = alphabet(parts)[5..].to_vec();
    let mut ready: Vec<Vec<usize>> = vec![vec![]; order.len()];
    for (i, c) in cs.iter().enumerate() {
        let last = c.noms.iter().map(|u| order.iter().position(|o| o == u).unwrap()).max().unwrap_or(0);
        ready[last].push(i);
    }
    fn go(w: &Word, k: usize, order: &[String], ready: &[Vec<usize>], cs: &[Conjunct]) -> Option<Word> {
        if k == order.len() {
            return Some(w.clone());
        }
        (0..w.len()).find_map(|p| {
            let wk = w.with_column(&order[k], 1 << p);
            if ready[k].iter().all(|&i| sat_word(&wk, &cs[i].f)) {
                go(&wk, k + 1, order, ready, cs)
            } else {
                None
            }
        })
    }
    go(w, 0, &order, &ready, &cs)
}

/// Twelve points; the signals rise at 1..=5 in `order` and fall at 6..=10
/// in reverse.
fn stacked(order: [usize; 5]) -> Word {
    let letters = (0..12)
        .map(|t| {
            order.iter().enumerate().fold(0u64, |l, (rank, &sig)| {
                let high = rank + 1 <= t && t < 10 - rank;
                l | (high as u64) << sig
            })
        })
        .collect();
    Word::new(&SIGNALS, letters)
}

pub fn stacks() -> Result<String, String> {
    let (ord, un) = (ordered(), unordered());
    let sigma = alphabet(&ord);
    let f = closed_formula(&ord);
    let v = check_sat(&f, &sigma, CompileOptions::default()).map_err(|e| e.to_string())?;
    let w = v.witness.ok_or("ordered stack reported unsatisfiable")?;
    if !sat_word(&w, &f) || valuation(&w.project(&SIGNALS), &ord).is_none() {
        return Err(format!("ordered witness does not replay: {}", w.to_trace()));
    }
    let canonical = stacked([0, 1, 2, 3, 4]);
    let permuted = stacked([1, 3, 0, 4, 2]);
    let fu = closed_formula(&un);
    for (name, word) in [("canonical", &canonical), ("permuted", &permuted)] {
        let full = valuation(word, &un).ok_or(format!("unordered stack rejects the {name} word"))?;
        if !sat_word(&full, &fu) {
            return Err(format!("unordered {name} valuation does not replay"));
        }
    }
    match (valuation(&canonical, &ord), valuation(&permuted, &ord)) {
        (Some(full), None) if sat_word(&full, &f) => {}
        (None, _) => return Err("ordered stack rejects the canonical word".into()),
        (Some(_), Some(_)) => return Err("ordered stack accepts the permuted word".into()),
        _ => return Err("ordered canonical valuation does not replay".into()),
    }
    Ok(format!(
        "ordered: satisfiable ({}-letter witness replayed), accepts canonical; unordered ({} variables): accepts canonical and permuted (b,d,a,e,c), which ordered rejects",
        w.len(),
        alphabet(&un).len()
    ))
}
