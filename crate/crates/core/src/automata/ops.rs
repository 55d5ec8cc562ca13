use std::collections::{BTreeSet, HashMap};

use crate::syntax::{Formula, Prop};

use super::{check_vars, minimize, AutomataError, Dfa, Nfa};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoolOp {
    And,
    Or,
}

fn sorted_vars<'a>(it: impl IntoIterator<Item = &'a String>) -> Vec<String> {
    it.into_iter().cloned().collect::<BTreeSet<_>>().into_iter().collect()
}

fn letter_test(p: &Prop, vars: &[String]) -> Vec<bool> {
    p.truth_table(vars).expect("proposition variables are in the alphabet")
}

/// Saturating counter that distinguishes every value up to `c + 1`.
fn bump(x: u64, c: u64) -> u64 {
    (x + 1).min(c + 1)
}

/// Minimal automaton of an atomic formula over its own variables.
pub fn atom_automaton(f: &Formula, cap: usize) -> Result<Dfa, AutomataError> {
    let vars = sorted_vars(&f.free_vars());
    check_vars(vars.len())?;
    // States are (letters read saturated at 2, flag, flag / counter).
    let d = match f {
        Formula::Begin(p) => {
            let t = letter_test(p, &vars);
            Dfa::explore(vars, 0u8, |&s, a| if s == 0 { 1 + t[a as usize] as u8 } else { s }, |&s| s == 2, cap)?
        }
        Formula::All(p) => {
            let t = letter_test(p, &vars);
            Dfa::explore(vars, 0u8, |&s, a| if s != 2 && t[a as usize] { 1 } else { 2 }, |&s| s == 1, cap)?
        }
        Formula::AllButLast(p) => {
            let t = letter_test(p, &vars);
            // (length so far, all but the last letter satisfied, last satisfied)
            Dfa::explore(
                vars,
                (0u8, true, true),
                |&(n, ok, last), a| (n.saturating_add(1).min(2), if n == 0 { true } else { ok && last }, t[a as usize]),
                |&(n, ok, _)| n >= 1 && ok,
                cap,
            )?
        }
        Formula::Unit(p) => {
            let t = letter_test(p, &vars);
            Dfa::explore(
                vars,
                (0u8, true),
                |&(n, ok), a| (n.saturating_add(1).min(3), if n == 0 { t[a as usize] } else { ok }),
                |&(n, ok)| n == 2 && ok,
                cap,
            )?
        }
        Formula::Slen(c, k) => {
            let (c, k) = (*c, *k);
            // Letters read; slen is one less.
            Dfa::explore(vars, 0u64, move |&n, _| bump(n, k + 1), move |&n| n > 0 && c.holds(n - 1, k), cap)?
        }
        Formula::Scount(p, c, k) => {
            let (c, k) = (*c, *k);
            let t = letter_test(p, &vars);
            Dfa::explore(
                vars,
                (false, 0u64),
                move |&(_, n), a| (true, if t[a as usize] { bump(n, k) } else { n }),
                move |&(started, n)| started && c.holds(n, k),
                cap,
            )?
        }
        Formula::Sdur(p, c, k) => {
            let (c, k) = (*c, *k);
            let t = letter_test(p, &vars);
            // (started, count before the last letter, last satisfied)
            Dfa::explore(
                vars,
                (false, 0u64, false),
                move |&(started, n, last), a| (true, if started && last { bump(n, k) } else { n }, t[a as usize]),
                move |&(started, n, _)| started && c.holds(n, k),
                cap,
            )?
        }
        _ => panic!("not an atomic formula: {f}"),
    };
    Ok(minimize(&d))
}

/// Intersection or union over the union of both alphabets.
pub fn product(a: &Dfa, b: &Dfa, op: BoolOp, cap: usize) -> Result<Dfa, AutomataError> {
    let vars = sorted_vars(a.vars.iter().chain(&b.vars));
    check_vars(vars.len())?;
    let (a, b) = (a.lift(&vars)?, b.lift(&vars)?);
    let d = Dfa::explore(
        vars,
        (a.initial, b.initial),
        |&(x, y), l| (a.next(x, l), b.next(y, l)),
        |&(x, y)| match op {
            BoolOp::And => a.is_accepting(x) && b.is_accepting(y),
            BoolOp::Or => a.is_accepting(x) || b.is_accepting(y),
        },
        cap,
    )?;
    Ok(minimize(&d))
}

/// Complement relative to the non-empty words.
pub fn complement(a: &Dfa) -> Dfa {
    let l = a.letters() as usize;
    let n = a.num_states;
    let mut delta = a.delta.clone();
    delta.extend_from_slice(&a.delta[a.initial as usize * l..(a.initial as usize + 1) * l]);
    let mut accepting: Vec<bool> = a.accepting.iter().map(|x| !x).collect();
    accepting.push(false);
    minimize(&Dfa { vars: a.vars.clone(), num_states: n + 1, initial: n, accepting, delta })
}

/// Subset construction followed by minimization.
pub fn determinize(nfa: &Nfa, cap: usize) -> Result<Dfa, AutomataError> {
    check_vars(nfa.vars.len())?;
    let l = nfa.letters();
    let mut ids: HashMap<Vec<u32>, u32> = HashMap::new();
    let mut sets: Vec<Vec<u32>> = Vec::new();
    let mut accepting = vec![false];
    let mut delta: Vec<u32> = Vec::new();
    let mut buf: Vec<u32> = Vec::new();
    let mut step = |from: &[u32], a: u64, sets: &mut Vec<Vec<u32>>, accepting: &mut Vec<bool>| {
        buf.clear();
        for &s in from {
            buf.extend_from_slice(nfa.succ(s, a));
        }
        buf.sort_unstable();
        buf.dedup();
        if let Some(&id) = ids.get(&buf) {
            return Ok(id);
        }
        let id = accepting.len() as u32;
        if id as usize > cap {
            return Err(AutomataError::StateCap { cap });
        }
        accepting.push(buf.iter().any(|&s| nfa.accepting[s as usize]));
        ids.insert(buf.clone(), id);
        sets.push(buf.clone());
        Ok(id)
    };
    let mut init = nfa.initial.clone();
    init.sort_unstable();
    init.dedup();
    for a in 0..l {
        delta.push(step(&init, a, &mut sets, &mut accepting)?);
    }
    let mut head = 0;
    while head < sets.len() {
        let cur = sets[head].clone();
        head += 1;
        for a in 0..l {
            delta.push(step(&cur, a, &mut sets, &mut accepting)?);
        }
    }
    let d = Dfa { vars: nfa.vars.clone(), num_states: accepting.len() as u32, initial: 0, accepting, delta };
    Ok(minimize(&d))
}

/// `{ u x v : u x in L(a), x v in L(b) }` for a single letter `x`.
pub fn fusion_concat(a: &Dfa, b: &Dfa) -> Result<Nfa, AutomataError> {
    let vars = sorted_vars(a.vars.iter().chain(&b.vars));
    check_vars(vars.len())?;
    let (a, b) = (a.lift(&vars)?, b.lift(&vars)?);
    let na = a.num_states;
    let mut accepting = vec![false; na as usize];
    accepting.extend_from_slice(&b.accepting);
    Ok(Nfa::from_fn(vars, na + b.num_states, vec![a.initial], accepting, |s, x, out| {
        if s < na {
            let t = a.next(s, x);
            out.push(t);
            if a.is_accepting(t) {
                out.push(na + b.next(b.initial, x));
            }
        } else {
            out.push(na + b.next(s - na, x));
        }
    }))
}

/// Every length-one word, plus fusion chains of words of `L(a)`.
pub fn fusion_star(a: &Dfa) -> Nfa {
    let n = a.num_states;
    let (one, start) = (n, n + 1);
    let mut accepting = a.accepting.clone();
    accepting.extend([true, false]);
    Nfa::from_fn(a.vars.clone(), n + 2, vec![start], accepting, |s, x, out| {
        if s == start {
            out.push(a.next(a.initial, x));
            out.push(one);
        } else if s < n {
            let t = a.next(s, x);
            out.push(t);
            if a.is_accepting(t) {
                out.push(a.next(a.initial, x));
            }
        }
    })
}

/// Existential abstraction of `p`: the alphabet loses `p`.
pub fn project(a: &Dfa, p: &str) -> Result<Nfa, AutomataError> {
    let i = a.vars.iter().position(|v| v == p).ok_or_else(|| AutomataError::UnknownVariable(p.to_string()))?;
    let vars: Vec<String> = a.vars.iter().filter(|v| *v != p).cloned().collect();
    let low = (1u64 << i) - 1;
    Ok(Nfa::from_fn(vars, a.num_states, vec![a.initial], a.accepting.clone(), |s, x, out| {
        let spread = (x & low) | (x & !low) << 1;
        out.push(a.next(s, spread));
        out.push(a.next(s, spread | 1 << i));
    }))
}
