//! JSON form with propositional edge guards.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::syntax::{parse_prop, Prop};

use super::{check_vars, AutomataError, Dfa};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeJson {
    pub from: u32,
    pub guard: String,
    pub to: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DfaJson {
    pub alphabet: Vec<String>,
    pub states: u32,
    pub initial: u32,
    pub accepting: Vec<u32>,
    pub edges: Vec<EdgeJson>,
}

/// A proposition true exactly on the letters marked in `set` (bit `i` of a
/// letter is `vars[i]`), by Shannon expansion on `vars` in order.
pub fn guard_of(set: &[bool], vars: &[String]) -> Prop {
    assert_eq!(set.len(), 1 << vars.len());
    if set.iter().all(|&x| x) {
        return Prop::True;
    }
    if !set.iter().any(|&x| x) {
        return Prop::False;
    }
    let v = Prop::var(vars[0].clone());
    let lo: Vec<bool> = set.iter().step_by(2).copied().collect();
    let hi: Vec<bool> = set.iter().skip(1).step_by(2).copied().collect();
    let (g0, g1) = (guard_of(&lo, &vars[1..]), guard_of(&hi, &vars[1..]));
    match (g0, g1) {
        (a, b) if a == b => a,
        (Prop::False, Prop::True) => v,
        (Prop::True, Prop::False) => Prop::not(v),
        (Prop::False, b) => Prop::and(v, b),
        (a, Prop::False) => Prop::and(Prop::not(v), a),
        (a, Prop::True) => Prop::or(v, a),
        (Prop::True, b) => Prop::or(Prop::not(v), b),
        (a, b) => Prop::or(Prop::and(v.clone(), b), Prop::and(Prop::not(v), a)),
    }
}

impl Dfa {
    /// One edge per (source, target) pair, ordered by source then target.
    pub fn to_json(&self) -> DfaJson {
        let l = self.letters() as usize;
        let mut edges = Vec::new();
        for s in 0..self.num_states {
            let mut by_target: BTreeMap<u32, Vec<bool>> = BTreeMap::new();
            for a in 0..l {
                by_target.entry(self.next(s, a as u64)).or_insert_with(|| vec![false; l])[a] = true;
            }
            for (to, set) in by_target {
                edges.push(EdgeJson { from: s, guard: guard_of(&set, &self.vars).to_string(), to });
            }
        }
        DfaJson {
            alphabet: self.vars.clone(),
            states: self.num_states,
            initial: self.initial,
            accepting: (0..self.num_states).filter(|&s| self.is_accepting(s)).collect(),
            edges,
        }
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("serializable") + "\n"
    }

    /// Rebuild from JSON, checking that guards partition the letters.
    pub fn from_json(j: &DfaJson) -> Result<Dfa, AutomataError> {
        check_vars(j.alphabet.len())?;
        let bad = |m: String| AutomataError::Malformed(m);
        let l = 1usize << j.alphabet.len();
        let n = j.states as usize;
        if n == 0 || j.initial as usize >= n {
            return Err(bad("initial state out of range".into()));
        }
        let mut delta = vec![u32::MAX; n * l];
        for e in &j.edges {
            if e.from as usize >= n || e.to as usize >= n {
                return Err(bad(format!("edge {} -> {} out of range", e.from, e.to)));
            }
            let g = parse_prop(&e.guard, &j.alphabet).map_err(|err| bad(format!("guard `{}`: {err}", e.guard)))?;
            let tt = g.truth_table(&j.alphabet).map_err(|v| bad(format!("unknown variable {v}")))?;
            for (a, _) in tt.iter().enumerate().filter(|(_, &x)| x) {
                let slot = &mut delta[e.from as usize * l + a];
                if *slot != u32::MAX {
                    return Err(bad(format!("state {} has overlapping guards", e.from)));
                }
                *slot = e.to;
            }
        }
        if let Some(i) = delta.iter().position(|&t| t == u32::MAX) {
            return Err(bad(format!("state {} is not total", i / l)));
        }
        let mut accepting = vec![false; n];
        for &s in &j.accepting {
            *accepting.get_mut(s as usize).ok_or_else(|| bad(format!("accepting state {s} out of range")))? = true;
        }
        let d = Dfa { vars: j.alphabet.clone(), num_states: j.states, initial: j.initial, accepting, delta };
        d.check()?;
        Ok(d)
    }

    pub fn from_json_str(text: &str) -> Result<Dfa, AutomataError> {
        let j: DfaJson = serde_json::from_str(text).map_err(|e| AutomataError::Malformed(e.to_string()))?;
        Dfa::from_json(&j)
    }
}
