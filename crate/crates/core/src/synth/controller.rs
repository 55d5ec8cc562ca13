//! Deterministic controllers picked from a permissive strategy.

use std::collections::{BTreeMap, HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::analysis::{Latch, Output, SystemModel};
use crate::automata::guard_of;
use crate::syntax::{parse_prop, Prop};

use super::{explain, Convention, SafetyGame, Strategy, SynthError};

/// Finite-state machine reading input assignments and emitting output
/// assignments. Under Moore the output of a state does not depend on the
/// input read.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Controller {
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub convention: Convention,
    pub num_states: u32,
    pub initial: u32,
    /// `(outputs, next state)` at `state * 2^inputs + x`.
    pub table: Vec<(u64, u32)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransitionJson {
    pub from: u32,
    pub guard: String,
    pub outputs: BTreeMap<String, bool>,
    pub to: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ControllerJson {
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub convention: String,
    pub states: u32,
    pub initial: u32,
    pub transitions: Vec<TransitionJson>,
}

/// Key ordering assignments lexicographically on `(v0, v1, ...)` with false
/// before true.
fn lex_key(y: u64, n: usize) -> u64 {
    (0..n).fold(0, |acc, i| acc << 1 | (y >> i & 1))
}

impl Controller {
    pub fn step(&self, state: u32, x: u64) -> (u64, u32) {
        self.table[((state as u64) << self.inputs.len() | x) as usize]
    }

    /// Output assignments along an input sequence.
    pub fn run(&self, xs: &[u64]) -> Vec<u64> {
        let mut s = self.initial;
        xs.iter()
            .map(|&x| {
                let (y, t) = self.step(s, x);
                s = t;
                y
            })
            .collect()
    }

    /// Merge states with identical behaviour, then number states in
    /// breadth-first order from the initial one.
    pub fn minimize(&self) -> Controller {
        let ni = 1usize << self.inputs.len();
        let n = self.num_states as usize;
        let mut block: Vec<u32> = vec![0; n];
        let mut count = 1;
        loop {
            let mut ids: HashMap<(u32, Vec<(u64, u32)>), u32> = HashMap::new();
            let next: Vec<u32> = (0..n)
                .map(|s| {
                    let sig: Vec<(u64, u32)> =
                        self.table[s * ni..(s + 1) * ni].iter().map(|&(y, t)| (y, block[t as usize])).collect();
                    let k = ids.len() as u32;
                    *ids.entry((block[s], sig)).or_insert(k)
                })
                .collect();
            let done = ids.len() == count;
            count = ids.len();
            block = next;
            if done {
                break;
            }
        }
        let mut order: Vec<u32> = vec![u32::MAX; count];
        let mut rep: Vec<usize> = Vec::new();
        order[block[self.initial as usize] as usize] = 0;
        rep.push(self.initial as usize);
        let mut queue = VecDeque::from([self.initial as usize]);
        while let Some(s) = queue.pop_front() {
            for &(_, t) in &self.table[s * ni..(s + 1) * ni] {
                let b = block[t as usize] as usize;
                if order[b] == u32::MAX {
                    order[b] = rep.len() as u32;
                    rep.push(t as usize);
                    queue.push_back(t as usize);
                }
            }
        }
        let table = rep
            .iter()
            .flat_map(|&s| self.table[s * ni..(s + 1) * ni].iter().map(|&(y, t)| (y, order[block[t as usize] as usize])))
            .collect();
        Controller { num_states: rep.len() as u32, initial: 0, table, ..self.clone() }
    }

    pub fn to_json(&self) -> ControllerJson {
        let ni = 1usize << self.inputs.len();
        let mut transitions = Vec::new();
        for s in 0..self.num_states {
            let mut groups: BTreeMap<(u32, u64), Vec<bool>> = BTreeMap::new();
            for x in 0..ni {
                let (y, t) = self.step(s, x as u64);
                groups.entry((t, lex_key(y, self.outputs.len()))).or_insert_with(|| vec![false; ni])[x] = true;
            }
            for ((to, _), set) in groups {
                let x = set.iter().position(|&b| b).expect("non-empty group");
                let y = self.step(s, x as u64).0;
                let outputs = self.outputs.iter().enumerate().map(|(i, o)| (o.clone(), y >> i & 1 == 1)).collect();
                transitions.push(TransitionJson { from: s, guard: guard_of(&set, &self.inputs).to_string(), outputs, to });
            }
        }
        ControllerJson {
            inputs: self.inputs.clone(),
            outputs: self.outputs.clone(),
            convention: match self.convention {
                Convention::Mealy => "mealy".into(),
                Convention::Moore => "moore".into(),
            },
            states: self.num_states,
            initial: self.initial,
            transitions,
        }
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("serializable") + "\n"
    }

    pub fn from_json(j: &ControllerJson) -> Result<Controller, SynthError> {
        let bad = |m: String| SynthError::Malformed(m);
        let convention = match j.convention.as_str() {
            "mealy" => Convention::Mealy,
            "moore" => Convention::Moore,
            c => return Err(bad(format!("unknown convention `{c}`"))),
        };
        if j.inputs.len() > crate::automata::MAX_VARS || j.outputs.len() > 63 {
            return Err(bad("too many variables".into()));
        }
        let ni = 1usize << j.inputs.len();
        let n = j.states as usize;
        if j.initial as usize >= n {
            return Err(bad("initial state out of range".into()));
        }
        let mut table = vec![None; n * ni];
        for t in &j.transitions {
            if t.from as usize >= n || t.to as usize >= n {
                return Err(bad(format!("transition {} -> {} out of range", t.from, t.to)));
            }
            let g = parse_prop(&t.guard, &j.inputs).map_err(|e| bad(format!("guard `{}`: {e}", t.guard)))?;
            let tt = g.truth_table(&j.inputs).map_err(|v| bad(format!("unknown input `{v}`")))?;
            let mut y = 0u64;
            for (name, &v) in &t.outputs {
                let i = j.outputs.iter().position(|o| o == name).ok_or_else(|| bad(format!("unknown output `{name}`")))?;
                y |= (v as u64) << i;
            }
            for x in (0..ni).filter(|&x| tt[x]) {
                let slot = &mut table[t.from as usize * ni + x];
                if slot.is_some() {
                    return Err(bad(format!("state {} has overlapping guards", t.from)));
                }
                *slot = Some((y, t.to));
            }
        }
        let table = table
            .into_iter()
            .enumerate()
            .map(|(i, e)| e.ok_or_else(|| bad(format!("state {} is not total", i / ni))))
            .collect::<Result<_, _>>()?;
        Ok(Controller {
            inputs: j.inputs.clone(),
            outputs: j.outputs.clone(),
            convention,
            num_states: j.states,
            initial: j.initial,
            table,
        })
    }

    pub fn from_json_str(text: &str) -> Result<Controller, SynthError> {
        let j: ControllerJson = serde_json::from_str(text).map_err(|e| SynthError::Malformed(e.to_string()))?;
        Controller::from_json(&j)
    }

    /// The same machine with the state held in binary-coded latches.
    pub fn to_model(&self) -> SystemModel {
        let taken: Vec<&String> = self.inputs.iter().chain(&self.outputs).collect();
        let mut prefix = "cs".to_string();
        while taken.iter().any(|v| v.starts_with(&prefix)) {
            prefix.push('_');
        }
        let bits = (32 - (self.num_states.max(1) - 1).leading_zeros()) as usize;
        let names: Vec<String> = (0..bits).map(|b| format!("{prefix}{b}")).collect();
        let ni = 1usize << self.inputs.len();
        let at = |s: u32| {
            Prop::all(names.iter().enumerate().map(|(b, n)| {
                let v = Prop::var(n.clone());
                if s >> b & 1 == 1 {
                    v
                } else {
                    Prop::not(v)
                }
            }))
        };
        let arms = |bit: &dyn Fn(u64, u32) -> bool| {
            Prop::any((0..self.num_states).filter_map(|s| {
                let set: Vec<bool> = (0..ni).map(|x| {
                    let (y, t) = self.step(s, x as u64);
                    bit(y, t)
                }).collect();
                match guard_of(&set, &self.inputs) {
                    Prop::False => None,
                    Prop::True => Some(at(s)),
                    g => Some(Prop::and(at(s), g)),
                }
            }))
        };
        let latches = names
            .iter()
            .enumerate()
            .map(|(b, n)| Latch { name: n.clone(), init: self.initial >> b & 1 == 1, next: arms(&|_, t| t >> b & 1 == 1) })
            .collect();
        let outputs = self
            .outputs
            .iter()
            .enumerate()
            .map(|(i, o)| Output { name: o.clone(), def: arms(&|y, _| y >> i & 1 == 1) })
            .collect();
        SystemModel::new(self.inputs.clone(), latches, outputs).expect("well-formed by construction")
    }
}

/// Previous-cycle names `Y<v>` read by the preferences, with the letter bit
/// of `v`.
fn registers(g: &SafetyGame, prefs: &[Prop]) -> Result<Vec<(String, usize)>, SynthError> {
    let all: Vec<&String> = g.inputs.iter().chain(&g.outputs).collect();
    let mut regs: Vec<(String, usize)> = Vec::new();
    for p in prefs {
        for v in p.vars() {
            if g.outputs.contains(&v) || regs.iter().any(|(r, _)| *r == v) {
                continue;
            }
            let bit = v.strip_prefix('Y').and_then(|base| all.iter().position(|a| *a == base));
            match bit {
                Some(b) => regs.push((v, b)),
                None => return Err(SynthError::Preference(p.to_string())),
            }
        }
    }
    Ok(regs)
}

/// Pick, per reachable (node, registers, input), the allowed output that
/// satisfies the highest-priority preferences, then the least one; minimize.
pub fn extract_controller(g: &SafetyGame, st: &Strategy, prefs: &[Prop]) -> Result<Controller, SynthError> {
    let regs = registers(g, prefs)?;
    if !st.realizable(g) {
        return Err(SynthError::Unrealizable(explain(g, st)));
    }
    let (m, o) = (g.inputs.len(), g.outputs.len());
    let vars: Vec<String> = g.outputs.iter().cloned().chain(regs.iter().map(|(r, _)| r.clone())).collect();
    let indexed: Vec<_> = prefs
        .iter()
        .map(|p| p.index(&|v| vars.iter().position(|x| x == v)).expect("checked by registers"))
        .collect();
    let score = |y: u64, r: u64| -> u64 {
        indexed.iter().fold(0u64, |acc, p| acc << 1 | p.eval(y | r << o) as u64)
    };
    let ni = g.num_inputs();
    let mut ids: HashMap<(u32, u64), u32> = HashMap::from([((g.start, 0), 0)]);
    let mut states = vec![(g.start, 0u64)];
    let mut table = Vec::new();
    let mut i = 0;
    while i < states.len() {
        let (node, r) = states[i];
        i += 1;
        for x in 0..ni {
            let allowed = st.allowed(g, node, x);
            let &y = allowed
                .iter()
                .max_by_key(|&&y| (score(y, r), std::cmp::Reverse(lex_key(y, o))))
                .expect("winning nodes keep an allowed output");
            let letter = x | y << m;
            let nr = regs.iter().enumerate().fold(0u64, |acc, (k, &(_, b))| acc | (letter >> b & 1) << k);
            let key = (g.succ(node, x, y), nr);
            let next = ids.len() as u32;
            let id = *ids.entry(key).or_insert_with(|| {
                states.push(key);
                next
            });
            table.push((y, id));
        }
    }
    let c = Controller {
        inputs: g.inputs.clone(),
        outputs: g.outputs.clone(),
        convention: g.convention,
        num_states: states.len() as u32,
        initial: 0,
        table,
    };
    Ok(c.minimize())
}
