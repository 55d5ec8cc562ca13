//! Synchronous machine models and explicit-state product checking.

use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::automata::{Dfa, MAX_VARS};
use crate::semantics::Word;
use crate::syntax::{parse_prop, IndexedProp, Prop};

use super::{AnalysisError, Verdict, VerdictKind};

pub const MODEL_STATE_CAP: usize = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Latch {
    pub name: String,
    pub init: bool,
    pub next: Prop,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub name: String,
    pub def: Prop,
}

/// Inputs, latches with next-state functions, and outputs. Both next-state
/// functions and output definitions read inputs and latches only.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SystemModel {
    pub inputs: Vec<String>,
    pub latches: Vec<Latch>,
    pub outputs: Vec<Output>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatchJson {
    pub name: String,
    pub init: bool,
    pub next: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutputJson {
    pub name: String,
    pub def: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelJson {
    pub inputs: Vec<String>,
    #[serde(default)]
    pub latches: Vec<LatchJson>,
    #[serde(default)]
    pub outputs: Vec<OutputJson>,
}

impl SystemModel {
    pub fn new(inputs: Vec<String>, latches: Vec<Latch>, outputs: Vec<Output>) -> Result<SystemModel, AnalysisError> {
        let m = SystemModel { inputs, latches, outputs };
        m.validate()?;
        Ok(m)
    }

    fn state_vars(&self) -> Vec<String> {
        self.inputs.iter().cloned().chain(self.latches.iter().map(|l| l.name.clone())).collect()
    }

    /// Column order of counterexample traces: inputs, outputs, latches.
    pub fn trace_vars(&self) -> Vec<String> {
        let mut v = self.inputs.clone();
        v.extend(self.outputs.iter().map(|o| o.name.clone()));
        v.extend(self.latches.iter().map(|l| l.name.clone()));
        v
    }

    fn validate(&self) -> Result<(), AnalysisError> {
        let names = self.trace_vars();
        for (i, n) in names.iter().enumerate() {
            if names[..i].contains(n) {
                return Err(AnalysisError::Model(format!("`{n}` declared twice")));
            }
        }
        if self.inputs.len() > MAX_VARS {
            return Err(AnalysisError::Model(format!("more than {MAX_VARS} inputs")));
        }
        if names.len() > 64 {
            return Err(AnalysisError::Model("more than 64 variables".into()));
        }
        let sv = self.state_vars();
        let props = self.latches.iter().map(|l| (&l.name, &l.next)).chain(self.outputs.iter().map(|o| (&o.name, &o.def)));
        for (name, p) in props {
            if let Some(v) = p.vars().into_iter().find(|v| !sv.contains(v)) {
                return Err(AnalysisError::Model(format!("`{name}` reads `{v}`, which is neither an input nor a latch")));
            }
        }
        Ok(())
    }

    pub fn from_json(j: &ModelJson) -> Result<SystemModel, AnalysisError> {
        let sv: Vec<String> = j.inputs.iter().cloned().chain(j.latches.iter().map(|l| l.name.clone())).collect();
        let parse = |name: &str, text: &str| {
            parse_prop(text, &sv).map_err(|e| AnalysisError::Model(format!("`{name}`: {e}")))
        };
        let latches = j
            .latches
            .iter()
            .map(|l| Ok(Latch { name: l.name.clone(), init: l.init, next: parse(&l.name, &l.next)? }))
            .collect::<Result<_, AnalysisError>>()?;
        let outputs = j
            .outputs
            .iter()
            .map(|o| Ok(Output { name: o.name.clone(), def: parse(&o.name, &o.def)? }))
            .collect::<Result<_, AnalysisError>>()?;
        SystemModel::new(j.inputs.clone(), latches, outputs)
    }

    pub fn from_json_str(text: &str) -> Result<SystemModel, AnalysisError> {
        let j: ModelJson = serde_json::from_str(text).map_err(|e| AnalysisError::Model(e.to_string()))?;
        SystemModel::from_json(&j)
    }

    pub fn to_json(&self) -> ModelJson {
        ModelJson {
            inputs: self.inputs.clone(),
            latches: self
                .latches
                .iter()
                .map(|l| LatchJson { name: l.name.clone(), init: l.init, next: l.next.to_string() })
                .collect(),
            outputs: self.outputs.iter().map(|o| OutputJson { name: o.name.clone(), def: o.def.to_string() }).collect(),
        }
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("serializable") + "\n"
    }

    /// Simulate from the initial latch values; the result is over
    /// [`SystemModel::trace_vars`].
    pub fn simulate(&self, inputs: &[u64]) -> Word {
        let ev = Evaluator::new(self);
        let mut latch = ev.init;
        let letters = inputs
            .iter()
            .map(|&x| {
                let (out, next) = ev.step(latch, x);
                let letter = ev.letter(x, out, latch);
                latch = next;
                letter
            })
            .collect();
        Word::new(&self.trace_vars(), letters)
    }
}

struct Evaluator {
    m: usize,
    o: usize,
    init: u64,
    outs: Vec<IndexedProp>,
    nexts: Vec<IndexedProp>,
}

impl Evaluator {
    fn new(model: &SystemModel) -> Evaluator {
        let sv = model.state_vars();
        let idx = |p: &Prop| p.index(&|v| sv.iter().position(|x| x == v)).expect("validated model");
        Evaluator {
            m: model.inputs.len(),
            o: model.outputs.len(),
            init: model.latches.iter().enumerate().fold(0, |acc, (i, l)| acc | (l.init as u64) << i),
            outs: model.outputs.iter().map(|o| idx(&o.def)).collect(),
            nexts: model.latches.iter().map(|l| idx(&l.next)).collect(),
        }
    }

    fn step(&self, latch: u64, input: u64) -> (u64, u64) {
        let v = input | latch << self.m;
        let pack = |ps: &[IndexedProp]| ps.iter().enumerate().fold(0u64, |acc, (i, p)| acc | (p.eval(v) as u64) << i);
        (pack(&self.outs), pack(&self.nexts))
    }

    fn letter(&self, input: u64, out: u64, latch: u64) -> u64 {
        input | out << self.m | latch << (self.m + self.o)
    }
}

pub fn model_check(model: &SystemModel, req: &Dfa) -> Result<Verdict, AnalysisError> {
    model_check_with(model, req, MODEL_STATE_CAP)
}

/// Breadth-first search of the synchronous product. Any rejected non-empty
/// prefix is a violation; the counterexample is a shortest one, over
/// [`SystemModel::trace_vars`].
pub fn model_check_with(model: &SystemModel, req: &Dfa, cap: usize) -> Result<Verdict, AnalysisError> {
    let tv = model.trace_vars();
    let src: Vec<usize> = req
        .vars
        .iter()
        .map(|v| tv.iter().position(|x| x == v).ok_or_else(|| AnalysisError::ModelMismatch(v.clone())))
        .collect::<Result<_, _>>()?;
    let to_req = |full: u64| src.iter().enumerate().fold(0u64, |acc, (j, &i)| acc | (full >> i & 1) << j);
    let ev = Evaluator::new(model);
    let inputs = 1u64 << model.inputs.len();
    let mut rows: HashMap<u64, Vec<(u64, u64)>> = HashMap::new();
    // Node: (latch valuation, automaton state); parent index and full letter.
    let mut nodes: Vec<(u64, u32, usize, u64)> = vec![(ev.init, req.initial, usize::MAX, 0)];
    let mut index: HashMap<(u64, u32), usize> = HashMap::from([((ev.init, req.initial), 0)]);
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        let (latch, q, _, _) = nodes[i];
        let row = rows.entry(latch).or_insert_with(|| (0..inputs).map(|x| ev.step(latch, x)).collect());
        for (x, &(out, next)) in row.iter().enumerate() {
            let letter = ev.letter(x as u64, out, latch);
            let t = req.next(q, to_req(letter));
            if !req.is_accepting(t) {
                let mut letters = vec![letter];
                let mut j = i;
                while nodes[j].2 != usize::MAX {
                    letters.push(nodes[j].3);
                    j = nodes[j].2;
                }
                letters.reverse();
                let n = letters.len();
                let w = Word::new(&tv, letters);
                debug_assert!(!super::run_trace(req, &w).expect("trace covers req").is_positive());
                let mut v = Verdict::new(VerdictKind::Fails, Some(w));
                v.failure_position = Some(n - 1);
                return Ok(v);
            }
            if let std::collections::hash_map::Entry::Vacant(e) = index.entry((next, t)) {
                if nodes.len() >= cap {
                    return Err(AnalysisError::StateCap(cap));
                }
                e.insert(nodes.len());
                queue.push_back(nodes.len());
                nodes.push((next, t, i, letter));
            }
        }
    }
    Ok(Verdict::new(VerdictKind::Holds, None))
}
