//! Safety games on requirement monitors and controller extraction.

mod controller;

use std::collections::{HashMap, VecDeque};
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::automata::{AutomataError, Dfa, MAX_VARS};
use crate::compile::{compile_spec, CompileError, CompileOptions};
use crate::semantics::Word;
use crate::syntax::{Prop, SpecFile};

pub use controller::{extract_controller, Controller, ControllerJson, TransitionJson};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SynthError {
    #[error("bad variable partition: {0}")]
    Partition(String),
    #[error("soft requirement `{0}` may only read outputs and previous-cycle values")]
    Preference(String),
    #[error("unrealizable: {0}")]
    Unrealizable(Explanation),
    #[error(transparent)]
    Automata(#[from] AutomataError),
    #[error(transparent)]
    Compile(#[from] CompileError),
    #[error("controller: {0}")]
    Malformed(String),
}

impl SynthError {
    pub fn is_resource(&self) -> bool {
        match self {
            SynthError::Compile(e) => e.is_resource(),
            SynthError::Automata(e) => matches!(e, AutomataError::StateCap { .. } | AutomataError::TooManyVariables(_)),
            _ => false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Convention {
    /// Inputs first; outputs may depend on the current inputs.
    #[default]
    Mealy,
    /// Outputs first; they depend on the past only.
    Moore,
}

/// Why no controller exists. When `open_loop` holds, feeding `inputs` loses
/// against every output response. Otherwise the environment must adapt and
/// `inputs`/`outputs` show one losing play against the least outputs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Explanation {
    pub inputs: Word,
    pub outputs: Option<Word>,
    pub open_loop: bool,
}

impl std::fmt::Display for Explanation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.open_loop {
            write!(f, "every output response to inputs {} violates the requirement", self.inputs)
        } else {
            let out = self.outputs.as_ref().map(|w| w.to_string()).unwrap_or_default();
            write!(f, "the environment wins by adapting; a losing play is inputs {} against outputs {out}", self.inputs)
        }
    }
}

/// Arena over the monitor states. Letters put inputs in the low bits and
/// outputs above them. A node is losing once the monitor rejects a
/// non-empty prefix.
#[derive(Debug, Clone)]
pub struct SafetyGame {
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub convention: Convention,
    dfa: Dfa,
    /// Node standing for the empty prefix; equals the monitor's initial
    /// state unless that state is re-entered, in which case it is an extra
    /// node with the same row.
    pub start: u32,
    pub num_nodes: u32,
}

impl SafetyGame {
    pub fn num_inputs(&self) -> u64 {
        1 << self.inputs.len()
    }

    pub fn num_outputs(&self) -> u64 {
        1 << self.outputs.len()
    }

    pub fn succ(&self, node: u32, x: u64, y: u64) -> u32 {
        let s = if node == self.dfa.num_states { self.dfa.initial } else { node };
        self.dfa.next(s, x | y << self.inputs.len())
    }

    pub fn is_bad(&self, node: u32) -> bool {
        node != self.start && !self.dfa.is_accepting(node)
    }

    pub fn monitor(&self) -> &Dfa {
        &self.dfa
    }
}

pub fn build_game(req: &Dfa, inputs: &[String], outputs: &[String], convention: Convention) -> Result<SafetyGame, SynthError> {
    if let Some(v) = inputs.iter().find(|v| outputs.contains(v)) {
        return Err(SynthError::Partition(format!("`{v}` is both input and output")));
    }
    if let Some(v) = req.vars.iter().find(|v| !inputs.contains(v) && !outputs.contains(v)) {
        return Err(SynthError::Partition(format!("`{v}` is neither input nor output")));
    }
    let order: Vec<String> = inputs.iter().chain(outputs).cloned().collect();
    if order.len() > MAX_VARS {
        return Err(AutomataError::TooManyVariables(order.len()).into());
    }
    let dfa = req.lift(&order)?;
    let reentered = (0..dfa.num_states).any(|s| (0..dfa.letters()).any(|a| dfa.next(s, a) == dfa.initial));
    let (start, num_nodes) = if reentered { (dfa.num_states, dfa.num_states + 1) } else { (dfa.initial, dfa.num_states) };
    Ok(SafetyGame { inputs: inputs.to_vec(), outputs: outputs.to_vec(), convention, dfa, start, num_nodes })
}

/// Winning region and, for every winning node and input, the outputs that
/// keep the play inside it (the same set for every input under Moore).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Strategy {
    pub winning: Vec<bool>,
    /// Indexed by `node * 2^inputs + x`; empty outside the winning region.
    pub safe: Vec<Vec<u64>>,
}

impl Strategy {
    pub fn realizable(&self, g: &SafetyGame) -> bool {
        self.winning[g.start as usize]
    }

    pub fn allowed(&self, g: &SafetyGame, node: u32, x: u64) -> &[u64] {
        &self.safe[(node as u64 * g.num_inputs() + x) as usize]
    }
}

/// Greatest fixpoint: drop nodes where the environment has a move that no
/// output answers inside the current set.
pub fn solve_safety(g: &SafetyGame) -> Strategy {
    let (ni, no) = (g.num_inputs(), g.num_outputs());
    let mut win: Vec<bool> = (0..g.num_nodes).map(|s| !g.is_bad(s)).collect();
    let stays = |win: &[bool], s: u32, x: u64, y: u64| win[g.succ(s, x, y) as usize];
    loop {
        let mut changed = false;
        for s in 0..g.num_nodes {
            if !win[s as usize] {
                continue;
            }
            let ok = match g.convention {
                Convention::Mealy => (0..ni).all(|x| (0..no).any(|y| stays(&win, s, x, y))),
                Convention::Moore => (0..no).any(|y| (0..ni).all(|x| stays(&win, s, x, y))),
            };
            if !ok {
                win[s as usize] = false;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let mut safe = vec![Vec::new(); (g.num_nodes as u64 * ni) as usize];
    for s in (0..g.num_nodes).filter(|&s| win[s as usize]) {
        let moore: Vec<u64> = (0..no).filter(|&y| (0..ni).all(|x| stays(&win, s, x, y))).collect();
        for x in 0..ni {
            safe[(s as u64 * ni + x) as usize] = match g.convention {
                Convention::Mealy => (0..no).filter(|&y| stays(&win, s, x, y)).collect(),
                Convention::Moore => moore.clone(),
            };
        }
    }
    Strategy { winning: win, safe }
}

const EXPLAIN_CAP: usize = 100_000;

/// Shortest input sequence against which every output response hits a
/// losing node, searched over sets of nodes consistent with the inputs so
/// far; falls back to one adaptive play.
pub fn explain(g: &SafetyGame, st: &Strategy) -> Explanation {
    let (ni, no) = (g.num_inputs(), g.num_outputs());
    // With the inputs fixed in advance the round order does not matter.
    let step = |set: &[u32], x: u64| -> Vec<u32> {
        let mut out: Vec<u32> =
            set.iter().flat_map(|&s| (0..no).map(move |y| g.succ(s, x, y))).filter(|&t| !g.is_bad(t)).collect();
        out.sort_unstable();
        out.dedup();
        out
    };
    let start = vec![g.start];
    let mut seen: HashMap<Vec<u32>, (usize, u64)> = HashMap::from([(start.clone(), (usize::MAX, 0))]);
    let mut order = vec![start.clone()];
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        if order.len() > EXPLAIN_CAP {
            break;
        }
        for x in 0..ni {
            let next = step(&order[i], x);
            if next.is_empty() {
                let mut xs = vec![x];
                let mut j = i;
                while seen[&order[j]].0 != usize::MAX {
                    xs.push(seen[&order[j]].1);
                    j = seen[&order[j]].0;
                }
                xs.reverse();
                return Explanation { inputs: Word::new(&g.inputs, xs), outputs: None, open_loop: true };
            }
            if !seen.contains_key(&next) {
                seen.insert(next.clone(), (i, x));
                queue.push_back(order.len());
                order.push(next);
            }
        }
    }
    adaptive_play(g, st)
}

/// The environment picks the least input leading out of the winning region,
/// the controller the least output; ends at the first losing node.
fn adaptive_play(g: &SafetyGame, st: &Strategy) -> Explanation {
    let (ni, no) = (g.num_inputs(), g.num_outputs());
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    let mut s = g.start;
    let limit = g.num_nodes as usize + 1;
    while !g.is_bad(s) && xs.len() < limit {
        let y = 0;
        let loses = |x: u64| match g.convention {
            Convention::Mealy => (0..no).all(|y| !st.winning[g.succ(s, x, y) as usize]),
            Convention::Moore => !st.winning[g.succ(s, x, y) as usize],
        };
        let x = (0..ni).find(|&x| loses(x)).unwrap_or(0);
        xs.push(x);
        ys.push(y);
        s = g.succ(s, x, y);
    }
    Explanation { inputs: Word::new(&g.inputs, xs), outputs: Some(Word::new(&g.outputs, ys)), open_loop: false }
}

#[derive(Debug, Clone, Default)]
pub struct SynthReport {
    pub monitor_states: u32,
    pub winning_nodes: usize,
    pub controller_states: u32,
    pub compile_time: Duration,
    pub solve_time: Duration,
}

/// Monitor, game, strategy and controller for a requirement file. Inputs
/// are the environment variables (inputs and auxiliaries), outputs the
/// declared outputs; `extra_prefs` follow the file's soft requirements.
pub fn synthesize_spec(
    spec: &SpecFile,
    extra_prefs: &[Prop],
    convention: Convention,
    opts: CompileOptions,
) -> Result<(Controller, SynthReport), SynthError> {
    let t0 = Instant::now();
    let (dfa, _) = compile_spec(spec, opts)?;
    let compile_time = t0.elapsed();
    let t1 = Instant::now();
    let g = build_game(&dfa, &spec.environment(), &spec.outputs, convention)?;
    let st = solve_safety(&g);
    let prefs: Vec<Prop> = spec.softreqs.iter().chain(extra_prefs).cloned().collect();
    let c = extract_controller(&g, &st, &prefs)?;
    let report = SynthReport {
        monitor_states: dfa.num_states,
        winning_nodes: st.winning.iter().filter(|&&w| w).count(),
        controller_states: c.num_states,
        compile_time,
        solve_time: t1.elapsed(),
    };
    Ok((c, report))
}

#[cfg(test)]
mod tests;
