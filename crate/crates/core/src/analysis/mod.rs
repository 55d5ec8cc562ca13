//! Decision procedures over compiled automata: emptiness, universality,
//! equivalence, trace runs and product model checking.

mod model;

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::automata::{complement, product, AutomataError, BoolOp, Dfa};
use crate::compile::{compile_with, CompileError, CompileOptions};
use crate::semantics::Word;
use crate::syntax::Formula;

pub use model::{model_check, model_check_with, Latch, ModelJson, Output, SystemModel, MODEL_STATE_CAP};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Compile(#[from] CompileError),
    #[error(transparent)]
    Automata(#[from] AutomataError),
    #[error("trace lacks variable `{0}`")]
    TraceMismatch(String),
    #[error("model does not provide variable `{0}`")]
    ModelMismatch(String),
    #[error("model: {0}")]
    Model(String),
    #[error("product state cap of {0} exceeded")]
    StateCap(usize),
}

impl AnalysisError {
    pub fn is_resource(&self) -> bool {
        match self {
            AnalysisError::Compile(e) => e.is_resource(),
            AnalysisError::Automata(e) => matches!(e, AutomataError::StateCap { .. } | AutomataError::TooManyVariables(_)),
            AnalysisError::StateCap(_) => true,
            _ => false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum VerdictKind {
    Sat,
    Unsat,
    Valid,
    Invalid,
    Equivalent,
    Inequivalent,
    Holds,
    Fails,
}

impl VerdictKind {
    /// Whether the verdict is the good outcome of its question.
    pub fn is_positive(self) -> bool {
        matches!(self, VerdictKind::Sat | VerdictKind::Valid | VerdictKind::Equivalent | VerdictKind::Holds)
    }

    fn carries_witness(self) -> bool {
        matches!(self, VerdictKind::Sat | VerdictKind::Invalid | VerdictKind::Inequivalent | VerdictKind::Fails)
    }
}

impl fmt::Display for VerdictKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_value(self).expect("serializable");
        write!(f, "{}", s.as_str().expect("string"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub kind: VerdictKind,
    pub witness: Option<Word>,
    pub failure_position: Option<usize>,
}

impl Verdict {
    fn new(kind: VerdictKind, witness: Option<Word>) -> Verdict {
        debug_assert_eq!(kind.carries_witness(), witness.is_some());
        Verdict { kind, witness, failure_position: None }
    }

    pub fn is_positive(&self) -> bool {
        self.kind.is_positive()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "verdict": self.kind,
            "witness": self.witness.as_ref().map(Word::to_trace),
            "failure_position": self.failure_position,
        })
    }
}

fn witness(d: &Dfa, order: &[String]) -> Result<Option<Word>, AnalysisError> {
    Ok(d.lift(order)?.shortest_word(order)?)
}

pub fn sat_dfa(d: &Dfa, order: &[String]) -> Result<Verdict, AnalysisError> {
    Ok(match witness(d, order)? {
        Some(w) => Verdict::new(VerdictKind::Sat, Some(w)),
        None => Verdict::new(VerdictKind::Unsat, None),
    })
}

pub fn valid_dfa(d: &Dfa, order: &[String]) -> Result<Verdict, AnalysisError> {
    Ok(match witness(&complement(d), order)? {
        Some(w) => Verdict::new(VerdictKind::Invalid, Some(w)),
        None => Verdict::new(VerdictKind::Valid, None),
    })
}

/// Shortest word in the symmetric difference, if any.
pub fn equiv_dfa(a: &Dfa, b: &Dfa, order: &[String]) -> Result<Verdict, AnalysisError> {
    let cap = crate::automata::state_cap();
    let only_a = product(a, &complement(b), BoolOp::And, cap)?;
    let only_b = product(&complement(a), b, BoolOp::And, cap)?;
    let diff = product(&only_a, &only_b, BoolOp::Or, cap)?;
    Ok(match witness(&diff, order)? {
        Some(w) => Verdict::new(VerdictKind::Inequivalent, Some(w)),
        None => Verdict::new(VerdictKind::Equivalent, None),
    })
}

pub fn check_sat<S: AsRef<str>>(f: &Formula, sigma: &[S], opts: CompileOptions) -> Result<Verdict, AnalysisError> {
    let (d, _) = compile_with(f, sigma, opts)?;
    sat_dfa(&d, &d.vars.clone())
}

pub fn check_valid<S: AsRef<str>>(f: &Formula, sigma: &[S], opts: CompileOptions) -> Result<Verdict, AnalysisError> {
    let (d, _) = compile_with(f, sigma, opts)?;
    valid_dfa(&d, &d.vars.clone())
}

pub fn check_equiv<S: AsRef<str>>(
    f: &Formula,
    g: &Formula,
    sigma: &[S],
    opts: CompileOptions,
) -> Result<Verdict, AnalysisError> {
    let sigma: Vec<&str> = sigma.iter().map(AsRef::as_ref).collect();
    let (a, b) = crate::par::join(opts.parallel, || compile_with(f, &sigma, opts), || compile_with(g, &sigma, opts));
    let (a, b) = (a?.0, b?.0);
    equiv_dfa(&a, &b, &a.vars.clone())
}

/// Acceptance of every non-empty prefix of `w`.
pub fn monitor_run(d: &Dfa, w: &Word) -> Result<Vec<bool>, AnalysisError> {
    if let Some(v) = d.vars.iter().find(|v| w.index_of(v).is_none()) {
        return Err(AnalysisError::TraceMismatch(v.clone()));
    }
    let w = w.project(&d.vars);
    Ok(d.run_prefixes(&w.letters))
}

/// Holds iff `w` is accepted. On failure the position is the first rejected
/// prefix and the witness is the trace up to it.
pub fn run_trace(d: &Dfa, w: &Word) -> Result<Verdict, AnalysisError> {
    let run = monitor_run(d, w)?;
    if *run.last().unwrap_or(&false) {
        return Ok(Verdict::new(VerdictKind::Holds, None));
    }
    let pos = run.iter().position(|&ok| !ok).expect("last prefix rejected");
    let mut v = Verdict::new(VerdictKind::Fails, Some(w.prefix(pos + 1)));
    v.failure_position = Some(pos);
    Ok(v)
}

/// No state reachable by a non-empty word is rejecting yet able to reach an
/// accepting state.
pub fn is_prefix_closed(d: &Dfa) -> bool {
    let l = d.letters();
    let n = d.num_states as usize;
    let mut seen = vec![false; n];
    let mut stack: Vec<u32> = (0..l).map(|a| d.next(d.initial, a)).collect();
    while let Some(s) = stack.pop() {
        if !std::mem::replace(&mut seen[s as usize], true) {
            stack.extend((0..l).map(|a| d.next(s, a)));
        }
    }
    // States from which an accepting state is reachable in zero or more steps.
    let mut pred: Vec<Vec<u32>> = vec![Vec::new(); n];
    for s in 0..d.num_states {
        for a in 0..l {
            pred[d.next(s, a) as usize].push(s);
        }
    }
    let mut live: Vec<bool> = d.accepting.clone();
    let mut stack: Vec<u32> = (0..d.num_states).filter(|&s| d.is_accepting(s)).collect();
    while let Some(s) = stack.pop() {
        for &p in &pred[s as usize] {
            if !std::mem::replace(&mut live[p as usize], true) {
                stack.push(p);
            }
        }
    }
    (0..n).all(|s| !seen[s] || d.accepting[s] || !live[s])
}
