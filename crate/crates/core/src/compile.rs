//! Formula to minimal DFA by structural recursion, minimizing at every node.

use std::collections::HashMap;
use std::sync::Mutex;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::automata::{
    atom_automaton, complement, determinize, fusion_concat, fusion_star, product, project, state_cap, AutomataError,
    BoolOp, Dfa,
};
use crate::par;
use crate::syntax::{Formula, Path};

/// Largest constant accepted in a counting atom.
pub const MAX_CONSTANT: u64 = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CompileError {
    #[error("at subformula {path:?}: {source}")]
    Automata { path: Path, source: AutomataError },
    #[error("at subformula {path:?}: constant {value} exceeds {MAX_CONSTANT}")]
    ConstantTooLarge { path: Path, value: u64 },
    #[error("free variable `{0}` is not declared")]
    Undeclared(String),
}

impl CompileError {
    pub fn is_resource(&self) -> bool {
        matches!(
            self,
            CompileError::ConstantTooLarge { .. }
                | CompileError::Automata { source: AutomataError::StateCap { .. } | AutomataError::TooManyVariables(_), .. }
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeReport {
    pub path: Path,
    pub kind: &'static str,
    pub states: u32,
}

#[derive(Debug, Clone, Default)]
pub struct CompilationReport {
    /// Post-order; subformulas served from the cache appear once.
    pub nodes: Vec<NodeReport>,
    pub peak_states: u32,
    pub final_states: u32,
    pub elapsed: Duration,
}

#[derive(Debug, Clone, Copy)]
pub struct CompileOptions {
    pub cap: usize,
    /// Compile independent operands concurrently (needs the `parallel` feature).
    pub parallel: bool,
}

impl Default for CompileOptions {
    fn default() -> Self {
        CompileOptions { cap: state_cap(), parallel: true }
    }
}

struct Ctx {
    opts: CompileOptions,
    cache: Mutex<HashMap<Formula, Dfa>>,
}

type Out = Result<(Dfa, Vec<NodeReport>), CompileError>;

fn kind(f: &Formula) -> &'static str {
    match f {
        Formula::Begin(_) => "begin",
        Formula::AllButLast(_) => "all-but-last",
        Formula::All(_) => "all",
        Formula::Unit(_) => "unit",
        Formula::Chop(..) => "chop",
        Formula::Not(_) => "not",
        Formula::Or(..) => "or",
        Formula::And(..) => "and",
        Formula::Star(_) => "star",
        Formula::Exists(..) => "exists",
        Formula::Forall(..) => "forall",
        Formula::Slen(..) => "slen",
        Formula::Scount(..) => "scount",
        Formula::Sdur(..) => "sdur",
    }
}

impl Ctx {
    fn go(&self, f: &Formula, path: &mut Path) -> Out {
        if let Some(d) = self.cache.lock().expect("cache lock").get(f) {
            return Ok((d.clone(), Vec::new()));
        }
        let err = |path: &Path| {
            let path = path.clone();
            move |source| CompileError::Automata { path, source }
        };
        let cap = self.opts.cap;
        let (d, mut reports) = match f {
            Formula::Slen(_, k) | Formula::Scount(_, _, k) | Formula::Sdur(_, _, k) if *k > MAX_CONSTANT => {
                return Err(CompileError::ConstantTooLarge { path: path.clone(), value: *k });
            }
            Formula::Begin(_)
            | Formula::AllButLast(_)
            | Formula::All(_)
            | Formula::Unit(_)
            | Formula::Slen(..)
            | Formula::Scount(..)
            | Formula::Sdur(..) => (atom_automaton(f, cap).map_err(err(path))?, Vec::new()),
            Formula::Chop(a, b) | Formula::And(a, b) | Formula::Or(a, b) => {
                let (ra, rb) = self.pair(a, b, path);
                let (da, mut ra) = ra?;
                let (db, rb) = rb?;
                ra.extend(rb);
                let d = match f {
                    Formula::Chop(..) => fusion_concat(&da, &db).and_then(|n| determinize(&n, cap)),
                    Formula::And(..) => product(&da, &db, BoolOp::And, cap),
                    _ => product(&da, &db, BoolOp::Or, cap),
                }
                .map_err(err(path))?;
                (d, ra)
            }
            Formula::Not(a) => {
                let (da, ra) = self.child(a, 0, path)?;
                (complement(&da), ra)
            }
            Formula::Star(a) => {
                let (da, ra) = self.child(a, 0, path)?;
                (determinize(&fusion_star(&da), cap).map_err(err(path))?, ra)
            }
            Formula::Exists(v, a) => {
                let (da, ra) = self.child(a, 0, path)?;
                (exists(&da, v, cap).map_err(err(path))?, ra)
            }
            Formula::Forall(v, a) => {
                let (da, ra) = self.child(a, 0, path)?;
                (complement(&exists(&complement(&da), v, cap).map_err(err(path))?), ra)
            }
        };
        reports.push(NodeReport { path: path.clone(), kind: kind(f), states: d.num_states });
        self.cache.lock().expect("cache lock").insert(f.clone(), d.clone());
        Ok((d, reports))
    }

    fn child(&self, f: &Formula, i: usize, path: &mut Path) -> Out {
        path.push(i);
        let r = self.go(f, path);
        path.pop();
        r
    }

    fn pair(&self, a: &Formula, b: &Formula, path: &Path) -> (Out, Out) {
        let (mut pa, mut pb) = (path.clone(), path.clone());
        pa.push(0);
        pb.push(1);
        par::join(self.opts.parallel, || self.go(a, &mut pa), || self.go(b, &mut pb))
    }
}

fn exists(d: &Dfa, v: &str, cap: usize) -> Result<Dfa, AutomataError> {
    if d.vars.iter().any(|x| x == v) {
        determinize(&project(d, v)?, cap)
    } else {
        Ok(d.clone())
    }
}

/// Minimal DFA over `sigma` (in the given order) accepting exactly the
/// word models of `f`.
pub fn compile_with<S: AsRef<str>>(
    f: &Formula,
    sigma: &[S],
    opts: CompileOptions,
) -> Result<(Dfa, CompilationReport), CompileError> {
    let start = Instant::now();
    let sigma: Vec<String> = sigma.iter().map(|s| s.as_ref().to_string()).collect();
    if let Some(v) = f.free_vars().into_iter().find(|v| !sigma.contains(v)) {
        return Err(CompileError::Undeclared(v));
    }
    let ctx = Ctx { opts, cache: Mutex::new(HashMap::new()) };
    let (d, nodes) = ctx.go(f, &mut Vec::new())?;
    let d = crate::automata::minimize(&d.lift(&sigma).map_err(|source| CompileError::Automata { path: Vec::new(), source })?);
    let report = CompilationReport {
        peak_states: nodes.iter().map(|n| n.states).max().unwrap_or(0).max(d.num_states),
        final_states: d.num_states,
        nodes,
        elapsed: start.elapsed(),
    };
    Ok((d, report))
}

pub fn compile<S: AsRef<str>>(f: &Formula, sigma: &[S]) -> Result<(Dfa, CompilationReport), CompileError> {
    compile_with(f, sigma, CompileOptions::default())
}

/// Shorthand returning only the automaton.
pub fn dfa_of<S: AsRef<str>>(f: &Formula, sigma: &[S]) -> Result<Dfa, CompileError> {
    compile(f, sigma).map(|(d, _)| d)
}

/// Monitor of a requirement file: `aleph` of its combined requirement over
/// the file's alphabet, or the universal automaton when nothing is required.
pub fn compile_spec(
    spec: &crate::syntax::SpecFile,
    opts: CompileOptions,
) -> Result<(Dfa, CompilationReport), CompileError> {
    let sigma = spec.sigma();
    match spec.requirement() {
        Some(z) => compile_with(&crate::translate::aleph(&z), &sigma, opts),
        None => {
            let d = Dfa::universal(sigma);
            let report = CompilationReport { final_states: d.num_states, peak_states: d.num_states, ..Default::default() };
            Ok((d, report))
        }
    }
}
