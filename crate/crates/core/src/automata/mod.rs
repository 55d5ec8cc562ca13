//! Finite automata over letters `2^vars`, accepting non-empty words.
//!
//! Transitions are stored as explicit letter tables: `delta[s * 2^k + a]`
//! where bit `i` of letter `a` is the value of `vars[i]`. The initial state
//! stands for the empty prefix and is never accepting.

mod json;
mod minimize;
mod ops;

use std::collections::HashMap;
use std::hash::Hash;

use thiserror::Error;

use crate::semantics::Word;

pub use json::{guard_of, DfaJson, EdgeJson};
pub use minimize::minimize;
pub use ops::{
    atom_automaton, complement, determinize, fusion_concat, fusion_star, product, project, BoolOp,
};

/// Letter tables grow as `2^k`; beyond this the explicit encoding stops
/// being practical.
pub const MAX_VARS: usize = 20;
pub const DEFAULT_STATE_CAP: usize = 2_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AutomataError {
    #[error("state cap of {cap} exceeded")]
    StateCap { cap: usize },
    #[error("alphabet of {0} variables exceeds the limit of {MAX_VARS}")]
    TooManyVariables(usize),
    #[error("variable `{0}` is not in the alphabet")]
    UnknownVariable(String),
    #[error("alphabets differ: {0:?} vs {1:?}")]
    AlphabetMismatch(Vec<String>, Vec<String>),
    #[error("malformed automaton: {0}")]
    Malformed(String),
}

/// State cap from `TDSPEC_STATE_CAP`, or the default.
pub fn state_cap() -> usize {
    std::env::var("TDSPEC_STATE_CAP").ok().and_then(|s| s.parse().ok()).unwrap_or(DEFAULT_STATE_CAP)
}

/// Total deterministic automaton.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Dfa {
    pub vars: Vec<String>,
    pub num_states: u32,
    pub initial: u32,
    pub accepting: Vec<bool>,
    pub delta: Vec<u32>,
}

/// Nondeterministic automaton in compressed rows: the successors of state
/// `s` on letter `a` are `targets[offsets[s * 2^k + a]..offsets[s * 2^k + a + 1]]`.
#[derive(Debug, Clone)]
pub struct Nfa {
    pub vars: Vec<String>,
    pub num_states: u32,
    pub initial: Vec<u32>,
    pub accepting: Vec<bool>,
    offsets: Vec<u32>,
    targets: Vec<u32>,
}

impl Nfa {
    pub fn from_fn(
        vars: Vec<String>,
        num_states: u32,
        initial: Vec<u32>,
        accepting: Vec<bool>,
        mut succ: impl FnMut(u32, u64, &mut Vec<u32>),
    ) -> Nfa {
        let l = 1u64 << vars.len();
        let mut offsets = Vec::with_capacity(num_states as usize * l as usize + 1);
        let mut targets = Vec::new();
        offsets.push(0);
        for s in 0..num_states {
            for a in 0..l {
                succ(s, a, &mut targets);
                offsets.push(targets.len() as u32);
            }
        }
        Nfa { vars, num_states, initial, accepting, offsets, targets }
    }

    pub fn letters(&self) -> u64 {
        1 << self.vars.len()
    }

    pub fn succ(&self, s: u32, a: u64) -> &[u32] {
        let i = s as usize * self.letters() as usize + a as usize;
        &self.targets[self.offsets[i] as usize..self.offsets[i + 1] as usize]
    }

    /// Acceptance by simulating the state set.
    pub fn accepts_letters(&self, letters: &[u64]) -> bool {
        if letters.is_empty() {
            return false;
        }
        let mut cur = vec![false; self.num_states as usize];
        for &s in &self.initial {
            cur[s as usize] = true;
        }
        for &a in letters {
            let mut next = vec![false; cur.len()];
            for s in (0..cur.len()).filter(|&s| cur[s]) {
                for &t in self.succ(s as u32, a) {
                    next[t as usize] = true;
                }
            }
            cur = next;
        }
        (0..cur.len()).any(|s| cur[s] && self.accepting[s])
    }
}

pub(crate) fn check_vars(n: usize) -> Result<(), AutomataError> {
    if n > MAX_VARS {
        Err(AutomataError::TooManyVariables(n))
    } else {
        Ok(())
    }
}

impl Dfa {
    pub fn letters(&self) -> u64 {
        1 << self.vars.len()
    }

    #[inline]
    pub fn next(&self, s: u32, a: u64) -> u32 {
        self.delta[s as usize * (1usize << self.vars.len()) + a as usize]
    }

    pub fn is_accepting(&self, s: u32) -> bool {
        self.accepting[s as usize]
    }

    /// Breadth-first exploration of a state space given by `step`. A fresh
    /// initial state represents the empty prefix.
    pub fn explore<S: Hash + Eq + Clone>(
        vars: Vec<String>,
        start: S,
        mut step: impl FnMut(&S, u64) -> S,
        mut accept: impl FnMut(&S) -> bool,
        cap: usize,
    ) -> Result<Dfa, AutomataError> {
        check_vars(vars.len())?;
        let l = 1u64 << vars.len();
        let mut ids: HashMap<S, u32> = HashMap::new();
        let mut queue: Vec<S> = Vec::new();
        let mut accepting = vec![false];
        let mut delta = Vec::new();
        let mut intern = |s: S, queue: &mut Vec<S>, accepting: &mut Vec<bool>| -> Result<u32, AutomataError> {
            if let Some(&id) = ids.get(&s) {
                return Ok(id);
            }
            let id = accepting.len() as u32;
            if id as usize > cap {
                return Err(AutomataError::StateCap { cap });
            }
            accepting.push(accept(&s));
            ids.insert(s.clone(), id);
            queue.push(s);
            Ok(id)
        };
        for a in 0..l {
            let t = step(&start, a);
            delta.push(intern(t, &mut queue, &mut accepting)?);
        }
        let mut head = 0;
        while head < queue.len() {
            let s = queue[head].clone();
            head += 1;
            for a in 0..l {
                let t = step(&s, a);
                delta.push(intern(t, &mut queue, &mut accepting)?);
            }
        }
        Ok(Dfa { vars, num_states: accepting.len() as u32, initial: 0, accepting, delta })
    }

    /// Run on letters over `self.vars`.
    pub fn accepts_letters(&self, letters: &[u64]) -> bool {
        !letters.is_empty() && self.is_accepting(letters.iter().fold(self.initial, |s, &a| self.next(s, a)))
    }

    /// Map a letter over `from` onto this automaton's alphabet. Variables
    /// missing from `from` read as false.
    pub fn letter_map(&self, from: &[String]) -> impl Fn(u64) -> u64 {
        let pos: Vec<Option<usize>> = self.vars.iter().map(|v| from.iter().position(|x| x == v)).collect();
        move |x| {
            pos.iter().enumerate().fold(0, |acc, (i, p)| match p {
                Some(j) if x >> j & 1 == 1 => acc | 1 << i,
                _ => acc,
            })
        }
    }

    /// Acceptance of a word; every automaton variable must occur in it.
    pub fn accepts(&self, w: &Word) -> Result<bool, AutomataError> {
        if let Some(v) = self.vars.iter().find(|v| w.index_of(v).is_none()) {
            return Err(AutomataError::UnknownVariable(v.clone()));
        }
        let f = self.letter_map(&w.vars);
        Ok(self.accepts_letters(&w.letters.iter().map(|&x| f(x)).collect::<Vec<_>>()))
    }

    /// Acceptance of every non-empty prefix.
    pub fn run_prefixes(&self, letters: &[u64]) -> Vec<bool> {
        let mut s = self.initial;
        letters
            .iter()
            .map(|&a| {
                s = self.next(s, a);
                self.is_accepting(s)
            })
            .collect()
    }

    /// Same language over a larger or reordered alphabet.
    pub fn lift(&self, vars: &[String]) -> Result<Dfa, AutomataError> {
        if vars == self.vars.as_slice() {
            return Ok(self.clone());
        }
        if let Some(v) = self.vars.iter().find(|v| !vars.contains(v)) {
            return Err(AutomataError::UnknownVariable(v.clone()));
        }
        check_vars(vars.len())?;
        let f = self.letter_map(vars);
        let l = 1u64 << vars.len();
        let map: Vec<u64> = (0..l).map(&f).collect();
        let mut delta = Vec::with_capacity(self.num_states as usize * l as usize);
        for s in 0..self.num_states {
            delta.extend(map.iter().map(|&a| self.next(s, a)));
        }
        Ok(Dfa { vars: vars.to_vec(), num_states: self.num_states, initial: self.initial, accepting: self.accepting.clone(), delta })
    }

    /// Structural sanity: table sizes, targets in range, initial not accepting.
    pub fn check(&self) -> Result<(), AutomataError> {
        let n = self.num_states as usize;
        let bad = |m: &str| Err(AutomataError::Malformed(m.to_string()));
        if n == 0 || self.initial as usize >= n {
            return bad("initial state out of range");
        }
        if self.accepting.len() != n || self.delta.len() != n << self.vars.len() {
            return bad("table sizes do not match the state count");
        }
        if self.delta.iter().any(|&t| t as usize >= n) {
            return bad("transition target out of range");
        }
        if self.is_accepting(self.initial) {
            return bad("initial state accepts the empty word");
        }
        Ok(())
    }

    /// The automaton accepting every non-empty word.
    pub fn universal(vars: Vec<String>) -> Dfa {
        let l = 1usize << vars.len();
        Dfa { vars, num_states: 2, initial: 0, accepting: vec![false, true], delta: vec![1; 2 * l] }
    }

    pub fn empty(vars: Vec<String>) -> Dfa {
        let l = 1usize << vars.len();
        Dfa { vars, num_states: 1, initial: 0, accepting: vec![false], delta: vec![0; l] }
    }

    pub fn reachable(&self) -> Vec<bool> {
        let mut seen = vec![false; self.num_states as usize];
        let mut stack = vec![self.initial];
        seen[self.initial as usize] = true;
        while let Some(s) = stack.pop() {
            for a in 0..self.letters() {
                let t = self.next(s, a);
                if !seen[t as usize] {
                    seen[t as usize] = true;
                    stack.push(t);
                }
            }
        }
        seen
    }

    pub fn is_empty(&self) -> bool {
        let r = self.reachable();
        !(0..self.num_states as usize).any(|s| r[s] && self.accepting[s])
    }

    /// Every non-empty word accepted.
    pub fn is_universal(&self) -> bool {
        let mut seen = vec![false; self.num_states as usize];
        let mut stack: Vec<u32> = Vec::new();
        for a in 0..self.letters() {
            let t = self.next(self.initial, a);
            if !seen[t as usize] {
                seen[t as usize] = true;
                stack.push(t);
            }
        }
        while let Some(s) = stack.pop() {
            if !self.is_accepting(s) {
                return false;
            }
            for a in 0..self.letters() {
                let t = self.next(s, a);
                if !seen[t as usize] {
                    seen[t as usize] = true;
                    stack.push(t);
                }
            }
        }
        true
    }

    /// Shortest accepted word; among those, the lexicographically least,
    /// comparing letters as truth vectors in `order` (false before true).
    /// `order` must list exactly this automaton's variables.
    pub fn shortest_word(&self, order: &[String]) -> Result<Option<Word>, AutomataError> {
        let d = self.lift(order)?;
        if d.vars.len() != self.vars.len() {
            return Err(AutomataError::AlphabetMismatch(order.to_vec(), self.vars.clone()));
        }
        let n = d.num_states as usize;
        let l = d.letters();
        // Distance to acceptance, by backward BFS.
        let mut preds: Vec<Vec<u32>> = vec![Vec::new(); n];
        for s in 0..n as u32 {
            for a in 0..l {
                preds[d.next(s, a) as usize].push(s);
            }
        }
        let mut dist = vec![usize::MAX; n];
        let mut queue: std::collections::VecDeque<u32> = (0..n as u32).filter(|&s| d.is_accepting(s)).collect();
        for &s in &queue {
            dist[s as usize] = 0;
        }
        while let Some(s) = queue.pop_front() {
            for &p in &preds[s as usize] {
                if dist[p as usize] == usize::MAX {
                    dist[p as usize] = dist[s as usize] + 1;
                    queue.push_back(p);
                }
            }
        }
        if dist[d.initial as usize] == usize::MAX {
            return Ok(None);
        }
        // Letters in lexicographic order of (v0, v1, ...): reversed bits.
        let k = d.vars.len();
        let mut sorted: Vec<u64> = (0..l).collect();
        sorted.sort_by_key(|&a| (0..k).fold(0u64, |acc, i| acc << 1 | (a >> i & 1)));
        let mut s = d.initial;
        let mut letters = Vec::new();
        while letters.is_empty() || !d.is_accepting(s) {
            let want = dist[s as usize].saturating_sub(1);
            let a = *sorted
                .iter()
                .find(|&&a| dist[d.next(s, a) as usize] == want)
                .expect("distance decreases along some letter");
            letters.push(a);
            s = d.next(s, a);
        }
        Ok(Some(Word::new(&d.vars, letters)))
    }
}
