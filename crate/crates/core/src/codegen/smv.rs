//! SMV-style observer modules and a table interpreter for them.
//!
//! The observer has one enumerated state variable. `ok` is combinational:
//! in cycle `t` it judges the prefix ending at `t`, so it reads the current
//! inputs alongside the state.

use std::collections::BTreeMap;
use std::fmt::Write;

use crate::automata::{guard_of, Dfa};
use crate::semantics::Word;
use crate::syntax::{parse_prop, Prop};

use super::CodegenError;

/// Fully parenthesized SMV expression.
pub fn smv_prop(p: &Prop) -> String {
    match p {
        Prop::False => "FALSE".into(),
        Prop::True => "TRUE".into(),
        Prop::Var(v) => v.clone(),
        Prop::Not(a) => format!("!{}", smv_prop(a)),
        Prop::And(a, b) => format!("({} & {})", smv_prop(a), smv_prop(b)),
        Prop::Or(a, b) => format!("({} | {})", smv_prop(a), smv_prop(b)),
        Prop::Implies(a, b) => format!("({} -> {})", smv_prop(a), smv_prop(b)),
        Prop::Iff(a, b) => format!("({} <-> {})", smv_prop(a), smv_prop(b)),
    }
}

fn from_smv(text: &str, vars: &[String]) -> Result<Prop, String> {
    let ours = text
        .replace("<->", "<=>")
        .replace("->", "=>")
        .replace('&', "&&")
        .replace('|', "||")
        .replace("TRUE", "true")
        .replace("FALSE", "false");
    parse_prop(&ours, vars).map_err(|e| e.to_string())
}

pub(super) fn observer(d: &Dfa) -> String {
    let l = d.letters() as usize;
    let mut out = String::new();
    if d.vars.is_empty() {
        out.push_str("MODULE observer\n");
    } else {
        writeln!(out, "MODULE observer({})", d.vars.join(", ")).unwrap();
    }
    let states: Vec<String> = (0..d.num_states).map(|s| format!("s{s}")).collect();
    writeln!(out, "VAR\n  state : {{{}}};", states.join(", ")).unwrap();
    writeln!(out, "ASSIGN\n  init(state) := s{};\n  next(state) :=\n    case", d.initial).unwrap();
    for e in d.to_json().edges {
        let g = parse_prop(&e.guard, &d.vars).expect("own guard");
        match g {
            Prop::True => writeln!(out, "      state = s{} : s{};", e.from, e.to).unwrap(),
            g => writeln!(out, "      state = s{} & {} : s{};", e.from, smv_prop(&g), e.to).unwrap(),
        }
    }
    out.push_str("    esac;\nDEFINE\n");
    let oks: Vec<Prop> = (0..d.num_states)
        .map(|s| {
            let set: Vec<bool> = (0..l).map(|a| d.is_accepting(d.next(s, a as u64))).collect();
            guard_of(&set, &d.vars)
        })
        .collect();
    if oks.iter().all(|g| *g == oks[0]) {
        writeln!(out, "  ok := {};", smv_prop(&oks[0])).unwrap();
    } else {
        out.push_str("  ok :=\n    case\n");
        for (s, g) in oks.iter().enumerate() {
            writeln!(out, "      state = s{s} : {};", smv_prop(g)).unwrap();
        }
        out.push_str("    esac;\n");
    }
    out
}

/// Transition table read back from observer text.
#[derive(Debug, Clone)]
pub struct SmvObserver {
    pub params: Vec<String>,
    pub states: Vec<String>,
    pub init: usize,
    next: Vec<(usize, Prop, usize)>,
    ok: Vec<(Option<usize>, Prop)>,
}

#[derive(PartialEq)]
enum Section {
    Head,
    Next,
    Ok,
}

impl SmvObserver {
    pub fn parse(text: &str) -> Result<SmvObserver, CodegenError> {
        let mut obs = SmvObserver { params: vec![], states: vec![], init: 0, next: vec![], ok: vec![] };
        let mut section = Section::Head;
        let mut init = None;
        for (i, raw) in text.lines().enumerate() {
            let err = |msg: String| CodegenError::Parse { line: i + 1, msg };
            let line = raw.trim();
            let state_of = |name: &str, obs: &SmvObserver| {
                obs.states.iter().position(|s| s == name.trim()).ok_or_else(|| err(format!("unknown state `{}`", name.trim())))
            };
            if let Some(rest) = line.strip_prefix("MODULE observer") {
                let inner = rest.trim().trim_start_matches('(').trim_end_matches(')');
                obs.params = inner.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect();
            } else if let Some(rest) = line.strip_prefix("state : {") {
                obs.states = rest.trim_end_matches("};").split(',').map(|s| s.trim().to_string()).collect();
            } else if let Some(rest) = line.strip_prefix("init(state) := ") {
                init = Some(state_of(rest.trim_end_matches(';'), &obs)?);
            } else if line.starts_with("next(state) :=") {
                section = Section::Next;
            } else if let Some(rest) = line.strip_prefix("ok :=") {
                section = Section::Ok;
                let rest = rest.trim().trim_end_matches(';');
                if !rest.is_empty() {
                    obs.ok.push((None, from_smv(rest, &obs.params).map_err(err)?));
                }
            } else if let Some(case) = line.strip_prefix("state = ") {
                let (lhs, rhs) = case.trim_end_matches(';').rsplit_once(" : ").ok_or_else(|| err("expected `:`".into()))?;
                let (s, guard) = match lhs.split_once(" & ") {
                    Some((s, g)) => (s, from_smv(g, &obs.params).map_err(err)?),
                    None => (lhs, Prop::True),
                };
                let s = state_of(s, &obs)?;
                match section {
                    Section::Next => obs.next.push((s, guard, state_of(rhs, &obs)?)),
                    Section::Ok => obs.ok.push((Some(s), from_smv(rhs, &obs.params).map_err(err)?)),
                    Section::Head => return Err(err("case outside a block".into())),
                }
            }
        }
        obs.init = init.ok_or(CodegenError::Parse { line: 0, msg: "no init(state)".into() })?;
        Ok(obs)
    }

    /// `ok` in every cycle of `w`.
    pub fn run(&self, w: &Word) -> Result<Vec<bool>, CodegenError> {
        let cols: BTreeMap<&str, usize> = self
            .params
            .iter()
            .map(|p| w.index_of(p).map(|i| (p.as_str(), i)).ok_or_else(|| CodegenError::TraceMismatch(p.clone())))
            .collect::<Result<_, _>>()?;
        let mut s = self.init;
        let mut out = Vec::with_capacity(w.len());
        for &letter in &w.letters {
            let val = |v: &str| letter >> cols[v] & 1 == 1;
            let ok = self.ok.iter().find(|(st, _)| st.is_none_or(|st| st == s)).is_some_and(|(_, g)| g.eval(&val));
            out.push(ok);
            s = self
                .next
                .iter()
                .find(|(from, g, _)| *from == s && g.eval(&val))
                .map(|&(_, _, to)| to)
                .ok_or(CodegenError::NotTotal(format!("state {} has no enabled case", self.states[s])))?;
        }
        Ok(out)
    }
}
