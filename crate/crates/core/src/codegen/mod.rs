//! Text backends for monitors and controllers.

mod smv;

use std::collections::BTreeMap;
use std::fmt::Write;
use std::str::FromStr;

use thiserror::Error;

use crate::automata::{guard_of, Dfa};
use crate::synth::Controller;

pub use smv::{smv_prop, SmvObserver};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodegenError {
    #[error("{0} output is not available for {1}")]
    Unsupported(Format, &'static str),
    #[error("automaton is not total: {0}")]
    NotTotal(String),
    #[error("observer text, line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("trace lacks variable `{0}`")]
    TraceMismatch(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    SmvObserver,
    Dot,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Format, String> {
        match s {
            "json" => Ok(Format::Json),
            "smv-observer" | "smv" => Ok(Format::SmvObserver),
            "dot" => Ok(Format::Dot),
            _ => Err(format!("unknown format `{s}` (json, smv-observer, dot)")),
        }
    }
}

impl std::fmt::Display for Format {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Format::Json => "json",
            Format::SmvObserver => "smv-observer",
            Format::Dot => "dot",
        })
    }
}

pub fn emit_monitor(d: &Dfa, format: Format) -> Result<String, CodegenError> {
    d.check().map_err(|e| CodegenError::NotTotal(e.to_string()))?;
    Ok(match format {
        Format::Json => d.to_json_string(),
        Format::SmvObserver => smv::observer(d),
        Format::Dot => monitor_dot(d),
    })
}

pub fn emit_controller(c: &Controller, format: Format) -> Result<String, CodegenError> {
    match format {
        Format::Json => Ok(c.to_json_string()),
        Format::Dot => Ok(controller_dot(c)),
        Format::SmvObserver => Err(CodegenError::Unsupported(format, "controllers")),
    }
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

fn monitor_dot(d: &Dfa) -> String {
    let mut out = String::from("digraph monitor {\n  rankdir=LR;\n  start [shape=point];\n");
    for s in 0..d.num_states {
        let shape = if d.is_accepting(s) { "doublecircle" } else { "circle" };
        writeln!(out, "  s{s} [shape={shape}];").unwrap();
    }
    writeln!(out, "  start -> s{};", d.initial).unwrap();
    for e in d.to_json().edges {
        writeln!(out, "  s{} -> s{} [label=\"{}\"];", e.from, e.to, escape(&e.guard)).unwrap();
    }
    out.push_str("}\n");
    out
}

fn controller_dot(c: &Controller) -> String {
    let mut out = String::from("digraph controller {\n  rankdir=LR;\n  start [shape=point];\n");
    for s in 0..c.num_states {
        writeln!(out, "  c{s} [shape=circle];").unwrap();
    }
    writeln!(out, "  start -> c{};", c.initial).unwrap();
    let ni = 1usize << c.inputs.len();
    for s in 0..c.num_states {
        let mut groups: BTreeMap<(u32, u64), Vec<bool>> = BTreeMap::new();
        for x in 0..ni {
            let (y, t) = c.step(s, x as u64);
            groups.entry((t, y)).or_insert_with(|| vec![false; ni])[x] = true;
        }
        for ((t, y), set) in groups {
            let outs: Vec<String> =
                c.outputs.iter().enumerate().map(|(i, o)| format!("{o}={}", y >> i & 1)).collect();
            let label = format!("{} / {}", guard_of(&set, &c.inputs), outs.join(","));
            writeln!(out, "  c{s} -> c{t} [label=\"{}\"];", escape(&label)).unwrap();
        }
    }
    out.push_str("}\n");
    out
}
