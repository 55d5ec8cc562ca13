//! Reading specification, formula, diagram and JSON artifacts from disk.

use std::path::Path;

use tdspec::analysis::SystemModel;
use tdspec::automata::Dfa;
use tdspec::compile::{compile_spec, compile_with, CompilationReport, CompileOptions};
use tdspec::syntax::{parse_qddc, parse_secenl, parse_spec_file, Formula, Liveness, ParseError, SeceNl, SpecFile};
use tdspec::synth::Controller;
use tdspec::timing_diagram::{parse_timing_diagram, xi, TimingDiagram};
use tdspec::translate::aleph;

use crate::CliError;

pub enum Input {
    Spec(SpecFile),
    Qddc { formula: Formula, sigma: Vec<String> },
    Secenl { formula: SeceNl, sigma: Vec<String> },
    Diagram { diagram: TimingDiagram, sigma: Vec<String> },
    Dfa(Dfa),
    Controller(Controller),
    Model(SystemModel),
}

impl Input {
    pub fn kind(&self) -> &'static str {
        match self {
            Input::Spec(_) => "spec",
            Input::Qddc { .. } => "qddc",
            Input::Secenl { .. } => "secenl",
            Input::Diagram { .. } => "timing-diagram",
            Input::Dfa(_) => "dfa",
            Input::Controller(_) => "controller",
            Input::Model(_) => "model",
        }
    }

    /// The requirement as SeCeNL, when the input has one.
    pub fn secenl(&self) -> Option<SeceNl> {
        match self {
            Input::Spec(s) => s.requirement(),
            Input::Secenl { formula, .. } => Some(formula.clone()),
            Input::Diagram { diagram, .. } => Some(SeceNl::Atom(Liveness::Pref(xi(diagram)))),
            _ => None,
        }
    }

    /// Minimal monitor of the input, with a report when something was compiled.
    pub fn monitor(&self, opts: CompileOptions) -> Result<(Dfa, Option<CompilationReport>), CliError> {
        let compiled = match self {
            Input::Spec(s) => compile_spec(s, opts),
            Input::Qddc { formula, sigma } => compile_with(formula, sigma, opts),
            Input::Secenl { sigma, .. } | Input::Diagram { sigma, .. } => {
                compile_with(&aleph(&self.secenl().expect("has a requirement")), sigma, opts)
            }
            Input::Dfa(d) => return Ok((d.clone(), None)),
            _ => return Err(CliError::Usage(format!("a {} has no monitor", self.kind()))),
        };
        compiled.map(|(d, r)| (d, Some(r))).map_err(CliError::from_compile)
    }
}

/// Parse with a growing alphabet: undeclared names join `sigma`, and names
/// later listed as nominals move to `theta`.
fn infer<T>(
    fixed: Option<&[String]>,
    parse: impl Fn(&[String], &[String]) -> Result<T, ParseError>,
) -> Result<(T, Vec<String>), ParseError> {
    let mut sigma: Vec<String> = fixed.map(<[String]>::to_vec).unwrap_or_default();
    let mut theta: Vec<String> = vec![];
    loop {
        match parse(&sigma, &theta) {
            Err(ParseError::UndeclaredVariable { name, .. }) if fixed.is_none() && !sigma.contains(&name) => sigma.push(name),
            Err(ParseError::NominalClash { name }) if fixed.is_none() && sigma.contains(&name) => {
                sigma.retain(|v| *v != name);
                theta.push(name);
            }
            Err(ParseError::Unknown { kind: "nominal", name }) if !theta.contains(&name) => theta.push(name),
            r => return r.map(|t| (t, sigma)),
        }
    }
}

fn parse_text(text: &str, ext: &str, sigma: Option<&[String]>) -> Result<Input, ParseError> {
    let qddc = || infer(sigma, |s, _| parse_qddc(text, s)).map(|(formula, sigma)| Input::Qddc { formula, sigma });
    let secenl = || infer(sigma, |s, t| parse_secenl(text, s, t)).map(|(formula, sigma)| Input::Secenl { formula, sigma });
    let td = || {
        infer(sigma, |s, _| parse_timing_diagram(text, s)).map(|(diagram, sigma)| Input::Diagram { diagram, sigma })
    };
    match ext {
        "spec" | "lhrs" => parse_spec_file(text).map(Input::Spec),
        "qddc" | "dc" => qddc(),
        "secenl" | "sl" => secenl(),
        "td" => td(),
        _ if text.trim_start().starts_with("#lhrs") || text.contains("interface") => parse_spec_file(text).map(Input::Spec),
        _ => qddc().or_else(|e| secenl().or_else(|_| td()).map_err(|_| e)),
    }
}

fn parse_json(text: &str) -> Result<Input, CliError> {
    let v: serde_json::Value = serde_json::from_str(text).map_err(|e| CliError::Input(e.to_string()))?;
    let bad = |e: String| CliError::Input(e);
    if v.get("edges").is_some() {
        Dfa::from_json_str(text).map(Input::Dfa).map_err(|e| bad(e.to_string()))
    } else if v.get("transitions").is_some() {
        Controller::from_json_str(text).map(Input::Controller).map_err(|e| bad(e.to_string()))
    } else if v.get("latches").is_some() {
        SystemModel::from_json_str(text).map(Input::Model).map_err(|e| bad(e.to_string()))
    } else {
        Err(bad("JSON is not an automaton, controller or model".into()))
    }
}

pub fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

/// Load by extension (`.spec`, `.qddc`, `.secenl`, `.td`, `.json`),
/// otherwise by content: spec files, then QDDC, SeCeNL and diagrams.
pub fn load(path: &Path, sigma: Option<&[String]>) -> Result<Input, CliError> {
    let text = read(path)?;
    let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("");
    if ext == "json" || text.trim_start().starts_with('{') {
        return parse_json(&text);
    }
    parse_text(&text, ext, sigma).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}
