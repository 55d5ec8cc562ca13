//! Abstract syntax and surface parsers: propositions, QDDC formulas,
//! SeCeNL requirements, plus fragment classification.

pub mod lexer;
pub mod prop;
pub mod qddc;
pub mod secenl;
pub mod specfile;

use std::collections::BTreeMap;

use thiserror::Error;

pub use prop::{parse_prop, IndexedProp, Prop};
pub use qddc::{classify_fragment, parse_qddc, Cmp, Formula, Fragment, FragmentTag, Path};
pub use secenl::{parse_secenl, Liveness, Nominated, SeceNl};
pub use specfile::{parse_spec_file, Block, MainItem, Macro, SpecFile};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("{line}:{col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("{line}:{col}: undeclared variable `{name}`")]
    UndeclaredVariable { name: String, line: usize, col: usize },
    #[error("{line}:{col}: constants must be natural numbers")]
    NegativeConstant { line: usize, col: usize },
    #[error("{line}:{col}: unresolved constant `{name}`")]
    UnresolvedConstant { name: String, line: usize, col: usize },
    #[error("formula is not in the SeCe fragment: {reason}")]
    FragmentViolation { reason: String },
    #[error("nominal `{name}` clashes with a system variable")]
    NominalClash { name: String },
    #[error("duplicate {kind} `{name}`")]
    Duplicate { kind: &'static str, name: String },
    #[error("reference to undeclared {kind} `{name}`")]
    Unknown { kind: &'static str, name: String },
    #[error("waveform: {0}")]
    Waveform(String),
    #[error("{0}")]
    Invalid(String),
}

/// Names visible while parsing: declared variables, binders opened by
/// quantifiers, and named constants.
#[derive(Debug, Clone, Default)]
pub struct Scope {
    vars: Vec<String>,
    bound: Vec<String>,
    consts: BTreeMap<String, u64>,
}

impl Scope {
    pub fn new<S: AsRef<str>>(vars: &[S]) -> Self {
        Scope {
            vars: vars.iter().map(|s| s.as_ref().to_string()).collect(),
            bound: vec![],
            consts: BTreeMap::new(),
        }
    }

    pub fn with_consts(mut self, consts: &BTreeMap<String, u64>) -> Self {
        self.consts = consts.clone();
        self
    }

    pub fn with_extra<S: AsRef<str>>(&self, extra: &[S]) -> Self {
        let mut s = self.clone();
        s.vars.extend(extra.iter().map(|v| v.as_ref().to_string()));
        s
    }

    pub fn knows(&self, name: &str) -> bool {
        self.bound.iter().any(|b| b == name) || self.vars.iter().any(|v| v == name)
    }

    pub fn constant(&self, name: &str) -> Option<u64> {
        self.consts.get(name).copied()
    }

    pub(crate) fn bind(&mut self, name: String) {
        self.bound.push(name);
    }

    pub(crate) fn unbind(&mut self) {
        self.bound.pop();
    }
}
