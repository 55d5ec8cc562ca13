//! Requirement files: an interface block, named diagram / formula / macro
//! blocks, and a `main()` block of assumptions and commitments.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::timing_diagram::{td_body, xi, TimingDiagram};

use super::lexer::{Lexer, Tok};
use super::prop::prop;
use super::qddc::formula;
use super::secenl::{check_nominated, secenl, Ctx, Resolver};
use super::{Liveness, Nominated, ParseError, Prop, Scope, SeceNl};

/// A block body kept as source and elaborated per call.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Block {
    pub params: Vec<String>,
    pub body: String,
}

/// `#implies name(params) { td a(..) {..} td b(..) {..} }`: a call expands to
/// `implies(xi(a) ~> xi(b))`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Macro {
    pub params: Vec<String>,
    pub ante: (String, Block),
    pub cons: (String, Block),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MainItem {
    Requirement(SeceNl),
    Diagram(TimingDiagram),
}

impl MainItem {
    /// Diagrams stand for `pref(xi(T))`.
    pub fn to_secenl(&self) -> SeceNl {
        match self {
            MainItem::Requirement(z) => z.clone(),
            MainItem::Diagram(t) => SeceNl::Atom(Liveness::Pref(xi(t))),
        }
    }
}

impl fmt::Display for MainItem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MainItem::Requirement(z) => write!(f, "{z}"),
            MainItem::Diagram(t) => write!(f, "pref({})", xi(t)),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SpecFile {
    pub name: Option<String>,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub auxvars: Vec<String>,
    pub constants: BTreeMap<String, u64>,
    /// Highest priority first. `Y<var>` denotes the previous-cycle value.
    pub softreqs: Vec<Prop>,
    pub tds: BTreeMap<String, Block>,
    pub dcs: BTreeMap<String, Block>,
    pub macros: BTreeMap<String, Macro>,
    pub assumes: Vec<MainItem>,
    pub reqs: Vec<MainItem>,
}

impl SpecFile {
    /// Inputs, outputs, then auxiliary variables, in declaration order.
    pub fn sigma(&self) -> Vec<String> {
        self.inputs.iter().chain(&self.outputs).chain(&self.auxvars).cloned().collect()
    }

    /// Variables chosen by the environment: inputs and auxiliaries.
    pub fn environment(&self) -> Vec<String> {
        self.inputs.iter().chain(&self.auxvars).cloned().collect()
    }

    /// `(assume_1 && ...) => (req_1 && ...)`; `None` when vacuous.
    pub fn requirement(&self) -> Option<SeceNl> {
        let all = |items: &[MainItem]| items.iter().map(MainItem::to_secenl).reduce(SeceNl::and);
        let r = all(&self.reqs)?;
        Some(match all(&self.assumes) {
            Some(a) => SeceNl::implies(a, r),
            None => r,
        })
    }
}

fn previous_names(sigma: &[String]) -> Vec<String> {
    sigma.iter().map(|v| format!("Y{v}")).collect()
}

pub fn parse_spec_file(text: &str) -> Result<SpecFile, ParseError> {
    let mut lx = Lexer::new(text);
    let mut spec = SpecFile::default();
    if lx.peek()?.tok == Tok::Hash("lhrs".into()) {
        lx.next()?;
        match lx.next()?.tok {
            Tok::Str(s) => spec.name = Some(s),
            t => return Err(lx.error(format!("expected a spec name, found {t}"))),
        }
    }
    expect_keyword(&mut lx, "interface")?;
    interface(&mut lx, &mut spec)?;
    let sigma = spec.sigma();
    let mut names: BTreeSet<String> = BTreeSet::new();
    let claim = |name: &str, names: &mut BTreeSet<String>| {
        if !names.insert(name.to_string()) || sigma.iter().any(|v| v == name) {
            Err(ParseError::Duplicate { kind: "block", name: name.to_string() })
        } else {
            Ok(())
        }
    };
    loop {
        match lx.peek()?.tok.clone() {
            Tok::Ident(k) if k == "td" || k == "dc" => {
                lx.next()?;
                let (name, block) = named_block(&mut lx)?;
                claim(&name, &mut names)?;
                if k == "td" {
                    spec.tds.insert(name, block);
                } else {
                    spec.dcs.insert(name, block);
                }
            }
            Tok::Hash(k) if k == "implies" => {
                lx.next()?;
                let (name, _) = lx.ident()?;
                claim(&name, &mut names)?;
                let params = params(&mut lx)?;
                lx.expect(Tok::LBrace)?;
                let mut parts = Vec::new();
                for _ in 0..2 {
                    expect_keyword(&mut lx, "td")?;
                    parts.push(named_block(&mut lx)?);
                }
                lx.expect(Tok::RBrace)?;
                let cons = parts.pop().expect("two parts");
                let ante = parts.pop().expect("two parts");
                spec.macros.insert(name, Macro { params, ante, cons });
            }
            Tok::Ident(k) if k == "main" => break,
            t => return Err(lx.error(format!("expected `td`, `dc`, `#implies` or `main`, found {t}"))),
        }
    }
    lx.next()?;
    lx.expect(Tok::LParen)?;
    lx.expect(Tok::RParen)?;
    lx.expect(Tok::LBrace)?;
    while !lx.eat(&Tok::RBrace)? {
        let (kind, _) = lx.ident()?;
        let item = main_item(&mut lx, &spec)?;
        lx.expect(Tok::Semi)?;
        match kind.as_str() {
            "assume" => spec.assumes.push(item),
            "req" => spec.reqs.push(item),
            _ => return Err(lx.error(format!("expected `assume` or `req`, found `{kind}`"))),
        }
    }
    lx.expect_eof()?;
    Ok(spec)
}

fn expect_keyword(lx: &mut Lexer, kw: &str) -> Result<(), ParseError> {
    let t = lx.next()?;
    match t.tok {
        Tok::Ident(ref s) if s == kw => Ok(()),
        other => Err(ParseError::Syntax { line: t.pos.line, col: t.pos.col, msg: format!("expected `{kw}`, found {other}") }),
    }
}

fn idlist(lx: &mut Lexer) -> Result<Vec<String>, ParseError> {
    let mut out = vec![lx.ident()?.0];
    while lx.eat(&Tok::Comma)? {
        out.push(lx.ident()?.0);
    }
    Ok(out)
}

fn interface(lx: &mut Lexer, spec: &mut SpecFile) -> Result<(), ParseError> {
    lx.expect(Tok::LBrace)?;
    let mut seen: BTreeSet<String> = BTreeSet::new();
    let mut soft_text: Vec<Lexer> = Vec::new();
    while !lx.eat(&Tok::RBrace)? {
        let (kw, _) = lx.ident()?;
        match kw.as_str() {
            "input" | "output" | "auxvar" => {
                for v in idlist(lx)? {
                    if !seen.insert(v.clone()) {
                        return Err(ParseError::Duplicate { kind: "variable", name: v });
                    }
                    match kw.as_str() {
                        "input" => spec.inputs.push(v),
                        "output" => spec.outputs.push(v),
                        _ => spec.auxvars.push(v),
                    }
                }
            }
            "constant" => loop {
                let (name, _) = lx.ident()?;
                lx.expect(Tok::Eq)?;
                let value = match lx.next()?.tok {
                    Tok::Nat(n) => n,
                    Tok::Minus => return Err(lx.error("constants must be natural numbers")),
                    t => return Err(lx.error(format!("expected a number, found {t}"))),
                };
                if spec.constants.insert(name.clone(), value).is_some() {
                    return Err(ParseError::Duplicate { kind: "constant", name });
                }
                if !lx.eat(&Tok::Comma)? {
                    break;
                }
            },
            "softreq" => {
                // Variables may be declared later in the block.
                soft_text.push(lx.clone());
                lx.raw_until(';')?;
                continue;
            }
            _ => return Err(lx.error(format!("unknown interface item `{kw}`"))),
        }
        lx.expect(Tok::Semi)?;
    }
    if let Some(c) = spec.constants.keys().find(|c| seen.contains(*c)) {
        return Err(ParseError::Duplicate { kind: "name", name: c.clone() });
    }
    let sigma = spec.sigma();
    let scope = Scope::new(&sigma).with_extra(&previous_names(&sigma));
    for mut sl in soft_text {
        spec.softreqs.push(prop(&mut sl, &scope)?);
        if sl.peek()?.tok != Tok::Semi {
            return Err(sl.error("expected `;` after softreq"));
        }
    }
    Ok(())
}

fn params(lx: &mut Lexer) -> Result<Vec<String>, ParseError> {
    lx.expect(Tok::LParen)?;
    if lx.eat(&Tok::RParen)? {
        return Ok(Vec::new());
    }
    let out = idlist(lx)?;
    lx.expect(Tok::RParen)?;
    Ok(out)
}

/// `name(params) { ... }` with the body captured as raw text.
fn named_block(lx: &mut Lexer) -> Result<(String, Block), ParseError> {
    let (name, _) = lx.ident()?;
    let params = params(lx)?;
    lx.expect(Tok::LBrace)?;
    let (body, _) = lx.raw_block()?;
    Ok((name, Block { params, body }))
}

#[derive(Debug, Clone)]
enum Arg {
    Const(u64),
    Prop(Prop),
}

struct Env<'s> {
    spec: &'s SpecFile,
    sigma: Vec<String>,
}

impl Env<'_> {
    fn args(&self, lx: &mut Lexer, arity: usize, name: &str) -> Result<Vec<Arg>, ParseError> {
        lx.expect(Tok::LParen)?;
        let mut out = Vec::new();
        let scope = Scope::new(&self.sigma).with_consts(&self.spec.constants);
        if !lx.eat(&Tok::RParen)? {
            loop {
                let mut probe = lx.clone();
                let single = probe.next()?.tok;
                let ends = matches!(probe.peek()?.tok, Tok::Comma | Tok::RParen);
                let arg = match single {
                    Tok::Nat(n) if ends => {
                        lx.next()?;
                        Arg::Const(n)
                    }
                    Tok::Ident(ref c) if ends && !scope.knows(c) && scope.constant(c).is_some() => {
                        lx.next()?;
                        Arg::Const(scope.constant(c).expect("checked"))
                    }
                    _ => Arg::Prop(prop(lx, &scope)?),
                };
                out.push(arg);
                if lx.eat(&Tok::RParen)? {
                    break;
                }
                lx.expect(Tok::Comma)?;
            }
        }
        if out.len() != arity {
            return Err(ParseError::Invalid(format!("`{name}` expects {arity} arguments, got {}", out.len())));
        }
        Ok(out)
    }

    /// Scope for a block body with `bind` applied, and the substitution for
    /// proposition parameters.
    fn bind(&self, params: &[String], args: &[Arg]) -> (Scope, BTreeMap<String, Prop>) {
        let mut consts = self.spec.constants.clone();
        let mut props = BTreeMap::new();
        for (p, a) in params.iter().zip(args) {
            match a {
                Arg::Const(n) => {
                    consts.insert(p.clone(), *n);
                }
                Arg::Prop(q) => {
                    props.insert(p.clone(), q.clone());
                }
            }
        }
        let extra: Vec<&String> = props.keys().collect();
        (Scope::new(&self.sigma).with_extra(&extra).with_consts(&consts), props)
    }

    fn diagram(&self, block: &Block, args: &[Arg]) -> Result<TimingDiagram, ParseError> {
        let (scope, props) = self.bind(&block.params, args);
        let mut lx = Lexer::new(&block.body);
        let mut t = td_body(&mut lx, &scope, &Tok::Eof)?;
        let sub = |v: &str| props.get(v).cloned().unwrap_or_else(|| Prop::var(v));
        for w in &mut t.waves {
            w.signal = w.signal.map_vars(&sub);
        }
        if let Some(u) = t.nominals().into_iter().find(|u| self.sigma.contains(u)) {
            return Err(ParseError::NominalClash { name: u });
        }
        Ok(t)
    }

    fn dc(&self, block: &Block, args: &[Arg]) -> Result<Nominated, ParseError> {
        let (mut scope, props) = self.bind(&block.params, args);
        let mut lx = Lexer::new(&block.body);
        let f = formula(&mut lx, &mut scope)?;
        lx.eat(&Tok::Semi)?;
        lx.expect_eof()?;
        let sub = |p: &Prop| p.map_vars(&|v| props.get(v).cloned().unwrap_or_else(|| Prop::var(v)));
        check_nominated(Nominated::plain(f.map_props(&sub)))
    }
}

impl Resolver for Env<'_> {
    fn operand(&self, name: &str, lx: &mut Lexer) -> Result<Option<Nominated>, ParseError> {
        if let Some(b) = self.spec.dcs.get(name) {
            let args = self.args(lx, b.params.len(), name)?;
            return self.dc(b, &args).map(Some);
        }
        if let Some(b) = self.spec.tds.get(name) {
            let args = self.args(lx, b.params.len(), name)?;
            return Ok(Some(xi(&self.diagram(b, &args)?)));
        }
        Ok(None)
    }

    fn atom(&self, name: &str, lx: &mut Lexer) -> Result<Option<SeceNl>, ParseError> {
        let Some(m) = self.spec.macros.get(name) else { return Ok(None) };
        let args = self.args(lx, m.params.len(), name)?;
        let part = |(_, b): &(String, Block)| -> Result<Nominated, ParseError> {
            let sub: Vec<Arg> = b
                .params
                .iter()
                .map(|p| {
                    let i = m.params.iter().position(|q| q == p).ok_or_else(|| ParseError::Unknown {
                        kind: "macro parameter",
                        name: format!("{p} in {name}"),
                    })?;
                    Ok(args[i].clone())
                })
                .collect::<Result<_, ParseError>>()?;
            Ok(xi(&self.diagram(b, &sub)?))
        };
        Ok(Some(SeceNl::Atom(Liveness::Implies { ante: part(&m.ante)?, cons: part(&m.cons)? })))
    }

    fn bare_formulas(&self) -> bool {
        true
    }
}

fn main_item(lx: &mut Lexer, spec: &SpecFile) -> Result<MainItem, ParseError> {
    let env = Env { spec, sigma: spec.sigma() };
    // A lone diagram reference stays a diagram.
    if let Tok::Ident(name) = lx.peek()?.tok.clone() {
        if let Some(b) = spec.tds.get(&name) {
            let mut probe = lx.clone();
            probe.next()?;
            let args = env.args(&mut probe, b.params.len(), &name)?;
            if probe.peek()?.tok == Tok::Semi {
                *lx = probe;
                return env.diagram(b, &args).map(MainItem::Diagram);
            }
        }
    }
    let ctx = Ctx { scope: Scope::new(&env.sigma).with_consts(&spec.constants), nominal_pool: None, resolver: &env };
    secenl(lx, &ctx).map(MainItem::Requirement)
}

#[cfg(test)]
mod tests;
