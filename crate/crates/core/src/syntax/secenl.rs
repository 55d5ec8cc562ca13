//! SeCeNL: boolean combinations of limited-liveness operators over
//! nominated SeCe formulas.

use std::collections::BTreeSet;
use std::fmt;

use super::lexer::{Lexer, Tok};
use super::qddc::{classify_fragment, formula, Formula, Fragment};
use super::{ParseError, Scope};

/// A SeCe formula together with the variables it uses as nominals.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Nominated {
    pub formula: Formula,
    pub nominals: BTreeSet<String>,
}

impl Nominated {
    pub fn new(formula: Formula, nominals: impl IntoIterator<Item = impl Into<String>>) -> Self {
        Nominated { formula, nominals: nominals.into_iter().map(Into::into).collect() }
    }

    pub fn plain(formula: Formula) -> Self {
        Nominated { formula, nominals: BTreeSet::new() }
    }

    pub fn size(&self) -> usize {
        self.formula.size() + self.nominals.len()
    }

    /// Free variables of the formula that are not nominals.
    pub fn system_vars(&self) -> BTreeSet<String> {
        self.formula.free_vars().difference(&self.nominals).cloned().collect()
    }
}

impl fmt::Display for Nominated {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.formula)?;
        if !self.nominals.is_empty() {
            let names: Vec<&str> = self.nominals.iter().map(String::as_str).collect();
            write!(f, " : {{{}}}", names.join(","))?;
        }
        Ok(())
    }
}

/// The six limited-liveness operators.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Liveness {
    /// `init(first / horizon)`: some prefix satisfies `first` no later than
    /// the first prefix satisfying `horizon`.
    Init { first: Nominated, horizon: Nominated },
    /// `anti(D)`: no observation interval satisfies D.
    Anti(Nominated),
    /// `pref(D)`: every prefix satisfies D.
    Pref(Nominated),
    /// `implies(ante ~> cons)`
    Implies { ante: Nominated, cons: Nominated },
    /// `follows(ante ~> resp / window)`: after `ante`, `resp` starts before
    /// the first `window` completes.
    Follows { ante: Nominated, resp: Nominated, window: Nominated },
    /// `triggers(ante ~> resp / window)`: like follows but anchored at the
    /// start of `ante`.
    Triggers { ante: Nominated, resp: Nominated, window: Nominated },
}

impl Liveness {
    pub fn operands(&self) -> Vec<&Nominated> {
        match self {
            Liveness::Init { first, horizon } => vec![first, horizon],
            Liveness::Anti(d) | Liveness::Pref(d) => vec![d],
            Liveness::Implies { ante, cons } => vec![ante, cons],
            Liveness::Follows { ante, resp, window } | Liveness::Triggers { ante, resp, window } => {
                vec![ante, resp, window]
            }
        }
    }

    pub fn keyword(&self) -> &'static str {
        match self {
            Liveness::Init { .. } => "init",
            Liveness::Anti(_) => "anti",
            Liveness::Pref(_) => "pref",
            Liveness::Implies { .. } => "implies",
            Liveness::Follows { .. } => "follows",
            Liveness::Triggers { .. } => "triggers",
        }
    }

    pub fn uses_nominals(&self) -> bool {
        self.operands().iter().any(|d| !d.nominals.is_empty())
    }
}

impl fmt::Display for Liveness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kw = self.keyword();
        match self {
            Liveness::Init { first, horizon } => write!(f, "{kw}({first} / {horizon})"),
            Liveness::Anti(d) | Liveness::Pref(d) => write!(f, "{kw}({d})"),
            Liveness::Implies { ante, cons } => write!(f, "{kw}({ante} ~> {cons})"),
            Liveness::Follows { ante, resp, window } | Liveness::Triggers { ante, resp, window } => {
                write!(f, "{kw}({ante} ~> {resp} / {window})")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum SeceNl {
    Atom(Liveness),
    Not(Box<SeceNl>),
    And(Box<SeceNl>, Box<SeceNl>),
    Or(Box<SeceNl>, Box<SeceNl>),
}

impl SeceNl {
    #[allow(clippy::should_implement_trait)]
    pub fn not(a: SeceNl) -> SeceNl {
        SeceNl::Not(Box::new(a))
    }

    pub fn and(a: SeceNl, b: SeceNl) -> SeceNl {
        SeceNl::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: SeceNl, b: SeceNl) -> SeceNl {
        SeceNl::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: SeceNl, b: SeceNl) -> SeceNl {
        SeceNl::or(SeceNl::not(a), b)
    }

    /// Node count: one per boolean connective plus operand sizes.
    pub fn size(&self) -> usize {
        match self {
            SeceNl::Atom(l) => 1 + l.operands().iter().map(|d| d.size()).sum::<usize>(),
            SeceNl::Not(a) => 1 + a.size(),
            SeceNl::And(a, b) | SeceNl::Or(a, b) => 1 + a.size() + b.size(),
        }
    }

    pub fn atoms(&self) -> Vec<&Liveness> {
        match self {
            SeceNl::Atom(l) => vec![l],
            SeceNl::Not(a) => a.atoms(),
            SeceNl::And(a, b) | SeceNl::Or(a, b) => {
                let mut v = a.atoms();
                v.extend(b.atoms());
                v
            }
        }
    }

    fn prec(&self) -> u8 {
        match self {
            SeceNl::Or(..) => 1,
            SeceNl::And(..) => 2,
            _ => 3,
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        let p = self.prec();
        if p < min {
            write!(f, "(")?;
        }
        match self {
            SeceNl::Atom(l) => write!(f, "{l}")?,
            SeceNl::Not(a) => {
                write!(f, "!")?;
                a.fmt_prec(f, 3)?;
            }
            SeceNl::And(a, b) => {
                a.fmt_prec(f, 2)?;
                write!(f, " && ")?;
                b.fmt_prec(f, 3)?;
            }
            SeceNl::Or(a, b) => {
                a.fmt_prec(f, 1)?;
                write!(f, " || ")?;
                b.fmt_prec(f, 2)?;
            }
        }
        if p < min {
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl fmt::Display for SeceNl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

/// Hooks that let an enclosing grammar (the spec file) supply operands and
/// atoms by name.
pub(crate) trait Resolver {
    /// `name(args)` in operand position. `Ok(None)` if `name` is unknown.
    fn operand(&self, name: &str, lx: &mut Lexer) -> Result<Option<Nominated>, ParseError>;
    /// `name(args)` in atom position (macro call). `Ok(None)` if unknown.
    fn atom(&self, name: &str, lx: &mut Lexer) -> Result<Option<SeceNl>, ParseError>;
    /// Whether a bare formula in atom position is accepted (as `pref`).
    fn bare_formulas(&self) -> bool;
}

struct NoResolver;

impl Resolver for NoResolver {
    fn operand(&self, _: &str, _: &mut Lexer) -> Result<Option<Nominated>, ParseError> {
        Ok(None)
    }
    fn atom(&self, _: &str, _: &mut Lexer) -> Result<Option<SeceNl>, ParseError> {
        Ok(None)
    }
    fn bare_formulas(&self) -> bool {
        false
    }
}

pub(crate) struct Ctx<'r> {
    pub scope: Scope,
    pub nominal_pool: Option<BTreeSet<String>>,
    pub resolver: &'r dyn Resolver,
}

const KEYWORDS: [&str; 6] = ["init", "anti", "pref", "implies", "follows", "triggers"];

/// Parse a SeCeNL requirement over system variables `sigma`, drawing
/// nominals from `theta`.
pub fn parse_secenl<S: AsRef<str>, T: AsRef<str>>(
    text: &str,
    sigma: &[S],
    theta: &[T],
) -> Result<SeceNl, ParseError> {
    for u in theta {
        if sigma.iter().any(|s| s.as_ref() == u.as_ref()) {
            return Err(ParseError::NominalClash { name: u.as_ref().to_string() });
        }
    }
    let ctx = Ctx {
        scope: Scope::new(sigma),
        nominal_pool: Some(theta.iter().map(|t| t.as_ref().to_string()).collect()),
        resolver: &NoResolver,
    };
    let mut lx = Lexer::new(text);
    let z = secenl(&mut lx, &ctx)?;
    lx.expect_eof()?;
    Ok(z)
}

pub(crate) fn secenl(lx: &mut Lexer, ctx: &Ctx) -> Result<SeceNl, ParseError> {
    let lhs = disjunction(lx, ctx)?;
    if lx.eat(&Tok::Implies)? {
        let rhs = secenl(lx, ctx)?;
        return Ok(SeceNl::implies(lhs, rhs));
    }
    Ok(lhs)
}

fn disjunction(lx: &mut Lexer, ctx: &Ctx) -> Result<SeceNl, ParseError> {
    let mut lhs = conjunction(lx, ctx)?;
    while lx.eat(&Tok::OrOr)? {
        lhs = SeceNl::or(lhs, conjunction(lx, ctx)?);
    }
    Ok(lhs)
}

fn conjunction(lx: &mut Lexer, ctx: &Ctx) -> Result<SeceNl, ParseError> {
    let mut lhs = unary(lx, ctx)?;
    while lx.eat(&Tok::AndAnd)? {
        lhs = SeceNl::and(lhs, unary(lx, ctx)?);
    }
    Ok(lhs)
}

fn unary(lx: &mut Lexer, ctx: &Ctx) -> Result<SeceNl, ParseError> {
    if lx.peek()?.tok == Tok::LParen {
        // Parenthesized requirement, or (with bare formulas enabled) a
        // parenthesized QDDC formula: try the former first.
        let saved = lx.clone();
        lx.next()?;
        match secenl(lx, ctx).and_then(|z| lx.expect(Tok::RParen).map(|_| z)) {
            Ok(z) => return Ok(z),
            Err(e) if !ctx.resolver.bare_formulas() => return Err(e),
            Err(_) => *lx = saved,
        }
        return bare(lx, ctx);
    }
    if lx.peek()?.tok == Tok::Bang && !ctx.resolver.bare_formulas() {
        lx.next()?;
        return Ok(SeceNl::not(unary(lx, ctx)?));
    }
    if lx.peek()?.tok == Tok::Bang {
        let saved = lx.clone();
        lx.next()?;
        if let Ok(z) = unary(lx, ctx) {
            return Ok(SeceNl::not(z));
        }
        *lx = saved;
        return bare(lx, ctx);
    }
    if let Tok::Ident(name) = lx.peek()?.tok.clone() {
        if KEYWORDS.contains(&name.as_str()) {
            let saved = lx.clone();
            lx.next()?;
            if lx.peek()?.tok == Tok::LParen {
                return atom(&name, lx, ctx).map(SeceNl::Atom);
            }
            *lx = saved;
        } else if !is_formula_keyword(&name) {
            let t = lx.next()?;
            if let Some(z) = ctx.resolver.atom(&name, lx)? {
                return Ok(z);
            }
            if let Some(d) = ctx.resolver.operand(&name, lx)? {
                return Ok(SeceNl::Atom(Liveness::Pref(d)));
            }
            return Err(ParseError::Unknown { kind: "requirement", name: format!("{name} at {}:{}", t.pos.line, t.pos.col) });
        }
    }
    bare(lx, ctx)
}

fn bare(lx: &mut Lexer, ctx: &Ctx) -> Result<SeceNl, ParseError> {
    if !ctx.resolver.bare_formulas() {
        return Err(lx.error(
            "expected a liveness operator (init, anti, pref, implies, follows, triggers)",
        ));
    }
    let d = operand_formula(lx, ctx, &BTreeSet::new())?;
    Ok(SeceNl::Atom(Liveness::Pref(Nominated::plain(d))))
}

fn is_formula_keyword(s: &str) -> bool {
    matches!(s, "pt" | "ext" | "true" | "false" | "slen" | "scount" | "sdur" | "ex" | "all")
}

fn atom(kw: &str, lx: &mut Lexer, ctx: &Ctx) -> Result<Liveness, ParseError> {
    lx.expect(Tok::LParen)?;
    let a = operand(lx, ctx)?;
    let l = match kw {
        "anti" => Liveness::Anti(a),
        "pref" => Liveness::Pref(a),
        "init" => {
            lx.expect(Tok::Slash)?;
            Liveness::Init { first: a, horizon: operand(lx, ctx)? }
        }
        "implies" => {
            lx.expect(Tok::LeadsTo)?;
            Liveness::Implies { ante: a, cons: operand(lx, ctx)? }
        }
        _ => {
            lx.expect(Tok::LeadsTo)?;
            let resp = operand(lx, ctx)?;
            lx.expect(Tok::Slash)?;
            let window = operand(lx, ctx)?;
            if kw == "follows" {
                Liveness::Follows { ante: a, resp, window }
            } else {
                Liveness::Triggers { ante: a, resp, window }
            }
        }
    };
    lx.expect(Tok::RParen)?;
    Ok(l)
}

fn operand(lx: &mut Lexer, ctx: &Ctx) -> Result<Nominated, ParseError> {
    if let Tok::Ident(name) = lx.peek()?.tok.clone() {
        if !is_formula_keyword(&name) {
            let t = lx.next()?;
            return match ctx.resolver.operand(&name, lx)? {
                Some(d) => Ok(d),
                None => Err(ParseError::Syntax {
                    line: t.pos.line,
                    col: t.pos.col,
                    msg: format!("expected a formula, found identifier `{name}`"),
                }),
            };
        }
    }
    // The nominal set follows the formula, so parse with every pool nominal
    // in scope and check membership afterwards.
    let pool = ctx.nominal_pool.clone().unwrap_or_default();
    let save = lx.clone();
    let mut scope = ctx.scope.with_extra(&pool.iter().collect::<Vec<_>>());
    let d = formula(lx, &mut scope)?;
    let mut nominals = BTreeSet::new();
    if lx.eat(&Tok::Colon)? {
        lx.expect(Tok::LBrace)?;
        if !lx.eat(&Tok::RBrace)? {
            loop {
                let (u, _) = lx.ident()?;
                if ctx.scope.knows(&u) {
                    return Err(ParseError::NominalClash { name: u });
                }
                if !pool.contains(&u) {
                    return Err(ParseError::Unknown { kind: "nominal", name: u });
                }
                nominals.insert(u);
                if lx.eat(&Tok::RBrace)? {
                    break;
                }
                lx.expect(Tok::Comma)?;
            }
        }
    }
    // Re-check scoping now that the nominal set is known.
    let mut strict = ctx.scope.with_extra(&nominals.iter().collect::<Vec<_>>());
    let mut relex = save;
    formula(&mut relex, &mut strict)?;
    check_nominated(Nominated { formula: d, nominals })
}

fn operand_formula(
    lx: &mut Lexer,
    ctx: &Ctx,
    nominals: &BTreeSet<String>,
) -> Result<Formula, ParseError> {
    let mut scope = ctx.scope.with_extra(&nominals.iter().collect::<Vec<_>>());
    let d = formula(lx, &mut scope)?;
    check_nominated(Nominated::plain(d)).map(|n| n.formula)
}

/// Fragment and nominal-occurrence checks for an operand.
pub(crate) fn check_nominated(n: Nominated) -> Result<Nominated, ParseError> {
    let tag = classify_fragment(&n.formula);
    if tag.fragment > Fragment::SeCe {
        let path = &tag.offending[0];
        let node = n.formula.at_path(path).map(|d| d.to_string()).unwrap_or_default();
        return Err(ParseError::FragmentViolation {
            reason: format!("`{node}` at path {path:?} uses negation or quantification"),
        });
    }
    let free = n.formula.free_vars();
    if let Some(u) = n.nominals.iter().find(|u| !free.contains(*u)) {
        return Err(ParseError::Invalid(format!("nominal `{u}` does not occur in `{}`", n.formula)));
    }
    Ok(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_qddc;

    #[test]
    fn lags_example() {
        let z = parse_secenl(
            "implies((<u>^[[P]] && (slen=3)^<v>^true):{u,v} ~> (true^<v>^[[Q]]):{v})",
            &["P", "Q"],
            &["u", "v"],
        )
        .unwrap();
        let SeceNl::Atom(Liveness::Implies { ante, cons }) = &z else { panic!("{z:?}") };
        assert_eq!(ante.nominals, ["u", "v"].iter().map(|s| s.to_string()).collect());
        assert_eq!(cons.nominals.len(), 1);
        assert_eq!(
            cons.formula,
            parse_qddc("true^<v>^[[Q]]", &["Q", "v"]).unwrap()
        );
        assert_eq!(parse_secenl(&z.to_string(), &["P", "Q"], &["u", "v"]).unwrap(), z);
    }

    #[test]
    fn deadtime_anti() {
        let z = parse_secenl("anti([[Lost]] && slen>2)", &["Lost"], &[] as &[&str]).unwrap();
        assert!(matches!(z, SeceNl::Atom(Liveness::Anti(_))));
    }

    #[test]
    fn negation_inside_operand_rejected() {
        let e = parse_secenl("pref(!([p]))", &["p"], &[] as &[&str]).unwrap_err();
        assert!(matches!(e, ParseError::FragmentViolation { .. }), "{e:?}");
    }

    #[test]
    fn nominal_clash() {
        assert!(matches!(
            parse_secenl("pref(<p>)", &["p"], &["p"]),
            Err(ParseError::NominalClash { .. })
        ));
    }

    #[test]
    fn nominal_must_be_declared_on_operand() {
        // `u` is in the pool but not listed in the operand's nominal set.
        assert!(parse_secenl("pref(<u>^[[p]])", &["p"], &["u"]).is_err());
        assert!(parse_secenl("pref((<u>^[[p]]):{u})", &["p"], &["u"]).is_ok());
    }

    #[test]
    fn boolean_structure() {
        let s = ["p", "q"];
        let z = parse_secenl(
            "!anti(<p>) || pref([[q]]) && follows(<p> ~> <q> / slen=2) => init(<p> / pt)",
            &s,
            &[] as &[&str],
        )
        .unwrap();
        assert_eq!(parse_secenl(&z.to_string(), &s, &[] as &[&str]).unwrap(), z);
        assert_eq!(z.atoms().len(), 4);
    }
}
