//! QDDC formulas: AST, parser, printer and fragment classification.

use std::collections::BTreeSet;
use std::fmt;

use super::lexer::{Lexer, Tok};
use super::prop::{prop, prop_unary, Prop};
use super::{ParseError, Scope};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Cmp {
    Lt,
    Le,
    Eq,
    Ge,
    Gt,
}

impl Cmp {
    #[inline]
    pub fn holds(self, value: u64, c: u64) -> bool {
        match self {
            Cmp::Lt => value < c,
            Cmp::Le => value <= c,
            Cmp::Eq => value == c,
            Cmp::Ge => value >= c,
            Cmp::Gt => value > c,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Cmp::Lt => "<",
            Cmp::Le => "<=",
            Cmp::Eq => "=",
            Cmp::Ge => ">=",
            Cmp::Gt => ">",
        }
    }
}

/// Core QDDC syntax. Derived constructs (`pt`, `ext`, `true`, `false`,
/// `<>`, `[]`, `=>`, `<=>`) never appear here; the constructors below expand
/// them.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    /// `<phi>`: phi holds at the first point.
    Begin(Prop),
    /// `[phi]`: phi holds at every point but the last.
    AllButLast(Prop),
    /// `[[phi]]`: phi holds at every point.
    All(Prop),
    /// `{phi}`: a unit interval whose first point satisfies phi.
    Unit(Prop),
    Chop(Box<Formula>, Box<Formula>),
    Not(Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Star(Box<Formula>),
    Exists(String, Box<Formula>),
    Forall(String, Box<Formula>),
    Slen(Cmp, u64),
    Scount(Prop, Cmp, u64),
    Sdur(Prop, Cmp, u64),
}

pub type Path = Vec<usize>;

impl Formula {
    pub fn chop(a: Formula, b: Formula) -> Formula {
        Formula::Chop(Box::new(a), Box::new(b))
    }

    /// Left-folded chop chain; `None` for an empty iterator.
    pub fn chop_all(items: impl IntoIterator<Item = Formula>) -> Option<Formula> {
        items.into_iter().reduce(Formula::chop)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(a: Formula) -> Formula {
        Formula::Not(Box::new(a))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    /// Left-folded conjunction; `true` for an empty iterator.
    pub fn and_all(items: impl IntoIterator<Item = Formula>) -> Formula {
        items.into_iter().reduce(Formula::and).unwrap_or_else(Formula::tt)
    }

    /// Left-folded disjunction; `false` for an empty iterator.
    pub fn or_all(items: impl IntoIterator<Item = Formula>) -> Formula {
        items.into_iter().reduce(Formula::or).unwrap_or_else(Formula::ff)
    }

    pub fn star(a: Formula) -> Formula {
        Formula::Star(Box::new(a))
    }

    pub fn exists(v: impl Into<String>, a: Formula) -> Formula {
        Formula::Exists(v.into(), Box::new(a))
    }

    pub fn forall(v: impl Into<String>, a: Formula) -> Formula {
        Formula::Forall(v.into(), Box::new(a))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::or(Formula::not(a), b)
    }

    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::and(Formula::implies(a.clone(), b.clone()), Formula::implies(b, a))
    }

    pub fn pt() -> Formula {
        Formula::Slen(Cmp::Eq, 0)
    }

    pub fn ext() -> Formula {
        Formula::Slen(Cmp::Ge, 1)
    }

    pub fn tt() -> Formula {
        Formula::Slen(Cmp::Ge, 0)
    }

    pub fn ff() -> Formula {
        Formula::Slen(Cmp::Lt, 0)
    }

    /// `<> D`, i.e. `true^D^true`.
    pub fn diamond(d: Formula) -> Formula {
        Formula::chop(Formula::chop(Formula::tt(), d), Formula::tt())
    }

    /// `[] D`, i.e. `!(true^(!D)^true)`.
    pub fn boxed(d: Formula) -> Formula {
        Formula::not(Formula::diamond(Formula::not(d)))
    }

    /// Number of AST nodes, counting each proposition as one node.
    pub fn size(&self) -> usize {
        match self {
            Formula::Begin(_)
            | Formula::AllButLast(_)
            | Formula::All(_)
            | Formula::Unit(_)
            | Formula::Slen(..)
            | Formula::Scount(..)
            | Formula::Sdur(..) => 1,
            Formula::Not(a) | Formula::Star(a) | Formula::Exists(_, a) | Formula::Forall(_, a) => {
                1 + a.size()
            }
            Formula::Chop(a, b) | Formula::Or(a, b) | Formula::And(a, b) => 1 + a.size() + b.size(),
        }
    }

    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::Not(a) | Formula::Star(a) | Formula::Exists(_, a) | Formula::Forall(_, a) => {
                vec![a]
            }
            Formula::Chop(a, b) | Formula::Or(a, b) | Formula::And(a, b) => vec![a, b],
            _ => vec![],
        }
    }

    pub fn at_path(&self, path: &[usize]) -> Option<&Formula> {
        match path.split_first() {
            None => Some(self),
            Some((&i, rest)) => self.children().get(i).and_then(|c| c.at_path(rest)),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut out);
        out
    }

    fn collect_free(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::Begin(p)
            | Formula::AllButLast(p)
            | Formula::All(p)
            | Formula::Unit(p)
            | Formula::Scount(p, ..)
            | Formula::Sdur(p, ..) => p.collect_vars(out),
            Formula::Slen(..) => {}
            Formula::Not(a) | Formula::Star(a) => a.collect_free(out),
            Formula::Chop(a, b) | Formula::Or(a, b) | Formula::And(a, b) => {
                a.collect_free(out);
                b.collect_free(out);
            }
            Formula::Exists(v, a) | Formula::Forall(v, a) => {
                let mut inner = BTreeSet::new();
                a.collect_free(&mut inner);
                inner.remove(v);
                out.extend(inner);
            }
        }
    }

    /// Apply `f` to every proposition, leaving binders untouched.
    pub fn map_props(&self, f: &dyn Fn(&Prop) -> Prop) -> Formula {
        let rec = |a: &Formula| Box::new(a.map_props(f));
        match self {
            Formula::Begin(p) => Formula::Begin(f(p)),
            Formula::AllButLast(p) => Formula::AllButLast(f(p)),
            Formula::All(p) => Formula::All(f(p)),
            Formula::Unit(p) => Formula::Unit(f(p)),
            Formula::Scount(p, c, n) => Formula::Scount(f(p), *c, *n),
            Formula::Sdur(p, c, n) => Formula::Sdur(f(p), *c, *n),
            Formula::Slen(c, n) => Formula::Slen(*c, *n),
            Formula::Not(a) => Formula::Not(rec(a)),
            Formula::Star(a) => Formula::Star(rec(a)),
            Formula::Chop(a, b) => Formula::Chop(rec(a), rec(b)),
            Formula::Or(a, b) => Formula::Or(rec(a), rec(b)),
            Formula::And(a, b) => Formula::And(rec(a), rec(b)),
            Formula::Exists(v, a) => Formula::Exists(v.clone(), rec(a)),
            Formula::Forall(v, a) => Formula::Forall(v.clone(), rec(a)),
        }
    }

    /// Rename free occurrences of `from` to `to`. `to` must not be captured
    /// by a binder inside the formula.
    pub fn rename_free(&self, from: &str, to: &str) -> Formula {
        match self {
            Formula::Exists(v, _) | Formula::Forall(v, _) if v == from => self.clone(),
            Formula::Exists(v, a) => Formula::exists(v.clone(), a.rename_free(from, to)),
            Formula::Forall(v, a) => Formula::forall(v.clone(), a.rename_free(from, to)),
            Formula::Not(a) => Formula::not(a.rename_free(from, to)),
            Formula::Star(a) => Formula::star(a.rename_free(from, to)),
            Formula::Chop(a, b) => Formula::chop(a.rename_free(from, to), b.rename_free(from, to)),
            Formula::Or(a, b) => Formula::or(a.rename_free(from, to), b.rename_free(from, to)),
            Formula::And(a, b) => Formula::and(a.rename_free(from, to), b.rename_free(from, to)),
            _ => self.map_props(&|p| p.rename(from, to)),
        }
    }

    fn prec(&self) -> u8 {
        match self {
            Formula::Exists(..) | Formula::Forall(..) => 0,
            Formula::Or(..) => 1,
            Formula::And(..) => 2,
            Formula::Chop(..) => 3,
            Formula::Not(_) => 4,
            Formula::Star(_) => 5,
            _ => 6,
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        let p = self.prec();
        if p < min {
            write!(f, "(")?;
        }
        match self {
            Formula::Begin(q) => write!(f, "<{q}>")?,
            Formula::AllButLast(q) => write!(f, "[{q}]")?,
            Formula::All(q) => write!(f, "[[{q}]]")?,
            Formula::Unit(q) => write!(f, "{{{q}}}")?,
            Formula::Slen(c, n) => write!(f, "slen{}{n}", c.symbol())?,
            Formula::Scount(q, c, n) | Formula::Sdur(q, c, n) => {
                let kw = if matches!(self, Formula::Scount(..)) { "scount" } else { "sdur" };
                write!(f, "{kw} ")?;
                q.fmt_prec(f, 4)?;
                write!(f, "{}{n}", c.symbol())?;
            }
            Formula::Chop(a, b) => {
                a.fmt_prec(f, 3)?;
                write!(f, "^")?;
                b.fmt_prec(f, 4)?;
            }
            Formula::And(a, b) => {
                a.fmt_prec(f, 2)?;
                write!(f, " && ")?;
                b.fmt_prec(f, 3)?;
            }
            Formula::Or(a, b) => {
                a.fmt_prec(f, 1)?;
                write!(f, " || ")?;
                b.fmt_prec(f, 2)?;
            }
            Formula::Not(a) => {
                write!(f, "!")?;
                a.fmt_prec(f, 4)?;
            }
            Formula::Star(a) => {
                a.fmt_prec(f, 6)?;
                write!(f, "*")?;
            }
            Formula::Exists(v, a) | Formula::Forall(v, a) => {
                let kw = if matches!(self, Formula::Exists(..)) { "ex" } else { "all" };
                write!(f, "{kw} {v}. ")?;
                a.fmt_prec(f, 0)?;
            }
        }
        if p < min {
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

/// Syntactic fragments, ordered by inclusion: CE ⊆ SeCe ⊆ full QDDC.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Fragment {
    Ce,
    SeCe,
    Full,
}

impl fmt::Display for Fragment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Fragment::Ce => "CE",
            Fragment::SeCe => "SeCe",
            Fragment::Full => "QDDC",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FragmentTag {
    pub fragment: Fragment,
    /// Nodes that keep the formula out of the next smaller fragment:
    /// negations and quantifiers for full QDDC, conjunctions for SeCe.
    pub offending: Vec<Path>,
}

pub fn classify_fragment(d: &Formula) -> FragmentTag {
    let mut full = vec![];
    let mut conj = vec![];
    let mut path = vec![];
    walk_fragment(d, &mut path, &mut full, &mut conj);
    if !full.is_empty() {
        FragmentTag { fragment: Fragment::Full, offending: full }
    } else if !conj.is_empty() {
        FragmentTag { fragment: Fragment::SeCe, offending: conj }
    } else {
        FragmentTag { fragment: Fragment::Ce, offending: vec![] }
    }
}

fn walk_fragment(d: &Formula, path: &mut Path, full: &mut Vec<Path>, conj: &mut Vec<Path>) {
    match d {
        Formula::Not(_) | Formula::Exists(..) | Formula::Forall(..) => full.push(path.clone()),
        Formula::And(..) => conj.push(path.clone()),
        _ => {}
    }
    for (i, c) in d.children().into_iter().enumerate() {
        path.push(i);
        walk_fragment(c, path, full, conj);
        path.pop();
    }
}

/// Parse a QDDC formula over `sigma`.
pub fn parse_qddc<S: AsRef<str>>(text: &str, sigma: &[S]) -> Result<Formula, ParseError> {
    parse_qddc_in(text, &mut Scope::new(sigma))
}

pub fn parse_qddc_in(text: &str, scope: &mut Scope) -> Result<Formula, ParseError> {
    let mut lx = Lexer::new(text);
    if lx.peek()?.tok == Tok::Eof {
        return Err(lx.error("empty formula"));
    }
    let d = formula(&mut lx, scope)?;
    lx.expect_eof()?;
    Ok(d)
}

pub(crate) fn formula(lx: &mut Lexer, scope: &mut Scope) -> Result<Formula, ParseError> {
    if lx.is_ident("ex")? || lx.is_ident("all")? {
        return quantified(lx, scope);
    }
    let mut lhs = implication(lx, scope)?;
    while lx.eat(&Tok::Iff)? {
        let rhs = implication(lx, scope)?;
        lhs = Formula::iff(lhs, rhs);
    }
    Ok(lhs)
}

fn quantified(lx: &mut Lexer, scope: &mut Scope) -> Result<Formula, ParseError> {
    let (kw, _) = lx.ident()?;
    let (var, _) = lx.ident()?;
    lx.expect(Tok::Dot)?;
    scope.bind(var.clone());
    let body = formula(lx, scope);
    scope.unbind();
    let body = body?;
    Ok(if kw == "ex" { Formula::exists(var, body) } else { Formula::forall(var, body) })
}

fn implication(lx: &mut Lexer, scope: &mut Scope) -> Result<Formula, ParseError> {
    let lhs = disjunction(lx, scope)?;
    if lx.eat(&Tok::Implies)? {
        let rhs = implication(lx, scope)?;
        return Ok(Formula::implies(lhs, rhs));
    }
    Ok(lhs)
}

fn disjunction(lx: &mut Lexer, scope: &mut Scope) -> Result<Formula, ParseError> {
    let mut lhs = conjunction(lx, scope)?;
    while lx.eat(&Tok::OrOr)? {
        lhs = Formula::or(lhs, conjunction(lx, scope)?);
    }
    Ok(lhs)
}

fn conjunction(lx: &mut Lexer, scope: &mut Scope) -> Result<Formula, ParseError> {
    let mut lhs = chop(lx, scope)?;
    while lx.eat(&Tok::AndAnd)? {
        lhs = Formula::and(lhs, chop(lx, scope)?);
    }
    Ok(lhs)
}

fn chop(lx: &mut Lexer, scope: &mut Scope) -> Result<Formula, ParseError> {
    let mut lhs = unary(lx, scope)?;
    while lx.eat(&Tok::Caret)? {
        lhs = Formula::chop(lhs, unary(lx, scope)?);
    }
    Ok(lhs)
}

fn unary(lx: &mut Lexer, scope: &mut Scope) -> Result<Formula, ParseError> {
    if lx.eat(&Tok::Bang)? {
        return Ok(Formula::not(unary(lx, scope)?));
    }
    if lx.eat(&Tok::Diamond)? {
        return Ok(Formula::diamond(unary(lx, scope)?));
    }
    if lx.eat(&Tok::BoxOp)? {
        return Ok(Formula::boxed(unary(lx, scope)?));
    }
    if lx.is_ident("ex")? || lx.is_ident("all")? {
        return quantified(lx, scope);
    }
    let mut d = primary(lx, scope)?;
    while lx.eat(&Tok::Star)? {
        d = Formula::star(d);
    }
    Ok(d)
}

fn primary(lx: &mut Lexer, scope: &mut Scope) -> Result<Formula, ParseError> {
    let t = lx.next()?;
    Ok(match t.tok {
        Tok::LParen => {
            let d = formula(lx, scope)?;
            lx.expect(Tok::RParen)?;
            d
        }
        Tok::Lt => {
            let p = prop(lx, scope)?;
            lx.expect(Tok::Gt)?;
            Formula::Begin(p)
        }
        Tok::LBrack => {
            let p = prop(lx, scope)?;
            lx.expect(Tok::RBrack)?;
            Formula::AllButLast(p)
        }
        Tok::LBrack2 => {
            let p = prop(lx, scope)?;
            lx.expect(Tok::RBrack2)?;
            Formula::All(p)
        }
        Tok::LBrace => {
            let p = prop(lx, scope)?;
            lx.expect(Tok::RBrace)?;
            Formula::Unit(p)
        }
        Tok::Ident(kw) => match kw.as_str() {
            "pt" => Formula::pt(),
            "ext" => Formula::ext(),
            "true" => Formula::tt(),
            "false" => Formula::ff(),
            "slen" => {
                let (c, n) = comparison(lx, scope)?;
                Formula::Slen(c, n)
            }
            "scount" | "sdur" => {
                let p = prop_unary(lx, scope)?;
                let (c, n) = comparison(lx, scope)?;
                if kw == "scount" {
                    Formula::Scount(p, c, n)
                } else {
                    Formula::Sdur(p, c, n)
                }
            }
            _ => {
                return Err(ParseError::Syntax {
                    line: t.pos.line,
                    col: t.pos.col,
                    msg: format!("expected a formula, found identifier `{kw}`"),
                })
            }
        },
        other => {
            return Err(ParseError::Syntax {
                line: t.pos.line,
                col: t.pos.col,
                msg: format!("expected a formula, found {other}"),
            })
        }
    })
}

fn comparison(lx: &mut Lexer, scope: &Scope) -> Result<(Cmp, u64), ParseError> {
    let t = lx.next()?;
    let c = match t.tok {
        Tok::Lt => Cmp::Lt,
        Tok::Le => Cmp::Le,
        Tok::Eq => Cmp::Eq,
        Tok::Ge => Cmp::Ge,
        Tok::Gt => Cmp::Gt,
        other => {
            return Err(ParseError::Syntax {
                line: t.pos.line,
                col: t.pos.col,
                msg: format!("expected a comparison operator, found {other}"),
            })
        }
    };
    Ok((c, constant(lx, scope)?))
}

pub(crate) fn constant(lx: &mut Lexer, scope: &Scope) -> Result<u64, ParseError> {
    let t = lx.next()?;
    match t.tok {
        Tok::Nat(n) => Ok(n),
        Tok::Minus => Err(ParseError::NegativeConstant { line: t.pos.line, col: t.pos.col }),
        Tok::Ident(name) => scope.constant(&name).ok_or(ParseError::UnresolvedConstant {
            name,
            line: t.pos.line,
            col: t.pos.col,
        }),
        other => Err(ParseError::Syntax {
            line: t.pos.line,
            col: t.pos.col,
            msg: format!("expected a natural constant, found {other}"),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Prop {
        Prop::var(s)
    }

    #[test]
    fn transition_window_formula() {
        let d = parse_qddc("[!P]^<u>^((slen=3)&&([!P]^[[P]]))^[[P]]", &["P", "u"]).unwrap();
        let expected = Formula::chop_all([
            Formula::AllButLast(Prop::not(p("P"))),
            Formula::Begin(p("u")),
            Formula::and(
                Formula::Slen(Cmp::Eq, 3),
                Formula::chop(Formula::AllButLast(Prop::not(p("P"))), Formula::All(p("P"))),
            ),
            Formula::All(p("P")),
        ])
        .unwrap();
        assert_eq!(d, expected);
    }

    #[test]
    fn derived_constructs_expand() {
        let s = ["p"];
        assert_eq!(parse_qddc("<> [p]", &s).unwrap(), parse_qddc("true^[p]^true", &s).unwrap());
        assert_eq!(
            parse_qddc("[] [p]", &s).unwrap(),
            parse_qddc("!(true^(![p])^true)", &s).unwrap()
        );
        assert_eq!(parse_qddc("pt", &s).unwrap(), parse_qddc("slen=0", &s).unwrap());
        assert_eq!(parse_qddc("ext", &s).unwrap(), parse_qddc("slen>=1", &s).unwrap());
    }

    #[test]
    fn negative_constant_rejected() {
        assert!(matches!(
            parse_qddc("slen = -1", &["p"]),
            Err(ParseError::NegativeConstant { .. })
        ));
    }

    #[test]
    fn named_constants_resolve() {
        let consts = [("n".to_string(), 4u64)].into_iter().collect();
        let mut scope = Scope::new(&["p"]).with_consts(&consts);
        assert_eq!(parse_qddc_in("slen=n", &mut scope).unwrap(), Formula::Slen(Cmp::Eq, 4));
        assert!(matches!(
            parse_qddc("slen=m", &["p"]),
            Err(ParseError::UnresolvedConstant { .. })
        ));
    }

    #[test]
    fn quantifier_binds_scope() {
        let d = parse_qddc("ex q. [[q]] && <p>", &["p"]).unwrap();
        assert!(matches!(d, Formula::Exists(ref v, _) if v == "q"));
        assert_eq!(d.free_vars().into_iter().collect::<Vec<_>>(), vec!["p".to_string()]);
        assert!(parse_qddc("(ex q. [[q]]) && <q>", &["p"]).is_err());
    }

    #[test]
    fn fragments() {
        let ce = Formula::chop(Formula::AllButLast(p("p")), Formula::All(p("q")));
        assert_eq!(classify_fragment(&ce).fragment, Fragment::Ce);
        let sece = Formula::and(Formula::AllButLast(p("p")), Formula::All(p("q")));
        let tag = classify_fragment(&sece);
        assert_eq!(tag.fragment, Fragment::SeCe);
        assert_eq!(tag.offending, vec![Vec::<usize>::new()]);
        let full = Formula::chop(Formula::tt(), Formula::not(Formula::AllButLast(p("p"))));
        let tag = classify_fragment(&full);
        assert_eq!(tag.fragment, Fragment::Full);
        assert_eq!(tag.offending, vec![vec![1]]);
        assert_eq!(full.at_path(&[1]), Some(&Formula::not(Formula::AllButLast(p("p")))));
    }

    #[test]
    fn printer_precedence() {
        let s = ["p", "q"];
        for text in [
            "[p]^[[q]]",
            "!([p]^<q>) || {p} && slen<2",
            "([p] || <q>)^[[p]]*",
            "ex p. [[p]]^<q>",
            "(ex p. [[p]]) && <q>",
            "scount (p && q)=1 && sdur !p>2",
            "(!<p>)*",
            "([p]*)*",
        ] {
            let d = parse_qddc(text, &s).unwrap();
            assert_eq!(parse_qddc(&d.to_string(), &s).unwrap(), d, "{text} -> {d}");
        }
    }
}
