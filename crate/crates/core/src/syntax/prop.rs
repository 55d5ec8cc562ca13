use std::collections::BTreeSet;
use std::fmt;

use super::lexer::{Lexer, Tok};
use super::{ParseError, Scope};

/// Propositional formula over a set of boolean variables.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Prop {
    False,
    True,
    Var(String),
    Not(Box<Prop>),
    And(Box<Prop>, Box<Prop>),
    Or(Box<Prop>, Box<Prop>),
    Implies(Box<Prop>, Box<Prop>),
    Iff(Box<Prop>, Box<Prop>),
}

impl Prop {
    pub fn var(name: impl Into<String>) -> Prop {
        Prop::Var(name.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(p: Prop) -> Prop {
        Prop::Not(Box::new(p))
    }

    pub fn and(a: Prop, b: Prop) -> Prop {
        Prop::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Prop, b: Prop) -> Prop {
        Prop::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Prop, b: Prop) -> Prop {
        Prop::Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: Prop, b: Prop) -> Prop {
        Prop::Iff(Box::new(a), Box::new(b))
    }

    /// Left-folded conjunction; `True` for an empty iterator.
    pub fn all(items: impl IntoIterator<Item = Prop>) -> Prop {
        items.into_iter().reduce(Prop::and).unwrap_or(Prop::True)
    }

    /// Left-folded disjunction; `False` for an empty iterator.
    pub fn any(items: impl IntoIterator<Item = Prop>) -> Prop {
        items.into_iter().reduce(Prop::or).unwrap_or(Prop::False)
    }

    pub fn eval(&self, val: &dyn Fn(&str) -> bool) -> bool {
        match self {
            Prop::False => false,
            Prop::True => true,
            Prop::Var(v) => val(v),
            Prop::Not(p) => !p.eval(val),
            Prop::And(a, b) => a.eval(val) && b.eval(val),
            Prop::Or(a, b) => a.eval(val) || b.eval(val),
            Prop::Implies(a, b) => !a.eval(val) || b.eval(val),
            Prop::Iff(a, b) => a.eval(val) == b.eval(val),
        }
    }

    pub fn vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    pub(crate) fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Prop::False | Prop::True => {}
            Prop::Var(v) => {
                out.insert(v.clone());
            }
            Prop::Not(p) => p.collect_vars(out),
            Prop::And(a, b) | Prop::Or(a, b) | Prop::Implies(a, b) | Prop::Iff(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    pub fn rename(&self, from: &str, to: &str) -> Prop {
        self.map_vars(&|v| if v == from { Prop::var(to) } else { Prop::var(v) })
    }

    /// Replace every variable by the proposition `f` returns for it.
    pub fn map_vars(&self, f: &dyn Fn(&str) -> Prop) -> Prop {
        match self {
            Prop::False => Prop::False,
            Prop::True => Prop::True,
            Prop::Var(v) => f(v),
            Prop::Not(p) => Prop::not(p.map_vars(f)),
            Prop::And(a, b) => Prop::and(a.map_vars(f), b.map_vars(f)),
            Prop::Or(a, b) => Prop::or(a.map_vars(f), b.map_vars(f)),
            Prop::Implies(a, b) => Prop::implies(a.map_vars(f), b.map_vars(f)),
            Prop::Iff(a, b) => Prop::iff(a.map_vars(f), b.map_vars(f)),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Prop::False | Prop::True | Prop::Var(_) => 1,
            Prop::Not(p) => 1 + p.size(),
            Prop::And(a, b) | Prop::Or(a, b) | Prop::Implies(a, b) | Prop::Iff(a, b) => {
                1 + a.size() + b.size()
            }
        }
    }

    /// Bind variables to bit positions of a letter. Unknown variables are
    /// reported as `Err(name)`.
    pub fn index(&self, pos: &dyn Fn(&str) -> Option<usize>) -> Result<IndexedProp, String> {
        Ok(match self {
            Prop::False => IndexedProp::Const(false),
            Prop::True => IndexedProp::Const(true),
            Prop::Var(v) => IndexedProp::Bit(pos(v).ok_or_else(|| v.clone())? as u32),
            Prop::Not(p) => IndexedProp::Not(Box::new(p.index(pos)?)),
            Prop::And(a, b) => IndexedProp::And(Box::new(a.index(pos)?), Box::new(b.index(pos)?)),
            Prop::Or(a, b) => IndexedProp::Or(Box::new(a.index(pos)?), Box::new(b.index(pos)?)),
            Prop::Implies(a, b) => IndexedProp::Or(
                Box::new(IndexedProp::Not(Box::new(a.index(pos)?))),
                Box::new(b.index(pos)?),
            ),
            Prop::Iff(a, b) => IndexedProp::Iff(Box::new(a.index(pos)?), Box::new(b.index(pos)?)),
        })
    }

    /// Truth table over `vars`: entry `l` is the value under letter `l`,
    /// where bit `i` of `l` is the value of `vars[i]`.
    pub fn truth_table(&self, vars: &[String]) -> Result<Vec<bool>, String> {
        let ip = self.index(&|v| vars.iter().position(|x| x == v))?;
        Ok((0..1u64 << vars.len()).map(|l| ip.eval(l)).collect())
    }

    fn prec(&self) -> u8 {
        match self {
            Prop::Iff(..) => 0,
            Prop::Implies(..) => 1,
            Prop::Or(..) => 2,
            Prop::And(..) => 3,
            Prop::Not(_) => 4,
            _ => 5,
        }
    }

    pub(crate) fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        let p = self.prec();
        if p < min {
            write!(f, "(")?;
        }
        match self {
            Prop::False => write!(f, "false")?,
            Prop::True => write!(f, "true")?,
            Prop::Var(v) => write!(f, "{v}")?,
            Prop::Not(a) => {
                write!(f, "!")?;
                a.fmt_prec(f, 4)?;
            }
            Prop::And(a, b) => {
                a.fmt_prec(f, 3)?;
                write!(f, " && ")?;
                b.fmt_prec(f, 4)?;
            }
            Prop::Or(a, b) => {
                a.fmt_prec(f, 2)?;
                write!(f, " || ")?;
                b.fmt_prec(f, 3)?;
            }
            Prop::Implies(a, b) => {
                a.fmt_prec(f, 2)?;
                write!(f, " => ")?;
                b.fmt_prec(f, 1)?;
            }
            Prop::Iff(a, b) => {
                a.fmt_prec(f, 0)?;
                write!(f, " <=> ")?;
                b.fmt_prec(f, 1)?;
            }
        }
        if p < min {
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl fmt::Display for Prop {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

/// A proposition with variables resolved to letter bit positions.
#[derive(Debug, Clone)]
pub enum IndexedProp {
    Const(bool),
    Bit(u32),
    Not(Box<IndexedProp>),
    And(Box<IndexedProp>, Box<IndexedProp>),
    Or(Box<IndexedProp>, Box<IndexedProp>),
    Iff(Box<IndexedProp>, Box<IndexedProp>),
}

impl IndexedProp {
    #[inline]
    pub fn eval(&self, letter: u64) -> bool {
        match self {
            IndexedProp::Const(b) => *b,
            IndexedProp::Bit(i) => letter >> i & 1 == 1,
            IndexedProp::Not(p) => !p.eval(letter),
            IndexedProp::And(a, b) => a.eval(letter) && b.eval(letter),
            IndexedProp::Or(a, b) => a.eval(letter) || b.eval(letter),
            IndexedProp::Iff(a, b) => a.eval(letter) == b.eval(letter),
        }
    }
}

/// Parse a proposition over the variables `sigma`.
pub fn parse_prop<S: AsRef<str>>(text: &str, sigma: &[S]) -> Result<Prop, ParseError> {
    let mut lx = Lexer::new(text);
    if lx.peek()?.tok == Tok::Eof {
        return Err(lx.error("empty proposition"));
    }
    let p = prop(&mut lx, &Scope::new(sigma))?;
    lx.expect_eof()?;
    Ok(p)
}

pub(crate) fn prop(lx: &mut Lexer, scope: &Scope) -> Result<Prop, ParseError> {
    let mut lhs = prop_implies(lx, scope)?;
    while lx.eat(&Tok::Iff)? {
        let rhs = prop_implies(lx, scope)?;
        lhs = Prop::iff(lhs, rhs);
    }
    Ok(lhs)
}

fn prop_implies(lx: &mut Lexer, scope: &Scope) -> Result<Prop, ParseError> {
    let lhs = prop_or(lx, scope)?;
    if lx.eat(&Tok::Implies)? {
        let rhs = prop_implies(lx, scope)?;
        return Ok(Prop::implies(lhs, rhs));
    }
    Ok(lhs)
}

fn prop_or(lx: &mut Lexer, scope: &Scope) -> Result<Prop, ParseError> {
    let mut lhs = prop_and(lx, scope)?;
    while lx.eat(&Tok::OrOr)? {
        lhs = Prop::or(lhs, prop_and(lx, scope)?);
    }
    Ok(lhs)
}

fn prop_and(lx: &mut Lexer, scope: &Scope) -> Result<Prop, ParseError> {
    let mut lhs = prop_unary(lx, scope)?;
    while lx.eat(&Tok::AndAnd)? {
        lhs = Prop::and(lhs, prop_unary(lx, scope)?);
    }
    Ok(lhs)
}

pub(crate) fn prop_unary(lx: &mut Lexer, scope: &Scope) -> Result<Prop, ParseError> {
    let t = lx.next()?;
    match t.tok {
        Tok::Bang => Ok(Prop::not(prop_unary(lx, scope)?)),
        Tok::LParen => {
            let p = prop(lx, scope)?;
            lx.expect(Tok::RParen)?;
            Ok(p)
        }
        Tok::Ident(name) => match name.as_str() {
            "true" => Ok(Prop::True),
            "false" => Ok(Prop::False),
            _ if scope.knows(&name) => Ok(Prop::Var(name)),
            _ => Err(ParseError::UndeclaredVariable { name, line: t.pos.line, col: t.pos.col }),
        },
        other => Err(ParseError::Syntax {
            line: t.pos.line,
            col: t.pos.col,
            msg: format!("expected a proposition, found {other}"),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conjunction_with_negation() {
        let p = parse_prop("p && !q", &["p", "q"]).unwrap();
        assert_eq!(p, Prop::and(Prop::var("p"), Prop::not(Prop::var("q"))));
    }

    #[test]
    fn implication_between_sensors() {
        let p = parse_prop("DH2O => HH2O", &["DH2O", "HH2O"]).unwrap();
        assert_eq!(p, Prop::implies(Prop::var("DH2O"), Prop::var("HH2O")));
        // sensor reliability: dangerous water implies high water
        assert!(!p.eval(&|v| v == "DH2O"));
        assert!(p.eval(&|v| v == "HH2O"));
    }

    #[test]
    fn undeclared_variable() {
        match parse_prop("p && r", &["p"]) {
            Err(ParseError::UndeclaredVariable { name, line: 1, col: 6 }) => assert_eq!(name, "r"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn precedence_and_printing() {
        let p = parse_prop("a || b && c => d <=> e", &["a", "b", "c", "d", "e"]).unwrap();
        assert_eq!(p.to_string(), "a || b && c => d <=> e");
        let q = parse_prop("(a || b) && !(c => d)", &["a", "b", "c", "d"]).unwrap();
        assert_eq!(q.to_string(), "(a || b) && !(c => d)");
        assert_eq!(parse_prop(&q.to_string(), &["a", "b", "c", "d"]).unwrap(), q);
    }

    #[test]
    fn empty_and_garbage() {
        assert!(parse_prop("", &["p"]).is_err());
        assert!(parse_prop("p &&", &["p"]).is_err());
        assert!(parse_prop("p q", &["p", "q"]).is_err());
    }

    #[test]
    fn truth_table_bit_order() {
        let vars = vec!["p".to_string(), "q".to_string()];
        let t = parse_prop("p && !q", &vars).unwrap().truth_table(&vars).unwrap();
        assert_eq!(t, vec![false, true, false, false]);
    }
}
