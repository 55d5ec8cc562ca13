//! Reference QDDC interpreter over a single word.

use crate::syntax::{Formula, Prop};

use super::table::Table;
use super::word::Word;

/// Bit `k` set iff `p` holds at position `k` of `w`.
pub fn column(w: &Word, p: &Prop) -> u64 {
    let ip = p
        .index(&|v| w.index_of(v))
        .unwrap_or_else(|v| panic!("variable `{v}` is not in the word's alphabet {:?}", w.vars));
    w.letters.iter().enumerate().fold(0, |m, (k, &l)| if ip.eval(l) { m | 1 << k } else { m })
}

/// Satisfaction table of `f` over every interval of `w`. Quantified
/// variables range over all variants of their column.
pub fn table(w: &Word, f: &Formula) -> Table {
    let n = w.len();
    let mut env = Env {
        mask: super::table::range(0, n - 1),
        names: w.vars.iter().map(String::as_str).collect(),
        cols: (0..w.vars.len()).map(|i| column(w, &Prop::Var(w.vars[i].clone()))).collect(),
        fixed: vec![],
    };
    eval(&mut env, n, f)
}

/// Columns of the word's variables, then of the enclosing bound variables.
struct Env<'a> {
    mask: u64,
    names: Vec<&'a str>,
    cols: Vec<u64>,
    /// Tables of subformulas that stay fixed while a bound variable varies.
    fixed: Vec<(*const Formula, Table)>,
}

impl Env<'_> {
    fn col(&self, p: &Prop) -> u64 {
        match p {
            Prop::False => 0,
            Prop::True => self.mask,
            Prop::Var(v) => match self.names.iter().rposition(|x| x == v) {
                Some(i) => self.cols[i],
                None => panic!("variable `{v}` is not in the word's alphabet {:?}", self.names),
            },
            Prop::Not(a) => !self.col(a) & self.mask,
            Prop::And(a, b) => self.col(a) & self.col(b),
            Prop::Or(a, b) => self.col(a) | self.col(b),
            Prop::Implies(a, b) => (!self.col(a) | self.col(b)) & self.mask,
            Prop::Iff(a, b) => !(self.col(a) ^ self.col(b)) & self.mask,
        }
    }
}

fn eval<'a>(env: &mut Env<'a>, n: usize, f: &'a Formula) -> Table {
    if let Some((_, t)) = env.fixed.iter().find(|(g, _)| std::ptr::eq(*g, f)) {
        return t.clone();
    }
    match f {
        Formula::Begin(p) => Table::begin(n, env.col(p)),
        Formula::AllButLast(p) => Table::all_but_last(n, env.col(p)),
        Formula::All(p) => Table::all(n, env.col(p)),
        Formula::Unit(p) => Table::unit(n, env.col(p)),
        Formula::Slen(c, k) => Table::slen(n, *c, *k),
        Formula::Scount(p, c, k) => Table::count(n, env.col(p), *c, *k, true),
        Formula::Sdur(p, c, k) => Table::count(n, env.col(p), *c, *k, false),
        Formula::Chop(a, b) => eval(env, n, a).chop(&eval(env, n, b)),
        Formula::Not(a) => eval(env, n, a).not(),
        Formula::And(a, b) => eval(env, n, a).and(&eval(env, n, b)),
        Formula::Or(a, b) => eval(env, n, a).or(&eval(env, n, b)),
        Formula::Star(a) => eval(env, n, a).star(),
        Formula::Exists(v, a) | Formula::Forall(v, a) if !mentions(a, v) => eval(env, n, a),
        Formula::Exists(v, a) => {
            let (mut acc, full) = (Table::empty(n), Table::full(n));
            bind(env, n, v, a, variants(n, singleton_guarded(v, a)), |env| {
                acc.or_assign(&eval(env, n, a));
                acc != full
            });
            acc
        }
        Formula::Forall(v, a) => {
            let (mut acc, empty) = (Table::full(n), Table::empty(n));
            bind(env, n, v, a, variants(n, vacuous_unless_singleton(v, a)), |env| {
                acc.and_assign(&eval(env, n, a));
                acc != empty
            });
            acc
        }
    }
}

fn bind<'a>(
    env: &mut Env<'a>,
    n: usize,
    v: &'a str,
    a: &'a Formula,
    columns: impl Iterator<Item = u64>,
    mut body: impl FnMut(&mut Env<'a>) -> bool,
) {
    let mut steady = vec![];
    invariant(a, &mut vec![v], &mut steady);
    let saved = env.fixed.len();
    for g in steady {
        let t = eval(env, n, g);
        env.fixed.push((g, t));
    }
    env.names.push(v);
    env.cols.push(0);
    for bits in columns {
        *env.cols.last_mut().unwrap() = bits;
        if !body(env) {
            break;
        }
    }
    env.names.pop();
    env.cols.pop();
    env.fixed.truncate(saved);
}

/// Maximal compound subformulas of `f` mentioning none of `varying`.
fn invariant<'a>(f: &'a Formula, varying: &mut Vec<&'a str>, out: &mut Vec<&'a Formula>) {
    let compound = matches!(
        f,
        Formula::Chop(..) | Formula::And(..) | Formula::Or(..) | Formula::Not(..) | Formula::Star(..) | Formula::Exists(..) | Formula::Forall(..)
    );
    if compound && varying.iter().all(|v| !mentions(f, v)) {
        out.push(f);
        return;
    }
    match f {
        Formula::Chop(a, b) | Formula::And(a, b) | Formula::Or(a, b) => {
            invariant(a, varying, out);
            invariant(b, varying, out);
        }
        Formula::Not(a) | Formula::Star(a) => invariant(a, varying, out),
        Formula::Exists(x, a) | Formula::Forall(x, a) => {
            varying.push(x);
            invariant(a, varying, out);
            varying.pop();
        }
        _ => {}
    }
}

/// Whether `v` occurs free in `f`.
fn mentions(f: &Formula, v: &str) -> bool {
    fn prop(p: &Prop, v: &str) -> bool {
        match p {
            Prop::False | Prop::True => false,
            Prop::Var(x) => x == v,
            Prop::Not(a) => prop(a, v),
            Prop::And(a, b) | Prop::Or(a, b) | Prop::Implies(a, b) | Prop::Iff(a, b) => prop(a, v) || prop(b, v),
        }
    }
    match f {
        Formula::Begin(p) | Formula::AllButLast(p) | Formula::All(p) | Formula::Unit(p) => prop(p, v),
        Formula::Scount(p, ..) | Formula::Sdur(p, ..) => prop(p, v),
        Formula::Slen(..) => false,
        Formula::Chop(a, b) | Formula::And(a, b) | Formula::Or(a, b) => mentions(a, v) || mentions(b, v),
        Formula::Not(a) | Formula::Star(a) => mentions(a, v),
        Formula::Exists(x, a) | Formula::Forall(x, a) => x != v && mentions(a, v),
    }
}

/// Columns to try for a bound variable. Satisfaction on `[b,e]` reads only
/// positions `b..=e`, so when the body is decided by `scount v = 1` the one-bit
/// columns already cover every restriction that matters.
fn variants(n: usize, singletons: bool) -> Box<dyn Iterator<Item = u64>> {
    if singletons {
        Box::new((0..n).map(|k| 1u64 << k))
    } else {
        Box::new(0..1u64 << n)
    }
}

fn is_single(v: &str, f: &Formula) -> bool {
    matches!(f, Formula::Scount(Prop::Var(x), crate::syntax::Cmp::Eq, 1) if x == v)
}

/// Every interval satisfying `f` has exactly one `v` point.
fn singleton_guarded(v: &str, f: &Formula) -> bool {
    match f {
        _ if is_single(v, f) => true,
        Formula::And(a, b) => singleton_guarded(v, a) || singleton_guarded(v, b),
        Formula::Exists(x, a) | Formula::Forall(x, a) if x != v => singleton_guarded(v, a),
        _ => false,
    }
}

/// Every interval without exactly one `v` point satisfies `f`.
fn vacuous_unless_singleton(v: &str, f: &Formula) -> bool {
    match f {
        Formula::Or(a, b) => {
            let neg = |g: &Formula| matches!(g, Formula::Not(g) if singleton_guarded(v, g));
            neg(a) || neg(b) || vacuous_unless_singleton(v, a) || vacuous_unless_singleton(v, b)
        }
        Formula::Forall(x, a) | Formula::Exists(x, a) if x != v => vacuous_unless_singleton(v, a),
        _ => false,
    }
}

pub fn sat_interval(w: &Word, b: usize, e: usize, f: &Formula) -> bool {
    assert!(b <= e && e < w.len(), "interval [{b},{e}] outside word of length {}", w.len());
    table(w, f).get(b, e)
}

pub fn sat_word(w: &Word, f: &Formula) -> bool {
    sat_interval(w, 0, w.len() - 1, f)
}

/// Satisfaction of every non-empty prefix: entry `m` is `w[0..=m] |= f`.
pub fn sat_prefixes(w: &Word, f: &Formula) -> Vec<bool> {
    let t = table(w, f);
    (0..w.len()).map(|e| t.get(0, e)).collect()
}
