//! From SeCeNL to QDDC: first occurrence, singleton-relativized
//! quantifiers, and the ℵ translation of every liveness operator.

use std::collections::BTreeSet;

use crate::syntax::{Cmp, Formula, Liveness, Nominated, Prop, SeceNl};

/// `D && !(D^ext)`: `D` holds and no proper prefix satisfies it.
pub fn focc(d: &Formula) -> Formula {
    Formula::and(d.clone(), Formula::not(Formula::chop(d.clone(), Formula::ext())))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relativized {
    Exists1,
    Forall1,
}

fn singletons<'a>(theta: impl IntoIterator<Item = &'a String>) -> Vec<Formula> {
    theta.into_iter().map(|u| Formula::Scount(Prop::var(u.clone()), Cmp::Eq, 1)).collect()
}

/// `∃¹Θ: D` is `∃u1...∃un ((scount u1=1 && ...) && D)`; `∀¹Θ: D` is
/// `∀u1...∀un ((scount u1=1 && ...) => D)`.
pub fn relativize(kind: Relativized, theta: &BTreeSet<String>, body: Formula) -> Formula {
    if theta.is_empty() {
        return body;
    }
    let guard = Formula::and_all(singletons(theta));
    let inner = match kind {
        Relativized::Exists1 => Formula::and(guard, body),
        Relativized::Forall1 => Formula::implies(guard, body),
    };
    theta.iter().rev().fold(inner, |acc, u| match kind {
        Relativized::Exists1 => Formula::exists(u.clone(), acc),
        Relativized::Forall1 => Formula::forall(u.clone(), acc),
    })
}

fn exists_all(theta: &BTreeSet<String>, body: Formula) -> Formula {
    theta.iter().rev().fold(body, |acc, u| Formula::exists(u.clone(), acc))
}

/// `pref(X) = !((!X)^true)`, relative to the current interval.
fn pref(x: Formula) -> Formula {
    Formula::not(Formula::chop(Formula::not(x), Formula::tt()))
}

fn anti(x: Formula) -> Formula {
    Formula::not(Formula::diamond(x))
}

fn head(x: Formula) -> Formula {
    Formula::chop(x, Formula::tt())
}

/// Operand conjoined with singleton constraints for its own nominals, on
/// its own interval.
fn pin(d: &Nominated) -> Formula {
    let mut parts = vec![d.formula.clone()];
    parts.extend(singletons(&d.nominals));
    Formula::and_all(parts)
}

fn minus(a: &BTreeSet<String>, b: &BTreeSet<String>) -> BTreeSet<String> {
    a.difference(b).cloned().collect()
}

fn union(a: &BTreeSet<String>, b: &BTreeSet<String>) -> BTreeSet<String> {
    a.union(b).cloned().collect()
}

/// Atoms without nominals.
fn aleph_plain(l: &Liveness) -> Formula {
    match l {
        Liveness::Pref(d) => pref(d.formula.clone()),
        Liveness::Init { first, horizon } => {
            pref(Formula::implies(focc(&horizon.formula), head(first.formula.clone())))
        }
        Liveness::Anti(d) => anti(d.formula.clone()),
        Liveness::Implies { ante, cons } => Formula::boxed(Formula::implies(ante.formula.clone(), cons.formula.clone())),
        Liveness::Follows { ante, resp, window } => Formula::boxed(Formula::not(Formula::chop(
            ante.formula.clone(),
            Formula::and(focc(&window.formula), Formula::not(head(resp.formula.clone()))),
        ))),
        Liveness::Triggers { ante, resp, window } => {
            let body = Formula::implies(focc(&window.formula), head(resp.formula.clone()));
            Formula::and(
                Formula::boxed(Formula::implies(head(ante.formula.clone()), body.clone())),
                Formula::boxed(Formula::implies(ante.formula.clone(), pref(body))),
            )
        }
    }
}

/// Atoms with nominals: each operand is pinned to its own interval and
/// nominals shared across a chop are pinned once over the whole witness.
fn aleph_nominal(l: &Liveness) -> Formula {
    use Relativized::*;
    match l {
        Liveness::Pref(d) => pref(exists_all(&d.nominals, pin(d))),
        Liveness::Anti(d) => anti(exists_all(&d.nominals, pin(d))),
        Liveness::Init { first, horizon } => pref(relativize(
            Forall1,
            &horizon.nominals,
            Formula::implies(horizon.formula.clone(), exists_all(&minus(&first.nominals, &horizon.nominals), head(pin(first)))),
        )),
        Liveness::Implies { ante, cons } => Formula::boxed(relativize(
            Forall1,
            &ante.nominals,
            Formula::implies(
                ante.formula.clone(),
                relativize(Exists1, &minus(&cons.nominals, &ante.nominals), cons.formula.clone()),
            ),
        )),
        Liveness::Follows { ante, resp, window } | Liveness::Triggers { ante, resp, window } => {
            let outer = union(&ante.nominals, &window.nominals);
            let inner = minus(&resp.nominals, &outer);
            let window_part = Formula::and_all([
                pin(window),
                Formula::not(Formula::chop(window.formula.clone(), Formula::ext())),
                Formula::not(exists_all(&inner, head(pin(resp)))),
            ]);
            let shape = match l {
                Liveness::Follows { .. } => Formula::chop(pin(ante), window_part),
                _ => Formula::and(head(pin(ante)), head(window_part)),
            };
            let mut parts = singletons(&outer);
            parts.push(shape);
            anti(exists_all(&outer, Formula::and_all(parts)))
        }
    }
}

pub fn aleph_atom(l: &Liveness) -> Formula {
    if l.uses_nominals() {
        aleph_nominal(l)
    } else {
        aleph_plain(l)
    }
}

/// QDDC formula with the same word models as `z`.
pub fn aleph(z: &SeceNl) -> Formula {
    match z {
        SeceNl::Atom(l) => aleph_atom(l),
        SeceNl::Not(a) => Formula::not(aleph(a)),
        SeceNl::And(a, b) => Formula::and(aleph(a), aleph(b)),
        SeceNl::Or(a, b) => Formula::or(aleph(a), aleph(b)),
    }
}

/// The nominal translation exactly as tabulated, kept for comparison; it
/// disagrees with the semantics whenever a nominal can escape the
/// sub-interval of the operand that mentions it.
pub fn aleph_tabulated(l: &Liveness) -> Formula {
    use Relativized::*;
    let e1 = |t: &BTreeSet<String>, d: Formula| relativize(Exists1, t, d);
    let a1 = |t: &BTreeSet<String>, d: Formula| relativize(Forall1, t, d);
    match l {
        Liveness::Pref(d) => Formula::not(e1(&d.nominals, head(Formula::not(d.formula.clone())))),
        Liveness::Init { first, horizon } => pref(a1(
            &horizon.nominals,
            Formula::implies(horizon.formula.clone(), e1(&minus(&first.nominals, &horizon.nominals), head(first.formula.clone()))),
        )),
        Liveness::Anti(d) => Formula::not(e1(&d.nominals, Formula::diamond(d.formula.clone()))),
        Liveness::Implies { .. } => aleph_nominal(l),
        Liveness::Follows { ante, resp, window } => {
            let t2 = minus(&resp.nominals, &union(&ante.nominals, &window.nominals));
            Formula::boxed(a1(
                &ante.nominals,
                a1(
                    &minus(&window.nominals, &ante.nominals),
                    e1(
                        &t2,
                        Formula::not(Formula::chop(
                            ante.formula.clone(),
                            Formula::and(focc(&window.formula), Formula::not(head(resp.formula.clone()))),
                        )),
                    ),
                ),
            ))
        }
        Liveness::Triggers { ante, resp, window } => {
            let t3 = minus(&window.nominals, &ante.nominals);
            let t2 = minus(&resp.nominals, &union(&ante.nominals, &window.nominals));
            let body = a1(&t3, Formula::implies(focc(&window.formula), e1(&t2, head(resp.formula.clone()))));
            Formula::and(
                Formula::boxed(a1(&ante.nominals, Formula::implies(head(ante.formula.clone()), body.clone()))),
                Formula::boxed(a1(&ante.nominals, Formula::implies(ante.formula.clone(), pref(body)))),
            )
        }
    }
}
