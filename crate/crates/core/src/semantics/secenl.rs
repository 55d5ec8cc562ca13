//! Reference interpreter for SeCeNL requirements.
//!
//! Each liveness atom is prefix-closed and every violation is witnessed by
//! intervals inside some prefix, so an atom is summarized by the end of its
//! earliest violation witness. A prefix `w[0..=m]` satisfies the atom iff
//! `m` is smaller than that endpoint.

use std::collections::BTreeSet;

use crate::syntax::{Liveness, Nominated, SeceNl};

use super::qddc::table;
use super::table::Table;
use super::word::Word;

const UNSET: usize = usize::MAX;

/// Tables of one operand under every placement of its nominals.
struct Operand {
    /// Indices into the atom-wide nominal list.
    noms: Vec<usize>,
    n: usize,
    tables: Vec<Table>,
}

type Pred<'a> = dyn FnMut(&mut Vec<usize>, &Table) -> bool + 'a;

impl Operand {
    fn new(w: &Word, d: &Nominated, all: &[String]) -> Operand {
        let names: Vec<&String> = d.nominals.iter().collect();
        let noms = names.iter().map(|u| all.iter().position(|a| a == *u).expect("nominal listed")).collect();
        let n = w.len();
        let count = n.pow(names.len() as u32);
        let tables = (0..count)
            .map(|mut code| {
                let mut wv = w.clone();
                for u in &names {
                    wv = wv.with_column(u, 1 << (code % n));
                    code /= n;
                }
                table(&wv, &d.formula)
            })
            .collect();
        Operand { noms, n, tables }
    }

    fn table_for(&self, val: &[usize]) -> &Table {
        let code = self.noms.iter().rev().fold(0, |acc, &g| acc * self.n + val[g]);
        &self.tables[code]
    }

    /// Whether some placement of this operand's nominals inside `[b,e]`,
    /// consistent with the already-fixed entries of `val`, satisfies `pred`.
    /// Entries fixed here are restored before returning.
    fn any(&self, b: usize, e: usize, val: &mut Vec<usize>, pred: &mut Pred) -> bool {
        self.any_from(0, b, e, val, pred)
    }

    fn any_from(&self, j: usize, b: usize, e: usize, val: &mut Vec<usize>, pred: &mut Pred) -> bool {
        if j == self.noms.len() {
            let t = self.table_for(val);
            return pred(val, t);
        }
        let g = self.noms[j];
        if val[g] != UNSET {
            return (b..=e).contains(&val[g]) && self.any_from(j + 1, b, e, val, pred);
        }
        for pos in b..=e {
            val[g] = pos;
            if self.any_from(j + 1, b, e, val, pred) {
                val[g] = UNSET;
                return true;
            }
        }
        val[g] = UNSET;
        false
    }

    /// Satisfied on `[b,e]` under some consistent placement.
    fn sat_some(&self, b: usize, e: usize, val: &mut Vec<usize>) -> bool {
        self.any(b, e, val, &mut |_, t| t.get(b, e))
    }
}

/// End point of the earliest violation witness, if any.
fn first_violation(w: &Word, l: &Liveness) -> Option<usize> {
    let all: Vec<String> =
        l.operands().iter().flat_map(|d| d.nominals.iter().cloned()).collect::<BTreeSet<_>>().into_iter().collect();
    let ops: Vec<Operand> = l.operands().iter().map(|d| Operand::new(w, d, &all)).collect();
    let mut val = vec![UNSET; all.len()];
    let n = w.len();
    (0..n).find(|&m| violated_at(l, &ops, m, &mut val))
}

/// Whether a violation witness with end point exactly `m` exists.
fn violated_at(l: &Liveness, ops: &[Operand], m: usize, val: &mut Vec<usize>) -> bool {
    match l {
        Liveness::Pref(_) => !ops[0].sat_some(0, m, val),
        Liveness::Anti(_) => (0..=m).any(|i| ops[0].sat_some(i, m, val)),
        Liveness::Init { .. } => {
            let (first, horizon) = (&ops[0], &ops[1]);
            horizon.any(0, m, val, &mut |val, t| t.get(0, m) && !(0..=m).any(|k| first.sat_some(0, k, val)))
        }
        Liveness::Implies { .. } => {
            let (ante, cons) = (&ops[0], &ops[1]);
            (0..=m).any(|i| ante.any(i, m, val, &mut |val, t| t.get(i, m) && !cons.sat_some(i, m, val)))
        }
        Liveness::Follows { .. } => {
            let (ante, resp, window) = (&ops[0], &ops[1], &ops[2]);
            let k = m;
            (0..=k).any(|j| {
                (0..=j).any(|i| {
                    ante.any(i, j, val, &mut |val, t1| {
                        t1.get(i, j)
                            && window.any(j, k, val, &mut |val, t3| {
                                first_occurrence(t3, j, k) && !(j..=k).any(|l| resp.sat_some(j, l, val))
                            })
                    })
                })
            })
        }
        Liveness::Triggers { .. } => {
            let (ante, resp, window) = (&ops[0], &ops[1], &ops[2]);
            // Witness (i, j, k) ends at max(j, k) = m.
            (0..=m).any(|i| {
                (i..=m).any(|j| {
                    ante.any(i, j, val, &mut |val, t1| {
                        t1.get(i, j)
                            && (i..=m).filter(|&k| j == m || k == m).any(|k| {
                                window.any(i, k, val, &mut |val, t3| {
                                    first_occurrence(t3, i, k) && !(i..=k).any(|l| resp.sat_some(i, l, val))
                                })
                            })
                    })
                })
            })
        }
    }
}

fn first_occurrence(t: &Table, b: usize, e: usize) -> bool {
    t.get(b, e) && (b..e).all(|e1| !t.get(b, e1))
}

fn combine(z: &SeceNl, ends: &mut dyn Iterator<Item = Option<usize>>, m: usize) -> bool {
    match z {
        SeceNl::Atom(_) => ends.next().expect("one end per atom").is_none_or(|v| m < v),
        SeceNl::Not(a) => !combine(a, ends, m),
        SeceNl::And(a, b) => {
            let x = combine(a, ends, m);
            combine(b, ends, m) && x
        }
        SeceNl::Or(a, b) => {
            let x = combine(a, ends, m);
            combine(b, ends, m) || x
        }
    }
}

/// Satisfaction of every non-empty prefix of `w`.
pub fn sat_secenl_prefixes(w: &Word, z: &SeceNl) -> Vec<bool> {
    let ends: Vec<Option<usize>> = z.atoms().iter().map(|l| first_violation(w, l)).collect();
    (0..w.len()).map(|m| combine(z, &mut ends.iter().copied(), m)).collect()
}

pub fn sat_secenl(w: &Word, z: &SeceNl) -> bool {
    *sat_secenl_prefixes(w, z).last().expect("non-empty word")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_secenl;

    fn z(text: &str, sigma: &[&str], theta: &[&str]) -> SeceNl {
        parse_secenl(text, sigma, theta).unwrap()
    }

    #[test]
    fn identity_implication_always_holds() {
        let s = ["p"];
        let f = z("implies(<p> ~> <p>)", &s, &[]);
        for len in 1..=4 {
            assert!(Word::all_of_len(&s, len).all(|w| sat_secenl(&w, &f)));
        }
    }

    #[test]
    fn anti_point() {
        let s = ["p"];
        let f = z("anti(<p>)", &s, &[]);
        assert!(sat_secenl(&Word::from_sets(&s, &[&[], &[], &[]]), &f));
        assert!(!sat_secenl(&Word::from_sets(&s, &[&[], &["p"], &[]]), &f));
        assert_eq!(sat_secenl_prefixes(&Word::from_sets(&s, &[&[], &["p"], &[]]), &f), [true, false, false]);
    }

    #[test]
    fn lags_counterexample() {
        // P holds from 0 through 3; v marks position 0 + n + 1 = 3 for n = 2.
        let s = ["P", "Q"];
        let f = z(
            "implies((<u>^[[P]] && (slen=2)^<v>^true):{u,v} ~> (true^<v>^[[Q]]):{v})",
            &s,
            &["u", "v"],
        );
        let good = Word::from_sets(&s, &[&["P"], &["P"], &["P", "Q"], &["P", "Q"]]);
        assert!(sat_secenl(&good, &f));
        let bad = Word::from_sets(&s, &[&["P"], &["P"], &["P", "Q"], &["P"]]);
        assert!(!sat_secenl(&bad, &f));
    }

    #[test]
    fn pref_and_init() {
        let s = ["p"];
        let pref = z("pref([[p]])", &s, &[]);
        assert_eq!(sat_secenl_prefixes(&Word::from_sets(&s, &[&["p"], &["p"], &[]]), &pref), [true, true, false]);
        // p must occur no later than the first point where slen = 2 holds.
        let init = z("init(true^<p> / slen=2)", &s, &[]);
        assert!(sat_secenl(&Word::from_sets(&s, &[&[], &[], &["p"]]), &init));
        assert!(!sat_secenl(&Word::from_sets(&s, &[&[], &[], &[], &["p"]]), &init));
    }

    #[test]
    fn follows_and_triggers() {
        let s = ["p", "q"];
        // After a p point, q must appear within the next 2 cycles.
        let fol = z("follows(<p> ~> true^<q> / slen=2)", &s, &[]);
        assert!(sat_secenl(&Word::from_sets(&s, &[&["p"], &[], &["q"]]), &fol));
        assert!(!sat_secenl(&Word::from_sets(&s, &[&["p"], &[], &[]]), &fol));
        assert!(sat_secenl(&Word::from_sets(&s, &[&["p"], &[]]), &fol));
        let trg = z("triggers([[p]] && slen=1 ~> true^<q> / slen=2)", &s, &[]);
        assert!(!sat_secenl(&Word::from_sets(&s, &[&["p"], &["p"], &[]]), &trg));
        assert!(sat_secenl(&Word::from_sets(&s, &[&["p"], &["p", "q"], &[]]), &trg));
    }

    #[test]
    fn nominal_must_sit_inside_interval() {
        let s = ["p"];
        // [[!u]] can never hold with u placed in the interval.
        let f = z("anti([[p && !u]]:{u})", &s, &["u"]);
        assert!(sat_secenl(&Word::from_sets(&s, &[&["p"], &["p"]]), &f));
    }

    #[test]
    fn boolean_combination_per_prefix() {
        let s = ["p"];
        let f = z("!anti(<p>)", &s, &[]);
        assert_eq!(sat_secenl_prefixes(&Word::from_sets(&s, &[&[], &["p"]]), &f), [false, true]);
    }
}
