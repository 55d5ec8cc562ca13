//! Reference interpreter for timing diagrams under a nominal valuation.

use std::collections::BTreeMap;

use crate::timing_diagram::{Cell, Level, TimingDiagram, Waveform};

use super::qddc::column;
use super::word::Word;

/// Where consecutive waveform pieces may meet inside `[b,e]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Split {
    /// `b <= i <= e`, the chop point.
    #[default]
    Fusion,
    /// `b <= i < e` for every split, reading concatenation right-nested.
    Strict,
}

pub type Valuation = BTreeMap<String, usize>;

fn cell_ends(c: &Cell, col: u64, from: usize, e: usize) -> u64 {
    let bit = |i: usize| col >> i & 1 == 1;
    if !c.stutter {
        let ok = match c.level {
            Level::Low => !bit(from),
            Level::High => bit(from),
            Level::DontCare | Level::Unknown => true,
        };
        return if ok && from < e { 1 << (from + 1) } else { 0 };
    }
    let mut out = 1u64 << from;
    let mut all_hi = true;
    let mut all_lo = true;
    for to in from + 1..=e {
        all_hi &= bit(to - 1);
        all_lo &= !bit(to - 1);
        let ok = match c.level {
            Level::Low => all_lo,
            Level::High => all_hi,
            Level::DontCare => true,
            Level::Unknown => all_hi || all_lo,
        };
        if !ok {
            break;
        }
        out |= 1 << to;
    }
    out
}

/// Whether the signal column `col` satisfies `w` on `[b,e]` under `nu`.
pub fn sat_waveform(col: u64, b: usize, e: usize, nu: &Valuation, w: &Waveform, split: Split) -> bool {
    // Reachable start points of the next cell.
    let mut at = 1u64 << b;
    for (k, c) in w.cells.iter().enumerate() {
        if let Some(u) = &c.marker {
            let p = *nu.get(u).unwrap_or_else(|| panic!("valuation misses nominal `{u}`"));
            at &= 1 << p;
        }
        if split == Split::Strict && k > 0 {
            at &= !(1u64 << e);
        }
        let mut next = 0;
        let mut m = at;
        while m != 0 {
            let i = m.trailing_zeros() as usize;
            next |= cell_ends(c, col, i, e);
            m &= m - 1;
        }
        at = next;
        if at == 0 {
            return false;
        }
    }
    at >> e & 1 == 1
}

pub fn sat_timing_diagram_with(
    w: &Word,
    b: usize,
    e: usize,
    nu: &Valuation,
    t: &TimingDiagram,
    split: Split,
) -> bool {
    assert!(b <= e && e < w.len());
    let waves_ok = t.waves.iter().all(|wave| sat_waveform(column(w, &wave.signal), b, e, nu, &wave.wave, split));
    waves_ok
        && t.constraints.iter().all(|c| {
            let (a, z) = (nu[&c.from], nu[&c.to]);
            z >= a && c.admits((z - a) as u64)
        })
}

pub fn sat_timing_diagram(w: &Word, b: usize, e: usize, nu: &Valuation, t: &TimingDiagram) -> bool {
    sat_timing_diagram_with(w, b, e, nu, t, Split::Fusion)
}

/// All valuations of `t`'s nominals over `[b,e]`.
pub fn valuations(t: &TimingDiagram, b: usize, e: usize) -> Vec<Valuation> {
    let mut out = vec![Valuation::new()];
    for u in t.nominals() {
        out = out
            .into_iter()
            .flat_map(|v| {
                let u = u.clone();
                (b..=e).map(move |p| {
                    let mut v = v.clone();
                    v.insert(u.clone(), p);
                    v
                })
            })
            .collect();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semantics::qddc::sat_interval;
    use crate::timing_diagram::{parse_timing_diagram, xi, xi_literal};

    fn td(s: &str) -> TimingDiagram {
        parse_timing_diagram(s, &["p", "q"]).unwrap()
    }

    fn with_nominals(w: &Word, nu: &Valuation) -> Word {
        nu.iter().fold(w.clone(), |acc, (u, &p)| acc.with_column(u, 1 << p))
    }

    #[test]
    fn unit_symbols() {
        let w = Word::from_sets(&["p", "q"], &[&[], &["p"], &[]]);
        assert!(sat_timing_diagram(&w, 0, 2, &Valuation::new(), &td("p: 01;")));
        assert!(!sat_timing_diagram(&w, 0, 2, &Valuation::new(), &td("p: 10;")));
    }

    #[test]
    fn stutter_ignores_last_point() {
        let w = Word::from_sets(&["p", "q"], &[&["p"], &["p"], &[]]);
        assert!(sat_timing_diagram(&w, 0, 2, &Valuation::new(), &td("p: 1|;")));
    }

    #[test]
    fn constraint_distance() {
        let t = td("p: 2a:2|b:2|;\n@sync:(a, b, [10,10]);");
        let w = Word::new(&["p", "q"], vec![0; 12]);
        let nu = |a, b| Valuation::from([("a".to_string(), a), ("b".to_string(), b)]);
        assert!(!sat_timing_diagram(&w, 0, 11, &nu(1, 10), &t));
        assert!(sat_timing_diagram(&w, 0, 11, &nu(1, 11), &t));
    }

    #[test]
    fn strict_split_disagrees_with_chop() {
        let w = Word::from_sets(&["p", "q"], &[&[], &["p"]]);
        let t = td("p: 01|;");
        let nu = Valuation::new();
        assert!(sat_timing_diagram(&w, 0, 1, &nu, &t));
        assert!(!sat_timing_diagram_with(&w, 0, 1, &nu, &t, Split::Strict));
        assert!(sat_interval(&w, 0, 1, &xi(&t).formula));
        let pt = td("p: 1|1|;");
        assert!(!sat_timing_diagram_with(&w, 1, 1, &nu, &pt, Split::Strict));
        assert!(sat_interval(&w, 1, 1, &xi(&pt).formula));
    }

    #[test]
    fn begin_marker_lets_cells_slip() {
        // p low at 0, high at 4; u at 1.
        let w = Word::from_sets(&["p", "q"], &[&[], &[], &[], &[], &["p"], &[]]);
        let t = td("p: 0u:1;");
        let nu = Valuation::from([("u".to_string(), 1)]);
        let wn = with_nominals(&w, &nu);
        assert!(!sat_timing_diagram(&w, 0, 5, &nu, &t));
        assert!(!sat_interval(&wn, 0, 5, &xi(&t).formula));
        assert!(sat_interval(&wn, 0, 5, &xi_literal(&t).formula));
    }

    #[test]
    fn xi_matches_on_small_words() {
        for text in ["p: 0a:1|b:x;\nq: 2|a:0|;\n@sync:(a, b, [1,2]);", "p: x|u:2|;\n@sync:(u, u, [0,0]);"] {
            let t = td(text);
            let f = xi(&t).formula;
            for n in 1..=4 {
                for w in Word::all_of_len(&["p", "q"], n) {
                    for b in 0..n {
                        for e in b..n {
                            for nu in valuations(&t, b, e) {
                                let wn = with_nominals(&w, &nu);
                                assert_eq!(
                                    sat_timing_diagram(&w, b, e, &nu, &t),
                                    sat_interval(&wn, b, e, &f),
                                    "{text} on {w} [{b},{e}] {nu:?}"
                                );
                            }
                        }
                    }
                }
            }
        }
    }
}
