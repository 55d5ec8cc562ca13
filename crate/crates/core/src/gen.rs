//! Seeded random formulas, requirements and diagrams for cross-checking
//! the translations against the reference interpreters.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::semantics::Word;
use crate::syntax::{Cmp, Formula, Liveness, Nominated, Prop, SeceNl};
use crate::timing_diagram::{Cell, Constraint, Level, TimingDiagram, Wave, Waveform};

const CMPS: [Cmp; 5] = [Cmp::Lt, Cmp::Le, Cmp::Eq, Cmp::Ge, Cmp::Gt];

pub struct Gen {
    rng: ChaCha8Rng,
    fresh: usize,
}

impl Gen {
    pub fn new(seed: u64) -> Gen {
        Gen { rng: ChaCha8Rng::seed_from_u64(seed), fresh: 0 }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    /// A uniformly random word of length `len`.
    pub fn word(&mut self, vars: &[String], len: usize) -> Word {
        let mask = (1u64 << vars.len()) - 1;
        Word::new(vars, (0..len).map(|_| self.rng.gen::<u64>() & mask).collect())
    }

    fn var(&mut self, vars: &[String]) -> Prop {
        Prop::var(vars.choose(&mut self.rng).expect("non-empty alphabet").clone())
    }

    pub fn prop(&mut self, vars: &[String], depth: u32) -> Prop {
        if depth == 0 || self.rng.gen_bool(0.4) {
            return match self.rng.gen_range(0..10) {
                0 => Prop::True,
                1 => Prop::False,
                _ => self.var(vars),
            };
        }
        match self.rng.gen_range(0..4) {
            0 => Prop::not(self.prop(vars, depth - 1)),
            1 => Prop::and(self.prop(vars, depth - 1), self.prop(vars, depth - 1)),
            2 => Prop::or(self.prop(vars, depth - 1), self.prop(vars, depth - 1)),
            _ => Prop::implies(self.prop(vars, depth - 1), self.prop(vars, depth - 1)),
        }
    }

    fn cmp(&mut self) -> Cmp {
        *CMPS.choose(&mut self.rng).unwrap()
    }

    fn atom(&mut self, vars: &[String], max_const: u64) -> Formula {
        let p = self.prop(vars, 1);
        let k = self.rng.gen_range(0..=max_const);
        match self.rng.gen_range(0..7) {
            0 => Formula::Begin(p),
            1 => Formula::AllButLast(p),
            2 => Formula::All(p),
            3 => Formula::Unit(p),
            4 => Formula::Slen(self.cmp(), k),
            5 => Formula::Scount(p, self.cmp(), k),
            _ => Formula::Sdur(p, self.cmp(), k),
        }
    }

    /// Full QDDC of nesting depth at most `depth`, quantifying fresh
    /// variables `z0, z1, ...`.
    pub fn formula(&mut self, vars: &[String], depth: u32, max_const: u64) -> Formula {
        if depth == 0 || self.rng.gen_bool(0.25) {
            return self.atom(vars, max_const);
        }
        let d = depth - 1;
        match self.rng.gen_range(0..9) {
            0 | 1 => Formula::chop(self.formula(vars, d, max_const), self.formula(vars, d, max_const)),
            2 => Formula::not(self.formula(vars, d, max_const)),
            3 => Formula::and(self.formula(vars, d, max_const), self.formula(vars, d, max_const)),
            4 => Formula::or(self.formula(vars, d, max_const), self.formula(vars, d, max_const)),
            5 => Formula::star(self.formula(vars, d, max_const)),
            6 | 7 => {
                let z = format!("z{}", self.fresh);
                self.fresh += 1;
                let mut inner = vars.to_vec();
                inner.push(z.clone());
                let body = self.formula(&inner, d, max_const);
                if self.rng.gen_bool(0.5) {
                    Formula::exists(z, body)
                } else {
                    Formula::forall(z, body)
                }
            }
            _ => self.atom(vars, max_const),
        }
    }

    /// A SeCe formula: no negation and no quantifier.
    pub fn sece(&mut self, vars: &[String], depth: u32, max_const: u64) -> Formula {
        if depth == 0 || self.rng.gen_bool(0.3) {
            return self.atom(vars, max_const);
        }
        let d = depth - 1;
        match self.rng.gen_range(0..6) {
            0..=2 => Formula::chop(self.sece(vars, d, max_const), self.sece(vars, d, max_const)),
            3 => Formula::and(self.sece(vars, d, max_const), self.sece(vars, d, max_const)),
            4 => Formula::or(self.sece(vars, d, max_const), self.sece(vars, d, max_const)),
            _ => Formula::star(self.sece(vars, d, max_const)),
        }
    }

    /// A SeCe operand whose nominals are drawn from `theta` and, when present,
    /// each marked by a `<u>` point somewhere in the formula.
    fn operand(&mut self, sys: &[String], theta: &[String], depth: u32, max_const: u64) -> Nominated {
        let noms: Vec<String> = theta.iter().filter(|_| self.rng.gen_bool(0.5)).cloned().collect();
        let mut f = self.sece(sys, depth, max_const);
        for u in &noms {
            let mark = Formula::chop(Formula::chop(Formula::tt(), Formula::Begin(Prop::var(u.clone()))), Formula::tt());
            f = if self.rng.gen_bool(0.5) {
                Formula::and(f, mark)
            } else {
                let (a, b) = (self.sece(sys, depth / 2, max_const), self.sece(sys, depth / 2, max_const));
                Formula::or(f, Formula::chop(Formula::chop(a, Formula::Begin(Prop::var(u.clone()))), b))
            };
        }
        Nominated::new(f, noms)
    }

    /// Liveness operator number `kind` (0..6, in the order init, anti, pref,
    /// implies, follows, triggers).
    pub fn liveness(&mut self, kind: usize, sys: &[String], theta: &[String], depth: u32, max_const: u64) -> Liveness {
        let op = |g: &mut Gen| g.operand(sys, theta, depth, max_const);
        match kind {
            0 => Liveness::Init { first: op(self), horizon: op(self) },
            1 => Liveness::Anti(op(self)),
            2 => Liveness::Pref(op(self)),
            3 => Liveness::Implies { ante: op(self), cons: op(self) },
            4 => Liveness::Follows { ante: op(self), resp: op(self), window: op(self) },
            _ => Liveness::Triggers { ante: op(self), resp: op(self), window: op(self) },
        }
    }

    /// A boolean combination of up to `atoms` liveness atoms.
    pub fn secenl(&mut self, sys: &[String], theta: &[String], atoms: usize, depth: u32, max_const: u64) -> SeceNl {
        let kind = self.rng.gen_range(0..6);
        let mut z = SeceNl::Atom(self.liveness(kind, sys, theta, depth, max_const));
        for _ in 1..self.rng.gen_range(1..=atoms.max(1)) {
            let kind = self.rng.gen_range(0..6);
            let b = SeceNl::Atom(self.liveness(kind, sys, theta, depth, max_const));
            z = match self.rng.gen_range(0..3) {
                0 => SeceNl::and(z, b),
                1 => SeceNl::or(z, b),
                _ => SeceNl::and(z, SeceNl::not(b)),
            };
        }
        if self.rng.gen_bool(0.2) {
            z = SeceNl::not(z);
        }
        z
    }

    fn level(&mut self) -> Level {
        *[Level::Low, Level::High, Level::DontCare, Level::Unknown].choose(&mut self.rng).unwrap()
    }

    /// A diagram over `signals` with up to `max_waves` waveforms of at most
    /// `max_cells` cells, nominals from `markers` (each at most once per
    /// waveform) and up to `max_constraints` constraints.
    pub fn timing_diagram(
        &mut self,
        signals: &[String],
        markers: &[String],
        max_waves: usize,
        max_cells: usize,
        max_constraints: usize,
        max_const: u64,
    ) -> TimingDiagram {
        let mut waves = vec![];
        for _ in 0..self.rng.gen_range(1..=max_waves) {
            let signal = match self.rng.gen_range(0..6) {
                0 => Prop::True,
                1 => self.prop(signals, 1),
                _ => self.var(signals),
            };
            let n = self.rng.gen_range(1..=max_cells);
            let mut free: Vec<String> = markers.to_vec();
            let cells = (0..n)
                .map(|_| {
                    let marker = if !free.is_empty() && self.rng.gen_bool(0.3) {
                        Some(free.remove(self.rng.gen_range(0..free.len())))
                    } else {
                        None
                    };
                    Cell { marker, level: self.level(), stutter: self.rng.gen_bool(0.5) }
                })
                .collect();
            waves.push(Wave { signal, wave: Waveform { cells } });
        }
        let mut t = TimingDiagram { waves, constraints: vec![] };
        let noms: Vec<String> = t.nominals().into_iter().collect();
        if !noms.is_empty() {
            for _ in 0..self.rng.gen_range(0..=max_constraints) {
                let from = noms.choose(&mut self.rng).unwrap().clone();
                let to = noms.choose(&mut self.rng).unwrap().clone();
                let lo = self.rng.gen_range(0..=max_const);
                let hi = self.rng.gen_range(lo..=max_const);
                let lo = self.rng.gen_bool(0.8).then(|| (lo, self.rng.gen_bool(0.7)));
                let hi = self.rng.gen_bool(0.7).then(|| (hi, self.rng.gen_bool(0.7)));
                t.constraints.push(Constraint { from, to, lo, hi });
            }
        }
        t
    }
}

/// A chain of `n` waveform cells split over two signals, with a constraint
/// between every pair of consecutive markers.
pub fn diagram_family(n: usize) -> TimingDiagram {
    let levels = [Level::Low, Level::High, Level::DontCare, Level::Unknown];
    let mut waves = vec![];
    let mut constraints = vec![];
    let mut prev: Option<String> = None;
    for (w, sig) in ["p", "q"].iter().enumerate() {
        let cells = (0..n / 2)
            .map(|i| {
                let marker = (i % 3 == 0).then(|| format!("m{w}_{i}"));
                if let Some(m) = &marker {
                    if let Some(p) = prev.replace(m.clone()) {
                        constraints.push(Constraint::closed(&p, m, 0, (i % 4) as u64 + 1));
                    }
                }
                Cell { marker, level: levels[(i + w) % 4], stutter: i % 2 == 1 }
            })
            .collect();
        waves.push(Wave { signal: Prop::var(*sig), wave: Waveform { cells } });
    }
    TimingDiagram { waves, constraints }
}

/// A conjunction cycling through all six operators whose operands grow with
/// `n`, with a shared nominal in every third atom.
pub fn secenl_family(n: usize) -> SeceNl {
    let sys = ["p".to_string(), "q".to_string()];
    let theta = ["u".to_string()];
    let mut g = Gen::new(n as u64);
    let mut out: Option<SeceNl> = None;
    let mut k = 0;
    while out.as_ref().map_or(0, SeceNl::size) < n {
        let th: &[String] = if k % 3 == 2 { &theta } else { &[] };
        let atom = SeceNl::Atom(g.liveness(k % 6, &sys, th, 3, 3));
        out = Some(match out {
            None => atom,
            Some(z) => SeceNl::and(z, atom),
        });
        k += 1;
    }
    out.expect("at least one atom")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::classify_fragment;
    use crate::syntax::Fragment;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn seeded_and_bounded() {
        let s = names(&["p", "q"]);
        let a: Vec<Formula> = (0..20).map(|_| Gen::new(3).formula(&s, 4, 3)).collect();
        assert!(a.windows(2).all(|w| w[0] == w[1]));
        let mut g = Gen::new(5);
        for _ in 0..200 {
            let f = g.sece(&s, 4, 3);
            assert!(classify_fragment(&f).fragment <= Fragment::SeCe, "{f}");
        }
    }

    #[test]
    fn diagrams_validate() {
        let mut g = Gen::new(9);
        let s = names(&["p", "q"]);
        let m = names(&["a", "b"]);
        for _ in 0..200 {
            let t = g.timing_diagram(&s, &m, 2, 6, 2, 3);
            t.validate().unwrap();
            assert!(t.waves.iter().all(|w| w.wave.cells.len() <= 6));
        }
    }

    #[test]
    fn families_reach_their_size() {
        for n in [10, 100, 1000] {
            assert!(diagram_family(n).size() >= n - 2);
            assert!(secenl_family(n).size() >= n);
        }
    }
}
