//! Timing diagrams: per-signal waveforms with nominal markers and
//! distance constraints between markers, their translation into nominated
//! SeCe formulas, and WaveDrom export.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde_json::json;

use crate::syntax::lexer::{Lexer, Tok};
use crate::syntax::prop::prop;
use crate::syntax::qddc::constant;
use crate::syntax::{Cmp, Formula, Nominated, ParseError, Prop, Scope};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Level {
    Low,
    High,
    /// `2`
    DontCare,
    /// `x`
    Unknown,
}

impl Level {
    pub fn symbol(self) -> char {
        match self {
            Level::Low => '0',
            Level::High => '1',
            Level::DontCare => '2',
            Level::Unknown => 'x',
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Cell {
    pub marker: Option<String>,
    pub level: Level,
    pub stutter: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Waveform {
    pub cells: Vec<Cell>,
}

impl Waveform {
    pub fn markers(&self) -> impl Iterator<Item = &str> {
        self.cells.iter().filter_map(|c| c.marker.as_deref())
    }
}

impl fmt::Display for Waveform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.cells {
            if let Some(m) = &c.marker {
                write!(f, "<{m}>")?;
            }
            write!(f, "{}", c.level.symbol())?;
            if c.stutter {
                write!(f, "|")?;
            }
        }
        Ok(())
    }
}

pub fn parse_waveform(text: &str) -> Result<Waveform, ParseError> {
    let chars: Vec<char> = text.chars().filter(|c| !c.is_whitespace()).collect();
    let err = |msg: String| ParseError::Waveform(format!("{msg} in `{text}`"));
    let mut cells = vec![];
    let mut pending: Option<String> = None;
    let mut seen = BTreeSet::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let level = match c {
            '0' => Some(Level::Low),
            '1' => Some(Level::High),
            '2' => Some(Level::DontCare),
            'x' if chars.get(i + 1) != Some(&':') => Some(Level::Unknown),
            _ => None,
        };
        if let Some(level) = level {
            let stutter = chars.get(i + 1) == Some(&'|');
            cells.push(Cell { marker: pending.take(), level, stutter });
            i += 1 + stutter as usize;
            continue;
        }
        let name = if c == '<' {
            let end = chars[i..].iter().position(|&d| d == '>').ok_or_else(|| err("unclosed `<`".into()))?;
            let name: String = chars[i + 1..i + end].iter().collect();
            i += end + 1;
            name
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            if chars.get(i) != Some(&':') {
                return Err(err(format!("unknown symbol `{}`", chars[start..i].iter().collect::<String>())));
            }
            i += 1;
            chars[start..i - 1].iter().collect()
        } else {
            return Err(err(format!("unknown symbol `{c}`")));
        };
        if name.is_empty() || !name.chars().all(|d| d.is_ascii_alphanumeric() || d == '_') {
            return Err(err(format!("bad marker name `{name}`")));
        }
        if pending.is_some() {
            return Err(err(format!("two markers on one cell (`{name}`)")));
        }
        if !seen.insert(name.clone()) {
            return Err(err(format!("duplicate marker `{name}`")));
        }
        pending = Some(name);
    }
    if let Some(m) = pending {
        return Err(err(format!("marker `{m}` is not followed by a symbol")));
    }
    if cells.is_empty() {
        return Err(err("empty waveform".into()));
    }
    Ok(Waveform { cells })
}

/// One end of a constraint interval: `(value, closed)`.
pub type End = Option<(u64, bool)>;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Constraint {
    pub from: String,
    pub to: String,
    pub lo: End,
    pub hi: End,
}

impl Constraint {
    pub fn closed(from: &str, to: &str, lo: u64, hi: u64) -> Constraint {
        Constraint { from: from.into(), to: to.into(), lo: Some((lo, true)), hi: Some((hi, true)) }
    }

    pub fn admits(&self, d: u64) -> bool {
        let lo_ok = match self.lo {
            None => true,
            Some((l, true)) => d >= l,
            Some((l, false)) => d > l,
        };
        let hi_ok = match self.hi {
            None => true,
            Some((r, true)) => d <= r,
            Some((r, false)) => d < r,
        };
        lo_ok && hi_ok
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (lb, l) = match self.lo {
            Some((l, c)) => (if c { '[' } else { '(' }, l.to_string()),
            None => ('[', String::new()),
        };
        let (rb, r) = match self.hi {
            Some((r, c)) => (if c { ']' } else { ')' }, r.to_string()),
            None => (')', String::new()),
        };
        write!(f, "@sync:({}, {}, {lb}{l},{r}{rb});", self.from, self.to)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Wave {
    /// The signal drawn; `Prop::True` for a marker-only (`@null`) line.
    pub signal: Prop,
    pub wave: Waveform,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct TimingDiagram {
    pub waves: Vec<Wave>,
    pub constraints: Vec<Constraint>,
}

impl TimingDiagram {
    pub fn nominals(&self) -> BTreeSet<String> {
        self.waves.iter().flat_map(|w| w.wave.markers().map(String::from)).collect()
    }

    /// Total cells plus constraints.
    pub fn size(&self) -> usize {
        self.waves.iter().map(|w| w.wave.cells.len()).sum::<usize>() + self.constraints.len()
    }

    pub fn signals(&self) -> BTreeSet<String> {
        self.waves.iter().flat_map(|w| w.signal.vars()).collect()
    }

    pub fn validate(&self) -> Result<(), ParseError> {
        let noms = self.nominals();
        for c in &self.constraints {
            for u in [&c.from, &c.to] {
                if !noms.contains(u) {
                    return Err(ParseError::Unknown { kind: "nominal", name: u.clone() });
                }
            }
            if let (Some((l, true)), Some((r, true))) = (c.lo, c.hi) {
                if l > r {
                    return Err(ParseError::Invalid(format!("empty constraint interval in {c}")));
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for TimingDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for w in &self.waves {
            match w.signal {
                Prop::True => writeln!(f, "@null: {};", w.wave)?,
                _ => writeln!(f, "{}: {};", w.signal, w.wave)?,
            }
        }
        for c in &self.constraints {
            writeln!(f, "{c}")?;
        }
        Ok(())
    }
}

/// Parse a diagram body: `signal: waveform;` and `@sync:(a, b, bound);`
/// lines, over signals `sigma`.
pub fn parse_timing_diagram<S: AsRef<str>>(text: &str, sigma: &[S]) -> Result<TimingDiagram, ParseError> {
    let scope = Scope::new(sigma);
    let mut lx = Lexer::new(text);
    let td = td_body(&mut lx, &scope, &Tok::Eof)?;
    lx.expect_eof()?;
    Ok(td)
}

/// Diagram lines up to (not including) `end`.
pub(crate) fn td_body(lx: &mut Lexer, scope: &Scope, end: &Tok) -> Result<TimingDiagram, ParseError> {
    let mut td = TimingDiagram::default();
    while &lx.peek()?.tok != end {
        match lx.peek()?.tok.clone() {
            Tok::At(kw) if kw == "sync" => {
                lx.next()?;
                lx.eat(&Tok::Colon)?;
                td.constraints.push(sync(lx, scope)?);
                lx.expect(Tok::Semi)?;
            }
            Tok::At(kw) if kw == "null" => {
                lx.next()?;
                lx.expect(Tok::Colon)?;
                let (raw, _) = lx.raw_until(';')?;
                td.waves.push(Wave { signal: Prop::True, wave: parse_waveform(&raw)? });
            }
            Tok::At(kw) => return Err(lx.error(format!("unknown directive `@{kw}`"))),
            _ => {
                let signal = prop(lx, scope)?;
                lx.expect(Tok::Colon)?;
                let (raw, _) = lx.raw_until(';')?;
                td.waves.push(Wave { signal, wave: parse_waveform(&raw)? });
            }
        }
    }
    td.validate()?;
    Ok(td)
}

fn sync(lx: &mut Lexer, scope: &Scope) -> Result<Constraint, ParseError> {
    lx.expect(Tok::LParen)?;
    let (from, _) = lx.ident()?;
    lx.expect(Tok::Comma)?;
    let (to, _) = lx.ident()?;
    lx.expect(Tok::Comma)?;
    let (lo, hi) = match lx.peek()?.tok {
        Tok::LBrack | Tok::LParen => {
            let lc = lx.next()?.tok == Tok::LBrack;
            let lo = if lx.peek()?.tok == Tok::Comma { None } else { Some((constant(lx, scope)?, lc)) };
            lx.expect(Tok::Comma)?;
            let hi = if matches!(lx.peek()?.tok, Tok::RBrack | Tok::RParen) {
                None
            } else {
                Some(constant(lx, scope)?)
            };
            let rc = match lx.next()? {
                t if t.tok == Tok::RBrack => true,
                t if t.tok == Tok::RParen => false,
                t => {
                    return Err(ParseError::Syntax {
                        line: t.pos.line,
                        col: t.pos.col,
                        msg: format!("expected `]` or `)`, found {}", t.tok),
                    })
                }
            };
            (lo, hi.map(|r| (r, rc)))
        }
        _ => {
            let n = constant(lx, scope)?;
            (Some((n, true)), Some((n, true)))
        }
    };
    lx.expect(Tok::RParen)?;
    Ok(Constraint { from, to, lo, hi })
}

/// How a marker is rendered as a formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MarkerForm {
    /// `[[u]]`: holds exactly on the point carrying the nominal.
    Point,
    /// `<u>`, the literal table entry.
    Begin,
}

fn marker(u: &str, form: MarkerForm) -> Formula {
    match form {
        MarkerForm::Point => Formula::All(Prop::var(u)),
        MarkerForm::Begin => Formula::Begin(Prop::var(u)),
    }
}

fn cell_formula(c: &Cell, p: &Prop) -> Formula {
    let np = || Prop::not(p.clone());
    match (c.level, c.stutter) {
        (Level::Low, false) => Formula::Unit(np()),
        (Level::High, false) => Formula::Unit(p.clone()),
        (Level::DontCare | Level::Unknown, false) => Formula::Slen(Cmp::Eq, 1),
        (Level::Low, true) => Formula::or(Formula::pt(), Formula::AllButLast(np())),
        (Level::High, true) => Formula::or(Formula::pt(), Formula::AllButLast(p.clone())),
        (Level::DontCare, true) => Formula::tt(),
        (Level::Unknown, true) => Formula::or(
            Formula::or(Formula::pt(), Formula::AllButLast(p.clone())),
            Formula::AllButLast(np()),
        ),
    }
}

pub fn xi_waveform_with(w: &Waveform, p: &Prop, form: MarkerForm) -> Formula {
    let mut parts = vec![];
    for c in &w.cells {
        if let Some(u) = &c.marker {
            parts.push(marker(u, form));
        }
        parts.push(cell_formula(c, p));
    }
    Formula::chop_all(parts).expect("waveforms are non-empty")
}

pub fn xi_waveform(w: &Waveform, p: &Prop) -> Formula {
    xi_waveform_with(w, p, MarkerForm::Point)
}

fn bound_formula(c: &Constraint) -> Formula {
    if let (Some((l, true)), Some((r, true))) = (c.lo, c.hi) {
        if l == r {
            return Formula::Slen(Cmp::Eq, l);
        }
    }
    let lo = c.lo.map(|(l, cl)| Formula::Slen(if cl { Cmp::Ge } else { Cmp::Gt }, l));
    let hi = c.hi.map(|(r, cl)| Formula::Slen(if cl { Cmp::Le } else { Cmp::Lt }, r));
    match (lo, hi) {
        (Some(a), Some(b)) => Formula::and(a, b),
        (Some(a), None) | (None, Some(a)) => a,
        (None, None) => Formula::tt(),
    }
}

pub fn xi_constraint_with(c: &Constraint, form: MarkerForm) -> Formula {
    Formula::chop_all([
        Formula::tt(),
        marker(&c.from, form),
        bound_formula(c),
        marker(&c.to, form),
        Formula::tt(),
    ])
    .expect("non-empty")
}

pub fn xi_constraint(c: &Constraint) -> Formula {
    xi_constraint_with(c, MarkerForm::Point)
}

pub fn xi_with(t: &TimingDiagram, form: MarkerForm) -> Nominated {
    let parts = t
        .waves
        .iter()
        .map(|w| xi_waveform_with(&w.wave, &w.signal, form))
        .chain(t.constraints.iter().map(|c| xi_constraint_with(c, form)));
    let formula = Formula::and_all(parts);
    Nominated { formula, nominals: t.nominals() }
}

/// Nominated SeCe formula equivalent to the diagram under every nominal
/// valuation.
pub fn xi(t: &TimingDiagram) -> Nominated {
    xi_with(t, MarkerForm::Point)
}

/// The translation with `<u>` markers exactly as tabulated.
pub fn xi_literal(t: &TimingDiagram) -> Nominated {
    xi_with(t, MarkerForm::Begin)
}

/// WaveDrom JSON. Repeated nominals get `_k` suffixes since WaveDrom node
/// names must be unique.
pub fn export_wavedrom(t: &TimingDiagram) -> String {
    let mut uses: BTreeMap<&str, usize> = BTreeMap::new();
    let mut first_label: BTreeMap<&str, String> = BTreeMap::new();
    let mut signals = vec![];
    for w in &t.waves {
        let mut wave = String::new();
        let mut node = String::new();
        for c in &w.wave.cells {
            wave.push(c.level.symbol());
            match &c.marker {
                Some(u) => {
                    let k = uses.entry(u).or_insert(0);
                    let label = if *k == 0 { u.clone() } else { format!("{u}_{k}") };
                    *k += 1;
                    first_label.entry(u).or_insert_with(|| label.clone());
                    node.push_str(&label);
                }
                None => node.push('.'),
            }
            if c.stutter {
                wave.push('|');
                node.push('.');
            }
        }
        let name = match &w.signal {
            Prop::True => String::new(),
            p => p.to_string(),
        };
        signals.push(json!({ "name": name, "wave": wave, "node": node }));
    }
    let edges: Vec<String> = t
        .constraints
        .iter()
        .map(|c| {
            let label = c.to_string();
            let label = label.trim_start_matches("@sync:").trim_end_matches(';');
            format!("{}<->{} {}", first_label[c.from.as_str()], first_label[c.to.as_str()], label)
        })
        .collect();
    let doc = if edges.is_empty() {
        json!({ "signal": signals })
    } else {
        json!({ "signal": signals, "edge": edges })
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("json");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{classify_fragment, parse_qddc, Fragment};

    pub(crate) const FIG3: &str = "p: 01a:2x011xb:x2|220c:00;\n\
        q: 00a:0|d:11|e:xxx|f:01c:11;\n\
        @sync:(a, d, [1,8]);\n\
        @sync:(d, c, [20,30]);\n\
        @sync:(a, b, [10,10]);\n";

    #[test]
    fn worked_waveform() {
        let w = parse_waveform("01a:2x011xb:x2|220c:00").unwrap();
        assert_eq!(w.cells.len(), 15);
        let at: Vec<(usize, &str)> =
            w.cells.iter().enumerate().filter_map(|(i, c)| c.marker.as_deref().map(|m| (i, m))).collect();
        assert_eq!(at, vec![(2, "a"), (8, "b"), (13, "c")]);
        assert!(w.cells[9].stutter && w.cells[9].level == Level::DontCare);
    }

    #[test]
    fn waveform_errors() {
        assert!(parse_waveform("0y:").is_err());
        assert!(parse_waveform("").is_err());
        assert!(parse_waveform("0a:1a:0").is_err());
        assert!(parse_waveform("03").is_err());
        let w = parse_waveform("1|").unwrap();
        assert_eq!(w.cells, vec![Cell { marker: None, level: Level::High, stutter: true }]);
        assert_eq!(parse_waveform("<u>1|<v>1|").unwrap().markers().collect::<Vec<_>>(), ["u", "v"]);
    }

    #[test]
    fn fig3_diagram() {
        let t = parse_timing_diagram(FIG3, &["p", "q"]).unwrap();
        assert_eq!(t.nominals().len(), 6);
        assert_eq!(t.constraints.len(), 3);
        assert!(parse_timing_diagram("p: 0a:1;\n@sync:(a, z, [1,2]);", &["p"]).is_err());
        assert!(parse_timing_diagram("p: 0a:1b:0;\n@sync:(a, b, [3,2]);", &["p"]).is_err());
        assert!(parse_timing_diagram("p: 1;", &["p"]).is_ok());
    }

    #[test]
    fn translation_of_wp() {
        let t = parse_timing_diagram(FIG3, &["p", "q"]).unwrap();
        let got = xi_waveform_with(&t.waves[0].wave, &Prop::var("p"), MarkerForm::Begin);
        let want = parse_qddc(
            "{!p}^{p}^<a>^(slen=1)^(slen=1)^{!p}^{p}^{p}^(slen=1)^<b>^(slen=1)^true^(slen=1)^(slen=1)^{!p}^<c>^{!p}^{!p}",
            &["p", "a", "b", "c"],
        )
        .unwrap();
        assert_eq!(got, want);
        assert_eq!(classify_fragment(&got).fragment, Fragment::Ce);
        assert_eq!(classify_fragment(&xi(&t).formula).fragment, Fragment::SeCe);
    }

    #[test]
    fn cell_and_constraint_forms() {
        let p = Prop::var("p");
        let one = |s: &str| xi_waveform(&parse_waveform(s).unwrap(), &p);
        assert_eq!(one("1|"), parse_qddc("pt || [p]", &["p"]).unwrap());
        assert_eq!(one("x"), parse_qddc("slen=1", &["p"]).unwrap());
        let c = Constraint::closed("a", "d", 1, 8);
        assert_eq!(
            xi_constraint_with(&c, MarkerForm::Begin),
            parse_qddc("true^<a>^(slen>=1 && slen<=8)^<d>^true", &["a", "d"]).unwrap()
        );
        let c = Constraint::closed("a", "b", 10, 10);
        assert_eq!(
            xi_constraint_with(&c, MarkerForm::Begin),
            parse_qddc("true^<a>^(slen=10)^<b>^true", &["a", "b"]).unwrap()
        );
        let t = parse_timing_diagram("@null: 2u:2|v:2;\n@sync:(u, v, (3,]);", &[] as &[&str]).unwrap();
        assert_eq!(xi_constraint(&t.constraints[0]), parse_qddc("true^[[u]]^(slen>3)^[[v]]^true", &["u", "v"]).unwrap());
    }

    #[test]
    fn single_cell_diagram() {
        let t = parse_timing_diagram("p: 1;", &["p"]).unwrap();
        let n = xi(&t);
        assert_eq!(n.formula, Formula::Unit(Prop::var("p")));
        assert!(n.nominals.is_empty());
    }

    #[test]
    fn wavedrom_is_deterministic() {
        let t = parse_timing_diagram(FIG3, &["p", "q"]).unwrap();
        let a = export_wavedrom(&t);
        assert_eq!(a, export_wavedrom(&t));
        let v: serde_json::Value = serde_json::from_str(&a).unwrap();
        assert_eq!(v["signal"].as_array().unwrap().len(), 2);
        assert!(v["signal"][1]["node"].as_str().unwrap().contains("a_1"));
        let plain = export_wavedrom(&parse_timing_diagram("p: 01;", &["p"]).unwrap());
        assert!(!plain.contains("edge"));
    }

    #[test]
    fn printer_round_trip() {
        let t = parse_timing_diagram(FIG3, &["p", "q"]).unwrap();
        assert_eq!(parse_timing_diagram(&t.to_string(), &["p", "q"]).unwrap(), t);
    }
}
