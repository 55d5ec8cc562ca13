//! Finite non-empty words over a named alphabet, plus the text trace format.

use std::fmt;

use thiserror::Error;

/// A word over `2^vars`. Letter `k` holds bit `i` iff `vars[i]` is true at
/// position `k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Word {
    pub vars: Vec<String>,
    pub letters: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TraceError {
    #[error("trace is empty")]
    Empty,
    #[error("line {line}: {msg}")]
    Line { line: usize, msg: String },
}

impl Word {
    pub fn new<S: AsRef<str>>(vars: &[S], letters: Vec<u64>) -> Self {
        assert!(vars.len() <= 64, "at most 64 variables");
        Word { vars: vars.iter().map(|s| s.as_ref().to_string()).collect(), letters }
    }

    /// Build from per-position sets of true variables.
    pub fn from_sets<S: AsRef<str>>(vars: &[S], sets: &[&[&str]]) -> Self {
        let names: Vec<String> = vars.iter().map(|s| s.as_ref().to_string()).collect();
        let letters = sets
            .iter()
            .map(|set| {
                set.iter().fold(0u64, |acc, v| {
                    let i = names.iter().position(|n| n == v).unwrap_or_else(|| panic!("unknown variable {v}"));
                    acc | 1 << i
                })
            })
            .collect();
        Word { vars: names, letters }
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn index_of(&self, var: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == var)
    }

    pub fn holds(&self, pos: usize, var: &str) -> bool {
        self.index_of(var).is_some_and(|i| self.letters[pos] >> i & 1 == 1)
    }

    pub fn prefix(&self, len: usize) -> Word {
        Word { vars: self.vars.clone(), letters: self.letters[..len].to_vec() }
    }

    /// Same word with column `var` replaced (or appended) by `bits`, where
    /// bit `k` of `bits` gives the value at position `k`.
    pub fn with_column(&self, var: &str, bits: u64) -> Word {
        let mut w = self.clone();
        let i = match w.index_of(var) {
            Some(i) => i,
            None => {
                w.vars.push(var.to_string());
                w.vars.len() - 1
            }
        };
        for (k, l) in w.letters.iter_mut().enumerate() {
            *l = (*l & !(1 << i)) | ((bits >> k & 1) << i);
        }
        w
    }

    /// Re-express over another variable list. Variables absent from `self`
    /// read as false.
    pub fn project<S: AsRef<str>>(&self, vars: &[S]) -> Word {
        let map: Vec<Option<usize>> = vars.iter().map(|v| self.index_of(v.as_ref())).collect();
        let letters = self
            .letters
            .iter()
            .map(|&l| {
                map.iter().enumerate().fold(0u64, |acc, (j, src)| match src {
                    Some(i) => acc | (l >> i & 1) << j,
                    None => acc,
                })
            })
            .collect();
        Word::new(vars, letters)
    }

    /// Every word of exactly `len` letters over `vars`, in lexicographic
    /// order of letter codes (word index = base-2^|vars| number, first
    /// letter least significant).
    pub fn all_of_len<S: AsRef<str>>(vars: &[S], len: usize) -> impl Iterator<Item = Word> + '_ {
        let k = vars.len();
        let total = 1u64 << (k * len);
        (0..total).map(move |idx| {
            let mask = (1u64 << k) - 1;
            let letters = (0..len).map(|p| idx >> (p * k) & mask).collect();
            Word::new(vars, letters)
        })
    }

    pub fn parse_trace(text: &str) -> Result<Word, TraceError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (_, header) = lines.next().ok_or(TraceError::Empty)?;
        let vars: Vec<String> = header.split(',').map(|s| s.trim().to_string()).collect();
        let mut letters = vec![];
        for (line, l) in lines {
            let err = |msg: String| TraceError::Line { line, msg };
            let mut seen = vec![false; vars.len()];
            let mut letter = 0u64;
            for pair in l.split(',') {
                let (name, val) = pair.split_once('=').ok_or_else(|| err(format!("expected var=0|1, got `{}`", pair.trim())))?;
                let i = vars
                    .iter()
                    .position(|v| v == name.trim())
                    .ok_or_else(|| err(format!("variable `{}` not in header", name.trim())))?;
                if seen[i] {
                    return Err(err(format!("variable `{}` assigned twice", vars[i])));
                }
                seen[i] = true;
                match val.trim() {
                    "1" => letter |= 1 << i,
                    "0" => {}
                    v => return Err(err(format!("value `{v}` is not 0 or 1"))),
                }
            }
            if let Some(i) = seen.iter().position(|s| !s) {
                return Err(err(format!("missing variable `{}`", vars[i])));
            }
            letters.push(letter);
        }
        if letters.is_empty() {
            return Err(TraceError::Empty);
        }
        Ok(Word { vars, letters })
    }

    pub fn to_trace(&self) -> String {
        let mut s = self.vars.join(",");
        s.push('\n');
        for &l in &self.letters {
            let row: Vec<String> =
                self.vars.iter().enumerate().map(|(i, v)| format!("{v}={}", l >> i & 1)).collect();
            s.push_str(&row.join(","));
            s.push('\n');
        }
        s
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &l in &self.letters {
            let on: Vec<&str> =
                self.vars.iter().enumerate().filter(|(i, _)| l >> i & 1 == 1).map(|(_, v)| v.as_str()).collect();
            write!(f, "{{{}}}", on.join(","))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trace_round_trip() {
        let w = Word::from_sets(&["p", "q"], &[&["p"], &[], &["p", "q"]]);
        assert_eq!(w.to_string(), "{p}{}{p,q}");
        assert_eq!(Word::parse_trace(&w.to_trace()).unwrap(), w);
    }

    #[test]
    fn trace_missing_variable_is_error() {
        let e = Word::parse_trace("p,q\np=1,q=0\np=1\n").unwrap_err();
        assert_eq!(e, TraceError::Line { line: 3, msg: "missing variable `q`".into() });
    }

    #[test]
    fn enumerate_words() {
        let ws: Vec<Word> = Word::all_of_len(&["p"], 3).collect();
        assert_eq!(ws.len(), 8);
        assert_eq!(ws[5].letters, vec![1, 0, 1]);
    }

    #[test]
    fn column_and_projection() {
        let w = Word::from_sets(&["p"], &[&["p"], &[]]);
        let w2 = w.with_column("u", 0b10);
        assert_eq!(w2.to_string(), "{p}{u}");
        assert_eq!(w2.project(&["u", "r"]).letters, vec![0, 1]);
    }
}
