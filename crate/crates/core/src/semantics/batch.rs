//! Evaluate a formula on every word of a fixed length at once.
//!
//! Word `idx` has letter `p` equal to `(idx >> p*k) & (2^k - 1)` for an
//! alphabet of `k` variables. Quantifiers are resolved by looking up the
//! variant words directly, which needs every bound variable in the alphabet.

use crate::syntax::{Formula, Prop};

use super::table::{
    all_but_last_row, all_row, begin_row, chop_rows, count_row, not_rows, slen_row, star_rows, unit_row,
};

pub struct Batch {
    pub vars: Vec<String>,
    pub len: usize,
    /// `rows[idx * len + b]`
    pub rows: Vec<u64>,
}

impl Batch {
    pub fn words(&self) -> usize {
        self.rows.len() / self.len
    }

    pub fn row(&self, idx: usize) -> &[u64] {
        &self.rows[idx * self.len..(idx + 1) * self.len]
    }

    /// Whether word `idx` restricted to `[0, e]` satisfies the formula.
    pub fn prefix_sat(&self, idx: usize, e: usize) -> bool {
        self.rows[idx * self.len] >> e & 1 == 1
    }
}

/// Tables for all `2^(k*len)` words over `vars`.
pub fn evaluate<S: AsRef<str>>(vars: &[S], len: usize, f: &Formula) -> Batch {
    let vars: Vec<String> = vars.iter().map(|s| s.as_ref().to_string()).collect();
    assert!(vars.len() * len <= 24, "batch of 2^{} words is too large", vars.len() * len);
    let ctx = Ctx { k: vars.len(), len, total: 1 << (vars.len() * len), vars: &vars };
    let rows = ctx.eval(f);
    Batch { vars, len, rows }
}

struct Ctx<'a> {
    k: usize,
    len: usize,
    total: usize,
    vars: &'a [String],
}

impl Ctx<'_> {
    #[cfg(test)]
    fn column(&self, p: &Prop, idx: usize) -> u64 {
        let tt = self.truth(p);
        self.column_tt(&tt, idx)
    }

    fn truth(&self, p: &Prop) -> Vec<bool> {
        p.truth_table(self.vars).unwrap_or_else(|v| panic!("variable `{v}` not in batch alphabet"))
    }

    fn column_tt(&self, tt: &[bool], idx: usize) -> u64 {
        let mask = (1usize << self.k) - 1;
        (0..self.len).fold(0, |m, pos| if tt[idx >> (pos * self.k) & mask] { m | 1 << pos } else { m })
    }

    fn per_row(&self, p: &Prop, f: impl Fn(u64, usize) -> u64) -> Vec<u64> {
        let tt = self.truth(p);
        let mut out = vec![0; self.total * self.len];
        for idx in 0..self.total {
            let col = self.column_tt(&tt, idx);
            for b in 0..self.len {
                out[idx * self.len + b] = f(col, b);
            }
        }
        out
    }

    fn eval(&self, f: &Formula) -> Vec<u64> {
        let n = self.len;
        match f {
            Formula::Begin(p) => self.per_row(p, |c, b| begin_row(n, c, b)),
            Formula::AllButLast(p) => self.per_row(p, |c, b| all_but_last_row(n, c, b)),
            Formula::All(p) => self.per_row(p, |c, b| all_row(n, c, b)),
            Formula::Unit(p) => self.per_row(p, |c, b| unit_row(n, c, b)),
            Formula::Scount(p, c, k) => self.per_row(p, |col, b| count_row(n, col, *c, *k, true, b)),
            Formula::Sdur(p, c, k) => self.per_row(p, |col, b| count_row(n, col, *c, *k, false, b)),
            Formula::Slen(c, k) => {
                let one: Vec<u64> = (0..n).map(|b| slen_row(n, *c, *k, b)).collect();
                one.repeat(self.total)
            }
            Formula::Chop(a, b) => {
                let (ta, tb) = (self.eval(a), self.eval(b));
                let mut out = vec![0; ta.len()];
                for ((o, ra), rb) in out.chunks_mut(n).zip(ta.chunks(n)).zip(tb.chunks(n)) {
                    chop_rows(ra, rb, o);
                }
                out
            }
            Formula::Not(a) => {
                let ta = self.eval(a);
                let mut out = vec![0; ta.len()];
                for (o, ra) in out.chunks_mut(n).zip(ta.chunks(n)) {
                    not_rows(ra, o);
                }
                out
            }
            Formula::Star(a) => {
                let ta = self.eval(a);
                let mut out = vec![0; ta.len()];
                for (o, ra) in out.chunks_mut(n).zip(ta.chunks(n)) {
                    star_rows(ra, o);
                }
                out
            }
            Formula::And(a, b) => {
                let mut ta = self.eval(a);
                ta.iter_mut().zip(self.eval(b)).for_each(|(x, y)| *x &= y);
                ta
            }
            Formula::Or(a, b) => {
                let mut ta = self.eval(a);
                ta.iter_mut().zip(self.eval(b)).for_each(|(x, y)| *x |= y);
                ta
            }
            Formula::Exists(v, a) => self.quantify(v, a, true),
            Formula::Forall(v, a) => self.quantify(v, a, false),
        }
    }

    fn quantify(&self, v: &str, a: &Formula, exists: bool) -> Vec<u64> {
        let n = self.len;
        let i = self
            .vars
            .iter()
            .position(|x| x == v)
            .unwrap_or_else(|| panic!("bound variable `{v}` must be in the batch alphabet"));
        let ta = self.eval(a);
        // Bit positions of column `i` inside a word index.
        let col_bits: Vec<usize> = (0..n).map(|pos| pos * self.k + i).collect();
        let col_mask: usize = col_bits.iter().map(|&b| 1 << b).sum();
        let mut out = vec![0; ta.len()];
        let mut acc = vec![0u64; n];
        for base in (0..self.total).filter(|idx| idx & col_mask == 0) {
            for (b, x) in acc.iter_mut().enumerate() {
                *x = if exists { 0 } else { super::table::range(b, n - 1) };
            }
            let members: Vec<usize> = (0..1usize << n)
                .map(|bits| {
                    col_bits.iter().enumerate().fold(base, |m, (pos, &bit)| m | (bits >> pos & 1) << bit)
                })
                .collect();
            for &m in &members {
                for b in 0..n {
                    if exists {
                        acc[b] |= ta[m * n + b];
                    } else {
                        acc[b] &= ta[m * n + b];
                    }
                }
            }
            for &m in &members {
                out[m * n..(m + 1) * n].copy_from_slice(&acc);
            }
        }
        out
    }
}
