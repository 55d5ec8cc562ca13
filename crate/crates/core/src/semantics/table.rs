//! Interval tables: for a word of length `n`, row `b` is the bitmask of end
//! points `e >= b` such that `[b,e]` satisfies some formula.
//!
//! A proposition is pre-evaluated into a column mask (bit `k` set iff it
//! holds at position `k`), so every constructor here is alphabet-agnostic.

use smallvec::SmallVec;

use crate::syntax::Cmp;

pub const MAX_LEN: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table {
    pub n: usize,
    pub rows: SmallVec<[u64; 16]>,
}

/// Bits `lo..=hi`; empty if `lo > hi`.
#[inline]
pub fn range(lo: usize, hi: usize) -> u64 {
    if lo > hi {
        return 0;
    }
    let top = if hi >= 63 { u64::MAX } else { (1u64 << (hi + 1)) - 1 };
    top & (u64::MAX << lo)
}

/// First position `>= b` where `col` is clear, or `n` if none.
#[inline]
fn first_clear(col: u64, b: usize, n: usize) -> usize {
    let m = !col & (u64::MAX << b);
    (m.trailing_zeros() as usize).min(n)
}

pub fn begin_row(n: usize, col: u64, b: usize) -> u64 {
    if col >> b & 1 == 1 {
        range(b, n - 1)
    } else {
        0
    }
}

pub fn all_but_last_row(n: usize, col: u64, b: usize) -> u64 {
    range(b, first_clear(col, b, n).min(n - 1))
}

pub fn all_row(n: usize, col: u64, b: usize) -> u64 {
    let f = first_clear(col, b, n);
    if f == b {
        0
    } else {
        range(b, f - 1)
    }
}

pub fn unit_row(n: usize, col: u64, b: usize) -> u64 {
    if col >> b & 1 == 1 && b + 1 < n {
        1 << (b + 1)
    } else {
        0
    }
}

pub fn slen_row(n: usize, c: Cmp, k: u64, b: usize) -> u64 {
    (b..n).filter(|&e| c.holds((e - b) as u64, k)).fold(0, |m, e| m | 1 << e)
}

/// `scount` when `inclusive`, else `sdur`.
pub fn count_row(n: usize, col: u64, c: Cmp, k: u64, inclusive: bool, b: usize) -> u64 {
    let mut m = 0;
    let mut cnt = 0u64;
    for e in b..n {
        let here = col >> e & 1;
        let v = if inclusive { cnt + here } else { cnt };
        if c.holds(v, k) {
            m |= 1 << e;
        }
        cnt += here;
    }
    m
}

pub fn chop_rows(a: &[u64], b: &[u64], out: &mut [u64]) {
    for (o, &ra) in out.iter_mut().zip(a) {
        let mut m = ra;
        let mut acc = 0;
        while m != 0 {
            let i = m.trailing_zeros() as usize;
            acc |= b[i];
            m &= m - 1;
        }
        *o = acc;
    }
}

pub fn not_rows(a: &[u64], out: &mut [u64]) {
    let n = a.len();
    for (b, (o, &ra)) in out.iter_mut().zip(a).enumerate() {
        *o = !ra & range(b, n - 1);
    }
}

/// Reflexive chop-closure.
pub fn star_rows(a: &[u64], out: &mut [u64]) {
    for b in (0..a.len()).rev() {
        let mut acc = 1u64 << b;
        let mut m = a[b] & !(1 << b);
        while m != 0 {
            let i = m.trailing_zeros() as usize;
            acc |= out[i];
            m &= m - 1;
        }
        out[b] = acc;
    }
}

impl Table {
    fn build(n: usize, f: impl FnMut(usize) -> u64) -> Table {
        assert!((1..=MAX_LEN).contains(&n), "word length {n} outside 1..={MAX_LEN}");
        Table { n, rows: (0..n).map(f).collect() }
    }

    pub fn get(&self, b: usize, e: usize) -> bool {
        self.rows[b] >> e & 1 == 1
    }

    pub fn begin(n: usize, col: u64) -> Table {
        Table::build(n, |b| begin_row(n, col, b))
    }

    pub fn all_but_last(n: usize, col: u64) -> Table {
        Table::build(n, |b| all_but_last_row(n, col, b))
    }

    pub fn all(n: usize, col: u64) -> Table {
        Table::build(n, |b| all_row(n, col, b))
    }

    pub fn unit(n: usize, col: u64) -> Table {
        Table::build(n, |b| unit_row(n, col, b))
    }

    pub fn slen(n: usize, c: Cmp, k: u64) -> Table {
        Table::build(n, |b| slen_row(n, c, k, b))
    }

    pub fn count(n: usize, col: u64, c: Cmp, k: u64, inclusive: bool) -> Table {
        Table::build(n, |b| count_row(n, col, c, k, inclusive, b))
    }

    pub fn chop(&self, other: &Table) -> Table {
        let mut out = Table::empty(self.n);
        chop_rows(&self.rows, &other.rows, &mut out.rows);
        out
    }

    pub fn not(&self) -> Table {
        let mut out = Table::empty(self.n);
        not_rows(&self.rows, &mut out.rows);
        out
    }

    pub fn and(&self, other: &Table) -> Table {
        Table::build(self.n, |b| self.rows[b] & other.rows[b])
    }

    pub fn or(&self, other: &Table) -> Table {
        Table::build(self.n, |b| self.rows[b] | other.rows[b])
    }

    pub fn or_assign(&mut self, other: &Table) {
        for (a, b) in self.rows.iter_mut().zip(&other.rows) {
            *a |= b;
        }
    }

    pub fn and_assign(&mut self, other: &Table) {
        for (a, b) in self.rows.iter_mut().zip(&other.rows) {
            *a &= b;
        }
    }

    pub fn empty(n: usize) -> Table {
        Table::build(n, |_| 0)
    }

    pub fn full(n: usize) -> Table {
        Table::build(n, |b| range(b, n - 1))
    }

    pub fn star(&self) -> Table {
        let mut out = Table::empty(self.n);
        star_rows(&self.rows, &mut out.rows);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!(range(1, 3), 0b1110);
        assert_eq!(range(3, 1), 0);
        assert_eq!(range(0, 63), u64::MAX);
    }

    #[test]
    fn count_vs_dur() {
        // {p}{}{p}
        let col = 0b101;
        let sc = Table::count(3, col, Cmp::Eq, 2, true);
        let sd = Table::count(3, col, Cmp::Eq, 1, false);
        assert!(sc.get(0, 2));
        assert!(sd.get(0, 2));
    }

    #[test]
    fn all_but_last_on_point() {
        let t = Table::all_but_last(3, 0);
        assert_eq!(t.rows[..], [0b001, 0b010, 0b100]);
        let t = Table::all(3, 0b011);
        assert_eq!(t.rows[..], [0b011, 0b010, 0]);
    }
}
