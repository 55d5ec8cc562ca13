//! Hopcroft partition refinement with canonical breadth-first numbering.

use super::Dfa;

/// The unique minimal automaton for `d`'s language, with states numbered in
/// breadth-first order from the initial state (successors by letter).
pub fn minimize(d: &Dfa) -> Dfa {
    let l = d.letters() as usize;
    let reach = d.reachable();
    let order: Vec<u32> = (0..d.num_states).filter(|&s| reach[s as usize]).collect();
    let mut index = vec![u32::MAX; d.num_states as usize];
    for (i, &s) in order.iter().enumerate() {
        index[s as usize] = i as u32;
    }
    let n = order.len();
    let mut delta = Vec::with_capacity(n * l);
    for &s in &order {
        delta.extend((0..l as u64).map(|a| index[d.next(s, a) as usize]));
    }
    let acc: Vec<bool> = order.iter().map(|&s| d.accepting[s as usize]).collect();

    // Inverse transitions: sources of (a, t) in src[off[a*n+t]..off[a*n+t+1]].
    let mut off = vec![0u32; l * n + 1];
    for s in 0..n {
        for a in 0..l {
            off[a * n + delta[s * l + a] as usize + 1] += 1;
        }
    }
    for i in 1..off.len() {
        off[i] += off[i - 1];
    }
    let mut fill = off.clone();
    let mut src = vec![0u32; n * l];
    for s in 0..n {
        for a in 0..l {
            let key = a * n + delta[s * l + a] as usize;
            src[fill[key] as usize] = s as u32;
            fill[key] += 1;
        }
    }
    drop(fill);

    let mut elems: Vec<u32> = (0..n as u32).filter(|&s| acc[s as usize]).collect();
    let n_acc = elems.len();
    elems.extend((0..n as u32).filter(|&s| !acc[s as usize]));
    let mut loc = vec![0u32; n];
    for (i, &s) in elems.iter().enumerate() {
        loc[s as usize] = i as u32;
    }
    let mut blocks: Vec<(u32, u32)> = Vec::new();
    let mut block = vec![0u32; n];
    for (lo, hi) in [(0, n_acc), (n_acc, n)] {
        if lo < hi {
            for &s in &elems[lo..hi] {
                block[s as usize] = blocks.len() as u32;
            }
            blocks.push((lo as u32, hi as u32));
        }
    }
    let mut marked = vec![0u32; blocks.len()];
    let mut work: Vec<u32> = (0..blocks.len() as u32).collect();
    let mut in_work = vec![true; blocks.len()];
    let mut touched: Vec<u32> = Vec::new();

    while let Some(b) = work.pop() {
        in_work[b as usize] = false;
        let (st, en) = blocks[b as usize];
        let splitter: Vec<u32> = elems[st as usize..en as usize].to_vec();
        for a in 0..l {
            for &t in &splitter {
                let key = a * n + t as usize;
                for &s in &src[off[key] as usize..off[key + 1] as usize] {
                    let bs = block[s as usize] as usize;
                    let first = blocks[bs].0 + marked[bs];
                    let pos = loc[s as usize];
                    if pos < first {
                        continue;
                    }
                    let other = elems[first as usize];
                    elems.swap(pos as usize, first as usize);
                    loc[other as usize] = pos;
                    loc[s as usize] = first;
                    if marked[bs] == 0 {
                        touched.push(bs as u32);
                    }
                    marked[bs] += 1;
                }
            }
            for bs in touched.drain(..) {
                let bs = bs as usize;
                let (st, en) = blocks[bs];
                let m = std::mem::take(&mut marked[bs]);
                if m == en - st {
                    continue;
                }
                let id = blocks.len() as u32;
                let fresh = if m <= en - st - m {
                    blocks[bs] = (st + m, en);
                    (st, st + m)
                } else {
                    blocks[bs] = (st, st + m);
                    (st + m, en)
                };
                blocks.push(fresh);
                for &s in &elems[fresh.0 as usize..fresh.1 as usize] {
                    block[s as usize] = id;
                }
                marked.push(0);
                in_work.push(true);
                work.push(id);
            }
        }
    }

    // Quotient, renumbered breadth-first.
    let nb = blocks.len();
    let mut num = vec![u32::MAX; nb];
    let mut queue = vec![block[index[d.initial as usize] as usize]];
    num[queue[0] as usize] = 0;
    let mut head = 0;
    let mut out_delta = Vec::with_capacity(nb * l);
    let mut out_acc = Vec::with_capacity(nb);
    while head < queue.len() {
        let bq = queue[head] as usize;
        head += 1;
        let rep = elems[blocks[bq].0 as usize] as usize;
        out_acc.push(acc[rep]);
        for a in 0..l {
            let t = block[delta[rep * l + a] as usize] as usize;
            if num[t] == u32::MAX {
                num[t] = queue.len() as u32;
                queue.push(t as u32);
            }
            out_delta.push(num[t]);
        }
    }
    Dfa { vars: d.vars.clone(), num_states: queue.len() as u32, initial: 0, accepting: out_acc, delta: out_delta }
}
