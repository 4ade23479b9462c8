//! Brute-force oracles shared by the integration tests. They use only the
//! defining equations, never the library's enumeration.

#![allow(dead_code)]

use std::collections::BTreeSet;

/// Coordinates `(a, b_1..b_k)` of `a L - sum b_i E_i`.
pub type LineForm = Vec<i64>;

fn exceptional_eq(a: i64, b: &[i64]) -> bool {
    3 * a - b.iter().sum::<i64>() == 1 && a * a - b.iter().map(|x| x * x).sum::<i64>() == -1
}

fn root_eq(a: i64, b: &[i64]) -> bool {
    3 * a - b.iter().sum::<i64>() == 0 && a * a - b.iter().map(|x| x * x).sum::<i64>() == -2
}

/// Every `b` in `[-bound, bound]^k` for every `a` in `a_range`.
pub fn full_box(k: usize, a_range: std::ops::RangeInclusive<i64>, bound: i64, root: bool) -> BTreeSet<LineForm> {
    let mut out = BTreeSet::new();
    let width = (2 * bound + 1) as usize;
    let total = width.pow(k as u32);
    let mut b = vec![0i64; k];
    for a in a_range {
        for mut code in 0..total {
            for slot in b.iter_mut() {
                *slot = (code % width) as i64 - bound;
                code /= width;
            }
            let ok = if root { root_eq(a, &b) } else { exceptional_eq(a, &b) };
            if ok {
                let mut v = vec![a];
                v.extend_from_slice(&b);
                out.insert(v);
            }
        }
    }
    out
}

fn permutations(sorted: &[i64], out: &mut BTreeSet<Vec<i64>>, prefix: &mut Vec<i64>, used: &mut Vec<bool>) {
    if prefix.len() == sorted.len() {
        out.insert(prefix.clone());
        return;
    }
    for i in 0..sorted.len() {
        if used[i] || (i > 0 && sorted[i] == sorted[i - 1] && !used[i - 1]) {
            continue;
        }
        used[i] = true;
        prefix.push(sorted[i]);
        permutations(sorted, out, prefix, used);
        prefix.pop();
        used[i] = false;
    }
}

/// Nondecreasing `b` with entries in `[-bound, bound]`, then all distinct
/// permutations of each solution.
pub fn multiset(k: usize, a_range: std::ops::RangeInclusive<i64>, bound: i64, root: bool) -> BTreeSet<LineForm> {
    fn go(
        a: i64,
        k: usize,
        lo: i64,
        bound: i64,
        root: bool,
        cur: &mut Vec<i64>,
        out: &mut BTreeSet<LineForm>,
    ) {
        if cur.len() == k {
            let ok = if root { root_eq(a, cur) } else { exceptional_eq(a, cur) };
            if ok {
                let mut perms = BTreeSet::new();
                permutations(cur, &mut perms, &mut Vec::new(), &mut vec![false; k]);
                for p in perms {
                    let mut v = vec![a];
                    v.extend(p);
                    out.insert(v);
                }
            }
            return;
        }
        for x in lo..=bound {
            cur.push(x);
            go(a, k, x, bound, root, cur, out);
            cur.pop();
        }
    }
    let mut out = BTreeSet::new();
    for a in a_range {
        go(a, k, -bound, bound, root, &mut Vec::new(), &mut out);
    }
    out
}

/// Search ranges from Cauchy-Schwarz on the two defining equations.
/// Exceptional: `(9 - k) a^2 - 6a + 1 - k <= 0`, `b_i^2 <= a^2 + 1`.
/// Roots: `(9 - k) a^2 <= 2k`, `b_i^2 <= a^2 + 2`.
pub fn ranges(k: usize, root: bool) -> (std::ops::RangeInclusive<i64>, i64) {
    let kk = k as i64;
    let a_ok = |a: i64| {
        if root {
            (9 - kk) * a * a <= 2 * kk
        } else {
            (9 - kk) * a * a - 6 * a + 1 - kk <= 0
        }
    };
    let lo = (-20..=20).find(|&a| a_ok(a)).unwrap();
    let hi = (-20..=20).rev().find(|&a| a_ok(a)).unwrap();
    let amax = lo.abs().max(hi.abs());
    let extra = if root { 2 } else { 1 };
    let bound = ((amax * amax + extra) as f64).sqrt().floor() as i64;
    (lo..=hi, bound)
}

/// Oracle set as coefficient vectors on `(L, E_1, .., E_k)`. Full box up to
/// `k = 6`, multisets beyond.
pub fn oracle(k: usize, root: bool) -> BTreeSet<LineForm> {
    let (a_range, bound) = ranges(k, root);
    let raw = if k <= 6 {
        full_box(k, a_range, bound, root)
    } else {
        multiset(k, a_range, bound, root)
    };
    raw.into_iter()
        .map(|mut v| {
            for x in v.iter_mut().skip(1) {
                *x = -*x;
            }
            v
        })
        .collect()
}
