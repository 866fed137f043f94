//! The sets `A(m)` of integers whose Ostrowski digits vanish below index `m`,
//! their gap sequence, and the block words that encode it.
//!
//! Gaps of `A(m)` take only the values `q_m` (letter `1`) and `q_{m−1}`
//! (letter `2`).

use std::cmp::Ordering;

use serde::Serialize;

use crate::cf::ConvergentTable;
use crate::error::{Error, Result};
use crate::frame::Lin;
use crate::intervals::make_interval;
use crate::ostrowski::greedy_digits;
use crate::real::Real;

/// Streams `A(m)` in increasing order in O(1) amortized time per element.
#[derive(Clone, Debug)]
pub struct AmEnumerator<'a> {
    table: &'a ConvergentTable,
    m: usize,
    n: i128,
    digits: Vec<u64>,
}

impl<'a> AmEnumerator<'a> {
    /// Starts at `n_0(m) = 0`.
    pub fn new(m: usize, table: &'a ConvergentTable) -> Result<Self> {
        Self::check_level(m, table)?;
        Ok(AmEnumerator {
            table,
            m,
            n: 0,
            digits: vec![0; m + 2],
        })
    }

    /// Starts at the least element of `A(m)` that is `≥ from`.
    pub fn starting_at(m: usize, table: &'a ConvergentTable, from: i128) -> Result<Self> {
        Self::check_level(m, table)?;
        let from = from.max(0);
        if table.q(table.depth() as isize) <= from {
            return Err(Error::DepthInsufficient(format!(
                "q_{} ≤ {from}",
                table.depth()
            )));
        }
        let mut digits = greedy_digits(from, table);
        digits.resize(digits.len().max(m + 2), 0);
        let mut dropped = false;
        let mut n = from;
        for k in 0..m {
            if digits[k] != 0 {
                n -= digits[k] as i128 * table.q(k as isize);
                digits[k] = 0;
                dropped = true;
            }
        }
        let mut e = AmEnumerator {
            table,
            m,
            n,
            digits,
        };
        if dropped {
            e.advance()?;
        }
        Ok(e)
    }

    fn check_level(m: usize, table: &ConvergentTable) -> Result<()> {
        if m == 0 {
            return Err(Error::PreconditionUnmet("level m must be at least 1".into()));
        }
        if m + 1 > table.depth() {
            return Err(Error::DepthInsufficient(format!("a_{} needed", m + 1)));
        }
        Ok(())
    }

    pub fn level(&self) -> usize {
        self.m
    }

    /// The current element.
    pub fn current(&self) -> i128 {
        self.n
    }

    /// Ostrowski digits of the current element.
    pub fn digits(&self) -> &[u64] {
        let mut len = self.digits.len();
        while len > 1 && self.digits[len - 1] == 0 {
            len -= 1;
        }
        &self.digits[..len]
    }

    /// The gap to the next element: `q_m` while `c_{m+1} < a_{m+1}`,
    /// otherwise `q_{m−1}`.
    pub fn next_gap_is_long(&self) -> bool {
        self.digits[self.m] < self.table.a(self.m + 1)
    }

    /// Moves to the next element and returns it.
    pub fn advance(&mut self) -> Result<i128> {
        let m = self.m;
        let start = if self.next_gap_is_long() {
            self.n += self.table.q(m as isize);
            self.digits[m] += 1;
            m
        } else {
            self.n += self.table.q(m as isize - 1);
            self.digits[m - 1] += 1;
            m - 1
        };
        self.normalize(start)?;
        Ok(self.n)
    }

    /// Restores the digit constraints after a unit increment at `start`,
    /// using `a_{k+2}·q_{k+1} + q_k = q_{k+2}` and `a_1·q_0 = q_1`. Each
    /// rewrite only disturbs the pair above it.
    fn normalize(&mut self, start: usize) -> Result<()> {
        let mut k = start;
        loop {
            if k + 3 > self.digits.len() {
                self.digits.resize(k + 3, 0);
            }
            if k + 2 > self.table.depth() {
                return Err(Error::DepthInsufficient(format!(
                    "A({}) element beyond q_{}",
                    self.m,
                    self.table.depth()
                )));
            }
            if self.digits[k + 1] == self.table.a(k + 2) && self.digits[k] >= 1 {
                self.digits[k + 1] = 0;
                self.digits[k] -= 1;
                self.digits[k + 2] += 1;
                k += 2;
            } else if k == 0 && self.digits[0] >= self.table.a(1) {
                self.digits[0] -= self.table.a(1);
                self.digits[1] += 1;
                k = 1;
            } else {
                return Ok(());
            }
        }
    }
}

impl Iterator for AmEnumerator<'_> {
    type Item = i128;

    /// Yields the current element, then advances.
    fn next(&mut self) -> Option<i128> {
        let n = self.n;
        match self.advance() {
            Ok(_) => Some(n),
            Err(_) => None,
        }
    }
}

/// The members of `A(m)` in `[0, limit]`.
pub fn enumerate_am(m: usize, table: &ConvergentTable, limit: i128) -> Result<Vec<i128>> {
    if table.q(table.depth() as isize) <= limit {
        return Err(Error::DepthInsufficient(format!(
            "q_{} ≤ {limit}",
            table.depth()
        )));
    }
    let mut e = AmEnumerator::new(m, table)?;
    let mut out = vec![0];
    loop {
        let n = e.advance()?;
        if n > limit {
            return Ok(out);
        }
        out.push(n);
    }
}

/// `B_i` over the letters `1` (gap `q_m`) and `2` (gap `q_{m−1}`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BlockWord {
    pub i: isize,
    #[serde(serialize_with = "ser_word")]
    pub letters: Vec<u8>,
    /// Number of ones.
    pub s: i128,
    /// Number of twos.
    pub r: i128,
}

fn ser_word<S: serde::Serializer>(w: &[u8], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&word_string(w))
}

pub fn word_string(w: &[u8]) -> String {
    w.iter().map(|&c| char::from(b'0' + c)).collect()
}

impl BlockWord {
    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn word(&self) -> String {
        word_string(&self.letters)
    }

    pub fn ones(&self) -> usize {
        self.letters.iter().filter(|&&c| c == 1).count()
    }

    pub fn twos(&self) -> usize {
        self.letters.iter().filter(|&&c| c == 2).count()
    }

    /// `Σ` of the gaps the letters stand for, `s·q_m + r·q_{m−1}`.
    pub fn span(&self, m: usize, table: &ConvergentTable) -> i128 {
        self.s * table.q(m as isize) + self.r * table.q(m as isize - 1)
    }
}

/// `B_{−1} … B_imax` for level `m`, built by `B_i = B_{i−1}^{a_{m+i}} B_{i−2}`.
pub fn blocks(m: usize, imax: isize, table: &ConvergentTable) -> Result<Vec<BlockWord>> {
    blocks_while(m, table, |i, _| i <= imax)
}

/// Blocks while `keep(i, len(B_{i−1}))` holds.
fn blocks_while(
    m: usize,
    table: &ConvergentTable,
    keep: impl Fn(isize, usize) -> bool,
) -> Result<Vec<BlockWord>> {
    if m == 0 {
        return Err(Error::PreconditionUnmet("level m must be at least 1".into()));
    }
    let mut out = vec![
        BlockWord {
            i: -1,
            letters: vec![2],
            s: 0,
            r: 1,
        },
        BlockWord {
            i: 0,
            letters: vec![1],
            s: 1,
            r: 0,
        },
    ];
    let mut i = 1isize;
    while keep(i, out.last().expect("non-empty").len()) {
        let a = table.try_a(m + i as usize)?;
        let prev = &out[out.len() - 1];
        let prev2 = &out[out.len() - 2];
        let mut letters = Vec::with_capacity(prev.len() * a as usize + prev2.len());
        for _ in 0..a {
            letters.extend_from_slice(&prev.letters);
        }
        letters.extend_from_slice(&prev2.letters);
        let w = BlockWord {
            i,
            letters,
            s: a as i128 * prev.s + prev2.s,
            r: a as i128 * prev.r + prev2.r,
        };
        out.push(w);
        i += 1;
    }
    Ok(out)
}

/// `B_i` at level `m`.
pub fn block(i: isize, m: usize, table: &ConvergentTable) -> Result<BlockWord> {
    if i < -1 {
        return Err(Error::PreconditionUnmet("block index must be ≥ −1".into()));
    }
    let mut all = blocks(m, i, table)?;
    Ok(all.swap_remove((i + 1) as usize))
}

/// The first `len` letters of the gap sequence of `A(m)`.
pub fn gap_letters(m: usize, table: &ConvergentTable, len: usize) -> Result<Vec<u8>> {
    let mut e = AmEnumerator::new(m, table)?;
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        out.push(if e.next_gap_is_long() { 1 } else { 2 });
        e.advance()?;
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PrefixDecomposition {
    /// `(i_k, d_{i_k})` with strictly decreasing `i_k`.
    pub parts: Vec<(isize, u64)>,
    /// `Σ d·(s + r)`.
    pub count: i128,
    /// `Σ d·(s·q_m + r·q_{m−1})`, which is `n_M(m)`.
    pub endpoint: i128,
}

/// Writes the length-`M` prefix of the gap word of `A(m)` as runs of complete
/// blocks of strictly decreasing level, taking at each step the largest block
/// that is a prefix of what remains and then as many copies as fit.
pub fn decompose_prefix(big_m: usize, m: usize, table: &ConvergentTable) -> Result<PrefixDecomposition> {
    if big_m == 0 {
        return Err(Error::PreconditionUnmet("M must be at least 1".into()));
    }
    let bs = blocks_while(m, table, |_, prev_len| prev_len <= big_m)?;
    let word = gap_letters(m, table, big_m)?;
    decompose_with(&word, &bs, m, table)
}

fn decompose_with(
    word: &[u8],
    bs: &[BlockWord],
    m: usize,
    table: &ConvergentTable,
) -> Result<PrefixDecomposition> {
    let mut parts = Vec::new();
    let mut pos = 0;
    let mut bound = bs.len();
    while pos < word.len() {
        let rest = &word[pos..];
        let found = (0..bound)
            .rev()
            .find(|&j| bs[j].len() <= rest.len() && rest.starts_with(&bs[j].letters));
        let Some(j) = found else {
            return Err(Error::InvariantViolation(format!(
                "no block below B_{} starts the remaining gap word",
                bs[bound.min(bs.len() - 1)].i
            )));
        };
        let b = &bs[j];
        let mut d = 0u64;
        while word[pos..].starts_with(&b.letters) {
            pos += b.len();
            d += 1;
        }
        parts.push((b.i, d));
        bound = j;
    }
    let mut count = 0;
    let mut endpoint = 0;
    for &(i, d) in &parts {
        let b = &bs[(i + 1) as usize];
        count += d as i128 * (b.s + b.r);
        endpoint += d as i128 * b.span(m, table);
    }
    Ok(PrefixDecomposition {
        parts,
        count,
        endpoint,
    })
}

/// Reusable state for decomposing many prefixes of the same gap word.
pub struct Decomposer<'a> {
    table: &'a ConvergentTable,
    m: usize,
    word: Vec<u8>,
    blocks: Vec<BlockWord>,
}

impl<'a> Decomposer<'a> {
    pub fn new(m: usize, table: &'a ConvergentTable, max_len: usize) -> Result<Self> {
        Ok(Decomposer {
            table,
            m,
            word: gap_letters(m, table, max_len)?,
            blocks: blocks_while(m, table, |_, prev_len| prev_len <= max_len)?,
        })
    }

    pub fn blocks(&self) -> &[BlockWord] {
        &self.blocks
    }

    pub fn decompose(&self, big_m: usize) -> Result<PrefixDecomposition> {
        if big_m == 0 || big_m > self.word.len() {
            return Err(Error::PreconditionUnmet(format!(
                "M = {big_m} outside 1..={}",
                self.word.len()
            )));
        }
        decompose_with(&self.word[..big_m], &self.blocks, self.m, self.table)
    }
}

/// `Σ d·|s_i·{ζ_m} − r_i|` for a decomposition.
pub fn block_deviation_sum(
    dec: &PrefixDecomposition,
    m: usize,
    table: &ConvergentTable,
) -> Result<f64> {
    let f = table.frac_tail(m)?.to_f64();
    let bs = blocks(m, dec.parts.first().map_or(0, |p| p.0).max(0), table)?;
    Ok(dec
        .parts
        .iter()
        .map(|&(i, d)| {
            let b = &bs[(i + 1) as usize];
            d as f64 * (b.s as f64 * f - b.r as f64).abs()
        })
        .sum())
}

/// `|J(m, 0)| = (1 + {ζ_m}) / (q_m·(1 + {ζ_m}·ξ_m))`, the density of `A(m)`.
pub fn am_density(m: usize, table: &ConvergentTable) -> Result<Real> {
    table.special_length_formula(m)
}

/// `M − n_M(m)·(1 + {ζ_m}) / (q_m·(1 + {ζ_m}·ξ_m))`.
pub fn counting_residual(big_m: usize, m: usize, table: &ConvergentTable) -> Result<Real> {
    let mut e = AmEnumerator::new(m, table)?;
    for _ in 0..big_m {
        e.advance()?;
    }
    let density = am_density(m, table)?;
    Ok(Real::from(big_m as i128).sub(&density.scale(e.current())))
}

/// One row of a residual scan.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ResidualRow {
    pub big_m: usize,
    pub n_m: i128,
    pub residual: f64,
}

/// Streams `M − n_M·|J(m,0)|` for `M = 0..=max_m` into `sink`; returns the
/// maximum absolute residual.
pub fn scan_residual(
    m: usize,
    table: &ConvergentTable,
    max_m: usize,
    mut sink: impl FnMut(ResidualRow),
) -> Result<f64> {
    let density = am_density(m, table)?;
    let (hi, lo) = density_bounds(&density);
    let mut e = AmEnumerator::new(m, table)?;
    let mut worst = 0f64;
    for big_m in 0..=max_m {
        let n = e.current();
        // the worse of the two enclosure ends, so maxima never undershoot
        let r = (big_m as f64 - n as f64 * lo).abs().max((big_m as f64 - n as f64 * hi).abs());
        let signed = big_m as f64 - n as f64 * (lo + hi) / 2.0;
        worst = worst.max(r);
        sink(ResidualRow {
            big_m,
            n_m: n,
            residual: signed,
        });
        if big_m < max_m {
            e.advance()?;
        }
    }
    Ok(worst)
}

/// For each checkpoint `c`, the `M ≤ c` maximizing `|M − n_M·|J(m,0)||` and
/// that maximum as an exact form over `[1, α]`. Floats screen out rows that
/// cannot beat the running maximum; every remaining comparison is exact.
pub fn residual_maxima(
    m: usize,
    table: &ConvergentTable,
    checkpoints: &[usize],
) -> Result<Vec<(usize, Lin)>> {
    let frame = table.frame();
    let len = make_interval(m, &Lin::zero(), table)?.length().clone();
    let len_f = frame.to_f64(&len);
    let abs = |x: Lin| -> Result<Lin> {
        Ok(if frame.sign(&x)? == Ordering::Less { x.neg() } else { x })
    };
    let mut e = AmEnumerator::new(m, table)?;
    let mut best = (0usize, Lin::zero());
    let mut best_f = 0f64;
    let mut out = Vec::with_capacity(checkpoints.len());
    let last = checkpoints.iter().copied().max().unwrap_or(0);
    for big_m in 0..=last {
        let n = e.current();
        let f = (big_m as f64 - n as f64 * len_f).abs();
        let slack = (big_m as f64 + n as f64 * len_f + 1.0) * 64.0 * f64::EPSILON;
        if f + slack >= best_f - slack {
            let r = abs(len.scale(-n).add_constant(big_m as i128))?;
            if frame.cmp(&r, &best.1)? == Ordering::Greater {
                best_f = frame.to_f64(&r);
                best = (big_m, r);
            }
        }
        for &c in checkpoints {
            if c == big_m {
                out.push(best.clone());
            }
        }
        if big_m < last {
            e.advance()?;
        }
    }
    let mut sorted: Vec<(usize, usize)> = checkpoints.iter().copied().enumerate().collect();
    sorted.sort_by_key(|&(_, c)| c);
    let mut res = vec![(0, Lin::zero()); checkpoints.len()];
    for ((i, _), v) in sorted.into_iter().zip(out) {
        res[i] = v;
    }
    Ok(res)
}

/// Float enclosure `(hi, lo)` of a positive real.
fn density_bounds(x: &Real) -> (f64, f64) {
    let v = x.to_f64();
    let w = match x {
        Real::Exact(_) => v * 4.0 * f64::EPSILON,
        Real::Approx(iv) => {
            use num_traits::ToPrimitive;
            iv.width().to_f64().unwrap_or(f64::INFINITY) + v * 4.0 * f64::EPSILON
        }
    };
    (v + w, v - w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alpha::Irrational;
    use crate::cf::cf_digits;

    fn table(spec: &str, depth: usize) -> ConvergentTable {
        cf_digits(&spec.parse::<Irrational>().unwrap(), depth).unwrap()
    }

    #[test]
    fn golden_a2() {
        let t = table("surd:-1,1,5,2", 20);
        assert_eq!(enumerate_am(2, &t, 10).unwrap(), vec![0, 2, 3, 5, 7, 8, 10]);
    }

    #[test]
    fn sqrt2_a2() {
        let t = table("surd:-1,1,2,1", 20);
        assert_eq!(enumerate_am(2, &t, 12).unwrap(), vec![0, 5, 10, 12]);
    }

    #[test]
    fn a1_starts_at_q1() {
        let t = table("surd:-1,1,2,1", 20);
        assert_eq!(enumerate_am(1, &t, 1).unwrap(), vec![0]);
        assert_eq!(enumerate_am(1, &t, 2).unwrap(), vec![0, 2]);
    }

    #[test]
    fn starting_point_rounds_up() {
        let t = table("surd:-1,1,5,2", 20);
        let all = enumerate_am(3, &t, 500).unwrap();
        for from in 0..480 {
            let e = AmEnumerator::starting_at(3, &t, from).unwrap();
            let want = *all.iter().find(|&&n| n >= from).unwrap();
            assert_eq!(e.current(), want, "from {from}");
        }
    }

    #[test]
    fn known_blocks() {
        let g = table("surd:-1,1,5,2", 20);
        assert_eq!(block(1, 2, &g).unwrap().word(), "12");
        assert_eq!(block(2, 2, &g).unwrap().word(), "121");
        let s = table("surd:-1,1,2,1", 20);
        let b1 = block(1, 2, &s).unwrap();
        assert_eq!(b1.word(), "112");
        let b2 = block(2, 2, &s).unwrap();
        assert_eq!(b2.word(), "1121121");
        assert_eq!((b2.s, b2.r), (5, 2));
        assert_eq!(b2.span(2, &s), 29);
        assert_eq!(block(-1, 3, &s).unwrap().word(), "2");
        assert_eq!(block(0, 3, &s).unwrap().word(), "1");
    }

    #[test]
    fn decomposition_of_a_block_is_itself() {
        let g = table("surd:-1,1,5,2", 30);
        let d = decompose_prefix(5, 2, &g).unwrap();
        // |B_3| = 5 at this level, so the prefix is one complete block
        assert_eq!(d.parts, vec![(3, 1)]);
        assert_eq!(d.endpoint, 8);
        let d = decompose_prefix(7, 2, &g).unwrap();
        assert_eq!(d.count, 7);
        assert_eq!(d.endpoint, enumerate_am(2, &g, 100).unwrap()[7]);
    }

    #[test]
    fn carried_digits_match_greedy_encoding() {
        for spec in ["surd:-1,1,5,2", "surd:-1,1,2,1", "surd:1,1,3,2", "cf-periodic:1,2;(3)"] {
            let t = table(spec, 40);
            for m in 1..=6 {
                let mut e = AmEnumerator::new(m, &t).unwrap();
                for _ in 0..3000 {
                    let n = e.advance().unwrap();
                    assert_eq!(e.digits(), crate::ostrowski::greedy_digits(n, &t).as_slice());
                    assert!(e.digits()[..m].iter().all(|&c| c == 0));
                }
            }
        }
    }

    #[test]
    fn residual_at_zero() {
        let g = table("surd:-1,1,5,2", 30);
        assert_eq!(counting_residual(0, 2, &g).unwrap().to_f64(), 0.0);
    }

    #[test]
    fn residual_maxima_match_direct_maximum() {
        let t = cf_digits(&"surd:-1,1,2,1".parse().unwrap(), 20).unwrap();
        let frame = t.frame();
        for m in 1..=4 {
            let got = residual_maxima(m, &t, &[3000, 500]).unwrap();
            let len = make_interval(m, &Lin::zero(), &t).unwrap().length().clone();
            for (idx, &c) in [3000usize, 500].iter().enumerate() {
                let mut best = 0f64;
                let ns = AmEnumerator::new(m, &t).unwrap().take(c + 1);
                for (big_m, n) in ns.enumerate() {
                    best = best.max((big_m as f64 - n as f64 * frame.to_f64(&len)).abs());
                }
                assert!((frame.to_f64(&got[idx].1) - best).abs() < 1e-9, "m = {m}, c = {c}");
            }
        }
    }
}
