//! Special intervals `J(m, γ)` on the circle, their level partitions, hit
//! counting along `nα` and discrepancy scans.
//!
//! Arcs are half-open, `[left, left + length)` mod 1. With this convention
//! `J(m, 0)` is hit by `nα`, `n ≥ 0`, exactly when `n ∈ A(m)`, and the arcs of
//! a level partition tile their parent without overlap.

use std::cmp::Ordering;

use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::alpha::parse_decimal;
use crate::cf::ConvergentTable;
use crate::error::{Error, Result};
use crate::frame::{Frame, Lin};
use crate::gaps::AmEnumerator;
use crate::ostrowski::{encode_real, reduce_to_window};

/// `[left, left + length)` mod 1, with `0 < length ≤ 1`. Both ends are linear
/// forms over the frame `[1, α]` of a convergent table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arc {
    left: Lin,
    length: Lin,
}

impl Arc {
    pub fn new(left: Lin, right: Lin, frame: &Frame) -> Result<Self> {
        let length = right.sub(&left);
        if frame.sign(&length)? != Ordering::Greater || frame.cmp(&length, &Lin::constant(1))? == Ordering::Greater {
            return Err(Error::InvariantViolation("arc length outside (0, 1]".into()));
        }
        Ok(Arc { left, length })
    }

    pub fn left(&self) -> &Lin {
        &self.left
    }

    pub fn right(&self) -> Lin {
        self.left.add(&self.length)
    }

    pub fn length(&self) -> &Lin {
        &self.length
    }

    pub fn translate(&self, by: &Lin) -> Arc {
        Arc {
            left: self.left.add(by),
            length: self.length.clone(),
        }
    }

    /// `x ∈ [left, right)` mod 1.
    pub fn contains(&self, x: &Lin, frame: &Frame) -> Result<bool> {
        let y = x.sub(&self.left);
        let k = frame.floor(&y)?;
        let z = y.add_constant(-k);
        Ok(frame.cmp(&z, &self.length)? == Ordering::Less)
    }

    /// Disjoint as subsets of ℝ/ℤ; touching ends are allowed.
    pub fn disjoint(&self, o: &Arc, frame: &Frame) -> Result<bool> {
        let gap = |a: &Arc, b: &Arc| -> Result<bool> {
            let y = b.left.sub(&a.left);
            let z = y.add_constant(-frame.floor(&y)?);
            Ok(frame.cmp(&z, &a.length)? != Ordering::Less)
        };
        Ok(gap(self, o)? && gap(o, self)?)
    }
}

/// `J(m, γ) = γ + closure{nα : n ∈ A(m)}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpecialInterval {
    m: usize,
    gamma: Lin,
    arc: Arc,
}

impl SpecialInterval {
    pub fn level(&self) -> usize {
        self.m
    }

    pub fn gamma(&self) -> &Lin {
        &self.gamma
    }

    pub fn arc(&self) -> &Arc {
        &self.arc
    }

    pub fn left(&self) -> &Lin {
        self.arc.left()
    }

    pub fn right(&self) -> Lin {
        self.arc.right()
    }

    /// `|D_{m−1}| + |D_m|`.
    pub fn length(&self) -> &Lin {
        self.arc.length()
    }
}

/// `J(m, γ)` with ends `γ − D_e` and `γ − D_o`, where `e` and `o` are the even
/// and odd members of `{m − 1, m}` (so `D_e > 0 > D_o`).
pub fn make_interval(m: usize, gamma: &Lin, table: &ConvergentTable) -> Result<SpecialInterval> {
    if m == 0 {
        return Err(Error::PreconditionUnmet("level m must be at least 1".into()));
    }
    if m + 1 > table.depth() {
        return Err(Error::DepthInsufficient(format!("J({m}, ·) needs q_{}", m + 1)));
    }
    let (e, o) = if m % 2 == 0 { (m, m - 1) } else { (m - 1, m) };
    let left = gamma.sub(&table.d_lin(e as isize));
    let right = gamma.sub(&table.d_lin(o as isize));
    Ok(SpecialInterval {
        m,
        gamma: gamma.clone(),
        arc: Arc::new(left, right, table.frame())?,
    })
}

/// For `m = 1` the arcs `J(1, c)`, `0 ≤ c < a_1`, tiling ℝ/ℤ; for `m ≥ 2` the
/// arcs `J(m, c)`, `0 ≤ c ≤ a_m`, tiling `J(m − 1, 0)`. `J(m, 0)` comes first.
pub fn level_partition(m: usize, table: &ConvergentTable) -> Result<Vec<Arc>> {
    let first = make_interval(m, &Lin::zero(), table)?;
    let frame = table.frame();
    let mut out = vec![first.arc.clone()];
    let (top, base) = if m == 1 {
        (table.a(1) - 1, 0isize)
    } else {
        (table.a(m), m as isize - 1)
    };
    let d_base = table.d_lin(base);
    let d_next = table.d_lin(base + 1);
    for c in 1..=top as i128 {
        let x = d_base.scale(c - 1).sub(&d_next);
        let y = d_base.scale(c).sub(&d_next);
        let (l, r) = if frame.cmp(&x, &y)? == Ordering::Less { (x, y) } else { (y, x) };
        out.push(Arc::new(l, r, frame)?);
    }
    Ok(out)
}

/// `x ∈ J` under the half-open convention.
pub fn contains(j: &SpecialInterval, x: &Lin, table: &ConvergentTable) -> Result<bool> {
    j.arc.contains(x, table.frame())
}

/// Parses a circle point as a form over `[1, α]`:
/// `orbit:ℓ` (`ℓα`), `lin:u,v[/den]` (`(u + vα)/den`), `p/q`, or a decimal.
pub fn parse_point(s: &str) -> Result<Lin> {
    let s = s.trim();
    let int = |t: &str| -> Result<i128> {
        t.trim()
            .parse::<i128>()
            .map_err(|_| Error::Parse(format!("bad integer `{}`", t.trim())))
    };
    if let Some(body) = s.strip_prefix("orbit:") {
        return Ok(Lin::int([0, int(body)?]));
    }
    if let Some(body) = s.strip_prefix("lin:") {
        let (nums, den) = match body.split_once('/') {
            Some((n, d)) => (n, int(d)?),
            None => (body, 1),
        };
        let parts: Vec<&str> = nums.split(',').collect();
        if parts.len() != 2 {
            return Err(Error::Parse("lin expects u,v[/den]".into()));
        }
        return Lin::new([int(parts[0])?, int(parts[1])?], den).map_err(|_| Error::Parse("zero denominator".into()));
    }
    if let Some((p, q)) = s.split_once('/') {
        return Lin::new([int(p)?], int(q)?).map_err(|_| Error::Parse("zero denominator".into()));
    }
    let r = parse_decimal(s)?;
    let num = r.numer().to_i128().ok_or(Error::Overflow("decimal point"))?;
    let den = r.denom().to_i128().ok_or(Error::Overflow("decimal point"))?;
    Lin::new([num], den)
}

/// `ℓ` with `γ ≡ −ℓα` (mod 1), if `γ` lies on the orbit.
pub fn orbit_shift(gamma: &Lin) -> Option<i128> {
    if gamma.is_integral() && gamma.dim() <= 2 {
        Some(-gamma.coeff(1))
    } else {
        None
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "method", rename_all = "kebab-case")]
pub enum CountMethod {
    /// `γ ≡ −ℓα`: the hits are `A(m) − ℓ`.
    Orbit { ell: i128 },
    /// `γ` replaced by the orbit point `−ℓα`; checked against direct counting.
    Shifted { ell: i128 },
    Direct,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct HitCount {
    pub count: u64,
    #[serde(flatten)]
    pub method: CountMethod,
}

/// `#{1 ≤ n ≤ N : nα ∈ J}` by testing every `n`.
pub fn count_hits_brute(j: &SpecialInterval, n: u64, table: &ConvergentTable) -> Result<u64> {
    let frame = table.frame();
    let mut c = 0;
    for k in 1..=n as i128 {
        if j.arc.contains(&Lin::int([0, k]), frame)? {
            c += 1;
        }
    }
    Ok(c)
}

/// `#{n ∈ A(m) : lo ≤ n ≤ hi}` for `0 ≤ lo`.
pub fn count_am_range(m: usize, table: &ConvergentTable, lo: i128, hi: i128) -> Result<u64> {
    if hi < lo {
        return Ok(0);
    }
    let mut e = AmEnumerator::starting_at(m, table, lo)?;
    let mut c = 0;
    while e.current() <= hi {
        c += 1;
        e.advance()?;
    }
    Ok(c)
}

/// Counts hits along the orbit `γ ≡ −ℓα` through `A(m)`. Negative `ℓ` is
/// replaced by `ℓ + q_K` for an even `K` with `q_K > N + |ℓ| + q_m`: the
/// shift moves every relevant point right by `0 < D_K`, less than its distance
/// to either end, and a point on the closed left end stays inside.
fn count_orbit(m: usize, ell: i128, n: u64, table: &ConvergentTable) -> Result<u64> {
    let n = n as i128;
    let mut ell = ell;
    if ell < 0 {
        let need = n + ell.abs() + table.q(m as isize) + table.q(m as isize - 1);
        let k = (0..=table.depth())
            .find(|&k| k % 2 == 0 && table.q(k as isize) > need)
            .ok_or_else(|| Error::DepthInsufficient(format!("no even q_K above {need}")))?;
        ell += table.q(k as isize);
    }
    count_am_range(m, table, ell + 1, ell + n)
}

/// `#{1 ≤ n ≤ N : nα ∈ J(m, γ)}`.
///
/// Orbit translates are counted through `A(m)`. Any other `γ` is moved to a
/// nearby orbit point `−ℓα`; candidates for `ℓ` are the truncations of the
/// real expansion of `−γ` and a direct search over `0 ≤ ℓ ≤ 10·q_{m+2}`. The
/// first candidate whose count agrees with direct counting is reported.
pub fn count_hits(j: &SpecialInterval, n: u64, table: &ConvergentTable) -> Result<HitCount> {
    if n == 0 {
        return Err(Error::PreconditionUnmet("N must be at least 1".into()));
    }
    if let Some(ell) = orbit_shift(&j.gamma) {
        return Ok(HitCount {
            count: count_orbit(j.m, ell, n, table)?,
            method: CountMethod::Orbit { ell },
        });
    }
    let direct = count_hits_brute(j, n, table)?;
    for ell in shift_candidates(j, table)? {
        if count_orbit(j.m, ell, n, table)? == direct {
            return Ok(HitCount {
                count: direct,
                method: CountMethod::Shifted { ell },
            });
        }
    }
    Ok(HitCount {
        count: direct,
        method: CountMethod::Direct,
    })
}

/// Orbit shifts `ℓ` for which `−ℓα` is close to `γ`, nearest first.
fn shift_candidates(j: &SpecialInterval, table: &ConvergentTable) -> Result<Vec<i128>> {
    let frame = table.frame();
    let mut cands = Vec::new();
    let target = frame.value(&j.gamma.neg())?;
    if let Ok((beta, _)) = reduce_to_window(&target, table) {
        let depth = table.depth().saturating_sub(1);
        match encode_real(&beta, table, depth) {
            Ok(e) => {
                for t in (j.m + 1)..=depth {
                    if let Ok(l) = e.truncated_integer(t, table) {
                        cands.push(l);
                    }
                }
            }
            Err(Error::OrbitPoint) | Err(Error::HorizonExceeded(_)) | Err(Error::UndecidableAtHorizon) => {}
            Err(e) => return Err(e),
        }
    }
    let bound = if j.m + 2 <= table.depth() {
        10 * table.q(j.m as isize + 2)
    } else {
        0
    };
    cands.extend(0..=bound);
    let dist = |l: &i128| {
        let x = frame.to_f64(&j.gamma.add(&Lin::int([0, *l])));
        let f = x - x.floor();
        f.min(1.0 - f)
    };
    cands.sort_by(|a, b| dist(a).total_cmp(&dist(b)).then(a.cmp(b)));
    cands.dedup();
    Ok(cands)
}

/// `|#{1 ≤ n ≤ N : {nα} ∈ I} − N·|I||`.
pub fn naive_discrepancy(arc: &Arc, n: u64, table: &ConvergentTable) -> Result<f64> {
    let frame = table.frame();
    let mut c = 0u64;
    for k in 1..=n as i128 {
        if arc.contains(&Lin::int([0, k]), frame)? {
            c += 1;
        }
    }
    Ok((c as f64 - n as f64 * frame.to_f64(arc.length())).abs())
}

/// A finite family of pairwise disjoint special intervals with at most `C` of
/// any one level.
#[derive(Clone, Debug)]
pub struct WindowUnion {
    intervals: Vec<SpecialInterval>,
    bound: usize,
}

impl WindowUnion {
    pub fn new(intervals: Vec<SpecialInterval>, bound: usize, table: &ConvergentTable) -> Result<Self> {
        let frame = table.frame();
        let mut levels = std::collections::BTreeMap::new();
        for j in &intervals {
            let c = levels.entry(j.m).or_insert(0usize);
            *c += 1;
            if *c > bound {
                return Err(Error::MultiplicityExceeded { level: j.m, bound });
            }
        }
        for (i, a) in intervals.iter().enumerate() {
            for b in &intervals[i + 1..] {
                if !a.arc.disjoint(&b.arc, frame)? {
                    return Err(Error::Config(format!(
                        "window intervals at levels {} and {} overlap",
                        a.m, b.m
                    )));
                }
            }
        }
        let total = intervals
            .iter()
            .fold(Lin::zero(), |acc, j| acc.add(j.length()));
        if frame.cmp(&total, &Lin::constant(1))? != Ordering::Less {
            return Err(Error::Config("window measure must be below 1".into()));
        }
        Ok(WindowUnion { intervals, bound })
    }

    /// One interval per level, placed end to end starting with `J(m_1, 0)`.
    pub fn adjacent(levels: &[usize], bound: usize, table: &ConvergentTable) -> Result<Self> {
        let mut out: Vec<SpecialInterval> = Vec::new();
        for &m in levels {
            let gamma = match out.last() {
                None => Lin::zero(),
                Some(prev) => {
                    let e = if m % 2 == 0 { m } else { m - 1 };
                    prev.right().add(&table.d_lin(e as isize))
                }
            };
            out.push(make_interval(m, &gamma, table)?);
        }
        WindowUnion::new(out, bound, table)
    }

    pub fn intervals(&self) -> &[SpecialInterval] {
        &self.intervals
    }

    pub fn bound(&self) -> usize {
        self.bound
    }

    pub fn measure(&self) -> Lin {
        self.intervals
            .iter()
            .fold(Lin::zero(), |acc, j| acc.add(j.length()))
    }

    pub fn is_single(&self) -> bool {
        self.intervals.len() == 1
    }
}

/// Maxima of `|count − N·|J||` for one `(m, γ = −ℓα)` cell.
#[derive(Clone, Debug, Serialize)]
pub struct ScanCell {
    pub m: usize,
    pub ell: i128,
    pub length: f64,
    /// Maximum over `N ≤ checkpoints[i]`.
    pub maxima: Vec<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct DiscrepancyReport {
    pub n_max: u64,
    pub checkpoints: Vec<u64>,
    /// Maximum over all cells, per checkpoint.
    pub maxima: Vec<f64>,
    /// `maxima` over `N ≤ N_max` exceeds the maximum over `N ≤ N_max/10` by
    /// more than `tolerance`.
    pub growth: bool,
    pub tolerance: f64,
    pub cells: Vec<ScanCell>,
}

/// Running maxima of a discrepancy function sampled at its extremal points.
struct Extremes<'a> {
    checkpoints: &'a [u64],
    maxima: Vec<f64>,
}

impl<'a> Extremes<'a> {
    fn new(checkpoints: &'a [u64]) -> Self {
        Extremes {
            checkpoints,
            maxima: vec![0.0; checkpoints.len()],
        }
    }

    fn record(&mut self, n: u64, value: f64) {
        for (i, &x) in self.checkpoints.iter().enumerate() {
            if n <= x {
                self.maxima[i] = self.maxima[i].max(value);
            }
        }
    }
}

/// `|c − N·L|` over both float ends of an enclosure of `L`.
fn deviation(c: u64, n: u64, lo: f64, hi: f64) -> f64 {
    let (c, n) = (c as f64, n as f64);
    (c - n * lo).abs().max((c - n * hi).abs())
}

fn length_bounds(arc: &Arc, frame: &Frame) -> (f64, f64) {
    let v = frame.to_f64(arc.length());
    let w = v.abs() * 8.0 * f64::EPSILON + frame_radius(arc.length(), frame);
    (v - w, v + w)
}

fn frame_radius(x: &Lin, frame: &Frame) -> f64 {
    match frame.value(x) {
        Ok(crate::real::Real::Approx(iv)) => iv.width().to_f64().unwrap_or(f64::INFINITY),
        _ => 0.0,
    }
}

/// One cell: `J(m, −ℓα)`, `ℓ ≥ 0`, over `1 ≤ N ≤ max(checkpoints)`.
pub fn scan_cell(m: usize, ell: i128, checkpoints: &[u64], table: &ConvergentTable) -> Result<ScanCell> {
    if ell < 0 {
        return Err(Error::PreconditionUnmet("scan shifts must be non-negative".into()));
    }
    let n_max = *checkpoints.iter().max().unwrap_or(&0);
    let j = make_interval(m, &Lin::int([0, -ell]), table)?;
    let (lo, hi) = length_bounds(j.arc(), table.frame());
    let mut ext = Extremes::new(checkpoints);
    let mut e = AmEnumerator::starting_at(m, table, ell + 1)?;
    let mut count = 0u64;
    let mut next_cp = 0;
    let mut sorted: Vec<u64> = checkpoints.to_vec();
    sorted.sort_unstable();
    loop {
        let hit = (e.current() - ell) as u64;
        while next_cp < sorted.len() && sorted[next_cp] < hit.min(n_max + 1) {
            let x = sorted[next_cp];
            ext.record(x, deviation(count, x, lo, hi));
            next_cp += 1;
        }
        if hit > n_max {
            break;
        }
        if hit > 1 {
            ext.record(hit - 1, deviation(count, hit - 1, lo, hi));
        }
        count += 1;
        ext.record(hit, deviation(count, hit, lo, hi));
        e.advance()?;
    }
    Ok(ScanCell {
        m,
        ell,
        length: (lo + hi) / 2.0,
        maxima: ext.maxima,
    })
}

/// Discrepancy maxima over the cells `levels × shifts`, computed in parallel
/// and merged by maximum in cell order.
pub fn discrepancy_scan(
    table: &ConvergentTable,
    levels: &[usize],
    shifts: &[i128],
    n_max: u64,
    tolerance: f64,
) -> Result<DiscrepancyReport> {
    let mut checkpoints = vec![(n_max / 10).max(1), n_max];
    checkpoints.dedup();
    let cells: Vec<(usize, i128)> = levels
        .iter()
        .flat_map(|&m| shifts.iter().map(move |&l| (m, l)))
        .collect();
    let cells: Vec<ScanCell> = cells
        .par_iter()
        .map(|&(m, l)| scan_cell(m, l, &checkpoints, table))
        .collect::<Result<_>>()?;
    let mut maxima = vec![0.0f64; checkpoints.len()];
    for c in &cells {
        for (a, b) in maxima.iter_mut().zip(&c.maxima) {
            *a = a.max(*b);
        }
    }
    let growth = maxima.last().copied().unwrap_or(0.0) > maxima[0] + tolerance;
    Ok(DiscrepancyReport {
        n_max,
        checkpoints,
        maxima,
        growth,
        tolerance,
        cells,
    })
}

/// Maxima of `|#{n ≤ N : {nα} ∈ I} − N·|I||` over `N ≤ checkpoints[i]` for an
/// arbitrary arc.
pub fn arc_discrepancy_maxima(arc: &Arc, checkpoints: &[u64], table: &ConvergentTable) -> Result<Vec<f64>> {
    let frame = table.frame();
    let n_max = *checkpoints.iter().max().unwrap_or(&0);
    let (lo, hi) = length_bounds(arc, frame);
    let mut ext = Extremes::new(checkpoints);
    let mut count = 0u64;
    for n in 1..=n_max {
        let before = deviation(count, n, lo, hi);
        if arc.contains(&Lin::int([0, n as i128]), frame)? {
            count += 1;
        }
        ext.record(n, before.max(deviation(count, n, lo, hi)));
    }
    Ok(ext.maxima)
}

/// `count` orbit shifts `ℓ ∈ [0, range)` drawn from a seeded generator.
pub fn sample_shifts(seed: u64, count: usize, range: i128) -> Vec<i128> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| rng.gen_range(0..range)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alpha::Irrational;
    use crate::cf::cf_digits;
    use crate::gaps::enumerate_am;

    fn table(spec: &str, depth: usize) -> ConvergentTable {
        cf_digits(&spec.parse::<Irrational>().unwrap(), depth).unwrap()
    }

    #[test]
    fn golden_j2() {
        let t = table("surd:-1,1,5,2", 30);
        let j = make_interval(2, &Lin::zero(), &t).unwrap();
        let f = t.frame();
        assert!((f.to_f64(j.left()) + 0.236_067_977_499_789_7).abs() < 1e-15);
        assert!((f.to_f64(&j.right()) - 0.381_966_011_250_105_1).abs() < 1e-15);
        assert!((f.to_f64(j.length()) - 0.618_033_988_749_895).abs() < 1e-15);
        // {5α} ≈ 0.0902 with 5 ∈ A(2)
        assert!(contains(&j, &Lin::int([0, 5]), &t).unwrap());
        assert!(contains(&j, j.left(), &t).unwrap());
        assert!(!contains(&j, &j.right(), &t).unwrap());
    }

    #[test]
    fn sqrt2_length_both_ways() {
        let t = table("surd:-1,1,2,1", 30);
        let j = make_interval(2, &Lin::zero(), &t).unwrap();
        let formula = t.special_length_formula(2).unwrap();
        let direct = t.frame().value(j.length()).unwrap();
        assert_eq!(formula.cmp_real(&direct).unwrap(), Ordering::Equal);
        assert_eq!(direct.exact_string().unwrap(), "-4+3√2");
    }

    #[test]
    fn partitions_tile_their_parent() {
        for spec in ["surd:-1,1,2,1", "surd:1,1,3,2", "cf-periodic:1,2;(3)", "surd:-1,1,5,2"] {
            let t = table(spec, 30);
            for m in 1..=6 {
                let parts = level_partition(m, &t).unwrap();
                let total = parts.iter().fold(Lin::zero(), |a, p| a.add(p.length()));
                let parent = if m == 1 {
                    Lin::constant(1)
                } else {
                    make_interval(m - 1, &Lin::zero(), &t).unwrap().length().clone()
                };
                assert_eq!(total, parent, "{spec} m = {m}");
                for (i, a) in parts.iter().enumerate() {
                    for b in &parts[i + 1..] {
                        assert!(a.disjoint(b, t.frame()).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn sqrt2_level_one() {
        let t = table("surd:-1,1,2,1", 20);
        let parts = level_partition(1, &t).unwrap();
        assert_eq!(parts.len(), 2);
        let f = t.frame();
        assert!((f.to_f64(&parts[0].right()) - 0.171_572_875_253_809_9).abs() < 1e-15);
    }

    #[test]
    fn return_times_match_am() {
        let t = table("surd:-1,1,5,2", 40);
        for m in 1..=5 {
            let j = make_interval(m, &Lin::zero(), &t).unwrap();
            let hits: Vec<i128> = (0..=3000)
                .filter(|&n| contains(&j, &Lin::int([0, n]), &t).unwrap())
                .collect();
            assert_eq!(hits, enumerate_am(m, &t, 3000).unwrap());
        }
    }

    #[test]
    fn fast_counts_match_direct_counts() {
        let t = table("surd:-1,1,2,1", 40);
        for m in 1..=4 {
            for g in ["orbit:-7", "orbit:3", "orbit:0", "1/3", "0.125", "lin:1,1/2"] {
                let j = make_interval(m, &parse_point(g).unwrap(), &t).unwrap();
                for n in [1u64, 17, 200] {
                    let fast = count_hits(&j, n, &t).unwrap();
                    assert_eq!(fast.count, count_hits_brute(&j, n, &t).unwrap(), "{g} m={m} N={n}");
                }
            }
        }
    }

    #[test]
    fn adjacent_window_measure() {
        let t = table("surd:-1,1,5,2", 30);
        let w = WindowUnion::adjacent(&[2, 4, 6], 1, &t).unwrap();
        let mu = t.frame().to_f64(&w.measure());
        assert!((mu - 0.944_271_909_999_158_8).abs() < 1e-12, "{mu}");
        let j = make_interval(3, &Lin::zero(), &t).unwrap();
        assert!(matches!(
            WindowUnion::new(vec![j.clone(), j], 1, &t),
            Err(Error::MultiplicityExceeded { .. })
        ));
    }

    #[test]
    fn full_circle_has_no_discrepancy() {
        let t = table("surd:-1,1,5,2", 30);
        let arc = Arc::new(Lin::zero(), Lin::constant(1), t.frame()).unwrap();
        assert_eq!(naive_discrepancy(&arc, 500, &t).unwrap(), 0.0);
    }

    #[test]
    fn scan_maxima_match_direct_evaluation() {
        let t = table("surd:-1,1,5,2", 40);
        let cps = [50u64, 400];
        for m in 1..=4 {
            for ell in [0i128, 5, 91] {
                let cell = scan_cell(m, ell, &cps, &t).unwrap();
                let j = make_interval(m, &Lin::int([0, -ell]), &t).unwrap();
                let len = t.frame().to_f64(j.length());
                let mut c = 0u64;
                let mut best = [0f64; 2];
                for n in 1..=400u64 {
                    if contains(&j, &Lin::int([0, n as i128]), &t).unwrap() {
                        c += 1;
                    }
                    let d = (c as f64 - n as f64 * len).abs();
                    for (i, &cp) in cps.iter().enumerate() {
                        if n <= cp {
                            best[i] = best[i].max(d);
                        }
                    }
                }
                for i in 0..2 {
                    assert!((cell.maxima[i] - best[i]).abs() < 1e-9, "m={m} ℓ={ell}");
                }
            }
        }
    }
}
