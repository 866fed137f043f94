//! Codimension-one cut-and-project nets
//! `Y′ = {n ∈ ℤ^{k−1} : α_k + Σ n_i·α_i ∈ I mod 1}`, the bounded-displacement
//! map to a lattice, density defects and window truncation.
//!
//! One coordinate (the designated one, default `n_1`) carries an irrational
//! slope whose convergent table defines the window. Lines parallel to that
//! coordinate are called fibers; on a fiber the solutions are the return times
//! of `n·α_d` to a translate of the window.

use std::cmp::Ordering;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::alpha::Irrational;
use crate::cf::{cf_until, ConvergentTable};
use crate::error::{Error, Result};
use crate::frame::{Frame, Lin};
use crate::intervals::{make_interval, parse_point, Arc, SpecialInterval, WindowUnion};
use crate::real::Real;

/// Window description in a net config file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum WindowSpec {
    /// Explicit special intervals `J(m, γ)`.
    Intervals {
        intervals: Vec<IntervalSpec>,
        #[serde(default = "one")]
        bound: usize,
    },
    /// One interval per level, placed end to end from `J(m_1, 0)`.
    Adjacent {
        adjacent: Vec<usize>,
        #[serde(default = "one")]
        bound: usize,
    },
}

fn one() -> usize {
    1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntervalSpec {
    pub m: usize,
    #[serde(default = "zero_point")]
    pub gamma: String,
}

fn zero_point() -> String {
    "0".into()
}

fn default_designated() -> usize {
    1
}

/// A net as written in a config file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NetConfig {
    /// `α_1 … α_{k−1}`: alpha specs, or rationals and decimals.
    pub slopes: Vec<String>,
    /// `α_k`: like a slope, or `orbit:ℓ` / `lin:u,v[/den]` over `[1, α_d]`.
    #[serde(default = "zero_point")]
    pub shift: String,
    /// 1-based index of the irrational slope that carries the window.
    #[serde(default = "default_designated")]
    pub designated: usize,
    pub window: WindowSpec,
    /// Inclusive coordinate ranges, one per slope.
    #[serde(default, rename = "box")]
    pub bounds: Option<Vec<(i128, i128)>>,
}

/// Integer box `Π [lo_i, hi_i]`.
pub type Bounds = [(i128, i128)];

/// A parsed, ready-to-evaluate net.
#[derive(Clone, Debug)]
pub struct Net {
    table: ConvergentTable,
    frame: Frame,
    /// Frame index of each coordinate's slope.
    slot: Vec<usize>,
    shift_slot: usize,
    designated: usize,
    window: WindowUnion,
    arcs: Vec<FiberArc>,
}

/// A window interval embedded in the net frame.
#[derive(Clone, Debug)]
struct FiberArc {
    left: Lin,
    length: Lin,
    length_f: f64,
    short: i128,
    long: i128,
}

/// An alpha spec, a constant, or (given the designated slope) a point
/// `orbit:ℓ` / `lin:u,v[/den]` over `[1, α_d]`.
fn parse_real(s: &str, designated: Option<&Real>) -> Result<(Real, Option<Irrational>)> {
    if s.contains(':') && !s.starts_with("lin:") && !s.starts_with("orbit:") {
        let a: Irrational = s.parse()?;
        return Ok((a.value(), Some(a)));
    }
    let p = parse_point(s)?;
    let c = |i: usize| Real::from(num_rational::BigRational::new(p.coeff(i).into(), p.den().into()));
    match designated {
        _ if p.dim() <= 1 => Ok((c(0), None)),
        Some(a) => Ok((c(0).add(&c(1).mul(a)), None)),
        None => Err(Error::Config(format!("slope `{s}` must be a constant or alpha spec"))),
    }
}

impl Net {
    pub fn new(cfg: &NetConfig) -> Result<Self> {
        let k1 = cfg.slopes.len();
        if k1 == 0 {
            return Err(Error::Config("at least one slope is required".into()));
        }
        if cfg.designated == 0 || cfg.designated > k1 {
            return Err(Error::Config(format!("designated index {} out of range", cfg.designated)));
        }
        let d = cfg.designated - 1;
        let mut values = Vec::with_capacity(k1);
        let mut alpha = None;
        for (i, s) in cfg.slopes.iter().enumerate() {
            let (v, irr) = parse_real(s, None)?;
            if i == d {
                alpha = Some(irr.ok_or_else(|| {
                    Error::Config("the designated slope must be an irrational alpha spec".into())
                })?);
            }
            values.push(v);
        }
        let alpha = alpha.expect("designated slope parsed");
        let (shift, _) = parse_real(&cfg.shift, Some(&alpha.value()))?;

        let max_level = match &cfg.window {
            WindowSpec::Intervals { intervals, .. } => intervals.iter().map(|i| i.m).max(),
            WindowSpec::Adjacent { adjacent, .. } => adjacent.iter().copied().max(),
        }
        .ok_or_else(|| Error::Config("window lists no intervals".into()))?;
        let table = table_for(&alpha, max_level)?;

        let window = match &cfg.window {
            WindowSpec::Intervals { intervals, bound } => {
                let js = intervals
                    .iter()
                    .map(|i| make_interval(i.m, &parse_point(&i.gamma)?, &table))
                    .collect::<Result<Vec<_>>>()?;
                WindowUnion::new(js, *bound, &table)?
            }
            WindowSpec::Adjacent { adjacent, bound } => {
                if adjacent.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(Error::Config("levels must be strictly increasing".into()));
                }
                WindowUnion::adjacent(adjacent, *bound, &table)?
            }
        };
        Net::assemble(table, values, shift, d, window)
    }

    /// Builds a net from already constructed parts. `slopes[designated]` must
    /// be the slope of `table`.
    pub fn from_parts(
        table: ConvergentTable,
        slopes: Vec<Real>,
        shift: Real,
        designated: usize,
        window: WindowUnion,
    ) -> Result<Self> {
        Net::assemble(table, slopes, shift, designated, window)
    }

    fn assemble(
        table: ConvergentTable,
        slopes: Vec<Real>,
        shift: Real,
        d: usize,
        window: WindowUnion,
    ) -> Result<Self> {
        let k1 = slopes.len();
        // frame: [1, α_d, other slopes in order, shift]
        let mut gens = vec![table.alpha().value()];
        let mut slot = vec![0; k1];
        slot[d] = 1;
        let mut next = 2;
        for (i, v) in slopes.iter().enumerate() {
            if i != d {
                gens.push(v.clone());
                slot[i] = next;
                next += 1;
            }
        }
        gens.push(shift);
        let shift_slot = next;
        let frame = Frame::new(gens);
        let dim = frame.dim();
        let arcs = window
            .intervals()
            .iter()
            .map(|j| {
                let left = j.left().embed(&[1], dim);
                let length = j.length().embed(&[1], dim);
                let m = j.level() as isize;
                let (a, b) = (table.q(m - 1), table.q(m));
                FiberArc {
                    length_f: frame.to_f64(&length),
                    left,
                    length,
                    short: a.min(b),
                    long: a.max(b),
                }
            })
            .collect();
        Ok(Net {
            table,
            frame,
            slot,
            shift_slot,
            designated: d,
            window,
            arcs,
        })
    }

    pub fn table(&self) -> &ConvergentTable {
        &self.table
    }

    pub fn window(&self) -> &WindowUnion {
        &self.window
    }

    /// `k − 1`, the number of integer coordinates.
    pub fn rank(&self) -> usize {
        self.slot.len()
    }

    pub fn measure(&self) -> f64 {
        self.frame.to_f64(&self.window.measure().embed(&[1], self.frame.dim()))
    }

    /// `α_k + Σ n_i·α_i` as a form in the net frame.
    pub fn position(&self, n: &[i128]) -> Lin {
        let mut c = vec![0i128; self.frame.dim()];
        for (i, &v) in n.iter().enumerate() {
            c[self.slot[i]] += v;
        }
        c[self.shift_slot] += 1;
        Lin::int(c)
    }

    /// Direct membership test.
    pub fn contains(&self, n: &[i128]) -> Result<bool> {
        let x = self.position(n);
        for a in &self.arcs {
            let y = x.sub(&a.left);
            let z = y.add_constant(-self.frame.floor(&y)?);
            if self.frame.cmp(&z, &a.length)? == Ordering::Less {
                return Ok(true);
            }
        }
        Ok(false)
    }

    fn fiber(&self, transverse: &[i128], arc: usize) -> Fiber<'_> {
        let mut n = Vec::with_capacity(self.rank());
        let mut it = transverse.iter();
        for i in 0..self.rank() {
            n.push(if i == self.designated { 0 } else { *it.next().expect("transverse arity") });
        }
        let a = &self.arcs[arc];
        let base = self.position(&n).sub(&a.left);
        let base_f = self.frame.to_f64(&base);
        let scale = base.coeffs().iter().map(|c| c.unsigned_abs() as f64).sum::<f64>() + 2.0;
        Fiber {
            net: self,
            arc: a,
            base,
            base_f,
            alpha_f: self.frame.to_f64(&Lin::int([0, 1])),
            scale,
        }
    }

    fn check_transverse(&self, transverse: &[i128]) -> Result<()> {
        if transverse.len() + 1 != self.rank() {
            return Err(Error::Config(format!(
                "expected {} transverse coordinates",
                self.rank() - 1
            )));
        }
        Ok(())
    }

    /// Solutions on one fiber inside `[lo, hi]`, in increasing order.
    pub fn fiber_points(&self, transverse: &[i128], lo: i128, hi: i128) -> Result<Vec<i128>> {
        self.check_transverse(transverse)?;
        let mut out = Vec::new();
        for arc in 0..self.arcs.len() {
            let f = self.fiber(transverse, arc);
            f.for_each_in(lo, hi, |s| out.push(s))?;
        }
        out.sort_unstable();
        Ok(out)
    }

    /// Number of solutions on one fiber inside `[lo, hi]`.
    pub fn fiber_count(&self, transverse: &[i128], lo: i128, hi: i128) -> Result<u64> {
        let mut c = 0u64;
        for arc in 0..self.arcs.len() {
            self.fiber(transverse, arc).for_each_in(lo, hi, |_| c += 1)?;
        }
        Ok(c)
    }

    /// `(i, ℓ_i)` for the solutions in `[lo, hi]`, indexed so that
    /// `ℓ_{−1} < 0 ≤ ℓ_0`. Requires a single special interval.
    pub fn fiber_indices(&self, transverse: &[i128], lo: i128, hi: i128) -> Result<Vec<(i64, i128)>> {
        self.check_transverse(transverse)?;
        let mut out = Vec::new();
        self.indexed_walk(transverse, lo, hi, |i, s| out.push((i, s)))?;
        Ok(out)
    }

    fn indexed_walk(
        &self,
        transverse: &[i128],
        lo: i128,
        hi: i128,
        mut visit: impl FnMut(i64, i128),
    ) -> Result<()> {
        if !self.window.is_single() {
            return Err(Error::WindowNotSpecial);
        }
        let f = self.fiber(transverse, 0);
        let l0 = f.first_at_or_after(0)?;
        if lo < 0 {
            let mut below = Vec::new();
            let mut s = l0;
            let mut i = 0i64;
            while s >= lo {
                s = f.prev(s)?;
                i -= 1;
                if s >= lo && s <= hi {
                    below.push((i, s));
                }
            }
            for &(i, s) in below.iter().rev() {
                visit(i, s);
            }
        }
        let mut s = l0;
        let mut i = 0i64;
        while s <= hi {
            if s >= lo {
                visit(i, s);
            }
            s = f.next(s)?;
            i += 1;
        }
        Ok(())
    }

    /// All net points in the box, in lexicographic order.
    pub fn generate(&self, bounds: &Bounds) -> Result<Vec<Vec<i128>>> {
        self.check_bounds(bounds)?;
        let d = self.designated;
        let fibers = transverse_vectors(bounds, d);
        let rows: Vec<Vec<Vec<i128>>> = fibers
            .par_iter()
            .map(|t| {
                let pts = self.fiber_points(t, bounds[d].0, bounds[d].1)?;
                Ok(pts.into_iter().map(|s| insert(t, d, s)).collect())
            })
            .collect::<Result<_>>()?;
        let mut all: Vec<Vec<i128>> = rows.into_iter().flatten().collect();
        all.sort_unstable();
        Ok(all)
    }

    /// Number of net points in the box.
    pub fn count(&self, bounds: &Bounds) -> Result<u64> {
        Ok(self.fiber_counts(bounds)?.iter().sum())
    }

    /// Per-fiber counts, in the order of [`transverse_vectors`].
    pub fn fiber_counts(&self, bounds: &Bounds) -> Result<Vec<u64>> {
        self.check_bounds(bounds)?;
        let d = self.designated;
        transverse_vectors(bounds, d)
            .par_iter()
            .map(|t| self.fiber_count(t, bounds[d].0, bounds[d].1))
            .collect()
    }

    fn check_bounds(&self, bounds: &Bounds) -> Result<()> {
        if bounds.len() != self.rank() {
            return Err(Error::Config(format!(
                "box has {} ranges, net has {} coordinates",
                bounds.len(),
                self.rank()
            )));
        }
        if bounds.iter().any(|&(a, b)| a > b) {
            return Err(Error::Config("empty box range".into()));
        }
        Ok(())
    }

    /// The map `(ℓ_i, t) ↦ (i/|J|, t)` on the box, with its displacement.
    pub fn bd_map(&self, bounds: &Bounds) -> Result<BdReport> {
        self.check_bounds(bounds)?;
        if !self.window.is_single() {
            return Err(Error::WindowNotSpecial);
        }
        let d = self.designated;
        let len = self.arcs[0].length_f;
        let fibers = transverse_vectors(bounds, d);
        let per_fiber: Vec<FiberStats> = fibers
            .par_iter()
            .map(|t| {
                let mut st = FiberStats::default();
                let mut last: Option<i64> = None;
                self.indexed_walk(t, bounds[d].0, bounds[d].1, |i, s| {
                    let disp = (s as f64 - i as f64 / len).abs();
                    if disp > st.sup {
                        st.sup = disp;
                        st.at = Some((i, s));
                    }
                    if let Some(p) = last {
                        st.injective &= i > p;
                    }
                    last = Some(i);
                    st.points += 1;
                })?;
                Ok(st)
            })
            .collect::<Result<_>>()?;
        let mut sup = 0f64;
        let mut worst = None;
        let mut points = 0u64;
        let mut injective = true;
        for (t, st) in fibers.iter().zip(&per_fiber) {
            points += st.points;
            injective &= st.injective;
            if st.sup > sup {
                sup = st.sup;
                worst = st.at.map(|(i, s)| WorstPoint {
                    point: insert(t, d, s),
                    index: i,
                });
            }
        }
        let m = self.window.intervals()[0].level();
        Ok(BdReport {
            bounds: bounds.to_vec(),
            level: m,
            length: len,
            target_lattice: format!(
                "{}·ℤ{}",
                1.0 / len,
                " × ℤ".repeat(self.rank() - 1)
            ),
            points,
            sup_displacement: sup,
            ratio: sup * len,
            injective,
            worst,
        })
    }

    /// Relative count defect `|#(Y ∩ B)/(λ·ρ^{k−1}) − 1|` maximized over
    /// `samples` boxes of side `ρ` at seeded offsets in `[−2^20, 2^20)`.
    pub fn density_defect(&self, rho: i128, lambda: f64, samples: usize, seed: u64) -> Result<DensityDefect> {
        if rho < 1 || !(lambda > 0.0) {
            return Err(Error::PreconditionUnmet("ρ ≥ 1 and λ > 0 required".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let offsets: Vec<Vec<i128>> = (0..samples)
            .map(|_| (0..self.rank()).map(|_| rng.gen_range(-(1i128 << 20)..(1i128 << 20))).collect())
            .collect();
        let vol = (rho as f64).powi(self.rank() as i32);
        let defects: Vec<f64> = offsets
            .iter()
            .map(|o| {
                let b: Vec<(i128, i128)> = o.iter().map(|&x| (x, x + rho - 1)).collect();
                let c = self.count(&b)? as f64;
                Ok((c / (lambda * vol) - 1.0).abs())
            })
            .collect::<Result<_>>()?;
        Ok(DensityDefect {
            rho,
            lambda,
            samples,
            seed,
            max_defect: defects.iter().copied().fold(0.0, f64::max),
            estimate: "sampled lower bound of the supremum over boxes".into(),
        })
    }

    /// Partial sums `Σ_{t ≤ T} D(2^t)` for `T = 1..=t_max`.
    pub fn bk_partial_sums(&self, lambda: f64, t_max: u32, samples: usize, seed: u64) -> Result<Vec<BkRow>> {
        let mut sum = 0.0;
        let mut out = Vec::new();
        for t in 1..=t_max {
            let d = self.density_defect(1i128 << t, lambda, samples, seed.wrapping_add(t as u64))?;
            sum += d.max_defect;
            out.push(BkRow {
                t,
                defect: d.max_defect,
                partial_sum: sum,
            });
        }
        Ok(out)
    }

    /// Count in `[0, 2^K)^{k−1}` against `2^{(k−1)K}·|I|`.
    pub fn cube_count(&self, big_k: u32) -> Result<CubeCount> {
        let side = 1i128 << big_k;
        let b: Vec<(i128, i128)> = vec![(0, side - 1); self.rank()];
        let counts = self.fiber_counts(&b)?;
        let mu = self.measure();
        let count: u64 = counts.iter().sum();
        let expected = (side as f64).powi(self.rank() as i32) * mu;
        let norm = big_k as f64 * (side as f64).powi(self.rank() as i32 - 1);
        let fiber_abs: f64 = counts
            .iter()
            .map(|&c| (c as f64 - side as f64 * mu).abs())
            .sum();
        Ok(CubeCount {
            k: big_k,
            count,
            expected,
            ratio: (count as f64 - expected).abs() / norm,
            fiber_abs_ratio: fiber_abs / norm,
        })
    }

    /// Minimum and maximum gap between consecutive points on the fibers of
    /// the box: the separation and twice the covering radius along fibers.
    pub fn fiber_gap_range(&self, bounds: &Bounds) -> Result<(i128, i128)> {
        self.check_bounds(bounds)?;
        let d = self.designated;
        let mut lo = i128::MAX;
        let mut hi = 0;
        for t in transverse_vectors(bounds, d) {
            let pts = self.fiber_points(&t, bounds[d].0, bounds[d].1)?;
            for w in pts.windows(2) {
                lo = lo.min(w[1] - w[0]);
                hi = hi.max(w[1] - w[0]);
            }
        }
        Ok((lo, hi))
    }
}

fn table_for(alpha: &Irrational, max_level: usize) -> Result<ConvergentTable> {
    // deep enough for q_K lifts and real expansions at the deepest level
    let t = crate::cf::cf_digits(alpha, max_level + 4)?;
    let bound = t.q(max_level as isize + 2).saturating_mul(1 << 24);
    cf_until(alpha, bound, 4).or_else(|_| crate::cf::cf_digits(alpha, max_level + 4))
}

/// The solutions `s` of `s·α_d + base ∈ [0, L)` mod 1 on one fiber.
struct Fiber<'a> {
    net: &'a Net,
    arc: &'a FiberArc,
    base: Lin,
    base_f: f64,
    alpha_f: f64,
    scale: f64,
}

impl Fiber<'_> {
    fn hit(&self, s: i128) -> Result<bool> {
        let x = self.base_f + s as f64 * self.alpha_f;
        let y = x - x.floor();
        let margin = (self.scale + (s.unsigned_abs() as f64)) * 16.0 * f64::EPSILON + 1e-13;
        let len = self.arc.length_f;
        if y > margin && y < len - margin {
            return Ok(true);
        }
        if y > len + margin && y < 1.0 - margin {
            return Ok(false);
        }
        let frame = &self.net.frame;
        let z = self.base.add(&Lin::int([0, s]));
        let z = z.add_constant(-frame.floor(&z)?);
        Ok(frame.cmp(&z, &self.arc.length)? == Ordering::Less)
    }

    fn first_at_or_after(&self, lo: i128) -> Result<i128> {
        for s in lo..=lo + self.arc.long + self.arc.short {
            if self.hit(s)? {
                return Ok(s);
            }
        }
        Err(Error::InvariantViolation(format!(
            "no window return within q_m + q_(m−1) of {lo}"
        )))
    }

    fn step(&self, s: i128, dir: i128) -> Result<i128> {
        for g in [self.arc.short, self.arc.long] {
            if self.hit(s + dir * g)? {
                return Ok(s + dir * g);
            }
        }
        Err(Error::InvariantViolation(format!(
            "gap from {s} is neither {} nor {}",
            self.arc.short, self.arc.long
        )))
    }

    fn next(&self, s: i128) -> Result<i128> {
        self.step(s, 1)
    }

    fn prev(&self, s: i128) -> Result<i128> {
        self.step(s, -1)
    }

    fn for_each_in(&self, lo: i128, hi: i128, mut f: impl FnMut(i128)) -> Result<()> {
        let mut s = self.first_at_or_after(lo)?;
        while s <= hi {
            f(s);
            s = self.next(s)?;
        }
        Ok(())
    }
}

/// Every integer vector of the coordinates other than `skip`, lexicographic.
pub fn transverse_vectors(bounds: &Bounds, skip: usize) -> Vec<Vec<i128>> {
    let ranges: Vec<(i128, i128)> = bounds
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != skip)
        .map(|(_, &r)| r)
        .collect();
    let mut out = vec![Vec::new()];
    for &(a, b) in &ranges {
        out = out
            .into_iter()
            .flat_map(|v| {
                (a..=b).map(move |x| {
                    let mut w = v.clone();
                    w.push(x);
                    w
                })
            })
            .collect();
    }
    out
}

fn insert(t: &[i128], d: usize, s: i128) -> Vec<i128> {
    let mut v = Vec::with_capacity(t.len() + 1);
    v.extend_from_slice(&t[..d]);
    v.push(s);
    v.extend_from_slice(&t[d..]);
    v
}

#[derive(Clone, Debug)]
struct FiberStats {
    sup: f64,
    at: Option<(i64, i128)>,
    points: u64,
    injective: bool,
}

impl Default for FiberStats {
    fn default() -> Self {
        FiberStats {
            sup: 0.0,
            at: None,
            points: 0,
            injective: true,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct WorstPoint {
    pub point: Vec<i128>,
    pub index: i64,
}

#[derive(Clone, Debug, Serialize)]
pub struct BdReport {
    pub bounds: Vec<(i128, i128)>,
    pub level: usize,
    pub length: f64,
    pub target_lattice: String,
    pub points: u64,
    pub sup_displacement: f64,
    /// `sup_displacement · |J|`.
    pub ratio: f64,
    pub injective: bool,
    pub worst: Option<WorstPoint>,
}

#[derive(Clone, Debug, Serialize)]
pub struct DensityDefect {
    pub rho: i128,
    pub lambda: f64,
    pub samples: usize,
    pub seed: u64,
    pub max_defect: f64,
    pub estimate: String,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct BkRow {
    pub t: u32,
    pub defect: f64,
    pub partial_sum: f64,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct CubeCount {
    pub k: u32,
    pub count: u64,
    pub expected: f64,
    /// `|count − expected| / (K·2^{(k−2)K})`.
    pub ratio: f64,
    /// `Σ_fibers |count − 2^K·|I|| / (K·2^{(k−2)K})`.
    pub fiber_abs_ratio: f64,
}

/// A finite truncation of a multi-level window with a bound on what the
/// truncation leaves out.
#[derive(Clone, Debug)]
pub struct Truncation {
    pub window: WindowUnion,
    /// Exact measure of the listed intervals beyond the truncation level.
    pub omitted: f64,
    /// `4C·|J(m_ℓ + 1, 0)|`, which bounds the measure of any intervals at
    /// levels above `m_ℓ`, listed or not.
    pub tail_bound: f64,
}

/// Keeps the intervals of `window` at levels `≤ levels[tail_index]`.
///
/// The bound uses `|D_{j+2}| ≤ |D_j|/2`, so at most `C` intervals at each
/// level `m > m_ℓ` have total length at most
/// `2C·(|D_{m_ℓ}| + |D_{m_ℓ+1}|) + 2C·(|D_{m_ℓ+1}| + |D_{m_ℓ+2}|)`.
pub fn window_truncate(
    intervals: Vec<SpecialInterval>,
    bound: usize,
    tail_index: usize,
    table: &ConvergentTable,
) -> Result<Truncation> {
    let full = WindowUnion::new(intervals, bound, table)?;
    let mut levels: Vec<usize> = full.intervals().iter().map(|j| j.level()).collect();
    levels.sort_unstable();
    levels.dedup();
    let cut = *levels
        .get(tail_index)
        .ok_or_else(|| Error::Config(format!("tail index {tail_index} beyond {} levels", levels.len())))?;
    let (keep, drop): (Vec<_>, Vec<_>) = full.intervals().iter().cloned().partition(|j| j.level() <= cut);
    let frame = table.frame();
    let omitted = drop.iter().map(|j| frame.to_f64(j.length())).sum::<f64>();
    let next = make_interval(cut + 1, &Lin::zero(), table)?;
    let tail_bound = 4.0 * bound as f64 * frame.to_f64(next.length());
    if omitted > tail_bound {
        return Err(Error::InvariantViolation(format!(
            "omitted measure {omitted} exceeds the tail bound {tail_bound}"
        )));
    }
    Ok(Truncation {
        window: WindowUnion::new(keep, bound, table)?,
        omitted,
        tail_bound,
    })
}

/// Arcs of a window, for callers that want raw intervals.
pub fn window_arcs(w: &WindowUnion) -> Vec<Arc> {
    w.intervals().iter().map(|j| j.arc().clone()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(slopes: &[&str], window: WindowSpec) -> NetConfig {
        NetConfig {
            slopes: slopes.iter().map(|s| s.to_string()).collect(),
            shift: "0".into(),
            designated: 1,
            window,
            bounds: None,
        }
    }

    fn single(m: usize) -> WindowSpec {
        WindowSpec::Intervals {
            intervals: vec![IntervalSpec {
                m,
                gamma: "0".into(),
            }],
            bound: 1,
        }
    }

    #[test]
    fn one_dimensional_net_is_a2() {
        let net = Net::new(&config(&["surd:-1,1,5,2"], single(2))).unwrap();
        let pts: Vec<i128> = net.generate(&[(0, 10)]).unwrap().into_iter().map(|v| v[0]).collect();
        assert_eq!(pts, vec![0, 2, 3, 5, 7, 8, 10]);
    }

    #[test]
    fn fibers_match_direct_membership() {
        let net = Net::new(&config(&["surd:-1,1,5,2", "surd:-1,1,2,1"], single(2))).unwrap();
        let pts = net.generate(&[(-30, 40), (-3, 5)]).unwrap();
        let mut direct = Vec::new();
        for a in -30..=40 {
            for b in -3..=5 {
                if net.contains(&[a, b]).unwrap() {
                    direct.push(vec![a, b]);
                }
            }
        }
        assert_eq!(pts, direct);
    }

    #[test]
    fn fiber_indexing() {
        let net = Net::new(&config(&["surd:-1,1,5,2", "surd:-1,1,2,1"], single(3))).unwrap();
        let idx = net.fiber_indices(&[0], -20, 30).unwrap();
        let zero = idx.iter().position(|&(i, _)| i == 0).unwrap();
        assert_eq!(idx[zero].1, 0);
        assert!(idx[zero - 1].1 < 0);
        for w in idx.windows(2) {
            assert_eq!(w[1].0, w[0].0 + 1);
        }
        let idx1 = net.fiber_indices(&[1], 0, 60).unwrap();
        let direct: Vec<i128> = (0..=60).filter(|&n| net.contains(&[n, 1]).unwrap()).collect();
        assert_eq!(idx1.iter().map(|p| p.1).collect::<Vec<_>>(), direct);
        assert_eq!(idx1[0].0, 0);
    }

    #[test]
    fn bd_map_on_small_box() {
        let net = Net::new(&config(&["surd:-1,1,5,2"], single(2))).unwrap();
        let r = net.bd_map(&[(0, 1000)]).unwrap();
        assert!(r.injective);
        assert!(r.ratio < 2.0);
        assert_eq!(r.points, 619);
    }

    #[test]
    fn multi_level_window_rejects_bd_map() {
        let w = WindowSpec::Adjacent {
            adjacent: vec![2, 4, 6],
            bound: 1,
        };
        let net = Net::new(&config(&["surd:-1,1,5,2", "surd:-1,1,2,1"], w)).unwrap();
        assert!((net.measure() - 0.944_271_909_999_158_8).abs() < 1e-12);
        assert_eq!(net.bd_map(&[(0, 10), (0, 2)]).unwrap_err(), Error::WindowNotSpecial);
        let direct = (0..64)
            .flat_map(|a| (0..8).map(move |b| [a, b]))
            .filter(|p| net.contains(p).unwrap())
            .count() as u64;
        assert_eq!(net.count(&[(0, 63), (0, 7)]).unwrap(), direct);
    }

    #[test]
    fn mismatched_density_gives_large_defect() {
        let net = Net::new(&config(&["surd:-1,1,5,2"], single(2))).unwrap();
        let lambda = net.measure();
        let good = net.density_defect(1024, lambda, 8, 7).unwrap();
        let bad = net.density_defect(1024, 2.0 * lambda, 8, 7).unwrap();
        assert!(good.max_defect < 0.01);
        assert!((bad.max_defect - 0.5).abs() < 0.01);
    }

    #[test]
    fn truncation_bounds_tail() {
        let t = crate::cf::cf_digits(&"surd:-1,1,5,2".parse().unwrap(), 20).unwrap();
        let w = WindowUnion::adjacent(&[2, 4, 6], 1, &t).unwrap();
        let tr = window_truncate(w.intervals().to_vec(), 1, 0, &t).unwrap();
        assert_eq!(tr.window.intervals().len(), 1);
        assert!((tr.omitted - (0.236_067_977_499_789_7 + 0.090_169_943_749_474_2)).abs() < 1e-12);
        let single = window_truncate(w.intervals()[..1].to_vec(), 1, 0, &t).unwrap();
        assert_eq!(single.omitted, 0.0);
    }
}
