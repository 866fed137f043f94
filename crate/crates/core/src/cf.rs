//! Convergent tables: partial quotients, convergents, signed remainders and
//! tail quantities of an irrational slope.
//!
//! Indices follow the usual conventions: `a_k` for `k ≥ 1`, `p_k, q_k` and
//! `D_k = q_k·α − p_k` for `k ≥ −1` with `p_{−1} = 1`, `q_{−1} = 0`.

use std::hash::{Hash, Hasher};

use num_bigint::BigInt;
use num_rational::BigRational;
use serde_json::{json, Value};

use crate::alpha::Irrational;
use crate::error::{Error, Result};
use crate::frame::{Frame, Lin};
use crate::real::{rat, Quad, RatInterval, Real};

/// Certified digits required past `m` to enclose `ζ_m` for inexact slopes;
/// the enclosure width shrinks like `q_{TAIL_HORIZON}^{-2}`.
pub const TAIL_HORIZON: usize = 8;

/// Convergents stop growing once `q` would exceed this bound.
pub const Q_LIMIT: i128 = 1 << 100;

#[derive(Clone, Debug)]
pub struct ConvergentTable {
    alpha: Irrational,
    frame: Frame,
    digits: Vec<u64>,
    // p[k + 1] = p_k, q[k + 1] = q_k for k = −1..=depth
    p: Vec<i128>,
    q: Vec<i128>,
    zetas: Option<Vec<Quad>>,
    key: u64,
}

/// Builds the table `a_1..a_depth`, `p_0..p_depth`, `q_0..q_depth`.
pub fn cf_digits(alpha: &Irrational, depth: usize) -> Result<ConvergentTable> {
    if depth == 0 {
        return Err(Error::PreconditionUnmet("depth must be at least 1".into()));
    }
    let (digits, zetas) = alpha.expand(depth)?;
    ConvergentTable::build(alpha.clone(), digits, zetas)
}

/// Smallest table whose deepest denominator exceeds `bound`, extended by
/// `extra` further levels.
pub fn cf_until(alpha: &Irrational, bound: i128, extra: usize) -> Result<ConvergentTable> {
    let mut depth = 8;
    loop {
        let probe = match alpha.horizon() {
            Some(h) => depth.min(h),
            None => depth,
        };
        let t = cf_digits(alpha, probe)?;
        if let Some(k) = (0..=t.depth()).find(|&k| t.q(k as isize) > bound) {
            return cf_digits(alpha, k + extra.max(1));
        }
        if probe < depth {
            return Err(Error::HorizonExceeded(format!(
                "q_k ≤ {bound} for every certified digit"
            )));
        }
        depth *= 2;
    }
}

impl ConvergentTable {
    fn build(alpha: Irrational, digits: Vec<u64>, zetas: Option<Vec<Quad>>) -> Result<Self> {
        let mut p = vec![1i128, 0];
        let mut q = vec![0i128, 1];
        for (k, &a) in digits.iter().enumerate() {
            let a = a as i128;
            let step = |v: &[i128]| {
                a.checked_mul(v[k + 1])
                    .and_then(|x| x.checked_add(v[k]))
                    .filter(|x| *x <= Q_LIMIT)
            };
            let (np, nq) = match (step(&p), step(&q)) {
                (Some(np), Some(nq)) => (np, nq),
                _ => return Err(Error::Overflow("convergent denominators")),
            };
            p.push(np);
            q.push(nq);
        }
        let frame = Frame::new(vec![alpha.value()]);
        let mut h = std::collections::hash_map::DefaultHasher::new();
        alpha.spec().hash(&mut h);
        let key = h.finish();
        Ok(ConvergentTable {
            key,
            alpha,
            frame,
            digits,
            p,
            q,
            zetas,
        })
    }

    /// Identifies the slope; tables of the same slope share a key whatever
    /// their depth.
    pub fn key(&self) -> u64 {
        self.key
    }

    pub fn alpha(&self) -> &Irrational {
        &self.alpha
    }

    /// The frame `[1, α]` in which every `D_k` is a linear form.
    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn depth(&self) -> usize {
        self.digits.len()
    }

    pub fn digits(&self) -> &[u64] {
        &self.digits
    }

    /// `a_k` for `1 ≤ k ≤ depth`.
    pub fn a(&self, k: usize) -> u64 {
        self.digits[k - 1]
    }

    pub fn try_a(&self, k: usize) -> Result<u64> {
        if k == 0 || k > self.depth() {
            return Err(Error::DepthInsufficient(format!(
                "a_{k} requested, table depth {}",
                self.depth()
            )));
        }
        Ok(self.a(k))
    }

    /// `p_k` for `−1 ≤ k ≤ depth`.
    pub fn p(&self, k: isize) -> i128 {
        self.p[(k + 1) as usize]
    }

    /// `q_k` for `−1 ≤ k ≤ depth`.
    pub fn q(&self, k: isize) -> i128 {
        self.q[(k + 1) as usize]
    }

    pub fn try_q(&self, k: isize) -> Result<i128> {
        if k < -1 || k > self.depth() as isize {
            return Err(Error::DepthInsufficient(format!(
                "q_{k} requested, table depth {}",
                self.depth()
            )));
        }
        Ok(self.q(k))
    }

    fn check(&self, k: isize) -> Result<()> {
        if k < -1 || k > self.depth() as isize {
            return Err(Error::IndexOutOfRange {
                index: k.max(0) as usize,
                depth: self.depth(),
            });
        }
        Ok(())
    }

    /// `D_k` as the linear form `q_k·α − p_k`.
    pub fn d_lin(&self, k: isize) -> Lin {
        Lin::int([-self.p(k), self.q(k)])
    }

    /// `D_k = q_k·α − p_k`, exact for surds.
    pub fn remainder(&self, k: isize) -> Result<Real> {
        self.check(k)?;
        self.frame.value(&self.d_lin(k))
    }

    /// `|D_k|` as a float; `D_k` has sign `(−1)^k`.
    pub fn abs_d_f64(&self, k: isize) -> f64 {
        self.frame.to_f64(&self.d_lin(k)).abs()
    }

    /// `(−1)^k`, the sign of `D_k`.
    pub fn d_sign(k: isize) -> i128 {
        if k.rem_euclid(2) == 0 {
            1
        } else {
            -1
        }
    }

    /// `ξ_k = q_{k−1}/q_k`.
    pub fn xi(&self, k: usize) -> Result<BigRational> {
        self.check(k as isize)?;
        Ok(BigRational::new(
            BigInt::from(self.q(k as isize - 1)),
            BigInt::from(self.q(k as isize)),
        ))
    }

    /// `ζ_m = [a_m; a_{m+1}, …]`.
    pub fn tail_value(&self, m: usize) -> Result<Real> {
        if m == 0 {
            return Err(Error::PreconditionUnmet("ζ_m needs m ≥ 1".into()));
        }
        if let Some(z) = &self.zetas {
            if let Some(z) = z.get(m - 1) {
                return Ok(Real::Exact(z.clone()));
            }
            return Ok(Real::Exact(self.alpha.expand(m)?.1.expect("surd")[m - 1].clone()));
        }
        let horizon = self.alpha.horizon().unwrap_or(0);
        if m + TAIL_HORIZON > horizon {
            return Err(Error::HorizonExceeded(format!(
                "ζ_{m} needs {} certified digits, {horizon} available",
                m + TAIL_HORIZON
            )));
        }
        let (digits, _) = self.alpha.expand(horizon)?;
        // [a_m; …, a_H, t] with t ∈ (1, ∞) lies between [a_m; …, a_H] and
        // [a_m; …, a_H + 1].
        let tail = &digits[m - 1..];
        let a = fold_cf(tail);
        let mut bumped = tail.to_vec();
        *bumped.last_mut().expect("non-empty tail") += 1;
        let c = fold_cf(&bumped);
        let (lo, hi) = if a < c { (a, c) } else { (c, a) };
        Ok(Real::Approx(RatInterval::new(lo, hi)))
    }

    /// `{ζ_m} = ζ_m − a_m`.
    pub fn frac_tail(&self, m: usize) -> Result<Real> {
        let z = self.tail_value(m)?;
        let a = self.try_a(m)?;
        Ok(z.sub(&Real::from(a)))
    }

    /// `(1 + {ζ_m}) / (q_m·(1 + {ζ_m}·ξ_m))`.
    pub fn special_length_formula(&self, m: usize) -> Result<Real> {
        let f = self.frac_tail(m)?;
        let xi = Real::from(self.xi(m)?);
        let num = Real::one().add(&f);
        let den = Real::one().add(&f.mul(&xi)).scale(self.q(m as isize));
        num.div(&den)
    }

    /// Checks `q_{k+1}·|D_k| ≤ 1`, the recurrences, alternation and
    /// coprimality over the whole table.
    pub fn verify(&self) -> Result<()> {
        let fail = |s: String| Err(Error::InvariantViolation(s));
        for k in 0..self.depth() {
            let ki = k as isize;
            let a = self.a(k + 1) as i128;
            if self.q(ki + 1) != a * self.q(ki) + self.q(ki - 1)
                || self.p(ki + 1) != a * self.p(ki) + self.p(ki - 1)
            {
                return fail(format!("recurrence at k = {k}"));
            }
            if num_integer::gcd(self.p(ki), self.q(ki)) != 1 {
                return fail(format!("gcd(p_{k}, q_{k}) ≠ 1"));
            }
            let d = self.d_lin(ki);
            let s = self.frame.sign(&d)?;
            let want = if k % 2 == 0 {
                std::cmp::Ordering::Greater
            } else {
                std::cmp::Ordering::Less
            };
            if s != want {
                return fail(format!("sign of D_{k}"));
            }
            // q_{k+1}·|D_k| ≤ 1
            let scaled = d.scale(self.q(ki + 1) * Self::d_sign(ki)).add_constant(-1);
            if self.frame.sign(&scaled)? == std::cmp::Ordering::Greater {
                return fail(format!("q_{}·|D_{k}| > 1", k + 1));
            }
        }
        Ok(())
    }

    /// JSON rendering with decimal strings at `digits` places.
    pub fn to_json(&self, digits: usize) -> Result<Value> {
        let mut rows = Vec::new();
        for k in 0..=self.depth() {
            let ki = k as isize;
            let d = self.remainder(ki)?;
            rows.push(json!({
                "k": k,
                "a": if k == 0 { Value::Null } else { json!(self.a(k)) },
                "p": self.p(ki).to_string(),
                "q": self.q(ki).to_string(),
                "D": number_json(&d, digits),
            }));
        }
        Ok(json!({
            "alpha": self.alpha.spec(),
            "alpha_value": number_json(&self.alpha.value(), digits),
            "depth": self.depth(),
            "rows": rows,
        }))
    }
}

fn fold_cf(digits: &[u64]) -> BigRational {
    let mut x = rat(*digits.last().expect("non-empty"));
    for &a in digits[..digits.len() - 1].iter().rev() {
        x = rat(a) + x.recip();
    }
    x
}

/// A number with its precision context: exact form when available, otherwise
/// the certified bit count of the enclosure.
pub fn number_json(x: &Real, digits: usize) -> Value {
    match x.exact_string() {
        Some(exact) => json!({
            "decimal": x.to_decimal(digits),
            "exact": exact,
            "precision": "exact",
        }),
        None => json!({
            "decimal": x.to_decimal(digits),
            "precision": { "bits": x.precision_bits() },
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::cmp::Ordering;

    fn table(spec: &str, depth: usize) -> ConvergentTable {
        cf_digits(&spec.parse().unwrap(), depth).unwrap()
    }

    #[test]
    fn golden_table() {
        let t = table("surd:-1,1,5,2", 5);
        assert_eq!(t.digits(), &[1, 1, 1, 1, 1]);
        let q: Vec<i128> = (0..=5).map(|k| t.q(k)).collect();
        assert_eq!(q, vec![1, 1, 2, 3, 5, 8]);
    }

    #[test]
    fn sqrt2_table() {
        let t = table("surd:-1,1,2,1", 4);
        assert_eq!(t.digits(), &[2, 2, 2, 2]);
        let pq: Vec<(i128, i128)> = (0..=4).map(|k| (t.p(k), t.q(k))).collect();
        assert_eq!(pq, vec![(0, 1), (1, 2), (2, 5), (5, 12), (12, 29)]);
        let d2 = t.remainder(2).unwrap();
        assert_eq!(d2.exact_string().unwrap(), "-7+5√2");
    }

    #[test]
    fn remainders_alternate_and_verify() {
        for s in ["surd:-1,1,5,2", "surd:-1,1,2,1", "surd:1,1,3,2", "cf-periodic:1,2;(3)"] {
            let t = table(s, 30);
            t.verify().unwrap();
            assert_eq!(t.remainder(0).unwrap().cmp_real(&t.alpha().value()).unwrap(), Ordering::Equal);
        }
    }

    #[test]
    fn tail_of_golden_and_sqrt2() {
        let g = table("surd:-1,1,5,2", 10);
        for m in 1..=10 {
            let f = g.frac_tail(m).unwrap();
            assert_eq!(f.cmp_real(&g.alpha().value()).unwrap(), Ordering::Equal);
        }
        let s = table("surd:-1,1,2,1", 6);
        let z = s.tail_value(3).unwrap();
        assert!((z.to_f64() - (1.0 + 2f64.sqrt())).abs() < 1e-15);
        assert_eq!(s.xi(2).unwrap(), crate::real::ratio(2, 5));
    }

    #[test]
    fn decimal_tail_needs_horizon() {
        let a: Irrational = "dec:0.718281828459045235360287471352@99".parse().unwrap();
        let t = cf_digits(&a, 5).unwrap();
        let h = a.horizon().unwrap();
        let z = t.tail_value(2).unwrap();
        assert!(!z.is_exact());
        assert!((z.to_f64() - 2.549_646_778_303_845).abs() < 1e-14);
        assert!(t.tail_value(h - TAIL_HORIZON).is_ok());
        assert!(matches!(t.tail_value(h - TAIL_HORIZON + 1), Err(Error::HorizonExceeded(_))));
    }

    #[test]
    fn cf_until_reaches_bound() {
        let a: Irrational = "surd:-1,1,5,2".parse().unwrap();
        let t = cf_until(&a, 1000, 2).unwrap();
        assert!(t.q(t.depth() as isize - 2) > 1000);
    }
}
