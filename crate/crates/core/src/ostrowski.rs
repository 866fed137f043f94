//! Ostrowski numeration of integers (base `q_k`) and of reals (base `D_k`).
//!
//! Digit vectors are stored least significant first: entry `k` is the digit
//! `c_{k+1}` multiplying `q_k` (or `b_{k+1}` multiplying `D_k`).

use std::cmp::Ordering;

use serde::Serialize;

use crate::cf::ConvergentTable;
use crate::error::{Error, Result};
use crate::frame::{Frame, Lin};
use crate::real::Real;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct OstrowskiInt {
    digits: Vec<u64>,
    #[serde(skip)]
    key: u64,
}

impl OstrowskiInt {
    /// Wraps and validates a digit vector.
    pub fn new(digits: Vec<u64>, table: &ConvergentTable) -> Result<Self> {
        let mut digits = digits;
        while digits.len() > 1 && digits.last() == Some(&0) {
            digits.pop();
        }
        if digits.is_empty() {
            digits.push(0);
        }
        validate(&digits, table)?;
        Ok(OstrowskiInt {
            digits,
            key: table.key(),
        })
    }

    pub fn digits(&self) -> &[u64] {
        &self.digits
    }

    /// `c_{k+1}`, zero past the top digit.
    pub fn digit(&self, k: usize) -> u64 {
        self.digits.get(k).copied().unwrap_or(0)
    }

    /// The index `M` of the leading digit `c_{M+1}` (zero for `n = 0`).
    pub fn top(&self) -> usize {
        self.digits.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.digits == [0]
    }
}

/// Checks `c_1 < a_1`, `c_{k+1} ≤ a_{k+1}` and `c_{k+1} = a_{k+1} ⇒ c_k = 0`.
pub fn validate(digits: &[u64], table: &ConvergentTable) -> Result<()> {
    if digits.len() > table.depth() {
        return Err(Error::DepthInsufficient(format!(
            "{} digits need a_{}",
            digits.len(),
            digits.len()
        )));
    }
    for (k, &c) in digits.iter().enumerate() {
        let a = table.a(k + 1);
        if k == 0 && c >= a {
            return Err(Error::InvalidDigits(format!("c_1 = {c} ≥ a_1 = {a}")));
        }
        if c > a {
            return Err(Error::InvalidDigits(format!(
                "c_{} = {c} > a_{} = {a}",
                k + 1,
                k + 1
            )));
        }
        if k >= 1 && c == a && digits[k - 1] != 0 {
            return Err(Error::InvalidDigits(format!(
                "c_{} = a_{} but c_{} ≠ 0",
                k + 1,
                k + 1,
                k
            )));
        }
    }
    Ok(())
}

/// Greedy expansion `n = Σ c_{k+1}·q_k`.
pub fn encode_int(n: i128, table: &ConvergentTable) -> Result<OstrowskiInt> {
    if n < 0 {
        return Err(Error::PreconditionUnmet("n must be non-negative".into()));
    }
    if table.q(table.depth() as isize) <= n {
        return Err(Error::DepthInsufficient(format!(
            "q_{} ≤ {n}",
            table.depth()
        )));
    }
    Ok(OstrowskiInt {
        digits: greedy_digits(n, table),
        key: table.key(),
    })
}

/// Greedy digits of `0 ≤ n < q_depth`, without validation.
pub(crate) fn greedy_digits(n: i128, table: &ConvergentTable) -> Vec<u64> {
    if n == 0 {
        return vec![0];
    }
    let mut top = 0;
    while (top as usize) < table.depth() && table.q(top + 1) <= n {
        top += 1;
    }
    let mut digits = vec![0u64; top as usize + 1];
    let mut rem = n;
    for k in (0..=top).rev() {
        let q = table.q(k);
        digits[k as usize] = (rem / q) as u64;
        rem %= q;
    }
    digits
}

/// `Σ c_{k+1}·q_k` after validating the digits.
pub fn decode_int(d: &OstrowskiInt, table: &ConvergentTable) -> Result<i128> {
    if d.key != table.key() {
        return Err(Error::TableMismatch);
    }
    validate(&d.digits, table)?;
    decode_digits(&d.digits, table)
}

pub(crate) fn decode_digits(digits: &[u64], table: &ConvergentTable) -> Result<i128> {
    let mut n: i128 = 0;
    for (k, &c) in digits.iter().enumerate() {
        n = (c as i128)
            .checked_mul(table.q(k as isize))
            .and_then(|t| t.checked_add(n))
            .ok_or(Error::Overflow("Ostrowski decode"))?;
    }
    Ok(n)
}

/// Integer order, read off the digits from the most significant end.
pub fn lex_compare(x: &OstrowskiInt, y: &OstrowskiInt) -> Result<Ordering> {
    if x.key != y.key {
        return Err(Error::TableMismatch);
    }
    let len = x.digits.len().max(y.digits.len());
    for k in (0..len).rev() {
        match x.digit(k).cmp(&y.digit(k)) {
            Ordering::Equal => continue,
            o => return Ok(o),
        }
    }
    Ok(Ordering::Equal)
}

/// Truncated expansion `β ≈ Σ_{k<T} b_{k+1}·D_k`.
#[derive(Clone, Debug)]
pub struct OstrowskiReal {
    digits: Vec<u64>,
    beta: Real,
    tail_bound: Real,
    key: u64,
}

impl OstrowskiReal {
    pub fn digits(&self) -> &[u64] {
        &self.digits
    }

    pub fn depth(&self) -> usize {
        self.digits.len()
    }

    pub fn beta(&self) -> &Real {
        &self.beta
    }

    /// `|D_{T−1}| + |D_T|`.
    pub fn tail_bound(&self) -> &Real {
        &self.tail_bound
    }

    /// The integer with the same leading `t` digits, `Σ_{k<t} b_{k+1}·q_k`.
    pub fn truncated_integer(&self, t: usize, table: &ConvergentTable) -> Result<i128> {
        decode_digits(&self.digits[..t.min(self.digits.len())], table)
    }
}

/// `β ∈ [−{α}, 1 − {α})`.
pub fn in_window(beta: &Real, table: &ConvergentTable) -> Result<bool> {
    let alpha = table.alpha().value();
    let left = beta.add(&alpha);
    Ok(left.sign()? != Ordering::Less && left.sub(&Real::one()).sign()? == Ordering::Less)
}

/// Shifts `β` by an integer into `[−{α}, 1 − {α})`; returns the shifted value
/// and the integer added.
pub fn reduce_to_window(beta: &Real, table: &ConvergentTable) -> Result<(Real, i128)> {
    let alpha = table.alpha().value();
    let k = beta.add(&alpha).floor()?;
    let k: i128 = k.try_into().map_err(|_| Error::Overflow("window reduction"))?;
    Ok((beta.sub(&Real::from(k)), -k))
}

/// Greedy real expansion to `T` digits.
///
/// Points of `αℤ + ℤ` get a terminating expansion when the greedy choice is
/// unambiguous; a hit on a tile boundary where both neighbouring digit
/// strings are admissible raises [`Error::OrbitPoint`].
pub fn encode_real(beta: &Real, table: &ConvergentTable, t: usize) -> Result<OstrowskiReal> {
    if t == 0 {
        return Err(Error::PreconditionUnmet("T must be at least 1".into()));
    }
    if t + 1 > table.depth() {
        return Err(Error::DepthInsufficient(format!(
            "T = {t} needs depth {}",
            t + 1
        )));
    }
    if !in_window(beta, table)? {
        return Err(Error::OutOfWindow);
    }
    let frame = Frame::new(vec![table.alpha().value(), beta.clone()]);
    // |D_j| as a form in [1, α, β]
    let d = |j: isize| table.d_lin(j).scale(ConvergentTable::d_sign(j));
    let mut rho = Lin::int([0, 0, 1]);
    let mut digits = Vec::with_capacity(t);
    let mut prev = 0u64;
    for k in 0..t {
        let ki = k as isize;
        let s = ConvergentTable::d_sign(ki);
        let tv = rho.scale(s);
        let (dk, dk1) = (d(ki), d(ki + 1));
        let a = table.a(k + 1);
        let max = if k >= 1 && prev == 0 { a } else { a - 1 };
        let mut c = greedy_count(&frame, &tv, &dk, &dk1)?;
        if c > max {
            let closed_top = k >= 1 && prev == 0 && frame.cmp(&tv, &d(ki - 1))? == Ordering::Equal;
            if closed_top {
                c = max;
            } else if c == max + 1 {
                return Err(Error::OrbitPoint);
            } else {
                return Err(Error::InvariantViolation(format!(
                    "greedy digit {c} exceeds {max} at level {k}"
                )));
            }
        }
        rho = rho.sub(&table.d_lin(ki).scale(c as i128));
        digits.push(c);
        prev = c;
    }
    let tail_bound = table
        .remainder(t as isize - 1)?
        .abs()?
        .add(&table.remainder(t as isize)?.abs()?);
    Ok(OstrowskiReal {
        digits,
        beta: beta.clone(),
        tail_bound,
        key: table.key(),
    })
}

/// Least `c ≥ 0` with `t − c·d_k < d_{k+1}`.
fn greedy_count(frame: &Frame, tv: &Lin, dk: &Lin, dk1: &Lin) -> Result<u64> {
    let below = |c: i128| -> Result<bool> {
        Ok(frame.cmp(&tv.sub(&dk.scale(c)), dk1)? == Ordering::Less)
    };
    if below(0)? {
        return Ok(0);
    }
    let guess = (frame.to_f64(&tv.sub(dk1)) / frame.to_f64(dk)).floor() as i128 + 1;
    let mut c = guess.clamp(1, 1 << 62);
    while !below(c)? {
        c += 1;
    }
    while c > 1 && below(c - 1)? {
        c -= 1;
    }
    Ok(c as u64)
}

/// Both sides of `|nα − Σ c_{k+1}p_k − β| ≤ 3·max(1, |δ_{m+1}|)/q_{m+1}`.
#[derive(Clone, Debug, Serialize)]
pub struct InhomReport {
    pub m: usize,
    pub delta: i64,
    pub bound: f64,
    pub actual: f64,
    pub holds: bool,
}

/// Evaluates the inhomogeneous approximation bound for `n` against the
/// digits of `β`, at the largest `m ≤ T − 1` below which the digits agree.
pub fn inhom_bound_check(
    n: i128,
    beta: &OstrowskiReal,
    table: &ConvergentTable,
) -> Result<InhomReport> {
    if beta.key != table.key() {
        return Err(Error::TableMismatch);
    }
    let c = encode_int(n, table)?;
    let t = beta.depth();
    let agree = (0..t).find(|&k| c.digit(k) != beta.digits[k]).unwrap_or(t);
    let m = agree.min(t - 1);
    if m < 4 {
        return Err(Error::PreconditionUnmet(format!(
            "digits agree only below index {m}; need m ≥ 4"
        )));
    }
    if m + 1 > table.depth() {
        return Err(Error::DepthInsufficient(format!("q_{} needed", m + 1)));
    }
    let delta = c.digit(m) as i64 - beta.digits[m] as i64;
    let frame = Frame::new(vec![table.alpha().value(), beta.beta.clone()]);
    // Σ c_{k+1} D_k − β = nα − Σ c_{k+1} p_k − β
    let mut p_sum: i128 = 0;
    for (k, &ck) in c.digits().iter().enumerate() {
        p_sum += ck as i128 * table.p(k as isize);
    }
    let diff = Lin::int([-p_sum, n, -1]);
    let q = table.q(m as isize + 1);
    let scale = delta.unsigned_abs().max(1) as i128;
    // actual ≤ bound  ⇔  q·|diff| ≤ 3·scale
    let sign = frame.sign(&diff)?;
    let signed = if sign == Ordering::Less { diff.neg() } else { diff.clone() };
    let holds = frame.sign(&signed.scale(q).add_constant(-3 * scale))? != Ordering::Greater;
    Ok(InhomReport {
        m,
        delta,
        bound: 3.0 * scale as f64 / q as f64,
        actual: frame.value(&signed)?.to_f64(),
        holds,
    })
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
    fn small_integers() {
        let s = table("surd:-1,1,2,1", 10);
        assert_eq!(encode_int(10, &s).unwrap().digits(), &[0, 0, 2]);
        let g = table("surd:-1,1,5,2", 10);
        assert_eq!(encode_int(4, &g).unwrap().digits(), &[0, 1, 0, 1]);
        assert!(encode_int(0, &g).unwrap().is_zero());
    }

    #[test]
    fn invalid_digits_rejected() {
        let s = table("surd:-1,1,2,1", 10);
        // c_3 = a_3 = 2 with c_2 = 1
        assert!(matches!(
            OstrowskiInt::new(vec![0, 1, 2], &s),
            Err(Error::InvalidDigits(_))
        ));
        assert!(matches!(
            OstrowskiInt::new(vec![2], &s),
            Err(Error::InvalidDigits(_))
        ));
        let d = OstrowskiInt::new(vec![0, 0, 2], &s).unwrap();
        assert_eq!(decode_int(&d, &s).unwrap(), 10);
    }

    #[test]
    fn lex_order_matches_integers() {
        let g = table("surd:-1,1,5,2", 30);
        let codes: Vec<_> = (0..600).map(|n| encode_int(n, &g).unwrap()).collect();
        for (i, x) in codes.iter().enumerate() {
            for (j, y) in codes.iter().enumerate() {
                assert_eq!(lex_compare(x, y).unwrap(), i.cmp(&j));
            }
        }
        let s = table("surd:-1,1,2,1", 10);
        let other = encode_int(3, &s).unwrap();
        assert_eq!(lex_compare(&codes[3], &other), Err(Error::TableMismatch));
    }

    #[test]
    fn real_expansion_of_left_endpoint() {
        for spec in ["surd:-1,1,2,1", "surd:1,1,3,2", "cf-periodic:1,2;(3)"] {
            let t = table(spec, 14);
            let beta = t.alpha().value().neg();
            let e = encode_real(&beta, &t, 10).unwrap();
            for (k, &b) in e.digits().iter().enumerate() {
                let want = if k % 2 == 1 { t.a(k + 1) } else { 0 };
                assert_eq!(b, want, "{spec} k = {k}");
            }
        }
    }

    #[test]
    fn real_expansion_of_d2() {
        let t = table("surd:-1,1,2,1", 12);
        let e = encode_real(&t.remainder(2).unwrap(), &t, 8).unwrap();
        assert_eq!(e.digits(), &[0, 0, 1, 0, 0, 0, 0, 0]);
    }

    #[test]
    fn zero_expands_to_zero_digits() {
        let t = table("surd:-1,1,5,2", 12);
        let e = encode_real(&Real::zero(), &t, 8).unwrap();
        assert!(e.digits().iter().all(|&b| b == 0));
    }

    #[test]
    fn window_is_enforced() {
        let t = table("surd:-1,1,5,2", 12);
        let one_minus = Real::one().sub(&t.alpha().value());
        assert_eq!(encode_real(&one_minus, &t, 5).unwrap_err(), Error::OutOfWindow);
        let (r, k) = reduce_to_window(&one_minus, &t).unwrap();
        assert_eq!(k, -1);
        assert!(in_window(&r, &t).unwrap());
    }

    #[test]
    fn inhomogeneous_bound_on_truncation() {
        let t = table("surd:-1,1,2,1", 30);
        let beta = Real::from(crate::real::ratio(1, 7));
        let e = encode_real(&beta, &t, 12).unwrap();
        let n = e.truncated_integer(12, &t).unwrap();
        let r = inhom_bound_check(n, &e, &t).unwrap();
        assert_eq!(r.m, 11);
        assert!(r.holds);
        assert!(r.actual <= e.tail_bound().to_f64() * (1.0 + 1e-12));
    }
}
