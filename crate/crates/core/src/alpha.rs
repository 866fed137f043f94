//! Irrational slopes and the textual alpha grammar.
//!
//! ```text
//! surd:P,Q,D,R                  (P + Q·√D) / R
//! cf:a1,a2,...,aT               certified prefix [0; a1, ..., aT, ...]
//! cf-periodic:a1,..,aj;(b1,..,bp)   [0; a1, ..., aj, b1, ..., bp, b1, ...]
//! dec:<decimal>@<bits>          |α − decimal| ≤ 2^-bits
//! ```
//!
//! Parsed values are normalized into the open unit interval; the removed
//! integer part is kept in [`Irrational::integer_part`].

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::real::{rat, ratio, squarefree_split, Quad, RatInterval, Real};

/// Canonical quadratic surd `(p + q·√d) / r`: `r > 0`, `d ≥ 2` square-free,
/// `q ≠ 0`, `gcd(p, q, r) = 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Surd {
    p: BigInt,
    q: BigInt,
    d: BigInt,
    r: BigInt,
}

impl Surd {
    pub fn new(p: BigInt, q: BigInt, d: BigInt, r: BigInt) -> Result<Self> {
        if r.is_zero() {
            return Err(Error::Parse("surd denominator R must be non-zero".into()));
        }
        if q.is_zero() {
            return Err(Error::NotIrrational("surd with Q = 0".into()));
        }
        if !d.is_positive() {
            return Err(Error::Parse("surd radicand D must be positive".into()));
        }
        let (outer, inner) = squarefree_split(&d);
        if inner.is_one() {
            return Err(Error::NotIrrational(format!("D = {d} is a perfect square")));
        }
        let (mut p, mut q, mut r) = (p, q * outer, r);
        if r.is_negative() {
            p = -p;
            q = -q;
            r = -r;
        }
        let g = p.gcd(&q).gcd(&r);
        if !g.is_one() {
            p /= &g;
            q /= &g;
            r /= &g;
        }
        Ok(Surd { p, q, d: inner, r })
    }

    pub fn from_quad(x: &Quad) -> Result<Self> {
        if x.is_rational() {
            return Err(Error::NotIrrational(x.to_string()));
        }
        let c = x.a().denom().lcm(x.b().denom());
        let p = x.a().numer() * (&c / x.a().denom());
        let q = x.b().numer() * (&c / x.b().denom());
        Surd::new(p, q, x.radicand().clone(), c)
    }

    pub fn to_quad(&self) -> Quad {
        Quad::new(
            BigRational::new(self.p.clone(), self.r.clone()),
            BigRational::new(self.q.clone(), self.r.clone()),
            self.d.clone(),
        )
        .expect("canonical surd")
    }

    pub fn parts(&self) -> (&BigInt, &BigInt, &BigInt, &BigInt) {
        (&self.p, &self.q, &self.d, &self.r)
    }

    fn shifted(&self, k: &BigInt) -> Surd {
        Surd {
            p: &self.p - k * &self.r,
            q: self.q.clone(),
            d: self.d.clone(),
            r: self.r.clone(),
        }
    }
}

impl fmt::Display for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "surd:{},{},{},{}", self.p, self.q, self.d, self.r)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Repr {
    Surd(Surd),
    /// Certified leading partial quotients `a₁ … a_T`.
    Digits(Vec<u64>),
    /// `|α − center| ≤ 2^-bits`; `digits` are the partial quotients the
    /// enclosure certifies.
    Decimal {
        text: String,
        center: BigRational,
        bits: u32,
        digits: Vec<u64>,
    },
}

/// An irrational slope, normalized into `(0, 1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Irrational {
    repr: Repr,
    integer_part: BigInt,
}

const MAX_DECIMAL_DIGITS: usize = 4096;

impl Irrational {
    /// Exact quadratic surd; the value may lie anywhere on the line.
    pub fn surd(p: i64, q: i64, d: i64, r: i64) -> Result<Self> {
        let s = Surd::new(p.into(), q.into(), d.into(), r.into())?;
        Ok(Irrational {
            repr: Repr::Surd(s),
            integer_part: BigInt::zero(),
        })
    }

    /// Same as [`Irrational::surd`], then shifted into `(0, 1)`.
    pub fn surd_normalized(p: i64, q: i64, d: i64, r: i64) -> Result<Self> {
        Irrational::surd(p, q, d, r)?.normalized()
    }

    pub fn from_quad(x: &Quad) -> Result<Self> {
        Irrational {
            repr: Repr::Surd(Surd::from_quad(x)?),
            integer_part: BigInt::zero(),
        }
        .normalized()
    }

    /// Certified prefix `[0; a₁, …, a_T]`.
    pub fn digits(prefix: Vec<u64>) -> Result<Self> {
        if prefix.is_empty() || prefix.contains(&0) {
            return Err(Error::Parse(
                "cf prefix needs at least one digit, all positive".into(),
            ));
        }
        Ok(Irrational {
            repr: Repr::Digits(prefix),
            integer_part: BigInt::zero(),
        })
    }

    /// Eventually periodic expansion `[0; pre…, period, period, …]`, converted
    /// to its exact quadratic surd.
    pub fn periodic(pre: &[u64], period: &[u64]) -> Result<Self> {
        if period.is_empty() || pre.iter().chain(period).any(|&a| a == 0) {
            return Err(Error::Parse(
                "periodic expansion needs a non-empty period of positive digits".into(),
            ));
        }
        // x = [b1; …, bp, x]  ⇒  Q x² + (Q' − P) x − P' = 0
        let (pp, pq, qp, qq) = mobius(period);
        let disc = (&pp - &qq) * (&pp - &qq) + BigInt::from(4) * &qp * &pq;
        let tail = Quad::new(
            BigRational::new(&pp - &qq, BigInt::from(2) * &qp),
            BigRational::new(BigInt::one(), BigInt::from(2) * &qp),
            disc,
        )?;
        let mut x = tail;
        for &a in pre.iter().rev() {
            x = x
                .recip()?
                .try_add(&Quad::rational(rat(a)))
                .expect("rational shift");
        }
        let alpha = x.recip()?;
        Irrational::from_quad(&alpha)
    }

    /// Decimal approximation with a declared error bound `2^-bits`.
    pub fn decimal(text: &str, bits: u32) -> Result<Self> {
        let center = parse_decimal(text)?;
        let eps = BigRational::new(BigInt::one(), BigInt::one() << bits);
        let iv = RatInterval::new(&center - &eps, &center + &eps);
        let a0 = iv
            .floor()
            .map_err(|_| Error::HorizonExceeded("integer part of decimal alpha".into()))?;
        let shifted = RatInterval::new(iv.lo() - rat(a0.clone()), iv.hi() - rat(a0.clone()));
        let digits = interval_digits(&shifted, MAX_DECIMAL_DIGITS);
        Ok(Irrational {
            repr: Repr::Decimal {
                text: text.to_string(),
                center: center - rat(a0.clone()),
                bits,
                digits,
            },
            integer_part: a0,
        })
    }

    pub fn repr(&self) -> &Repr {
        &self.repr
    }

    pub fn integer_part(&self) -> &BigInt {
        &self.integer_part
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.repr, Repr::Surd(_))
    }

    /// Subtracts `⌊α⌋` so that the value lies in `(0, 1)`.
    pub fn normalized(self) -> Result<Self> {
        match self.repr {
            Repr::Surd(s) => {
                let k = s.to_quad().floor();
                Ok(Irrational {
                    repr: Repr::Surd(s.shifted(&k)),
                    integer_part: self.integer_part + k,
                })
            }
            other => Ok(Irrational {
                repr: other,
                integer_part: self.integer_part,
            }),
        }
    }

    pub fn in_unit_interval(&self) -> bool {
        match &self.repr {
            Repr::Surd(s) => s.to_quad().floor().is_zero(),
            _ => true,
        }
    }

    /// Exact value or certified enclosure (after normalization).
    pub fn value(&self) -> Real {
        match &self.repr {
            Repr::Surd(s) => Real::Exact(s.to_quad()),
            Repr::Digits(a) => {
                let (p, q, pp, qp) = convergent_pair(a);
                // α lies strictly between p/q and the mediant (p+p')/(q+q')
                Real::Approx(RatInterval::new(
                    BigRational::new(p.clone(), q.clone()),
                    BigRational::new(p + pp, q + qp),
                ))
            }
            Repr::Decimal { center, bits, .. } => {
                let eps = BigRational::new(BigInt::one(), BigInt::one() << *bits);
                Real::Approx(RatInterval::new(center - &eps, center + &eps))
            }
        }
    }

    /// Number of certified partial quotients; `None` when unbounded.
    pub fn horizon(&self) -> Option<usize> {
        match &self.repr {
            Repr::Surd(_) => None,
            Repr::Digits(a) => Some(a.len()),
            Repr::Decimal { digits, .. } => Some(digits.len()),
        }
    }

    /// Partial quotients `a₁ … a_depth`, plus the exact complete quotients
    /// `ζ₁ … ζ_depth` for surds.
    pub fn expand(&self, depth: usize) -> Result<(Vec<u64>, Option<Vec<Quad>>)> {
        if !self.in_unit_interval() {
            return Err(Error::NotInUnitInterval);
        }
        match &self.repr {
            Repr::Surd(s) => {
                let mut x = s.to_quad();
                let mut digits = Vec::with_capacity(depth);
                let mut zetas = Vec::with_capacity(depth);
                for _ in 0..depth {
                    let z = x.recip()?;
                    let a = z.floor();
                    let a = a.to_u64().ok_or(Error::Overflow("partial quotient"))?;
                    if a == 0 {
                        return Err(Error::InvariantViolation("zero partial quotient".into()));
                    }
                    x = z.try_sub(&Quad::rational(rat(a))).expect("rational shift");
                    digits.push(a);
                    zetas.push(z);
                }
                Ok((digits, Some(zetas)))
            }
            Repr::Digits(a) | Repr::Decimal { digits: a, .. } => {
                if depth > a.len() {
                    return Err(Error::HorizonExceeded(format!(
                        "requested {depth} partial quotients, {} certified",
                        a.len()
                    )));
                }
                Ok((a[..depth].to_vec(), None))
            }
        }
    }

    /// Canonical spec string in the alpha grammar (after normalization).
    pub fn spec(&self) -> String {
        match &self.repr {
            Repr::Surd(s) => s.to_string(),
            Repr::Digits(a) => format!("cf:{}", join(a)),
            Repr::Decimal { center, bits, .. } => {
                let text = Real::from(center.clone()).to_decimal(((*bits as usize) * 30103) / 100000 + 2);
                format!("dec:{text}@{bits}")
            }
        }
    }
}

impl fmt::Display for Irrational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.spec())
    }
}

impl FromStr for Irrational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (kind, body) = s
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("alpha spec `{s}` lacks a `kind:` prefix")))?;
        match kind {
            "surd" => {
                let v = parse_list::<BigInt>(body)?;
                if v.len() != 4 {
                    return Err(Error::Parse("surd expects P,Q,D,R".into()));
                }
                let s = Surd::new(v[0].clone(), v[1].clone(), v[2].clone(), v[3].clone())?;
                Irrational {
                    repr: Repr::Surd(s),
                    integer_part: BigInt::zero(),
                }
                .normalized()
            }
            "cf" => Irrational::digits(parse_list::<u64>(body)?),
            "cf-periodic" => {
                let (pre, per) = body
                    .split_once(';')
                    .ok_or_else(|| Error::Parse("cf-periodic expects `pre;(period)`".into()))?;
                let per = per
                    .trim()
                    .strip_prefix('(')
                    .and_then(|p| p.strip_suffix(')'))
                    .ok_or_else(|| Error::Parse("period must be parenthesized".into()))?;
                let pre = if pre.trim().is_empty() {
                    Vec::new()
                } else {
                    parse_list::<u64>(pre)?
                };
                Irrational::periodic(&pre, &parse_list::<u64>(per)?)
            }
            "dec" => {
                let (text, bits) = body
                    .split_once('@')
                    .ok_or_else(|| Error::Parse("dec expects <decimal>@<bits>".into()))?;
                let bits: u32 = bits
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad bit count `{bits}`")))?;
                Irrational::decimal(text.trim(), bits)
            }
            other => Err(Error::Parse(format!("unknown alpha kind `{other}`"))),
        }
    }
}

fn join(a: &[u64]) -> String {
    a.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(",")
}

fn parse_list<T: FromStr>(body: &str) -> Result<Vec<T>> {
    body.split(',')
        .map(|t| {
            t.trim()
                .parse::<T>()
                .map_err(|_| Error::Parse(format!("bad number `{}`", t.trim())))
        })
        .collect()
}

/// Parses `[-]digits[.digits]` exactly.
pub fn parse_decimal(text: &str) -> Result<BigRational> {
    let err = || Error::Parse(format!("bad decimal `{text}`"));
    let (neg, body) = match text.strip_prefix('-') {
        Some(b) => (true, b),
        None => (false, text.strip_prefix('+').unwrap_or(text)),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if int.is_empty() && frac.is_empty() {
        return Err(err());
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(err());
    }
    let digits = format!("{int}{frac}");
    let n: BigInt = if digits.is_empty() {
        BigInt::zero()
    } else {
        digits.parse().map_err(|_| err())?
    };
    let v = BigRational::new(n, BigInt::from(10u32).pow(frac.len() as u32));
    Ok(if neg { -v } else { v })
}

/// `(p_T, q_T, p_{T−1}, q_{T−1})` for `[0; a₁, …, a_T]`.
fn convergent_pair(a: &[u64]) -> (BigInt, BigInt, BigInt, BigInt) {
    let (mut p, mut pp) = (BigInt::zero(), BigInt::one());
    let (mut q, mut qp) = (BigInt::one(), BigInt::zero());
    for &d in a {
        let np = BigInt::from(d) * &p + &pp;
        let nq = BigInt::from(d) * &q + &qp;
        pp = std::mem::replace(&mut p, np);
        qp = std::mem::replace(&mut q, nq);
    }
    (p, q, pp, qp)
}

/// Product of `[[b, 1], [1, 0]]` over the block, as `(P, P', Q, Q')`.
fn mobius(block: &[u64]) -> (BigInt, BigInt, BigInt, BigInt) {
    let (mut m00, mut m01, mut m10, mut m11) =
        (BigInt::one(), BigInt::zero(), BigInt::zero(), BigInt::one());
    for &b in block {
        let b = BigInt::from(b);
        let n00 = &m00 * &b + &m01;
        let n10 = &m10 * &b + &m11;
        m01 = std::mem::replace(&mut m00, n00);
        m11 = std::mem::replace(&mut m10, n10);
    }
    (m00, m01, m10, m11)
}

/// Partial quotients certified by an enclosure of a number in `(0, 1)`.
fn interval_digits(iv: &RatInterval, max: usize) -> Vec<u64> {
    let mut lo = iv.lo().clone();
    let mut hi = iv.hi().clone();
    let mut out = Vec::new();
    if !lo.is_positive() || hi >= rat(1) {
        return out;
    }
    while out.len() < max {
        // reciprocal of (lo, hi) ⊂ (0, 1)
        let (nlo, nhi) = (hi.recip(), lo.recip());
        let k = nlo.floor().to_integer();
        if nhi > rat(&k + 1) {
            break;
        }
        let Some(a) = k.to_u64() else { break };
        out.push(a);
        lo = nlo - rat(k.clone());
        hi = nhi - rat(k);
        if lo.is_zero() || hi.is_zero() {
            break;
        }
    }
    out
}

/// Convenience: the exact value of a rational `num/den` as an enclosure-free `Real`.
pub fn rational_real(num: i64, den: i64) -> Real {
    Real::from(ratio(num, den))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_surd_normalizes() {
        let a: Irrational = "surd:1,1,5,2".parse().unwrap();
        assert_eq!(a.integer_part(), &BigInt::from(1));
        assert_eq!(a.spec(), "surd:-1,1,5,2");
    }

    #[test]
    fn square_radicand_is_rejected() {
        assert!(matches!(
            "surd:1,1,4,2".parse::<Irrational>(),
            Err(Error::NotIrrational(_))
        ));
    }

    #[test]
    fn canonical_form_reduces_common_factors() {
        let a: Irrational = "surd:-2,2,20,4".parse().unwrap();
        // (−2 + 2√20)/4 = (−1 + 2√5)/2 → minus 1 → (−3 + 2√5)/2
        assert_eq!(a.spec(), "surd:-3,2,5,2");
    }

    #[test]
    fn periodic_sqrt2() {
        let a: Irrational = "cf-periodic:;(2)".parse().unwrap();
        assert_eq!(a.spec(), "surd:-1,1,2,1");
        let b: Irrational = "cf-periodic:1,2;(3)".parse().unwrap();
        let (d, _) = b.expand(8).unwrap();
        assert_eq!(d, vec![1, 2, 3, 3, 3, 3, 3, 3]);
    }

    #[test]
    fn decimal_certifies_a_prefix() {
        let a: Irrational = "dec:0.718281828459045235360287471352@99".parse().unwrap();
        let h = a.horizon().unwrap();
        assert!(h >= 20, "horizon {h}");
        let (d, _) = a.expand(10).unwrap();
        assert_eq!(d, vec![1, 2, 1, 1, 4, 1, 1, 6, 1, 1]);
        assert!(matches!(a.expand(h + 1), Err(Error::HorizonExceeded(_))));
    }

    #[test]
    fn malformed_specs() {
        for s in ["", "surd:1,2", "cf:", "cf:1,0", "dec:0.5", "dec:x@10", "foo:1"] {
            assert!(s.parse::<Irrational>().is_err(), "{s}");
        }
    }
}
