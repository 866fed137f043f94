//! Exact and validated real numbers.
//!
//! Two representations cover everything the library needs:
//!
//! * [`Quad`]: an exact element `a + b·√d` of a real quadratic field with
//!   rational coordinates. Signs, floors and comparisons are decided on
//!   integers, never on floating point.
//! * [`RatInterval`]: a closed interval with rational endpoints that is
//!   guaranteed to contain the true value. Comparisons that the interval
//!   cannot decide fail with [`Error::UndecidableAtHorizon`].
//!
//! [`Real`] wraps both. Mixing two different quadratic fields falls back to
//! interval arithmetic at [`WORK_BITS`] bits.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Precision (bits after the binary point) used when exact quadratic values
/// have to be enclosed in rational intervals.
pub const WORK_BITS: u64 = 320;

pub(crate) fn rat(n: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(n.into())
}

pub(crate) fn ratio(n: impl Into<BigInt>, d: impl Into<BigInt>) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn pow2(bits: u64) -> BigInt {
    BigInt::one() << bits
}

/// Splits `d > 0` as `f²·e` with `e` square-free (trial division; factors
/// above 10⁶ are only removed when `d` itself is small enough to finish).
pub(crate) fn squarefree_split(d: &BigInt) -> (BigInt, BigInt) {
    let mut rest = d.clone();
    let mut outer = BigInt::one();
    let mut p = BigInt::from(2u32);
    let limit = BigInt::from(1_000_000u32);
    while &p * &p <= rest && p <= limit {
        let sq = &p * &p;
        while (&rest % &sq).is_zero() {
            rest /= &sq;
            outer *= &p;
        }
        p += 1u32;
    }
    let r = rest.sqrt();
    if &r * &r == rest {
        outer *= &r;
        rest = BigInt::one();
    }
    (outer, rest)
}

/// Exact element `a + b·√d` of `Q(√d)`. Rational values have `b = 0` and
/// `d = 0`; otherwise `d ≥ 2` is square-free.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Quad {
    a: BigRational,
    b: BigRational,
    d: BigInt,
}

impl Quad {
    pub fn rational(a: BigRational) -> Self {
        Quad {
            a,
            b: BigRational::zero(),
            d: BigInt::zero(),
        }
    }

    /// Builds `a + b·√d`, pulling square factors out of `d`.
    pub fn new(a: BigRational, b: BigRational, d: BigInt) -> Result<Self> {
        if d.is_negative() {
            return Err(Error::Parse("negative radicand".into()));
        }
        if b.is_zero() || d.is_zero() {
            return Ok(Quad::rational(a));
        }
        let (outer, inner) = squarefree_split(&d);
        let b = b * rat(outer);
        if inner.is_one() {
            return Ok(Quad::rational(a + b));
        }
        Ok(Quad { a, b, d: inner })
    }

    pub fn a(&self) -> &BigRational {
        &self.a
    }

    pub fn b(&self) -> &BigRational {
        &self.b
    }

    pub fn radicand(&self) -> &BigInt {
        &self.d
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    fn compatible(&self, other: &Quad) -> Option<BigInt> {
        match (self.is_rational(), other.is_rational()) {
            (true, true) => Some(BigInt::zero()),
            (true, false) => Some(other.d.clone()),
            (false, true) => Some(self.d.clone()),
            (false, false) if self.d == other.d => Some(self.d.clone()),
            _ => None,
        }
    }

    fn build(a: BigRational, b: BigRational, d: BigInt) -> Self {
        if b.is_zero() {
            Quad::rational(a)
        } else {
            Quad { a, b, d }
        }
    }

    pub fn try_add(&self, o: &Quad) -> Option<Quad> {
        let d = self.compatible(o)?;
        Some(Quad::build(&self.a + &o.a, &self.b + &o.b, d))
    }

    pub fn try_sub(&self, o: &Quad) -> Option<Quad> {
        let d = self.compatible(o)?;
        Some(Quad::build(&self.a - &o.a, &self.b - &o.b, d))
    }

    pub fn try_mul(&self, o: &Quad) -> Option<Quad> {
        let d = self.compatible(o)?;
        let dr = rat(d.clone());
        let a = &self.a * &o.a + &self.b * &o.b * dr;
        let b = &self.a * &o.b + &self.b * &o.a;
        Some(Quad::build(a, b, d))
    }

    pub fn neg(&self) -> Quad {
        Quad::build(-&self.a, -&self.b, self.d.clone())
    }

    /// Field norm `a² − b²d`.
    pub fn norm(&self) -> BigRational {
        &self.a * &self.a - &self.b * &self.b * rat(self.d.clone())
    }

    pub fn conjugate(&self) -> Quad {
        Quad::build(self.a.clone(), -&self.b, self.d.clone())
    }

    pub fn recip(&self) -> Result<Quad> {
        let n = self.norm();
        if n.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let c = self.conjugate();
        Ok(Quad::build(&c.a / &n, &c.b / &n, c.d))
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    /// Exact sign.
    pub fn sign(&self) -> Ordering {
        let sa = self.a.cmp(&BigRational::zero());
        let sb = self.b.cmp(&BigRational::zero());
        if sb == Ordering::Equal {
            return sa;
        }
        if sa == Ordering::Equal || sa == sb {
            return sb;
        }
        // opposite signs: compare a² with b²d (never equal, d is not a square)
        let a2 = &self.a * &self.a;
        let b2d = &self.b * &self.b * rat(self.d.clone());
        if a2 > b2d {
            sa
        } else {
            sb
        }
    }

    /// `(A + B√d) / C` with integers and `C > 0`.
    fn integer_form(&self) -> (BigInt, BigInt, BigInt) {
        let c = self.a.denom().lcm(self.b.denom());
        let a = self.a.numer() * (&c / self.a.denom());
        let b = self.b.numer() * (&c / self.b.denom());
        (a, b, c)
    }

    /// Exact floor.
    pub fn floor(&self) -> BigInt {
        if self.is_rational() {
            return self.a.floor().to_integer();
        }
        let (a, b, c) = self.integer_form();
        let s = (&b * &b * &self.d).sqrt();
        let num = if b.is_positive() { a + s } else { a - s - 1 };
        num.div_floor(&c)
    }

    /// Rational interval containing the value, of width at most `|b|·2^-bits`.
    pub fn enclose(&self, bits: u64) -> RatInterval {
        if self.is_rational() {
            return RatInterval::point(self.a.clone());
        }
        let scale = pow2(bits);
        let s = (&self.d * &scale * &scale).sqrt();
        let lo = BigRational::new(s.clone(), scale.clone());
        let hi = BigRational::new(s + 1, scale);
        let (l, h) = if self.b.is_positive() {
            (&self.b * lo, &self.b * hi)
        } else {
            (&self.b * hi, &self.b * lo)
        };
        RatInterval::new(&self.a + l, &self.a + h)
    }

    pub fn to_f64(&self) -> f64 {
        if self.is_rational() {
            return self.a.to_f64().unwrap_or(f64::NAN);
        }
        let mut bits = 128;
        loop {
            let iv = self.enclose(bits);
            let w = iv.width();
            let mid = iv.midpoint();
            if !iv.contains_zero() && (w * rat(pow2(60))) <= mid.abs() || bits > 8192 {
                return mid.to_f64().unwrap_or(f64::NAN);
            }
            bits *= 2;
        }
    }
}

impl fmt::Display for Quad {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_rational() {
            return write!(f, "{}", self.a);
        }
        let (a, b, c) = self.integer_form();
        let sign = if b.is_negative() { '-' } else { '+' };
        let mag = b.abs();
        let coef = if mag.is_one() {
            String::new()
        } else {
            mag.to_string()
        };
        if c.is_one() {
            write!(f, "{a}{sign}{coef}√{}", self.d)
        } else {
            write!(f, "({a}{sign}{coef}√{})/{c}", self.d)
        }
    }
}

/// Closed interval `[lo, hi]` with rational endpoints.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatInterval {
    lo: BigRational,
    hi: BigRational,
}

impl RatInterval {
    pub fn new(lo: BigRational, hi: BigRational) -> Self {
        if lo <= hi {
            RatInterval { lo, hi }
        } else {
            RatInterval { lo: hi, hi: lo }
        }
    }

    pub fn point(x: BigRational) -> Self {
        RatInterval {
            lo: x.clone(),
            hi: x,
        }
    }

    pub fn lo(&self) -> &BigRational {
        &self.lo
    }

    pub fn hi(&self) -> &BigRational {
        &self.hi
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> BigRational {
        (&self.lo + &self.hi) / rat(2)
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    fn round_out(self) -> Self {
        let limit = WORK_BITS + 64;
        if self.lo.denom().bits() <= limit && self.hi.denom().bits() <= limit {
            return self;
        }
        let scale = rat(pow2(WORK_BITS));
        let lo = (&self.lo * &scale).floor() / &scale;
        let hi = (&self.hi * &scale).ceil() / &scale;
        RatInterval { lo, hi }
    }

    pub fn add(&self, o: &RatInterval) -> RatInterval {
        RatInterval {
            lo: &self.lo + &o.lo,
            hi: &self.hi + &o.hi,
        }
        .round_out()
    }

    pub fn sub(&self, o: &RatInterval) -> RatInterval {
        RatInterval {
            lo: &self.lo - &o.hi,
            hi: &self.hi - &o.lo,
        }
        .round_out()
    }

    pub fn neg(&self) -> RatInterval {
        RatInterval {
            lo: -&self.hi,
            hi: -&self.lo,
        }
    }

    pub fn mul(&self, o: &RatInterval) -> RatInterval {
        let c = [
            &self.lo * &o.lo,
            &self.lo * &o.hi,
            &self.hi * &o.lo,
            &self.hi * &o.hi,
        ];
        let lo = c.iter().min().cloned().unwrap_or_else(BigRational::zero);
        let hi = c.iter().max().cloned().unwrap_or_else(BigRational::zero);
        RatInterval { lo, hi }.round_out()
    }

    pub fn recip(&self) -> Result<RatInterval> {
        if self.contains_zero() {
            return Err(Error::UndecidableAtHorizon);
        }
        Ok(RatInterval {
            lo: self.hi.recip(),
            hi: self.lo.recip(),
        }
        .round_out())
    }

    pub fn sign(&self) -> Result<Ordering> {
        if self.lo.is_positive() {
            Ok(Ordering::Greater)
        } else if self.hi.is_negative() {
            Ok(Ordering::Less)
        } else if self.lo.is_zero() && self.hi.is_zero() {
            Ok(Ordering::Equal)
        } else {
            Err(Error::UndecidableAtHorizon)
        }
    }

    pub fn floor(&self) -> Result<BigInt> {
        let k = self.lo.floor().to_integer();
        if self.hi < rat(&k + 1) {
            Ok(k)
        } else {
            Err(Error::UndecidableAtHorizon)
        }
    }

    /// Number of bits to which the interval pins its value (−log₂ width).
    pub fn precision_bits(&self) -> Option<u64> {
        let w = self.width();
        if w.is_zero() {
            return None;
        }
        let q = w.denom().bits() as i64 - w.numer().bits() as i64;
        Some(q.max(0) as u64)
    }
}

/// A real number known either exactly or through a certified enclosure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Real {
    Exact(Quad),
    Approx(RatInterval),
}

impl From<i64> for Real {
    fn from(v: i64) -> Self {
        Real::Exact(Quad::rational(rat(v)))
    }
}

impl From<i128> for Real {
    fn from(v: i128) -> Self {
        Real::Exact(Quad::rational(rat(v)))
    }
}

impl From<u64> for Real {
    fn from(v: u64) -> Self {
        Real::Exact(Quad::rational(rat(v)))
    }
}

impl From<BigRational> for Real {
    fn from(v: BigRational) -> Self {
        Real::Exact(Quad::rational(v))
    }
}

impl From<Quad> for Real {
    fn from(v: Quad) -> Self {
        Real::Exact(v)
    }
}

impl Real {
    pub fn zero() -> Self {
        Real::from(0i64)
    }

    pub fn one() -> Self {
        Real::from(1i64)
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Real::Exact(_))
    }

    pub fn as_quad(&self) -> Option<&Quad> {
        match self {
            Real::Exact(q) => Some(q),
            Real::Approx(_) => None,
        }
    }

    pub fn enclose(&self) -> RatInterval {
        match self {
            Real::Exact(q) => q.enclose(WORK_BITS),
            Real::Approx(iv) => iv.clone(),
        }
    }

    fn combine(
        &self,
        o: &Real,
        exact: impl Fn(&Quad, &Quad) -> Option<Quad>,
        approx: impl Fn(&RatInterval, &RatInterval) -> RatInterval,
    ) -> Real {
        if let (Real::Exact(x), Real::Exact(y)) = (self, o) {
            if let Some(z) = exact(x, y) {
                return Real::Exact(z);
            }
        }
        Real::Approx(approx(&self.enclose(), &o.enclose()))
    }

    pub fn add(&self, o: &Real) -> Real {
        self.combine(o, Quad::try_add, RatInterval::add)
    }

    pub fn sub(&self, o: &Real) -> Real {
        self.combine(o, Quad::try_sub, RatInterval::sub)
    }

    pub fn mul(&self, o: &Real) -> Real {
        self.combine(o, Quad::try_mul, RatInterval::mul)
    }

    pub fn scale(&self, k: i128) -> Real {
        self.mul(&Real::from(k))
    }

    pub fn neg(&self) -> Real {
        match self {
            Real::Exact(q) => Real::Exact(q.neg()),
            Real::Approx(iv) => Real::Approx(iv.neg()),
        }
    }

    pub fn recip(&self) -> Result<Real> {
        match self {
            Real::Exact(q) => Ok(Real::Exact(q.recip()?)),
            Real::Approx(iv) => Ok(Real::Approx(iv.recip()?)),
        }
    }

    pub fn div(&self, o: &Real) -> Result<Real> {
        Ok(self.mul(&o.recip()?))
    }

    pub fn sign(&self) -> Result<Ordering> {
        match self {
            Real::Exact(q) => Ok(q.sign()),
            Real::Approx(iv) => iv.sign(),
        }
    }

    pub fn cmp_real(&self, o: &Real) -> Result<Ordering> {
        self.sub(o).sign()
    }

    pub fn abs(&self) -> Result<Real> {
        Ok(match self.sign()? {
            Ordering::Less => self.neg(),
            _ => self.clone(),
        })
    }

    pub fn floor(&self) -> Result<BigInt> {
        match self {
            Real::Exact(q) => Ok(q.floor()),
            Real::Approx(iv) => iv.floor(),
        }
    }

    /// Fractional part `x − ⌊x⌋`.
    pub fn fract(&self) -> Result<Real> {
        let k = self.floor()?;
        Ok(self.sub(&Real::from(rat(k))))
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Real::Exact(q) => q.to_f64(),
            Real::Approx(iv) => iv.midpoint().to_f64().unwrap_or(f64::NAN),
        }
    }

    /// Exact textual form for quadratic values, `None` for enclosures.
    pub fn exact_string(&self) -> Option<String> {
        match self {
            Real::Exact(q) => Some(q.to_string()),
            Real::Approx(_) => None,
        }
    }

    /// Bits pinned by an enclosure; `None` when the value is exact.
    pub fn precision_bits(&self) -> Option<u64> {
        match self {
            Real::Exact(_) => None,
            Real::Approx(iv) => iv.precision_bits(),
        }
    }

    /// Decimal rendering rounded to `digits` places after the point.
    /// Enclosures render their midpoint.
    pub fn to_decimal(&self, digits: usize) -> String {
        let scale = BigInt::from(10u32).pow(digits as u32);
        let half = ratio(1, 2);
        let n = match self {
            Real::Exact(q) => {
                let shifted = q
                    .try_mul(&Quad::rational(rat(scale.clone())))
                    .and_then(|s| s.try_add(&Quad::rational(half.clone())))
                    .expect("rational scaling is always compatible");
                shifted.floor()
            }
            Real::Approx(iv) => (iv.midpoint() * rat(scale.clone()) + half).floor().to_integer(),
        };
        format_fixed(&n, digits)
    }
}

pub(crate) fn format_fixed(n: &BigInt, digits: usize) -> String {
    let neg = n.is_negative();
    let s = n.abs().to_string();
    let body = if digits == 0 {
        s
    } else if s.len() <= digits {
        format!("0.{}{}", "0".repeat(digits - s.len()), s)
    } else {
        let (i, f) = s.split_at(s.len() - digits);
        format!("{i}.{f}")
    };
    if neg && n.abs() > BigInt::zero() {
        format!("-{body}")
    } else {
        body
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Real::Exact(q) => write!(f, "{q}"),
            Real::Approx(iv) => write!(f, "[{}, {}]", iv.lo, iv.hi),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn surd(a: i64, b: i64, d: i64, c: i64) -> Quad {
        Quad::new(ratio(a, c), ratio(b, c), BigInt::from(d)).unwrap()
    }

    #[test]
    fn sign_and_floor_of_golden_conjugates() {
        let phi = surd(1, 1, 5, 2);
        assert_eq!(phi.sign(), Ordering::Greater);
        assert_eq!(phi.floor(), BigInt::from(1));
        let psi = surd(1, -1, 5, 2);
        assert_eq!(psi.sign(), Ordering::Less);
        assert_eq!(psi.floor(), BigInt::from(-1));
    }

    #[test]
    fn square_factors_are_extracted() {
        let x = Quad::new(rat(0), rat(1), BigInt::from(8)).unwrap();
        assert_eq!(x.radicand(), &BigInt::from(2));
        assert_eq!(x.b(), &rat(2));
        let y = Quad::new(rat(1), rat(1), BigInt::from(9)).unwrap();
        assert!(y.is_rational());
        assert_eq!(y.a(), &rat(4));
    }

    #[test]
    fn reciprocal_round_trip() {
        let x = surd(-7, 5, 2, 1);
        let y = x.recip().unwrap().try_mul(&x).unwrap();
        assert_eq!(y, Quad::rational(rat(1)));
    }

    #[test]
    fn to_f64_survives_cancellation() {
        // 5√2 − 7 ≈ 0.0710678
        let x = surd(-7, 5, 2, 1);
        assert!((x.to_f64() - 0.07106781186547524).abs() < 1e-16);
        // q·α − p at large q keeps its relative accuracy
        let big = Quad::new(rat(-665857), rat(470832), BigInt::from(2)).unwrap();
        let f = big.to_f64();
        assert!((f + 7.509_119_826_032_946e-7).abs() < 1e-20, "{f}");
    }

    #[test]
    fn mixed_fields_fall_back_to_intervals() {
        let a = Real::from(surd(0, 1, 2, 1));
        let b = Real::from(surd(0, 1, 3, 1));
        let s = a.sub(&b);
        assert!(!s.is_exact());
        assert_eq!(s.sign().unwrap(), Ordering::Less);
    }

    #[test]
    fn interval_sign_can_be_undecidable() {
        let iv = RatInterval::new(ratio(-1, 10), ratio(1, 10));
        assert_eq!(Real::Approx(iv).sign(), Err(Error::UndecidableAtHorizon));
    }

    #[test]
    fn decimal_rendering_rounds() {
        let g = Real::from(surd(-1, 1, 5, 2));
        assert_eq!(g.to_decimal(6), "0.618034");
        assert_eq!(g.neg().to_decimal(3), "-0.618");
        assert_eq!(Real::from(ratio(1, 8)).to_decimal(2), "0.13");
    }
}
