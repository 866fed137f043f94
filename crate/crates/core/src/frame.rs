//! Guarded evaluation of integer linear forms over a fixed set of reals.
//!
//! Almost every quantity the library compares is an integer (or rational)
//! combination `(c₀ + c₁·x₁ + … + c_r·x_r) / den` of a few fixed reals: the
//! slope `α`, the other slopes of a net, the shift. A [`Frame`] holds those
//! reals once, both exactly and as `f64` with an error radius. Signs are
//! first decided in floating point with a rigorous error bound and only
//! fall back to exact arithmetic when the float result is too close to zero.

use std::cmp::Ordering;

use num_integer::Integer;
use num_traits::ToPrimitive;
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::real::Real;

const EPS: f64 = f64::EPSILON;

pub type Coeffs = SmallVec<[i128; 4]>;

/// `(Σ cᵢ·xᵢ) / den` where `x₀ = 1` and `x₁…` are the generators of a
/// [`Frame`]; `den > 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Lin {
    coeffs: Coeffs,
    den: i128,
}

impl Lin {
    pub fn new(coeffs: impl IntoIterator<Item = i128>, den: i128) -> Result<Self> {
        if den == 0 {
            return Err(Error::DivisionByZero);
        }
        let mut l = Lin {
            coeffs: coeffs.into_iter().collect(),
            den,
        };
        l.reduce();
        Ok(l)
    }

    /// Integer combination (denominator one).
    pub fn int(coeffs: impl IntoIterator<Item = i128>) -> Self {
        Lin {
            coeffs: coeffs.into_iter().collect(),
            den: 1,
        }
    }

    pub fn zero() -> Self {
        Lin::int([0])
    }

    pub fn constant(c: i128) -> Self {
        Lin::int([c])
    }

    fn reduce(&mut self) {
        if self.den < 0 {
            self.den = -self.den;
            for c in &mut self.coeffs {
                *c = -*c;
            }
        }
        let g = self.coeffs.iter().fold(self.den, |g, c| g.gcd(c));
        if g > 1 {
            self.den /= g;
            for c in &mut self.coeffs {
                *c /= g;
            }
        }
        while self.coeffs.len() > 1 && self.coeffs.last() == Some(&0) {
            self.coeffs.pop();
        }
        if self.coeffs.is_empty() {
            self.coeffs.push(0);
        }
    }

    pub fn coeffs(&self) -> &[i128] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> i128 {
        self.coeffs.get(i).copied().unwrap_or(0)
    }

    pub fn den(&self) -> i128 {
        self.den
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_integral(&self) -> bool {
        self.den == 1
    }

    fn zip(&self, o: &Lin, f: impl Fn(i128, i128) -> i128) -> Lin {
        let n = self.dim().max(o.dim());
        let l = self.den.lcm(&o.den);
        let (sa, sb) = (l / self.den, l / o.den);
        let coeffs = (0..n).map(|i| f(self.coeff(i) * sa, o.coeff(i) * sb));
        let mut out = Lin {
            coeffs: coeffs.collect(),
            den: l,
        };
        out.reduce();
        out
    }

    pub fn add(&self, o: &Lin) -> Lin {
        self.zip(o, |a, b| a + b)
    }

    pub fn sub(&self, o: &Lin) -> Lin {
        self.zip(o, |a, b| a - b)
    }

    pub fn neg(&self) -> Lin {
        Lin {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
            den: self.den,
        }
    }

    pub fn scale(&self, k: i128) -> Lin {
        let mut out = Lin {
            coeffs: self.coeffs.iter().map(|c| c * k).collect(),
            den: self.den,
        };
        out.reduce();
        out
    }

    pub fn add_constant(&self, k: i128) -> Lin {
        let mut out = self.clone();
        out.coeffs[0] += k * self.den;
        out
    }

    /// Places generator `i` of this form at generator `map[i]` of a wider frame.
    pub fn embed(&self, map: &[usize], dim: usize) -> Lin {
        let mut coeffs: Coeffs = SmallVec::from_elem(0, dim);
        coeffs[0] = self.coeff(0);
        for (i, &target) in map.iter().enumerate() {
            coeffs[target] += self.coeff(i + 1);
        }
        let mut out = Lin {
            coeffs,
            den: self.den,
        };
        out.reduce();
        out
    }
}

/// A fixed list of reals `1, x₁, …, x_r` with float shadows.
#[derive(Clone, Debug)]
pub struct Frame {
    exact: Vec<Real>,
    approx: Vec<f64>,
    radius: Vec<f64>,
}

impl Frame {
    pub fn new(generators: Vec<Real>) -> Self {
        let mut exact = vec![Real::one()];
        exact.extend(generators);
        let mut approx = Vec::with_capacity(exact.len());
        let mut radius = Vec::with_capacity(exact.len());
        for x in &exact {
            let v = x.to_f64();
            let half_width = match x {
                Real::Exact(_) => 0.0,
                Real::Approx(iv) => {
                    let w = (iv.width() / crate::real::rat(2)).to_f64().unwrap_or(f64::INFINITY);
                    w * (1.0 + 4.0 * EPS)
                }
            };
            approx.push(v);
            radius.push(half_width + v.abs() * 4.0 * EPS);
        }
        Frame {
            exact,
            approx,
            radius,
        }
    }

    pub fn dim(&self) -> usize {
        self.exact.len()
    }

    pub fn generator(&self, i: usize) -> &Real {
        &self.exact[i]
    }

    pub fn approx(&self, coeffs: &[i128]) -> f64 {
        coeffs
            .iter()
            .zip(&self.approx)
            .map(|(&c, &x)| c as f64 * x)
            .sum()
    }

    fn approx_with_bound(&self, coeffs: &[i128]) -> (f64, f64) {
        let mut f = 0.0;
        let mut bound = 0.0;
        let mut mag = 0.0;
        for (i, &c) in coeffs.iter().enumerate() {
            let cf = c as f64;
            let term = cf * self.approx[i];
            f += term;
            mag += term.abs();
            bound += cf.abs() * (self.radius[i] + self.approx[i].abs() * 2.0 * EPS);
        }
        bound += mag * (coeffs.len() as f64 + 2.0) * EPS;
        (f, bound * 1.01 + f64::MIN_POSITIVE)
    }

    pub fn exact_value(&self, coeffs: &[i128], den: i128) -> Result<Real> {
        let mut acc = Real::zero();
        for (i, &c) in coeffs.iter().enumerate() {
            if c != 0 {
                acc = acc.add(&self.exact[i].scale(c));
            }
        }
        if den == 1 {
            Ok(acc)
        } else {
            acc.div(&Real::from(den))
        }
    }

    pub fn value(&self, x: &Lin) -> Result<Real> {
        self.exact_value(x.coeffs(), x.den())
    }

    /// Float value with relative error below about `1e-12`; falls back to
    /// exact evaluation when the float sum cancels.
    pub fn to_f64(&self, x: &Lin) -> f64 {
        let (f, bound) = self.approx_with_bound(x.coeffs());
        if bound <= f.abs() * 1e-13 {
            return f / x.den() as f64;
        }
        match self.value(x) {
            Ok(v) => v.to_f64(),
            Err(_) => f / x.den() as f64,
        }
    }

    /// Sign of `Σ cᵢ·xᵢ`.
    pub fn sign_of(&self, coeffs: &[i128]) -> Result<Ordering> {
        let (f, bound) = self.approx_with_bound(coeffs);
        if f > bound {
            return Ok(Ordering::Greater);
        }
        if f < -bound {
            return Ok(Ordering::Less);
        }
        self.exact_value(coeffs, 1)?.sign()
    }

    pub fn sign(&self, x: &Lin) -> Result<Ordering> {
        self.sign_of(x.coeffs())
    }

    pub fn cmp(&self, x: &Lin, y: &Lin) -> Result<Ordering> {
        self.sign(&x.sub(y))
    }

    /// `⌊(Σ cᵢ·xᵢ) / den⌋`.
    pub fn floor_of(&self, coeffs: &[i128], den: i128) -> Result<i128> {
        let f = self.approx(coeffs) / den as f64;
        if !f.is_finite() {
            return Err(Error::Overflow("frame floor"));
        }
        let mut k = f.floor() as i128;
        let mut work: Coeffs = coeffs.iter().copied().collect();
        let base = work[0];
        for _ in 0..4 {
            work[0] = base - k * den;
            match self.sign_of(&work)? {
                Ordering::Less => {
                    k -= 1;
                    continue;
                }
                _ => {}
            }
            work[0] = base - (k + 1) * den;
            match self.sign_of(&work)? {
                Ordering::Less => return Ok(k),
                _ => {
                    k += 1;
                    continue;
                }
            }
        }
        self.exact_value(coeffs, den)?
            .floor()?
            .to_i128()
            .ok_or(Error::Overflow("frame floor"))
    }

    pub fn floor(&self, x: &Lin) -> Result<i128> {
        self.floor_of(x.coeffs(), x.den())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::real::{ratio, Quad};
    use num_bigint::BigInt;

    fn golden() -> Frame {
        let a = Quad::new(ratio(-1, 2), ratio(1, 2), BigInt::from(5)).unwrap();
        Frame::new(vec![Real::from(a)])
    }

    #[test]
    fn lin_reduces_and_trims() {
        let l = Lin::new([2, 4, 0], 6).unwrap();
        assert_eq!(l.coeffs(), &[1, 2]);
        assert_eq!(l.den(), 3);
        let m = Lin::new([1, 1], -2).unwrap();
        assert_eq!(m.coeffs(), &[-1, -1]);
        assert_eq!(m.den(), 2);
    }

    #[test]
    fn exact_fallback_decides_tiny_values() {
        let f = golden();
        // F_40·α − F_39 ≈ −4.37e-9 and F_39·α − F_38 ≈ 7.07e-9.
        let (p, q) = (63_245_986i128, 102_334_155i128);
        assert_eq!(f.sign_of(&[-p, q]).unwrap(), Ordering::Less);
        let (p, q) = (39_088_169i128, 63_245_986i128);
        assert_eq!(f.sign_of(&[-p, q]).unwrap(), Ordering::Greater);
    }

    #[test]
    fn floor_matches_exact() {
        let f = golden();
        for n in 0..2000i128 {
            let k = f.floor_of(&[0, n], 1).unwrap();
            let e = f.exact_value(&[0, n], 1).unwrap().floor().unwrap();
            assert_eq!(BigInt::from(k), e, "n = {n}");
        }
        assert_eq!(f.floor_of(&[1, 3], 2).unwrap(), 1); // (1 + 3α)/2 ≈ 1.427
    }

    #[test]
    fn embed_moves_generators() {
        let l = Lin::int([3, 5]);
        let e = l.embed(&[2], 4);
        assert_eq!(e.coeffs(), &[3, 0, 5]);
    }
}
