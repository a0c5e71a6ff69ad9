//! Closed intervals of `f64` with outward rounding.
//!
//! Every arithmetic result is widened by one ulp on each side, which
//! covers the half-ulp error of round-to-nearest. The enclosures built on
//! top of this type are therefore sound even though the intermediate
//! arithmetic is floating point.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, ToPrimitive};
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub const ZERO: Interval = Interval { lo: 0.0, hi: 0.0 };

    pub fn new(lo: f64, hi: f64) -> Self {
        assert!(lo <= hi, "empty interval [{lo}, {hi}]");
        Interval { lo, hi }
    }

    /// An exactly representable value.
    pub fn point(x: f64) -> Self {
        Interval { lo: x, hi: x }
    }

    /// A value known to within one ulp (e.g. a correctly rounded constant).
    pub fn around(x: f64) -> Self {
        Interval { lo: x.next_down(), hi: x.next_up() }
    }

    pub fn from_int(n: i128) -> Self {
        let x = n as f64;
        if x as i128 == n {
            Interval::point(x)
        } else {
            Interval::around(x)
        }
    }

    pub fn from_bigint(n: &BigInt) -> Self {
        let x = n.to_f64().unwrap_or(f64::INFINITY);
        if x.is_finite() && BigInt::from_f64(x).as_ref() == Some(n) {
            return Interval::point(x);
        }
        Interval { lo: x.next_down().next_down(), hi: x.next_up().next_up() }
    }

    pub fn from_rational(r: &BigRational) -> Self {
        if r.is_integer() {
            return Interval::from_bigint(r.numer());
        }
        let x = r.to_f64().unwrap_or(f64::NAN);
        if !x.is_finite() {
            let num = Interval::from_bigint(r.numer());
            let den = Interval::from_bigint(r.denom());
            return num / den;
        }
        Interval { lo: x.next_down().next_down(), hi: x.next_up().next_up() }
    }

    pub fn mid(&self) -> f64 {
        0.5 * self.lo + 0.5 * self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn radius(&self) -> f64 {
        0.5 * (self.hi - self.lo)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    /// Grows the interval by `r` on both sides.
    pub fn inflate(&self, r: f64) -> Self {
        debug_assert!(r >= 0.0);
        Interval { lo: (self.lo - r).next_down(), hi: (self.hi + r).next_up() }
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        (lo <= hi).then_some(Interval { lo, hi })
    }

    pub fn hull(&self, other: &Interval) -> Interval {
        Interval { lo: self.lo.min(other.lo), hi: self.hi.max(other.hi) }
    }

    pub fn max_with(&self, x: f64) -> Interval {
        Interval { lo: self.lo.max(x), hi: self.hi.max(x) }
    }

    pub fn min_with(&self, x: f64) -> Interval {
        Interval { lo: self.lo.min(x), hi: self.hi.min(x) }
    }

    pub fn square(&self) -> Interval {
        if self.lo >= 0.0 {
            Interval { lo: (self.lo * self.lo).next_down().max(0.0), hi: (self.hi * self.hi).next_up() }
        } else if self.hi <= 0.0 {
            Interval { lo: (self.hi * self.hi).next_down().max(0.0), hi: (self.lo * self.lo).next_up() }
        } else {
            let m = self.lo.abs().max(self.hi.abs());
            Interval { lo: 0.0, hi: (m * m).next_up() }
        }
    }

    pub fn recip(&self) -> Interval {
        Interval::point(1.0) / *self
    }

    pub fn sqrt(&self) -> Interval {
        Interval { lo: self.lo.max(0.0).sqrt().next_down().max(0.0), hi: self.hi.max(0.0).sqrt().next_up() }
    }

    pub fn ln(&self) -> Interval {
        // libm ln is within 1 ulp; two steps of widening cover it.
        Interval { lo: self.lo.ln().next_down().next_down(), hi: self.hi.ln().next_up().next_up() }
    }

    /// `lhs <= rhs` is certain.
    pub fn certainly_le(&self, rhs: &Interval) -> bool {
        self.hi <= rhs.lo
    }

    /// `lhs > rhs` is certain.
    pub fn certainly_gt(&self, rhs: &Interval) -> bool {
        self.lo > rhs.hi
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:.16e}, {:.16e}]", self.lo, self.hi)
    }
}

impl Add for Interval {
    type Output = Interval;
    fn add(self, rhs: Interval) -> Interval {
        Interval { lo: (self.lo + rhs.lo).next_down(), hi: (self.hi + rhs.hi).next_up() }
    }
}

impl Sub for Interval {
    type Output = Interval;
    fn sub(self, rhs: Interval) -> Interval {
        Interval { lo: (self.lo - rhs.hi).next_down(), hi: (self.hi - rhs.lo).next_up() }
    }
}

impl Neg for Interval {
    type Output = Interval;
    fn neg(self) -> Interval {
        Interval { lo: -self.hi, hi: -self.lo }
    }
}

impl Mul for Interval {
    type Output = Interval;
    fn mul(self, rhs: Interval) -> Interval {
        let c = [self.lo * rhs.lo, self.lo * rhs.hi, self.hi * rhs.lo, self.hi * rhs.hi];
        let lo = c.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = c.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Interval { lo: lo.next_down(), hi: hi.next_up() }
    }
}

impl Div for Interval {
    type Output = Interval;
    fn div(self, rhs: Interval) -> Interval {
        assert!(rhs.lo > 0.0 || rhs.hi < 0.0, "division by an interval containing zero");
        let c = [self.lo / rhs.lo, self.lo / rhs.hi, self.hi / rhs.lo, self.hi / rhs.hi];
        let lo = c.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = c.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Interval { lo: lo.next_down(), hi: hi.next_up() }
    }
}

impl Mul<f64> for Interval {
    type Output = Interval;
    fn mul(self, rhs: f64) -> Interval {
        self * Interval::point(rhs)
    }
}

impl std::iter::Sum for Interval {
    fn sum<I: Iterator<Item = Interval>>(iter: I) -> Interval {
        iter.fold(Interval::ZERO, |a, b| a + b)
    }
}

/// Interval constants used by the enclosure arithmetic.
pub mod consts {
    use super::Interval;

    pub fn pi() -> Interval {
        Interval::around(std::f64::consts::PI)
    }

    pub fn pi2() -> Interval {
        pi().square()
    }

    pub fn pi4() -> Interval {
        pi2().square()
    }

    /// Apéry's constant ζ(3).
    pub fn zeta3() -> Interval {
        Interval::around(1.202_056_903_159_594_2)
    }

    pub fn ln2() -> Interval {
        Interval::around(std::f64::consts::LN_2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pi_is_enclosed() {
        let p = consts::pi();
        assert!(p.lo < std::f64::consts::PI && std::f64::consts::PI < p.hi);
        // the f64 constant sits just below π, so the upper end must clear the next float
        assert!(p.hi >= std::f64::consts::PI.next_up());
    }

    #[test]
    fn third_times_three_contains_one() {
        let third = Interval::point(1.0) / Interval::point(3.0);
        let one = third * Interval::point(3.0);
        assert!(one.contains(1.0));
        assert!(one.width() < 1e-15);
    }

    #[test]
    fn rational_conversion_encloses() {
        let r = BigRational::new(BigInt::from(1), BigInt::from(10));
        let i = Interval::from_rational(&r);
        assert!(i.contains(0.1));
        assert!(i.lo < i.hi);
    }

    #[test]
    fn square_of_straddling_interval() {
        let i = Interval::new(-2.0, 1.0).square();
        assert_eq!(i.lo, 0.0);
        assert!(i.hi >= 4.0);
    }
}
