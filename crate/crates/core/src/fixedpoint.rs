//! Fixed-point evaluation of `α`, `{nα}`, `‖mα‖` and the Birkhoff sums
//! `T_n`, `E_N`.
//!
//! A [`FixedPointReal`] stores a fractional part as `mantissa / 2^B` with an
//! explicit error counter in units of `2^-B`. Rational `α` never goes
//! through here; see [`crate::alpha::Alpha`].

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::cf::{Body, ContinuedFraction};
use crate::error::{Error, Result};
use crate::interval::Interval;

pub const DEFAULT_BITS: u32 = 256;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FixedPointReal {
    pub mantissa: BigUint,
    pub bits: u32,
    /// Bound on `|true - mantissa / 2^B| * 2^B`.
    pub err_ulp: u128,
}

impl FixedPointReal {
    pub fn new(mantissa: BigUint, bits: u32, err_ulp: u128) -> Result<Self> {
        if mantissa.bits() > bits as u64 {
            return Err(Error::invalid(format!("mantissa does not fit in {bits} bits")));
        }
        Ok(FixedPointReal { mantissa, bits, err_ulp })
    }

    pub fn zero(bits: u32) -> Self {
        FixedPointReal { mantissa: BigUint::zero(), bits, err_ulp: 0 }
    }

    fn scale(&self) -> BigUint {
        BigUint::one() << self.bits
    }

    pub fn to_f64(&self) -> f64 {
        BigRational::new(BigInt::from(self.mantissa.clone()), BigInt::from(self.scale())).to_f64().unwrap_or(0.0)
    }

    /// Absolute error bound as a float (rounded up).
    pub fn err_f64(&self) -> f64 {
        (self.err_ulp as f64 * 2f64.powi(-(self.bits as i32))).next_up()
    }

    pub fn enclosure(&self) -> Interval {
        let v = self.to_f64();
        Interval::around(v).inflate(self.err_f64())
    }

    /// The 128-bit form used by the hot loops.
    pub fn to_fixed128(&self) -> Fixed128 {
        if self.bits >= 128 {
            let shift = self.bits - 128;
            let a = (&self.mantissa >> shift).to_u128().expect("fits in 128 bits");
            // truncation loses < 1 unit; the scaled error rounds up
            let e = if shift == 0 {
                self.err_ulp
            } else if shift >= 128 {
                u128::from(self.err_ulp > 0)
            } else {
                self.err_ulp.div_ceil(1u128 << shift)
            };
            let dropped = shift > 0 && self.mantissa.trailing_zeros().is_some_and(|z| z < shift as u64);
            Fixed128 { a, err: e.saturating_add(u128::from(dropped)) }
        } else {
            let shift = 128 - self.bits;
            let a = self.mantissa.to_u128().expect("fits") << shift;
            Fixed128 { a, err: self.err_ulp.saturating_mul(1u128 << shift) }
        }
    }
}

/// `{nα}` for `n >= 0`: `(n · mantissa) mod 2^B`, error `n · err`.
pub fn frac_multiple(x: &FixedPointReal, n: u64) -> Result<FixedPointReal> {
    let err = x.err_ulp.checked_mul(n as u128).ok_or_else(|| Error::precision("error counter overflow"))?;
    if x.bits / 2 < 128 && err >= 1u128 << (x.bits / 2) {
        return Err(Error::precision(format!("error {err} ulp exceeds 2^(B/2) at B = {}", x.bits)));
    }
    let mantissa = (&x.mantissa * BigUint::from(n)) & (x.scale() - 1u32);
    Ok(FixedPointReal { mantissa, bits: x.bits, err_ulp: err })
}

/// `‖x‖ = min(x, 1 - x)` for a fractional part.
pub fn dist_to_int(x: &FixedPointReal) -> FixedPointReal {
    let other = x.scale() - &x.mantissa;
    let mantissa = if other < x.mantissa { other } else { x.mantissa.clone() };
    FixedPointReal { mantissa, bits: x.bits, err_ulp: x.err_ulp }
}

/// Fractional part of `α` to `B` bits from its continued fraction.
///
/// Runs the convergent recursion until `q_k² > 2^(B+8)`, so that
/// `|α - p_k/q_k| < 2^(-B-8)`; with rounding the error is at most 2 ulp.
/// A finite expansion is evaluated exactly and rounded down.
pub fn eval_alpha(cf: &ContinuedFraction, bits: u32) -> Result<FixedPointReal> {
    let a0 = BigInt::from(cf.a0());
    let target = BigUint::one() << (bits + 8);
    let (mut p_prev, mut q_prev) = (BigInt::one(), BigInt::zero());
    let (mut p, mut q) = (a0.clone(), BigInt::one());
    let mut k = 1;
    let exact = loop {
        let q_sq = (&q * &q).to_biguint().expect("q > 0");
        if q_sq > target {
            break false;
        }
        match cf.quotient(k) {
            Some(a) => {
                let a = BigInt::from(a);
                let p_next = &a * &p + &p_prev;
                let q_next = &a * &q + &q_prev;
                p_prev = std::mem::replace(&mut p, p_next);
                q_prev = std::mem::replace(&mut q, q_next);
                k += 1;
            }
            None if matches!(cf.body(), Body::Finite(_)) => break true,
            None => {
                return Err(Error::precision(format!(
                    "expansion ends at k = {} before q_k² exceeds 2^{}",
                    k - 1,
                    bits + 8
                )))
            }
        }
    };
    // frac = p/q - a0, possibly a hair below 0 for irrational α
    let num = (&p - &a0 * &q) << bits;
    let (floor, rem) = num.div_mod_floor(&q);
    let max = (BigInt::one() << bits) - 1;
    let mantissa = floor.clamp(BigInt::zero(), max);
    let err_ulp = if exact { u128::from(!rem.is_zero()) } else { 2 };
    Ok(FixedPointReal { mantissa: mantissa.to_biguint().expect("clamped"), bits, err_ulp })
}

/// A fractional part as `a / 2^128` with error at most `err / 2^128`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Fixed128 {
    pub a: u128,
    pub err: u128,
}

/// Two-sided bound on `‖mα‖` in units of `2^-128`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DistBound {
    pub lo: u128,
    pub hi: u128,
}

const TWO_POW_128: f64 = 340_282_366_920_938_463_463_374_607_431_768_211_456.0;

fn u128_interval(x: u128) -> Interval {
    let f = x as f64;
    if f as u128 == x && f < TWO_POW_128 {
        Interval::point(f)
    } else {
        Interval::around(f)
    }
}

impl Fixed128 {
    /// `{mα}` numerator (wrapping) and its error `m · err`.
    #[inline]
    pub fn frac(&self, m: u64) -> (u128, u128) {
        (self.a.wrapping_mul(m as u128), self.err.saturating_mul(m as u128))
    }

    /// Bounds on `‖mα‖ · 2^128`. Fails when the error reaches the distance,
    /// since then the nearest integer is not determined.
    #[inline]
    pub fn dist(&self, m: u64) -> Result<DistBound> {
        let (r, e) = self.frac(m);
        let d = r.min(r.wrapping_neg());
        if e == 0 {
            return Ok(DistBound { lo: d, hi: d });
        }
        if d <= e {
            return Err(Error::precision(format!("‖mα‖ undetermined at m = {m}")));
        }
        Ok(DistBound { lo: d - e, hi: d.saturating_add(e) })
    }

    /// `‖mα‖` as an interval of reals.
    #[inline]
    pub fn dist_interval(&self, m: u64) -> Result<Interval> {
        let b = self.dist(m)?;
        let scale = Interval::point(TWO_POW_128);
        Ok(Interval { lo: u128_interval(b.lo).lo, hi: u128_interval(b.hi).hi } / scale)
    }
}

/// Exact Birkhoff sums for `α = p/q`: `T_n = t[n] / (2q)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactBirkhoff {
    pub q: u64,
    pub t: Vec<i128>,
}

/// Certified Birkhoff sums for irrational `α`.
#[derive(Clone, Debug, PartialEq)]
pub struct CertifiedBirkhoff {
    pub t: Vec<Interval>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum BirkhoffSums {
    Exact(ExactBirkhoff),
    Certified(CertifiedBirkhoff),
}

impl BirkhoffSums {
    pub fn len(&self) -> usize {
        match self {
            BirkhoffSums::Exact(b) => b.t.len(),
            BirkhoffSums::Certified(b) => b.t.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn t_interval(&self, n: usize) -> Interval {
        match self {
            BirkhoffSums::Exact(b) => Interval::from_rational(&b.t_rational(n)),
            BirkhoffSums::Certified(b) => b.t[n],
        }
    }

    pub fn e_interval(&self) -> Interval {
        match self {
            BirkhoffSums::Exact(b) => Interval::from_rational(&b.e_n()),
            BirkhoffSums::Certified(b) => {
                let s: Interval = b.t.iter().copied().sum();
                s / Interval::from_int(b.t.len() as i128)
            }
        }
    }

    /// `(1/N) Σ (T_n² + T_n/2)`.
    pub fn t_block(&self) -> Interval {
        match self {
            BirkhoffSums::Exact(b) => Interval::from_rational(&b.t_block()),
            BirkhoffSums::Certified(b) => {
                let s: Interval = b.t.iter().map(|&t| t.square() + t * 0.5).sum();
                s / Interval::from_int(b.t.len() as i128)
            }
        }
    }
}

fn rat(n: impl Into<BigInt>, d: impl Into<BigInt>) -> BigRational {
    BigRational::new(n.into(), d.into())
}

impl ExactBirkhoff {
    pub fn t_rational(&self, n: usize) -> BigRational {
        rat(self.t[n], 2 * self.q as i128)
    }

    /// `E_N = (1/N) Σ_{n<N} T_n`.
    pub fn e_n(&self) -> BigRational {
        let s: BigInt = self.t.iter().map(|&t| BigInt::from(t)).sum();
        rat(s, BigInt::from(2 * self.q as i128) * BigInt::from(self.t.len()))
    }

    /// `(1/N) Σ (T_n² + T_n/2)`.
    pub fn t_block(&self) -> BigRational {
        // T² + T/2 = (t² + q t) / (4q²)
        let q = self.q as i128;
        let s: BigInt = self.t.iter().map(|&t| BigInt::from(t) * BigInt::from(t) + BigInt::from(q * t)).sum();
        rat(s, BigInt::from(4 * q * q) * BigInt::from(self.t.len()))
    }

    /// `(1/N) Σ (T_n - E_N)²`.
    pub fn variance(&self) -> BigRational {
        let e = self.e_n();
        let n = BigRational::from_integer(BigInt::from(self.t.len()));
        let s = self.t.iter().fold(BigRational::zero(), |acc, &t| {
            let d = rat(t, 2 * self.q as i128) - &e;
            acc + &d * &d
        });
        s / n
    }
}

/// `T_0..T_{N-1}` for `α = p/q` exactly.
pub fn birkhoff_rational(p: u64, q: u64, n: usize) -> Result<ExactBirkhoff> {
    if q == 0 || n == 0 {
        return Err(Error::invalid("need q >= 1 and N >= 1"));
    }
    let p = p % q;
    let mut t = Vec::with_capacity(n);
    let (mut acc, mut r) = (0i128, 0u64);
    for _ in 0..n {
        // 1/2 - r/q = (q - 2r) / (2q)
        acc += q as i128 - 2 * r as i128;
        t.push(acc);
        r = ((r as u128 + p as u128) % q as u128) as u64;
    }
    Ok(ExactBirkhoff { q, t })
}

/// `T_0..T_{N-1}` for a fixed-point `α` with certified error.
pub fn birkhoff_fixed(alpha: &Fixed128, n: usize) -> Result<CertifiedBirkhoff> {
    if n == 0 {
        return Err(Error::invalid("N must be at least 1"));
    }
    // exact running sum of 2^127 - r_l in i128 pieces would overflow, so
    // the sum is kept in scaled floats with an explicit error term
    let half = Interval::point(0.5);
    let scale = Interval::point(TWO_POW_128);
    let mut t = Vec::with_capacity(n);
    let mut acc = Interval::ZERO;
    for l in 0..n as u64 {
        let (r, e) = alpha.frac(l);
        if e > 0 && (r <= e || r.wrapping_neg() <= e) {
            return Err(Error::precision(format!("{{lα}} undetermined near 0 at l = {l}")));
        }
        let x =
            Interval { lo: u128_interval(r.saturating_sub(e)).lo, hi: u128_interval(r.saturating_add(e)).hi } / scale;
        acc = acc + (half - x);
        t.push(acc);
    }
    Ok(CertifiedBirkhoff { t })
}

/// Starred sums `T*_n = Σ_{l<=n} (1/2 - 1/(2q) - {lp/q})` for `n < q`, with
/// numerators over `2q`.
pub fn starred_sums(p: u64, q: u64) -> Result<ExactBirkhoff> {
    if q == 0 || p.gcd(&q) != 1 {
        return Err(Error::invalid("need gcd(p, q) = 1"));
    }
    let mut t = Vec::with_capacity(q as usize);
    let (mut acc, mut r) = (0i128, 0u64);
    for _ in 0..q {
        acc += q as i128 - 1 - 2 * r as i128;
        t.push(acc);
        r = ((r as u128 + p as u128) % q as u128) as u64;
    }
    Ok(ExactBirkhoff { q, t })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cf::{cf_of_rational, ContinuedFraction};
    use num_traits::Signed;

    fn golden_frac_oracle(bits: u32) -> BigUint {
        // (√5 - 1)/2 * 2^B = (√(5·4^B) - 2^B) / 2
        let five = BigUint::from(5u32) << (2 * bits);
        (five.sqrt() - (BigUint::one() << bits)) >> 1u32
    }

    #[test]
    fn golden_ratio_at_64_bits() {
        let x = eval_alpha(&ContinuedFraction::golden(), 64).unwrap();
        let oracle = golden_frac_oracle(64);
        let diff = if x.mantissa > oracle { &x.mantissa - &oracle } else { &oracle - &x.mantissa };
        assert!(diff <= BigUint::from(2u32));
        assert!((x.to_f64() - 0.618_033_988_749_894_8).abs() < 1e-15);
    }

    #[test]
    fn half_is_exact() {
        let x = eval_alpha(&cf_of_rational(1, 2).unwrap(), 8).unwrap();
        assert_eq!(x.mantissa, BigUint::from(128u32));
        assert_eq!(x.err_ulp, 0);
        let three = frac_multiple(&x, 3).unwrap();
        assert_eq!(three.mantissa, BigUint::from(128u32));
        assert_eq!(frac_multiple(&x, 0).unwrap(), FixedPointReal::zero(8));
    }

    #[test]
    fn euler_e_matches_factorial_series() {
        let bits = 256;
        // e - 2 = Σ_{k>=2} 1/k!, truncated at k = 80 (remainder < 2^-400)
        let mut num = BigUint::zero();
        let mut fact = BigUint::one();
        let kmax = 80u32;
        for k in 1..=kmax {
            fact *= k;
        }
        let mut term = BigUint::one();
        for k in (2..=kmax).rev() {
            num += &term;
            term *= k;
        }
        let oracle = (num << bits) / fact;
        let x = eval_alpha(&ContinuedFraction::named("euler_e").unwrap(), bits).unwrap();
        let diff = if x.mantissa > oracle { &x.mantissa - &oracle } else { &oracle - &x.mantissa };
        assert!(diff <= BigUint::from(3u32), "diff = {diff}");
    }

    #[test]
    fn double_golden() {
        let x = eval_alpha(&ContinuedFraction::golden(), 64).unwrap();
        let two = frac_multiple(&x, 2).unwrap();
        assert!((two.to_f64() - (5f64.sqrt() - 2.0)).abs() < 1e-15);
        assert_eq!(two.err_ulp, 4);
    }

    #[test]
    fn distance_examples() {
        let three_quarters = FixedPointReal::new(BigUint::from(3u32), 2, 0).unwrap();
        assert_eq!(dist_to_int(&three_quarters).mantissa, BigUint::one());
        let half = FixedPointReal::new(BigUint::from(2u32), 2, 0).unwrap();
        assert_eq!(dist_to_int(&half).mantissa, BigUint::from(2u32));
    }

    #[test]
    fn golden_convergent_distances() {
        let g = ContinuedFraction::golden();
        let x = eval_alpha(&g, 256).unwrap().to_fixed128();
        let (mut q_prev, mut q) = (1u64, 1u64);
        for _k in 1..=30 {
            let next = q + q_prev;
            let d = x.dist_interval(q).unwrap();
            assert!(d.lo >= 1.0 / (next + q) as f64 * (1.0 - 1e-12));
            assert!(d.hi <= 1.0 / next as f64 * (1.0 + 1e-12));
            q_prev = q;
            q = next;
        }
    }

    #[test]
    fn truncated_expansion_is_precision_error() {
        let t = ContinuedFraction::truncated(0, vec![1, 2, 3]).unwrap();
        assert!(matches!(eval_alpha(&t, 64), Err(Error::PrecisionExhausted(_))));
    }

    #[test]
    fn birkhoff_small_cases() {
        let b = birkhoff_rational(0, 1, 1).unwrap();
        assert_eq!(b.t_rational(0), rat(1, 2));
        assert_eq!(b.e_n(), rat(1, 2));
        let b = birkhoff_rational(1, 2, 2).unwrap();
        assert_eq!((b.t_rational(0), b.t_rational(1)), (rat(1, 2), rat(1, 2)));
        assert_eq!(b.e_n(), rat(1, 2));
    }

    #[test]
    fn en_near_alternating_sum_for_golden() {
        let x = eval_alpha(&ContinuedFraction::golden(), 256).unwrap().to_fixed128();
        let b = BirkhoffSums::Certified(birkhoff_fixed(&x, 89).unwrap());
        let main = (1..=10).map(|k| if k % 2 == 0 { 1.0 } else { -1.0 }).sum::<f64>() / 12.0;
        let e = b.e_interval();
        assert!(e.width() < 1e-10);
        assert!((e.mid() - main).abs() <= 2.0);
    }

    #[test]
    fn starred_examples() {
        let s = starred_sums(1, 2).unwrap();
        assert_eq!(s.t_rational(0), rat(1, 4));
        assert_eq!(s.t_rational(1), rat(0, 1));
        for q in 2..40u64 {
            for p in 1..q {
                if p.gcd(&q) != 1 {
                    continue;
                }
                let s = starred_sums(p, q).unwrap();
                let b = birkhoff_rational(p, q, q as usize).unwrap();
                for n in 0..q as usize {
                    let d = b.t_rational(n) - s.t_rational(n);
                    assert!(d.abs() < BigRational::one());
                }
            }
        }
    }

    #[test]
    fn telescoping_identity() {
        for (p, q, n) in [(2u64, 5u64, 7usize), (13, 30, 30), (3, 7, 1), (89, 144, 200)] {
            let b = birkhoff_rational(p, q, n).unwrap();
            let lhs = b.e_n() * BigRational::from_integer(BigInt::from(n));
            let rhs = (0..n).fold(BigRational::zero(), |acc, l| {
                let frac = rat(((l as u64 * p) % q) as i64, q as i64);
                acc + (rat(1, 2) - frac) * BigRational::from_integer(BigInt::from(n - l))
            });
            assert_eq!(lhs, rhs);
            // T-block identity
            let e = b.e_n();
            assert_eq!(b.t_block(), b.variance() + &e * &e + e / BigInt::from(2));
        }
    }

    #[test]
    fn fixed128_error_scaling() {
        let x = FixedPointReal::new(BigUint::one() << 255u32, 256, 5).unwrap();
        let f = x.to_fixed128();
        assert_eq!(f.a, 1u128 << 127);
        assert!(f.err >= 1);
        let y = FixedPointReal::new(BigUint::from(3u32), 2, 1).unwrap().to_fixed128();
        assert_eq!(y.a, 3u128 << 126);
        assert_eq!(y.err, 1u128 << 126);
    }
}
