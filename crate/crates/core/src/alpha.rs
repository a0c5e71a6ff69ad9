//! The rotation number `α` in the two representations used downstream:
//! an exact reduced fraction `p/q`, or a fixed-point fractional part
//! together with (a prefix of) its continued fraction.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{Num, One, ToPrimitive};

use crate::cf::{cf_of_rational, cf_of_surd, euclid_prefix, ContinuedFraction, QuadraticSurd};
use crate::error::{Error, Result};
use crate::fixedpoint::{eval_alpha, Fixed128, FixedPointReal, DEFAULT_BITS};

/// Textual description of `α`: `p/q`, `surd:P,D,Q`, `rule:name` or
/// `bits:<hex>@B`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AlphaSpec {
    Rational { p: i64, q: u64 },
    Surd { p: i64, d: i64, q: i64 },
    Rule(String),
    Bits { mantissa: BigUint, bits: u32 },
}

impl fmt::Display for AlphaSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlphaSpec::Rational { p, q } => write!(f, "{p}/{q}"),
            AlphaSpec::Surd { p, d, q } => write!(f, "surd:{p},{d},{q}"),
            AlphaSpec::Rule(name) => write!(f, "rule:{name}"),
            AlphaSpec::Bits { mantissa, bits } => write!(f, "bits:{}@{bits}", mantissa.to_str_radix(16)),
        }
    }
}

fn parse_int<T: FromStr>(s: &str, what: &str) -> Result<T> {
    s.trim().parse().map_err(|_| Error::invalid(format!("cannot parse {what} from `{s}`")))
}

impl FromStr for AlphaSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(rest) = s.strip_prefix("surd:") {
            let parts: Vec<&str> = rest.split(',').collect();
            let [p, d, q] = parts[..] else {
                return Err(Error::invalid(format!("surd needs P,D,Q, got `{rest}`")));
            };
            return Ok(AlphaSpec::Surd { p: parse_int(p, "P")?, d: parse_int(d, "D")?, q: parse_int(q, "Q")? });
        }
        if let Some(rest) = s.strip_prefix("rule:") {
            // validate eagerly so bad names fail at parse time
            ContinuedFraction::named(rest)?;
            return Ok(AlphaSpec::Rule(rest.trim().to_string()));
        }
        if let Some(rest) = s.strip_prefix("bits:") {
            let (hex, bits) = rest.split_once('@').ok_or_else(|| Error::invalid("bits spec needs `<hex>@B`"))?;
            let bits: u32 = parse_int(bits, "B")?;
            let hex = hex.trim().trim_start_matches("0x");
            let mantissa =
                BigUint::from_str_radix(hex, 16).map_err(|_| Error::invalid(format!("bad hex mantissa `{hex}`")))?;
            if bits == 0 || mantissa.bits() > bits as u64 {
                return Err(Error::invalid(format!("mantissa does not fit in {bits} bits")));
            }
            return Ok(AlphaSpec::Bits { mantissa, bits });
        }
        if let Some((p, q)) = s.split_once('/') {
            let q: u64 = parse_int(q, "denominator")?;
            if q == 0 {
                return Err(Error::invalid("denominator must be positive"));
            }
            return Ok(AlphaSpec::Rational { p: parse_int(p, "numerator")?, q });
        }
        Err(Error::invalid(format!("unrecognized alpha `{s}`")))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum AlphaValue {
    /// Reduced `p/q` with `0 <= p < q`.
    Rational {
        p: u64,
        q: u64,
    },
    Fixed(FixedPointReal),
}

/// The fractional part of a real `α` with its expansion (`a0 = 0`).
#[derive(Clone, Debug, PartialEq)]
pub struct Alpha {
    cf: ContinuedFraction,
    value: AlphaValue,
}

impl Alpha {
    pub fn rational(p: i64, q: u64) -> Result<Self> {
        if q == 0 {
            return Err(Error::invalid("denominator must be positive"));
        }
        let r = (p as i128).rem_euclid(q as i128) as u64;
        let g = r.gcd(&q);
        let (p, q) = (r / g, q / g);
        Ok(Alpha { cf: cf_of_rational(p as i64, q)?, value: AlphaValue::Rational { p, q } })
    }

    /// From any expansion; only the fractional part is kept.
    pub fn from_cf(cf: &ContinuedFraction, bits: u32) -> Result<Self> {
        let frac = cf.with_a0(0);
        if let Some(r) = frac.to_rational() {
            let p = r.numer().to_i64().ok_or_else(|| Error::TooLarge("numerator exceeds i64".into()))?;
            let q = r.denom().to_u64().ok_or_else(|| Error::TooLarge("denominator exceeds u64".into()))?;
            return Alpha::rational(p, q);
        }
        let value = eval_alpha(&frac, bits)?;
        Ok(Alpha { cf: frac, value: AlphaValue::Fixed(value) })
    }

    /// An exactly known dyadic fractional part `mantissa / 2^B`. The
    /// expansion is kept while `q_k² <= 2^(B-64)`, where it still reflects a
    /// typical real rather than the dyadic denominator.
    pub fn from_bits(mantissa: BigUint, bits: u32) -> Result<Self> {
        let fp = FixedPointReal::new(mantissa, bits, 0)?;
        let den = BigUint::one() << bits;
        let limit = BigUint::one() << bits.saturating_sub(64);
        let (quotients, _) = euclid_prefix(&fp.mantissa, &den, |q| q * q > limit);
        let cf = ContinuedFraction::truncated(0, quotients)?;
        Ok(Alpha { cf, value: AlphaValue::Fixed(fp) })
    }

    pub fn from_spec(spec: &AlphaSpec, bits: u32) -> Result<Self> {
        match spec {
            AlphaSpec::Rational { p, q } => Alpha::rational(*p, *q),
            AlphaSpec::Surd { p, d, q } => {
                let s = QuadraticSurd::normalized(*p, *d, *q)?;
                Alpha::from_cf(&cf_of_surd(&s)?, bits)
            }
            AlphaSpec::Rule(name) => Alpha::from_cf(&ContinuedFraction::named(name)?, bits),
            AlphaSpec::Bits { mantissa, bits } => Alpha::from_bits(mantissa.clone(), *bits),
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Alpha::from_spec(&s.parse()?, DEFAULT_BITS)
    }

    pub fn cf(&self) -> &ContinuedFraction {
        &self.cf
    }

    pub fn value(&self) -> &AlphaValue {
        &self.value
    }

    pub fn as_rational(&self) -> Option<(u64, u64)> {
        match self.value {
            AlphaValue::Rational { p, q } => Some((p, q)),
            AlphaValue::Fixed(_) => None,
        }
    }

    pub fn is_rational(&self) -> bool {
        self.as_rational().is_some()
    }

    pub fn to_f64(&self) -> f64 {
        match &self.value {
            AlphaValue::Rational { p, q } => *p as f64 / *q as f64,
            AlphaValue::Fixed(x) => x.to_f64(),
        }
    }

    /// The 128-bit fixed-point form. Exact for dyadic values; for other
    /// rationals the rounding error is one unit.
    pub fn fixed128(&self) -> Fixed128 {
        match &self.value {
            AlphaValue::Rational { p, q } => {
                let num = BigUint::from(*p) << 128u32;
                let (a, r) = num.div_rem(&BigUint::from(*q));
                Fixed128 { a: a.to_u128().expect("p < q"), err: u128::from(r.bits() > 0) }
            }
            AlphaValue::Fixed(x) => x.to_fixed128(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_round_trip() {
        for s in ["13/30", "-7/3", "surd:0,5,2", "surd:1,5,2", "rule:euler_e", "rule:constant(3)", "bits:ff01@16"] {
            let spec: AlphaSpec = s.parse().unwrap();
            assert_eq!(spec.to_string(), s);
            assert_eq!(spec.to_string().parse::<AlphaSpec>().unwrap(), spec);
        }
        assert!("1/0".parse::<AlphaSpec>().is_err());
        assert!("rule:pi".parse::<AlphaSpec>().is_err());
        assert!("bits:1ff@8".parse::<AlphaSpec>().is_err());
        assert!("surd:1,2".parse::<AlphaSpec>().is_err());
        assert!("banana".parse::<AlphaSpec>().is_err());
    }

    #[test]
    fn rationals_are_reduced_to_fractional_part() {
        let a = Alpha::parse("-7/3").unwrap();
        assert_eq!(a.as_rational(), Some((2, 3)));
        assert_eq!(a.cf().to_string(), "[0;1,2]");
        let a = Alpha::parse("10/4").unwrap();
        assert_eq!(a.as_rational(), Some((1, 2)));
    }

    #[test]
    fn surd_input_is_normalized() {
        let a = Alpha::parse("surd:0,5,2").unwrap();
        assert!((a.to_f64() - (5f64.sqrt() / 2.0 - 1.0)).abs() < 1e-15);
        let phi = Alpha::parse("surd:1,5,2").unwrap();
        assert!((phi.to_f64() - 0.618_033_988_749_894_8).abs() < 1e-15);
        assert_eq!(phi.cf().to_string(), "[0;overline(1)]");
    }

    #[test]
    fn bits_expansion_is_truncated() {
        let a = Alpha::parse("bits:8@4").unwrap();
        assert_eq!(a.to_f64(), 0.5);
        let a = Alpha::from_bits(BigUint::from(0x9e37_79b9_7f4a_7c15u64) << 192u32, 256).unwrap();
        assert!(a.cf().len().unwrap() > 20);
        assert!(a.fixed128().err == 0);
    }

    #[test]
    fn fixed128_of_rational() {
        let a = Alpha::rational(1, 4).unwrap().fixed128();
        assert_eq!((a.a, a.err), (1u128 << 126, 0));
        let a = Alpha::rational(1, 3).unwrap().fixed128();
        assert_eq!(a.err, 1);
    }
}
