//! Continued fractions: construction, convergents and partial-quotient
//! statistics.
//!
//! A [`ContinuedFraction`] is `[a0; a1, a2, ...]` where the body is finite,
//! eventually periodic, generated by a rule, or a finite prefix of an
//! unknown real (`Truncated`). Partial quotients `a_k` for `k >= 1` are
//! stored as `u64` and are always at least 1.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_integer::{Integer, Roots};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

/// A named generator `k -> a_k` for `k >= 1`.
#[derive(Clone)]
pub struct Rule {
    name: String,
    f: Arc<dyn Fn(usize) -> u64 + Send + Sync>,
}

impl Rule {
    pub fn new(name: impl Into<String>, f: impl Fn(usize) -> u64 + Send + Sync + 'static) -> Self {
        Rule { name: name.into(), f: Arc::new(f) }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn quotient(&self, k: usize) -> u64 {
        (self.f)(k)
    }
}

impl fmt::Debug for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("Rule").field(&self.name).finish()
    }
}

impl PartialEq for Rule {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Body {
    Finite(Vec<u64>),
    Periodic {
        pre: Vec<u64>,
        period: Vec<u64>,
    },
    Rule(Rule),
    /// A finite prefix of an infinite expansion; asking past the end is a
    /// precision error rather than the end of a rational.
    Truncated(Vec<u64>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ContinuedFraction {
    a0: i64,
    body: Body,
}

fn check_quotients(q: &[u64]) -> Result<()> {
    match q.iter().position(|&a| a == 0) {
        Some(i) => Err(Error::invalid(format!("partial quotient a_{} is zero", i + 1))),
        None => Ok(()),
    }
}

impl ContinuedFraction {
    pub fn finite(a0: i64, quotients: Vec<u64>) -> Result<Self> {
        check_quotients(&quotients)?;
        Ok(ContinuedFraction { a0, body: Body::Finite(quotients) })
    }

    pub fn periodic(a0: i64, pre: Vec<u64>, period: Vec<u64>) -> Result<Self> {
        if period.is_empty() {
            return Err(Error::invalid("period must be nonempty"));
        }
        check_quotients(&pre)?;
        check_quotients(&period)?;
        Ok(ContinuedFraction { a0, body: Body::Periodic { pre, period } })
    }

    pub fn truncated(a0: i64, quotients: Vec<u64>) -> Result<Self> {
        check_quotients(&quotients)?;
        Ok(ContinuedFraction { a0, body: Body::Truncated(quotients) })
    }

    pub fn from_rule(a0: i64, rule: Rule) -> Self {
        ContinuedFraction { a0, body: Body::Rule(rule) }
    }

    /// `[1; 1, 1, ...]`, the golden ratio.
    pub fn golden() -> Self {
        ContinuedFraction::periodic(1, vec![], vec![1]).expect("valid")
    }

    /// Named rule expansions: `euler_e`, `tan_one`, `pow2_spikes` and
    /// `constant(c)` (also accepted as `constant:c`).
    pub fn named(name: &str) -> Result<Self> {
        let name = name.trim();
        match name {
            "euler_e" => Ok(Self::from_rule(2, Rule::new("euler_e", euler_e_quotient))),
            "tan_one" => Ok(Self::from_rule(1, Rule::new("tan_one", tan_one_quotient))),
            "pow2_spikes" => Ok(Self::from_rule(0, Rule::new("pow2_spikes", pow2_spikes_quotient))),
            _ => {
                let arg = name
                    .strip_prefix("constant(")
                    .and_then(|s| s.strip_suffix(')'))
                    .or_else(|| name.strip_prefix("constant:"))
                    .ok_or_else(|| Error::UnknownRule(name.to_string()))?;
                let c: u64 = arg.trim().parse().map_err(|_| Error::UnknownRule(name.to_string()))?;
                if c == 0 {
                    return Err(Error::invalid("constant rule needs c >= 1"));
                }
                Ok(Self::from_rule(0, Rule::new(format!("constant({c})"), move |_| c)))
            }
        }
    }

    pub fn a0(&self) -> i64 {
        self.a0
    }

    pub fn body(&self) -> &Body {
        &self.body
    }

    /// The same expansion with `a0` replaced; used to pass to the
    /// fractional part.
    pub fn with_a0(&self, a0: i64) -> Self {
        ContinuedFraction { a0, body: self.body.clone() }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self.body, Body::Finite(_))
    }

    /// Number of partial quotients after `a0`; `None` when infinite.
    pub fn len(&self) -> Option<usize> {
        match &self.body {
            Body::Finite(q) | Body::Truncated(q) => Some(q.len()),
            _ => None,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == Some(0)
    }

    /// `a_k` for `k >= 1`; `None` past the end of a finite body.
    pub fn quotient(&self, k: usize) -> Option<u64> {
        assert!(k >= 1, "partial quotients are indexed from 1");
        match &self.body {
            Body::Finite(q) | Body::Truncated(q) => q.get(k - 1).copied(),
            Body::Periodic { pre, period } => {
                if k <= pre.len() {
                    Some(pre[k - 1])
                } else {
                    Some(period[(k - 1 - pre.len()) % period.len()])
                }
            }
            Body::Rule(r) => Some(r.quotient(k)),
        }
    }

    /// `a_1, ..., a_K`.
    pub fn prefix(&self, count: usize) -> Result<Vec<u64>> {
        if let Some(len) = self.len() {
            if count > len {
                return Err(self.too_short(count));
            }
        }
        Ok((1..=count).map(|k| self.quotient(k).expect("checked length")).collect())
    }

    fn too_short(&self, needed: usize) -> Error {
        let available = self.len().unwrap_or(usize::MAX);
        match self.body {
            Body::Truncated(_) => {
                Error::precision(format!("truncated expansion has {available} partial quotients, {needed} requested"))
            }
            _ => Error::ExpansionTooShort { needed, available },
        }
    }

    /// The other expansion of a rational: `(.., a_r)` becomes
    /// `(.., a_r - 1, 1)` and vice versa. `None` for non-finite bodies.
    pub fn alternate(&self) -> Option<ContinuedFraction> {
        let Body::Finite(q) = &self.body else { return None };
        let mut q = q.clone();
        let mut a0 = self.a0;
        match q.last().copied() {
            None => {
                a0 -= 1;
                q.push(1);
            }
            Some(1) if q.len() == 1 => {
                q.clear();
                a0 += 1;
            }
            Some(1) => {
                q.pop();
                *q.last_mut().expect("len >= 2") += 1;
            }
            Some(last) => {
                *q.last_mut().expect("nonempty") = last - 1;
                q.push(1);
            }
        }
        Some(ContinuedFraction { a0, body: Body::Finite(q) })
    }

    /// Exact value of a finite expansion.
    pub fn to_rational(&self) -> Option<BigRational> {
        let Body::Finite(q) = &self.body else { return None };
        let mut num = BigInt::one();
        let mut den = BigInt::zero();
        // fold from the back: x = a + 1/x
        for &a in q.iter().rev() {
            let next = BigInt::from(a) * &num + &den;
            den = num;
            num = next;
        }
        let num = BigInt::from(self.a0) * &num + &den;
        Some(BigRational::new(num, if q.is_empty() { BigInt::one() } else { den_of(q) }))
    }
}

fn den_of(q: &[u64]) -> BigInt {
    let mut num = BigInt::one();
    let mut den = BigInt::zero();
    for &a in q.iter().rev() {
        let next = BigInt::from(a) * &num + &den;
        den = num;
        num = next;
    }
    num
}

fn euler_e_quotient(k: usize) -> u64 {
    if k % 3 == 2 {
        2 * (k as u64 + 1) / 3
    } else {
        1
    }
}

fn tan_one_quotient(k: usize) -> u64 {
    if k % 2 == 1 {
        k as u64
    } else {
        1
    }
}

fn pow2_spikes_quotient(k: usize) -> u64 {
    if k.is_power_of_two() {
        k as u64
    } else {
        1
    }
}

const RENDER_TERMS: usize = 12;

impl fmt::Display for ContinuedFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |q: &[u64]| q.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(",");
        write!(f, "[{};", self.a0)?;
        match &self.body {
            Body::Finite(q) => write!(f, "{}]", join(q)),
            Body::Truncated(q) => {
                if q.is_empty() {
                    write!(f, "...]")
                } else {
                    write!(f, "{},...]", join(q))
                }
            }
            Body::Periodic { pre, period } => {
                if !pre.is_empty() {
                    write!(f, "{},", join(pre))?;
                }
                write!(f, "overline({})]", join(period))
            }
            Body::Rule(_) => {
                let q: Vec<u64> = (1..=RENDER_TERMS).map(|k| self.quotient(k).unwrap()).collect();
                write!(f, "{},...]", join(&q))
            }
        }
    }
}

/// Canonical expansion of `p/q` (last quotient at least 2 unless `r = 1`).
pub fn cf_of_rational(p: i64, q: u64) -> Result<ContinuedFraction> {
    if q == 0 {
        return Err(Error::invalid("denominator must be positive"));
    }
    let (mut num, mut den) = (p as i128, q as i128);
    let a0 = Integer::div_floor(&num, &den);
    num -= a0 * den;
    let mut quotients = Vec::new();
    // now 0 <= num < den; expand den/num
    while num != 0 {
        let (a, r) = den.div_rem(&num);
        quotients.push(a as u64);
        den = num;
        num = r;
    }
    ContinuedFraction::finite(a0 as i64, quotients)
}

/// Euclidean algorithm on `num/den` with `0 <= num < den`, stopping once the
/// convergent denominator `q_k` satisfies `stop(q_k)` or a quotient does not
/// fit in `u64`. Returns the quotients and whether the expansion completed.
pub(crate) fn euclid_prefix(num: &BigUint, den: &BigUint, stop: impl Fn(&BigUint) -> bool) -> (Vec<u64>, bool) {
    let (mut n, mut d) = (num.clone(), den.clone());
    let mut quotients = Vec::new();
    let (mut q_prev, mut q_cur) = (BigUint::zero(), BigUint::one());
    while !n.is_zero() {
        let (a, r) = d.div_rem(&n);
        let Some(a64) = a.to_u64() else { return (quotients, false) };
        let q_next = &a * &q_cur + &q_prev;
        if stop(&q_next) {
            return (quotients, false);
        }
        quotients.push(a64);
        q_prev = std::mem::replace(&mut q_cur, q_next);
        d = n;
        n = r;
    }
    (quotients, true)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Convergent {
    pub k: usize,
    #[serde(serialize_with = "ser_display")]
    pub p: BigInt,
    #[serde(serialize_with = "ser_display")]
    pub q: BigInt,
}

fn ser_display<S: serde::Serializer, T: fmt::Display>(v: &T, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(v)
}

/// `p_k/q_k` for `k = 0..=K`.
pub fn convergents(cf: &ContinuedFraction, count: usize) -> Result<Vec<Convergent>> {
    let quotients = cf.prefix(count)?;
    let (mut p_prev, mut q_prev) = (BigInt::one(), BigInt::zero());
    let (mut p, mut q) = (BigInt::from(cf.a0()), BigInt::one());
    let mut out = Vec::with_capacity(count + 1);
    out.push(Convergent { k: 0, p: p.clone(), q: q.clone() });
    for (i, &a) in quotients.iter().enumerate() {
        let a = BigInt::from(a);
        let p_next = &a * &p + &p_prev;
        let q_next = &a * &q + &q_prev;
        p_prev = std::mem::replace(&mut p, p_next);
        q_prev = std::mem::replace(&mut q, q_next);
        out.push(Convergent { k: i + 1, p: p.clone(), q: q.clone() });
    }
    Ok(out)
}

/// Convergent denominators `q_0..=q_K` in `u128`, failing on overflow.
pub fn denominators(cf: &ContinuedFraction, count: usize) -> Result<Vec<u128>> {
    let quotients = cf.prefix(count)?;
    let mut out = Vec::with_capacity(count + 1);
    let (mut prev, mut cur) = (0u128, 1u128);
    out.push(cur);
    for a in quotients {
        let next = (a as u128)
            .checked_mul(cur)
            .and_then(|x| x.checked_add(prev))
            .ok_or_else(|| Error::TooLarge("convergent denominator overflows u128".into()))?;
        prev = cur;
        cur = next;
        out.push(cur);
    }
    Ok(out)
}

/// Denominators `q_0, q_1, ...` up to and including the first `q_K >= n`
/// (with `K >= 1`). Returns `(quotients a_1..a_K, denominators q_0..q_K)`.
/// Fails when the expansion ends first.
pub fn expand_until_denominator(cf: &ContinuedFraction, n: u128) -> Result<(Vec<u64>, Vec<u128>)> {
    let mut quotients = Vec::new();
    let mut dens = vec![1u128];
    let (mut prev, mut cur) = (0u128, 1u128);
    let mut k = 1;
    loop {
        let a = match cf.quotient(k) {
            Some(a) => a,
            None => return Err(cf.too_short(k)),
        };
        let next = (a as u128)
            .checked_mul(cur)
            .and_then(|x| x.checked_add(prev))
            .ok_or_else(|| Error::TooLarge("convergent denominator overflows u128".into()))?;
        quotients.push(a);
        dens.push(next);
        prev = cur;
        cur = next;
        if cur >= n {
            return Ok((quotients, dens));
        }
        k += 1;
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CfStats {
    pub k: usize,
    #[serde(serialize_with = "ser_display")]
    pub sum_a: BigInt,
    #[serde(serialize_with = "ser_display")]
    pub sum_a2: BigInt,
    #[serde(serialize_with = "ser_display")]
    pub alt_sum: BigInt,
    pub max_a: u64,
}

/// Exact sums over `k = 1..=K`: `Σ a_k`, `Σ a_k²`, `Σ (-1)^k a_k`, `max a_k`.
pub fn cf_stats(cf: &ContinuedFraction, count: usize) -> Result<CfStats> {
    if count == 0 {
        return Err(Error::invalid("K must be at least 1"));
    }
    let quotients = cf.prefix(count)?;
    let mut stats =
        CfStats { k: count, sum_a: BigInt::zero(), sum_a2: BigInt::zero(), alt_sum: BigInt::zero(), max_a: 0 };
    for (i, &a) in quotients.iter().enumerate() {
        let big = BigInt::from(a);
        stats.sum_a2 += &big * &big;
        stats.sum_a += &big;
        if (i + 1) % 2 == 0 {
            stats.alt_sum += &big;
        } else {
            stats.alt_sum -= &big;
        }
        stats.max_a = stats.max_a.max(a);
    }
    Ok(stats)
}

/// `(K⁻¹ Σ a_k², K^{-1/2} |Σ (-1)^k a_k|)`.
pub fn optimality_stats(cf: &ContinuedFraction, count: usize) -> Result<(f64, f64)> {
    let s = cf_stats(cf, count)?;
    let k = count as f64;
    let mean_sq = BigRational::new(s.sum_a2, BigInt::from(count)).to_f64().unwrap_or(f64::INFINITY);
    let alt = s.alt_sum.abs().to_f64().unwrap_or(f64::INFINITY) / k.sqrt();
    Ok((mean_sq, alt))
}

/// `(P + √D) / Q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct QuadraticSurd {
    pub p: i64,
    pub d: i64,
    pub q: i64,
}

fn is_square(d: i128) -> bool {
    d >= 0 && {
        let r = (d as u128).sqrt();
        r * r == d as u128
    }
}

impl QuadraticSurd {
    /// Requires `D > 0` nonsquare, `Q != 0` and `Q | D - P²`.
    pub fn new(p: i64, d: i64, q: i64) -> Result<Self> {
        if d <= 0 || is_square(d as i128) {
            return Err(Error::invalid(format!("D = {d} must be a positive nonsquare")));
        }
        if q == 0 {
            return Err(Error::invalid("Q must be nonzero"));
        }
        if (d as i128 - (p as i128) * (p as i128)) % q as i128 != 0 {
            return Err(Error::invalid(format!("Q = {q} does not divide D - P² = {}", d as i128 - (p as i128).pow(2))));
        }
        Ok(QuadraticSurd { p, d, q })
    }

    /// Accepts any `(P, D, Q)` and rescales to `(P|Q|, D Q², Q|Q|)` when
    /// `Q ∤ D - P²`.
    pub fn normalized(p: i64, d: i64, q: i64) -> Result<Self> {
        match Self::new(p, d, q) {
            Ok(s) => Ok(s),
            Err(e) if q != 0 && d > 0 && !is_square(d as i128) => {
                let _ = e;
                let qa = q.unsigned_abs() as i128;
                let (p2, d2, q2) = (p as i128 * qa, d as i128 * qa * qa, q as i128 * qa);
                let fit =
                    |x: i128| i64::try_from(x).map_err(|_| Error::TooLarge("surd coefficients overflow i64".into()));
                Self::new(fit(p2)?, fit(d2)?, fit(q2)?)
            }
            Err(e) => Err(e),
        }
    }

    pub fn to_f64(&self) -> f64 {
        (self.p as f64 + (self.d as f64).sqrt()) / self.q as f64
    }
}

impl fmt::Display for QuadraticSurd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}+sqrt({}))/{}", self.p, self.d, self.q)
    }
}

/// Periodic expansion of a quadratic surd by the `(P, Q)` state iteration.
pub fn cf_of_surd(s: &QuadraticSurd) -> Result<ContinuedFraction> {
    let s = QuadraticSurd::new(s.p, s.d, s.q)?;
    let d = s.d as i128;
    let root = (d as u128).sqrt() as i128;
    let floor_of = |p: i128, q: i128| -> i128 {
        // floor((p + √d) / q); √d is irrational so p + √d lies strictly
        // between p + root and p + root + 1.
        if q > 0 {
            Integer::div_floor(&(p + root), &q)
        } else {
            -Integer::div_floor(&(p + root), &(-q)) - 1
        }
    };
    let (mut p, mut q) = (s.p as i128, s.q as i128);
    let a0 = floor_of(p, q);
    let mut quotients: Vec<u64> = Vec::new();
    let mut seen: HashMap<(i128, i128), usize> = HashMap::new();
    // advance to x_1
    let step = |p: i128, q: i128, a: i128| -> (i128, i128) {
        let p_next = a * q - p;
        let q_next = (d - p_next * p_next) / q;
        (p_next, q_next)
    };
    (p, q) = step(p, q, a0);
    let bound = 2 * d as usize + 16;
    for index in 1.. {
        if let Some(&start) = seen.get(&(p, q)) {
            let pre = quotients[..start - 1].to_vec();
            let period = quotients[start - 1..].to_vec();
            return ContinuedFraction::periodic(a0 as i64, pre, period);
        }
        if index > bound {
            break;
        }
        seen.insert((p, q), index);
        let a = floor_of(p, q);
        if a <= 0 {
            return Err(Error::invalid("surd iteration produced a nonpositive quotient"));
        }
        quotients.push(u64::try_from(a).map_err(|_| Error::TooLarge("partial quotient".into()))?);
        (p, q) = step(p, q, a);
    }
    Err(Error::NotPeriodic)
}
