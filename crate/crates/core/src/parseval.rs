//! Diophantine sums `Σ 1/(m²‖mα‖²)`, the three Diophantine bounds used to
//! control the Fourier tails, and certified enclosures of `D₂²(S(α,N))` and
//! `D₂²(L(α,N))` in terms of the partial quotients of `α`.
//!
//! All sums are accumulated as intervals with outward rounding, so every
//! `lo`/`hi` reported here is a rigorous bound on the real quantity.

use std::ops::Range;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::alpha::{Alpha, AlphaValue};
use crate::cf::{cf_stats, denominators, expand_until_denominator};
use crate::discrepancy::DiscrepancyValue;
use crate::error::{Error, Result};
use crate::fixedpoint::{birkhoff_fixed, birkhoff_rational, BirkhoffSums, Fixed128};
use crate::interval::{consts, Interval};

const TWO_POW_M128: f64 = 2.938_735_877_055_719e-39;

/// Tail sums longer than this are bounded instead of summed.
pub const DIRECT_TAIL_LIMIT: u64 = 50_000_000;

/// Guard for `xi_direct`, counted in `sin²` evaluations.
pub const XI_DIRECT_LIMIT: u64 = 1_000_000_000;

const CHUNK: u64 = 1 << 16;

/// Evaluates `‖mα‖` with certified bounds.
#[derive(Clone, Copy, Debug)]
pub enum Norms {
    Rational { p: u64, q: u64 },
    Fixed(Fixed128),
}

impl Norms {
    pub fn new(alpha: &Alpha) -> Self {
        match alpha.value() {
            AlphaValue::Rational { p, q } => Norms::Rational { p: *p, q: *q },
            AlphaValue::Fixed(_) => Norms::Fixed(alpha.fixed128()),
        }
    }

    /// `(lo, hi)` with `lo <= ‖mα‖ <= hi`; `None` when `mα` is an integer.
    #[inline]
    pub fn norm(&self, m: u64) -> Result<Option<(f64, f64)>> {
        match *self {
            Norms::Rational { p, q } => {
                let r = ((m as u128 * p as u128) % q as u128) as u64;
                let d = r.min(q - r);
                if d == 0 {
                    return Ok(None);
                }
                let v = d as f64 / q as f64;
                Ok(Some((v.next_down(), v.next_up())))
            }
            Norms::Fixed(f) => {
                let b = f.dist(m)?;
                if b.hi == 0 {
                    return Ok(None);
                }
                let lo = (b.lo as f64).next_down().max(0.0) * TWO_POW_M128;
                let hi = (b.hi as f64).next_up() * TWO_POW_M128;
                Ok(Some((lo, hi)))
            }
        }
    }

    fn norm_required(&self, m: u64) -> Result<(f64, f64)> {
        self.norm(m)?.ok_or_else(|| Error::invalid(format!("mα is an integer at m = {m}")))
    }
}

#[inline]
fn dn(x: f64) -> f64 {
    x.next_down()
}

#[inline]
fn up(x: f64) -> f64 {
    x.next_up()
}

/// Bounds on `m²` as floats.
#[inline]
fn m_sq(m: u64) -> (f64, f64) {
    let f = m as f64;
    if m < 1 << 26 {
        (f * f, f * f)
    } else {
        (dn(dn(f) * dn(f)), up(up(f) * up(f)))
    }
}

/// Bounds on `1/(m² d²)` for `d ∈ [dl, dh]`.
#[inline]
fn inv_sq_term(m: u64, (dl, dh): (f64, f64)) -> (f64, f64) {
    let (ml, mh) = m_sq(m);
    let hi = up(1.0 / dn(dn(ml * dl) * dl));
    let lo = dn(1.0 / up(up(mh * dh) * dh));
    (lo, hi)
}

/// Bounds on `1/(m² d)`.
#[inline]
fn inv_term(m: u64, (dl, dh): (f64, f64)) -> (f64, f64) {
    let (ml, mh) = m_sq(m);
    (dn(1.0 / up(mh * dh)), up(1.0 / dn(ml * dl)))
}

/// Sums bounded terms over `range`, in fixed-size chunks so the result
/// does not depend on the thread count.
fn sum_terms<F>(range: Range<u64>, f: F) -> Result<Interval>
where
    F: Fn(u64) -> Result<(f64, f64)> + Sync,
{
    if range.start >= range.end {
        return Ok(Interval::ZERO);
    }
    let chunks: Vec<Range<u64>> =
        (range.start..range.end).step_by(CHUNK as usize).map(|s| s..(s + CHUNK).min(range.end)).collect();
    let partial: Vec<Result<(f64, f64)>> = chunks
        .into_par_iter()
        .map(|r| {
            let (mut lo, mut hi) = (0.0f64, 0.0f64);
            for m in r {
                let (a, b) = f(m)?;
                lo = dn(lo + a);
                hi = up(hi + b);
            }
            Ok((lo, hi))
        })
        .collect();
    let (mut lo, mut hi) = (0.0f64, 0.0f64);
    for p in partial {
        let (a, b) = p?;
        lo = dn(lo + a);
        hi = up(hi + b);
    }
    Ok(Interval { lo: lo.max(0.0), hi })
}

/// `Σ_{m ∈ range} 1/(m²‖mα‖²)`, skipping `m` with `mα ∈ Z`.
pub fn inv_sq_sum(norms: &Norms, range: Range<u64>) -> Result<Interval> {
    sum_terms(range, |m| Ok(norms.norm(m)?.map_or((0.0, 0.0), |d| inv_sq_term(m, d))))
}

/// `Σ_{m ∈ range} 1/(m²‖mα‖)`, skipping `m` with `mα ∈ Z`.
pub fn inv_sum(norms: &Norms, range: Range<u64>) -> Result<Interval> {
    sum_terms(range, |m| Ok(norms.norm(m)?.map_or((0.0, 0.0), |d| inv_term(m, d))))
}

/// The weights in which Diophantine sums appear.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Weight {
    /// `1/(m²‖mα‖²)`
    Unit,
    /// `1/(4π⁴m²‖mα‖²)`
    Quarter,
    /// `1/(2π⁴m²‖mα‖²)`
    Half,
    /// `1/(8π⁴m²‖mα‖²)`
    Eighth,
    /// `1/(π²m²‖mα‖)`
    Linear,
}

impl std::str::FromStr for Weight {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "unit" => Ok(Weight::Unit),
            "quarter" => Ok(Weight::Quarter),
            "half" => Ok(Weight::Half),
            "eighth" => Ok(Weight::Eighth),
            "linear" => Ok(Weight::Linear),
            _ => Err(Error::invalid(format!("unknown weight `{s}` (unit|quarter|half|eighth|linear)"))),
        }
    }
}

fn pi4_times(c: f64) -> Interval {
    consts::pi4() * Interval::point(c)
}

/// `Σ_{m=1}^{M} weight(m)`; terms with `mα ∈ Z` are skipped.
pub fn dioph_sum(alpha: &Alpha, m_max: u64, weight: Weight) -> Result<Interval> {
    if m_max == 0 {
        return Err(Error::invalid("M must be at least 1"));
    }
    let norms = Norms::new(alpha);
    let r = 1..m_max + 1;
    Ok(match weight {
        Weight::Unit => inv_sq_sum(&norms, r)?,
        Weight::Quarter => inv_sq_sum(&norms, r)? / pi4_times(4.0),
        Weight::Half => inv_sq_sum(&norms, r)? / pi4_times(2.0),
        Weight::Eighth => inv_sq_sum(&norms, r)? / pi4_times(8.0),
        Weight::Linear => inv_sum(&norms, r)? / consts::pi2(),
    })
}

/// `Σ_{m=1}^{M} 1/(m²‖mp/q‖²)` as an exact rational, skipping `q | m`.
pub fn dioph_sum_exact(p: u64, q: u64, m_max: u64) -> BigRational {
    let mut acc = BigRational::zero();
    for m in 1..=m_max {
        let r = (m as u128 * p as u128 % q as u128) as u64;
        let d = r.min(q - r);
        if d != 0 {
            let den = BigInt::from(m) * BigInt::from(m) * BigInt::from(d) * BigInt::from(d);
            acc += BigRational::new(BigInt::from(q) * BigInt::from(q), den);
        }
    }
    acc
}

/// Partial quotients `a_1..a_K` and denominators `q_0..q_K` as floats and
/// integers.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Expansion {
    pub a: Vec<u64>,
    pub q: Vec<u128>,
}

impl Expansion {
    pub fn of(alpha: &Alpha, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::invalid("K must be at least 1"));
        }
        let a = alpha.cf().prefix(k)?;
        let q = denominators(alpha.cf(), k)?;
        Ok(Expansion { a, q })
    }

    /// The smallest `K >= 1` with `q_K >= N`.
    pub fn for_n(alpha: &Alpha, n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("N must be at least 1"));
        }
        match expand_until_denominator(alpha.cf(), n as u128) {
            Ok((a, q)) => Ok(Expansion { a, q }),
            Err(Error::ExpansionTooShort { .. }) => {
                let (_, q) = alpha.as_rational().expect("only finite expansions run short");
                Err(Error::invalid(format!("N = {n} exceeds the denominator q = {q}")))
            }
            Err(e) => Err(e),
        }
    }

    pub fn k(&self) -> usize {
        self.a.len()
    }

    fn qk(&self, k: usize) -> Result<u64> {
        u64::try_from(self.q[k]).map_err(|_| Error::TooLarge(format!("q_{k} exceeds u64")))
    }

    fn q_interval(&self, k: usize) -> Interval {
        Interval::from_int(self.q[k] as i128)
    }

    fn a_interval(&self, k: usize) -> Interval {
        Interval::from_int(self.a[k - 1] as i128)
    }

    /// `Σ_{k=0}^{upto-1} a_{k+1} / q_k`.
    fn a_over_q(&self, upto: usize) -> Interval {
        (0..upto).map(|k| self.a_interval(k + 1) / self.q_interval(k)).sum()
    }

    /// `Σ_{k=0}^{upto-1} (a_{k+1}+2)³ q_k`.
    fn cubic(&self, upto: usize) -> Interval {
        (0..upto)
            .map(|k| {
                let a2 = self.a_interval(k + 1) + Interval::point(2.0);
                a2.square() * a2 * self.q_interval(k)
            })
            .sum()
    }
}

/// `ζ(3) / (16 π⁴ N)`.
/// Weight of the unsymmetrized main term and `ξ` centre: averaging
/// `sin²((n+1)x)` over `n < N` gives `(1 + 1/(2N))/2` plus an oscillating part.
fn l_factor(n: u64) -> Interval {
    Interval::point(1.0) + Interval::point(0.5) / Interval::from_int(n as i128)
}

fn zeta_factor(n: u64) -> Interval {
    consts::zeta3() / (pi4_times(16.0) * Interval::from_int(n as i128))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundCheck {
    pub name: String,
    pub lhs: Interval,
    pub rhs: Interval,
    /// `lhs.hi <= rhs.lo`: the inequality is certified.
    pub holds: bool,
}

impl BoundCheck {
    fn new(name: impl Into<String>, lhs: Interval, rhs: Interval) -> Self {
        BoundCheck { name: name.into(), holds: lhs.certainly_le(&rhs), lhs, rhs }
    }
}

/// Part (i): `Σ_{m<q_K} 1/(π²m²‖mα‖) <= Σ_{k<K} a_{k+1}/(2q_k) + 3.12`.
pub fn lemma1_i(alpha: &Alpha, k: usize) -> Result<BoundCheck> {
    let e = Expansion::of(alpha, k)?;
    let lhs = inv_sum(&Norms::new(alpha), 1..e.qk(k)?)? / consts::pi2();
    let rhs = e.a_over_q(k) * 0.5 + Interval::point(3.12);
    Ok(BoundCheck::new("lemma1_i", lhs, rhs))
}

/// Part (ii): `Σ_{m>=q_K} min{1/(4‖mα‖²), n²}/(2π²m²) <= 1.12 n/q_K +
/// 0.61 n²/q_K²`, the series truncated at `m_max` with the remainder
/// `n²/(2π²(m_max-1))` added to the left side.
pub fn lemma1_ii(alpha: &Alpha, k: usize, n: u64) -> Result<BoundCheck> {
    let e = Expansion::of(alpha, k)?;
    let qk = e.qk(k)?;
    let nf = Interval::from_int(n as i128);
    let qf = e.q_interval(k);
    let rhs = Interval::point(1.12) * nf / qf + Interval::point(0.61) * nf.square() / qf.square();
    if n == 0 {
        return Ok(BoundCheck::new("lemma1_ii", Interval::ZERO, Interval::ZERO));
    }
    let m_max = qk
        .checked_mul(n)
        .and_then(|x| x.checked_mul(8))
        .map(|x| x.max(1024))
        .ok_or_else(|| Error::TooLarge("truncation point overflows".into()))?;
    let norms = Norms::new(alpha);
    let n2 = (n as f64) * (n as f64);
    let n2_hi = up(n2);
    let sum = sum_terms(qk..m_max + 1, |m| {
        let (ml, mh) = m_sq(m);
        let (lo_min, hi_min) = match norms.norm(m)? {
            None => (n2, n2_hi),
            Some((dl, dh)) => {
                let lo = dn(1.0 / up(4.0 * up(dh * dh)));
                let hi = up(1.0 / dn(4.0 * dn(dl * dl)));
                (lo.min(n2), hi.min(n2_hi))
            }
        };
        Ok((dn(lo_min / up(mh)), up(hi_min / dn(ml))))
    })?;
    let remainder = nf.square() / (Interval::from_int(m_max as i128 - 1));
    let lhs = (sum + remainder) / (consts::pi2() * Interval::point(2.0));
    Ok(BoundCheck::new("lemma1_ii", lhs, rhs))
}

/// Part (iii): `Σ_{m<q_K} min{1/(4N‖2mα‖), 1}/(4π⁴m²‖mα‖²) <=
/// ζ(3)/(16π⁴N) Σ_{k<K} (a_{k+1}+2)³ q_k + 0.07` for `N >= q_{K-1}`.
pub fn lemma1_iii(alpha: &Alpha, k: usize, big_n: u64) -> Result<BoundCheck> {
    let e = Expansion::of(alpha, k)?;
    if (big_n as u128) < e.q[k - 1] {
        return Err(Error::invalid("part (iii) needs N >= q_{K-1}"));
    }
    let norms = Norms::new(alpha);
    let four_n = up(4.0 * big_n as f64);
    let sum = sum_terms(1..e.qk(k)?, |m| {
        let d = norms.norm_required(m)?;
        let (lo, hi) = inv_sq_term(m, d);
        let (wl, wh) = match norms.norm(2 * m)? {
            None => (1.0, 1.0),
            Some((dl, dh)) => (dn(1.0 / up(four_n * dh)).min(1.0), up(1.0 / dn(4.0 * big_n as f64 * dl)).min(1.0)),
        };
        Ok((dn(lo * wl), up(hi * wh)))
    })?;
    let lhs = sum / pi4_times(4.0);
    let rhs = zeta_factor(big_n) * e.cubic(k) + Interval::point(0.07);
    Ok(BoundCheck::new("lemma1_iii", lhs, rhs))
}

/// All three parts of the Diophantine lemma at one `(K, n, N)`.
pub fn lemma1_bounds(alpha: &Alpha, k: usize, n: u64, big_n: u64) -> Result<Vec<BoundCheck>> {
    Ok(vec![lemma1_i(alpha, k)?, lemma1_ii(alpha, k, n)?, lemma1_iii(alpha, k, big_n)?])
}

/// `|Σ_{m<q_K} 1/(m²‖mα‖²) - (π⁴/90) Σ a_k²| <= 152 Σ a_k`.
pub fn dioph_quotient_check(alpha: &Alpha, k: usize) -> Result<BoundCheck> {
    let e = Expansion::of(alpha, k)?;
    let sum = inv_sq_sum(&Norms::new(alpha), 1..e.qk(k)?)?;
    let st = cf_stats(alpha.cf(), k)?;
    let main = consts::pi4() / Interval::point(90.0) * Interval::from_bigint(&st.sum_a2);
    let dev = sum - main;
    let abs = Interval { lo: 0.0f64.max(dev.lo).max(-dev.hi), hi: dev.lo.abs().max(dev.hi.abs()) };
    let rhs = Interval::from_bigint(&st.sum_a) * 152.0;
    Ok(BoundCheck::new("dioph_quotients", abs, rhs))
}

/// Which lattice an enclosure refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Variant {
    S,
    L,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EnclosureParts {
    pub main_sum: Interval,
    /// `Σ_{q_{K-1} <= m < q_K} 1/(4π⁴m²‖mα‖²)`, or an upper bound for it
    /// when the range was too long to sum.
    pub tail_sum: Interval,
    pub tail_summed: bool,
    pub t_block: Option<Interval>,
    pub xi_lo: f64,
    pub xi_hi: f64,
    pub err_budget: Interval,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Enclosure {
    pub variant: Variant,
    pub n: u64,
    pub k: usize,
    /// When `N = q_K` the index `K+1` is also admissible.
    pub k_alt: Option<usize>,
    pub lo: f64,
    pub hi: f64,
    /// `lo` before clamping at 0.
    pub lo_unclamped: f64,
    pub parts: EnclosureParts,
}

impl Enclosure {
    pub fn mid(&self) -> f64 {
        0.5 * self.lo + 0.5 * self.hi
    }

    pub fn half_width(&self) -> f64 {
        0.5 * (self.hi - self.lo)
    }

    /// Whether the computed discrepancy, widened by its own error bound,
    /// lies inside `[lo, hi]`.
    pub fn contains(&self, v: &DiscrepancyValue) -> bool {
        let x = Interval::from_rational(&v.d2_squared).inflate(v.err_bound);
        self.lo <= x.lo && x.hi <= self.hi
    }
}

/// Upper bound on the tail `Σ_{q_{K-1} <= m < q_K} 1/(4π⁴m²‖mα‖²)`.
/// For `m < q_K` the points `mα` are `‖q_{K-1}α‖`-separated, giving
/// `<= (π²/3) / (q_{K-1}² ‖q_{K-1}α‖²) / (4π⁴)`.
fn tail_bound(norms: &Norms, q_prev: u64) -> Result<Interval> {
    let (dl, _) = norms.norm_required(q_prev)?;
    let qd = Interval::from_int(q_prev as i128) * Interval::point(dl);
    let hi = (consts::pi2() / Interval::point(3.0)) / (qd.square() * pi4_times(4.0));
    Ok(Interval { lo: 0.0, hi: hi.hi })
}

fn build_enclosure(alpha: &Alpha, n: u64, k: usize, variant: Variant) -> Result<Enclosure> {
    let e = Expansion::of(alpha, k)?;
    let (q_prev, q_k) = (e.qk(k - 1)?, e.qk(k)?);
    if n < q_prev || n > q_k {
        return Err(Error::invalid(format!("need q_(K-1) = {q_prev} <= N = {n} <= q_K = {q_k}")));
    }
    let norms = Norms::new(alpha);
    let quarter = pi4_times(4.0);
    let main = inv_sq_sum(&norms, 1..q_prev)? / quarter;
    let summed = q_k - q_prev <= DIRECT_TAIL_LIMIT;
    let tail = if summed { inv_sq_sum(&norms, q_prev..q_k)? / quarter } else { tail_bound(&norms, q_prev)? };
    let zf = zeta_factor(n);
    let a_k = e.a_interval(k) + Interval::point(2.0);
    let local = zf * a_k.square() * a_k * e.q_interval(k - 1);
    let cubic_prev = zf * e.cubic(k - 1);
    let factor = l_factor(n);
    // 6.28 is the stated error constant, not 2π
    #[allow(clippy::approx_constant)]
    let (centre, spread, weight, constant, t_block) = match variant {
        Variant::S => (tail, local + Interval::point(0.07), 0.5, 6.28, None),
        Variant::L => {
            let t = match alpha.value() {
                AlphaValue::Rational { p, q } => BirkhoffSums::Exact(birkhoff_rational(*p, *q, n as usize)?),
                AlphaValue::Fixed(_) => BirkhoffSums::Certified(birkhoff_fixed(&alpha.fixed128(), n as usize)?),
            };
            (factor * tail, local, 0.125, 2.78, Some(t.t_block()))
        }
    };
    // ξ ∈ [0, 2·tail] ∩ [centre - spread, centre + spread]; when the tail is
    // only bounded above, the second bracket is not available
    let mut xi_lo = 0.0f64;
    let mut xi_hi = (tail * 2.0).hi;
    if summed {
        xi_lo = xi_lo.max((centre - spread).lo);
        xi_hi = xi_hi.min((centre + spread).hi);
    }
    if xi_lo > xi_hi {
        return Err(Error::invalid(format!("empty ξ bracket [{xi_lo}, {xi_hi}]")));
    }
    let budget = e.a_over_q(k) * weight + cubic_prev + Interval::point(constant);
    let main_term = match variant {
        Variant::S => main,
        Variant::L => factor * main,
    };
    let base = main_term + t_block.unwrap_or(Interval::ZERO);
    let lo = dn(dn(base.lo + xi_lo) - budget.hi);
    let hi = up(up(base.hi + xi_hi) + budget.hi);
    let k_alt = (n == q_k && alpha.cf().quotient(k + 1).is_some()).then_some(k + 1);
    Ok(Enclosure {
        variant,
        n,
        k,
        k_alt,
        lo: lo.max(0.0),
        hi,
        lo_unclamped: lo,
        parts: EnclosureParts {
            main_sum: main,
            tail_sum: tail,
            tail_summed: summed,
            t_block,
            xi_lo,
            xi_hi,
            err_budget: budget,
        },
    })
}

/// Enclosure of `D₂²(S(α,N))` using the smallest `K` with `q_K >= N`.
#[allow(non_snake_case)]
pub fn prop1_enclosure_S(alpha: &Alpha, n: u64) -> Result<Enclosure> {
    let k = Expansion::for_n(alpha, n)?.k();
    build_enclosure(alpha, n, k, Variant::S)
}

/// Enclosure of `D₂²(L(α,N))` using the smallest `K` with `q_K >= N`.
#[allow(non_snake_case)]
pub fn prop1_enclosure_L(alpha: &Alpha, n: u64) -> Result<Enclosure> {
    let k = Expansion::for_n(alpha, n)?.k();
    build_enclosure(alpha, n, k, Variant::L)
}

/// Either enclosure at an explicitly chosen admissible `K`.
pub fn prop1_enclosure_at(alpha: &Alpha, n: u64, k: usize, variant: Variant) -> Result<Enclosure> {
    build_enclosure(alpha, n, k, variant)
}

pub fn prop1_enclosure(alpha: &Alpha, n: u64, variant: Variant) -> Result<Enclosure> {
    match variant {
        Variant::S => prop1_enclosure_S(alpha, n),
        Variant::L => prop1_enclosure_L(alpha, n),
    }
}

/// `{t·α}` as a float in `[0, 1)`, accurate to the fixed-point error.
fn frac_f64(norms: &Norms, t: u128) -> f64 {
    match *norms {
        Norms::Rational { p, q } => ((t * p as u128) % q as u128) as f64 / q as f64,
        Norms::Fixed(f) => (f.a.wrapping_mul(t) as f64) * TWO_POW_M128,
    }
}

/// `sin(π{tα})`; only its square is sign independent.
fn sin_pi(norms: &Norms, t: u128) -> f64 {
    (std::f64::consts::PI * frac_f64(norms, t)).sin()
}

/// `sin(2πtα)` and `cos(2πtα)`.
fn sin_cos_2pi(norms: &Norms, t: u128) -> (f64, f64) {
    (std::f64::consts::TAU * frac_f64(norms, t)).sin_cos()
}

/// `ξ_S` or `ξ_L` by the defining double sum over `0 <= n < N` and
/// `q_{K-1} <= m < q_K`.
pub fn xi_direct(alpha: &Alpha, n: u64, k: usize, variant: Variant) -> Result<f64> {
    let e = Expansion::of(alpha, k)?;
    let (q_prev, q_k) = (e.qk(k - 1)?, e.qk(k)?);
    let work = (q_k - q_prev).saturating_mul(n);
    if work > XI_DIRECT_LIMIT {
        return Err(Error::TooLarge(format!("{work} terms")));
    }
    let norms = Norms::new(alpha);
    let pi4 = std::f64::consts::PI.powi(4);
    let mut total = 0.0;
    for m in q_prev..q_k {
        let (dl, dh) = norms.norm_required(m)?;
        let d = 0.5 * (dl + dh);
        let mut inner = 0.0;
        for j in 0..n {
            let t = match variant {
                Variant::S => (2 * j + 1) as u128 * m as u128,
                Variant::L => (j + 1) as u128 * m as u128,
            };
            inner += sin_pi(&norms, t).powi(2);
        }
        total += inner / (2.0 * pi4 * (m as f64).powi(2) * d * d);
    }
    Ok(total / n as f64)
}

/// `ξ` from the summed-over-`n` form:
/// S: `Σ_m [1/2 - sin(4Nx)/(4N sin 2x)] / (2π⁴m²‖mα‖²)`,
/// L: `Σ_m [1/2 + 1/(4N) - sin((2N+1)x)/(4N sin x)] / (2π⁴m²‖mα‖²)`,
/// with `x = mπα`.
pub fn xi_closed_form(alpha: &Alpha, n: u64, k: usize, variant: Variant) -> Result<f64> {
    let e = Expansion::of(alpha, k)?;
    let (q_prev, q_k) = (e.qk(k - 1)?, e.qk(k)?);
    let norms = Norms::new(alpha);
    let pi4 = std::f64::consts::PI.powi(4);
    let nf = n as f64;
    let mut total = 0.0;
    for m in q_prev..q_k {
        let (dl, dh) = norms.norm_required(m)?;
        let d = 0.5 * (dl + dh);
        let mm = m as u128;
        let mean = match variant {
            Variant::S => 0.5 - sin_cos_2pi(&norms, 2 * n as u128 * mm).0 / (4.0 * nf * sin_cos_2pi(&norms, mm).0),
            Variant::L => {
                // sin((2N+1)x)/sin x depends on x mod π only
                let (s, c) = sin_cos_2pi(&norms, n as u128 * mm);
                let f = std::f64::consts::PI * frac_f64(&norms, mm);
                let ratio = s / f.tan() + c;
                0.5 + 0.25 / nf - ratio / (4.0 * nf)
            }
        };
        total += mean / (2.0 * pi4 * (m as f64).powi(2) * d * d);
    }
    Ok(total)
}

/// Both `ξ` brackets as stated alongside the enclosures.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct XiBrackets {
    /// `[0, Σ 1/(2π⁴m²‖mα‖²)]`
    pub coarse: Interval,
    /// `centre ± spread`
    pub refined: Interval,
}

pub fn xi_brackets(alpha: &Alpha, n: u64, k: usize, variant: Variant) -> Result<XiBrackets> {
    let e = Expansion::of(alpha, k)?;
    let (q_prev, q_k) = (e.qk(k - 1)?, e.qk(k)?);
    let tail = inv_sq_sum(&Norms::new(alpha), q_prev..q_k)? / pi4_times(4.0);
    let zf = zeta_factor(n);
    let a_k = e.a_interval(k) + Interval::point(2.0);
    let local = zf * a_k.square() * a_k * e.q_interval(k - 1);
    let factor = l_factor(n);
    // 6.28 is the stated error constant, not 2π
    #[allow(clippy::approx_constant)]
    let (centre, spread) = match variant {
        Variant::S => (tail, local + Interval::point(0.07)),
        Variant::L => (factor * tail, local),
    };
    Ok(XiBrackets {
        coarse: Interval { lo: 0.0, hi: (tail * 2.0).hi },
        refined: Interval { lo: (centre - spread).lo, hi: (centre + spread).hi },
    })
}

/// `D₂²(S(α,q_K)) / Σ a_k²` and `D₂²(L(α,q_K)) / (Σ a_k² + (Σ(-1)^k a_k)²)`.
pub fn prop2_ratios(alpha: &Alpha, k: usize) -> Result<(f64, f64)> {
    use crate::lattice::{lattice_discrepancy, Precision};
    let e = Expansion::of(alpha, k)?;
    let n = usize::try_from(e.q[k]).map_err(|_| Error::TooLarge("q_K".into()))?;
    let st = cf_stats(alpha.cf(), k)?;
    let s = lattice_discrepancy(alpha, n, true, Precision::Bits64)?.to_f64();
    let l = lattice_discrepancy(alpha, n, false, Precision::Bits64)?.to_f64();
    let a2 = st.sum_a2.to_f64().unwrap_or(f64::INFINITY);
    let alt = st.alt_sum.to_f64().unwrap_or(f64::INFINITY);
    Ok((s / a2, l / (a2 + alt * alt)))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VarianceCheck {
    pub lhs: Interval,
    pub rhs: Interval,
    pub residual: Interval,
}

/// `(1/N) Σ (T_n - E_N)²` against `Σ_{m<q_K} 1/(8π⁴m²‖mα‖²)`.
pub fn variance_check(alpha: &Alpha, n: u64) -> Result<VarianceCheck> {
    let e = Expansion::for_n(alpha, n)?;
    let lhs = match alpha.value() {
        AlphaValue::Rational { p, q } => Interval::from_rational(&birkhoff_rational(*p, *q, n as usize)?.variance()),
        AlphaValue::Fixed(_) => {
            let b = birkhoff_fixed(&alpha.fixed128(), n as usize)?;
            let mean = BirkhoffSums::Certified(b.clone()).e_interval();
            let s: Interval = b.t.iter().map(|&t| (t - mean).square()).sum();
            s / Interval::from_int(n as i128)
        }
    };
    let rhs = inv_sq_sum(&Norms::new(alpha), 1..e.qk(e.k())?)? / pi4_times(8.0);
    Ok(VarianceCheck { lhs, rhs, residual: lhs - rhs })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EnCheck {
    pub e_qk: Interval,
    pub main: Interval,
    pub residual: Interval,
}

/// `E_{q_K}` against `-(1/12) Σ_{k<=K} (-1)^k a_k`. With `T_n = Σ (1/2 - {ℓα})`
/// the first block alone gives `E_{q_1} ≈ +a_1/12`, which fixes the sign.
pub fn en_check(alpha: &Alpha, k: usize) -> Result<EnCheck> {
    let e = Expansion::of(alpha, k)?;
    let n = usize::try_from(e.q[k]).map_err(|_| Error::TooLarge("q_K".into()))?;
    let e_qk = match alpha.value() {
        AlphaValue::Rational { p, q } => Interval::from_rational(&birkhoff_rational(*p, *q, n)?.e_n()),
        AlphaValue::Fixed(_) => BirkhoffSums::Certified(birkhoff_fixed(&alpha.fixed128(), n)?).e_interval(),
    };
    let st = cf_stats(alpha.cf(), k)?;
    let main = -Interval::from_bigint(&st.alt_sum) / Interval::point(12.0);
    Ok(EnCheck { e_qk, main, residual: e_qk - main })
}

/// `E_{q_K}` and its main term as exact rationals, for rational `α`.
pub fn en_check_exact(p: u64, q: u64, k: usize) -> Result<(BigRational, BigRational)> {
    let alpha = Alpha::rational(p as i64, q)?;
    let e = Expansion::of(&alpha, k)?;
    let b = birkhoff_rational(p, q, e.q[k] as usize)?;
    let st = cf_stats(alpha.cf(), k)?;
    Ok((b.e_n(), BigRational::new(-st.alt_sum, BigInt::from(12))))
}

/// `|x|` of an interval as an interval.
pub fn abs_interval(x: Interval) -> Interval {
    if x.lo >= 0.0 {
        x
    } else if x.hi <= 0.0 {
        -x
    } else {
        Interval { lo: 0.0, hi: x.lo.abs().max(x.hi) }
    }
}

/// `|r|` for an exact rational residual.
pub fn abs_rational(r: &BigRational) -> BigRational {
    r.abs()
}

/// `|(1/N)Σ_{n<N} sin²((2n+1)x) - (1/2 - sin(4Nx)/(4N sin 2x))|`, the
/// averaging identity behind the closed form of the main sum.
pub fn trig_identity_residual(n: u64, x: f64) -> f64 {
    let direct = (0..n).map(|j| ((2 * j + 1) as f64 * x).sin().powi(2)).sum::<f64>() / n as f64;
    let nf = n as f64;
    let closed = 0.5 - (4.0 * nf * x).sin() / (4.0 * nf * (2.0 * x).sin());
    (direct - closed).abs()
}

/// Neumaier summation, componentwise.
fn compensated_sum(terms: impl Iterator<Item = Complex64>) -> Complex64 {
    let mut sum = Complex64::new(0.0, 0.0);
    let mut carry = Complex64::new(0.0, 0.0);
    let step = |s: &mut f64, c: &mut f64, x: f64| {
        let t = *s + x;
        *c += if s.abs() >= x.abs() { (*s - t) + x } else { (x - t) + *s };
        *s = t;
    };
    for z in terms {
        step(&mut sum.re, &mut carry.re, z.re);
        step(&mut sum.im, &mut carry.im, z.im);
    }
    sum + carry
}

/// Largest deviation in the discrete Fourier pair of the centred sawtooth
/// `s(x) = 1/2 - 1/(2q) - {x/q}` on `Z/qZ`: the forward transform against
/// `1/(1 - e^{-2πim/q})` (zero at `m = 0`) and the inversion back to `s`.
pub fn sawtooth_fourier_residual(q: u64) -> f64 {
    let qf = q as f64;
    // residue of k in (-q/2, q/2], so angles stay near zero where sin is accurate
    let centred = |k: u64| {
        let r = (k % q) as f64;
        if 2.0 * r > qf {
            r - qf
        } else {
            r
        }
    };
    let root = |k: u64| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * centred(k) / qf);
    let saw = |x: u64| 0.5 - 0.5 / qf - (x % q) as f64 / qf;
    // 1 - e^{-iθ} = 2 sin²(θ/2) + i sin θ, avoiding the cancellation in 1 - cos θ
    let coeff = |m: u64| {
        let half = std::f64::consts::PI * centred(m) / qf;
        Complex64::new(2.0 * half.sin().powi(2), (2.0 * half).sin()).inv()
    };
    let mut worst = 0.0f64;
    for m in 0..q {
        let fwd = compensated_sum((0..q).map(|x| root(q - (m * x) % q) * saw(x)));
        let target = if m == 0 { Complex64::new(0.0, 0.0) } else { coeff(m) };
        worst = worst.max((fwd - target).norm());
    }
    for x in 0..q {
        let inv = compensated_sum((1..q).map(|m| root(m * x) * coeff(m))) / qf;
        worst = worst.max((inv - saw(x)).norm());
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{lattice_discrepancy, Precision};

    fn golden() -> Alpha {
        Alpha::parse("surd:1,5,2").unwrap()
    }

    #[test]
    fn half_unit_weight() {
        let a = Alpha::rational(1, 2).unwrap();
        let s = dioph_sum(&a, 1, Weight::Unit).unwrap();
        assert!(s.contains(4.0));
        assert!(s.width() < 1e-14);
        assert_eq!(dioph_sum_exact(1, 2, 1), BigRational::from_integer(4.into()));
    }

    #[test]
    fn diophantine_sum_tracks_quotients_for_golden() {
        for k in 1..=20 {
            let c = dioph_quotient_check(&golden(), k).unwrap();
            assert!(c.holds, "{c:?}");
        }
    }

    #[test]
    fn lemma1_examples() {
        let g = golden();
        assert!(lemma1_i(&g, 12).unwrap().holds);
        assert_eq!(lemma1_ii(&g, 12, 0).unwrap().lhs, Interval::ZERO);
        assert!(lemma1_ii(&g, 6, 5).unwrap().holds);
        let a = Alpha::rational(2, 7).unwrap();
        let r = a.cf().len().unwrap();
        assert!(lemma1_iii(&a, r, 7).unwrap().holds);
    }

    #[test]
    #[allow(clippy::approx_constant)]
    fn enclosures_contain_golden_discrepancy() {
        let g = golden();
        for variant in [Variant::S, Variant::L] {
            let enc = prop1_enclosure(&g, 89, variant).unwrap();
            let d = lattice_discrepancy(&g, 89, variant == Variant::S, Precision::Full).unwrap();
            assert!(enc.contains(&d), "{variant:?}: {} not in [{}, {}]", d.to_f64(), enc.lo, enc.hi);
            assert!(enc.hi - enc.lo_unclamped >= 2.0 * if variant == Variant::S { 6.28 } else { 2.78 });
        }
    }

    #[test]
    fn rational_enclosures() {
        let a = Alpha::rational(5, 8).unwrap();
        let enc = prop1_enclosure_S(&a, 8).unwrap();
        let d = lattice_discrepancy(&a, 8, true, Precision::Full).unwrap();
        assert!(enc.contains(&d));
        let a = Alpha::rational(2, 5).unwrap();
        let enc = prop1_enclosure_L(&a, 5).unwrap();
        let d = lattice_discrepancy(&a, 5, false, Precision::Full).unwrap();
        assert!(enc.contains(&d));
        assert!(prop1_enclosure_S(&a, 6).is_err());
    }

    #[test]
    fn identities_small() {
        for (n, x) in [(1u64, 0.3), (7, 1.1), (500, 0.0123)] {
            assert!(trig_identity_residual(n, x) < 1e-10);
        }
        for q in [2, 3, 10, 37] {
            assert!(sawtooth_fourier_residual(q) < 1e-12, "q = {q}");
        }
    }

    #[test]
    fn xi_forms_agree() {
        let g = golden();
        for (n, k) in [(89u64, 11usize), (100, 12), (60, 11)] {
            for v in [Variant::S, Variant::L] {
                let d = xi_direct(&g, n, k, v).unwrap();
                let c = xi_closed_form(&g, n, k, v).unwrap();
                assert!((d - c).abs() < 1e-9, "{v:?} {n} {k}: {d} vs {c}");
            }
        }
        let half = Alpha::rational(1, 2).unwrap();
        // q_0 = 1, q_1 = 2: m ranges over {1}; with K = 1 the range is [1, 2)
        assert!(xi_direct(&half, 2, 1, Variant::S).unwrap() >= 0.0);
    }

    #[test]
    fn t_block_identity() {
        let b = birkhoff_rational(2, 5, 5).unwrap();
        let e = b.e_n();
        assert_eq!(b.t_block(), b.variance() + &e * &e + e / BigInt::from(2));
    }

    #[test]
    fn en_check_small() {
        let (e, main) = en_check_exact(1, 2, 1).unwrap();
        // α = 1/2, q_1 = 2: T = (1/2, 1/2), E = 1/2; main = a_1/12 = 1/6
        assert_eq!(e, BigRational::new(1.into(), 2.into()));
        assert_eq!(main, BigRational::new(1.into(), 6.into()));
        let c = en_check(&golden(), 4).unwrap();
        assert!(abs_interval(c.residual).hi <= 2.0);
    }

    #[test]
    fn variance_half() {
        let v = variance_check(&Alpha::rational(1, 2).unwrap(), 2).unwrap();
        assert_eq!(v.lhs, Interval::ZERO);
        assert!(v.rhs.lo > 0.0);
    }
}
