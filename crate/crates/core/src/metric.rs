//! Distributional experiments: Farey sweeps over random rationals,
//! random irrationals under Lebesgue or Gauss measure, the Lévy law and
//! Kolmogorov distances.
//!
//! Every random sample `i` draws from its own ChaCha8 stream `i` under the
//! sweep seed, so results do not depend on the thread count.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::alpha::Alpha;
use crate::cf::{cf_of_rational, cf_stats, expand_until_denominator};
use crate::error::{Error, Result};
use crate::lattice::{lattice_discrepancy, Precision};
use crate::parseval::prop1_enclosure_S;

/// `∫_0^t e^{-1/(2x)} / (√(2π) x^{3/2}) dx = erfc(1/√(2t))`.
pub fn levy_cdf(t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    libm::erfc(1.0 / (2.0 * t).sqrt())
}

pub fn levy_density(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    (-0.5 / x).exp() / ((2.0 * std::f64::consts::PI).sqrt() * x.powf(1.5))
}

/// Inverse of [`levy_cdf`] by bisection; `p` in `(0, 1)`.
pub fn levy_quantile(p: f64) -> f64 {
    assert!(p > 0.0 && p < 1.0, "quantile needs 0 < p < 1");
    let (mut lo, mut hi) = (1e-3f64, 1e3f64);
    while levy_cdf(lo) > p {
        lo /= 2.0;
    }
    while levy_cdf(hi) < p {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = (lo * hi).sqrt();
        if levy_cdf(mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo * hi).sqrt()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EmpiricalDistribution {
    samples: Vec<f64>,
}

impl EmpiricalDistribution {
    pub fn new(mut samples: Vec<f64>) -> Result<Self> {
        if samples.iter().any(|x| x.is_nan()) {
            return Err(Error::invalid("NaN sample"));
        }
        samples.sort_by(f64::total_cmp);
        Ok(EmpiricalDistribution { samples })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn quantile(&self, p: f64) -> f64 {
        let n = self.samples.len();
        let i = ((p * n as f64).ceil() as usize).clamp(1, n);
        self.samples[i - 1]
    }
}

/// `sup_t |F_n(t) - F(t)|`, attained at the sample points.
pub fn kolmogorov_distance(emp: &EmpiricalDistribution, cdf: impl Fn(f64) -> f64) -> Result<f64> {
    let n = emp.len();
    if n == 0 {
        return Err(Error::EmptyPointSet);
    }
    let nf = n as f64;
    Ok(emp
        .samples
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            ((i + 1) as f64 / nf - f).abs().max((f - i as f64 / nf).abs())
        })
        .fold(0.0, f64::max))
}

/// `F_Q` in increasing order, `0/1` through `1/1`.
pub fn farey_enumerate(q_max: u64) -> impl Iterator<Item = (u64, u64)> {
    let q_max = q_max.max(1);
    let mut state = Some((0u64, 1u64, 1u64, q_max));
    std::iter::from_fn(move || {
        let (a, b, c, d) = state?;
        state = if a == 1 && b == 1 {
            None
        } else {
            let k = (q_max + b) / d;
            Some((c, d, k * c - a, k * d - b))
        };
        Some((a, b))
    })
}

/// `|F_Q| = 1 + Σ_{q<=Q} φ(q)` by a totient sieve.
pub fn farey_count(q_max: u64) -> u64 {
    let n = q_max as usize;
    let mut phi: Vec<u64> = (0..=n as u64).collect();
    for i in 2..=n {
        if phi[i] == i as u64 {
            for j in (i..=n).step_by(i) {
                phi[j] -= phi[j] / i as u64;
            }
        }
    }
    1 + phi.iter().skip(1).sum::<u64>()
}

fn stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// `M` fractions uniform over `F_Q ∩ (0, 1]`: `q` uniform in `[1, Q]`, `p`
/// uniform in `[1, q]`, kept when coprime.
pub fn farey_sample(q_max: u64, m: usize, seed: u64) -> Result<Vec<(u64, u64)>> {
    if q_max == 0 {
        return Err(Error::invalid("Q must be at least 1"));
    }
    Ok((0..m)
        .map(|i| {
            let mut rng = stream(seed, i as u64);
            loop {
                let q = rng.random_range(1..=q_max);
                let p = rng.random_range(1..=q);
                if p.gcd(&q) == 1 {
                    break (p, q);
                }
            }
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TailCheck {
    pub q_max: u64,
    pub k: usize,
    pub t: u64,
    pub count: u64,
    pub bound: f64,
    pub holds: bool,
}

pub const TAIL_CHECK_MAX_Q: u64 = 3000;

/// `|{p/q ∈ F_Q : a_k >= t}| <= 2Q²/t` by enumeration.
pub fn pq_tail_check(q_max: u64, k: usize, t: u64) -> Result<TailCheck> {
    if q_max > TAIL_CHECK_MAX_Q {
        return Err(Error::TooLarge(format!("Q = {q_max} exceeds {TAIL_CHECK_MAX_Q}")));
    }
    if k == 0 || t == 0 {
        return Err(Error::invalid("k and t must be positive"));
    }
    let mut count = 0;
    for (p, q) in farey_enumerate(q_max) {
        let cf = cf_of_rational(p as i64, q)?;
        if cf.quotient(k).is_some_and(|a| a >= t) {
            count += 1;
        }
    }
    let bound = 2.0 * (q_max as f64).powi(2) / t as f64;
    Ok(TailCheck { q_max, k, t, count, bound, holds: (count as f64) <= bound })
}

/// Partial quotients of `p/q ∈ (0, 1)` in the expansion of even length
/// (the canonical one, or the one ending in `a_r - 1, 1`).
pub fn even_length_quotients(p: u64, q: u64) -> Result<Vec<u64>> {
    if p == 0 || p >= q {
        return Err(Error::invalid("need 0 < p/q < 1"));
    }
    let cf = cf_of_rational(p as i64, q)?;
    let mut a = cf.prefix(cf.len().unwrap_or(0))?;
    if a.len() % 2 == 1 {
        let last = a.pop().expect("nonempty");
        if last > 1 {
            a.push(last - 1);
            a.push(1);
        } else {
            // only [.., a, 1] with r odd; merge into [.., a + 1]
            let prev = a.pop().ok_or_else(|| Error::invalid("empty expansion"))?;
            a.push(prev + 1);
        }
    }
    Ok(a)
}

/// `(p_r, q_r)` of `[0; a_1, ..., a_r]`, together with `q_{r-1}`.
fn evaluate(quotients: &[u64]) -> (u64, u64, u64) {
    let (mut p_prev, mut p) = (1u64, 0u64);
    let (mut q_prev, mut q) = (0u64, 1u64);
    for &a in quotients {
        (p_prev, p) = (p, a * p + p_prev);
        (q_prev, q) = (q, a * q + q_prev);
    }
    (p, q, q_prev)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReversalCheck {
    pub q_max: u64,
    pub checked: usize,
    /// Images that are `q_{r-1}/q_r` and lie in `F_Q`.
    pub well_defined: bool,
    pub injective: bool,
    /// Collisions when the canonical (shortest) expansion is reversed instead.
    pub canonical_collisions: usize,
}

/// Reversing the quotients of the even-length expansion permutes
/// `F_Q ∩ (0, 1)`, each `p/q` going to `q_{r-1}/q_r`.
pub fn reversal_check(q_max: u64) -> Result<ReversalCheck> {
    use std::collections::HashSet;
    let mut seen = HashSet::new();
    let mut seen_canonical = HashSet::new();
    let (mut well_defined, mut injective) = (true, true);
    let mut canonical_collisions = 0;
    let mut checked = 0;
    for (p, q) in farey_enumerate(q_max).filter(|&(p, q)| p > 0 && p < q) {
        checked += 1;
        let mut a = even_length_quotients(p, q)?;
        let (pp, qq, q_prev) = evaluate(&a);
        debug_assert_eq!((pp, qq), (p, q));
        a.reverse();
        let (rp, rq, _) = evaluate(&a);
        well_defined &= rp == q_prev && rq == q && rp.gcd(&rq) == 1 && rp < rq;
        injective &= seen.insert((rp, rq));
        let mut c = cf_of_rational(p as i64, q)?.prefix(cf_of_rational(p as i64, q)?.len().unwrap_or(0))?;
        c.reverse();
        let (cp, cq, _) = evaluate(&c);
        if !seen_canonical.insert((cp, cq)) {
            canonical_collisions += 1;
        }
    }
    Ok(ReversalCheck { q_max, checked, well_defined, injective, canonical_collisions })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Measure {
    Lebesgue,
    Gauss,
}

impl std::str::FromStr for Measure {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lebesgue" => Ok(Measure::Lebesgue),
            "gauss" => Ok(Measure::Gauss),
            _ => Err(Error::invalid(format!("unknown measure `{s}` (lebesgue|gauss)"))),
        }
    }
}

fn random_biguint(rng: &mut impl RngCore, bits: u32) -> BigUint {
    let words = bits.div_ceil(32) as usize;
    let mut v: Vec<u32> = (0..words).map(|_| rng.next_u32()).collect();
    let spare = words as u32 * 32 - bits;
    if spare > 0 {
        let last = v.last_mut().expect("bits > 0");
        *last >>= spare;
    }
    BigUint::new(v)
}

/// A `B`-bit mantissa `X`, with `X / 2^B` distributed by `measure`.
/// Gauss samples use exact rejection from uniform: `X` is kept when
/// `V (2^B + X) < 2^{2B}` for an independent uniform `V`, which accepts
/// with probability `1/(1+x)`. Zero mantissas are redrawn.
pub fn sample_mantissa(rng: &mut impl RngCore, measure: Measure, bits: u32) -> BigUint {
    loop {
        let x = random_biguint(rng, bits);
        if x.is_zero() {
            continue;
        }
        match measure {
            Measure::Lebesgue => return x,
            Measure::Gauss => {
                let v = random_biguint(rng, bits);
                let one = BigUint::from(1u32) << bits;
                if v * (&one + &x) < &one * &one {
                    return x;
                }
            }
        }
    }
}

/// A random irrational (as an exact dyadic with a truncated expansion).
pub fn sample_irrational(measure: Measure, bits: u32, seed: u64, index: u64) -> Result<Alpha> {
    if bits < 128 {
        return Err(Error::invalid("B must be at least 128"));
    }
    let mut rng = stream(seed, index);
    Alpha::from_bits(sample_mantissa(&mut rng, measure, bits), bits)
}

/// `P(a_1 = n) = log(1 + 1/(n(n+2))) / log 2` under the Gauss measure.
pub fn gauss_a1_probability(n: u64) -> f64 {
    let n = n as f64;
    (1.0 / (n * (n + 2.0))).ln_1p() / std::f64::consts::LN_2
}

/// Empirical counts of `a_1 = 1..=n_max` over `m` Gauss samples.
pub fn gauss_a1_counts(m: usize, n_max: u64, bits: u32, seed: u64) -> Vec<u64> {
    let a1: Vec<u64> = (0..m as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream(seed, i);
            let x = sample_mantissa(&mut rng, Measure::Gauss, bits);
            ((BigUint::from(1u32) << bits) / x).to_u64().unwrap_or(u64::MAX)
        })
        .collect();
    (1..=n_max).map(|n| a1.iter().filter(|&&a| a == n).count() as u64).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Estimator {
    /// Exact `D₂²` of the lattice.
    Exact,
    /// Midpoint of the certified enclosure.
    Prop1Mid,
    /// The partial-quotient main term alone.
    SamurStat,
}

impl std::str::FromStr for Estimator {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Estimator::Exact),
            "prop1_mid" => Ok(Estimator::Prop1Mid),
            "samur_stat" => Ok(Estimator::SamurStat),
            _ => Err(Error::invalid(format!("unknown estimator `{s}` (exact|prop1_mid|samur_stat)"))),
        }
    }
}

impl std::fmt::Display for Estimator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Estimator::Exact => "exact",
            Estimator::Prop1Mid => "prop1_mid",
            Estimator::SamurStat => "samur_stat",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum SweepMode {
    FareyFull { q: u64 },
    FareySample { q: u64, m: usize, seed: u64 },
    Irrational { n: u64, m: usize, seed: u64, measure: Measure },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepConfig {
    pub mode: SweepMode,
    pub estimator: Estimator,
    /// Mantissa bits for random irrationals.
    pub bits: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SampleRecord {
    pub id: usize,
    /// `p/q` for rationals, `seed:index` for irrationals.
    pub q_or_seed: String,
    pub stat: f64,
    pub estimator: Estimator,
    pub enclosure_width: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepResult {
    pub records: Vec<SampleRecord>,
    pub distribution: EmpiricalDistribution,
    pub ks: f64,
    /// Irrational samples redrawn after a precision failure.
    pub resampled: usize,
}

/// `5π³ / log² N`.
fn normalizer(n: f64) -> f64 {
    5.0 * std::f64::consts::PI.powi(3) / n.ln().powi(2)
}

/// `5π³ D₂²(S(p/q, q)) / log² q`, or its partial-quotient surrogate
/// `π³ Σ a_k² / (72 log² q)`. Needs `q >= 2`.
pub fn rational_statistic(p: u64, q: u64, estimator: Estimator) -> Result<(f64, Option<f64>)> {
    if q < 2 {
        return Err(Error::invalid("q must be at least 2"));
    }
    let alpha = Alpha::rational(p as i64, q)?;
    match estimator {
        Estimator::Exact => {
            Ok((normalizer(q as f64) * lattice_discrepancy(&alpha, q as usize, true, Precision::Full)?.to_f64(), None))
        }
        Estimator::Prop1Mid => {
            let e = prop1_enclosure_S(&alpha, q)?;
            Ok((normalizer(q as f64) * e.mid(), Some(normalizer(q as f64) * (e.hi - e.lo))))
        }
        Estimator::SamurStat => {
            let r = alpha.cf().len().unwrap_or(0);
            let s = cf_stats(alpha.cf(), r.max(1))?.sum_a2.to_f64().unwrap_or(f64::INFINITY);
            Ok((std::f64::consts::PI.powi(3) * s / (72.0 * (q as f64).ln().powi(2)), None))
        }
    }
}

/// `K_N(α)` with `q_{K-1} < N <= q_K`.
pub fn k_n(alpha: &Alpha, n: u64) -> Result<usize> {
    Ok(expand_until_denominator(alpha.cf(), n as u128)?.0.len())
}

/// `5π³ D₂²(S(α, N)) / log² N` by `estimator`; the surrogate is
/// `(2 log² 2 / π) K⁻² Σ_{k<=K} a_k²` with `K = K_N(α)`.
pub fn irrational_statistic(alpha: &Alpha, n: u64, estimator: Estimator) -> Result<(f64, Option<f64>)> {
    if n < 2 {
        return Err(Error::invalid("N must be at least 2"));
    }
    match estimator {
        Estimator::Exact => {
            let v = lattice_discrepancy(alpha, n as usize, true, Precision::Bits64)?;
            Ok((normalizer(n as f64) * v.to_f64(), None))
        }
        Estimator::Prop1Mid => {
            let e = prop1_enclosure_S(alpha, n)?;
            Ok((normalizer(n as f64) * e.mid(), Some(normalizer(n as f64) * (e.hi - e.lo))))
        }
        Estimator::SamurStat => {
            let k = k_n(alpha, n)?;
            let s = cf_stats(alpha.cf(), k)?.sum_a2.to_f64().unwrap_or(f64::INFINITY);
            let ln2 = std::f64::consts::LN_2;
            Ok((2.0 * ln2 * ln2 / std::f64::consts::PI * s / (k as f64).powi(2), None))
        }
    }
}

/// How many times a sample is redrawn after precision failures.
const MAX_REDRAWS: usize = 64;

fn irrational_record(
    i: usize,
    n: u64,
    seed: u64,
    measure: Measure,
    bits: u32,
    estimator: Estimator,
) -> Result<(SampleRecord, usize)> {
    let mut rng = stream(seed, i as u64);
    for redraw in 0..MAX_REDRAWS {
        let alpha = Alpha::from_bits(sample_mantissa(&mut rng, measure, bits), bits)?;
        match irrational_statistic(&alpha, n, estimator) {
            Ok((stat, width)) => {
                let rec =
                    SampleRecord { id: i, q_or_seed: format!("{seed}:{i}"), stat, estimator, enclosure_width: width };
                return Ok((rec, redraw));
            }
            Err(Error::PrecisionExhausted(_)) | Err(Error::ExpansionTooShort { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::precision(format!("sample {i} failed {MAX_REDRAWS} draws")))
}

/// Runs a sweep; records are in sample order regardless of thread count.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepResult> {
    let (records, resampled): (Vec<SampleRecord>, usize) = match cfg.mode {
        SweepMode::FareyFull { q } | SweepMode::FareySample { q, .. } => {
            if q < 2 {
                return Err(Error::invalid("Q must be at least 2"));
            }
            let items: Vec<(u64, u64)> = match cfg.mode {
                SweepMode::FareySample { m, seed, .. } => farey_sample(q, m, seed)?,
                _ => farey_enumerate(q).collect(),
            };
            // q = 1 entries have log² q = 0 and are left out
            let items: Vec<(u64, u64)> = items.into_iter().filter(|&(_, q)| q >= 2).collect();
            let recs = items
                .par_iter()
                .enumerate()
                .map(|(i, &(p, q))| {
                    let (stat, width) = rational_statistic(p, q, cfg.estimator)?;
                    Ok(SampleRecord {
                        id: i,
                        q_or_seed: format!("{p}/{q}"),
                        stat,
                        estimator: cfg.estimator,
                        enclosure_width: width,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            (recs, 0)
        }
        SweepMode::Irrational { n, m, seed, measure } => {
            let out = (0..m)
                .into_par_iter()
                .map(|i| irrational_record(i, n, seed, measure, cfg.bits, cfg.estimator))
                .collect::<Result<Vec<_>>>()?;
            let redraws = out.iter().map(|(_, r)| r).sum();
            (out.into_iter().map(|(r, _)| r).collect(), redraws)
        }
    };
    let distribution = EmpiricalDistribution::new(records.iter().map(|r| r.stat).collect())?;
    let ks = kolmogorov_distance(&distribution, levy_cdf)?;
    Ok(SweepResult { records, distribution, ks, resampled })
}

/// Farey sweep (full or sampled) with the statistic of each fraction.
pub fn theorem6_experiment(cfg: &SweepConfig) -> Result<(EmpiricalDistribution, f64)> {
    match cfg.mode {
        SweepMode::Irrational { .. } => Err(Error::invalid("theorem6_experiment needs a Farey mode")),
        _ => run_sweep(cfg).map(|r| (r.distribution, r.ks)),
    }
}

/// Random irrational sweep at fixed `N`.
pub fn theorem4_experiment(cfg: &SweepConfig) -> Result<(EmpiricalDistribution, f64)> {
    match cfg.mode {
        SweepMode::Irrational { .. } => run_sweep(cfg).map(|r| (r.distribution, r.ks)),
        _ => Err(Error::invalid("theorem4_experiment needs the irrational mode")),
    }
}

/// Mantissa bits that typically yield `k` partial quotients after the
/// `q_k² <= 2^(B-64)` truncation, with a 25% margin.
pub fn bits_for_quotients(k: usize) -> u32 {
    let levy = std::f64::consts::PI.powi(2) / (12.0 * std::f64::consts::LN_2);
    let need = 2.0 * levy * k as f64 / std::f64::consts::LN_2 + 64.0;
    ((need * 1.25) as u32).div_ceil(64) * 64 + 128
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrimmedSumReport {
    pub k: usize,
    pub m: usize,
    pub mean: f64,
    pub target: f64,
    pub pre_asymptotic: bool,
    pub redraws: usize,
}

/// Monte Carlo mean of `(Σ_{k<=K} a_k - max a_k) / (K log K)`, whose
/// almost sure limit is `1/log 2`.
pub fn trimmed_sum_diag(measure: Measure, k: usize, m: usize, seed: u64) -> Result<TrimmedSumReport> {
    if k < 2 || m == 0 {
        return Err(Error::invalid("need K >= 2 and M >= 1"));
    }
    let bits = bits_for_quotients(k);
    let out: Vec<(f64, usize)> = (0..m as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream(seed, i);
            for redraw in 0..MAX_REDRAWS {
                let alpha = Alpha::from_bits(sample_mantissa(&mut rng, measure, bits), bits)?;
                if let Ok(q) = alpha.cf().prefix(k) {
                    let sum: f64 = q.iter().map(|&a| a as f64).sum();
                    let max = q.iter().copied().max().unwrap_or(0) as f64;
                    return Ok(((sum - max) / (k as f64 * (k as f64).ln()), redraw));
                }
            }
            Err(Error::precision("expansion too short"))
        })
        .collect::<Result<Vec<_>>>()?;
    let mean = out.iter().map(|(v, _)| v).sum::<f64>() / m as f64;
    Ok(TrimmedSumReport {
        k,
        m,
        mean,
        target: 1.0 / std::f64::consts::LN_2,
        pre_asymptotic: k < 100,
        redraws: out.iter().map(|(_, r)| r).sum(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn levy_basics() {
        assert_eq!(levy_cdf(0.0), 0.0);
        assert!((levy_cdf(1e8) - 1.0).abs() < 1e-3);
        assert!((levy_cdf(2.19814) - 0.5).abs() < 1e-4);
        let q = levy_quantile(0.5);
        assert!((levy_cdf(q) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn ks_of_single_sample_and_quantiles() {
        let e = EmpiricalDistribution::new(vec![1.0]).unwrap();
        let f = levy_cdf(1.0);
        assert!((kolmogorov_distance(&e, levy_cdf).unwrap() - f.max(1.0 - f)).abs() < 1e-15);
        let n = 50;
        let qs: Vec<f64> = (0..n).map(|i| levy_quantile((i as f64 + 0.5) / n as f64)).collect();
        let d = kolmogorov_distance(&EmpiricalDistribution::new(qs).unwrap(), levy_cdf).unwrap();
        assert!((d - 0.5 / n as f64).abs() < 1e-9);
    }

    #[test]
    fn farey_small() {
        let f5: Vec<_> = farey_enumerate(5).collect();
        let want = [(0, 1), (1, 5), (1, 4), (1, 3), (2, 5), (1, 2), (3, 5), (2, 3), (3, 4), (4, 5), (1, 1)];
        assert_eq!(f5, want);
        assert_eq!(farey_enumerate(1).collect::<Vec<_>>(), [(0, 1), (1, 1)]);
        assert_eq!(farey_enumerate(2).collect::<Vec<_>>(), [(0, 1), (1, 2), (1, 1)]);
        for q in [1, 2, 5, 17, 100] {
            assert_eq!(farey_enumerate(q).count() as u64, farey_count(q));
        }
    }

    #[test]
    fn farey_sample_properties() {
        assert!(farey_sample(1, 10, 3).unwrap().iter().all(|&f| f == (1, 1)));
        assert_eq!(farey_sample(50, 100, 9).unwrap(), farey_sample(50, 100, 9).unwrap());
    }

    #[test]
    fn tail_examples() {
        let c = pq_tail_check(5, 1, 3).unwrap();
        assert_eq!(c.count, 3);
        assert!(c.holds);
        assert_eq!(pq_tail_check(20, 1, 21).unwrap().count, 0);
    }

    #[test]
    fn reversal_small() {
        let r = reversal_check(30).unwrap();
        assert!(r.well_defined && r.injective);
        // shortest expansions do collide: 2/5 and 3/5 both reverse to 2/5
        assert!(r.canonical_collisions > 0);
    }

    #[test]
    fn even_expansions() {
        assert_eq!(even_length_quotients(2, 5).unwrap(), [2, 2]);
        assert_eq!(even_length_quotients(1, 5).unwrap(), [4, 1]);
        assert_eq!(even_length_quotients(3, 5).unwrap(), [1, 1, 1, 1]);
        assert_eq!(even_length_quotients(1, 2).unwrap(), [1, 1]);
    }

    #[test]
    fn statistic_boundaries() {
        let a = sample_irrational(Measure::Lebesgue, 256, 1, 0).unwrap();
        let (s, _) = irrational_statistic(&a, 2, Estimator::SamurStat).unwrap();
        assert!(s.is_finite() && s > 0.0);
        assert!(irrational_statistic(&a, 2, Estimator::Exact).unwrap().0 > 0.0);
        assert!(rational_statistic(0, 1, Estimator::Exact).is_err());
    }

    #[test]
    fn sweeps_are_deterministic() {
        let cfg = SweepConfig {
            mode: SweepMode::Irrational { n: 1000, m: 8, seed: 5, measure: Measure::Gauss },
            estimator: Estimator::SamurStat,
            bits: 256,
        };
        assert_eq!(run_sweep(&cfg).unwrap(), run_sweep(&cfg).unwrap());
    }
}
