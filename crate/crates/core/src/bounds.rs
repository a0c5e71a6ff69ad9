//! The test corpus of rotation numbers and a driver that checks every
//! certified inequality on it, collecting violations instead of stopping.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::alpha::Alpha;
use crate::cf::denominators;
use crate::error::{Error, Result};
use crate::fixedpoint::DEFAULT_BITS;
use crate::lattice::{lattice_discrepancy, Precision};
use crate::metric::{pq_tail_check, sample_irrational, Measure};
use crate::parseval::{
    dioph_quotient_check, lemma1_i, lemma1_ii, lemma1_iii, prop1_enclosure_at, xi_brackets, xi_direct, Expansion,
    Variant,
};

pub const CORPUS_SEED: u64 = 0x5eed_2024;

#[derive(Clone, Debug, PartialEq)]
pub struct CorpusEntry {
    pub name: String,
    pub alpha: Alpha,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CorpusSize {
    Small,
    Full,
}

impl std::str::FromStr for CorpusSize {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "small" => Ok(CorpusSize::Small),
            "full" => Ok(CorpusSize::Full),
            _ => Err(Error::invalid(format!("unknown corpus `{s}` (small|full)"))),
        }
    }
}

/// Limits applied to a corpus sweep.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CorpusLimits {
    pub k_max: usize,
    /// Largest `q_K` for which lattices are materialized.
    pub n_cap: u64,
    pub random_rationals: usize,
    pub random_irrationals: usize,
}

impl CorpusSize {
    pub fn limits(self) -> CorpusLimits {
        match self {
            CorpusSize::Small => CorpusLimits { k_max: 10, n_cap: 10_000, random_rationals: 3, random_irrationals: 3 },
            CorpusSize::Full => {
                CorpusLimits { k_max: 14, n_cap: 200_000, random_rationals: 20, random_irrationals: 20 }
            }
        }
    }
}

/// `φ-1, √2-1, √3-1, e-2, tan 1 - 1`, then seeded random rationals with
/// `q <= 500` and random 256-bit irrationals.
pub fn corpus(size: CorpusSize) -> Result<Vec<CorpusEntry>> {
    let limits = size.limits();
    let mut out = Vec::new();
    for (name, spec) in [
        ("phi-1", "surd:1,5,2"),
        ("sqrt2-1", "surd:0,2,1"),
        ("sqrt3-1", "surd:0,3,1"),
        ("e-2", "rule:euler_e"),
        ("tan1-1", "rule:tan_one"),
    ] {
        out.push(CorpusEntry { name: name.into(), alpha: Alpha::parse(spec)? });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(CORPUS_SEED);
    for _ in 0..limits.random_rationals {
        let q = rng.random_range(2..=500u64);
        let p = rng.random_range(1..q);
        let alpha = Alpha::rational(p as i64, q)?;
        let (p, q) = alpha.as_rational().expect("rational");
        out.push(CorpusEntry { name: format!("{p}/{q}"), alpha });
    }
    for i in 0..limits.random_irrationals {
        let alpha = sample_irrational(Measure::Lebesgue, DEFAULT_BITS, CORPUS_SEED, i as u64)?;
        out.push(CorpusEntry { name: format!("random#{i}"), alpha });
    }
    Ok(out)
}

/// Available `K <= k_max` (bounded by the expansion length) with
/// `q_K <= n_cap`, and their denominators.
fn usable_k(alpha: &Alpha, k_max: usize, n_cap: u64) -> Result<Vec<(usize, Vec<u128>)>> {
    let len = alpha.cf().len().unwrap_or(usize::MAX).min(k_max);
    let qs = denominators(alpha.cf(), len)?;
    Ok((1..=len).filter(|&k| qs[k] <= n_cap as u128).map(|k| (k, qs.clone())).collect())
}

/// `(K, N)` pairs with `N ∈ {q_{K-1}, q_{K-1}+1, mid, q_K}`, deduplicated.
pub fn corpus_pairs(alpha: &Alpha, k_max: usize, n_cap: u64) -> Result<Vec<(usize, u64)>> {
    let mut out = Vec::new();
    for (k, qs) in usable_k(alpha, k_max, n_cap)? {
        let (lo, hi) = (qs[k - 1] as u64, qs[k] as u64);
        let mut ns = vec![lo, lo + 1, lo + (hi - lo) / 2, hi];
        ns.retain(|&n| n >= lo && n <= hi);
        ns.sort_unstable();
        ns.dedup();
        out.extend(ns.into_iter().map(|n| (k, n)));
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Violation {
    pub check: String,
    pub alpha: String,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct BoundsReport {
    /// Instances evaluated per check.
    pub counts: BTreeMap<String, usize>,
    /// Instances skipped per check (too large, precision).
    pub skipped: BTreeMap<String, usize>,
    pub violations: Vec<Violation>,
}

impl BoundsReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }

    fn merge(&mut self, other: BoundsReport) {
        for (k, v) in other.counts {
            *self.counts.entry(k).or_default() += v;
        }
        for (k, v) in other.skipped {
            *self.skipped.entry(k).or_default() += v;
        }
        self.violations.extend(other.violations);
    }

    fn record(&mut self, check: &str, alpha: &str, outcome: Result<Option<String>>) {
        match outcome {
            Ok(None) => *self.counts.entry(check.into()).or_default() += 1,
            Ok(Some(detail)) => {
                *self.counts.entry(check.into()).or_default() += 1;
                self.violations.push(Violation { check: check.into(), alpha: alpha.into(), detail });
            }
            Err(Error::TooLarge(_)) | Err(Error::PrecisionExhausted(_)) | Err(Error::ExpansionTooShort { .. }) => {
                *self.skipped.entry(check.into()).or_default() += 1
            }
            Err(e) => self.violations.push(Violation {
                check: check.into(),
                alpha: alpha.into(),
                detail: format!("error: {e}"),
            }),
        }
    }
}

/// `D₂²` inside the enclosure, for both admissible `K` when `N = q_K`.
pub fn check_enclosure(alpha: &Alpha, k: usize, n: u64, variant: Variant) -> Result<Option<String>> {
    let precision = if alpha.is_rational() { Precision::Full } else { Precision::Bits64 };
    let d = lattice_discrepancy(alpha, n as usize, variant == Variant::S, precision)?;
    let enc = prop1_enclosure_at(alpha, n, k, variant)?;
    let mut encs = vec![enc];
    if let Some(k2) = encs[0].k_alt {
        encs.push(prop1_enclosure_at(alpha, n, k2, variant)?);
    }
    for e in encs {
        if !e.contains(&d) {
            return Ok(Some(format!(
                "{variant:?} N={n} K={}: {} ± {} not in [{}, {}]",
                e.k,
                d.to_f64(),
                d.err_bound,
                e.lo,
                e.hi
            )));
        }
    }
    Ok(None)
}

/// Longest Diophantine sum evaluated by the equation-(5) check.
pub const EQ5_MAX_Q: u128 = 20_000_000;

/// Longest `N·(q_K - q_{K-1})` for which `ξ` is summed directly.
pub const XI_CHECK_WORK: u64 = 20_000_000;

/// Relative slack for the float evaluation of `ξ` against its certified
/// brackets.
pub const XI_SLACK: f64 = 1e-9;

pub fn check_xi(alpha: &Alpha, k: usize, n: u64, variant: Variant) -> Result<Option<String>> {
    let e = Expansion::of(alpha, k)?;
    let work = (e.q[k] - e.q[k - 1]) as u64 * n;
    if work > XI_CHECK_WORK {
        return Err(Error::TooLarge(format!("{work} terms")));
    }
    let xi = xi_direct(alpha, n, k, variant)?;
    let b = xi_brackets(alpha, n, k, variant)?;
    let slack = XI_SLACK * xi.abs().max(1e-300);
    for (name, iv) in [("coarse", b.coarse), ("refined", b.refined)] {
        if xi < iv.lo - slack || xi > iv.hi + slack {
            return Ok(Some(format!("{variant:?} N={n} K={k}: ξ = {xi} outside {name} [{}, {}]", iv.lo, iv.hi)));
        }
    }
    Ok(None)
}

fn check_entry(entry: &CorpusEntry, limits: CorpusLimits) -> Result<BoundsReport> {
    let mut rep = BoundsReport::default();
    let a = &entry.alpha;
    let name = entry.name.as_str();
    let pairs = corpus_pairs(a, limits.k_max, limits.n_cap)?;
    for &(k, n) in &pairs {
        for v in [Variant::S, Variant::L] {
            rep.record(&format!("enclosure_{v:?}"), name, check_enclosure(a, k, n, v));
            rep.record(&format!("xi_{v:?}"), name, check_xi(a, k, n, v));
        }
    }
    let len = a.cf().len().unwrap_or(usize::MAX);
    for k in 1..=20.min(len) {
        let outcome = denominators(a.cf(), k).and_then(|qs| {
            if qs[k] > EQ5_MAX_Q {
                return Err(Error::TooLarge("q_K".into()));
            }
            let c = dioph_quotient_check(a, k)?;
            Ok((!c.holds).then(|| format!("K={k}: {} vs {}", c.lhs, c.rhs)))
        });
        rep.record("dioph_quotients", name, outcome);
    }
    for (k, qs) in usable_k(a, limits.k_max, limits.n_cap)? {
        let qk = qs[k] as u64;
        let fmt = |c: crate::parseval::BoundCheck| (!c.holds).then(|| format!("K={k}: {} > {}", c.lhs, c.rhs));
        rep.record("lemma1_i", name, lemma1_i(a, k).map(fmt));
        for big_n in [qs[k - 1] as u64, qk, 2 * qk] {
            rep.record("lemma1_iii", name, lemma1_iii(a, k, big_n).map(fmt));
        }
        if qk <= 1000 {
            for n in [0, 1, qk / 2, qk] {
                rep.record("lemma1_ii", name, lemma1_ii(a, k, n).map(fmt));
            }
        }
    }
    Ok(rep)
}

/// Runs every check on the corpus; entries are processed in parallel and
/// merged in corpus order.
pub fn check_bounds(size: CorpusSize) -> Result<BoundsReport> {
    let limits = size.limits();
    let entries = corpus(size)?;
    let parts = entries.par_iter().map(|e| check_entry(e, limits)).collect::<Result<Vec<_>>>()?;
    let mut rep = BoundsReport::default();
    for p in parts {
        rep.merge(p);
    }
    let qs: &[u64] = match size {
        CorpusSize::Small => &[50],
        CorpusSize::Full => &[50, 200, 1000],
    };
    for &q in qs {
        for k in 1..=10 {
            for t in [2, 5, 10, 50] {
                let c = pq_tail_check(q, k, t).map(|c| (!c.holds).then(|| format!("Q={q} k={k} t={t}: {}", c.count)));
                rep.record("pq_tail", "farey", c);
            }
        }
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpus_shape() {
        let c = corpus(CorpusSize::Full).unwrap();
        assert_eq!(c.len(), 45);
        assert_eq!(c, corpus(CorpusSize::Full).unwrap());
        let pairs = corpus_pairs(&c[0].alpha, 14, 200_000).unwrap();
        assert!(pairs.iter().all(|&(k, n)| k <= 14 && n <= 610));
    }

    #[test]
    fn small_corpus_has_no_violations() {
        let rep = check_bounds(CorpusSize::Small).unwrap();
        assert!(rep.ok(), "{:#?}", rep.violations);
        assert!(rep.counts["enclosure_S"] > 50);
    }
}
