//! The point sets `L(α,N) = {({nα}, n/N) : 0 <= n < N}` and their
//! symmetrization `S(α,N)`, which adds `({-nα}, n/N)` for every `n`.
//!
//! Points are produced in `n` order; `S` lists `{nα}` then `{-nα}` for
//! each `n`, so `n = 0` contributes `(0, 0)` twice.

use std::io::{self, Write};

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::alpha::{Alpha, AlphaValue};
use crate::discrepancy::{d2_exact, Algo, DiscrepancyValue, PointSet};
use crate::error::{Error, Result};

/// How irrational coordinates are materialized.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Precision {
    /// All `B` bits of the fixed-point value.
    #[default]
    Full,
    /// 64-bit truncation; much faster, with a certified coordinate error.
    Bits64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LatticePointSet {
    pub n: usize,
    pub symmetrized: bool,
    pub points: PointSet,
    /// Upper bound on `|x_computed - x_true|` over all points.
    pub x_err: f64,
}

impl LatticePointSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Exact `D₂²` of the materialized points, with the coordinate error
    /// propagated as `5 |P|² max_err`.
    pub fn discrepancy(&self, algo: Algo) -> Result<DiscrepancyValue> {
        let mut v = d2_exact(&self.points, algo)?;
        let p = self.len() as f64;
        v.err_bound = if self.x_err == 0.0 { 0.0 } else { (5.0 * p * p * self.x_err).next_up() };
        Ok(v)
    }

    /// CSV rows `n,x_num,x_den_or_scale,y_num,y_den`.
    pub fn write_csv_exact<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "n,x_num,x_den_or_scale,y_num,y_den")?;
        let (dx, dy) = self.points.denominators();
        for i in 0..self.len() {
            let (xn, yn) = self.numerators(i);
            writeln!(w, "{yn},{xn},{dx},{yn},{dy}")?;
        }
        Ok(())
    }

    /// CSV rows `x,y` as floats.
    pub fn write_csv_float<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "x,y")?;
        for i in 0..self.len() {
            let (x, y) = self.points.point(i);
            writeln!(w, "{:.16e},{:.16e}", x.to_f64().unwrap_or(f64::NAN), y.to_f64().unwrap_or(f64::NAN))?;
        }
        Ok(())
    }

    fn numerators(&self, i: usize) -> (BigUint, BigUint) {
        match &self.points {
            PointSet::Small { xs, ys, .. } => (xs[i].into(), ys[i].into()),
            PointSet::Wide { xs, ys, .. } => (xs[i].clone(), ys[i].clone()),
        }
    }

    pub fn x_rationals(&self) -> Vec<BigRational> {
        (0..self.len()).map(|i| self.points.point(i).0).collect()
    }
}

fn check_n(n: usize) -> Result<u64> {
    if n == 0 {
        return Err(Error::invalid("N must be at least 1"));
    }
    if n as u64 >= 1 << 62 {
        return Err(Error::TooLarge(format!("N = {n}")));
    }
    Ok(n as u64)
}

fn build(alpha: &Alpha, n: usize, sym: bool, precision: Precision) -> Result<LatticePointSet> {
    let nn = check_n(n)?;
    let cap = if sym { 2 * n } else { n };
    let ys: Vec<u64> = (0..nn).flat_map(|k| std::iter::repeat_n(k, if sym { 2 } else { 1 })).collect();
    match (alpha.value(), precision) {
        (AlphaValue::Rational { p, q }, _) => {
            let (p, q) = (*p as u128, *q as u128);
            let mut xs = Vec::with_capacity(cap);
            for k in 0..nn as u128 {
                let r = (k * p % q) as u64;
                xs.push(r);
                if sym {
                    xs.push(if r == 0 { 0 } else { q as u64 - r });
                }
            }
            let points = PointSet::small(q, nn, xs, ys)?;
            Ok(LatticePointSet { n, symmetrized: sym, points, x_err: 0.0 })
        }
        (AlphaValue::Fixed(_), Precision::Bits64) => {
            let f = alpha.fixed128();
            let mut xs = Vec::with_capacity(cap);
            let mut worst = 0u128;
            for k in 0..nn {
                let (r, e) = f.frac(k);
                if e > 0 && (r <= e || r.wrapping_neg() <= e) {
                    return Err(Error::precision(format!("{{nα}} within error of 0 at n = {k}")));
                }
                worst = worst.max(e);
                xs.push((r >> 64) as u64);
                if sym {
                    xs.push((r.wrapping_neg() >> 64) as u64);
                }
            }
            // truncation to 64 bits adds < 2^-64 on top of the 2^-128 units
            let x_err = (worst as f64 * 2f64.powi(-128)).next_up() + 2f64.powi(-64);
            let points = PointSet::small(1u128 << 64, nn, xs, ys)?;
            Ok(LatticePointSet { n, symmetrized: sym, points, x_err: x_err.next_up() })
        }
        (AlphaValue::Fixed(fp), Precision::Full) => {
            let bits = fp.bits;
            let scale = BigUint::from(1u32) << bits;
            let mask = &scale - 1u32;
            let err_max = fp.err_ulp.saturating_mul(nn as u128);
            let mut xs = Vec::with_capacity(cap);
            let mut r = BigUint::zero();
            for k in 0..nn {
                let e = fp.err_ulp * k as u128;
                if e > 0 && (r <= BigUint::from(e) || &scale - &r <= BigUint::from(e)) {
                    return Err(Error::precision(format!("{{nα}} within error of 0 at n = {k}")));
                }
                if sym {
                    let neg = if r.is_zero() { BigUint::zero() } else { &scale - &r };
                    xs.push(r.clone());
                    xs.push(neg);
                } else {
                    xs.push(r.clone());
                }
                r = (r + &fp.mantissa) & &mask;
            }
            let ys = ys.into_iter().map(BigUint::from).collect();
            let points = PointSet::wide(scale, BigUint::from(nn), xs, ys)?;
            let x_err = (err_max as f64 * 2f64.powi(-(bits as i32))).next_up();
            Ok(LatticePointSet { n, symmetrized: sym, points, x_err })
        }
    }
}

/// `L(α, N)`.
#[allow(non_snake_case)]
pub fn build_L(alpha: &Alpha, n: usize, precision: Precision) -> Result<LatticePointSet> {
    build(alpha, n, false, precision)
}

/// `S(α, N)`, a multiset of `2N` points.
#[allow(non_snake_case)]
pub fn build_S(alpha: &Alpha, n: usize, precision: Precision) -> Result<LatticePointSet> {
    build(alpha, n, true, precision)
}

pub fn build_lattice(alpha: &Alpha, n: usize, sym: bool, precision: Precision) -> Result<LatticePointSet> {
    build(alpha, n, sym, precision)
}

/// `D₂²` of `L(α,N)` or `S(α,N)`; exact for rational `α`.
pub fn lattice_discrepancy(alpha: &Alpha, n: usize, sym: bool, precision: Precision) -> Result<DiscrepancyValue> {
    build(alpha, n, sym, precision)?.discrepancy(Algo::Fast)
}
