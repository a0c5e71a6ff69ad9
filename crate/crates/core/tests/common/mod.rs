//! Independent oracles shared by the integration tests. None of these call
//! into the code paths they are used to check.

#![allow(dead_code)]

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

/// `∫∫ (B(x,y) - |P|xy)² dx dy` by splitting the square at every point
/// coordinate and integrating the polynomial exactly on each cell, where the
/// counting function `B` is constant.
pub fn piecewise_d2(points: &[(BigRational, BigRational)]) -> BigRational {
    let n = BigRational::from_integer(BigInt::from(points.len()));
    let grid = |coord: &dyn Fn(&(BigRational, BigRational)) -> BigRational| {
        let mut v: Vec<BigRational> = points.iter().map(coord).collect();
        v.push(BigRational::zero());
        v.push(BigRational::one());
        v.sort();
        v.dedup();
        v
    };
    let xs = grid(&|p| p.0.clone());
    let ys = grid(&|p| p.1.clone());
    let pow = |x: &BigRational, k: i32| -> BigRational { num_traits::pow(x.clone(), k as usize) };
    let two = BigRational::from_integer(2.into());
    let three = BigRational::from_integer(3.into());
    let mut total = BigRational::zero();
    for xw in xs.windows(2) {
        let (x0, x1) = (&xw[0], &xw[1]);
        for yw in ys.windows(2) {
            let (y0, y1) = (&yw[0], &yw[1]);
            // on the open cell, a point is counted iff both coordinates are <= the cell's lower corner
            let c = points.iter().filter(|(px, py)| px <= x0 && py <= y0).count();
            let c = BigRational::from_integer(BigInt::from(c));
            let dx = x1 - x0;
            let dy = y1 - y0;
            let dx2 = (pow(x1, 2) - pow(x0, 2)) / &two;
            let dy2 = (pow(y1, 2) - pow(y0, 2)) / &two;
            let dx3 = (pow(x1, 3) - pow(x0, 3)) / &three;
            let dy3 = (pow(y1, 3) - pow(y0, 3)) / &three;
            total += &c * &c * dx * dy - &two * &c * &n * dx2 * dy2 + &n * &n * dx3 * dy3;
        }
    }
    total
}

/// Partial quotients of a positive rational, by the Euclidean algorithm.
pub fn rational_quotients(r: &BigRational) -> Vec<BigInt> {
    let (mut a, mut b) = (r.numer().clone(), r.denom().clone());
    let mut out = Vec::new();
    while !b.is_zero() {
        let (q, rem) = a.div_mod_floor(&b);
        out.push(q);
        a = b;
        b = rem;
    }
    out
}

/// Longest common prefix of the expansions of `lo` and `hi`; every real in
/// `[lo, hi]` shares it except possibly for the final entry, which is dropped.
pub fn certified_quotients(lo: &BigRational, hi: &BigRational) -> Vec<u64> {
    let a = rational_quotients(lo);
    let b = rational_quotients(hi);
    let common = a.iter().zip(&b).take_while(|(x, y)| x == y).count();
    a[..common.saturating_sub(1)].iter().map(|x| x.to_u64().expect("small quotient")).collect()
}

fn factorial(k: u32) -> BigInt {
    (1..=k).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

/// Decimal truncation to `digits` places, rounded down and up.
fn decimal_bracket(x: &BigRational, digits: u32) -> (BigRational, BigRational) {
    let scale = num_traits::pow(BigInt::from(10), digits as usize);
    let scaled = x * BigRational::from_integer(scale.clone());
    let lo = scaled.floor().to_integer();
    (BigRational::new(lo.clone(), scale.clone()), BigRational::new(lo + 1, scale))
}

/// `e` to 300 decimal digits as a certified bracket: the partial sum of
/// `1/k!` to `k = 200` has remainder below `2/201!`.
pub fn e_bracket() -> (BigRational, BigRational) {
    let terms = 200;
    let sum = (0..=terms).fold(BigRational::zero(), |acc, k| acc + BigRational::new(BigInt::one(), factorial(k)));
    let rem = BigRational::new(BigInt::from(2), factorial(terms + 1));
    let (lo, _) = decimal_bracket(&sum, 300);
    let (_, hi) = decimal_bracket(&(sum + rem), 300);
    (lo, hi)
}

/// `tan 1 = sin 1 / cos 1` to 300 decimal digits; both alternating series
/// are bracketed by consecutive partial sums.
pub fn tan1_bracket() -> (BigRational, BigRational) {
    let series = |start: u32| {
        let mut sum = BigRational::zero();
        let mut k = start;
        let mut sign = 1;
        while k < 200 {
            sum += BigRational::new(BigInt::from(sign), factorial(k));
            sign = -sign;
            k += 2;
        }
        // the next omitted term bounds the remainder
        let next = BigRational::new(BigInt::one(), factorial(k));
        (&sum - &next, &sum + &next)
    };
    let (s_lo, s_hi) = series(1);
    let (c_lo, c_hi) = series(0);
    let (lo, _) = decimal_bracket(&(s_lo / c_hi), 300);
    let (_, hi) = decimal_bracket(&(s_hi / c_lo), 300);
    (lo, hi)
}

/// Kendall's τ and the two-sided p-value of the no-trend hypothesis from the
/// normal approximation (no ties expected).
pub fn kendall_trend(y: &[f64]) -> (f64, f64) {
    let n = y.len();
    let mut s = 0i64;
    for i in 0..n {
        for j in i + 1..n {
            s += match y[j].partial_cmp(&y[i]) {
                Some(std::cmp::Ordering::Greater) => 1,
                Some(std::cmp::Ordering::Less) => -1,
                _ => 0,
            };
        }
    }
    let nf = n as f64;
    let tau = 2.0 * s as f64 / (nf * (nf - 1.0));
    let var = nf * (nf - 1.0) * (2.0 * nf + 5.0) / 18.0;
    let z = if s == 0 { 0.0 } else { (s.abs() as f64 - 1.0) / var.sqrt() };
    (tau, libm::erfc(z / std::f64::consts::SQRT_2))
}

/// `∫_0^t e^{-1/(2x)} / (√(2π) x^{3/2}) dx` by composite Simpson in
/// `u = ln x`, starting where the density is below `e^{-500}`.
pub fn levy_cdf_quadrature(t: f64) -> f64 {
    let f = |u: f64| {
        let x = u.exp();
        (-0.5 / x).exp() / ((2.0 * std::f64::consts::PI).sqrt() * x.sqrt())
    };
    let (a, b) = (1e-3f64.ln(), t.ln());
    if b <= a {
        return 0.0;
    }
    let steps = 40_000;
    let h = (b - a) / steps as f64;
    let mut acc = f(a) + f(b);
    for i in 1..steps {
        acc += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    acc * h / 3.0
}
