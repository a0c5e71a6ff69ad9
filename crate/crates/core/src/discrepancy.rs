//! Exact L² discrepancy of planar point multisets via Warnock's formula
//!
//! ```text
//! D₂²(P) = Σ_{i,j} (1 - max(x_i,x_j))(1 - max(y_i,y_j))
//!          - (|P|/2) Σ_i (1 - x_i²)(1 - y_i²) + |P|²/9
//! ```
//!
//! Coordinates are integers over common denominators `x = X/Dx`,
//! `y = Y/Dy`, so the three terms are summed as integers and divided once.
//! The pairwise term is computed either directly (`O(N²)`) or by a sweep
//! over `x` with a Fenwick tree on `y` ranks (`O(N log N)`).

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

/// A point multiset with common denominators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PointSet {
    /// `X < dx <= 2^64`, `Y < dy`.
    Small {
        dx: u128,
        dy: u64,
        xs: Vec<u64>,
        ys: Vec<u64>,
    },
    Wide {
        dx: BigUint,
        dy: BigUint,
        xs: Vec<BigUint>,
        ys: Vec<BigUint>,
    },
}

impl PointSet {
    pub fn small(dx: u128, dy: u64, xs: Vec<u64>, ys: Vec<u64>) -> Result<Self> {
        if dx == 0 || dx > 1u128 << 64 || dy == 0 {
            return Err(Error::invalid("denominators must be in [1, 2^64]"));
        }
        if xs.len() != ys.len() {
            return Err(Error::invalid("coordinate lists differ in length"));
        }
        if xs.iter().any(|&x| x as u128 >= dx) || ys.iter().any(|&y| y >= dy) {
            return Err(Error::invalid("coordinates must lie in [0, 1)"));
        }
        Ok(PointSet::Small { dx, dy, xs, ys })
    }

    pub fn wide(dx: BigUint, dy: BigUint, xs: Vec<BigUint>, ys: Vec<BigUint>) -> Result<Self> {
        if dx.is_zero() || dy.is_zero() || xs.len() != ys.len() {
            return Err(Error::invalid("bad denominators or lengths"));
        }
        if xs.iter().any(|x| x >= &dx) || ys.iter().any(|y| y >= &dy) {
            return Err(Error::invalid("coordinates must lie in [0, 1)"));
        }
        Ok(PointSet::Wide { dx, dy, xs, ys })
    }

    /// Brings arbitrary rational points in `[0,1)²` to common denominators.
    pub fn from_rationals(points: &[(BigRational, BigRational)]) -> Result<Self> {
        let in_unit = |r: &BigRational| !r.is_negative_or_ge_one();
        if !points.iter().all(|(x, y)| in_unit(x) && in_unit(y)) {
            return Err(Error::invalid("coordinates must lie in [0, 1)"));
        }
        let lcm = |it: &mut dyn Iterator<Item = &BigRational>| {
            it.fold(BigInt::one(), |acc, r| acc.lcm(r.denom())).to_biguint().expect("positive")
        };
        let dx = lcm(&mut points.iter().map(|p| &p.0));
        let dy = lcm(&mut points.iter().map(|p| &p.1));
        let scale = |r: &BigRational, d: &BigUint| {
            (r.numer() * BigInt::from(d.clone()) / r.denom()).to_biguint().expect("nonnegative")
        };
        let xs: Vec<BigUint> = points.iter().map(|p| scale(&p.0, &dx)).collect();
        let ys: Vec<BigUint> = points.iter().map(|p| scale(&p.1, &dy)).collect();
        let wide = PointSet::Wide { dx, dy, xs, ys };
        Ok(wide.compact())
    }

    /// Converts to the `Small` form when everything fits.
    pub fn compact(self) -> Self {
        let PointSet::Wide { dx, dy, xs, ys } = &self else { return self };
        let (Some(dxs), Some(dys)) = (dx.to_u128(), dy.to_u64()) else { return self };
        if dxs > 1u128 << 64 {
            return self;
        }
        let xs: Vec<u64> = xs.iter().map(|x| x.to_u64().expect("x < dx")).collect();
        let ys: Vec<u64> = ys.iter().map(|y| y.to_u64().expect("y < dy")).collect();
        PointSet::Small { dx: dxs, dy: dys, xs, ys }
    }

    pub fn to_wide(&self) -> PointSet {
        match self {
            PointSet::Wide { .. } => self.clone(),
            PointSet::Small { dx, dy, xs, ys } => PointSet::Wide {
                dx: BigUint::from(*dx),
                dy: BigUint::from(*dy),
                xs: xs.iter().map(|&x| BigUint::from(x)).collect(),
                ys: ys.iter().map(|&y| BigUint::from(y)).collect(),
            },
        }
    }

    pub fn len(&self) -> usize {
        match self {
            PointSet::Small { xs, .. } => xs.len(),
            PointSet::Wide { xs, .. } => xs.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn denominators(&self) -> (BigUint, BigUint) {
        match self {
            PointSet::Small { dx, dy, .. } => (BigUint::from(*dx), BigUint::from(*dy)),
            PointSet::Wide { dx, dy, .. } => (dx.clone(), dy.clone()),
        }
    }

    /// Point `i` as exact rationals.
    pub fn point(&self, i: usize) -> (BigRational, BigRational) {
        let r = |n: BigUint, d: BigUint| BigRational::new(n.into(), d.into());
        match self {
            PointSet::Small { dx, dy, xs, ys } => {
                (r(xs[i].into(), BigUint::from(*dx)), r(ys[i].into(), BigUint::from(*dy)))
            }
            PointSet::Wide { dx, dy, xs, ys } => (r(xs[i].clone(), dx.clone()), r(ys[i].clone(), dy.clone())),
        }
    }

    /// Applies a permutation of point order.
    pub fn permuted(&self, perm: &[usize]) -> PointSet {
        match self {
            PointSet::Small { dx, dy, xs, ys } => PointSet::Small {
                dx: *dx,
                dy: *dy,
                xs: perm.iter().map(|&i| xs[i]).collect(),
                ys: perm.iter().map(|&i| ys[i]).collect(),
            },
            PointSet::Wide { dx, dy, xs, ys } => PointSet::Wide {
                dx: dx.clone(),
                dy: dy.clone(),
                xs: perm.iter().map(|&i| xs[i].clone()).collect(),
                ys: perm.iter().map(|&i| ys[i].clone()).collect(),
            },
        }
    }
}

trait UnitCheck {
    fn is_negative_or_ge_one(&self) -> bool;
}

impl UnitCheck for BigRational {
    fn is_negative_or_ge_one(&self) -> bool {
        self.numer() < &BigInt::zero() || self.numer() >= self.denom()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiscrepancyValue {
    #[serde(serialize_with = "ser_rational")]
    pub d2_squared: BigRational,
    /// Bound on `|computed - true|` when coordinates were rounded; 0 when
    /// the point set is exact.
    pub err_bound: f64,
}

fn ser_rational<S: serde::Serializer>(r: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(&format_args!("{}/{}", r.numer(), r.denom()))
}

impl DiscrepancyValue {
    pub fn exact(d2_squared: BigRational) -> Self {
        DiscrepancyValue { d2_squared, err_bound: 0.0 }
    }

    pub fn to_f64(&self) -> f64 {
        self.d2_squared.to_f64().unwrap_or(f64::NAN)
    }

    /// `D₂ = sqrt(D₂²)`.
    pub fn d2(&self) -> f64 {
        self.to_f64().sqrt()
    }
}

/// Which pairwise-sum algorithm to use.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Algo {
    Quadratic,
    Fast,
}

/// 384-bit unsigned accumulator.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
struct Acc([u64; 6]);

#[inline]
fn mul_wide(a: u128, b: u128) -> (u128, u128) {
    const MASK: u128 = u64::MAX as u128;
    let (a1, a0) = (a >> 64, a & MASK);
    let (b1, b0) = (b >> 64, b & MASK);
    let p00 = a0 * b0;
    let p01 = a0 * b1;
    let p10 = a1 * b0;
    let p11 = a1 * b1;
    let mid = (p00 >> 64) + (p01 & MASK) + (p10 & MASK);
    let lo = (p00 & MASK) | (mid << 64);
    let hi = p11 + (p01 >> 64) + (p10 >> 64) + (mid >> 64);
    (hi, lo)
}

impl Acc {
    #[inline]
    fn add_at(&mut self, mut limb: usize, x: u128) {
        let (lo, hi) = (x as u64, (x >> 64) as u64);
        let (s, c1) = self.0[limb].overflowing_add(lo);
        self.0[limb] = s;
        limb += 1;
        let (s, c2) = self.0[limb].overflowing_add(hi);
        let (s, c3) = s.overflowing_add(c1 as u64);
        self.0[limb] = s;
        let mut carry = c2 as u64 + c3 as u64;
        while carry > 0 {
            limb += 1;
            let (s, c) = self.0[limb].overflowing_add(carry);
            self.0[limb] = s;
            carry = c as u64;
        }
    }

    #[inline]
    fn add(&mut self, x: u128) {
        self.add_at(0, x);
    }

    #[inline]
    fn add_prod(&mut self, a: u128, b: u128) {
        let (hi, lo) = mul_wide(a, b);
        self.add_at(0, lo);
        if hi != 0 {
            self.add_at(2, hi);
        }
    }

    fn to_biguint(self) -> BigUint {
        BigUint::from_slice(&self.0.iter().flat_map(|&l| [l as u32, (l >> 32) as u32]).collect::<Vec<_>>())
    }
}

/// Fenwick tree over ranks holding a count and a sum per slot.
struct Fenwick<S> {
    cnt: Vec<u64>,
    sum: Vec<S>,
}

impl<S: Clone + Default + for<'a> std::ops::AddAssign<&'a S>> Fenwick<S> {
    fn new(n: usize) -> Self {
        Fenwick { cnt: vec![0; n + 1], sum: vec![S::default(); n + 1] }
    }

    fn add(&mut self, rank: usize, v: &S) {
        let mut i = rank + 1;
        while i < self.cnt.len() {
            self.cnt[i] += 1;
            self.sum[i] += v;
            i += i & i.wrapping_neg();
        }
    }

    /// Count and sum over ranks `<= rank`.
    fn prefix(&self, rank: usize) -> (u64, S) {
        let mut i = rank + 1;
        let (mut c, mut s) = (0, S::default());
        while i > 0 {
            c += self.cnt[i];
            s += &self.sum[i];
            i &= i - 1;
        }
        (c, s)
    }
}

#[derive(Clone, Copy, Default)]
struct W(u128);

impl std::ops::AddAssign<&W> for W {
    fn add_assign(&mut self, rhs: &W) {
        self.0 += rhs.0;
    }
}

/// `y` ranks: the coordinate itself when the grid is small, otherwise a
/// dense rank among distinct values.
fn y_ranks_small(dy: u64, ys: &[u64]) -> (Vec<usize>, usize) {
    if dy as usize <= 4 * ys.len() + 16 {
        (ys.iter().map(|&y| y as usize).collect(), dy as usize)
    } else {
        let mut sorted = ys.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        let ranks = ys.iter().map(|y| sorted.binary_search(y).expect("present")).collect();
        (ranks, sorted.len())
    }
}

fn pairwise_small_fast(dx: u128, dy: u64, xs: &[u64], ys: &[u64]) -> BigUint {
    let n = xs.len();
    let mut order: Vec<u32> = (0..n as u32).collect();
    order.sort_unstable_by_key(|&i| xs[i as usize]);
    let (ranks, size) = y_ranks_small(dy, ys);
    let mut tree: Fenwick<W> = Fenwick::new(size);
    let mut total = 0u128;
    let (mut off, mut diag) = (Acc::default(), Acc::default());
    for (seen, &j) in order.iter().enumerate() {
        let j = j as usize;
        let wx = dx - xs[j] as u128;
        let wy = (dy - ys[j]) as u128;
        let (cnt_le, W(sum_le)) = tree.prefix(ranks[j]);
        debug_assert!(cnt_le as usize <= seen);
        let inner = wy * cnt_le as u128 + (total - sum_le);
        off.add_prod(wx, inner);
        diag.add_prod(wx, wy);
        tree.add(ranks[j], &W(wy));
        total += wy;
    }
    (off.to_biguint() << 1u32) + diag.to_biguint()
}

fn pairwise_small_quadratic(dx: u128, dy: u64, xs: &[u64], ys: &[u64]) -> BigUint {
    let n = xs.len();
    let (mut off, mut diag) = (Acc::default(), Acc::default());
    for i in 0..n {
        let (xi, yi) = (xs[i], ys[i]);
        diag.add((dx - xi as u128) * (dy - yi) as u128);
        let mut row = Acc::default();
        for j in i + 1..n {
            let wx = dx - xi.max(xs[j]) as u128;
            let wy = (dy - yi.max(ys[j])) as u128;
            row.add(wx * wy);
        }
        for (k, &limb) in row.0.iter().enumerate() {
            if limb != 0 {
                off.add_at(k, limb as u128);
            }
        }
    }
    (off.to_biguint() << 1u32) + diag.to_biguint()
}

fn pairwise_wide_fast(dx: &BigUint, dy: &BigUint, xs: &[BigUint], ys: &[BigUint]) -> BigUint {
    let n = xs.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| xs[a].cmp(&xs[b]));
    let mut sorted_y: Vec<&BigUint> = ys.iter().collect();
    sorted_y.sort();
    sorted_y.dedup();
    let rank = |y: &BigUint| sorted_y.binary_search(&y).expect("present");
    let mut tree: Fenwick<BigUint> = Fenwick::new(sorted_y.len());
    let mut total = BigUint::zero();
    let (mut off, mut diag) = (BigUint::zero(), BigUint::zero());
    for &j in &order {
        let wx = dx - &xs[j];
        let wy = dy - &ys[j];
        let r = rank(&ys[j]);
        let (cnt_le, sum_le) = tree.prefix(r);
        let inner = &wy * BigUint::from(cnt_le) + (&total - sum_le);
        off += &wx * inner;
        diag += &wx * &wy;
        tree.add(r, &wy);
        total += &wy;
    }
    (off << 1u32) + diag
}

fn pairwise_wide_quadratic(dx: &BigUint, dy: &BigUint, xs: &[BigUint], ys: &[BigUint]) -> BigUint {
    let n = xs.len();
    let (mut off, mut diag) = (BigUint::zero(), BigUint::zero());
    for i in 0..n {
        diag += (dx - &xs[i]) * (dy - &ys[i]);
        for j in i + 1..n {
            off += (dx - std::cmp::max(&xs[i], &xs[j])) * (dy - std::cmp::max(&ys[i], &ys[j]));
        }
    }
    (off << 1u32) + diag
}

/// `Σ (Dx² - X²)(Dy² - Y²)`.
fn diagonal_sum(set: &PointSet) -> BigUint {
    match set {
        PointSet::Small { dx, dy, xs, ys } => {
            // n Dx² Dy² - Dx² ΣY² - Dy² ΣX² + Σ (XY)²
            let (mut sx2, mut sy2, mut sxy2) = (Acc::default(), Acc::default(), Acc::default());
            for (&x, &y) in xs.iter().zip(ys) {
                let (x, y) = (x as u128, y as u128);
                sx2.add(x * x);
                sy2.add(y * y);
                let xy = x * y;
                sxy2.add_prod(xy, xy);
            }
            let dx2 = BigUint::from(*dx).pow(2);
            let dy2 = BigUint::from(*dy).pow(2);
            let n = BigUint::from(xs.len());
            let pos = &n * &dx2 * &dy2 + sxy2.to_biguint();
            let neg = &dx2 * sy2.to_biguint() + &dy2 * sx2.to_biguint();
            pos - neg
        }
        PointSet::Wide { dx, dy, xs, ys } => {
            let dx2 = dx * dx;
            let dy2 = dy * dy;
            xs.iter().zip(ys).map(|(x, y)| (&dx2 - x * x) * (&dy2 - y * y)).sum()
        }
    }
}

fn assemble(set: &PointSet, pairwise: BigUint) -> BigRational {
    let (dx, dy) = set.denominators();
    let n = BigInt::from(set.len());
    let dxdy = BigInt::from(dx * dy);
    let dxdy2 = &dxdy * &dxdy;
    let num = BigInt::from(18) * &dxdy * BigInt::from(pairwise)
        - BigInt::from(9) * &n * BigInt::from(diagonal_sum(set))
        + BigInt::from(2) * &n * &n * &dxdy2;
    BigRational::new(num, BigInt::from(18) * dxdy2)
}

fn fits_small_sums(set: &PointSet) -> bool {
    match set {
        // Fenwick sums stay below |P| · Dy
        PointSet::Small { dy, xs, .. } => (xs.len() as u128) < (1u128 << 126) / (*dy as u128 + 1),
        PointSet::Wide { .. } => false,
    }
}

fn run(set: &PointSet, algo: Algo) -> Result<BigRational> {
    if set.is_empty() {
        return Err(Error::EmptyPointSet);
    }
    let wide;
    let set = if matches!(set, PointSet::Small { .. }) && !fits_small_sums(set) {
        wide = set.to_wide();
        &wide
    } else {
        set
    };
    let pairwise = match (set, algo) {
        (PointSet::Small { dx, dy, xs, ys }, Algo::Fast) => pairwise_small_fast(*dx, *dy, xs, ys),
        (PointSet::Small { dx, dy, xs, ys }, Algo::Quadratic) => pairwise_small_quadratic(*dx, *dy, xs, ys),
        (PointSet::Wide { dx, dy, xs, ys }, Algo::Fast) => pairwise_wide_fast(dx, dy, xs, ys),
        (PointSet::Wide { dx, dy, xs, ys }, Algo::Quadratic) => pairwise_wide_quadratic(dx, dy, xs, ys),
    };
    Ok(assemble(set, pairwise))
}

/// Direct pairwise evaluation, `O(N²)`.
pub fn d2_exact_quadratic(set: &PointSet) -> Result<DiscrepancyValue> {
    run(set, Algo::Quadratic).map(DiscrepancyValue::exact)
}

/// Sweep-line evaluation, `O(N log N)`; bit-identical to the quadratic form.
pub fn d2_exact_fast(set: &PointSet) -> Result<DiscrepancyValue> {
    run(set, Algo::Fast).map(DiscrepancyValue::exact)
}

pub fn d2_exact(set: &PointSet, algo: Algo) -> Result<DiscrepancyValue> {
    run(set, algo).map(DiscrepancyValue::exact)
}

/// `D₂(P)` as a float.
pub fn d2(set: &PointSet) -> Result<f64> {
    Ok(d2_exact_fast(set)?.d2())
}
