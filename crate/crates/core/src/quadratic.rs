//! Asymptotic constants of quadratic irrationals: the signed period average
//! `A(α)`, the growth rate `Λ(α)` of `log q_K`, and a regression estimate
//! of the constant `c(α)` in `Σ_{m<=M} 1/(4π⁴m²‖mα‖²) = c(α) log M + O(1)`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::alpha::Alpha;
use crate::cf::{cf_stats, denominators, Body, ContinuedFraction};
use crate::error::{Error, Result};
use crate::interval::{consts, Interval};
use crate::lattice::{lattice_discrepancy, Precision};
use crate::parseval::{inv_sq_sum, Norms, Variant};

fn period_of(cf: &ContinuedFraction) -> Result<(&[u64], &[u64])> {
    match cf.body() {
        Body::Periodic { pre, period } => Ok((pre, period)),
        _ => Err(Error::NotPeriodic),
    }
}

/// `A(α) = p⁻¹ Σ_{k=1}^p (-1)^{r+k} a_{r+k}` for even period length `p`,
/// and 0 for odd `p`.
pub fn a_constant(cf: &ContinuedFraction) -> Result<BigRational> {
    let (pre, period) = period_of(cf)?;
    let p = period.len();
    if p % 2 == 1 {
        return Ok(BigRational::zero());
    }
    let r = pre.len();
    let s: i128 =
        period.iter().enumerate().map(|(i, &a)| if (r + i + 1) % 2 == 0 { a as i128 } else { -(a as i128) }).sum();
    Ok(BigRational::new(BigInt::from(s), BigInt::from(p)))
}

/// The product of `[[0,1],[1,a]]` over one period.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PeriodMatrix {
    pub m: [[i128; 2]; 2],
    pub trace: i128,
    pub det: i128,
    pub period_len: usize,
}

pub fn period_matrix(cf: &ContinuedFraction) -> Result<PeriodMatrix> {
    let (_, period) = period_of(cf)?;
    let mut m = [[1i128, 0], [0, 1]];
    for &a in period {
        let a = a as i128;
        let next = [[m[0][1], m[0][0] + a * m[0][1]], [m[1][1], m[1][0] + a * m[1][1]]];
        if next.iter().flatten().any(|x| x.unsigned_abs() > 1 << 100) {
            return Err(Error::TooLarge("period matrix entries".into()));
        }
        m = next;
    }
    Ok(PeriodMatrix {
        trace: m[0][0] + m[1][1],
        det: m[0][0] * m[1][1] - m[0][1] * m[1][0],
        m,
        period_len: period.len(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LambdaConstant {
    pub matrix: PeriodMatrix,
    /// `η = (tr + √(tr² - 4 det)) / 2`.
    pub eta: f64,
    pub lambda: f64,
}

/// `Λ(α) = p⁻¹ log η` with `η` the larger eigenvalue of the period matrix.
pub fn lambda_constant(cf: &ContinuedFraction) -> Result<LambdaConstant> {
    let matrix = period_matrix(cf)?;
    let tr = matrix.trace as f64;
    let disc = tr * tr - 4.0 * matrix.det as f64;
    let eta = 0.5 * (tr + disc.sqrt());
    let lambda = eta.ln() / matrix.period_len as f64;
    Ok(LambdaConstant { matrix, eta, lambda })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub stderr: f64,
}

/// Ordinary least squares `y = slope·x + intercept`; needs 3 or more points
/// for a standard error.
pub fn linear_fit(x: &[f64], y: &[f64]) -> Result<LinearFit> {
    let n = x.len();
    if n != y.len() || n < 3 {
        return Err(Error::invalid("need at least 3 paired points"));
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    if sxx == 0.0 {
        return Err(Error::invalid("degenerate abscissae"));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = x.iter().zip(y).map(|(a, b)| (b - slope * a - intercept).powi(2)).sum();
    let stderr = (rss / (nf - 2.0) / sxx).sqrt();
    Ok(LinearFit { slope, intercept, stderr })
}

/// Least squares `y = c0 + c1 x + c2 x²`, returning `[c0, c1, c2]` and the
/// standard error of `c2`.
pub fn quadratic_fit(x: &[f64], y: &[f64]) -> Result<([f64; 3], f64)> {
    let n = x.len();
    if n != y.len() || n < 4 {
        return Err(Error::invalid("need at least 4 paired points"));
    }
    // centre and scale x for conditioning, then map back
    let mx = x.iter().sum::<f64>() / n as f64;
    let sx = x.iter().map(|v| (v - mx).abs()).fold(0.0, f64::max).max(1e-300);
    let u: Vec<f64> = x.iter().map(|v| (v - mx) / sx).collect();
    let mut ata = [[0.0f64; 3]; 3];
    let mut aty = [0.0f64; 3];
    for (ui, yi) in u.iter().zip(y) {
        let row = [1.0, *ui, ui * ui];
        for i in 0..3 {
            aty[i] += row[i] * yi;
            for j in 0..3 {
                ata[i][j] += row[i] * row[j];
            }
        }
    }
    let inv = invert3(&ata).ok_or_else(|| Error::invalid("singular design matrix"))?;
    let b: Vec<f64> = (0..3).map(|i| (0..3).map(|j| inv[i][j] * aty[j]).sum()).collect();
    let rss: f64 = u.iter().zip(y).map(|(ui, yi)| (yi - b[0] - b[1] * ui - b[2] * ui * ui).powi(2)).sum();
    let sigma2 = rss / (n as f64 - 3.0);
    let se_b2 = (sigma2 * inv[2][2]).sqrt();
    // y = b0 + b1 (x-mx)/sx + b2 (x-mx)²/sx²
    let c2 = b[2] / (sx * sx);
    let c1 = b[1] / sx - 2.0 * mx * c2;
    let c0 = b[0] - b[1] * mx / sx + b[2] * mx * mx / (sx * sx);
    Ok(([c0, c1, c2], se_b2 / (sx * sx)))
}

fn invert3(m: &[[f64; 3]; 3]) -> Option<[[f64; 3]; 3]> {
    let c = |i: usize, j: usize| {
        let (r0, r1) = ((i + 1) % 3, (i + 2) % 3);
        let (c0, c1) = ((j + 1) % 3, (j + 2) % 3);
        m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0]
    };
    let det = m[0][0] * c(0, 0) + m[0][1] * c(0, 1) + m[0][2] * c(0, 2);
    if det.abs() < 1e-300 {
        return None;
    }
    let mut out = [[0.0; 3]; 3];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = c(j, i) / det;
        }
    }
    Some(out)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BeckEstimate {
    pub c_hat: f64,
    pub stderr: f64,
    /// `(M, Σ_{m<=M} 1/(4π⁴m²‖mα‖²))`.
    pub points: Vec<(u64, Interval)>,
}

/// A geometric grid of `count` points from `lo` to `hi`, deduplicated.
pub fn geometric_grid(lo: u64, hi: u64, count: usize) -> Vec<u64> {
    if count < 2 || lo >= hi {
        return vec![lo.max(1)];
    }
    let (a, b) = ((lo.max(1) as f64).ln(), (hi as f64).ln());
    let mut g: Vec<u64> =
        (0..count).map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp().round() as u64).collect();
    g.dedup();
    g
}

/// Slope of `Σ_{m<=M} 1/(4π⁴m²‖mα‖²)` against `log M` over `grid`.
pub fn beck_constant_estimate(alpha: &Alpha, grid: &[u64]) -> Result<BeckEstimate> {
    let mut grid = grid.to_vec();
    grid.sort_unstable();
    grid.dedup();
    if grid.len() < 4 {
        return Err(Error::invalid("the M grid needs at least 4 distinct points"));
    }
    if grid[0] == 0 {
        return Err(Error::invalid("M must be at least 1"));
    }
    let norms = Norms::new(alpha);
    let quarter = consts::pi4() * Interval::point(4.0);
    let mut acc = Interval::ZERO;
    let mut start = 1u64;
    let mut points = Vec::with_capacity(grid.len());
    for &m in &grid {
        acc = acc + inv_sq_sum(&norms, start..m + 1)?;
        start = m + 1;
        points.push((m, acc / quarter));
    }
    let x: Vec<f64> = grid.iter().map(|&m| (m as f64).ln()).collect();
    let y: Vec<f64> = points.iter().map(|(_, v)| v.mid()).collect();
    let fit = linear_fit(&x, &y)?;
    Ok(BeckEstimate { c_hat: fit.slope, stderr: fit.stderr, points })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QuadraticAsymptotics {
    /// `A(α)` as `num/den`.
    pub a: String,
    pub a_f64: f64,
    pub lambda: LambdaConstant,
    pub c_hat: Option<BeckEstimate>,
}

pub fn asymptotics(alpha: &Alpha, grid: Option<&[u64]>) -> Result<QuadraticAsymptotics> {
    let a = a_constant(alpha.cf())?;
    let lambda = lambda_constant(alpha.cf())?;
    let c_hat = grid.map(|g| beck_constant_estimate(alpha, g)).transpose()?;
    Ok(QuadraticAsymptotics { a: a.to_string(), a_f64: a.to_f64().unwrap_or(f64::NAN), lambda, c_hat })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Theorem2Row {
    pub k: usize,
    pub n: u64,
    pub log_n: f64,
    pub d2sq: f64,
    pub err_bound: f64,
    /// `D₂² - c·log N` for S, `D₂² - target·log² N` for L.
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Theorem2Table {
    pub variant: Variant,
    pub c: f64,
    pub rows: Vec<Theorem2Row>,
    /// Predicted `log² N` coefficient `A²/(144Λ²)` (L only).
    pub beta_target: Option<f64>,
    /// `[δ, γ, β]` in `D₂² = β log²N + γ log N + δ` (L only, 4+ rows).
    pub quadratic: Option<[f64; 3]>,
    pub beta_stderr: Option<f64>,
    /// Slope of `D₂²` against `log N`.
    pub slope: Option<LinearFit>,
}

/// Largest `N` for which `theorem2_residuals` materializes a lattice.
pub const THEOREM2_MAX_N: u64 = 4_000_000;

/// `D₂²` at `N = q_K` for `K` in `k_range` and residuals against the
/// predicted growth, with `c` the Beck constant (estimated by the caller).
pub fn theorem2_residuals(
    alpha: &Alpha,
    k_range: std::ops::RangeInclusive<usize>,
    variant: Variant,
    c: f64,
) -> Result<Theorem2Table> {
    let k_max = *k_range.end();
    let qs = denominators(alpha.cf(), k_max)?;
    let beta_target = match variant {
        Variant::S => None,
        Variant::L => {
            let a = a_constant(alpha.cf())?.to_f64().unwrap_or(f64::NAN);
            let l = lambda_constant(alpha.cf())?.lambda;
            Some(a * a / (144.0 * l * l))
        }
    };
    let mut rows = Vec::new();
    for k in k_range {
        let n = qs[k];
        if n > THEOREM2_MAX_N as u128 {
            return Err(Error::TooLarge(format!("q_{k} = {n} exceeds {THEOREM2_MAX_N}")));
        }
        let n = n as u64;
        let v = lattice_discrepancy(alpha, n as usize, variant == Variant::S, Precision::Bits64)?;
        let d = v.to_f64();
        let log_n = (n as f64).ln();
        let residual = match variant {
            Variant::S => d - c * log_n,
            Variant::L => d - beta_target.unwrap_or(0.0) * log_n * log_n,
        };
        rows.push(Theorem2Row { k, n, log_n, d2sq: d, err_bound: v.err_bound, residual });
    }
    let x: Vec<f64> = rows.iter().map(|r| r.log_n).collect();
    let y: Vec<f64> = rows.iter().map(|r| r.d2sq).collect();
    let (quadratic, beta_stderr) = match variant {
        Variant::L if rows.len() >= 4 => {
            let (c3, se) = quadratic_fit(&x, &y)?;
            (Some(c3), Some(se))
        }
        _ => (None, None),
    };
    let slope = if rows.len() >= 3 { Some(linear_fit(&x, &y)?) } else { None };
    Ok(Theorem2Table { variant, c, rows, beta_target, quadratic, beta_stderr, slope })
}

/// `|log q_K - Λ K|` for `K = 1..=k_max`.
pub fn lambda_deviations(alpha: &Alpha, k_max: usize) -> Result<Vec<f64>> {
    let l = lambda_constant(alpha.cf())?.lambda;
    let qs = denominators(alpha.cf(), k_max)?;
    Ok((1..=k_max).map(|k| ((qs[k] as f64).ln() - l * k as f64).abs()).collect())
}

/// `Σ_{k<=K} (-1)^k a_k - A K` for `K = 1..=k_max`.
pub fn alt_sum_deviations(alpha: &Alpha, k_max: usize) -> Result<Vec<f64>> {
    let a = a_constant(alpha.cf())?.to_f64().unwrap_or(f64::NAN);
    (1..=k_max).map(|k| Ok(cf_stats(alpha.cf(), k)?.alt_sum.to_f64().unwrap_or(f64::NAN) - a * k as f64)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cf::{cf_of_surd, QuadraticSurd};

    fn surd(p: i64, d: i64, q: i64) -> ContinuedFraction {
        cf_of_surd(&QuadraticSurd::new(p, d, q).unwrap()).unwrap()
    }

    #[test]
    fn a_constants() {
        assert!(a_constant(&ContinuedFraction::golden()).unwrap().is_zero());
        assert!(a_constant(&surd(0, 2, 1)).unwrap().is_zero());
        let half = BigRational::new(1.into(), 2.into());
        assert_eq!(a_constant(&surd(0, 3, 1)).unwrap(), half);
        assert!(a_constant(&ContinuedFraction::finite(0, vec![1, 2]).unwrap()).is_err());
    }

    #[test]
    fn lambda_of_golden_and_root3() {
        let g = lambda_constant(&ContinuedFraction::golden()).unwrap();
        assert_eq!(g.matrix.m, [[0, 1], [1, 1]]);
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((g.eta - phi).abs() < 1e-15);
        let r3 = lambda_constant(&surd(0, 3, 1)).unwrap();
        assert_eq!(r3.matrix.m, [[1, 2], [1, 3]]);
        assert_eq!((r3.matrix.trace, r3.matrix.det), (4, 1));
        assert!((r3.lambda - 0.5 * (2.0 + 3f64.sqrt()).ln()).abs() < 1e-15);
    }

    #[test]
    fn fits_recover_exact_polynomials() {
        let x: Vec<f64> = (1..10).map(|i| i as f64).collect();
        let y: Vec<f64> = x.iter().map(|v| 3.0 * v - 1.0).collect();
        let f = linear_fit(&x, &y).unwrap();
        assert!((f.slope - 3.0).abs() < 1e-12 && f.stderr < 1e-10);
        let y: Vec<f64> = x.iter().map(|v| 0.5 * v * v - 2.0 * v + 7.0).collect();
        let (c, _) = quadratic_fit(&x, &y).unwrap();
        for (got, want) in c.iter().zip([7.0, -2.0, 0.5]) {
            assert!((got - want).abs() < 1e-9, "{c:?}");
        }
    }

    #[test]
    fn grid_too_small() {
        let a = Alpha::parse("surd:1,5,2").unwrap();
        assert!(beck_constant_estimate(&a, &[10, 100, 1000]).is_err());
    }

    #[test]
    fn rational_sum_saturates() {
        let a = Alpha::rational(1, 2).unwrap();
        let e = beck_constant_estimate(&a, &[10, 100, 1000, 10000]).unwrap();
        // only odd m contribute, so the sum keeps growing towards a limit
        assert!(e.c_hat.abs() < 0.01);
    }
}
