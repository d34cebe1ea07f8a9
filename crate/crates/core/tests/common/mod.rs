//! Independent oracles and goodness-of-fit helpers shared by the
//! integration tests. Nothing here calls into the crate's numerical code.
#![allow(dead_code)]

use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use statrs::distribution::{ChiSquared, ContinuousCDF};
use statrs::function::erf::erfc;

/// `P(χ²_df > x)` from closed forms: a finite Poisson sum for even `df`,
/// and for odd `df` the recurrence `Q(a+1, y) = Q(a, y) + yᵃe⁻ʸ/Γ(a+1)`
/// started at `Q(1/2, y) = erfc(√y)`.
pub fn chi2_sf_oracle(x: f64, df: u32) -> f64 {
    let y = x / 2.0;
    if df % 2 == 0 {
        let mut term = (-y).exp();
        let mut sum = term;
        for j in 1..df / 2 {
            term *= y / j as f64;
            sum += term;
        }
        sum
    } else {
        let mut q = erfc(y.sqrt());
        // yᵃe⁻ʸ/Γ(a+1) at a = 1/2, Γ(3/2) = √π/2
        let mut term = y.sqrt() * (-y).exp() / (std::f64::consts::PI.sqrt() / 2.0);
        let mut a = 0.5;
        for _ in 0..(df - 1) / 2 {
            q += term;
            term *= y / (a + 1.0);
            a += 1.0;
        }
        q
    }
}

/// Determinant by cofactor expansion along the first row.
pub fn cofactor_det(m: &[Vec<f64>]) -> f64 {
    let n = m.len();
    match n {
        0 => 1.0,
        1 => m[0][0],
        2 => m[0][0] * m[1][1] - m[0][1] * m[1][0],
        _ => (0..n)
            .map(|j| {
                let minor: Vec<Vec<f64>> = m[1..]
                    .iter()
                    .map(|row| {
                        row.iter()
                            .enumerate()
                            .filter(|(c, _)| *c != j)
                            .map(|(_, &v)| v)
                            .collect()
                    })
                    .collect();
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                sign * m[0][j] * cofactor_det(&minor)
            })
            .sum(),
    }
}

/// Exact determinant of a matrix of `f64` entries, by cofactor expansion
/// over rationals.
pub fn exact_det(m: &[Vec<f64>]) -> BigRational {
    let exact: Vec<Vec<BigRational>> = m
        .iter()
        .map(|row| row.iter().map(|&v| BigRational::from_float(v).unwrap()).collect())
        .collect();
    exact_cofactor(&exact)
}

fn exact_cofactor(m: &[Vec<BigRational>]) -> BigRational {
    if m.is_empty() {
        return BigRational::one();
    }
    let mut total = BigRational::zero();
    for j in 0..m.len() {
        let minor: Vec<Vec<BigRational>> = m[1..]
            .iter()
            .map(|row| row.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, v)| v.clone()).collect())
            .collect();
        let term = &m[0][j] * exact_cofactor(&minor);
        if j % 2 == 0 {
            total += term;
        } else {
            total -= term;
        }
    }
    total
}

/// `ln[det(M_aa) det(M_bb) / det(M)]` with the determinants exact, so the
/// only rounding is in the final conversion and `ln_1p`.
pub fn exact_log_ratio(m: &[Vec<f64>], a: &[usize], b: &[usize]) -> f64 {
    let num = exact_det(&sub_rows(m, a)) * exact_det(&sub_rows(m, b));
    let den = exact_det(m);
    ((&num - &den) / den).to_f64().unwrap().ln_1p()
}

pub fn sub_rows(m: &[Vec<f64>], idx: &[usize]) -> Vec<Vec<f64>> {
    idx.iter()
        .map(|&i| idx.iter().map(|&j| m[i][j]).collect())
        .collect()
}

/// Two-sided one-sample KS statistic against a continuous CDF.
pub fn ks_statistic(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut v = samples.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    v.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

/// Asymptotic KS critical value `sqrt(-ln(α/2)/2)/√n`.
pub fn ks_critical(n: usize, alpha: f64) -> f64 {
    (-(alpha / 2.0).ln() / 2.0).sqrt() / (n as f64).sqrt()
}

/// Pearson chi-squared goodness of fit against equal cell probabilities.
/// Returns `(statistic, critical value at alpha)`.
pub fn uniform_gof(counts: &[u64], alpha: f64) -> (f64, f64) {
    let total: u64 = counts.iter().sum();
    let expected = total as f64 / counts.len() as f64;
    let stat = counts
        .iter()
        .map(|&c| (c as f64 - expected).powi(2) / expected)
        .sum();
    let dist = ChiSquared::new((counts.len() - 1) as f64).unwrap();
    (stat, dist.inverse_cdf(1.0 - alpha))
}
