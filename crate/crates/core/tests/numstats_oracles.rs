mod common;

use common::{chi2_sf_oracle, cofactor_det, ks_critical, ks_statistic};
use mutindep::numstats::*;
use rand::Rng;

#[test]
fn oracle_self_check() {
    // closed forms the oracle must reproduce
    for i in 0..50 {
        let x = i as f64 * 0.9;
        assert!((chi2_sf_oracle(x, 2) - (-x / 2.0).exp()).abs() < 1e-15);
        let q1 = statrs::function::erf::erfc((x / 2.0).sqrt());
        assert!((chi2_sf_oracle(x, 1) - q1).abs() < 1e-15);
    }
    // statrs' erfc carries ~1e-12 absolute error here
    let q = chi2_sf_oracle(3.841_458_820_694_124, 1);
    assert!((q - 0.05).abs() < 1e-11, "{:e}", q - 0.05);
}

#[test]
fn chi2_sf_matches_closed_form_oracle() {
    let mut worst = 0.0f64;
    for df in 1..=200u32 {
        for i in 0..=100 {
            let x = i as f64 * 5.0;
            let got = chi2_sf(x, df).unwrap();
            let want = chi2_sf_oracle(x, df);
            worst = worst.max((got - want).abs());
        }
    }
    assert!(worst <= 1e-10, "max abs error {worst:e}");
}

#[test]
fn chi2_sf_matches_statrs() {
    use statrs::distribution::{ChiSquared, ContinuousCDF};
    for df in [1u32, 3, 8, 31, 99] {
        let d = ChiSquared::new(df as f64).unwrap();
        for i in 0..80 {
            let x = i as f64 * 1.7;
            assert!((chi2_sf(x, df).unwrap() - d.sf(x)).abs() < 1e-10);
        }
    }
}

#[test]
fn noncentral_matches_frozen_monte_carlo() {
    // 10^7 draws of (Z1 + √2)² + Z2² + Z3², frozen: fraction above 5.0
    let mc = 0.406_897_9;
    let se = 1.553_5e-4;
    let got = noncentral_chi2_sf(5.0, 3, 2.0).unwrap();
    assert!((got - mc).abs() < 3.0 * se, "{got} vs {mc}");
}

#[test]
fn noncentral_matches_own_small_monte_carlo() {
    let mut rng = RngStream::new(31, 0);
    let n = 400_000;
    let shift = 1.5f64.sqrt();
    let hits = (0..n)
        .filter(|_| {
            let z0 = sample_standard_normal(&mut rng) + shift;
            let s: f64 = z0 * z0 + (0..3).map(|_| sample_standard_normal(&mut rng).powi(2)).sum::<f64>();
            s > 6.0
        })
        .count();
    let p = hits as f64 / n as f64;
    let se = (p * (1.0 - p) / n as f64).sqrt();
    let got = noncentral_chi2_sf(6.0, 4, 1.5).unwrap();
    assert!((got - p).abs() < 4.0 * se, "{got} vs {p}");
}

fn random_spd(dim: usize, rng: &mut RngStream) -> Vec<Vec<f64>> {
    // B Bᵀ + 0.1·I with Gaussian B
    let b: Vec<Vec<f64>> = (0..dim)
        .map(|_| (0..dim).map(|_| sample_standard_normal(rng)).collect())
        .collect();
    (0..dim)
        .map(|i| {
            (0..dim)
                .map(|j| {
                    let v: f64 = (0..dim).map(|k| b[i][k] * b[j][k]).sum();
                    if i == j { v + 0.1 } else { v }
                })
                .collect()
        })
        .collect()
}

#[test]
fn logdet_matches_cofactor_expansion() {
    let mut rng = RngStream::new(8, 0);
    for _ in 0..2000 {
        let dim = rng.random_range(1..=5);
        let rows = random_spd(dim, &mut rng);
        let want = cofactor_det(&rows).ln();
        let got = logdet_spd(&Matrix::from_rows(&rows).unwrap()).unwrap();
        assert!(
            (got - want).abs() <= 1e-9 * want.abs().max(1.0),
            "dim {dim}: {got} vs {want}"
        );
    }
}

#[test]
fn wishart_two_dim_marginal_is_uniform() {
    let mut rng = RngStream::new(12, 0);
    let draws: Vec<f64> = (0..10_000)
        .map(|_| sample_wishart_correlation(2, &mut rng)[(0, 1)])
        .collect();
    let d = ks_statistic(&draws, |x| (x + 1.0) / 2.0);
    assert!(d < ks_critical(draws.len(), 0.01), "KS {d}");
}

/// For `W ~ Wishart(I, ν)` the rescaled off-diagonal `r` satisfies
/// `(r + 1)/2 ~ Beta((ν-1)/2, (ν-1)/2)` whatever the dimension; with
/// `ν = dim + 1` that is uniform only for `dim = 2`.
#[test]
fn wishart_higher_dim_marginals_follow_beta_law() {
    use statrs::distribution::{Beta, ContinuousCDF};
    let mut rng = RngStream::new(13, 0);
    for dim in [3usize, 5] {
        let half = dim as f64 / 2.0;
        let beta = Beta::new(half, half).unwrap();
        let draws: Vec<f64> = (0..5_000)
            .map(|_| sample_wishart_correlation(dim, &mut rng)[(dim - 1, 0)])
            .collect();
        let d = ks_statistic(&draws, |x| beta.cdf((x + 1.0) / 2.0));
        assert!(d < ks_critical(draws.len(), 0.01), "dim {dim}: KS {d}");
    }
}

#[test]
fn mvn_recovers_independence_and_correlation() {
    let mut rng = RngStream::new(14, 0);
    let data = sample_mvn(&Matrix::identity(4), 100_000, &mut rng).unwrap();
    let r = sample_correlation(&data).unwrap();
    for i in 0..4 {
        for j in 0..i {
            assert!(r.matrix()[(i, j)].abs() < 0.02);
        }
    }
    let cov = Matrix::from_rows(&[vec![1.0, 0.9], vec![0.9, 1.0]]).unwrap();
    let data = sample_mvn(&cov, 100_000, &mut rng).unwrap();
    let r = sample_correlation(&data).unwrap().matrix()[(0, 1)];
    assert!((r - 0.9).abs() < 0.01, "{r}");
}

#[test]
fn mvn_is_bit_identical_across_runs() {
    let cov = Matrix::from_rows(&[
        vec![1.0, 0.3, 0.0],
        vec![0.3, 1.0, -0.2],
        vec![0.0, -0.2, 1.0],
    ])
    .unwrap();
    let a = sample_mvn(&cov, 500, &mut RngStream::new(99, 4)).unwrap();
    let b = sample_mvn(&cov, 500, &mut RngStream::new(99, 4)).unwrap();
    assert_eq!(a, b);
}
