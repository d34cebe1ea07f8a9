use mutindep::inference::*;
use mutindep::lattice::*;
use mutindep::numstats::*;
use mutindep::{datasets, Correction, TestMode};
use proptest::prelude::*;

fn settings(alpha: f64) -> InferenceSettings {
    InferenceSettings {
        alpha,
        ..InferenceSettings::default()
    }
}

#[test]
fn oracle_p_values_recover_every_truth() {
    for n in 2..=7 {
        for truth in enumerate_partitions(n).unwrap() {
            let labels = truth_labels(&truth).unwrap();
            let pvalues: Vec<f64> = labels.iter().map(|&pos| if pos { 0.0 } else { 1.0 }).collect();
            for correction in [Correction::Fdr, Correction::Bonferroni] {
                let (delta, mu) = infer_from_pvalues(n, &pvalues, 0.1, correction).unwrap();
                assert_eq!(mu, truth);
                assert_eq!(delta, entailed_dichotomies(&truth).unwrap());
            }
        }
    }
}

proptest! {
    #[test]
    fn shared_block_iff_shared_in_every_survivor(n in 2usize..=7, mask in any::<u64>()) {
        let bips = enumerate_bipartitions(n).unwrap();
        let rejected: Vec<bool> = (0..bips.len()).map(|i| mask >> (i % 64) & 1 == 1).collect();
        let (delta, mu) = decide(&bips, &rejected).unwrap();
        for i in 0..n {
            for j in 0..n {
                let everywhere = delta.iter().all(|b| b.contains(i) == b.contains(j));
                prop_assert_eq!(mu.same_block(i, j), everywhere);
            }
        }
        for d in &delta {
            prop_assert!(is_refinement(&mu, &d.to_partition()).unwrap());
        }
    }

    #[test]
    fn larger_alpha_coarsens_the_estimate(seed in 0u64..500) {
        let mut rng = RngStream::new(seed, 9);
        let sigma = sample_wishart_correlation(5, &mut rng);
        // weaken the dependence so the outcome actually varies with alpha
        let mut weak = Matrix::identity(5);
        for i in 0..5 {
            for j in 0..5 {
                if i != j {
                    weak[(i, j)] = 0.3 * sigma[(i, j)];
                }
            }
        }
        let data = sample_mvn(&weak, 60, &mut rng).unwrap();
        let model = sample_correlation(&data).unwrap();
        let mut prev: Option<InferenceOutcome> = None;
        for alpha in [0.001, 0.01, 0.05, 0.1, 0.2, 0.4] {
            let out = infer_from_model(&model, settings(alpha)).unwrap();
            prop_assert_eq!(out.delta_hat.len(), out.m - out.m_thres);
            if let Some(p) = &prev {
                for d in &out.delta_hat {
                    prop_assert!(p.delta_hat.contains(d));
                }
                // fewer survivors give a coarser meet
                prop_assert!(is_refinement(&p.mu_hat, &out.mu_hat).unwrap());
            }
            prev = Some(out);
        }
    }
}

#[test]
fn golden_three_block_recovery() {
    let sigma = Matrix::from_rows(&[
        vec![1.0, 0.8, 0.0, 0.0],
        vec![0.8, 1.0, 0.0, 0.0],
        vec![0.0, 0.0, 1.0, 0.0],
        vec![0.0, 0.0, 0.0, 1.0],
    ])
    .unwrap();
    // about 94% of streams recover the truth at α = 0.1; the rest carry an
    // FDR-level false positive. Stream 1 is frozen as the golden instance.
    let data = sample_mvn(&sigma, 10_000, &mut RngStream::new(2026, 1)).unwrap();
    let out = infer_from_data(&data, settings(0.1)).unwrap();
    assert_eq!(out.mu_hat.to_string(), "12|3|4");
    assert_eq!(classify_against_truth(&out, &out.mu_hat).unwrap().fp, 0);
}

#[test]
fn golden_independent_pair() {
    let data = sample_mvn(&Matrix::identity(2), 10_000, &mut RngStream::new(2026, 1_000)).unwrap();
    let out = infer_from_data(&data, settings(0.1)).unwrap();
    assert_eq!(out.mu_hat.to_string(), "1|2");
}

#[test]
fn degenerate_data_is_reported() {
    let rows: Vec<Vec<f64>> = (0..10).map(|i| vec![i as f64, 2.0 * i as f64 + 1.0, (i * i) as f64]).collect();
    let err = infer_from_data(&DataMatrix::from_rows(&rows).unwrap(), settings(0.1)).unwrap_err();
    assert!(err.to_string().contains("not positive definite"), "{err}");
    let rows: Vec<Vec<f64>> = (0..10).map(|i| vec![i as f64, 3.0]).collect();
    let err = infer_from_data(&DataMatrix::from_rows(&rows).unwrap(), settings(0.1)).unwrap_err();
    assert!(err.to_string().contains("column(s) 2"), "{err}");
}

#[test]
fn hiv_example() {
    let model = datasets::hiv_model();
    let out = infer_from_model(&model, settings(0.1)).unwrap();
    assert_eq!(out.m, 31);
    let top = out
        .tests
        .iter()
        .max_by(|a, b| a.p_value.total_cmp(&b.p_value))
        .unwrap();
    assert_eq!(top.bipartition.to_string(), "12356|4");
    assert!((top.p_value - 0.332).abs() < 0.005, "{}", top.p_value);
    for t in &out.tests {
        if t.bipartition != top.bipartition {
            assert!(t.p_value < 1e-4);
        }
    }
    assert_eq!(out.mu_hat.to_string(), "12356|4");
    for alpha in [0.001, 0.05, 0.1, 0.3] {
        let out = infer_from_model(&model, settings(alpha)).unwrap();
        assert_eq!(out.delta_hat.len(), 1);
        assert_eq!(out.mu_hat.to_string(), "12356|4");
    }
}

#[test]
fn noncentral_mode_runs_end_to_end() {
    let out = infer_from_model(
        &datasets::hiv_model(),
        InferenceSettings {
            mode: TestMode::Noncentral,
            ..settings(0.1)
        },
    )
    .unwrap();
    assert!(out.tests.iter().all(|t| t.mode == TestMode::Noncentral));
    assert_eq!(out.mu_hat.to_string(), "12356|4");
}

#[test]
fn false_discovery_proportion_under_full_null() {
    let reps = 2000;
    let mut fdp_sum = 0.0;
    for i in 0..reps {
        let data = sample_mvn(&Matrix::identity(4), 300, &mut RngStream::new(404, i)).unwrap();
        let out = infer_from_data(&data, settings(0.1)).unwrap();
        // every hypothesis is true, so any rejection is a false discovery
        if out.m_thres > 0 {
            fdp_sum += 1.0;
        }
    }
    let fdr = fdp_sum / reps as f64;
    assert!(fdr <= 0.12, "{fdr}");
}
