//! Filter properties: agreement with the closed-form batch posterior,
//! argmax behavior, class-permutation equivariance and clamp safety.

use lts_core::association::{Correspondence, PointMatch};
use lts_core::filter::{infer, update, FilterConfig, FilterState};
use lts_core::simulate::oracle_posterior;
use lts_core::types::ClassScores;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn simplex_rows(classes: usize, points: usize) -> impl Strategy<Value = Vec<Vec<f32>>> {
    prop::collection::vec(prop::collection::vec(1e-4f64..1.0, classes), points).prop_map(|rows| {
        rows.into_iter()
            .map(|row| {
                let sum: f64 = row.iter().sum();
                row.into_iter().map(|w| (w / sum) as f32).collect()
            })
            .collect()
    })
}

fn scores_from_rows(rows: &[Vec<f32>], classes: usize) -> ClassScores {
    let flat: Vec<f32> = rows.iter().flatten().copied().collect();
    ClassScores::new(flat, classes, ClassScores::default_names(classes)).unwrap()
}

fn identity_corr(len: usize) -> Correspondence {
    Correspondence {
        pairs: (0..len)
            .map(|i| {
                Some(PointMatch {
                    prev_index: i,
                    distance: 0.0,
                })
            })
            .collect(),
    }
}

proptest! {
    /// A point matched through T scans must carry exactly the batch
    /// posterior: the sum of its measurement log-odds minus (T−1) priors.
    #[test]
    fn recursion_equals_batch_posterior(
        steps in 1usize..=10,
        points in 1usize..=8,
        priors in prop::collection::vec(-3.0f64..3.0, 4),
        seed in any::<u64>(),
    ) {
        let classes = 4;
        let cfg = FilterConfig::build(classes, priors.clone(), 1e-7, 50.0)
            .unwrap()
            .without_clamp();

        // Random, well-separated-from-{0,1} score rows per step.
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut per_step: Vec<Vec<Vec<f32>>> = Vec::new();
        for _ in 0..steps {
            let rows: Vec<Vec<f32>> = (0..points)
                .map(|_| {
                    let raw: Vec<f64> = (0..classes).map(|_| rng.gen_range(1e-3..1.0)).collect();
                    let sum: f64 = raw.iter().sum();
                    raw.into_iter().map(|w| (w / sum) as f32).collect()
                })
                .collect();
            per_step.push(rows);
        }

        let mut state = FilterState::empty(classes);
        for (t, rows) in per_step.iter().enumerate() {
            let scores = scores_from_rows(rows, classes);
            let corr = if t == 0 {
                Correspondence::all_unmatched(points)
            } else {
                identity_corr(points)
            };
            state = update(state, &scores, &corr, &cfg).unwrap();
        }

        for point in 0..points {
            // The oracle sees the same f32-quantized measurements.
            let history: Vec<Vec<f64>> = per_step
                .iter()
                .map(|rows| rows[point].iter().map(|&v| v as f64).collect())
                .collect();
            let expected = oracle_posterior(&history, &priors);
            let got = state.point_logodds(point);
            for class in 0..classes {
                prop_assert!(
                    (got[class] - expected[class]).abs() < 1e-9,
                    "point {point} class {class}: {} vs {}",
                    got[class],
                    expected[class]
                );
            }
        }
    }

    /// With a uniform prior and no clamping, one update must label every
    /// point exactly like the raw score argmax.
    #[test]
    fn first_update_argmax_matches_raw_scores(rows in simplex_rows(4, 40)) {
        let cfg = FilterConfig::new(4).unwrap();
        let scores = scores_from_rows(&rows, 4);
        let state = update(
            FilterState::empty(4),
            &scores,
            &Correspondence::all_unmatched(rows.len()),
            &cfg,
        )
        .unwrap();
        prop_assert_eq!(infer(&state), scores.argmax_labels());
    }

    /// Relabeling the classes consistently everywhere permutes the output
    /// labels the same way.
    #[test]
    fn class_permutation_permutes_labels(
        rows in simplex_rows(4, 24),
        second in simplex_rows(4, 24),
        priors in prop::collection::vec(-2.0f64..2.0, 4),
        rotation in 0usize..4,
    ) {
        let classes = 4;
        let perm: Vec<usize> = (0..classes).map(|c| (c + rotation) % classes).collect();

        let permute_rows = |rows: &[Vec<f32>]| -> Vec<Vec<f32>> {
            rows.iter()
                .map(|row| {
                    let mut out = vec![0.0f32; classes];
                    for (c, &v) in row.iter().enumerate() {
                        out[perm[c]] = v;
                    }
                    out
                })
                .collect()
        };
        let mut permuted_priors = vec![0.0f64; classes];
        for (c, &p) in priors.iter().enumerate() {
            permuted_priors[perm[c]] = p;
        }

        let run = |rows_a: &[Vec<f32>], rows_b: &[Vec<f32>], priors: Vec<f64>| {
            let cfg = FilterConfig::build(classes, priors, 1e-7, 50.0).unwrap();
            let scores_a = scores_from_rows(rows_a, classes);
            let scores_b = scores_from_rows(rows_b, classes);
            let state = update(
                FilterState::empty(classes),
                &scores_a,
                &Correspondence::all_unmatched(rows_a.len()),
                &cfg,
            )
            .unwrap();
            let state = update(state, &scores_b, &identity_corr(rows_b.len()), &cfg).unwrap();
            infer(&state)
        };

        let base = run(&rows, &second, priors);
        let permuted = run(&permute_rows(&rows), &permute_rows(&second), permuted_priors);
        let expected: Vec<u8> = base
            .as_slice()
            .iter()
            .map(|&l| perm[l as usize] as u8)
            .collect();
        prop_assert_eq!(permuted.as_slice(), &expected[..]);
    }

    /// No input stream may ever produce a NaN, infinite, or out-of-clamp
    /// log-odds value; hard one-hot rows are the worst case.
    #[test]
    fn logodds_stay_finite_under_adversarial_streams(
        hots in prop::collection::vec(0usize..4, 1..40),
    ) {
        let cfg = FilterConfig::new(4).unwrap();
        let mut state = FilterState::empty(4);
        for (t, &hot) in hots.iter().enumerate() {
            let mut row = vec![0.0f32; 4];
            row[hot] = 1.0;
            let scores = scores_from_rows(&[row], 4);
            let corr = if t == 0 {
                Correspondence::all_unmatched(1)
            } else {
                identity_corr(1)
            };
            state = update(state, &scores, &corr, &cfg).unwrap();
            for &l in state.point_logodds(0) {
                prop_assert!(l.is_finite());
                prop_assert!(l.abs() <= cfg.logodds_clamp());
            }
        }
    }

    /// A perfectly uninformative measurement (uniform row, uniform prior)
    /// never changes a matched point's label.
    #[test]
    fn uniform_measurement_keeps_the_argmax(rows in simplex_rows(4, 30)) {
        let cfg = FilterConfig::new(4).unwrap();
        let scores = scores_from_rows(&rows, 4);
        let state = update(
            FilterState::empty(4),
            &scores,
            &Correspondence::all_unmatched(rows.len()),
            &cfg,
        )
        .unwrap();
        let before = infer(&state);

        let uniform: Vec<Vec<f32>> = vec![vec![0.25; 4]; rows.len()];
        let state = update(
            state,
            &scores_from_rows(&uniform, 4),
            &identity_corr(rows.len()),
            &cfg,
        )
        .unwrap();
        prop_assert_eq!(infer(&state), before);
    }
}
