use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};
use scuc_core::pem::*;

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * b.abs().max(1.0)
}

#[test]
fn analytic_locations_and_weights() {
    let (a, b) = standard_locations(0.0, 1).unwrap();
    assert_eq!((a, b), (1.0, -1.0));
    let (w1, w2) = weights(a, b, 1).unwrap();
    assert!((w1 - 0.5).abs() < 1e-12 && (w2 - 0.5).abs() < 1e-12);

    let (a, b) = standard_locations(1.0, 2).unwrap();
    assert!((a - 2.0).abs() < 1e-12 && (b + 1.0).abs() < 1e-12);
    let (w1, w2) = weights(a, b, 2).unwrap();
    assert!((w1 - 1.0 / 6.0).abs() < 1e-12 && (w2 - 1.0 / 3.0).abs() < 1e-12);
}

#[test]
fn invalid_arguments() {
    assert_eq!(standard_locations(0.0, 0), Err(PemError::ZeroCount));
    assert_eq!(weights(1.0, 1.0, 1), Err(PemError::Degenerate(1.0)));
    assert_eq!(build_concentrations(&[]), Err(PemError::NoInputs));
    let bad = RandomInput {
        mean: 1.0,
        std: -0.1,
        skewness: 0.0,
    };
    assert!(matches!(
        build_concentrations(&[bad]),
        Err(PemError::BadInput { index: 0, .. })
    ));
    assert!(matches!(
        estimate_moments(&[(0.5, vec![1.0])], 2),
        Err(PemError::WeightSum(_))
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn weights_of_all_concentrations_sum_to_one(skew in -3.0f64..3.0, m in 1usize..=50) {
        let (a, b) = standard_locations(skew, m).unwrap();
        let (w1, w2) = weights(a, b, m).unwrap();
        let total = m as f64 * (w1 + w2);
        prop_assert!((total - 1.0).abs() <= 1e-12);
        prop_assert!(w1 > 0.0 && w2 > 0.0);
        prop_assert!(a > 0.0 && b < 0.0);
    }

    #[test]
    fn single_input_monomials_are_exact(mean in -5.0f64..5.0, std in 0.01f64..3.0, skew in -2.0f64..2.0) {
        let input = RandomInput { mean, std, skewness: skew };
        let c = build_concentrations(&[input]).unwrap();
        let evals: Vec<(f64, Vec<f64>)> = c.iter().map(|k| (k.weight, vec![k.location])).collect();
        let est = estimate_moments(&evals, 3).unwrap();
        let want = [
            mean,
            mean * mean + std * std,
            mean.powi(3) + 3.0 * mean * std * std + skew * std.powi(3),
        ];
        for j in 0..3 {
            prop_assert!(close(est.raw[j][0], want[j], 1e-9), "j={} {} vs {}", j + 1, est.raw[j][0], want[j]);
        }
    }

    #[test]
    fn linear_maps_have_exact_means(seed in 0u64..u64::MAX, m in 1usize..=10) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inputs: Vec<RandomInput> = (0..m)
            .map(|_| RandomInput { mean: rng.random_range(-10.0..10.0), std: rng.random_range(0.01..2.0), skewness: rng.random_range(-1.5..1.5) })
            .collect();
        let a0: f64 = rng.random_range(-5.0..5.0);
        let a: Vec<f64> = (0..m).map(|_| rng.random_range(-5.0..5.0)).collect();
        let f = |x: &[f64]| a0 + a.iter().zip(x).map(|(c, v)| c * v).sum::<f64>();
        let c = build_concentrations(&inputs).unwrap();
        prop_assert_eq!(c.len(), 2 * m);
        let evals: Vec<(f64, Vec<f64>)> = c.iter().map(|k| (k.weight, vec![f(&k.point)])).collect();
        let est = estimate_moments(&evals, 2).unwrap();
        let want = f(&inputs.iter().map(|x| x.mean).collect::<Vec<_>>());
        prop_assert!(close(est.mean[0], want, 1e-9), "{} vs {}", est.mean[0], want);
    }

    #[test]
    fn symmetric_inputs_give_mirrored_points(mean in -5.0f64..5.0, std in 0.01f64..3.0, m in 1usize..=8) {
        let (a, b) = standard_locations(0.0, m).unwrap();
        prop_assert!((a + b).abs() < 1e-12);
        let (w1, w2) = weights(a, b, m).unwrap();
        prop_assert!((w1 - w2).abs() < 1e-15);
        let inputs = vec![RandomInput { mean, std, skewness: 0.0 }; m];
        let c = build_concentrations(&inputs).unwrap();
        for pair in c.chunks(2) {
            prop_assert!(((pair[0].location - mean) + (pair[1].location - mean)).abs() < 1e-9);
        }
    }
}

#[test]
fn every_point_fixes_one_input_and_keeps_the_rest_at_mean() {
    let inputs = [
        RandomInput {
            mean: 1.0,
            std: 0.1,
            skewness: 0.3,
        },
        RandomInput {
            mean: 2.0,
            std: 0.0,
            skewness: 0.0,
        },
        RandomInput {
            mean: 3.0,
            std: 0.5,
            skewness: -0.2,
        },
    ];
    let c = build_concentrations(&inputs).unwrap();
    assert_eq!(c.len(), 4);
    for k in &c {
        for (l, x) in inputs.iter().enumerate() {
            if l == k.variable {
                assert_eq!(k.point[l], k.location);
            } else {
                assert_eq!(k.point[l], x.mean);
            }
        }
    }
}

/// The point estimate of a smooth, mildly nonlinear output should agree with
/// a large Monte-Carlo sample drawn with the same first three moments.
#[test]
fn agrees_with_monte_carlo_on_a_smooth_output() {
    // shifted gamma variables: skewness 2/sqrt(k)
    let shapes = [4.0, 9.0, 16.0];
    let inputs: Vec<RandomInput> = shapes
        .iter()
        .map(|&k: &f64| RandomInput {
            mean: k,
            std: k.sqrt(),
            skewness: 2.0 / k.sqrt(),
        })
        .collect();
    let f = |x: &[f64]| 2.0 * x[0] + 0.5 * x[1] - x[2] + 0.01 * x[0] * x[0];
    let c = build_concentrations(&inputs).unwrap();
    let evals: Vec<(f64, Vec<f64>)> = c.iter().map(|k| (k.weight, vec![f(&k.point)])).collect();
    let tpe = estimate_moments(&evals, 2).unwrap();

    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let gammas: Vec<Gamma<f64>> = shapes
        .iter()
        .map(|&k| Gamma::new(k, 1.0).unwrap())
        .collect();
    let n = 200_000;
    let (mut s1, mut s2) = (0.0, 0.0);
    for _ in 0..n {
        let x: Vec<f64> = gammas.iter().map(|g| g.sample(&mut rng)).collect();
        let y = f(&x);
        s1 += y;
        s2 += y * y;
    }
    let mc_mean = s1 / n as f64;
    let mc_std = (s2 / n as f64 - mc_mean * mc_mean).sqrt();
    assert!(
        (tpe.mean[0] - mc_mean).abs() < 0.02 * mc_std,
        "{} vs {mc_mean}",
        tpe.mean[0]
    );
    assert!(
        (tpe.std[0] - mc_std).abs() < 0.03 * mc_std,
        "{} vs {mc_std}",
        tpe.std[0]
    );
}
