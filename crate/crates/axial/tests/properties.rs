//! Property-based checks of the structural invariants.

use proptest::prelude::*;

use axial::limlaw::{cdf_labs_p3, cdf_lmax_p2, cdf_lmax_p3, quantile_type7};
use axial::models::{normalizing_constant, sample_axial, AngularFunction, AxialModel};
use axial::rng::RngStream;
use axial::special::{chisq_cdf, normal_quantile, std_normal_cdf};
use axial::teststats::{eigen_statistics, scatter_matrix};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sampled_rows_have_unit_norm(
        seed in 0u64..1_000,
        p in 2usize..8,
        kappa in -0.9f64..6.0,
    ) {
        let model = AxialModel::with_axis_e1(p, kappa, AngularFunction::watson()).unwrap();
        let mut stream = RngStream::new(seed, 0);
        let sample = sample_axial(&model, 40, &mut stream).unwrap();
        for row in sample.rows() {
            let norm: f64 = row.iter().map(|x| x * x).sum::<f64>().sqrt();
            prop_assert!((norm - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn scatter_eigenvalues_ordered_and_sum_to_one(
        seed in 0u64..1_000,
        p in 2usize..8,
    ) {
        let mut stream = RngStream::new(seed, 1);
        let sample = axial::sample_uniform_sphere(p, 60, &mut stream);
        let spectrum = scatter_matrix(&sample).unwrap();
        let ev = spectrum.eigenvalues();
        prop_assert!(ev.windows(2).all(|w| w[0] >= w[1]));
        prop_assert!((ev.iter().sum::<f64>() - 1.0).abs() < 1e-10);
        let (tp, tm, tpm) = eigen_statistics(&sample, &spectrum);
        prop_assert_eq!(tpm, tp.max(tm));
        // Largest eigenvalue at least the average, smallest at most.
        prop_assert!(tp >= -1e-10 && tm >= -1e-10);
    }

    #[test]
    fn normal_quantile_round_trip(alpha in 1e-6f64..0.5) {
        let z = normal_quantile(alpha).unwrap();
        prop_assert!((1.0 - std_normal_cdf(z) - alpha).abs() < 1e-9);
    }

    #[test]
    fn chisq_cdf_monotone_in_x(df in 1u32..40, x in 0.1f64..50.0, dx in 0.1f64..5.0) {
        let a = chisq_cdf(x, df).unwrap();
        let b = chisq_cdf(x + dx, df).unwrap();
        prop_assert!(b >= a);
        prop_assert!((0.0..=1.0).contains(&a));
    }

    #[test]
    fn exact_limit_cdfs_are_distribution_functions(l in 0.0f64..8.0, dl in 0.0f64..2.0) {
        for cdf in [cdf_lmax_p2, cdf_lmax_p3, cdf_labs_p3] {
            let a = cdf(l);
            let b = cdf(l + dl);
            prop_assert!((0.0..=1.0).contains(&a));
            prop_assert!(b >= a - 1e-12);
        }
    }

    #[test]
    fn type7_quantile_brackets_data(
        mut values in proptest::collection::vec(-100.0f64..100.0, 2..50),
        q in 0.0f64..=1.0,
    ) {
        values.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let v = quantile_type7(&values, q);
        prop_assert!(v >= values[0] && v <= values[values.len() - 1]);
    }

    #[test]
    fn normalizing_constant_positive_and_monotone_label_free(
        kappa in -0.5f64..5.0,
        p in 2usize..10,
    ) {
        let f = AngularFunction::watson();
        let c = normalizing_constant(p, kappa, &f).unwrap();
        prop_assert!(c > 0.0);
    }
}
