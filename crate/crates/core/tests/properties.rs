//! Property tests for the invariants of each module.

use proptest::collection::vec;
use proptest::prelude::*;

use simout::compare::{
    anova1, kruskal_wallis, mann_whitney, stats_compare, stats_compare_pw, t_test2, TVariant,
    TestSpec,
};
use simout::focal::{extract_at_iters, extract_sixpack, FmMatrix, FmName};
use simout::ingest::{
    infer_delimiter, parse_output, write_output, Delimiter, OutputMatrix, ReadOptions, RunSet,
};
use simout::numerics::{
    chi2_cdf, f_cdf, normal_cdf, normal_quantile, reg_incomplete_gamma, student_t_cdf,
    student_t_quantile,
};
use simout::render::{output_plot, stats_compare_plot, Layer, PlotMode};
use simout::stats::{
    ecdf, histogram, kde, kde_with_grid, moving_average, qq_points, stats_analyze,
};

fn finite() -> impl Strategy<Value = f64> {
    prop::num::f64::NORMAL | prop::num::f64::SUBNORMAL | prop::num::f64::ZERO
}

fn matrix() -> impl Strategy<Value = Vec<Vec<f64>>> {
    (1usize..20, 1usize..6).prop_flat_map(|(r, c)| vec(vec(finite(), c), r))
}

fn delimiter() -> impl Strategy<Value = Delimiter> {
    prop_oneof![
        Just(Delimiter::Comma),
        Just(Delimiter::Semicolon),
        Just(Delimiter::Tab),
        Just(Delimiter::Whitespace)
    ]
}

/// Sample of moderate reals with at least two distinct values.
fn spread_sample(min: usize, max: usize) -> impl Strategy<Value = Vec<f64>> {
    vec(-100.0f64..100.0, min..max).prop_filter("needs two distinct values", |s| {
        s.iter().any(|&v| v != s[0])
    })
}

fn int_sample(min: usize, max: usize) -> impl Strategy<Value = Vec<f64>> {
    vec((-50i32..50).prop_map(f64::from), min..max)
}

fn fm_matrix(tag: &str, rows: Vec<Vec<f64>>) -> FmMatrix {
    let m = rows[0].len();
    let names = (0..m)
        .map(|j| FmName::new("out", format!("s{j}")))
        .collect();
    FmMatrix::new(tag, names, rows).unwrap()
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    // ingest

    #[test]
    fn written_matrices_read_back_exactly(rows in matrix(), d in delimiter()) {
        let m = OutputMatrix::from_rows(rows.clone(), None).unwrap();
        let text = write_output(&m, d);
        let back = parse_output(&text, &ReadOptions::default()).unwrap();
        prop_assert_eq!(back.n_iters(), rows.len());
        for (i, row) in rows.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                prop_assert_eq!(v.to_bits(), back.get(i, j).to_bits());
            }
        }
    }

    #[test]
    fn delimiter_inference_is_deterministic(rows in matrix(), d in delimiter()) {
        let m = OutputMatrix::from_rows(rows, None).unwrap();
        let text = write_output(&m, d);
        let lines: Vec<&str> = text.lines().take(2).collect();
        prop_assert_eq!(infer_delimiter(&lines), infer_delimiter(&lines));
    }

    // focal

    #[test]
    fn sixpack_invariants(s in vec(-10i32..10, 1..80).prop_map(|v| v.into_iter().map(f64::from).collect::<Vec<_>>()),
                          frac in 0.0f64..1.0) {
        let ss = ((s.len() - 1) as f64 * frac) as usize;
        let p = extract_sixpack(&s, ss).unwrap();
        prop_assert!(p.min <= p.ss_mean && p.ss_mean <= p.max);
        prop_assert_eq!(s[p.argmax], p.max);
        prop_assert_eq!(s[p.argmin], p.min);
        prop_assert!(s[..p.argmax].iter().all(|&v| v < p.max));
        prop_assert!(s[..p.argmin].iter().all(|&v| v > p.min));
        prop_assert!(p.ss_std >= 0.0);
        let tail = &s[ss..];
        let constant = tail.iter().all(|&v| v == tail[0]);
        prop_assert_eq!(p.ss_std == 0.0, constant);
    }

    #[test]
    fn at_every_iteration_reproduces_series(s in vec(finite(), 1..100)) {
        let all: Vec<usize> = (0..s.len()).collect();
        let got = extract_at_iters(&s, &all).unwrap();
        prop_assert_eq!(got.iter().map(|v| v.to_bits()).collect::<Vec<_>>(), s.iter().map(|v| v.to_bits()).collect::<Vec<_>>());
    }

    // numerics

    #[test]
    fn normal_quantile_inverts_cdf(p in 1e-10f64..1.0) {
        prop_assume!(p < 1.0 - 1e-10);
        let x = normal_quantile(p).unwrap();
        prop_assert!(close(normal_cdf(x), p, 1e-12), "cdf(quantile({})) = {}", p, normal_cdf(x));
    }

    #[test]
    fn t_quantile_inverts_cdf(p in 0.001f64..0.999, nu in 1.0f64..200.0) {
        let q = student_t_quantile(p, nu).unwrap();
        prop_assert!(close(student_t_cdf(q, nu).unwrap(), p, 1e-8));
    }

    #[test]
    fn cdfs_are_monotone_and_bounded(x in -30.0f64..30.0, dx in 0.0f64..5.0, nu in 0.5f64..100.0) {
        for (a, b) in [
            (normal_cdf(x), normal_cdf(x + dx)),
            (student_t_cdf(x, nu).unwrap(), student_t_cdf(x + dx, nu).unwrap()),
            (chi2_cdf(x.abs(), nu).unwrap(), chi2_cdf(x.abs() + dx, nu).unwrap()),
            (f_cdf(x.abs(), nu, 3.0).unwrap(), f_cdf(x.abs() + dx, nu, 3.0).unwrap()),
        ] {
            prop_assert!((0.0..=1.0).contains(&a) && (0.0..=1.0).contains(&b));
            prop_assert!(a <= b + 1e-15);
        }
    }

    #[test]
    fn f_and_t_distributions_agree(t in -20.0f64..20.0, nu in 1.0f64..300.0) {
        let lhs = f_cdf(t * t, 1.0, nu).unwrap();
        let rhs = 2.0 * student_t_cdf(t.abs(), nu).unwrap() - 1.0;
        prop_assert!(close(lhs, rhs, 1e-10), "{} vs {}", lhs, rhs);
    }

    #[test]
    fn chi2_is_incomplete_gamma(x in 0.0f64..200.0, k in 0.5f64..100.0) {
        prop_assert_eq!(chi2_cdf(x, k).unwrap(), reg_incomplete_gamma(k / 2.0, x / 2.0).unwrap());
    }

    // stats

    #[test]
    fn moving_average_stays_in_range(s in vec(-1e6f64..1e6, 1..100), w in 0usize..20) {
        let lo = s.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = s.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let out = moving_average(&s, w);
        prop_assert_eq!(out.len(), s.len());
        prop_assert!(out.iter().all(|&v| lo <= v && v <= hi));
    }

    #[test]
    fn ecdf_and_qq_ignore_order(s in spread_sample(2, 60), seed in any::<u64>()) {
        let mut shuffled = s.clone();
        let n = shuffled.len();
        for i in (1..n).rev() {
            shuffled.swap(i, (seed.wrapping_mul(i as u64 + 7) % (i as u64 + 1)) as usize);
        }
        prop_assert_eq!(ecdf(&s).unwrap(), ecdf(&shuffled).unwrap());
        prop_assert_eq!(qq_points(&s).unwrap(), qq_points(&shuffled).unwrap());
        prop_assert_eq!(*ecdf(&s).unwrap().f.last().unwrap(), 1.0);
    }

    #[test]
    fn histogram_counts_every_observation(s in vec(-1e3f64..1e3, 1..200), bins in 1usize..30) {
        let h = histogram(&s, bins).unwrap();
        prop_assert_eq!(h.counts.iter().sum::<usize>(), s.len());
        prop_assert_eq!(h.edges.len(), bins + 1);
    }

    #[test]
    fn summary_stats_are_consistent(rows in vec(vec(-50.0f64..50.0, 3), 2..40)) {
        let fm = fm_matrix("t", rows);
        for st in stats_analyze(&fm, 0.05).unwrap() {
            if let Some(v) = st.variance.value() {
                prop_assert!(v >= 0.0);
            }
            if let Some(ci) = st.ci.value() {
                prop_assert!(ci.lo <= st.mean && st.mean <= ci.hi);
            }
            if let Some(p) = st.sw_p() {
                prop_assert!((0.0..=1.0).contains(&p));
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn kde_is_a_density(s in spread_sample(5, 200)) {
        let d = kde(&s).unwrap();
        prop_assert!(d.bandwidth > 0.0);
        prop_assert!(d.density.iter().all(|&v| v >= 0.0));
        prop_assert!(d.grid.windows(2).all(|w| w[0] < w[1]));
        let i = d.integral();
        prop_assert!((0.99..=1.01).contains(&i), "integral {}", i);
        let fine = kde_with_grid(&s, 2 * d.grid.len()).unwrap().integral();
        prop_assert!((fine - i).abs() < 1e-3, "{} vs {}", i, fine);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    // compare

    #[test]
    fn rank_tests_ignore_monotone_transforms(a in int_sample(2, 25), b in int_sample(2, 25), c in int_sample(2, 10)) {
        let f = |s: &[f64]| -> Vec<f64> { s.iter().map(|v| v * v * v + 2.0 * v + 1000.0).collect() };
        let (fa, fb, fc) = (f(&a), f(&b), f(&c));
        prop_assert_eq!(mann_whitney(&a, &b).unwrap(), mann_whitney(&fa, &fb).unwrap());
        prop_assert_eq!(
            kruskal_wallis(&[&a, &b, &c]).unwrap(),
            kruskal_wallis(&[&fa, &fb, &fc]).unwrap()
        );
    }

    #[test]
    fn mean_tests_ignore_affine_maps(a in spread_sample(2, 30), b in spread_sample(2, 30),
                                     scale in 0.1f64..10.0, neg in any::<bool>(), shift in -100.0f64..100.0) {
        let k = if neg { -scale } else { scale };
        let f = |s: &[f64]| -> Vec<f64> { s.iter().map(|v| k * v + shift).collect() };
        let (fa, fb) = (f(&a), f(&b));
        for v in [TVariant::Pooled, TVariant::Welch] {
            let (p, q) = (t_test2(&a, &b, v).unwrap(), t_test2(&fa, &fb, v).unwrap());
            prop_assert!(close(p, q, 1e-10), "{:?}: {} vs {}", v, p, q);
        }
        let (p, q) = (anova1(&[&a, &b]).unwrap(), anova1(&[&fa, &fb]).unwrap());
        prop_assert!(close(p, q, 1e-10), "anova: {} vs {}", p, q);
    }

    #[test]
    fn p_values_are_probabilities(a in int_sample(1, 30), b in int_sample(1, 30)) {
        for p in [
            t_test2(&a, &b, TVariant::Pooled),
            t_test2(&a, &b, TVariant::Welch),
            mann_whitney(&a, &b),
            kruskal_wallis(&[&a, &b]),
            anova1(&[&a, &b]),
        ]
        .into_iter()
        .flatten()
        {
            prop_assert!((0.0..=1.0).contains(&p), "{}", p);
        }
    }

    #[test]
    fn comparison_ignores_row_order(rows_a in vec(vec(-10.0f64..10.0, 3), 4..20),
                                    rows_b in vec(vec(-10.0f64..10.0, 3), 4..20),
                                    parametric in any::<bool>()) {
        let spec = if parametric { TestSpec::parametric() } else { TestSpec::non_parametric() };
        let mut rev = rows_b.clone();
        rev.reverse();
        rev.rotate_left(1);
        let r1 = stats_compare(&[fm_matrix("a", rows_a.clone()), fm_matrix("b", rows_b)], &spec).unwrap();
        let r2 = stats_compare(&[fm_matrix("a", rows_a), fm_matrix("b", rev)], &spec).unwrap();
        for (p, q) in r1.p_values.iter().zip(&r2.p_values) {
            prop_assert!(close(*p, *q, 1e-12), "{} vs {}", p, q);
        }
    }

    #[test]
    fn pairwise_table_is_symmetric(groups in vec(vec(vec(-10.0f64..10.0, 2), 5..12), 2..5)) {
        let fms: Vec<FmMatrix> = groups.into_iter().enumerate().map(|(i, g)| fm_matrix(&format!("g{i}"), g)).collect();
        let t = stats_compare_pw(&fms, &TestSpec::default()).unwrap();
        for i in 0..fms.len() {
            prop_assert_eq!(t.fail_counts[i][i], 0);
            for j in 0..fms.len() {
                prop_assert_eq!(t.fail_counts[i][j], t.fail_counts[j][i]);
            }
        }
    }

    // render

    #[test]
    fn output_plots_frame_their_data(series in vec(vec(-1e3f64..1e3, 10), 1..6), w in 0usize..4, mode in 0u8..3) {
        let runs = series
            .iter()
            .map(|s| OutputMatrix::from_rows(s.iter().map(|&v| vec![v]).collect(), None).unwrap())
            .collect();
        let rs = RunSet::new(runs, "p").unwrap();
        let mode = match mode {
            0 => PlotMode::Superimposed,
            1 => PlotMode::Extremes,
            _ => PlotMode::MovingAvg(w),
        };
        let fig = output_plot(&rs, 0, mode, None).unwrap();
        prop_assert!(fig.ranges_cover_data());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn cdf_overlays_end_at_one(a in spread_sample(5, 40), b in spread_sample(5, 40)) {
        let (pdf, cdf) = stats_compare_plot(&[("a".into(), a), ("b".into(), b)], "fm").unwrap();
        prop_assert!(pdf.ranges_cover_data() && cdf.ranges_cover_data());
        prop_assert_eq!((pdf.x.min, pdf.x.max), (cdf.x.min, cdf.x.max));
        for l in &cdf.layers {
            if let Layer::Step { points, .. } = l {
                prop_assert_eq!(points.first().unwrap().1, 0.0);
                prop_assert_eq!(points.last().unwrap().1, 1.0);
                prop_assert!(points.windows(2).all(|w| w[0].0 <= w[1].0 && w[0].1 <= w[1].1));
            }
        }
    }
}
