//! Comparison scenarios built from seeded fixtures, checked against direct
//! column-wise calls.

mod common;

use rand_distr::{Distribution, Normal};
use simout::compare::{
    kruskal_wallis, mann_whitney, stats_compare, stats_compare_pw, t_test2, TVariant, TestSpec,
};
use simout::focal::{FmMatrix, FmName};
use simout::numerics::chi2_sf;

fn fm(tag: &str, cols: &[Vec<f64>]) -> FmMatrix {
    let names = (0..cols.len())
        .map(|j| FmName::new("out", format!("fm{j}")))
        .collect();
    let rows = (0..cols[0].len())
        .map(|i| cols.iter().map(|c| c[i]).collect())
        .collect();
    FmMatrix::new(tag, names, rows).unwrap()
}

fn normal_cols(seed: u64, m: usize, n: usize, shifts: &[f64]) -> Vec<Vec<f64>> {
    let mut r = common::rng(seed);
    let d = Normal::new(0.0, 1.0).unwrap();
    (0..m)
        .map(|j| {
            (0..n)
                .map(|_| shifts.get(j).copied().unwrap_or(0.0) + d.sample(&mut r))
                .collect()
        })
        .collect()
}

#[test]
fn shifted_focal_measure_is_the_only_one_flagged() {
    let shifted = 3;
    let a = normal_cols(11, 6, 30, &[]);
    let mut shifts = vec![0.0; 6];
    shifts[shifted] = 5.0;
    let b = normal_cols(12, 6, 30, &shifts);
    let (fa, fb) = (fm("a", &a), fm("b", &b));

    for spec in [TestSpec::parametric(), TestSpec::non_parametric()] {
        let res = stats_compare(&[fa.clone(), fb.clone()], &spec).unwrap();
        for j in 0..6 {
            let oracle = if spec == TestSpec::parametric() {
                t_test2(&a[j], &b[j], TVariant::Pooled).unwrap()
            } else {
                mann_whitney(&a[j], &b[j]).unwrap()
            };
            assert_eq!(res.p_values[j], oracle);
            assert_eq!(res.failed[j], oracle < spec.alpha);
        }
        let flagged: Vec<usize> = (0..6).filter(|&j| res.failed[j]).collect();
        assert_eq!(flagged, vec![shifted]);
        assert_eq!(res.n_failed, 1);
    }
}

#[test]
fn deviant_implementation_carries_the_pairwise_failures() {
    let base = normal_cols(21, 4, 30, &[]);
    let twin = normal_cols(24, 4, 30, &[]);
    let deviant = normal_cols(23, 4, 30, &[4.0, 4.0, 0.0, 4.0]);
    let fms = [fm("a", &base), fm("b", &twin), fm("c", &deviant)];
    let spec = TestSpec::default();
    let pw = stats_compare_pw(&fms, &spec).unwrap();
    for i in 0..3 {
        for j in 0..3 {
            let want = if i == j {
                0
            } else {
                stats_compare(&[fms[i].clone(), fms[j].clone()], &spec)
                    .unwrap()
                    .n_failed
            };
            assert_eq!(pw.fail_counts[i][j], want);
        }
    }
    assert_eq!(pw.fail_counts[0][1], 0);
    assert_eq!(pw.fail_counts[0][2], 3);
    assert_eq!(pw.fail_counts[1][2], 3);
    assert_eq!(pw.labels, vec!["a", "b", "c"]);
}

#[test]
fn identical_implementations_never_fail() {
    let a = fm("a", &normal_cols(31, 5, 20, &[]));
    for spec in [TestSpec::parametric(), TestSpec::non_parametric()] {
        let res = stats_compare(&[a.clone(), a.clone()], &spec).unwrap();
        assert!(res.p_values.iter().all(|&p| p == 1.0), "{:?}", res.p_values);
        assert_eq!(res.n_failed, 0);
        let pw = stats_compare_pw(&[a.clone(), a.clone(), a.clone()], &spec).unwrap();
        assert!(pw.fail_counts.iter().flatten().all(|&c| c == 0));
    }
}

/// Permutation distribution of H over every way to split 1..=6 into three
/// pairs.
fn kw_enumeration_p(h_obs: f64) -> f64 {
    let mut hs = Vec::new();
    let items = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
    for p in permutations(&items) {
        let groups = [&p[0..2], &p[2..4], &p[4..6]];
        let h = 12.0 / 42.0
            * groups
                .iter()
                .map(|g| g.iter().sum::<f64>().powi(2) / 2.0)
                .sum::<f64>()
            - 21.0;
        hs.push(h);
    }
    hs.iter().filter(|&&h| h >= h_obs - 1e-12).count() as f64 / hs.len() as f64
}

fn permutations(items: &[f64]) -> Vec<Vec<f64>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let x = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, x);
            out.push(p);
        }
    }
    out
}

#[test]
fn kruskal_wallis_hand_case() {
    let p = kruskal_wallis(&[&[1.0, 2.0], &[3.0, 4.0], &[5.0, 6.0]]).unwrap();
    let h = 32.0 / 7.0;
    assert!((p - chi2_sf(h, 2.0).unwrap()).abs() < 1e-12);
    let exact = kw_enumeration_p(h);
    assert!(
        (p - exact).abs() < 0.05,
        "asymptotic {p} vs enumeration {exact}"
    );
}
