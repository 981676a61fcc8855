//! Statistical comparison of focal measures across model implementations.
//!
//! Two implementations are compared with a two-sample t-test (parametric)
//! or the Mann-Whitney U test (non-parametric); three or more with one-way
//! ANOVA or Kruskal-Wallis. A test "fails" when its p-value is below the
//! significance level, flagging a possible misalignment.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::focal::{FmMatrix, FmName};
use crate::numerics::{chi2_sf, f_sf, normal_cdf, student_t_two_sided};
use crate::stats::{is_constant, mean, sample_variance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestKind {
    Parametric,
    NonParametric,
}

/// Variance assumption of the two-sample t-test.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TVariant {
    #[default]
    Pooled,
    Welch,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TestSelection {
    /// One test family for every focal measure.
    All(TestKind),
    /// One test family per focal measure, in column order.
    PerFm(Vec<TestKind>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestSpec {
    pub tests: TestSelection,
    #[serde(default)]
    pub variant: TVariant,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
}

fn default_alpha() -> f64 {
    crate::stats::DEFAULT_ALPHA
}

impl Default for TestSpec {
    fn default() -> Self {
        TestSpec {
            tests: TestSelection::All(TestKind::Parametric),
            variant: TVariant::Pooled,
            alpha: default_alpha(),
        }
    }
}

impl TestSpec {
    pub fn parametric() -> Self {
        TestSpec::default()
    }

    pub fn non_parametric() -> Self {
        TestSpec {
            tests: TestSelection::All(TestKind::NonParametric),
            ..TestSpec::default()
        }
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self
    }

    fn kinds(&self, m: usize) -> Result<Vec<TestKind>> {
        match &self.tests {
            TestSelection::All(k) => Ok(vec![*k; m]),
            TestSelection::PerFm(v) if v.len() == m => Ok(v.clone()),
            TestSelection::PerFm(v) => Err(Error::Config(format!(
                "{} tests given for {m} focal measures",
                v.len()
            ))),
        }
    }

    fn check(&self) -> Result<()> {
        if self.alpha > 0.0 && self.alpha < 1.0 {
            Ok(())
        } else {
            Err(Error::DomainError(format!(
                "alpha must be in (0,1), got {}",
                self.alpha
            )))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareResult {
    /// Tags of the compared implementations, in input order.
    pub tags: Vec<String>,
    pub fm_names: Vec<FmName>,
    pub p_values: Vec<f64>,
    pub tests_used: Vec<String>,
    pub failed: Vec<bool>,
    pub n_failed: usize,
    pub alpha: f64,
}

/// Counts of failed tests for every pair of implementations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairwiseTable {
    pub labels: Vec<String>,
    pub fail_counts: Vec<Vec<usize>>,
    pub m: usize,
}

impl PairwiseTable {
    /// Aligned plain-text table. With `color`, nonzero counts are wrapped
    /// in ANSI red.
    pub fn to_text(&self, color: bool) -> String {
        let width = self
            .labels
            .iter()
            .map(|l| l.chars().count())
            .chain(std::iter::once(format!("{}", self.m).len()))
            .max()
            .unwrap_or(1);
        let mut out = format!("{:>width$}", "");
        for l in &self.labels {
            let _ = write!(out, "  {l:>width$}");
        }
        out.push('\n');
        for (i, row) in self.fail_counts.iter().enumerate() {
            let _ = write!(out, "{:>width$}", self.labels[i]);
            for &c in row {
                let cell = format!("{c:>width$}");
                if color && c > 0 {
                    let _ = write!(out, "  \x1b[31m{cell}\x1b[0m");
                } else {
                    let _ = write!(out, "  {cell}");
                }
            }
            out.push('\n');
        }
        let _ = writeln!(out, "(failed tests out of {} per pair)", self.m);
        out
    }
}

fn check_len(s: &[f64], needed: usize) -> Result<()> {
    if s.len() < needed {
        Err(Error::TooFewObservations {
            needed,
            got: s.len(),
        })
    } else {
        Ok(())
    }
}

/// Two-sided p-value of the two-sample t-test.
///
/// When both samples are constant the statistic is undefined: equal
/// constants give p = 1, different constants p = 0.
pub fn t_test2(a: &[f64], b: &[f64], variant: TVariant) -> Result<f64> {
    check_len(a, 2)?;
    check_len(b, 2)?;
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (ma, mb) = (mean(a), mean(b));
    if is_constant(a) && is_constant(b) {
        return Ok(if a[0] == b[0] { 1.0 } else { 0.0 });
    }
    let (va, vb) = (sample_variance(a), sample_variance(b));
    let (se, df) = match variant {
        TVariant::Pooled => {
            let df = na + nb - 2.0;
            let sp2 = ((na - 1.0) * va + (nb - 1.0) * vb) / df;
            ((sp2 * (1.0 / na + 1.0 / nb)).sqrt(), df)
        }
        TVariant::Welch => {
            let (qa, qb) = (va / na, vb / nb);
            let df = (qa + qb).powi(2) / (qa * qa / (na - 1.0) + qb * qb / (nb - 1.0));
            ((qa + qb).sqrt(), df)
        }
    };
    let t = (ma - mb) / se;
    student_t_two_sided(t, df)
}

/// Midranks (1-based) of the pooled sample, plus the tie-group sizes.
fn ranks(values: &[f64]) -> (Vec<f64>, Vec<usize>) {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    let mut r = vec![0.0; values.len()];
    let mut ties = Vec::new();
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && values[idx[j + 1]] == values[idx[i]] {
            j += 1;
        }
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            r[k] = rank;
        }
        ties.push(j - i + 1);
        i = j + 1;
    }
    (r, ties)
}

fn tie_sum(ties: &[usize]) -> f64 {
    ties.iter().map(|&t| (t * t * t - t) as f64).sum()
}

/// Largest pooled sample size for which the exact null distribution is used.
pub const MW_EXACT_MAX_N: usize = 12;

/// Two-sided Mann-Whitney U test.
///
/// Exact when `n_a + n_b <= 12` and there are no ties; otherwise the normal
/// approximation with tie correction and a 0.5 continuity correction.
pub fn mann_whitney(a: &[f64], b: &[f64]) -> Result<f64> {
    check_len(a, 1)?;
    check_len(b, 1)?;
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let (r, ties) = ranks(&pooled);
    let (m, n) = (a.len(), b.len());
    let rank_sum_a: f64 = r[..m].iter().sum();
    let u = rank_sum_a - (m * (m + 1)) as f64 / 2.0;
    let total = m + n;
    let has_ties = ties.iter().any(|&t| t > 1);

    if total <= MW_EXACT_MAX_N && !has_ties {
        // u is an integer when there are no ties
        return Ok(mw_exact_p(u.round() as usize, m, n));
    }
    Ok(mw_normal_p(u, m, n, &ties))
}

/// Two-sided Mann-Whitney p from the normal approximation (tie and
/// continuity corrected), whatever the sample sizes.
pub fn mann_whitney_normal(a: &[f64], b: &[f64]) -> Result<f64> {
    check_len(a, 1)?;
    check_len(b, 1)?;
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let (r, ties) = ranks(&pooled);
    let m = a.len();
    let u = r[..m].iter().sum::<f64>() - (m * (m + 1)) as f64 / 2.0;
    Ok(mw_normal_p(u, m, b.len(), &ties))
}

fn mw_normal_p(u: f64, m: usize, n: usize, ties: &[usize]) -> f64 {
    let total = m + n;
    let (mf, nf, nt) = (m as f64, n as f64, total as f64);
    let var = mf * nf / 12.0 * ((nt + 1.0) - tie_sum(ties) / (nt * (nt - 1.0)));
    if var <= 0.0 {
        return 1.0;
    }
    let z = ((u - mf * nf / 2.0).abs() - 0.5).max(0.0) / var.sqrt();
    (2.0 * normal_cdf(-z)).min(1.0)
}

/// Number of arrangements of `m` + `n` distinct values giving each U,
/// indexed by U in `0..=m*n`.
pub fn mw_null_counts(m: usize, n: usize) -> Vec<u64> {
    // counts[i][j] is the distribution for (i, j); the largest value is either
    // from the first sample (adds j to U) or from the second (adds nothing)
    let mut prev: Vec<Vec<u64>> = (0..=n).map(|_| vec![1]).collect();
    for i in 1..=m {
        let mut cur: Vec<Vec<u64>> = Vec::with_capacity(n + 1);
        cur.push(vec![1]);
        for j in 1..=n {
            let mut dist = vec![0u64; i * j + 1];
            for (u, &c) in prev[j].iter().enumerate() {
                dist[u + j] += c;
            }
            for (u, &c) in cur[j - 1].iter().enumerate() {
                dist[u] += c;
            }
            cur.push(dist);
        }
        prev = cur;
    }
    prev.swap_remove(n)
}

/// Exact two-sided p = 2 min(P(U <= u), P(U >= u)), capped at 1.
pub fn mw_exact_p(u: usize, m: usize, n: usize) -> f64 {
    let counts = mw_null_counts(m, n);
    let total: u64 = counts.iter().sum();
    let le: u64 = counts[..=u].iter().sum();
    let ge: u64 = counts[u..].iter().sum();
    ((2 * le.min(ge)) as f64 / total as f64).min(1.0)
}

fn all_identical(groups: &[&[f64]]) -> bool {
    let first = groups.iter().find_map(|g| g.first().copied());
    groups.iter().all(|g| g.iter().all(|&v| Some(v) == first))
}

fn check_groups(groups: &[&[f64]]) -> Result<()> {
    if groups.len() < 2 {
        return Err(Error::DegenerateInput(format!(
            "need at least 2 groups, got {}",
            groups.len()
        )));
    }
    Ok(())
}

/// One-way ANOVA: p = 1 - F_cdf(F; k - 1, N - k).
pub fn anova1(groups: &[&[f64]]) -> Result<f64> {
    check_groups(groups)?;
    for g in groups {
        check_len(g, 2)?;
    }
    if all_identical(groups) {
        return Err(Error::DegenerateInput("all values identical".into()));
    }
    let k = groups.len() as f64;
    let n_total: usize = groups.iter().map(|g| g.len()).sum();
    let grand = groups.iter().flat_map(|g| g.iter()).sum::<f64>() / n_total as f64;
    let (mut ssb, mut ssw) = (0.0, 0.0);
    for g in groups {
        let m = mean(g);
        ssb += g.len() as f64 * (m - grand).powi(2);
        ssw += g.iter().map(|v| (v - m).powi(2)).sum::<f64>();
    }
    let dfw = n_total as f64 - k;
    if ssw == 0.0 {
        // groups constant but different
        return Ok(0.0);
    }
    let f = (ssb / (k - 1.0)) / (ssw / dfw);
    f_sf(f, k - 1.0, dfw)
}

/// Kruskal-Wallis H test with tie correction; p = 1 - χ²_cdf(H; k - 1).
pub fn kruskal_wallis(groups: &[&[f64]]) -> Result<f64> {
    check_groups(groups)?;
    for g in groups {
        check_len(g, 1)?;
    }
    let pooled: Vec<f64> = groups.iter().flat_map(|g| g.iter().copied()).collect();
    let n = pooled.len() as f64;
    if pooled.len() < 3 {
        return Err(Error::TooFewObservations {
            needed: 3,
            got: pooled.len(),
        });
    }
    if all_identical(groups) {
        return Err(Error::DegenerateInput("all values tied".into()));
    }
    let (r, ties) = ranks(&pooled);
    let mut offset = 0;
    let mut sum = 0.0;
    for g in groups {
        let rs: f64 = r[offset..offset + g.len()].iter().sum();
        sum += rs * rs / g.len() as f64;
        offset += g.len();
    }
    let h = 12.0 / (n * (n + 1.0)) * sum - 3.0 * (n + 1.0);
    let correction = 1.0 - tie_sum(&ties) / (n * n * n - n);
    let h = (h / correction).max(0.0);
    chi2_sf(h, groups.len() as f64 - 1.0)
}

fn test_name(kind: TestKind, k: usize, variant: TVariant) -> &'static str {
    match (kind, k == 2, variant) {
        (TestKind::Parametric, true, TVariant::Pooled) => "t-test (pooled)",
        (TestKind::Parametric, true, TVariant::Welch) => "t-test (Welch)",
        (TestKind::NonParametric, true, _) => "Mann-Whitney U",
        (TestKind::Parametric, false, _) => "one-way ANOVA",
        (TestKind::NonParametric, false, _) => "Kruskal-Wallis",
    }
}

/// Compares the focal measures of two or more implementations column by
/// column. A focal measure whose values are identical everywhere gets p = 1.
pub fn stats_compare(fms: &[FmMatrix], spec: &TestSpec) -> Result<CompareResult> {
    spec.check()?;
    if fms.len() < 2 {
        return Err(Error::DegenerateInput(format!(
            "need at least 2 implementations, got {}",
            fms.len()
        )));
    }
    let names = fms[0].fm_names();
    for fm in &fms[1..] {
        if fm.fm_names() != names {
            return Err(Error::FmNameMismatch(format!(
                "{:?} vs {:?}",
                fms[0].tag(),
                fm.tag()
            )));
        }
    }
    let kinds = spec.kinds(names.len())?;
    let k = fms.len();

    let mut p_values = Vec::with_capacity(names.len());
    let mut tests_used = Vec::with_capacity(names.len());
    for (j, name) in names.iter().enumerate() {
        let cols: Vec<Vec<f64>> = fms.iter().map(|fm| fm.column(j)).collect();
        let groups: Vec<&[f64]> = cols.iter().map(Vec::as_slice).collect();
        let kind = kinds[j];
        let p = if all_identical(&groups) {
            Ok(1.0)
        } else {
            match (kind, k) {
                (TestKind::Parametric, 2) => t_test2(groups[0], groups[1], spec.variant),
                (TestKind::NonParametric, 2) => mann_whitney(groups[0], groups[1]),
                (TestKind::Parametric, _) => anova1(&groups),
                (TestKind::NonParametric, _) => kruskal_wallis(&groups),
            }
        }
        .map_err(|e| Error::InFm {
            name: name.to_string(),
            source: Box::new(e),
        })?;
        p_values.push(p.clamp(0.0, 1.0));
        tests_used.push(test_name(kind, k, spec.variant).to_string());
    }
    let failed: Vec<bool> = p_values.iter().map(|&p| p < spec.alpha).collect();
    Ok(CompareResult {
        tags: fms.iter().map(|f| f.tag().to_string()).collect(),
        fm_names: names.to_vec(),
        n_failed: failed.iter().filter(|&&f| f).count(),
        p_values,
        tests_used,
        failed,
        alpha: spec.alpha,
    })
}

/// Failed-test counts for every pair of implementations.
pub fn stats_compare_pw(fms: &[FmMatrix], spec: &TestSpec) -> Result<PairwiseTable> {
    if fms.len() < 2 {
        return Err(Error::DegenerateInput(format!(
            "need at least 2 implementations, got {}",
            fms.len()
        )));
    }
    let k = fms.len();
    let mut counts = vec![vec![0; k]; k];
    for i in 0..k {
        for j in i + 1..k {
            let r = stats_compare(&[fms[i].clone(), fms[j].clone()], spec)?;
            counts[i][j] = r.n_failed;
            counts[j][i] = r.n_failed;
        }
    }
    Ok(PairwiseTable {
        labels: fms.iter().map(|f| f.tag().to_string()).collect(),
        fail_counts: counts,
        m: fms[0].m(),
    })
}
