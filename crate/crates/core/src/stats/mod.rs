//! Descriptive statistics, normality testing, density and CDF estimation,
//! and series smoothing.

mod kde;
mod shapiro;

pub use kde::{kde, kde_with_grid, DensityEstimate, DEFAULT_GRID_SIZE};
pub use shapiro::{shapiro_wilk, ShapiroWilk};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::focal::FmMatrix;
use crate::numerics::{normal_quantile, student_t_quantile};

pub const DEFAULT_ALPHA: f64 = 0.05;

/// A statistic that may be undefined for the sample at hand. Undefined
/// values carry the reason instead of a placeholder number.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stat<T> {
    Value(T),
    Undefined(String),
}

impl<T: Copy> Stat<T> {
    pub fn value(&self) -> Option<T> {
        match self {
            Stat::Value(v) => Some(*v),
            Stat::Undefined(_) => None,
        }
    }
}

impl<T> Stat<T> {
    pub fn reason(&self) -> Option<&str> {
        match self {
            Stat::Value(_) => None,
            Stat::Undefined(r) => Some(r),
        }
    }

    fn from_result(r: Result<T>) -> Self {
        match r {
            Ok(v) => Stat::Value(v),
            Err(e) => Stat::Undefined(e.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

/// Statistics of one focal-measure sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryStats {
    pub n: usize,
    pub alpha: f64,
    pub mean: f64,
    /// Sample variance (n - 1 denominator).
    pub variance: Stat<f64>,
    /// t-interval for the mean at level 1 - alpha.
    pub ci: Stat<Interval>,
    pub shapiro_wilk: Stat<ShapiroWilk>,
    pub skewness: Stat<f64>,
}

impl SummaryStats {
    /// Summarizes one sample. Needs `n >= 1`; everything that cannot be
    /// computed for the sample is reported as undefined.
    pub fn of(sample: &[f64], alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        if sample.is_empty() {
            return Err(Error::EmptyMatrix);
        }
        let variance = if sample.len() < 2 {
            Stat::Undefined(Error::TooFewObservations { needed: 2, got: 1 }.to_string())
        } else {
            Stat::Value(sample_variance(sample))
        };
        Ok(SummaryStats {
            n: sample.len(),
            alpha,
            mean: mean(sample),
            variance,
            ci: Stat::from_result(
                confidence_interval(sample, alpha).map(|(lo, hi)| Interval { lo, hi }),
            ),
            shapiro_wilk: Stat::from_result(shapiro_wilk(sample)),
            skewness: Stat::from_result(skewness(sample)),
        })
    }

    pub fn sw_p(&self) -> Option<f64> {
        self.shapiro_wilk.value().map(|s| s.p)
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::DomainError(format!(
            "alpha must be in (0,1), got {alpha}"
        )))
    }
}

/// Per-column statistics of a focal-measure matrix, in column order.
pub fn stats_analyze(fm: &FmMatrix, alpha: f64) -> Result<Vec<SummaryStats>> {
    if fm.n() == 0 || fm.m() == 0 {
        return Err(Error::EmptyMatrix);
    }
    (0..fm.m())
        .map(|j| SummaryStats::of(&fm.column(j), alpha))
        .collect()
}

pub fn mean(sample: &[f64]) -> f64 {
    sample.iter().sum::<f64>() / sample.len() as f64
}

/// Sample variance with n - 1 denominator (two-pass).
pub fn sample_variance(sample: &[f64]) -> f64 {
    let m = mean(sample);
    sample.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (sample.len() as f64 - 1.0)
}

pub(crate) fn is_constant(sample: &[f64]) -> bool {
    sample.windows(2).all(|w| w[0] == w[1])
}

/// Classical t-interval for the mean: `mean ± t(1-α/2, n-1) · s/√n`.
pub fn confidence_interval(sample: &[f64], alpha: f64) -> Result<(f64, f64)> {
    check_alpha(alpha)?;
    let n = sample.len();
    if n < 2 {
        return Err(Error::TooFewObservations { needed: 2, got: n });
    }
    let m = mean(sample);
    if is_constant(sample) {
        return Ok((sample[0], sample[0]));
    }
    let t = student_t_quantile(1.0 - alpha / 2.0, (n - 1) as f64)?;
    let half = t * (sample_variance(sample) / n as f64).sqrt();
    Ok((m - half, m + half))
}

/// Biased moment coefficient of skewness, g1 = m3 / m2^(3/2).
pub fn skewness(sample: &[f64]) -> Result<f64> {
    if sample.len() < 2 {
        return Err(Error::TooFewObservations {
            needed: 2,
            got: sample.len(),
        });
    }
    if is_constant(sample) {
        return Err(Error::DegenerateSample);
    }
    let n = sample.len() as f64;
    let m = mean(sample);
    let (m2, m3) = sample.iter().fold((0.0, 0.0), |(s2, s3), v| {
        let d = v - m;
        (s2 + d * d, s3 + d * d * d)
    });
    let (m2, m3) = (m2 / n, m3 / n);
    Ok(m3 / m2.powf(1.5))
}

/// Centered moving average with edge truncation: element `i` averages
/// indices `max(0, i-w) ..= min(L-1, i+w)`. `w = 0` returns the series.
pub fn moving_average(series: &[f64], w: usize) -> Vec<f64> {
    if w == 0 {
        return series.to_vec();
    }
    let last = series.len().saturating_sub(1);
    (0..series.len())
        .map(|i| {
            let window = &series[i.saturating_sub(w)..=(i + w).min(last)];
            let avg = window.iter().sum::<f64>() / window.len() as f64;
            // keep the average inside the window's range under rounding
            let (lo, hi) = window
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                    (lo.min(v), hi.max(v))
                });
            avg.clamp(lo, hi)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
}

pub const DEFAULT_BINS: usize = 10;

/// Equal-width histogram over `[min, max]`. Bins are half-open except the
/// last. A constant sample `c` is binned over `[c - 0.5, c + 0.5]`.
pub fn histogram(sample: &[f64], nbins: usize) -> Result<Histogram> {
    if sample.is_empty() {
        return Err(Error::TooFewObservations { needed: 1, got: 0 });
    }
    if nbins == 0 {
        return Err(Error::DomainError(
            "histogram needs at least one bin".into(),
        ));
    }
    let (mut lo, mut hi) = min_max(sample);
    if lo == hi {
        lo -= 0.5;
        hi += 0.5;
    }
    let width = (hi - lo) / nbins as f64;
    let mut edges: Vec<f64> = (0..nbins).map(|i| lo + i as f64 * width).collect();
    edges.push(hi);
    let mut counts = vec![0; nbins];
    for &x in sample {
        // number of inner edges <= x picks the half-open bin
        let bin = edges[1..nbins].partition_point(|&e| e <= x);
        counts[bin] += 1;
    }
    Ok(Histogram { edges, counts })
}

pub(crate) fn min_max(sample: &[f64]) -> (f64, f64) {
    sample
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        })
}

pub(crate) fn sorted(sample: &[f64]) -> Vec<f64> {
    let mut s = sample.to_vec();
    s.sort_by(f64::total_cmp);
    s
}

/// Normal QQ-plot points `(Φ⁻¹((i - 0.5)/n), x₍ᵢ₎)` for ranks `i = 1..=n`.
pub fn qq_points(sample: &[f64]) -> Result<Vec<(f64, f64)>> {
    let n = sample.len();
    if n < 2 {
        return Err(Error::TooFewObservations { needed: 2, got: n });
    }
    sorted(sample)
        .into_iter()
        .enumerate()
        .map(|(i, x)| Ok((normal_quantile((i as f64 + 0.5) / n as f64)?, x)))
        .collect()
}

/// Empirical CDF as a right-continuous step function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ecdf {
    /// Sorted distinct sample values.
    pub x: Vec<f64>,
    /// Fraction of observations `<= x[i]`.
    pub f: Vec<f64>,
}

impl Ecdf {
    pub fn eval(&self, v: f64) -> f64 {
        match self.x.partition_point(|&x| x <= v) {
            0 => 0.0,
            k => self.f[k - 1],
        }
    }
}

pub fn ecdf(sample: &[f64]) -> Result<Ecdf> {
    if sample.is_empty() {
        return Err(Error::TooFewObservations { needed: 1, got: 0 });
    }
    let s = sorted(sample);
    let n = s.len();
    let mut x = Vec::new();
    let mut f = Vec::new();
    for (i, v) in s.iter().enumerate() {
        if i + 1 == n || s[i + 1] != *v {
            x.push(*v);
            f.push((i + 1) as f64 / n as f64);
        }
    }
    Ok(Ecdf { x, f })
}

/// Sample quantile with linear interpolation between order statistics.
pub fn quantile(sample: &[f64], p: f64) -> f64 {
    let s = sorted(sample);
    let h = (s.len() - 1) as f64 * p.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    s[lo] + (h - lo as f64) * (s[hi] - s[lo])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::focal::FmName;

    fn close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b}");
    }

    #[test]
    fn ci_hand_case() {
        let (lo, hi) = confidence_interval(&[1.0, 2.0, 3.0, 4.0, 5.0], 0.05).unwrap();
        // 3 ∓ 2.7764451051977987 · sqrt(2.5 / 5)
        close(lo, 1.0367568385224397, 1e-12);
        close(hi, 4.9632431614775603, 1e-12);
        close(lo, 1.03682, 1e-4);
        close(hi, 4.96318, 1e-4);
        assert_eq!(confidence_interval(&[7.5; 4], 0.05).unwrap(), (7.5, 7.5));
        assert!(matches!(
            confidence_interval(&[1.0], 0.05),
            Err(Error::TooFewObservations { needed: 2, got: 1 })
        ));
    }

    #[test]
    fn ci_widens_with_confidence() {
        let s = [2.0, 3.5, 1.0, 8.0, 4.0];
        let (a, b) = confidence_interval(&s, 0.05).unwrap();
        let (c, d) = confidence_interval(&s, 0.01).unwrap();
        assert!(c < a && d > b);
    }

    #[test]
    fn skewness_cases() {
        close(skewness(&[1.0, 2.0, 3.0]).unwrap(), 0.0, 1e-15);
        // m2 = 38/3, m3 = 30
        let expected = 30.0 / (38.0f64 / 3.0).powf(1.5);
        close(skewness(&[1.0, 2.0, 9.0]).unwrap(), expected, 1e-14);
        close(expected, 0.66542, 1e-4);
        close(skewness(&[-1.0, -2.0, -9.0]).unwrap(), -expected, 1e-14);
        assert!(matches!(
            skewness(&[3.0, 3.0]),
            Err(Error::DegenerateSample)
        ));
    }

    #[test]
    fn moving_average_cases() {
        let s = [1.0, 2.0, 3.0, 4.0, 5.0];
        assert_eq!(moving_average(&s, 0), s.to_vec());
        let ma = moving_average(&s, 1);
        for (a, b) in ma.iter().zip([1.5, 2.0, 3.0, 4.0, 4.5]) {
            close(*a, b, 1e-12);
        }
        assert_eq!(moving_average(&[0.1; 7], 3), vec![0.1; 7]);
        assert!(moving_average(&[], 2).is_empty());
        // window larger than the series averages everything
        close(moving_average(&[1.0, 5.0], 10)[0], 3.0, 1e-15);
    }

    #[test]
    fn histogram_cases() {
        let s: Vec<f64> = (0..10).map(f64::from).collect();
        let h = histogram(&s, 5).unwrap();
        for (e, want) in h.edges.iter().zip([0.0, 1.8, 3.6, 5.4, 7.2, 9.0]) {
            close(*e, want, 1e-12);
        }
        assert_eq!(h.counts, vec![2; 5]);

        let h = histogram(&[3.0, 3.0], 4).unwrap();
        assert_eq!(h.edges, vec![2.5, 2.75, 3.0, 3.25, 3.5]);
        assert_eq!(h.counts, vec![0, 0, 2, 0]);
        assert_eq!(histogram(&[1.0], 1).unwrap().counts, vec![1]);
        assert!(histogram(&[], 3).is_err());
    }

    #[test]
    fn qq_two_points() {
        let q = qq_points(&[5.0, 2.0]).unwrap();
        close(q[0].0, -0.67449, 1e-5);
        close(q[1].0, 0.67449, 1e-5);
        assert_eq!((q[0].1, q[1].1), (2.0, 5.0));
        assert!(qq_points(&[1.0]).is_err());
    }

    #[test]
    fn ecdf_cases() {
        let e = ecdf(&[2.0, 1.0, 2.0]).unwrap();
        assert_eq!(e.x, vec![1.0, 2.0]);
        close(e.f[0], 1.0 / 3.0, 1e-15);
        assert_eq!(e.f[1], 1.0);
        assert_eq!(e.eval(0.5), 0.0);
        assert_eq!(e.eval(1.5), e.f[0]);
        assert_eq!(e.eval(2.0), 1.0);
        let e = ecdf(&[4.2]).unwrap();
        assert_eq!((e.x, e.f), (vec![4.2], vec![1.0]));
    }

    #[test]
    fn analyze_columns() {
        let fm = FmMatrix::new(
            "t",
            vec![FmName::new("o", "a"), FmName::new("o", "c")],
            (1..=5).map(|i| vec![i as f64, 4.0]).collect(),
        )
        .unwrap();
        let st = stats_analyze(&fm, 0.05).unwrap();
        assert_eq!(st.len(), 2);
        assert_eq!(st[0].mean, 3.0);
        assert_eq!(st[0].variance, Stat::Value(2.5));
        let ci = st[0].ci.value().unwrap();
        close(ci.lo, 1.0367568385224397, 1e-12);
        close(ci.hi, 4.9632431614775603, 1e-12);

        assert_eq!(st[1].variance, Stat::Value(0.0));
        assert!(st[1].skewness.reason().is_some());
        assert!(st[1].shapiro_wilk.reason().is_some());
        assert_eq!(st[1].ci.value().unwrap(), Interval { lo: 4.0, hi: 4.0 });
    }

    #[test]
    fn analyze_small_samples_are_undefined_not_zero() {
        let fm = FmMatrix::new("t", vec![FmName::new("o", "a")], vec![vec![1.0]]).unwrap();
        let st = &stats_analyze(&fm, 0.05).unwrap()[0];
        assert!(matches!(st.variance, Stat::Undefined(_)));
        assert!(matches!(st.ci, Stat::Undefined(_)));
        let json = serde_json::to_string(st).unwrap();
        assert!(json.contains("\"undefined\""));
    }

    #[test]
    fn quantile_interpolates() {
        assert_eq!(quantile(&[4.0, 1.0, 3.0, 2.0], 0.5), 2.5);
        assert_eq!(quantile(&[1.0, 2.0], 0.0), 1.0);
        assert_eq!(quantile(&[1.0, 2.0], 1.0), 2.0);
    }
}
