//! Focal measures: scalar summaries extracted from each output of each run.
//!
//! Iteration indices are 0-based throughout, both for the steady-state
//! truncation point and for the reported positions of extrema.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::RunSet;

/// Names of the six steady-state summaries, in column order.
pub const SIXPACK_NAMES: [&str; 6] = ["max", "argmax", "min", "argmin", "mean", "std"];

/// Which summaries to take from each output.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ExtractorSpec {
    /// Max, argmax, min, argmin, and the mean and sample standard
    /// deviation over iterations `ss_idx..`.
    SteadyStateSixpack { ss_idx: usize },
    /// Output values at the given iterations.
    AtIterations { iters: Vec<usize> },
}

impl ExtractorSpec {
    pub fn summary_names(&self) -> Vec<String> {
        match self {
            ExtractorSpec::SteadyStateSixpack { .. } => {
                SIXPACK_NAMES.iter().map(|s| s.to_string()).collect()
            }
            ExtractorSpec::AtIterations { iters } => {
                iters.iter().map(|i| format!("it{i}")).collect()
            }
        }
    }

    /// Checks the spec against series of length `n_iters`.
    pub fn validate(&self, n_iters: usize) -> Result<()> {
        match self {
            ExtractorSpec::SteadyStateSixpack { ss_idx } => {
                if *ss_idx >= n_iters {
                    return Err(Error::SsIdxOutOfRange {
                        ss_idx: *ss_idx,
                        len: n_iters,
                    });
                }
            }
            ExtractorSpec::AtIterations { iters } => {
                if iters.is_empty() {
                    return Err(Error::InvalidExtractor("no iterations given".into()));
                }
                if iters.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(Error::InvalidExtractor(
                        "iterations must be strictly increasing".into(),
                    ));
                }
                if let Some(&bad) = iters.iter().find(|&&i| i >= n_iters) {
                    return Err(Error::IterOutOfRange(bad));
                }
            }
        }
        Ok(())
    }

    pub fn extract(&self, series: &[f64]) -> Result<Vec<f64>> {
        match self {
            ExtractorSpec::SteadyStateSixpack { ss_idx } => {
                Ok(extract_sixpack(series, *ss_idx)?.to_vec())
            }
            ExtractorSpec::AtIterations { iters } => extract_at_iters(series, iters),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sixpack {
    pub max: f64,
    pub argmax: usize,
    pub min: f64,
    pub argmin: usize,
    pub ss_mean: f64,
    pub ss_std: f64,
}

impl Sixpack {
    pub fn to_vec(&self) -> Vec<f64> {
        vec![
            self.max,
            self.argmax as f64,
            self.min,
            self.argmin as f64,
            self.ss_mean,
            self.ss_std,
        ]
    }
}

/// Extrema (first occurrence on ties) and steady-state moments of a series.
pub fn extract_sixpack(series: &[f64], ss_idx: usize) -> Result<Sixpack> {
    if ss_idx >= series.len() {
        return Err(Error::SsIdxOutOfRange {
            ss_idx,
            len: series.len(),
        });
    }
    let (mut argmax, mut argmin) = (0, 0);
    for (i, &v) in series.iter().enumerate().skip(1) {
        if v > series[argmax] {
            argmax = i;
        }
        if v < series[argmin] {
            argmin = i;
        }
    }
    let ss = &series[ss_idx..];
    let n = ss.len() as f64;
    let ss_mean = ss.iter().sum::<f64>() / n;
    let ss_std = if ss.len() < 2 {
        0.0
    } else {
        (ss.iter().map(|v| (v - ss_mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    };
    Ok(Sixpack {
        max: series[argmax],
        argmax,
        min: series[argmin],
        argmin,
        // the summed mean can stray outside [min, max] by an ulp
        ss_mean: ss_mean.clamp(series[argmin], series[argmax]),
        ss_std,
    })
}

/// Values of the series at the given iterations, in order.
pub fn extract_at_iters(series: &[f64], iters: &[usize]) -> Result<Vec<f64>> {
    iters
        .iter()
        .map(|&i| series.get(i).copied().ok_or(Error::IterOutOfRange(i)))
        .collect()
}

/// Column label of a focal measure: which output, which summary.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FmName {
    pub output: String,
    pub summary: String,
}

impl FmName {
    pub fn new(output: impl Into<String>, summary: impl Into<String>) -> Self {
        FmName {
            output: output.into(),
            summary: summary.into(),
        }
    }

    /// `output.summary`, as used in delimited headers.
    pub fn label(&self) -> String {
        format!("{}.{}", self.output, self.summary)
    }
}

impl std::fmt::Display for FmName {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}.{}", self.output, self.summary)
    }
}

/// n runs by m focal measures. Columns are output-major: all summaries of
/// the first selected output, then the next output, and so on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FmMatrix {
    tag: String,
    fm_names: Vec<FmName>,
    data: Vec<Vec<f64>>,
}

impl FmMatrix {
    pub fn new(tag: impl Into<String>, fm_names: Vec<FmName>, data: Vec<Vec<f64>>) -> Result<Self> {
        if data.is_empty() || fm_names.is_empty() {
            return Err(Error::EmptyMatrix);
        }
        let m = fm_names.len();
        for (r, row) in data.iter().enumerate() {
            if row.len() != m {
                return Err(Error::RaggedRows {
                    row: r + 1,
                    expected: m,
                    found: row.len(),
                });
            }
            if let Some(c) = row.iter().position(|v| !v.is_finite()) {
                return Err(Error::NonNumericToken {
                    row: r + 1,
                    col: c + 1,
                    token: row[c].to_string(),
                });
            }
        }
        Ok(FmMatrix {
            tag: tag.into(),
            fm_names,
            data,
        })
    }

    pub fn tag(&self) -> &str {
        &self.tag
    }

    pub fn fm_names(&self) -> &[FmName] {
        &self.fm_names
    }

    /// Number of observations (runs).
    pub fn n(&self) -> usize {
        self.data.len()
    }

    /// Number of focal measures.
    pub fn m(&self) -> usize {
        self.fm_names.len()
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.data
    }

    pub fn get(&self, run: usize, fm: usize) -> f64 {
        self.data[run][fm]
    }

    /// The sample of one focal measure across runs.
    pub fn column(&self, fm: usize) -> Vec<f64> {
        self.data.iter().map(|r| r[fm]).collect()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let raw: FmMatrix = serde_json::from_str(s)?;
        FmMatrix::new(raw.tag, raw.fm_names, raw.data)
    }

    /// Comma-separated text: a header of `output.summary` labels, then one
    /// row per run.
    pub fn to_delimited(&self) -> String {
        let mut out = self
            .fm_names
            .iter()
            .map(FmName::label)
            .collect::<Vec<_>>()
            .join(",");
        out.push('\n');
        for row in &self.data {
            for (j, v) in row.iter().enumerate() {
                if j > 0 {
                    out.push(',');
                }
                let _ = write!(out, "{}", crate::ingest::format_exact(*v));
            }
            out.push('\n');
        }
        out
    }

    pub fn from_delimited(text: &str, tag: impl Into<String>) -> Result<Self> {
        let header = text.lines().next().ok_or(Error::EmptyFile)?;
        let fm_names = header
            .split(',')
            .map(|label| match label.trim().rsplit_once('.') {
                Some((o, s)) => FmName::new(o, s),
                None => FmName::new(label.trim(), ""),
            })
            .collect::<Vec<_>>();
        let body = crate::ingest::parse_output(
            text,
            &crate::ingest::ReadOptions {
                delimiter: Some(crate::ingest::Delimiter::Comma),
                skip_rows: 1,
            },
        )?;
        let data = (0..body.n_iters()).map(|i| body.row(i).to_vec()).collect();
        FmMatrix::new(tag, fm_names, data)
    }
}

/// Extracts focal measures from every run of a set.
///
/// `outputs` selects columns (default: all, in file order). Row `i` of the
/// result holds the summaries of run `i`.
pub fn stats_gather(
    rs: &RunSet,
    spec: &ExtractorSpec,
    outputs: Option<&[usize]>,
    tag: &str,
) -> Result<FmMatrix> {
    let all: Vec<usize>;
    let outputs = match outputs {
        Some(o) => o,
        None => {
            all = (0..rs.n_outputs()).collect();
            &all
        }
    };
    if outputs.is_empty() {
        return Err(Error::Config("no outputs selected".into()));
    }
    if let Some(&bad) = outputs.iter().find(|&&o| o >= rs.n_outputs()) {
        return Err(Error::OutputOutOfRange {
            index: bad,
            n_outputs: rs.n_outputs(),
        });
    }
    spec.validate(rs.n_iters())?;

    let summaries = spec.summary_names();
    let fm_names = outputs
        .iter()
        .flat_map(|&o| {
            let out = rs.output_names()[o].clone();
            summaries
                .iter()
                .map(move |s| FmName::new(out.clone(), s.clone()))
        })
        .collect();

    let mut data = Vec::with_capacity(rs.len());
    for (run, m) in rs.runs().iter().enumerate() {
        let mut row = Vec::with_capacity(outputs.len() * summaries.len());
        for &o in outputs {
            let vals = spec.extract(&m.column(o)).map_err(|e| Error::Extract {
                run,
                output: o,
                source: Box::new(e),
            })?;
            row.extend(vals);
        }
        data.push(row);
    }
    FmMatrix::new(tag, fm_names, data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::OutputMatrix;

    fn run(cols: &[&[f64]]) -> OutputMatrix {
        let rows = (0..cols[0].len())
            .map(|i| cols.iter().map(|c| c[i]).collect())
            .collect();
        OutputMatrix::from_rows(rows, None).unwrap()
    }

    #[test]
    fn sixpack_hand_cases() {
        let s = extract_sixpack(&[1.0, 3.0, 2.0], 1).unwrap();
        assert_eq!((s.max, s.argmax, s.min, s.argmin), (3.0, 1, 1.0, 0));
        assert_eq!(s.ss_mean, 2.5);
        assert!((s.ss_std - 0.5f64.sqrt()).abs() < 1e-15);

        let s = extract_sixpack(&[5.0, 5.0, 5.0], 0).unwrap();
        assert_eq!(s.to_vec(), vec![5.0, 0.0, 5.0, 0.0, 5.0, 0.0]);

        let s = extract_sixpack(&[2.0], 0).unwrap();
        assert_eq!(s.to_vec(), vec![2.0, 0.0, 2.0, 0.0, 2.0, 0.0]);

        // singleton steady-state slice
        assert_eq!(extract_sixpack(&[1.0, 4.0], 1).unwrap().ss_std, 0.0);
        assert!(matches!(
            extract_sixpack(&[1.0, 2.0], 2),
            Err(Error::SsIdxOutOfRange { ss_idx: 2, len: 2 })
        ));
    }

    #[test]
    fn at_iters_cases() {
        assert_eq!(
            extract_at_iters(&[10.0, 20.0, 30.0], &[0, 2]).unwrap(),
            vec![10.0, 30.0]
        );
        assert_eq!(extract_at_iters(&[7.0], &[0]).unwrap(), vec![7.0]);
        assert!(matches!(
            extract_at_iters(&[1.0, 2.0], &[2]),
            Err(Error::IterOutOfRange(2))
        ));
    }

    #[test]
    fn spec_validation() {
        let spec = ExtractorSpec::AtIterations { iters: vec![2, 1] };
        assert!(matches!(spec.validate(5), Err(Error::InvalidExtractor(_))));
        let spec = ExtractorSpec::AtIterations { iters: vec![] };
        assert!(spec.validate(5).is_err());
        let spec = ExtractorSpec::AtIterations { iters: vec![1, 5] };
        assert!(matches!(spec.validate(5), Err(Error::IterOutOfRange(5))));
        assert_eq!(spec.summary_names(), vec!["it1", "it5"]);
    }

    #[test]
    fn gather_sixpack_two_runs() {
        let rs = RunSet::new(
            vec![run(&[&[1.0, 3.0, 2.0]]), run(&[&[2.0, 2.0, 2.0]])],
            "t",
        )
        .unwrap();
        let fm = stats_gather(
            &rs,
            &ExtractorSpec::SteadyStateSixpack { ss_idx: 0 },
            None,
            "t",
        )
        .unwrap();
        assert_eq!((fm.n(), fm.m()), (2, 6));
        assert_eq!(fm.rows()[0], vec![3.0, 1.0, 1.0, 0.0, 2.0, 1.0]);
        assert_eq!(fm.rows()[1], vec![2.0, 0.0, 2.0, 0.0, 2.0, 0.0]);
        assert_eq!(fm.fm_names()[4], FmName::new("out0", "mean"));
    }

    #[test]
    fn gather_initial_values_two_outputs() {
        let rs = RunSet::new(vec![run(&[&[4.0, 1.0], &[9.0, 2.0]])], "t").unwrap();
        let fm = stats_gather(
            &rs,
            &ExtractorSpec::AtIterations { iters: vec![0] },
            None,
            "t",
        )
        .unwrap();
        assert_eq!(fm.rows(), &[vec![4.0, 9.0]]);
        assert_eq!(fm.fm_names()[1].label(), "out1.it0");
    }

    #[test]
    fn gather_output_subset_and_errors() {
        let rs = RunSet::new(vec![run(&[&[4.0, 1.0], &[9.0, 2.0]])], "t").unwrap();
        let spec = ExtractorSpec::AtIterations { iters: vec![1] };
        let fm = stats_gather(&rs, &spec, Some(&[1]), "t").unwrap();
        assert_eq!(fm.rows(), &[vec![2.0]]);
        assert!(matches!(
            stats_gather(&rs, &spec, Some(&[2]), "t"),
            Err(Error::OutputOutOfRange { index: 2, .. })
        ));
        let bad = ExtractorSpec::SteadyStateSixpack { ss_idx: 2 };
        assert!(matches!(
            stats_gather(&rs, &bad, None, "t"),
            Err(Error::SsIdxOutOfRange { .. })
        ));
    }

    #[test]
    fn gather_preserves_run_order() {
        let a = run(&[&[1.0, 3.0, 2.0]]);
        let b = run(&[&[0.0, 2.0, 5.0]]);
        let spec = ExtractorSpec::SteadyStateSixpack { ss_idx: 1 };
        let ab = stats_gather(
            &RunSet::new(vec![a.clone(), b.clone()], "x").unwrap(),
            &spec,
            None,
            "x",
        )
        .unwrap();
        let ba = stats_gather(&RunSet::new(vec![b, a], "x").unwrap(), &spec, None, "x").unwrap();
        assert_eq!(ab.rows()[0], ba.rows()[1]);
        assert_eq!(ab.rows()[1], ba.rows()[0]);
    }

    #[test]
    fn interchange_formats() {
        let fm = FmMatrix::new(
            "setup",
            vec![FmName::new("prey", "max"), FmName::new("prey", "mean")],
            vec![vec![1.0, 0.1], vec![2.0, 1.0 / 3.0]],
        )
        .unwrap();
        assert_eq!(FmMatrix::from_json(&fm.to_json().unwrap()).unwrap(), fm);
        let text = fm.to_delimited();
        assert!(text.starts_with("prey.max,prey.mean\n"));
        assert_eq!(FmMatrix::from_delimited(&text, "setup").unwrap(), fm);
    }
}
