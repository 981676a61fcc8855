//! Reading delimited simulation output into validated matrices.
//!
//! A file holds one run: one row per iteration (row 0 is iteration 0), one
//! column per output. Fields are separated by a single delimiter character
//! or by runs of spaces; rows end in LF or CRLF.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Field separator of a delimited output file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Delimiter {
    Comma,
    Semicolon,
    Tab,
    /// One or more consecutive spaces (or tabs).
    Whitespace,
}

impl Delimiter {
    /// Candidates in inference order.
    pub const INFERENCE_ORDER: [Delimiter; 4] = [
        Delimiter::Comma,
        Delimiter::Semicolon,
        Delimiter::Tab,
        Delimiter::Whitespace,
    ];

    fn split<'a>(&self, line: &'a str) -> Vec<&'a str> {
        match self {
            Delimiter::Comma => line.split(',').map(str::trim).collect(),
            Delimiter::Semicolon => line.split(';').map(str::trim).collect(),
            Delimiter::Tab => line.split('\t').map(str::trim).collect(),
            Delimiter::Whitespace => line.split_whitespace().collect(),
        }
    }

    fn as_str(&self) -> &'static str {
        match self {
            Delimiter::Comma => ",",
            Delimiter::Semicolon => ";",
            Delimiter::Tab => "\t",
            Delimiter::Whitespace => " ",
        }
    }

    pub fn from_char(c: char) -> Option<Delimiter> {
        match c {
            ',' => Some(Delimiter::Comma),
            ';' => Some(Delimiter::Semicolon),
            '\t' => Some(Delimiter::Tab),
            ' ' => Some(Delimiter::Whitespace),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ReadOptions {
    /// Forced delimiter; inferred from the first two rows when `None`.
    pub delimiter: Option<Delimiter>,
    /// Leading rows to drop before parsing (e.g. a header line).
    pub skip_rows: usize,
}

/// One run's outputs: `n_iters` rows by `n_outputs` columns, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct OutputMatrix {
    values: Vec<f64>,
    n_iters: usize,
    n_outputs: usize,
    output_names: Vec<String>,
    source: String,
}

impl OutputMatrix {
    /// Builds a matrix from rows. Output names default to `out0..out{k-1}`.
    pub fn from_rows(rows: Vec<Vec<f64>>, output_names: Option<Vec<String>>) -> Result<Self> {
        let n_iters = rows.len();
        if n_iters == 0 {
            return Err(Error::EmptyFile);
        }
        let n_outputs = rows[0].len();
        if n_outputs == 0 {
            return Err(Error::EmptyFile);
        }
        let mut values = Vec::with_capacity(n_iters * n_outputs);
        for (r, row) in rows.into_iter().enumerate() {
            if row.len() != n_outputs {
                return Err(Error::RaggedRows {
                    row: r + 1,
                    expected: n_outputs,
                    found: row.len(),
                });
            }
            for (c, v) in row.into_iter().enumerate() {
                if !v.is_finite() {
                    return Err(Error::NonNumericToken {
                        row: r + 1,
                        col: c + 1,
                        token: v.to_string(),
                    });
                }
                values.push(v);
            }
        }
        let output_names = match output_names {
            Some(names) if names.len() == n_outputs => names,
            Some(names) => {
                return Err(Error::Config(format!(
                    "{} output names given for {} columns",
                    names.len(),
                    n_outputs
                )))
            }
            None => default_output_names(n_outputs),
        };
        Ok(OutputMatrix {
            values,
            n_iters,
            n_outputs,
            output_names,
            source: String::new(),
        })
    }

    pub fn n_iters(&self) -> usize {
        self.n_iters
    }

    pub fn n_outputs(&self) -> usize {
        self.n_outputs
    }

    pub fn output_names(&self) -> &[String] {
        &self.output_names
    }

    pub fn set_output_names(&mut self, names: Vec<String>) -> Result<()> {
        if names.len() != self.n_outputs {
            return Err(Error::Config(format!(
                "{} output names given for {} columns",
                names.len(),
                self.n_outputs
            )));
        }
        self.output_names = names;
        Ok(())
    }

    /// Path the matrix was read from, empty for in-memory matrices.
    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn get(&self, iter: usize, output: usize) -> f64 {
        self.values[iter * self.n_outputs + output]
    }

    pub fn row(&self, iter: usize) -> &[f64] {
        &self.values[iter * self.n_outputs..(iter + 1) * self.n_outputs]
    }

    /// The time series of one output.
    pub fn column(&self, output: usize) -> Vec<f64> {
        (0..self.n_iters).map(|i| self.get(i, output)).collect()
    }
}

pub fn default_output_names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("out{i}")).collect()
}

/// Replications of one setup. All runs share the same shape.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSet {
    runs: Vec<OutputMatrix>,
    tag: String,
}

impl RunSet {
    pub fn new(runs: Vec<OutputMatrix>, tag: impl Into<String>) -> Result<Self> {
        let first = runs.first().ok_or(Error::EmptyRunSet)?;
        let (it, out) = (first.n_iters, first.n_outputs);
        for (index, m) in runs.iter().enumerate().skip(1) {
            if m.n_iters != it || m.n_outputs != out {
                return Err(Error::DimensionMismatch {
                    index,
                    expected_iters: it,
                    expected_outputs: out,
                    found_iters: m.n_iters,
                    found_outputs: m.n_outputs,
                });
            }
        }
        Ok(RunSet {
            runs,
            tag: tag.into(),
        })
    }

    pub fn runs(&self) -> &[OutputMatrix] {
        &self.runs
    }

    pub fn tag(&self) -> &str {
        &self.tag
    }

    pub fn len(&self) -> usize {
        self.runs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.runs.is_empty()
    }

    pub fn n_iters(&self) -> usize {
        self.runs[0].n_iters
    }

    pub fn n_outputs(&self) -> usize {
        self.runs[0].n_outputs
    }

    pub fn output_names(&self) -> &[String] {
        self.runs[0].output_names()
    }

    /// Renames the outputs of every run.
    pub fn set_output_names(&mut self, names: Vec<String>) -> Result<()> {
        for run in &mut self.runs {
            run.set_output_names(names.clone())?;
        }
        Ok(())
    }
}

/// Reads one output file, inferring the delimiter.
pub fn read_output_file(
    path: impl AsRef<Path>,
    delimiter: Option<Delimiter>,
) -> Result<OutputMatrix> {
    read_output_file_with(
        path,
        &ReadOptions {
            delimiter,
            skip_rows: 0,
        },
    )
}

pub fn read_output_file_with(path: impl AsRef<Path>, opts: &ReadOptions) -> Result<OutputMatrix> {
    let path = path.as_ref();
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
            return Err(Error::FileNotFound(path.to_path_buf()))
        }
        Err(e) => return Err(Error::Io(e)),
    };
    let mut m = parse_output(&text, opts)?;
    m.source = path.display().to_string();
    Ok(m)
}

/// Parses the contents of an output file.
pub fn parse_output(text: &str, opts: &ReadOptions) -> Result<OutputMatrix> {
    let mut lines: Vec<&str> = text
        .split('\n')
        .map(|l| l.strip_suffix('\r').unwrap_or(l))
        .skip(opts.skip_rows)
        .collect();
    while lines.last().is_some_and(|l| l.trim().is_empty()) {
        lines.pop();
    }
    if lines.is_empty() {
        return Err(Error::EmptyFile);
    }
    let delim = opts.delimiter.unwrap_or_else(|| infer_delimiter(&lines));

    let mut values = Vec::new();
    let mut n_outputs = 0;
    for (r, line) in lines.iter().enumerate() {
        let fields = delim.split(line);
        if r == 0 {
            n_outputs = fields.len();
        } else if fields.len() != n_outputs {
            return Err(Error::RaggedRows {
                row: r + 1,
                expected: n_outputs,
                found: fields.len(),
            });
        }
        for (c, tok) in fields.iter().enumerate() {
            values.push(parse_token(tok).ok_or_else(|| Error::NonNumericToken {
                row: r + 1,
                col: c + 1,
                token: tok.to_string(),
            })?);
        }
    }
    if n_outputs == 0 {
        return Err(Error::EmptyFile);
    }
    Ok(OutputMatrix {
        values,
        n_iters: lines.len(),
        n_outputs,
        output_names: default_output_names(n_outputs),
        source: String::new(),
    })
}

fn parse_token(tok: &str) -> Option<f64> {
    let v: f64 = tok.parse().ok()?;
    // rejects "nan", "inf" and overflowing literals alike
    v.is_finite().then_some(v)
}

/// Picks the first candidate that splits the first row into several fields
/// and agrees on the field count of the second row. If none agrees, the
/// first candidate that splits the first row wins (so validation reports the
/// ragged row). Single-column files fall back to whitespace splitting.
pub fn infer_delimiter(lines: &[&str]) -> Delimiter {
    let first = lines.first().copied().unwrap_or("");
    let splitting: Vec<Delimiter> = Delimiter::INFERENCE_ORDER
        .into_iter()
        .filter(|d| d.split(first).len() >= 2)
        .collect();
    let consistent = splitting.iter().copied().find(|d| match lines.get(1) {
        Some(second) => d.split(second).len() == d.split(first).len(),
        None => true,
    });
    consistent
        .or_else(|| splitting.first().copied())
        .unwrap_or(Delimiter::Whitespace)
}

/// Formats a value so that parsing it back yields the same bits: integers
/// below 2^53 print as integers, everything else with 17 significant digits.
pub fn format_exact(v: f64) -> String {
    if v.fract() == 0.0 && v.abs() < 9.007_199_254_740_992e15 {
        format!("{}", v as i64)
    } else {
        format!("{v:.16e}")
    }
}

pub fn write_output(m: &OutputMatrix, delimiter: Delimiter) -> String {
    let sep = delimiter.as_str();
    let mut out = String::new();
    for i in 0..m.n_iters {
        for (j, v) in m.row(i).iter().enumerate() {
            if j > 0 {
                out.push_str(sep);
            }
            let _ = write!(out, "{}", format_exact(*v));
        }
        out.push('\n');
    }
    out
}

pub fn write_output_file(
    m: &OutputMatrix,
    path: impl AsRef<Path>,
    delimiter: Delimiter,
) -> Result<()> {
    fs::write(path, write_output(m, delimiter))?;
    Ok(())
}

/// Reads every path into a [`RunSet`], preserving order. Read errors are
/// annotated with the offending path.
pub fn load_run_set<P: AsRef<Path>>(paths: &[P], tag: &str) -> Result<RunSet> {
    load_run_set_with(paths, tag, &ReadOptions::default())
}

pub fn load_run_set_with<P: AsRef<Path>>(
    paths: &[P],
    tag: &str,
    opts: &ReadOptions,
) -> Result<RunSet> {
    if paths.is_empty() {
        return Err(Error::EmptyRunSet);
    }
    let runs = paths
        .iter()
        .map(|p| read_output_file_with(p, opts).map_err(|e| e.in_file(p.as_ref())))
        .collect::<Result<Vec<_>>>()?;
    RunSet::new(runs, tag)
}

/// Expands a glob pattern into a sorted list of files.
pub fn expand_glob(pattern: &str) -> Result<Vec<PathBuf>> {
    let entries =
        glob::glob(pattern).map_err(|e| Error::Config(format!("bad glob {pattern:?}: {e}")))?;
    let mut paths = entries
        .filter_map(|e| e.ok())
        .filter(|p| p.is_file())
        .collect::<Vec<_>>();
    paths.sort();
    Ok(paths)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> Result<OutputMatrix> {
        parse_output(s, &ReadOptions::default())
    }

    #[test]
    fn minimal_comma_file() {
        let m = parse("1,2\n3,4\n").unwrap();
        assert_eq!((m.n_iters(), m.n_outputs()), (2, 2));
        assert_eq!(m.row(0), &[1.0, 2.0]);
        assert_eq!(m.row(1), &[3.0, 4.0]);
        assert_eq!(infer_delimiter(&["1,2", "3,4"]), Delimiter::Comma);
        assert_eq!(m.output_names(), &["out0", "out1"]);
    }

    #[test]
    fn single_cell() {
        let m = parse("5\n").unwrap();
        assert_eq!((m.n_iters(), m.n_outputs()), (1, 1));
        assert_eq!(m.get(0, 0), 5.0);
    }

    #[test]
    fn ragged_rows() {
        match parse("1,2\n3\n") {
            Err(Error::RaggedRows {
                row,
                expected,
                found,
            }) => {
                assert_eq!((row, expected, found), (2, 2, 1))
            }
            other => panic!("{other:?}"),
        }
        // every row is validated, not only the first two
        assert!(matches!(
            parse("1,2\n3,4\n5,6\n7\n"),
            Err(Error::RaggedRows { row: 4, .. })
        ));
    }

    #[test]
    fn delimiters_and_line_endings() {
        assert_eq!(parse("1;2\r\n3;4\r\n").unwrap().row(1), &[3.0, 4.0]);
        assert_eq!(parse("1\t2\n3\t4").unwrap().row(0), &[1.0, 2.0]);
        assert_eq!(parse("  1   2\n3 4\n\n\n").unwrap().row(1), &[3.0, 4.0]);
        assert_eq!(parse("1e-3,2.5E2\n").unwrap().row(0), &[1e-3, 250.0]);
        let forced = parse_output(
            "1 2\n",
            &ReadOptions {
                delimiter: Some(Delimiter::Comma),
                skip_rows: 0,
            },
        );
        assert!(matches!(forced, Err(Error::NonNumericToken { .. })));
    }

    #[test]
    fn rejects_non_numeric_and_non_finite() {
        match parse("a,b\n1,2\n") {
            Err(Error::NonNumericToken { row, col, token }) => {
                assert_eq!((row, col, token.as_str()), (1, 1, "a"))
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            parse("1,NaN\n"),
            Err(Error::NonNumericToken { col: 2, .. })
        ));
        assert!(matches!(parse("inf\n"), Err(Error::NonNumericToken { .. })));
        assert!(matches!(
            parse("1e400\n"),
            Err(Error::NonNumericToken { .. })
        ));
        assert!(matches!(
            parse("1,2\n3,\n"),
            Err(Error::NonNumericToken { row: 2, col: 2, .. })
        ));
    }

    #[test]
    fn skip_rows_drops_header() {
        let opts = ReadOptions {
            delimiter: None,
            skip_rows: 1,
        };
        let m = parse_output("prey,pred\n1,2\n3,4\n", &opts).unwrap();
        assert_eq!(m.n_iters(), 2);
    }

    #[test]
    fn empty_inputs() {
        assert!(matches!(parse(""), Err(Error::EmptyFile)));
        assert!(matches!(parse("\n\n"), Err(Error::EmptyFile)));
    }

    #[test]
    fn run_set_dimension_checks() {
        let dir = tempfile::tempdir().unwrap();
        let a = dir.path().join("a.txt");
        let b = dir.path().join("b.txt");
        let c = dir.path().join("c.txt");
        fs::write(&a, "1,2\n3,4\n5,6\n").unwrap();
        fs::write(&b, "1,2\n3,4\n5,7\n").unwrap();
        fs::write(&c, "1,2\n3,4\n5,6\n7,8\n").unwrap();
        let rs = load_run_set(&[&a, &b], "s").unwrap();
        assert_eq!(rs.len(), 2);
        assert_eq!(rs.runs()[1].get(2, 1), 7.0);
        assert!(matches!(
            load_run_set(&[&a, &c], "s"),
            Err(Error::DimensionMismatch { index: 1, .. })
        ));
        let empty: [&Path; 0] = [];
        assert!(matches!(load_run_set(&empty, "s"), Err(Error::EmptyRunSet)));
        let missing = dir.path().join("nope.txt");
        match load_run_set(&[&a, &missing], "s") {
            Err(Error::InFile { path, source }) => {
                assert_eq!(path, missing);
                assert!(matches!(*source, Error::FileNotFound(_)));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn inference_is_first_match() {
        // a comma appears, so comma wins even though spaces also split
        assert_eq!(infer_delimiter(&["1, 2", "3, 4"]), Delimiter::Comma);
        assert_eq!(infer_delimiter(&["1 2;3", "4 5;6"]), Delimiter::Semicolon);
        assert_eq!(infer_delimiter(&["7"]), Delimiter::Whitespace);
    }
}
