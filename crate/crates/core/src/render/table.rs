//! Backend-neutral tables rendered as LaTeX or aligned plain text.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::pgf::escape_latex;
use super::{format_pvalue, format_real};
use crate::error::{Error, Result};
use crate::stats::{histogram, is_constant, min_max, qq_points, DEFAULT_BINS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TableFormat {
    PlainText,
    Latex,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Align {
    Left,
    Right,
    Center,
}

impl Align {
    fn latex(self) -> char {
        match self {
            Align::Left => 'l',
            Align::Right => 'r',
            Align::Center => 'c',
        }
    }
}

/// Inline picture for a table cell, with a text stand-in for plain output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MiniPlot {
    pub pgf: String,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum Cell {
    Text(String),
    Number(f64),
    PValue { p: f64, emph: bool },
    MiniPlot(MiniPlot),
    Empty,
}

impl Cell {
    pub fn text(s: impl Into<String>) -> Self {
        Cell::Text(s.into())
    }

    fn plain(&self, sig: usize) -> String {
        match self {
            Cell::Text(s) => s.clone(),
            Cell::Number(v) => format_real(*v, sig),
            Cell::PValue { p, emph } => {
                let s = format_pvalue(*p);
                if *emph {
                    s + "*"
                } else {
                    s
                }
            }
            Cell::MiniPlot(m) => m.text.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn latex(&self, sig: usize) -> String {
        match self {
            Cell::Text(s) => escape_latex(s),
            Cell::Number(v) => format!("${}$", latex_number(&format_real(*v, sig))),
            Cell::PValue { p, emph } => {
                let s = format_pvalue(*p).replace('<', "$<$");
                if *emph {
                    format!("\\textbf{{{s}}}")
                } else {
                    s
                }
            }
            Cell::MiniPlot(m) => m.pgf.clone(),
            Cell::Empty => String::new(),
        }
    }
}

/// `1.23e5` → `1.23\cdot10^{5}` for math mode.
fn latex_number(s: &str) -> String {
    match s.split_once('e') {
        Some((m, e)) => format!("{m}\\cdot10^{{{e}}}"),
        None => s.to_string(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RowKind {
    Header,
    Body,
    /// A label spanning the whole row; only the first cell is shown.
    Group,
    Footer,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub kind: RowKind,
    pub cells: Vec<Cell>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableDoc {
    pub n_cols: usize,
    pub align: Vec<Align>,
    pub rows: Vec<Row>,
    pub notes: Vec<String>,
    pub caption: Option<String>,
    /// Fragment without a surrounding table environment, for merging.
    pub partial: bool,
    /// Significant digits for number cells.
    pub sig: usize,
}

impl TableDoc {
    pub fn new(align: Vec<Align>) -> Self {
        TableDoc {
            n_cols: align.len(),
            align,
            rows: Vec::new(),
            notes: Vec::new(),
            caption: None,
            partial: false,
            sig: 3,
        }
    }

    pub fn push(&mut self, kind: RowKind, cells: Vec<Cell>) -> Result<()> {
        if cells.len() != self.n_cols {
            return Err(Error::DegenerateInput(format!(
                "row has {} cells, table has {} columns",
                cells.len(),
                self.n_cols
            )));
        }
        self.rows.push(Row { kind, cells });
        Ok(())
    }

    pub fn push_group(&mut self, label: impl Into<String>) -> Result<()> {
        let mut cells = vec![Cell::Empty; self.n_cols];
        cells[0] = Cell::Text(label.into());
        self.push(RowKind::Group, cells)
    }

    /// Rows of the given kind.
    pub fn rows_of(&self, kind: RowKind) -> impl Iterator<Item = &Row> {
        self.rows.iter().filter(move |r| r.kind == kind)
    }

    /// Appends the non-header rows and the notes of `other`.
    pub fn merge(&mut self, other: &TableDoc) -> Result<()> {
        if other.n_cols != self.n_cols {
            return Err(Error::DegenerateInput(format!(
                "cannot merge a {}-column table into a {}-column table",
                other.n_cols, self.n_cols
            )));
        }
        self.rows.extend(
            other
                .rows
                .iter()
                .filter(|r| r.kind != RowKind::Header)
                .cloned(),
        );
        for n in &other.notes {
            if !self.notes.contains(n) {
                self.notes.push(n.clone());
            }
        }
        Ok(())
    }

    pub fn render(&self, format: TableFormat) -> String {
        match format {
            TableFormat::PlainText => self.to_plain(),
            TableFormat::Latex => self.to_latex(),
        }
    }

    pub fn to_plain(&self) -> String {
        let cells: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| r.cells.iter().map(|c| c.plain(self.sig)).collect())
            .collect();
        let mut widths = vec![0; self.n_cols];
        for (row, strs) in self.rows.iter().zip(&cells) {
            if row.kind == RowKind::Group {
                continue;
            }
            for (w, s) in widths.iter_mut().zip(strs) {
                *w = (*w).max(s.chars().count());
            }
        }
        let total = widths.iter().sum::<usize>() + 2 * self.n_cols.saturating_sub(1);
        let mut out = String::new();
        if let Some(c) = &self.caption {
            let _ = writeln!(out, "{c}");
        }
        let mut prev = None;
        for (row, strs) in self.rows.iter().zip(&cells) {
            if prev == Some(RowKind::Header) && row.kind != RowKind::Header
                || prev.is_some_and(|k| k != RowKind::Footer) && row.kind == RowKind::Footer
            {
                let _ = writeln!(out, "{}", "-".repeat(total));
            }
            if row.kind == RowKind::Group {
                let _ = writeln!(out, "{}", strs[0]);
            } else {
                let line: Vec<String> = strs
                    .iter()
                    .zip(&widths)
                    .zip(&self.align)
                    .map(|((s, &w), a)| pad(s, w, *a))
                    .collect();
                let _ = writeln!(out, "{}", line.join("  ").trim_end());
            }
            prev = Some(row.kind);
        }
        for n in &self.notes {
            let _ = writeln!(out, "{n}");
        }
        out
    }

    pub fn to_latex(&self) -> String {
        let mut out = String::new();
        if !self.partial {
            out.push_str("\\begin{table}[htbp]\n\\centering\n");
            if let Some(c) = &self.caption {
                let _ = writeln!(out, "\\caption{{{}}}", escape_latex(c));
            }
            let spec: String = self.align.iter().map(|a| a.latex()).collect();
            let _ = writeln!(out, "\\begin{{tabular}}{{{spec}}}\n\\hline");
        }
        let mut prev = None;
        for row in &self.rows {
            if prev == Some(RowKind::Header) && row.kind != RowKind::Header
                || prev.is_some_and(|k| k != RowKind::Footer) && row.kind == RowKind::Footer
            {
                out.push_str("\\hline\n");
            }
            if row.kind == RowKind::Group {
                let _ = writeln!(
                    out,
                    "\\multicolumn{{{}}}{{l}}{{\\emph{{{}}}}} \\\\",
                    self.n_cols,
                    row.cells[0].latex(self.sig)
                );
            } else {
                let cells: Vec<String> = row.cells.iter().map(|c| c.latex(self.sig)).collect();
                let _ = writeln!(out, "{} \\\\", cells.join(" & "));
            }
            prev = Some(row.kind);
        }
        if !self.partial {
            out.push_str("\\hline\n\\end{tabular}\n");
            for n in &self.notes {
                let _ = writeln!(out, "\\par\\footnotesize {}", escape_latex(n));
            }
            out.push_str("\\end{table}\n");
        } else {
            for n in &self.notes {
                let _ = writeln!(out, "% {}", n.replace('\n', " "));
            }
        }
        out
    }
}

fn pad(s: &str, w: usize, a: Align) -> String {
    match a {
        Align::Left => format!("{s:<w$}"),
        Align::Right => format!("{s:>w$}"),
        Align::Center => format!("{s:^w$}"),
    }
}

/// Mini-plot bounding box in cm.
pub const MINI_W: f64 = 1.2;
pub const MINI_H: f64 = 0.4;

/// Inline histogram: one filled bar per non-empty bin, scaled to the box.
pub fn mini_hist(sample: &[f64]) -> Result<MiniPlot> {
    let h = histogram(sample, DEFAULT_BINS)?;
    let max = *h.counts.iter().max().unwrap_or(&1) as f64;
    let bw = MINI_W / h.counts.len() as f64;
    let mut pgf = String::from("\\begin{tikzpicture}[baseline=0pt]");
    let _ = write!(pgf, "\\path (0,0) rectangle ({MINI_W:.3},{MINI_H:.3});");
    for (i, &c) in h.counts.iter().enumerate() {
        if c == 0 {
            continue;
        }
        let _ = write!(
            pgf,
            "\\fill[gray] ({:.3},0) rectangle ({:.3},{:.3});",
            i as f64 * bw,
            (i + 1) as f64 * bw,
            c as f64 / max * MINI_H
        );
    }
    pgf.push_str("\\end{tikzpicture}");

    const BLOCKS: [char; 8] = ['▁', '▂', '▃', '▄', '▅', '▆', '▇', '█'];
    let text = h
        .counts
        .iter()
        .map(|&c| {
            if c == 0 {
                ' '
            } else {
                BLOCKS[((c as f64 / max) * 7.0).round() as usize]
            }
        })
        .collect();
    Ok(MiniPlot { pgf, text })
}

/// Inline QQ plot: one dot per observation, scaled to the box.
pub fn mini_qq(sample: &[f64]) -> Result<MiniPlot> {
    let pts = qq_points(sample)?;
    let th: Vec<f64> = pts.iter().map(|p| p.0).collect();
    let em: Vec<f64> = pts.iter().map(|p| p.1).collect();
    let (tl, thh) = min_max(&th);
    let (el, eh) = min_max(&em);
    let scale = |v: f64, lo: f64, hi: f64, len: f64| {
        if hi > lo {
            (v - lo) / (hi - lo) * len
        } else {
            len / 2.0
        }
    };
    let mut pgf = String::from("\\begin{tikzpicture}[baseline=0pt]");
    let _ = write!(pgf, "\\path (0,0) rectangle ({MINI_W:.3},{MINI_H:.3});");
    for &(t, e) in &pts {
        let _ = write!(
            pgf,
            "\\fill ({:.3},{:.3}) circle[radius=0.012];",
            scale(t, tl, thh, MINI_W),
            scale(e, el, eh, MINI_H)
        );
    }
    pgf.push_str("\\end{tikzpicture}");
    let text = if is_constant(sample) {
        "qq r=n/a".to_string()
    } else {
        format!("qq r={:.3}", correlation(&th, &em))
    };
    Ok(MiniPlot { pgf, text })
}

fn correlation(a: &[f64], b: &[f64]) -> f64 {
    let (ma, mb) = (crate::stats::mean(a), crate::stats::mean(b));
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma).powi(2);
        sbb += (y - mb).powi(2);
    }
    sab / (saa * sbb).sqrt()
}
