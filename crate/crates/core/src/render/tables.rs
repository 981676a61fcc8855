//! Table builders for summary statistics, distributional analysis and
//! comparison p-values.

use serde::{Deserialize, Serialize};

use super::table::{mini_hist, mini_qq, Align, Cell, RowKind, TableDoc};
use super::{confidence_percent, format_real};
use crate::compare::CompareResult;
use crate::error::{Error, Result};
use crate::focal::{FmMatrix, FmName};
use crate::stats::{Stat, SummaryStats};

fn stat_cell(s: &Stat<f64>) -> Cell {
    match s {
        Stat::Value(v) => Cell::Number(*v),
        Stat::Undefined(_) => Cell::text("n/a"),
    }
}

fn sw_cell(st: &SummaryStats) -> Cell {
    match st.sw_p() {
        Some(p) => Cell::PValue { p, emph: false },
        None => Cell::text("n/a"),
    }
}

fn undefined_notes(label: &str, st: &SummaryStats, notes: &mut Vec<String>) {
    let fields: [(&str, Option<&str>); 4] = [
        ("variance", st.variance.reason()),
        ("CI", st.ci.reason()),
        ("SW p", st.shapiro_wilk.reason()),
        ("skewness", st.skewness.reason()),
    ];
    for (field, reason) in fields {
        if let Some(r) = reason {
            notes.push(format!("{label}: {field} undefined ({r})"));
        }
    }
}

fn header(labels: &[&str]) -> Vec<Cell> {
    labels.iter().map(|l| Cell::text(*l)).collect()
}

/// One row per focal measure with mean, variance, CI, SW p and skewness.
pub fn stats_table_per_setup(
    tag: &str,
    fm_names: &[FmName],
    stats: &[SummaryStats],
) -> Result<TableDoc> {
    if fm_names.len() != stats.len() {
        return Err(Error::DegenerateInput(format!(
            "{} names for {} statistics",
            fm_names.len(),
            stats.len()
        )));
    }
    let mut t = TableDoc::new(vec![
        Align::Left,
        Align::Right,
        Align::Right,
        Align::Right,
        Align::Right,
        Align::Right,
    ]);
    let level = confidence_percent(
        stats
            .first()
            .map_or(crate::stats::DEFAULT_ALPHA, |s| s.alpha),
    );
    t.caption = Some(format!("Summary statistics, setup {tag}"));
    let ci_head = format!("{level}% CI");
    t.push(
        RowKind::Header,
        header(&["FM", "mean", "variance", &ci_head, "SW p", "skewness"]),
    )?;
    for (name, st) in fm_names.iter().zip(stats) {
        let ci = match &st.ci {
            Stat::Value(iv) => Cell::Text(format!(
                "[{}, {}]",
                format_real(iv.lo, t.sig),
                format_real(iv.hi, t.sig)
            )),
            Stat::Undefined(_) => Cell::text("n/a"),
        };
        t.push(
            RowKind::Body,
            vec![
                Cell::Text(name.label()),
                Cell::Number(st.mean),
                stat_cell(&st.variance),
                ci,
                sw_cell(st),
                stat_cell(&st.skewness),
            ],
        )?;
        undefined_notes(&name.label(), st, &mut t.notes);
    }
    Ok(t)
}

fn dist_columns() -> Vec<Align> {
    vec![
        Align::Left,
        Align::Right,
        Align::Right,
        Align::Right,
        Align::Right,
        Align::Center,
        Align::Center,
    ]
}

fn dist_row(label: String, sample: &[f64], st: &SummaryStats) -> Result<Vec<Cell>> {
    let hist = mini_hist(sample).map_or_else(|_| Cell::text("n/a"), Cell::MiniPlot);
    let qq = mini_qq(sample).map_or_else(|_| Cell::text("n/a"), Cell::MiniPlot);
    Ok(vec![
        Cell::Text(label),
        Cell::Number(st.mean),
        stat_cell(&st.variance),
        sw_cell(st),
        stat_cell(&st.skewness),
        hist,
        qq,
    ])
}

/// Partial table for one focal measure: a group row naming it, then one
/// row per setup. Partials for several focal measures can be merged.
pub fn dist_table_per_fm(
    per_setup: &[(String, Vec<f64>)],
    fm: &str,
    alpha: f64,
) -> Result<TableDoc> {
    let mut t = TableDoc::new(dist_columns());
    t.partial = true;
    t.push(
        RowKind::Header,
        header(&[
            "setup", "mean", "variance", "SW p", "skewness", "hist.", "QQ",
        ]),
    )?;
    t.push_group(fm)?;
    for (tag, s) in per_setup {
        let st = SummaryStats::of(s, alpha)?;
        t.push(RowKind::Body, dist_row(tag.clone(), s, &st)?)?;
        undefined_notes(&format!("{fm} / {tag}"), &st, &mut t.notes);
    }
    Ok(t)
}

/// Distributional table of every focal measure of one setup.
pub fn dist_table_per_setup(fm: &FmMatrix, stats: &[SummaryStats]) -> Result<TableDoc> {
    if stats.len() != fm.m() {
        return Err(Error::DegenerateInput(format!(
            "{} statistics for {} focal measures",
            stats.len(),
            fm.m()
        )));
    }
    let mut t = TableDoc::new(dist_columns());
    t.caption = Some(format!("Distributional analysis, setup {}", fm.tag()));
    t.push(
        RowKind::Header,
        header(&["FM", "mean", "variance", "SW p", "skewness", "hist.", "QQ"]),
    )?;
    for (j, (name, st)) in fm.fm_names().iter().zip(stats).enumerate() {
        t.push(RowKind::Body, dist_row(name.label(), &fm.column(j), st)?)?;
        undefined_notes(&name.label(), st, &mut t.notes);
    }
    Ok(t)
}

/// One row of a comparison table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareRow {
    /// Rows sharing a group are printed under one group heading.
    pub group: Option<String>,
    /// Row label; defaults to the compared tags joined by " vs ".
    pub label: Option<String>,
    pub result: CompareResult,
}

impl CompareRow {
    pub fn new(result: CompareResult) -> Self {
        CompareRow {
            group: None,
            label: None,
            result,
        }
    }

    pub fn in_group(mut self, group: impl Into<String>) -> Self {
        self.group = Some(group.into());
        self
    }

    fn label(&self) -> String {
        self.label
            .clone()
            .unwrap_or_else(|| self.result.tags.join(" vs "))
    }
}

/// p-values of one or more comparisons: a label column plus one column per
/// focal measure, failed tests in bold.
pub fn stats_compare_table(rows: &[CompareRow]) -> Result<TableDoc> {
    let first = rows
        .first()
        .ok_or_else(|| Error::DegenerateInput("no comparison results".into()))?;
    let names = &first.result.fm_names;
    if let Some(bad) = rows.iter().find(|r| &r.result.fm_names != names) {
        return Err(Error::FmNameMismatch(bad.label()));
    }
    let m = names.len();
    let mut align = vec![Align::Left];
    align.extend(std::iter::repeat_n(Align::Right, m));
    let mut t = TableDoc::new(align);
    t.caption = Some("p-values of the comparison tests".into());
    let mut head = vec![Cell::text("comparison")];
    head.extend(names.iter().map(|n| Cell::Text(n.label())));
    t.push(RowKind::Header, head)?;

    let mut current: Option<&str> = None;
    for row in rows {
        if let Some(g) = row.group.as_deref() {
            if current != Some(g) {
                t.push_group(g)?;
                current = Some(g);
            }
        }
        let mut cells = vec![Cell::Text(row.label())];
        cells.extend(
            row.result
                .p_values
                .iter()
                .zip(&row.result.failed)
                .map(|(&p, &f)| Cell::PValue { p, emph: f }),
        );
        t.push(RowKind::Body, cells)?;
    }

    let mut alphas: Vec<f64> = rows.iter().map(|r| r.result.alpha).collect();
    alphas.dedup();
    for a in alphas {
        t.notes.push(format!(
            "Bold (plain text: *): p < {a}. Bonferroni-adjusted threshold for {m} tests: {}.",
            format_real(a / m as f64, 3)
        ));
    }
    let tests: Vec<&str> = {
        let mut v: Vec<&str> = rows
            .iter()
            .flat_map(|r| r.result.tests_used.iter().map(String::as_str))
            .collect();
        v.sort_unstable();
        v.dedup();
        v
    };
    t.notes.push(format!("Tests: {}.", tests.join(", ")));
    Ok(t)
}
