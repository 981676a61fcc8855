//! Figure builders for output dynamics, distributions and comparisons.

use serde::{Deserialize, Serialize};

use super::figure::{Dash, FigureDoc, FigureGrid, Layer, Panel, Style};
use super::format_pvalue;
use super::{confidence_percent, format_real};
use crate::error::{Error, Result};
use crate::ingest::RunSet;
use crate::numerics::normal_quantile;
use crate::stats::{
    confidence_interval, ecdf, histogram, is_constant, kde, mean, min_max, moving_average,
    qq_points, quantile, shapiro_wilk, DEFAULT_BINS,
};

const PAD: f64 = 0.04;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", content = "w", rename_all = "snake_case")]
pub enum PlotMode {
    Superimposed,
    /// Per-iteration minimum and maximum across runs with the band filled.
    Extremes,
    /// Per-run centered moving average with half-window `w`.
    MovingAvg(usize),
}

impl PlotMode {
    fn label(self) -> String {
        match self {
            PlotMode::Superimposed => "superimposed".into(),
            PlotMode::Extremes => "extremes".into(),
            PlotMode::MovingAvg(w) => format!("moving average, w={w}"),
        }
    }
}

/// Output dynamics of one output column across runs.
///
/// `runs` selects a subset of runs by index; the default is all of them.
pub fn output_plot(
    rs: &RunSet,
    output: usize,
    mode: PlotMode,
    runs: Option<&[usize]>,
) -> Result<FigureDoc> {
    if output >= rs.n_outputs() {
        return Err(Error::OutputOutOfRange {
            index: output,
            n_outputs: rs.n_outputs(),
        });
    }
    let all: Vec<usize> = (0..rs.len()).collect();
    let selected = runs.unwrap_or(&all);
    if selected.is_empty() {
        return Err(Error::EmptyRunSet);
    }
    if let Some(&bad) = selected.iter().find(|&&r| r >= rs.len()) {
        return Err(Error::IndexOutOfRange {
            index: bad,
            len: rs.len(),
        });
    }
    let name = &rs.output_names()[output];
    let mut fig = FigureDoc::new(
        format!("{}: {name} ({})", rs.tag(), mode.label()),
        "iteration",
        name.clone(),
    );
    let series: Vec<Vec<f64>> = selected
        .iter()
        .map(|&r| rs.runs()[r].column(output))
        .collect();
    let iters: Vec<f64> = (0..rs.n_iters()).map(|i| i as f64).collect();
    let line = |ys: &[f64]| {
        iters
            .iter()
            .copied()
            .zip(ys.iter().copied())
            .collect::<Vec<_>>()
    };

    match mode {
        PlotMode::Superimposed | PlotMode::MovingAvg(0) => {
            for (k, (s, &r)) in series.iter().zip(selected).enumerate() {
                fig.push(Layer::Polyline {
                    points: line(s),
                    style: Style::series(k),
                    label: Some(format!("run {r}")),
                })?;
            }
        }
        PlotMode::MovingAvg(w) => {
            for (k, (s, &r)) in series.iter().zip(selected).enumerate() {
                fig.push(Layer::Polyline {
                    points: line(&moving_average(s, w)),
                    style: Style::series(k),
                    label: Some(format!("run {r}")),
                })?;
            }
        }
        PlotMode::Extremes => {
            let lo: Vec<f64> = (0..iters.len())
                .map(|i| series.iter().map(|s| s[i]).fold(f64::INFINITY, f64::min))
                .collect();
            let hi: Vec<f64> = (0..iters.len())
                .map(|i| {
                    series
                        .iter()
                        .map(|s| s[i])
                        .fold(f64::NEG_INFINITY, f64::max)
                })
                .collect();
            fig.push(Layer::Band {
                x: iters.clone(),
                lo: lo.clone(),
                hi: hi.clone(),
                style: Style::series(0).with_opacity(0.3),
            })?;
            fig.push(Layer::Polyline {
                points: line(&lo),
                style: Style::series(0),
                label: Some("min".into()),
            })?;
            fig.push(Layer::Polyline {
                points: line(&hi),
                style: Style::series(0),
                label: Some("max".into()),
            })?;
        }
    }
    fig.fit_ranges(PAD);
    Ok(fig)
}

fn notice(title: String, e: &Error) -> Panel {
    Panel::Notice {
        title,
        text: format!("not available: {e}"),
    }
}

/// Text shown on the density panel.
pub fn density_annotation(sample: &[f64], alpha: f64) -> String {
    let level = confidence_percent(alpha);
    let ci = match confidence_interval(sample, alpha) {
        Ok((lo, hi)) => format!("[{}, {}]", format_real(lo, 3), format_real(hi, 3)),
        Err(_) => "n/a".into(),
    };
    let sw = match shapiro_wilk(sample) {
        Ok(r) => format_pvalue(r.p),
        Err(_) => "n/a".into(),
    };
    format!(
        "mean = {}\n{level}% CI = {ci}\nSW p = {sw}",
        format_real(mean(sample), 3)
    )
}

fn density_panel(tag: &str, fm: &str, sample: &[f64], alpha: f64) -> Result<FigureDoc> {
    let d = kde(sample)?;
    let mut fig = FigureDoc::new(format!("{tag}: PDF"), fm, "density");
    let peak = d.density.iter().copied().fold(0.0, f64::max);
    if let Ok((lo, hi)) = confidence_interval(sample, alpha) {
        fig.push(Layer::Band {
            x: vec![lo, hi],
            lo: vec![0.0, 0.0],
            hi: vec![peak, peak],
            style: Style::series(1).with_opacity(0.2),
        })?;
    }
    fig.push(Layer::polyline(
        d.grid
            .iter()
            .copied()
            .zip(d.density.iter().copied())
            .collect(),
        Style::series(0).with_width(1.5),
    ))?;
    let m = mean(sample);
    fig.push(Layer::polyline(
        vec![(m, 0.0), (m, peak)],
        Style::black().with_dash(Dash::Dashed),
    ))?;
    fig.fit_ranges(PAD);
    fig.annotate_top_left(density_annotation(sample, alpha));
    Ok(fig)
}

/// Histogram drawn as a filled staircase band over the bin edges.
fn histogram_panel(tag: &str, fm: &str, sample: &[f64]) -> Result<FigureDoc> {
    let h = histogram(sample, DEFAULT_BINS)?;
    let mut x = Vec::with_capacity(2 * h.counts.len());
    let mut hi = Vec::with_capacity(2 * h.counts.len());
    for (i, &c) in h.counts.iter().enumerate() {
        x.extend([h.edges[i], h.edges[i + 1]]);
        hi.extend([c as f64, c as f64]);
    }
    let mut fig = FigureDoc::new(format!("{tag}: histogram"), fm, "count");
    fig.push(Layer::Band {
        lo: vec![0.0; x.len()],
        x,
        hi,
        style: Style::series(0).with_opacity(0.6),
    })?;
    fig.fit_ranges(PAD);
    Ok(fig)
}

/// Normal QQ plot with a reference line through the quartile pairs.
fn qq_panel(tag: &str, fm: &str, sample: &[f64]) -> Result<FigureDoc> {
    if is_constant(sample) {
        return Err(Error::DegenerateSample);
    }
    let pts = qq_points(sample)?;
    let z1 = normal_quantile(0.25)?;
    let z3 = normal_quantile(0.75)?;
    let (q1, q3) = (quantile(sample, 0.25), quantile(sample, 0.75));
    let slope = (q3 - q1) / (z3 - z1);
    let line = |z: f64| q1 + slope * (z - z1);
    let (t0, t1) = (pts[0].0, pts[pts.len() - 1].0);
    let mut fig = FigureDoc::new(format!("{tag}: QQ"), "normal quantile", fm);
    fig.push(Layer::polyline(
        vec![(t0, line(t0)), (t1, line(t1))],
        Style::black().with_dash(Dash::Dashed),
    ))?;
    fig.push(Layer::Scatter {
        points: pts,
        style: Style::series(0),
    })?;
    fig.fit_ranges(PAD);
    Ok(fig)
}

/// Density, histogram and QQ panels of one focal measure, one row per setup.
/// Panels whose statistics fail become notices.
pub fn dist_plot_per_fm(
    samples: &[(String, Vec<f64>)],
    fm: &str,
    alpha: f64,
) -> Result<FigureGrid> {
    if samples.is_empty() {
        return Err(Error::DegenerateInput("no samples to plot".into()));
    }
    let mut panels = Vec::with_capacity(3 * samples.len());
    for (tag, s) in samples {
        if s.is_empty() {
            return Err(Error::TooFewObservations { needed: 1, got: 0 });
        }
        panels.push(
            density_panel(tag, fm, s, alpha)
                .map_or_else(|e| notice(format!("{tag}: PDF"), &e), Panel::Figure),
        );
        panels.push(
            histogram_panel(tag, fm, s)
                .map_or_else(|e| notice(format!("{tag}: histogram"), &e), Panel::Figure),
        );
        panels.push(
            qq_panel(tag, fm, s).map_or_else(|e| notice(format!("{tag}: QQ"), &e), Panel::Figure),
        );
    }
    Ok(FigureGrid {
        title: fm.to_string(),
        n_cols: 3,
        panels,
    })
}

/// Overlaid density estimates and empirical CDFs of one focal measure
/// across implementations, on shared x ranges.
pub fn stats_compare_plot(
    samples: &[(String, Vec<f64>)],
    fm: &str,
) -> Result<(FigureDoc, FigureDoc)> {
    if samples.len() < 2 {
        return Err(Error::DegenerateInput(format!(
            "need at least 2 implementations, got {}",
            samples.len()
        )));
    }
    let mut pdf = FigureDoc::new(format!("{fm}: PDF"), fm, "density");
    let mut cdf = FigureDoc::new(format!("{fm}: CDF"), fm, "F");
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for (_, s) in samples {
        if s.is_empty() {
            return Err(Error::TooFewObservations { needed: 1, got: 0 });
        }
        let (a, b) = min_max(s);
        lo = lo.min(a);
        hi = hi.max(b);
    }
    for (k, (tag, s)) in samples.iter().enumerate() {
        let d = kde(s)?;
        lo = lo.min(d.grid[0]);
        hi = hi.max(d.grid[d.grid.len() - 1]);
        pdf.push(Layer::Polyline {
            points: d
                .grid
                .iter()
                .copied()
                .zip(d.density.iter().copied())
                .collect(),
            style: Style::series(k),
            label: Some(tag.clone()),
        })?;
    }
    for (k, (tag, s)) in samples.iter().enumerate() {
        let e = ecdf(s)?;
        let mut points = vec![(lo, 0.0)];
        points.extend(e.x.iter().copied().zip(e.f.iter().copied()));
        points.push((hi, 1.0));
        cdf.push(Layer::Step {
            points,
            style: Style::series(k),
            label: Some(tag.clone()),
        })?;
    }
    pdf.fit_ranges(PAD);
    cdf.fit_ranges(PAD);
    cdf.x.min = pdf.x.min;
    cdf.x.max = pdf.x.max;
    let legend = |fig: &mut FigureDoc| {
        let text: Vec<String> = samples
            .iter()
            .enumerate()
            .map(|(k, (t, _))| format!("{} {t}", series_marker(k)))
            .collect();
        fig.annotate_top_left(text.join("\n"));
    };
    legend(&mut pdf);
    legend(&mut cdf);
    Ok((pdf, cdf))
}

/// Short text token naming the style of series `k` in legends.
fn series_marker(k: usize) -> String {
    const NAMES: [&str; 8] = [
        "blue", "orange", "red", "teal", "green", "yellow", "purple", "brown",
    ];
    let s = Style::series(k);
    let dash = match s.dash {
        Dash::Solid => "",
        Dash::Dashed => " dashed",
        Dash::Dotted => " dotted",
        Dash::DashDot => " dash-dot",
    };
    format!("[{}{dash}]", NAMES[k % NAMES.len()])
}
