//! Figures (SVG, PGF) and tables (LaTeX, plain text).
//!
//! Builders produce backend-neutral [`FigureDoc`], [`FigureGrid`] and
//! [`TableDoc`] values whose layer data are the statistics themselves;
//! emitters only map them onto the page. Output bytes depend on the input
//! alone.

mod figure;
mod pgf;
mod plots;
mod svg;
mod table;
mod tables;

use std::fs;
use std::path::Path;

pub use figure::{Anchor, Axis, Dash, FigureDoc, FigureGrid, Layer, Panel, Style, PALETTE};
pub use pgf::escape_latex;
pub use plots::{density_annotation, dist_plot_per_fm, output_plot, stats_compare_plot, PlotMode};
pub use table::{mini_hist, mini_qq, Align, Cell, MiniPlot, Row, RowKind, TableDoc, TableFormat};
pub use tables::{
    dist_table_per_fm, dist_table_per_setup, stats_compare_table, stats_table_per_setup, CompareRow,
};

use crate::error::Result;

pub const DEFAULT_SIG: usize = 3;
pub const DEFAULT_P_FLOOR: f64 = 0.001;

/// Rounds to `sig` significant digits. Scientific notation (`1.23e5`) is
/// used when the decimal exponent is at least `sig` or below -3.
pub fn format_real(x: f64, sig: usize) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    if x == 0.0 {
        return "0".into();
    }
    let sig = sig.max(1);
    let sci = format!("{:.*e}", sig - 1, x);
    let exp: i32 = sci
        .rsplit_once('e')
        .and_then(|(_, e)| e.parse().ok())
        .unwrap_or(0);
    if exp >= sig as i32 || exp < -3 {
        sci
    } else {
        let decimals = (sig as i32 - 1 - exp).max(0) as usize;
        format!("{x:.decimals$}")
    }
}

/// Three decimals, or `<0.001` below the floor.
pub fn format_pvalue(p: f64) -> String {
    format_pvalue_with(p, DEFAULT_P_FLOOR)
}

pub fn format_pvalue_with(p: f64, floor: f64) -> String {
    if p < floor {
        format!("<{floor}")
    } else {
        format!("{p:.3}")
    }
}

/// Confidence level of `alpha` as a percentage, e.g. `95` or `99.9`.
pub fn confidence_percent(alpha: f64) -> String {
    let v = ((1.0 - alpha) * 100.0 * 1e6).round() / 1e6;
    format!("{v}")
}

/// Something the figure backends can draw.
pub trait Render {
    fn to_svg(&self) -> String;
    fn to_pgf(&self) -> String;
}

impl Render for FigureDoc {
    fn to_svg(&self) -> String {
        svg::figure(self)
    }

    fn to_pgf(&self) -> String {
        pgf::figure(self)
    }
}

impl Render for FigureGrid {
    fn to_svg(&self) -> String {
        svg::grid(self)
    }

    fn to_pgf(&self) -> String {
        pgf::grid(self)
    }
}

pub fn emit_svg(fig: &impl Render, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, fig.to_svg())?;
    Ok(())
}

pub fn emit_pgf(fig: &impl Render, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, fig.to_pgf())?;
    Ok(())
}

pub fn emit_table(tab: &TableDoc, format: TableFormat, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, tab.render(format))?;
    Ok(())
}
