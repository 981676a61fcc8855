//! Backend-neutral figure model.
//!
//! A [`FigureDoc`] holds data-coordinate layers plus axis ranges; backends
//! only apply the affine map from the ranges to the page.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Eight distinguishable colors (RGB), cycled across series.
pub const PALETTE: [(u8, u8, u8); 8] = [
    (0x4e, 0x79, 0xa7),
    (0xf2, 0x8e, 0x2b),
    (0xe1, 0x57, 0x59),
    (0x76, 0xb7, 0xb2),
    (0x59, 0xa1, 0x4f),
    (0xed, 0xc9, 0x48),
    (0xb0, 0x7a, 0xa1),
    (0x9c, 0x75, 0x5f),
];

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Dash {
    #[default]
    Solid,
    Dashed,
    Dotted,
    DashDot,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Style {
    /// Index into [`PALETTE`]; `None` draws in black.
    pub color: Option<usize>,
    pub dash: Dash,
    /// Stroke width in points.
    pub width: f64,
    /// Fill opacity for bands and markers.
    pub opacity: f64,
}

impl Default for Style {
    fn default() -> Self {
        Style {
            color: None,
            dash: Dash::Solid,
            width: 1.0,
            opacity: 1.0,
        }
    }
}

impl Style {
    /// Style of the `i`-th series: the palette cycles, and each full cycle
    /// switches to the next dash pattern.
    pub fn series(i: usize) -> Self {
        const DASHES: [Dash; 4] = [Dash::Solid, Dash::Dashed, Dash::Dotted, Dash::DashDot];
        Style {
            color: Some(i % PALETTE.len()),
            dash: DASHES[(i / PALETTE.len()) % DASHES.len()],
            ..Style::default()
        }
    }

    pub fn black() -> Self {
        Style::default()
    }

    pub fn with_dash(mut self, dash: Dash) -> Self {
        self.dash = dash;
        self
    }

    pub fn with_opacity(mut self, opacity: f64) -> Self {
        self.opacity = opacity;
        self
    }

    pub fn with_width(mut self, width: f64) -> Self {
        self.width = width;
        self
    }

    pub fn rgb(&self) -> (u8, u8, u8) {
        self.color.map_or((0, 0, 0), |c| PALETTE[c % PALETTE.len()])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Anchor {
    TopLeft,
    TopRight,
    Center,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Layer {
    Polyline {
        points: Vec<(f64, f64)>,
        style: Style,
        label: Option<String>,
    },
    /// Filled region between `lo` and `hi` over `x`.
    Band {
        x: Vec<f64>,
        lo: Vec<f64>,
        hi: Vec<f64>,
        style: Style,
    },
    Scatter {
        points: Vec<(f64, f64)>,
        style: Style,
    },
    /// Right-continuous step function: horizontal from each point to the
    /// next x, then vertical.
    Step {
        points: Vec<(f64, f64)>,
        style: Style,
        label: Option<String>,
    },
    Text {
        x: f64,
        y: f64,
        text: String,
        anchor: Anchor,
    },
}

impl Layer {
    pub fn polyline(points: Vec<(f64, f64)>, style: Style) -> Self {
        Layer::Polyline {
            points,
            style,
            label: None,
        }
    }

    /// Every coordinate the layer places on the page.
    pub fn coords(&self) -> Vec<(f64, f64)> {
        match self {
            Layer::Polyline { points, .. }
            | Layer::Scatter { points, .. }
            | Layer::Step { points, .. } => points.clone(),
            Layer::Band { x, lo, hi, .. } => x
                .iter()
                .zip(lo)
                .map(|(&a, &b)| (a, b))
                .chain(x.iter().zip(hi).map(|(&a, &b)| (a, b)))
                .collect(),
            Layer::Text { x, y, .. } => vec![(*x, *y)],
        }
    }

    fn check(&self) -> Result<()> {
        if let Layer::Band { x, lo, hi, .. } = self {
            if x.len() != lo.len() || x.len() != hi.len() {
                return Err(Error::DegenerateInput(
                    "band arrays differ in length".into(),
                ));
            }
        }
        if self
            .coords()
            .iter()
            .any(|(x, y)| !x.is_finite() || !y.is_finite())
        {
            return Err(Error::DegenerateInput("non-finite layer coordinate".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub label: String,
    pub min: f64,
    pub max: f64,
}

impl Axis {
    pub fn new(label: impl Into<String>) -> Self {
        Axis {
            label: label.into(),
            min: 0.0,
            max: 1.0,
        }
    }

    pub fn span(&self) -> f64 {
        self.max - self.min
    }

    pub fn contains(&self, v: f64) -> bool {
        v >= self.min && v <= self.max
    }

    /// Tick positions at a 1-2-5 step, about five per axis.
    pub fn ticks(&self) -> (Vec<f64>, f64) {
        let step = nice_step(self.span() / 5.0);
        let first = (self.min / step).ceil() as i64;
        let last = (self.max / step).floor() as i64;
        let ticks = (first..=last).map(|k| k as f64 * step).collect();
        (ticks, step)
    }
}

fn nice_step(raw: f64) -> f64 {
    if raw <= 0.0 || !raw.is_finite() {
        return 1.0;
    }
    let mag = 10f64.powf(raw.log10().floor());
    let frac = raw / mag;
    let nice = if frac <= 1.0 {
        1.0
    } else if frac <= 2.0 {
        2.0
    } else if frac <= 5.0 {
        5.0
    } else {
        10.0
    };
    nice * mag
}

/// Tick label with just enough decimals for the tick step.
pub fn tick_label(v: f64, step: f64) -> String {
    if v.abs() >= 1e5 {
        return super::format_real(v, 3);
    }
    let decimals = (-step.log10().floor()).max(0.0) as usize;
    let s = format!("{v:.decimals$}");
    if s.trim_start_matches('-')
        .chars()
        .all(|c| c == '0' || c == '.')
    {
        "0".to_string()
    } else {
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FigureDoc {
    pub title: String,
    pub x: Axis,
    pub y: Axis,
    pub layers: Vec<Layer>,
}

impl FigureDoc {
    pub fn new(
        title: impl Into<String>,
        x_label: impl Into<String>,
        y_label: impl Into<String>,
    ) -> Self {
        FigureDoc {
            title: title.into(),
            x: Axis::new(x_label),
            y: Axis::new(y_label),
            layers: Vec::new(),
        }
    }

    pub fn push(&mut self, layer: Layer) -> Result<()> {
        layer.check()?;
        self.layers.push(layer);
        Ok(())
    }

    /// Data bounds over every layer, or `None` for a figure without data.
    pub fn data_bounds(&self) -> Option<((f64, f64), (f64, f64))> {
        let mut it = self.layers.iter().flat_map(Layer::coords);
        let (x0, y0) = it.next()?;
        Some(
            it.fold(((x0, x0), (y0, y0)), |((xl, xh), (yl, yh)), (x, y)| {
                ((xl.min(x), xh.max(x)), (yl.min(y), yh.max(y)))
            }),
        )
    }

    /// Sets both ranges to the data bounds padded by `pad` of the span on
    /// each side. A zero span widens to ±0.5 around the value.
    pub fn fit_ranges(&mut self, pad: f64) {
        if let Some(((xl, xh), (yl, yh))) = self.data_bounds() {
            (self.x.min, self.x.max) = padded(xl, xh, pad);
            (self.y.min, self.y.max) = padded(yl, yh, pad);
        }
    }

    /// Places a text annotation in the top-left corner of the current ranges.
    pub fn annotate_top_left(&mut self, text: impl Into<String>) {
        self.layers.push(Layer::Text {
            x: self.x.min + 0.03 * self.x.span(),
            y: self.y.max - 0.03 * self.y.span(),
            text: text.into(),
            anchor: Anchor::TopLeft,
        });
    }

    /// True when the ranges contain every layer coordinate.
    pub fn ranges_cover_data(&self) -> bool {
        self.layers
            .iter()
            .flat_map(Layer::coords)
            .all(|(x, y)| self.x.contains(x) && self.y.contains(y))
    }
}

fn padded(lo: f64, hi: f64, pad: f64) -> (f64, f64) {
    if hi > lo {
        let d = (hi - lo) * pad;
        (lo - d, hi + d)
    } else {
        (lo - 0.5, hi + 0.5)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Panel {
    Figure(FigureDoc),
    /// Placeholder for a panel whose statistics could not be computed.
    Notice {
        title: String,
        text: String,
    },
}

impl Panel {
    pub fn title(&self) -> &str {
        match self {
            Panel::Figure(f) => &f.title,
            Panel::Notice { title, .. } => title,
        }
    }

    pub fn figure(&self) -> Option<&FigureDoc> {
        match self {
            Panel::Figure(f) => Some(f),
            Panel::Notice { .. } => None,
        }
    }
}

/// Panels laid out row-major in `n_cols` columns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FigureGrid {
    pub title: String,
    pub n_cols: usize,
    pub panels: Vec<Panel>,
}

impl FigureGrid {
    pub fn n_rows(&self) -> usize {
        self.panels.len().div_ceil(self.n_cols.max(1))
    }

    pub fn panel(&self, row: usize, col: usize) -> Option<&Panel> {
        self.panels.get(row * self.n_cols + col)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn series_styles_cycle() {
        assert_eq!(Style::series(0).dash, Dash::Solid);
        assert_eq!(Style::series(8).color, Some(0));
        assert_eq!(Style::series(8).dash, Dash::Dashed);
        assert_ne!(Style::series(3), Style::series(11));
    }

    #[test]
    fn ticks_are_round() {
        let a = Axis {
            label: String::new(),
            min: -0.13,
            max: 1.07,
        };
        let (t, step) = a.ticks();
        assert_eq!(step, 0.5);
        assert_eq!(t, vec![0.0, 0.5, 1.0]);
        assert_eq!(tick_label(0.5, step), "0.5");
        assert_eq!(tick_label(2.0 - 2.0, 1.0), "0");
        assert_eq!(tick_label(250.0, 50.0), "250");
    }

    #[test]
    fn fit_covers_data_and_rejects_nan() {
        let mut f = FigureDoc::new("t", "x", "y");
        f.push(Layer::polyline(
            vec![(0.0, 1.0), (2.0, 1.0)],
            Style::series(0),
        ))
        .unwrap();
        f.fit_ranges(0.05);
        assert!(f.ranges_cover_data());
        assert_eq!((f.y.min, f.y.max), (0.5, 1.5));
        assert!(f
            .push(Layer::polyline(vec![(f64::NAN, 0.0)], Style::black()))
            .is_err());
        let bad = Layer::Band {
            x: vec![0.0],
            lo: vec![],
            hi: vec![1.0],
            style: Style::black(),
        };
        assert!(f.push(bad).is_err());
    }
}
