// PGF/TikZ backend. Page coordinates are computed here in cm, so the
// picture needs only the tikz package and never asks TeX for data-scale
// arithmetic.

use std::fmt::Write as _;

use super::figure::{
    tick_label, Anchor, Dash, FigureDoc, FigureGrid, Layer, Panel, Style, PALETTE,
};

const PANEL_W: f64 = 7.0;
const PANEL_H: f64 = 5.0;
const LEFT: f64 = 1.2;
const RIGHT: f64 = 0.3;
const TOP: f64 = 0.6;
const BOTTOM: f64 = 0.9;
const GRID_TITLE_H: f64 = 0.6;

fn num(v: f64) -> String {
    let s = format!("{v:.3}");
    if s == "-0.000" {
        "0.000".into()
    } else {
        s
    }
}

/// Escapes LaTeX special characters in running text.
pub fn escape_latex(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\textbackslash{}"),
            '{' | '}' | '_' | '%' | '&' | '#' | '$' => {
                out.push('\\');
                out.push(c);
            }
            '~' => out.push_str("\\textasciitilde{}"),
            '^' => out.push_str("\\textasciicircum{}"),
            '<' => out.push_str("\\textless{}"),
            '>' => out.push_str("\\textgreater{}"),
            _ => out.push(c),
        }
    }
    out
}

fn color_name(style: &Style) -> String {
    style.color.map_or_else(
        || "black".to_string(),
        |c| format!("simout{}", c % PALETTE.len()),
    )
}

fn draw_opts(style: &Style) -> String {
    let dash = match style.dash {
        Dash::Solid => "",
        Dash::Dashed => ", dashed",
        Dash::Dotted => ", dotted",
        Dash::DashDot => ", dash dot",
    };
    format!(
        "{}, line width={}pt{dash}",
        color_name(style),
        num(style.width * 0.8)
    )
}

struct Frame<'a> {
    fig: &'a FigureDoc,
    ox: f64,
    oy: f64,
    w: f64,
    h: f64,
}

impl Frame<'_> {
    fn px(&self, x: f64) -> f64 {
        self.ox + LEFT + (x - self.fig.x.min) / self.fig.x.span() * self.w
    }

    fn py(&self, y: f64) -> f64 {
        self.oy + BOTTOM + (y - self.fig.y.min) / self.fig.y.span() * self.h
    }

    fn pt(&self, (x, y): (f64, f64)) -> String {
        format!("({},{})", num(self.px(x)), num(self.py(y)))
    }
}

/// Joins path coordinates, four per line.
fn path(coords: &[String]) -> String {
    coords
        .chunks(4)
        .map(|c| c.join(" -- "))
        .collect::<Vec<_>>()
        .join("\n  -- ")
}

fn figure_body(out: &mut String, fig: &FigureDoc, ox: f64, oy: f64) {
    let f = Frame {
        fig,
        ox,
        oy,
        w: PANEL_W - LEFT - RIGHT,
        h: PANEL_H - TOP - BOTTOM,
    };
    let (x0, y0, x1, y1) = (ox + LEFT, oy + BOTTOM, ox + LEFT + f.w, oy + BOTTOM + f.h);
    let _ = writeln!(
        out,
        "\\node[font=\\small] at ({},{}) {{{}}};",
        num(ox + PANEL_W / 2.0),
        num(oy + PANEL_H - TOP / 2.0),
        escape_latex(&fig.title)
    );
    out.push_str("\\begin{scope}\n");
    let _ = writeln!(
        out,
        "\\clip ({},{}) rectangle ({},{});",
        num(x0),
        num(y0),
        num(x1),
        num(y1)
    );
    for layer in &fig.layers {
        draw_layer(out, &f, layer);
    }
    out.push_str("\\end{scope}\n");
    let _ = writeln!(
        out,
        "\\draw ({},{}) rectangle ({},{});",
        num(x0),
        num(y0),
        num(x1),
        num(y1)
    );

    let (xt, xstep) = fig.x.ticks();
    for t in xt {
        let x = num(f.px(t));
        let _ = writeln!(
            out,
            "\\draw ({x},{0}) -- ({x},{1}) node[below, font=\\scriptsize] {{{2}}};",
            num(y0),
            num(y0 - 0.08),
            escape_latex(&tick_label(t, xstep))
        );
    }
    let (yt, ystep) = fig.y.ticks();
    for t in yt {
        let y = num(f.py(t));
        let _ = writeln!(
            out,
            "\\draw ({0},{y}) -- ({1},{y}) node[left, font=\\scriptsize] {{{2}}};",
            num(x0),
            num(x0 - 0.08),
            escape_latex(&tick_label(t, ystep))
        );
    }
    let _ = writeln!(
        out,
        "\\node[font=\\footnotesize] at ({},{}) {{{}}};",
        num((x0 + x1) / 2.0),
        num(oy + 0.15),
        escape_latex(&fig.x.label)
    );
    let _ = writeln!(
        out,
        "\\node[font=\\footnotesize, rotate=90] at ({},{}) {{{}}};",
        num(ox + 0.15),
        num((y0 + y1) / 2.0),
        escape_latex(&fig.y.label)
    );
}

fn draw_layer(out: &mut String, f: &Frame, layer: &Layer) {
    match layer {
        Layer::Polyline { points, style, .. } => {
            if points.len() < 2 {
                return;
            }
            let c: Vec<String> = points.iter().map(|&p| f.pt(p)).collect();
            let _ = writeln!(out, "\\draw[{}] {};", draw_opts(style), path(&c));
        }
        Layer::Step { points, style, .. } => {
            if points.len() < 2 {
                return;
            }
            let mut c = vec![f.pt(points[0])];
            for w in points.windows(2) {
                c.push(f.pt((w[1].0, w[0].1)));
                c.push(f.pt(w[1]));
            }
            let _ = writeln!(out, "\\draw[{}] {};", draw_opts(style), path(&c));
        }
        Layer::Band { x, lo, hi, style } => {
            if x.is_empty() {
                return;
            }
            let mut c: Vec<String> = x.iter().zip(hi).map(|(&a, &b)| f.pt((a, b))).collect();
            c.extend(x.iter().zip(lo).rev().map(|(&a, &b)| f.pt((a, b))));
            let _ = writeln!(
                out,
                "\\fill[{}, fill opacity={}] {} -- cycle;",
                color_name(style),
                num(style.opacity),
                path(&c)
            );
        }
        Layer::Scatter { points, style } => {
            for &p in points {
                let _ = writeln!(
                    out,
                    "\\fill[{}, fill opacity={}] {} circle[radius=0.04];",
                    color_name(style),
                    num(style.opacity),
                    f.pt(p)
                );
            }
        }
        Layer::Text { x, y, text, anchor } => {
            let a = match anchor {
                Anchor::TopLeft => "north west",
                Anchor::TopRight => "north east",
                Anchor::Center => "center",
            };
            let body: Vec<String> = text.lines().map(escape_latex).collect();
            let _ = writeln!(
                out,
                "\\node[anchor={a}, font=\\scriptsize, align=left] at {} {{{}}};",
                f.pt((*x, *y)),
                body.join("\\\\ ")
            );
        }
    }
}

fn notice_body(out: &mut String, title: &str, text: &str, ox: f64, oy: f64) {
    let _ = writeln!(
        out,
        "\\node[font=\\small] at ({},{}) {{{}}};",
        num(ox + PANEL_W / 2.0),
        num(oy + PANEL_H - TOP / 2.0),
        escape_latex(title)
    );
    let _ = writeln!(
        out,
        "\\draw[gray, fill=gray!10] ({},{}) rectangle ({},{});",
        num(ox + LEFT),
        num(oy + BOTTOM),
        num(ox + PANEL_W - RIGHT),
        num(oy + PANEL_H - TOP)
    );
    let _ = writeln!(
        out,
        "\\node[font=\\footnotesize] at ({},{}) {{{}}};",
        num(ox + (PANEL_W + LEFT - RIGHT) / 2.0),
        num(oy + (PANEL_H + BOTTOM - TOP) / 2.0),
        escape_latex(text)
    );
}

fn picture(body: &str) -> String {
    let mut out = String::from("\\begin{tikzpicture}\n");
    for (i, (r, g, b)) in PALETTE.iter().enumerate() {
        let _ = writeln!(out, "\\definecolor{{simout{i}}}{{RGB}}{{{r},{g},{b}}}");
    }
    out.push_str(body);
    out.push_str("\\end{tikzpicture}\n");
    out
}

pub(crate) fn figure(fig: &FigureDoc) -> String {
    let mut body = String::new();
    figure_body(&mut body, fig, 0.0, 0.0);
    picture(&body)
}

pub(crate) fn grid(g: &FigureGrid) -> String {
    let cols = g.n_cols.max(1);
    let rows = g.n_rows();
    let mut body = String::new();
    if !g.title.is_empty() {
        let _ = writeln!(
            body,
            "\\node[font=\\normalsize] at ({},{}) {{{}}};",
            num(PANEL_W * cols as f64 / 2.0),
            num(PANEL_H * rows as f64 + GRID_TITLE_H / 2.0),
            escape_latex(&g.title)
        );
    }
    for (k, panel) in g.panels.iter().enumerate() {
        let (r, c) = (k / cols, k % cols);
        let ox = c as f64 * PANEL_W;
        let oy = (rows - 1 - r) as f64 * PANEL_H;
        match panel {
            Panel::Figure(f) => figure_body(&mut body, f, ox, oy),
            Panel::Notice { title, text } => notice_body(&mut body, title, text, ox, oy),
        }
    }
    picture(&body)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn escapes_specials() {
        assert_eq!(escape_latex("a_b 95% {x}"), "a\\_b 95\\% \\{x\\}");
        assert_eq!(escape_latex("<0.001"), "\\textless{}0.001");
    }
}
