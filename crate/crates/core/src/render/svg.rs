// SVG 1.1 backend. Coordinates are in px with y pointing down; numbers are
// printed with two decimals so output bytes depend only on the input.

use std::fmt::Write as _;

use super::figure::{tick_label, Anchor, Dash, FigureDoc, FigureGrid, Layer, Panel, Style};

const PANEL_W: f64 = 420.0;
const PANEL_H: f64 = 300.0;
const LEFT: f64 = 62.0;
const RIGHT: f64 = 16.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 46.0;
const GRID_TITLE_H: f64 = 28.0;

fn num(v: f64) -> String {
    let s = format!("{v:.2}");
    if s == "-0.00" {
        "0.00".into()
    } else {
        s
    }
}

pub(crate) fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            _ => out.push(c),
        }
    }
    out
}

fn color(style: &Style) -> String {
    let (r, g, b) = style.rgb();
    format!("#{r:02x}{g:02x}{b:02x}")
}

fn stroke_attrs(style: &Style) -> String {
    let dash = match style.dash {
        Dash::Solid => String::new(),
        Dash::Dashed => " stroke-dasharray=\"6 3\"".into(),
        Dash::Dotted => " stroke-dasharray=\"1.5 2.5\"".into(),
        Dash::DashDot => " stroke-dasharray=\"6 2 1.5 2\"".into(),
    };
    format!(
        "fill=\"none\" stroke=\"{}\" stroke-width=\"{}\"{dash}",
        color(style),
        num(style.width)
    )
}

struct Frame<'a> {
    fig: &'a FigureDoc,
    w: f64,
    h: f64,
}

impl Frame<'_> {
    fn px(&self, x: f64) -> f64 {
        LEFT + (x - self.fig.x.min) / self.fig.x.span() * self.w
    }

    fn py(&self, y: f64) -> f64 {
        TOP + self.h - (y - self.fig.y.min) / self.fig.y.span() * self.h
    }

    fn pt(&self, (x, y): (f64, f64)) -> String {
        format!("{},{}", num(self.px(x)), num(self.py(y)))
    }
}

fn title(out: &mut String, text: &str, x: f64, y: f64, size: u32) {
    let _ = writeln!(
        out,
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-size=\"{size}\">{}</text>",
        num(x),
        num(y),
        escape(text)
    );
}

fn figure_body(out: &mut String, fig: &FigureDoc, clip_id: usize) {
    let f = Frame {
        fig,
        w: PANEL_W - LEFT - RIGHT,
        h: PANEL_H - TOP - BOTTOM,
    };
    title(out, &fig.title, PANEL_W / 2.0, 18.0, 13);
    let _ = writeln!(
        out,
        "<clipPath id=\"clip{clip_id}\"><rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\"/></clipPath>",
        num(LEFT),
        num(TOP),
        num(f.w),
        num(f.h)
    );
    let _ = writeln!(out, "<g clip-path=\"url(#clip{clip_id})\">");
    for layer in &fig.layers {
        draw_layer(out, &f, layer);
    }
    out.push_str("</g>\n");

    let _ = writeln!(
        out,
        "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#000000\" stroke-width=\"1.00\"/>",
        num(LEFT),
        num(TOP),
        num(f.w),
        num(f.h)
    );
    let (xt, xstep) = fig.x.ticks();
    for t in xt {
        let x = f.px(t);
        let y = TOP + f.h;
        let _ = writeln!(
            out,
            "<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"#000000\"/>\n<text x=\"{0}\" y=\"{3}\" text-anchor=\"middle\" font-size=\"10\">{4}</text>",
            num(x),
            num(y),
            num(y + 4.0),
            num(y + 15.0),
            escape(&tick_label(t, xstep))
        );
    }
    let (yt, ystep) = fig.y.ticks();
    for t in yt {
        let y = f.py(t);
        let _ = writeln!(
            out,
            "<line x1=\"{0}\" y1=\"{2}\" x2=\"{1}\" y2=\"{2}\" stroke=\"#000000\"/>\n<text x=\"{3}\" y=\"{4}\" text-anchor=\"end\" font-size=\"10\">{5}</text>",
            num(LEFT - 4.0),
            num(LEFT),
            num(y),
            num(LEFT - 6.0),
            num(y + 3.5),
            escape(&tick_label(t, ystep))
        );
    }
    title(out, &fig.x.label, LEFT + f.w / 2.0, PANEL_H - 10.0, 11);
    let (yx, yy) = (16.0, TOP + f.h / 2.0);
    let _ = writeln!(
        out,
        "<text x=\"{0}\" y=\"{1}\" text-anchor=\"middle\" font-size=\"11\" transform=\"rotate(-90 {0} {1})\">{2}</text>",
        num(yx),
        num(yy),
        escape(&fig.y.label)
    );
}

fn draw_layer(out: &mut String, f: &Frame, layer: &Layer) {
    match layer {
        Layer::Polyline { points, style, .. } => {
            if points.is_empty() {
                return;
            }
            let pts: Vec<String> = points.iter().map(|&p| f.pt(p)).collect();
            let _ = writeln!(
                out,
                "<polyline points=\"{}\" {}/>",
                pts.join(" "),
                stroke_attrs(style)
            );
        }
        Layer::Step { points, style, .. } => {
            let Some(&first) = points.first() else { return };
            let mut d = format!("M{}", f.pt(first));
            for w in points.windows(2) {
                let _ = write!(d, " L{} L{}", f.pt((w[1].0, w[0].1)), f.pt(w[1]));
            }
            let _ = writeln!(out, "<path d=\"{d}\" {}/>", stroke_attrs(style));
        }
        Layer::Band { x, lo, hi, style } => {
            if x.is_empty() {
                return;
            }
            let upper = x.iter().zip(hi).map(|(&a, &b)| f.pt((a, b)));
            let lower = x.iter().zip(lo).rev().map(|(&a, &b)| f.pt((a, b)));
            let pts: Vec<String> = upper.chain(lower).collect();
            let _ = writeln!(
                out,
                "<path d=\"M{} Z\" fill=\"{}\" fill-opacity=\"{}\" stroke=\"none\"/>",
                pts.join(" L"),
                color(style),
                num(style.opacity)
            );
        }
        Layer::Scatter { points, style } => {
            for &p in points {
                let _ = writeln!(
                    out,
                    "<circle cx=\"{}\" cy=\"{}\" r=\"2.20\" fill=\"{}\" fill-opacity=\"{}\"/>",
                    num(f.px(p.0)),
                    num(f.py(p.1)),
                    color(style),
                    num(style.opacity)
                );
            }
        }
        Layer::Text { x, y, text, anchor } => {
            let (ta, dy0) = match anchor {
                Anchor::TopLeft => ("start", 11.0),
                Anchor::TopRight => ("end", 11.0),
                Anchor::Center => ("middle", 4.0),
            };
            for (i, line) in text.lines().enumerate() {
                let _ = writeln!(
                    out,
                    "<text x=\"{}\" y=\"{}\" text-anchor=\"{ta}\" font-size=\"10\">{}</text>",
                    num(f.px(*x)),
                    num(f.py(*y) + dy0 + 12.0 * i as f64),
                    escape(line)
                );
            }
        }
    }
}

fn notice_body(out: &mut String, heading: &str, text: &str) {
    title(out, heading, PANEL_W / 2.0, 18.0, 13);
    let _ = writeln!(
        out,
        "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"#f4f4f4\" stroke=\"#999999\"/>",
        num(LEFT),
        num(TOP),
        num(PANEL_W - LEFT - RIGHT),
        num(PANEL_H - TOP - BOTTOM)
    );
    title(
        out,
        text,
        (PANEL_W + LEFT - RIGHT) / 2.0,
        (PANEL_H + TOP - BOTTOM) / 2.0,
        11,
    );
}

fn document(width: f64, height: f64, body: &str) -> String {
    format!(
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n\
         <svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\" font-family=\"sans-serif\">\n\
         <rect width=\"{w}\" height=\"{h}\" fill=\"#ffffff\"/>\n{body}</svg>\n",
        w = num(width),
        h = num(height)
    )
}

pub(crate) fn figure(fig: &FigureDoc) -> String {
    let mut body = String::new();
    figure_body(&mut body, fig, 0);
    document(PANEL_W, PANEL_H, &body)
}

pub(crate) fn grid(g: &FigureGrid) -> String {
    let cols = g.n_cols.max(1);
    let head = if g.title.is_empty() {
        0.0
    } else {
        GRID_TITLE_H
    };
    let width = PANEL_W * cols as f64;
    let height = head + PANEL_H * g.n_rows() as f64;
    let mut body = String::new();
    if head > 0.0 {
        title(&mut body, &g.title, width / 2.0, 20.0, 15);
    }
    for (k, panel) in g.panels.iter().enumerate() {
        let (r, c) = (k / cols, k % cols);
        let _ = writeln!(
            body,
            "<g transform=\"translate({},{})\">",
            num(c as f64 * PANEL_W),
            num(head + r as f64 * PANEL_H)
        );
        match panel {
            Panel::Figure(f) => figure_body(&mut body, f, k),
            Panel::Notice { title, text } => notice_body(&mut body, title, text),
        }
        body.push_str("</g>\n");
    }
    document(width, height, &body)
}
