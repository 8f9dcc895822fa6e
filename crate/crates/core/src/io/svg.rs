use std::fmt::Write as _;
use std::path::Path;

use super::write_atomic;
use crate::book::Side;
use crate::engine::SeriesBundle;
use crate::error::Result;
use crate::sweep::{SurfaceGrid, SurfaceKind};

/// Panel titles of the series figure, in layout order.
pub const SERIES_PANELS: [&str; 6] = [
    "(a) Order book",
    "(b) Price",
    "(c) Smoothed viscosity",
    "(d) Bid / ask",
    "(e) Returns",
    "(f) Smoothed Reynolds number",
];

const PANEL_W: f64 = 360.0;
const PANEL_H: f64 = 220.0;
const MARGIN: f64 = 36.0;
const COLUMNS: usize = 3;

struct Frame {
    x: f64,
    y: f64,
    w: f64,
    h: f64,
}

impl Frame {
    fn panel(index: usize) -> Frame {
        let col = (index % COLUMNS) as f64;
        let row = (index / COLUMNS) as f64;
        Frame {
            x: col * PANEL_W + MARGIN,
            y: row * PANEL_H + MARGIN,
            w: PANEL_W - 2.0 * MARGIN,
            h: PANEL_H - 2.0 * MARGIN,
        }
    }
}

fn open_svg(width: f64, height: f64) -> String {
    format!(
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n\
         <svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" \
         viewBox=\"0 0 {width} {height}\" font-family=\"sans-serif\" font-size=\"11\">\n\
         <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    )
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

fn bounds(values: impl Iterator<Item = f64>) -> Option<(f64, f64)> {
    let (lo, hi) = values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
            (lo.min(v), hi.max(v))
        });
    if lo > hi {
        return None;
    }
    if lo == hi {
        Some((lo - 0.5, hi + 0.5))
    } else {
        Some((lo, hi))
    }
}

fn panel_open(out: &mut String, index: usize, title: &str) -> Frame {
    let f = Frame::panel(index);
    let _ = writeln!(
        out,
        "<g class=\"panel\" id=\"panel-{}\">",
        (b'a' + index as u8) as char
    );
    let _ = writeln!(
        out,
        "<text x=\"{:.1}\" y=\"{:.1}\" font-weight=\"bold\">{}</text>",
        f.x,
        f.y - 8.0,
        escape(title)
    );
    let _ = writeln!(
        out,
        "<rect x=\"{:.1}\" y=\"{:.1}\" width=\"{:.1}\" height=\"{:.1}\" fill=\"none\" stroke=\"#999\"/>",
        f.x, f.y, f.w, f.h
    );
    f
}

fn placeholder(out: &mut String, f: &Frame) {
    let _ = writeln!(
        out,
        "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\" fill=\"#888\">no data</text>",
        f.x + f.w / 2.0,
        f.y + f.h / 2.0
    );
}

fn axis_labels(out: &mut String, f: &Frame, lo: f64, hi: f64) {
    let _ = writeln!(
        out,
        "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"end\" font-size=\"9\">{}</text>",
        f.x - 2.0,
        f.y + 8.0,
        short(hi)
    );
    let _ = writeln!(
        out,
        "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"end\" font-size=\"9\">{}</text>",
        f.x - 2.0,
        f.y + f.h,
        short(lo)
    );
}

fn short(v: f64) -> String {
    if v.abs() >= 1e4 || (v != 0.0 && v.abs() < 1e-2) {
        format!("{v:.1e}")
    } else {
        format!("{v:.2}")
    }
}

/// Draws each series as a polyline sharing one y range.
fn line_panel(out: &mut String, index: usize, title: &str, series: &[(&[f64], &str)]) {
    let f = panel_open(out, index, title);
    let n = series.iter().map(|(s, _)| s.len()).max().unwrap_or(0);
    match bounds(series.iter().flat_map(|(s, _)| s.iter().copied())) {
        Some((lo, hi)) if n > 0 => {
            axis_labels(out, &f, lo, hi);
            let dx = if n > 1 { f.w / (n - 1) as f64 } else { 0.0 };
            for (values, colour) in series {
                let points = values
                    .iter()
                    .enumerate()
                    .filter(|(_, v)| v.is_finite())
                    .map(|(i, v)| {
                        let x = f.x + i as f64 * dx;
                        let y = f.y + f.h - (v - lo) / (hi - lo) * f.h;
                        format!("{x:.2},{y:.2}")
                    })
                    .collect::<Vec<_>>()
                    .join(" ");
                let _ = writeln!(
                    out,
                    "<polyline fill=\"none\" stroke=\"{colour}\" stroke-width=\"1\" points=\"{points}\"/>"
                );
            }
        }
        _ => placeholder(out, &f),
    }
    out.push_str("</g>\n");
}

fn book_panel(out: &mut String, bundle: &SeriesBundle) {
    let f = panel_open(out, 0, SERIES_PANELS[0]);
    let book = &bundle.final_book;
    let mut levels: Vec<(i64, f64, &str)> = Vec::new();
    for (side, colour) in [(Side::Buy, "black"), (Side::Sell, "#888")] {
        levels.extend(book.levels(side).iter().map(|l| (l.price, l.size, colour)));
    }
    levels.sort_by_key(|l| std::cmp::Reverse(l.0));
    let max = levels.iter().map(|l| l.1).fold(0.0, f64::max);
    let bar_h = f.h / levels.len() as f64;
    for (k, (price, size, colour)) in levels.iter().enumerate() {
        let y = f.y + k as f64 * bar_h;
        let w = if max > 0.0 { size / max * f.w } else { 0.0 };
        let _ = writeln!(
            out,
            "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"{colour}\"><title>{price}: {size:.6}</title></rect>",
            f.x,
            y + 0.5,
            w,
            (bar_h - 1.0).max(0.5)
        );
    }
    if let (Some(top), Some(bottom)) = (levels.first(), levels.last()) {
        axis_labels(out, &f, bottom.0 as f64, top.0 as f64);
    }
    out.push_str("</g>\n");
}

/// Six-panel figure of one run.
pub fn series_svg(bundle: &SeriesBundle) -> String {
    let rows = SERIES_PANELS.len().div_ceil(COLUMNS) as f64;
    let mut out = open_svg(COLUMNS as f64 * PANEL_W, rows * PANEL_H);
    let mids: Vec<f64> = bundle.ticks.iter().map(|t| t.mid).collect();
    let bids: Vec<f64> = bundle.ticks.iter().map(|t| t.bid as f64).collect();
    let asks: Vec<f64> = bundle.ticks.iter().map(|t| t.ask as f64).collect();
    let rets: Vec<f64> = bundle.ticks.iter().map(|t| t.ret).collect();

    book_panel(&mut out, bundle);
    line_panel(&mut out, 1, SERIES_PANELS[1], &[(&mids, "black")]);
    line_panel(
        &mut out,
        2,
        SERIES_PANELS[2],
        &[(&bundle.smoothed_mu, "black")],
    );
    line_panel(
        &mut out,
        3,
        SERIES_PANELS[3],
        &[(&bids, "black"), (&asks, "#888")],
    );
    line_panel(&mut out, 4, SERIES_PANELS[4], &[(&rets, "black")]);
    line_panel(
        &mut out,
        5,
        SERIES_PANELS[5],
        &[(&bundle.smoothed_reynolds, "black")],
    );
    out.push_str("</svg>\n");
    out
}

pub fn render_series_svg(bundle: &SeriesBundle, path: &Path) -> Result<()> {
    write_atomic(path, &series_svg(bundle))
}

/// Heatmap of a surface, collision probability increasing upwards.
pub fn grid_svg(grid: &SurfaceGrid) -> String {
    let (w, h) = (640.0, 480.0);
    let f = Frame {
        x: 60.0,
        y: 40.0,
        w: w - 100.0,
        h: h - 90.0,
    };
    let mut out = open_svg(w, h);
    let title = match grid.kind {
        SurfaceKind::Speed => format!("Reynolds number vs market speed and P (l = {})", grid.fixed),
        SurfaceKind::Spread => format!("Reynolds number vs spread and P (v_T = {})", grid.fixed),
    };
    let _ = writeln!(
        out,
        "<text x=\"{:.1}\" y=\"24\" font-weight=\"bold\">{}</text>",
        f.x,
        escape(&title)
    );
    let nx = grid.x_axis.len();
    let ny = grid.y_axis.len();
    let max = grid
        .values
        .iter()
        .flatten()
        .copied()
        .filter(|v| v.is_finite())
        .fold(0.0, f64::max);
    if nx == 0 || ny == 0 {
        placeholder(&mut out, &f);
    } else {
        let (cw, ch) = (f.w / nx as f64, f.h / ny as f64);
        out.push_str("<g class=\"heatmap\">\n");
        for (i, row) in grid.values.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                let _ = writeln!(
                    out,
                    "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"{}\"/>",
                    f.x + j as f64 * cw,
                    f.y + f.h - (i + 1) as f64 * ch,
                    cw + 0.05,
                    ch + 0.05,
                    heat(v, max)
                );
            }
        }
        out.push_str("</g>\n");
        let _ = writeln!(
            out,
            "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"9\">max {}</text>",
            f.x,
            f.y + f.h + 20.0,
            short(max)
        );
    }
    out.push_str("</svg>\n");
    out
}

pub fn render_grid_svg(grid: &SurfaceGrid, path: &Path) -> Result<()> {
    write_atomic(path, &grid_svg(grid))
}

/// Log-scaled white → dark red.
fn heat(v: f64, max: f64) -> String {
    let t = if max > 0.0 && v > 0.0 {
        (1.0 + v).ln() / (1.0 + max).ln()
    } else {
        0.0
    };
    let t = t.clamp(0.0, 1.0);
    let r = 255.0 - 100.0 * t;
    let gb = 255.0 * (1.0 - t);
    format!("rgb({:.0},{:.0},{:.0})", r, gb, gb)
}
