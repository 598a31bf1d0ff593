//! Static scatter plots of `(V/R, R)` per procedure.

use std::fmt::Write as _;
use std::path::Path;

use super::{Procedure, RawRow};
use crate::error::{Error, Result};
use crate::output::write_atomic;

const PANEL_W: f64 = 360.0;
const PANEL_H: f64 = 300.0;
const MARGIN_L: f64 = 56.0;
const MARGIN_R: f64 = 16.0;
const MARGIN_T: f64 = 30.0;
const MARGIN_B: f64 = 44.0;

const FIGURE_SET: [Procedure; 4] = [
    Procedure::Bh,
    Procedure::EbTrue,
    Procedure::EbFourier,
    Procedure::EbBootstrap,
];

/// Panels to draw and their grid cells `(row, col)`.
///
/// Approximate Bayes is only drawn when it is the sole procedure. When the
/// four remaining procedures are all present they are placed clockwise from
/// the top-left: BH-w0, EB-w0, EB-Fourier, EB-bootstrap.
pub fn figure_panels(present: &[Procedure]) -> Vec<(Procedure, usize, usize)> {
    let mut list: Vec<Procedure> = Procedure::ALL
        .into_iter()
        .filter(|p| present.contains(p))
        .collect();
    if list.len() > 1 {
        list.retain(|&p| p != Procedure::ApproxBayes);
    }
    if list == FIGURE_SET {
        return vec![
            (Procedure::Bh, 0, 0),
            (Procedure::EbTrue, 0, 1),
            (Procedure::EbFourier, 1, 1),
            (Procedure::EbBootstrap, 1, 0),
        ];
    }
    let cols = if list.len() == 1 { 1 } else { 2 };
    list.into_iter()
        .enumerate()
        .map(|(i, p)| (p, i / cols, i % cols))
        .collect()
}

fn nice_ceil(v: f64, step: f64) -> f64 {
    ((v / step).ceil() * step).max(step)
}

pub fn scatter_svg(raw: &[RawRow], alpha: f64) -> Result<String> {
    if raw.is_empty() {
        return Err(Error::invalid("no trials to plot"));
    }
    let mut present: Vec<Procedure> = raw.iter().map(|r| r.procedure).collect();
    present.sort();
    present.dedup();
    let panels = figure_panels(&present);
    let rows = panels.iter().map(|p| p.1).max().unwrap_or(0) + 1;
    let cols = panels.iter().map(|p| p.2).max().unwrap_or(0) + 1;

    let drawn: Vec<&RawRow> = raw
        .iter()
        .filter(|r| panels.iter().any(|p| p.0 == r.procedure))
        .collect();
    let x_max = nice_ceil(drawn.iter().map(|r| r.fdp).fold(2.0 * alpha, f64::max), 0.1);
    let y_max = nice_ceil(
        drawn.iter().map(|r| r.r as f64).fold(0.0, f64::max) * 1.05,
        10.0,
    );

    let width = cols as f64 * PANEL_W;
    let height = rows as f64 * PANEL_H;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(
        s,
        r#"<rect width="{width}" height="{height}" fill="white"/>"#
    );

    for &(proc_, row, col) in &panels {
        let ox = col as f64 * PANEL_W + MARGIN_L;
        let oy = row as f64 * PANEL_H + MARGIN_T;
        let pw = PANEL_W - MARGIN_L - MARGIN_R;
        let ph = PANEL_H - MARGIN_T - MARGIN_B;
        let sx = |v: f64| ox + v / x_max * pw;
        let sy = |v: f64| oy + ph - v / y_max * ph;
        let pts: Vec<&&RawRow> = drawn.iter().filter(|r| r.procedure == proc_).collect();

        let _ = writeln!(s, r#"<g class="panel" data-procedure="{}">"#, proc_.id());
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle" font-size="13">{}</text>"#,
            ox + pw / 2.0,
            oy - 10.0,
            proc_.label()
        );
        let _ = writeln!(
            s,
            r##"<rect x="{ox:.1}" y="{oy:.1}" width="{pw:.1}" height="{ph:.1}" fill="none" stroke="#333"/>"##
        );
        for t in 0..=5 {
            let xv = x_max * t as f64 / 5.0;
            let yv = y_max * t as f64 / 5.0;
            let _ = writeln!(
                s,
                r##"<line x1="{x:.1}" y1="{y0:.1}" x2="{x:.1}" y2="{y1:.1}" stroke="#333"/><text x="{x:.1}" y="{ty:.1}" text-anchor="middle">{xv:.2}</text>"##,
                x = sx(xv),
                y0 = oy + ph,
                y1 = oy + ph + 4.0,
                ty = oy + ph + 16.0
            );
            let _ = writeln!(
                s,
                r##"<line x1="{x0:.1}" y1="{y:.1}" x2="{ox:.1}" y2="{y:.1}" stroke="#333"/><text x="{tx:.1}" y="{ty:.1}" text-anchor="end">{yv}</text>"##,
                x0 = ox - 4.0,
                y = sy(yv),
                tx = ox - 6.0,
                ty = sy(yv) + 4.0,
                yv = yv.round()
            );
        }
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">V/R</text>"#,
            ox + pw / 2.0,
            oy + ph + 32.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{x:.1}" y="{y:.1}" text-anchor="middle" transform="rotate(-90 {x:.1} {y:.1})">R</text>"#,
            x = ox - 40.0,
            y = oy + ph / 2.0
        );
        for r in &pts {
            let _ = writeln!(
                s,
                r##"<circle class="point" cx="{:.2}" cy="{:.2}" r="2.5" fill="#1f5fa8" fill-opacity="0.55"/>"##,
                sx(r.fdp),
                sy(r.r as f64)
            );
        }
        let _ = writeln!(
            s,
            r##"<line class="alpha" x1="{x:.2}" y1="{oy:.1}" x2="{x:.2}" y2="{y1:.1}" stroke="#000" stroke-width="1.5"/>"##,
            x = sx(alpha),
            y1 = oy + ph
        );
        if !pts.is_empty() {
            let n = pts.len() as f64;
            let mean_fdp = pts.iter().map(|r| r.fdp).sum::<f64>() / n;
            let mean_r = pts.iter().map(|r| r.r as f64).sum::<f64>() / n;
            let _ = writeln!(
                s,
                r##"<line class="mean-fdp" x1="{x:.2}" y1="{oy:.1}" x2="{x:.2}" y2="{y1:.1}" stroke="#c0392b" stroke-dasharray="5,4"/>"##,
                x = sx(mean_fdp),
                y1 = oy + ph
            );
            let _ = writeln!(
                s,
                r##"<line class="mean-r" x1="{ox:.1}" y1="{y:.2}" x2="{x1:.1}" y2="{y:.2}" stroke="#c0392b" stroke-dasharray="5,4"/>"##,
                y = sy(mean_r),
                x1 = ox + pw
            );
        }
        s.push_str("</g>\n");
    }
    s.push_str("</svg>\n");
    Ok(s)
}

pub fn write_scatter_svg(raw: &[RawRow], alpha: f64, path: &Path) -> Result<()> {
    write_atomic(path, scatter_svg(raw, alpha)?.as_bytes())
}
