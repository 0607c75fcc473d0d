//! Deterministic SVG heat-maps over a rectangular (K, C) grid.
//!
//! The canvas is a fixed `800 × 600` viewBox. K runs along x and C along y
//! (increasing upwards). Colors come from a fixed 64-step scale, linearly
//! interpolated between five anchors from dark blue through teal and green
//! to yellow; the scale spans the finite minimum and maximum of the plotted
//! values (`[0, 1]` for validity maps). NaN cells are drawn grey.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::sweep::SweepRecord;

pub const WIDTH: f64 = 800.0;
pub const HEIGHT: f64 = 600.0;
pub const COLOR_STEPS: usize = 64;
pub const NAN_COLOR: &str = "#bbbbbb";

const ANCHORS: [(u8, u8, u8); 5] = [
    (0x44, 0x01, 0x54),
    (0x3b, 0x52, 0x8b),
    (0x21, 0x91, 0x8c),
    (0x5e, 0xc9, 0x62),
    (0xfd, 0xe7, 0x25),
];

const PLOT_X: (f64, f64) = (80.0, 660.0);
const PLOT_Y: (f64, f64) = (50.0, 530.0);
const LEGEND_X: (f64, f64) = (700.0, 730.0);

#[derive(Debug, Error)]
pub enum PlotError {
    #[error("records do not form a rectangular K-major grid: {0}")]
    NonRectangularGrid(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    Bound,
    MutualInfo,
    S,
    Validity,
}

impl Quantity {
    pub fn as_str(&self) -> &'static str {
        match self {
            Quantity::Bound => "bound",
            Quantity::MutualInfo => "mutual_info",
            Quantity::S => "s",
            Quantity::Validity => "validity",
        }
    }
}

/// The 64 colors of the scale, lowest first, as `#rrggbb`.
pub fn color_scale() -> Vec<String> {
    (0..COLOR_STEPS)
        .map(|i| {
            let t = i as f64 / (COLOR_STEPS - 1) as f64 * (ANCHORS.len() - 1) as f64;
            let j = (t.floor() as usize).min(ANCHORS.len() - 2);
            let f = t - j as f64;
            let mix = |a: u8, b: u8| (a as f64 + (b as f64 - a as f64) * f).round() as u8;
            let (a, b) = (ANCHORS[j], ANCHORS[j + 1]);
            format!(
                "#{:02x}{:02x}{:02x}",
                mix(a.0, b.0),
                mix(a.1, b.1),
                mix(a.2, b.2)
            )
        })
        .collect()
}

/// Distinct K and C values of a K-major grid.
pub fn grid_axes(records: &[SweepRecord]) -> Result<(Vec<f64>, Vec<f64>), PlotError> {
    if records.is_empty() {
        return Err(PlotError::NonRectangularGrid("no records".into()));
    }
    let k0 = records[0].k;
    let nc = records.iter().take_while(|r| r.k == k0).count();
    if !records.len().is_multiple_of(nc) {
        return Err(PlotError::NonRectangularGrid(format!(
            "{} records cannot be split into rows of {nc}",
            records.len()
        )));
    }
    let cs: Vec<f64> = records[..nc].iter().map(|r| r.c).collect();
    let ks: Vec<f64> = records.iter().step_by(nc).map(|r| r.k).collect();
    for (i, r) in records.iter().enumerate() {
        let (k, c) = (ks[i / nc], cs[i % nc]);
        if r.k != k || r.c != c {
            return Err(PlotError::NonRectangularGrid(format!(
                "record {i} is at (K = {}, C = {}), expected ({k}, {c})",
                r.k, r.c
            )));
        }
    }
    Ok((ks, cs))
}

fn value_range(values: &[f64], q: Quantity) -> (f64, f64) {
    if q == Quantity::Validity {
        return (0.0, 1.0);
    }
    let finite = values.iter().copied().filter(|v| v.is_finite());
    let lo = finite.clone().fold(f64::INFINITY, f64::min);
    let hi = finite.fold(f64::NEG_INFINITY, f64::max);
    if lo.is_finite() {
        (lo, hi)
    } else {
        (0.0, 1.0)
    }
}

fn color_index(v: f64, lo: f64, hi: f64) -> Option<usize> {
    if !v.is_finite() {
        return None;
    }
    if hi <= lo {
        return Some(0);
    }
    let t = ((v - lo) / (hi - lo)).clamp(0.0, 1.0);
    Some(((t * COLOR_STEPS as f64) as usize).min(COLOR_STEPS - 1))
}

/// Renders the heat-map as an SVG document.
pub fn render_svg(records: &[SweepRecord], q: Quantity) -> Result<String, PlotError> {
    let (ks, cs) = grid_axes(records)?;
    let values: Vec<f64> = records.iter().map(|r| r.quantity(q)).collect();
    let (lo, hi) = value_range(&values, q);
    let scale = color_scale();
    let (nk, nc) = (ks.len(), cs.len());
    let cw = (PLOT_X.1 - PLOT_X.0) / nk as f64;
    let ch = (PLOT_Y.1 - PLOT_Y.0) / nc as f64;

    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {WIDTH} {HEIGHT}" width="{WIDTH}" height="{HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(
        s,
        r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );
    let model = records[0].model.as_str();
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="30" text-anchor="middle" font-size="16">{model}: {}</text>"#,
        (PLOT_X.0 + PLOT_X.1) / 2.0,
        q.as_str()
    );
    let _ = writeln!(s, "<g shape-rendering=\"crispEdges\">");
    for (i, v) in values.iter().enumerate() {
        let (ik, ic) = (i / nc, i % nc);
        let x = PLOT_X.0 + ik as f64 * cw;
        let y = PLOT_Y.1 - (ic + 1) as f64 * ch;
        let fill = color_index(*v, lo, hi).map_or(NAN_COLOR, |j| scale[j].as_str());
        let _ = writeln!(
            s,
            r#"<rect x="{x:.3}" y="{y:.3}" width="{cw:.3}" height="{ch:.3}" fill="{fill}"/>"#
        );
    }
    let lh = (PLOT_Y.1 - PLOT_Y.0) / COLOR_STEPS as f64;
    for (j, color) in scale.iter().enumerate() {
        let y = PLOT_Y.1 - (j + 1) as f64 * lh;
        let _ = writeln!(
            s,
            r#"<rect x="{:.3}" y="{y:.3}" width="{:.3}" height="{lh:.3}" fill="{color}"/>"#,
            LEGEND_X.0,
            LEGEND_X.1 - LEGEND_X.0
        );
    }
    let _ = writeln!(s, "</g>");
    let _ = writeln!(
        s,
        r#"<rect x="{}" y="{}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        PLOT_X.0,
        PLOT_Y.0,
        PLOT_X.1 - PLOT_X.0,
        PLOT_Y.1 - PLOT_Y.0
    );
    let lx = LEGEND_X.1 + 4.0;
    let _ = writeln!(
        s,
        r#"<text x="{lx}" y="{}">{}</text>"#,
        PLOT_Y.0 + 4.0,
        fmt_tick(hi)
    );
    let _ = writeln!(
        s,
        r#"<text x="{lx}" y="{}">{}</text>"#,
        PLOT_Y.1,
        fmt_tick(lo)
    );

    let (k_first, k_last) = (ks[0], ks[nk - 1]);
    let (c_first, c_last) = (cs[0], cs[nc - 1]);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="start">{}</text>"#,
        PLOT_X.0,
        PLOT_Y.1 + 18.0,
        fmt_tick(k_first)
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#,
        PLOT_X.1,
        PLOT_Y.1 + 18.0,
        fmt_tick(k_last)
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="{}" text-anchor="middle">K</text>"#,
        (PLOT_X.0 + PLOT_X.1) / 2.0,
        PLOT_Y.1 + 36.0
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#,
        PLOT_X.0 - 6.0,
        PLOT_Y.1,
        fmt_tick(c_first)
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#,
        PLOT_X.0 - 6.0,
        PLOT_Y.0 + 10.0,
        fmt_tick(c_last)
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{:.1}" text-anchor="middle">C</text>"#,
        PLOT_X.0 - 40.0,
        (PLOT_Y.0 + PLOT_Y.1) / 2.0
    );
    s.push_str("</svg>\n");
    Ok(s)
}

fn fmt_tick(x: f64) -> String {
    let t = format!("{x:.4}");
    let t = t.trim_end_matches('0').trim_end_matches('.');
    if t == "-0" {
        "0".into()
    } else {
        t.into()
    }
}

pub fn emit_plot(records: &[SweepRecord], q: Quantity, path: &Path) -> Result<(), PlotError> {
    let svg = render_svg(records, q)?;
    fs::write(path, svg).map_err(|source| PlotError::Io {
        path: path.to_path_buf(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::ModelKind;
    use crate::sweep::evaluate_point;
    use corrbound::bound::{AverageMode, Couplings};

    fn rec(k: f64, c: f64) -> SweepRecord {
        evaluate_point(
            ModelKind::Heisenberg2,
            AverageMode::Exact,
            Couplings::new(k, c).unwrap(),
            false,
        )
    }

    #[test]
    fn scale_has_fixed_ends() {
        let s = color_scale();
        assert_eq!(s.len(), COLOR_STEPS);
        assert_eq!(s[0], "#440154");
        assert_eq!(s[63], "#fde725");
    }

    #[test]
    fn single_cell() {
        let svg = render_svg(&[rec(1.0, 1.0)], Quantity::Bound).unwrap();
        assert!(svg.contains(r#"viewBox="0 0 800 600""#));
        // background, one cell, 64 legend steps, frame
        assert_eq!(svg.matches("<rect").count(), 1 + 1 + COLOR_STEPS + 1);
        assert!(svg.ends_with("</svg>\n"));
    }

    #[test]
    fn rejects_ragged_grid() {
        let recs = vec![rec(0.0, 0.0), rec(0.0, 1.0), rec(1.0, 0.0)];
        assert!(matches!(
            render_svg(&recs, Quantity::Bound),
            Err(PlotError::NonRectangularGrid(_))
        ));
        let recs = vec![rec(0.0, 0.0), rec(0.0, 1.0), rec(1.0, 0.0), rec(1.0, 2.0)];
        assert!(matches!(
            render_svg(&recs, Quantity::Bound),
            Err(PlotError::NonRectangularGrid(_))
        ));
        assert!(render_svg(&[], Quantity::Bound).is_err());
    }

    #[test]
    fn nan_cells_are_grey() {
        let mut r = rec(1.0, 1.0);
        r.bound = f64::NAN;
        assert!(render_svg(&[r], Quantity::Bound)
            .unwrap()
            .contains(NAN_COLOR));
    }

    #[test]
    fn color_index_edges() {
        assert_eq!(color_index(0.0, 0.0, 1.0), Some(0));
        assert_eq!(color_index(1.0, 0.0, 1.0), Some(63));
        assert_eq!(color_index(0.5, 0.5, 0.5), Some(0));
        assert_eq!(color_index(f64::NAN, 0.0, 1.0), None);
    }
}
