//! SVG layout diagrams: first-level images of the unit interval or square,
//! with overlapping regions shaded. Overlaps are found in exact arithmetic;
//! only the final coordinates are rounded.

use std::fmt::Write;

use lipeq::algebra::{int, to_decimal, Rational};
use lipeq::{ExactBox, HomogeneousIfs};
use serde::Serialize;

use crate::report::BoxReport;

const UNIT: i64 = 400;
const MARGIN: i64 = 20;
const TITLE: i64 = 24;
const BAR: i64 = 18;
const ROW_GAP: i64 = 10;
const PANEL_GAP: i64 = 30;

#[derive(Debug, Serialize)]
pub struct OverlapRegion {
    pub maps: [usize; 2],
    pub region: BoxReport,
}

#[derive(Debug, Serialize)]
pub struct PanelReport {
    pub name: String,
    pub dim: usize,
    pub map_count: usize,
    pub overlaps: Vec<OverlapRegion>,
}

/// Pairs of first-level images meeting in a set of positive measure.
pub fn overlaps(ifs: &HomogeneousIfs) -> Vec<(usize, usize, ExactBox)> {
    let boxes: Vec<ExactBox> = ifs.maps().iter().map(ExactBox::image_of_unit).collect();
    let mut out = Vec::new();
    for i in 0..boxes.len() {
        for j in i + 1..boxes.len() {
            if let Some(b) = boxes[i].intersection(&boxes[j]) {
                if (0..b.dim()).all(|a| b.upper[a] > b.lower[a]) {
                    out.push((i + 1, j + 1, b));
                }
            }
        }
    }
    out
}

fn num(q: &Rational) -> String {
    to_decimal(q, 12)
}

/// Pixel coordinate `offset + q·UNIT`.
fn px(offset: i64, q: &Rational) -> String {
    num(&(int(offset) + q * int(UNIT)))
}

fn len(q: &Rational) -> String {
    num(&(q * int(UNIT)))
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn panel_height(dim: usize) -> i64 {
    match dim {
        1 => TITLE + 2 * BAR + ROW_GAP + 30,
        _ => TITLE + UNIT,
    }
}

fn draw_line(svg: &mut String, x0: i64, top: i64, ifs: &HomogeneousIfs, shared: &[(usize, usize, ExactBox)]) {
    let axis_y = top + 2 * BAR + ROW_GAP + 10;
    let _ = writeln!(
        svg,
        r##"  <line x1="{x0}" y1="{axis_y}" x2="{}" y2="{axis_y}" stroke="#555555" stroke-width="1"/>"##,
        x0 + UNIT
    );
    for (x, label) in [(x0, "0"), (x0 + UNIT, "1")] {
        let _ = writeln!(
            svg,
            r##"  <text x="{x}" y="{}" font-family="sans-serif" font-size="10" text-anchor="middle">{label}</text>"##,
            axis_y + 14
        );
    }
    for (i, f) in ifs.maps().iter().enumerate() {
        let b = ExactBox::image_of_unit(f);
        let y = top + (i as i64 % 2) * (BAR + ROW_GAP);
        let _ = writeln!(
            svg,
            r##"  <rect x="{}" y="{y}" width="{}" height="{BAR}" fill="#9ecae1" stroke="#08519c" stroke-width="1"/>"##,
            px(x0, &b.lower[0]),
            len(&b.side()),
        );
        let mid = (&b.lower[0] + &b.upper[0]) / int(2);
        let _ = writeln!(
            svg,
            r##"  <text x="{}" y="{}" font-family="sans-serif" font-size="10" text-anchor="middle">{}</text>"##,
            px(x0, &mid),
            y + BAR - 5,
            i + 1
        );
    }
    for (_, _, b) in shared {
        let _ = writeln!(
            svg,
            r##"  <rect x="{}" y="{top}" width="{}" height="{}" fill="#de2d26" fill-opacity="0.6"/>"##,
            px(x0, &b.lower[0]),
            len(&b.side()),
            2 * BAR + ROW_GAP
        );
    }
}

fn draw_plane(svg: &mut String, x0: i64, top: i64, ifs: &HomogeneousIfs, shared: &[(usize, usize, ExactBox)]) {
    // SVG y grows downward: y_px = top + (1 - y)·UNIT
    let flip = |q: &Rational| px(top, &(int(1) - q));
    let _ = writeln!(
        svg,
        r##"  <rect x="{x0}" y="{top}" width="{UNIT}" height="{UNIT}" fill="none" stroke="#999999" stroke-width="1"/>"##
    );
    for (i, f) in ifs.maps().iter().enumerate() {
        let b = ExactBox::image_of_unit(f);
        let _ = writeln!(
            svg,
            r##"  <rect x="{}" y="{}" width="{}" height="{}" fill="#9ecae1" fill-opacity="0.7" stroke="#08519c" stroke-width="1"/>"##,
            px(x0, &b.lower[0]),
            flip(&b.upper[1]),
            len(&(&b.upper[0] - &b.lower[0])),
            len(&(&b.upper[1] - &b.lower[1])),
        );
        let mid = b.midpoint();
        let _ = writeln!(
            svg,
            r##"  <text x="{}" y="{}" font-family="sans-serif" font-size="12" text-anchor="middle" dominant-baseline="middle">{}</text>"##,
            px(x0, &mid[0]),
            flip(&mid[1]),
            i + 1
        );
    }
    for (_, _, b) in shared {
        let _ = writeln!(
            svg,
            r##"  <rect x="{}" y="{}" width="{}" height="{}" fill="#de2d26" fill-opacity="0.6"/>"##,
            px(x0, &b.lower[0]),
            flip(&b.upper[1]),
            len(&(&b.upper[0] - &b.lower[0])),
            len(&(&b.upper[1] - &b.lower[1])),
        );
    }
}

/// Panels side by side, one per named IFS.
pub fn render(panels: &[(String, HomogeneousIfs)]) -> (String, Vec<PanelReport>) {
    let width = panels.len() as i64 * (UNIT + 2 * MARGIN) + (panels.len() as i64 - 1).max(0) * PANEL_GAP;
    let height = 2 * MARGIN + panels.iter().map(|(_, ifs)| panel_height(ifs.dim())).max().unwrap_or(0);
    let mut svg = String::new();
    let _ = writeln!(svg, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#
    );
    let _ = writeln!(svg, r##"  <rect x="0" y="0" width="{width}" height="{height}" fill="#ffffff"/>"##);
    let mut reports = Vec::with_capacity(panels.len());
    for (k, (name, ifs)) in panels.iter().enumerate() {
        let x0 = MARGIN + k as i64 * (UNIT + 2 * MARGIN + PANEL_GAP);
        let _ = writeln!(
            svg,
            r#"  <text x="{x0}" y="{}" font-family="sans-serif" font-size="13">{} (λ = {})</text>"#,
            MARGIN + 12,
            escape(name),
            ifs.lambda()
        );
        let top = MARGIN + TITLE;
        let shared = overlaps(ifs);
        if ifs.dim() == 1 {
            draw_line(&mut svg, x0, top, ifs, &shared);
        } else {
            draw_plane(&mut svg, x0, top, ifs, &shared);
        }
        reports.push(PanelReport {
            name: name.clone(),
            dim: ifs.dim(),
            map_count: ifs.map_count(),
            overlaps: shared
                .iter()
                .map(|(i, j, b)| OverlapRegion { maps: [*i, *j], region: b.into() })
                .collect(),
        });
    }
    svg.push_str("</svg>\n");
    (svg, reports)
}

#[cfg(test)]
mod tests {
    use super::*;
    use lipeq::algebra::rat;
    use lipeq::catalog;

    #[test]
    fn line_overlaps_have_length_lambda_squared() {
        let shared = overlaps(&catalog::line5_a(rat(1, 6)));
        let pairs: Vec<(usize, usize)> = shared.iter().map(|(i, j, _)| (*i, *j)).collect();
        assert_eq!(pairs, vec![(1, 2), (2, 3)]);
        assert!(shared.iter().all(|(_, _, b)| b.side() == rat(1, 36)));
    }

    #[test]
    fn separated_maps_have_no_shading() {
        let ifs = HomogeneousIfs::parse_1d(rat(1, 5), &["0", "2*l", "1-l"]).unwrap();
        assert!(overlaps(&ifs).is_empty());
        let (svg, _) = render(&[("shift".into(), ifs)]);
        assert!(!svg.contains("#de2d26"));
        assert_eq!(svg.matches("<rect").count(), 1 + 3);
    }

    #[test]
    fn planar_layout_is_deterministic() {
        let panels = vec![
            ("F".to_string(), catalog::plane6_f(rat(1, 4))),
            ("G".to_string(), catalog::plane6_g(rat(1, 4))),
        ];
        let (first, reports) = render(&panels);
        let (second, _) = render(&panels);
        assert_eq!(first, second);
        assert_eq!(reports.len(), 2);
        assert!(first.starts_with("<?xml"));
        assert!(first.contains("width=\"910\""));
    }

    #[test]
    fn titles_are_escaped() {
        let ifs = HomogeneousIfs::parse_1d(rat(1, 5), &["0", "1-l"]).unwrap();
        let (svg, _) = render(&[("a<b & c".into(), ifs)]);
        assert!(svg.contains("a&lt;b &amp; c"));
    }
}
