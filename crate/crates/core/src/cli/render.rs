//! SVG figure: grid, path arrows colored by state risk, optional taut tether.

use std::fmt::Write as _;

use crate::compose::PathRiskReport;
use crate::tether::TetherState;
use crate::world::{GridMap, LatticePoint, State};

/// State risk at which the color scale saturates.
pub const COLOR_SCALE_MAX: f64 = 0.2;

const CELL: f64 = 32.0;
const LEGEND: f64 = 140.0;
const STOPS: [(f64, [u8; 3]); 3] = [(0.0, [26, 150, 65]), (0.5, [253, 174, 97]), (1.0, [215, 25, 28])];

/// Color of a state risk on the fixed linear scale `[0, COLOR_SCALE_MAX]`, clamped.
pub fn risk_color(risk: f64) -> String {
    let t = (risk / COLOR_SCALE_MAX).clamp(0.0, 1.0);
    let i = if t <= STOPS[1].0 { 0 } else { 1 };
    let (t0, c0) = STOPS[i];
    let (t1, c1) = STOPS[i + 1];
    let u = (t - t0) / (t1 - t0);
    let mix = |k: usize| (c0[k] as f64 + u * (c1[k] as f64 - c0[k] as f64)).round() as u8;
    format!("#{:02x}{:02x}{:02x}", mix(0), mix(1), mix(2))
}

fn xy(row: f64, col: f64) -> (f64, f64) {
    ((col + 0.5) * CELL, (row + 0.5) * CELL)
}

fn center(s: State) -> (f64, f64) {
    xy(s.row as f64, s.col as f64)
}

fn corner(p: LatticePoint) -> (f64, f64) {
    xy(p.row(), p.col())
}

fn arrow(out: &mut String, index: usize, risk: f64, from: (f64, f64), to: (f64, f64)) {
    let color = risk_color(risk);
    let (dx, dy) = (to.0 - from.0, to.1 - from.1);
    let len = dx.hypot(dy).max(1e-9);
    let (ux, uy) = (dx / len, dy / len);
    let head = 0.28 * CELL;
    let base = (to.0 - ux * head, to.1 - uy * head);
    let (px, py) = (-uy * head * 0.45, ux * head * 0.45);
    let _ = writeln!(
        out,
        r#"  <g class="arrow" data-index="{index}" data-risk="{risk:.4}"><line x1="{:.1}" y1="{:.1}" x2="{:.1}" y2="{:.1}" stroke="{color}" stroke-width="3"/><polygon points="{:.1},{:.1} {:.1},{:.1} {:.1},{:.1}" fill="{color}"/></g>"#,
        from.0,
        from.1,
        base.0,
        base.1,
        to.0,
        to.1,
        base.0 + px,
        base.1 + py,
        base.0 - px,
        base.1 - py,
    );
}

pub fn render_svg(map: &GridMap, report: &PathRiskReport, tether: Option<&TetherState>) -> String {
    let (w, h) = (map.width() as f64 * CELL, map.height() as f64 * CELL);
    let height = h.max(8.0 * CELL);
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{:.0}" height="{height:.0}" viewBox="0 0 {:.0} {height:.0}" font-family="sans-serif" font-size="11">"#,
        w + LEGEND,
        w + LEGEND
    );
    out.push_str("  <defs>\n    <linearGradient id=\"risk-scale\" x1=\"0\" y1=\"1\" x2=\"0\" y2=\"0\">\n");
    for (t, _) in STOPS {
        let _ = writeln!(
            out,
            r#"      <stop offset="{t}" stop-color="{}"/>"#,
            risk_color(t * COLOR_SCALE_MAX)
        );
    }
    out.push_str("    </linearGradient>\n  </defs>\n");

    out.push_str("  <g class=\"grid\" stroke=\"#cccccc\" stroke-width=\"1\">\n");
    for s in map.states() {
        let fill = if map.is_viable(s) { "#ffffff" } else { "#444444" };
        let _ = writeln!(
            out,
            r#"    <rect x="{:.0}" y="{:.0}" width="{CELL:.0}" height="{CELL:.0}" fill="{fill}"/>"#,
            s.col as f64 * CELL,
            s.row as f64 * CELL
        );
    }
    out.push_str("  </g>\n");

    if let Some(t) = tether {
        let points: Vec<String> = t
            .chain()
            .into_iter()
            .map(|p| {
                let (x, y) = corner(p);
                format!("{x:.1},{y:.1}")
            })
            .collect();
        let _ = writeln!(
            out,
            r##"  <polyline class="tether" points="{}" fill="none" stroke="#2b5fb4" stroke-width="2" stroke-dasharray="5 3"/>"##,
            points.join(" ")
        );
        let (ax, ay) = center(t.anchor);
        let _ = writeln!(
            out,
            r##"  <rect class="anchor" x="{:.1}" y="{:.1}" width="8" height="8" fill="#2b5fb4"/>"##,
            ax - 4.0,
            ay - 4.0
        );
        for &c in &t.contacts {
            let (x, y) = corner(c);
            let _ = writeln!(
                out,
                r##"  <circle class="contact" cx="{x:.1}" cy="{y:.1}" r="5" fill="none" stroke="#2b5fb4" stroke-width="2"/>"##
            );
        }
    }

    out.push_str("  <g class=\"path\">\n");
    let states = &report.states;
    for (i, &s) in states.iter().enumerate() {
        let risk = 1.0 - report.state_finish_probs[i];
        let to = center(s);
        if i == 0 {
            // The start gets a short stub pointing along the first move.
            let dir = match states.get(1) {
                Some(&n) => {
                    let (nx, ny) = center(n);
                    (nx - to.0, ny - to.1)
                }
                None => (1.0, 0.0),
            };
            let len = dir.0.hypot(dir.1).max(1e-9);
            let r = 0.35 * CELL;
            let (ux, uy) = (dir.0 / len * r, dir.1 / len * r);
            arrow(&mut out, i, risk, (to.0 - ux, to.1 - uy), (to.0 + ux, to.1 + uy));
        } else {
            let from = center(states[i - 1]);
            let (dx, dy) = (to.0 - from.0, to.1 - from.1);
            let trim = 0.18 * CELL / dx.hypot(dy).max(1e-9);
            arrow(
                &mut out,
                i,
                risk,
                (from.0 + dx * trim, from.1 + dy * trim),
                (to.0 - dx * trim, to.1 - dy * trim),
            );
        }
    }
    out.push_str("  </g>\n");

    let (lx, ly, lh) = (w + 24.0, 24.0, 4.0 * CELL);
    let _ = writeln!(
        out,
        r##"  <g class="legend"><rect x="{lx:.0}" y="{ly:.0}" width="16" height="{lh:.0}" fill="url(#risk-scale)" stroke="#333333"/>"##
    );
    for k in 0..=2 {
        let v = COLOR_SCALE_MAX * k as f64 / 2.0;
        let y = ly + lh * (1.0 - k as f64 / 2.0);
        let _ = writeln!(
            out,
            r#"    <text x="{:.0}" y="{:.1}">{v:.2}</text>"#,
            lx + 22.0,
            y + 4.0
        );
    }
    let _ = writeln!(
        out,
        r#"    <text x="{:.0}" y="{:.0}">state risk 1 - P(F_i)</text>"#,
        lx - 8.0,
        ly + lh + 20.0
    );
    let _ = writeln!(
        out,
        r#"    <text x="{:.0}" y="{:.0}">linear, clamped at {COLOR_SCALE_MAX}</text></g>"#,
        lx - 8.0,
        ly + lh + 34.0
    );
    let _ = writeln!(
        out,
        r#"  <text x="4" y="{:.0}">path risk {:.4}</text>"#,
        height - 6.0,
        report.path_risk
    );
    out.push_str("</svg>\n");
    out
}
