use std::fmt::Write;
use std::fs;
use std::path::Path;

use parkplan_core::search::PlanResult;
use parkplan_core::world::OccupancyGrid;
use parkplan_core::{Direction, Pose};

use crate::error::{HarnessError, Result};

const TICK_M: f64 = 0.3;

fn heading_marker(out: &mut String, pose: &Pose, size: f64, attrs: &str) {
    let corners = [
        (size, 0.0),
        (-size * 0.6, size * 0.6),
        (-size * 0.6, -size * 0.6),
    ];
    let pts: Vec<String> = corners
        .iter()
        .map(|&(lx, ly)| {
            let (x, y) = pose.transform_point(lx, ly);
            format!("{x:.3},{y:.3}")
        })
        .collect();
    let _ = writeln!(out, r#"<polygon points="{}" {attrs}/>"#, pts.join(" "));
}

/// Draws the map in world meters with y pointing up: obstacles black, expanded
/// poses as gray ticks, forward motion green, reverse motion red, the start cyan
/// and the goal as a green marker. Output depends only on the inputs.
pub fn render_svg(
    grid: &OccupancyGrid,
    result: Option<&PlanResult>,
    expansions: &[Pose],
) -> String {
    let (w, h) = (grid.width_m(), grid.height_m());
    let res = grid.resolution();
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{:.0}" height="{:.0}" viewBox="0 0 {w:.3} {h:.3}">"#,
        w * 10.0,
        h * 10.0
    );
    let _ = writeln!(
        out,
        r#"<rect x="0" y="0" width="{w:.3}" height="{h:.3}" fill="white"/>"#
    );
    let _ = writeln!(out, r#"<g transform="matrix(1 0 0 -1 0 {h:.3})">"#);

    out.push_str("<g fill=\"black\">\n");
    for iy in 0..grid.height() {
        let mut ix = 0;
        while ix < grid.width() {
            if !grid.is_occupied(ix, iy) {
                ix += 1;
                continue;
            }
            let run_start = ix;
            while ix < grid.width() && grid.is_occupied(ix, iy) {
                ix += 1;
            }
            let _ = writeln!(
                out,
                r#"<rect x="{:.3}" y="{:.3}" width="{:.3}" height="{res:.3}"/>"#,
                run_start as f64 * res,
                iy as f64 * res,
                (ix - run_start) as f64 * res
            );
        }
    }
    out.push_str("</g>\n");

    if !expansions.is_empty() {
        out.push_str("<g stroke=\"gray\" stroke-width=\"0.04\">\n");
        for p in expansions {
            let (x1, y1) = p.transform_point(TICK_M, 0.0);
            let _ = writeln!(
                out,
                r#"<line x1="{:.3}" y1="{:.3}" x2="{x1:.3}" y2="{y1:.3}"/>"#,
                p.x, p.y
            );
        }
        out.push_str("</g>\n");
    }

    if let Some(r) = result {
        // one polyline per run of samples reached in the same direction
        let mut i = 1;
        while i < r.poses.len() {
            let dir = r.poses[i].1;
            let mut pts = vec![r.poses[i - 1].0];
            while i < r.poses.len() && r.poses[i].1 == dir {
                pts.push(r.poses[i].0);
                i += 1;
            }
            let color = match dir {
                Direction::Forward => "green",
                Direction::Reverse => "red",
            };
            let coords: Vec<String> = pts
                .iter()
                .map(|p| format!("{:.3},{:.3}", p.x, p.y))
                .collect();
            let _ = writeln!(
                out,
                r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="0.12"/>"#,
                coords.join(" ")
            );
        }
        heading_marker(
            &mut out,
            &r.start,
            0.8,
            r#"fill="cyan" stroke="black" stroke-width="0.05""#,
        );
        heading_marker(
            &mut out,
            &r.goal,
            0.8,
            r#"fill="none" stroke="green" stroke-width="0.15""#,
        );
    }
    out.push_str("</g>\n</svg>\n");
    out
}

pub fn save_svg(path: &Path, svg: &str) -> Result<()> {
    fs::write(path, svg).map_err(|source| HarnessError::Write {
        path: path.to_path_buf(),
        source,
    })
}
