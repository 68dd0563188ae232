//! Static SVG pictures of a scenario, a planned path and the 4D regions.

use std::fmt::Write as _;
use std::path::Path;

use crate::adgraph::RegionEvent;
use crate::adplanner::PlanOutcome;
use crate::error::Result;
use crate::geom::Point2;
use crate::world::Scenario;

const CANVAS: f64 = 800.0;

struct Frame {
    scale: f64,
    height_px: f64,
    cell_size: f64,
}

impl Frame {
    /// Pixel coordinates of a world point (y grows upward in the world).
    fn px(&self, p: Point2) -> (f64, f64) {
        (p.x / self.cell_size * self.scale, self.height_px - p.y / self.cell_size * self.scale)
    }
}

/// Occupied cells in dark gray, obstacle routes in light gray, one circle per region event,
/// and the robot path as a single polyline shaded from blue (start) to red (end).
pub fn render_svg(scenario: &Scenario, outcome: Option<&PlanOutcome>, regions: Option<&[RegionEvent]>) -> String {
    let map = scenario.map();
    let (w, h) = (map.width(), map.height());
    let scale = (CANVAS / w.max(h) as f64).floor().clamp(1.0, 24.0);
    let frame = Frame {
        scale,
        height_px: h as f64 * scale,
        cell_size: map.cell_size(),
    };
    let (wp, hp) = (w as f64 * scale, h as f64 * scale);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{wp}" height="{hp}" viewBox="0 0 {wp} {hp}">"#
    );
    let _ = writeln!(s, r##"<rect x="0" y="0" width="{wp}" height="{hp}" fill="#ffffff"/>"##);

    s.push_str("<g fill=\"#333333\">\n");
    for y in 0..h as i32 {
        let mut x = 0;
        while x < w as i32 {
            if !map.is_occupied(x, y) {
                x += 1;
                continue;
            }
            let run_start = x;
            while x < w as i32 && map.is_occupied(x, y) {
                x += 1;
            }
            let _ = writeln!(
                s,
                r#"<rect x="{}" y="{}" width="{}" height="{scale}"/>"#,
                run_start as f64 * scale,
                (h as i32 - 1 - y) as f64 * scale,
                (x - run_start) as f64 * scale
            );
        }
    }
    s.push_str("</g>\n");

    for o in scenario.obstacles() {
        let pts = points(&frame, o.waypoints().iter().copied());
        let _ = writeln!(
            s,
            r##"<polyline class="obstacle" points="{pts}" fill="none" stroke="#aaaaaa" stroke-width="{:.2}"/>"##,
            (scale * 0.4).max(1.0)
        );
    }

    for r in regions.unwrap_or(&[]) {
        let c = map.cell_center(r.center.x, r.center.y);
        let (cx, cy) = frame.px(c);
        let _ = writeln!(
            s,
            r##"<circle class="region" cx="{cx:.2}" cy="{cy:.2}" r="{:.2}" fill="#4477cc" fill-opacity="0.12" stroke="#4477cc" stroke-width="1"/>"##,
            r.radius * scale
        );
    }

    if let Some(path) = outcome.and_then(|o| o.path.as_deref()).filter(|p| !p.is_empty()) {
        let centers: Vec<Point2> = path.iter().map(|st| map.cell_center(st.x, st.y)).collect();
        let (x1, y1) = frame.px(centers[0]);
        let (x2, y2) = frame.px(*centers.last().expect("nonempty"));
        let _ = writeln!(
            s,
            r##"<defs><linearGradient id="time" gradientUnits="userSpaceOnUse" x1="{x1:.2}" y1="{y1:.2}" x2="{x2:.2}" y2="{y2:.2}"><stop offset="0" stop-color="#2255ee"/><stop offset="1" stop-color="#ee3322"/></linearGradient></defs>"##
        );
        let _ = writeln!(
            s,
            r#"<polyline class="robot-path" points="{}" fill="none" stroke="url(#time)" stroke-width="{:.2}"/>"#,
            points(&frame, centers.into_iter()),
            (scale * 0.5).max(1.5)
        );
    }
    s.push_str("</svg>\n");
    s
}

fn points(frame: &Frame, pts: impl Iterator<Item = Point2>) -> String {
    pts.map(|p| {
        let (x, y) = frame.px(p);
        format!("{x:.2},{y:.2}")
    })
    .collect::<Vec<_>>()
    .join(" ")
}

pub fn write_svg(
    path: &Path,
    scenario: &Scenario,
    outcome: Option<&PlanOutcome>,
    regions: Option<&[RegionEvent]>,
) -> Result<()> {
    crate::io::write_file(path, render_svg(scenario, outcome, regions))
}
