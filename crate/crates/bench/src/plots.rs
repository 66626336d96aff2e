//! SVG renderings: trajectories over the layout, the sweep grid, field maps
//! and λ traces.

use featnav_core::field::{FieldMap, RegionClass};
use featnav_core::Vec2;

use crate::experiment::{CellClass, SweepResult, Trial};
use crate::svg::{heat_color, Frame, Svg};

const TRIAL_COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

pub fn trajectories(trials: &[Trial]) -> String {
    let Some(first) = trials.first() else {
        return Svg::new(200.0, 100.0).finish();
    };
    let b = first.world.bounds;
    let scale = 60.0;
    let (w, h) = (b.width() * scale, b.height() * scale);
    let frame = Frame {
        x0: b.min.x,
        y0: b.min.y,
        x1: b.max.x,
        y1: b.max.y,
        left: 20.0,
        top: 30.0,
        width: w,
        height: h,
    };
    let mut svg = Svg::new(w + 40.0, h + 50.0);
    svg.text(20.0, 20.0, 14.0, &format!("{}, {} trial(s)", first.world.name, trials.len()));
    svg.outline(frame.left, frame.top, w, h, "#888888");
    for p in first.world.feature_positions() {
        let (x, y) = frame.map(p.x, p.y);
        svg.circle(x, y, 1.2, "#b0b0b0");
    }
    for (i, t) in trials.iter().enumerate() {
        let mut pts = vec![frame.map(t.world.start.x, t.world.start.y)];
        pts.extend(t.episode.log.records.iter().map(|r| frame.map(r.true_pose.x, r.true_pose.y)));
        svg.polyline(&pts, TRIAL_COLORS[i % TRIAL_COLORS.len()], 1.5);
    }
    let (sx, sy) = frame.map(first.world.start.x, first.world.start.y);
    let (gx, gy) = frame.map(first.world.goal.x, first.world.goal.y);
    svg.circle(sx, sy, 5.0, "#2ca02c");
    svg.circle(gx, gy, 5.0, "#d62728");
    svg.finish()
}

fn class_color(c: CellClass) -> &'static str {
    match c {
        CellClass::GoalAndLocalization => "#4caf50",
        CellClass::GoalOnly => "#ffb74d",
        CellClass::LocalizationOnly => "#64b5f6",
        CellClass::Neither => "#bdbdbd",
    }
}

pub fn sweep_grid(result: &SweepResult) -> String {
    let (cols, rows) = (result.spec.thetas_deg.len(), result.spec.lambdas.len());
    let cell = 44.0;
    let (left, top) = (60.0, 40.0);
    let mut svg = Svg::new(left + cols as f64 * cell + 20.0, top + rows as f64 * cell + 60.0);
    svg.text(left, 20.0, 13.0, "rows: λ, columns: θ̂_cs [deg]");
    for (j, t) in result.spec.thetas_deg.iter().enumerate() {
        svg.text(left + j as f64 * cell + 10.0, top - 6.0, 11.0, &format!("{t}"));
    }
    for (i, l) in result.spec.lambdas.iter().enumerate() {
        // largest λ on top
        let y = top + (rows - 1 - i) as f64 * cell;
        svg.text(12.0, y + cell / 2.0 + 4.0, 11.0, &format!("{l}"));
        for j in 0..cols {
            let c = result.cell(i, j);
            let x = left + j as f64 * cell;
            svg.rect(x, y, cell - 2.0, cell - 2.0, class_color(c.class));
            svg.text(x + 6.0, y + cell / 2.0 + 4.0, 11.0, c.class.label());
        }
    }
    let legend_y = top + rows as f64 * cell + 25.0;
    for (k, c) in [
        CellClass::GoalAndLocalization,
        CellClass::GoalOnly,
        CellClass::LocalizationOnly,
        CellClass::Neither,
    ]
    .into_iter()
    .enumerate()
    {
        let x = left + k as f64 * 90.0;
        svg.rect(x, legend_y - 10.0, 12.0, 12.0, class_color(c));
        svg.text(x + 16.0, legend_y, 11.0, c.label());
    }
    svg.finish()
}

/// Region shading per lattice cell, an arrow per cell scaled by the force
/// magnitude, and the charges colored by energy.
pub fn field_map(map: &FieldMap<f64>, image: Vec2<f64>, optical_center: Vec2<f64>, goal_dir: Vec2<f64>) -> String {
    let frame = Frame {
        x0: 0.0,
        y0: 0.0,
        x1: image.x,
        y1: image.y,
        left: 20.0,
        top: 30.0,
        width: image.x,
        height: image.y,
    };
    // image rows grow downward, so flip back to pixel order
    let px = |p: Vec2<f64>| frame.map(p.x, image.y - p.y);
    let mut svg = Svg::new(image.x + 40.0, image.y + 50.0);
    svg.text(20.0, 20.0, 13.0, "field map: shading goal/feature friendly, arrows force, dots charges");
    let g = map.grid;
    for c in &map.cells {
        let (x, y) = px(c.point - g.step * 0.5);
        let fill = match c.region {
            RegionClass::GoalFriendly => "#e3f2fd",
            RegionClass::FeatureFriendly => "#ffe0b2",
        };
        svg.rect(x, y, g.step.x, g.step.y, fill);
    }
    let max = map.cells.iter().map(|c| c.force.norm()).fold(0.0, f64::max);
    if max > 0.0 {
        let reach = 0.45 * g.step.x.min(g.step.y);
        for c in &map.cells {
            let n = c.force.norm();
            if n <= 0.0 {
                continue;
            }
            let tip = c.point + c.force * (reach / max);
            let (x1, y1) = px(c.point);
            let (x2, y2) = px(tip);
            svg.arrow(x1, y1, x2, y2, "#37474f");
        }
    }
    for q in &map.charges {
        let (x, y) = px(q.position(optical_center));
        svg.circle(x, y, 4.0, &heat_color(q.energy));
    }
    if let Some(d) = goal_dir.normalized() {
        let (x1, y1) = px(optical_center);
        let (x2, y2) = px(optical_center + d * 60.0);
        svg.line(x1, y1, x2, y2, "#2e7d32", 3.0);
    }
    svg.finish()
}

pub fn lambda_trace(trace: &[(f64, f64)]) -> String {
    let t_end = trace.last().map_or(1.0, |p| p.0).max(1e-9);
    let frame = Frame {
        x0: 0.0,
        y0: 0.0,
        x1: t_end,
        y1: 1.0,
        left: 50.0,
        top: 30.0,
        width: 600.0,
        height: 240.0,
    };
    let mut svg = Svg::new(680.0, 310.0);
    svg.text(50.0, 20.0, 13.0, "λ over time");
    svg.outline(frame.left, frame.top, frame.width, frame.height, "#888888");
    for v in [0.0, 0.5, 1.0] {
        let (_, y) = frame.map(0.0, v);
        svg.text(20.0, y + 4.0, 11.0, &format!("{v}"));
    }
    let (_, yb) = frame.map(0.0, 0.0);
    svg.text(frame.left + frame.width - 60.0, yb + 20.0, 11.0, &format!("t = {t_end:.1} s"));
    let pts: Vec<_> = trace.iter().map(|&(t, l)| frame.map(t, l)).collect();
    svg.polyline(&pts, "#1f77b4", 1.5);
    svg.finish()
}
