//! Desk-scale world layouts: a 10 m start → goal flight over textured and
//! texture-less floor patches.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::vec2::Vec2;

type P = Vec2<f64>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScenarioError {
    #[error("unknown scenario kind `{0}` (expected one of: {kinds})", kinds = ScenarioKind::NAMES.join(", "))]
    UnknownKind(String),
    #[error("invalid layout: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    CorridorGap,
    LPath,
    DiagonalBand,
    UniformTexture,
    SymmetricBifurcation,
    DeadEnd,
}

impl ScenarioKind {
    pub const ALL: [ScenarioKind; 6] = [
        ScenarioKind::CorridorGap,
        ScenarioKind::LPath,
        ScenarioKind::DiagonalBand,
        ScenarioKind::UniformTexture,
        ScenarioKind::SymmetricBifurcation,
        ScenarioKind::DeadEnd,
    ];

    const NAMES: [&'static str; 6] = [
        "corridor_gap",
        "l_path",
        "diagonal_band",
        "uniform_texture",
        "symmetric_bifurcation",
        "dead_end",
    ];

    pub fn as_str(self) -> &'static str {
        let idx = Self::ALL.iter().position(|&k| k == self).expect("kind listed in ALL");
        Self::NAMES[idx]
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ScenarioKind {
    type Err = ScenarioError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm = s.trim().to_ascii_lowercase().replace('-', "_");
        Self::NAMES
            .iter()
            .position(|&n| n == norm)
            .map(|i| Self::ALL[i])
            .ok_or_else(|| ScenarioError::UnknownKind(s.to_string()))
    }
}

/// Axis-aligned rectangle in meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub min: P,
    pub max: P,
}

impl Rect {
    pub fn new(x0: f64, y0: f64, x1: f64, y1: f64) -> Self {
        Self {
            min: P::new(x0.min(x1), y0.min(y1)),
            max: P::new(x0.max(x1), y0.max(y1)),
        }
    }

    pub fn width(&self) -> f64 {
        self.max.x - self.min.x
    }

    pub fn height(&self) -> f64 {
        self.max.y - self.min.y
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn contains(&self, p: P) -> bool {
        p.x >= self.min.x && p.x <= self.max.x && p.y >= self.min.y && p.y <= self.max.y
    }
}

/// A textured floor point. Mirror-image features share a response key so a
/// detector ranks them identically.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WorldFeature {
    pub position: P,
    pub response_key: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorldScenario {
    pub name: String,
    pub kind: ScenarioKind,
    pub seed: u64,
    pub start: P,
    pub goal: P,
    pub bounds: Rect,
    pub features: Vec<WorldFeature>,
}

impl WorldScenario {
    pub fn validate(&self) -> Result<(), ScenarioError> {
        if (self.goal - self.start).norm() <= 0.0 {
            return Err(ScenarioError::Invalid("start and goal coincide".into()));
        }
        if let Some(f) = self.features.iter().find(|f| !self.bounds.contains(f.position)) {
            return Err(ScenarioError::Invalid(format!(
                "feature at ({}, {}) lies outside the bounds",
                f.position.x, f.position.y
            )));
        }
        Ok(())
    }

    pub fn straight_line_length(&self) -> f64 {
        (self.goal - self.start).norm()
    }

    pub fn feature_positions(&self) -> impl Iterator<Item = P> + '_ {
        self.features.iter().map(|f| f.position)
    }
}

/// Geometry knobs shared by the layouts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LayoutParams {
    /// Features per square meter on textured floor.
    pub rich_density: f64,
    /// Length of the texture-less gap along the path at the detour level, meters.
    pub gap_width: f64,
    /// Width of the texture-less seam left across the detour, meters.
    pub seam_width: f64,
}

impl Default for LayoutParams {
    fn default() -> Self {
        Self {
            rich_density: 30.0,
            gap_width: 2.0,
            seam_width: 0.8,
        }
    }
}

pub const START: P = P { x: 0.0, y: 0.0 };
pub const GOAL: P = P { x: 10.0, y: 0.0 };

/// Builds a layout with default geometry.
pub fn make_scenario(kind: ScenarioKind, seed: u64) -> WorldScenario {
    make_scenario_with(kind, seed, &LayoutParams::default())
}

pub fn make_scenario_with(kind: ScenarioKind, seed: u64, layout: &LayoutParams) -> WorldScenario {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let density = layout.rich_density;
    let (bounds, features) = match kind {
        ScenarioKind::UniformTexture => {
            let bounds = Rect::new(-2.0, -3.0, 12.0, 3.0);
            (bounds, scatter(&mut rng, bounds, density, |_| true))
        }
        ScenarioKind::CorridorGap => {
            let bounds = Rect::new(-2.0, -3.5, 12.0, 3.5);
            let gap = GapBand::new(layout.gap_width, layout.seam_width);
            (bounds, scatter(&mut rng, bounds, density, |p| !gap.contains(p)))
        }
        ScenarioKind::LPath => {
            let bounds = Rect::new(-2.0, -2.5, 12.0, 4.0);
            let rich = |p: P| {
                (p - START).norm() <= 1.6
                    || Rect::new(-1.0, 0.0, 1.0, 3.5).contains(p)
                    || Rect::new(-1.0, 1.8, 11.0, 3.5).contains(p)
                    || (p - GOAL).norm() <= 2.2
                    || Rect::new(9.0, 0.0, 11.0, 3.5).contains(p)
            };
            (bounds, scatter(&mut rng, bounds, density, rich))
        }
        ScenarioKind::DiagonalBand => {
            let bounds = Rect::new(-2.0, -2.5, 12.0, 4.5);
            let apex = P::new(5.0, 3.0);
            let rich = |p: P| {
                (p - START).norm() <= 1.6
                    || (p - GOAL).norm() <= 1.6
                    || segment_distance(p, START, apex) <= 0.9
                    || segment_distance(p, apex, GOAL) <= 0.9
            };
            (bounds, scatter(&mut rng, bounds, density, rich))
        }
        ScenarioKind::SymmetricBifurcation => {
            let bounds = Rect::new(-2.0, -3.5, 12.0, 3.5);
            let rich = |p: P| {
                let ay = p.y.abs();
                p.x <= 3.0 || p.x >= 7.0 || ay >= 1.4
            };
            (bounds, mirrored_scatter(&mut rng, bounds, density * 0.5, rich))
        }
        ScenarioKind::DeadEnd => {
            let bounds = Rect::new(-2.0, -3.0, 12.0, 3.0);
            let rich = |p: P| {
                Rect::new(-2.0, -1.3, 5.0, 1.3).contains(p) || (p - START).norm() <= 2.5 || (p - GOAL).norm() <= 2.5
            };
            (bounds, scatter(&mut rng, bounds, density, rich))
        }
    };
    WorldScenario {
        name: format!("{kind}-{seed}"),
        kind,
        seed,
        start: START,
        goal: GOAL,
        bounds,
        features,
    }
}

/// Feature-free band across the straight path. Its entry and exit edges
/// slant so the gap is narrowest (`width`) at the detour level `y = top`
/// and widens below it.
#[derive(Debug, Clone, Copy)]
struct GapBand {
    center_x: f64,
    half_width: f64,
    top: f64,
    slope: f64,
    seam_half: f64,
}

impl GapBand {
    fn new(width: f64, seam: f64) -> Self {
        Self {
            center_x: 5.0,
            half_width: width / 2.0,
            top: 1.0,
            slope: 0.8,
            seam_half: seam / 2.0,
        }
    }

    fn contains(&self, p: P) -> bool {
        if p.y >= self.top {
            return (p.x - self.center_x).abs() < self.seam_half;
        }
        let half = (self.half_width + self.slope * (self.top - p.y)).min(3.5);
        (p.x - self.center_x).abs() < half
    }
}

/// Uniform scatter of `round(density·area)` candidates over `bounds`, keeping
/// those accepted by `keep`.
pub fn scatter<R: Rng, F: Fn(P) -> bool>(rng: &mut R, bounds: Rect, density: f64, keep: F) -> Vec<WorldFeature> {
    let n = (density * bounds.area()).round() as usize;
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let p = P::new(
            rng.gen_range(bounds.min.x..bounds.max.x),
            rng.gen_range(bounds.min.y..bounds.max.y),
        );
        if keep(p) {
            out.push(WorldFeature {
                position: p,
                response_key: out.len() as u64,
            });
        }
    }
    out
}

/// Scatter on the upper half of a bounds symmetric about y = 0, mirrored to
/// the lower half. `density` applies to the sampled half.
fn mirrored_scatter<R: Rng, F: Fn(P) -> bool>(rng: &mut R, bounds: Rect, density: f64, keep: F) -> Vec<WorldFeature> {
    let upper = Rect::new(bounds.min.x, 0.0, bounds.max.x, bounds.max.y);
    let n = (2.0 * density * upper.area()).round() as usize;
    let mut out = Vec::with_capacity(2 * n);
    for _ in 0..n {
        let p = P::new(rng.gen_range(upper.min.x..upper.max.x), rng.gen_range(0.0..upper.max.y));
        if p.y > 0.0 && keep(p) {
            let key = (out.len() / 2) as u64;
            out.push(WorldFeature {
                position: p,
                response_key: key,
            });
            out.push(WorldFeature {
                position: P::new(p.x, -p.y),
                response_key: key,
            });
        }
    }
    out
}

fn segment_distance(p: P, a: P, b: P) -> f64 {
    let ab = b - a;
    let t = ((p - a).dot(ab) / ab.dot(ab)).clamp(0.0, 1.0);
    (p - (a + ab * t)).norm()
}
