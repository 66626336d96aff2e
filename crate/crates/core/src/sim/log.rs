//! Per-step trajectory records and their CSV form.

use std::io::{self, Read, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::RegionClass;
use crate::vec2::Vec2;

pub const CSV_HEADER: &str =
    "time,true_x,true_y,est_x,est_y,vg_x,vg_y,vf_x,vf_y,v_x,v_y,lambda,n_f,region,local_min,lost";

#[derive(Debug, Error)]
pub enum LogError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepRecord {
    pub time: f64,
    pub true_pose: Vec2<f64>,
    pub estimated_pose: Vec2<f64>,
    pub goal_velocity: Vec2<f64>,
    /// Image frame; empty cells in CSV when absent.
    pub feature_velocity: Option<Vec2<f64>>,
    pub command: Vec2<f64>,
    pub lambda: f64,
    pub n_f: usize,
    pub region: RegionClass,
    pub local_minimum: bool,
    pub lost: bool,
}

#[derive(Debug, Serialize, Deserialize)]
struct Row {
    time: f64,
    true_x: f64,
    true_y: f64,
    est_x: f64,
    est_y: f64,
    vg_x: f64,
    vg_y: f64,
    vf_x: Option<f64>,
    vf_y: Option<f64>,
    v_x: f64,
    v_y: f64,
    lambda: f64,
    n_f: usize,
    region: String,
    local_min: u8,
    lost: u8,
}

impl From<&StepRecord> for Row {
    fn from(r: &StepRecord) -> Self {
        Row {
            time: r.time,
            true_x: r.true_pose.x,
            true_y: r.true_pose.y,
            est_x: r.estimated_pose.x,
            est_y: r.estimated_pose.y,
            vg_x: r.goal_velocity.x,
            vg_y: r.goal_velocity.y,
            vf_x: r.feature_velocity.map(|v| v.x),
            vf_y: r.feature_velocity.map(|v| v.y),
            v_x: r.command.x,
            v_y: r.command.y,
            lambda: r.lambda,
            n_f: r.n_f,
            region: r.region.as_str().to_string(),
            local_min: u8::from(r.local_minimum),
            lost: u8::from(r.lost),
        }
    }
}

impl TryFrom<Row> for StepRecord {
    type Error = String;

    fn try_from(row: Row) -> Result<Self, String> {
        let flag = |name: &str, v: u8| match v {
            0 => Ok(false),
            1 => Ok(true),
            other => Err(format!("{name}: expected 0 or 1, found {other}")),
        };
        let feature_velocity = match (row.vf_x, row.vf_y) {
            (Some(x), Some(y)) => Some(Vec2::new(x, y)),
            (None, None) => None,
            _ => return Err("vf_x and vf_y must both be present or both empty".into()),
        };
        let region = match row.region.as_str() {
            "goal_friendly" => RegionClass::GoalFriendly,
            "feature_friendly" => RegionClass::FeatureFriendly,
            other => return Err(format!("unknown region `{other}`")),
        };
        Ok(StepRecord {
            time: row.time,
            true_pose: Vec2::new(row.true_x, row.true_y),
            estimated_pose: Vec2::new(row.est_x, row.est_y),
            goal_velocity: Vec2::new(row.vg_x, row.vg_y),
            feature_velocity,
            command: Vec2::new(row.v_x, row.v_y),
            lambda: row.lambda,
            n_f: row.n_f,
            region,
            local_minimum: flag("local_min", row.local_min)?,
            lost: flag("lost", row.lost)?,
        })
    }
}

fn csv_error(err: csv::Error) -> LogError {
    let line = err.position().map_or(0, |p| p.line() as usize);
    match err.into_kind() {
        csv::ErrorKind::Io(e) => LogError::Io(e),
        other => LogError::Parse {
            line,
            msg: format!("{other:?}"),
        },
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrajectoryLog {
    pub records: Vec<StepRecord>,
}

impl TrajectoryLog {
    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), LogError> {
        let mut w = csv::Writer::from_writer(out);
        if self.records.is_empty() {
            w.write_record(CSV_HEADER.split(',')).map_err(csv_error)?;
        }
        for r in &self.records {
            w.serialize(Row::from(r)).map_err(csv_error)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(input: R) -> Result<Self, LogError> {
        let mut rdr = csv::Reader::from_reader(input);
        let header = rdr.headers().map_err(csv_error)?;
        if header.iter().ne(CSV_HEADER.split(',')) {
            return Err(LogError::Parse {
                line: 1,
                msg: "unexpected header".into(),
            });
        }
        let mut records = Vec::new();
        for row in rdr.deserialize::<Row>() {
            let row = row.map_err(csv_error)?;
            let line = records.len() + 2;
            records.push(StepRecord::try_from(row).map_err(|msg| LogError::Parse { line, msg })?);
        }
        Ok(Self { records })
    }
}
