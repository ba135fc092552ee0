use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::OutputFormat;
use crate::error::{Error, Result};

pub const TRAJECTORY_SCHEMA: &str = "rodsim/trajectory-v1";

pub type Point = [f64; 3];

/// Constraint residuals of the state behind a frame.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Drift {
    pub r4: f64,
    pub r5: f64,
    pub r6: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RodFrame {
    pub positions: Vec<Point>,
    pub tip: Point,
    /// Absent for trajectories read back from CSV.
    pub energy: Option<f64>,
    pub drift: Option<Drift>,
}

impl RodFrame {
    pub fn new(positions: Vec<Point>, energy: Option<f64>, drift: Option<Drift>) -> Self {
        let tip = *positions.last().expect("frames hold at least one node");
        Self {
            positions,
            tip,
            energy,
            drift,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Frame {
    pub time: f64,
    pub rods: Vec<RodFrame>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub schema: String,
    pub rods: usize,
    pub nodes: usize,
    pub frames: Vec<Frame>,
}

impl Trajectory {
    pub fn new(rods: usize, nodes: usize) -> Self {
        Self {
            schema: TRAJECTORY_SCHEMA.into(),
            rods,
            nodes,
            frames: Vec::new(),
        }
    }

    pub fn times(&self) -> Vec<f64> {
        self.frames.iter().map(|f| f.time).collect()
    }

    /// Tip positions of rod `k`, one per frame.
    pub fn tip_path(&self, k: usize) -> Vec<Point> {
        self.frames.iter().map(|f| f.rods[k].tip).collect()
    }

    /// Shape and time-ordering checks.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidInput(msg));
        if self.schema != TRAJECTORY_SCHEMA {
            return bad(format!("unsupported trajectory schema {:?}", self.schema));
        }
        if self.frames.windows(2).any(|w| !(w[1].time > w[0].time)) {
            return bad("frame times are not strictly increasing".into());
        }
        for (i, f) in self.frames.iter().enumerate() {
            if f.rods.len() != self.rods {
                return bad(format!("frame {i} holds {} rods, expected {}", f.rods.len(), self.rods));
            }
            if let Some(k) = f.rods.iter().position(|r| r.positions.len() != self.nodes) {
                return bad(format!("frame {i}, rod {k} does not hold {} nodes", self.nodes));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let t: Self = serde_json::from_str(text)?;
        t.validate()?;
        Ok(t)
    }

    /// Header `t,rod,node,x,y,z` and one row per frame, rod and node, with
    /// floats in shortest round-trip form.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,rod,node,x,y,z\n");
        for f in &self.frames {
            for (k, rod) in f.rods.iter().enumerate() {
                for (i, [x, y, z]) in rod.positions.iter().enumerate() {
                    writeln!(out, "{},{k},{i},{x},{y},{z}", f.time).expect("writing to a String");
                }
            }
        }
        out
    }

    /// Inverse of [`Trajectory::to_csv`]. Rows must come grouped by frame,
    /// then rod, then node.
    pub fn from_csv(text: &str) -> Result<Self> {
        let bad = |line: usize, msg: &str| Error::InvalidInput(format!("CSV line {line}: {msg}"));
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, "t,rod,node,x,y,z")) => {}
            _ => return Err(bad(1, "expected header t,rod,node,x,y,z")),
        }
        let mut frames: Vec<Frame> = Vec::new();
        let mut rods: Vec<Vec<Vec<Point>>> = Vec::new();
        for (idx, line) in lines {
            let no = idx + 1;
            let cells: Vec<&str> = line.split(',').collect();
            if cells.len() != 6 {
                return Err(bad(no, "expected 6 columns"));
            }
            let float = |c: &str| c.parse::<f64>().map_err(|_| bad(no, "bad number"));
            let index = |c: &str| c.parse::<usize>().map_err(|_| bad(no, "bad index"));
            let time = float(cells[0])?;
            let (rod, node) = (index(cells[1])?, index(cells[2])?);
            let point = [float(cells[3])?, float(cells[4])?, float(cells[5])?];
            let new_frame = frames.last().is_none_or(|f| f.time.to_bits() != time.to_bits());
            if new_frame {
                frames.push(Frame {
                    time,
                    rods: Vec::new(),
                });
                rods.push(Vec::new());
            }
            let current = rods.last_mut().expect("a frame was just pushed");
            if rod == current.len() && node == 0 {
                current.push(Vec::new());
            }
            let last = current.len();
            match current.get_mut(rod) {
                Some(p) if rod + 1 == last && node == p.len() => p.push(point),
                _ => return Err(bad(no, "rows are not grouped by frame, rod and node")),
            }
        }
        for (frame, positions) in frames.iter_mut().zip(rods) {
            frame.rods = positions.into_iter().map(|p| RodFrame::new(p, None, None)).collect();
        }
        let (rods, nodes) = frames
            .first()
            .map_or((0, 0), |f| (f.rods.len(), f.rods[0].positions.len()));
        let t = Trajectory {
            schema: TRAJECTORY_SCHEMA.into(),
            rods,
            nodes,
            frames,
        };
        t.validate()?;
        Ok(t)
    }

    pub fn render(&self, format: OutputFormat) -> Result<String> {
        match format {
            OutputFormat::Json => self.to_json(),
            OutputFormat::Csv => Ok(self.to_csv()),
        }
    }

    pub fn write(&self, path: impl AsRef<Path>, format: OutputFormat) -> Result<()> {
        std::fs::write(path, self.render(format)?)?;
        Ok(())
    }

    /// Reads either format, telling them apart by the first byte.
    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        if text.trim_start().starts_with('{') {
            Self::from_json(&text)
        } else {
            Self::from_csv(&text)
        }
    }
}
