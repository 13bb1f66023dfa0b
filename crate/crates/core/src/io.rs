//! JSON documents for constraints and motions, CSV for trajectories and
//! deviation series.
//!
//! Rotations in documents take one of three forms, or are omitted for the
//! identity:
//!
//! ```json
//! {"tilt_axis": [1, 0, 0], "tilt_angle": 0.2, "yaw": 0.1}
//! {"yaw": 0.1}
//! {"quaternion": [1, 0, 0, 0]}
//! ```
//!
//! Trajectory CSV columns: `t, q1..q20, status`. Deviation CSV columns:
//! `t, com_err, Ixx_err, Iyy_err, Izz_err, orient_err`.

use std::io::{Read, Write};
use std::path::Path;

use nalgebra::{Quaternion, UnitQuaternion};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::feasibility::{FootFrame, FootFrames};
use crate::geom::{fused_yaw, rodrigues, yaw_rotation, Rotation, Vec3};
use crate::model::JOINT_COUNT;
use crate::motion::{Interpolation, JointTrajectory, Keyframe, Motion, TrajectoryFrame};
use crate::oracle::DeviationReport;
use crate::posegen::{ConstraintSet, Status};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RotationDoc {
    Tilt {
        tilt_axis: [f64; 3],
        tilt_angle: f64,
        #[serde(default)]
        yaw: f64,
    },
    Quaternion {
        /// w, x, y, z
        quaternion: [f64; 4],
    },
    Yaw {
        yaw: f64,
    },
}

impl RotationDoc {
    pub fn to_rotation(&self) -> Result<Rotation> {
        match *self {
            RotationDoc::Tilt { tilt_axis, tilt_angle, yaw } => {
                let axis = Vec3::from(tilt_axis);
                let n = axis.norm();
                if n < 1e-12 {
                    if tilt_angle != 0.0 {
                        return Err(Error::InvalidInput("tilt_axis is zero".into()));
                    }
                    return Ok(yaw_rotation(yaw));
                }
                Ok(yaw_rotation(yaw) * rodrigues(&(axis / n), tilt_angle))
            }
            RotationDoc::Quaternion { quaternion: [w, x, y, z] } => {
                let q = Quaternion::new(w, x, y, z);
                let n = q.norm();
                if !(n > 1e-12) || !n.is_finite() {
                    return Err(Error::InvalidInput("quaternion has zero norm".into()));
                }
                Ok(UnitQuaternion::from_quaternion(q).to_rotation_matrix())
            }
            RotationDoc::Yaw { yaw } => Ok(yaw_rotation(yaw)),
        }
    }

    /// Tilt-axis form of `r`, or yaw-only when there is no tilt.
    pub fn from_rotation(r: &Rotation) -> Self {
        let yaw = fused_yaw(r);
        let tilt = yaw_rotation(-yaw) * r;
        match tilt.axis_angle() {
            Some((axis, angle)) => RotationDoc::Tilt { tilt_axis: axis.into_inner().into(), tilt_angle: angle, yaw },
            None => RotationDoc::Yaw { yaw },
        }
    }
}

fn rotation_or_identity(doc: &Option<RotationDoc>) -> Result<Rotation> {
    doc.as_ref().map_or(Ok(Rotation::identity()), RotationDoc::to_rotation)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FootDoc {
    pub pos: [f64; 3],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rot: Option<RotationDoc>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FeetDoc {
    pub left: FootDoc,
    pub right: FootDoc,
}

/// Serialized [`ConstraintSet`]; feet and CoM in the world frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstraintDoc {
    pub com: [f64; 3],
    pub feet: FeetDoc,
    #[serde(rename = "R_I", default, skip_serializing_if = "Option::is_none")]
    pub r_i: Option<RotationDoc>,
    #[serde(rename = "I_z")]
    pub i_z: f64,
    #[serde(rename = "I_psi")]
    pub i_psi: f64,
    #[serde(rename = "psi_I", default)]
    pub psi_i: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trunk_tilt: Option<[f64; 3]>,
}

impl ConstraintDoc {
    pub fn to_constraints(&self) -> Result<ConstraintSet> {
        let foot = |f: &FootDoc| Ok::<_, Error>(FootFrame::new(Vec3::from(f.pos), rotation_or_identity(&f.rot)?));
        let cs = ConstraintSet {
            com: Vec3::from(self.com),
            feet: FootFrames { left: foot(&self.feet.left)?, right: foot(&self.feet.right)? },
            r_i: rotation_or_identity(&self.r_i)?,
            i_z: self.i_z,
            i_psi: self.i_psi,
            psi_i: self.psi_i,
            trunk_tilt: self.trunk_tilt.map(Vec3::from),
        };
        cs.validate()?;
        Ok(cs)
    }

    pub fn from_constraints(cs: &ConstraintSet) -> Self {
        let foot = |f: &FootFrame| FootDoc { pos: f.pos.into(), rot: Some(RotationDoc::from_rotation(&f.rot)) };
        Self {
            com: cs.com.into(),
            feet: FeetDoc { left: foot(&cs.feet.left), right: foot(&cs.feet.right) },
            r_i: Some(RotationDoc::from_rotation(&cs.r_i)),
            i_z: cs.i_z,
            i_psi: cs.i_psi,
            psi_i: cs.psi_i,
            trunk_tilt: cs.trunk_tilt.map(Into::into),
        }
    }
}

pub fn parse_constraints(text: &str) -> Result<ConstraintSet> {
    serde_json::from_str::<ConstraintDoc>(text)?.to_constraints()
}

pub fn load_constraints_file(path: impl AsRef<Path>) -> Result<ConstraintSet> {
    parse_constraints(&read_text(path)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KeyframeDoc {
    pub t: f64,
    #[serde(flatten)]
    pub constraints: ConstraintDoc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MotionDoc {
    pub name: String,
    #[serde(default)]
    pub interpolation: Interpolation,
    pub keyframes: Vec<KeyframeDoc>,
}

pub fn parse_motion(text: &str) -> Result<Motion> {
    let doc: MotionDoc = serde_json::from_str(text)?;
    let keyframes = doc
        .keyframes
        .iter()
        .map(|k| Ok(Keyframe { t: k.t, constraints: k.constraints.to_constraints()? }))
        .collect::<Result<Vec<_>>>()?;
    Motion::new(doc.name, keyframes, doc.interpolation)
}

pub fn load_motion_file(path: impl AsRef<Path>) -> Result<Motion> {
    parse_motion(&read_text(path)?)
}

fn read_text(path: impl AsRef<Path>) -> Result<String> {
    let path = path.as_ref();
    let mut text = String::new();
    std::fs::File::open(path)
        .and_then(|mut f| f.read_to_string(&mut text))
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    Ok(text)
}

fn csv_err(e: csv::Error) -> Error {
    if e.is_io_error() {
        Error::Io(e.to_string())
    } else {
        Error::Parse(e.to_string())
    }
}

/// Writes `t, q1..q20, status`; floats use the shortest exact representation.
pub fn write_trajectory_csv<W: Write>(traj: &JointTrajectory, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["t".to_string()];
    header.extend((1..=JOINT_COUNT).map(|i| format!("q{i}")));
    header.push("status".into());
    w.write_record(&header).map_err(csv_err)?;
    for f in &traj.frames {
        let mut row = vec![f.t.to_string()];
        row.extend(f.joints.iter().map(|q| q.to_string()));
        row.push(f.status.to_string());
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_trajectory_csv<R: Read>(input: R) -> Result<Vec<TrajectoryFrame>> {
    let mut r = csv::Reader::from_reader(input);
    let mut frames = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec.map_err(csv_err)?;
        if rec.len() != JOINT_COUNT + 2 {
            return Err(Error::Parse(format!("row {}: expected {} columns, got {}", line + 1, JOINT_COUNT + 2, rec.len())));
        }
        let num = |i: usize| {
            rec[i].trim().parse::<f64>().map_err(|e| Error::Parse(format!("row {} column {}: {e}", line + 1, i + 1)))
        };
        let mut joints = [0.0; JOINT_COUNT];
        for (k, q) in joints.iter_mut().enumerate() {
            *q = num(k + 1)?;
        }
        frames.push(TrajectoryFrame {
            t: num(0)?,
            joints,
            status: rec[JOINT_COUNT + 1].trim().parse::<Status>()?,
        });
    }
    Ok(frames)
}

pub fn write_deviation_csv<W: Write>(rows: &[(f64, DeviationReport)], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t", "com_err", "Ixx_err", "Iyy_err", "Izz_err", "orient_err"]).map_err(csv_err)?;
    for (t, d) in rows {
        let [a, b, c] = d.moment_errors;
        w.write_record([t, &d.com_error, &a, &b, &c, &d.orientation_error].map(|x| x.to_string()))
            .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}
