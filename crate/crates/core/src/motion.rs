//! Keyframed motions and their rendering into joint trajectories.
//!
//! Positions and scalar inertia channels follow cubic splines whose end
//! slopes are zero (or straight lines in linear mode); foot, inertia and
//! trunk orientations are slerped between neighbouring keyframes.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::feasibility::{FootFrame, FootFrames};
use crate::geom::{Rotation, Vec3};
use crate::model::{RobotSpec, JOINT_COUNT, JOINT_NAMES};
use crate::posegen::{generate_pose_with, ConstraintSet, PoseConfig, PoseSolution, Status};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Interpolation {
    #[default]
    Cubic,
    Linear,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Keyframe {
    pub t: f64,
    pub constraints: ConstraintSet,
}

/// Scalar channels packed per keyframe: com (3), left foot (3), right foot
/// (3), I_z, I_psi, psi_I.
const CHANNELS: usize = 12;

fn pack(cs: &ConstraintSet) -> [f64; CHANNELS] {
    let (c, l, r) = (cs.com, cs.feet.left.pos, cs.feet.right.pos);
    [c.x, c.y, c.z, l.x, l.y, l.z, r.x, r.y, r.z, cs.i_z, cs.i_psi, cs.psi_i]
}

/// Second derivatives of the interpolating cubic with zero slope at both
/// ends (tridiagonal solve).
fn clamped_spline_moments(t: &[f64], y: &[f64]) -> Vec<f64> {
    let n = t.len();
    let h: Vec<f64> = t.windows(2).map(|w| w[1] - w[0]).collect();
    let mut diag = vec![0.0; n];
    let mut upper = vec![0.0; n];
    let mut rhs = vec![0.0; n];
    diag[0] = h[0] / 3.0;
    upper[0] = h[0] / 6.0;
    rhs[0] = (y[1] - y[0]) / h[0];
    for i in 1..n - 1 {
        diag[i] = (h[i - 1] + h[i]) / 3.0;
        upper[i] = h[i] / 6.0;
        rhs[i] = (y[i + 1] - y[i]) / h[i] - (y[i] - y[i - 1]) / h[i - 1];
    }
    diag[n - 1] = h[n - 2] / 3.0;
    rhs[n - 1] = -(y[n - 1] - y[n - 2]) / h[n - 2];
    // sub-diagonal equals the super-diagonal shifted by one
    let lower = |i: usize| h[i - 1] / 6.0;
    for i in 1..n {
        let w = lower(i) / diag[i - 1];
        diag[i] -= w * upper[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    let mut m = vec![0.0; n];
    m[n - 1] = rhs[n - 1] / diag[n - 1];
    for i in (0..n - 1).rev() {
        m[i] = (rhs[i] - upper[i] * m[i + 1]) / diag[i];
    }
    m
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Motion {
    pub name: String,
    pub keyframes: Vec<Keyframe>,
    pub interpolation: Interpolation,
    /// Spline second derivatives per keyframe and channel.
    moments: Vec<[f64; CHANNELS]>,
}

/// Constraints sampled from a motion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub constraints: ConstraintSet,
    /// `t` was outside the keyframe range and was clamped.
    pub clamped: bool,
}

fn slerp(a: &Rotation, b: &Rotation, s: f64) -> Rotation {
    a.slerp(b, s)
}

fn slerp_dir(a: &Vec3, b: &Vec3, s: f64) -> Vec3 {
    let axis = a.cross(b);
    let n = axis.norm();
    if n < 1e-12 {
        return if s < 0.5 { *a } else { *b };
    }
    let angle = n.atan2(a.dot(b));
    Rotation::from_axis_angle(&nalgebra::Unit::new_unchecked(axis / n), angle * s) * a
}

impl Motion {
    pub fn new(name: impl Into<String>, keyframes: Vec<Keyframe>, interpolation: Interpolation) -> Result<Self> {
        if keyframes.len() < 2 {
            return Err(Error::InvalidInput("a motion needs at least two keyframes".into()));
        }
        if keyframes[0].t < 0.0 || !keyframes.iter().all(|k| k.t.is_finite()) {
            return Err(Error::InvalidInput("keyframe times must be finite and non-negative".into()));
        }
        if keyframes.windows(2).any(|w| w[1].t <= w[0].t) {
            return Err(Error::InvalidInput("keyframe times must be strictly increasing".into()));
        }
        let n = keyframes.len();
        let mut moments = vec![[0.0; CHANNELS]; n];
        if interpolation == Interpolation::Cubic {
            let t: Vec<f64> = keyframes.iter().map(|k| k.t).collect();
            let packed: Vec<[f64; CHANNELS]> = keyframes.iter().map(|k| pack(&k.constraints)).collect();
            for c in 0..CHANNELS {
                let y: Vec<f64> = packed.iter().map(|p| p[c]).collect();
                for (i, m) in clamped_spline_moments(&t, &y).into_iter().enumerate() {
                    moments[i][c] = m;
                }
            }
        }
        Ok(Self { name: name.into(), keyframes, interpolation, moments })
    }

    pub fn start(&self) -> f64 {
        self.keyframes[0].t
    }

    pub fn end(&self) -> f64 {
        self.keyframes[self.keyframes.len() - 1].t
    }

    pub fn duration(&self) -> f64 {
        self.end() - self.start()
    }

    /// Constraints at time `t`. Keyframe times return the keyframe exactly.
    pub fn sample(&self, t: f64) -> Sample {
        let clamped = t < self.start() || t > self.end();
        let t = t.clamp(self.start(), self.end());
        if let Some(k) = self.keyframes.iter().find(|k| k.t == t) {
            return Sample { constraints: k.constraints, clamped };
        }
        let i = self.keyframes.partition_point(|k| k.t <= t) - 1;
        let (k0, k1) = (&self.keyframes[i], &self.keyframes[i + 1]);
        let h = k1.t - k0.t;
        let s = (t - k0.t) / h;
        let (a, b) = (1.0 - s, s);
        let (y0, y1) = (pack(&k0.constraints), pack(&k1.constraints));
        let (m0, m1) = (&self.moments[i], &self.moments[i + 1]);
        let v: [f64; CHANNELS] = std::array::from_fn(|c| {
            a * y0[c] + b * y1[c] + ((a * a * a - a) * m0[c] + (b * b * b - b) * m1[c]) * h * h / 6.0
        });
        let (c0, c1) = (&k0.constraints, &k1.constraints);
        let trunk_tilt = match (c0.trunk_tilt, c1.trunk_tilt) {
            (Some(p), Some(q)) => Some(slerp_dir(&p, &q, s)),
            (p, _) => p,
        };
        let constraints = ConstraintSet {
            com: Vec3::new(v[0], v[1], v[2]),
            feet: FootFrames {
                left: FootFrame::new(Vec3::new(v[3], v[4], v[5]), slerp(&c0.feet.left.rot, &c1.feet.left.rot, s)),
                right: FootFrame::new(Vec3::new(v[6], v[7], v[8]), slerp(&c0.feet.right.rot, &c1.feet.right.rot, s)),
            },
            r_i: slerp(&c0.r_i, &c1.r_i, s),
            i_z: v[9].max(0.0),
            i_psi: v[10].max(0.0),
            psi_i: v[11],
            trunk_tilt,
        };
        Sample { constraints, clamped }
    }

    /// Sample times `start + k / rate` up to and including the last keyframe.
    pub fn frame_times(&self, rate: f64) -> Vec<f64> {
        let count = (self.duration() * rate + 1e-9).floor() as usize + 1;
        (0..count).map(|k| self.start() + k as f64 / rate).collect()
    }
}

/// Constraints of `motion` at `t`; see [`Motion::sample`].
pub fn sample_motion(motion: &Motion, t: f64) -> Sample {
    motion.sample(t)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrajectoryFrame {
    pub t: f64,
    pub joints: [f64; JOINT_COUNT],
    pub status: Status,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JointTrajectory {
    pub rate: f64,
    pub frames: Vec<TrajectoryFrame>,
    pub infeasible_frames: usize,
}

/// Default bound on a joint's change between two 10 ms frames, in radians.
pub const DEFAULT_RATE_LIMIT: f64 = 0.15;

/// A joint that moved further than allowed between two frames.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateViolation {
    /// Time of the later frame.
    pub t: f64,
    pub joint: &'static str,
    pub delta: f64,
}

impl JointTrajectory {
    /// Consecutive-frame joint changes above `limit` radians.
    pub fn rate_violations(&self, limit: f64) -> Vec<RateViolation> {
        let mut out = Vec::new();
        for w in self.frames.windows(2) {
            for (i, (a, b)) in w[0].joints.iter().zip(&w[1].joints).enumerate() {
                let delta = (b - a).abs();
                if delta > limit {
                    out.push(RateViolation { t: w[1].t, joint: JOINT_NAMES[i], delta });
                }
            }
        }
        out
    }

    /// Largest joint change between consecutive frames.
    pub fn max_step(&self) -> f64 {
        self.frames
            .windows(2)
            .flat_map(|w| w[0].joints.iter().zip(&w[1].joints).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max)
    }
}

/// A rendered frame with the full solution kept.
#[derive(Debug, Clone, PartialEq)]
pub struct RenderedFrame {
    pub t: f64,
    pub constraints: ConstraintSet,
    pub solution: PoseSolution,
}

/// Solves every frame of `motion` at `rate` Hz, in time order.
pub fn render_frames(motion: &Motion, rate: f64, spec: &RobotSpec, cfg: &PoseConfig) -> Result<Vec<RenderedFrame>> {
    if !(rate > 0.0) || !rate.is_finite() {
        return Err(Error::out_of_range("rate", rate, "> 0"));
    }
    motion
        .frame_times(rate)
        .into_iter()
        .map(|t| {
            let constraints = motion.sample(t).constraints;
            Ok(RenderedFrame { t, constraints, solution: generate_pose_with(spec, &constraints, cfg)? })
        })
        .collect()
}

pub fn render_trajectory(motion: &Motion, rate: f64, spec: &RobotSpec) -> Result<JointTrajectory> {
    render_trajectory_with(motion, rate, spec, &PoseConfig::default())
}

pub fn render_trajectory_with(motion: &Motion, rate: f64, spec: &RobotSpec, cfg: &PoseConfig) -> Result<JointTrajectory> {
    let frames: Vec<TrajectoryFrame> = render_frames(motion, rate, spec, cfg)?
        .into_iter()
        .map(|f| TrajectoryFrame { t: f.t, joints: f.solution.joints, status: f.solution.report.status })
        .collect();
    let infeasible_frames = frames.iter().filter(|f| f.status == Status::Infeasible).count();
    Ok(JointTrajectory { rate, frames, infeasible_frames })
}
