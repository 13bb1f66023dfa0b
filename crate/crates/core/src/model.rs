//! Robot description for the five point-mass reduction.
//!
//! A humanoid is reduced to a trunk mass (torso plus head) and one mass per
//! limb. Each limb is a triangle formed by its origin joint (hip/shoulder),
//! the middle joint (knee/elbow) and the end joint (ankle/wrist). The limb
//! mass sits inside that triangle at a point fixed by two distribution
//! parameters, so a mass position maps one-to-one onto a limb bend.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::Vec3;

/// Location of a limb mass measured from the limb origin.
///
/// `p_s` sections the lower link (from the middle joint towards the end);
/// `p_l` is the fraction of the origin → section-point vector at which the
/// mass lies. A uniform triangle has `p_s = 1/2`, `p_l = 2/3`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistributionParams {
    pub p_s: f64,
    pub p_l: f64,
}

/// The same mass point measured from the limb end.
///
/// `p_si` sections the upper link from the middle joint towards the origin,
/// `p_li` is the fraction of the end → section-point vector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InverseDistributionParams {
    pub p_si: f64,
    pub p_li: f64,
}

impl DistributionParams {
    pub fn new(p_s: f64, p_l: f64) -> Result<Self> {
        for (name, v) in [("p_s", p_s), ("p_l", p_l)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::out_of_range(name, v, "[0, 1]"));
            }
        }
        Ok(Self { p_s, p_l })
    }

    pub fn lerp(&self, other: &Self, w: f64) -> Self {
        Self {
            p_s: self.p_s + (other.p_s - self.p_s) * w,
            p_l: self.p_l + (other.p_l - self.p_l) * w,
        }
    }
}

/// Inverse distribution parameters from the barycentric form of the mass
/// point, `M = (1 − p_l)·O + p_l(1 − p_s)·K + p_l·p_s·A`.
pub fn derive_inverse_params(p: DistributionParams) -> Result<InverseDistributionParams> {
    DistributionParams::new(p.p_s, p.p_l)?;
    let p_li = 1.0 - p.p_l * p.p_s;
    if p_li <= 0.0 {
        return Err(Error::InvalidSpec(
            "limb mass located at the end joint (p_l·p_s = 1)".into(),
        ));
    }
    Ok(InverseDistributionParams {
        p_si: (1.0 - p.p_l) / p_li,
        p_li,
    })
}

/// Mass point of the triangle (origin, middle, end) from the origin side.
pub fn mass_point_forward(origin: &Vec3, middle: &Vec3, end: &Vec3, p: &DistributionParams) -> Vec3 {
    let section = middle + (end - middle) * p.p_s;
    origin + (section - origin) * p.p_l
}

/// Mass point of the triangle (origin, middle, end) from the end side.
pub fn mass_point_inverse(
    origin: &Vec3,
    middle: &Vec3,
    end: &Vec3,
    p: &InverseDistributionParams,
) -> Vec3 {
    let section = middle + (origin - middle) * p.p_si;
    end + (section - end) * p.p_li
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

impl Side {
    /// +1 for left, −1 for right (the robot's y-axis points left).
    pub fn sign(self) -> f64 {
        match self {
            Side::Left => 1.0,
            Side::Right => -1.0,
        }
    }
}

/// One limb: upper link `c`, lower link `a`, mass and its distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LimbSpec {
    pub c: f64,
    pub a: f64,
    pub mass: f64,
    pub dist: DistributionParams,
    pub dist_inv: InverseDistributionParams,
    /// Offset from the end frame center to the end joint (foot center → ankle).
    pub end_offset: Vec3,
}

impl LimbSpec {
    pub fn new(c: f64, a: f64, mass: f64, dist: DistributionParams, end_offset: Vec3) -> Result<Self> {
        if !(c > 0.0) {
            return Err(Error::out_of_range("c", c, "> 0"));
        }
        if !(a > 0.0) {
            return Err(Error::out_of_range("a", a, "> 0"));
        }
        if !(mass >= 0.0) {
            return Err(Error::out_of_range("mass", mass, ">= 0"));
        }
        Ok(Self {
            c,
            a,
            mass,
            dist,
            dist_inv: derive_inverse_params(dist)?,
            end_offset,
        })
    }

    pub fn length(&self) -> f64 {
        self.c + self.a
    }

    /// Distance from the limb origin to its mass when fully stretched.
    pub fn mass_reach(&self) -> f64 {
        self.dist.p_l * (self.c + self.dist.p_s * self.a)
    }

    /// Distance from the limb end to its mass when fully stretched.
    pub fn mass_reach_from_end(&self) -> f64 {
        self.length() - self.mass_reach()
    }

    /// Parameter-wise interpolation towards `other` (w = 0 → self).
    pub fn lerp(&self, other: &LimbSpec, w: f64) -> Result<LimbSpec> {
        let mix = |x: f64, y: f64| x + (y - x) * w;
        LimbSpec::new(
            mix(self.c, other.c),
            mix(self.a, other.a),
            mix(self.mass, other.mass),
            self.dist.lerp(&other.dist, w),
            self.end_offset + (other.end_offset - self.end_offset) * w,
        )
    }
}

/// Number of entries in the joint vector.
pub const JOINT_COUNT: usize = 20;

/// Joint vector ordering: left leg, right leg, left arm, right arm, head.
pub const JOINT_NAMES: [&str; JOINT_COUNT] = [
    "left_hip_yaw",
    "left_hip_roll",
    "left_hip_pitch",
    "left_knee_pitch",
    "left_ankle_pitch",
    "left_ankle_roll",
    "right_hip_yaw",
    "right_hip_roll",
    "right_hip_pitch",
    "right_knee_pitch",
    "right_ankle_pitch",
    "right_ankle_roll",
    "left_shoulder_pitch",
    "left_shoulder_roll",
    "left_elbow_pitch",
    "right_shoulder_pitch",
    "right_shoulder_roll",
    "right_elbow_pitch",
    "neck_yaw",
    "head_pitch",
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JointRange {
    pub min: f64,
    pub max: f64,
}

impl JointRange {
    pub const UNLIMITED: JointRange = JointRange {
        min: f64::NEG_INFINITY,
        max: f64::INFINITY,
    };

    pub fn clamp(&self, q: f64) -> f64 {
        q.clamp(self.min, self.max)
    }
}

/// Angle ranges indexed like [`JOINT_NAMES`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JointLimits(pub [JointRange; JOINT_COUNT]);

impl Default for JointLimits {
    fn default() -> Self {
        JointLimits([JointRange::UNLIMITED; JOINT_COUNT])
    }
}

impl JointLimits {
    pub fn index_of(name: &str) -> Option<usize> {
        JOINT_NAMES.iter().position(|n| *n == name)
    }
}

/// Complete description of a robot for the five-mass model.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RobotSpec {
    pub name: String,
    pub trunk_mass: f64,
    /// Base frame → combined trunk and head mass.
    pub trunk_offset: Vec3,
    pub hip_width: f64,
    /// Base frame → left shoulder; the right shoulder is mirrored in y.
    pub shoulder_offset: Vec3,
    /// Left, right.
    pub legs: [LimbSpec; 2],
    /// Left, right.
    pub arms: [LimbSpec; 2],
    pub joint_limits: JointLimits,
}

impl RobotSpec {
    pub fn total_mass(&self) -> f64 {
        aggregate_masses(self).total()
    }

    pub fn leg(&self, side: Side) -> &LimbSpec {
        &self.legs[side_index(side)]
    }

    pub fn arm(&self, side: Side) -> &LimbSpec {
        &self.arms[side_index(side)]
    }

    /// Hip joint origin relative to the base frame.
    pub fn hip_offset(&self, side: Side) -> Vec3 {
        Vec3::new(0.0, side.sign() * self.hip_width / 2.0, 0.0)
    }

    pub fn shoulder(&self, side: Side) -> Vec3 {
        let s = self.shoulder_offset;
        match side {
            Side::Left => s,
            Side::Right => Vec3::new(s.x, -s.y, s.z),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.hip_width > 0.0) {
            return Err(Error::out_of_range("hip_width", self.hip_width, "> 0"));
        }
        if !(self.trunk_mass >= 0.0) {
            return Err(Error::out_of_range("trunk.mass", self.trunk_mass, ">= 0"));
        }
        for leg in &self.legs {
            if !(leg.mass > 0.0) {
                return Err(Error::out_of_range("legs.mass", leg.mass, "> 0"));
            }
        }
        let m = aggregate_masses(self);
        if !(m.upper > 0.0) {
            return Err(Error::InvalidSpec("upper body mass must be positive".into()));
        }
        for (name, r) in JOINT_NAMES.iter().zip(&self.joint_limits.0) {
            if r.min > r.max {
                return Err(Error::InvalidSpec(format!("joint `{name}` has min > max")));
            }
        }
        Ok(())
    }
}

pub(crate) fn side_index(side: Side) -> usize {
    match side {
        Side::Left => 0,
        Side::Right => 1,
    }
}

/// Lower (legs) and upper (trunk + arms) body masses of the dumbbell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LowerUpperMasses {
    pub lower: f64,
    pub upper: f64,
}

impl LowerUpperMasses {
    pub fn total(&self) -> f64 {
        self.lower + self.upper
    }
}

pub fn aggregate_masses(spec: &RobotSpec) -> LowerUpperMasses {
    LowerUpperMasses {
        lower: spec.legs[0].mass + spec.legs[1].mass,
        upper: spec.trunk_mass + spec.arms[0].mass + spec.arms[1].mass,
    }
}

// ---------------------------------------------------------------------------
// Document format

#[derive(Debug, Deserialize)]
struct SpecDoc {
    #[serde(default)]
    name: Option<String>,
    trunk: TrunkDoc,
    hip_width: f64,
    shoulder_offset: [f64; 3],
    legs: Vec<LimbDoc>,
    arms: Vec<LimbDoc>,
    #[serde(default)]
    joint_limits: Vec<JointLimitDoc>,
}

#[derive(Debug, Deserialize)]
struct TrunkDoc {
    mass: f64,
    offset: [f64; 3],
}

#[derive(Debug, Deserialize)]
struct LimbDoc {
    side: Side,
    mass: f64,
    c: f64,
    a: f64,
    p_s: f64,
    p_l: f64,
    #[serde(default)]
    p_si: Option<f64>,
    #[serde(default)]
    p_li: Option<f64>,
    end_offset: [f64; 3],
}

#[derive(Debug, Deserialize)]
struct JointLimitDoc {
    name: String,
    min: f64,
    max: f64,
}

const INVERSE_PARAM_TOL: f64 = 1e-12;

fn limb_from_doc(doc: &LimbDoc, group: &str) -> Result<LimbSpec> {
    let dist = DistributionParams::new(doc.p_s, doc.p_l)
        .map_err(|e| prefix_error(e, group))?;
    let limb = LimbSpec::new(doc.c, doc.a, doc.mass, dist, Vec3::from(doc.end_offset))
        .map_err(|e| prefix_error(e, group))?;
    for (name, stored, derived) in [
        ("p_si", doc.p_si, limb.dist_inv.p_si),
        ("p_li", doc.p_li, limb.dist_inv.p_li),
    ] {
        if let Some(v) = stored {
            if (v - derived).abs() > INVERSE_PARAM_TOL {
                return Err(Error::InvalidSpec(format!(
                    "{group}.{name} = {v} disagrees with the value {derived} derived from p_s/p_l"
                )));
            }
        }
    }
    Ok(limb)
}

fn prefix_error(e: Error, group: &str) -> Error {
    match e {
        Error::OutOfRange { name, value, expected } => Error::OutOfRange {
            name: format!("{group}.{name}"),
            value,
            expected,
        },
        other => other,
    }
}

fn limb_pair(docs: &[LimbDoc], group: &str) -> Result<[LimbSpec; 2]> {
    if docs.len() != 2 {
        return Err(Error::InvalidSpec(format!("`{group}` needs exactly two entries")));
    }
    let find = |side: Side| {
        docs.iter()
            .find(|d| d.side == side)
            .ok_or_else(|| Error::MissingField(format!("{group}[side={side:?}]").to_lowercase()))
    };
    Ok([
        limb_from_doc(find(Side::Left)?, group)?,
        limb_from_doc(find(Side::Right)?, group)?,
    ])
}

/// Parses and validates a robot spec document (JSON; meters, kilograms, radians).
pub fn load_robot_spec(text: &str) -> Result<RobotSpec> {
    let doc: SpecDoc = serde_json::from_str(text)?;
    let mut limits = JointLimits::default();
    for jl in &doc.joint_limits {
        let idx = JointLimits::index_of(&jl.name)
            .ok_or_else(|| Error::InvalidSpec(format!("unknown joint `{}`", jl.name)))?;
        limits.0[idx] = JointRange { min: jl.min, max: jl.max };
    }
    let spec = RobotSpec {
        name: doc.name.unwrap_or_else(|| "robot".into()),
        trunk_mass: doc.trunk.mass,
        trunk_offset: Vec3::from(doc.trunk.offset),
        hip_width: doc.hip_width,
        shoulder_offset: Vec3::from(doc.shoulder_offset),
        legs: limb_pair(&doc.legs, "legs")?,
        arms: limb_pair(&doc.arms, "arms")?,
        joint_limits: limits,
    };
    spec.validate()?;
    Ok(spec)
}

pub fn load_robot_spec_file(path: impl AsRef<std::path::Path>) -> Result<RobotSpec> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    load_robot_spec(&text)
}
