//! Closed-form limb kinematics on the triangle approximation.
//!
//! Legs are 6-DoF chains (hip yaw, roll, pitch, knee pitch, ankle pitch,
//! roll) solved for a full foot frame. Arms are 3-DoF chains (shoulder pitch,
//! roll, elbow pitch) solved for the position of the arm mass. In both the
//! limb mass only depends on the shoulder/hip position, the bend and the
//! direction of the limb, never on the hand or foot orientation.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{Rotation, Vec3};
use crate::model::{mass_point_forward, JointRange, LimbSpec};

const REACH_SLACK: f64 = 1e-12;

fn rot_x(a: f64) -> Rotation {
    Rotation::from_axis_angle(&Vec3::x_axis(), a)
}

fn rot_y(a: f64) -> Rotation {
    Rotation::from_axis_angle(&Vec3::y_axis(), a)
}

fn rot_z(a: f64) -> Rotation {
    Rotation::from_axis_angle(&Vec3::z_axis(), a)
}

/// Interior bend (0 when straight) of a two-link limb with sides `c`, `a`
/// whose ends are `b` apart.
pub fn bend_from_extension(b: f64, c: f64, a: f64) -> Result<f64> {
    let (lo, hi) = ((c - a).abs(), c + a);
    if b < lo - REACH_SLACK || b > hi + REACH_SLACK {
        return Err(Error::Unreachable(format!(
            "extension {b} outside [{lo}, {hi}]"
        )));
    }
    let cos_inner = ((c * c + a * a - b * b) / (2.0 * c * a)).clamp(-1.0, 1.0);
    Ok(PI - cos_inner.acos())
}

pub fn extension_from_bend(bend: f64, c: f64, a: f64) -> f64 {
    (c * c + a * a + 2.0 * c * a * bend.cos()).max(0.0).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct LegJoints {
    pub hip_yaw: f64,
    pub hip_roll: f64,
    pub hip_pitch: f64,
    pub knee_pitch: f64,
    pub ankle_pitch: f64,
    pub ankle_roll: f64,
}

impl LegJoints {
    pub fn to_array(&self) -> [f64; 6] {
        [self.hip_yaw, self.hip_roll, self.hip_pitch, self.knee_pitch, self.ankle_pitch, self.ankle_roll]
    }

    pub fn from_slice(q: &[f64]) -> Self {
        Self {
            hip_yaw: q[0],
            hip_roll: q[1],
            hip_pitch: q[2],
            knee_pitch: q[3],
            ankle_pitch: q[4],
            ankle_roll: q[5],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ArmJoints {
    pub shoulder_pitch: f64,
    pub shoulder_roll: f64,
    pub elbow_pitch: f64,
}

impl ArmJoints {
    pub fn to_array(&self) -> [f64; 3] {
        [self.shoulder_pitch, self.shoulder_roll, self.elbow_pitch]
    }

    pub fn from_slice(q: &[f64]) -> Self {
        Self { shoulder_pitch: q[0], shoulder_roll: q[1], elbow_pitch: q[2] }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LimbJoints {
    Leg(LegJoints),
    Arm(ArmJoints),
}

/// Conditions under which the chain could not hit its target exactly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct LimbFlags {
    /// Target distance outside the limb's reach; extension clamped.
    pub out_of_reach: bool,
    /// Arm mass target moved out of the trunk clearance cylinder.
    pub trunk_clearance: bool,
    /// Arm mass target too far sideways for the bent elbow; roll saturated.
    pub lateral_limit: bool,
}

impl LimbFlags {
    pub fn any(&self) -> bool {
        self.out_of_reach || self.trunk_clearance || self.lateral_limit
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LimbSolution {
    pub joints: LimbJoints,
    pub mass_pos: Vec3,
    /// Distance between the limb root and the limb end.
    pub extension: f64,
    pub flags: LimbFlags,
}

/// Leg link frames from joint angles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LegPose {
    pub hip: Vec3,
    pub knee: Vec3,
    pub ankle: Vec3,
    pub foot_rot: Rotation,
    pub mass: Vec3,
}

pub fn leg_forward(q: &LegJoints, hip: &Vec3, base_r: &Rotation, leg: &LimbSpec) -> LegPose {
    let r_hip = base_r * rot_z(q.hip_yaw) * rot_x(q.hip_roll) * rot_y(q.hip_pitch);
    let knee = hip + r_hip * Vec3::new(0.0, 0.0, -leg.c);
    let r_knee = r_hip * rot_y(q.knee_pitch);
    let ankle = knee + r_knee * Vec3::new(0.0, 0.0, -leg.a);
    LegPose {
        hip: *hip,
        knee,
        ankle,
        foot_rot: r_knee * rot_y(q.ankle_pitch) * rot_x(q.ankle_roll),
        mass: mass_point_forward(hip, &knee, &ankle, &leg.dist),
    }
}

/// Leg joints placing the foot frame (`foot_pos`, `foot_rot`, ankle at
/// `foot_pos + foot_rot * end_offset`) for a hip at `hip` on a base `base_r`.
/// Distances beyond reach are clamped to the straight or folded limb.
pub fn leg_chain(hip: &Vec3, base_r: &Rotation, foot_pos: &Vec3, foot_rot: &Rotation, leg: &LimbSpec) -> LimbSolution {
    let ankle = foot_pos + foot_rot * leg.end_offset;
    let r = foot_rot.transpose() * (hip - ankle);
    let dist = r.norm();
    let (lo, hi) = ((leg.c - leg.a).abs(), leg.c + leg.a);
    let out_of_reach = dist > hi + REACH_SLACK || dist < lo - REACH_SLACK;
    let b = dist.clamp(lo, hi);
    let knee = bend_from_extension(b, leg.c, leg.a).unwrap_or(if b >= hi { 0.0 } else { PI });
    let alpha = (leg.c * knee.sin()).atan2(leg.a + leg.c * knee.cos());

    let mut ankle_roll = r.y.atan2(r.z);
    if ankle_roll > PI / 2.0 {
        ankle_roll -= PI;
    } else if ankle_roll < -PI / 2.0 {
        ankle_roll += PI;
    }
    let ankle_pitch = -r.x.atan2(r.z.signum() * (r.y * r.y + r.z * r.z).sqrt()) - alpha;

    let m = base_r.transpose() * foot_rot * rot_x(ankle_roll).transpose() * rot_y(knee + ankle_pitch).transpose();
    let hip_yaw = (-m[(0, 1)]).atan2(m[(1, 1)]);
    let (sy, cy) = hip_yaw.sin_cos();
    let hip_roll = m[(2, 1)].atan2(-m[(0, 1)] * sy + m[(1, 1)] * cy);
    let hip_pitch = (-m[(2, 0)]).atan2(m[(2, 2)]);

    let joints = LegJoints { hip_yaw, hip_roll, hip_pitch, knee_pitch: knee, ankle_pitch, ankle_roll };
    let pose = leg_forward(&joints, hip, base_r, leg);
    LimbSolution {
        joints: LimbJoints::Leg(joints),
        mass_pos: pose.mass,
        extension: b,
        flags: LimbFlags { out_of_reach, ..Default::default() },
    }
}

/// Arm link positions from joint angles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArmPose {
    pub shoulder: Vec3,
    pub elbow: Vec3,
    pub hand: Vec3,
    pub mass: Vec3,
}

pub fn arm_forward(q: &ArmJoints, shoulder: &Vec3, base_r: &Rotation, arm: &LimbSpec) -> ArmPose {
    let r_sh = base_r * rot_y(q.shoulder_pitch) * rot_x(q.shoulder_roll);
    let elbow = shoulder + r_sh * Vec3::new(0.0, 0.0, -arm.c);
    let hand = elbow + r_sh * rot_y(q.elbow_pitch) * Vec3::new(0.0, 0.0, -arm.a);
    ArmPose {
        shoulder: *shoulder,
        elbow,
        hand,
        mass: mass_point_forward(shoulder, &elbow, &hand, &arm.dist),
    }
}

/// Trunk cylinder the arm masses must stay out of.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrunkClearance {
    /// Any point on the trunk axis.
    pub origin: Vec3,
    pub axis: Vec3,
    pub radius: f64,
}

impl TrunkClearance {
    fn push_out(&self, p: &Vec3) -> Option<Vec3> {
        let rel = p - self.origin;
        let radial = rel - self.axis * rel.dot(&self.axis);
        let d = radial.norm();
        if d >= self.radius {
            return None;
        }
        // straight out sideways when the point is on the axis itself
        let dir = if d > 1e-12 { radial / d } else { self.axis.cross(&Vec3::x()).normalize() };
        Some(p + dir * (self.radius - d))
    }
}

/// Wraps into (−3π/2, π/2]: raising the arm forward over the head stays
/// continuous through −π, and the cut lies behind the back.
fn wrap_shoulder_pitch(p: f64) -> f64 {
    crate::geom::wrap_angle(p + PI / 2.0) - PI / 2.0
}

/// Arm joints placing the arm mass at `target`. The elbow bends forward in
/// the plane rotated by the shoulder roll. Targets outside the reach
/// annulus, too far sideways, or inside the trunk cylinder are moved to the
/// nearest admissible point and flagged.
pub fn arm_chain(
    shoulder: &Vec3,
    base_r: &Rotation,
    target: &Vec3,
    arm: &LimbSpec,
    clearance: Option<&TrunkClearance>,
) -> Result<LimbSolution> {
    let mut flags = LimbFlags::default();
    let mut goal = *target;
    if let Some(pushed) = clearance.and_then(|c| c.push_out(&goal)) {
        flags.trunk_clearance = true;
        goal = pushed;
    }
    let (p_s, p_l) = (arm.dist.p_s, arm.dist.p_l);
    if p_l <= 0.0 || p_s <= 0.0 {
        return Err(Error::Degenerate("arm mass does not depend on the elbow".into()));
    }
    let sa = p_s * arm.a;
    let (r_lo, r_hi) = (p_l * (arm.c - sa).abs(), p_l * (arm.c + sa));
    let w = base_r.transpose() * (goal - shoulder);
    let dist = w.norm();
    if dist > r_hi + REACH_SLACK || dist < r_lo - REACH_SLACK {
        flags.out_of_reach = true;
    }
    let r = dist.clamp(r_lo, r_hi);
    let section = r / p_l;
    let cos_beta = ((section * section - arm.c * arm.c - sa * sa) / (2.0 * arm.c * sa)).clamp(-1.0, 1.0);
    let beta = cos_beta.acos();
    let x_s = p_l * sa * beta.sin();
    let z_s = -p_l * (arm.c + sa * cos_beta);

    // direction only matters from here on; scale w to the realized distance
    let w = if dist > 1e-12 { w * (r / dist) } else { Vec3::new(0.0, 0.0, -r) };
    let mut sin_roll = if z_s.abs() > 1e-12 { -w.y / z_s } else { 0.0 };
    if sin_roll.abs() > 1.0 {
        flags.lateral_limit = true;
        sin_roll = sin_roll.signum();
    }
    let roll = sin_roll.asin();
    let pitch = w.x.atan2(w.z) - x_s.atan2(z_s * roll.cos());

    let joints = ArmJoints {
        shoulder_pitch: wrap_shoulder_pitch(pitch),
        shoulder_roll: roll,
        elbow_pitch: -beta,
    };
    let pose = arm_forward(&joints, shoulder, base_r, arm);
    Ok(LimbSolution {
        joints: LimbJoints::Arm(joints),
        mass_pos: pose.mass,
        extension: (pose.hand - pose.shoulder).norm(),
        flags,
    })
}

/// Mass point of a limb posed with `joints` at `origin` (hip or shoulder).
pub fn limb_mass_forward(joints: &LimbJoints, origin: &Vec3, base_r: &Rotation, limb: &LimbSpec) -> Vec3 {
    match joints {
        LimbJoints::Leg(q) => leg_forward(q, origin, base_r, limb).mass,
        LimbJoints::Arm(q) => arm_forward(q, origin, base_r, limb).mass,
    }
}

/// Distance band of the arm mass around the shoulder that the elbow range
/// allows. `elbow` is the elbow pitch range; the bend is its negative.
pub fn arm_reach_band(arm: &LimbSpec, elbow: &JointRange) -> (f64, f64) {
    let sa = arm.dist.p_s * arm.a;
    let bend_max = (-elbow.min).clamp(0.0, PI);
    let bend_min = (-elbow.max).clamp(0.0, bend_max);
    let reach = |bend: f64| arm.dist.p_l * extension_from_bend(bend, arm.c, sa);
    (reach(bend_max), reach(bend_min))
}

/// Arm pair geometry used by [`share_arm_targets`], indexed left, right.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArmPair {
    pub shoulders: [Vec3; 2],
    pub masses: [f64; 2],
    pub bands: [(f64, f64); 2],
}

const BAND_MARGIN: f64 = 1e-9;

/// Moves the two arm mass targets by opposite, mass-weighted amounts so that
/// each falls inside its reach band. Their common barycenter does not move.
///
/// An arm beyond its outer radius is pulled in along its reach direction
/// while the other arm takes up the difference. Targets inside the inner
/// dead zone around the shoulder are resolved by spreading the pair apart
/// along the trunk's lateral axis. Returns the new targets and whether
/// either changed; cases that cannot be resolved are left to the arm
/// chain's clamping.
pub fn share_arm_targets(targets: [Vec3; 2], base_r: &Rotation, pair: &ArmPair) -> ([Vec3; 2], bool) {
    let [m_l, m_r] = pair.masses;
    if !(m_l > 0.0 && m_r > 0.0) {
        return (targets, false);
    }
    let mut t = targets;
    let mut moved = false;
    let rel = |t: &[Vec3; 2], i: usize| t[i] - pair.shoulders[i];

    for i in 0..2 {
        let j = 1 - i;
        let w = rel(&t, i);
        let excess = w.norm() - (pair.bands[i].1 - BAND_MARGIN);
        if excess <= 0.0 {
            continue;
        }
        // the other arm moves along `d` per unit of pull; take as much as its
        // outer radius allows
        let d = w.normalize() * (pair.masses[i] / pair.masses[j]);
        let wj = rel(&t, j);
        let r_out = pair.bands[j].1 - BAND_MARGIN;
        let (qa, qb, qc) = (d.norm_squared(), 2.0 * wj.dot(&d), wj.norm_squared() - r_out * r_out);
        let disc = qb * qb - 4.0 * qa * qc;
        if qc > 0.0 || disc < 0.0 {
            continue;
        }
        let pull = excess.min((-qb + disc.sqrt()) / (2.0 * qa));
        if pull > 0.0 {
            t[i] -= w.normalize() * pull;
            t[j] += d * pull;
            moved = true;
        }
    }

    // Left moves along +y of the trunk and right along -y; a spread of
    // `delta` moves them by fractions m_r/M and m_l/M.
    let lateral = base_r * Vec3::y();
    let total = m_l + m_r;
    let frac = [m_r / total, m_l / total];
    let outward = [lateral, -lateral];
    let forbidden: Vec<(f64, f64)> = (0..2)
        .filter_map(|i| {
            let w = rel(&t, i);
            let along = w.dot(&outward[i]);
            let rest2 = w.norm_squared() - along * along;
            let r_in = pair.bands[i].0 + BAND_MARGIN;
            (rest2 < r_in * r_in).then(|| {
                let h = (r_in * r_in - rest2).sqrt();
                ((-h - along) / frac[i], (h - along) / frac[i])
            })
        })
        .collect();
    let mut delta: f64 = 0.0;
    for _ in 0..3 {
        for &(a, b) in &forbidden {
            if a < delta && delta < b {
                delta = b;
            }
        }
    }
    if delta > 0.0 {
        let spread = [t[0] + outward[0] * (delta * frac[0]), t[1] + outward[1] * (delta * frac[1])];
        let fits = (0..2).all(|i| (spread[i] - pair.shoulders[i]).norm() <= pair.bands[i].1);
        if fits {
            t = spread;
            moved = true;
        }
    }
    (t, moved)
}
