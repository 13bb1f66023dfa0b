//! Whole-body pose generation.
//!
//! Inputs are ranked: the CoM is kept whenever any pose exists, then the
//! inertia orientation `R_I`, then the tilting inertia `I_z`. The returned
//! [`Status`] says which of them survived. Feet and CoM are given in the
//! world frame; internally everything is solved about the CoM and shifted
//! back at the end.

use std::time::Instant;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::feasibility::{
    ankle_geometry, interpolated_leg, lower_region, max_extension, precondition, reachability_function,
    reachability_solve, upper_limits, virtual_leg, AnkleGeometry, Extension, FeasibilityConfig, FeasibleTilt,
    FootFrame, FootFrames, ReachabilityLimits, TiltOutcome, VirtualLeg,
};
use crate::geom::{fused_yaw, rodrigues, rotation_from_z_and_yaw, BallPairRegion, Rotation, Vec3, UNIT_TOL};
use crate::limb_ik::{
    arm_chain, arm_reach_band, leg_chain, share_arm_targets, ArmJoints, ArmPair, LegJoints, LimbFlags, LimbJoints,
    TrunkClearance,
};
use crate::model::{
    aggregate_masses, JointLimits, JointRange, LimbSpec, LowerUpperMasses, RobotSpec, Side, JOINT_COUNT, JOINT_NAMES,
};
use crate::oracle::forward_layout;
use crate::reduction::{
    arm_mass_targets, dumbbell_from_inertia, lower_yaw_state, yaw_split, TiltPlan, YawRequest,
};

/// Desired foot frames, CoM, and centroidal inertia for one pose.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConstraintSet {
    pub com: Vec3,
    pub feet: FootFrames,
    pub r_i: Rotation,
    pub i_z: f64,
    pub i_psi: f64,
    pub psi_i: f64,
    /// Preferred trunk z-axis, followed as far as the arm reach allows.
    pub trunk_tilt: Option<Vec3>,
}

fn mirror_vec(v: &Vec3) -> Vec3 {
    Vec3::new(v.x, -v.y, v.z)
}

fn mirror_rot(r: &Rotation) -> Rotation {
    let m = nalgebra::Matrix3::from_diagonal(&Vec3::new(1.0, -1.0, 1.0));
    Rotation::from_matrix_unchecked(m * r.matrix() * m)
}

impl ConstraintSet {
    pub fn validate(&self) -> Result<()> {
        let finite = self.com.iter().all(|x| x.is_finite())
            && [self.i_z, self.i_psi, self.psi_i].iter().all(|x| x.is_finite())
            && [self.feet.left.pos, self.feet.right.pos].iter().all(|p| p.iter().all(|x| x.is_finite()));
        if !finite {
            return Err(Error::InvalidInput("non-finite constraint value".into()));
        }
        if self.i_z < 0.0 {
            return Err(Error::out_of_range("I_z", self.i_z, ">= 0"));
        }
        if self.i_psi < 0.0 {
            return Err(Error::out_of_range("I_psi", self.i_psi, ">= 0"));
        }
        if let Some(t) = self.trunk_tilt {
            if (t.norm() - 1.0).abs() > 1e-6 {
                return Err(Error::InvalidInput(format!("trunk_tilt must be a unit vector (norm {})", t.norm())));
            }
        }
        Ok(())
    }

    /// Reflection across the world x–z plane, with left and right swapped.
    pub fn mirrored(&self) -> Self {
        let foot = |f: &FootFrame| FootFrame::new(mirror_vec(&f.pos), mirror_rot(&f.rot));
        Self {
            com: mirror_vec(&self.com),
            feet: FootFrames { left: foot(&self.feet.right), right: foot(&self.feet.left) },
            r_i: mirror_rot(&self.r_i),
            i_z: self.i_z,
            i_psi: self.i_psi,
            psi_i: -self.psi_i,
            trunk_tilt: self.trunk_tilt.map(|t| mirror_vec(&t)),
        }
    }
}

/// Joint vector of the mirrored pose: sides swapped, yaw and roll negated.
pub fn mirror_joints(q: &[f64; JOINT_COUNT]) -> [f64; JOINT_COUNT] {
    let mut out = [0.0; JOINT_COUNT];
    for (i, name) in JOINT_NAMES.iter().enumerate() {
        let other = if let Some(rest) = name.strip_prefix("left_") {
            format!("right_{rest}")
        } else if let Some(rest) = name.strip_prefix("right_") {
            format!("left_{rest}")
        } else {
            name.to_string()
        };
        let j = JOINT_NAMES.iter().position(|n| *n == other).unwrap_or(i);
        let flip = name.ends_with("_yaw") || name.ends_with("_roll");
        out[j] = if flip { -q[i] } else { q[i] };
    }
    out
}

/// Floating base attached to the pelvis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BaseFrame {
    /// Hip midpoint.
    pub h_m: Vec3,
    pub r_b: Rotation,
    pub psi_t: f64,
}

impl BaseFrame {
    pub fn new(h_m: Vec3, r_b: Rotation) -> Self {
        Self { h_m, r_b, psi_t: fused_yaw(&r_b) }
    }

    pub fn hip(&self, spec: &RobotSpec, side: Side) -> Vec3 {
        self.h_m + self.r_b * spec.hip_offset(side)
    }

    pub fn shoulder(&self, spec: &RobotSpec, side: Side) -> Vec3 {
        self.h_m + self.r_b * spec.shoulder(side)
    }

    pub fn trunk_mass_pos(&self, spec: &RobotSpec) -> Vec3 {
        self.h_m + self.r_b * spec.trunk_offset
    }

    pub fn translated(&self, offset: &Vec3) -> Self {
        Self { h_m: self.h_m + offset, ..*self }
    }
}

/// Positions of the five point masses.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MassLayout {
    pub trunk: Vec3,
    /// Left, right.
    pub legs: [Vec3; 2],
    /// Left, right.
    pub arms: [Vec3; 2],
    pub h_m: Vec3,
    /// Barycenter of the two leg masses.
    pub lower: Vec3,
    /// Barycenter of trunk and arm masses.
    pub upper: Vec3,
}

impl MassLayout {
    pub fn new(trunk: Vec3, legs: [Vec3; 2], arms: [Vec3; 2], h_m: Vec3, spec: &RobotSpec) -> Self {
        let m = aggregate_masses(spec);
        let lower = (legs[0] * spec.legs[0].mass + legs[1] * spec.legs[1].mass) / m.lower;
        let upper = (trunk * spec.trunk_mass + arms[0] * spec.arms[0].mass + arms[1] * spec.arms[1].mass) / m.upper;
        Self { trunk, legs, arms, h_m, lower, upper }
    }

    /// Masses in the order trunk, left leg, right leg, left arm, right arm.
    pub fn points(&self) -> [Vec3; 5] {
        [self.trunk, self.legs[0], self.legs[1], self.arms[0], self.arms[1]]
    }

    pub fn translated(&self, offset: &Vec3) -> Self {
        Self {
            trunk: self.trunk + offset,
            legs: self.legs.map(|p| p + offset),
            arms: self.arms.map(|p| p + offset),
            h_m: self.h_m + offset,
            lower: self.lower + offset,
            upper: self.upper + offset,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Exact,
    InertiaAdjusted,
    ComOnly,
    Infeasible,
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Status::Exact => "exact",
            Status::InertiaAdjusted => "inertia_adjusted",
            Status::ComOnly => "com_only",
            Status::Infeasible => "infeasible",
        }
    }
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Status {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Status::Exact),
            "inertia_adjusted" => Ok(Status::InertiaAdjusted),
            "com_only" => Ok(Status::ComOnly),
            "infeasible" => Ok(Status::Infeasible),
            other => Err(Error::Parse(format!("unknown status `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct SolveFlags {
    /// Joints whose solved angle was clamped to the robot's limits.
    pub clamped_joints: Vec<&'static str>,
    /// Left, right.
    pub legs: [LimbFlags; 2],
    /// Left, right.
    pub arms: [LimbFlags; 2],
    /// Lower mass slid onto the foot-placement region before the search.
    pub preconditioned: bool,
    /// Arm mass targets were traded between the arms to stay reachable.
    pub arms_shared: bool,
}

impl SolveFlags {
    pub fn any(&self) -> bool {
        !self.clamped_joints.is_empty() || self.legs.iter().chain(&self.arms).any(|f| f.any())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveReport {
    pub status: Status,
    pub iterations: usize,
    /// |f(l_I)| at the accepted dumbbell length, in meters.
    pub residual: f64,
    pub adjusted_r_i: Rotation,
    pub adjusted_i_z: f64,
    pub flags: SolveFlags,
    /// Wall-clock time of the solve, only filled by [`generate_pose_timed`].
    pub solve_time_us: Option<f64>,
    pub diagnostic: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PoseSolution {
    pub joints: [f64; JOINT_COUNT],
    /// Absent for infeasible requests.
    pub layout: Option<MassLayout>,
    pub base: Option<BaseFrame>,
    pub report: SolveReport,
}

impl PoseSolution {
    pub fn status(&self) -> Status {
        self.report.status
    }

    pub fn leg(&self, side: Side) -> LegJoints {
        let off = match side {
            Side::Left => 0,
            Side::Right => 6,
        };
        LegJoints::from_slice(&self.joints[off..off + 6])
    }

    pub fn arm(&self, side: Side) -> ArmJoints {
        let off = match side {
            Side::Left => 12,
            Side::Right => 15,
        };
        ArmJoints::from_slice(&self.joints[off..off + 3])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PoseConfig {
    pub feasibility: FeasibilityConfig,
    /// Radius of the trunk cylinder kept free of arm masses.
    pub trunk_clearance: f64,
}

impl Default for PoseConfig {
    fn default() -> Self {
        Self { feasibility: FeasibilityConfig::default(), trunk_clearance: 0.06 }
    }
}

/// Trunk orientation: z from the hip midpoint towards the upper mass, turned
/// towards `trunk_tilt` as far as `slack` allows the trunk mass to move, and
/// headed at `psi_i`.
pub fn trunk_frame(
    h_m: &Vec3,
    upper_pos: &Vec3,
    psi_i: f64,
    slack: f64,
    trunk_tilt: Option<&Vec3>,
    trunk_reach: f64,
) -> Result<BaseFrame> {
    let up = upper_pos - h_m;
    let len = up.norm();
    if len < 1e-12 {
        return Ok(BaseFrame::new(*h_m, rodrigues(&Vec3::z(), psi_i)));
    }
    let mut z = up / len;
    if let Some(goal) = trunk_tilt {
        let axis = z.cross(goal);
        let angle = axis.norm().atan2(z.dot(goal));
        let cap = if trunk_reach > 0.0 {
            2.0 * (slack.max(0.0) / (2.0 * trunk_reach)).min(1.0).asin()
        } else {
            angle
        };
        let step = angle.min(cap);
        if step > 0.0 && axis.norm() > UNIT_TOL {
            z = rodrigues(&axis.normalize(), step) * z;
        }
    }
    Ok(BaseFrame::new(*h_m, rotation_from_z_and_yaw(&z, psi_i)?))
}

/// Solves a pose with the default configuration.
pub fn generate_pose(spec: &RobotSpec, constraints: &ConstraintSet) -> Result<PoseSolution> {
    generate_pose_with(spec, constraints, &PoseConfig::default())
}

/// Like [`generate_pose_with`], recording the elapsed time in the report.
pub fn generate_pose_timed(spec: &RobotSpec, constraints: &ConstraintSet, cfg: &PoseConfig) -> Result<PoseSolution> {
    let start = Instant::now();
    let mut sol = generate_pose_with(spec, constraints, cfg)?;
    sol.report.solve_time_us = Some(start.elapsed().as_secs_f64() * 1e6);
    Ok(sol)
}

/// Runs the whole pipeline. Unreachable requests come back as
/// `Status::Infeasible` with a diagnostic; only malformed input is an error.
pub fn generate_pose_with(spec: &RobotSpec, constraints: &ConstraintSet, cfg: &PoseConfig) -> Result<PoseSolution> {
    spec.validate()?;
    constraints.validate()?;
    match solve_local(spec, constraints, cfg) {
        Ok(sol) => Ok(sol),
        Err(e) if e.is_infeasible() => Ok(PoseSolution {
            joints: [0.0; JOINT_COUNT],
            layout: None,
            base: None,
            report: SolveReport {
                status: Status::Infeasible,
                iterations: 0,
                residual: f64::NAN,
                adjusted_r_i: constraints.r_i,
                adjusted_i_z: constraints.i_z,
                flags: SolveFlags::default(),
                solve_time_us: None,
                diagnostic: Some(e.to_string()),
            },
        }),
        Err(e) => Err(e),
    }
}

/// Everything the reachability search sees for one request, expressed in
/// the CoM-centred frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FeasibilityStage {
    pub masses: LowerUpperMasses,
    pub feet: FootFrames,
    pub geo: AnkleGeometry,
    pub leg: LimbSpec,
    pub ext: Extension,
    pub region: BallPairRegion,
    pub vleg: VirtualLeg,
    pub limits: ReachabilityLimits,
    /// Dumbbell as requested.
    pub requested: TiltPlan,
    /// After sliding the lower mass onto the region, if it was outside.
    pub plan: TiltPlan,
    pub yaw: f64,
}

impl FeasibilityStage {
    pub fn new(spec: &RobotSpec, cs: &ConstraintSet, cfg: &FeasibilityConfig) -> Result<Self> {
        let masses = aggregate_masses(spec);
        let shift = -cs.com;
        let feet = FootFrames { left: cs.feet.left.translated(&shift), right: cs.feet.right.translated(&shift) };
        let requested = TiltPlan::new(cs.r_i, dumbbell_from_inertia(cs.i_z, &masses)?);
        let geo = ankle_geometry(&feet, spec, cfg.heading_offset)?;
        let leg = interpolated_leg(&spec.legs, cfg.leg_weight)?;
        let ext = max_extension(geo.separation, &leg, spec.hip_width)?;
        let region = lower_region(&geo, &ext)?;
        let plan = precondition(&requested, cs.psi_i, &region, &geo, &masses)?;
        let vleg = virtual_leg(&leg, &ext)?;
        Ok(Self { masses, feet, geo, leg, ext, region, vleg, limits: upper_limits(spec), requested, plan, yaw: cs.psi_i })
    }

    pub fn solve(&self, cfg: &FeasibilityConfig) -> Result<FeasibleTilt> {
        reachability_solve(&self.plan, self.yaw, &self.region, &self.geo, &self.vleg, &self.limits, &self.masses, cfg)
    }

    /// `f(l_I)` along the preconditioned orientation with target distance `d_s`.
    pub fn reachability(&self, d_s: f64, l_i: f64) -> Result<f64> {
        reachability_function(&self.plan.r_i, self.yaw, &self.region, &self.geo, &self.vleg, &self.masses, d_s, l_i)
    }
}

fn solve_local(spec: &RobotSpec, cs: &ConstraintSet, cfg: &PoseConfig) -> Result<PoseSolution> {
    let stage = FeasibilityStage::new(spec, cs, &cfg.feasibility)?;
    let tilt = stage.solve(&cfg.feasibility)?;
    let (masses, feet, plan, limits) = (stage.masses, stage.feet, stage.plan, stage.limits);

    let status = match (plan.adjusted, tilt.outcome) {
        (true, _) | (_, TiltOutcome::OrientationAdjusted) => Status::ComOnly,
        (false, TiltOutcome::InertiaAdjusted) => Status::InertiaAdjusted,
        (false, TiltOutcome::Unchanged) => Status::Exact,
    };

    let base = trunk_frame(
        &tilt.hip.hip,
        &tilt.plan.upper_pos,
        cs.psi_i,
        limits.d_max - tilt.d_u,
        cs.trunk_tilt.as_ref(),
        spec.trunk_offset.norm(),
    )?;

    // legs on the real hips; the arms take up whatever the legs miss
    let mut flags = SolveFlags { preconditioned: plan.adjusted, ..Default::default() };
    let mut joints = [0.0; JOINT_COUNT];
    let mut leg_mass = [Vec3::zeros(); 2];
    for (i, (side, foot)) in [(Side::Left, &feet.left), (Side::Right, &feet.right)].into_iter().enumerate() {
        let sol = leg_chain(&base.hip(spec, side), &base.r_b, &foot.pos, &foot.rot, spec.leg(side));
        if let LimbJoints::Leg(q) = sol.joints {
            joints[6 * i..6 * i + 6].copy_from_slice(&q.to_array());
        }
        leg_mass[i] = sol.mass_pos;
        flags.legs[i] = sol.flags;
    }
    let lower = (leg_mass[0] * spec.legs[0].mass + leg_mass[1] * spec.legs[1].mass) / masses.lower;
    let upper_goal = -lower * (masses.lower / masses.upper);

    let r_i = tilt.plan.r_i;
    let yaw_lower = lower_yaw_state(&leg_mass, &[spec.legs[0].mass, spec.legs[1].mass], &r_i);
    let upper = yaw_split(
        &YawRequest { i_psi: cs.i_psi, psi_i: cs.psi_i },
        &yaw_lower,
        &upper_goal,
        &r_i,
        spec,
        &masses,
    );
    let trunk_pos = base.trunk_mass_pos(spec);
    let has_arms = spec.arms.iter().all(|a| a.mass > 0.0);
    if has_arms {
        let targets = arm_mass_targets(&upper.left_pos, &upper.right_pos, &trunk_pos, spec)?;
        let elbow = |name: &str| JointLimits::index_of(name).map_or(JointRange::UNLIMITED, |k| spec.joint_limits.0[k]);
        let pair = ArmPair {
            shoulders: [base.shoulder(spec, Side::Left), base.shoulder(spec, Side::Right)],
            masses: [spec.arms[0].mass, spec.arms[1].mass],
            bands: [
                arm_reach_band(&spec.arms[0], &elbow("left_elbow_pitch")),
                arm_reach_band(&spec.arms[1], &elbow("right_elbow_pitch")),
            ],
        };
        let ([left, right], shared) = share_arm_targets([targets.0, targets.1], &base.r_b, &pair);
        flags.arms_shared = shared;
        let targets = (left, right);
        let clearance = TrunkClearance { origin: base.h_m, axis: base.r_b * Vec3::z(), radius: cfg.trunk_clearance };
        for (i, (side, target)) in [(Side::Left, targets.0), (Side::Right, targets.1)].into_iter().enumerate() {
            let sol = arm_chain(&base.shoulder(spec, side), &base.r_b, &target, spec.arm(side), Some(&clearance))?;
            if let LimbJoints::Arm(q) = sol.joints {
                joints[12 + 3 * i..15 + 3 * i].copy_from_slice(&q.to_array());
            }
            flags.arms[i] = sol.flags;
        }
    }

    for (i, (q, range)) in joints.iter_mut().zip(&spec.joint_limits.0).enumerate() {
        let clamped = range.clamp(*q);
        if clamped != *q {
            flags.clamped_joints.push(JOINT_NAMES[i]);
            *q = clamped;
        }
    }

    let layout = forward_layout(spec, &joints, &base);
    Ok(PoseSolution {
        joints,
        layout: Some(layout.translated(&cs.com)),
        base: Some(base.translated(&cs.com)),
        report: SolveReport {
            status,
            iterations: tilt.iterations,
            residual: tilt.residual.abs(),
            adjusted_r_i: r_i,
            adjusted_i_z: tilt.plan.tilting_inertia(&masses),
            flags,
            solve_time_us: None,
            diagnostic: None,
        },
    })
}
