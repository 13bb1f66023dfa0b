//! Ground truth for solved poses: forward placement of the five masses from
//! the joint vector, their exact CoM and inertia tensor, and deviation
//! metrics against what was requested.
//!
//! The reference model is the five point masses themselves. Errors reported
//! here therefore measure the solver's own approximations (leg/arm clamping,
//! yaw split, trunk alignment), not link inertias the model leaves out.

use nalgebra::{Matrix3, SymmetricEigen};
use serde::Serialize;

use crate::feasibility::FootFrame;
use crate::geom::{Rotation, Vec3};
use crate::limb_ik::{arm_forward, leg_forward, ArmJoints, LegJoints};
use crate::model::{RobotSpec, Side, JOINT_COUNT};
use crate::motion::{Motion, TrajectoryFrame};
use crate::posegen::{BaseFrame, ConstraintSet, MassLayout, Status};

/// Mass layout realized by `joints` on the floating base `base`.
pub fn forward_layout(spec: &RobotSpec, joints: &[f64; JOINT_COUNT], base: &BaseFrame) -> MassLayout {
    let leg = |side: Side, off: usize| {
        let q = LegJoints::from_slice(&joints[off..off + 6]);
        leg_forward(&q, &base.hip(spec, side), &base.r_b, spec.leg(side)).mass
    };
    let arm = |side: Side, off: usize| {
        let q = ArmJoints::from_slice(&joints[off..off + 3]);
        arm_forward(&q, &base.shoulder(spec, side), &base.r_b, spec.arm(side)).mass
    };
    MassLayout::new(
        base.trunk_mass_pos(spec),
        [leg(Side::Left, 0), leg(Side::Right, 6)],
        [arm(Side::Left, 12), arm(Side::Right, 15)],
        base.h_m,
        spec,
    )
}

/// Floating base that puts the left foot at `foot` for the given left leg
/// joints. Used when only the joint trajectory and foot setpoints are known.
pub fn base_from_foot(spec: &RobotSpec, foot: &FootFrame, q: &LegJoints) -> BaseFrame {
    let leg = spec.leg(Side::Left);
    let local = leg_forward(q, &Vec3::zeros(), &Rotation::identity(), leg);
    let r_b = foot.rot * local.foot_rot.transpose();
    let ankle = foot.pos + foot.rot * leg.end_offset;
    let hip = ankle - r_b * local.ankle;
    BaseFrame::new(hip - r_b * spec.hip_offset(Side::Left), r_b)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AchievedInertia {
    pub com: Vec3,
    /// About `com`.
    pub tensor: Matrix3<f64>,
    /// Descending.
    pub principal_moments: [f64; 3],
    /// Columns are the principal axes in the order of `principal_moments`.
    pub principal_axes: Rotation,
}

fn mass_list(spec: &RobotSpec) -> [f64; 5] {
    [spec.trunk_mass, spec.legs[0].mass, spec.legs[1].mass, spec.arms[0].mass, spec.arms[1].mass]
}

pub fn inertia_report(layout: &MassLayout, spec: &RobotSpec) -> AchievedInertia {
    point_mass_inertia(&layout.points(), &mass_list(spec))
}

/// CoM and inertia tensor about it of arbitrary point masses.
pub fn point_mass_inertia(points: &[Vec3], masses: &[f64]) -> AchievedInertia {
    let total: f64 = masses.iter().sum();
    let com = points.iter().zip(masses).map(|(p, m)| p * *m).sum::<Vec3>() / total;
    let mut tensor = Matrix3::zeros();
    for (p, m) in points.iter().zip(masses) {
        let d = p - com;
        tensor += (Matrix3::identity() * d.norm_squared() - d * d.transpose()) * *m;
    }
    let eig = SymmetricEigen::new(tensor);
    let mut order = [0usize, 1, 2];
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let mut axes = Matrix3::zeros();
    for (col, &k) in order.iter().enumerate() {
        let mut v = eig.eigenvectors.column(k).into_owned();
        // largest component positive, first one on ties
        let lead = (0..3).fold(0, |best, i| if v[i].abs() > v[best].abs() + 1e-12 { i } else { best });
        if v[lead] < 0.0 {
            v = -v;
        }
        axes.set_column(col, &v);
    }
    if axes.determinant() < 0.0 {
        let flipped = -axes.column(2);
        axes.set_column(2, &flipped);
    }
    AchievedInertia {
        com,
        tensor,
        principal_moments: order.map(|k| eig.eigenvalues[k].max(0.0)),
        principal_axes: Rotation::from_matrix_unchecked(axes),
    }
}

/// What a pose was asked to realize.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RequestedInertia {
    pub com: Vec3,
    pub r_i: Rotation,
    /// About the x, y, z axes of `r_i`.
    pub moments: [f64; 3],
}

impl RequestedInertia {
    /// The yaw inertia is shared equally between the two axis components,
    /// so `I_xx = I_yy = I_z + I_ψ/2` and `I_zz = I_ψ`.
    pub fn from_constraints(cs: &ConstraintSet) -> Self {
        Self::new(cs.com, cs.r_i, cs.i_z, cs.i_psi)
    }

    pub fn new(com: Vec3, r_i: Rotation, i_z: f64, i_psi: f64) -> Self {
        let tilt = i_z + i_psi / 2.0;
        Self { com, r_i, moments: [tilt, tilt, i_psi] }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeviationReport {
    pub com_error: f64,
    /// Sorted pairing, largest moments first.
    pub moment_errors: [f64; 3],
    /// Geodesic angle between the requested and achieved principal frames,
    /// minimized over axis relabelings and sign flips.
    pub orientation_error: f64,
}

/// The 24 rotations that map the coordinate axes onto themselves.
fn axis_symmetries() -> Vec<Matrix3<f64>> {
    let perms = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let mut out = Vec::with_capacity(24);
    for p in perms {
        for signs in 0..8u8 {
            let mut m = Matrix3::zeros();
            for (col, &row) in p.iter().enumerate() {
                m[(row, col)] = if signs & (1 << col) != 0 { -1.0 } else { 1.0 };
            }
            if m.determinant() > 0.0 {
                out.push(m);
            }
        }
    }
    out
}

pub fn orientation_error(requested: &Rotation, achieved: &Rotation) -> f64 {
    let rel = requested.matrix().transpose() * achieved.matrix();
    axis_symmetries()
        .iter()
        .map(|s| {
            let m = rel * s;
            let sin = Vec3::new(m[(2, 1)] - m[(1, 2)], m[(0, 2)] - m[(2, 0)], m[(1, 0)] - m[(0, 1)]).norm() / 2.0;
            sin.atan2((m.trace() - 1.0) / 2.0)
        })
        .fold(f64::INFINITY, f64::min)
}

pub fn compare(requested: &RequestedInertia, achieved: &AchievedInertia) -> DeviationReport {
    let mut want = requested.moments;
    want.sort_by(|a, b| b.total_cmp(a));
    DeviationReport {
        com_error: (achieved.com - requested.com).norm(),
        moment_errors: std::array::from_fn(|i| (achieved.principal_moments[i] - want[i]).abs()),
        orientation_error: orientation_error(&requested.r_i, &achieved.principal_axes),
    }
}

/// Re-evaluates a stored joint trajectory against the motion it was rendered
/// from. The base of every frame is rebuilt from the left foot setpoint, so
/// only joint angles and foot targets are trusted. Infeasible frames are
/// skipped.
pub fn check_trajectory(spec: &RobotSpec, motion: &Motion, frames: &[TrajectoryFrame]) -> Vec<(f64, DeviationReport)> {
    frames
        .iter()
        .filter(|f| f.status != Status::Infeasible)
        .map(|f| {
            let cs = motion.sample(f.t).constraints;
            let base = base_from_foot(spec, &cs.feet.left, &LegJoints::from_slice(&f.joints[..6]));
            let layout = forward_layout(spec, &f.joints, &base);
            (f.t, compare(&RequestedInertia::from_constraints(&cs), &inertia_report(&layout, spec)))
        })
        .collect()
}
