//! Centroidal reductions: the lower/upper dumbbell that realises the tilting
//! inertia, composition of the CRB tensor, and the split of the yaw inertia
//! between leg masses and the two upper-body particles.
//!
//! All positions are expressed in the CoM frame (CoM at the origin).

use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::Matrix3;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geom::{rotation_from_z_and_yaw, Rotation, Vec3};
use crate::model::{LowerUpperMasses, RobotSpec};

/// Axis components of the principal moments: `I_xx = I_z + I_y`,
/// `I_yy = I_z + I_x`, `I_zz = I_x + I_y`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PrincipalComponents {
    pub i_x: f64,
    pub i_y: f64,
    pub i_z: f64,
}

impl PrincipalComponents {
    pub fn moments(&self) -> [f64; 3] {
        [self.i_z + self.i_y, self.i_z + self.i_x, self.i_x + self.i_y]
    }

    /// Components for a tilting inertia `i_z` and a yaw inertia `i_psi`
    /// shared evenly between the x and y components.
    pub fn from_tilt_and_yaw(i_z: f64, i_psi: f64) -> Self {
        Self {
            i_x: i_psi / 2.0,
            i_y: i_psi / 2.0,
            i_z,
        }
    }
}

/// `R_I · diag(I_xx, I_yy, I_zz) · R_Iᵀ`.
pub fn crb_from_components(pc: &PrincipalComponents, r_i: &Rotation) -> Matrix3<f64> {
    let [xx, yy, zz] = pc.moments();
    let m = r_i.matrix();
    m * Matrix3::from_diagonal(&Vec3::new(xx, yy, zz)) * m.transpose()
}

/// Rod length and mass distances of the dumbbell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DumbbellLengths {
    pub l_i: f64,
    pub l_l: f64,
    pub l_u: f64,
}

impl DumbbellLengths {
    /// Splits a rod length so that `m_l·l_l = m_u·l_u`.
    pub fn from_rod(l_i: f64, masses: &LowerUpperMasses) -> Self {
        let total = masses.total();
        Self {
            l_i,
            l_l: l_i * masses.upper / total,
            l_u: l_i * masses.lower / total,
        }
    }

    /// Rod whose lower mass sits `l_l` from the CoM.
    pub fn from_lower(l_l: f64, masses: &LowerUpperMasses) -> Self {
        Self::from_rod(l_l * masses.total() / masses.upper, masses)
    }

    pub fn tilting_inertia(&self, masses: &LowerUpperMasses) -> f64 {
        masses.lower * self.l_l * self.l_l + masses.upper * self.l_u * self.l_u
    }
}

fn check_masses(masses: &LowerUpperMasses) -> Result<()> {
    if !(masses.lower > 0.0) {
        return Err(Error::out_of_range("m_l", masses.lower, "> 0"));
    }
    if !(masses.upper > 0.0) {
        return Err(Error::out_of_range("m_u", masses.upper, "> 0"));
    }
    Ok(())
}

/// Dumbbell realising the tilting inertia `i_z`.
pub fn dumbbell_from_inertia(i_z: f64, masses: &LowerUpperMasses) -> Result<DumbbellLengths> {
    check_masses(masses)?;
    if !(i_z >= 0.0) {
        return Err(Error::out_of_range("I_z", i_z, ">= 0"));
    }
    let l_i = (i_z * masses.total() / (masses.lower * masses.upper)).sqrt();
    Ok(DumbbellLengths::from_rod(l_i, masses))
}

/// Lower and upper mass positions along the inertia z-axis.
pub fn place_dumbbell(r_i: &Rotation, l_l: f64, l_u: f64) -> (Vec3, Vec3) {
    let z = r_i * Vec3::z();
    (z * -l_l, z * l_u)
}

/// Dumbbell placement for a given inertia orientation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TiltPlan {
    pub r_i: Rotation,
    pub l_i: f64,
    pub l_l: f64,
    pub l_u: f64,
    pub lower_pos: Vec3,
    pub upper_pos: Vec3,
    /// Set once the orientation or magnitude departs from the request.
    pub adjusted: bool,
}

impl TiltPlan {
    pub fn new(r_i: Rotation, lengths: DumbbellLengths) -> Self {
        let (lower_pos, upper_pos) = place_dumbbell(&r_i, lengths.l_l, lengths.l_u);
        Self {
            r_i,
            l_i: lengths.l_i,
            l_l: lengths.l_l,
            l_u: lengths.l_u,
            lower_pos,
            upper_pos,
            adjusted: false,
        }
    }

    /// Plan whose lower mass sits at `point`; the inertia z-axis points from
    /// it through the CoM and carries the heading `yaw`.
    pub fn through_lower_point(
        point: &Vec3,
        yaw: f64,
        fallback: &Rotation,
        masses: &LowerUpperMasses,
    ) -> Result<Self> {
        let l_l = point.norm();
        let r_i = if l_l > 1e-12 {
            rotation_from_z_and_yaw(&(-point / l_l), yaw)?
        } else {
            *fallback
        };
        let mut plan = Self::new(r_i, DumbbellLengths::from_lower(l_l, masses));
        // keep the exact surface point rather than the re-derived one
        plan.lower_pos = *point;
        plan.upper_pos = -point * (masses.lower / masses.upper);
        plan.adjusted = true;
        Ok(plan)
    }

    pub fn tilting_inertia(&self, masses: &LowerUpperMasses) -> f64 {
        DumbbellLengths { l_i: self.l_i, l_l: self.l_l, l_u: self.l_u }.tilting_inertia(masses)
    }
}

/// Heading-free frame sharing the z-axis of `r_i`; yaw angles of the mass
/// pairs are measured in it.
pub fn tilt_frame(r_i: &Rotation) -> Rotation {
    rotation_from_z_and_yaw(&(r_i * Vec3::z()), 0.0).unwrap_or(*r_i)
}

/// Folds the direction angle of an undirected line into (−π/2, π/2].
fn fold_line_angle(a: f64) -> f64 {
    let mut a = a;
    while a > FRAC_PI_2 {
        a -= PI;
    }
    while a <= -FRAC_PI_2 {
        a += PI;
    }
    a
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LowerYawState {
    pub i_l: f64,
    pub psi_l: f64,
    pub s_l: f64,
}

/// Yaw contribution of the two leg masses about the inertia z-axis.
///
/// `psi_l` is the angle from the tilt frame's y-axis to the line joining the
/// right and left leg masses, projected into the plane normal to the inertia
/// z-axis; it is 0 when the projection vanishes.
pub fn lower_yaw_state(leg_positions: &[Vec3; 2], leg_masses: &[f64; 2], r_i: &Rotation) -> LowerYawState {
    let z = r_i * Vec3::z();
    let i_l = leg_positions
        .iter()
        .zip(leg_masses)
        .map(|(p, m)| m * (p - z * p.dot(&z)).norm_squared())
        .sum();
    let d = leg_positions[0] - leg_positions[1];
    let local = tilt_frame(r_i).inverse() * d;
    let psi_l = if local.xy().norm() < 1e-12 {
        0.0
    } else {
        fold_line_angle((-local.x).atan2(local.y))
    };
    LowerYawState {
        i_l,
        psi_l,
        s_l: d.norm(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct YawRequest {
    pub i_psi: f64,
    pub psi_i: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UpperYawState {
    pub s_u: f64,
    pub psi_u: f64,
    /// Yaw inertia assigned to the upper particle pair.
    pub i_u: f64,
    pub left_pos: Vec3,
    pub right_pos: Vec3,
}

/// Weight of each upper particle: its arm plus half of the trunk.
pub fn upper_particle_weights(spec: &RobotSpec) -> [f64; 2] {
    [
        spec.arms[0].mass + spec.trunk_mass / 2.0,
        spec.arms[1].mass + spec.trunk_mass / 2.0,
    ]
}

/// Splits the requested yaw inertia between the legs and the upper particles.
///
/// The two particles straddle `center` in the plane normal to the inertia
/// z-axis, along the direction at angle `psi_u` from the tilt frame's y-axis.
/// They sit at the inverse-weight fractions of `s_u` from `center`, so their
/// barycenter stays at `center` even for unequal arms.
pub fn yaw_split(
    req: &YawRequest,
    lower: &LowerYawState,
    center: &Vec3,
    r_i: &Rotation,
    spec: &RobotSpec,
    masses: &LowerUpperMasses,
) -> UpperYawState {
    let [w_l, w_r] = upper_particle_weights(spec);
    let deficit = req.i_psi - lower.i_l;
    let s_u = if deficit <= 0.0 || w_l <= 0.0 || w_r <= 0.0 {
        0.0
    } else {
        (deficit * masses.upper / (w_l * w_r)).sqrt()
    };
    let psi_u = (masses.total() * req.psi_i - masses.lower * lower.psi_l) / masses.upper;

    let dir = tilt_frame(r_i) * Vec3::new(-psi_u.sin(), psi_u.cos(), 0.0);
    let total = w_l + w_r;
    let (f_l, f_r) = if total > 0.0 { (w_r / total, w_l / total) } else { (0.5, 0.5) };
    UpperYawState {
        s_u,
        psi_u,
        i_u: deficit.max(0.0),
        left_pos: center + dir * (s_u * f_l),
        right_pos: center - dir * (s_u * f_r),
    }
}

/// Arm mass positions that, together with half the trunk each, recombine
/// into the upper particles.
pub fn arm_mass_targets(
    left_particle: &Vec3,
    right_particle: &Vec3,
    trunk_pos: &Vec3,
    spec: &RobotSpec,
) -> Result<(Vec3, Vec3)> {
    let half = spec.trunk_mass / 2.0;
    let target = |particle: &Vec3, m_arm: f64, name: &str| {
        if !(m_arm > 0.0) {
            return Err(Error::out_of_range(name, m_arm, "> 0"));
        }
        Ok((particle * (half + m_arm) - trunk_pos * half) / m_arm)
    };
    Ok((
        target(left_particle, spec.arms[0].mass, "m_la")?,
        target(right_particle, spec.arms[1].mass, "m_ra")?,
    ))
}
