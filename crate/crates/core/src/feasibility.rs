//! Limits imposed by the foot placement.
//!
//! The feet bound where the lower body mass can go (the intersection of two
//! ankle-centered balls) and where the hip midpoint ends up for a given lower
//! mass (a single virtual leg standing on the ankle midpoint). The upper mass
//! must then lie within arm reach of the hip midpoint; when it does not, the
//! dumbbell length is searched with regula falsi until it does.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{regula_falsi_bracketed, rodrigues, BallPairRegion, Rotation, Vec3};
use crate::model::{derive_inverse_params, DistributionParams, InverseDistributionParams, LimbSpec, LowerUpperMasses, RobotSpec};
use crate::reduction::{DumbbellLengths, TiltPlan};

/// Foot polygon center and orientation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FootFrame {
    pub pos: Vec3,
    pub rot: Rotation,
}

impl FootFrame {
    pub fn new(pos: Vec3, rot: Rotation) -> Self {
        Self { pos, rot }
    }

    pub fn translated(&self, offset: &Vec3) -> Self {
        Self { pos: self.pos + offset, rot: self.rot }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FootFrames {
    pub left: FootFrame,
    pub right: FootFrame,
}

/// Tunables of the feasibility stage.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityConfig {
    /// Distance of the heading point `a_h` ahead of the ankle midpoint.
    pub heading_offset: f64,
    /// Weight of the right leg in the virtual leg (0 = left only).
    pub leg_weight: f64,
    /// Residual tolerance on `f(l_I)` in meters.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for FeasibilityConfig {
    fn default() -> Self {
        Self {
            heading_offset: 0.1,
            leg_weight: 0.5,
            tol: 1e-4,
            max_iter: 50,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AnkleGeometry {
    pub left: Vec3,
    pub right: Vec3,
    pub mid: Vec3,
    /// Point ahead of `mid` along the aggregate foot heading.
    pub heading: Vec3,
    pub separation: f64,
}

pub fn ankle_geometry(feet: &FootFrames, spec: &RobotSpec, heading_offset: f64) -> Result<AnkleGeometry> {
    let left = feet.left.pos + feet.left.rot * spec.legs[0].end_offset;
    let right = feet.right.pos + feet.right.rot * spec.legs[1].end_offset;
    let mid = (left + right) / 2.0;
    let x_sum = feet.left.rot * Vec3::x() + feet.right.rot * Vec3::x();
    let norm = x_sum.norm();
    if norm < 1e-9 {
        return Err(Error::Degenerate("feet point in opposite directions".into()));
    }
    Ok(AnkleGeometry {
        left,
        right,
        mid,
        heading: mid + x_sum * (heading_offset / norm),
        separation: (left - right).norm(),
    })
}

/// Fully stretched distances for a given ankle separation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Extension {
    /// ‖a_m − h_m‖ at full extension.
    pub mid_to_hip: f64,
    /// ‖a − h‖ of one leg at full extension (`c + a`).
    pub ankle_to_hip: f64,
    /// ‖a − m_l‖ of one leg at full extension.
    pub ankle_to_mass: f64,
    /// ‖a_m − m_l‖ at full extension.
    pub mid_to_mass: f64,
}

pub fn max_extension(s: f64, leg: &LimbSpec, hip_width: f64) -> Result<Extension> {
    let ankle_to_hip = leg.length();
    let half_gap = (s - hip_width) / 2.0;
    if half_gap.abs() >= ankle_to_hip {
        return Err(Error::Infeasible(format!(
            "ankle separation {s:.4} m is beyond leg reach"
        )));
    }
    let mid_to_hip = (ankle_to_hip * ankle_to_hip - half_gap * half_gap).sqrt();
    let ankle_to_mass = leg.mass_reach_from_end();
    Ok(Extension {
        mid_to_hip,
        ankle_to_hip,
        ankle_to_mass,
        mid_to_mass: mid_to_hip * ankle_to_mass / ankle_to_hip,
    })
}

pub fn lower_region(geo: &AnkleGeometry, ext: &Extension) -> Result<BallPairRegion> {
    let half = geo.separation / 2.0;
    let r_l = (half * half + ext.mid_to_mass * ext.mid_to_mass).sqrt();
    BallPairRegion::new(geo.left, geo.right, r_l)
}

/// Moves a lower mass lying outside the region onto its surface along the
/// ray from the ankle midpoint, and re-derives the inertia orientation and
/// magnitude from the new point. Plans already inside are returned as is.
pub fn precondition(
    plan: &TiltPlan,
    yaw: f64,
    region: &BallPairRegion,
    geo: &AnkleGeometry,
    masses: &LowerUpperMasses,
) -> Result<TiltPlan> {
    if region.contains(&plan.lower_pos) {
        return Ok(*plan);
    }
    let ray = plan.lower_pos - geo.mid;
    let len = ray.norm();
    if len < 1e-12 {
        return Err(Error::Degenerate("lower mass coincides with the ankle midpoint".into()));
    }
    let exit = region.ray_exit(&geo.mid, &(ray / len))?;
    TiltPlan::through_lower_point(&exit, yaw, &plan.r_i, masses)
}

/// Single leg standing on the ankle midpoint, shortened for the current
/// ankle separation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VirtualLeg {
    pub a_v: f64,
    pub c_v: f64,
    pub dist: DistributionParams,
    pub dist_inv: InverseDistributionParams,
}

/// Left/right legs blended with weight `w` on the right leg.
pub fn interpolated_leg(legs: &[LimbSpec; 2], w: f64) -> Result<LimbSpec> {
    legs[0].lerp(&legs[1], w)
}

pub fn virtual_leg(leg: &LimbSpec, ext: &Extension) -> Result<VirtualLeg> {
    let scale = ext.mid_to_hip / leg.length();
    Ok(VirtualLeg {
        a_v: leg.a * scale,
        c_v: leg.c * scale,
        dist: leg.dist,
        dist_inv: derive_inverse_params(leg.dist)?,
    })
}

/// Virtual knee and hip midpoint for a lower mass position.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HipConstruction {
    pub hip: Vec3,
    pub knee: Vec3,
    /// Section point on the virtual thigh, collinear with `a_m` and `m_l`.
    pub thigh_point: Vec3,
}

const REACH_TOL: f64 = 1e-9;

fn construct_hip(lower: &Vec3, geo: &AnkleGeometry, vleg: &VirtualLeg, strict: bool) -> Result<HipConstruction> {
    let p_li = vleg.dist_inv.p_li;
    let p_si = vleg.dist_inv.p_si;
    let to_mass = lower - geo.mid;
    let d = to_mass.norm();
    let side_p = d / p_li;
    let side_k = p_si * vleg.c_v;
    let side_a = vleg.a_v;
    if d < 1e-12 || side_k < 1e-12 {
        return Err(Error::Degenerate("virtual leg triangle collapsed".into()));
    }
    if strict && (side_p > side_k + side_a + REACH_TOL || side_p < (side_a - side_k).abs() - REACH_TOL) {
        return Err(Error::Unreachable(format!(
            "lower mass at {d:.5} m from the ankle midpoint is outside the virtual leg range"
        )));
    }
    let normal = to_mass.cross(&(geo.heading - geo.mid));
    let n_len = normal.norm();
    if n_len < 1e-12 {
        return Err(Error::Degenerate("virtual leg plane undefined".into()));
    }
    let cos_theta = ((side_p * side_p + side_k * side_k - side_a * side_a) / (2.0 * side_p * side_k)).clamp(-1.0, 1.0);
    let phi = PI - cos_theta.acos();
    let thigh_point = geo.mid + to_mass / p_li;
    let thigh_dir = rodrigues(&(normal / n_len), phi) * (-to_mass / d);
    Ok(HipConstruction {
        hip: thigh_point + thigh_dir * ((1.0 - p_si) * vleg.c_v),
        knee: thigh_point - thigh_dir * side_k,
        thigh_point,
    })
}

/// Hip midpoint of the virtual leg whose mass sits at `lower`; the knee bends
/// towards the foot heading.
pub fn hip_midpoint(lower: &Vec3, geo: &AnkleGeometry, vleg: &VirtualLeg) -> Result<HipConstruction> {
    construct_hip(lower, geo, vleg, true)
}

/// Range of the upper mass distance from the hip midpoint.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReachabilityLimits {
    pub d_min: f64,
    pub d_max: f64,
}

impl ReachabilityLimits {
    pub fn contains(&self, d: f64) -> bool {
        (self.d_min..=self.d_max).contains(&d)
    }
}

/// Distance bounds of the upper barycenter along the trunk axis, with the
/// arm masses stretched towards (`d_min`) or away from (`d_max`) the hips.
pub fn upper_limits(spec: &RobotSpec) -> ReachabilityLimits {
    let m_u = crate::model::aggregate_masses(spec).upper;
    let t_z = spec.trunk_offset.norm();
    let s_z = spec.shoulder_offset.z;
    let trunk = spec.trunk_mass * t_z;
    let (mut far, mut near) = (trunk, trunk);
    for arm in &spec.arms {
        far += arm.mass * (s_z + arm.mass_reach());
        near += arm.mass * (s_z - arm.mass_reach());
    }
    ReachabilityLimits {
        d_min: (near / m_u).max(0.0),
        d_max: far / m_u,
    }
}

/// Which constraints the reachability search had to give up.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TiltOutcome {
    /// Requested plan already reachable.
    Unchanged,
    /// Orientation kept, tilting inertia changed.
    InertiaAdjusted,
    /// Only the CoM kept.
    OrientationAdjusted,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FeasibleTilt {
    pub plan: TiltPlan,
    pub hip: HipConstruction,
    pub d_u: f64,
    pub d_s: f64,
    /// m_1, m_2, m_3 when a search was needed.
    pub bracket_points: Option<[Vec3; 3]>,
    /// Rod-length interval the root was found in.
    pub interval: Option<(f64, f64)>,
    /// Rod-length parameter of the accepted plan. Below the interval end
    /// nearest the CoM it parametrizes the slide along the region surface.
    pub root: f64,
    pub iterations: usize,
    pub residual: f64,
    pub outcome: TiltOutcome,
}

/// Shared inputs of the reachability function `f(l_I) = ‖h_m − m_u‖ − d_s`.
struct ReachProblem<'a> {
    r_i: Rotation,
    yaw: f64,
    region: &'a BallPairRegion,
    geo: &'a AnkleGeometry,
    vleg: &'a VirtualLeg,
    masses: &'a LowerUpperMasses,
    d_s: f64,
}

impl ReachProblem<'_> {
    /// Plan for a rod length along the fixed orientation, slid onto the
    /// region surface when the lower mass falls outside it.
    fn plan(&self, l_i: f64) -> Result<TiltPlan> {
        let mut plan = TiltPlan::new(self.r_i, DumbbellLengths::from_rod(l_i, self.masses));
        plan.adjusted = true;
        precondition(&plan, self.yaw, self.region, self.geo, self.masses)
    }

    fn eval_plan(&self, plan: &TiltPlan) -> Result<f64> {
        let hip = construct_hip(&plan.lower_pos, self.geo, self.vleg, false)?;
        Ok((hip.hip - plan.upper_pos).norm() - self.d_s)
    }

    fn f(&self, l_i: f64) -> Result<f64> {
        self.eval_plan(&self.plan(l_i)?)
    }
}

/// Finds a rod length (and, if needed, orientation) for which the upper mass
/// is within arm reach of the hip midpoint.
///
/// Brackets: `m_1`, `m_2` are where the inertia axis through the CoM leaves
/// the lower mass region (far and near end), `m_3` where the ray from the
/// ankle midpoint through the CoM does. Intervals adjacent to the current
/// rod length between `m_2` and `m_1` keep the orientation; the interval
/// `[m_3, m_2]` slides the lower mass along the region surface and only
/// keeps the CoM.
#[allow(clippy::too_many_arguments)]
pub fn reachability_solve(
    plan: &TiltPlan,
    yaw: f64,
    region: &BallPairRegion,
    geo: &AnkleGeometry,
    vleg: &VirtualLeg,
    limits: &ReachabilityLimits,
    masses: &LowerUpperMasses,
    cfg: &FeasibilityConfig,
) -> Result<FeasibleTilt> {
    let hip = construct_hip(&plan.lower_pos, geo, vleg, false)?;
    let d_u = (hip.hip - plan.upper_pos).norm();
    if limits.contains(d_u) {
        return Ok(FeasibleTilt {
            plan: *plan,
            hip: hip_midpoint(&plan.lower_pos, geo, vleg)?,
            d_u,
            d_s: d_u,
            bracket_points: None,
            interval: None,
            root: plan.l_i,
            iterations: 0,
            residual: 0.0,
            outcome: TiltOutcome::Unchanged,
        });
    }
    let too_far = d_u > limits.d_max;
    let problem = ReachProblem {
        r_i: plan.r_i,
        yaw,
        region,
        geo,
        vleg,
        masses,
        d_s: if too_far { limits.d_max } else { limits.d_min },
    };

    let rod_per_lower = masses.total() / masses.upper;
    let down = -(plan.r_i * Vec3::z());
    let (t_a, t_b) = region
        .line_interval(&Vec3::zeros(), &down)
        .ok_or_else(|| Error::Infeasible("inertia axis misses the lower mass region".into()))?;
    let l_hi = t_b.max(0.0) * rod_per_lower;
    let l_lo = t_a.max(0.0) * rod_per_lower;
    let l_cur = plan.l_i.clamp(l_lo, l_hi);

    let plan_1 = problem.plan(l_hi)?;
    let plan_2 = problem.plan(l_lo)?;
    let plan_3 = problem.plan(0.0)?;
    let f_cur = d_u - problem.d_s;
    let f_1 = problem.eval_plan(&plan_1)?;
    let f_2 = problem.eval_plan(&plan_2)?;
    let f_3 = problem.eval_plan(&plan_3)?;
    let bracket_points = [plan_1.lower_pos, plan_2.lower_pos, plan_3.lower_pos];

    let toward_lower = [((l_lo, f_2), (l_cur, f_cur)), ((l_cur, f_cur), (l_hi, f_1))];
    let mut intervals = Vec::with_capacity(3);
    if too_far {
        intervals.extend(toward_lower);
    } else {
        intervals.extend(toward_lower.iter().rev());
    }
    intervals.push(((0.0, f_3), (l_lo, f_2)));

    for (lo, hi) in intervals {
        if hi.0 - lo.0 <= 0.0 {
            continue;
        }
        let brackets = lo.1.signum() != hi.1.signum() || lo.1.abs() < cfg.tol || hi.1.abs() < cfg.tol;
        if !brackets {
            continue;
        }
        let root = regula_falsi_bracketed(|l| problem.f(l), lo, hi, cfg.tol, cfg.max_iter)?;
        let solved = problem.plan(root.x)?;
        let hip = hip_midpoint(&solved.lower_pos, geo, vleg)?;
        let outcome = if root.x >= l_lo { TiltOutcome::InertiaAdjusted } else { TiltOutcome::OrientationAdjusted };
        return Ok(FeasibleTilt {
            plan: solved,
            hip,
            d_u: (hip.hip - solved.upper_pos).norm(),
            d_s: problem.d_s,
            bracket_points: Some(bracket_points),
            interval: Some((lo.0, hi.0)),
            root: root.x,
            iterations: root.iterations,
            residual: root.residual,
            outcome,
        });
    }
    Err(Error::InfeasibleTilt { f_m1: f_1, f_m2: f_2, f_m3: f_3 })
}

/// The reachability function for diagnostics and dense scans: evaluates
/// `f(l_I)` exactly as the search does.
#[allow(clippy::too_many_arguments)]
pub fn reachability_function(
    r_i: &Rotation,
    yaw: f64,
    region: &BallPairRegion,
    geo: &AnkleGeometry,
    vleg: &VirtualLeg,
    masses: &LowerUpperMasses,
    d_s: f64,
    l_i: f64,
) -> Result<f64> {
    ReachProblem { r_i: *r_i, yaw, region, geo, vleg, masses, d_s }.f(l_i)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::yaw_rotation;
    use crate::model::load_robot_spec;
    use std::f64::consts::FRAC_PI_2;

    fn spec() -> RobotSpec {
        load_robot_spec(include_str!("../fixtures/igus_like.json")).unwrap()
    }

    fn limb(c: f64, a: f64, p_s: f64, p_l: f64) -> LimbSpec {
        LimbSpec::new(c, a, 1.0, DistributionParams::new(p_s, p_l).unwrap(), Vec3::zeros()).unwrap()
    }

    fn flat_feet(y: f64) -> FootFrames {
        FootFrames {
            left: FootFrame::new(Vec3::new(0.0, y, 0.0), Rotation::identity()),
            right: FootFrame::new(Vec3::new(0.0, -y, 0.0), Rotation::identity()),
        }
    }

    fn sagittal_geo(sep: f64) -> AnkleGeometry {
        AnkleGeometry {
            left: Vec3::new(0.0, sep / 2.0, 0.0),
            right: Vec3::new(0.0, -sep / 2.0, 0.0),
            mid: Vec3::zeros(),
            heading: Vec3::new(0.1, 0.0, 0.0),
            separation: sep,
        }
    }

    #[test]
    fn ankle_geometry_examples() {
        let mut spec = spec();
        spec.legs[0].end_offset = Vec3::new(-0.03, 0.0, 0.05);
        spec.legs[1].end_offset = Vec3::new(-0.03, 0.0, 0.05);
        let mut feet = flat_feet(0.05);
        let geo = ankle_geometry(&feet, &spec, 0.1).unwrap();
        assert!((geo.left - Vec3::new(-0.03, 0.05, 0.05)).norm() < 1e-15);
        assert_eq!(geo.mid.y, 0.0);
        assert!((geo.separation - 0.1).abs() < 1e-15);
        assert!((geo.heading - geo.mid - Vec3::new(0.1, 0.0, 0.0)).norm() < 1e-15);

        feet.left.rot = yaw_rotation(FRAC_PI_2);
        let geo = ankle_geometry(&feet, &spec, 0.1).unwrap();
        // oracle: quarter turn about z maps (−0.03, 0, 0.05) to (0, −0.03, 0.05)
        assert!((geo.left - Vec3::new(0.0, 0.02, 0.05)).norm() < 1e-15);

        feet.left.rot = yaw_rotation(PI);
        assert!(ankle_geometry(&feet, &spec, 0.1).is_err());
    }

    #[test]
    fn max_extension_examples() {
        let leg = limb(0.2, 0.2, 0.5, 2.0 / 3.0);
        let e = max_extension(0.1, &leg, 0.1).unwrap();
        assert!((e.mid_to_hip - 0.4).abs() < 1e-15);
        assert!((e.ankle_to_mass - 0.2).abs() < 1e-15);
        assert!((e.mid_to_mass - 0.2).abs() < 1e-15);

        let e = max_extension(0.3, &leg, 0.1).unwrap();
        assert!((e.mid_to_hip - 0.15f64.sqrt()).abs() < 1e-15);
        assert!((e.mid_to_hip - 0.3873).abs() < 1e-4);

        assert!(max_extension(1.0, &leg, 0.1).is_err());
    }

    #[test]
    fn lower_region_examples() {
        let ext = Extension { mid_to_hip: 0.4, ankle_to_hip: 0.4, ankle_to_mass: 0.2, mid_to_mass: 0.2 };
        let r = lower_region(&sagittal_geo(0.0), &ext).unwrap();
        assert!((r.radius - 0.2).abs() < 1e-15);
        let r = lower_region(&sagittal_geo(0.1), &ext).unwrap();
        assert!((r.radius - 0.0425f64.sqrt()).abs() < 1e-15);
        assert!((r.radius - 0.20616).abs() < 1e-5);
        assert_eq!(r.center_left.y, -r.center_right.y);
    }

    #[test]
    fn virtual_leg_examples() {
        let leg = limb(0.2, 0.2, 0.5, 2.0 / 3.0);
        let same = interpolated_leg(&[leg, leg], 0.5).unwrap();
        assert_eq!((same.c, same.a, same.dist), (leg.c, leg.a, leg.dist));

        let v = virtual_leg(&leg, &max_extension(0.1, &leg, 0.1).unwrap()).unwrap();
        assert_eq!((v.a_v, v.c_v), (0.2, 0.2));

        let ext = max_extension(0.3, &leg, 0.1).unwrap();
        let v = virtual_leg(&leg, &ext).unwrap();
        assert!((v.a_v - 0.2 * ext.mid_to_hip / 0.4).abs() < 1e-15);
        assert!((v.a_v - 0.19365).abs() < 1e-5);
        assert!((v.a_v + v.c_v - ext.mid_to_hip).abs() < 1e-15);
    }

    #[test]
    fn hip_at_full_extension_is_straight_above() {
        let leg = limb(0.2, 0.2, 0.5, 2.0 / 3.0);
        let ext = max_extension(0.1, &leg, 0.1).unwrap();
        let v = virtual_leg(&leg, &ext).unwrap();
        let reach = v.dist_inv.p_li * (v.a_v + v.dist_inv.p_si * v.c_v);
        let h = hip_midpoint(&Vec3::new(0.0, 0.0, reach), &sagittal_geo(0.1), &v).unwrap();
        assert!((h.hip - Vec3::new(0.0, 0.0, 0.4)).norm() < 1e-7);
    }

    /// Independent planar construction: sweep the knee bend, locate the mass
    /// with the forward distribution parameters, then rotate the rigid leg
    /// about the ankle until the mass lies on the requested ray.
    fn planar_oracle(leg: &VirtualLeg, mass: (f64, f64)) -> (f64, f64) {
        let mass_for_bend = |bend: f64| {
            // ankle at origin, shank straight up, knee bent forward by `bend`
            let knee = (0.0, leg.a_v);
            let hip = (knee.0 - leg.c_v * bend.sin(), knee.1 + leg.c_v * bend.cos());
            let sec = (knee.0 * (1.0 - leg.dist.p_s), knee.1 * (1.0 - leg.dist.p_s));
            let m = (hip.0 + (sec.0 - hip.0) * leg.dist.p_l, hip.1 + (sec.1 - hip.1) * leg.dist.p_l);
            (m, hip)
        };
        let target = (mass.0 * mass.0 + mass.1 * mass.1).sqrt();
        let (mut lo, mut hi) = (0.0, PI - 1e-6);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            let (m, _) = mass_for_bend(mid);
            if (m.0 * m.0 + m.1 * m.1).sqrt() > target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let (m, hip) = mass_for_bend(0.5 * (lo + hi));
        let rot = mass.0.atan2(mass.1) - m.0.atan2(m.1);
        let (s, c) = rot.sin_cos();
        (hip.0 * c + hip.1 * s, -hip.0 * s + hip.1 * c)
    }

    #[test]
    fn hip_matches_planar_construction() {
        let leg = limb(0.2, 0.2, 0.5, 2.0 / 3.0);
        let v = virtual_leg(&leg, &max_extension(0.1, &leg, 0.1).unwrap()).unwrap();
        for &(x, z) in &[(0.0, 0.15), (0.02, 0.17), (-0.03, 0.12), (0.05, 0.1)] {
            let h = hip_midpoint(&Vec3::new(x, 0.0, z), &sagittal_geo(0.1), &v).unwrap();
            let (hx, hz) = planar_oracle(&v, (x, z));
            assert!((h.hip - Vec3::new(hx, 0.0, hz)).norm() < 1e-9, "{:?} vs {:?}", h.hip, (hx, hz));
            assert!((h.knee.norm() - v.a_v).abs() < 1e-12);
            assert!(((h.hip - h.knee).norm() - v.c_v).abs() < 1e-12);
        }
    }

    #[test]
    fn hip_is_mirror_symmetric() {
        let leg = limb(0.2, 0.2, 0.45, 0.55);
        let v = virtual_leg(&leg, &max_extension(0.12, &leg, 0.1).unwrap()).unwrap();
        let geo = sagittal_geo(0.12);
        let m = Vec3::new(0.02, 0.03, 0.16);
        let a = hip_midpoint(&m, &geo, &v).unwrap().hip;
        let b = hip_midpoint(&Vec3::new(m.x, -m.y, m.z), &geo, &v).unwrap().hip;
        assert!((a - Vec3::new(b.x, -b.y, b.z)).norm() < 1e-15);
    }

    #[test]
    fn hip_rejects_unreachable_mass() {
        let leg = limb(0.2, 0.2, 0.5, 2.0 / 3.0);
        let v = virtual_leg(&leg, &max_extension(0.1, &leg, 0.1).unwrap()).unwrap();
        assert!(matches!(
            hip_midpoint(&Vec3::new(0.0, 0.0, 0.3), &sagittal_geo(0.1), &v),
            Err(Error::Unreachable(_))
        ));
        assert!(matches!(
            hip_midpoint(&Vec3::new(0.2, 0.0, 0.0), &sagittal_geo(0.1), &v),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn upper_limit_examples() {
        let mut spec = spec();
        spec.trunk_mass = 2.0;
        spec.trunk_offset = Vec3::new(0.0, 0.0, 0.15);
        spec.shoulder_offset = Vec3::new(0.0, 0.1, 0.25);
        for arm in spec.arms.iter_mut() {
            arm.mass = 0.5;
            arm.c = 0.2;
            arm.a = 0.2;
            arm.dist = DistributionParams::new(0.5, 2.0 / 3.0).unwrap();
        }
        let l = upper_limits(&spec);
        assert!((l.d_max - 0.25).abs() < 1e-12);
        assert!((l.d_min - 0.35 / 3.0).abs() < 1e-12);
        // oracle: barycenter of the trunk and both arm masses on the axis
        let arms_up = (2.0 * 0.15 + 1.0 * (0.25 + 0.2)) / 3.0;
        assert!((l.d_max - arms_up).abs() < 1e-12);

        for arm in spec.arms.iter_mut() {
            arm.mass = 0.0;
        }
        let l = upper_limits(&spec);
        assert!((l.d_min - 0.15).abs() < 1e-15 && (l.d_max - 0.15).abs() < 1e-15);
    }

    fn stance(spec: &RobotSpec) -> (AnkleGeometry, BallPairRegion, VirtualLeg) {
        let feet = flat_feet(0.055).map_com(&Vec3::new(0.0, 0.0, 0.4));
        let geo = ankle_geometry(&feet, spec, 0.1).unwrap();
        let leg = interpolated_leg(&spec.legs, 0.5).unwrap();
        let ext = max_extension(geo.separation, &leg, spec.hip_width).unwrap();
        (geo, lower_region(&geo, &ext).unwrap(), virtual_leg(&leg, &ext).unwrap())
    }

    trait MapCom {
        fn map_com(self, com: &Vec3) -> Self;
    }

    impl MapCom for FootFrames {
        fn map_com(self, com: &Vec3) -> Self {
            FootFrames { left: self.left.translated(&-com), right: self.right.translated(&-com) }
        }
    }

    #[test]
    fn precondition_keeps_inside_plans() {
        let spec = spec();
        let masses = crate::model::aggregate_masses(&spec);
        let (geo, region, _) = stance(&spec);
        let plan = TiltPlan::new(Rotation::identity(), DumbbellLengths::from_rod(0.3, &masses));
        assert!(region.contains(&plan.lower_pos));
        assert_eq!(precondition(&plan, 0.0, &region, &geo, &masses).unwrap(), plan);
    }

    #[test]
    fn precondition_slides_onto_surface() {
        let spec = spec();
        let masses = crate::model::aggregate_masses(&spec);
        let (geo, region, _) = stance(&spec);
        let tilt = Rotation::from_axis_angle(&Vec3::y_axis(), 0.9);
        let plan = TiltPlan::new(tilt, DumbbellLengths::from_rod(0.35, &masses));
        assert!(!region.contains(&plan.lower_pos));
        let p = precondition(&plan, 0.0, &region, &geo, &masses).unwrap();
        assert!(p.adjusted);
        assert!(region.contains(&p.lower_pos));
        let on_surface = [region.center_left, region.center_right]
            .iter()
            .any(|c| ((p.lower_pos - c).norm() - region.radius).abs() < 1e-9);
        assert!(on_surface);
        assert!((p.lower_pos * masses.lower + p.upper_pos * masses.upper).norm() < 1e-12);
    }

    #[test]
    fn reachable_plan_exits_early() {
        let spec = spec();
        let masses = crate::model::aggregate_masses(&spec);
        let (geo, region, vleg) = stance(&spec);
        let limits = upper_limits(&spec);
        let mut found = false;
        for k in 0..60 {
            let l_i = 0.2 + 0.005 * k as f64;
            let plan = TiltPlan::new(Rotation::identity(), DumbbellLengths::from_rod(l_i, &masses));
            if !region.contains(&plan.lower_pos) {
                continue;
            }
            let r = reachability_solve(&plan, 0.0, &region, &geo, &vleg, &limits, &masses, &FeasibilityConfig::default());
            if let Ok(ft) = r {
                if ft.outcome == TiltOutcome::Unchanged {
                    assert_eq!(ft.iterations, 0);
                    assert_eq!(ft.plan, plan);
                    found = true;
                }
            }
        }
        assert!(found);
    }
}
