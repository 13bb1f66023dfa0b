mod common;

use std::f64::consts::PI;

use common::{spec, stand};
use fivemass::feasibility::{hip_midpoint, max_extension, precondition, FeasibilityConfig};
use fivemass::geom::{rodrigues, rotation_from_z_and_yaw, BallPairRegion, Rotation, Vec3};
use fivemass::limb_ik::{
    arm_chain, arm_forward, bend_from_extension, extension_from_bend, leg_chain, leg_forward, ArmJoints, LegJoints,
    LimbJoints,
};
use fivemass::model::{aggregate_masses, derive_inverse_params, mass_point_forward, mass_point_inverse, DistributionParams};
use fivemass::oracle::point_mass_inertia;
use fivemass::posegen::{generate_pose, mirror_joints, FeasibilityStage, Status};
use fivemass::reduction::{
    arm_mass_targets, dumbbell_from_inertia, lower_yaw_state, upper_particle_weights, yaw_split, YawRequest,
};
use proptest::prelude::*;

fn vec3(r: f64) -> impl Strategy<Value = Vec3> {
    (-r..r, -r..r, -r..r).prop_map(|(x, y, z)| Vec3::new(x, y, z))
}

fn unit() -> impl Strategy<Value = Vec3> {
    vec3(1.0).prop_filter("away from zero", |v| v.norm() > 0.1).prop_map(|v| v.normalize())
}

fn rotation() -> impl Strategy<Value = Rotation> {
    (unit(), 0.0..PI).prop_map(|(a, t)| rodrigues(&a, t))
}

fn small_tilt(max: f64) -> impl Strategy<Value = Rotation> {
    (0.0..2.0 * PI, 0.0..max).prop_map(|(h, t)| rodrigues(&Vec3::new(h.cos(), h.sin(), 0.0), t))
}

proptest! {
    #[test]
    fn mass_point_is_the_same_from_both_ends(
        o in vec3(1.0), k in vec3(1.0), e in vec3(1.0), p_s in 0.0..1.0f64, p_l in 0.0..1.0f64,
    ) {
        let p = DistributionParams::new(p_s, p_l).unwrap();
        let inv = derive_inverse_params(p).unwrap();
        let f = mass_point_forward(&o, &k, &e, &p);
        prop_assert!((f - mass_point_inverse(&o, &k, &e, &inv)).norm() < 1e-12);
    }

    #[test]
    fn rotations_are_orthonormal(r in rotation(), z in unit(), yaw in -PI..PI) {
        let m = r.matrix();
        prop_assert!((m.transpose() * m - nalgebra::Matrix3::identity()).norm() < 1e-12);
        prop_assert!((m.determinant() - 1.0).abs() < 1e-12);
        let q = rotation_from_z_and_yaw(&z, yaw).unwrap();
        prop_assert!((q.matrix().transpose() * q.matrix() - nalgebra::Matrix3::identity()).norm() < 1e-12);
        prop_assert!((q * Vec3::z() - z).norm() < 1e-9);
    }

    #[test]
    fn ray_exit_lands_on_the_boundary(
        gap in 0.0..0.3f64, radius in 0.2..0.5f64, frac in (-0.9..0.9f64, -0.9..0.9f64, -0.9..0.9f64), dir in unit(),
    ) {
        let region = BallPairRegion::new(Vec3::new(0.0, gap / 2.0, 0.0), Vec3::new(0.0, -gap / 2.0, 0.0), radius).unwrap();
        let inner = (radius - gap / 2.0) / 3.0f64.sqrt();
        let origin = Vec3::new(frac.0, frac.1, frac.2) * inner;
        prop_assume!(region.contains(&origin));
        let exit = region.ray_exit(&origin, &dir).unwrap();
        let far = (exit - region.center_left).norm().max((exit - region.center_right).norm());
        prop_assert!((far - radius).abs() < 1e-9);
        prop_assert!((exit - origin).normalize().dot(&dir) > 1.0 - 1e-9);
    }

    #[test]
    fn dumbbell_reproduces_inertia_and_balances(i_z in 0.0..0.5f64) {
        let masses = aggregate_masses(&spec());
        let d = dumbbell_from_inertia(i_z, &masses).unwrap();
        prop_assert!((d.tilting_inertia(&masses) - i_z).abs() < 1e-12);
        prop_assert!((masses.lower * d.l_l - masses.upper * d.l_u).abs() < 1e-12);
        prop_assert!((d.l_l + d.l_u - d.l_i).abs() < 1e-12);
    }

    #[test]
    fn yaw_split_recombines(
        legs in (vec3(0.1), vec3(0.1)), r_i in small_tilt(0.5), i_psi in 0.0..0.03f64, psi_i in -0.5..0.5f64,
        center in vec3(0.2),
    ) {
        let spec = spec();
        let masses = aggregate_masses(&spec);
        let lower = lower_yaw_state(&[legs.0, legs.1], &[spec.legs[0].mass, spec.legs[1].mass], &r_i);
        let up = yaw_split(&YawRequest { i_psi, psi_i }, &lower, &center, &r_i, &spec, &masses);
        let [w_l, w_r] = upper_particle_weights(&spec);
        prop_assert!((up.left_pos * w_l + up.right_pos * w_r - center * (w_l + w_r)).norm() < 1e-12);
        let z = r_i * Vec3::z();
        prop_assert!((up.left_pos - center).dot(&z).abs() < 1e-12);
        let spread = w_l * (up.left_pos - center).norm_squared() + w_r * (up.right_pos - center).norm_squared();
        prop_assert!((spread - up.i_u).abs() < 1e-12);
        if i_psi > lower.i_l {
            prop_assert!((lower.i_l + up.i_u - i_psi).abs() < 1e-12);
        } else {
            prop_assert_eq!(up.s_u, 0.0);
        }
        let zero = yaw_split(&YawRequest { i_psi, psi_i: 0.0 }, &lower, &center, &r_i, &spec, &masses);
        prop_assert!(zero.psi_u * lower.psi_l <= 0.0);
    }

    #[test]
    fn arm_targets_recombine_into_particles(left in vec3(0.5), right in vec3(0.5), trunk in vec3(0.5)) {
        let spec = spec();
        let (a, b) = arm_mass_targets(&left, &right, &trunk, &spec).unwrap();
        let half = spec.trunk_mass / 2.0;
        let back = |t: Vec3, m: f64| (t * m + trunk * half) / (m + half);
        prop_assert!((back(a, spec.arms[0].mass) - left).norm() < 1e-12);
        prop_assert!((back(b, spec.arms[1].mass) - right).norm() < 1e-12);
    }

    #[test]
    fn max_extension_shrinks_as_feet_spread(ds in 0.0..0.15f64, extra in 0.001..0.1f64) {
        let spec = spec();
        let w = (spec.hip_offset(fivemass::model::Side::Left) - spec.hip_offset(fivemass::model::Side::Right)).norm();
        let near = max_extension(w + ds, &spec.legs[0], w).unwrap();
        let far = max_extension(w + ds + extra, &spec.legs[0], w).unwrap();
        prop_assert!(far.mid_to_hip < near.mid_to_hip);
        prop_assert!(far.mid_to_mass < near.mid_to_mass);
    }

    #[test]
    fn bend_and_extension_are_inverse(bend in 0.0..PI, c in 0.05..0.3f64, a in 0.05..0.3f64) {
        let b = extension_from_bend(bend, c, a);
        prop_assert!((extension_from_bend(bend_from_extension(b, c, a).unwrap(), c, a) - b).abs() < 1e-12);
        if bend > 1e-3 && bend < PI - 1e-3 {
            prop_assert!((bend_from_extension(b, c, a).unwrap() - bend).abs() < 1e-6);
        }
    }

    #[test]
    fn leg_chain_round_trip(
        q in (-0.5..0.5f64, -0.4..0.4f64, -1.0..1.0f64, 0.05..2.5f64, -0.8..0.8f64, -0.4..0.4f64),
        base in small_tilt(0.4), hip in vec3(0.2),
    ) {
        let spec = spec();
        let leg = &spec.legs[0];
        let joints = LegJoints { hip_yaw: q.0, hip_roll: q.1, hip_pitch: q.2, knee_pitch: q.3, ankle_pitch: q.4, ankle_roll: q.5 };
        let fk = leg_forward(&joints, &hip, &base, leg);
        let foot = fk.ankle - fk.foot_rot * leg.end_offset;
        let sol = leg_chain(&hip, &base, &foot, &fk.foot_rot, leg);
        prop_assert!(!sol.flags.any());
        let LimbJoints::Leg(back) = sol.joints else { unreachable!() };
        let again = leg_forward(&back, &hip, &base, leg);
        prop_assert!((again.ankle - fk.ankle).norm() < 1e-9);
        prop_assert!((again.foot_rot.matrix() - fk.foot_rot.matrix()).norm() < 1e-9);
        prop_assert!((sol.mass_pos - fk.mass).norm() < 1e-9);
    }

    #[test]
    fn arm_chain_round_trip(
        q in (-2.5..1.2f64, -1.2..1.2f64, -2.7..-0.05f64), base in small_tilt(0.4), shoulder in vec3(0.2),
    ) {
        let spec = spec();
        let arm = &spec.arms[1];
        let joints = ArmJoints { shoulder_pitch: q.0, shoulder_roll: q.1, elbow_pitch: q.2 };
        let target = arm_forward(&joints, &shoulder, &base, arm).mass;
        let sol = arm_chain(&shoulder, &base, &target, arm, None).unwrap();
        prop_assert!(!sol.flags.any());
        prop_assert!((sol.mass_pos - target).norm() < 1e-9);
    }

    #[test]
    fn point_mass_inertia_is_consistent(
        pts in prop::collection::vec(vec3(0.5), 5), ms in prop::collection::vec(0.1..3.0f64, 5),
        r in rotation(), probe in vec3(0.5),
    ) {
        let a = point_mass_inertia(&pts, &ms);
        let total: f64 = ms.iter().sum();
        let bary = pts.iter().zip(&ms).map(|(p, m)| p * *m).sum::<Vec3>() / total;
        prop_assert!((a.com - bary).norm() < 1e-12);
        let turned: Vec<Vec3> = pts.iter().map(|p| r * p).collect();
        let b = point_mass_inertia(&turned, &ms);
        let m = r.matrix();
        prop_assert!((b.tensor - m * a.tensor * m.transpose()).norm() < 1e-12);
        // the trace is twice the polar moment; it is smallest about the CoM
        let polar = |c: &Vec3| pts.iter().zip(&ms).map(|(p, m)| m * (p - c).norm_squared()).sum::<f64>();
        prop_assert!((a.tensor.trace() - 2.0 * polar(&a.com)).abs() < 1e-12);
        prop_assert!(polar(&probe) >= polar(&a.com) - 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn preconditioned_lower_mass_is_in_region(r_i in small_tilt(1.0), i_z in 0.03..0.3f64) {
        let spec = spec();
        let mut cs = stand();
        cs.r_i = r_i;
        cs.i_z = i_z;
        let stage = FeasibilityStage::new(&spec, &cs, &FeasibilityConfig::default()).unwrap();
        prop_assert!(stage.region.contains(&stage.plan.lower_pos));
        let again = precondition(&stage.plan, stage.yaw, &stage.region, &stage.geo, &stage.masses).unwrap();
        prop_assert_eq!(again, stage.plan);
        if let Ok(h) = hip_midpoint(&stage.plan.lower_pos, &stage.geo, &stage.vleg) {
            prop_assert!(((h.knee - stage.geo.mid).norm() - stage.vleg.a_v).abs() < 1e-9);
            prop_assert!(((h.hip - h.knee).norm() - stage.vleg.c_v).abs() < 1e-9);
        }
    }

    #[test]
    fn mirrored_request_mirrors_the_pose(
        x in -0.01..0.01f64, y in -0.02..0.02f64, z in 0.41..0.44f64, r_i in small_tilt(0.1), psi in -0.2..0.2f64,
    ) {
        let spec = spec();
        let mut cs = stand();
        cs.com = Vec3::new(x, y, z);
        cs.r_i = r_i;
        cs.psi_i = psi;
        let a = generate_pose(&spec, &cs).unwrap();
        let b = generate_pose(&spec, &cs.mirrored()).unwrap();
        prop_assert_eq!(a.status(), b.status());
        prop_assume!(a.status() != Status::Infeasible);
        let m = mirror_joints(&a.joints);
        for (k, (x, y)) in m.iter().zip(&b.joints).enumerate() {
            prop_assert!((x - y).abs() < 1e-7, "joint {} {} vs {}", k, x, y);
        }
        prop_assert_eq!(generate_pose(&spec, &cs).unwrap(), a);
    }
}
