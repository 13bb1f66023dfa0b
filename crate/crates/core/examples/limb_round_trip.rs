//! Closed-form leg and arm inverse kinematics, checked by running the
//! forward chains on the result.
//!
//!     cargo run --example limb_round_trip

use fivemass::geom::{rodrigues, Rotation, Vec3};
use fivemass::limb_ik::{arm_chain, arm_forward, leg_chain, leg_forward, LimbJoints};
use fivemass::model::{load_robot_spec_file, Side};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures");
    let spec = load_robot_spec_file(format!("{dir}/igus_like.json"))?;
    let leg = spec.leg(Side::Left);
    let arm = spec.arm(Side::Left);

    let hip = Vec3::new(0.0, 0.055, 0.38);
    let base = rodrigues(&Vec3::new(0.2, 1.0, 0.0).normalize(), 0.15);
    let foot_rot = rodrigues(&Vec3::z(), 0.2);
    for foot in [Vec3::new(0.05, 0.07, 0.0), Vec3::new(-0.08, 0.03, 0.06), Vec3::new(0.0, 0.055, -0.2)] {
        let sol = leg_chain(&hip, &base, &foot, &foot_rot, leg);
        let LimbJoints::Leg(q) = sol.joints else { unreachable!() };
        let fk = leg_forward(&q, &hip, &base, leg);
        let sole = fk.ankle - fk.foot_rot * leg.end_offset;
        println!("leg to {:.3?}: q = {:.4?}", foot.as_slice(), q.to_array());
        println!("    foot position error {:.2e} m, orientation error {:.2e}, flags {:?}",
            (sole - foot).norm(), (fk.foot_rot.matrix() - foot_rot.matrix()).norm(), sol.flags);
    }

    let shoulder = Vec3::new(0.0, 0.115, 0.64);
    for target in [Vec3::new(0.03, 0.13, 0.55), Vec3::new(0.09, 0.11, 0.62), Vec3::new(0.0, 0.115, 0.3)] {
        let sol = arm_chain(&shoulder, &Rotation::identity(), &target, arm, None)?;
        let LimbJoints::Arm(q) = sol.joints else { unreachable!() };
        let fk = arm_forward(&q, &shoulder, &Rotation::identity(), arm);
        println!("arm mass to {:.3?}: q = {:.4?}", target.as_slice(), q.to_array());
        println!("    reached {:.4?}, miss {:.2e} m, flags {:?}", fk.mass.as_slice(), (fk.mass - target).norm(), sol.flags);
    }
    Ok(())
}
