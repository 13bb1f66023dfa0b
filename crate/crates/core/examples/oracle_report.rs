//! Independent check of a solved pose: places the five masses from the
//! joint angles alone and compares CoM and inertia with the request.
//!
//!     cargo run --example oracle_report

use fivemass::geom::{rodrigues, Vec3};
use fivemass::model::load_robot_spec_file;
use fivemass::oracle::{base_from_foot, compare, forward_layout, inertia_report, RequestedInertia};
use fivemass::posegen::generate_pose;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures");
    let spec = load_robot_spec_file(format!("{dir}/igus_like.json"))?;
    let mut cs = fivemass::io::load_constraints_file(format!("{dir}/stand.json"))?;
    cs.com = Vec3::new(0.01, 0.02, 0.42);
    cs.r_i = rodrigues(&Vec3::new(1.0, 1.0, 0.0).normalize(), 0.08);
    cs.i_z = 0.14;

    let sol = generate_pose(&spec, &cs)?;
    println!("status {} after {} iterations", sol.status(), sol.report.iterations);
    if !sol.report.flags.clamped_joints.is_empty() {
        // arm targets that land inside the folded-elbow dead zone show up here
        println!("clamped joints: {:?}", sol.report.flags.clamped_joints);
    }

    // rebuild the floating base from the left foot and the left leg angles
    let base = base_from_foot(&spec, &cs.feet.left, &sol.leg(fivemass::model::Side::Left));
    let layout = forward_layout(&spec, &sol.joints, &base);
    let achieved = inertia_report(&layout, &spec);
    let requested = RequestedInertia::from_constraints(&cs);
    println!("CoM achieved {:.5?} requested {:.5?}", achieved.com.as_slice(), requested.com.as_slice());
    println!("inertia tensor about the CoM:\n{:.5}", achieved.tensor);
    println!("principal moments achieved {:.5?}", achieved.principal_moments);
    println!("requested (x, y, z of R_I) {:.5?}", requested.moments);
    let dev = compare(&requested, &achieved);
    println!("deviation: CoM {:.2e} m, moments {:.4?}, orientation {:.4} rad", dev.com_error, dev.moment_errors, dev.orientation_error);
    Ok(())
}
