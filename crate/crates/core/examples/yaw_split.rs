//! How the requested yaw inertia is shared between the legs and the upper
//! body, and the heading the upper particles take to cancel the legs.
//!
//!     cargo run --example yaw_split

use fivemass::geom::{rodrigues, yaw_rotation, Vec3};
use fivemass::model::{aggregate_masses, load_robot_spec_file};
use fivemass::reduction::{lower_yaw_state, yaw_split, YawRequest};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures");
    let spec = load_robot_spec_file(format!("{dir}/igus_like.json"))?;
    let masses = aggregate_masses(&spec);
    let leg_masses = [spec.legs[0].mass, spec.legs[1].mass];
    let r_i = rodrigues(&Vec3::y(), 0.1);
    let center = Vec3::new(0.0, 0.0, 0.12);

    // legs splayed with the left one forward
    let legs = [Vec3::new(0.03, 0.06, -0.2), Vec3::new(-0.03, -0.06, -0.2)];
    let lower = lower_yaw_state(&legs, &leg_masses, &r_i);
    println!("legs: I_l = {:.5} kg m^2, psi_l = {:+.4} rad, spread {:.4} m", lower.i_l, lower.psi_l, lower.s_l);

    println!("\n  I_psi    s_u      psi_u    I_u      recombined");
    for i_psi in [0.005, 0.01, 0.015, 0.02, 0.03] {
        let up = yaw_split(&YawRequest { i_psi, psi_i: 0.0 }, &lower, &center, &r_i, &spec, &masses);
        let z = r_i * Vec3::z();
        let w = fivemass::reduction::upper_particle_weights(&spec);
        let perp = |p: &Vec3| {
            let d = p - center;
            (d - z * d.dot(&z)).norm_squared()
        };
        let recombined = w[0] * perp(&up.left_pos) + w[1] * perp(&up.right_pos);
        println!("  {i_psi:.3}  {:.4}  {:+.4}  {:.5}  {:.5}", up.s_u, up.psi_u, up.i_u, recombined);
    }

    let req = YawRequest { i_psi: 0.02, psi_i: 0.3 };
    let up = yaw_split(&req, &lower, &center, &yaw_rotation(0.0), &spec, &masses);
    println!("\nwith a requested heading of {:.2} rad the upper pair turns to {:+.4} rad", req.psi_i, up.psi_u);
    Ok(())
}
