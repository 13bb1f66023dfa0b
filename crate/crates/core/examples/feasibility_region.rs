//! The geometry behind the reachability search for one stance: ankle
//! points, the lower-mass region, the arm reach band, and what happens to
//! the lower mass as the requested inertia axis leans further over.
//!
//!     cargo run --example feasibility_region

use fivemass::feasibility::FeasibilityConfig;
use fivemass::geom::{rodrigues, Vec3};
use fivemass::io::load_constraints_file;
use fivemass::model::load_robot_spec_file;
use fivemass::posegen::FeasibilityStage;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures");
    let spec = load_robot_spec_file(format!("{dir}/igus_like.json"))?;
    let mut cs = load_constraints_file(format!("{dir}/stand.json"))?;
    let cfg = FeasibilityConfig::default();

    let stage = FeasibilityStage::new(&spec, &cs, &cfg)?;
    let g = &stage.geo;
    println!("ankles (CoM frame): L {:.4?}  R {:.4?}", g.left.as_slice(), g.right.as_slice());
    println!("ankle separation {:.4} m, heading point {:.4?}", g.separation, g.heading.as_slice());
    println!("max ankle-mid to hip-mid {:.4} m, to lower mass {:.4} m", stage.ext.mid_to_hip, stage.ext.mid_to_mass);
    println!("lower-mass region: two balls of radius {:.4} m", stage.region.radius);
    println!("virtual leg: thigh {:.4} m, shank {:.4} m", stage.vleg.c_v, stage.vleg.a_v);
    println!("upper mass distance from hip midpoint: [{:.4}, {:.4}] m", stage.limits.d_min, stage.limits.d_max);

    println!("\n tilt  inside  slid_by   outcome              iters  d_u");
    for deg in (0..=60).step_by(10) {
        cs.r_i = rodrigues(&Vec3::x(), (deg as f64).to_radians());
        let stage = FeasibilityStage::new(&spec, &cs, &cfg)?;
        let inside = stage.region.contains(&stage.requested.lower_pos);
        let slid = (stage.plan.lower_pos - stage.requested.lower_pos).norm();
        match stage.solve(&cfg) {
            Ok(t) => println!(" {deg:>3}°  {inside:<6}  {slid:.4} m  {:<20} {:>5}  {:.4}", format!("{:?}", t.outcome), t.iterations, t.d_u),
            Err(e) => println!(" {deg:>3}°  {inside:<6}  {slid:.4} m  {e}"),
        }
    }
    Ok(())
}
