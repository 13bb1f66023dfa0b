//! Solves the symmetric standing pose and checks it against the oracle.
//!
//!     cargo run --example stand_pose [constraints.json]

use fivemass::model::{load_robot_spec_file, JOINT_NAMES};
use fivemass::oracle::{compare, inertia_report, RequestedInertia};
use fivemass::posegen::{generate_pose, mirror_joints};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures");
    let spec = load_robot_spec_file(format!("{dir}/igus_like.json"))?;
    let path = std::env::args().nth(1).unwrap_or_else(|| format!("{dir}/stand.json"));
    let cs = fivemass::io::load_constraints_file(&path)?;

    let sol = generate_pose(&spec, &cs)?;
    println!("status: {}  (iterations {}, residual {:.2e})", sol.status(), sol.report.iterations, sol.report.residual);
    for (name, q) in JOINT_NAMES.iter().zip(sol.joints) {
        println!("  {name:<20} {q:>8.4}");
    }

    let layout = sol.layout.ok_or("pose is infeasible")?;
    let dev = compare(&RequestedInertia::from_constraints(&cs), &inertia_report(&layout, &spec));
    println!("CoM error        {:.3e} m", dev.com_error);
    println!("moment errors    {:.4?} kg m^2", dev.moment_errors);
    println!("orientation err  {:.4} rad", dev.orientation_error);

    let mirrored = mirror_joints(&sol.joints);
    let asym = sol.joints.iter().zip(mirrored).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    println!("left/right asymmetry {asym:.2e} rad");
    if !sol.report.flags.clamped_joints.is_empty() {
        println!("clamped: {:?}", sol.report.flags.clamped_joints);
    }
    Ok(())
}
