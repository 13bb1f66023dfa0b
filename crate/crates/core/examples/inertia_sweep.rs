//! Sweeps the requested tilting inertia on the standing stance and shows
//! how the solver trades it away once the arms can no longer place the
//! upper mass.
//!
//!     cargo run --example inertia_sweep

use fivemass::model::{aggregate_masses, load_robot_spec_file};
use fivemass::posegen::generate_pose;
use fivemass::reduction::dumbbell_from_inertia;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures");
    let spec = load_robot_spec_file(format!("{dir}/igus_like.json"))?;
    let mut cs = fivemass::io::load_constraints_file(format!("{dir}/stand.json"))?;
    let masses = aggregate_masses(&spec);
    println!("lower mass {:.2} kg, upper mass {:.2} kg", masses.lower, masses.upper);
    println!("\n  I_z    l_I     l_l     l_u     status            iters  I_z used  elbows");
    for k in 0..=12 {
        cs.i_z = 0.04 + 0.02 * k as f64;
        let d = dumbbell_from_inertia(cs.i_z, &masses)?;
        let sol = generate_pose(&spec, &cs)?;
        println!(
            "  {:.2}  {:.4}  {:.4}  {:.4}  {:<16}  {:>5}  {:.4}    {:>6.3} {:>6.3}",
            cs.i_z, d.l_i, d.l_l, d.l_u, sol.status().as_str(), sol.report.iterations,
            sol.report.adjusted_i_z, sol.joints[14], sol.joints[17]
        );
    }
    Ok(())
}
