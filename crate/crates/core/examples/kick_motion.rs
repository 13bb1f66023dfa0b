//! Renders the keyframed kick at 100 Hz, optionally writes the joint CSV,
//! and re-checks every frame with the oracle.
//!
//!     cargo run --release --example kick_motion [out.csv]

use std::time::Instant;

use fivemass::io::{load_motion_file, write_trajectory_csv};
use fivemass::model::{load_robot_spec_file, JOINT_NAMES};
use fivemass::motion::render_trajectory;
use fivemass::oracle::check_trajectory;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures");
    let spec = load_robot_spec_file(format!("{dir}/igus_like.json"))?;
    let motion = load_motion_file(format!("{dir}/kick.json"))?;

    let start = Instant::now();
    let traj = render_trajectory(&motion, 100.0, &spec)?;
    let elapsed = start.elapsed();
    println!("{}: {} frames in {:.2?} ({} infeasible)", motion.name, traj.frames.len(), elapsed, traj.infeasible_frames);

    // largest per-joint step between consecutive frames
    let mut worst = (0.0, 0, 0.0);
    for w in traj.frames.windows(2) {
        for (j, (a, b)) in w[0].joints.iter().zip(&w[1].joints).enumerate() {
            if (b - a).abs() > worst.0 {
                worst = ((b - a).abs(), j, w[1].t);
            }
        }
    }
    println!("max joint step {:.4} rad ({} at t = {:.2} s)", worst.0, JOINT_NAMES[worst.1], worst.2);

    let rows = check_trajectory(&spec, &motion, &traj.frames);
    let com_max = rows.iter().map(|(_, d)| d.com_error).fold(0.0, f64::max);
    let orient_max = rows.iter().map(|(_, d)| d.orientation_error).fold(0.0, f64::max);
    println!("oracle: max CoM error {com_max:.2e} m, max orientation error {orient_max:.4} rad");

    for f in traj.frames.iter().step_by(25) {
        println!(
            "  t={:>4.2}  {:<16} hip_pitch R {:>7.3}  knee R {:>6.3}  elbow L/R {:>6.3} {:>6.3}",
            f.t, f.status.as_str(), f.joints[8], f.joints[9], f.joints[14], f.joints[17]
        );
    }

    if let Some(path) = std::env::args().nth(1) {
        write_trajectory_csv(&traj, std::fs::File::create(&path)?)?;
        println!("wrote {path}");
    }
    Ok(())
}
