//! Times the three outcome classes: all constraints met, tilting inertia
//! adjusted, and CoM only. Build with `--release`.
//!
//!     cargo run --release --example timing_scenarios [n]

use fivemass::bench::{bench, BenchConfig, Scenario};
use fivemass::io::load_constraints_file;
use fivemass::model::load_robot_spec_file;
use fivemass::posegen::Status;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures");
    let spec = load_robot_spec_file(format!("{dir}/igus_like.json"))?;
    let n = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(10_000);
    let scenarios = vec![
        Scenario::new("exact", load_constraints_file(format!("{dir}/bench_exact.json"))?, Status::Exact),
        Scenario::new("inertia_adjusted", load_constraints_file(format!("{dir}/bench_inertia.json"))?, Status::InertiaAdjusted),
        Scenario::new("com_only", load_constraints_file(format!("{dir}/bench_com.json"))?, Status::ComOnly),
    ];
    let stats = bench(&spec, &scenarios, &BenchConfig { n, ..BenchConfig::default() })?;
    println!("{:<18} {:>9} {:>9} {:>9}", "scenario", "mean µs", "sd µs", "n");
    for s in &stats {
        println!("{:<18} {:>9.3} {:>9.3} {:>9}", s.label, s.mean, s.std_dev, s.n);
    }
    Ok(())
}
