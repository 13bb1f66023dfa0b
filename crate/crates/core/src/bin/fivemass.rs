//! Command-line front end.
//!
//! Exit codes: 0 success, 1 validation error, 2 infeasible input, 3 I/O error.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fivemass::bench::{bench, BenchConfig, Scenario};
use fivemass::error::{Error, Result};
use fivemass::io::{load_constraints_file, load_motion_file, read_trajectory_csv, write_deviation_csv, write_trajectory_csv};
use fivemass::model::load_robot_spec_file;
use fivemass::motion::render_trajectory;
use fivemass::oracle::check_trajectory;
use fivemass::posegen::{generate_pose, Status};

#[derive(Parser)]
#[command(name = "fivemass", version, about = "Analytic humanoid poses from CoM and inertia targets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one pose and write the solution as JSON.
    Solve {
        #[arg(long)]
        robot: PathBuf,
        #[arg(long)]
        constraints: PathBuf,
        /// Defaults to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Render a keyframed motion to a joint trajectory CSV.
    Play {
        #[arg(long)]
        robot: PathBuf,
        #[arg(long)]
        motion: PathBuf,
        #[arg(long, default_value_t = 100.0)]
        rate: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Recompute a trajectory's CoM and inertia and report the deviation per frame.
    Check {
        #[arg(long)]
        robot: PathBuf,
        #[arg(long)]
        trajectory: PathBuf,
        #[arg(long = "constraints-from")]
        constraints_from: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Time the exact, inertia-adjusted and CoM-only scenarios.
    Bench {
        #[arg(long)]
        robot: PathBuf,
        #[arg(long, default_value_t = 10_000)]
        n: usize,
        #[arg(long, default_value_t = 200)]
        warmup: usize,
        /// Holds bench_exact.json, bench_inertia.json and bench_com.json.
        /// Defaults to the robot file's directory.
        #[arg(long)]
        scenarios: Option<PathBuf>,
        /// Emit JSON instead of a table.
        #[arg(long)]
        json: bool,
    },
}

fn open_out(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?,
        )),
        None => Box::new(std::io::stdout().lock()),
    })
}

fn open_in(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

/// Returns true when the output describes an infeasible request.
fn run(cmd: Command) -> Result<bool> {
    match cmd {
        Command::Solve { robot, constraints, out } => {
            let spec = load_robot_spec_file(&robot)?;
            let cs = load_constraints_file(&constraints)?;
            let sol = generate_pose(&spec, &cs)?;
            let mut w = open_out(out.as_deref())?;
            serde_json::to_writer_pretty(&mut w, &sol).map_err(|e| Error::Io(e.to_string()))?;
            writeln!(w)?;
            w.flush()?;
            Ok(sol.status() == Status::Infeasible)
        }
        Command::Play { robot, motion, rate, out } => {
            let spec = load_robot_spec_file(&robot)?;
            let motion = load_motion_file(&motion)?;
            let traj = render_trajectory(&motion, rate, &spec)?;
            write_trajectory_csv(&traj, open_out(out.as_deref())?)?;
            Ok(traj.infeasible_frames > 0)
        }
        Command::Check { robot, trajectory, constraints_from, out } => {
            let spec = load_robot_spec_file(&robot)?;
            let motion = load_motion_file(&constraints_from)?;
            let frames = read_trajectory_csv(open_in(&trajectory)?)?;
            let rows = check_trajectory(&spec, &motion, &frames);
            write_deviation_csv(&rows, open_out(out.as_deref())?)?;
            Ok(rows.len() < frames.len())
        }
        Command::Bench { robot, n, warmup, scenarios, json } => {
            let spec = load_robot_spec_file(&robot)?;
            let dir = scenarios.unwrap_or_else(|| robot.parent().map(Path::to_path_buf).unwrap_or_default());
            let scenarios = load_scenarios(&dir)?;
            let stats = bench(&spec, &scenarios, &BenchConfig { n, warmup, ..BenchConfig::default() })?;
            let mut w = std::io::stdout().lock();
            if json {
                serde_json::to_writer_pretty(&mut w, &stats).map_err(|e| Error::Io(e.to_string()))?;
                writeln!(w)?;
            } else {
                writeln!(w, "{:<18} {:>10} {:>10} {:>12} {:>7}", "scenario", "mean_us", "sd_us", "median_b_us", "n")?;
                for s in &stats {
                    writeln!(w, "{:<18} {:>10.3} {:>10.3} {:>12.3} {:>7}", s.label, s.mean, s.std_dev, s.median_of_batches, s.n)?;
                }
            }
            Ok(false)
        }
    }
}

fn load_scenarios(dir: &Path) -> Result<Vec<Scenario>> {
    [("exact", Status::Exact), ("inertia_adjusted", Status::InertiaAdjusted), ("com_only", Status::ComOnly)]
        .into_iter()
        .zip(["bench_exact.json", "bench_inertia.json", "bench_com.json"])
        .map(|((label, status), file)| Ok(Scenario::new(label, load_constraints_file(dir.join(file))?, status)))
        .collect()
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Io(_) => 3,
        e if e.is_infeasible() => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli.command) {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
