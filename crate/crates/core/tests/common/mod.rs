//! Fixtures and case generators shared by the integration tests and the
//! acceptance harness.
#![allow(dead_code)]

use std::path::PathBuf;

use fivemass::feasibility::{FootFrame, FootFrames};
use fivemass::geom::{rodrigues, Rotation, Vec3};
use fivemass::io::{load_constraints_file, load_motion_file};
use fivemass::model::{load_robot_spec_file, RobotSpec};
use fivemass::motion::Motion;
use fivemass::posegen::ConstraintSet;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

pub fn spec() -> RobotSpec {
    load_robot_spec_file(fixture("igus_like.json")).expect("robot fixture")
}

pub fn stand() -> ConstraintSet {
    load_constraints_file(fixture("stand.json")).expect("stand fixture")
}

pub fn kick() -> Motion {
    load_motion_file(fixture("kick.json")).expect("kick fixture")
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_unit(rng: &mut impl Rng) -> Vec3 {
    loop {
        let v = Vec3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let n = v.norm();
        if n > 0.1 && n <= 1.0 {
            return v / n;
        }
    }
}

pub fn random_rotation(rng: &mut impl Rng) -> Rotation {
    rodrigues(&random_unit(rng), rng.gen_range(0.0..std::f64::consts::PI))
}

/// Horizontal tilt axis turned by `angle`.
pub fn tilt(rng: &mut impl Rng, max_angle: f64) -> Rotation {
    let heading = rng.gen_range(0.0..std::f64::consts::TAU);
    rodrigues(&Vec3::new(heading.cos(), heading.sin(), 0.0), rng.gen_range(0.0..max_angle))
}

/// Double support poses that are mirror images of themselves: CoM on the
/// sagittal plane, inertia tilted only forward or back, no heading.
pub fn symmetric_suite() -> Vec<ConstraintSet> {
    let base = stand();
    let mut out = Vec::new();
    for (k, z) in [0.41, 0.42, 0.43, 0.44].into_iter().enumerate() {
        for (j, i_z) in [0.13, 0.14, 0.15].into_iter().enumerate() {
            let mut cs = base;
            cs.com = Vec3::new(0.01 * (j as f64 - 1.0), 0.0, z);
            cs.i_z = i_z;
            cs.r_i = rodrigues(&Vec3::y(), 0.03 * (k as f64 - 1.5));
            out.push(cs);
        }
    }
    out
}

/// Single support with the swing foot lifted and displaced, CoM over the
/// stance foot and a tilted inertia axis.
pub fn asymmetric_suite(n: usize, seed: u64) -> Vec<ConstraintSet> {
    let mut rng = rng(seed);
    let base = stand();
    (0..n)
        .map(|_| {
            let mut cs = base;
            let stance_left = rng.gen_bool(0.5);
            let side = if stance_left { 1.0 } else { -1.0 };
            let stance = FootFrame::new(Vec3::new(0.0, 0.055 * side, 0.0), Rotation::identity());
            let swing = FootFrame::new(
                Vec3::new(rng.gen_range(-0.07..0.09), -side * rng.gen_range(0.055..0.065), rng.gen_range(0.01..0.06)),
                rodrigues(&Vec3::y(), rng.gen_range(-0.2..0.2)),
            );
            cs.feet = if stance_left {
                FootFrames { left: stance, right: swing }
            } else {
                FootFrames { left: swing, right: stance }
            };
            cs.com = Vec3::new(rng.gen_range(-0.01..0.01), side * rng.gen_range(0.03..0.05), rng.gen_range(0.415..0.43));
            cs.r_i = tilt(&mut rng, 0.1);
            cs.i_z = rng.gen_range(0.12..0.145);
            cs.i_psi = rng.gen_range(0.01..0.018);
            cs
        })
        .collect()
}

/// Requests whose dumbbell is out of arm reach, so the solver has to search:
/// rods too long (inertia adjusted) and rods too short (CoM only).
pub fn reachability_suite() -> Vec<ConstraintSet> {
    let base = stand();
    let mut out = Vec::new();
    for (k, i_z) in [0.05, 0.07, 0.09, 0.22, 0.26].into_iter().enumerate() {
        for j in 0..4 {
            let mut cs = base;
            cs.i_z = i_z;
            cs.com = Vec3::new(0.01 * (j as f64 - 1.5), 0.01 * (k as f64 - 2.0), 0.42 + 0.005 * j as f64);
            cs.r_i = rodrigues(&Vec3::new(1.0, j as f64 - 1.5, 0.0).normalize(), 0.04 * j as f64);
            out.push(cs);
        }
    }
    out
}
